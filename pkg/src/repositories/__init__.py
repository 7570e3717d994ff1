# File repositories
