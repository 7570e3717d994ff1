# Delaunay spread harness - source package
