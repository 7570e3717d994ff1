# Point set generators
