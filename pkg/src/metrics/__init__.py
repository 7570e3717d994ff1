# Spread, sampling and neighbour metrics
