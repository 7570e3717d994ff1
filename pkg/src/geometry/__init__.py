# Points, predicates and triangulation
