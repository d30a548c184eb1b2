"""Computation services: fields, matrices, forms, permutation groups and the table witnesses."""
