"""Interacting field to second order for a non-local phi^4 coupling."""
from __future__ import annotations

from dfrqft.perturbation import canonicalize, feynman_terms, r_product, render, summary

# First order: one vertex, a commutator line to the external point, three fields left.
first = feynman_terms(1, 4)
print(render(first))
print(summary(first))

# The same sum from retarded products of T-products, Wick-expanded term by term.
oracle = canonicalize(r_product(1, 4, convention="display"))
print("rules agree with the subset formula:", oracle == first)

second = feynman_terms(2, 4)
print(summary(second))
three_lines = second.filter(lambda t: t.lines == 3)
print(render(three_lines))
