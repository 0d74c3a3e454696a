"""Symbolic perturbation theory for non-local phi^n interactions."""
from __future__ import annotations

from .bogoliubov import Block, Group, GroupSum, bogoliubov_groups, display_groups, expand_groups, r_product
from .feynman import GuardError, check_guard, feynman_terms, summary
from .interaction import EffectiveInteraction, LocalFieldSpec, effective_interaction, phi_n_interaction
from .terms import (
    PAULI_JORDAN,
    WIGHTMAN,
    DiagramTerm,
    KernelFactor,
    Propagator,
    TermSum,
    canonical_term,
    canonicalize,
    coarsen_theta,
    group_pauli_jordan,
    local_limit,
    render,
    topologies,
    topology,
)
from .wick import (
    Vertex,
    VertexKind,
    contraction_count,
    external_point,
    interaction_vertex,
    monomial,
    star_wick,
    t_bar_product,
    t_product,
    wick_word,
)

__all__ = [
    "Block", "Group", "GroupSum", "bogoliubov_groups", "display_groups", "expand_groups", "r_product",
    "GuardError", "check_guard", "feynman_terms", "summary",
    "EffectiveInteraction", "LocalFieldSpec", "effective_interaction", "phi_n_interaction",
    "PAULI_JORDAN", "WIGHTMAN", "DiagramTerm", "KernelFactor", "Propagator", "TermSum",
    "canonical_term", "canonicalize", "coarsen_theta", "group_pauli_jordan", "local_limit", "render", "topologies", "topology",
    "Vertex", "VertexKind", "contraction_count", "external_point", "interaction_vertex", "monomial",
    "star_wick", "t_bar_product", "t_product", "wick_word",
]
