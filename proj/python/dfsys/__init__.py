"""Fermion systems in discrete space-time.

Fermion matrices are complex numpy arrays of shape (2m, f).
"""

from ._core import (
    InfeasibleError,
    ParseError,
    ValidationError,
    action,
    bloch_configuration,
    causal_matrix,
    chain_spectrum,
    closed_chain,
    closedform,
    constrained,
    constraint_value,
    critical,
    from_json,
    gram,
    projector,
    reconstruct,
    target_value,
    to_json,
    validate,
)

__version__ = "0.1.0"
