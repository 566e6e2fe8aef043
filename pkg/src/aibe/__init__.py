"""Accountable-authority identity-based encryption.

Four schemes share one bilinear-group abstraction (:mod:`aibe.groups`):

* :mod:`aibe.core`   commutative-blinding A-IBE with white-box and black-box tracing
* :mod:`aibe.cca`    its hybrid variant with two key halves
* :mod:`aibe.gentry` exponent-inversion A-IBE
* :mod:`aibe.ibbe`   Boneh-Hamburg broadcast encryption and its accountable variant
"""
from .groups import BLS12381Group, MockGroup, Tape, context_new, parse_backend
from .trace import PKG, USER, TraceOutcome, TraceParams

__version__ = "0.1.0"

__all__ = [
    "BLS12381Group", "MockGroup", "Tape", "context_new", "parse_backend",
    "PKG", "USER", "TraceOutcome", "TraceParams",
]
