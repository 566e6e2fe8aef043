"""Weak black-box tracing loop shared by the core, Gentry and broadcast schemes."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .groups import TargetElement

PKG = "PKG"
USER = "User"


class DecoderTransportError(RuntimeError):
    """The decoder could not be queried at all (dead subprocess, broken pipe)."""


@dataclass(frozen=True)
class TraceParams:
    """Security parameter and the decoder usefulness claimed by the tracer."""
    lam: int
    epsilon: float

    def __post_init__(self):
        if self.lam < 1:
            raise ValueError("lambda must be positive")
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")

    @property
    def iterations(self) -> int:
        # decimal parse so that 16*lam/0.1 is exactly 160*lam, not 160*lam + ulp
        return math.ceil(16 * self.lam / Fraction(str(self.epsilon)))


@dataclass(frozen=True)
class TraceOutcome:
    culprit: str
    ctr: int
    L: int

    @property
    def hit_rate(self) -> float:
        return self.ctr / self.L


# make_probe(rng) -> (ciphertext, plaintext, decoder context)
ProbeFactory = Callable[[object], tuple]


def run_trace_loop(params: TraceParams, make_probe: ProbeFactory, decoder, rng=None) -> TraceOutcome:
    """Feed L tracing ciphertexts to ``decoder``; blame the PKG iff none decrypts.

    ``decoder(ct, context)`` returns a target element or ``None`` (no answer).
    Anything that is not exactly the tracer's plaintext counts as a miss.
    """
    L = params.iterations
    ctr = 0
    for _ in range(L):
        ct, m, context = make_probe(rng)
        answer = decoder(ct, context)
        if isinstance(answer, TargetElement) and answer == m:
            ctr += 1
    return TraceOutcome(PKG if ctr == 0 else USER, ctr, L)
