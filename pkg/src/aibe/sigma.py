"""Two-base Pedersen commitments and Okamoto's 3-move proof of a representation.

The prover knows ``(t0, theta)`` with ``R = a^t0 * b^theta``.  One run is

    announce:  A = a^k1 * b^k2            (fresh nonces k1, k2)
    challenge: c != 0 chosen by the verifier (or hashed, see fiat_shamir_challenge)
    respond:   z1 = k1 + c*t0, z2 = k2 + c*theta
    verify:    a^z1 * b^z2 == A * R^c

The protocol is perfectly witness indistinguishable, which is what keeps the
committed family number hidden from the key issuer.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .groups import SourceElement


class ProofError(ValueError):
    """Rejected or degenerate proof of knowledge."""


class RepresentationWitness(NamedTuple):
    t0: int
    theta: int


@dataclass(frozen=True)
class PedersenBases:
    base_a: SourceElement
    base_b: SourceElement

    def __post_init__(self):
        if self.base_a.is_identity() or self.base_b.is_identity():
            raise ValueError("Pedersen bases must not be the identity")

    @property
    def group(self):
        return self.base_a.group

    def to_bytes(self) -> bytes:
        return self.base_a.to_bytes() + self.base_b.to_bytes()


@dataclass(frozen=True)
class PoKTranscript:
    announcement: SourceElement
    challenge: int
    z1: int
    z2: int


def commit(bases: PedersenBases, w: RepresentationWitness) -> SourceElement:
    t0, theta = w
    return bases.base_a ** t0 * bases.base_b ** theta


class Prover:
    """Single-use prover state holding the witness and the nonces."""

    def __init__(self, bases: PedersenBases, witness: RepresentationWitness, rng=None, nonces=None):
        grp = bases.group
        self.bases = bases
        self.witness = RepresentationWitness(*witness)
        if nonces is None:
            nonces = (grp.random_scalar(rng), grp.random_scalar(rng))
        self._k1, self._k2 = nonces
        self.announcement = commit(bases, RepresentationWitness(self._k1, self._k2))
        self._spent = False

    @property
    def commitment(self) -> SourceElement:
        return commit(self.bases, self.witness)

    def respond(self, challenge: int) -> tuple[int, int]:
        if self._spent:
            raise ProofError("prover state already used")
        p = self.bases.group.order
        c = challenge % p
        if c == 0:
            raise ProofError("challenge must be nonzero")
        self._spent = True
        return (self._k1 + c * self.witness.t0) % p, (self._k2 + c * self.witness.theta) % p

    def transcript(self, challenge: int) -> PoKTranscript:
        z1, z2 = self.respond(challenge)
        return PoKTranscript(self.announcement, challenge % self.bases.group.order, z1, z2)


def verify(bases: PedersenBases, R: SourceElement, tr: PoKTranscript) -> bool:
    if tr.challenge % bases.group.order == 0:
        return False
    lhs = bases.base_a ** tr.z1 * bases.base_b ** tr.z2
    return lhs == tr.announcement * R ** tr.challenge


def fiat_shamir_challenge(bases: PedersenBases, R: SourceElement, announcement: SourceElement,
                          context: bytes = b"") -> int:
    """Non-interactive challenge for file-based ceremonies."""
    data = bases.to_bytes() + R.to_bytes() + announcement.to_bytes() + context
    return bases.group.hash_to_scalar(data, domain=b"aibe/pok-challenge")


def prove_noninteractive(bases: PedersenBases, witness: RepresentationWitness, rng=None,
                         context: bytes = b"") -> tuple[SourceElement, PoKTranscript]:
    prover = Prover(bases, witness, rng)
    R = prover.commitment
    c = fiat_shamir_challenge(bases, R, prover.announcement, context)
    return R, prover.transcript(c)


def verify_noninteractive(bases: PedersenBases, R: SourceElement, tr: PoKTranscript,
                          context: bytes = b"") -> bool:
    if tr.challenge != fiat_shamir_challenge(bases, R, tr.announcement, context):
        return False
    return verify(bases, R, tr)


def extract(bases: PedersenBases, R: SourceElement, tr1: PoKTranscript, tr2: PoKTranscript) -> RepresentationWitness:
    """Special-soundness extractor (rewinding); test and harness use only."""
    grp = bases.group
    if tr1.announcement != tr2.announcement:
        raise ProofError("transcripts do not share an announcement")
    if (tr1.challenge - tr2.challenge) % grp.order == 0:
        raise ProofError("extraction needs two distinct challenges")
    if not (verify(bases, R, tr1) and verify(bases, R, tr2)):
        raise ProofError("extraction needs accepting transcripts")
    dc = grp.inv(tr1.challenge - tr2.challenge)
    t0 = (tr1.z1 - tr2.z1) * dc % grp.order
    theta = (tr1.z2 - tr2.z2) * dc % grp.order
    return RepresentationWitness(t0, theta)
