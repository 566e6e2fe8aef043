"""Pieces of the blinded key-issuance ceremony shared by every scheme.

Each scheme fixes its own Pedersen bases and its own issuance/unblinding
algebra; the user commitment, the proof of knowledge and the message shapes
are identical and live here.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import sigma
from .groups import SourceElement
from .sigma import PedersenBases, PoKTranscript, RepresentationWitness


class CeremonyError(Exception):
    """Base class for the ⊥ outcomes of key issuance."""


class IssuanceRefused(CeremonyError):
    """The PKG rejected the user's proof of knowledge."""


class MalformedKeyError(CeremonyError):
    """The unblinded key failed its sanity relation."""


def identity_bytes(group, identity) -> bytes:
    """Canonical bytes of an identity (scalar or Waters bit string)."""
    if isinstance(identity, str):
        return b"W" + identity.encode()
    return group.encode_scalar(identity)


@dataclass(frozen=True)
class Round1Message:
    """User -> PKG: identity, commitment R and the sigma announcement."""
    identity: object
    R: SourceElement
    announcement: SourceElement


@dataclass(frozen=True)
class KeyRequest:
    """Non-interactive form of round 1: commitment plus a full transcript."""
    identity: object
    R: SourceElement
    transcript: PoKTranscript


class UserState:
    """Secret, single-use user side of one ceremony."""

    def __init__(self, scheme: int, bases: PedersenBases, identity, witness: RepresentationWitness,
                 prover: sigma.Prover | None = None):
        self.scheme = scheme
        self.bases = bases
        self.identity = identity
        self.witness = RepresentationWitness(*witness)
        # None once the proof has been produced, e.g. for state restored from disk
        self.prover = prover
        self.R = sigma.commit(bases, self.witness)
        self.used = False

    @property
    def t0(self) -> int:
        return self.witness.t0

    @property
    def theta(self) -> int:
        return self.witness.theta

    def consume(self):
        if self.used:
            raise CeremonyError("ceremony state already used")
        self.used = True


def fs_context(scheme: int, group, identity) -> bytes:
    return bytes([scheme]) + identity_bytes(group, identity)


def user_round1(scheme: int, bases: PedersenBases, identity, rng=None,
                witness: RepresentationWitness | None = None) -> tuple[UserState, Round1Message]:
    grp = bases.group
    if witness is None:
        witness = RepresentationWitness(grp.random_scalar(rng), grp.random_scalar(rng))
    prover = sigma.Prover(bases, witness, rng)
    state = UserState(scheme, bases, identity, witness, prover)
    return state, Round1Message(identity, state.R, prover.announcement)


def user_request(scheme: int, bases: PedersenBases, identity, rng=None) -> tuple[UserState, KeyRequest]:
    """Round 1 with a Fiat-Shamir challenge, for file based ceremonies."""
    state, msg = user_round1(scheme, bases, identity, rng)
    c = sigma.fiat_shamir_challenge(bases, msg.R, msg.announcement,
                                    fs_context(scheme, bases.group, identity))
    return state, KeyRequest(identity, msg.R, state.prover.transcript(c))


def pkg_challenge(group, rng=None) -> int:
    return group.random_scalar(rng)


def pkg_check_interactive(bases: PedersenBases, R: SourceElement, tr: PoKTranscript):
    if not sigma.verify(bases, R, tr):
        raise IssuanceRefused("proof of knowledge of the commitment opening failed")


def pkg_check_request(scheme: int, bases: PedersenBases, req: KeyRequest):
    ctx = fs_context(scheme, bases.group, req.identity)
    if not sigma.verify_noninteractive(bases, req.R, req.transcript, ctx):
        raise IssuanceRefused("proof of knowledge of the commitment opening failed")
