"""Accountable-authority variant of Gentry's exponent-inversion IBE.

A key for ``ID`` is ``(d, t) = ((h g^-t)^{1/(alpha-ID)}, t)`` with ``t`` the
family number.  The user commits to ``t0`` as ``R = g^-t0 (g1 g^-ID)^theta``,
so the PKG's answer ``(h R g^-t1)^{1/(alpha-ID)}`` unblinds to a key of family
``t0 + t1`` that the PKG cannot predict.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import ceremony
from .ceremony import CeremonyError, KeyRequest, MalformedKeyError, Round1Message, UserState
from .groups import BilinearGroup, SourceElement, TargetElement
from .sigma import PedersenBases, PoKTranscript
from .trace import TraceOutcome, TraceParams, run_trace_loop

SCHEME_TAG = 0x03


class IssuanceAborted(CeremonyError):
    """alpha - ID = 0; no key exists for this identity."""


@dataclass(frozen=True)
class GentryMpk:
    group: BilinearGroup
    g1: SourceElement
    h: SourceElement

    def __post_init__(self):
        grp = self.group
        object.__setattr__(self, "e_gg", grp.pair(grp.g, grp.g))
        object.__setattr__(self, "e_gh", grp.pair(grp.g, self.h))

    @property
    def g(self) -> SourceElement:
        return self.group.g

    def id_base(self, identity: int) -> SourceElement:
        """g1 * g^-ID."""
        return self.g1 / self.group.g ** identity

    def pedersen_bases(self, identity: int) -> PedersenBases:
        base = self.id_base(identity)
        if base.is_identity():
            raise IssuanceAborted("identity collides with the master secret")
        return PedersenBases(self.group.g ** -1, base)


@dataclass(frozen=True)
class GentryMsk:
    alpha: int


@dataclass(frozen=True)
class GentryKey:
    d: SourceElement
    t_id: int
    identity: int

    @property
    def family(self) -> int:
        return self.t_id


@dataclass(frozen=True)
class GentryBlindedKey:
    dp: SourceElement
    t1: int


@dataclass(frozen=True)
class GentryCiphertext:
    C1: SourceElement
    C2: TargetElement
    C3: TargetElement


def setup(group: BilinearGroup, rng=None):
    alpha = group.random_scalar(rng)
    h = group.random_source(rng)
    return GentryMpk(group, group.g ** alpha, h), GentryMsk(alpha)


def key_sanity_check(mpk: GentryMpk, identity: int, key: GentryKey) -> bool:
    """e(d, g1 g^-ID) == e(h, g) e(g, g)^-t."""
    return mpk.group.pair(key.d, mpk.id_base(identity)) == mpk.e_gh / mpk.e_gg ** key.t_id


def trace_whitebox(mpk: GentryMpk, identity: int, key: GentryKey) -> int | None:
    return key.t_id if key_sanity_check(mpk, identity, key) else None


# -- key issuance -------------------------------------------------------------

def keygen_user_round1(mpk: GentryMpk, identity: int, rng=None) -> tuple[UserState, Round1Message]:
    return ceremony.user_round1(SCHEME_TAG, mpk.pedersen_bases(identity), identity, rng)


def keygen_user_respond(state: UserState, challenge: int) -> PoKTranscript:
    return state.prover.transcript(challenge)


def keygen_user_request(mpk: GentryMpk, identity: int, rng=None) -> tuple[UserState, KeyRequest]:
    return ceremony.user_request(SCHEME_TAG, mpk.pedersen_bases(identity), identity, rng)


def _issue(mpk: GentryMpk, msk: GentryMsk, identity: int, R: SourceElement, rng) -> GentryBlindedKey:
    grp = mpk.group
    if (msk.alpha - identity) % grp.order == 0:
        raise IssuanceAborted("alpha - ID = 0")
    t1 = grp.random_scalar(rng)
    dp = (mpk.h * R / grp.g ** t1) ** grp.inv(msk.alpha - identity)
    return GentryBlindedKey(dp, t1)


def keygen_pkg_round2(mpk, msk, msg: Round1Message, transcript: PoKTranscript, rng=None) -> GentryBlindedKey:
    if (msk.alpha - msg.identity) % mpk.group.order == 0:
        raise IssuanceAborted("alpha - ID = 0")
    if transcript.announcement != msg.announcement:
        raise ceremony.IssuanceRefused("transcript does not match the announcement")
    ceremony.pkg_check_interactive(mpk.pedersen_bases(msg.identity), msg.R, transcript)
    return _issue(mpk, msk, msg.identity, msg.R, rng)


def keygen_pkg_respond(mpk, msk, request: KeyRequest, rng=None) -> GentryBlindedKey:
    if (msk.alpha - request.identity) % mpk.group.order == 0:
        raise IssuanceAborted("alpha - ID = 0")
    ceremony.pkg_check_request(SCHEME_TAG, mpk.pedersen_bases(request.identity), request)
    return _issue(mpk, msk, request.identity, request.R, rng)


def keygen_user_finalize(mpk: GentryMpk, state: UserState, blinded: GentryBlindedKey, rng=None) -> GentryKey:
    # rng is accepted for symmetry with the other schemes; Gentry keys are not re-randomized
    grp = mpk.group
    state.consume()
    key = GentryKey(blinded.dp / grp.g ** state.theta, (blinded.t1 + state.t0) % grp.order, state.identity)
    if not key_sanity_check(mpk, state.identity, key):
        raise MalformedKeyError("issued key fails e(d, g1 g^-ID) = e(h,g) e(g,g)^-t")
    return key


def run_ceremony(mpk, msk, identity, user_rng=None, pkg_rng=None, finalize_rng=None) -> GentryKey:
    state, msg = keygen_user_round1(mpk, identity, user_rng)
    c = ceremony.pkg_challenge(mpk.group, pkg_rng)
    blinded = keygen_pkg_round2(mpk, msk, msg, keygen_user_respond(state, c), pkg_rng)
    return keygen_user_finalize(mpk, state, blinded, finalize_rng or user_rng)


def keygen_direct(mpk: GentryMpk, msk: GentryMsk, identity: int, family: int) -> GentryKey:
    grp = mpk.group
    if (msk.alpha - identity) % grp.order == 0:
        raise IssuanceAborted("alpha - ID = 0")
    d = (mpk.h / grp.g ** family) ** grp.inv(msk.alpha - identity)
    return GentryKey(d, family % grp.order, identity)


# -- encryption ---------------------------------------------------------------

def encrypt(mpk: GentryMpk, identity: int, m: TargetElement, rng=None) -> GentryCiphertext:
    s = mpk.group.random_scalar(rng)
    return GentryCiphertext(mpk.id_base(identity) ** s, mpk.e_gg ** s, m * mpk.e_gh ** s)


def decrypt(mpk: GentryMpk, key: GentryKey, ct: GentryCiphertext) -> TargetElement:
    return ct.C3 / (mpk.group.pair(ct.C1, key.d) * ct.C2 ** key.t_id)


def master_decrypt(mpk: GentryMpk, msk: GentryMsk, identity: int, ct: GentryCiphertext) -> TargetElement:
    """PKG-side decryption: recover g^s from C1 with alpha and ignore C2."""
    grp = mpk.group
    gs = ct.C1 ** grp.inv(msk.alpha - identity)
    return ct.C3 / grp.pair(gs, mpk.h)


# -- black-box tracing --------------------------------------------------------

def make_tracing_ciphertext(mpk: GentryMpk, key: GentryKey, m: TargetElement, rng=None) -> GentryCiphertext:
    if not key_sanity_check(mpk, key.identity, key):
        raise MalformedKeyError("tracing needs a well-formed key")
    return _tracing_ciphertext(mpk, key, m, rng)


def _tracing_ciphertext(mpk, key, m, rng):
    grp = mpk.group
    s = grp.random_scalar(rng)
    s2 = grp.random_scalar(rng)
    while s2 == s:
        s2 = grp.random_scalar(rng)
    C1 = mpk.id_base(key.identity) ** s
    # same base as an honest C2, wrong exponent
    C2 = mpk.e_gg ** s2
    C3 = m * grp.pair(C1, key.d) * C2 ** key.t_id
    return GentryCiphertext(C1, C2, C3)


def trace_blackbox(mpk: GentryMpk, key: GentryKey, params: TraceParams, decoder, rng=None) -> TraceOutcome:
    if not key_sanity_check(mpk, key.identity, key):
        raise MalformedKeyError("tracing needs a well-formed key")

    def probe(r):
        m = mpk.group.random_target(r)
        return _tracing_ciphertext(mpk, key, m, r), m, None

    return run_trace_loop(params, probe, decoder, rng)
