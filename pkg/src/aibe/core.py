"""Accountable-authority IBE over a symmetric pairing (commutative blinding).

Keys have the shape ``((Y h^t)^{1/x} F(ID)^r, X^r, t)`` where ``t`` is the key
family.  The family is fixed jointly during issuance: the user commits to
``t0`` with ``R = h^t0 X^theta`` and the PKG adds its own ``t1`` without ever
learning ``t0``.  ``F`` is either the Boneh-Boyen map ``g^ID Z`` or Waters'
bitwise hash.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

from . import ceremony
from .ceremony import KeyRequest, MalformedKeyError, Round1Message, UserState
from .groups import BilinearGroup, SourceElement, TargetElement
from .sigma import PedersenBases, PoKTranscript
from .trace import TraceOutcome, TraceParams, run_trace_loop

SCHEME_TAG = 0x01

BONEH_BOYEN = 0x00
WATERS = 0x01


@dataclass(frozen=True)
class MasterPublicKey:
    group: BilinearGroup
    X: SourceElement
    Y: SourceElement
    Z: SourceElement
    h: SourceElement
    waters: tuple[SourceElement, ...] | None = None  # (u', u_1, ..., u_n)

    def __post_init__(self):
        if self.X.is_identity() or self.h.is_identity():
            raise ValueError("X and h must not be the identity")
        # cached so that encryption needs no pairing
        object.__setattr__(self, "e_gh", self.group.pair(self.group.g, self.h))
        object.__setattr__(self, "e_gY", self.group.pair(self.group.g, self.Y))

    @property
    def hash_mode(self) -> int:
        return BONEH_BOYEN if self.waters is None else WATERS

    @property
    def n_bits(self) -> int:
        return 0 if self.waters is None else len(self.waters) - 1

    def pedersen_bases(self) -> PedersenBases:
        return PedersenBases(self.h, self.X)


@dataclass(frozen=True)
class MasterSecretKey:
    x: int


@dataclass(frozen=True)
class UserKey:
    d1: SourceElement
    d2: SourceElement
    d3: int
    identity: object

    @property
    def family(self) -> int:
        return self.d3


@dataclass(frozen=True)
class BlindedKey:
    d1p: SourceElement
    d2p: SourceElement
    d3p: int


@dataclass(frozen=True)
class Ciphertext:
    C1: SourceElement
    C2: SourceElement
    C3: TargetElement
    C4: TargetElement


def setup(group: BilinearGroup, rng=None, waters_bits: int | None = None):
    """Draw ``x`` then ``h, Y, Z`` (and the Waters vector when requested)."""
    x = group.random_scalar(rng)
    h = group.random_source(rng)
    Y = group.random_source(rng)
    Z = group.random_source(rng)
    waters = None
    if waters_bits is not None:
        if waters_bits < 1:
            raise ValueError("Waters hashing needs at least one identity bit")
        waters = tuple(group.random_source(rng) for _ in range(waters_bits + 1))
    mpk = MasterPublicKey(group, group.g ** x, Y, Z, h, waters)
    return mpk, MasterSecretKey(x)


def waters_identity(name: str | bytes, n_bits: int) -> str:
    """Derive an ``n_bits`` long identity bit string from a name."""
    if isinstance(name, str):
        name = name.encode()
    out = b""
    counter = 0
    while len(out) * 8 < n_bits:
        out += hashlib.sha256(counter.to_bytes(4, "big") + name).digest()
        counter += 1
    return bin(int.from_bytes(out, "big"))[2:].zfill(len(out) * 8)[:n_bits]


def identity_hash(mpk: MasterPublicKey, identity) -> SourceElement:
    """F(ID): ``g^ID * Z`` or ``u' * prod u_i^{bit_i}``."""
    if mpk.waters is None:
        if isinstance(identity, str):
            raise ValueError("Boneh-Boyen mode takes scalar identities")
        return mpk.group.g ** identity * mpk.Z
    if not isinstance(identity, str) or len(identity) != mpk.n_bits or set(identity) - {"0", "1"}:
        raise ValueError(f"Waters mode takes {mpk.n_bits}-bit identity strings")
    acc = mpk.waters[0]
    for bit, u in zip(identity, mpk.waters[1:]):
        if bit == "1":
            acc = acc * u
    return acc


# -- key issuance -------------------------------------------------------------

def keygen_user_round1(mpk: MasterPublicKey, identity, rng=None) -> tuple[UserState, Round1Message]:
    identity_hash(mpk, identity)  # reject malformed identities before committing
    return ceremony.user_round1(SCHEME_TAG, mpk.pedersen_bases(), identity, rng)


def keygen_user_respond(state: UserState, challenge: int) -> PoKTranscript:
    return state.prover.transcript(challenge)


def keygen_user_request(mpk: MasterPublicKey, identity, rng=None) -> tuple[UserState, KeyRequest]:
    identity_hash(mpk, identity)
    return ceremony.user_request(SCHEME_TAG, mpk.pedersen_bases(), identity, rng)


def _issue(mpk, msk, identity, R, rng) -> BlindedKey:
    grp = mpk.group
    r1 = grp.random_scalar(rng)
    t1 = grp.random_scalar(rng)
    d1p = (mpk.Y * R * mpk.h ** t1) ** grp.inv(msk.x) * identity_hash(mpk, identity) ** r1
    return BlindedKey(d1p, mpk.X ** r1, t1)


def keygen_pkg_round2(mpk: MasterPublicKey, msk: MasterSecretKey, msg: Round1Message,
                      transcript: PoKTranscript, rng=None) -> BlindedKey:
    """Verify the interactive proof and return the blinded key."""
    if transcript.announcement != msg.announcement:
        raise ceremony.IssuanceRefused("transcript does not match the announcement")
    ceremony.pkg_check_interactive(mpk.pedersen_bases(), msg.R, transcript)
    return _issue(mpk, msk, msg.identity, msg.R, rng)


def keygen_pkg_respond(mpk: MasterPublicKey, msk: MasterSecretKey, request: KeyRequest, rng=None) -> BlindedKey:
    """Non-interactive variant of round 2."""
    ceremony.pkg_check_request(SCHEME_TAG, mpk.pedersen_bases(), request)
    return _issue(mpk, msk, request.identity, request.R, rng)


def keygen_user_finalize(mpk: MasterPublicKey, state: UserState, blinded: BlindedKey, rng=None) -> UserKey:
    """Unblind, re-randomize with a fresh r'' and enforce the sanity relation."""
    grp = mpk.group
    state.consume()
    r2 = grp.random_scalar(rng)
    F = identity_hash(mpk, state.identity)
    key = UserKey(
        blinded.d1p / grp.g ** state.theta * F ** r2,
        blinded.d2p * mpk.X ** r2,
        (blinded.d3p + state.t0) % grp.order,
        state.identity,
    )
    if not key_sanity_check(mpk, state.identity, key):
        raise MalformedKeyError("issued key fails e(d1,X) = e(Y,g) e(h,g)^d3 e(F(ID),d2)")
    return key


def run_ceremony(mpk, msk, identity, user_rng=None, pkg_rng=None, finalize_rng=None) -> UserKey:
    """Interactive ceremony in one process (both parties honest)."""
    state, msg = keygen_user_round1(mpk, identity, user_rng)
    c = ceremony.pkg_challenge(mpk.group, pkg_rng)
    blinded = keygen_pkg_round2(mpk, msk, msg, keygen_user_respond(state, c), pkg_rng)
    return keygen_user_finalize(mpk, state, blinded, finalize_rng or user_rng)


def keygen_direct(mpk: MasterPublicKey, msk: MasterSecretKey, identity, family: int, rng=None) -> UserKey:
    """Key of a chosen family built straight from the master secret.

    Only a (possibly cheating) PKG or a test can do this; the ceremony never
    lets the PKG pick the family.
    """
    grp = mpk.group
    r = grp.random_scalar(rng)
    d1 = (mpk.Y * mpk.h ** family) ** grp.inv(msk.x) * identity_hash(mpk, identity) ** r
    return UserKey(d1, mpk.X ** r, family % grp.order, identity)


# -- white-box tracing --------------------------------------------------------

def key_sanity_check(mpk: MasterPublicKey, identity, key: UserKey) -> bool:
    grp = mpk.group
    try:
        F = identity_hash(mpk, identity)
    except ValueError:
        return False
    lhs = grp.pair(key.d1, mpk.X)
    rhs = mpk.e_gY * mpk.e_gh ** key.d3 * grp.pair(F, key.d2)
    return lhs == rhs


def trace_whitebox(mpk: MasterPublicKey, identity, key: UserKey) -> int | None:
    """Family number of a well-formed key, ``None`` (⊥) otherwise."""
    return key.d3 if key_sanity_check(mpk, identity, key) else None


# -- encryption ---------------------------------------------------------------

def encrypt(mpk: MasterPublicKey, identity, m: TargetElement, rng=None) -> Ciphertext:
    s = mpk.group.random_scalar(rng)
    return Ciphertext(mpk.X ** s, identity_hash(mpk, identity) ** s, mpk.e_gh ** s, m * mpk.e_gY ** s)


def decrypt(mpk: MasterPublicKey, key: UserKey, ct: Ciphertext) -> TargetElement:
    grp = mpk.group
    mask = grp.pair(ct.C1, key.d1) / (grp.pair(ct.C2, key.d2) * ct.C3 ** key.d3)
    return ct.C4 / mask


def is_publicly_valid(mpk: MasterPublicKey, identity, ct: Ciphertext) -> bool:
    """e(C1, F(ID)) == e(X, C2); the only check available without secrets."""
    grp = mpk.group
    return grp.pair(ct.C1, identity_hash(mpk, identity)) == grp.pair(mpk.X, ct.C2)


def master_decrypt(mpk: MasterPublicKey, msk: MasterSecretKey, ct: Ciphertext) -> TargetElement:
    """What the PKG can do with x alone: unmask with e(C1, Y^{1/x}), ignoring C3."""
    return ct.C4 / mpk.group.pair(ct.C1, mpk.Y ** mpk.group.inv(msk.x))


# -- black-box tracing --------------------------------------------------------

def make_tracing_ciphertext(mpk: MasterPublicKey, identity, key: UserKey, m: TargetElement, rng=None) -> Ciphertext:
    """Ciphertext whose C3 uses s' != s, so its plaintext depends on the family."""
    if not key_sanity_check(mpk, identity, key):
        raise MalformedKeyError("tracing needs a well-formed key")
    return _tracing_ciphertext(mpk, identity, key, m, rng)


def _tracing_ciphertext(mpk, identity, key, m, rng):
    grp = mpk.group
    s = grp.random_scalar(rng)
    s2 = grp.random_scalar(rng)
    while s2 == s:
        s2 = grp.random_scalar(rng)
    C1 = mpk.X ** s
    C2 = identity_hash(mpk, identity) ** s
    C3 = mpk.e_gh ** s2
    C4 = m * grp.pair(C1, key.d1) / (grp.pair(C2, key.d2) * C3 ** key.d3)
    return Ciphertext(C1, C2, C3, C4)


def trace_blackbox(mpk: MasterPublicKey, key: UserKey, params: TraceParams, decoder, rng=None) -> TraceOutcome:
    """Decide whether a decoder for ``key.identity`` comes from the PKG or the user."""
    identity = key.identity
    if not key_sanity_check(mpk, identity, key):
        raise MalformedKeyError("tracing needs a well-formed key")

    def probe(r):
        m = mpk.group.random_target(r)
        return _tracing_ciphertext(mpk, identity, key, m, r), m, None

    return run_trace_loop(params, probe, decoder, rng)
