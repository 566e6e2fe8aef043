"""Hybrid variant with two key halves, for chosen-ciphertext settings.

Half A carries the blinded family number exactly as in :mod:`aibe.core`;
half B is issued in the clear by the PKG and only re-randomized by the user.
Decryption combines both halves with ``kappa = H(C1, C2, C3)``:

    K = KDF( e(C1, dA1 dB1^kappa) / (e(C2, dA2 dB2^kappa) C3^(dA3 + kappa dB3)) )

Ciphertexts whose first two components are inconsistent ("type I") are
rejected by a public pairing check; everything else that was tampered with
is caught by the authenticated cipher.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import ceremony
from .ceremony import KeyRequest, MalformedKeyError, Round1Message, UserState
from .core import MasterSecretKey
from .groups import BilinearGroup, SourceElement, TargetElement
from .sigma import PedersenBases, PoKTranscript
from .symmetric import DEFAULT_SUITE, get_suite

SCHEME_TAG = 0x02


class DecryptionError(Exception):
    """Hybrid ciphertext rejected."""


class TypeIInvalid(DecryptionError):
    """e(C1, F(ID)) != e(X, C2)."""


class IntegrityError(DecryptionError):
    """The authenticated cipher refused the payload."""


@dataclass(frozen=True)
class CcaMasterPublicKey:
    group: BilinearGroup
    X: SourceElement
    h: SourceElement
    Y_A: SourceElement
    Y_B: SourceElement
    Z: SourceElement
    suite: str = DEFAULT_SUITE

    def __post_init__(self):
        get_suite(self.suite)
        if self.X.is_identity() or self.h.is_identity():
            raise ValueError("X and h must not be the identity")
        g = self.group.g
        object.__setattr__(self, "e_gh", self.group.pair(g, self.h))
        object.__setattr__(self, "e_gYA", self.group.pair(g, self.Y_A))
        object.__setattr__(self, "e_gYB", self.group.pair(g, self.Y_B))

    def pedersen_bases(self) -> PedersenBases:
        return PedersenBases(self.h, self.X)

    def F(self, identity: int) -> SourceElement:
        return self.group.g ** identity * self.Z


@dataclass(frozen=True)
class HalfKey:
    d1: SourceElement
    d2: SourceElement
    d3: int


@dataclass(frozen=True)
class CcaUserKey:
    keyA: HalfKey
    keyB: HalfKey
    identity: int

    @property
    def family(self) -> int:
        return self.keyA.d3


@dataclass(frozen=True)
class CcaBlindedKey:
    keyA: HalfKey  # still blinded by the user's commitment
    keyB: HalfKey


@dataclass(frozen=True)
class CcaCiphertext:
    C1: SourceElement
    C2: SourceElement
    C3: TargetElement
    C4: bytes


def setup(group: BilinearGroup, rng=None, suite: str = DEFAULT_SUITE):
    get_suite(suite)
    x = group.random_scalar(rng)
    h = group.random_source(rng)
    Y_A = group.random_source(rng)
    Y_B = group.random_source(rng)
    Z = group.random_source(rng)
    return CcaMasterPublicKey(group, group.g ** x, h, Y_A, Y_B, Z, suite), MasterSecretKey(x)


def _half_valid(mpk: CcaMasterPublicKey, identity, half: HalfKey, e_gY: TargetElement) -> bool:
    grp = mpk.group
    return grp.pair(half.d1, mpk.X) == e_gY * mpk.e_gh ** half.d3 * grp.pair(mpk.F(identity), half.d2)


def key_sanity_check(mpk: CcaMasterPublicKey, identity, key: CcaUserKey) -> bool:
    return (_half_valid(mpk, identity, key.keyA, mpk.e_gYA)
            and _half_valid(mpk, identity, key.keyB, mpk.e_gYB))


def trace_whitebox(mpk: CcaMasterPublicKey, identity, key: CcaUserKey) -> int | None:
    return key.keyA.d3 if key_sanity_check(mpk, identity, key) else None


# -- key issuance -------------------------------------------------------------

def keygen_user_round1(mpk: CcaMasterPublicKey, identity: int, rng=None) -> tuple[UserState, Round1Message]:
    return ceremony.user_round1(SCHEME_TAG, mpk.pedersen_bases(), identity, rng)


def keygen_user_respond(state: UserState, challenge: int) -> PoKTranscript:
    return state.prover.transcript(challenge)


def keygen_user_request(mpk: CcaMasterPublicKey, identity: int, rng=None) -> tuple[UserState, KeyRequest]:
    return ceremony.user_request(SCHEME_TAG, mpk.pedersen_bases(), identity, rng)


def _issue(mpk, msk, identity, R, rng) -> CcaBlindedKey:
    grp = mpk.group
    rA = grp.random_scalar(rng)
    tA1 = grp.random_scalar(rng)
    rB = grp.random_scalar(rng)
    tB = grp.random_scalar(rng)
    inv_x = grp.inv(msk.x)
    F = mpk.F(identity)
    keyA = HalfKey((mpk.Y_A * R * mpk.h ** tA1) ** inv_x * F ** rA, mpk.X ** rA, tA1)
    keyB = HalfKey((mpk.Y_B * mpk.h ** tB) ** inv_x * F ** rB, mpk.X ** rB, tB)
    return CcaBlindedKey(keyA, keyB)


def keygen_pkg_round2(mpk, msk, msg: Round1Message, transcript: PoKTranscript, rng=None) -> CcaBlindedKey:
    if transcript.announcement != msg.announcement:
        raise ceremony.IssuanceRefused("transcript does not match the announcement")
    ceremony.pkg_check_interactive(mpk.pedersen_bases(), msg.R, transcript)
    return _issue(mpk, msk, msg.identity, msg.R, rng)


def keygen_pkg_respond(mpk, msk, request: KeyRequest, rng=None) -> CcaBlindedKey:
    ceremony.pkg_check_request(SCHEME_TAG, mpk.pedersen_bases(), request)
    return _issue(mpk, msk, request.identity, request.R, rng)


def keygen_user_finalize(mpk: CcaMasterPublicKey, state: UserState, blinded: CcaBlindedKey, rng=None) -> CcaUserKey:
    grp = mpk.group
    state.consume()
    rA = grp.random_scalar(rng)
    rB = grp.random_scalar(rng)
    F = mpk.F(state.identity)
    a, b = blinded.keyA, blinded.keyB
    keyA = HalfKey(a.d1 / grp.g ** state.theta * F ** rA, a.d2 * mpk.X ** rA, (a.d3 + state.t0) % grp.order)
    keyB = HalfKey(b.d1 * F ** rB, b.d2 * mpk.X ** rB, b.d3)
    if not _half_valid(mpk, state.identity, keyA, mpk.e_gYA):
        raise MalformedKeyError("key half A fails its sanity relation")
    if not _half_valid(mpk, state.identity, keyB, mpk.e_gYB):
        raise MalformedKeyError("key half B fails its sanity relation")
    return CcaUserKey(keyA, keyB, state.identity)


def run_ceremony(mpk, msk, identity, user_rng=None, pkg_rng=None, finalize_rng=None) -> CcaUserKey:
    state, msg = keygen_user_round1(mpk, identity, user_rng)
    c = ceremony.pkg_challenge(mpk.group, pkg_rng)
    blinded = keygen_pkg_round2(mpk, msk, msg, keygen_user_respond(state, c), pkg_rng)
    return keygen_user_finalize(mpk, state, blinded, finalize_rng or user_rng)


def keygen_direct(mpk, msk, identity, family_a: int, family_b: int, rng=None) -> CcaUserKey:
    grp = mpk.group
    inv_x = grp.inv(msk.x)
    F = mpk.F(identity)
    rA, rB = grp.random_scalar(rng), grp.random_scalar(rng)
    keyA = HalfKey((mpk.Y_A * mpk.h ** family_a) ** inv_x * F ** rA, mpk.X ** rA, family_a % grp.order)
    keyB = HalfKey((mpk.Y_B * mpk.h ** family_b) ** inv_x * F ** rB, mpk.X ** rB, family_b % grp.order)
    return CcaUserKey(keyA, keyB, identity)


# -- encryption ---------------------------------------------------------------

def kappa(mpk: CcaMasterPublicKey, C1: SourceElement, C2: SourceElement, C3: TargetElement) -> int:
    """TCR hash over the canonical encodings of C1 || C2 || C3."""
    data = C1.to_bytes() + C2.to_bytes() + C3.to_bytes()
    return get_suite(mpk.suite).tcr_hash(mpk.group, data)


def encapsulate(mpk: CcaMasterPublicKey, identity: int, rng=None):
    """Return ``(C1, C2, C3, psi)`` where ``psi`` is the KDF input."""
    s = mpk.group.random_scalar(rng)
    C1, C2, C3 = mpk.X ** s, mpk.F(identity) ** s, mpk.e_gh ** s
    k = kappa(mpk, C1, C2, C3)
    psi = mpk.e_gYA ** s * mpk.e_gYB ** (k * s)
    return C1, C2, C3, psi


def decapsulate(mpk: CcaMasterPublicKey, key: CcaUserKey, C1, C2, C3) -> TargetElement:
    grp = mpk.group
    k = kappa(mpk, C1, C2, C3)
    A, B = key.keyA, key.keyB
    num = grp.pair(C1, A.d1 * B.d1 ** k)
    den = grp.pair(C2, A.d2 * B.d2 ** k) * C3 ** (A.d3 + k * B.d3)
    return num / den


def is_type1_valid(mpk: CcaMasterPublicKey, identity: int, ct: CcaCiphertext) -> bool:
    grp = mpk.group
    return grp.pair(ct.C1, mpk.F(identity)) == grp.pair(mpk.X, ct.C2)


def encrypt(mpk: CcaMasterPublicKey, identity: int, message: bytes, rng=None) -> CcaCiphertext:
    suite = get_suite(mpk.suite)
    C1, C2, C3, psi = encapsulate(mpk, identity, rng)
    return CcaCiphertext(C1, C2, C3, suite.aead_encrypt(suite.kdf(psi), message))


def decrypt(mpk: CcaMasterPublicKey, key: CcaUserKey, ct: CcaCiphertext) -> bytes:
    """Plaintext bytes; raises :class:`TypeIInvalid` or :class:`IntegrityError`."""
    if not is_type1_valid(mpk, key.identity, ct):
        raise TypeIInvalid("ciphertext components C1, C2 are inconsistent")
    suite = get_suite(mpk.suite)
    psi = decapsulate(mpk, key, ct.C1, ct.C2, ct.C3)
    m = suite.aead_decrypt(suite.kdf(psi), ct.C4)
    if m is None:
        raise IntegrityError("authenticated decryption failed")
    return m
