"""Identity-based broadcast encryption: the plain Boneh-Hamburg scheme and its
accountable-authority variant.

A receiver set ``S`` is encoded by the coefficients ``rho`` of
``P(X) = prod (X - ID_i)``.  A key for ``ID`` carries delegation components
``T_i = (h_{i+1} h_i^-ID)^r`` which, combined with the coefficients ``y`` of
``P(X) / (X - ID)``, turn ``K1`` into a key for the whole set:

    K1 * prod T_i^{y_i} = (g2^t g3)^alpha * (z * prod h_i^{rho_i})^r

because ``rho = M1 y`` where ``M1`` is the matrix of multiplication by
``X - ID``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

from . import ceremony
from .ceremony import KeyRequest, MalformedKeyError, Round1Message, UserState
from .groups import BilinearGroup, SourceElement, TargetElement
from .sigma import PedersenBases, PoKTranscript
from .trace import TraceOutcome, TraceParams, run_trace_loop

SCHEME_TAG = 0x04
DEFAULT_N = 8


class ReceiverSetError(ValueError):
    pass


class KeyCheckError(MalformedKeyError):
    """A key relation failed; ``index`` is the failing T index, None for K1."""

    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


# -- polynomials --------------------------------------------------------------

def receiver_set(identities, p: int, N: int | None = None) -> tuple[int, ...]:
    """Canonical (sorted, reduced mod p) receiver set."""
    S = sorted(i % p for i in identities)
    if not S:
        raise ReceiverSetError("receiver set is empty")
    if len(set(S)) != len(S):
        raise ReceiverSetError("receiver set has duplicate identities")
    if N is not None and len(S) > N:
        raise ReceiverSetError(f"receiver set has {len(S)} members, the bound is {N}")
    return tuple(S)


def _mul_linear(coeffs: list[int], root: int, p: int) -> list[int]:
    """coeffs(X) * (X - root), low degree first."""
    out = [0] * (len(coeffs) + 1)
    for k, c in enumerate(coeffs):
        out[k + 1] = (out[k + 1] + c) % p
        out[k] = (out[k] - root * c) % p
    return out


def poly_expand(S, p: int) -> list[int]:
    """[rho_0, ..., rho_n] with prod (X - ID) = sum rho_k X^k."""
    S = receiver_set(S, p)
    coeffs = [1]
    for ident in S:
        coeffs = _mul_linear(coeffs, ident, p)
    return coeffs


def punctured_expand(S, identity: int, p: int) -> list[int]:
    """Coefficients of prod over S without ``identity``."""
    S = receiver_set(S, p)
    identity %= p
    if identity not in S:
        raise ReceiverSetError("identity is not in the receiver set")
    return poly_expand([i for i in S if i != identity], p) if len(S) > 1 else [1]


def m1_matrix(identity: int, n: int, p: int) -> list[list[int]]:
    """The (n+1) x n matrix of multiplication by (X - ID)."""
    M = [[0] * n for _ in range(n + 1)]
    for j in range(n):
        M[j][j] = -identity % p
        M[j + 1][j] = 1
    return M


def set_digest(S) -> bytes:
    data = b"".join(i.to_bytes((i.bit_length() + 7) // 8 or 1, "big").rjust(32, b"\0") for i in S)
    return hashlib.sha256(b"aibe/ibbe/set" + data).digest()


def _prod(elements, exponents):
    it = iter(zip(elements, exponents))
    e0, x0 = next(it)
    acc = e0 ** x0
    for e, x in it:
        acc = acc * e ** x
    return acc


def _set_element(z, h_vec, rho):
    """z * prod h_i^{rho_i}."""
    return z * _prod(h_vec, rho)


def _deleg_bases(group, h_vec, identity):
    """h_{i+1} h_i^-ID for i = 0..N-1."""
    return [h_vec[i + 1] / h_vec[i] ** identity for i in range(len(h_vec) - 1)]


# -- plain Boneh-Hamburg --------------------------------------------------------

@dataclass(frozen=True)
class BhMpk:
    group: BilinearGroup
    g1: SourceElement
    g2: SourceElement
    z: SourceElement
    h_vec: tuple[SourceElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "e_g1g2", self.group.pair(self.g1, self.g2))

    @property
    def N(self) -> int:
        return len(self.h_vec) - 1


@dataclass(frozen=True)
class IbbeMsk:
    a_vec: tuple[int, ...]
    alpha: int


@dataclass(frozen=True)
class BhKey:
    K1: SourceElement
    K2: SourceElement
    T: tuple[SourceElement, ...]
    identity: int


@dataclass(frozen=True)
class BhCiphertext:
    C0: TargetElement
    C1: SourceElement
    C2: SourceElement


def _draw_master(group, N, rng):
    if N < 1:
        raise ValueError("N must be at least 1")
    z = group.random_source(rng)
    a_vec = tuple(group.random_scalar(rng) for _ in range(N + 1))
    alpha = group.random_scalar(rng)
    g2 = group.random_source(rng)
    h_vec = tuple(group.g ** a for a in a_vec)
    return z, a_vec, alpha, g2, h_vec


def bh_setup(group: BilinearGroup, N: int = DEFAULT_N, rng=None):
    z, a_vec, alpha, g2, h_vec = _draw_master(group, N, rng)
    return BhMpk(group, group.g ** alpha, g2, z, h_vec), IbbeMsk(a_vec, alpha)


def bh_keygen(mpk: BhMpk, msk: IbbeMsk, identity: int, rng=None) -> BhKey:
    grp = mpk.group
    r = grp.random_scalar(rng)
    T = tuple(b ** r for b in _deleg_bases(grp, mpk.h_vec, identity))
    return BhKey(mpk.g2 ** msk.alpha * mpk.z ** r, grp.g ** r, T, identity % grp.order)


def bh_encrypt(mpk: BhMpk, S, m: TargetElement, rng=None) -> BhCiphertext:
    grp = mpk.group
    S = receiver_set(S, grp.order, mpk.N)
    rho = poly_expand(S, grp.order)
    s = grp.random_scalar(rng)
    return BhCiphertext(m * mpk.e_g1g2 ** s, grp.g ** s, _set_element(mpk.z, mpk.h_vec, rho) ** s)


def _combine(K1, T, y):
    return K1 * _prod(T[:len(y)], y) if y else K1


def bh_derive(mpk: BhMpk, key: BhKey, S) -> tuple[SourceElement, SourceElement]:
    grp = mpk.group
    S = receiver_set(S, grp.order, mpk.N)
    y = punctured_expand(S, key.identity, grp.order)
    return _combine(key.K1, key.T, y), key.K2


def bh_decrypt(mpk: BhMpk, key: BhKey, S, ct: BhCiphertext) -> TargetElement:
    grp = mpk.group
    D, d = bh_derive(mpk, key, S)
    return ct.C0 / grp.pair(ct.C1, D) * grp.pair(ct.C2, d)


# -- accountable variant --------------------------------------------------------

@dataclass(frozen=True)
class IbbeMpk:
    group: BilinearGroup
    g1: SourceElement
    g2: SourceElement
    g3: SourceElement
    z: SourceElement
    h_vec: tuple[SourceElement, ...]

    def __post_init__(self):
        if self.g2.is_identity():
            raise ValueError("g2 must not be the identity")
        object.__setattr__(self, "e_g1g2", self.group.pair(self.g1, self.g2))
        object.__setattr__(self, "e_g1g3", self.group.pair(self.g1, self.g3))

    @property
    def g(self) -> SourceElement:
        return self.group.g

    @property
    def N(self) -> int:
        return len(self.h_vec) - 1

    def pedersen_bases(self) -> PedersenBases:
        return PedersenBases(self.g2, self.group.g)

    def set_element(self, S) -> SourceElement:
        return _set_element(self.z, self.h_vec, poly_expand(S, self.group.order))


@dataclass(frozen=True)
class IbbeUserKey:
    K1: SourceElement
    K2: SourceElement
    T: tuple[SourceElement, ...]
    t_id: int
    identity: int

    @property
    def family(self) -> int:
        return self.t_id


@dataclass(frozen=True)
class IbbeBlindedKey:
    K1p: SourceElement
    K2p: SourceElement
    Tp: tuple[SourceElement, ...]
    t1: int


@dataclass(frozen=True)
class IbbeCiphertext:
    C0: TargetElement
    C1: SourceElement
    C2: SourceElement
    C3: TargetElement


def setup(group: BilinearGroup, N: int = DEFAULT_N, rng=None):
    """Same draws as :func:`bh_setup`, then ``g3``."""
    z, a_vec, alpha, g2, h_vec = _draw_master(group, N, rng)
    g3 = group.random_source(rng)
    return IbbeMpk(group, group.g ** alpha, g2, g3, z, h_vec), IbbeMsk(a_vec, alpha)


def key_check(mpk: IbbeMpk, identity: int, key: IbbeUserKey):
    """Raise :class:`KeyCheckError` naming the first relation that fails."""
    grp = mpk.group
    if len(key.T) != mpk.N:
        raise KeyCheckError(f"key has {len(key.T)} delegation components, expected {mpk.N}")
    if grp.pair(key.K1, grp.g) != mpk.e_g1g2 ** key.t_id * mpk.e_g1g3 * grp.pair(mpk.z, key.K2):
        raise KeyCheckError("e(K1, g) != e(g1,g2)^t e(g1,g3) e(z, K2)")
    for i, b in enumerate(_deleg_bases(grp, mpk.h_vec, identity)):
        if grp.pair(grp.g, key.T[i]) != grp.pair(key.K2, b):
            raise KeyCheckError(f"delegation component T[{i}] is inconsistent", i)


def key_sanity_check(mpk: IbbeMpk, identity: int, key: IbbeUserKey) -> bool:
    try:
        key_check(mpk, identity, key)
    except KeyCheckError:
        return False
    return True


def trace_whitebox(mpk: IbbeMpk, identity: int, key: IbbeUserKey) -> int | None:
    return key.t_id if key_sanity_check(mpk, identity, key) else None


def keygen_user_round1(mpk: IbbeMpk, identity: int, rng=None) -> tuple[UserState, Round1Message]:
    return ceremony.user_round1(SCHEME_TAG, mpk.pedersen_bases(), identity % mpk.group.order, rng)


def keygen_user_respond(state: UserState, challenge: int) -> PoKTranscript:
    return state.prover.transcript(challenge)


def keygen_user_request(mpk: IbbeMpk, identity: int, rng=None) -> tuple[UserState, KeyRequest]:
    return ceremony.user_request(SCHEME_TAG, mpk.pedersen_bases(), identity % mpk.group.order, rng)


def _issue(mpk: IbbeMpk, msk: IbbeMsk, identity: int, R: SourceElement, rng) -> IbbeBlindedKey:
    grp = mpk.group
    r = grp.random_scalar(rng)
    t1 = grp.random_scalar(rng)
    K1p = (mpk.g2 ** t1 * R * mpk.g3) ** msk.alpha * mpk.z ** r
    Tp = tuple(b ** r for b in _deleg_bases(grp, mpk.h_vec, identity))
    return IbbeBlindedKey(K1p, grp.g ** r, Tp, t1)


def keygen_pkg_round2(mpk, msk, msg: Round1Message, transcript: PoKTranscript, rng=None) -> IbbeBlindedKey:
    if transcript.announcement != msg.announcement:
        raise ceremony.IssuanceRefused("transcript does not match the announcement")
    ceremony.pkg_check_interactive(mpk.pedersen_bases(), msg.R, transcript)
    return _issue(mpk, msk, msg.identity, msg.R, rng)


def keygen_pkg_respond(mpk, msk, request: KeyRequest, rng=None) -> IbbeBlindedKey:
    ceremony.pkg_check_request(SCHEME_TAG, mpk.pedersen_bases(), request)
    return _issue(mpk, msk, request.identity, request.R, rng)


def keygen_user_finalize(mpk: IbbeMpk, state: UserState, blinded: IbbeBlindedKey, rng=None) -> IbbeUserKey:
    grp = mpk.group
    state.consume()
    if len(blinded.Tp) != mpk.N:
        raise KeyCheckError(f"reply has {len(blinded.Tp)} delegation components, expected {mpk.N}")
    r2 = grp.random_scalar(rng)
    bases = _deleg_bases(grp, mpk.h_vec, state.identity)
    key = IbbeUserKey(
        blinded.K1p / mpk.g1 ** state.theta * mpk.z ** r2,
        blinded.K2p * grp.g ** r2,
        tuple(T * b ** r2 for T, b in zip(blinded.Tp, bases)),
        (blinded.t1 + state.t0) % grp.order,
        state.identity,
    )
    key_check(mpk, state.identity, key)
    return key


def run_ceremony(mpk, msk, identity, user_rng=None, pkg_rng=None, finalize_rng=None) -> IbbeUserKey:
    state, msg = keygen_user_round1(mpk, identity, user_rng)
    c = ceremony.pkg_challenge(mpk.group, pkg_rng)
    blinded = keygen_pkg_round2(mpk, msk, msg, keygen_user_respond(state, c), pkg_rng)
    return keygen_user_finalize(mpk, state, blinded, finalize_rng or user_rng)


def keygen_direct(mpk: IbbeMpk, msk: IbbeMsk, identity: int, family: int, rng=None) -> IbbeUserKey:
    grp = mpk.group
    identity %= grp.order
    r = grp.random_scalar(rng)
    K1 = (mpk.g2 ** family * mpk.g3) ** msk.alpha * mpk.z ** r
    T = tuple(b ** r for b in _deleg_bases(grp, mpk.h_vec, identity))
    return IbbeUserKey(K1, grp.g ** r, T, family % grp.order, identity)


def encrypt(mpk: IbbeMpk, S, m: TargetElement, rng=None) -> IbbeCiphertext:
    grp = mpk.group
    S = receiver_set(S, grp.order, mpk.N)
    s = grp.random_scalar(rng)
    return IbbeCiphertext(m * mpk.e_g1g3 ** s, grp.g ** s, mpk.set_element(S) ** s, mpk.e_g1g2 ** s)


def derive(mpk: IbbeMpk, key: IbbeUserKey, S) -> tuple[SourceElement, SourceElement, int]:
    """Specialize ``key`` to the receiver set: ``(D, d, t)``."""
    grp = mpk.group
    S = receiver_set(S, grp.order, mpk.N)
    y = punctured_expand(S, key.identity, grp.order)
    return _combine(key.K1, key.T, y), key.K2, key.t_id


def decrypt(mpk: IbbeMpk, key: IbbeUserKey, S, ct: IbbeCiphertext) -> TargetElement:
    grp = mpk.group
    D, d, t = derive(mpk, key, S)
    return ct.C0 / grp.pair(ct.C1, D) * grp.pair(ct.C2, d) * ct.C3 ** t


def master_decrypt(mpk: IbbeMpk, msk: IbbeMsk, ct: IbbeCiphertext) -> TargetElement:
    """e(g1, g3)^s = e(C1, g3^alpha); C3 is never looked at."""
    return ct.C0 / mpk.group.pair(ct.C1, mpk.g3 ** msk.alpha)


def _tracing_ciphertext(mpk, S, D, d, t, m, rng):
    grp = mpk.group
    s = grp.random_scalar(rng)
    C1 = grp.g ** s
    C2 = mpk.set_element(S) ** s
    C3 = grp.random_target(rng)
    C0 = m * grp.pair(C1, D) / grp.pair(C2, d) / C3 ** t
    return IbbeCiphertext(C0, C1, C2, C3)


def make_tracing_ciphertext(mpk: IbbeMpk, key: IbbeUserKey, m: TargetElement, S=None, rng=None) -> IbbeCiphertext:
    key_check(mpk, key.identity, key)
    S = receiver_set(S if S is not None else [key.identity], mpk.group.order, mpk.N)
    D, d, t = derive(mpk, key, S)
    return _tracing_ciphertext(mpk, S, D, d, t, m, rng)


def trace_blackbox(mpk: IbbeMpk, key: IbbeUserKey, params: TraceParams, decoder, rng=None, S=None) -> TraceOutcome:
    """Decoders are called as ``decoder(ct, S)``; ``S`` defaults to ``{ID}``."""
    key_check(mpk, key.identity, key)
    S = receiver_set(S if S is not None else [key.identity], mpk.group.order, mpk.N)
    D, d, t = derive(mpk, key, S)

    def probe(r):
        m = mpk.group.random_target(r)
        return _tracing_ciphertext(mpk, S, D, d, t, m, r), m, S

    return run_trace_loop(params, probe, decoder, rng)
