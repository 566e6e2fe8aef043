import random

import pytest
from hypothesis import given, strategies as st

from aibe import MockGroup, TraceParams, USER, PKG, ceremony, decoders, ibbe, schemes
from aibe.ibbe import KeyCheckError, ReceiverSetError

import oracle

P = 101


def ident_sets(max_size=8):
    return st.lists(st.integers(min_value=0, max_value=P - 1), min_size=1, max_size=max_size, unique=True)


@pytest.fixture
def env4(gbig):
    rng = random.Random(41)
    mpk, msk = ibbe.setup(gbig, 4, rng)
    key = ibbe.run_ceremony(mpk, msk, 11, rng, rng)
    return mpk, msk, key, rng


# -- polynomials ---------------------------------------------------------------

def test_poly_expand_examples():
    assert ibbe.poly_expand([2, 3], P) == [6, 96, 1]
    assert ibbe.poly_expand([5], P) == [P - 5, 1]
    assert ibbe.poly_expand([3, 2], P) == ibbe.poly_expand([2, 3], P)
    with pytest.raises(ReceiverSetError):
        ibbe.poly_expand([2, 2], P)


def test_punctured_examples():
    assert ibbe.punctured_expand([2, 3], 2, P) == [P - 3, 1]
    assert ibbe.punctured_expand([9], 9, P) == [1]
    with pytest.raises(ReceiverSetError):
        ibbe.punctured_expand([2, 3], 4, P)


def test_receiver_set_rules():
    assert ibbe.receiver_set([7, 3, 105], P) == (3, 4, 7)
    with pytest.raises(ReceiverSetError):
        ibbe.receiver_set([], P)
    with pytest.raises(ReceiverSetError):
        ibbe.receiver_set(range(9), P, N=8)


@given(ident_sets())
def test_poly_expand_matches_naive(S):
    rho = ibbe.poly_expand(S, P)
    assert rho == oracle.poly_from_roots(sorted(S), P)
    assert rho[-1] == 1
    # brute force over the whole field: the roots are exactly S
    assert {x for x in range(P) if oracle.poly_eval(rho, x, P) == 0} == set(S)


@given(ident_sets(), st.data())
def test_convolution_identity(S, data):
    ID = data.draw(st.sampled_from(S))
    y = ibbe.punctured_expand(S, ID, P)
    rho = ibbe.poly_expand(S, P)
    assert oracle.poly_mul(y, [-ID % P, 1], P) == rho
    assert oracle.matvec(ibbe.m1_matrix(ID, len(y), P), y, P) == rho


def test_m1_transpose_against_h_exponents(g101):
    rng = random.Random(3)
    mpk, msk = ibbe.setup(g101, 8, rng)
    for _ in range(20):
        ID = rng.randrange(P)
        M = ibbe.m1_matrix(ID, 8, P)
        Mt = [list(col) for col in zip(*M)]
        expect = oracle.matvec(Mt, list(msk.a_vec), P)
        got = [g101.log(b) for b in ibbe._deleg_bases(g101, mpk.h_vec, ID)]
        assert got == expect == [(msk.a_vec[i + 1] - ID * msk.a_vec[i]) % P for i in range(8)]


# -- plain scheme ----------------------------------------------------------------

def _bh_relation(mpk, D, d, S):
    grp = mpk.group
    rho = ibbe.poly_expand(S, grp.order)
    return grp.pair(D, grp.g) == mpk.e_g1g2 * grp.pair(ibbe._set_element(mpk.z, mpk.h_vec, rho), d)


@pytest.mark.parametrize("backend,tapes", [("mock", 50), ("curve", 3)])
def test_bh_roundtrip(backend, tapes, curve):
    grp = MockGroup(2 ** 61 - 1) if backend == "mock" else curve
    rng = random.Random(5)
    mpk, msk = ibbe.bh_setup(grp, 8, rng)
    for n in (1, 4, 8):
        for _ in range(tapes):
            S = [grp.random_scalar(rng) for _ in range(n)]
            key = ibbe.bh_keygen(mpk, msk, S[-1], rng)
            m = grp.random_target(rng)
            assert ibbe.bh_decrypt(mpk, key, S, ibbe.bh_encrypt(mpk, S, m, rng)) == m
            if backend == "mock":
                assert _bh_relation(mpk, *ibbe.bh_derive(mpk, key, S), S)


def test_bh_outsider_rejected(gbig):
    rng = random.Random(6)
    mpk, msk = ibbe.bh_setup(gbig, 4, rng)
    key = ibbe.bh_keygen(mpk, msk, 50, rng)
    ct = ibbe.bh_encrypt(mpk, [1, 2], gbig.gt, rng)
    with pytest.raises(ReceiverSetError):
        ibbe.bh_decrypt(mpk, key, [1, 2], ct)


# -- accountable scheme ----------------------------------------------------------------

def test_ceremony_n4_checks(g101):
    rng = random.Random(8)
    mpk, msk = ibbe.setup(g101, 4, rng)
    state, msg = ibbe.keygen_user_round1(mpk, 9, rng)
    c = ceremony.pkg_challenge(g101, rng)
    blinded = ibbe.keygen_pkg_round2(mpk, msk, msg, ibbe.keygen_user_respond(state, c), rng)
    key = ibbe.keygen_user_finalize(mpk, state, blinded, rng)
    assert key.family == (state.t0 + blinded.t1) % P
    # exponent oracle: K1 = (g2^t g3)^alpha z^r with r = log K2
    log = g101.log
    r = log(key.K2)
    assert log(key.K1) == ((log(mpk.g2) * key.t_id + log(mpk.g3)) * msk.alpha + log(mpk.z) * r) % P
    a = msk.a_vec
    assert [log(T) for T in key.T] == [(a[i + 1] - 9 * a[i]) * r % P for i in range(4)]
    ibbe.key_check(mpk, 9, key)


def test_tampered_delegation_reports_index(env4, gbig):
    mpk, msk, key, rng = env4
    T = list(key.T)
    T[2] = T[2] * gbig.g
    bad = ibbe.IbbeUserKey(key.K1, key.K2, tuple(T), key.t_id, key.identity)
    with pytest.raises(KeyCheckError) as exc:
        ibbe.key_check(mpk, 11, bad)
    assert exc.value.index == 2
    assert ibbe.trace_whitebox(mpk, 11, bad) is None
    # same through the ceremony
    state, msg = ibbe.keygen_user_round1(mpk, 11, rng)
    c = ceremony.pkg_challenge(gbig, rng)
    bl = ibbe.keygen_pkg_round2(mpk, msk, msg, ibbe.keygen_user_respond(state, c), rng)
    Tp = list(bl.Tp)
    Tp[2] = Tp[2] * gbig.g
    with pytest.raises(KeyCheckError) as exc:
        ibbe.keygen_user_finalize(mpk, state, ibbe.IbbeBlindedKey(bl.K1p, bl.K2p, tuple(Tp), bl.t1), rng)
    assert exc.value.index == 2


def test_tampered_k1_rejected(env4, gbig):
    mpk, _, key, _ = env4
    bad = ibbe.IbbeUserKey(key.K1 * gbig.g, key.K2, key.T, key.t_id, key.identity)
    with pytest.raises(KeyCheckError) as exc:
        ibbe.key_check(mpk, 11, bad)
    assert exc.value.index is None


def test_roundtrip_all_sizes(env4, gbig):
    mpk, msk, key, rng = env4
    for n in range(1, 5):
        S = [11] + [gbig.random_scalar(rng) for _ in range(n - 1)]
        m = gbig.random_target(rng)
        ct = ibbe.encrypt(mpk, S, m, rng)
        assert ibbe.decrypt(mpk, key, S, ct) == m
        assert ibbe.decrypt(mpk, key, list(reversed(S)), ct) == m
    with pytest.raises(ReceiverSetError):
        ibbe.encrypt(mpk, [1, 2, 3, 4, 5], gbig.gt, rng)
    with pytest.raises(ReceiverSetError):
        ibbe.decrypt(mpk, key, [1, 2], ibbe.encrypt(mpk, [1, 2], gbig.gt, rng))


def test_two_members_agree(env4, gbig):
    mpk, msk, key, rng = env4
    other = ibbe.run_ceremony(mpk, msk, 22, rng, rng)
    S = [11, 22, 33]
    m = gbig.random_target(rng)
    ct = ibbe.encrypt(mpk, S, m, rng)
    assert ibbe.decrypt(mpk, key, S, ct) == ibbe.decrypt(mpk, other, S, ct) == m
    assert ibbe.master_decrypt(mpk, msk, ct) == m


def test_derived_key_relation(env4, gbig):
    mpk, msk, key, rng = env4
    grp = gbig
    for n in range(1, 5):
        S = [11] + list(range(100, 100 + n - 1))
        D, d, t = ibbe.derive(mpk, key, S)
        lhs = grp.pair(D, grp.g)
        rhs = mpk.e_g1g2 ** t * mpk.e_g1g3 * grp.pair(mpk.set_element(S), d)
        assert lhs == rhs


@given(ident_sets(), st.data(), st.integers(min_value=0, max_value=2 ** 32))
def test_delegation_combination_identity(S, data, seed):
    grp = MockGroup(P)
    rng = random.Random(seed)
    mpk, msk = ibbe.setup(grp, 8, rng)
    ID = data.draw(st.sampled_from(S))
    key = ibbe.keygen_direct(mpk, msk, ID, grp.random_scalar(rng), rng)
    D, d, t = ibbe.derive(mpk, key, S)
    log = grp.log
    r = log(key.K2)
    rho = oracle.poly_from_roots(sorted(S), P)
    set_log = (log(mpk.z) + sum(a * c for a, c in zip(msk.a_vec, rho))) % P
    assert log(D) == ((log(mpk.g2) * t + log(mpk.g3)) * msk.alpha + set_log * r) % P


def test_degenerates_to_plain_scheme(gbig):
    rng = random.Random(12)
    mpk, msk = ibbe.setup(gbig, 4, rng)
    key = ibbe.keygen_direct(mpk, msk, 5, 0, rng)
    bh_mpk = ibbe.BhMpk(gbig, mpk.g1, mpk.g3, mpk.z, mpk.h_vec)
    bh_key = ibbe.BhKey(key.K1, key.K2, key.T, 5)
    S = [5, 6, 7]
    m = gbig.random_target(rng)
    ct = ibbe.encrypt(mpk, S, m, rng)
    bh_ct = ibbe.BhCiphertext(ct.C0, ct.C1, ct.C2)
    assert ibbe.bh_decrypt(bh_mpk, bh_key, S, bh_ct) == ibbe.decrypt(mpk, key, S, ct) == m


def test_tracing_depends_on_family_only(env4, gbig):
    mpk, msk, key, rng = env4
    same = ibbe.keygen_direct(mpk, msk, 11, key.t_id, rng)
    other = ibbe.keygen_direct(mpk, msk, 11, key.t_id + 1, rng)
    for S in ([11], [11, 12, 13]):
        for _ in range(10):
            m = gbig.random_target(rng)
            ct = ibbe.make_tracing_ciphertext(mpk, key, m, S, rng)
            assert ibbe.decrypt(mpk, same, S, ct) == m
            assert ibbe.decrypt(mpk, other, S, ct) != m
            assert ibbe.master_decrypt(mpk, msk, ct) != m


def test_trace_blackbox(env4):
    mpk, msk, key, rng = env4
    ops = schemes.get("ibbe")
    out = ibbe.trace_blackbox(mpk, key, TraceParams(4, 1), decoders.honest_user(ops, mpk, key), rng)
    assert (out.culprit, out.ctr) == (USER, 64)
    out = ibbe.trace_blackbox(mpk, key, TraceParams(4, 1), decoders.pkg_master(ops, mpk, msk, 11), rng,
                              S=[11, 12])
    assert out.culprit == PKG


def test_curve_roundtrip(curve):
    rng = random.Random(9)
    mpk, msk = ibbe.setup(curve, 3, rng)
    key = ibbe.run_ceremony(mpk, msk, 4, rng, rng)
    m = curve.random_target(rng)
    S = [4, 8]
    assert ibbe.decrypt(mpk, key, S, ibbe.encrypt(mpk, S, m, rng)) == m
