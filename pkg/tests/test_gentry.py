import random

import pytest
from hypothesis import given, strategies as st

from aibe import MockGroup, Tape, TraceParams, USER, PKG, ceremony, decoders, gentry, schemes
from aibe.ceremony import MalformedKeyError

import oracle

P = 101
ALPHA, H, ID = 7, 13, 5


def worked(grp):
    mpk, msk = gentry.setup(grp, Tape([ALPHA, H]))
    state, msg = gentry.keygen_user_round1(mpk, ID, Tape([4, 6, 2, 3]))
    blinded = gentry.keygen_pkg_round2(mpk, msk, msg, gentry.keygen_user_respond(state, 5), Tape([7]))
    return mpk, msk, state, blinded


@pytest.fixture
def big_env(gbig):
    rng = random.Random(31)
    mpk, msk = gentry.setup(gbig, rng)
    key = gentry.run_ceremony(mpk, msk, 1234, rng, rng)
    return mpk, msk, key, rng


def test_setup(g101, gbig):
    mpk, msk = gentry.setup(g101, Tape([ALPHA, H]))
    assert g101.log(mpk.g1) == 7 and msk.alpha == 7
    assert mpk.e_gg == g101.pair(g101.g, g101.g) and mpk.e_gh == g101.pair(g101.g, mpk.h)
    assert gentry.setup(gbig, random.Random(2)) == gentry.setup(gbig, random.Random(2))


def test_worked_key(g101):
    mpk, _, state, blinded = worked(g101)
    key = gentry.keygen_user_finalize(mpk, state, blinded)
    assert oracle.gentry_key(P, ALPHA, H, ID, 11) == 1
    assert (g101.log(key.d), key.t_id) == (1, 11)
    # e(d, g1 g^-ID) = e^2 = e(h,g) e(g,g)^-11
    assert g101.log(g101.pair(key.d, mpk.id_base(ID))) == 2 == (H - 11) % P
    assert gentry.trace_whitebox(mpk, ID, key) == 11
    assert key.family == state.t0 + blinded.t1


def test_commitment_bases(g101):
    mpk, _ = gentry.setup(g101, Tape([ALPHA, H]))
    b = mpk.pedersen_bases(ID)
    assert (g101.log(b.base_a), g101.log(b.base_b)) == (P - 1, ALPHA - ID)


def test_identity_equal_alpha_aborts(g101):
    mpk, msk = gentry.setup(g101, Tape([ALPHA, H]))
    with pytest.raises(gentry.IssuanceAborted):
        gentry.keygen_user_round1(mpk, ALPHA, Tape([4, 6, 2, 3]))
    with pytest.raises(gentry.IssuanceAborted):
        gentry.keygen_direct(mpk, msk, ALPHA, 3)


def test_tampered_reply(g101):
    mpk, _, state, blinded = worked(g101)
    with pytest.raises(MalformedKeyError):
        gentry.keygen_user_finalize(mpk, state, gentry.GentryBlindedKey(blinded.dp * g101.g, blinded.t1))


def test_encrypt_decrypt_worked(g101):
    mpk, _, state, blinded = worked(g101)
    key = gentry.keygen_user_finalize(mpk, state, blinded)
    m = g101.target(40)
    ct = gentry.encrypt(mpk, ID, m, Tape([3]))
    assert g101.log(g101.pair(ct.C1, key.d)) == 6
    assert g101.log(ct.C2 ** key.t_id) == 33
    assert (6 + 33) % P == H * 3 % P == 39
    assert g101.log(ct.C3) == (40 + 39) % P
    assert gentry.decrypt(mpk, key, ct) == m
    assert gentry.encrypt(mpk, ID, g101.target_identity(), Tape([3])).C3 == mpk.e_gh ** 3


def test_roundtrip_and_master(big_env, gbig):
    mpk, msk, key, rng = big_env
    for _ in range(50):
        m = gbig.random_target(rng)
        ct = gentry.encrypt(mpk, 1234, m, rng)
        assert gentry.decrypt(mpk, key, ct) == m
        assert gentry.master_decrypt(mpk, msk, 1234, ct) == m


def test_tracing_family_dependence(big_env, gbig):
    mpk, msk, key, rng = big_env
    same = gentry.keygen_direct(mpk, msk, 1234, key.t_id)
    other = gentry.keygen_direct(mpk, msk, 1234, key.t_id + 1)
    for _ in range(30):
        m = gbig.random_target(rng)
        ct = gentry.make_tracing_ciphertext(mpk, key, m, rng)
        assert gentry.decrypt(mpk, key, ct) == m
        assert gentry.decrypt(mpk, same, ct) == m
        assert gentry.decrypt(mpk, other, ct) != m
        assert gentry.master_decrypt(mpk, msk, 1234, ct) != m


def test_tracing_ciphertext_layout(g101):
    mpk, _, state, blinded = worked(g101)
    key = gentry.keygen_user_finalize(mpk, state, blinded)
    m = g101.target(40)
    ct = gentry.make_tracing_ciphertext(mpk, key, m, Tape([3, 8]))
    assert g101.log(ct.C1) == 6
    assert ct.C2 == mpk.e_gg ** 8
    assert g101.log(ct.C3) == (40 + 6 + 8 * 11) % P


def test_trace_blackbox(big_env):
    mpk, msk, key, rng = big_env
    ops = schemes.get("gentry")
    out = gentry.trace_blackbox(mpk, key, TraceParams(4, 1), decoders.honest_user(ops, mpk, key), rng)
    assert (out.culprit, out.ctr) == (USER, 64)
    out = gentry.trace_blackbox(mpk, key, TraceParams(4, 1), decoders.pkg_master(ops, mpk, msk, 1234), rng)
    assert out.culprit == PKG


def test_noninteractive(big_env):
    mpk, msk, _, rng = big_env
    state, req = gentry.keygen_user_request(mpk, 99, rng)
    key = gentry.keygen_user_finalize(mpk, state, gentry.keygen_pkg_respond(mpk, msk, req, rng))
    assert gentry.key_sanity_check(mpk, 99, key)


def test_curve_roundtrip(curve):
    rng = random.Random(4)
    mpk, msk = gentry.setup(curve, rng)
    key = gentry.run_ceremony(mpk, msk, 77, rng, rng)
    m = curve.random_target(rng)
    assert gentry.decrypt(mpk, key, gentry.encrypt(mpk, 77, m, rng)) == m
    assert gentry.decrypt(mpk, key, gentry.make_tracing_ciphertext(mpk, key, m, rng)) == m


tapes = st.lists(st.integers(min_value=1, max_value=P - 1), min_size=8, max_size=8)


@given(tapes, st.integers(min_value=1, max_value=P - 1))
def test_closure(tape, ident):
    grp = MockGroup(P)
    mpk, msk = gentry.setup(grp, Tape(tape[:2]))
    if ident == msk.alpha:
        return
    state, msg = gentry.keygen_user_round1(mpk, ident, Tape(tape[2:6]))
    blinded = gentry.keygen_pkg_round2(mpk, msk, msg, gentry.keygen_user_respond(state, tape[6]),
                                       Tape(tape[7:]))
    key = gentry.keygen_user_finalize(mpk, state, blinded)
    assert key.t_id == (tape[2] + tape[7]) % P
    assert gentry.key_sanity_check(mpk, ident, key)
    assert not gentry.key_sanity_check(mpk, ident, gentry.GentryKey(key.d, key.t_id + 1, ident))
    assert not gentry.key_sanity_check(mpk, ident, gentry.GentryKey(key.d * grp.g, key.t_id, ident))
