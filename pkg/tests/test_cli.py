import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from aibe import codec, experiments, schemes
from aibe.cli import main
from aibe.groups import parse_backend

PIRATE = Path(__file__).parent / "boxes" / "pirate.py"
SEED = "c0ffee"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def ceremony(capsys, d: Path, prefix="", scheme=None, ident="alice", setup_extra=()):
    pre = f"{prefix}-" if prefix else ""
    extra = ["--scheme", scheme] if scheme else []
    assert run(capsys, pre + "setup", *extra, *setup_extra, "--seed", SEED, "--out", d / "pkg")[0] == 0
    mpk = d / "pkg.mpk"
    assert run(capsys, pre + "keygen-user-init", "--mpk", mpk, "--id", ident, "--seed", SEED,
               "--out", d / "req")[0] == 0
    assert run(capsys, pre + "keygen-pkg-respond", "--mpk", mpk, "--msk", d / "pkg.msk",
               "--request", d / "req.tx", "--seed", SEED, "--out", d / "reply.tx")[0] == 0
    assert run(capsys, pre + "keygen-user-finish", "--mpk", mpk, "--state", d / "req.state",
               "--reply", d / "reply.tx", "--seed", SEED, "--out", d / "user.ukey")[0] == 0
    return mpk, d / "user.ukey"


@pytest.mark.parametrize("prefix,scheme", [("", None), ("", "cca"), ("gentry", None), ("ibbe", None)])
def test_ceremony_then_sanity_check(capsys, tmp_path, prefix, scheme):
    mpk, key = ceremony(capsys, tmp_path, prefix, scheme)
    pre = f"{prefix}-" if prefix else ""
    code, out, _ = run(capsys, pre + "sanity-check", "--mpk", mpk, "--key", key)
    assert code == 0 and "well formed" in out


@pytest.mark.parametrize("scheme", ["core", "cca", "gentry", "ibbe"])
def test_file_ceremony_matches_in_process(capsys, tmp_path, scheme):
    mpk_path, key_path = ceremony(capsys, tmp_path, scheme=scheme)
    seed = int(SEED, 16)
    ops = schemes.get(scheme)
    group = parse_backend("mock:2^61-1")
    mpk, msk = ops.setup(group, experiments.seeded_rng(seed, "setup"))
    ident = ops.identity(mpk, "alice")
    state, req = ops.user_request(mpk, ident, experiments.seeded_rng(seed, "keygen-user-init"))
    reply = ops.pkg_respond(mpk, msk, req, experiments.seeded_rng(seed, "keygen-pkg-respond"))
    key = ops.user_finalize(mpk, state, reply, experiments.seeded_rng(seed, "keygen-user-finish"))
    assert mpk_path.read_bytes() == codec.encode(ops.tag, codec.KIND_MPK, group, mpk)
    assert key_path.read_bytes() == codec.encode(ops.tag, codec.KIND_USERKEY, group, key)


def test_cca_file_roundtrip_and_uniform_rejection(capsys, tmp_path):
    mpk, key = ceremony(capsys, tmp_path, scheme="cca")
    payload = bytes(range(256)) * 20
    (tmp_path / "in.bin").write_bytes(payload)
    assert run(capsys, "encrypt", "--mpk", mpk, "--id", "alice", "--in", tmp_path / "in.bin",
               "--out", tmp_path / "m.ct")[0] == 0
    assert run(capsys, "decrypt", "--mpk", mpk, "--key", key, "--in", tmp_path / "m.ct",
               "--out", tmp_path / "out.bin")[0] == 0
    assert (tmp_path / "out.bin").read_bytes() == payload

    data = bytearray((tmp_path / "m.ct").read_bytes())
    data[-1] ^= 1
    (tmp_path / "bad.ct").write_bytes(bytes(data))
    code, _, err_aead = run(capsys, "decrypt", "--mpk", mpk, "--key", key, "--in", tmp_path / "bad.ct")
    assert code == 3
    # a type-I mangled ciphertext gets the same message
    _, group, _, ct = codec.decode(bytes((tmp_path / "m.ct").read_bytes()))
    mangled = type(ct)(ct.C1, ct.C2 * group.g, ct.C3, ct.C4)
    (tmp_path / "bad1.ct").write_bytes(codec.encode(2, codec.KIND_CIPHERTEXT, group, mangled))
    code, _, err_type1 = run(capsys, "decrypt", "--mpk", mpk, "--key", key, "--in", tmp_path / "bad1.ct")
    assert code == 3 and err_type1 == err_aead == "rejected: decryption failed\n"


def test_core_short_message_roundtrip(capsys, tmp_path):
    mpk, key = ceremony(capsys, tmp_path)
    (tmp_path / "m.txt").write_bytes(b"hello")
    assert run(capsys, "encrypt", "--mpk", mpk, "--id", "alice", "--in", tmp_path / "m.txt",
               "--out", tmp_path / "m.ct", "--armor")[0] == 0
    assert (tmp_path / "m.ct").read_text().startswith("AIBE1:")
    code, out, _ = run(capsys, "decrypt", "--mpk", mpk, "--key", key, "--in", tmp_path / "m.ct")
    assert code == 0 and out == "hello"
    (tmp_path / "long.txt").write_bytes(b"x" * 50)
    code, _, err = run(capsys, "encrypt", "--mpk", mpk, "--id", "alice", "--in", tmp_path / "long.txt")
    assert code == 4 and "cca" in err


def test_ibbe_broadcast(capsys, tmp_path):
    mpk, key = ceremony(capsys, tmp_path, "ibbe")
    (tmp_path / "m.txt").write_bytes(b"all")
    assert run(capsys, "ibbe-encrypt", "--mpk", mpk, "--to", "bob,alice,carol", "--in",
               tmp_path / "m.txt", "--out", tmp_path / "m.ct")[0] == 0
    code, out, _ = run(capsys, "ibbe-decrypt", "--mpk", mpk, "--key", key, "--in", tmp_path / "m.ct")
    assert (code, out) == (0, "all")
    assert run(capsys, "ibbe-encrypt", "--mpk", mpk, "--to", "bob,alice", "--hide-set", "--in",
               tmp_path / "m.txt", "--out", tmp_path / "h.ct")[0] == 0
    assert run(capsys, "ibbe-decrypt", "--mpk", mpk, "--key", key, "--in", tmp_path / "h.ct")[0] == 4
    code, out, _ = run(capsys, "ibbe-decrypt", "--mpk", mpk, "--key", key, "--in", tmp_path / "h.ct",
                       "--receivers", "alice,bob")
    assert (code, out) == (0, "all")
    assert run(capsys, "ibbe-encrypt", "--mpk", mpk, "--to", "bob,carol", "--in",
               tmp_path / "m.txt", "--out", tmp_path / "o.ct")[0] == 0
    assert run(capsys, "ibbe-decrypt", "--mpk", mpk, "--key", key, "--in", tmp_path / "o.ct")[0] == 3


def test_trace_box_verdicts(capsys, tmp_path):
    mpk, key = ceremony(capsys, tmp_path)
    code, out, err = run(capsys, "trace-box", "--mpk", mpk, "--key", key, "--msk", tmp_path / "pkg.msk",
                         "--decoder", "builtin:pkg-master", "--lambda", 16, "--epsilon", 1, "--seed", "1")
    assert (code, out.strip()) == (0, "PKG") and "ctr=0 L=256" in err
    code, out, _ = run(capsys, "trace-box", "--mpk", mpk, "--key", key, "--lambda", 2)
    assert (code, out.strip()) == (0, "User")
    code, _, _ = run(capsys, "trace-box", "--mpk", mpk, "--key", key, "--decoder", "builtin:pkg-master")
    assert code == 2


def test_trace_box_subprocess(capsys, tmp_path):
    mpk, key = ceremony(capsys, tmp_path, "gentry")
    box = f"exec:{sys.executable} {PIRATE} {mpk} {key}"
    code, out, _ = run(capsys, "gentry-trace-box", "--mpk", mpk, "--key", key, "--decoder", box, "--lambda", 1)
    assert (code, out.strip()) == (0, "User")
    code, _, err = run(capsys, "gentry-trace-box", "--mpk", mpk, "--key", key, "--decoder",
                       box + " die-after:2", "--lambda", 1)
    assert code == 5 and "decoder failure" in err


def test_secrets_hidden_without_reveal(capsys, tmp_path):
    mpk, key = ceremony(capsys, tmp_path)
    _, _, _, k = codec.decode((key).read_bytes())
    code, out, _ = run(capsys, "trace-key", "--mpk", mpk, "--key", key)
    assert code == 0 and "fingerprint" in out and str(k.family) not in out
    code, out, _ = run(capsys, "trace-key", "--mpk", mpk, "--key", key, "--reveal")
    assert out.strip() == f"family: {k.family}"
    code, out, _ = run(capsys, "setup", "--out", tmp_path / "again")
    msk = codec.armor((tmp_path / "again.msk").read_bytes())
    assert msk not in out
    _, out, _ = run(capsys, "setup", "--out", tmp_path / "again", "--reveal")
    assert "AIBE1:" in out


def test_exit_codes(capsys, tmp_path):
    mpk, key = ceremony(capsys, tmp_path)
    assert run(capsys, "sanity-check", "--mpk", mpk, "--key", tmp_path / "missing.ukey")[0] == 4
    assert run(capsys, "sanity-check", "--mpk", mpk, "--key", key, "--id", "mallory")[0] == 3
    assert run(capsys, "trace-key", "--mpk", mpk, "--key", key, "--id", "mallory")[0] == 3
    # a request whose proof does not verify is refused
    _, group, _, req = codec.decode((tmp_path / "req.tx").read_bytes())
    forged = type(req)(req.identity, req.R * group.g, req.transcript)
    (tmp_path / "forged.tx").write_bytes(codec.encode(1, codec.KIND_TRANSCRIPT, group, forged))
    code, _, err = run(capsys, "keygen-pkg-respond", "--mpk", mpk, "--msk", tmp_path / "pkg.msk",
                       "--request", tmp_path / "forged.tx")
    assert code == 3 and "rejected" in err
    # artifact of the wrong kind
    assert run(capsys, "sanity-check", "--mpk", mpk, "--key", tmp_path / "pkg.msk")[0] == 4
    # scheme mismatch between the command family and the file
    assert run(capsys, "gentry-sanity-check", "--mpk", mpk, "--key", key)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["encrypt"])
    assert exc.value.code == 2


def test_simulate_writes_report(capsys, tmp_path):
    out = tmp_path / "sim.rpt"
    code, text, _ = run(capsys, "simulate", "--scheme", "ibbe", "--trials", 3, "--lambda", 1,
                        "--decoder", "noisy:0.5", "--epsilon", 0.5, "--seed", "7", "--out", out)
    assert code == 0 and "L=32" in text
    assert out.read_text().count("\n") == 4
    assert out.with_suffix(".csv").read_text().startswith("trial,verdict,ctr,seed")


@pytest.mark.skipif(shutil.which("aibe") is None, reason="console script not installed")
def test_console_script(tmp_path):
    res = subprocess.run(["aibe", "setup", "--backend", "mock:101", "--out", str(tmp_path / "k")],
                         capture_output=True, text=True)
    assert res.returncode == 0 and (tmp_path / "k.mpk").exists()
    res = subprocess.run(["aibe", "--help"], capture_output=True, text=True)
    assert "trace-box" in res.stdout and "ibbe-setup" in res.stdout
