"""Command line front end: file based key ceremony, encryption and tracing.

Exit codes: 0 success, 2 usage, 3 rejected outcome (refused issuance, failed
key check, undecryptable ciphertext), 4 I/O or decoding error, 5 decoder
transport failure.
"""
from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

from . import codec, decoders, experiments, schemes
from .ceremony import CeremonyError
from .cca import DecryptionError
from .groups import GroupError, parse_backend
from .trace import DecoderTransportError, TraceParams

EXIT_OK, EXIT_USAGE, EXIT_REJECTED, EXIT_IO, EXIT_TRANSPORT = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, msg, code=EXIT_IO):
        super().__init__(msg)
        self.code = code


# -- helpers ------------------------------------------------------------------

def _rng(args, label):
    if args.seed is None:
        return None
    return experiments.seeded_rng(args.seed, label)


def _read(path, kind, scheme_tag=None, group=None):
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    return codec.decode(codec.load_bytes(raw), kind=kind, scheme_tag=scheme_tag, group=group)


def _write(path, data: bytes, armor: bool):
    try:
        if armor:
            Path(path).write_text(codec.armor(data) + "\n")
        else:
            Path(path).write_bytes(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc


def _load_mpk(args):
    tag, group, _, mpk = _read(args.mpk, codec.KIND_MPK)
    ops = schemes.get(tag)
    if args.scheme and args.scheme != ops.name:
        raise CliError(f"{args.mpk} belongs to scheme {ops.name}, not {args.scheme}", EXIT_USAGE)
    return ops, group, mpk


def _identity(ops, mpk, name: str):
    if name.startswith("int:"):
        return int(name[4:], 0) % mpk.group.order
    return ops.identity(mpk, name)


def _receivers(ops, mpk, names):
    return [_identity(ops, mpk, n) for n in names.split(",") if n]


def _fingerprint(x: int) -> str:
    return hashlib.sha256(str(x).encode()).hexdigest()[:16]


def _out(args, default):
    return args.out or default


# -- commands -----------------------------------------------------------------

def cmd_setup(args):
    ops = schemes.get(args.scheme or "core")
    group = parse_backend(args.backend)
    opts = {}
    if ops.name == "ibbe":
        opts["N"] = args.N
    if ops.name == "core" and args.waters_bits:
        opts["waters_bits"] = args.waters_bits
    mpk, msk = ops.setup(group, _rng(args, "setup"), **opts)
    prefix = _out(args, ops.name)
    _write(prefix + ".mpk", codec.encode(ops.tag, codec.KIND_MPK, group, mpk), args.armor)
    msk_bytes = codec.encode(ops.tag, codec.KIND_MSK, group, msk)
    _write(prefix + ".msk", msk_bytes, args.armor)
    print(f"wrote {prefix}.mpk and {prefix}.msk ({ops.name}, {args.backend})")
    if args.reveal:
        print(codec.armor(msk_bytes))


def cmd_keygen_user_init(args):
    ops, group, mpk = _load_mpk(args)
    identity = _identity(ops, mpk, args.id)
    state, request = ops.user_request(mpk, identity, _rng(args, "keygen-user-init"))
    prefix = _out(args, "request")
    _write(prefix + ".tx", codec.encode(ops.tag, codec.KIND_TRANSCRIPT, group, request), args.armor)
    _write(prefix + ".state", codec.encode(ops.tag, codec.KIND_STATE, group, codec.state_record(state)),
           args.armor)
    print(f"wrote {prefix}.tx (send to the PKG) and {prefix}.state (keep secret)")


def cmd_keygen_pkg_respond(args):
    ops, group, mpk = _load_mpk(args)
    _, _, _, msk = _read(args.msk, codec.KIND_MSK, ops.tag, group)
    _, _, _, request = _read(args.request, codec.KIND_TRANSCRIPT, ops.tag, group)
    reply = ops.pkg_respond(mpk, msk, request, _rng(args, "keygen-pkg-respond"))
    out = _out(args, "reply.tx")
    _write(out, codec.encode(ops.tag, codec.KIND_REPLY, group, reply), args.armor)
    print(f"proof accepted; wrote {out}")


def cmd_keygen_user_finish(args):
    ops, group, mpk = _load_mpk(args)
    _, _, _, rec = _read(args.state, codec.KIND_STATE, ops.tag, group)
    _, _, _, reply = _read(args.reply, codec.KIND_REPLY, ops.tag, group)
    state = codec.restore_state(ops, mpk, rec)
    key = ops.user_finalize(mpk, state, reply, _rng(args, "keygen-user-finish"))
    out = _out(args, "user.ukey")
    _write(out, codec.encode(ops.tag, codec.KIND_USERKEY, group, key), args.armor)
    print(f"key passes its sanity check; wrote {out}")
    if args.reveal:
        print(f"family: {key.family}")


def cmd_encrypt(args):
    ops, group, mpk = _load_mpk(args)
    try:
        data = sys.stdin.buffer.read() if args.input == "-" else Path(args.input).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {args.input}: {exc}") from exc
    rng = _rng(args, "encrypt")
    context = None
    if ops.name == "ibbe":
        if not args.to:
            raise CliError("ibbe encryption needs --to name1,name2,...", EXIT_USAGE)
        recipient = context = tuple(sorted(_receivers(ops, mpk, args.to)))
    else:
        if not args.id:
            raise CliError("encryption needs --id", EXIT_USAGE)
        recipient = _identity(ops, mpk, args.id)
    if ops.name == "cca":
        ct = ops.encrypt(mpk, recipient, data, rng)
    else:
        ct = ops.encrypt(mpk, recipient, codec.encode_message(group, data), rng)
    if context is not None:
        ct = codec.envelope(ct, ops.module.receiver_set(context, group.order), not args.hide_set)
    out = _out(args, "message.ct")
    _write(out, codec.encode_ciphertext(ops, group, ct), args.armor)
    print(f"wrote {out}")


def cmd_decrypt(args):
    ops, group, mpk = _load_mpk(args)
    _, _, _, key = _read(args.key, codec.KIND_USERKEY, ops.tag, group)
    try:
        raw = Path(args.input).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {args.input}: {exc}") from exc
    receivers = _receivers(ops, mpk, args.receivers) if args.receivers else None
    tag, _, ct, context = codec.decode_ciphertext(codec.load_bytes(raw), group, receivers)
    if tag != ops.tag:
        raise CliError("ciphertext and key belong to different schemes", EXIT_USAGE)
    if ops.name == "cca":
        data = ops.decrypt(mpk, key, ct)
    else:
        if context is not None and key.identity not in context:
            raise CliError("key identity is not among the receivers", EXIT_REJECTED)
        data = codec.decode_message(group, ops.decrypt(mpk, key, ct, context))
        if data is None:
            raise CliError("decryption did not yield an embedded message", EXIT_REJECTED)
    if args.out in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(args.out).write_bytes(data)
        print(f"wrote {args.out}", file=sys.stderr)


def _key_and_identity(args):
    ops, group, mpk = _load_mpk(args)
    _, _, _, key = _read(args.key, codec.KIND_USERKEY, ops.tag, group)
    identity = _identity(ops, mpk, args.id) if args.id else key.identity
    return ops, group, mpk, key, identity


def cmd_sanity_check(args):
    ops, _, mpk, key, identity = _key_and_identity(args)
    if not ops.sanity_check(mpk, identity, key):
        raise CliError("key FAILS its sanity relation", EXIT_REJECTED)
    print("key is well formed")


def cmd_trace_key(args):
    ops, _, mpk, key, identity = _key_and_identity(args)
    family = ops.trace_whitebox(mpk, identity, key)
    if family is None:
        raise CliError("key is malformed (⊥)", EXIT_REJECTED)
    print(f"family: {family}" if args.reveal else f"family fingerprint: {_fingerprint(family)}")


def cmd_trace_box(args):
    ops, group, mpk, key, _ = _key_and_identity(args)
    if not ops.traceable:
        raise CliError(f"black-box tracing is not defined for {ops.name}", EXIT_USAGE)
    msk = _read(args.msk, codec.KIND_MSK, ops.tag, group)[3] if args.msk else None
    context = tuple(sorted(_receivers(ops, mpk, args.receivers))) if args.receivers else None
    seed = args.seed if args.seed is not None else 0
    decoder = decoders.from_spec(args.decoder, ops, mpk, key, msk, experiments.derive_seed(seed, "decoder"))
    params = TraceParams(args.lam, args.epsilon)
    try:
        outcome = ops.trace(mpk, key, params, decoder, _rng(args, "trace-box"), context)
    finally:
        if isinstance(decoder, decoders.SubprocessDecoder):
            decoder.close()
    print(outcome.culprit)
    print(f"ctr={outcome.ctr} L={outcome.L}", file=sys.stderr)


def cmd_simulate(args):
    ops = schemes.get(args.scheme or "core")
    group = parse_backend(args.backend)
    seed = args.seed if args.seed is not None else 0
    report = experiments.run_trace_experiment(ops.name, args.lam, args.epsilon, args.decoder,
                                              args.trials, seed, group)
    s = report.summary()
    print(f"{ops.name}: L={s['L']} verdicts={s['verdicts']} hit_rate={s['hit_rate']:.4f}")
    if args.out:
        out = Path(args.out)
        try:
            out.write_text(report.to_jsonl())
            out.with_suffix(".csv").write_text(report.to_csv())
        except OSError as exc:
            raise CliError(f"cannot write {out}: {exc}") from exc
        print(f"wrote {out} and {out.with_suffix('.csv')}")


# -- parser -------------------------------------------------------------------

def _hex(s: str) -> int:
    try:
        return int(s, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be hexadecimal, got {s!r}") from None


COMMANDS = {
    "setup": cmd_setup,
    "keygen-user-init": cmd_keygen_user_init,
    "keygen-pkg-respond": cmd_keygen_pkg_respond,
    "keygen-user-finish": cmd_keygen_user_finish,
    "encrypt": cmd_encrypt,
    "decrypt": cmd_decrypt,
    "sanity-check": cmd_sanity_check,
    "trace-key": cmd_trace_key,
    "trace-box": cmd_trace_box,
    "simulate": cmd_simulate,
}


HELP = {
    "setup": "create a master key pair",
    "keygen-user-init": "user: commit to a family share and prove it",
    "keygen-pkg-respond": "PKG: check the proof and return a blinded key",
    "keygen-user-finish": "user: unblind, re-randomize and check the key",
    "encrypt": "encrypt a file",
    "decrypt": "decrypt a ciphertext",
    "sanity-check": "check a key against the master public key",
    "trace-key": "white-box trace: report the family of a key",
    "trace-box": "black-box trace: blame the PKG or the user for a decoder",
    "simulate": "repeat black-box traces and report verdict statistics",
}


def _add_command(sub, name, fn, scheme=None):
    cmd = name[len(scheme) + 1:] if scheme else name
    p = sub.add_parser(name, help=HELP[cmd] + (f" ({scheme})" if scheme else ""))
    p.set_defaults(fn=fn, scheme=scheme)
    p.add_argument("--seed", type=_hex, default=None, help="hex seed for reproducible runs")
    p.add_argument("--out", help="output file or prefix")
    p.add_argument("--armor", action="store_true", help="write base64 armored text")
    p.add_argument("--reveal", action="store_true", help="print secret material")
    if scheme is None:
        p.add_argument("--scheme", choices=sorted(schemes.SCHEMES), default=None,
                       help="scheme (default core; other commands read it from the files)")
    if cmd in ("setup", "simulate"):
        p.add_argument("--backend", default="mock:2^61-1", help="mock:<p> or curve")
    if cmd == "setup":
        p.add_argument("--N", type=int, default=8, help="ibbe: maximal receiver set size")
        p.add_argument("--waters-bits", type=int, default=0, help="core: use Waters hashing")
    if cmd != "setup" and cmd != "simulate":
        p.add_argument("--mpk", required=True)
    if cmd == "keygen-user-init":
        p.add_argument("--id", required=True)
    if cmd == "keygen-pkg-respond":
        p.add_argument("--msk", required=True)
        p.add_argument("--request", required=True)
    if cmd == "keygen-user-finish":
        p.add_argument("--state", required=True)
        p.add_argument("--reply", required=True)
    if cmd == "encrypt":
        p.add_argument("--id")
        p.add_argument("--to", help="ibbe: comma separated receiver names")
        p.add_argument("--hide-set", action="store_true", help="ibbe: store only the set digest")
        p.add_argument("--in", dest="input", required=True)
    if cmd == "decrypt":
        p.add_argument("--key", required=True)
        p.add_argument("--in", dest="input", required=True)
        p.add_argument("--receivers", help="ibbe: receiver names if the ciphertext hides them")
    if cmd in ("sanity-check", "trace-key", "trace-box"):
        p.add_argument("--key", required=True)
        p.add_argument("--id", help="identity to check against (default: the key's own)")
    if cmd in ("trace-box", "simulate"):
        p.add_argument("--decoder", default="builtin:honest",
                       help="builtin:honest|noisy:<eps>|pkg-master|pkg-guessing[:<family>] or exec:<cmd>")
        p.add_argument("--lambda", dest="lam", type=int, default=16)
        p.add_argument("--epsilon", type=float, default=1.0)
    if cmd == "trace-box":
        p.add_argument("--msk", help="master secret, for the pkg-* decoder models")
        p.add_argument("--receivers", help="ibbe: receiver set used for tracing")
    if cmd == "simulate":
        p.add_argument("--trials", type=int, default=50)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aibe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, fn in COMMANDS.items():
        _add_command(sub, name, fn)
    for scheme in ("gentry", "ibbe"):
        for name, fn in COMMANDS.items():
            _add_command(sub, f"{scheme}-{name}", fn, scheme)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except CeremonyError as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    except DecryptionError:
        # one message for every reason, so the CLI is not a validity oracle
        print("rejected: decryption failed", file=sys.stderr)
        return EXIT_REJECTED
    except DecoderTransportError as exc:
        print(f"decoder failure: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except (codec.CodecError, GroupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
