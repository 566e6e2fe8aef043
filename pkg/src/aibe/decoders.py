"""Pirate decoder models for black-box tracing.

A decoder is any callable ``decoder(ct, context) -> TargetElement | None``.
The models here are stateless: every random choice is derived from a seed and
the bytes of the query, so replaying queries in any order gives the same
answers.
"""
from __future__ import annotations

import hashlib
import random
import subprocess
from dataclasses import fields
from fractions import Fraction

from .groups import SourceElement, TargetElement
from .trace import DecoderTransportError


class Decoder:
    def __init__(self, name: str, fn, stateless: bool = True, epsilon: float | None = None):
        self.name = name
        self.fn = fn
        self.stateless = stateless
        self.epsilon = epsilon

    def __call__(self, ct, context=None):
        return self.fn(ct, context)

    def __repr__(self):
        return f"Decoder({self.name!r})"


def ciphertext_bytes(ct) -> bytes:
    out = []
    for f in fields(ct):
        v = getattr(ct, f.name)
        if isinstance(v, (SourceElement, TargetElement)):
            out.append(v.to_bytes())
        elif isinstance(v, bytes):
            out.append(len(v).to_bytes(4, "big") + v)
    return b"".join(out)


def _query_digest(seed: int, label: bytes, ct, context) -> bytes:
    h = hashlib.sha256()
    h.update(str(seed).encode() + b"/" + label)
    h.update(ciphertext_bytes(ct))
    if context is not None:
        h.update(repr(tuple(context)).encode())
    return h.digest()


def _check_scheme(ops, key):
    if ops.key_cls is not None and not isinstance(key, ops.key_cls):
        raise ValueError(f"key of type {type(key).__name__} does not belong to scheme {ops.name}")


def honest_user(ops, mpk, key) -> Decoder:
    _check_scheme(ops, key)
    return Decoder("honest", lambda ct, ctx: ops.decrypt(mpk, key, ct, ctx), epsilon=1.0)


def noisy(inner: Decoder, epsilon: float, seed: int = 0) -> Decoder:
    """Forward to ``inner`` with probability epsilon, answer nothing otherwise."""
    if not 0 <= epsilon <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    threshold = Fraction(str(epsilon)) * 2 ** 64

    def fn(ct, ctx):
        u = int.from_bytes(_query_digest(seed, b"noisy", ct, ctx)[:8], "big")
        return inner(ct, ctx) if u < threshold else None

    inner_eps = inner.epsilon if inner.epsilon is not None else 1.0
    return Decoder(f"noisy({inner.name},{epsilon})", fn, inner.stateless, epsilon * inner_eps)


def pkg_master(ops, mpk, msk, identity) -> Decoder:
    """What a cheating PKG can build from the master secret alone."""
    if ops.tag == 0x02:
        raise ValueError("no master-secret decoder model for the hybrid scheme")
    return Decoder("pkg-master", lambda ct, ctx: ops.master_decrypt(mpk, msk, identity, ct, ctx))


def pkg_guessing(ops, mpk, msk, identity, guessed_family: int | None = None, seed: int = 0) -> Decoder:
    """A PKG decoder that also guesses the user's family number.

    With ``guessed_family=None`` a fresh uniform guess is made for every
    query (derived from the query bytes, so the decoder stays stateless).
    """
    grp = mpk.group
    fixed = None
    if guessed_family is not None:
        fixed = ops.keygen_direct(mpk, msk, identity, guessed_family, random.Random(seed))

    def fn(ct, ctx):
        key = fixed
        if key is None:
            d = _query_digest(seed, b"guess", ct, ctx)
            r = random.Random(d)
            key = ops.keygen_direct(mpk, msk, identity, r.randrange(grp.order), r)
        return ops.decrypt(mpk, key, ct, ctx)

    return Decoder("pkg-guessing", fn)


class SubprocessDecoder(Decoder):
    """Line protocol: one armored ciphertext out, one armored plaintext (or BOT) back.

    Malformed replies count as misses; a dead or silent process raises
    :class:`DecoderTransportError`.
    """

    def __init__(self, argv, ops, mpk):
        super().__init__(f"exec:{argv[0]}", self._query, stateless=False)
        self.ops, self.mpk = ops, mpk
        try:
            self.proc = subprocess.Popen(argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                         text=True, bufsize=1)
        except OSError as exc:
            raise DecoderTransportError(f"cannot start decoder: {exc}") from exc

    def _query(self, ct, ctx):
        from . import codec

        line = codec.armor(codec.encode_ciphertext(self.ops, self.mpk.group, ct, ctx))
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
            reply = self.proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise DecoderTransportError(f"decoder pipe failed: {exc}") from exc
        if not reply:
            raise DecoderTransportError("decoder closed its output")
        reply = reply.strip()
        if reply == "BOT":
            return None
        try:
            return codec.decode_element(codec.dearmor(reply), self.mpk.group)
        except (codec.CodecError, ValueError):
            return None

    def close(self):
        if self.proc.poll() is None:
            self.proc.stdin.close()
            try:
                self.proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.proc.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def from_spec(spec: str, ops, mpk, key=None, msk=None, seed: int = 0) -> Decoder:
    """Build a decoder from a CLI spec such as ``builtin:noisy:0.25``."""
    kind, _, arg = spec.partition(":")
    if kind == "exec":
        import shlex
        return SubprocessDecoder(shlex.split(arg), ops, mpk)
    if kind != "builtin":
        raise ValueError(f"unknown decoder spec {spec!r}")
    name, _, param = arg.partition(":")
    identity = key.identity if key is not None else None
    if name == "honest":
        return honest_user(ops, mpk, key)
    if name == "noisy":
        return noisy(honest_user(ops, mpk, key), float(param or 0.5), seed)
    if name in ("pkg-master", "pkg-guessing"):
        if msk is None:
            raise ValueError(f"decoder {name} needs the master secret (--msk)")
        if name == "pkg-master":
            return pkg_master(ops, mpk, msk, identity)
        return pkg_guessing(ops, mpk, msk, identity, int(param) if param else None, seed)
    raise ValueError(f"unknown builtin decoder {name!r}")
