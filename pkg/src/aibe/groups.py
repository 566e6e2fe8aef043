"""Symmetric bilinear groups.

Two interchangeable backends sit behind :class:`BilinearGroup`:

* :class:`MockGroup` keeps every element as its discrete logarithm modulo a
  small prime.  The group law is addition, exponentiation is multiplication
  and the pairing multiplies exponents.  It is insecure by construction and is
  only meant as an exact oracle for tests and simulations.
* :class:`BLS12381Group` emulates a symmetric pairing on top of the type-3
  BLS12-381 pairing provided by RELIC (through ``petrelic``).  A source element
  is a pair ``(g1^a, g2^a)`` with the same discrete logarithm in both source
  groups; ``pair(u, v)`` uses the G1 half of ``u`` and the G2 half of ``v``.

Scalars are plain Python ints reduced modulo the group order.
"""
from __future__ import annotations

import hashlib
import re
import secrets

import gmpy2

SOURCE_TAG = 0x01
TARGET_TAG = 0x02
SCALAR_TAG = 0x03

MOCK_BACKEND = 0x01
CURVE_BACKEND = 0x02

_MOCK_WIDTH = 8
_G1_LEN = 49
_G2_LEN = 97
_GT_LEN = 384


class GroupError(ValueError):
    """Raised on malformed elements, cross-group operations and bad parameters."""


def _check_same(a, b):
    if a.group is not b.group and a.group != b.group:
        raise GroupError("elements belong to different group contexts")


class SourceElement:
    """Element of the source group G, written multiplicatively."""

    __slots__ = ("group", "value")

    def __init__(self, group: BilinearGroup, value):
        self.group = group
        self.value = value

    def __mul__(self, other: SourceElement) -> SourceElement:
        _check_same(self, other)
        return self.group._src_mul(self, other)

    def __truediv__(self, other: SourceElement) -> SourceElement:
        _check_same(self, other)
        return self.group._src_mul(self, other ** -1)

    def __pow__(self, x: int) -> SourceElement:
        return self.group._src_exp(self, int(x) % self.group.order)

    def __eq__(self, other):
        if not isinstance(other, SourceElement):
            return NotImplemented
        return (self.group is other.group or self.group == other.group) and self.group._src_eq(self, other)

    def __hash__(self):
        return hash(self.to_bytes())

    def __repr__(self):
        return f"SourceElement({self.to_bytes()[1:9].hex()}...)"

    def is_identity(self) -> bool:
        return self == self.group.identity()

    def to_bytes(self) -> bytes:
        return self.group.encode_source(self)


class TargetElement:
    """Element of the target group G_T, written multiplicatively."""

    __slots__ = ("group", "value")

    def __init__(self, group: BilinearGroup, value):
        self.group = group
        self.value = value

    def __mul__(self, other: TargetElement) -> TargetElement:
        _check_same(self, other)
        return self.group._tgt_mul(self, other)

    def __truediv__(self, other: TargetElement) -> TargetElement:
        _check_same(self, other)
        return self.group._tgt_mul(self, other ** -1)

    def __pow__(self, x: int) -> TargetElement:
        return self.group._tgt_exp(self, int(x) % self.group.order)

    def __eq__(self, other):
        if not isinstance(other, TargetElement):
            return NotImplemented
        return (self.group is other.group or self.group == other.group) and self.group._tgt_eq(self, other)

    def __hash__(self):
        return hash(self.to_bytes())

    def __repr__(self):
        return f"TargetElement({self.to_bytes()[1:9].hex()}...)"

    def is_identity(self) -> bool:
        return self == self.group.target_identity()

    def to_bytes(self) -> bytes:
        return self.group.encode_target(self)


class Tape:
    """Replays a fixed list of scalars in place of a random source.

    Drop-in for ``random.Random`` wherever an operation draws scalars, so
    worked examples can pin every exponent.  Values are returned verbatim
    (reduced into the requested range) and running out is an error.
    """

    def __init__(self, values):
        self._values = list(values)
        self._pos = 0

    def randrange(self, start, stop=None):
        if stop is None:
            start, stop = 0, start
        if self._pos >= len(self._values):
            raise IndexError("randomness tape exhausted")
        v = self._values[self._pos]
        self._pos += 1
        if not start <= v < stop:
            raise ValueError(f"tape value {v} outside [{start}, {stop})")
        return v

    def random(self):
        v = self.randrange(0, 2 ** 53)
        return v / 2 ** 53

    @property
    def remaining(self) -> int:
        return len(self._values) - self._pos


class BilinearGroup:
    """Common interface of the two backends.

    Subclasses provide the element-level primitives; everything the schemes
    need (scalar arithmetic, hashing, sampling, encodings) lives here.
    """

    backend_tag: int
    order: int
    scalar_width: int

    def __init__(self):
        self.pairings = 0  # instrumentation counter, see pair()
        self.g = self.generator()
        self.gt = self.pair(self.g, self.g)
        self.pairings = 0

    # -- scalars -----------------------------------------------------------
    def inv(self, x: int) -> int:
        x %= self.order
        if x == 0:
            raise ZeroDivisionError("zero has no inverse modulo the group order")
        return pow(x, -1, self.order)

    def random_scalar(self, rng=None) -> int:
        """Uniform scalar in [1, p)."""
        rng = rng or secrets.SystemRandom()
        return rng.randrange(1, self.order)

    def hash_to_scalar(self, data: bytes, domain: bytes = b"aibe/identity") -> int:
        """Deterministic, domain separated map from bytes to [1, p)."""
        if isinstance(data, str):
            data = data.encode()
        h = hashlib.sha512(len(domain).to_bytes(2, "big") + domain + data).digest()
        h += hashlib.sha512(b"\x01" + h).digest()
        return int.from_bytes(h, "big") % (self.order - 1) + 1

    # -- elements ----------------------------------------------------------
    def random_source(self, rng=None) -> SourceElement:
        return self.g ** self.random_scalar(rng)

    def random_target(self, rng=None) -> TargetElement:
        return self.gt ** self.random_scalar(rng)

    def identity(self) -> SourceElement:
        return self.g ** 0

    def target_identity(self) -> TargetElement:
        return self.gt ** 0

    def pair(self, a: SourceElement, b: SourceElement) -> TargetElement:
        if (a.group is not self and a.group != self) or (b.group is not self and b.group != self):
            raise GroupError("elements belong to different group contexts")
        self.pairings += 1
        return self._pair(a, b)

    # -- encodings ---------------------------------------------------------
    def encode_scalar(self, x: int) -> bytes:
        return bytes([SCALAR_TAG]) + (int(x) % self.order).to_bytes(self.scalar_width, "big")

    def decode_scalar(self, data: bytes) -> int:
        if len(data) != 1 + self.scalar_width or data[0] != SCALAR_TAG:
            raise GroupError("bad scalar encoding")
        x = int.from_bytes(data[1:], "big")
        if x >= self.order:
            raise GroupError("non-canonical scalar encoding")
        return x

    def source_len(self) -> int:
        raise NotImplementedError

    def target_len(self) -> int:
        raise NotImplementedError

    def describe(self) -> bytes:
        """Backend descriptor used in artifact headers."""
        raise NotImplementedError


class MockGroup(BilinearGroup):
    """Exponent-arithmetic oracle backend; every element is its discrete log."""

    backend_tag = MOCK_BACKEND
    scalar_width = _MOCK_WIDTH

    def __init__(self, p: int):
        if p < 3 or p >= 2 ** (8 * _MOCK_WIDTH) or not gmpy2.is_prime(p):
            raise GroupError(f"mock modulus must be a prime below 2^64, got {p}")
        self.order = p
        super().__init__()

    def __repr__(self):
        return f"MockGroup(p={self.order})"

    def __eq__(self, other):
        return isinstance(other, MockGroup) and other.order == self.order

    def __hash__(self):
        return hash(("mock", self.order))

    def generator(self):
        return SourceElement(self, 1)

    def source(self, log: int) -> SourceElement:
        """g^log, handy for writing worked examples."""
        return SourceElement(self, log % self.order)

    def target(self, log: int) -> TargetElement:
        return TargetElement(self, log % self.order)

    def log(self, e) -> int:
        """Discrete logarithm of a source or target element (mock only)."""
        return e.value

    def _src_mul(self, a, b):
        return SourceElement(self, (a.value + b.value) % self.order)

    def _src_exp(self, a, x):
        return SourceElement(self, a.value * x % self.order)

    def _src_eq(self, a, b):
        return a.value == b.value

    def _tgt_mul(self, a, b):
        return TargetElement(self, (a.value + b.value) % self.order)

    def _tgt_exp(self, a, x):
        return TargetElement(self, a.value * x % self.order)

    def _tgt_eq(self, a, b):
        return a.value == b.value

    def _pair(self, a, b):
        return TargetElement(self, a.value * b.value % self.order)

    def source_len(self):
        return 1 + _MOCK_WIDTH

    def target_len(self):
        return 1 + _MOCK_WIDTH

    def encode_source(self, e):
        return bytes([SOURCE_TAG]) + e.value.to_bytes(_MOCK_WIDTH, "big")

    def encode_target(self, e):
        return bytes([TARGET_TAG]) + e.value.to_bytes(_MOCK_WIDTH, "big")

    def _decode_log(self, data, tag):
        if len(data) != 1 + _MOCK_WIDTH or data[0] != tag:
            raise GroupError("bad element encoding")
        v = int.from_bytes(data[1:], "big")
        if v >= self.order:
            raise GroupError("non-canonical element encoding")
        return v

    def decode_source(self, data: bytes) -> SourceElement:
        return SourceElement(self, self._decode_log(data, SOURCE_TAG))

    def decode_target(self, data: bytes) -> TargetElement:
        return TargetElement(self, self._decode_log(data, TARGET_TAG))

    def describe(self):
        return bytes([MOCK_BACKEND]) + self.order.to_bytes(_MOCK_WIDTH, "big")


class BLS12381Group(BilinearGroup):
    """Symmetric-pairing emulation over BLS12-381 (RELIC via petrelic)."""

    backend_tag = CURVE_BACKEND
    scalar_width = 32
    name = "BLS12-381"

    def __init__(self):
        from petrelic.multiplicative.pairing import G1, G2, GT
        from petrelic.multiplicative.pairing import G1Element, G2Element, GTElement

        self._G1, self._G2, self._GT = G1, G2, GT
        self._E1, self._E2, self._ET = G1Element, G2Element, GTElement
        self.order = int(G1.order())
        super().__init__()

    def __repr__(self):
        return "BLS12381Group()"

    def __eq__(self, other):
        return isinstance(other, BLS12381Group)

    def __hash__(self):
        return hash("bls12-381")

    def generator(self):
        return SourceElement(self, (self._G1.generator(), self._G2.generator()))

    def _src_mul(self, a, b):
        return SourceElement(self, (a.value[0] * b.value[0], a.value[1] * b.value[1]))

    def _src_exp(self, a, x):
        return SourceElement(self, (a.value[0] ** x, a.value[1] ** x))

    def _src_eq(self, a, b):
        return a.value[0] == b.value[0] and a.value[1] == b.value[1]

    def _tgt_mul(self, a, b):
        return TargetElement(self, a.value * b.value)

    def _tgt_exp(self, a, x):
        return TargetElement(self, a.value ** x)

    def _tgt_eq(self, a, b):
        return a.value == b.value

    def _pair(self, a, b):
        return TargetElement(self, a.value[0].pair(b.value[1]))

    def source_len(self):
        return 1 + _G1_LEN + _G2_LEN

    def target_len(self):
        return 1 + _GT_LEN

    def encode_source(self, e):
        return bytes([SOURCE_TAG]) + e.value[0].to_binary() + e.value[1].to_binary()

    def encode_target(self, e):
        return bytes([TARGET_TAG]) + e.value.to_binary()

    def _load(self, cls, data):
        # RELIC accepts (and reports on stderr) malformed input, so validity and
        # canonicity are both checked explicitly.
        el = cls.from_binary(data)
        if not el.is_valid() or el.to_binary() != data:
            raise GroupError("invalid or non-canonical curve point")
        return el

    def decode_source(self, data: bytes) -> SourceElement:
        if data[:1] != bytes([SOURCE_TAG]):
            raise GroupError("bad element encoding")
        body = data[1:]
        # the identity encodes as a single zero byte per component
        if body == b"\x00\x00":
            return self.identity()
        if len(body) != _G1_LEN + _G2_LEN:
            raise GroupError("bad element encoding")
        a = self._load(self._E1, body[:_G1_LEN])
        b = self._load(self._E2, body[_G1_LEN:])
        # both halves must carry the same discrete logarithm
        if a.pair(self._G2.generator()) != self._G1.generator().pair(b):
            raise GroupError("source element halves are inconsistent")
        return SourceElement(self, (a, b))

    def decode_target(self, data: bytes) -> TargetElement:
        if data[:1] != bytes([TARGET_TAG]) or len(data) != 1 + _GT_LEN:
            raise GroupError("bad element encoding")
        return TargetElement(self, self._load(self._ET, data[1:]))

    def describe(self):
        return bytes([CURVE_BACKEND])


_CURVE_LEVELS = (128,)
_curve_singleton: BLS12381Group | None = None


def context_new(backend: str, lam: int | None = None, p: int | None = None) -> BilinearGroup:
    """Build a group context.

    ``backend`` is ``"mock"`` (give either an explicit prime ``p`` or a
    security level ``lam``, in which case the first prime above ``2**lam`` is
    used) or ``"curve"`` (``lam`` up to 128 is served by BLS12-381).
    """
    global _curve_singleton
    if backend == "mock":
        if p is None:
            if lam is None or not 8 <= lam <= 63:
                raise GroupError("mock backend needs an explicit prime or 8 <= lambda <= 63")
            p = int(gmpy2.next_prime(2 ** lam))
        return MockGroup(p)
    if backend == "curve":
        if lam is not None and lam > max(_CURVE_LEVELS):
            raise GroupError(f"unsupported security level {lam} for the curve backend")
        if _curve_singleton is None:
            _curve_singleton = BLS12381Group()
        return _curve_singleton
    raise GroupError(f"unknown backend {backend!r}")


def parse_backend(spec: str) -> BilinearGroup:
    """Parse ``mock:<p>`` or ``curve`` (CLI syntax)."""
    if spec == "curve":
        return context_new("curve")
    if spec.startswith("mock:"):
        arg = spec[5:].replace(" ", "")
        m = re.fullmatch(r"2\^(\d+)([+-]\d+)?", arg)
        if m:
            return context_new("mock", p=2 ** int(m.group(1)) + int(m.group(2) or 0))
        return context_new("mock", p=int(arg, 0))
    raise GroupError(f"unknown backend spec {spec!r}")


def group_from_descriptor(data: bytes) -> tuple[BilinearGroup, int]:
    """Inverse of :meth:`BilinearGroup.describe`; returns (group, bytes consumed)."""
    if not data:
        raise GroupError("truncated backend descriptor")
    if data[0] == MOCK_BACKEND:
        if len(data) < 1 + _MOCK_WIDTH:
            raise GroupError("truncated backend descriptor")
        return MockGroup(int.from_bytes(data[1:1 + _MOCK_WIDTH], "big")), 1 + _MOCK_WIDTH
    if data[0] == CURVE_BACKEND:
        return context_new("curve"), 1
    raise GroupError(f"unknown backend tag {data[0]:#x}")
