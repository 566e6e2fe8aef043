"""Versioned binary artifacts, ASCII armor and message embedding.

Layout of every artifact::

    "AIBE1" | version | scheme tag | backend descriptor | kind | fields...

Each field is ``type (1 byte) | length (4 bytes, big endian) | body``.  Lists
and nested records are fields whose body is again a sequence of fields, so a
decoder never has to guess a length.  Elements reuse the group encodings,
which are canonical; decoding rejects anything that does not re-encode to the
same bytes.
"""
from __future__ import annotations

import base64
import binascii
import dataclasses
import struct
import typing
from dataclasses import dataclass

from . import cca, core, gentry, ibbe
from .ceremony import KeyRequest, UserState
from .groups import (BilinearGroup, GroupError, MockGroup, SourceElement, TargetElement,
                     group_from_descriptor)
from .sigma import RepresentationWitness

MAGIC = b"AIBE1"
VERSION = 1
ARMOR_PREFIX = "AIBE1:"

KIND_MPK = 0x01
KIND_MSK = 0x02
KIND_USERKEY = 0x03
KIND_CIPHERTEXT = 0x04
KIND_TRANSCRIPT = 0x05
KIND_REPLY = 0x06
KIND_STATE = 0x07
KIND_ELEMENT = 0x08

KIND_NAMES = {
    KIND_MPK: "mpk", KIND_MSK: "msk", KIND_USERKEY: "userkey", KIND_CIPHERTEXT: "ciphertext",
    KIND_TRANSCRIPT: "transcript", KIND_REPLY: "reply", KIND_STATE: "state", KIND_ELEMENT: "element",
}

_NONE, _SRC, _TGT, _SCALAR, _BYTES, _STR, _LIST, _STRUCT = range(8)


class CodecError(ValueError):
    pass


@dataclass(frozen=True)
class IbbeEnvelope:
    """Broadcast ciphertext as stored: the receiver-set digest, optionally the set."""
    ct: ibbe.IbbeCiphertext
    digest: bytes
    receivers: tuple[int, ...] | None = None


@dataclass(frozen=True)
class StateRecord:
    """The user's secret half of a file based ceremony."""
    identity: object
    t0: int
    theta: int


_CLASSES = {
    core.SCHEME_TAG: {KIND_MPK: core.MasterPublicKey, KIND_MSK: core.MasterSecretKey,
                      KIND_USERKEY: core.UserKey, KIND_CIPHERTEXT: core.Ciphertext,
                      KIND_REPLY: core.BlindedKey},
    cca.SCHEME_TAG: {KIND_MPK: cca.CcaMasterPublicKey, KIND_MSK: core.MasterSecretKey,
                     KIND_USERKEY: cca.CcaUserKey, KIND_CIPHERTEXT: cca.CcaCiphertext,
                     KIND_REPLY: cca.CcaBlindedKey},
    gentry.SCHEME_TAG: {KIND_MPK: gentry.GentryMpk, KIND_MSK: gentry.GentryMsk,
                        KIND_USERKEY: gentry.GentryKey, KIND_CIPHERTEXT: gentry.GentryCiphertext,
                        KIND_REPLY: gentry.GentryBlindedKey},
    ibbe.SCHEME_TAG: {KIND_MPK: ibbe.IbbeMpk, KIND_MSK: ibbe.IbbeMsk,
                      KIND_USERKEY: ibbe.IbbeUserKey, KIND_CIPHERTEXT: IbbeEnvelope,
                      KIND_REPLY: ibbe.IbbeBlindedKey},
}
for _table in _CLASSES.values():
    _table[KIND_TRANSCRIPT] = KeyRequest
    _table[KIND_STATE] = StateRecord


class _Struct(tuple):
    pass


# -- field encoding -------------------------------------------------------------

def _field(ftype: int, body: bytes) -> bytes:
    return struct.pack(">BI", ftype, len(body)) + body


def _encode_value(group: BilinearGroup, v) -> bytes:
    if v is None:
        return _field(_NONE, b"")
    if isinstance(v, SourceElement):
        return _field(_SRC, group.encode_source(v))
    if isinstance(v, TargetElement):
        return _field(_TGT, group.encode_target(v))
    if isinstance(v, bool):
        raise CodecError("booleans are not encodable")
    if isinstance(v, int):
        if not 0 <= v < group.order:
            raise CodecError("scalar out of range")
        return _field(_SCALAR, group.encode_scalar(v))
    if isinstance(v, bytes):
        return _field(_BYTES, v)
    if isinstance(v, str):
        return _field(_STR, v.encode())
    if isinstance(v, (tuple, list)):
        return _field(_LIST, b"".join(_encode_value(group, x) for x in v))
    if dataclasses.is_dataclass(v):
        return _field(_STRUCT, _encode_record(group, v))
    raise CodecError(f"cannot encode {type(v).__name__}")


def _encode_record(group, obj) -> bytes:
    return b"".join(_encode_value(group, getattr(obj, f.name))
                    for f in dataclasses.fields(obj) if f.name != "group")


def _check_len(group, body, expected):
    # curve identities are short; every other length mismatch means the payload
    # was written for another backend
    if isinstance(group, MockGroup) and len(body) != expected:
        raise CodecError("backend mismatch: element length does not fit the mock backend")
    if not isinstance(group, MockGroup) and len(body) not in (expected, 3):
        raise CodecError("backend mismatch: element length does not fit the curve backend")


def _decode_fields(group, data: bytes) -> list:
    out, pos = [], 0
    while pos < len(data):
        if len(data) - pos < 5:
            raise CodecError("truncated field header")
        ftype, n = struct.unpack_from(">BI", data, pos)
        pos += 5
        body = data[pos:pos + n]
        if len(body) != n:
            raise CodecError("truncated field")
        pos += n
        try:
            if ftype == _NONE:
                if n:
                    raise CodecError("non-empty null field")
                out.append(None)
            elif ftype == _SRC:
                _check_len(group, body, group.source_len())
                out.append(group.decode_source(body))
            elif ftype == _TGT:
                _check_len(group, body, group.target_len())
                out.append(group.decode_target(body))
            elif ftype == _SCALAR:
                out.append(group.decode_scalar(body))
            elif ftype == _BYTES:
                out.append(bytes(body))
            elif ftype == _STR:
                out.append(body.decode())
            elif ftype == _LIST:
                out.append(tuple(_decode_fields(group, body)))
            elif ftype == _STRUCT:
                out.append(_Struct(_decode_fields(group, body)))
            else:
                raise CodecError(f"unknown field type {ftype:#x}")
        except (GroupError, UnicodeDecodeError) as exc:
            raise CodecError(str(exc)) from exc
    return out


def _build(cls, group, values):
    names = [f.name for f in dataclasses.fields(cls) if f.name != "group"]
    if len(values) != len(names):
        raise CodecError(f"{cls.__name__} expects {len(names)} fields, found {len(values)}")
    hints = typing.get_type_hints(cls)
    kw = {}
    for name, v in zip(names, values):
        hint = hints.get(name)
        if isinstance(v, _Struct):
            if not (isinstance(hint, type) and dataclasses.is_dataclass(hint)):
                raise CodecError(f"unexpected record in field {name}")
            v = _build(hint, group, list(v))
        elif isinstance(hint, type) and typing.get_origin(hint) is None and not isinstance(v, hint):
            raise CodecError(f"field {name} of {cls.__name__} should be {hint.__name__}")
        kw[name] = v
    if any(f.name == "group" for f in dataclasses.fields(cls)):
        kw["group"] = group
    try:
        return cls(**kw)
    except (TypeError, ValueError, GroupError) as exc:
        raise CodecError(f"invalid {cls.__name__}: {exc}") from exc


# -- artifacts ------------------------------------------------------------------

def encode(scheme_tag: int, kind: int, group: BilinearGroup, obj) -> bytes:
    if kind == KIND_ELEMENT:
        payload = _encode_value(group, obj)
    else:
        cls = _CLASSES[scheme_tag][kind]
        if not isinstance(obj, cls):
            raise CodecError(f"expected {cls.__name__}, got {type(obj).__name__}")
        payload = _encode_record(group, obj)
    return MAGIC + bytes([VERSION, scheme_tag]) + group.describe() + bytes([kind]) + payload


def read_header(data: bytes):
    """Return ``(scheme_tag, group, kind, payload)``."""
    if data[:len(MAGIC)] != MAGIC:
        raise CodecError("bad magic")
    pos = len(MAGIC)
    if len(data) < pos + 3:
        raise CodecError("truncated header")
    version, scheme_tag = data[pos], data[pos + 1]
    if version != VERSION:
        raise CodecError(f"unsupported version {version}")
    if scheme_tag not in _CLASSES:
        raise CodecError(f"unknown scheme tag {scheme_tag:#x}")
    try:
        group, n = group_from_descriptor(data[pos + 2:])
    except GroupError as exc:
        raise CodecError(str(exc)) from exc
    pos += 2 + n
    if len(data) <= pos:
        raise CodecError("truncated header")
    kind = data[pos]
    if kind not in KIND_NAMES:
        raise CodecError(f"unknown payload kind {kind:#x}")
    return scheme_tag, group, kind, data[pos + 1:]


def decode(data: bytes, kind: int | None = None, scheme_tag: int | None = None,
           group: BilinearGroup | None = None):
    """Parse an artifact; returns ``(scheme_tag, group, kind, object)``.

    Passing ``kind``, ``scheme_tag`` or ``group`` makes the header check strict.
    """
    tag, hgroup, hkind, payload = read_header(data)
    if group is not None and hgroup != group:
        raise CodecError("backend mismatch")
    if kind is not None and hkind != kind:
        raise CodecError(f"expected a {KIND_NAMES[kind]} artifact, found {KIND_NAMES[hkind]}")
    if scheme_tag is not None and tag != scheme_tag:
        raise CodecError("scheme tag mismatch")
    values = _decode_fields(hgroup, payload)
    if hkind == KIND_ELEMENT:
        if len(values) != 1 or not isinstance(values[0], (SourceElement, TargetElement)):
            raise CodecError("element artifact must hold exactly one element")
        obj = values[0]
    else:
        obj = _build(_CLASSES[tag][hkind], hgroup, values)
    if isinstance(obj, IbbeEnvelope) and obj.receivers is not None:
        if ibbe.set_digest(obj.receivers) != obj.digest:
            raise CodecError("receiver set does not match its digest")
    return tag, hgroup, hkind, obj


def armor(data: bytes) -> str:
    return ARMOR_PREFIX + base64.b64encode(data).decode()


def dearmor(text: str) -> bytes:
    text = "".join(text.split())
    if not text.startswith(ARMOR_PREFIX):
        raise CodecError("missing armor prefix")
    try:
        return base64.b64decode(text[len(ARMOR_PREFIX):], validate=True)
    except binascii.Error as exc:
        raise CodecError(f"bad armor: {exc}") from exc


def load_bytes(raw: bytes) -> bytes:
    """Accept both binary and armored files."""
    if raw.startswith(MAGIC) and not raw.startswith(ARMOR_PREFIX.encode()):
        return raw
    try:
        return dearmor(raw.decode("ascii"))
    except UnicodeDecodeError:
        raise CodecError("bad magic") from None


# -- helpers for specific kinds -----------------------------------------------

def encode_element(group, e, scheme_tag: int = core.SCHEME_TAG) -> bytes:
    return encode(scheme_tag, KIND_ELEMENT, group, e)


def decode_element(data: bytes, group=None):
    return decode(data, kind=KIND_ELEMENT, group=group)[3]


def envelope(ct: ibbe.IbbeCiphertext, S, include_set: bool = True) -> IbbeEnvelope:
    S = tuple(S)
    return IbbeEnvelope(ct, ibbe.set_digest(S), S if include_set else None)


def encode_ciphertext(ops, group, ct, context=None) -> bytes:
    if ops.tag == ibbe.SCHEME_TAG and not isinstance(ct, IbbeEnvelope):
        ct = envelope(ct, context)
    return encode(ops.tag, KIND_CIPHERTEXT, group, ct)


def decode_ciphertext(data: bytes, group=None, receivers=None):
    """Return ``(scheme_tag, group, ct, context)``; broadcast sets are checked against the digest."""
    tag, grp, _, obj = decode(data, kind=KIND_CIPHERTEXT, group=group)
    context = None
    if isinstance(obj, IbbeEnvelope):
        context = obj.receivers
        if receivers is not None:
            receivers = ibbe.receiver_set(receivers, grp.order)
            if ibbe.set_digest(receivers) != obj.digest:
                raise CodecError("receiver set does not match the ciphertext")
            context = receivers
        if context is None:
            raise CodecError("ciphertext does not carry its receiver set; pass it explicitly")
        obj = obj.ct
    return tag, grp, obj, context


def state_record(state: UserState) -> StateRecord:
    return StateRecord(state.identity, state.t0, state.theta)


def restore_state(ops, mpk, rec: StateRecord) -> UserState:
    return UserState(ops.tag, ops.bases(mpk, rec.identity), rec.identity,
                     RepresentationWitness(rec.t0, rec.theta))


# -- message embedding for the CPA schemes ---------------------------------------

_CURVE_MSG_BYTES = 2
_BSGS_STEP = 1 << 9
_bsgs_tables: dict = {}


def max_message_len(group: BilinearGroup) -> int:
    if isinstance(group, MockGroup):
        return max(0, (group.order.bit_length() - 2) // 8)
    return _CURVE_MSG_BYTES


def encode_message(group: BilinearGroup, data: bytes) -> TargetElement:
    """Embed a short byte string as ``e(g,g)^k`` with ``k = int(0x01 || data)``."""
    if len(data) > max_message_len(group):
        raise CodecError(f"message too long for this backend (max {max_message_len(group)} bytes); "
                         "use the cca scheme for arbitrary payloads")
    return group.gt ** int.from_bytes(b"\x01" + data, "big")


def _discrete_log(group, m: TargetElement, bound: int) -> int | None:
    table = _bsgs_tables.get(id(group))
    if table is None:
        table, acc = {}, group.target_identity()
        for j in range(_BSGS_STEP):
            table[acc.to_bytes()] = j
            acc = acc * group.gt
        _bsgs_tables[id(group)] = table
    giant = group.gt ** (-_BSGS_STEP)
    cur = m
    for i in range(bound // _BSGS_STEP + 1):
        j = table.get(cur.to_bytes())
        if j is not None:
            return i * _BSGS_STEP + j
        cur = cur * giant
    return None


def decode_message(group: BilinearGroup, m: TargetElement) -> bytes | None:
    """Inverse of :func:`encode_message`; None if ``m`` is not an embedded message."""
    if isinstance(group, MockGroup):
        k = group.log(m)
    else:
        k = _discrete_log(group, m, 1 << (8 * _CURVE_MSG_BYTES + 1))
        if k is None:
            return None
    raw = k.to_bytes((k.bit_length() + 7) // 8, "big") if k else b""
    if not raw.startswith(b"\x01") or len(raw) - 1 > max_message_len(group):
        return None
    return raw[1:]
