"""Symmetric building blocks of the hybrid (CCA) variant.

A suite bundles an authenticated cipher, a KDF from target-group elements to
cipher keys and a target-collision-resistant hash into Z_p*.  Every hybrid
ciphertext gets its own derived key, so the cipher runs with a fixed all-zero
nonce and only one-time integrity is required of it.
"""
from __future__ import annotations

from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from .groups import BilinearGroup, TargetElement

_ZERO_NONCE = bytes(12)


class UnknownSuiteError(KeyError):
    pass


@dataclass(frozen=True)
class Suite:
    name: str
    key_len: int

    def kdf(self, element: TargetElement) -> bytes:
        return HKDF(
            algorithm=hashes.SHA256(),
            length=self.key_len,
            salt=None,
            info=b"aibe/cca/kdf/" + self.name.encode(),
        ).derive(element.to_bytes())

    def tcr_hash(self, group: BilinearGroup, data: bytes) -> int:
        return group.hash_to_scalar(data, domain=b"aibe/cca/tcr")

    def aead_encrypt(self, key: bytes, message: bytes) -> bytes:
        self._check_key(key)
        return AESGCM(key).encrypt(_ZERO_NONCE, message, None)

    def aead_decrypt(self, key: bytes, ciphertext: bytes) -> bytes | None:
        self._check_key(key)
        try:
            return AESGCM(key).decrypt(_ZERO_NONCE, ciphertext, None)
        except InvalidTag:
            return None

    def _check_key(self, key):
        if len(key) != self.key_len:
            raise ValueError(f"{self.name} takes {self.key_len}-byte keys")


DEFAULT_SUITE = "aes256gcm-hkdfsha256-sha512"
SUITES = {DEFAULT_SUITE: Suite(DEFAULT_SUITE, 32)}


def get_suite(name: str) -> Suite:
    try:
        return SUITES[name]
    except KeyError:
        raise UnknownSuiteError(f"unknown symmetric suite {name!r}") from None
