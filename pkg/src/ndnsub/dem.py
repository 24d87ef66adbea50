"""Data-encapsulation layer: HKDF-SHA256 key derivation and AES-256-GCM."""
from __future__ import annotations

import secrets

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

NONCE_BYTES = 12
TAG_BYTES = 16


class AeadFailure(Exception):
    """Authentication tag mismatch: wrong key, wrong context or tampered payload."""


def derive_key(material: bytes, context: bytes) -> bytes:
    return HKDF(algorithm=hashes.SHA256(), length=32, salt=None,
                info=b"ndnsub/content-key/" + context).derive(material)


def seal(key: bytes, plaintext: bytes, aad: bytes, rng=None) -> bytes:
    rng = rng or secrets.SystemRandom()
    nonce = rng.getrandbits(8 * NONCE_BYTES).to_bytes(NONCE_BYTES, "big")
    return nonce + AESGCM(key).encrypt(nonce, plaintext, aad)


def open_(key: bytes, payload: bytes, aad: bytes) -> bytes:
    if len(payload) < NONCE_BYTES + TAG_BYTES:
        raise AeadFailure("payload too short")
    try:
        return AESGCM(key).decrypt(payload[:NONCE_BYTES], payload[NONCE_BYTES:], aad)
    except InvalidTag as exc:
        raise AeadFailure("authentication failed") from exc
