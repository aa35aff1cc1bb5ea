"""Position hashes mapping an integer r >= 1 to a value in 0..r-1.

Two families are provided, selected by :class:`HashConfig`:

* ``CRC``: two CRC32-C accumulations of the 64-bit input (one per seed)
  concatenated into 64 bits, reduced mod r.  The CRC update is bit-identical
  to the SSE 4.2 ``crc32`` instruction operating on a 64-bit word, i.e. the
  reflected Castagnoli polynomial with no pre/post inversion.
* ``SIMPLE``: a multiply-shift hash, ``((r * M mod 2^64) * r) >> 64``,
  computed in exact integer arithmetic so results are identical on every
  platform.

Every function here is pure: the output depends only on the arguments and
the config, never on call order, platform, or thread schedule.  Scalar
functions operate on Python ints; ``*_many`` variants operate elementwise
on uint64 numpy arrays and must return bit-identical values.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError

MASK32 = 0xFFFFFFFF
MASK64 = 0xFFFFFFFFFFFFFFFF

# Default multiplier for the SIMPLE family (first 19 digits of pi).
DEFAULT_MULTIPLIER = 3141592653589793238

# Salt-folding constants: a fresh hash family per rejection attempt is
# derived by perturbing the seeds (CRC) or the multiplier (SIMPLE).
_GOLDEN32 = 0x9E3779B9
_GOLDEN64 = 0x9E3779B97F4A7C15

# Reflected form of the Castagnoli polynomial 0x1EDC6F41.
_CRC32C_POLY = 0x82F63B78


class HashKind(enum.Enum):
    CRC = "crc"
    SIMPLE = "simple"


@dataclass(frozen=True)
class HashConfig:
    """Full definition of the position-hash family in use.

    ``attempt_salt`` selects a derived family for rejection resampling;
    salt 0 is exactly the base family.  ``seed0``/``seed1`` feed the CRC
    family (effective seeds are 32-bit); ``multiplier`` feeds SIMPLE.
    """

    kind: HashKind = HashKind.CRC
    seed0: int = 0
    seed1: int = 1
    attempt_salt: int = 0
    multiplier: int = DEFAULT_MULTIPLIER

    def __post_init__(self) -> None:
        for name in ("seed0", "seed1", "attempt_salt", "multiplier"):
            v = getattr(self, name)
            if not 0 <= v <= MASK64:
                raise ParameterError(f"{name} must be an unsigned 64-bit value, got {v}")

    def with_attempt(self, salt: int) -> "HashConfig":
        """The derived family used for rejection attempt ``salt``."""
        return replace(self, attempt_salt=salt)

    def crc_seeds(self) -> tuple[int, int]:
        """Effective 32-bit CRC seeds with the attempt salt folded in."""
        s0 = (self.seed0 + self.attempt_salt) & MASK32
        s1 = (self.seed1 + self.attempt_salt * _GOLDEN32) & MASK32
        return s0, s1

    def simple_multiplier(self) -> int:
        """Effective SIMPLE multiplier with the attempt salt folded in.

        The fold adds an even offset so the multiplier's parity is
        preserved across attempts.
        """
        return (self.multiplier + 2 * self.attempt_salt * _GOLDEN64) & MASK64


def _build_crc32c_table() -> tuple[int, ...]:
    table = []
    for i in range(256):
        c = i
        for _ in range(8):
            c = (c >> 1) ^ _CRC32C_POLY if c & 1 else c >> 1
        table.append(c)
    return tuple(table)


CRC32C_TABLE: tuple[int, ...] = _build_crc32c_table()

# uint64 copy for the vectorized path and the compiled kernels.
CRC32C_TABLE_U64: np.ndarray = np.array(CRC32C_TABLE, dtype=np.uint64)
CRC32C_TABLE_U64.setflags(write=False)


def crc32c_u64(seed: int, word: int) -> int:
    """CRC32-C accumulation of one little-endian 64-bit word.

    Matches ``_mm_crc32_u64(seed, word)``: the raw reflected table update,
    with no initial or final complement.
    """
    c = seed & MASK32
    w = word & MASK64
    for _ in range(8):
        c = CRC32C_TABLE[(c ^ w) & 0xFF] ^ (c >> 8)
        w >>= 8
    return c


def h_crc(r: int, cfg: HashConfig) -> int:
    """CRC-family hash of r into 0..r-1."""
    if r < 1:
        raise ParameterError(f"hash argument must be >= 1, got {r}")
    s0, s1 = cfg.crc_seeds()
    h = (crc32c_u64(s0, r) << 32) + crc32c_u64(s1, r)
    return h % r


def h_simple(r: int, cfg: HashConfig) -> int:
    """Multiply-shift hash of r into 0..r-1.

    Exact integer form: the high 64 bits of the 128-bit product
    ``(r * M mod 2^64) * r``.  Since the first factor is < 2^64, the
    result is always < r.
    """
    if r < 1:
        raise ParameterError(f"hash argument must be >= 1, got {r}")
    m = cfg.simple_multiplier()
    return (((r * m) & MASK64) * r) >> 64


def hash_value(r: int, cfg: HashConfig) -> int:
    """Evaluate the configured hash family at r."""
    if cfg.kind is HashKind.CRC:
        return h_crc(r, cfg)
    return h_simple(r, cfg)


# ---------------------------------------------------------------------------
# Vectorized variants (elementwise identical to the scalar functions).

_U8 = np.uint64(8)
_U32 = np.uint64(32)
_U56 = np.uint64(56)
_BYTE = np.uint64(0xFF)
_LOW32 = np.uint64(MASK32)


def crc32c_u64_many(seed: int, words: np.ndarray) -> np.ndarray:
    """Elementwise ``crc32c_u64(seed, w)`` over a uint64 array."""
    w = np.asarray(words, dtype=np.uint64)
    c = np.full(w.shape, np.uint64(seed & MASK32))
    for k in range(8):
        idx = (c ^ (w >> np.uint64(8 * k))) & _BYTE
        c = CRC32C_TABLE_U64[idx] ^ (c >> _U8)
    return c


def mulhi_u64(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """High 64 bits of the elementwise 128-bit product of uint64 arrays."""
    a_lo = a & _LOW32
    a_hi = a >> _U32
    b_lo = b & _LOW32
    b_hi = b >> _U32
    cross = a_hi * b_lo + ((a_lo * b_lo) >> _U32)
    t = a_lo * b_hi + (cross & _LOW32)
    return a_hi * b_hi + (cross >> _U32) + (t >> _U32)


def h_crc_many(r: np.ndarray, cfg: HashConfig) -> np.ndarray:
    """Elementwise ``h_crc``; every element of r must be >= 1."""
    r = np.asarray(r, dtype=np.uint64)
    s0, s1 = cfg.crc_seeds()
    h = (crc32c_u64_many(s0, r) << _U32) + crc32c_u64_many(s1, r)
    return h % r


def h_simple_many(r: np.ndarray, cfg: HashConfig) -> np.ndarray:
    """Elementwise ``h_simple``; every element of r must be >= 1."""
    r = np.asarray(r, dtype=np.uint64)
    m = np.uint64(cfg.simple_multiplier())
    return mulhi_u64(r * m, r)


def hash_many(r: np.ndarray, cfg: HashConfig) -> np.ndarray:
    """Elementwise ``hash_value`` for the configured family."""
    if cfg.kind is HashKind.CRC:
        return h_crc_many(r, cfg)
    return h_simple_many(r, cfg)
