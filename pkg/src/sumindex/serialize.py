"""Bit-exact advice serialisation.

Advice size is accounted in bits: every integer field is packed at its
exact width (ceil(log2) of its value range).  Sections are padded to byte
boundaries in the file, but ``bit_size`` / ``advice_bit_size`` exclude that
padding; reports carry both numbers.

Inversion advice layout (magic "SIDX", version 1): header with mode, sizes,
plan fields and length-prefixed seeds, then one bit-packed body section
(full inverse map, or heavy store + tables, or tables alone); integers
little-endian, bits packed LSB-first.
"""

from __future__ import annotations

import struct

import numpy as np

from .hellman import TableSet
from .plans import (
    CLASSIC_FN,
    FULL_INVERSE,
    ParamPlan,
    PlanConstants,
    mode_code,
    mode_from_code,
)

MAGIC_INVERSION = b"SIDX"
MAGIC_FRAMEWORK = b"SFW1"
FORMAT_VERSION = 1


def field_width(n: int) -> int:
    """Bits needed for values in [n]."""
    return max(1, (n - 1).bit_length())


class BitWriter:
    """LSB-first bit packer; tracks the unpadded bit count."""

    def __init__(self):
        self._acc = 0
        self._nbits = 0
        self._out = bytearray()
        self.bits_written = 0

    def write(self, value: int, width: int) -> None:
        if value < 0 or (width < 64 and value >> width):
            raise ValueError(f"value {value} does not fit in {width} bits")
        self._acc |= value << self._nbits
        self._nbits += width
        self.bits_written += width
        while self._nbits >= 8:
            self._out.append(self._acc & 0xFF)
            self._acc >>= 8
            self._nbits -= 8

    def write_bytes(self, data: bytes) -> None:
        self.align()
        self._out.extend(data)
        self.bits_written += 8 * len(data)

    def write_array(self, values: np.ndarray, width: int) -> None:
        for v in values.tolist():
            self.write(int(v), width)

    def align(self) -> None:
        # pads the current section to a byte boundary (padding not counted)
        if self._nbits:
            self._out.append(self._acc & 0xFF)
            self._acc = 0
            self._nbits = 0

    def getvalue(self) -> bytes:
        self.align()
        return bytes(self._out)


class BitReader:
    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0
        self._acc = 0
        self._nbits = 0

    def read(self, width: int) -> int:
        while self._nbits < width:
            self._acc |= self._data[self._pos] << self._nbits
            self._pos += 1
            self._nbits += 8
        value = self._acc & ((1 << width) - 1)
        self._acc >>= width
        self._nbits -= width
        return value

    def read_bytes(self, n: int) -> bytes:
        self.align()
        out = self._data[self._pos : self._pos + n]
        self._pos += n
        return out

    def align(self) -> None:
        self._acc = 0
        self._nbits = 0


_HEADER_FIXED_BITS = (
    32 + 16 + 8 + 64 + 64 + 32 + 4 * 64 + 5 * 64  # magic..plan numbers
)


def _header_bits(advice) -> int:
    return _HEADER_FIXED_BITS + 16 + 8 * len(advice.sample_seed) + 16 + 8 * len(advice.bypass_seed)


def advice_bit_size(advice) -> int:
    """Exact (padding-free) serialised size of one advice, in bits."""
    plan = advice.plan
    L, Lp = plan.domain_size, plan.range_size
    bits = _header_bits(advice)
    if plan.mode == FULL_INVERSE:
        bits += Lp * (L).bit_length()  # sentinel value L means "absent"
    else:
        if plan.mode == CLASSIC_FN:
            bits += 64 + advice.heavy_images.size * (field_width(Lp) + field_width(L))
        bits += plan.r * plan.s * 2 * field_width(L)
    return bits


def _pad8(bits: int) -> int:
    return (bits + 7) // 8 * 8


def advice_body_bits(advice) -> int:
    """Bits of the mode-specific body alone (header excluded).

    The framework format stores one header (plan, seeds) for all its
    sub-functions and packs only bodies per piece.
    """
    return advice_bit_size(advice) - _header_bits(advice)


def write_advice_body(w: BitWriter, advice) -> None:
    plan = advice.plan
    L = plan.domain_size
    if plan.mode == FULL_INVERSE:
        w.align()
        w.write_array(advice.full_inverse, (L).bit_length())
        return
    if plan.mode == CLASSIC_FN:
        w.align()
        w.write(advice.heavy_images.size, 64)
        wi, wp = field_width(plan.range_size), field_width(L)
        for img, pre in zip(advice.heavy_images.tolist(), advice.heavy_preimages.tolist()):
            w.write(int(img), wi)
            w.write(int(pre), wp)
    w.align()
    wd = field_width(L)
    for row in advice.tables.comb:
        for v in row.tolist():
            w.write(int(v) % L, wd)
            w.write(int(v) // L, wd)


def read_table_body(r: BitReader, plan) -> np.ndarray:
    """Read one sample-set body back as a sorted combined-key matrix."""
    L = plan.domain_size
    r.align()
    wd = field_width(L)
    comb = np.empty((plan.r, plan.s), dtype=np.int64)
    for i in range(plan.r):
        for j in range(plan.s):
            start = r.read(wd)
            end = r.read(wd)
            comb[i, j] = end * L + start
    return comb


def read_full_inverse_body(r: BitReader, plan) -> np.ndarray:
    r.align()
    width = (plan.domain_size).bit_length()
    return np.asarray([r.read(width) for _ in range(plan.range_size)], dtype=np.int64)


def write_plan(w: BitWriter, plan) -> None:
    w.write(mode_code(plan.mode), 8)
    w.write(plan.domain_size, 64)
    w.write(plan.range_size, 64)
    w.write(round(plan.delta * 65536), 32)
    for v in (plan.g, plan.t, plan.s, plan.r):
        w.write(v, 64)
    c = plan.constants
    for x in (c.c_g, c.c_t, c.c_s, c.c_r, c.cost_slack):
        w.write(struct.unpack("<Q", struct.pack("<d", x))[0], 64)


PLAN_BITS = 8 + 64 + 64 + 32 + 4 * 64 + 5 * 64


def read_plan(r: BitReader) -> ParamPlan:
    mode = mode_from_code(r.read(8))
    L = r.read(64)
    Lp = r.read(64)
    delta = r.read(32) / 65536.0
    g, t, s, rr = (r.read(64) for _ in range(4))
    floats = [struct.unpack("<d", struct.pack("<Q", r.read(64)))[0] for _ in range(5)]
    constants = PlanConstants(*floats[:4], cost_slack=floats[4])
    return ParamPlan(mode, L, Lp, delta, g=g, t=t, s=s, r=rr, constants=constants)


def serialized_bit_size(advice) -> int:
    """File size in bits including section padding (no serialisation needed).

    The header is byte-aligned by construction; each body section pads to a
    byte boundary.  Tested against len(serialize_advice(...)) * 8.
    """
    plan = advice.plan
    L, Lp = plan.domain_size, plan.range_size
    bits = _header_bits(advice)
    if plan.mode == FULL_INVERSE:
        bits += _pad8(Lp * (L).bit_length())
    else:
        if plan.mode == CLASSIC_FN:
            bits += _pad8(64 + advice.heavy_images.size * (field_width(Lp) + field_width(L)))
        bits += _pad8(plan.r * plan.s * 2 * field_width(L))
    return bits


def serialize_advice(advice) -> bytes:
    plan = advice.plan
    L, Lp = plan.domain_size, plan.range_size
    w = BitWriter()
    w.write_bytes(MAGIC_INVERSION)
    w.write(FORMAT_VERSION, 16)
    w.write(mode_code(plan.mode), 8)
    w.write(L, 64)
    w.write(Lp, 64)
    w.write(round(plan.delta * 65536), 32)
    for v in (plan.g, plan.t, plan.s, plan.r):
        w.write(v, 64)
    c = plan.constants
    for x in (c.c_g, c.c_t, c.c_s, c.c_r, c.cost_slack):
        w.write(struct.unpack("<Q", struct.pack("<d", x))[0], 64)
    w.write(len(advice.sample_seed), 16)
    w.write_bytes(advice.sample_seed)
    w.write(len(advice.bypass_seed), 16)
    w.write_bytes(advice.bypass_seed)

    if plan.mode == FULL_INVERSE:
        w.align()
        w.write_array(advice.full_inverse, (L).bit_length())
    else:
        if plan.mode == CLASSIC_FN:
            w.align()
            w.write(advice.heavy_images.size, 64)
            wi, wp = field_width(Lp), field_width(L)
            for img, pre in zip(advice.heavy_images.tolist(), advice.heavy_preimages.tolist()):
                w.write(int(img), wi)
                w.write(int(pre), wp)
        w.align()
        wd = field_width(L)
        for row in advice.tables.comb:
            for v in row.tolist():
                w.write(int(v) % L, wd)  # start
                w.write(int(v) // L, wd)  # end
    blob = w.getvalue()
    expected = advice_bit_size(advice)
    if w.bits_written != expected:
        raise AssertionError(f"bit accounting mismatch: wrote {w.bits_written}, accounted {expected}")
    return blob


def deserialize_advice(blob: bytes):
    from .inversion import InversionAdvice  # avoid import cycle

    r = BitReader(blob)
    if r.read_bytes(4) != MAGIC_INVERSION:
        raise ValueError("bad magic: not an inversion advice blob")
    version = r.read(16)
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported format version {version}")
    mode = mode_from_code(r.read(8))
    L = r.read(64)
    Lp = r.read(64)
    delta = r.read(32) / 65536.0
    g, t, s, rr = (r.read(64) for _ in range(4))
    floats = [struct.unpack("<d", struct.pack("<Q", r.read(64)))[0] for _ in range(5)]
    constants = PlanConstants(*floats[:4], cost_slack=floats[4])
    sample_seed = r.read_bytes(r.read(16))
    bypass_seed = r.read_bytes(r.read(16))
    plan = ParamPlan(mode, L, Lp, delta, g=g, t=t, s=s, r=rr, constants=constants)
    advice = InversionAdvice(plan=plan, sample_seed=sample_seed, bypass_seed=bypass_seed)

    if mode == FULL_INVERSE:
        r.align()
        width = (L).bit_length()
        advice.full_inverse = np.asarray([r.read(width) for _ in range(Lp)], dtype=np.int64)
    else:
        if mode == CLASSIC_FN:
            r.align()
            count = r.read(64)
            wi, wp = field_width(Lp), field_width(L)
            imgs = np.empty(count, dtype=np.int64)
            pres = np.empty(count, dtype=np.int64)
            for i in range(count):
                imgs[i] = r.read(wi)
                pres[i] = r.read(wp)
            advice.heavy_images, advice.heavy_preimages = imgs, pres
        r.align()
        wd = field_width(L)
        comb = np.empty((rr, s), dtype=np.int64)
        for i in range(rr):
            for j in range(s):
                start = r.read(wd)
                end = r.read(wd)
                comb[i, j] = end * L + start
        advice.tables = TableSet(comb, L)
    advice.bit_size = advice_bit_size(advice)
    return advice
