"""Problem instances: generation profiles and the line-oriented file format.

An instance is one or two integer arrays (or bit-vector arrays for the XOR
variant).  Files are text: a header line ``kind n m k ell M`` followed by
one decimal integer per line (hex for bit vectors), A first, then B for the
two-array kind.  The content digest ties advice files to their instance.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import FormatError

KIND_SUM3 = "sum3"
KIND_KSUM = "ksum"
KIND_KXOR = "kxor"

PROFILES = ("uniform", "clustered", "duplicates", "arithmetic")


@dataclass
class Instance:
    kind: str
    a_values: np.ndarray
    b_values: Optional[np.ndarray] = None  # sum3 only
    k: int = 3
    ell_bits: int = 0  # kxor only
    max_value: int = 0

    @property
    def n(self) -> int:
        return int(self.a_values.size)

    @property
    def m(self) -> int:
        if self.kind == KIND_SUM3:
            return int(self.b_values.size)
        return self.n ** (self.k - 2)

    def validate(self) -> None:
        if self.kind not in (KIND_SUM3, KIND_KSUM, KIND_KXOR):
            raise FormatError(f"unknown instance kind {self.kind!r}")
        if self.n < 1:
            raise FormatError("instance must be non-empty")
        if self.kind == KIND_SUM3:
            if self.b_values is None or self.b_values.size < self.a_values.size:
                raise FormatError("two-array instances need len(A) <= len(B)")
        if self.k < 3:
            raise FormatError("k must be at least 3")
        if self.kind == KIND_KXOR:
            if self.ell_bits < 1:
                raise FormatError("bit vectors need a positive length")
            if int(self.a_values.max(initial=0)) >> self.ell_bits:
                raise FormatError("vector exceeds declared bit length")
        elif (self.a_values < 0).any() or (
            self.b_values is not None and (self.b_values < 0).any()
        ):
            raise FormatError("integers must be non-negative")


def _profile_values(profile: str, n: int, max_value: int, rng: np.random.Generator) -> np.ndarray:
    if profile == "uniform":
        return rng.integers(0, max_value + 1, size=n, dtype=np.int64)
    if profile == "clustered":
        support = rng.integers(0, max_value + 1, size=max(1, n // 8), dtype=np.int64)
        return support[rng.integers(0, support.size, size=n)]
    if profile == "duplicates":
        base = rng.integers(0, max_value + 1, size=(n + 1) // 2, dtype=np.int64)
        vals = np.concatenate([base, base[: n - base.size]])
        rng.shuffle(vals)
        return vals
    if profile == "arithmetic":
        start = int(rng.integers(0, max(1, max_value // 4)))
        step = max(1, (max_value - start) // max(1, n - 1))
        return start + step * np.arange(n, dtype=np.int64)
    raise ValueError(f"unknown profile {profile!r}; expected one of {PROFILES}")


def gen_instance(
    profile: str,
    seed: int,
    kind: str = KIND_SUM3,
    n: int = 64,
    m: Optional[int] = None,
    k: int = 3,
    ell_bits: int = 0,
    max_value: int = 1 << 12,
) -> Instance:
    """Deterministic instance for (profile, seed) and the shape parameters."""
    tag = int.from_bytes(hashlib.sha256(profile.encode()).digest()[:4], "little")
    rng = np.random.default_rng(np.random.SeedSequence([tag, seed]))
    if kind == KIND_KXOR:
        if ell_bits < 1:
            raise ValueError("kxor instances need ell_bits")
        vals = rng.integers(0, 1 << ell_bits, size=n, dtype=np.int64)
        if profile == "duplicates":
            vals[n // 2 :] = vals[: n - n // 2]
        inst = Instance(kind=kind, a_values=vals, k=k, ell_bits=ell_bits)
    elif kind == KIND_KSUM:
        vals = _profile_values(profile, n, max_value, rng)
        inst = Instance(kind=kind, a_values=vals, k=k, max_value=int(vals.max()))
    else:
        a = _profile_values(profile, n, max_value, rng)
        b = _profile_values(profile, m if m is not None else n, max_value, rng)
        if b.size < a.size:
            raise ValueError("need n <= m")
        inst = Instance(
            kind=KIND_SUM3,
            a_values=a,
            b_values=b,
            k=3,
            max_value=int(max(a.max(), b.max())),
        )
    inst.validate()
    return inst


def instance_to_text(inst: Instance) -> str:
    inst.validate()
    m = inst.b_values.size if inst.kind == KIND_SUM3 else 0
    lines = [f"{inst.kind} {inst.n} {m} {inst.k} {inst.ell_bits} {inst.max_value}"]
    if inst.kind == KIND_KXOR:
        width = (inst.ell_bits + 3) // 4
        lines.extend(format(int(v), f"0{width}x") for v in inst.a_values)
    else:
        lines.extend(str(int(v)) for v in inst.a_values)
        if inst.kind == KIND_SUM3:
            lines.extend(str(int(v)) for v in inst.b_values)
    return "\n".join(lines) + "\n"


def instance_from_text(text: str) -> Instance:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty instance file")
    parts = lines[0].split()
    if len(parts) != 6:
        raise FormatError("bad instance header; expected 'kind n m k ell M'")
    kind, n, m, k, ell, max_value = parts[0], *map(int, parts[1:])
    body = lines[1:]
    try:
        if kind == KIND_KXOR:
            vals = np.asarray([int(v, 16) for v in body], dtype=np.int64)
        else:
            vals = np.asarray([int(v) for v in body], dtype=np.int64)
    except ValueError as exc:
        raise FormatError(f"bad value line: {exc}") from exc
    if kind == KIND_SUM3:
        if len(body) != n + m:
            raise FormatError(f"expected {n}+{m} value lines, found {len(body)}")
        inst = Instance(kind, vals[:n], vals[n:], k=3, max_value=max_value)
    else:
        if len(body) != n:
            raise FormatError(f"expected {n} value lines, found {len(body)}")
        inst = Instance(kind, vals, k=k, ell_bits=ell, max_value=max_value)
    inst.validate()
    return inst


def write_instance(inst: Instance, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(instance_to_text(inst))


def read_instance(path: str) -> Instance:
    with open(path) as fh:
        return instance_from_text(fh.read())


def instance_digest(inst: Instance) -> bytes:
    return hashlib.sha256(instance_to_text(inst).encode()).digest()
