"""Sampled fields on uniform periodic grids, and the fld1 file format.

A grid with ``N`` samples on an axis of length ``L`` covers ``[-L/2, L/2)``
with spacing ``L/N``; the origin is sample ``N/2``.  Frequencies are angular:
``xi = 2*pi*m/L``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import BinaryIO, Callable, Sequence

import numpy as np

from .errors import DimsMismatch, RangeError


def _is_pow2(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True, eq=False)
class GridField:
    n: int
    dims: tuple
    box: tuple
    samples: np.ndarray

    def __post_init__(self):
        dims = tuple(int(m) for m in self.dims)
        box = tuple(float(b) for b in self.box)
        if self.n not in (1, 2):
            raise RangeError(f"only n=1 and n=2 grids are supported, got n={self.n}")
        if len(dims) != self.n or len(box) != self.n:
            raise DimsMismatch(f"dims {dims} and box {box} must both have length n={self.n}")
        if not all(_is_pow2(m) for m in dims):
            raise RangeError(f"grid sizes must be powers of two, got {dims}")
        if not all(b > 0 for b in box):
            raise RangeError("box lengths must be positive")
        arr = np.array(self.samples, dtype=np.complex128, copy=True).reshape(dims)
        if not np.all(np.isfinite(arr)):
            raise RangeError("field samples must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "samples", arr)

    # -------------------------------------------------------------- geometry

    @property
    def cell_volume(self) -> float:
        return float(np.prod([b / m for b, m in zip(self.box, self.dims)]))

    def axes(self) -> list[np.ndarray]:
        return [-b / 2 + np.arange(m) * (b / m) for m, b in zip(self.dims, self.box)]

    def coords(self) -> list[np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij")

    def radius(self) -> np.ndarray:
        return np.sqrt(sum(c**2 for c in self.coords()))

    def wavenumbers(self) -> list[np.ndarray]:
        """Angular frequencies per axis in FFT order."""
        return [2 * np.pi * np.fft.fftfreq(m, d=b / m) for m, b in zip(self.dims, self.box)]

    def xi_grid(self) -> list[np.ndarray]:
        return np.meshgrid(*self.wavenumbers(), indexing="ij")

    def xi_norm(self) -> np.ndarray:
        return np.sqrt(sum(k**2 for k in self.xi_grid()))

    def nyquist(self) -> float:
        return min(np.pi * m / b for m, b in zip(self.dims, self.box))

    @property
    def origin_index(self) -> tuple:
        return tuple(m // 2 for m in self.dims)

    def value_at_origin(self) -> complex:
        return complex(self.samples[self.origin_index])

    # -------------------------------------------------------------- algebra

    def with_samples(self, samples: np.ndarray) -> "GridField":
        return GridField(self.n, self.dims, self.box, samples)

    def same_grid(self, other: "GridField") -> bool:
        return self.n == other.n and self.dims == other.dims and np.allclose(self.box, other.box)

    def require_same_grid(self, other: "GridField") -> None:
        if not self.same_grid(other):
            raise DimsMismatch(f"grids differ: {self.dims}/{self.box} vs {other.dims}/{other.box}")

    def spectrum(self) -> np.ndarray:
        return np.fft.fftn(self.samples)

    def apply_multiplier(self, mult: np.ndarray) -> "GridField":
        return self.with_samples(np.fft.ifftn(mult * np.fft.fftn(self.samples)))

    def __add__(self, other: "GridField") -> "GridField":
        self.require_same_grid(other)
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other: "GridField") -> "GridField":
        self.require_same_grid(other)
        return self.with_samples(self.samples - other.samples)

    def scale(self, c: complex) -> "GridField":
        return self.with_samples(c * self.samples)

    def l2(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.samples) ** 2) * self.cell_volume))

    @classmethod
    def from_function(cls, f: Callable, dims: Sequence[int], box: Sequence[float]) -> "GridField":
        n = len(dims)
        proto = cls(n, dims, box, np.zeros(tuple(dims)))
        return proto.with_samples(f(*proto.coords()))

    @classmethod
    def zeros_like(cls, other: "GridField") -> "GridField":
        return other.with_samples(np.zeros(other.dims))


# ---------------------------------------------------------------- fld1


def write_fld1(fh: BinaryIO, u: GridField) -> None:
    header = {"n": u.n, "dims": list(u.dims), "box": list(u.box), "dtype": "c128", "layout": "row-major"}
    fh.write(json.dumps(header).encode("utf-8") + b"\n")
    fh.write(np.ascontiguousarray(u.samples, dtype="<c16").tobytes())


def read_fld1(fh: BinaryIO) -> GridField:
    line = fh.readline()
    try:
        header = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise RangeError(f"bad fld1 header: {exc}") from None
    if header.get("dtype") != "c128" or header.get("layout") != "row-major":
        raise RangeError("fld1 files must be c128, row-major")
    dims = tuple(header["dims"])
    count = int(np.prod(dims))
    raw = fh.read()
    if len(raw) != 16 * count:
        raise DimsMismatch(f"fld1 payload has {len(raw)} bytes, expected {16 * count}")
    data = np.frombuffer(raw, dtype="<c16").reshape(dims)
    return GridField(int(header["n"]), dims, tuple(header["box"]), data)


def save_field(path: str, u: GridField) -> None:
    with open(path, "wb") as fh:
        write_fld1(fh, u)


def load_field(path: str) -> GridField:
    with open(path, "rb") as fh:
        return read_fld1(fh)
