"""Truncated periodic box, lattice fields, spectral transforms, and field files.

The box is [-L, L)^N with n uniformly spaced points per axis (x_j = -L + j*h,
h = 2L/n) and wavenumbers k_j in (pi/L) * {-n/2, ..., n/2 - 1}.  All integrals
are the plain lattice quadrature h^N * sum(values), which is spectrally
accurate for smooth periodic integrands.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from scipy import fft as _fft

__all__ = [
    "Grid",
    "Field",
    "integrate",
    "l2_norm",
    "h1_norm_sq",
    "pointwise_power",
    "read_field",
    "write_field",
    "set_fft_workers",
    "get_fft_workers",
]

_MAGIC = b"CHQF"
_FORMAT_VERSION = 1

# Module-level FFT worker count; the CLI exposes it as --threads.
_fft_workers = 1


def set_fft_workers(n: int) -> None:
    global _fft_workers
    if n < 1:
        raise ValueError(f"worker count must be >= 1, got {n}")
    _fft_workers = int(n)


def get_fft_workers() -> int:
    return _fft_workers


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform periodic lattice on [-L, L)^N with cached multiplier tables.

    N = 3 is capped at n = 256 points per axis.
    """

    N: int
    L: float
    n: int

    def __post_init__(self) -> None:
        if self.N not in (1, 2, 3):
            raise ValueError(f"N must be 1, 2, or 3, got {self.N}")
        if not self.L > 0.0:
            raise ValueError(f"L must be > 0, got {self.L}")
        if not (_is_power_of_two(self.n) and self.n >= 16):
            raise ValueError(f"n must be a power of two >= 16, got {self.n}")
        if self.N == 3 and self.n > 256:
            raise ValueError(f"n = {self.n} exceeds the N=3 cap of 256 points per axis")
        object.__setattr__(self, "_cache", {})

    # -- geometry -------------------------------------------------------

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.N

    @property
    def size(self) -> int:
        return self.n**self.N

    @property
    def cell_volume(self) -> float:
        return self.h**self.N

    @property
    def volume(self) -> float:
        return (2.0 * self.L) ** self.N

    def axis_coords(self) -> np.ndarray:
        """Lattice coordinates along one axis: -L + j*h for j = 0..n-1."""
        return -self.L + self.h * np.arange(self.n)

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        """Broadcastable coordinate arrays (sparse, indexing='ij')."""
        x = self.axis_coords()
        return tuple(np.meshgrid(*([x] * self.N), indexing="ij", sparse=True))

    def radius_sq(self) -> np.ndarray:
        """|x|^2 on the full lattice, measured in box coordinates."""
        mesh = self.meshgrid()
        out = np.zeros(self.shape)
        for c in mesh:
            out = out + c * c
        return out

    # -- spectral tables --------------------------------------------------

    @property
    def k_sq(self) -> np.ndarray:
        """|k|^2 per lattice mode in FFT layout; cached."""
        cache = self._cache  # type: ignore[attr-defined]
        if "k_sq" not in cache:
            k1 = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.h)
            axes = np.meshgrid(*([k1] * self.N), indexing="ij", sparse=True)
            out = np.zeros(self.shape)
            for k in axes:
                out = out + k * k
            cache["k_sq"] = out
        return cache["k_sq"]

    @property
    def k_mag(self) -> np.ndarray:
        """|k| per lattice mode; contains exactly one zero entry."""
        cache = self._cache  # type: ignore[attr-defined]
        if "k_mag" not in cache:
            cache["k_mag"] = np.sqrt(self.k_sq)
        return cache["k_mag"]

    # -- transforms -------------------------------------------------------

    def forward(self, values: np.ndarray) -> np.ndarray:
        return _fft.fftn(values, workers=_fft_workers)

    def inverse(self, spectrum: np.ndarray) -> np.ndarray:
        return _fft.ifftn(spectrum, workers=_fft_workers).real

    def compatible(self, other: "Grid") -> bool:
        return self.N == other.N and self.n == other.n and self.L == other.L


@dataclass(frozen=True, eq=False)
class Field:
    """Real-valued grid function with value semantics.

    Construction validates shape and finiteness, so any Field in circulation
    is NaN/Inf-free.  Arithmetic returns new Fields on the same grid.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise ValueError(f"values shape {values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field contains NaN or Inf entries")
        object.__setattr__(self, "values", values)

    def _check_same_grid(self, other: "Field") -> None:
        if self.grid is not other.grid and not self.grid.compatible(other.grid):
            raise ValueError("fields live on incompatible grids")

    def __add__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, Field):
            self._check_same_grid(other)
            return Field(self.grid, self.values * other.values)
        return Field(self.grid, self.values * float(other))

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.values)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def zero_field(grid: Grid) -> Field:
    return Field(grid, np.zeros(grid.shape))


def integrate(f: Field) -> float:
    """Lattice quadrature h^N * sum(f); defines every integral in the package."""
    return float(f.grid.cell_volume * np.sum(f.values))


def l2_norm(f: Field) -> float:
    """Quadrature-weighted L2 norm sqrt(h^N * sum(f^2))."""
    return float(np.sqrt(f.grid.cell_volume * np.sum(f.values * f.values)))


def h1_norm_sq(f: Field, freq: float) -> float:
    """Spectral evaluation of  integral |grad f|^2 + freq * f^2.

    Computed as sum_k (|k|^2 + freq) |fhat(k)|^2 with Parseval scaling;
    strictly positive unless f vanishes identically.
    """
    if not freq > 0.0:
        raise ValueError(f"freq must be > 0, got {freq}")
    spectrum = f.grid.forward(f.values)
    weight = f.grid.k_sq + freq
    total = np.sum(weight * (spectrum.real**2 + spectrum.imag**2))
    return float(total * f.grid.cell_volume / f.grid.size)


def pointwise_power(f: Field, r: float, signed: bool = False) -> Field:
    """Entrywise |f|^r, optionally carrying the sign of f.

    With signed=True this returns |f|^r * sign(f); the odd-power pattern
    |u|^(p-2) u is pointwise_power(u, p - 1, signed=True).  The convention
    0^r := 0 applies for every r > 0.
    """
    if not r > 0.0:
        raise ValueError(f"exponent must be > 0, got {r}")
    mag = np.abs(f.values) ** r
    if signed:
        mag = mag * np.sign(f.values)
    return Field(f.grid, mag)


# -- raw field files ------------------------------------------------------
#
# Layout (all little-endian): magic "CHQF", format version (u32), N (u32),
# n per axis (u32), L (f64), then n^N float64 values in row-major order.


def write_field(f: Field, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<III", _FORMAT_VERSION, f.grid.N, f.grid.n))
        fh.write(struct.pack("<d", f.grid.L))
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_field(path) -> Field:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"not a CHQF field file (magic {magic!r})")
        version, N, n = struct.unpack("<III", fh.read(12))
        if version != _FORMAT_VERSION:
            raise ValueError(f"unsupported CHQF version {version}")
        (L,) = struct.unpack("<d", fh.read(8))
        count = n**N
        data = np.frombuffer(fh.read(count * 8), dtype="<f8", count=count)
    grid = Grid(N=N, L=L, n=n)
    return Field(grid, data.reshape(grid.shape).astype(np.float64))
