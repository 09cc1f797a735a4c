"""
Periodic-box fields and Fourier-multiplier operators.

All operators act through the 2D FFT on a square box of side ``box_length``
with ``n`` points per axis, wavenumbers 2*pi/L * {-n/2, ..., n/2-1}.
Fields are immutable once constructed; every operation returns a new field.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import fft as _fft


@dataclass(frozen=True)
class GridSpec:
    """Square periodic box: ``n`` points per axis, physical side ``box_length``."""

    n: int
    box_length: float

    def __post_init__(self) -> None:
        if self.n < 16 or self.n % 2 != 0:
            raise ValueError(f"grid size must be even and >= 16, got {self.n}")
        if not self.box_length > 0:
            raise ValueError(f"box_length must be positive, got {self.box_length}")

    @property
    def dx(self) -> float:
        return self.box_length / self.n

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Mesh of physical coordinates in [0, L) x [0, L)."""
        x = np.arange(self.n) * self.dx
        return np.meshgrid(x, x, indexing="ij")

    def centered_coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Signed minimum-image coordinates relative to the box center."""
        x = np.arange(self.n) * self.dx - self.box_length / 2
        return np.meshgrid(x, x, indexing="ij")

    def wavenumbers(self) -> tuple[np.ndarray, np.ndarray]:
        k = 2 * np.pi * _fft.fftfreq(self.n, d=self.dx)
        return k[:, None], k[None, :]


class _Spectra:
    """Cached multiplier arrays per grid (kept off the frozen dataclass)."""

    _cache: dict[tuple[int, float], "_Spectra"] = {}

    def __init__(self, grid: GridSpec):
        kx, ky = grid.wavenumbers()
        self.kx, self.ky = kx, ky
        self.kmod = np.hypot(kx, ky)
        # Nyquist column is zeroed in the odd-multiplier wavenumbers so that
        # first derivatives of real fields stay real and antisymmetric.
        kd = 2 * np.pi * _fft.fftfreq(grid.n, d=grid.dx)
        kd[grid.n // 2] = 0.0
        self.kx_odd = kd[:, None]
        self.ky_odd = kd[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            self.riesz1 = np.where(self.kmod > 0, 1j * self.kx_odd / self.kmod, 0.0)
            self.riesz2 = np.where(self.kmod > 0, 1j * self.ky_odd / self.kmod, 0.0)
        cut = (grid.n // 3) * (2 * np.pi / grid.box_length)
        self.dealias_mask = (np.abs(kx) <= cut + 1e-12) & (np.abs(ky) <= cut + 1e-12)

    @classmethod
    def of(cls, grid: GridSpec) -> "_Spectra":
        key = (grid.n, grid.box_length)
        if key not in cls._cache:
            cls._cache[key] = cls(grid)
        return cls._cache[key]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class RealField:
    """Scalar field sampled on the grid, physical representation."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError(f"field shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", _freeze(v))

    def __add__(self, other: "RealField") -> "RealField":
        return RealField(self.grid, self.values + other.values)

    def __sub__(self, other: "RealField") -> "RealField":
        return RealField(self.grid, self.values - other.values)

    def __mul__(self, c: float) -> "RealField":
        return RealField(self.grid, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True)
class SpectralField:
    """Scalar field in Fourier representation (conjugate-symmetric coefficients)."""

    grid: GridSpec
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        c = np.asarray(self.coefficients, dtype=complex)
        if c.shape != self.grid.shape:
            raise ValueError(f"coefficient shape {c.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "coefficients", _freeze(c))


@dataclass(frozen=True)
class MultiIndex:
    """Differentiation multi-index (k1, k2) with total order k1 + k2 <= 4."""

    k1: int
    k2: int

    def __post_init__(self) -> None:
        if self.k1 < 0 or self.k2 < 0:
            raise ValueError("multi-index entries must be nonnegative")
        if self.order > 4:
            raise ValueError(f"differentiation order {self.order} > 4 is unsupported")

    @property
    def order(self) -> int:
        return self.k1 + self.k2


def transform_forward(f: RealField) -> SpectralField:
    """FFT of a real field. Rejects non-finite input."""
    if not np.all(np.isfinite(f.values)):
        raise ValueError("field contains non-finite values")
    return SpectralField(f.grid, _fft.fft2(f.values))


def transform_inverse(F: SpectralField) -> RealField:
    """Inverse FFT; imaginary residue of the conjugate-symmetric input is dropped."""
    return RealField(F.grid, np.real(_fft.ifft2(F.coefficients)))


def _apply_multiplier(f: RealField, mult: np.ndarray) -> RealField:
    fh = _fft.fft2(f.values)
    return RealField(f.grid, np.real(_fft.ifft2(mult * fh)))


def apply_fractional_laplacian(f: RealField, alpha: float) -> RealField:
    """(-Laplace)^(alpha/2) f via the |xi|^alpha multiplier; the xi=0 mode maps to 0."""
    if not 1.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (1, 2], got {alpha}")
    sp = _Spectra.of(f.grid)
    return _apply_multiplier(f, sp.kmod**alpha)


def apply_semigroup(f: RealField, t: float, alpha: float) -> RealField:
    """Stable semigroup P_t f via the exp(-t |xi|^alpha) multiplier; P_0 = identity."""
    if t < 0:
        raise ValueError(f"semigroup time must be nonnegative, got {t}")
    if not 1.0 <= alpha <= 2.0:
        raise ValueError(f"alpha must lie in [1, 2], got {alpha}")
    sp = _Spectra.of(f.grid)
    return _apply_multiplier(f, np.exp(-t * sp.kmod**alpha))


def apply_riesz(f: RealField, i: int) -> RealField:
    """Riesz transform R_i, symbol i*xi_i/|xi| with value 0 at xi=0."""
    if i not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {i}")
    sp = _Spectra.of(f.grid)
    return _apply_multiplier(f, sp.riesz1 if i == 1 else sp.riesz2)


def apply_riesz_perp(f: RealField) -> tuple[RealField, RealField]:
    """The divergence-free rotation (-R_2 f, R_1 f)."""
    sp = _Spectra.of(f.grid)
    fh = _fft.fft2(f.values)
    u1 = np.real(_fft.ifft2(-sp.riesz2 * fh))
    u2 = np.real(_fft.ifft2(sp.riesz1 * fh))
    return RealField(f.grid, u1), RealField(f.grid, u2)


def apply_derivative(f: RealField, kappa: MultiIndex) -> RealField:
    """Spectral derivative d^|kappa| f / dx1^k1 dx2^k2."""
    sp = _Spectra.of(f.grid)
    mult = np.ones(f.grid.shape, dtype=complex)
    if kappa.k1:
        mult = mult * (1j * (sp.kx_odd if kappa.k1 % 2 else sp.kx)) ** kappa.k1
    if kappa.k2:
        mult = mult * (1j * (sp.ky_odd if kappa.k2 % 2 else sp.ky)) ** kappa.k2
    return _apply_multiplier(f, mult)


def dealias(F: SpectralField) -> SpectralField:
    """2/3-rule truncation: zero all modes with max(|xi_1|,|xi_2|) above floor(n/3)*2*pi/L."""
    sp = _Spectra.of(F.grid)
    return SpectralField(F.grid, np.where(sp.dealias_mask, F.coefficients, 0.0))


def lp_norm(f: RealField, p: float) -> float:
    """Grid L^p norm with cell measure dx^2; sup norm for p = inf."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max())
    return float((np.sum(a**p) * f.grid.dx**2) ** (1.0 / p))


def spectral_l2_norm(F: SpectralField) -> float:
    """L^2 norm evaluated from Fourier coefficients (Parseval)."""
    g = F.grid
    return float(np.sqrt(np.sum(np.abs(F.coefficients) ** 2) * g.dx**2 / g.n**2))


def mean_value(f: RealField) -> float:
    return float(f.values.mean())
