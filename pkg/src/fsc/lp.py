"""Littlewood-Paley kernel on periodic grids.

Projections, the H/F/B/W norms, spectral rescaling ``u -> u(r x)``, fitted
rescaling exponents, and the band trichotomy for products.

The radial cutoff is ``phi(t) = 1`` for ``t <= 1``, ``0`` for ``t >= 2``, and
in between the ratio ``b(t-1) / (b(t-1) + b(2-t))`` of the bump
``b(tau) = exp(1 - 1/(1 - tau^2))``.  Each bump is flat where the other one
vanishes, so the glued profile is C-infinity.  ``psi(xi) = phi(xi) - phi(2 xi)``
and band 0 is ``phi`` itself, so the bands telescope to exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.signal import czt

from .errors import AliasingRisk, DimsMismatch, NotHolder, RangeError, SupportTooLarge
from .fields import GridField
from .spaces import Kind, SpaceSpec, is_integer


def _bump(tau: np.ndarray) -> np.ndarray:
    out = np.zeros_like(tau)
    inside = np.abs(tau) < 1
    out[inside] = np.exp(1 - 1 / (1 - tau[inside] ** 2))
    return out


def phi(t) -> np.ndarray:
    """Smooth radial cutoff: 1 on [0,1], 0 on [2,inf)."""
    t = np.asarray(t, dtype=float)
    out = np.where(t <= 1, 1.0, 0.0)
    mid = (t > 1) & (t < 2)
    if np.any(mid):
        a = _bump(t[mid] - 1)
        b = _bump(2 - t[mid])
        out[mid] = a / (a + b)
    return out


def psi(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return phi(t) - phi(2 * t)


class LPBank:
    """Sampled band multipliers psi_k(xi) for one grid."""

    def __init__(self, grid: GridField):
        self.grid = grid
        self.xi = grid.xi_norm()
        top = float(self.xi.max())
        # psi_k is supported in 2^{k-1} < |xi| < 2^{k+1}
        self.top_band = max(int(math.floor(math.log2(top))) + 1, 0) if top > 0 else 0
        self._cache: dict = {}

    def lowpass(self, k: int) -> np.ndarray:
        key = ("low", k)
        if key not in self._cache:
            self._cache[key] = phi(self.xi * 2.0**-k)
        return self._cache[key]

    def band(self, k: int) -> np.ndarray:
        if k < 0:
            raise RangeError("band index must be >= 0")
        key = ("band", k)
        if key not in self._cache:
            self._cache[key] = self.lowpass(0) if k == 0 else self.lowpass(k) - self.lowpass(k - 1)
        return self._cache[key]

    def bands(self) -> range:
        return range(0, self.top_band + 1)

    def partition_error(self) -> float:
        total = sum(self.band(k) for k in self.bands())
        return float(np.max(np.abs(total - 1)))


def lp_project(u: GridField, k: int, mode: str = "band", bank: Optional[LPBank] = None) -> GridField:
    """P_k u (``mode='band'``) or P_{<=k} u (``mode='lowpass'``)."""
    bank = bank or LPBank(u)
    if mode == "band":
        return u.apply_multiplier(bank.band(k))
    if mode == "lowpass":
        return u.apply_multiplier(bank.lowpass(k))
    raise ValueError(f"mode must be 'band' or 'lowpass', got {mode!r}")


# ---------------------------------------------------------------- norms


def lp_norm(values: np.ndarray, p: float, cell_volume: float) -> float:
    return float((np.sum(np.abs(values) ** p) * cell_volume) ** (1 / p))


def _band_samples(u: GridField, bank: LPBank) -> list[np.ndarray]:
    spec = u.spectrum()
    return [np.fft.ifftn(bank.band(k) * spec) for k in bank.bands()]


def space_norm(u: GridField, sp: SpaceSpec, bank: Optional[LPBank] = None) -> float:
    """Grid norm of ``u`` in ``sp`` (Riemann-sum quadrature)."""
    if sp.n != u.n:
        raise DimsMismatch(f"space has n={sp.n}, field has n={u.n}")
    s = float(sp.s)
    p = 1 / float(sp.inv_p)
    dv = u.cell_volume
    if sp.kind is Kind.BesselH:
        mult = (1 + u.xi_norm() ** 2) ** (s / 2)
        return lp_norm(u.apply_multiplier(mult).samples, p, dv)
    if sp.kind is Kind.SlobodeckijW:
        inv_q = Fraction(1, 2) if is_integer(sp.s) else sp.inv_p
        return space_norm(u, SpaceSpec(Kind.TriebelF, sp.s, sp.inv_p, inv_q, sp.n), bank)

    q = 1 / float(sp.inv_q)
    bank = bank or LPBank(u)
    pieces = _band_samples(u, bank)
    low = lp_norm(pieces[0], p, dv)
    weights = [2.0 ** (s * k) for k in range(len(pieces))]
    if sp.kind is Kind.TriebelF:
        agg = sum((w * np.abs(pk)) ** q for w, pk in zip(weights[1:], pieces[1:]))
        return low + lp_norm(agg ** (1 / q), p, dv)
    if sp.kind is Kind.BesovB:
        per_band = [w * lp_norm(pk, p, dv) for w, pk in zip(weights[1:], pieces[1:])]
        return low + float(np.sum(np.asarray(per_band) ** q) ** (1 / q))
    raise ValueError(f"unsupported kind {sp.kind}")


# ---------------------------------------------------------------- rescaling


def _rescale_axis(spec: np.ndarray, r: float, axis: int) -> np.ndarray:
    """Evaluate the trigonometric interpolant at r*x along one axis.

    ``spec`` holds per-axis DFT coefficients along ``axis``; the result is
    back in physical space along that axis.
    """
    spec = np.moveaxis(spec, axis, -1)
    N = spec.shape[-1]
    m = np.arange(-N // 2, N // 2)
    d = np.fft.fftshift(spec, axes=-1) * np.where(m % 2 == 0, 1.0, -1.0)
    j = np.arange(N)
    theta = 2 * np.pi * r * (j / N - 0.5)  # = xi_1 * r * x_j
    out = czt(d, m=N, w=np.exp(2j * np.pi * r / N), a=np.exp(1j * np.pi * r), axis=-1)
    out = out * np.exp(1j * (-N // 2) * theta)
    # split the Nyquist coefficient evenly between -N/2 and +N/2
    nyq = d[..., :1] / 2
    out = out + nyq * (np.exp(1j * (N // 2) * theta) - np.exp(-1j * (N // 2) * theta))
    return np.moveaxis(out / N, -1, axis)


def check_representable(u: GridField, *, edge_tol: float = 1e-8, tail_tol: float = 1e-20) -> None:
    """Raise SupportTooLarge unless u decays at the box edge or is spectrally resolved."""
    peak = float(np.max(np.abs(u.samples)))
    if peak == 0:
        return
    outer = np.zeros(u.dims, dtype=bool)
    for c, b in zip(u.coords(), u.box):
        outer |= np.abs(c) >= 0.375 * b
    edge = float(np.max(np.abs(u.samples[outer]))) / peak
    if edge <= edge_tol:
        return
    power = np.abs(u.spectrum()) ** 2
    high = np.zeros(u.dims, dtype=bool)
    for kk, m, b in zip(u.xi_grid(), u.dims, u.box):
        high |= np.abs(kk) > np.pi * m / (2 * b)
    tail = float(power[high].sum() / power.sum())
    if tail > tail_tol:
        raise SupportTooLarge(
            f"field is neither decayed at the box edge (edge/peak={edge:.2e}) nor spectrally resolved (tail={tail:.2e})"
        )


def rescale_field(u: GridField, r: float, *, check: bool = True) -> GridField:
    """u_r(x) = u(r x) by spectral interpolation on the same grid."""
    r = float(r)
    if not 0 < r <= 1:
        raise RangeError(f"r must lie in (0,1], got {r}")
    if check:
        check_representable(u)
    if r == 1:
        return u.with_samples(u.samples)
    out = np.fft.fftn(u.samples)
    for axis in range(u.n):
        out = _rescale_axis(out, r, axis)
    return u.with_samples(out)


@dataclass(frozen=True)
class RescalingLaw:
    alpha: Fraction
    vanishing_at_zero: bool
    marginal: bool


def predicted_alpha(sp: SpaceSpec, vanishing_at_zero: bool = False) -> RescalingLaw:
    """Exponent alpha in ||chi u(r.)|| <~ r^alpha ||u|| for 0 < r <= 1."""
    gap = sp.s - sp.n * sp.inv_p
    if vanishing_at_zero:
        if gap <= 0:
            raise NotHolder(f"{sp} has s <= n/p; vanishing at a point is not defined")
        return RescalingLaw(min(gap, Fraction(1)), True, gap == 1)
    return RescalingLaw(min(gap, Fraction(0)), False, gap == 0)


def cutoff(u: GridField, radius: Optional[float] = None) -> np.ndarray:
    """The fixed spatial bump: 1 on |x| <= radius, 0 beyond 2*radius (default box/8)."""
    radius = radius if radius is not None else min(u.box) / 8
    return phi(u.radius() / radius)


@dataclass
class RescalingFit:
    slope: float
    predicted: RescalingLaw
    r_list: list
    norms: list
    residual: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "predicted_alpha": str(self.predicted.alpha),
            "marginal": self.predicted.marginal,
            "vanishing_at_zero": self.predicted.vanishing_at_zero,
            "r_list": self.r_list,
            "norms": self.norms,
            "residual": self.residual,
            "diagnostics": self.diagnostics,
        }


def fit_rescaling_exponent(
    u: GridField,
    sp: SpaceSpec,
    vanishing: bool,
    r_list: Sequence[float],
    *,
    chi_radius: Optional[float] = None,
) -> RescalingFit:
    """Least-squares slope of log ||chi u_r|| against log r."""
    r_list = [float(r) for r in r_list]
    if len(r_list) < 4:
        raise RangeError("need at least four r values")
    ratios = np.array(r_list[1:]) / np.array(r_list[:-1])
    if not np.allclose(ratios, ratios[0], rtol=1e-9, atol=0):
        raise RangeError("r values must form a geometric sequence")
    predicted = predicted_alpha(sp, vanishing)
    check_representable(u)
    chi = cutoff(u, chi_radius)
    bank = LPBank(u) if sp.kind in (Kind.TriebelF, Kind.BesovB, Kind.SlobodeckijW) else None
    norms = []
    for r in r_list:
        ur = rescale_field(u, r, check=False)
        norms.append(space_norm(ur.with_samples(chi * ur.samples), sp, bank))
    x, y = np.log(r_list), np.log(norms)
    slope, icpt = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + icpt)) ** 2)))
    diag = {
        "value_at_origin": abs(u.value_at_origin()),
        "chi_radius": chi_radius if chi_radius is not None else min(u.box) / 8,
    }
    return RescalingFit(float(slope), predicted, r_list, [float(v) for v in norms], resid, diag)


# ---------------------------------------------------------------- trichotomy


def trichotomy_pattern(k: int, k1: int, k2: int) -> Optional[int]:
    """Which of the three allowed band patterns (1, 2, 3) the triple matches, if any."""
    if k1 <= k - 4 and k - 3 <= k2 <= k + 3:
        return 1
    if k - 3 <= k1 <= k + 3 and k2 <= k + 5:
        return 2
    if k1 >= k + 4 and abs(k1 - k2) <= 2:
        return 3
    return None


@dataclass(frozen=True)
class TrichotomyResult:
    residual: float
    pattern: Optional[int]

    @property
    def allowed(self) -> bool:
        return self.pattern is not None


def _pad_spectrum(spec: np.ndarray, factor: int) -> np.ndarray:
    """Zero-pad a DFT to ``factor``x size per axis (band-limited inputs only)."""
    out = spec
    for axis in range(spec.ndim):
        N = out.shape[axis]
        M = N * factor
        shifted = np.fft.fftshift(out, axes=axis)
        pad = [(0, 0)] * out.ndim
        pad[axis] = ((M - N) // 2, (M - N) // 2)
        out = np.fft.ifftshift(np.pad(shifted, pad), axes=axis)
    return out * factor**spec.ndim


def trichotomy_residual(u: GridField, v: GridField, k: int, k1: int, k2: int, *, oversample: int = 2) -> TrichotomyResult:
    """||P_k((P_k1 u)(P_k2 v))||_2 / (||P_k1 u||_2 ||P_k2 v||_2) on an oversampled grid."""
    u.require_same_grid(v)
    top = int(math.floor(math.log2(u.nyquist())))
    if max(k1, k2) + 2 > top:
        raise AliasingRisk(f"bands {k1},{k2} too close to the Nyquist band {top}")
    bank = LPBank(u)
    a_spec = bank.band(k1) * u.spectrum()
    b_spec = bank.band(k2) * v.spectrum()
    fine = GridField(u.n, tuple(m * oversample for m in u.dims), u.box, np.zeros(tuple(m * oversample for m in u.dims)))
    a = np.fft.ifftn(_pad_spectrum(a_spec, oversample))
    b = np.fft.ifftn(_pad_spectrum(b_spec, oversample))
    prod = fine.with_samples(a * b)
    out = lp_project(prod, k, "band")
    dv = fine.cell_volume
    denom = lp_norm(a, 2, dv) * lp_norm(b, 2, dv)
    res = 0.0 if denom == 0 else out.l2() / denom
    return TrichotomyResult(float(res), trichotomy_pattern(k, k1, k2))
