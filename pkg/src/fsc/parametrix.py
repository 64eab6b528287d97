"""Constant-coefficient homogeneous operators and their Fourier parametrix.

Symbol convention: for ``L = sum_{|alpha|=d} a^alpha d^alpha`` the symbol is
the full Fourier multiplier of L,

    symbol(xi) = i^d * sum_alpha a^alpha xi^alpha,

so the Laplacian has symbol ``-|xi|^2``.  Ellipticity only looks at
``|det symbol|``, which does not depend on the power of i.

With ``chi(xi) = phi(|xi| / R)`` the parametrix is ``Q = (1 - chi) symbol^{-1}``
and the smoothing remainder is ``T = -chi``, so that ``Q L = I + T`` holds
exactly at the multiplier level.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.stats import norm, qmc

from .errors import DimsMismatch, NotElliptic, RangeError
from .fields import GridField
from .lp import phi
from .spaces import ClauseLog, Decision

Field = Union[GridField, Sequence[GridField]]


@dataclass(frozen=True, eq=False)
class ConstCoeffOperator:
    n: int
    k: int
    d: int
    coeffs: dict

    def __post_init__(self):
        if self.d < 1 or self.k < 1 or self.n < 1:
            raise RangeError("n, k and d must be positive")
        clean = {}
        for alpha, mat in self.coeffs.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.n or any(a < 0 for a in alpha) or sum(alpha) != self.d:
                raise RangeError(f"multi-index {alpha} is not of order {self.d} in {self.n} variables")
            m = np.atleast_2d(np.asarray(mat, dtype=float))
            if m.shape != (self.k, self.k):
                raise DimsMismatch(f"coefficient for {alpha} has shape {m.shape}, expected {(self.k, self.k)}")
            clean[alpha] = clean.get(alpha, 0) + m
        if not clean or all(not np.any(m) for m in clean.values()):
            raise RangeError("operator has no nonzero coefficient")
        object.__setattr__(self, "coeffs", clean)

    @property
    def scale(self) -> float:
        return max(float(np.linalg.norm(m, 2)) for m in self.coeffs.values())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "d": self.d,
            "coeffs": [{"alpha": list(a), "matrix": m.tolist()} for a, m in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_json(cls, data: Union[dict, str]) -> "ConstCoeffOperator":
        if isinstance(data, str):
            data = json.loads(data)
        coeffs = {tuple(c["alpha"]): c["matrix"] for c in data["coeffs"]}
        return cls(int(data["n"]), int(data["k"]), int(data["d"]), coeffs)


def laplacian(n: int) -> ConstCoeffOperator:
    coeffs = {}
    for i in range(n):
        alpha = [0] * n
        alpha[i] = 2
        coeffs[tuple(alpha)] = [[1.0]]
    return ConstCoeffOperator(n, 1, 2, coeffs)


def cauchy_riemann() -> ConstCoeffOperator:
    """(u, v) -> (d1 u - d2 v, d2 u + d1 v)."""
    return ConstCoeffOperator(2, 2, 1, {(1, 0): np.eye(2), (0, 1): [[0.0, -1.0], [1.0, 0.0]]})


def mixed_derivative() -> ConstCoeffOperator:
    """d1 d2 in two variables; degenerate along the axes."""
    return ConstCoeffOperator(2, 1, 2, {(1, 1): [[1.0]]})


# ---------------------------------------------------------------- symbol


def symbol_stack(opr: ConstCoeffOperator, xi: Sequence[np.ndarray]) -> np.ndarray:
    """Symbol at broadcastable frequency arrays; returns shape (..., k, k)."""
    xi = [np.asarray(x, dtype=float) for x in xi]
    if len(xi) != opr.n:
        raise DimsMismatch(f"need {opr.n} frequency components, got {len(xi)}")
    shape = np.broadcast(*xi).shape
    out = np.zeros(shape + (opr.k, opr.k), dtype=complex)
    for alpha, mat in opr.coeffs.items():
        mono = np.ones(shape)
        for x, a in zip(xi, alpha):
            if a:
                mono = mono * x**a
        out += mono[..., None, None] * mat
    return out * (1j**opr.d)


def symbol(opr: ConstCoeffOperator, xi: Sequence[float]) -> np.ndarray:
    return symbol_stack(opr, [np.asarray(x) for x in xi])


def sphere_samples(n: int, samples: int) -> np.ndarray:
    """Deterministic unit vectors: axes, diagonals, then a low-discrepancy set."""
    pts = []
    eye = np.eye(n)
    for i in range(n):
        pts += [eye[i], -eye[i]]
        for j in range(i + 1, n):
            for sgn in (1, -1):
                pts.append((eye[i] + sgn * eye[j]) / math.sqrt(2))
    if n == 2:
        golden = (math.sqrt(5) - 1) / 2
        ang = 2 * np.pi * ((np.arange(samples) * golden) % 1.0)
        pts += list(np.stack([np.cos(ang), np.sin(ang)], axis=1))
    elif n >= 3:
        z = norm.ppf(qmc.Halton(d=n, scramble=False).random(samples + 1)[1:])
        pts += list(z / np.linalg.norm(z, axis=1, keepdims=True))
    return np.array(pts)


def is_elliptic(opr: ConstCoeffOperator, samples: int = 256, tol: float = 1e-9) -> Decision:
    """Whether min over sampled unit xi of |det symbol(xi)| exceeds tol * scale^k."""
    if samples < 64:
        raise RangeError("need at least 64 sphere samples")
    pts = sphere_samples(opr.n, samples)
    dets = np.abs(np.linalg.det(symbol_stack(opr, list(pts.T))))
    i = int(np.argmin(dets))
    threshold = tol * opr.scale**opr.k
    log = ClauseLog()
    log.check("min|det symbol|>tol", "elliptic.det", float(dets[i]), ">", threshold)
    return log.decision(min_det=float(dets[i]), argmin=[float(v) for v in pts[i]], samples=len(pts))


def require_elliptic(opr: ConstCoeffOperator) -> None:
    dec = is_elliptic(opr)
    if not dec.verdict:
        raise NotElliptic(f"symbol is singular near xi={dec.info['argmin']} (|det|={dec.info['min_det']:.3e})")


# ---------------------------------------------------------------- multipliers


def _components(opr: ConstCoeffOperator, u: Field) -> tuple[list[GridField], bool]:
    scalar = isinstance(u, GridField)
    comps = [u] if scalar else list(u)
    if len(comps) != opr.k:
        raise DimsMismatch(f"operator acts on {opr.k} components, got {len(comps)}")
    for c in comps:
        if c.n != opr.n:
            raise DimsMismatch(f"operator has n={opr.n}, field has n={c.n}")
        comps[0].require_same_grid(c)
    return comps, scalar


def _apply(mult: np.ndarray, comps: list[GridField], scalar: bool) -> Field:
    spec = np.stack([c.spectrum() for c in comps], axis=-1)
    out = np.einsum("...ij,...j->...i", mult, spec)
    res = [comps[0].with_samples(np.fft.ifftn(out[..., i])) for i in range(len(comps))]
    return res[0] if scalar else res


def _chi(grid: GridField, cutoff_radius: float) -> np.ndarray:
    return phi(grid.xi_norm() / cutoff_radius)


def parametrix_multiplier(opr: ConstCoeffOperator, grid: GridField, cutoff_radius: float = 1.0) -> np.ndarray:
    sym = symbol_stack(opr, grid.xi_grid())
    keep = 1 - _chi(grid, cutoff_radius)
    out = np.zeros_like(sym)
    live = keep > 0
    out[live] = np.linalg.inv(sym[live]) * keep[live][:, None, None]
    return out


def smoothing_multiplier(opr: ConstCoeffOperator, grid: GridField, cutoff_radius: float = 1.0) -> np.ndarray:
    chi = _chi(grid, cutoff_radius)
    return -chi[..., None, None] * np.eye(opr.k)


def apply_operator(opr: ConstCoeffOperator, u: Field) -> Field:
    comps, scalar = _components(opr, u)
    return _apply(symbol_stack(opr, comps[0].xi_grid()), comps, scalar)


def apply_parametrix(opr: ConstCoeffOperator, u: Field, cutoff_radius: float = 1.0) -> Field:
    require_elliptic(opr)
    comps, scalar = _components(opr, u)
    return _apply(parametrix_multiplier(opr, comps[0], cutoff_radius), comps, scalar)


def apply_smoothing(opr: ConstCoeffOperator, u: Field, cutoff_radius: float = 1.0) -> Field:
    require_elliptic(opr)
    comps, scalar = _components(opr, u)
    return _apply(smoothing_multiplier(opr, comps[0], cutoff_radius), comps, scalar)


def _l2(comps: Sequence[GridField]) -> float:
    return math.sqrt(sum(c.l2() ** 2 for c in comps))


def parametrix_identity_residual(opr: ConstCoeffOperator, u: Field, cutoff_radius: float = 1.0) -> float:
    """||Q(Lu) - u - Tu||_2 / ||u||_2."""
    comps, _ = _components(opr, u)
    qlu = apply_parametrix(opr, apply_operator(opr, comps), cutoff_radius)
    tu = apply_smoothing(opr, comps, cutoff_radius)
    diff = [a - b - c for a, b, c in zip(qlu, comps, tu)]
    norm = _l2(comps)
    return 0.0 if norm == 0 else _l2(diff) / norm


def multiplier_identity_error(opr: ConstCoeffOperator, grid: GridField, cutoff_radius: float = 1.0) -> float:
    """max over grid frequencies of |Q(xi) symbol(xi) - I - T(xi)| (entrywise)."""
    sym = symbol_stack(opr, grid.xi_grid())
    lhs = parametrix_multiplier(opr, grid, cutoff_radius) @ sym
    rhs = np.eye(opr.k) + smoothing_multiplier(opr, grid, cutoff_radius)
    return float(np.max(np.abs(lhs - rhs)))


def parametrix_constant(opr: ConstCoeffOperator, grid: GridField, cutoff_radius: float = 1.0) -> float:
    """Grid operator norm of Q : H^{s-d,2} -> H^{s,2}; independent of s."""
    mult = parametrix_multiplier(opr, grid, cutoff_radius)
    weight = (1 + grid.xi_norm() ** 2) ** (opr.d / 2)
    return float(np.max(np.linalg.norm(mult, ord=2, axis=(-2, -1)) * weight))


def smoothing_constant(opr: ConstCoeffOperator, grid: GridField, m: float, cutoff_radius: float = 1.0) -> float:
    """Grid operator norm of T : H^{0,2} -> H^{m,2}."""
    chi = _chi(grid, cutoff_radius)
    return float(np.max(chi * (1 + grid.xi_norm() ** 2) ** (m / 2)))
