import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fsc.errors import DimsMismatch, NotElliptic, RangeError
from fsc.fields import GridField
from fsc.parametrix import (
    ConstCoeffOperator,
    apply_operator,
    apply_parametrix,
    apply_smoothing,
    cauchy_riemann,
    is_elliptic,
    laplacian,
    mixed_derivative,
    multiplier_identity_error,
    parametrix_constant,
    parametrix_identity_residual,
    smoothing_constant,
    sphere_samples,
    symbol,
)

TWO_PI = 2 * math.pi


def band_limited(seed, N=128, cutoff=40.0):
    rng = np.random.default_rng(seed)
    g = GridField(2, (N, N), (TWO_PI, TWO_PI), np.zeros((N, N)))
    spec = (rng.normal(size=g.dims) + 1j * rng.normal(size=g.dims)) * (g.xi_norm() < cutoff)
    return g.with_samples(np.fft.ifftn(spec))


def diag_degenerate():
    # symbol diag(|xi|^2, xi_1^2) up to the i^2 factor
    return ConstCoeffOperator(2, 2, 2, {(2, 0): np.eye(2), (0, 2): [[1.0, 0.0], [0.0, 0.0]]})


def test_laplacian_symbol():
    xi = (0.3, -1.7)
    assert complex(symbol(laplacian(2), xi)[0, 0]) == pytest.approx(-(0.3**2 + 1.7**2))


def test_mixed_symbol_vanishes_on_axis():
    assert abs(symbol(mixed_derivative(), (1.0, 0.0))[0, 0]) == 0.0


@given(
    st.floats(-3, 3, allow_nan=False),
    st.floats(-3, 3, allow_nan=False),
    st.floats(0.1, 10, allow_nan=False),
    st.sampled_from(["lap", "cr", "mixed"]),
)
def test_symbol_homogeneity(x, y, t, which):
    opr = {"lap": laplacian(2), "cr": cauchy_riemann(), "mixed": mixed_derivative()}[which]
    lhs = symbol(opr, (t * x, t * y))
    rhs = t**opr.d * symbol(opr, (x, y))
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_ellipticity():
    lap = is_elliptic(laplacian(2))
    assert lap.verdict and lap.info["min_det"] == pytest.approx(1.0)
    assert is_elliptic(cauchy_riemann()).verdict
    mixed = is_elliptic(mixed_derivative())
    assert not mixed.verdict and mixed.info["min_det"] == 0.0
    deg = is_elliptic(diag_degenerate())
    assert not deg.verdict
    assert [abs(v) for v in deg.info["argmin"]] == pytest.approx([0.0, 1.0])


def test_ellipticity_sample_floor():
    with pytest.raises(RangeError):
        is_elliptic(laplacian(2), samples=10)


@pytest.mark.parametrize("n", [2, 3])
def test_sphere_samples_unit(n):
    pts = sphere_samples(n, 64)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)
    assert any(np.allclose(p, np.eye(n)[0]) for p in pts)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_laplacian_identity(seed):
    assert parametrix_identity_residual(laplacian(2), band_limited(seed), 1.0) <= 1e-10


@pytest.mark.parametrize("seed", [0, 1])
def test_cauchy_riemann_identity(seed):
    u = [band_limited(seed), band_limited(seed + 10)]
    assert parametrix_identity_residual(cauchy_riemann(), u, 2.0) <= 1e-10


def test_identity_with_spectral_tail():
    rng = np.random.default_rng(7)
    u = GridField(2, (128, 128), (TWO_PI, TWO_PI), rng.normal(size=(128, 128)))
    assert parametrix_identity_residual(laplacian(2), u, 1.0) <= 1e-8


def test_parametrix_inverts_away_from_low_frequencies():
    u = band_limited(3)
    g = u.xi_norm()
    high = u.apply_multiplier((g > 4.0).astype(float))
    back = apply_parametrix(laplacian(2), apply_operator(laplacian(2), high), 1.0)
    assert (back - high).l2() <= 1e-12 * high.l2()


def test_smoothing_kills_high_band():
    u = GridField.from_function(lambda x, y: np.cos(12 * x) * np.cos(9 * y), (64, 64), (TWO_PI, TWO_PI))
    out = apply_smoothing(laplacian(2), u, 5.0)
    assert np.max(np.abs(out.samples)) <= 1e-12


def test_zero_field():
    z = GridField(2, (32, 32), (TWO_PI, TWO_PI), np.zeros((32, 32)))
    assert np.all(apply_parametrix(laplacian(2), z).samples == 0)
    assert parametrix_identity_residual(laplacian(2), z) == 0.0


def test_non_elliptic_rejected():
    u = band_limited(0, N=32, cutoff=8)
    with pytest.raises(NotElliptic):
        apply_parametrix(mixed_derivative(), u)
    with pytest.raises(NotElliptic):
        parametrix_identity_residual(diag_degenerate(), [u, u])


@pytest.mark.parametrize("opr", [laplacian(2), cauchy_riemann()], ids=["laplacian", "cauchy-riemann"])
def test_multiplier_identity(opr):
    g = GridField(2, (64, 64), (TWO_PI, TWO_PI), np.zeros((64, 64)))
    assert multiplier_identity_error(opr, g, 1.5) <= 1e-13


def test_parametrix_constant_is_grid_stable():
    consts = []
    for N in (256, 512, 1024):
        g = GridField(1, (N,), (TWO_PI * 4,), np.zeros(N))
        consts.append(parametrix_constant(laplacian(1), g, 1.0))
    assert max(consts) <= 1.1 * min(consts)


@pytest.mark.parametrize("m", range(1, 7))
def test_smoothing_constants_finite(m):
    g = GridField(2, (128, 128), (TWO_PI, TWO_PI), np.zeros((128, 128)))
    c = smoothing_constant(laplacian(2), g, m, 2.0)
    assert math.isfinite(c) and c <= (1 + 16) ** (m / 2)


def test_operator_validation():
    with pytest.raises(RangeError):
        ConstCoeffOperator(2, 1, 2, {(1, 0): [[1.0]]})
    with pytest.raises(DimsMismatch):
        ConstCoeffOperator(2, 2, 1, {(1, 0): [[1.0]]})
    with pytest.raises(RangeError):
        ConstCoeffOperator(2, 1, 1, {(1, 0): [[0.0]]})
    with pytest.raises(DimsMismatch):
        apply_operator(cauchy_riemann(), band_limited(0, N=16, cutoff=4))


def test_json_roundtrip():
    opr = cauchy_riemann()
    back = ConstCoeffOperator.from_json(opr.to_json())
    assert back.to_json() == opr.to_json()
    assert opr.to_json()["coeffs"][0] == {"alpha": [0, 1], "matrix": [[0.0, -1.0], [1.0, 0.0]]}
