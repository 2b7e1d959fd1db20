"""Unit tests for the special-function layer, checked against the brute-force
oracles in oracles.py (exact rational series, adaptive Simpson)."""

import math

import numpy as np
import pytest

import oracles
from fasrsma.errors import DomainError
from fasrsma.specfun import (
    QuadratureSpec,
    _q1_array,
    _q1_bessel_series,
    _q1_erfc_asymptotic,
    _q1_poisson_gamma,
    bessel_i0_scaled,
    bessel_j0,
    chebyshev_nodes,
    marcum_q1,
)

# ---------------------------------------------------------------------------
# bessel_j0


def test_j0_at_zero_is_one():
    assert bessel_j0(0.0) == 1.0


def test_j0_two_pi():
    # frozen from the exact-series oracle
    assert bessel_j0(2.0 * math.pi) == pytest.approx(0.22027690853993435, rel=1e-12)


def test_j0_first_root():
    assert abs(bessel_j0(2.404825557695773)) < 1e-10


def test_j0_negative_symmetry():
    assert bessel_j0(-3.7) == bessel_j0(3.7)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_j0_rejects_nonfinite(bad):
    with pytest.raises(DomainError):
        bessel_j0(bad)


def test_j0_grid_against_series_oracle():
    # 100-point grid spanning both branches; grid avoids the zeros of J0 so a
    # relative tolerance is meaningful.
    grid = np.linspace(0.05, 60.0, 100)
    for x in grid:
        ref = oracles.j0_series(float(x))
        if abs(ref) < 1e-3:
            continue  # too close to a root for a relative check
        assert bessel_j0(float(x)) == pytest.approx(ref, rel=1e-12)


# ---------------------------------------------------------------------------
# bessel_i0_scaled


def test_i0e_at_zero():
    assert bessel_i0_scaled(0.0) == 1.0


def test_i0e_at_one():
    # I0(1) = 1.2660658777520082..., times exp(-1); frozen from the oracle
    assert bessel_i0_scaled(1.0) == pytest.approx(0.4657596075936404, rel=1e-12)


def test_i0e_large_argument_no_overflow():
    val = bessel_i0_scaled(700.0)
    assert math.isfinite(val) and val > 0.0
    # asymptotically 1/sqrt(2 pi x); agreement to the leading-order level
    assert val == pytest.approx(1.0 / math.sqrt(2.0 * math.pi * 700.0), rel=1e-3)
    assert val == pytest.approx(oracles.i0_scaled(700.0), rel=1e-12)


def test_i0e_rejects_negative_and_nonfinite():
    for bad in (-0.1, math.nan, math.inf):
        with pytest.raises(DomainError):
            bessel_i0_scaled(bad)


def test_i0e_grid_against_oracle():
    grid = np.concatenate([np.linspace(0.0, 19.5, 60), np.linspace(20.5, 600.0, 40)])
    for x in grid:
        assert bessel_i0_scaled(float(x)) == pytest.approx(
            oracles.i0_scaled(float(x)), rel=1e-12
        )


def test_i0e_bounded_in_unit_interval():
    for x in np.linspace(0.0, 300.0, 200):
        v = bessel_i0_scaled(float(x))
        assert 0.0 < v <= 1.0


# ---------------------------------------------------------------------------
# marcum_q1


def test_q1_both_zero():
    assert marcum_q1(0.0, 0.0) == 1.0


def test_q1_zero_noncentrality_is_gaussian_tail():
    assert marcum_q1(0.0, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-12)


def test_q1_unit_point():
    # oracle value; the exact identity Q1(a,a) = (1 + e^{-a^2} I0(a^2)) / 2
    # gives the same digits
    ref = oracles.marcum_q1(1.0, 1.0)
    ident = 0.5 * (1.0 + math.exp(-1.0) * float(oracles.i0_series_fraction(1.0)))
    assert ref == pytest.approx(ident, abs=1e-12)
    assert marcum_q1(1.0, 1.0) == pytest.approx(ref, abs=1e-3)
    assert marcum_q1(1.0, 1.0) == pytest.approx(0.7328798037968204, abs=1e-10)


def test_q1_at_b_zero_is_one():
    for a in [0.0, 0.5, 3.0, 40.0, 5000.0]:
        assert marcum_q1(a, 0.0) == 1.0


def test_q1_rejects_bad_input():
    for a, b in [(-1.0, 0.0), (0.0, -2.0), (math.nan, 1.0), (1.0, math.inf)]:
        with pytest.raises(DomainError):
            marcum_q1(a, b)


def test_q1_grid_against_simpson_oracle():
    rng = np.random.default_rng(7)
    a = rng.uniform(0.0, 30.0, 100)
    b = rng.uniform(0.0, 30.0, 100)
    for x, y in zip(a, b):
        assert marcum_q1(float(x), float(y)) == pytest.approx(
            oracles.marcum_q1(float(x), float(y)), abs=1e-10
        )


def test_q1_large_argument_against_oracle():
    for a, b in [(100.0, 101.0), (100.0, 97.0), (250.0, 252.0), (400.0, 399.0)]:
        assert marcum_q1(a, b) == pytest.approx(oracles.marcum_q1(a, b), abs=1e-10)


def test_q1_branch_seam_series_vs_poisson():
    # along the a*b = 30 switching curve both internal branches must agree
    for a in np.linspace(0.7, 29.0, 40):
        b = 30.0 / a
        if abs(a - b) >= 45.0:
            continue
        assert _q1_bessel_series(float(a), float(b)) == pytest.approx(
            _q1_poisson_gamma(float(a), float(b)), abs=1e-10
        )


def test_q1_branch_seam_poisson_vs_erfc():
    for xi in np.linspace(-40.0, 40.0, 41):
        a = 200.0
        b = a + xi
        assert _q1_poisson_gamma(a, float(b)) == pytest.approx(
            _q1_erfc_asymptotic(a, float(b)), abs=1e-10
        )


def test_q1_monotone_in_each_argument():
    grid = np.linspace(0.0, 10.0, 41)
    for a in grid:
        vals = [marcum_q1(float(a), float(b)) for b in grid]
        assert all(vals[i + 1] <= vals[i] + 1e-12 for i in range(len(vals) - 1))
    for b in grid:
        vals = [marcum_q1(float(a), float(b)) for a in grid]
        assert all(vals[i + 1] >= vals[i] - 1e-12 for i in range(len(vals) - 1))


def test_q1_clamped_to_unit_interval():
    rng = np.random.default_rng(11)
    for _ in range(200):
        a = float(rng.uniform(0, 2000))
        b = float(rng.uniform(0, 2000))
        v = marcum_q1(a, b)
        assert 0.0 <= v <= 1.0


def test_q1_array_matches_scalar():
    rng = np.random.default_rng(3)
    a = rng.uniform(0.0, 80.0, 256)
    b = rng.uniform(0.0, 80.0, 256)
    vec = _q1_array(a, b)
    ref = np.array([marcum_q1(float(x), float(y)) for x, y in zip(a, b)])
    assert np.array_equal(vec, ref)


def test_q1_array_broadcasts_scalar_b():
    a = np.linspace(0.0, 300.0, 64)
    vec = _q1_array(a, 2.5)
    ref = np.array([marcum_q1(float(x), 2.5) for x in a])
    assert np.array_equal(vec, ref)


# ---------------------------------------------------------------------------
# chebyshev_nodes / QuadratureSpec


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(cutoff=-1.0, nodes=30)
    with pytest.raises(DomainError):
        QuadratureSpec(cutoff=8.0, nodes=0)


def test_single_node_rule():
    alpha, w = chebyshev_nodes(QuadratureSpec(cutoff=2.0, nodes=1))
    assert alpha.shape == (1,) and w.shape == (1,)
    assert alpha[0] == pytest.approx(1.0, abs=1e-15)
    assert w[0] == pytest.approx(math.pi, rel=1e-15)


def test_nodes_inside_interval_and_weights_positive():
    spec = QuadratureSpec(cutoff=8.0, nodes=30)
    alpha, w = chebyshev_nodes(spec)
    assert alpha.shape == (30,)
    assert np.all(alpha > 0.0) and np.all(alpha < 8.0)
    assert np.all(w > 0.0)
    assert np.all(np.diff(alpha) < 0.0)  # decreasing with k


def test_linear_integrand_half_percent():
    alpha, w = chebyshev_nodes(QuadratureSpec(cutoff=8.0, nodes=30))
    approx = float(np.sum(w * alpha))
    assert approx == pytest.approx(32.0, rel=5e-3)


def test_quadrature_convergence_on_gaussian():
    # In the rule's native Chebyshev-weighted sense the smooth integrand
    # exp(-z^2) converges spectrally: doubling the nodes moves nothing.
    def weighted(nodes):
        alpha, _ = chebyshev_nodes(QuadratureSpec(cutoff=8.0, nodes=nodes))
        return float(np.sum(math.pi * 8.0 / (2.0 * nodes) * np.exp(-alpha * alpha)))

    assert abs(weighted(60) - weighted(30)) < 1e-6


def test_mapped_rule_on_vanishing_integrand():
    # The outage/capacity integrands vanish at both interval ends (Rayleigh
    # factor); for those the mapped rule converges fast: doubling 30 -> 60
    # moves the Rayleigh-mass integral by well under 1e-4.
    def mapped(nodes):
        alpha, w = chebyshev_nodes(QuadratureSpec(cutoff=8.0, nodes=nodes))
        return float(np.sum(w * 2.0 * alpha * np.exp(-alpha * alpha)))

    assert mapped(30) == pytest.approx(1.0, abs=2e-5)
    assert abs(mapped(60) - mapped(30)) < 1e-4
