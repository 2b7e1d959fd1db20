"""Brute-force reference implementations used only by the test suite.

Everything here is deliberately slow and structurally independent of the
package code: Bessel values come from exact rational power series, Marcum Q
from adaptive Simpson integration of the Rician tail density, eigenvalues
from determinant sign changes, and block fits from exhaustive assignment
search.  Expected constants frozen into the tests were produced by these
routines.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

import numpy as np


def j0_series(x: float) -> float:
    """J0 via the exact rational power series; valid for any modest |x|.

    All arithmetic is exact (fractions.Fraction), so there is no cancellation
    error; the only rounding is the final conversion to float.
    """
    q = Fraction(x) ** 2 / 4
    term = Fraction(1)
    total = Fraction(1)
    k = 0
    while True:
        k += 1
        term = -term * q / (k * k)
        total += term
        if k > abs(x) and abs(term) < Fraction(1, 10 ** 40):
            return float(total)
        if k > 2000:
            raise RuntimeError("j0_series failed to converge")


def i0_series_fraction(x: float) -> Fraction:
    """I0 via the exact rational power series (all terms positive)."""
    q = Fraction(x) ** 2 / 4
    term = Fraction(1)
    total = Fraction(1)
    k = 0
    while True:
        k += 1
        term = term * q / (k * k)
        total += term
        if term < total / 10 ** 40:
            return total
        if k > 5000:
            raise RuntimeError("i0_series failed to converge")


def i0_scaled(x: float) -> float:
    """exp(-x) I0(x) from the exact series, stable for large x via big-int logs."""
    frac = i0_series_fraction(x)
    if x <= 600.0:
        return float(frac) * math.exp(-x)
    log_val = math.log(frac.numerator) - math.log(frac.denominator) - x
    return math.exp(log_val)


def _rician_tail_integrand(t: float, a: float) -> float:
    # t * exp(-(t^2+a^2)/2) I0(at), written with the scaled Bessel so large
    # arguments stay finite: t * exp(-(t-a)^2/2) * [e^{-at} I0(at)]
    return t * math.exp(-0.5 * (t - a) ** 2) * i0_scaled_fast(a * t)


def i0_scaled_fast(x: float) -> float:
    """Float-only scaled I0 used inside the Simpson integrand (positive series
    for small x, asymptotic series beyond; independent of the package code)."""
    if x < 0:
        raise ValueError("negative argument")
    if x <= 25.0:
        q = x * x / 4.0
        term = 1.0
        total = 1.0
        k = 0
        while term > 1e-19 * total:
            k += 1
            term *= q / (k * k)
            total += term
        return math.exp(-x) * total
    term = 1.0
    total = 1.0
    for m in range(1, 40):
        nxt = term * (2 * m - 1) ** 2 / (8.0 * m * x)
        if nxt >= term:
            break
        term = nxt
        total += term
    return total / math.sqrt(2.0 * math.pi * x)


def _adaptive_simpson(f, lo: float, hi: float, tol: float, depth: int = 60) -> float:
    mid = 0.5 * (lo + hi)
    flo, fmid, fhi = f(lo), f(mid), f(hi)
    whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    def recurse(a, b, fa, fm, fb, total, eps, d):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        if d <= 0 or abs(left + right - total) < 15.0 * eps:
            return left + right + (left + right - total) / 15.0
        return (recurse(a, m, fa, flm, fm, left, eps / 2.0, d - 1)
                + recurse(m, b, fm, frm, fb, right, eps / 2.0, d - 1))

    return recurse(lo, hi, flo, fmid, fhi, whole, tol, depth)


def marcum_q1(a: float, b: float, tol: float = 1e-13) -> float:
    """Marcum Q1 by adaptive Simpson integration of the Rician tail density."""
    if b == 0.0:
        return 1.0
    hi = max(a, b) + 50.0
    f = lambda t: _rician_tail_integrand(t, a)
    if b >= a:
        if b >= hi:
            return 0.0
        return min(1.0, max(0.0, _adaptive_simpson(f, b, hi, tol)))
    # near-certain region: integrate the complement for precision
    return min(1.0, max(0.0, 1.0 - _adaptive_simpson(f, 0.0, b, tol)))


def rician_cdf(x: float, mu: float, sigma: float, tol: float = 1e-12) -> float:
    """P(R <= x) for R the envelope of a 2-D normal with mean length mu and
    per-component deviation sigma, by direct density integration."""
    if x <= 0.0:
        return 0.0

    def dens(t: float) -> float:
        return (t / sigma ** 2) * math.exp(-0.5 * ((t - mu) / sigma) ** 2) \
            * i0_scaled_fast(mu * t / sigma ** 2)

    return min(1.0, max(0.0, _adaptive_simpson(dens, 0.0, x, tol)))


def eigenvalues_by_bisection(matrix: np.ndarray, tol: float = 1e-11) -> np.ndarray:
    """Eigenvalues of a small symmetric matrix from sign changes of
    det(A - t I) on a refining grid; independent of any eigensolver."""
    mat = np.asarray(matrix, dtype=float)
    n = mat.shape[0]
    radius = float(np.abs(mat).sum(axis=1).max()) + 1.0  # Gershgorin bound

    def charpoly(t: float) -> float:
        return float(np.linalg.det(mat - t * np.eye(n)))

    grid = np.linspace(-radius, radius, 20001)
    vals = np.array([charpoly(t) for t in grid])
    roots = []
    for i in range(len(grid) - 1):
        lo, hi = grid[i], grid[i + 1]
        flo, fhi = vals[i], vals[i + 1]
        if flo == 0.0:
            roots.append(lo)
            continue
        if flo * fhi < 0.0:
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                fm = charpoly(mid)
                if flo * fm <= 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
                if hi - lo < tol:
                    break
            roots.append(0.5 * (lo + hi))
    return np.sort(np.array(roots))[::-1]


def best_block_fit(spectrum, num_blocks: int, strategy: str, cbc_rho: float = 0.97):
    """Exhaustive search over every assignment of subordinate eigenvalues to
    blocks; returns the minimal squared eigenvalue distance achievable.

    Feasible only for tiny problems (D ** (N - D) assignments).
    """
    lam = np.sort(np.asarray(spectrum, dtype=float))[::-1]
    dominants = lam[:num_blocks]
    rest = lam[num_blocks:]
    best = math.inf
    for assign in product(range(num_blocks), repeat=len(rest)):
        subs = [[] for _ in range(num_blocks)]
        for value, dest in zip(rest, assign):
            subs[dest].append(value)
        implied = []
        target = []
        for d in range(num_blocks):
            size = 1 + len(subs[d])
            if strategy == "vbc":
                if size == 1:
                    rho = 0.0
                else:
                    rho = ((size - 1) * dominants[d] - sum(subs[d])) / (2.0 * (size - 1))
                    rho = min(1.0, max(0.0, rho))
            else:
                rho = cbc_rho
            implied.extend([1.0 + (size - 1) * rho] + [1.0 - rho] * (size - 1))
            target.extend([dominants[d]] + subs[d])
        implied = np.sort(np.array(implied))[::-1]
        target = np.sort(np.array(target))[::-1]
        best = min(best, float(np.sum((implied - target) ** 2)))
    return best
