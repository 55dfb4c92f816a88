"""Stein-equation tests: closed forms, extended-precision recursion oracle,
magic factors, linearity, and the telescoping decomposition."""

import math

import mpmath
import numpy as np
import pytest

from palab.errors import ContractError, ParameterError
from palab.measures import LatticePmf, PoissonVectorParams, bernoulli_sum_pmf, poisson_vector_pmf
from palab.stein import (
    decomposition_check,
    default_range,
    magic_factor_report,
    solve_stein,
)

from helpers import random_lipschitz_1d, random_lipschitz_table


def mpmath_stein_oracle(lam: float, g: np.ndarray, dps: int | None = None) -> np.ndarray:
    """Literal forward recursion in extended precision (test oracle only).

    The mean uses the same constant-extension convention as the solver, with
    enough tail terms to be exact at the working precision.  The recursion
    amplifies rounding by about i!/lam^i, so the precision is chosen to beat
    that factor with 60 digits to spare.
    """
    n_top = len(g) - 1
    if dps is None:
        amplification = math.lgamma(n_top + 1) / math.log(10) + n_top * max(0.0, -math.log10(lam))
        dps = 60 + int(amplification)
    with mpmath.workdps(dps):
        lam_mp = mpmath.mpf(lam)
        n = len(g) - 1
        kmax = n + max(200, int(10 * lam) + 200)
        mean = mpmath.mpf(0)
        for k in range(kmax + 1):
            gk = mpmath.mpf(float(g[min(k, n)]))
            mean += gk * mpmath.e ** (-lam_mp) * lam_mp**k / mpmath.factorial(k)
        ghat = [mpmath.mpf(0)]
        for i in range(n + 1):
            ghat.append((i * ghat[i] + mpmath.mpf(float(g[i])) - mean) / lam_mp)
        return np.array([float(v) for v in ghat])


def test_constant_g_gives_zero_solution():
    sol = solve_stein(1.7, np.full(40, 3.25))
    assert np.all(sol.ghat_values == 0.0)
    assert magic_factor_report(sol) == (0.0, 0.0)
    assert sol.poisson_mean_of_g == pytest.approx(3.25, abs=1e-14)


def test_lambda_zero_closed_form():
    g = np.arange(30, dtype=float)
    sol = solve_stein(0.0, g)
    assert sol.ghat_values[0] == 0.0
    # closed form (g(0) - g(i)) / i = -1 on the tabulated range; the final
    # entry ghat(N+1) uses the constant extension of g and is not -1
    assert np.allclose(sol.ghat_values[1:30], -1.0, atol=1e-14)
    assert sol.poisson_mean_of_g == 0.0


def test_identity_g_matches_extended_precision_oracle():
    g = np.arange(41, dtype=float)
    sol = solve_stein(1.0, g)
    oracle = mpmath_stein_oracle(1.0, g)
    assert np.max(np.abs(sol.ghat_values - oracle)) <= 1e-12
    assert sol.residual_max() <= 1e-10


@pytest.mark.parametrize("lam", [0.1, 0.9, 3.7, 9.5])
def test_random_g_matches_extended_precision_oracle(lam):
    rng = np.random.default_rng(int(lam * 10))
    g = random_lipschitz_1d(rng, 61)
    sol = solve_stein(lam, g)
    oracle = mpmath_stein_oracle(lam, g)
    assert np.max(np.abs(sol.ghat_values - oracle)) <= 1e-11
    assert sol.residual_max() <= 1e-10


def test_magic_factors_on_long_range():
    rng = np.random.default_rng(99)
    for lam in (0.1, 1.0, 10.0):
        for _ in range(10):
            g = random_lipschitz_1d(rng, 301)
            sol = solve_stein(lam, g)
            sup_abs, sup_delta = magic_factor_report(sol)
            assert sup_abs <= 1.0 + 1e-12, (lam, sup_abs)
            assert sup_delta <= 1.0 + 1e-12, (lam, sup_delta)
            assert sol.residual_max() <= 1e-10


def test_linearity_of_the_solver():
    rng = np.random.default_rng(3)
    g1 = random_lipschitz_1d(rng, 80)
    g2 = random_lipschitz_1d(rng, 80)
    a, b = 0.6, -0.4
    lam = 2.3
    s1 = solve_stein(lam, g1)
    s2 = solve_stein(lam, g2)
    combo = solve_stein(lam, a * g1 + b * g2)
    assert np.max(np.abs(combo.ghat_values - (a * s1.ghat_values + b * s2.ghat_values))) <= 1e-10


def test_non_lipschitz_rejected_and_negative_lambda():
    with pytest.raises(ContractError):
        solve_stein(1.0, np.array([0.0, 2.0, 0.0]))
    with pytest.raises(ParameterError):
        solve_stein(-0.5, np.zeros(10))


def test_short_table_rejected_for_large_lambda():
    with pytest.raises(ParameterError):
        solve_stein(50.0, np.zeros(20) + np.arange(20) * 0.5)


# -- decomposition (telescoping) ----------------------------------------------

def test_decomposition_poisson_vs_itself():
    params = PoissonVectorParams((0.8, 1.4))
    X = poisson_vector_pmf(params, 1e-13)
    n1 = default_range(0.8, 10) + 1
    n2 = default_range(1.4, 10) + 1
    rng = np.random.default_rng(11)
    g = random_lipschitz_table(rng, (n1, n2))
    assert decomposition_check(X, params, g) <= 1e-10


def test_decomposition_bernoulli_identity_g():
    X = bernoulli_sum_pmf(np.array([[0.3]]))
    params = PoissonVectorParams((0.3,))
    n = default_range(0.3, 2) + 1
    g = np.arange(n, dtype=float)
    assert decomposition_check(X, params, g) <= 1e-9


def test_decomposition_random_bernoulli_sum_d2():
    rng = np.random.default_rng(21)
    p = rng.random((3, 2)) * 0.3
    X = bernoulli_sum_pmf(p)
    lam = tuple(p.sum(axis=0))
    params = PoissonVectorParams(lam)
    shape = tuple(default_range(l, 5) + 1 for l in lam)
    g = random_lipschitz_table(rng, shape)
    assert decomposition_check(X, params, g) <= 1e-8


def test_decomposition_rejects_short_table():
    X = bernoulli_sum_pmf(np.array([[0.3]]))
    params = PoissonVectorParams((0.3,))
    with pytest.raises(ParameterError):
        decomposition_check(X, params, np.zeros(10))
