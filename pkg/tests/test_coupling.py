"""Coupling-bound tests: symbolic Bernoulli cases, Poisson fixed point,
size-bias defects, m-dependent array closed forms vs Monte Carlo."""

import math

import numpy as np
import pytest

from palab.coupling import (
    BernoulliArrayModel,
    CouplingTable,
    QTermTable,
    corollary_bound,
    mdep_bound,
    q_factor,
    q_terms_from_coupling,
    sample_mdep_array,
    sample_mdep_counts,
    size_bias_check,
    coupling_vector_bound,
)
from palab.errors import ContractError, ParameterError
from palab.measures import LatticePmf, PoissonVectorParams, bernoulli_sum_pmf, poisson_vector_pmf
from palab.transport import wasserstein_l1


def bernoulli_pmf(p: float) -> LatticePmf:
    return LatticePmf(1, {(0,): 1.0 - p, (1,): p})


def zero_z(x):
    return (0,) * len(x)


# -- q-terms -------------------------------------------------------------------

def test_q_terms_vanish_for_poisson_with_zero_z():
    params = PoissonVectorParams((0.7, 1.1))
    X = poisson_vector_pmf(params, 1e-13)
    for i in (1, 2):
        Xi = X.prefix_marginal(i)
        coupling = CouplingTable.from_deterministic_z(Xi, zero_z)
        q = q_terms_from_coupling(Xi, params.lambdas[i - 1], coupling)
        assert q.abs_sum() <= 1e-10 + 3 * X.tail_mass


def test_q_terms_bernoulli_zero_z_symbolic():
    p = 0.3
    X = bernoulli_pmf(p)
    coupling = CouplingTable.from_deterministic_z(X, zero_z)
    q = q_terms_from_coupling(X, p, coupling)
    assert q.terms[(1,)] == pytest.approx(p * p, abs=1e-15)
    assert q.terms[(2,)] == pytest.approx(-p * p, abs=1e-15)
    assert set(q.terms) == {(1,), (2,)}


def test_q_terms_bernoulli_z_minus_x_all_zero():
    p = 0.3
    X = bernoulli_pmf(p)
    coupling = CouplingTable.from_deterministic_z(X, lambda x: tuple(-v for v in x))
    q = q_terms_from_coupling(X, p, coupling)
    assert q.terms == {}


def test_q_term_signed_sum_identity():
    # sum_m q_m = E[X_i] - lambda_i * P(X + Z in N_0^i)
    rng = np.random.default_rng(4)
    X = bernoulli_sum_pmf(rng.random((3, 2)) * 0.3)
    X2 = X.prefix_marginal(2)
    coupling = CouplingTable.from_deterministic_z(
        X2, lambda x: (-1 if x[0] > 0 else 0, 1 if x[1] == 0 else -1)
    )
    lam = 0.8
    q = q_terms_from_coupling(X2, lam, coupling)
    e_xi = sum(p * x[-1] for x, p in X2.atoms.items())
    shifted = coupling.x_plus_z_law()
    inside = sum(p for v, p in shifted.items() if all(c >= 0 for c in v))
    assert q.signed_sum() == pytest.approx(e_xi - lam * inside, abs=1e-10)


def test_marginal_mismatch_rejected():
    X = bernoulli_pmf(0.3)
    other = bernoulli_pmf(0.4)
    coupling = CouplingTable.from_deterministic_z(other, zero_z)
    with pytest.raises(ContractError):
        q_terms_from_coupling(X, 0.3, coupling)


# -- coupling vector bound --------------------------------------------------------

def test_bound_zero_for_poisson_fixed_point():
    params = PoissonVectorParams((0.6, 1.2))
    X = poisson_vector_pmf(params, 1e-13)
    couplings = [
        CouplingTable.from_deterministic_z(X.prefix_marginal(i), zero_z) for i in (1, 2)
    ]
    assert coupling_vector_bound(params, couplings) <= 1e-9


def test_bound_bernoulli_symbolic_values():
    p = 0.25
    X = bernoulli_pmf(p)
    params = PoissonVectorParams((p,))
    plain = coupling_vector_bound(params, [CouplingTable.from_deterministic_z(X, zero_z)])
    assert plain == pytest.approx(2 * p * p, abs=1e-14)
    minus = coupling_vector_bound(
        params, [CouplingTable.from_deterministic_z(X, lambda x: tuple(-v for v in x))]
    )
    assert minus == pytest.approx(p * p, abs=1e-14)


def test_improved_never_exceeds_plain():
    rng = np.random.default_rng(9)
    for _ in range(10):
        X = bernoulli_sum_pmf(rng.random((3, 2)) * 0.3)
        lam = PoissonVectorParams(tuple(X.mean()))
        couplings = []
        for i in (1, 2):
            Xi = X.prefix_marginal(i)
            shift = tuple(int(v) for v in rng.integers(-1, 2, size=i))
            couplings.append(
                CouplingTable.from_deterministic_z(
                    Xi, lambda x, s=shift: tuple(min(s_j, x_j) if s_j < 0 else s_j for s_j, x_j in zip(s, x))
                )
            )
        plain = coupling_vector_bound(lam, couplings, improved=False)
        improved = coupling_vector_bound(lam, couplings, improved=True)
        assert improved <= plain + 1e-12


def test_bound_dominates_exact_distance():
    rng = np.random.default_rng(13)
    for _ in range(5):
        p = rng.random((3, 2)) * 0.3
        X = bernoulli_sum_pmf(p)
        params = PoissonVectorParams(tuple(p.sum(axis=0)))
        couplings = [
            CouplingTable.from_deterministic_z(X.prefix_marginal(i), zero_z) for i in (1, 2)
        ]
        bound = coupling_vector_bound(params, couplings)
        target = poisson_vector_pmf(params, 1e-12)
        res = wasserstein_l1(X, target)
        assert res.value <= bound + res.truncation_error + 1e-8


# -- size bias -------------------------------------------------------------------

def test_size_bias_poisson_zero_defect():
    params = PoissonVectorParams((0.9, 0.5))
    X = poisson_vector_pmf(params, 1e-13)
    couplings = [
        CouplingTable.from_deterministic_z(X.prefix_marginal(i), zero_z) for i in (1, 2)
    ]
    report = size_bias_check(X, params, couplings)
    assert report.max_defect <= 1e-10 + 3 * X.tail_mass


def test_size_bias_bernoulli_exact_coupling():
    p = 0.3
    X = bernoulli_pmf(p)
    coupling = CouplingTable.from_deterministic_z(X, lambda x: tuple(-v for v in x))
    report = size_bias_check(X, PoissonVectorParams((p,)), [coupling])
    assert report.max_defect <= 1e-12
    assert report.q_defect <= 1e-12


def test_size_bias_bernoulli_zero_z_reports_premise_violation():
    p = 0.3
    X = bernoulli_pmf(p)
    coupling = CouplingTable.from_deterministic_z(X, zero_z)
    report = size_bias_check(X, PoissonVectorParams((p,)), [coupling])
    assert report.max_defect == pytest.approx(p * p, abs=1e-14)
    assert report.q_defect == pytest.approx(2 * p * p, abs=1e-14)
    assert report.mean_defect <= 1e-15


# -- corollary and m-dependent bounds ---------------------------------------------

def test_corollary_identical_rows_algebra():
    lam = np.array([0.4, 0.3])
    n = 8
    p = np.tile(lam / n, (n, 1))
    assert corollary_bound(p) == pytest.approx(lam.sum() ** 2 / n, rel=1e-12)


def test_corollary_single_row():
    p = np.array([[0.2, 0.15]])
    assert corollary_bound(p) == pytest.approx(0.35**2, rel=1e-12)


def test_corollary_matches_double_loop_oracle():
    rng = np.random.default_rng(31)
    p = rng.random((10, 2)) * 0.4
    brute = sum(
        p[k, i] * p[k, j] for k in range(10) for i in range(2) for j in range(2)
    )
    assert corollary_bound(p) == pytest.approx(brute, rel=1e-12)


def test_mdep_bound_m0_equals_corollary_bitwise():
    rng = np.random.default_rng(37)
    for _ in range(5):
        p = rng.random((12, 3)) * 0.25
        model = BernoulliArrayModel(n=12, d=3, p=p, m=0)
        assert mdep_bound(model) == corollary_bound(p)


def test_mdep_bound_zero_p():
    model = BernoulliArrayModel(n=5, d=2, p=np.zeros((5, 2)), m=1)
    assert mdep_bound(model) == 0.0


def test_mdep_bound_vs_second_writer_oracle():
    rng = np.random.default_rng(41)
    n, d, m = 50, 2, 1
    p = rng.random((n, d)) * 0.02
    model = BernoulliArrayModel(n=n, d=d, p=p, m=m)
    # independent re-implementation of the formula, plain loops
    first = 0.0
    for k in range(n):
        for i in range(d):
            s1 = sum(p[r, i] for r in range(max(0, k - m), min(n, k + m + 1)))
            s2 = sum(
                p[r, j]
                for j in range(i)
                for r in range(max(0, k - m), min(n, k + m + 1))
            )
            first += (s1 + 2 * s2) * p[k, i]
    qs = sum(q_factor(model, k).value for k in range(1, n + 1))
    expect = first + 2 * d * (d + 1) * m * qs
    assert mdep_bound(model) == pytest.approx(expect, rel=1e-12)


# -- Q factors and the shipped window sampler --------------------------------------

def test_q_factor_empty_window_convention():
    model = BernoulliArrayModel(n=4, d=2, p=np.full((4, 2), 0.1), m=0)
    assert q_factor(model, 2).value == 0.0


def test_q_factor_independent_family_is_product():
    rng = np.random.default_rng(43)
    p = rng.random((6, 2)) * 0.3
    model = BernoulliArrayModel(n=6, d=2, p=p, m=1, family="independent")
    for k in range(1, 7):
        k0 = k - 1
        expect = max(
            p[k0, i] * p[r, j]
            for r in range(6)
            if 1 <= abs(k0 - r) <= 1
            for i in range(2)
            for j in range(2)
        )
        assert q_factor(model, k).value == pytest.approx(expect, rel=1e-12)


def test_q_factor_sliding_window_vs_monte_carlo():
    rng = np.random.default_rng(47)
    n, d, m = 20, 2, 1
    p = rng.random((n, d)) * 0.25
    model = BernoulliArrayModel(n=n, d=d, p=p, m=m)
    reps = 10**6
    labels = __import__("palab.coupling", fromlist=["sample_mdep_labels"]).sample_mdep_labels(
        model, reps, seed=123
    )
    k0 = 9
    exact = q_factor(model, k0 + 1).value
    best_freq = 0.0
    for r in (k0 - 1, k0 + 1):
        for i in range(d):
            for j in range(d):
                best_freq = max(best_freq, float(np.mean((labels[:, k0] == i) & (labels[:, r] == j))))
    sigma = math.sqrt(exact * (1 - exact) / reps)
    assert abs(best_freq - exact) <= 4 * sigma + 1e-9


def test_sampler_marginals_match_p():
    rng = np.random.default_rng(53)
    n, d, m = 10, 2, 2
    p = rng.random((n, d)) * 0.3
    model = BernoulliArrayModel(n=n, d=d, p=p, m=m)
    reps = 10**5
    counts = sample_mdep_counts(model, reps, seed=7)
    lam_hat = counts.mean(axis=0)
    lam = p.sum(axis=0)
    sigma = np.sqrt(np.maximum(lam, 1e-12) / reps) * 2  # crude variance bound
    assert np.all(np.abs(lam_hat - lam) <= 6 * sigma)


def test_sampler_gap_beyond_m_uncorrelated():
    rng = np.random.default_rng(59)
    n, d, m = 12, 1, 1
    p = np.full((n, d), 0.3)
    model = BernoulliArrayModel(n=n, d=d, p=p, m=m)
    from palab.coupling import sample_mdep_labels

    reps = 2 * 10**5
    labels = sample_mdep_labels(model, reps, seed=11)
    a = (labels[:, 3] == 0).astype(float)
    b = (labels[:, 3 + m + 1] == 0).astype(float)
    joint = float(np.mean(a * b))
    expect = float(np.mean(a)) * float(np.mean(b))
    sigma = math.sqrt(joint * (1 - joint) / reps)
    assert abs(joint - expect) <= 4 * sigma + 1e-9


def test_sampler_m0_single_draw_shape():
    model = BernoulliArrayModel(n=6, d=3, p=np.full((6, 3), 0.2), m=0)
    arr = sample_mdep_array(model, seed=2)
    assert arr.shape == (6, 3)
    assert np.all(arr.sum(axis=1) <= 1)


def test_model_validation_errors():
    with pytest.raises(ParameterError):
        BernoulliArrayModel(n=2, d=2, p=np.array([[0.7, 0.6], [0.1, 0.1]]), m=0)
    with pytest.raises(ParameterError):
        BernoulliArrayModel(n=2, d=1, p=np.array([[0.5], [0.5]]), m=-1)
    with pytest.raises(ParameterError):
        BernoulliArrayModel(n=2, d=1, p=np.array([[0.5], [0.5]]), m=0, family="nope")
