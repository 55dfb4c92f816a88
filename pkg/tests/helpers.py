"""Shared test utilities: independent oracles and random pmf generators.

Everything here is deliberately written against a different route than the
implementation it checks (dense LP instead of network simplex, plain sums
instead of the library's accumulation order, Monte Carlo instead of closed
forms), so agreement is meaningful.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from palab.measures import LatticePmf


def lp_wasserstein(P: LatticePmf, Q: LatticePmf) -> float:
    """Direct LP formulation of the optimal-transport problem (HiGHS)."""
    xs, a = P.support_arrays()
    ys, b = Q.support_arrays()
    a = a / a.sum()
    b = b / b.sum()
    m, n = len(a), len(b)
    cost = np.zeros((m, n))
    for k in range(P.dim):
        cost += np.abs(xs[:, k : k + 1] - ys[None, :, k])
    var = np.arange(m * n)
    rows = np.concatenate([var // n, m + (var % n)])
    cols = np.concatenate([var, var])
    A_eq = sparse.csr_matrix(
        (np.ones(2 * m * n), (rows, cols)), shape=(m + n, m * n)
    )
    # drop one redundant balance constraint to keep HiGHS happy about rank
    res = linprog(
        cost.ravel(),
        A_eq=A_eq[:-1],
        b_eq=np.concatenate([a, b])[:-1],
        bounds=(0, None),
        method="highs",
        options={
            "primal_feasibility_tolerance": 1e-10,
            "dual_feasibility_tolerance": 1e-10,
        },
    )
    assert res.status == 0, f"LP oracle failed: {res.message}"
    return float(res.fun)


def random_pmf(rng: np.random.Generator, dim: int, n_atoms: int, span: int = 12) -> LatticePmf:
    """Random finitely supported pmf with tail_mass 0."""
    while span**dim < 2 * n_atoms:
        span += 4
    pts = set()
    while len(pts) < n_atoms:
        pts.add(tuple(int(v) for v in rng.integers(0, span, size=dim)))
    w = rng.random(len(pts)) + 1e-3
    w /= w.sum()
    return LatticePmf(dim, {p: float(x) for p, x in zip(sorted(pts), w)})


def random_lipschitz_table(rng: np.random.Generator, shape: tuple[int, ...], n_cones: int = 6) -> np.ndarray:
    """Random 1-Lipschitz (w.r.t. |.|_1) function on a lattice box, built as a
    minimum of cone functions b_c + |x - y_c|_1."""
    grids = np.meshgrid(*[np.arange(s) for s in shape], indexing="ij")
    out = np.full(shape, np.inf)
    for _ in range(n_cones):
        anchor = [rng.integers(0, s) for s in shape]
        offset = rng.uniform(-2.0, 2.0)
        dist = np.zeros(shape)
        for g, a in zip(grids, anchor):
            dist = dist + np.abs(g - a)
        out = np.minimum(out, offset + dist)
    return out


def random_lipschitz_1d(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random 1-Lipschitz function on 0..n-1 via bounded increments."""
    steps = rng.uniform(-1.0, 1.0, size=n - 1)
    return np.concatenate([[rng.uniform(-1, 1)], steps]).cumsum()
