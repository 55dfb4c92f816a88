"""Solution of Stein's equation for the Poisson distribution.

For a 1-Lipschitz g on 0..N the solution ghat with ghat(0) = 0 satisfies

    lambda * ghat(i+1) - i * ghat(i) = g(i) - E[g(P_lambda)] .

Run literally, the forward recursion multiplies any perturbation of the mean
by i/lambda per step, i.e. factorially over the range; in double precision it
destroys the solution a few steps past lambda.  We therefore evaluate the same
solution through two algebraically equivalent, well-conditioned forms:

  * forward recursion for i at most floor(lambda) (there i/lambda <= 1, a
    contraction), and
  * the tail series ghat(i+1) = -sum_{k>=1} (g(i+k) - E g) * w_k with
    w_1 = 1/(i+1) and w_{k+1} = w_k * lambda/(i+k+1), which uses no Poisson
    probabilities and cannot underflow.

Beyond the table g is extended as the constant g(N) (any 1-Lipschitz extension
is admissible; the precondition below makes the choice irrelevant up to
eps_tail).  E[g(P_lambda)] is evaluated for that extended g exactly up to
rounding, so the magic-factor bounds survive at full range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import ContractError, ParameterError
from .measures import LatticePmf, PoissonVectorParams

LIPSCHITZ_TOL = 1e-12
DEFAULT_EPS_TAIL = 1e-13
_SERIES_STOP = 1e-18


@dataclass(frozen=True)
class SteinSolution:
    """Solution table of Stein's equation for one (lambda, g) pair."""

    lam: float
    g_values: np.ndarray        # g on 0..N
    ghat_values: np.ndarray     # ghat on 0..N+1, ghat[0] = 0
    poisson_mean_of_g: float

    def residual_max(self) -> float:
        """max_i |lambda*ghat(i+1) - i*ghat(i) - g(i) + E g| over 0..N."""
        n = len(self.g_values)
        i = np.arange(n)
        lhs = self.lam * self.ghat_values[1 : n + 1] - i * self.ghat_values[:n]
        return float(np.max(np.abs(lhs - (self.g_values - self.poisson_mean_of_g))))


def check_lipschitz_1d(g: np.ndarray) -> None:
    if len(g) >= 2:
        worst = float(np.max(np.abs(np.diff(g))))
        if worst > 1.0 + LIPSCHITZ_TOL:
            raise ContractError(f"g declared 1-Lipschitz but max increment is {worst}")


def mean_tail_defect(lam: float, n: int) -> float:
    """Upper bound on |E g_true(P) - E g_ext(P)| over 1-Lipschitz extensions of
    a table ending at n: sum_{k>n} (k-n) pmf(k) = lam*P(P>=n) - n*P(P>n)."""
    if lam == 0.0:
        return 0.0
    return float(lam * stats.poisson.sf(n - 1, lam) - n * stats.poisson.sf(n, lam))


def solve_stein_batch(lam: float, g: np.ndarray, eps_tail: float = DEFAULT_EPS_TAIL,
                      check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized solve for columns of ``g`` (shape (N+1,) or (N+1, B)).

    Returns (ghat with shape (N+2, B), means with shape (B,)).
    """
    g = np.asarray(g, dtype=float)
    squeeze = g.ndim == 1
    if squeeze:
        g = g[:, None]
    n_max = g.shape[0] - 1
    if lam < 0 or not np.isfinite(lam):
        raise ParameterError(f"lambda must be finite and >= 0, got {lam}")
    if check:
        for col in range(g.shape[1]):
            check_lipschitz_1d(g[:, col])
    if lam > 0 and mean_tail_defect(lam, n_max) > eps_tail:
        raise ParameterError(
            f"g table over 0..{n_max} too short to certify E[g(P_{lam:g})] within {eps_tail:g}"
        )
    ghat = np.zeros((n_max + 2, g.shape[1]))
    if lam == 0.0:
        means = g[0].copy()
        idx = np.arange(1, n_max + 1)
        ghat[1 : n_max + 1] = (g[0][None, :] - g[1:]) / idx[:, None]
        ghat[n_max + 1] = (g[0] - g[n_max]) / (n_max + 1)  # constant extension
    else:
        pmf = stats.poisson.pmf(np.arange(n_max + 1), lam)
        means = pmf @ g + float(stats.poisson.sf(n_max, lam)) * g[n_max]
        centered = g - means[None, :]
        mode = min(int(np.floor(lam)), n_max + 1)
        for i in range(mode):
            ghat[i + 1] = (i * ghat[i] + centered[i]) / lam
        big = float(np.max(np.abs(centered)))
        for i in range(mode, n_max + 1):
            acc = np.zeros(g.shape[1])
            w = 1.0 / (i + 1)
            k = 1
            while True:
                acc += centered[min(i + k, n_max)] * w
                q = lam / (i + k + 1)
                if big * w * q / (1.0 - q) < _SERIES_STOP or k > 10_000:
                    break
                w *= q
                k += 1
            ghat[i + 1] = -acc
    return ghat, means


def solve_stein(lam: float, g: np.ndarray, eps_tail: float = DEFAULT_EPS_TAIL) -> SteinSolution:
    """Solve Stein's equation for one 1-Lipschitz table g over 0..N.

    Precondition: the Poisson tail beyond N contributes at most eps_tail to
    E[g(P_lambda)] given g's linear growth bound (checked exactly).
    """
    g = np.asarray(g, dtype=float)
    if g.ndim != 1 or len(g) < 1:
        raise ParameterError("g must be a one-dimensional table over 0..N")
    ghat, means = solve_stein_batch(lam, g, eps_tail=eps_tail)
    return SteinSolution(float(lam), g.copy(), ghat[:, 0], float(means[0]))


def magic_factor_report(sol: SteinSolution) -> tuple[float, float]:
    """(sup_i |ghat(i)|, sup_i |ghat(i+1) - ghat(i)|) over the stored range."""
    sup_abs = float(np.max(np.abs(sol.ghat_values)))
    sup_delta = float(np.max(np.abs(np.diff(sol.ghat_values))))
    return sup_abs, sup_delta


def default_range(lam: float, support_need: int) -> int:
    """Solver-chosen recursion range: max(support need, lam + 12 sqrt(lam) + 50)."""
    return int(max(support_need, np.ceil(lam + 12.0 * np.sqrt(max(lam, 0.0)) + 50.0)))


def check_lipschitz_table(g: np.ndarray) -> None:
    """A table on a lattice box is 1-Lipschitz for |.|_1 iff every
    along-axis increment is at most 1 in absolute value."""
    for axis in range(g.ndim):
        if g.shape[axis] >= 2:
            inc = np.abs(np.diff(g, axis=axis))
            if inc.size and float(inc.max()) > 1.0 + LIPSCHITZ_TOL:
                raise ContractError(
                    f"table not 1-Lipschitz along axis {axis}: max increment {float(inc.max())}"
                )


def _poisson_axis(lam: float, eps: float, max_len: int) -> np.ndarray:
    """Truncated Poisson pmf vector with tail <= eps, or error if it cannot
    fit into max_len entries."""
    if lam == 0.0:
        return np.ones(1)
    n = int(stats.poisson.isf(eps, lam)) if eps < 1.0 else 0
    while stats.poisson.sf(n, lam) > eps:
        n += 1
    if n + 1 > max_len:
        raise ParameterError(
            f"g table axis of length {max_len} too small to cover Poisson({lam:g}) "
            f"tail accuracy {eps:g} (needs {n + 1})"
        )
    return stats.poisson.pmf(np.arange(n + 1), lam)


def decomposition_check(
    X: LatticePmf,
    params: PoissonVectorParams,
    g: np.ndarray,
    eps_box: float = 1e-12,
    eps_tail: float = DEFAULT_EPS_TAIL,
) -> float:
    """Residual of the telescoping decomposition

        E[g(P) - g(X)] = sum_i E[ X_i ghat_i(X_i) - lambda_i ghat_i(X_i + 1) ]

    with ghat_i the Stein solution for the section of g at (X_{1:i-1}, ., P_{i+1:d}),
    evaluated by exhaustive summation over the truncated joint support of the
    independent pair (X, P).  Contract: residual <= 1e-8 plus the truncation
    contribution of the Poisson box.
    """
    d = X.dim
    g = np.asarray(g, dtype=float)
    if params.dim != d or g.ndim != d:
        raise ParameterError("X, params and g must share the dimension d")
    check_lipschitz_table(g)
    xs, px = X.support_arrays()
    sup_max = xs.max(axis=0)
    for i in range(d):
        if sup_max[i] + 2 > g.shape[i]:
            raise ParameterError(
                f"g table axis {i} (length {g.shape[i]}) does not cover the support of X plus 1"
            )
        need = default_range(params.lambdas[i], int(sup_max[i]) + 1)
        if need + 1 > g.shape[i]:
            raise ParameterError(
                f"g table axis {i} too small: solver range needs {need + 1} entries, found {g.shape[i]}"
            )
    axes = [_poisson_axis(lam, eps_box / d, g.shape[i]) for i, lam in enumerate(params.lambdas)]

    # left side: E g(P) - E g(X), both by exhaustive summation
    box = g[tuple(slice(0, len(ax)) for ax in axes)]
    e_g_p = box
    for ax in reversed(axes):
        e_g_p = e_g_p @ ax
    e_g_p = float(e_g_p)
    e_g_x = float(sum(p * g[tuple(x)] for x, p in zip(xs, px)))
    lhs = e_g_p - e_g_x

    # right side, coordinate by coordinate
    rhs = 0.0
    for i in range(1, d + 1):
        lam_i = params.lambdas[i - 1]
        prefix_law: dict[tuple[int, ...], dict[int, float]] = {}
        for x, p in zip(xs, px):
            pre = tuple(int(t) for t in x[: i - 1])
            prefix_law.setdefault(pre, {})
            xi = int(x[i - 1])
            prefix_law[pre][xi] = prefix_law[pre].get(xi, 0.0) + p
        suffix_axes = axes[i:]
        if suffix_axes:
            w = suffix_axes[0]
            for ax in suffix_axes[1:]:
                w = np.multiply.outer(w, ax)
            suffix_w = w.ravel()
            suffix_shape = tuple(len(ax) for ax in suffix_axes)
        else:
            suffix_w = np.ones(1)
            suffix_shape = ()
        # one batched solve per coordinate: columns indexed by (prefix, suffix)
        prefixes = list(prefix_law)
        n_suffix = len(suffix_w)
        cols = []
        for pre in prefixes:
            sec = g[pre][tuple([slice(None)] + [slice(0, s) for s in suffix_shape])]
            cols.append(sec.reshape(sec.shape[0], -1))
        ghat, _ = solve_stein_batch(lam_i, np.concatenate(cols, axis=1), eps_tail=eps_tail, check=False)
        term_i = 0.0
        for pi, pre in enumerate(prefixes):
            base = pi * n_suffix
            for xi, pxi in prefix_law[pre].items():
                inner = xi * ghat[xi, base : base + n_suffix] - lam_i * ghat[xi + 1, base : base + n_suffix]
                term_i += pxi * float(inner @ suffix_w)
        rhs += term_i
    return abs(lhs - rhs)
