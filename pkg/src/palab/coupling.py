"""Coupling-based Poisson approximation bounds for random vectors.

Covers three layers:

  * explicit coupling tables (the joint law of (X_{1:i}, Z^{(i)})) and the
    q-term functional they induce,
  * the resulting distance bound and its improved variant, plus a size-bias
    defect report,
  * m-dependent Bernoulli vector arrays with a shipped window sampler whose
    marginals and pairwise moments have closed forms, giving exact Q factors
    and the m-dependent bound.

All bound evaluations fix their summation order (k outer, i inner, r
innermost, exactly rounded outer sum) so values reproduce bitwise across
platforms; the independent-rows bound is the m = 0 instance of the same
kernel, which makes the two agree bitwise by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import streams
from .errors import ContractError, ParameterError
from .measures import LatticePmf, PoissonVectorParams

MARGINAL_TOL = 1e-12

IntVec = tuple[int, ...]


# ---------------------------------------------------------------------------
# coupling tables and q-terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CouplingTable:
    """Joint law of (X_{1:i}, Z^{(i)}): keys (x, z) with x in N_0^i, z in Z^i."""

    dim: int
    joint: dict[tuple[IntVec, IntVec], float]

    def __post_init__(self):
        clean = {}
        total = 0.0
        for (x, z), p in self.joint.items():
            x = tuple(int(v) for v in x)
            z = tuple(int(v) for v in z)
            if len(x) != self.dim or len(z) != self.dim:
                raise ParameterError(f"key {(x, z)} does not match dim {self.dim}")
            if any(v < 0 for v in x):
                raise ParameterError(f"x part {x} must lie in N_0^{self.dim}")
            if not (p >= 0.0):
                raise ParameterError(f"negative joint probability at {(x, z)}")
            if p > 0.0:
                clean[(x, z)] = float(p)
                total += p
        if abs(total - 1.0) > MARGINAL_TOL:
            raise ParameterError(f"joint probabilities sum to {total}, not 1")
        object.__setattr__(self, "joint", clean)

    @staticmethod
    def from_deterministic_z(x_law: LatticePmf, z_of_x: Callable[[IntVec], IntVec]) -> "CouplingTable":
        """Coupling with Z a deterministic function of X (Z == 0, Z == -X, ...)."""
        joint = {(x, tuple(int(v) for v in z_of_x(x))): p for x, p in x_law.atoms.items()}
        return CouplingTable(x_law.dim, joint)

    def x_marginal(self) -> dict[IntVec, float]:
        acc: dict[IntVec, float] = {}
        for (x, _z), p in self.joint.items():
            acc[x] = acc.get(x, 0.0) + p
        return acc

    def x_plus_z_law(self) -> dict[IntVec, float]:
        acc: dict[IntVec, float] = {}
        for (x, z), p in self.joint.items():
            v = tuple(a + b for a, b in zip(x, z))
            acc[v] = acc.get(v, 0.0) + p
        return acc

    def abs_z_means(self) -> np.ndarray:
        """E|Z_j| for j = 1..i."""
        out = np.zeros(self.dim)
        for (_x, z), p in self.joint.items():
            out += p * np.abs(z)
        return out

    def prob_z_prefix_nonzero(self) -> float:
        """P(Z_{1:i-1} != 0)."""
        return sum(p for (_x, z), p in self.joint.items() if any(v != 0 for v in z[:-1]))

    def check_marginal(self, X: LatticePmf) -> None:
        if X.dim != self.dim:
            raise ContractError(f"coupling dim {self.dim} vs X dim {X.dim}")
        marg = self.x_marginal()
        keys = set(marg) | set(X.atoms)
        worst = max(abs(marg.get(k, 0.0) - X.atoms.get(k, 0.0)) for k in keys)
        if worst > MARGINAL_TOL + X.tail_mass:
            raise ContractError(f"coupling marginal deviates from X by {worst:.3e}")


@dataclass(frozen=True)
class QTermTable:
    """q^{(i)}_m = m_i P(X_{1:i} = m) - lambda_i P(X_{1:i} + Z^{(i)} = (m_{1:i-1}, m_i - 1)),
    stored for every m with a nonzero value (m_i >= 1)."""

    dim: int
    terms: dict[IntVec, float]

    def __post_init__(self):
        for m in self.terms:
            if len(m) != self.dim or m[-1] < 1 or any(v < 0 for v in m):
                raise ParameterError(f"q-term key {m} must lie in N_0^{self.dim} with m_i >= 1")

    def abs_sum(self) -> float:
        return float(math.fsum(abs(v) for v in self.terms.values()))

    def signed_sum(self) -> float:
        return float(math.fsum(self.terms.values()))


def q_terms_from_coupling(X: LatticePmf, lambda_i: float, coupling: CouplingTable) -> QTermTable:
    """Evaluate the q-terms exactly from the joint table.

    ``X`` is the law of the first i coordinates and must agree with the
    coupling's X-marginal.  Couplings under which X + Z exits N_0^i are
    accepted; exited atoms simply cannot be hit by any admissible m.
    """
    coupling.check_marginal(X)
    if lambda_i < 0:
        raise ParameterError("lambda_i must be >= 0")
    shifted = coupling.x_plus_z_law()
    terms: dict[IntVec, float] = {}
    for x, p in X.atoms.items():
        if x[-1] >= 1:
            terms[x] = x[-1] * p
    for v, p in shifted.items():
        if any(c < 0 for c in v):
            continue  # X + Z left N_0^i; no m maps onto this atom
        m = v[:-1] + (v[-1] + 1,)
        terms[m] = terms.get(m, 0.0) - lambda_i * p
    return QTermTable(coupling.dim, {m: t for m, t in terms.items() if t != 0.0})


def coupling_vector_bound(
    lambdas: PoissonVectorParams,
    couplings: list[CouplingTable],
    improved: bool = False,
) -> float:
    """Wasserstein bound from one coupling per coordinate:

        sum_i [ lambda_i E|Z_i| + 2 lambda_i sum_{j<i} E|Z_j| + sum_m |q^{(i)}_m| ]

    With ``improved`` the middle term becomes 2 lambda_i P(Z_{1:i-1} != 0),
    which never exceeds the plain variant.
    """
    d = lambdas.dim
    if len(couplings) != d:
        raise ParameterError(f"need one coupling per coordinate: got {len(couplings)} for d={d}")
    total = []
    for i, coupling in enumerate(couplings, start=1):
        if coupling.dim != i:
            raise ParameterError(f"coupling {i} has dim {coupling.dim}, expected {i}")
        lam = lambdas.lambdas[i - 1]
        marg = LatticePmf(i, coupling.x_marginal())
        q = q_terms_from_coupling(marg, lam, coupling)
        ez = coupling.abs_z_means()
        if improved:
            middle = 2.0 * lam * coupling.prob_z_prefix_nonzero()
        else:
            middle = 2.0 * lam * float(ez[:-1].sum())
        total.append(lam * float(ez[-1]) + middle + q.abs_sum())
    return float(math.fsum(total))


@dataclass(frozen=True)
class SizeBiasReport:
    """Defects of the size-bias identity E[X_i f(X_{1:i})] = E[X_i] E[f(Y^(i))]
    over indicator test functions, plus the defects of its premises."""

    max_defect: float
    mean_defect: float   # max_i |E X_i - lambda_i|
    q_defect: float      # max_i sum_m |q^{(i)}_m|


def size_bias_check(
    X: LatticePmf,
    lambdas: PoissonVectorParams,
    couplings: list[CouplingTable],
) -> SizeBiasReport:
    """Check the approximate-size-bias reading of the coupling hypothesis.

    Y^(i) = (X_{1:i-1}, X_i + 1) + Z^(i); for each i the identity is tested
    against every indicator of a point in the union of supports.  Premise
    defects (nonzero q-terms, E[X_i] != lambda_i) are reported, not thrown.
    """
    d = X.dim
    if len(couplings) != d or lambdas.dim != d:
        raise ParameterError("need X, lambdas and couplings of matching dimension")
    worst = 0.0
    worst_mean = 0.0
    worst_q = 0.0
    for i, coupling in enumerate(couplings, start=1):
        xi_law = X.prefix_marginal(i)
        coupling.check_marginal(xi_law)
        lam = lambdas.lambdas[i - 1]
        e_xi = float(sum(p * x[-1] for x, p in xi_law.atoms.items()))
        worst_mean = max(worst_mean, abs(e_xi - lam))
        worst_q = max(worst_q, q_terms_from_coupling(xi_law, lam, coupling).abs_sum())
        y_law: dict[IntVec, float] = {}
        for (x, z), p in coupling.joint.items():
            y = tuple(a + b for a, b in zip(x[:-1] + (x[-1] + 1,), z))
            y_law[y] = y_law.get(y, 0.0) + p
        for y in set(xi_law.atoms) | set(y_law):
            lhs = y[-1] * xi_law.atoms.get(y, 0.0) if all(v >= 0 for v in y) else 0.0
            rhs = e_xi * y_law.get(y, 0.0)
            worst = max(worst, abs(lhs - rhs))
    return SizeBiasReport(max_defect=worst, mean_defect=worst_mean, q_defect=worst_q)


# ---------------------------------------------------------------------------
# m-dependent Bernoulli arrays
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QFactorResult:
    value: float
    std_error: float = 0.0  # zero for the shipped families (exact evaluation)


@dataclass(frozen=True)
class BernoulliArrayModel:
    """Array of n Bernoulli vectors in {0, e_1, ..., e_d} with dependence range m.

    Shipped window-sampler families (measurable maps of m+1 shared uniforms):

      * ``sliding_min``: Y^(r) = e_j iff min(U_r, ..., U_{r+m}) falls in the
        per-(r, j) interval calibrated through P(min > s) = (1-s)^(m+1); exact
        marginals and exact pairwise expectations in closed form.
      * ``independent``: Y^(r) looks only at U_r, so the vectors are i.i.d.
        regardless of the declared m (an independent family embedded with
        m >= 1).

    A custom classifier (callable mapping the (reps, m+1) window of uniforms
    for index r to labels 0..d, 0 meaning the zero vector, j meaning e_j) may
    be supplied; Q factors then fall back to Monte Carlo.
    """

    n: int
    d: int
    p: np.ndarray
    m: int
    family: str = "sliding_min"
    classifier: Optional[Callable[[np.ndarray, int], np.ndarray]] = None

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (self.n, self.d):
            raise ParameterError(f"p must be n x d = {(self.n, self.d)}, got {p.shape}")
        if np.any(p < 0) or np.any(p > 1):
            raise ParameterError("entries of p must lie in [0,1]")
        if np.any(p.sum(axis=1) > 1.0 + 1e-12):
            raise ParameterError("row sums of p must be <= 1")
        if self.m < 0:
            raise ParameterError("dependence range m must be >= 0")
        if self.family not in ("sliding_min", "independent", "custom"):
            raise ParameterError(f"unknown window-sampler family {self.family!r}")
        if self.family == "custom" and self.classifier is None:
            raise ParameterError("custom family needs a classifier")
        object.__setattr__(self, "p", p)
        if self.family in ("sliding_min", "independent"):
            worst = float(np.max(np.abs(self._exact_marginals() - p))) if self.n else 0.0
            if worst > MARGINAL_TOL:
                raise ContractError(f"window sampler marginals deviate from p by {worst:.3e}")

    # -- shipped family internals -----------------------------------------
    def _thresholds(self) -> np.ndarray:
        """Per-row cut points t_{r,0..d} on the scale of the window minimum."""
        cum = np.concatenate([np.zeros((self.n, 1)), np.cumsum(self.p, axis=1)], axis=1)
        cum = np.clip(cum, 0.0, 1.0)
        if self.family == "sliding_min":
            return 1.0 - (1.0 - cum) ** (1.0 / (self.m + 1))
        return cum

    def _exact_marginals(self) -> np.ndarray:
        t = self._thresholds()
        if self.family == "sliding_min":
            surv = (1.0 - t) ** (self.m + 1)
        else:
            surv = 1.0 - t
        return surv[:, :-1] - surv[:, 1:]

    def pair_expectation(self, k: int, r: int, i: int, j: int) -> float:
        """Exact E[1{Y^(k) = e_i} 1{Y^(r) = e_j}] for the shipped families
        (0-based indices all around), valid for k != r."""
        if self.family == "custom":
            raise ParameterError("no closed form for a custom family")
        t = self._thresholds()
        a1, b1 = t[k, i], t[k, i + 1]
        a2, b2 = t[r, j], t[r, j + 1]
        gap = abs(k - r)
        if self.family == "independent" or gap > self.m:
            return float(self.p[k, i] * self.p[r, j])
        alpha = gap
        beta = self.m + 1 - gap

        def surv2(s: float, u: float) -> float:
            return (1.0 - s) ** alpha * (1.0 - u) ** alpha * (1.0 - max(s, u)) ** beta

        return float(surv2(a1, a2) - surv2(b1, a2) - surv2(a1, b2) + surv2(b1, b2))


def sample_mdep_labels(model: BernoulliArrayModel, reps: int, seed: int) -> np.ndarray:
    """Labels in {0..d} for each (rep, index): 0 = zero vector, j = e_j.

    Draws n + m shared uniforms per repetition and applies the window sampler.
    """
    rng = streams.derive(seed, 0)
    u = rng.random((reps, model.n + model.m))
    if model.family == "custom":
        labels = np.zeros((reps, model.n), dtype=np.int64)
        for r in range(model.n):
            labels[:, r] = model.classifier(u[:, r : r + model.m + 1], r)
        return labels
    if model.family == "sliding_min":
        if model.m == 0:
            stat = u[:, : model.n]
        else:
            stat = np.lib.stride_tricks.sliding_window_view(u, model.m + 1, axis=1).min(axis=2)
    else:
        stat = u[:, : model.n]
    t = model._thresholds()  # (n, d+1)
    labels = np.zeros((reps, model.n), dtype=np.int64)
    for r in range(model.n):
        # label = #{j >= 1 : t_{r,j} < stat}; stat in (t_{j-1}, t_j] maps to
        # e_j (0-based label j-1) and stat beyond t_d to the zero vector (d)
        labels[:, r] = np.searchsorted(t[r, 1:], stat[:, r], side="left")
    return labels


def sample_mdep_array(model: BernoulliArrayModel, seed: int) -> np.ndarray:
    """One draw of the array: an (n, d) 0/1 matrix whose rows are the Y^(r)."""
    labels = sample_mdep_labels(model, 1, seed)[0]
    out = np.zeros((model.n, model.d), dtype=np.int64)
    hit = labels < model.d
    out[np.nonzero(hit)[0], labels[hit]] = 1
    return out


def sample_mdep_counts(model: BernoulliArrayModel, reps: int, seed: int) -> np.ndarray:
    """(reps, d) matrix of count vectors X = sum_r Y^(r)."""
    labels = sample_mdep_labels(model, reps, seed)
    out = np.zeros((reps, model.d), dtype=np.int64)
    for j in range(model.d):
        out[:, j] = (labels == j).sum(axis=1)
    return out


def q_factor(model: BernoulliArrayModel, k: int, mc_reps: int = 200_000, seed: int = 0) -> QFactorResult:
    """Q(k) = max over 1 <= |k-r| <= m and i, j of E[1{Y^(k)=e_i} 1{Y^(r)=e_j}]
    (1-based k).  Exact for the shipped families, Monte Carlo with a reported
    standard error otherwise.  Empty index set (m = 0) gives 0."""
    if not 1 <= k <= model.n:
        raise ParameterError(f"k must be in 1..{model.n}")
    k0 = k - 1
    rs = [r for r in range(model.n) if 1 <= abs(k0 - r) <= model.m]
    if not rs:
        return QFactorResult(0.0, 0.0)
    if model.family != "custom":
        best = 0.0
        for r in rs:
            for i in range(model.d):
                for j in range(model.d):
                    best = max(best, model.pair_expectation(k0, r, i, j))
        return QFactorResult(best, 0.0)
    labels = sample_mdep_labels(model, mc_reps, seed)
    best = 0.0
    for r in rs:
        for i in range(model.d):
            for j in range(model.d):
                hits = float(np.mean((labels[:, k0] == i) & (labels[:, r] == j)))
                best = max(best, hits)
    return QFactorResult(best, math.sqrt(best * (1.0 - best) / mc_reps))


def _mdep_first_term(p: np.ndarray, m: int) -> float:
    """First summand group of the m-dependent bound with the documented
    summation order: k outer, i inner, r innermost; exactly rounded sum over k."""
    n, d = p.shape
    per_k = []
    for k in range(n):
        lo, hi = max(0, k - m), min(n - 1, k + m)
        acc = 0.0
        for i in range(d):
            s_same = 0.0
            for r in range(lo, hi + 1):
                s_same += p[r, i]
            s_below = 0.0
            for j in range(i):
                for r in range(lo, hi + 1):
                    s_below += p[r, j]
            acc += (s_same + 2.0 * s_below) * p[k, i]
        per_k.append(acc)
    return float(math.fsum(per_k))


def corollary_bound(p: np.ndarray) -> float:
    """Independent-rows bound sum_k (sum_i p_{k,i})^2, evaluated through the
    m = 0 instance of the m-dependent kernel so the two agree bitwise."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 2:
        raise ParameterError("p must be an n x d matrix")
    if np.any(p < 0) or np.any(p > 1) or np.any(p.sum(axis=1) > 1.0 + 1e-12):
        raise ParameterError("p must have entries in [0,1] and row sums <= 1")
    return _mdep_first_term(p, 0)


def mdep_bound(model: BernoulliArrayModel) -> float:
    """m-dependent bound:

        sum_k sum_i [ sum_{|r-k|<=m} p_{r,i} + 2 sum_{j<i} sum_{|r-k|<=m} p_{r,j} ] p_{k,i}
        + 2 d (d+1) m sum_k Q(k).
    """
    first = _mdep_first_term(model.p, model.m)
    if model.m == 0:
        return first
    q_sum = math.fsum(q_factor(model, k).value for k in range(1, model.n + 1))
    return first + 2.0 * model.d * (model.d + 1) * model.m * q_sum
