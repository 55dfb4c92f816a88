"""Partition-based lower bounds for the point-process distance.

The distance itself is a supremum over all finite tuples of disjoint sets; no
search procedure exists, so everything here evaluates a *supplied* family of
partitions and is documented as a lower bound only.  Count laws enter either
exactly (product Poisson, deterministic patterns) or empirically from seeded
samplers, with a bootstrap confidence interval in the empirical case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .. import streams
from ..errors import ParameterError
from ..measures import LatticePmf, PoissonVectorParams, empirical_pmf, batch_from_rows, poisson_vector_pmf, truncate_small_atoms
from ..transport import wasserstein_l1
from .patterns import IntensityMeasure, PartitionSpec, PointPattern, count_vector


class CountLawFromMeasure:
    """Exact product-Poisson count law for a Poisson process whose intensity
    of a region is given by ``measure_fn`` (closed form or quadrature)."""

    def __init__(self, measure_fn: Callable, eps: float = 1e-10, prune_mass: float = 0.0):
        self.measure_fn = measure_fn
        self.eps = eps
        self.prune_mass = prune_mass

    def count_pmf(self, partition: PartitionSpec) -> LatticePmf:
        lams = tuple(self.measure_fn(s) for s in partition.sets)
        pmf = poisson_vector_pmf(PoissonVectorParams(lams), self.eps)
        if self.prune_mass > 0.0:
            pmf = truncate_small_atoms(pmf, self.prune_mass)
        return pmf


class PoissonCountLaw(CountLawFromMeasure):
    """Exact product-Poisson count law of a Poisson process on any partition."""

    def __init__(self, intensity: IntensityMeasure, eps: float = 1e-10, prune_mass: float = 0.0):
        super().__init__(intensity.measure_of, eps=eps, prune_mass=prune_mass)
        self.intensity = intensity


class DiracCountLaw:
    """Count law of a deterministic point pattern."""

    def __init__(self, pattern: PointPattern):
        self.pattern = pattern

    def count_pmf(self, partition: PartitionSpec) -> LatticePmf:
        return LatticePmf(partition.dim, {count_vector(self.pattern, partition): 1.0})


Sampler = Callable[[np.random.Generator], PointPattern]
CountSource = Union[PoissonCountLaw, DiracCountLaw, Sampler]


@dataclass(frozen=True)
class DpiEstimate:
    """Max over the supplied partitions of the count-vector Wasserstein
    distance: a lower bound on the process distance, never an upper one."""

    value: float
    std_error: float
    ci_low: float
    ci_high: float
    per_partition: tuple[float, ...]
    truncation_error: float


def _collect_rows(source: Sampler, partitions: Sequence[PartitionSpec], reps: int,
                  rng: np.random.Generator) -> list[np.ndarray]:
    rows = [np.zeros((reps, p.dim), dtype=np.int64) for p in partitions]
    for s in range(reps):
        pattern = source(rng)
        for t, part in enumerate(partitions):
            rows[t][s] = count_vector(pattern, part)
    return rows


def _pmf_from_rows(rows: np.ndarray) -> LatticePmf:
    return empirical_pmf(batch_from_rows(rows, dim=rows.shape[1], seed=0))


def dpi_lower_bound(
    xi: CountSource,
    eta: CountSource,
    partitions: Sequence[PartitionSpec],
    reps: int = 10_000,
    seed: int = 0,
    n_boot: int = 32,
) -> DpiEstimate:
    """Maximum over partitions of W1 between the two count laws.

    Exact sources (objects with ``count_pmf``) contribute no sampling error;
    for sampled sources the bootstrap resamples the empirical count rows and
    the confidence interval is the 2.5%..97.5% range over replicates.
    """
    partitions = list(partitions)
    if not partitions:
        raise ParameterError("need at least one partition")
    xi_exact = hasattr(xi, "count_pmf")
    eta_exact = hasattr(eta, "count_pmf")
    xi_rows = None if xi_exact else _collect_rows(xi, partitions, reps, streams.derive(seed, 10))
    eta_rows = None if eta_exact else _collect_rows(eta, partitions, reps, streams.derive(seed, 11))

    def eval_max(xi_rows_b, eta_rows_b) -> tuple[float, list[float], float]:
        vals, trunc = [], 0.0
        for t, part in enumerate(partitions):
            pmf_xi = xi.count_pmf(part) if xi_exact else _pmf_from_rows(xi_rows_b[t])
            pmf_eta = eta.count_pmf(part) if eta_exact else _pmf_from_rows(eta_rows_b[t])
            res = wasserstein_l1(pmf_xi, pmf_eta)
            vals.append(res.value)
            trunc = max(trunc, res.truncation_error)
        return max(vals), vals, trunc

    value, per_partition, trunc = eval_max(xi_rows, eta_rows)
    if xi_exact and eta_exact:
        return DpiEstimate(value, 0.0, value, value, tuple(per_partition), trunc)

    boots = []
    for b in range(n_boot):
        rng_b = streams.derive(seed, 20, b)
        xi_b = None
        eta_b = None
        if not xi_exact:
            xi_b = [rows[rng_b.integers(0, reps, size=reps)] for rows in xi_rows]
        if not eta_exact:
            eta_b = [rows[rng_b.integers(0, reps, size=reps)] for rows in eta_rows]
        boots.append(eval_max(xi_b, eta_b)[0])
    boots = np.array(boots)
    se = float(boots.std(ddof=1)) if n_boot > 1 else float("inf")
    lo, hi = np.percentile(boots, [2.5, 97.5])
    return DpiEstimate(value, se, float(lo), float(hi), tuple(per_partition), trunc)


@dataclass(frozen=True)
class PrefixTerm:
    """Data of one prefix (A_1, ..., A_i) of a partition tuple: lambda(A_i),
    the absolute q-term sum, and E|Z_j| for j = 1..i."""

    lam: float
    q_abs_sum: float
    z_abs_means: tuple[float, ...]

    def __post_init__(self):
        if self.lam < 0 or self.q_abs_sum < 0 or any(v < 0 for v in self.z_abs_means):
            raise ParameterError("prefix data must be nonnegative")


def tuple_process_bound(terms: Sequence[PrefixTerm]) -> float:
    """Per-tuple process bound sum_i [ sum_m |q^{A_{1:i}}_m| + 2 lambda(A_i) sum_{j<=i} E|Z_j| ].

    The supremum over all tuples of disjoint sets is not computable; this
    evaluates one supplied tuple (callers report the max over a family).
    """
    terms = list(terms)
    for i, term in enumerate(terms, start=1):
        if len(term.z_abs_means) != i:
            raise ParameterError(f"prefix {i} needs {i} E|Z_j| values, got {len(term.z_abs_means)}")
    return float(
        math.fsum(t.q_abs_sum + 2.0 * t.lam * math.fsum(t.z_abs_means) for t in terms)
    )
