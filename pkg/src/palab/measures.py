"""Finitely supported probability mass functions on the integer lattice N_0^d.

``LatticePmf`` is the common currency of every distance computation in this
package: a sparse map of lattice atoms plus a certified account of the mass
and first absolute moment living outside the stored support.  Truncations are
never silent; whoever drops mass must put it into ``tail_mass``/``tail_moment``
so downstream distances can report a rigorous error interval.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats

from .errors import CapacityError, ParameterError

# A pmf whose stored mass plus declared tail misses 1 by more than this is
# rejected outright rather than silently renormalized.
NORMALIZATION_DEFECT_LIMIT = 1e-9

# Default cap on the number of atoms a constructor may materialize.
DEFAULT_ATOM_BUDGET = 4_000_000

Point = tuple[int, ...]


def _as_point(x: Sequence[int], dim: int) -> Point:
    pt = tuple(int(v) for v in x)
    if len(pt) != dim:
        raise ParameterError(f"point {x!r} has length {len(pt)}, expected {dim}")
    if any(v != w for v, w in zip(pt, x)) or any(v < 0 for v in pt):
        raise ParameterError(f"point {x!r} is not in N_0^{dim}")
    return pt


@dataclass(frozen=True)
class LatticePmf:
    """Probability mass function on N_0^dim with a certified truncation account.

    Attributes
    ----------
    dim : dimension d of the lattice.
    atoms : map from lattice point (d-tuple of non-negative ints) to probability.
    tail_mass : probability mass outside the stored support.
    tail_moment : upper bound on E[|X|_1 ; X outside the stored support].
    """

    dim: int
    atoms: dict[Point, float]
    tail_mass: float = 0.0
    tail_moment: float = 0.0

    def __post_init__(self):
        if self.dim < 1:
            raise ParameterError("dim must be a positive integer")
        if self.tail_mass < 0 or self.tail_moment < 0:
            raise ParameterError("tail_mass and tail_moment must be >= 0")
        clean: dict[Point, float] = {}
        for x, p in self.atoms.items():
            pt = _as_point(x, self.dim)
            if not (p >= 0.0):
                raise ParameterError(f"atom {pt} has negative probability {p}")
            if p > 0.0:
                clean[pt] = float(p)
        if not clean and self.tail_mass == 0.0:
            raise ParameterError("pmf must have at least one atom of positive mass")
        defect = abs(sum(clean.values()) + self.tail_mass - 1.0)
        if defect > NORMALIZATION_DEFECT_LIMIT:
            raise ParameterError(f"normalization defect {defect:.3e} exceeds {NORMALIZATION_DEFECT_LIMIT:g}")
        object.__setattr__(self, "atoms", clean)

    # -- views -----------------------------------------------------------
    def support_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Stored support as an (n, dim) int array plus the matching weights,
        in lexicographic point order (deterministic)."""
        pts = sorted(self.atoms)
        xs = np.array(pts, dtype=np.int64).reshape(len(pts), self.dim)
        ps = np.array([self.atoms[p] for p in pts], dtype=float)
        return xs, ps

    def stored_mass(self) -> float:
        return float(sum(self.atoms.values()))

    def mean(self) -> np.ndarray:
        """Mean of the stored atoms (ignores tail by construction)."""
        xs, ps = self.support_arrays()
        return ps @ xs

    def prob(self, x: Sequence[int]) -> float:
        return self.atoms.get(tuple(int(v) for v in x), 0.0)

    def prefix_marginal(self, i: int) -> "LatticePmf":
        """Marginal law of the first ``i`` coordinates (tail account carried over)."""
        if not 1 <= i <= self.dim:
            raise ParameterError(f"prefix length {i} out of range 1..{self.dim}")
        acc: dict[Point, float] = {}
        for x, p in self.atoms.items():
            key = x[:i]
            acc[key] = acc.get(key, 0.0) + p
        return LatticePmf(i, acc, self.tail_mass, self.tail_moment)

    # -- serialization -----------------------------------------------------
    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "atoms": [{"x": list(x), "p": p} for x, p in sorted(self.atoms.items())],
            "tail_mass": self.tail_mass,
            "tail_moment": self.tail_moment,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @staticmethod
    def from_json_dict(obj: Mapping) -> "LatticePmf":
        atoms = {tuple(a["x"]): float(a["p"]) for a in obj["atoms"]}
        return LatticePmf(int(obj["dim"]), atoms, float(obj["tail_mass"]), float(obj["tail_moment"]))

    @staticmethod
    def from_json(text: str) -> "LatticePmf":
        return LatticePmf.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class PoissonVectorParams:
    """Mean vector of a Poisson random vector with independent components."""

    lambdas: tuple[float, ...]

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lambdas)
        if any(not np.isfinite(v) or v < 0 for v in lam):
            raise ParameterError(f"lambdas must be finite and >= 0, got {self.lambdas}")
        object.__setattr__(self, "lambdas", lam)

    @property
    def dim(self) -> int:
        return len(self.lambdas)


@dataclass(frozen=True)
class SampleBatch:
    """A seeded batch of lattice draws (rows are d-tuples of counts)."""

    dim: int
    rows: list[Point]
    seed: int
    count: int

    def __post_init__(self):
        if self.count < 1 or len(self.rows) != self.count:
            raise ParameterError("rows.length must equal count >= 1")
        object.__setattr__(self, "rows", [_as_point(r, self.dim) for r in self.rows])


def poisson_vector_pmf(
    params: PoissonVectorParams,
    eps: float,
    atom_budget: int = DEFAULT_ATOM_BUDGET,
) -> LatticePmf:
    """Product-Poisson pmf truncated to a box [0,N_1] x ... x [0,N_d].

    Per-coordinate cut points are found by inverting the exact Poisson tail sum
    so the total truncated mass is <= eps.  ``tail_moment`` uses the exact
    identity E[P 1{P > N}] = lambda * P(P >= N) plus independence across
    coordinates, so it is a rigorous upper bound.
    """
    if not (0.0 < eps < 1.0):
        raise ParameterError(f"eps must be in (0,1), got {eps}")
    lam = np.asarray(params.lambdas, dtype=float)
    d = params.dim
    eps_i = eps / d
    cuts = []
    for lv in lam:
        if lv == 0.0:
            cuts.append(0)
            continue
        n = int(stats.poisson.isf(eps_i, lv)) if eps_i < 1.0 else 0
        # isf can be off by one; walk to the smallest N with sf(N) <= eps_i
        while stats.poisson.sf(n, lv) > eps_i:
            n += 1
        while n > 0 and stats.poisson.sf(n - 1, lv) <= eps_i:
            n -= 1
        cuts.append(n)
    size = 1
    for n in cuts:
        size *= n + 1
        if size > atom_budget:
            raise CapacityError(
                f"truncation box {[c + 1 for c in cuts]} exceeds atom budget {atom_budget}"
            )
    marg = [stats.poisson.pmf(np.arange(n + 1), lv) for n, lv in zip(cuts, lam)]
    table = marg[0]
    for v in marg[1:]:
        table = np.multiply.outer(table, v)
    atoms: dict[Point, float] = {}
    it = np.ndindex(*table.shape)
    flat = table.ravel()
    for idx, p in zip(it, flat):
        if p > 0.0:
            atoms[tuple(int(v) for v in idx)] = float(p)
    stored = float(flat.sum())
    tail_mass = max(0.0, 1.0 - stored)
    # E[|X|_1 ; X outside box] <= sum_j [ E[P_j; P_j > N_j] + sum_{i != j} lam_i P(P_j > N_j) ]
    lam_total = float(lam.sum())
    tail_moment = 0.0
    for n, lv in zip(cuts, lam):
        if lv == 0.0:
            continue
        p_gt = float(stats.poisson.sf(n, lv))          # P(P_j > N_j)
        p_ge = float(stats.poisson.sf(n - 1, lv))      # P(P_j >= N_j)
        tail_moment += lv * p_ge + (lam_total - lv) * p_gt
    tail_moment = max(tail_moment, tail_mass)
    return LatticePmf(d, atoms, tail_mass, tail_moment)


def bernoulli_sum_pmf(p: np.ndarray, atom_budget: int = DEFAULT_ATOM_BUDGET) -> LatticePmf:
    """Exact pmf of a sum of independent Bernoulli vectors.

    Row r of ``p`` gives P(Y^(r) = e_j) = p[r, j]; with probability
    1 - sum_j p[r, j] the summand is the zero vector.  The sum's pmf is built
    by sequential convolution over the (d+1)-outcome rows; tail_mass = 0.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 2:
        raise ParameterError("p must be an n x d matrix")
    n, d = p.shape
    if np.any(p < 0) or np.any(p > 1):
        raise ParameterError("entries of p must lie in [0,1]")
    row_sums = p.sum(axis=1)
    if np.any(row_sums > 1.0 + 1e-12):
        bad = int(np.argmax(row_sums))
        raise ParameterError(f"row {bad} of p sums to {row_sums[bad]} > 1")
    shape = (n + 1,) * d
    size = (n + 1) ** d
    if size > atom_budget:
        raise CapacityError(f"dense DP table of size {(n + 1)}^{d} exceeds atom budget {atom_budget}")
    table = np.zeros(shape)
    table[(0,) * d] = 1.0
    for r in range(n):
        nxt = table * (1.0 - row_sums[r])
        for j in range(d):
            if p[r, j] == 0.0:
                continue
            src = [slice(None)] * d
            dst = [slice(None)] * d
            src[j] = slice(0, n)
            dst[j] = slice(1, n + 1)
            nxt[tuple(dst)] += p[r, j] * table[tuple(src)]
        table = nxt
    atoms = {
        tuple(int(v) for v in idx): float(table[tuple(idx)])
        for idx in np.argwhere(table > 0.0)
    }
    return LatticePmf(d, atoms, 0.0, 0.0)


def empirical_pmf(batch: SampleBatch) -> LatticePmf:
    """Relative frequencies of a sample batch; deterministic given the rows."""
    acc: dict[Point, int] = {}
    for row in batch.rows:
        acc[row] = acc.get(row, 0) + 1
    inv = 1.0 / batch.count
    return LatticePmf(batch.dim, {x: c * inv for x, c in acc.items()}, 0.0, 0.0)


def batch_from_rows(rows: Iterable[Sequence[int]], dim: int, seed: int) -> SampleBatch:
    rows = [tuple(int(v) for v in r) for r in rows]
    return SampleBatch(dim=dim, rows=rows, seed=seed, count=len(rows))


def truncate_small_atoms(pmf: LatticePmf, drop_mass: float) -> LatticePmf:
    """Move the smallest atoms, up to total mass ``drop_mass``, into the tail
    account.  Dropped mass is added to tail_mass and its exact first absolute
    moment to tail_moment, so downstream error intervals stay rigorous."""
    if drop_mass <= 0.0:
        return pmf
    order = sorted(pmf.atoms.items(), key=lambda kv: (kv[1], kv[0]))
    dropped_mass = 0.0
    dropped_moment = 0.0
    kept = dict(pmf.atoms)
    for x, p in order:
        if dropped_mass + p > drop_mass or len(kept) == 1:
            break
        dropped_mass += p
        dropped_moment += p * sum(x)
        del kept[x]
    return LatticePmf(
        pmf.dim,
        kept,
        pmf.tail_mass + dropped_mass,
        pmf.tail_moment + dropped_moment,
    )
