"""Point patterns, windows, intensity measures and the Poisson sampler.

Configuration spaces are either boxes in R^w (reference measure: Lebesgue) or
finite label sets (reference measure: counting).  Partitions are collections
of pairwise-disjoint boxes or label subsets; disjointness is verified at
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .. import streams
from ..errors import ParameterError
from ..quadrature import integrate_box

Label = Union[str, int]


@dataclass(frozen=True)
class Box:
    """Axis-aligned box window in R^w."""

    lows: tuple[float, ...]
    highs: tuple[float, ...]

    def __post_init__(self):
        lows = tuple(float(v) for v in self.lows)
        highs = tuple(float(v) for v in self.highs)
        if len(lows) != len(highs) or not lows:
            raise ParameterError("box needs matching lows/highs")
        if any(h <= l for l, h in zip(lows, highs)):
            raise ParameterError(f"degenerate box {lows}..{highs}")
        object.__setattr__(self, "lows", lows)
        object.__setattr__(self, "highs", highs)

    @property
    def dim(self) -> int:
        return len(self.lows)

    def volume(self) -> float:
        out = 1.0
        for l, h in zip(self.lows, self.highs):
            out *= h - l
        return out

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        ok = np.ones(len(pts), dtype=bool)
        for k, (l, h) in enumerate(zip(self.lows, self.highs)):
            ok &= (pts[:, k] >= l) & (pts[:, k] <= h)
        return ok

    def overlaps(self, other: "Box") -> bool:
        """True when the interiors intersect."""
        for (l1, h1), (l2, h2) in zip(
            zip(self.lows, self.highs), zip(other.lows, other.highs)
        ):
            if min(h1, h2) <= max(l1, l2):
                return False
        return True


@dataclass(frozen=True)
class LabelSpace:
    labels: tuple[Label, ...]

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels) or not self.labels:
            raise ParameterError("label space needs distinct, nonempty labels")


@dataclass(frozen=True)
class LabelSet:
    members: frozenset

    def __init__(self, members):
        object.__setattr__(self, "members", frozenset(members))


Window = Union[Box, LabelSpace]
SetSpec = Union[Box, LabelSet]


@dataclass(frozen=True)
class PointPattern:
    """Finite counting measure: a list of locations, multiplicities allowed."""

    points: tuple

    def __init__(self, points: Sequence):
        pts = tuple(
            tuple(float(c) for c in p) if isinstance(p, (tuple, list, np.ndarray)) else p
            for p in points
        )
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        if not self.points:
            return np.zeros((0, 0))
        return np.asarray(self.points, dtype=float)

    def count_in(self, region: SetSpec) -> int:
        if isinstance(region, LabelSet):
            return sum(1 for p in self.points if p in region.members)
        if not self.points:
            return 0
        return int(region.contains(self.as_array()).sum())

    def drop_index(self, idx: int) -> "PointPattern":
        return PointPattern(self.points[:idx] + self.points[idx + 1 :])

    def add(self, extra: Sequence) -> "PointPattern":
        return PointPattern(tuple(self.points) + tuple(PointPattern(extra).points))


@dataclass(frozen=True)
class PartitionSpec:
    """d pairwise-disjoint measurable subsets of the window."""

    sets: tuple[SetSpec, ...]

    def __init__(self, sets: Sequence[SetSpec]):
        sets = tuple(sets)
        if not sets:
            raise ParameterError("partition needs at least one set")
        for a in range(len(sets)):
            for b in range(a + 1, len(sets)):
                s, t = sets[a], sets[b]
                if isinstance(s, Box) and isinstance(t, Box):
                    if s.overlaps(t):
                        raise ParameterError(f"partition sets {a} and {b} overlap")
                elif isinstance(s, LabelSet) and isinstance(t, LabelSet):
                    if s.members & t.members:
                        raise ParameterError(f"partition sets {a} and {b} share labels")
                else:
                    raise ParameterError("partition mixes box and label sets")
        object.__setattr__(self, "sets", sets)

    @property
    def dim(self) -> int:
        return len(self.sets)


def count_vector(pattern: PointPattern, partition: PartitionSpec) -> tuple[int, ...]:
    return tuple(pattern.count_in(s) for s in partition.sets)


@dataclass(frozen=True)
class IntensityMeasure:
    """Finite intensity measure with density w.r.t. Lebesgue (boxes) or
    counting measure (labels).

    ``density`` is a constant, a label->weight mapping, or a callable on
    (n, w) arrays; callables must come with a finite upper bound
    ``density_max`` (rejection sampling needs it).  ``total`` is checked
    against quadrature to 1e-8 at construction.
    """

    window: Window
    density: Union[float, dict, Callable[[np.ndarray], np.ndarray]]
    density_max: float = 0.0
    total: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if isinstance(self.window, LabelSpace):
            if not isinstance(self.density, dict):
                raise ParameterError("label-space intensity needs a label->weight dict")
            weights = {k: float(v) for k, v in self.density.items()}
            if any(v < 0 for v in weights.values()):
                raise ParameterError("density must be nonnegative")
            if set(weights) - set(self.window.labels):
                raise ParameterError("density assigns weight outside the label space")
            tot = sum(weights.get(l, 0.0) for l in self.window.labels)
            object.__setattr__(self, "density", weights)
            object.__setattr__(self, "density_max", max(weights.values(), default=0.0))
        elif isinstance(self.density, (int, float)):
            rate = float(self.density)
            if rate < 0:
                raise ParameterError("density must be nonnegative")
            object.__setattr__(self, "density", rate)
            object.__setattr__(self, "density_max", rate)
            tot = rate * self.window.volume()
        else:
            if self.density_max <= 0:
                raise ParameterError("callable density needs a positive density_max bound")
            quad = integrate_box(self.density, self.window.lows, self.window.highs)
            tot = quad.value
            if tot < -1e-12:
                raise ParameterError("density integrates to a negative value")
        if self.total is None:
            object.__setattr__(self, "total", float(tot))
        elif abs(self.total - tot) > 1e-8 * (1.0 + abs(tot)):
            raise ParameterError(
                f"declared total {self.total} differs from integral {tot} beyond 1e-8"
            )

    def measure_of(self, region: SetSpec) -> float:
        """Mass of a sub-box or label subset."""
        if isinstance(self.window, LabelSpace):
            if not isinstance(region, LabelSet):
                raise ParameterError("label-space measure needs a LabelSet")
            return sum(self.density.get(l, 0.0) for l in region.members)
        if not isinstance(region, Box):
            raise ParameterError("box-window measure needs a Box region")
        lows = tuple(max(l, w) for l, w in zip(region.lows, self.window.lows))
        highs = tuple(min(h, w) for h, w in zip(region.highs, self.window.highs))
        if any(h <= l for l, h in zip(lows, highs)):
            return 0.0
        if isinstance(self.density, float):
            clipped = Box(lows, highs)
            return self.density * clipped.volume()
        return integrate_box(self.density, lows, highs).value


def sample_poisson_process(intensity: IntensityMeasure, seed_or_rng) -> PointPattern:
    """Exact draw: N ~ Poisson(total), then N i.i.d. points from density/total
    by rejection against density_max (boxes) or by categorical draw (labels)."""
    rng = seed_or_rng if isinstance(seed_or_rng, np.random.Generator) else streams.derive(int(seed_or_rng))
    total = intensity.total
    if total == 0.0:
        return PointPattern(())
    n = int(rng.poisson(total))
    if n == 0:
        return PointPattern(())
    if isinstance(intensity.window, LabelSpace):
        labels = intensity.window.labels
        probs = np.array([intensity.density.get(l, 0.0) for l in labels]) / total
        draws = rng.choice(len(labels), size=n, p=probs)
        return PointPattern([labels[i] for i in draws])
    lows = np.array(intensity.window.lows)
    highs = np.array(intensity.window.highs)
    if isinstance(intensity.density, float):
        pts = rng.uniform(lows, highs, size=(n, len(lows)))
        return PointPattern(pts)
    out = []
    guard = 0
    while len(out) < n:
        m = max(16, 2 * (n - len(out)))
        cand = rng.uniform(lows, highs, size=(m, len(lows)))
        acc = rng.random(m) * intensity.density_max < np.asarray(intensity.density(cand))
        out.extend(map(tuple, cand[acc]))
        guard += 1
        if guard > 10_000:
            raise ParameterError("rejection sampler stalled; is density_max a valid bound?")
    return PointPattern(out[:n])
