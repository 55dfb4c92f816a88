"""Exact 1-norm Wasserstein and total-variation distances between lattice pmfs.

The Wasserstein solver is a transportation network simplex on the complete
bipartite graph of the two stored supports, with cost |x - y|_1.  Costs are
integers, so the simplex multipliers (duals) are exact integers as well: the
optimality test involves no rounding, and every solve ends with a
complementary-slackness verification pass.

Truncated inputs are renormalized to unit mass before solving; the
``truncation_error`` field accounts for both the missing tail moment and the
renormalization displacement, so

    |value - d_W(untruncated laws)| <= truncation_error.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParameterError
from .measures import LatticePmf, Point

# Reduced costs are exact integers; anything below this is a real violation.
_OPT_TOL = 1e-7
_VERIFY_TOL = 1e-9


@dataclass(frozen=True)
class DistanceResult:
    """A computed distance plus a rigorous truncation error interval."""

    value: float
    truncation_error: float
    flow: Optional[list[tuple[Point, Point, float]]] = None


class _SimplexFailure(RuntimeError):
    pass


def _l1_cost_matrix(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    m, d = xs.shape
    n = ys.shape[0]
    cost = np.zeros((m, n))
    for k in range(d):
        cost += np.abs(xs[:, k : k + 1] - ys[None, :, k])
    return cost


def _initial_basis(a: np.ndarray, b: np.ndarray, cost: np.ndarray):
    """Row-greedy start: each source fills its cheapest remaining sinks.

    With perturbed (tie-free) supplies every allocation exhausts exactly one
    node, which yields m + n - 1 arcs forming a spanning tree.
    """
    m, n = cost.shape
    rem_a = a.copy()
    rem_b = b.copy()
    order = np.argsort(cost, axis=1, kind="stable")
    flows: dict[tuple[int, int], float] = {}
    for i in range(m):
        for j in order[i]:
            if rem_b[j] <= 0.0:
                continue
            take = min(rem_a[i], rem_b[j])
            flows[(i, j)] = take
            rem_a[i] -= take
            rem_b[j] -= take
            if rem_a[i] <= 0.0:
                break
    # Perturbation should leave exactly m + n - 1 arcs; mop up degenerate
    # shortfall by adding zero-flow arcs that keep the graph acyclic.
    if len(flows) != m + n - 1:
        _repair_tree(flows, m, n, cost)
    return flows


def _repair_tree(flows, m: int, n: int, cost: np.ndarray) -> None:
    """Grow the arc set into a spanning tree using zero-flow arcs (cheapest
    first among arcs joining distinct components)."""
    parent_dsu = list(range(m + n))

    def find(x):
        while parent_dsu[x] != x:
            parent_dsu[x] = parent_dsu[parent_dsu[x]]
            x = parent_dsu[x]
        return x

    for (i, j) in flows:
        ri, rj = find(i), find(m + j)
        if ri != rj:
            parent_dsu[ri] = rj
    pairs = sorted(((cost[i, j], i, j) for i in range(m) for j in range(n)))
    for _, i, j in pairs:
        if len(flows) == m + n - 1:
            break
        ri, rj = find(i), find(m + j)
        if ri != rj:
            parent_dsu[ri] = rj
            flows.setdefault((i, j), 0.0)


def _tree_structure(flows, m: int, n: int, cost: np.ndarray):
    """BFS over the basis tree from node 0: parents, depths and exact duals."""
    adj: list[list[int]] = [[] for _ in range(m + n)]
    for (i, j) in flows:
        adj[i].append(m + j)
        adj[m + j].append(i)
    parent = np.full(m + n, -1, dtype=np.int64)
    depth = np.zeros(m + n, dtype=np.int64)
    u = np.zeros(m)
    v = np.zeros(n)
    seen = np.zeros(m + n, dtype=bool)
    seen[0] = True
    order = [0]
    queue = deque([0])
    while queue:
        node = queue.popleft()
        for nb in adj[node]:
            if seen[nb]:
                continue
            seen[nb] = True
            parent[nb] = node
            depth[nb] = depth[node] + 1
            if nb >= m:
                v[nb - m] = cost[node, nb - m] - u[node]
            else:
                u[nb] = cost[nb, parent[nb] - m] - v[parent[nb] - m]
            order.append(nb)
            queue.append(nb)
    if not seen.all():
        raise _SimplexFailure("basis graph is not a spanning tree")
    return parent, depth, u, v, order


def _cycle_path(parent, depth, i_node: int, j_node: int):
    """Node path j_node -> ... -> i_node through the tree."""
    pa, pb = i_node, j_node
    path_a = [pa]
    path_b = [pb]
    while depth[pa] > depth[pb]:
        pa = parent[pa]
        path_a.append(pa)
    while depth[pb] > depth[pa]:
        pb = parent[pb]
        path_b.append(pb)
    while pa != pb:
        pa = parent[pa]
        path_a.append(pa)
        pb = parent[pb]
        path_b.append(pb)
    return path_b + path_a[-2::-1]  # j* .. LCA .. i*


def _transportation_simplex(a: np.ndarray, b: np.ndarray, cost: np.ndarray):
    """Solve min <cost, f> over f >= 0 with row sums a and column sums b.

    Returns (flows on the optimal basis tree recomputed for the *unperturbed*
    supplies, duals u, v).  Supplies are perturbed internally to keep pivots
    nondegenerate; the optimal basis and duals are unaffected by supplies.

    Tree maintenance is incremental: a pivot shifts the duals of the subtree
    cut off by the leaving arc by the entering arc's reduced cost and re-roots
    that subtree, so per-pivot work is O(cycle + subtree).  Costs are integers,
    hence the duals stay exact integers throughout and the optimality test is
    free of rounding.
    """
    m, n = cost.shape
    # tie-breaking perturbation, removed again before the final flow solve
    eps0 = 1e-13 / (m + 1)
    a_p = a + eps0 * np.arange(1, m + 1)
    b_p = b * (a_p.sum() / b.sum())
    flows = _initial_basis(a_p, b_p, cost)
    parent, depth, u, v, order = _tree_structure(flows, m, n, cost)
    adj: list[set[int]] = [set() for _ in range(m + n)]
    for (i, j) in flows:
        adj[i].add(m + j)
        adj[m + j].add(i)
    n_arcs = m * n
    flat_cost = cost.ravel()
    block = max(64, min(n_arcs, int(np.sqrt(n_arcs)) + 1))
    pos = 0
    max_iters = 200 * (m + n) + 10_000
    degenerate_streak = 0
    bland = False
    for _ in range(max_iters):
        # --- cyclic block pricing (Dantzig within each block) --------------
        entering = None
        scanned = 0
        while scanned < n_arcs:
            hi = min(pos + block, n_arcs)
            idx = np.arange(pos, hi)
            red = flat_cost[idx] - u[idx // n] - v[idx % n]
            scanned += hi - pos
            pos = hi % n_arcs
            kmin = int(np.argmin(red))
            if red[kmin] < -_OPT_TOL:
                if bland:
                    kmin = int(np.argmax(red < -_OPT_TOL))  # first violating arc
                t = int(idx[kmin])
                entering = (t // n, t % n)
                break
        if entering is None:
            break  # a full wrap found no violating arc: optimal
        ei, ej = entering
        delta = cost[ei, ej] - u[ei] - v[ej]
        path = _cycle_path(parent, depth, ei, m + ej)
        # walk arcs from j* toward i*; signs alternate -, +, -, ...
        theta = np.inf
        leave = None
        sign = -1
        arcs = []
        for x, y in zip(path, path[1:]):
            arc = (x, y - m) if x < m else (y, x - m)
            arcs.append((arc, sign))
            if sign < 0 and flows[arc] < theta:
                theta = flows[arc]
                leave = arc
            sign = -sign
        if leave is None:
            raise _SimplexFailure("no leaving arc found on pivot cycle")
        for arc, sgn in arcs:
            flows[arc] += sgn * theta
        del flows[leave]
        flows[(ei, ej)] = theta
        # --- incremental tree update -------------------------------------
        # After dropping the leaving arc, the entering arc q--p is the only
        # connection between the cut-off component (around q) and the rest,
        # so one BFS from q re-roots the component and collects its nodes.
        li, lj = leave
        la, lb = li, m + lj
        adj[la].discard(lb)
        adj[lb].discard(la)
        child = la if parent[la] == lb else lb
        en_a, en_b = ei, m + ej
        adj[en_a].add(en_b)
        adj[en_b].add(en_a)
        # the endpoint inside the old subtree of `child` becomes the new local
        # root q; test by lifting en_a to child's depth (pointers still old)
        node = en_a
        while depth[node] > depth[child]:
            node = parent[node]
        q = en_a if node == child else en_b
        p = en_b if q == en_a else en_a
        parent[q] = p
        depth[q] = depth[p] + 1
        sub = [q]
        k = 0
        while k < len(sub):
            node = sub[k]
            par = parent[node]
            dn = depth[node] + 1
            for nb in adj[node]:
                if nb != par and nb != p:
                    parent[nb] = node
                    depth[nb] = dn
                    sub.append(nb)
            k += 1
        # duals: subtree nodes of q's type shift by +delta, the others by -delta
        sub_arr = np.fromiter(sub, dtype=np.int64, count=len(sub))
        src_nodes = sub_arr[sub_arr < m]
        snk_nodes = sub_arr[sub_arr >= m] - m
        if q < m:
            u[src_nodes] += delta
            v[snk_nodes] -= delta
        else:
            u[src_nodes] -= delta
            v[snk_nodes] += delta
        if theta <= 0.0:
            degenerate_streak += 1
            if degenerate_streak > m + n:
                bland = True  # anti-cycling fallback: first violating arc
        else:
            degenerate_streak = 0
        if bland:
            pos = 0  # Bland's rule needs the scan to restart from arc 0
    else:
        raise _SimplexFailure(f"no convergence within {max_iters} pivots")
    parent, depth, u, v, order = _tree_structure(flows, m, n, cost)
    # final flows from the *original* supplies: subtree sums along reverse BFS
    net = np.concatenate([a, -b])
    out_flows: dict[tuple[int, int], float] = {}
    for node in reversed(order):
        par = parent[node]
        if par < 0:
            continue
        arc = (node, par - m) if node < m else (par, node - m)
        out_flows[arc] = net[node] if node < m else -net[node]
        net[par] += net[node]
    return out_flows, u, v


def _verify_optimal(a, b, cost, flows, u, v) -> float:
    """Complementary-slackness pass; returns the certified optimal value."""
    scale = 1.0 + float(np.abs(cost).max(initial=0.0))
    reduced = cost - u[:, None] - v[None, :]
    if float(reduced.min(initial=0.0)) < -_OPT_TOL:
        raise _SimplexFailure("dual infeasible after termination")
    row = np.zeros(len(a))
    col = np.zeros(len(b))
    primal = 0.0
    for (i, j), f in flows.items():
        if f < -1e-9:
            raise _SimplexFailure(f"negative basic flow {f} on arc {(i, j)}")
        if abs(reduced[i, j]) > _VERIFY_TOL * scale:
            raise _SimplexFailure("basic arc with nonzero reduced cost")
        row[i] += f
        col[j] += f
        primal += cost[i, j] * f
    if np.abs(row - a).max() > 1e-8 or np.abs(col - b).max() > 1e-8:
        raise _SimplexFailure("flow marginals do not match the inputs")
    dual = float(a @ u + b @ v)
    if abs(primal - dual) > _VERIFY_TOL * (1.0 + abs(dual)) + 1e-12 * scale:
        raise _SimplexFailure(f"duality gap {primal - dual:.3e}")
    return max(dual, 0.0)


def _check_pair(P: LatticePmf, Q: LatticePmf) -> None:
    if P.dim != Q.dim:
        raise ParameterError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    if not P.atoms or not Q.atoms:
        raise ParameterError("empty support")


def wasserstein_l1(P: LatticePmf, Q: LatticePmf, want_flow: bool = False) -> DistanceResult:
    """Exact W_1 distance (1-norm ground metric) between the stored supports.

    Stored atoms are renormalized to unit mass; the reported
    ``truncation_error`` covers both tails and the renormalization:
    tail_moment(P) + tail_moment(Q) + (tail_mass(P) + tail_mass(Q)) * diam,
    with diam the largest |x|_1 over both stored supports.
    """
    _check_pair(P, Q)
    xs, pa = P.support_arrays()
    ys, qb = Q.support_arrays()
    a = pa / pa.sum()
    b = qb / qb.sum()
    cost = _l1_cost_matrix(xs, ys)
    flows, u, v = _transportation_simplex(a, b, cost)
    value = _verify_optimal(a, b, cost, flows, u, v)
    diam = float(max(xs.sum(axis=1).max(), ys.sum(axis=1).max()))
    trunc = P.tail_moment + Q.tail_moment + (P.tail_mass + Q.tail_mass) * diam
    flow_list = None
    if want_flow:
        flow_list = [
            (tuple(int(t) for t in xs[i]), tuple(int(t) for t in ys[j]), f)
            for (i, j), f in sorted(flows.items())
            if f > 0.0
        ]
    return DistanceResult(value=value, truncation_error=trunc, flow=flow_list)


def total_variation(P: LatticePmf, Q: LatticePmf) -> DistanceResult:
    """d_TV = (1/2) sum |P(x) - Q(x)| over the union of stored supports.

    Mass outside the supports is counted as full discrepancy:
    truncation_error = tail_mass(P) + tail_mass(Q).
    """
    if P.dim != Q.dim:
        raise ParameterError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    keys = set(P.atoms) | set(Q.atoms)
    value = 0.5 * sum(abs(P.atoms.get(x, 0.0) - Q.atoms.get(x, 0.0)) for x in keys)
    return DistanceResult(value=value, truncation_error=P.tail_mass + Q.tail_mass, flow=None)
