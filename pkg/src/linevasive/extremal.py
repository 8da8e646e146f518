"""Bipartite graphs from linear representations, C4 / theta(3,t) checks,
Turán-number formulas, the Atkinson-Watterson-Moran inequality, and
arithmetic-progression checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
import networkx as nx
import numpy as np

from .certificates import Verdict
from .errors import ParameterError, SizeCapError
from .geometry import affine_space, is_t_line_evasive, projective_space
from .gf import FieldSpec, as_field

DEFAULT_GRAPH_CAP = 1 << 26  # entries of the dense biadjacency matrix


@dataclass(frozen=True)
class BipartiteGraph:
    """Left vertices 0..left-1, right vertices 0..right-1; adjacency as sorted neighbor tuples."""

    left: int
    right: int
    adjacency: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, left: int, right: int, edges) -> BipartiteGraph:
        nbrs: list[set[int]] = [set() for _ in range(left)]
        for a, b in edges:
            if not (0 <= a < left and 0 <= b < right):
                raise ParameterError(f"edge ({a}, {b}) out of range")
            nbrs[a].add(int(b))
        return cls(left, right, tuple(tuple(sorted(s)) for s in nbrs))

    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a, nb in enumerate(self.adjacency) for b in nb]

    @property
    def num_edges(self) -> int:
        return sum(len(nb) for nb in self.adjacency)

    def left_degrees(self) -> np.ndarray:
        return np.array([len(nb) for nb in self.adjacency], dtype=np.int64)

    def right_degrees(self) -> np.ndarray:
        deg = np.zeros(self.right, dtype=np.int64)
        for nb in self.adjacency:
            deg[list(nb)] += 1
        return deg

    def biadjacency(self, cap: int = DEFAULT_GRAPH_CAP) -> np.ndarray:
        if self.left * self.right > cap:
            raise SizeCapError(f"{self.left} x {self.right} biadjacency exceeds cap {cap}")
        B = np.zeros((self.left, self.right), dtype=np.int64)
        for a, nb in enumerate(self.adjacency):
            B[a, list(nb)] = 1
        return B


@dataclass(frozen=True)
class LinearRepGraph:
    """Incidence graph of the linear representation of S ⊂ PG(n, q).

    Left vertices are the affine points (1, v), v in AG(n+1, q), in rank order.
    Right vertices are the lines through a point (0, s) of S, ordered by s and
    then by the lexicographically least affine point on the line.
    """

    n: int
    field: FieldSpec
    set_points: np.ndarray
    graph: BipartiteGraph
    line_directions: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return self.field.order

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "set_size": len(self.set_points),
            "point_vertices": self.graph.left,
            "line_vertices": self.graph.right,
            "edges": self.graph.num_edges,
            "construction": "linear-representation",
        }


def projectivize(points, field: FieldSpec) -> np.ndarray:
    """Affine points v of AG(n, q) as projective points (1, v) of PG(n, q)."""
    points = np.asarray(points, dtype=np.int64)
    if points.ndim != 2:
        raise ParameterError("expected a 2-d array of points")
    ones = np.full((len(points), 1), field.one, dtype=np.int64)
    return np.concatenate([ones, points], axis=1)


def linear_representation(points, n: int, q, cap: int = 1 << 24) -> LinearRepGraph:
    F = as_field(q)
    if F.order ** (n + 2) > cap:
        raise SizeCapError(f"PG({n + 1},{F.order}) exceeds cap {cap}")
    pg = projective_space(n, F)
    pts = np.asarray(points, dtype=np.int64)
    if pts.ndim != 2 or len(pts) == 0 or pts.shape[1] != n + 1:
        raise ParameterError(f"need a nonempty set of points of PG({n},{F.order})")
    idx = np.unique(pg.index(pts))
    if np.any(idx < 0):
        raise ParameterError("zero vector is not a projective point")
    dirs = pg.points[idx]  # normalized, in canonical order
    space = affine_space(n + 1, F)
    dir_pos, members = space.line_block(dirs)
    # line_block is direction-major then by base rank
    edges = [(int(r), line) for line, row in enumerate(members) for r in row]
    graph = BipartiteGraph.from_edges(space.size, len(members), edges)
    return LinearRepGraph(n, F, dirs, graph, dirs[dir_pos])


# ---------------------------------------------------------------------------


def is_C4_free(G: BipartiteGraph) -> Verdict:
    """No two left vertices share two neighbors."""
    B = G.biadjacency()
    common = B @ B.T
    np.fill_diagonal(common, 0)
    worst = int(common.max()) if common.size else 0
    witness = None
    if worst >= 2:
        a, b = (int(v) for v in np.argwhere(common >= 2)[0])
        shared = sorted(set(G.adjacency[a]) & set(G.adjacency[b]))[:2]
        witness = {"left": [a, b], "right": shared}
    return Verdict("C4-free", witness is None, witness, {"max_common_neighbors": worst})


def three_path_counts(G: BipartiteGraph) -> np.ndarray:
    """Number of paths of length 3 from each left vertex to each right vertex.

    Walks x-y'-x'-y come from B B^T B; the ones repeating a vertex need x ~ y
    and number deg(x) + deg(y) - 1.
    """
    B = G.biadjacency()
    W = B @ B.T @ B
    degL = B.sum(axis=1)
    degR = B.sum(axis=0)
    return W - B * (degL[:, None] + degR[None, :] - 1)


def _disjoint_paths(G: BipartiteGraph, x: int, y: int) -> list[tuple[int, int]]:
    """Maximum family of internally disjoint paths x - y_i - x_i - y.

    Such a family is a matching between N(x) - {y} and N(y) - {x}.
    """
    right_nbrs = set(G.adjacency[x]) - {y}
    left_nbrs = {a for a, nb in enumerate(G.adjacency) if y in nb and a != x}
    H = nx.Graph()
    top = [("r", b) for b in sorted(right_nbrs)]
    H.add_nodes_from(top)
    H.add_nodes_from(("l", a) for a in sorted(left_nbrs))
    for a in left_nbrs:
        for b in G.adjacency[a]:
            if b in right_nbrs:
                H.add_edge(("r", b), ("l", a))
    matching = nx.bipartite.hopcroft_karp_matching(H, top_nodes=top)
    return sorted((node[1], matching[node][1]) for node in top if node in matching)


def is_theta3t_free(G: BipartiteGraph, t: int, exact: bool = False) -> Verdict:
    """No two vertices joined by t internally disjoint paths of length 3.

    First a counting screen (at most t-1 three-paths between any pair), then,
    for pairs failing the screen, an exact matching decision.  With
    ``exact=True`` the matching is computed for every pair joined by a 3-path.
    """
    if t < 2:
        raise ParameterError("need t >= 2")
    P = three_path_counts(G)
    worst = int(P.max()) if P.size else 0
    counts = {"t": t, "max_three_paths": worst}
    if worst <= t - 1 and not exact:
        return Verdict("theta(3,t)-free", True, None, {**counts, "stage": "screen"})
    pairs = np.argwhere(P >= (1 if exact else t))
    counts["pairs_checked"] = len(pairs)
    best = 0
    for x, y in pairs:
        paths = _disjoint_paths(G, int(x), int(y))
        best = max(best, len(paths))
        if len(paths) >= t:
            witness = {
                "left": int(x),
                "right": int(y),
                "paths": [[int(x), b, a, int(y)] for b, a in paths[:t]],
            }
            return Verdict("theta(3,t)-free", False, witness, {**counts, "stage": "exact"})
    counts["max_disjoint_paths"] = best
    return Verdict("theta(3,t)-free", True, None, {**counts, "stage": "exact"})


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TuranEnvelope:
    n: float
    m: float
    t: int
    value: float
    degree_split: float
    exponent_a: float | None
    in_regime: bool
    label: str = "envelope"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "t": self.t,
            "value": self.value,
            "degree_split": self.degree_split,
            "exponent_a": self.exponent_a,
            "in_regime": self.in_regime,
            "label": self.label,
        }


def turan_upper_bound(n: float, m: float, t: int) -> TuranEnvelope:
    """cbrt(t-1)(mn)^(2/3) + t n^(3/4) m^(1/2) + m n^(1/3) + n.

    The asymptotic (1 + o(1)) factor on the middle term is set to 1, so the
    value is an envelope rather than a certified bound.  ``in_regime`` flags
    m = n^a with a in (1/2, 1).
    """
    if t < 2:
        raise ParameterError("need t >= 2")
    if m < 1 or n < m:
        raise ParameterError("need n >= m >= 1")
    value = (
        (t - 1) ** (1 / 3) * (m * n) ** (2 / 3)
        + t * n ** 0.75 * m ** 0.5
        + m * n ** (1 / 3)
        + n
    )
    a = math.log(m) / math.log(n) if n > 1 else None
    in_regime = a is not None and 0.5 < a < 1
    return TuranEnvelope(n, m, t, value, n ** (5 / 8) / m ** 0.25, a, in_regime)


@dataclass(frozen=True)
class LowerBoundParameters:
    t: int
    j: int
    a: Fraction
    exponent: Fraction
    line_vertices_exp: int  # q^(2j-1)
    point_vertices_exp: int  # q^(j+1)


def lower_bound_parameters(t: int, j: int) -> LowerBoundParameters:
    """a = (j+1)/(2j-1) and edge exponent (2+2a)/3 for 2 <= j <= t(t+1)/2."""
    if not 2 <= j <= math.comb(t + 1, 2):
        raise ParameterError(f"need 2 <= j <= {math.comb(t + 1, 2)}")
    a = Fraction(j + 1, 2 * j - 1)
    return LowerBoundParameters(t, j, a, (2 + 2 * a) / 3, 2 * j - 1, j + 1)


def awm_check(B) -> Verdict:
    """sigma(B)^3 / (m n) <= sigma(B B^T B), sigma the entry sum.

    Integer (and Fraction) entries are compared exactly; floats in floating point.
    """
    arr = np.asarray(B, dtype=object)
    if arr.ndim != 2:
        raise ParameterError("expected a matrix")
    if np.any(arr < 0):
        raise ParameterError("entries must be non-negative")
    m, n = arr.shape
    if m == 0 or n == 0:
        return Verdict("awm-inequality", True, None, {"lhs": 0, "rhs": 0, "equality": True})
    exact = all(isinstance(v, (int, np.integer, Fraction)) for v in arr.flat)
    if exact:
        arr = np.vectorize(lambda v: v if isinstance(v, Fraction) else int(v), otypes=[object])(arr)
    sigma = arr.sum()
    rhs = (arr @ arr.T @ arr).sum()
    lhs = Fraction(sigma) ** 3 / (m * n) if exact else float(sigma) ** 3 / (m * n)
    ok = lhs <= rhs
    return Verdict(
        "awm-inequality",
        bool(ok),
        None if ok else {"lhs": str(lhs), "rhs": str(rhs)},
        {"lhs": str(lhs), "rhs": str(rhs), "equality": bool(lhs == rhs), "exact": exact},
    )


# ---------------------------------------------------------------------------


def _ap_exhaustive(points: np.ndarray, F: FieldSpec, t: int) -> list | None:
    if len(points) < t:
        return None
    if t == 1:
        return [points[0].tolist()]
    members = {tuple(p) for p in points.tolist()}
    for a in points.tolist():
        for c in points.tolist():
            if a == c:
                continue
            diff = [F.sub(ci, ai) for ai, ci in zip(a, c)]
            prog = [a, c]
            cur = c
            for _ in range(t - 2):
                cur = [F.add(x, d) for x, d in zip(cur, diff)]
                if tuple(cur) not in members:
                    break
                prog.append(cur)
            if len(prog) == t:
                return prog
    return None


def is_ap_free(points, n: int, p: int, t: int, workers: int = 1) -> Verdict:
    """No t points a, a+b, ..., a+(t-1)b (b != 0) in S ⊂ F_p^n.

    The fast path uses that a t-term progression lies on a line, so a
    (t-1)-line evasive set is progression-free; the exhaustive path checks
    every pair of first terms.
    """
    F = as_field(p)
    if F.e != 1:
        raise ParameterError(f"{p} is not prime")
    if t > p:
        raise ParameterError(f"t = {t} exceeds p = {p}; progressions would wrap")
    if t < 1:
        raise ParameterError("need t >= 1")
    pts = np.unique(np.asarray(points, dtype=np.int64).reshape(-1, n), axis=0)
    fast = None
    if t >= 2:
        fast = bool(is_t_line_evasive(pts, n, F, t - 1, workers))
    prog = _ap_exhaustive(pts, F, t)
    exhaustive = prog is None
    counts = {
        "t": t,
        "set_size": len(pts),
        "fast_path": "ap-free" if fast else "inconclusive",
        "exhaustive": "ap-free" if exhaustive else "progression-found",
        "agree": fast is not True or exhaustive,
    }
    witness = None if exhaustive else {"progression": prog}
    return Verdict("ap-free", exhaustive and counts["agree"], witness, counts)
