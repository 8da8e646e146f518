"""Points and lines of AG(n, q) and PG(n, q), and exhaustive line sweeps.

Affine points are ranked in mixed radix with coordinate 0 most significant,
so rank order is lexicographic order.  Projective points are the normalized
vectors (first nonzero coordinate equal to 1), indexed in rank order.

Canonical lines:
  * affine: direction normalized, base the lexicographically least point;
    enumerated direction-major, then by base.
  * projective: spanned by its two smallest points.
"""

from __future__ import annotations

import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .certificates import Verdict
from .errors import ParameterError, SizeCapError
from .gf import FieldSpec, as_field, subfield_elements

DEFAULT_POINT_CAP = 1 << 24
_BLOCK_ELEMS = 1 << 22


class AffineSpace:
    def __init__(self, n: int, field: FieldSpec):
        self.n = n
        self.field = field
        self.q = field.order
        self.size = self.q**n
        self.weights = self.q ** np.arange(n - 1, -1, -1, dtype=np.int64)
        self.add = field.add_table
        self.mul = field.mul_table

    @functools.cached_property
    def coords(self) -> np.ndarray:
        idx = np.arange(self.size, dtype=np.int64)
        return (idx[:, None] // self.weights[None, :]) % self.q

    def rank(self, pts) -> np.ndarray:
        return np.asarray(pts, dtype=np.int64) @ self.weights

    @functools.cached_property
    def directions(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros((0, 0), dtype=np.int64)
        c = self.coords[1:]
        lead = c[np.arange(len(c)), np.argmax(c != 0, axis=1)]
        return c[lead == self.field.one]

    def line_block(self, dirs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Canonical lines with the given directions.

        Returns (dir_pos, members): members[k] holds the q point ranks of line k
        ordered by the parameter x (x = 0 is the base), dir_pos[k] its row in ``dirs``.
        """
        xs = np.arange(self.q)
        xd = self.mul[xs[:, None, None], dirs[None, :, :]]  # (q, D, n)
        pts = self.add[self.coords[None, None, :, :], xd[:, :, None, :]]  # (q, D, N, n)
        ranks = np.moveaxis(pts @ self.weights, 0, -1)  # (D, N, q)
        canon = ranks[..., 0] == ranks.min(axis=-1)
        dir_pos, _ = np.nonzero(canon)
        return dir_pos, ranks[canon]

    def block_size(self) -> int:
        return max(1, _BLOCK_ELEMS // (self.q * self.size * max(self.n, 1)))


@functools.lru_cache(maxsize=32)
def _affine(n: int, field: FieldSpec) -> AffineSpace:
    return AffineSpace(n, field)


def affine_space(n: int, q, cap: int = DEFAULT_POINT_CAP) -> AffineSpace:
    field = as_field(q)
    if n < 0:
        raise ParameterError("dimension must be non-negative")
    if field.order**n > cap:
        raise SizeCapError(f"AG({n},{field.order}) exceeds cap {cap}")
    return _affine(n, field)


class ProjectiveSpace:
    def __init__(self, n: int, field: FieldSpec):
        self.n = n
        self.field = field
        self.q = field.order
        self.vectors = _affine(n + 1, field)
        c = self.vectors.coords
        lead_pos = np.argmax(c != 0, axis=1)
        lead = c[np.arange(len(c)), lead_pos]
        normalized = lead == field.one
        self.points = c[normalized]
        self.point_ranks = np.nonzero(normalized)[0]
        self.size = len(self.points)
        index_of_rank = np.full(len(c), -1, dtype=np.int64)
        index_of_rank[self.point_ranks] = np.arange(self.size)
        # every nonzero vector -> index of its projective point
        inv_lead = field.inv_table[lead[1:]]
        scaled = self.vectors.mul[inv_lead[:, None], c[1:]]
        self.point_of_vector = np.concatenate([[-1], index_of_rank[scaled @ self.vectors.weights]])

    def index(self, pts) -> np.ndarray:
        """Projective point index of each (not necessarily normalized) nonzero vector."""
        return self.point_of_vector[self.vectors.rank(pts)]

    @functools.cached_property
    def lines(self) -> np.ndarray:
        """(L, q+1) array of point indices, ascending within rows, rows in canonical order."""
        add, mul, w = self.vectors.add, self.vectors.mul, self.vectors.weights
        xs = np.arange(self.q)
        out = []
        for i in range(self.size - 1):
            pi = self.points[i]
            others = self.points[i + 1:]
            shifted = add[others[:, None, :], mul[xs[:, None], pi[None, :]][None, :, :]]
            idx = self.point_of_vector[shifted @ w]  # (J, q); column 0 is the point itself
            canon = idx[:, 0] == idx.min(axis=1)
            if canon.any():
                rows = np.sort(idx[canon], axis=1)
                out.append(np.concatenate([np.full((len(rows), 1), i), rows], axis=1))
        if not out:
            return np.zeros((0, self.q + 1), dtype=np.int64)
        return np.concatenate(out)


@functools.lru_cache(maxsize=16)
def _projective(n: int, field: FieldSpec) -> ProjectiveSpace:
    return ProjectiveSpace(n, field)


def projective_space(n: int, q, cap: int = DEFAULT_POINT_CAP) -> ProjectiveSpace:
    field = as_field(q)
    if n < 0:
        raise ParameterError("dimension must be non-negative")
    if field.order ** (n + 1) > cap:
        raise SizeCapError(f"PG({n},{field.order}) exceeds cap {cap}")
    return _projective(n, field)


# ---------------------------------------------------------------------------
# line objects


@dataclass(frozen=True)
class AffineLine:
    field: FieldSpec
    base: tuple[int, ...]
    direction: tuple[int, ...]

    def points(self) -> list[tuple[int, ...]]:
        F = self.field
        return [
            tuple(F.add(b, F.mul(x, d)) for b, d in zip(self.base, self.direction))
            for x in range(F.order)
        ]

    def canonical(self) -> AffineLine:
        """The stored representative of the line through these points."""
        F = self.field
        lead = next(d for d in self.direction if d)
        inv = F.inv(lead)
        direction = tuple(F.mul(inv, d) for d in self.direction)
        return AffineLine(F, min(self.points()), direction)

    def to_json(self) -> dict:
        return {"base": list(self.base), "direction": list(self.direction)}


@dataclass(frozen=True)
class ProjectiveLine:
    field: FieldSpec
    first: tuple[int, ...]
    second: tuple[int, ...]

    def points(self) -> list[tuple[int, ...]]:
        F = self.field
        out = {self.first}
        for x in range(F.order):
            v = [F.add(s, F.mul(x, f)) for s, f in zip(self.second, self.first)]
            lead = next(c for c in v if c)
            inv = F.inv(lead)
            out.add(tuple(F.mul(inv, c) for c in v))
        return sorted(out)

    def to_json(self) -> dict:
        return {"points": [list(p) for p in self.points()]}


def affine_line_count(n: int, q: int) -> int:
    return q ** (n - 1) * (q**n - 1) // (q - 1) if n else 0


def gaussian_binomial(n: int, k: int, q: int) -> int:
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def enum_affine_lines(n: int, q, cap: int = DEFAULT_POINT_CAP) -> Iterator[AffineLine]:
    space = affine_space(n, q, cap)
    dirs = space.directions
    step = space.block_size()
    for start in range(0, len(dirs), step):
        block = dirs[start:start + step]
        dir_pos, members = space.line_block(block)
        for dp, row in zip(dir_pos, members):
            yield AffineLine(space.field, tuple(space.coords[row[0]].tolist()), tuple(block[dp].tolist()))


def enum_projective_lines(n: int, q, cap: int = DEFAULT_POINT_CAP) -> Iterator[ProjectiveLine]:
    space = projective_space(n, q, cap)
    for row in space.lines:
        yield ProjectiveLine(
            space.field, tuple(space.points[row[0]].tolist()), tuple(space.points[row[1]].tolist())
        )


# ---------------------------------------------------------------------------
# sweeps


def _shards(total: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(workers, total)) if total else 1
    bounds = np.linspace(0, total, workers + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]


def _affine_shard(n, field, labels, targets, threshold, start, stop):
    """Max line/label intersection over canonical lines with directions [start, stop).

    Returns (line count, max count, first violation) where a violation is a line
    meeting some target label in more than ``threshold`` points.
    """
    space = _affine(n, field)
    dirs = space.directions[start:stop]
    step = space.block_size()
    lines = 0
    best = 0
    violation = None
    for s in range(0, len(dirs), step):
        dir_pos, members = space.line_block(dirs[s:s + step])
        lines += len(members)
        lab = labels[members]
        hit = None
        for c in targets:
            cnt = (lab == c).sum(axis=1)
            if len(cnt):
                best = max(best, int(cnt.max()))
            bad = np.nonzero(cnt > threshold)[0]
            if violation is None and len(bad) and (hit is None or bad[0] < hit[0]):
                hit = (int(bad[0]), c, int(cnt[bad[0]]))
        if hit is not None:
            k, c, cnt = hit
            violation = (c, cnt, members[k], dirs[s + dir_pos[k]])
    if violation is not None:
        c, cnt, row, d = violation
        violation = {
            "base": space.coords[row[0]].tolist(),
            "direction": d.tolist(),
            "points": sorted(space.coords[r].tolist() for r in row),
            "label": int(c),
            "intersection": cnt,
        }
    return lines, best, violation


def affine_sweep(n: int, field: FieldSpec, labels: np.ndarray, targets: Sequence[int],
                 threshold: int, workers: int = 1) -> tuple[int, int, dict | None]:
    space = _affine(n, field)
    shards = _shards(len(space.directions), workers)
    args = [(n, field, labels, list(targets), threshold, a, b) for a, b in shards]
    if workers > 1 and len(shards) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_affine_shard, *zip(*args)))
    else:
        results = [_affine_shard(*a) for a in args]
    lines = sum(r[0] for r in results)
    best = max((r[1] for r in results), default=0)
    violation = next((r[2] for r in results if r[2] is not None), None)
    return lines, best, violation


def projective_sweep(space: ProjectiveSpace, labels: np.ndarray, targets: Sequence[int],
                     threshold: int) -> tuple[int, int, dict | None]:
    lines = space.lines
    lab = labels[lines]
    best, first = 0, None
    for c in targets:
        cnt = (lab == c).sum(axis=1)
        if len(cnt):
            best = max(best, int(cnt.max()))
        bad = np.nonzero(cnt > threshold)[0]
        if len(bad) and (first is None or bad[0] < first[0]):
            first = (int(bad[0]), c, int(cnt[bad[0]]))
    violation = None
    if first is not None:
        k, c, cnt = first
        violation = {
            "points": [space.points[i].tolist() for i in lines[k]],
            "label": int(c),
            "intersection": cnt,
        }
    return len(lines), best, violation


def _as_points(points, n: int) -> np.ndarray:
    arr = np.asarray(points, dtype=np.int64)
    if arr.size == 0:
        return arr.reshape(0, n)
    if arr.ndim != 2 or arr.shape[1] != n:
        raise ParameterError(f"expected points with {n} coordinates")
    return arr


def indicator(space, points) -> np.ndarray:
    """Dense membership mask over all points of the space."""
    ind = np.zeros(space.size, dtype=np.int8)
    points = np.asarray(points, dtype=np.int64)
    if np.any((points < 0) | (points >= space.q)):
        raise ParameterError(f"coordinates must be element indices in [0, {space.q})")
    if isinstance(space, ProjectiveSpace):
        idx = space.index(points)
    else:
        idx = space.rank(points)
    if len(idx):
        if np.any((idx < 0) | (idx >= space.size)):
            raise ParameterError("point outside the space")
        ind[idx] = 1
    return ind


def is_t_line_evasive(points, n: int, q, t: int, workers: int = 1,
                      cap: int = DEFAULT_POINT_CAP) -> Verdict:
    """Does every affine line of AG(n, q) meet the set in at most t points?"""
    space = affine_space(n, q, cap)
    pts = _as_points(points, n)
    ind = indicator(space, pts)
    lines, best, violation = affine_sweep(n, space.field, ind, [1], t, workers)
    if violation is not None:
        del violation["label"]
    return Verdict(
        "t-line-evasive",
        violation is None,
        violation,
        {"t": t, "set_size": int(ind.sum()), "lines": lines, "max_intersection": best},
    )


def is_projective_t_set(points, n: int, q, t: int, cap: int = DEFAULT_POINT_CAP) -> Verdict:
    """Does every line of PG(n, q) meet the set in at most t points?"""
    space = projective_space(n, q, cap)
    ind = indicator(space, _as_points(points, n + 1))
    lines, best, violation = projective_sweep(space, ind, [1], t)
    if violation is not None:
        del violation["label"]
    return Verdict(
        "(t,1)-set",
        violation is None,
        violation,
        {"t": t, "set_size": int(ind.sum()), "lines": lines, "max_intersection": best},
    )


# ---------------------------------------------------------------------------
# maximality


def _coverage_exhaustive(space: AffineSpace, ind: np.ndarray, outside: np.ndarray,
                         sub_nonzero: Sequence[int]) -> np.ndarray:
    """Max number of set points on a subfield line through each outside point."""
    add, mul = space.add, space.mul
    best = np.zeros(len(outside), dtype=np.int64)
    dirs = space.coords[1:]
    step = max(1, _BLOCK_ELEMS // max(1, len(outside) * space.n * len(sub_nonzero)))
    for s in range(0, len(dirs), step):
        block = dirs[s:s + step]
        total = np.zeros((len(block), len(outside)), dtype=np.int64)
        for x in sub_nonzero:
            shifted = add[outside[None, :, :], mul[x, block][:, None, :]]
            total += ind[shifted @ space.weights]
        best = np.maximum(best, total.max(axis=0))
    return best


def _coverage_constructive(T, u: int, ind: np.ndarray, space: AffineSpace,
                           outside: np.ndarray, xs: Sequence[int]) -> np.ndarray:
    from .evasive import EvasiveVector, _eval_parts, poly_from_roots, solve_slope

    F = T.base
    t = T.t
    prod = F.one
    for x in xs:
        prod = F.mul(prod, x)
    if t % 2:
        prod = F.neg(prod)
    found = np.zeros(len(outside), dtype=np.int64)
    for k, b in enumerate(outside):
        bv = EvasiveVector.from_flat(T, b)
        pb = F.sub(_eval_parts(T, [p.value for p in bv.parts]), u)
        c = F.mul(pb, F.inv(prod))
        f = poly_from_roots(F, c, xs)
        a = solve_slope(T, bv, u, f)
        if a.is_zero():
            continue
        hits = [space.rank(a.scale_add(x, bv).flatten()) for x in xs]
        found[k] = int(sum(ind[h] for h in hits))
    return found


def is_maximal_evasive(points, n: int, q, t: int, sub, *, tower=None, u=None,
                       cap: int = DEFAULT_POINT_CAP) -> Verdict:
    """Is every point outside the set on a subfield line carrying t points of the set?

    The exhaustive engine scans every subfield line through each outside point.
    When the tower and value u of a norm-polynomial class are given, the
    constructive engine also builds, for each outside point b, the line through
    b whose restriction polynomial is c(x - x_1)...(x - x_t) with x_i nonzero
    in the subfield; both engines must agree.
    """
    space = affine_space(n, q, cap)
    field = space.field
    sub = as_field(sub)
    elems = subfield_elements(field, sub)
    if t >= sub.order:
        raise ParameterError(f"t = {t} must be below the subfield order {sub.order}")
    pts = _as_points(points, n)
    ind = indicator(space, pts)
    outside = space.coords[ind == 0]
    sub_nonzero = [z for z in elems if z]

    exhaustive = _coverage_exhaustive(space, ind, outside, sub_nonzero) >= t
    counts = {
        "t": t,
        "subfield_order": sub.order,
        "set_size": int(ind.sum()),
        "outside_points": len(outside),
        "covered_exhaustive": int(exhaustive.sum()),
    }
    ok = bool(exhaustive.all())
    agree = True
    if tower is not None:
        if tower.base != field or tower.dimension != n:
            raise ParameterError("tower does not match the ambient space")
        u_val = u.value if hasattr(u, "value") else int(u or 0)
        constructive = _coverage_constructive(tower, u_val, ind, space, outside, sub_nonzero[:t]) >= t
        counts["covered_constructive"] = int(constructive.sum())
        agree = bool(np.array_equal(constructive, exhaustive))
        ok = ok and bool(constructive.all()) and agree
    counts["engines_agree"] = agree
    witness = None
    if not exhaustive.all():
        witness = {"uncovered_point": outside[np.argmin(exhaustive)].tolist()}
    return Verdict("maximal-t-line-evasive", ok, witness, counts)


# ---------------------------------------------------------------------------
# colorings


def _coloring_space(coloring):
    if coloring.projective:
        return projective_space(coloring.n, coloring.field)
    return affine_space(coloring.n, coloring.field)


def _check_total(coloring, space) -> np.ndarray:
    colors = np.asarray(coloring.colors, dtype=np.int64)
    if colors.shape != (space.size,) or np.any(colors < 0) or np.any(colors >= coloring.num_colors):
        raise ParameterError("coloring must assign a color in [0, k) to every point")
    return colors


def _coloring_sweep(coloring, threshold: int, workers: int):
    space = _coloring_space(coloring)
    colors = _check_total(coloring, space)
    targets = range(coloring.num_colors)
    if coloring.projective:
        return projective_sweep(space, colors, targets, threshold)
    return affine_sweep(coloring.n, coloring.field, colors, targets, threshold, workers)


def max_per_line_per_color(coloring, workers: int = 1) -> int:
    return _coloring_sweep(coloring, coloring.field.order + 1, workers)[1]


def no_monochromatic_line(coloring, workers: int = 1) -> Verdict:
    q = coloring.field.order
    line_size = q + 1 if coloring.projective else q
    lines, best, violation = _coloring_sweep(coloring, line_size - 1, workers)
    if violation is not None:
        violation["color"] = violation.pop("label")
    return Verdict(
        "no-monochromatic-line",
        violation is None,
        violation,
        {"lines": lines, "colors": coloring.num_colors, "max_per_line_per_color": best},
    )
