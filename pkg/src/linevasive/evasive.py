"""The norm-sum polynomial P(v) = v_1 + N_2(v_2) + ... + N_t(v_t) and its level sets.

A vector v = (v_1, ..., v_t) with v_i in F_{q^i} is flattened to t(t+1)/2
coordinates over F_q by writing each v_i in the power basis of its level, in
order v_1, v_2, ..., v_t.  Point sets are numpy arrays of shape (K, N) holding
F_q element indices, one flattened point per row, sorted lexicographically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError, SizeCapError
from .gf import FieldElement, FieldSpec, TowerSpec, make_tower

DEFAULT_POINT_CAP = 1 << 24


def _check_tower(T: TowerSpec, *, min_t: int = 1) -> None:
    if T.t < min_t:
        raise ParameterError(f"need t >= {min_t}, got t = {T.t}")
    if T.t >= T.q:
        raise ParameterError(f"need t < q, got t = {T.t}, q = {T.q}")


def _base_value(T: TowerSpec, u) -> int:
    if isinstance(u, FieldElement):
        if u.spec != T.base:
            raise ParameterError("value is not in the base field")
        return u.value
    u = int(u)
    if not 0 <= u < T.q:
        raise ParameterError(f"index {u} is not an element of F_{T.q}")
    return u


def sort_points(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=np.int64)
    if len(points) == 0:
        return points
    order = np.lexsort(points.T[::-1])
    return points[order]


@dataclass(frozen=True)
class EvasiveVector:
    """(v_1, ..., v_t) with v_i in level i of the tower."""

    tower: TowerSpec
    parts: tuple[FieldElement, ...]

    def __post_init__(self):
        if len(self.parts) != self.tower.t:
            raise ParameterError(f"expected {self.tower.t} parts, got {len(self.parts)}")
        for i, part in enumerate(self.parts, start=1):
            if part.spec != self.tower.level(i).field:
                raise ParameterError(f"part {i} is not in F_{self.tower.q}^{i}")

    @classmethod
    def zero(cls, T: TowerSpec) -> EvasiveVector:
        return cls(T, tuple(FieldElement(lv.field, 0) for lv in T._levels))

    @classmethod
    def from_flat(cls, T: TowerSpec, coords: Sequence[int]) -> EvasiveVector:
        coords = np.asarray(coords, dtype=np.int64)
        if coords.shape != (T.dimension,):
            raise ParameterError(f"expected {T.dimension} coordinates")
        parts, pos = [], 0
        for lv in T._levels:
            idx = int(lv.from_coords_arr(coords[pos:pos + lv.i]))
            parts.append(FieldElement(lv.field, idx))
            pos += lv.i
        return cls(T, tuple(parts))

    def flatten(self) -> tuple[int, ...]:
        out: list[int] = []
        for lv, part in zip(self.tower._levels, self.parts):
            out.extend(int(c) for c in lv.to_coords_arr(part.value))
        return tuple(out)

    def scale_add(self, x: int, b: EvasiveVector) -> EvasiveVector:
        """self * x + b for a base-field index x."""
        parts = []
        for lv, ai, bi in zip(self.tower._levels, self.parts, b.parts):
            f = lv.field
            parts.append(FieldElement(f, f.add(f.mul(ai.value, int(lv.embed[x])), bi.value)))
        return EvasiveVector(self.tower, tuple(parts))

    def is_zero(self) -> bool:
        return all(p.value == 0 for p in self.parts)


def eval_P(T: TowerSpec, v: EvasiveVector) -> FieldElement:
    _check_tower(T)
    if v.tower != T:
        raise ParameterError("vector belongs to a different tower")
    return FieldElement(T.base, _eval_parts(T, [p.value for p in v.parts]))


def _eval_parts(T: TowerSpec, parts: Sequence[int]) -> int:
    F = T.base
    acc = parts[0]
    for lv, a in zip(T._levels[1:], parts[1:]):
        acc = F.add(acc, lv.norm(a))
    return acc


def eval_flat_array(T: TowerSpec, coords) -> np.ndarray:
    """P on every row of a (K, t(t+1)/2) array of flattened points."""
    coords = np.asarray(coords, dtype=np.int64)
    F = T.base
    acc = coords[:, 0].copy()
    pos = 1
    for lv in T._levels[1:]:
        elems = lv.from_coords_arr(coords[:, pos:pos + lv.i])
        acc = F.add_arr(acc, lv.norm_table[elems])
        pos += lv.i
    return acc


def construct_class(T: TowerSpec, u, cap: int = DEFAULT_POINT_CAP) -> np.ndarray:
    """S_u = {v : P(v) = u}, q^(N-1) points in lexicographic order."""
    _check_tower(T, min_t=2)
    u = _base_value(T, u)
    N = T.dimension
    if T.q ** (N - 1) > cap:
        raise SizeCapError(f"class of size {T.q}^{N - 1} exceeds cap {cap}")
    F = T.base
    upper = T._levels[1:]
    grids = np.meshgrid(*[np.arange(lv.field.order) for lv in upper], indexing="ij")
    elems = [g.ravel() for g in grids]
    total = np.zeros(elems[0].shape, dtype=np.int64)
    for lv, el in zip(upper, elems):
        total = F.add_arr(total, lv.norm_table[el])
    v1 = F.sub_arr(np.full_like(total, u), total)
    cols = [v1[:, None]] + [lv.to_coords_arr(el) for lv, el in zip(upper, elems)]
    return sort_points(np.concatenate(cols, axis=1))


@dataclass(frozen=True)
class EvasivePartition:
    tower: TowerSpec
    classes: dict[int, np.ndarray]

    @property
    def q(self) -> int:
        return self.tower.q

    @property
    def t(self) -> int:
        return self.tower.t

    def sizes(self) -> dict[int, int]:
        return {u: len(pts) for u, pts in self.classes.items()}


def construct_partition(T: TowerSpec, cap: int = DEFAULT_POINT_CAP) -> EvasivePartition:
    return EvasivePartition(T, {u: construct_class(T, u, cap) for u in range(T.q)})


# ---------------------------------------------------------------------------
# polynomials in one variable over F_q, as lists of indices (low degree first)


def _poly_mul(F: FieldSpec, a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    return out


def poly_eval(F: FieldSpec, coeffs: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = F.add(F.mul(acc, x), c)
    return acc


def interpolate(F: FieldSpec, xs: Sequence[int], ys: Sequence[int]) -> list[int]:
    """Coefficients of the unique polynomial of degree < len(xs) through the points."""
    n = len(xs)
    out = [0] * n
    for k in range(n):
        basis, denom = [F.one], F.one
        for m in range(n):
            if m != k:
                basis = _poly_mul(F, basis, [F.neg(xs[m]), F.one])
                denom = F.mul(denom, F.sub(xs[k], xs[m]))
        scale = F.mul(ys[k], F.inv(denom))
        for d, c in enumerate(basis):
            out[d] = F.add(out[d], F.mul(scale, c))
    return out


def poly_from_roots(F: FieldSpec, lead: int, roots: Sequence[int]) -> list[int]:
    out = [lead]
    for r in roots:
        out = _poly_mul(F, out, [F.neg(r), F.one])
    return out


# ---------------------------------------------------------------------------


def _restriction(T: TowerSpec, a: Sequence[int], b: Sequence[int], u: int) -> list[int]:
    """Coefficients of x -> P(a x + b) - u, by interpolation at t+1 points."""
    F = T.base
    xs = list(range(T.t + 1))  # t < q, so these are distinct elements
    ys = []
    for x in xs:
        parts = []
        for lv, ai, bi in zip(T._levels, a, b):
            f = lv.field
            parts.append(f.add(f.mul(ai, int(lv.embed[x])), bi))
        ys.append(F.sub(_eval_parts(T, parts), u))
    return interpolate(F, xs, ys)


def line_restriction_poly(T: TowerSpec, a: EvasiveVector, b: EvasiveVector, u) -> list[FieldElement]:
    """Coefficients c_0..c_t of P(a x + b) - u as a polynomial in x."""
    _check_tower(T)
    u = _base_value(T, u)
    coeffs = _restriction(T, [p.value for p in a.parts], [p.value for p in b.parts], u)
    return [FieldElement(T.base, c) for c in coeffs]


def solve_slope(T: TowerSpec, b: EvasiveVector, u, f: Sequence[FieldElement | int]) -> EvasiveVector:
    """A slope a with P(a x + b) - u = f(x).

    The coefficient of x^i in P(a x + b) is N_i(a_i) plus a term that only
    depends on a_{i+1}, ..., a_t, so the a_i are fixed from the top level down.
    That term is read off the restriction polynomial with a_1..a_i still zero.
    """
    _check_tower(T)
    F = T.base
    u = _base_value(T, u)
    f = [c.value if isinstance(c, FieldElement) else int(c) for c in f]
    if len(f) > T.t + 1 and any(f[T.t + 1:]):
        raise ParameterError(f"target polynomial has degree above t = {T.t}")
    f = (f + [0] * (T.t + 1))[: T.t + 1]
    bv = [p.value for p in b.parts]
    if f[0] != F.sub(_eval_parts(T, bv), u):
        raise ParameterError("constant term must equal P(b) - u")
    a = [0] * T.t
    for i in range(T.t, 0, -1):
        g_i = _restriction(T, a, bv, u)[i]
        target = F.sub(f[i], g_i)
        if i == 1:
            a[0] = target
        else:
            a[i - 1] = T.level(i).min_norm_preimage[target]
    parts = tuple(FieldElement(lv.field, ai) for lv, ai in zip(T._levels, a))
    return EvasiveVector(T, parts)


# ---------------------------------------------------------------------------


def field_reduce(points, ambient: FieldSpec, base: FieldSpec) -> np.ndarray:
    """Rewrite points over F_{q^k} as points over F_q, each coordinate becoming k."""
    if base.p != ambient.p or ambient.e % base.e:
        raise ParameterError(f"F_{base.order} is not a subfield of F_{ambient.order}")
    k = ambient.e // base.e
    points = np.asarray(points, dtype=np.int64)
    if k == 1:
        return points.copy()
    lv = make_tower(base, k).level(k)
    if lv.field != ambient:
        raise ParameterError("ambient field is not the canonical degree-k extension")
    expanded = lv.to_coords_arr(points)  # (K, N, k)
    return expanded.reshape(points.shape[0], -1)


def restrict_to_subspace(points, n: int) -> np.ndarray:
    """Points whose trailing coordinates vanish, truncated to the first n."""
    points = np.asarray(points, dtype=np.int64)
    N = points.shape[1]
    if n > N:
        raise ParameterError(f"cannot restrict dimension {N} to {n}")
    keep = np.all(points[:, n:] == 0, axis=1)
    return points[keep, :n]


def largest_restricted_class(T: TowerSpec, n: int) -> tuple[int, np.ndarray]:
    """The class whose restriction to the first n coordinates is largest (smallest u on ties)."""
    best_u, best = -1, None
    for u in range(T.q):
        pts = restrict_to_subspace(construct_class(T, u), n)
        if best is None or len(pts) > len(best):
            best_u, best = u, pts
    return best_u, best


def class_size(q: int, t: int) -> int:
    return q ** (math.comb(t + 1, 2) - 1)
