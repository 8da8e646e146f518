"""Colorings of AG(n, q) and PG(n, q) with no monochromatic line, and the
chromatic-number / vector-space Ramsey bounds they certify.

Index convention: chi(n, q) is the chromatic number of PG(n-1, q), and
R_q(2; k) > n exactly when chi(n, q) <= k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .evasive import eval_flat_array
from .geometry import affine_space, no_monochromatic_line, projective_space
from .gf import FieldSpec, as_field, make_tower


@dataclass(frozen=True)
class Coloring:
    projective: bool
    n: int
    field: FieldSpec
    colors: np.ndarray
    num_colors: int
    tag: str
    meta: dict = field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.field.order

    def colors_used(self) -> int:
        return len(np.unique(self.colors))

    def certify(self, workers: int = 1):
        return no_monochromatic_line(self, workers)


def _levels_needed(n: int) -> int:
    """Smallest t with t(t+1)/2 >= n."""
    t = 0
    while t * (t + 1) // 2 < n:
        t += 1
    return t


def _affine_colors(n: int, F: FieldSpec) -> np.ndarray:
    """P evaluated on AG(n, q) padded with trailing zeros.

    Levels above the smallest t with t(t+1)/2 >= n only see zero coordinates
    and contribute N(0) = 0, so the smallest such tower gives the same colors
    as any larger one.
    """
    space = affine_space(n, F)
    t = _levels_needed(n)
    if t == 0:
        return np.zeros(1, dtype=np.int64)
    T = make_tower(F, t)
    coords = space.coords
    pad = T.dimension - n
    if pad:
        coords = np.concatenate([coords, np.zeros((len(coords), pad), dtype=np.int64)], axis=1)
    return eval_flat_array(T, coords)


def affine_coloring(n: int, q) -> Coloring:
    """q-coloring of AG(n, q) by the value of the norm polynomial with t = q - 1."""
    F = as_field(q)
    if F.order < 3:
        raise ParameterError("need q >= 3")
    if n > math.comb(F.order, 2):
        raise ParameterError(
            f"n = {n} exceeds q(q-1)/2 = {math.comb(F.order, 2)}; field-reduce a larger construction instead"
        )
    return Coloring(False, n, F, _affine_colors(n, F), F.order, "affine-norm")


def _closure_colors(n: int, F: FieldSpec) -> np.ndarray:
    """Color each point (0,...,0,1,w) of PG(n, q) by the affine coloring of w."""
    space = projective_space(n, F)
    pts = space.points
    lead = np.argmax(pts != 0, axis=1)
    colors = np.zeros(space.size, dtype=np.int64)
    for k in range(n + 1):
        rows = np.nonzero(lead == k)[0]
        m = n - k
        aff = affine_space(m, F)
        colors[rows] = _affine_colors(m, F)[aff.rank(pts[rows, k + 1:])]
    return colors


def projective_coloring(n: int, q) -> Coloring:
    """At most q colors on PG(n, q), n <= q(q-1)/2: the affine part is colored
    by the norm polynomial, then the hyperplane at infinity recursively."""
    F = as_field(q)
    if F.order < 3:
        raise ParameterError("need q >= 3")
    if n > math.comb(F.order, 2):
        raise ParameterError(f"n = {n} exceeds q(q-1)/2 = {math.comb(F.order, 2)}")
    colors = _closure_colors(n, F)
    return Coloring(True, n, F, colors, F.order, "projective-recursive")


def merge_parameters(n: int, q: int) -> tuple[int, int]:
    """(s, j): s the least integer with s(s-1)/2 >= n, j the largest integer below (q+1)/s."""
    if n < 1:
        raise ParameterError("need n >= 1")
    s = 2
    while math.comb(s, 2) < n:
        s += 1
    if 2 * s > q:
        raise ParameterError(f"s = {s} exceeds q/2 = {q / 2}")
    j = -(-(q + 1) // s) - 1  # largest integer strictly below (q+1)/s
    return s, j


def merged_coloring(n: int, q) -> Coloring:
    """Coloring of PG(n, q) with ceil(q/j) colors.

    The closure coloring built from t = s - 1 meets every projective line in
    at most s points of a class; merging j consecutive classes keeps that
    below s*j < q + 1.
    """
    F = as_field(q)
    s, j = merge_parameters(n, F.order)
    base = _closure_colors(n, F)
    k = -(-F.order // j)
    return Coloring(True, n, F, base // j, k, "projective-merged", {"s": s, "j": j, "base_colors": F.order})


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    kind: str  # "chi_upper" or "ramsey_lower"
    n: int | None
    q: int
    k: int | None
    value: int
    provenance: str
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "q": self.q,
            "k": self.k,
            "value": self.value,
            "provenance": self.provenance,
            "extras": self.extras,
        }


def _chi_candidates(n: int, q: int) -> dict[str, int]:
    if n == 1:
        return {"single-point": 1}
    d = math.comb(q, 2) + 1
    out = {}
    if n <= d:
        out["norm-coloring"] = q
        try:
            s, j = merge_parameters(n - 1, q)
        except ParameterError:
            pass
        else:
            out["merged-coloring"] = -(-q // j)
    else:
        out["recursion"] = q * -(-(n + 1) // d)
    return out


def chi_upper_bound(n: int, q: int) -> BoundReport:
    """Upper bound on the chromatic number of PG(n-1, q)."""
    if n < 1:
        raise ParameterError("need n >= 1")
    as_field(q)
    cands = _chi_candidates(n, q)
    provenance = min(cands, key=lambda name: (cands[name], name))
    extras = {"candidates": cands, "envelope": 2 * n / (q - 1) + q}
    if 8 * n <= q * (q - 2):  # n <= C(q/2, 2)
        extras["sqrt_envelope"] = math.sqrt(8 * n) + 4
    return BoundReport("chi_upper", n, q, None, cands[provenance], provenance, extras)


def ramsey_lower_bound(k: int, q: int) -> BoundReport:
    """Largest n with chi(n, q) <= k certified, i.e. R_q(2; k) > n."""
    if k < 1:
        raise ParameterError("need k >= 1")
    n = 1
    while chi_upper_bound(n + 1, q).value <= k:
        n += 1
    report = chi_upper_bound(n, q)
    extras = {"strict": True, "chi_provenance": report.provenance}
    if k <= q:
        extras["closed_form"] = (k - 4) ** 2 / 8
    if k >= q:
        extras["linear_envelope"] = (q - 1) * k / 2
    return BoundReport("ramsey_lower", n, q, k, n, report.provenance, extras)
