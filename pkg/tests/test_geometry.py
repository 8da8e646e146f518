import itertools

import numpy as np
import pytest

from linevasive.errors import ParameterError, SizeCapError
from linevasive.evasive import construct_class
from linevasive.geometry import (
    AffineLine,
    affine_line_count,
    affine_space,
    enum_affine_lines,
    enum_projective_lines,
    gaussian_binomial,
    is_maximal_evasive,
    is_projective_t_set,
    is_t_line_evasive,
    max_per_line_per_color,
    no_monochromatic_line,
    projective_space,
)
from linevasive.coloring import Coloring
from linevasive.gf import field_of_order, make_tower

from conftest import brute_lines


def _normalize(v, F):
    lead = next(c for c in v if c)
    inv = F.inv(lead)
    return tuple(F.mul(inv, c) for c in v)


def brute_projective_lines(n, F):
    vecs = [v for v in itertools.product(range(F.order), repeat=n + 1) if any(v)]
    pts = sorted({_normalize(v, F) for v in vecs})
    lines = set()
    for a, b in itertools.combinations(pts, 2):
        span = {a, b}
        for x in range(F.order):
            span.add(_normalize(tuple(F.add(bi, F.mul(x, ai)) for ai, bi in zip(a, b)), F))
        lines.add(frozenset(span))
    return pts, lines


@pytest.mark.parametrize("n,q", [(1, 5), (2, 3), (2, 4), (3, 3), (2, 5), (3, 2)])
def test_affine_lines_match_brute_force(n, q):
    F = field_of_order(q)
    lines = list(enum_affine_lines(n, F))
    assert len(lines) == affine_line_count(n, q)
    assert {frozenset(l.points()) for l in lines} == brute_lines(n, F)


def test_affine_line_counts():
    assert affine_line_count(3, 3) == 117
    assert affine_line_count(2, 4) == 20
    assert affine_line_count(1, 5) == 1
    assert affine_line_count(6, 4) == 1_397_760


def test_affine_lines_are_canonical():
    F = field_of_order(4)
    for line in enum_affine_lines(2, F):
        assert next(d for d in line.direction if d) == F.one
        assert line.base == min(line.points())
        assert line.canonical() == line
    # any other representative canonicalizes to the stored one
    rep = AffineLine(F, (3, 2), (2, 3))
    assert rep.canonical() in set(enum_affine_lines(2, F))


@pytest.mark.parametrize("n,q", [(1, 4), (2, 2), (2, 3), (2, 4), (3, 3), (3, 2)])
def test_projective_lines_match_brute_force(n, q):
    F = field_of_order(q)
    pts, lines = brute_projective_lines(n, F)
    space = projective_space(n, F)
    assert [tuple(p) for p in space.points.tolist()] == pts
    got = list(enum_projective_lines(n, F))
    assert len(got) == gaussian_binomial(n + 1, 2, q)
    assert {frozenset(l.points()) for l in got} == lines
    # each line is named by its two smallest points
    for l in got:
        assert [l.first, l.second] == l.points()[:2]


def test_projective_counts():
    assert gaussian_binomial(3, 2, 3) == 13
    assert gaussian_binomial(4, 2, 3) == 130
    assert projective_space(3, 3).size == 40
    assert len(projective_space(2, 4).lines) == 21


def test_size_caps():
    with pytest.raises(SizeCapError):
        affine_space(11, 5)
    with pytest.raises(SizeCapError):
        projective_space(4, 3, cap=100)
    with pytest.raises(ParameterError):
        affine_space(-1, 3)


def test_evasive_verifier_and_witness():
    T = make_tower(3, 2)
    S = construct_class(T, 0)
    v = is_t_line_evasive(S, 3, 3, 2)
    assert v.ok and v.counts["lines"] == 117 and v.counts["max_intersection"] == 2
    w = is_t_line_evasive(S, 3, 3, 1)
    assert not w.ok
    pts = w.witness["points"]
    members = {tuple(r) for r in S.tolist()}
    assert sum(tuple(p) in members for p in pts) == w.witness["intersection"] == 2
    line = AffineLine(T.base, tuple(w.witness["base"]), tuple(w.witness["direction"]))
    assert sorted(line.points()) == [tuple(p) for p in pts]


def test_evasive_verifier_rejects_full_line():
    F = field_of_order(5)
    line = [[x, 2 * x % 5, 1] for x in range(5)]
    v = is_t_line_evasive(line, 3, F, 4)
    assert not v.ok and v.witness["intersection"] == 5
    assert is_t_line_evasive([], 3, F, 1).ok
    with pytest.raises(ParameterError):
        is_t_line_evasive([[0, 0]], 3, F, 1)
    with pytest.raises(ParameterError):
        is_t_line_evasive([[0, 0, 7]], 3, F, 1)


def test_parallel_sweep_matches_serial():
    T = make_tower(4, 2)
    S = construct_class(T, 3)
    serial = is_t_line_evasive(S, 3, 4, 1)
    parallel = is_t_line_evasive(S, 3, 4, 1, workers=3)
    assert serial.to_json() == parallel.to_json()


def test_projective_t_set_conic():
    # the conic xz = y^2 in PG(2, 5) is an arc
    F = field_of_order(5)
    conic = [[1, y, y * y % 5] for y in range(5)] + [[0, 0, 1]]
    assert is_projective_t_set(conic, 2, F, 2).ok
    bad = is_projective_t_set(conic + [[0, 1, 0]], 2, F, 2)
    assert not bad.ok and bad.witness["intersection"] == 3


def test_maximality_q3():
    T = make_tower(3, 2)
    S = construct_class(T, 0)
    v = is_maximal_evasive(S, 3, 3, 2, 3, tower=T, u=0)
    assert v.ok
    assert v.counts["outside_points"] == 18 == v.counts["covered_exhaustive"] == v.counts["covered_constructive"]
    assert v.counts["engines_agree"]


def test_maximality_fails_with_witness():
    F = field_of_order(3)
    S = [[0, 0], [1, 0]]
    v = is_maximal_evasive(S, 2, F, 2, F)
    assert not v.ok
    assert v.witness["uncovered_point"] not in S + [[2, 0]]
    with pytest.raises(ParameterError):
        is_maximal_evasive(S, 2, F, 3, F)


def _coloring(projective, n, q, colors, k):
    return Coloring(projective, n, field_of_order(q), np.asarray(colors), k, "test")


def test_monochromatic_detection():
    space = affine_space(2, 3)
    const = _coloring(False, 2, 3, np.zeros(space.size, dtype=int), 1)
    v = no_monochromatic_line(const)
    assert not v.ok and v.witness["color"] == 0
    # color by first coordinate: vertical lines are monochromatic
    col = _coloring(False, 2, 3, space.coords[:, 0], 3)
    v = no_monochromatic_line(col)
    assert not v.ok and len({p[0] for p in v.witness["points"]}) == 1
    assert max_per_line_per_color(col) == 3
    with pytest.raises(ParameterError):
        no_monochromatic_line(_coloring(False, 2, 3, [0, 1], 2))
