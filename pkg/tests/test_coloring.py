import math

import pytest
from hypothesis import given, strategies as st

from linevasive.coloring import (
    affine_coloring,
    chi_upper_bound,
    merge_parameters,
    merged_coloring,
    projective_coloring,
    ramsey_lower_bound,
)
from linevasive.errors import ParameterError
from linevasive.geometry import projective_space

from test_geometry import brute_projective_lines


@pytest.mark.parametrize("n,q", [(3, 3), (2, 4), (1, 3), (3, 4), (4, 4), (2, 5)])
def test_projective_coloring_has_no_monochromatic_line(n, q):
    col = projective_coloring(n, q)
    assert col.projective and col.num_colors == q
    assert col.colors_used() <= q
    v = col.certify()
    assert v.ok, v.witness
    assert v.counts["max_per_line_per_color"] <= q


def test_pg33_against_brute_force_lines():
    col = projective_coloring(3, 3)
    space = projective_space(3, 3)
    assert space.size == 40 and col.num_colors == 3
    pts, lines = brute_projective_lines(3, col.field)
    assert len(lines) == 130
    color_of = {tuple(p): int(c) for p, c in zip(space.points.tolist(), col.colors)}
    assert all(len({color_of[p] for p in line}) > 1 for line in lines)


@pytest.mark.parametrize("n,q", [(3, 3), (2, 4), (6, 4), (3, 5)])
def test_affine_coloring(n, q):
    col = affine_coloring(n, q)
    assert not col.projective
    assert col.certify().ok


def test_coloring_preconditions():
    with pytest.raises(ParameterError):
        projective_coloring(2, 2)
    with pytest.raises(ParameterError):
        projective_coloring(4, 3)
    with pytest.raises(ParameterError):
        affine_coloring(7, 4)


def test_affine_coloring_of_zero_dimension():
    col = projective_coloring(1, 3)
    assert len(col.colors) == 4


def _merge_oracle(n, q):
    s = min(s for s in range(2, q + 1) if s * (s - 1) // 2 >= n)
    j = max(j for j in range(1, q + 1) if j < (q + 1) / s)
    return s, j


@pytest.mark.parametrize("n,q", [(1, 8), (3, 9), (1, 4), (3, 7), (6, 13), (2, 9)])
def test_merge_parameters(n, q):
    assert merge_parameters(n, q) == _merge_oracle(n, q)


def test_merge_parameters_examples():
    assert merge_parameters(3, 9) == (3, 3)
    assert merge_parameters(1, 8) == (2, 4)
    with pytest.raises(ParameterError):
        merge_parameters(6, 7)
    with pytest.raises(ParameterError):
        merge_parameters(0, 7)


def test_merged_coloring_q9_n3():
    col = merged_coloring(3, 9)
    s, j = col.meta["s"], col.meta["j"]
    assert (s, j) == (3, 3)
    assert col.num_colors == 3 <= math.sqrt(8 * 3) + 4
    v = col.certify()
    assert v.ok
    assert v.counts["max_per_line_per_color"] <= s * j < 10


def test_merged_coloring_q8():
    col = merged_coloring(1, 8)
    assert col.num_colors == 2
    assert col.certify().ok


def test_chi_bounds():
    assert chi_upper_bound(4, 3).value == 3
    assert chi_upper_bound(1, 5).value == 1
    r = chi_upper_bound(11, 5)
    assert r.value <= 5 and r.value <= r.extras["envelope"]
    # beyond binom(q,2)+1 the recursion applies
    assert chi_upper_bound(100, 5).provenance == "recursion"
    assert chi_upper_bound(4, 9).extras["candidates"]["merged-coloring"] == 3
    with pytest.raises(ParameterError):
        chi_upper_bound(0, 3)
    with pytest.raises(ParameterError):
        chi_upper_bound(3, 6)


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9])
def test_ramsey_reproduces_binomial(q):
    r = ramsey_lower_bound(q, q)
    assert r.value >= math.comb(q, 2)
    # certified: chi(value) <= k, and the next dimension is not certified
    assert chi_upper_bound(r.value, q).value <= q
    assert chi_upper_bound(r.value + 1, q).value > q


def test_ramsey_monotone_in_k():
    vals = [ramsey_lower_bound(k, 5).value for k in range(1, 12)]
    assert vals == sorted(vals)
    with pytest.raises(ParameterError):
        ramsey_lower_bound(0, 5)


def test_bound_report_json():
    doc = ramsey_lower_bound(5, 5).to_json()
    assert doc["kind"] == "ramsey_lower" and doc["value"] == doc["n"]
    assert doc["extras"]["strict"] is True


@given(st.sampled_from([5, 7, 8, 9, 11, 13, 16, 25]), st.integers(1, 300))
def test_chi_envelopes(q, n):
    r = chi_upper_bound(n, q)
    assert r.value < r.extras["envelope"]
    if 8 * n <= q * (q - 2):
        assert r.value <= r.extras["sqrt_envelope"]


@given(st.sampled_from([5, 7, 8, 9, 11, 13]), st.data())
def test_ramsey_closed_form(q, data):
    k = data.draw(st.integers(1, q))
    r = ramsey_lower_bound(k, q)
    # value certifies R_q(2; k) > value, so R_q(2; k) >= value + 1
    assert r.value + 1 > r.extras["closed_form"]
