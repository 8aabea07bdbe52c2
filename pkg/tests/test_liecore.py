import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvtool.exact import Field
from cvtool.liecore import (AmbiguousFit, BudgetExceeded, StratumReport, abelian, ad_rank, ad_rank_table, bracket,
                            central_series, centralizer, enumerate_points, fit_degree, from_json, heisenberg,
                            merge_strata, modality_from_strata, strata_census, to_json, witt, in_span)
from cvtool.rootsys import TYPES, model
from oracles import witt_ad_rank

A2 = model("A2").u
A4 = model("A4")


def el(m, spec):
    return m.element(spec)


def test_bracket_examples():
    assert bracket(A2.from_dict({"E12": 1}), A2.from_dict({"E23": 1})) == A2.from_dict({"E13": 1})
    assert bracket(A2.from_dict({"E12": 1}), A2.from_dict({"E13": 1})).is_zero()


def test_witt_bracket_convention():
    w = witt(5)
    e = {lab: w.basis_element(k) for k, lab in enumerate(w.basis)}
    assert bracket(e["e1"], e["e2"]) == e["e3"]
    assert bracket(e["e-1"], e["e2"]) == 3 * e["e1"]
    assert bracket(e["e2"], e["e3"]).is_zero()


def test_centralizer_e13_in_a4():
    x = A4.element("E12+E45+E24")
    cent = centralizer(x)
    assert len(cent) == 5
    expected = [x, A4.element("E13"), A4.element("E35"), A4.element("E14+E25"), A4.element("E15")]
    assert all(in_span(v, cent) for v in expected)


def test_centralizer_e31_in_a4():
    cent = centralizer(A4.element("E23+E14"))
    third = ["E14", "E25", "E15"]
    expected = ["E23", "E13", "E24"] + third
    assert len(cent) == 6
    assert all(in_span(A4.element(lab), cent) for lab in expected)


def test_centralizer_of_zero_is_everything():
    assert len(centralizer(A4.u.zero())) == A4.dim_u


def test_central_series():
    assert len(central_series(abelian(3))) == 2
    series = central_series(A4.u)
    assert [len(s) for s in series] == [10, 6, 3, 1, 0]


def test_central_series_rejects_non_nilpotent():
    with pytest.raises(ValueError):
        central_series(witt(5))


@pytest.mark.parametrize("g", [model(t).u for t in TYPES] + [model(t).b for t in TYPES]
                         + [witt(p, s) for p in (5, 7, 11) for s in (-1, 0, 1)] + [heisenberg()])
def test_antisymmetry_and_jacobi(g):
    assert g.check_antisymmetry()
    assert g.jacobi_defect() is None


def test_witt_needs_large_prime():
    with pytest.raises(ValueError):
        witt(3)
    with pytest.raises(ValueError):
        witt(9)


def test_strata_abelian():
    rep = strata_census(abelian(2, Field("Fp", 5)))
    assert [(r.n, r.counts) for r in rep] == [(0, {5: 25})]


def test_strata_heisenberg_f2():
    rep = strata_census(heisenberg(Field("Fp", 2)))
    assert [(r.n, r.counts[2]) for r in rep] == [(0, 2), (1, 6)]


@pytest.mark.parametrize("g", [heisenberg(Field("Fp", 3)), model("A3").u.over(Field("Fp", 2)), witt(5)])
def test_strata_counts_sum(g):
    p = g.field.p
    assert sum(r.counts[p] for r in strata_census(g)) == p ** g.dim


def test_modality_of_heisenberg_and_abelian():
    reps = merge_strata([strata_census(heisenberg(Field("Fp", p))) for p in (2, 3, 5, 7, 11)])
    assert modality_from_strata(reps) == 2
    reps = merge_strata([strata_census(abelian(3, Field("Fp", p))) for p in (2, 3, 5, 7, 11)])
    assert modality_from_strata(reps) == 3


def test_fit_degree_flags_inconsistent_counts():
    with pytest.raises(AmbiguousFit):
        fit_degree({2: 4, 3: 9, 5: 26})
    with pytest.raises(AmbiguousFit):
        fit_degree({2: 4})
    with pytest.raises(AmbiguousFit):
        fit_degree({2: 4, 3: 9, 5: 25})
    assert fit_degree({2: 4, 3: 9, 5: 25, 7: 49}) == 2


def test_modality_needs_strata():
    with pytest.raises(ValueError):
        modality_from_strata([])
    assert modality_from_strata([StratumReport(1, dim=3)]) == 2


def test_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        ad_rank_table(witt(11))


def test_enumeration_is_odometer_order():
    pts = enumerate_points(2, 3)
    assert pts[:4].tolist() == [[0, 0], [0, 1], [0, 2], [1, 0]]
    assert enumerate_points(3, 2, 5, 6).tolist() == [[1, 0, 1]]


def test_witt_ad_ranks_match_derivation_model_p5():
    ranks = ad_rank_table(witt(5))
    pts = enumerate_points(5, 5)
    for k in range(0, len(pts), 7):
        assert ranks[k] == witt_ad_rank(5, pts[k])


@pytest.mark.parametrize("start", [-1, 0, 1])
def test_witt_subalgebra_ranks_match_derivation_model_p7(start):
    g = witt(7, start)
    rng = np.random.default_rng(start + 7)
    pts = rng.integers(0, 7, size=(150, g.dim))
    from cvtool.liecore import ad_stack
    from cvtool.exact import batch_rank_mod_p
    ranks = batch_rank_mod_p(ad_stack(g, pts), 7)
    assert [int(r) for r in ranks] == [witt_ad_rank(7, x, start) for x in pts]


def test_json_roundtrip_and_validation():
    g = model("B2").u
    d = to_json(g)
    h = from_json(json.loads(json.dumps(d)))
    assert h.brackets == g.brackets and h.basis == g.basis
    # sl_2 with [e, f] = e in place of h: Jacobi fails on (h, e, f)
    bad = {"name": "bad", "dim": 3, "field": {"kind": "Q"}, "basis": ["h", "e", "f"],
           "brackets": [{"i": 0, "j": 1, "coords": [[1, "2"]]}, {"i": 0, "j": 2, "coords": [[2, "-2"]]},
                        {"i": 1, "j": 2, "coords": [[1, "1"]]}]}
    with pytest.raises(ValueError):
        from_json(bad)
    bad["brackets"][2]["coords"] = [[0, "1"]]
    assert from_json(bad).dim == 3
    with pytest.raises(ValueError):
        from_json(dict(d, brackets=[{"i": 2, "j": 1, "coords": []}]))


coords = st.lists(st.integers(-3, 3), min_size=10, max_size=10)


@given(coords, coords, coords)
def test_bracket_bilinear_antisymmetric_jacobi(a, b, c):
    x, y, z = A4.u.element(a), A4.u.element(b), A4.u.element(c)
    assert bracket(x, y) == -bracket(y, x)
    assert bracket(x + y, z) == bracket(x, z) + bracket(y, z)
    jac = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y))
    assert jac.is_zero()


@given(st.sampled_from(TYPES), st.data())
def test_centralizer_commutes_and_has_right_dimension(t, data):
    u = model(t).u
    x = u.element(data.draw(st.lists(st.integers(-2, 2), min_size=u.dim, max_size=u.dim)))
    cent = centralizer(x)
    assert all(bracket(x, y).is_zero() for y in cent)
    assert len(cent) == u.dim - ad_rank(x)
