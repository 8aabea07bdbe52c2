import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvtool.golden import DEFAULT_PRIMES, PINNED
from cvtool.liecore import BudgetExceeded, centralizer, in_span, enumerate_points
from cvtool.orbits import (ModelInconsistency, audit_orbits, batch_signatures, bfs_census, borel_order,
                           discover_reps, is_distinguished, lattice_distinguished, modality_of_action,
                           over_fq, reduce_element, signature, signature_code)
from cvtool.rootsys import TYPES, model, root_group_act, support_profile, torus_act
from oracles import orbit_sizes

# orbit counts of B(F_q) on u(F_q), from the matrix-conjugation oracle
FROZEN_ORBITS = {("A1", 5): 2, ("A2", 2): 5, ("A2", 3): 5, ("A3", 2): 16, ("A3", 3): 16,
                 ("B2", 2): 9, ("B2", 3): 8, ("B2", 5): 8, ("A4", 2): 61}
FROZEN_RECORDS = {"A1": 2, "A2": 5, "A3": 16, "A4": 61, "B2": 7}


@pytest.mark.parametrize("t, q", sorted(FROZEN_ORBITS))
def test_bfs_matches_conjugation_oracle(t, q):
    part = bfs_census(t, q)
    assert part.n_orbits == FROZEN_ORBITS[(t, q)]
    assert sorted(part.sizes) == orbit_sizes(t, q)
    assert part.coverage == q ** model(t).dim_u


def test_bfs_examples():
    assert sorted(bfs_census("A2", 2).sizes) == [1, 1, 2, 2, 2]
    for q in (2, 3, 5, 7):
        assert sorted(bfs_census("A1", q).sizes) == [1, q - 1]


def test_bfs_budget():
    with pytest.raises(BudgetExceeded):
        bfs_census("A4", 3, budget=1000)


def test_signature_examples():
    m = model("A4")
    s = signature(m, m.element(PINNED["A4"]["e1"]))
    assert (s.deg, len(s.msupp), s.zrank, s.cent_u, s.cent_b, s.orbit_dim) == (1, 4, 4, 4, 4, 10)
    s = signature(m, m.element(PINNED["A4"]["e9"]))
    assert (s.cent_u, s.cent_b, s.orbit_dim) == (6, 6, 8)
    a2 = model("A2")
    s = signature(a2, a2.element("E13"))
    assert (s.orbit_dim, s.cent_u, s.cent_b) == (1, 3, 4)


def test_distinguished_examples():
    assert is_distinguished(model("A4"), model("A4").element(PINNED["A4"]["e9"]))
    assert is_distinguished(model("A3"), model("A3").element(PINNED["A3"]["e3"]))
    assert not is_distinguished(model("A2"), model("A2").element("E12"))


@pytest.mark.parametrize("t", TYPES)
def test_record_counts(records, t):
    assert len(records(t)) == FROZEN_RECORDS[t]


def test_a2_records(records):
    reps = {str(r.rep) for r in records("A2")}
    assert reps == {"0", "E12", "E23", "E13", "E12 + E23"}


def test_b2_xb_centralizer(records):
    m = model("B2")
    xb = next(r for r in records("B2") if r.name == "xb")
    cent = centralizer(xb.rep)
    assert len(cent) == 2 and in_span(m.element("xb"), cent) and in_span(m.element("xa2b"), cent)


@pytest.mark.parametrize("t", TYPES)
def test_record_invariants(records, t):
    m = model(t)
    for r in records(t):
        assert r.comp_dim == r.orbit_dim + r.cent_u
        if r.distinguished:
            assert r.zrank == m.datum.ssrk
        # both distinguished tests agree on every bundled record
        assert r.distinguished == lattice_distinguished(m, r.rep)


def test_pinned_names_resolve(records):
    for t, pins in PINNED.items():
        names = {r.name for r in records(t)}
        assert set(pins) <= names


@pytest.mark.parametrize("t, rank", [("A2", 1), ("A4", 6), ("B2", 2), ("A3", 3)])
def test_modality_of_action(t, rank):
    by_prime = {q: discover_reps(t, (q,)) for q in DEFAULT_PRIMES[t]}
    rep = modality_of_action(t, by_prime)
    assert rep.ok and rep.modality == 0 and rep.max_ad_rank == rank


def test_modality_refuses_disagreeing_primes():
    with pytest.raises(ModelInconsistency):
        modality_of_action("B2", {2: discover_reps("B2", (2,)), 3: discover_reps("B2", (3,))})


@pytest.mark.parametrize("t, q", [("A1", 5), ("A2", 3), ("A3", 2), ("B2", 2), ("B2", 3)])
def test_audit(records, t, q):
    a = audit_orbits(t, q, list(records(t)))
    assert a.ok and a.coverage == a.total
    assert a.group_order == borel_order(model(t), q)


def test_audit_detects_missing_records(records):
    recs = [r for r in records("A2") if r.name != "e1"]
    a = audit_orbits("A2", 3, recs)
    assert not a.ok and a.unmatched == (3 - 1) ** 2 * 3


@given(st.sampled_from([("A2", 3), ("A3", 3), ("B2", 5), ("A4", 2)]), st.data())
@settings(max_examples=40)
def test_signature_invariant_under_generators(tq, data):
    t, q = tq
    m = model(t)
    from conftest import records_for
    rec = data.draw(st.sampled_from(records_for(t)))
    x = reduce_element(m, rec.rep, q)
    mq = over_fq(m, q)
    g = data.draw(st.integers(0, len(m.datum.roots) - 1))
    s = data.draw(st.integers(1, q - 1))
    w = tuple(mq.u.field(data.draw(st.integers(1, q - 1))) for _ in range(m.datum.rank))
    base = signature(m, x)
    assert signature(m, root_group_act(m, g, mq.u.field(s), x)) == base
    assert signature(m, torus_act(m, w, x)) == base


@pytest.mark.parametrize("t, q", [("A3", 3), ("B2", 5), ("A4", 2)])
def test_batch_signatures_match_scalar(t, q):
    m = model(t)
    rng = np.random.default_rng(0)
    pts = rng.integers(0, q, size=(40, m.dim_u))
    rows = batch_signatures(m, q, pts)
    for x, row in zip(pts, rows):
        el = over_fq(m, q).u.element([int(v) for v in x])
        assert tuple(int(v) for v in row) == signature_code(signature(m, el))
