import math

import numpy as np
import pytest

from nscap.capacity import (capacity_grid, capacity_over_set, distinct_sumrate_functions,
                            hierarchy_arrays, hierarchy_scan, local_capacity_formula, make_grid,
                            ns_capacity_formula, qlb_formula, qub_formula, rate_table)
from nscap.channel import sum_rate
from nscap.data import max_rate_vertices
from nscap.errors import DomainError
from nscap.polytope import find_max_rate_vertices
from nscap.vertexset import VertexSet


def h(t):
    return 0.0 if t <= 0 or t >= 1 else -t * math.log2(t) - (1 - t) * math.log2(1 - t)


def test_closed_form_endpoints():
    assert local_capacity_formula(1, 0) == pytest.approx(1.0)
    assert ns_capacity_formula(1, 0) == pytest.approx(2.0)
    assert ns_capacity_formula(0.5, 0.5) == pytest.approx(0.0)
    assert qlb_formula(0.5, 0.5) == pytest.approx(0.0)


def test_quantum_bounds_by_hand_at_one_zero():
    w = (2 + math.sqrt(2)) / 4
    assert qlb_formula(1, 0) == pytest.approx(1.0, abs=1e-12)
    # at (0.9, 0.2) the Tsirelson branch beats both local strategies
    tsirelson = 2 - 2 * h(w * 0.9 + (1 - w) * 0.2)
    assert tsirelson > 1 - h(0.9)
    assert qlb_formula(0.9, 0.2) == pytest.approx(tsirelson, abs=1e-12)
    # upper bound at (1, 0): 1 + h(3/5) - h(4/5)/2
    assert qub_formula(1, 0) == pytest.approx(1 + h(3 / 5) - h(4 / 5) / 2, abs=1e-12)
    assert qub_formula(1, 0) == pytest.approx(1.60998654701, abs=1e-10)


def test_formulas_symmetric_and_ordered():
    P, Q = make_grid(41)
    for f in (local_capacity_formula, ns_capacity_formula, qlb_formula, qub_formula):
        np.testing.assert_allclose(f(P, Q), f(Q, P), atol=1e-12)
    cl, cn, clb, cub, _ = hierarchy_arrays(P, Q)
    assert np.all(cl <= clb + 1e-12)
    assert np.all(clb <= cub + 1e-12)
    assert np.all(cub <= cn + 1e-12)


def test_domain_errors():
    with pytest.raises(DomainError):
        local_capacity_formula(1.1, 0)
    with pytest.raises(DomainError):
        make_grid(1)
    with pytest.raises(DomainError):
        capacity_over_set(VertexSet("e", np.zeros((0, 64), np.int64), np.zeros(0, np.int64)),
                          (0.5, 0.5))


def test_local_scan_matches_formula(local_set):
    P, Q = make_grid(31)
    diff = capacity_grid(local_set, P, Q) - local_capacity_formula(P, Q)
    assert np.abs(diff).max() <= 1e-9


def test_rate_table_agrees_with_direct_evaluation(local_set):
    table = rate_table(local_set)
    rates = table.rates(0.3, 0.8)
    direct = [sum_rate(local_set[i], (0.3, 0.8)) for i in range(0, 256, 17)]
    np.testing.assert_allclose(rates[table.inverse[::17]], direct, atol=1e-12)


def test_capacity_argmax_is_lowest_tied_index(local_set):
    res = capacity_over_set(local_set, (1.0, 0.0))
    assert res.value == pytest.approx(1.0)
    assert sum_rate(local_set[res.argmax_vertex], (1.0, 0.0)) == pytest.approx(1.0)
    rates = np.array([sum_rate(b, (1.0, 0.0)) for b in local_set])
    assert res.argmax_vertex == int(np.nonzero(rates >= rates.max() - 1e-12)[0][0])


def test_nine_local_functions(local_set):
    grid = make_grid(101)
    assert len(distinct_sumrate_functions(local_set, grid, drop_dominated=False)) == 9


def test_ns_scan_and_maximizers(union):
    P, Q = make_grid(21)
    assert np.abs(capacity_grid(union, P, Q) - ns_capacity_formula(P, Q)).max() <= 1e-9
    top = find_max_rate_vertices((1.0, 0.0), union)
    assert top == VertexSet.from_behaviors("v", max_rate_vertices())


def test_hierarchy_scan_rows():
    cells = hierarchy_scan(make_grid(5))
    assert len(cells) == 25
    diag = [c for c in cells if c.params.p == c.params.q]
    assert not any(c.in_gray_region for c in diag)
