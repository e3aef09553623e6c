from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from nscap.behavior import Behavior
from nscap.bell import (B4, B4_TILDE, TILDE_RELABELING, BellFunctional, cglmp_b4,
                        cglmp_b4_tilde, event_functional, generate_equivalent_inequalities,
                        nonlocality_measure, table1_report)
from nscap.data import comparison_vertex
from nscap.errors import DomainError
from nscap.relabel import GROUP_ORDER, Relabeling, apply_relabeling, seed_vertex


def b4_by_hand(beh):
    """P(A0<=B0) + P(A0>=B1) + P(A1>=B0) + P(A1<B1) - 3 with explicit loops."""
    total = Fraction(0)
    for a, b in product(range(4), repeat=2):
        total += beh[0, 0, a, b] * (a <= b) + beh[0, 1, a, b] * (a >= b)
        total += beh[1, 0, a, b] * (a >= b) + beh[1, 1, a, b] * (a < b)
    return total - 3


def random_relabelings(n, seed):
    rng = np.random.default_rng(seed)
    return [Relabeling.from_index(int(i)) for i in rng.integers(0, GROUP_ORDER, n)]


def test_b4_matches_hand_evaluation():
    for beh in (comparison_vertex(2), comparison_vertex(3), seed_vertex("quarter"),
                Behavior.uniform()):
        assert cglmp_b4(beh) == b4_by_hand(beh)


def test_local_bound_on_deterministic_points(local_set):
    values = [cglmp_b4(b) for b in local_set]
    assert max(values) == 0
    assert B4.local_bound == 0


def test_tilde_is_the_shifted_functional():
    assert B4.dual(TILDE_RELABELING) == B4_TILDE
    beh = comparison_vertex(3)
    assert cglmp_b4_tilde(beh) == cglmp_b4(apply_relabeling(TILDE_RELABELING, beh))


def test_dual_and_moved_are_covariant():
    beh = comparison_vertex(4)
    for rel in random_relabelings(20, seed=9):
        assert B4.dual(rel)(beh) == B4(apply_relabeling(rel, beh))
        assert B4.moved(rel)(apply_relabeling(rel, beh)) == B4(beh)


def test_functional_needs_normalized_behavior():
    with pytest.raises(DomainError):
        B4(Behavior((Fraction(1, 32),) * 64))
    with pytest.raises(DomainError):
        BellFunctional((1,) * 63)


def test_numeric_evaluation():
    beh = comparison_vertex(3)
    assert B4(beh.to_numeric()) == pytest.approx(float(B4(beh)), abs=1e-12)


def test_event_functional_counts():
    f = event_functional({(0, 0): ("<=", 0, 0)})
    assert sum(f.coefficients) == 10


def test_nonlocality_measure_zero_on_local_mixtures(local_set):
    rng = np.random.default_rng(4)
    for _ in range(20):
        idx = rng.choice(len(local_set), 3, replace=False)
        a, b, c = (local_set[int(i)] for i in idx)
        mix = a.mix(b, Fraction(1, 2)).mix(c, Fraction(3, 5))
        assert nonlocality_measure(mix) == 0
    assert nonlocality_measure(seed_vertex("half")) > 0


def test_orbit_size_and_membership(b4_orbit):
    assert len(b4_orbit) == 1_327_104
    assert B4 in b4_orbit and B4_TILDE in b4_orbit
    for rel in random_relabelings(5, seed=1):
        assert B4.dual(rel) in b4_orbit
    not_member = BellFunctional((1,) * 64, B4.offset, B4.local_bound)
    assert not_member not in b4_orbit


def test_orbit_local_bound_exact(b4_orbit, local_set):
    assert b4_orbit.max_local_violation(local_set) == 0


def test_orbit_values_on_small_set(b4_orbit):
    from nscap.vertexset import VertexSet
    vs = VertexSet.from_behaviors("c", [comparison_vertex(3)])
    first = b4_orbit.values_on(vs)
    assert len(first) == len(b4_orbit)
    assert max(row[0] for row in first) == Fraction(2, 3)


def test_orbit_rejects_fractional_base():
    f = BellFunctional((Fraction(1, 2),) * 64)
    with pytest.raises(DomainError):
        generate_equivalent_inequalities(f)


def test_table_literal_and_orbit_columns(b4_orbit):
    rep = table1_report(orbit=b4_orbit)
    # literal tilde-B4 by hand, e.g. v_1/3: 1 + 1 + 2/3 + 2/3 - 3
    assert [r.nonlocality for r in rep.rows] == [Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)]
    assert [r.max_violation for r in rep.rows] == [Fraction(1, 2), Fraction(2, 3),
                                                   Fraction(3, 4)]
    assert rep.rows[0].sum_rate == pytest.approx(2.0, abs=1e-12)
    assert rep.anti_monotone_max and not rep.anti_monotone
    assert rep.to_csv().splitlines()[0] == "vertex,b4_tilde,b4_orbit_max,sum_rate"
    assert "v_1/3" in rep.to_text()
    assert rep.to_records()[2]["b4_orbit_max"] == "3/4"
