import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nscap.behavior import Behavior
from nscap.channel import (ChannelParams, binary_entropy, channel_conditional, compose,
                           is_incompatible, marginal_signature, sum_rate, sum_rates)
from nscap.data import comparison_vertex, max_rate_vertex
from nscap.errors import DomainError
from nscap.relabel import seed_vertex


def rate_by_hand(entries, p, q):
    """Sum rate from the channel law with plain loops (independent oracle)."""
    def h(t):
        return 0.0 if t <= 0 or t >= 1 else -t * math.log2(t) - (1 - t) * math.log2(1 - t)

    y1 = [[0.0, 0.0], [0.0, 0.0]]
    y2 = [[0.0, 0.0], [0.0, 0.0]]
    for m1, m2, a, b in product(range(2), range(2), range(4), range(4)):
        w = float(entries[32 * m1 + 16 * m2 + 4 * a + b])
        x11, x12, x21, x22 = a >> 1, a & 1, b >> 1, b & 1
        keep = p if (x12 ^ x22) == (x11 & x21) else q
        # (y1, y2) = (x11, x21) with prob keep, both flipped otherwise
        y1[m1][m2] += w * (keep * x11 + (1 - keep) * (1 - x11))
        y2[m1][m2] += w * (keep * x21 + (1 - keep) * (1 - x21))
    u1 = [(y1[m][0] + y1[m][1]) / 2 for m in range(2)]
    u2 = [(y2[0][m] + y2[1][m]) / 2 for m in range(2)]
    r1 = h(sum(u1) / 2) - (h(u1[0]) + h(u1[1])) / 2
    r2 = h(sum(u2) / 2) - (h(u2[0]) + h(u2[1])) / 2
    return r1 + r2


def test_params_validated():
    with pytest.raises(DomainError):
        ChannelParams(1.2, 0)
    assert ChannelParams(0.3, 0.4).incompatible
    assert not ChannelParams(0.3, 0.3).incompatible


def test_binary_entropy():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == binary_entropy(1.0) == 0.0
    np.testing.assert_allclose(binary_entropy(np.array([0.25, 0.75])), 0.8112781244591328)
    with pytest.raises(DomainError):
        binary_entropy(1.5)


def test_channel_conditional_is_distribution():
    for bits in product(range(2), repeat=4):
        d = channel_conditional((0.3, 0.8), *bits)
        assert d.sum() == pytest.approx(1.0)
        assert np.all(d >= 0)
    with pytest.raises(DomainError):
        channel_conditional((0.3, 0.8), 2, 0, 0, 0)


def test_incompatibility_iff_p_differs_from_q():
    assert is_incompatible((0.2, 0.7))
    assert not is_incompatible((0.4, 0.4))


def test_compose_rows_sum_to_one():
    c = compose(comparison_vertex(4), (0.1, 0.6))
    np.testing.assert_allclose(c.table.sum(axis=(2, 3)), 1.0)


@pytest.mark.parametrize("beh", [max_rate_vertex(1), comparison_vertex(3), seed_vertex("local"),
                                 Behavior.uniform()])
@pytest.mark.parametrize("pq", [(1, 0), (0, 1), (0.3, 0.7), (0.5, 0.5), (0.91, 0.13)])
def test_sum_rate_matches_oracle(beh, pq):
    expected = rate_by_hand(beh.entries, *pq)
    assert sum_rate(beh, pq) == pytest.approx(expected, abs=1e-12)
    assert sum_rates(beh.to_array()[None], pq)[0] == pytest.approx(expected, abs=1e-12)
    assert marginal_signature(beh).sum_rate(*pq) == pytest.approx(expected, abs=1e-12)


def test_known_values():
    assert sum_rate(max_rate_vertex(1), (1, 0)) == pytest.approx(2.0, abs=1e-12)
    assert sum_rate(Behavior.uniform(), (1, 0)) == pytest.approx(0.0, abs=1e-12)
    # v_1/3: 1 + h(1/3) - h(2/3)/2 in closed form
    h3 = binary_entropy(1 / 3)
    assert sum_rate(comparison_vertex(3), (1, 0)) == pytest.approx(1 + h3 - h3 / 2, abs=1e-12)


def test_signature_needs_exact_behavior():
    with pytest.raises(DomainError):
        marginal_signature(Behavior.uniform().to_numeric())


SEEDS = [max_rate_vertex(k) for k in (1, 4, 7)] + [comparison_vertex(k) for k in (2, 3, 4)] + [
    seed_vertex("local")]


@settings(max_examples=60, deadline=None)
@given(i=st.integers(0, len(SEEDS) - 1), j=st.integers(0, len(SEEDS) - 1),
       lam=st.fractions(0, 1, max_denominator=50),
       p=st.floats(0, 1), q=st.floats(0, 1))
def test_sum_rate_convex_in_encoding(i, j, lam, p, q):
    a, b = SEEDS[i], SEEDS[j]
    mixed = a.mix(b, lam)
    lhs = sum_rate(mixed, (p, q))
    rhs = float(lam) * sum_rate(a, (p, q)) + (1 - float(lam)) * sum_rate(b, (p, q))
    assert lhs <= rhs + 1e-12


def test_signature_keys_equal_for_equal_functions():
    a, b = max_rate_vertex(1), max_rate_vertex(2)
    same = marginal_signature(a).rate_key() == marginal_signature(b).rate_key()
    grid = [(p, q) for p in np.linspace(0, 1, 7) for q in np.linspace(0, 1, 7)]
    equal_values = all(abs(sum_rate(a, g) - sum_rate(b, g)) < 1e-12 for g in grid)
    assert not same or equal_values
    assert marginal_signature(a).rate_key()[0][0][0] == Fraction(
        marginal_signature(a).rate_key()[0][0][0])
