from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from nscap.behavior import Behavior, is_local_deterministic, is_no_signaling
from nscap.data import comparison_vertex, max_rate_vertex
from nscap.errors import DomainError, StateError
from nscap.relabel import (EXPECTED_SIZES, GROUP_ORDER, ORBIT_KINDS, Relabeling,
                           apply_relabeling, apply_to_vector, cached_set, enumerate_orbit,
                           orbit_rows, seed_vertex)


def random_relabelings(n, seed=0):
    rng = np.random.default_rng(seed)
    return [Relabeling.from_index(int(i)) for i in rng.integers(0, GROUP_ORDER, n)]


def test_group_order():
    assert GROUP_ORDER == 1_327_104


def test_identity():
    rel = Relabeling()
    assert rel.index_map().tolist() == list(range(64))
    beh = comparison_vertex(4)
    assert apply_relabeling(rel, beh) == beh


def test_invalid_permutation_rejected():
    with pytest.raises(DomainError):
        Relabeling((0, 0))
    with pytest.raises(DomainError):
        Relabeling(a_output_perms=((0, 1, 2, 3),))
    with pytest.raises(DomainError):
        Relabeling.from_index(GROUP_ORDER)


def test_index_maps_are_permutations():
    for rel in random_relabelings(50):
        assert sorted(rel.index_map().tolist()) == list(range(64))


def test_inverse_undoes():
    beh = max_rate_vertex(3)
    for rel in random_relabelings(30, seed=1):
        assert apply_relabeling(rel.inverse(), apply_relabeling(rel, beh)) == beh


def test_meaning_of_a_relabeling():
    # swap Alice's inputs and send her outcome a -> (a + 1) mod 4 on old input 0
    shift = (1, 2, 3, 0)
    rel = Relabeling((1, 0), (shift, (0, 1, 2, 3)))
    beh = comparison_vertex(3)
    out = apply_relabeling(rel, beh)
    for x, y, a, b in product(range(2), range(2), range(4), range(4)):
        a_new = shift[a] if x == 0 else a
        assert out[1 - x, y, a_new, b] == beh[x, y, a, b]


def test_no_signaling_and_locality_preserved():
    ns = [seed_vertex(k) for k in ("half", "third", "quarter")]
    loc = seed_vertex("local")
    for rel in random_relabelings(40, seed=2):
        for beh in ns:
            assert is_no_signaling(apply_relabeling(rel, beh))
        assert is_local_deterministic(apply_relabeling(rel, loc))


def test_apply_to_vector_moves_any_payload():
    rel = random_relabelings(1, seed=4)[0]
    labels = list(range(64))
    moved = apply_to_vector(rel, labels)
    m = rel.index_map()
    assert all(moved[m[i]] == i for i in range(64))


def test_small_orbit_matches_naive_closure():
    # orbit of the deterministic point by breadth-first closure under generators
    seed = seed_vertex("local")
    gens = [Relabeling((1, 0)), Relabeling(b_input_perm=(1, 0)),
            Relabeling(a_output_perms=((1, 0, 2, 3), (0, 1, 2, 3))),
            Relabeling(a_output_perms=((1, 2, 3, 0), (0, 1, 2, 3))),
            Relabeling(b_output_perms=((1, 0, 2, 3), (0, 1, 2, 3))),
            Relabeling(b_output_perms=((1, 2, 3, 0), (0, 1, 2, 3)))]
    seen = {seed}
    frontier = [seed]
    while frontier:
        nxt = []
        for beh in frontier:
            for g in gens:
                img = apply_relabeling(g, beh)
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    vs = enumerate_orbit(seed, "local")
    assert len(vs) == len(seen) == 256
    assert set(vs) == seen


def test_orbit_rows_deterministic():
    num, _ = seed_vertex("local").integer_form()
    a, b = orbit_rows(num), orbit_rows(num)
    np.testing.assert_array_equal(a, b)


def test_seed_kinds():
    with pytest.raises(DomainError):
        seed_vertex("fifth")
    for kind, k in (("half", 2), ("third", 3), ("quarter", 4)):
        s = seed_vertex(kind)
        assert is_no_signaling(s)
        assert max(s.entries) == Fraction(1, k)


def test_orbit_sizes_and_validity(orbits):
    for kind in ORBIT_KINDS:
        vs = orbits[kind]
        assert len(vs) == EXPECTED_SIZES[kind]
        vs.validate()


def test_union_is_disjoint(orbits, union):
    assert len(union) == sum(len(orbits[k]) for k in ORBIT_KINDS) == EXPECTED_SIZES["ns-union"]


def test_published_vertices_in_orbits(orbits):
    for k in range(1, 9):
        assert max_rate_vertex(k) in orbits["half"]
    assert comparison_vertex(2) in orbits["half"]
    assert comparison_vertex(3) in orbits["third"]
    assert comparison_vertex(4) in orbits["quarter"]


def test_cached_set_errors_name_the_command(tmp_path):
    with pytest.raises(StateError, match="nscap vertices all"):
        cached_set("half", tmp_path)


def test_local_orbit_is_all_deterministic_points(orbits):
    det = {Behavior.from_function(
        lambda x, y, a, b, fa=fa, fb=fb: 1 if a == fa[x] and b == fb[y] else 0)
        for fa in product(range(4), repeat=2) for fb in product(range(4), repeat=2)}
    assert set(orbits["local"]) == det
