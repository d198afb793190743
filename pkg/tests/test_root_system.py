"""
Root data, Weyl group enumeration and minuscule coweights.

Core claims:
    - Cartan matrices and positive roots match the golden fixture / Bourbaki
    - Simple reflections are involutions and w0 sends ρ∨ to −ρ∨
    - |W| matches the closed formula and enumeration order is by length
    - Each element's matrix agrees with its reduced word
    - |Inv(v)| = ℓ(v) and Σ Inv(v) = ρ − vρ
    - Minuscule classification per type
"""

import math

import numpy as np
import pytest

from src.errors import ConfigurationError, EnumerationCapError
from src.roots.root_system import Coweight, build_root_datum, pair_root_coweight
from src.roots.weyl import (
    dominant_representative,
    inversion_set,
    is_minuscule,
    longest_element,
    minuscule_coweight,
    minuscule_coweights,
    weyl_elements,
    weyl_group_order,
    weyl_orbit,
    weyl_table,
    weyl_vector_defect,
)


# == 1. Construction ========================================================

class TestRootDatum:
    def test_a2_matches_golden_fixture(self, a2, load_fixture):
        assert a2.to_json() == load_fixture("root_datum_A2.json")

    def test_c2_cartan_and_roots(self, c2):
        assert c2.cartan_matrix.tolist() == [[2, -1], [-2, 2]]
        assert c2.positive_roots == ((1, 0), (0, 1), (1, 1), (2, 1))
        assert c2.highest_root() == (2, 1)

    @pytest.mark.parametrize("family,rank,count", [
        ("A", 4, 10), ("B", 3, 9), ("C", 3, 9), ("D", 4, 12), ("E", 6, 36), ("E", 7, 63),
    ])
    def test_positive_root_counts(self, family, rank, count):
        assert len(build_root_datum(family, rank).positive_roots) == count

    @pytest.mark.parametrize("family,rank", [("G", 2), ("D", 3), ("B", 1), ("E", 8)])
    def test_unsupported_types(self, family, rank):
        with pytest.raises(ConfigurationError):
            build_root_datum(family, rank)

    def test_label_with_rank_suffix(self):
        assert build_root_datum("A2", 2).type_label == "A2"
        with pytest.raises(ConfigurationError):
            build_root_datum("A2", 3)

    def test_rho_check_pairs_to_one(self, a3):
        for k in range(3):
            root = tuple(1 if j == k else 0 for j in range(3))
            assert pair_root_coweight(a3, root, a3.rho_check()) == 1

    def test_wrong_rank_coweight(self, a2):
        with pytest.raises(ConfigurationError):
            a2.check_coweight(Coweight((1,)))
        with pytest.raises(ConfigurationError):
            a2.check_node(3)


# == 2. Reflections =========================================================

class TestReflections:
    def test_docstring_example(self, a2):
        assert a2.reflect(1, Coweight((1, 1))) == Coweight((-1, 2))

    @pytest.mark.parametrize("family,rank", [("A", 3), ("B", 3), ("C", 2), ("D", 4)])
    def test_reflection_is_involution(self, family, rank):
        datum = build_root_datum(family, rank)
        mu = Coweight(tuple(range(1, rank + 1)))
        for i in range(1, rank + 1):
            assert datum.reflect(i, datum.reflect(i, mu)) == mu

    def test_coroot_is_negated(self, c2):
        for i in (1, 2):
            assert c2.reflect(i, c2.coroot(i)) == -c2.coroot(i)

    def test_w0_on_fundamental_coweights(self, a2):
        assert a2.w0(Coweight((1, 0))) == Coweight((0, -1))
        assert a2.w0(a2.rho_check()) == -a2.rho_check()

    def test_regularity(self, a2):
        assert a2.is_regular(a2.rho_check())
        assert not a2.is_regular(Coweight((1, 0)))


# == 3. Weyl group ==========================================================

class TestWeylGroup:
    @pytest.mark.parametrize("family,rank,order", [
        ("A", 3, 24), ("B", 3, 48), ("C", 2, 8), ("D", 4, 192), ("E", 6, 51_840),
    ])
    def test_order_formula(self, family, rank, order):
        assert weyl_group_order(build_root_datum(family, rank)) == order

    @pytest.mark.parametrize("family,rank", [("A", 3), ("B", 3), ("C", 2), ("D", 4)])
    def test_enumeration_is_complete_and_length_ordered(self, family, rank):
        datum = build_root_datum(family, rank)
        table = weyl_table(datum)
        assert len(table) == weyl_group_order(datum)
        lengths = [len(w) for w in table.words]
        assert lengths == sorted(lengths)
        assert table.words[0] == ()
        assert len(table.words[-1]) == len(datum.positive_roots)
        assert len({tuple(a.ravel()) for a in table.actions}) == len(table)

    def test_actions_match_words(self, a3):
        mu = Coweight((3, 1, 2))
        for element in weyl_elements(a3):
            point = mu
            for letter in reversed(element.word):
                point = a3.reflect(letter, point)
            assert element.apply(mu) == point

    def test_longest_element_matches_enumeration(self, c2):
        w0 = longest_element(c2)
        assert np.array_equal(w0.action, weyl_table(c2).actions[-1])

    def test_cap(self, a3):
        with pytest.raises(EnumerationCapError):
            weyl_table(a3, cap=10)

    def test_inversion_sets(self, a3):
        for element in weyl_elements(a3):
            inversions = inversion_set(a3, element)
            assert len(inversions) == element.length
            total = tuple(sum(root[j] for root in inversions) for j in range(3))
            assert weyl_vector_defect(a3, element) == total


# == 4. Orbits and minuscule coweights ======================================

class TestOrbits:
    def test_orbit_sizes(self, a2, a3):
        assert len(weyl_orbit(a2, Coweight((1, 0)))) == 3
        assert len(weyl_orbit(a3, Coweight((0, 1, 0)))) == 6
        assert len(weyl_orbit(a2, a2.rho_check())) == 6

    def test_dominant_representative_parity(self, a2):
        mu = a2.reflect(1, a2.reflect(2, a2.rho_check()))
        dominant, count = dominant_representative(a2, mu)
        assert dominant == a2.rho_check()
        assert count % 2 == 0

    @pytest.mark.parametrize("family,rank,indices", [
        ("A", 3, [1, 2, 3]), ("B", 3, [1]), ("C", 3, [3]), ("D", 4, [1, 3, 4]), ("E", 6, [1, 6]), ("E", 7, [7]),
    ])
    def test_minuscule_classification(self, family, rank, indices):
        datum = build_root_datum(family, rank)
        found = minuscule_coweights(datum)
        assert len(found) == len(indices)
        for mu in found:
            assert is_minuscule(datum, mu)

    def test_c2_minuscule_is_second_node(self, c2):
        assert minuscule_coweight(c2, 2) == Coweight((0, 1))
        with pytest.raises(ConfigurationError):
            minuscule_coweight(c2, 1)

    def test_non_minuscule(self, a2):
        assert not is_minuscule(a2, a2.rho_check())
        assert not is_minuscule(a2, a2.zero())

    def test_orbit_size_is_index_of_stabilizer(self, a3):
        size = len(weyl_orbit(a3, Coweight((0, 1, 0))))
        assert size == math.comb(4, 2)
