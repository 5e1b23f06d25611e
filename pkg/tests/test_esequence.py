"""E-sequences: axioms, realization, forests, terminal data, reconstruction."""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from phyloquiver import (
    ESequence,
    InputError,
    PrecRelation,
    build_forest,
    esequence_isomorphic,
    evolutionary_sequence,
    forest_distance,
    induce_prec,
    realize_esequence,
    reconstruct,
    terminal_ultrametric,
    universal_evolution,
    validate_esequence,
    validate_prec,
    validate_space,
)
from phyloquiver.generators import (
    gen_g3,
    gen_map_quiver,
    gen_random_esequence,
    gen_random_phylogenetic,
    gen_rooted_tree_quiver,
    gen_surjection_quiver,
)


@pytest.fixture
def two_fiber():
    """P0 = {r}, P1 = {a, b} with a < b, P2 = {a1, a2, b1}."""
    return ESequence.build(
        [["r"], ["a", "b"], ["a1", "a2", "b1"]],
        {"a": "r", "b": "r", "a1": "a", "a2": "a", "b1": "b"},
        [("a", "b")],
    )


class TestESequenceType:
    def test_structural_checks(self):
        with pytest.raises(InputError, match="duplicate"):
            ESequence.build([["a"], ["a"]], {"a": "a"})
        with pytest.raises(InputError, match="cover"):
            ESequence.build([["r"], ["x"]], {})
        with pytest.raises(InputError, match="one level below"):
            ESequence.build([["r"], ["x"], ["y"]], {"x": "r", "y": "r"})
        with pytest.raises(InputError, match="crosses levels"):
            ESequence.build([["r"], ["x"]], {"x": "r"}, [("r", "x")])

    def test_validate_flags_order_on_level_zero(self):
        seq = ESequence.build([["r", "s"]], {}, [("r", "s")])
        assert validate_esequence(seq) == [
            "order on level 0 must be trivial: 'r' < 's'"
        ]

    def test_validate_flags_parent_mismatch(self):
        seq = ESequence.build(
            [["r", "s"], ["x", "y"]], {"x": "r", "y": "s"}, [("x", "y")]
        )
        violations = validate_esequence(seq)
        assert len(violations) == 1 and "parents differ" in violations[0]

    def test_validate_flags_broken_order_axioms(self):
        base = [["r"], ["x", "y", "z"]]
        parent = {"x": "r", "y": "r", "z": "r"}
        refl = ESequence.build(base, parent, [("x", "x")])
        assert any("irreflexive" in v for v in validate_esequence(refl))
        sym = ESequence.build(base, parent, [("x", "y"), ("y", "x")])
        assert any("antisymmetric" in v for v in validate_esequence(sym))
        open_chain = ESequence.build(base, parent, [("x", "y"), ("y", "z")])
        assert any("transitive" in v for v in validate_esequence(open_chain))

    def test_generated_sequences_are_lawful(self):
        for s in range(30):
            seq = gen_random_esequence(1 + s % 5, 5, 0.4, seed=s)
            assert validate_esequence(seq) == []


class TestEvolutionarySequence:
    def test_surjection_quiver(self):
        seq = evolutionary_sequence(gen_surjection_quiver(5))
        assert seq.levels == (("1",), ("2", "3", "4", "5"))
        assert seq.parent == {k: "1" for k in ("2", "3", "4", "5")}
        assert seq.order == frozenset(
            (str(j), str(k)) for j in range(2, 6) for k in range(j + 1, 6)
        )

    def test_map_quiver_single_point(self):
        seq = evolutionary_sequence(gen_map_quiver(4))
        assert seq.levels == (("1",),)
        assert not seq.order and not seq.parent

    def test_single_vertex_quiver(self):
        from phyloquiver import Quiver

        seq = evolutionary_sequence(Quiver.build(["x"], []))
        assert seq.levels == (("x",),)

    def test_rejects_non_phylogenetic(self):
        with pytest.raises(InputError, match="phylogenetic"):
            evolutionary_sequence(gen_g3())

    def test_is_always_an_esequence(self):
        for s in range(40):
            q = gen_random_phylogenetic(3 + s % 7, 0.3, seed=s)
            assert validate_esequence(evolutionary_sequence(q)) == []


class TestRealization:
    def test_chain(self):
        seq = ESequence.build([["r"], ["a"]], {"a": "r"})
        q = realize_esequence(seq)
        assert q.vertices == ("r", "a")
        assert q.edges == (("a", "r"),)

    def test_rejects_invalid(self):
        bad = ESequence.build([["r", "s"]], {}, [("r", "s")])
        with pytest.raises(InputError, match="not an E-sequence"):
            realize_esequence(bad)

    def test_universal_evolution_is_the_parent_chain(self, two_fiber):
        q = realize_esequence(two_fiber)
        assert universal_evolution(q, "a1").vertices == ("r", "a", "a1")
        assert universal_evolution(q, "b1").vertices == ("r", "b", "b1")

    def test_round_trip_surjection_quiver(self):
        seq = evolutionary_sequence(gen_surjection_quiver(5))
        again = evolutionary_sequence(realize_esequence(seq))
        assert esequence_isomorphic(seq, again)

    def test_round_trip_random(self):
        for s in range(40):
            seq = gen_random_esequence(1 + s % 5, 5, 0.4, seed=s)
            q = realize_esequence(seq)
            assert esequence_isomorphic(evolutionary_sequence(q), seq)


class TestForest:
    def test_distance_zero(self, two_fiber):
        f = build_forest(two_fiber)
        assert forest_distance(f, "a1", "a1") == 0

    def test_worked_fixture(self, two_fiber):
        f = build_forest(two_fiber)
        assert forest_distance(f, "a1", "a2") == 2
        assert forest_distance(f, "a1", "b1") == 4
        assert forest_distance(f, "a", "b1") == 3

    def test_siblings(self, two_fiber):
        f = build_forest(two_fiber)
        assert forest_distance(f, "a", "b") == 2

    def test_separate_trees_unreachable(self):
        seq = ESequence.build([["r", "s"], ["x", "y"]], {"x": "r", "y": "s"})
        f = build_forest(seq)
        assert forest_distance(f, "x", "y") is None
        assert forest_distance(f, "x", "r") == 1

    def test_unknown_label(self, two_fiber):
        with pytest.raises(InputError):
            forest_distance(build_forest(two_fiber), "a1", "zz")

    def test_every_component_has_one_root(self):
        for s in range(25):
            seq = gen_random_esequence(1 + s % 5, 4, 0.3, seed=s)
            f = build_forest(seq)
            for x in f.labels():
                chain = f.chain(x)
                assert chain[-1] in f.roots
                assert sum(1 for y in chain if y in f.roots) == 1

    def test_rooted_tree_forest_is_the_tree(self):
        # singleton isotypy classes and unique parents: the forest of a
        # rooted tree quiver is that tree again
        tree_edges = [("r", "x"), ("x", "y"), ("r", "z")]
        q = gen_rooted_tree_quiver(tree_edges, "r")
        f = build_forest(evolutionary_sequence(q))
        assert f.roots == ("r",)
        assert f.parent == {"x": "r", "y": "x", "z": "r"}

    def test_level_restriction_is_ultrametric(self):
        for s in range(25):
            seq = gen_random_esequence(2 + s % 4, 5, 0.3, seed=s, single_root=True)
            f = build_forest(seq)
            for level in seq.levels:
                rows = [
                    [Fraction(forest_distance(f, a, b)) for b in level]
                    for a in level
                ]
                assert validate_space(level, rows).is_ultrametric


class TestTerminalUltrametric:
    def test_worked_fixture(self, two_fiber):
        sp = terminal_ultrametric(two_fiber, 2)
        assert sp.distance("a1", "a2") == 1
        assert sp.distance("a1", "b1") == 2
        assert sp.is_ultrametric

    def test_half_of_forest_distance(self):
        for s in range(20):
            seq = gen_random_esequence(
                2 + s % 4, 5, 0.3, seed=s, single_root=True, surjective=True
            )
            n = seq.top
            sp = terminal_ultrametric(seq, n)
            f = build_forest(seq)
            for a in seq.levels[n]:
                for b in seq.levels[n]:
                    assert 2 * sp.distance(a, b) == forest_distance(f, a, b)

    def test_one_leaf_level(self):
        seq = ESequence.build([["r"], ["x"]], {"x": "r"})
        sp = terminal_ultrametric(seq, 1)
        assert sp.points == ("x",)

    def test_rejects_multiple_roots(self):
        seq = ESequence.build([["r", "s"], ["x", "y"]], {"x": "r", "y": "s"})
        with pytest.raises(InputError, match="card"):
            terminal_ultrametric(seq, 1)

    def test_rejects_non_surjective(self):
        seq = ESequence.build(
            [["r"], ["a", "b"], ["c"]], {"a": "r", "b": "r", "c": "a"}
        )
        with pytest.raises(InputError, match="surjective"):
            terminal_ultrametric(seq, 2)


class TestPrec:
    def test_empty_orders_give_empty_prec(self):
        seq = ESequence.build(
            [["r"], ["a", "b"], ["a1", "b1"]],
            {"a": "r", "b": "r", "a1": "a", "b1": "b"},
        )
        assert induce_prec(seq, 2).pairs == frozenset()

    def test_worked_fixture(self, two_fiber):
        prec = induce_prec(two_fiber, 2)
        assert prec.pairs == {("a1", "b1"), ("a2", "b1")}

    def test_induced_relation_is_asymmetric_and_lawful(self):
        for s in range(25):
            seq = gen_random_esequence(
                2 + s % 4, 5, 0.5, seed=s, single_root=True, surjective=True
            )
            n = seq.top
            prec = induce_prec(seq, n)
            for a, b in prec.pairs:
                assert (b, a) not in prec.pairs
            assert validate_prec(terminal_ultrametric(seq, n), prec, n) == []

    def test_validate_prec_counterexamples(self, two_fiber):
        sp = terminal_ultrametric(two_fiber, 2)
        sym = PrecRelation.build([("a1", "b1"), ("b1", "a1")])
        assert any("asymmetric" in v for v in validate_prec(sp, sym))
        # distances exceed the declared number of levels
        assert any(
            "outside" in v
            for v in validate_prec(sp, PrecRelation.build(()), n=1)
        )
        with pytest.raises(InputError, match="ultrametric"):
            validate_prec(
                __import__("phyloquiver").FiniteMetricSpace.build(
                    ["x", "y", "z"], [[0, 3, 4], [3, 0, 5], [4, 5, 0]]
                ),
                PrecRelation.build(()),
            )

    def test_validate_prec_ball_compatibility_rules(self, two_fiber):
        sp = terminal_ultrametric(two_fiber, 2)
        # a1 prec b1 without a2 prec b1 breaks rule (iii): rho(a1, a2) = 1
        # is below rho(a1, b1) = 2
        partial = PrecRelation.build([("a1", "b1")])
        assert any("prec" in v for v in validate_prec(sp, partial, 2))


class TestReconstruction:
    def test_worked_fixture_round_trip(self, two_fiber):
        sp = terminal_ultrametric(two_fiber, 2)
        prec = induce_prec(two_fiber, 2)
        rebuilt = reconstruct(sp, prec, 2)
        assert validate_esequence(rebuilt) == []
        assert esequence_isomorphic(rebuilt, two_fiber)

    def test_single_point_degenerate_chain(self):
        from phyloquiver import FiniteMetricSpace

        sp = FiniteMetricSpace.single("x")
        rebuilt = reconstruct(sp, PrecRelation.build(()), 3)
        assert [len(level) for level in rebuilt.levels] == [1, 1, 1, 1]

    def test_two_points_empty_prec(self):
        from phyloquiver import FiniteMetricSpace

        sp = FiniteMetricSpace.build(["x", "y"], [[0, 1], [1, 0]])
        rebuilt = reconstruct(sp, PrecRelation.build(()), 1)
        assert [len(level) for level in rebuilt.levels] == [1, 2]
        assert not rebuilt.order

    def test_rejects_non_integer_distances(self):
        from phyloquiver import FiniteMetricSpace

        sp = FiniteMetricSpace.build(
            ["x", "y"], [[0, Fraction(1, 2)], [Fraction(1, 2), 0]]
        )
        with pytest.raises(InputError, match="integer"):
            reconstruct(sp, PrecRelation.build(()), 1)

    def test_rejects_unlawful_prec(self, two_fiber):
        sp = terminal_ultrametric(two_fiber, 2)
        with pytest.raises(InputError, match="lawful"):
            reconstruct(sp, PrecRelation.build([("a1", "b1")]), 2)

    def test_random_round_trips(self):
        for s in range(40):
            seq = gen_random_esequence(
                1 + s % 5, 5, 0.4, seed=s, single_root=True, surjective=True
            )
            n = seq.top
            rebuilt = reconstruct(
                terminal_ultrametric(seq, n), induce_prec(seq, n), n
            )
            assert esequence_isomorphic(rebuilt, seq)


class TestIsomorphism:
    def test_identity_and_relabeling(self, two_fiber):
        assert esequence_isomorphic(two_fiber, two_fiber)
        relabeled = ESequence.build(
            [["R"], ["B", "A"], ["B1", "A2", "A1"]],
            {"A": "R", "B": "R", "A1": "A", "A2": "A", "B1": "B"},
            [("A", "B")],
        )
        assert esequence_isomorphic(two_fiber, relabeled)

    def test_distinguishes_orders(self, two_fiber):
        unordered = ESequence.build(
            [["r"], ["a", "b"], ["a1", "a2", "b1"]],
            {"a": "r", "b": "r", "a1": "a", "a2": "a", "b1": "b"},
        )
        assert not esequence_isomorphic(two_fiber, unordered)

    def test_distinguishes_shapes(self, two_fiber):
        other = ESequence.build(
            [["r"], ["a", "b"], ["a1", "b1", "b2"]],
            {"a": "r", "b": "r", "a1": "a", "b1": "b", "b2": "b"},
            [("a", "b")],
        )
        assert not esequence_isomorphic(two_fiber, other)

    def test_level_count_and_sizes(self):
        one = ESequence.build([["r"]], {})
        two = ESequence.build([["r"], ["x"]], {"x": "r"})
        assert not esequence_isomorphic(one, two)

    def test_compares_transitive_closures(self):
        base = [["r"], ["x", "y", "z"]]
        parent = {"x": "r", "y": "r", "z": "r"}
        closed = ESequence.build(
            base, parent, [("x", "y"), ("y", "z"), ("x", "z")]
        )
        open_chain = ESequence.build(base, parent, [("x", "y"), ("y", "z")])
        assert esequence_isomorphic(closed, open_chain)

    def test_matches_brute_force_search(self):
        def brute_iso(e1, e2):
            if [len(l) for l in e1.levels] != [len(l) for l in e2.levels]:
                return False
            o1, o2 = e1.closed_order(), e2.closed_order()
            per_level = [
                itertools.permutations(l2) for l2 in e2.levels
            ]
            for choice in itertools.product(*per_level):
                f = {
                    x: y
                    for l1, l2 in zip(e1.levels, choice)
                    for x, y in zip(l1, l2)
                }
                ok = all(
                    f[e1.parent[x]] == e2.parent[f[x]] for x in e1.parent
                ) and all(
                    ((x, y) in o1) == ((f[x], f[y]) in o2)
                    for level in e1.levels
                    for x in level
                    for y in level
                    if x != y
                )
                if ok:
                    return True
            return False

        for s in range(30):
            e1 = gen_random_esequence(1 + s % 3, 4, 0.5, seed=s)
            e2 = gen_random_esequence(1 + (s + 1) % 3, 4, 0.5, seed=s + 100)
            assert esequence_isomorphic(e1, e2) == brute_iso(e1, e2)
            assert esequence_isomorphic(e1, e1)
