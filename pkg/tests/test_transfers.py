"""
Tests for functors, quasiorders, the dagger / star encoding and hypergraph tools
"""
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from category import hom_maps
from errors import InputError
from structures import Kind, hypergraph, is_oriented_graph, ordered_graph, relational, tournament, validate
from transfers import (
    compress_signature,
    dagger,
    disjoint_union,
    encoding_signature,
    enumerate_total_quasiorders,
    forb_contains,
    graph_digraph_iso,
    graph_tournament_iso,
    is_irreducible,
    mat,
    ogra_forbidden,
    polymer,
    quasiorder_from_code,
    reduct,
    star,
    tp,
    tup,
)
from diagram_transfer import enumerate_edigs


def all_graphs(n):
    pairs = list(combinations(range(n), 2))
    for keep in product([False, True], repeat=len(pairs)):
        yield ordered_graph(n, [p for p, k in zip(pairs, keep) if k])


def all_tournaments(n):
    pairs = list(combinations(range(n), 2))
    for flips in product([False, True], repeat=len(pairs)):
        yield tournament(n, [(y, x) if f else (x, y) for (x, y), f in zip(pairs, flips)])


def all_binary(n):
    cells = list(product(range(n), repeat=2))
    for keep in product([False, True], repeat=len(cells)):
        yield relational(n, (2,), [[c for c, k in zip(cells, keep) if k]])


def brute_force_quasiorders(r):
    """Every binary relation on 1..r that is reflexive, transitive and total."""
    cells = list(product(range(1, r + 1), repeat=2))
    out = set()
    for keep in product([False, True], repeat=len(cells)):
        rel = {c for c, k in zip(cells, keep) if k}
        if any((i, i) not in rel for i in range(1, r + 1)):
            continue
        if any((i, j) not in rel and (j, i) not in rel for i, j in cells):
            continue
        if any((i, k) not in rel for i, j in rel for j2, k in rel if j == j2):
            continue
        out.add(frozenset(rel))
    return out


class TestGraphDigraphIso:
    def test_edge_becomes_arc(self, k2):
        d = graph_digraph_iso("to_digraph", k2)
        assert d.kind == Kind.REFLEXIVE_DIGRAPH_LE
        assert d.relations[0] == {(0, 0), (1, 1), (0, 1)}

    def test_edgeless_gives_loops(self):
        assert graph_digraph_iso("to_digraph", ordered_graph(2, [])).relations[0] == {(0, 0), (1, 1)}

    def test_round_trips(self):
        graphs = list(all_graphs(4))
        assert len(graphs) == 64
        for g in graphs:
            d = graph_digraph_iso("to_digraph", g)
            assert validate(d).ok
            assert graph_digraph_iso("to_graph", d) == g
        for d in enumerate_edigs(4):
            assert graph_digraph_iso("to_digraph", graph_digraph_iso("to_graph", d)) == d

    def test_hom_sets_preserved(self):
        graphs = [g for n in range(4) for g in all_graphs(n)]
        for a in graphs:
            for b in graphs:
                fa, fb = graph_digraph_iso("to_digraph", a), graph_digraph_iso("to_digraph", b)
                assert hom_maps(a, b) == hom_maps(fa, fb)

    def test_wrong_kind(self, k2):
        with pytest.raises(InputError):
            graph_digraph_iso("to_graph", k2)

    def test_unknown_direction(self, k2):
        with pytest.raises(InputError):
            graph_digraph_iso("sideways", k2)


class TestGraphTournamentIso:
    def test_edge_points_forward(self, k2):
        assert graph_tournament_iso("to_tournament", k2).relations[0] == {(0, 1)}

    def test_non_edge_points_backward(self):
        assert graph_tournament_iso("to_tournament", ordered_graph(2, [])).relations[0] == {(1, 0)}

    def test_round_trips(self):
        for n in range(5):
            for g in all_graphs(n):
                t = graph_tournament_iso("to_tournament", g)
                assert validate(t).ok
                assert graph_tournament_iso("to_graph", t) == g
            for t in all_tournaments(n):
                assert graph_tournament_iso("to_tournament", graph_tournament_iso("to_graph", t)) == t

    def test_hom_sets_preserved(self):
        graphs = [g for n in range(4) for g in all_graphs(n)]
        for a in graphs:
            for b in graphs:
                ta, tb = graph_tournament_iso("to_tournament", a), graph_tournament_iso("to_tournament", b)
                assert len(hom_maps(a, b)) == len(hom_maps(ta, tb))

    def test_wrong_kind(self, two_chain_poset):
        with pytest.raises(InputError):
            graph_tournament_iso("to_tournament", two_chain_poset)


class TestQuasiorders:
    """tp, mat, tup and enumeration."""

    def test_tp_of_five_three_five(self):
        sigma = tp((5, 3, 5))
        assert sigma.pairs == {(1, 1), (2, 2), (3, 3), (1, 3), (3, 1), (2, 1), (2, 3)}
        assert sigma.classes == ((2,), (1, 3))

    def test_tp_constant(self):
        assert tp((4, 4)).pairs == {(1, 1), (1, 2), (2, 1), (2, 2)}

    def test_tp_increasing(self):
        assert tp((1, 6)).pairs == {(1, 1), (2, 2), (1, 2)}

    def test_tp_empty(self):
        with pytest.raises(InputError):
            tp(())

    def test_mat(self):
        assert mat((5, 3, 5)) == (3, 5)
        assert mat((7,)) == (7,)
        assert mat((2, 2, 2)) == (2,)
        with pytest.raises(InputError):
            mat(())

    def test_tup(self):
        assert tup(tp((5, 3, 5)), (3, 5)) == (5, 3, 5)
        assert tup(tp((0,)), (9,)) == (9,)
        assert tup(tp((1, 1)), (9,)) == (9, 9)

    def test_tup_size_mismatch(self):
        with pytest.raises(InputError):
            tup(tp((1, 2)), (4,))

    def test_tup_after_tp_mat(self):
        for length in range(1, 5):
            for values in product(range(4), repeat=length):
                assert tup(tp(values), mat(values)) == values

    def test_tp_mat_after_tup(self):
        for r in range(1, 5):
            for sigma in enumerate_total_quasiorders(r):
                for mu in combinations(range(4), sigma.class_count):
                    rebuilt = tup(sigma, mu)
                    assert tp(rebuilt) == sigma
                    assert mat(rebuilt) == mu

    def test_counts(self):
        assert [len(enumerate_total_quasiorders(r)) for r in range(1, 5)] == [1, 3, 13, 75]

    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_matches_brute_force(self, r):
        assert {sigma.pairs for sigma in enumerate_total_quasiorders(r)} == brute_force_quasiorders(r)

    def test_deterministic_order(self):
        codes = [sigma.code for sigma in enumerate_total_quasiorders(2)]
        assert codes == ["00:0", "01:01", "01:10"]
        keys = [sigma.sort_key() for sigma in enumerate_total_quasiorders(3)]
        assert keys == sorted(keys)

    def test_code_round_trip(self):
        for sigma in enumerate_total_quasiorders(4):
            assert quasiorder_from_code(sigma.code) == sigma

    def test_arity_cap(self):
        with pytest.raises(InputError):
            enumerate_total_quasiorders(5)
        assert len(enumerate_total_quasiorders(5, cap=5)) == 541

    def test_arity_zero(self):
        with pytest.raises(InputError):
            enumerate_total_quasiorders(0)


class TestDaggerStar:
    """The relational / hypergraph encoding."""

    def test_signature(self):
        sig = encoding_signature([2])
        assert sig.arities == (1, 2, 2)
        assert sig.to_list() == [{"rel": 0, "sigma": "00:0"}, {"rel": 0, "sigma": "01:01"}, {"rel": 0, "sigma": "01:10"}]

    def test_single_increasing_pair(self, binary_relation):
        h = dagger(binary_relation(2, [(0, 1)]))
        assert h.family("0@01:01") == {(0, 1)}
        assert h.family("0@01:10") == frozenset()
        assert h.family("0@00:0") == frozenset()

    def test_loop(self, binary_relation):
        h = dagger(binary_relation(1, [(0, 0)]))
        assert h.family("0@00:0") == {(0,)}

    def test_empty_relation(self, binary_relation):
        h = dagger(binary_relation(3, []))
        assert all(not fam for fam in h.relations)
        assert validate(h).ok

    def test_star_of_empty_hypergraph(self):
        assert star(hypergraph(0, [], [])) == relational(0, (), [])

    def test_star_dagger_identity(self):
        for n in range(4):
            for a in all_binary(n):
                assert star(dagger(a)) == a

    def test_dagger_star_identity(self):
        sig = encoding_signature([2])
        for n in range(3):
            options = [
                [e for e in combinations(range(n), arity)] for arity in sig.arities
            ]
            for choice in product(*[product([False, True], repeat=len(opt)) for opt in options]):
                families = [[e for e, k in zip(opt, keep) if k] for opt, keep in zip(options, choice)]
                b = hypergraph(n, sig.arities, families, sig.labels)
                assert dagger(star(b)) == b

    def test_star_rejects_foreign_labels(self):
        with pytest.raises(InputError):
            star(hypergraph(2, [2], [[(0, 1)]], ["E"]))

    def test_star_edge_size_mismatch(self):
        sig = encoding_signature([2])
        # arities do not match the encoding labels
        b = hypergraph(2, (2, 2, 2), [[(0, 1)], [], []], sig.labels)
        with pytest.raises(InputError):
            star(b)

    def test_embeddings_preserved(self):
        structures = [a for n in range(3) for a in all_binary(n)]
        for a in structures:
            for b in structures:
                assert hom_maps(a, b) == hom_maps(dagger(a), dagger(b))

    @settings(max_examples=40)
    @given(st.sets(st.tuples(st.integers(0, 2), st.integers(0, 2))),
           st.sets(st.tuples(st.integers(0, 2), st.integers(0, 2))))
    def test_embeddings_preserved_three_points(self, r1, r2):
        a = relational(3, (2,), [r1])
        b = relational(3, (2,), [r2])
        assert hom_maps(a, b) == hom_maps(dagger(a), dagger(b))

    def test_arity_above_cap(self):
        a = relational(2, (5,), [[]])
        with pytest.raises(InputError):
            dagger(a)


class TestIrreducibleAndForb:
    def test_two_cycle_irreducible(self):
        _, f2 = ogra_forbidden()
        assert is_irreducible(f2)

    def test_edgeless_reducible(self, binary_relation):
        assert not is_irreducible(binary_relation(2, []))

    def test_single_vertex(self, binary_relation):
        assert is_irreducible(binary_relation(1, []))

    def test_hypergraph_case(self):
        assert is_irreducible(hypergraph(3, [3], [[(0, 1, 2)]]))
        assert not is_irreducible(hypergraph(3, [2], [[(0, 1), (1, 2)]]))

    def test_irreducibility_survives_dagger(self):
        for n in range(4):
            for a in all_binary(n):
                if is_irreducible(a):
                    assert is_irreducible(dagger(a))

    def test_loop_not_in_ogra(self, binary_relation):
        assert not forb_contains(binary_relation(2, [(0, 0), (0, 1)]), ogra_forbidden())

    def test_forbidden_structure_itself(self):
        f1, _ = ogra_forbidden()
        assert not forb_contains(f1, ogra_forbidden())

    def test_empty_structure(self, binary_relation):
        assert forb_contains(binary_relation(0, []), ogra_forbidden())

    def test_forb_is_oriented_graphs(self):
        for n in range(4):
            for a in all_binary(n):
                assert forb_contains(a, ogra_forbidden()) == is_oriented_graph(a)

    def test_kind_mismatch(self, k2):
        with pytest.raises(InputError):
            forb_contains(k2, ogra_forbidden())


class TestHypergraphTools:
    """reduct, polymer, disjoint union, compression."""

    @pytest.fixture
    def h(self):
        return hypergraph(3, [2, 3], [[(0, 1)], [(0, 1, 2)]], ["a", "b"])

    def test_reduct_all(self, h):
        assert reduct(h, ["a", "b"]) == h

    def test_reduct_none(self, h):
        r = reduct(h, [])
        assert r.n == 3 and r.signature == () and r.relations == ()

    def test_reduct_unknown(self, h):
        with pytest.raises(InputError):
            reduct(h, ["z"])

    def test_reduct_preserves_embeddings(self):
        graphs = []
        for n in range(4):
            pairs = list(combinations(range(n), 2))
            triples = list(combinations(range(n), 3))
            for keep in product([False, True], repeat=len(pairs) + len(triples)):
                edges = [p for p, k in zip(pairs, keep) if k]
                tris = [t for t, k in zip(triples, keep[len(pairs):]) if k]
                graphs.append(hypergraph(n, [2, 3], [edges, tris], ["a", "b"]))
        for x in graphs:
            for y in graphs:
                reduced = set(hom_maps(reduct(x, ["a"]), reduct(y, ["a"])))
                assert set(hom_maps(x, y)) <= reduced

    def test_polymer_identity(self, h):
        assert polymer(h, {"a": "a", "b": "b"}, ["a", "b"]) == h

    def test_polymer_constant(self):
        h0 = hypergraph(3, [2], [[(0, 2)]], ["j"])
        p = polymer(h0, {"i1": "j", "i2": "j"}, ["i1", "i2"])
        assert p.labels == ("i1", "i2")
        assert p.relations == (frozenset({(0, 2)}), frozenset({(0, 2)}))

    def test_polymer_not_surjective(self, h):
        with pytest.raises(InputError):
            polymer(h, {"x": "a"}, ["x"])

    def test_polymer_not_total(self, h):
        with pytest.raises(InputError):
            polymer(h, {"x": "a"}, ["x", "y"])

    def test_polymer_arity_clash(self):
        h0 = hypergraph(3, [2], [[(0, 2)]], ["j"])
        with pytest.raises(InputError):
            polymer(h0, {"i": "j"}, ["i"], {"i": 3})

    def test_polymer_lemma(self):
        """f embeds H -> G iff f embeds their polymers."""
        bases = [hypergraph(g.n, [2], [g.relations[0]], ["j"]) for n in range(4) for g in all_graphs(n)]
        g_map = {"i1": "j", "i2": "j"}
        for x in bases:
            for y in bases:
                px, py = polymer(x, g_map, ["i1", "i2"]), polymer(y, g_map, ["i1", "i2"])
                assert hom_maps(x, y) == hom_maps(px, py)

    def test_disjoint_union_sizes(self):
        a = hypergraph(2, [2], [[(0, 1)]])
        b = hypergraph(3, [2], [[(1, 2)]])
        u = disjoint_union([a, b])
        assert u.n == 5
        assert u.relations[0] == {(0, 1), (3, 4)}
        assert len(u.relations[0]) == len(a.relations[0]) + len(b.relations[0])

    def test_disjoint_union_with_empty(self):
        a = hypergraph(2, [2], [[(0, 1)]])
        assert disjoint_union([a, hypergraph(0, [2], [[]])]) == a
        assert disjoint_union([hypergraph(0, [2], [[]]), a]) == a

    def test_disjoint_union_mismatch(self):
        with pytest.raises(InputError):
            disjoint_union([hypergraph(1, [2], [[]]), hypergraph(1, [3], [[]])])

    def test_compress_equal_families(self):
        part = hypergraph(2, [2, 2], [[(0, 1)], [(0, 1)]], ["a", "b"])
        result = compress_signature([part, part])
        assert result.kept == ("a",)
        assert result.g == {"a": "a", "b": "a"}
        assert result.reducts[0].labels == ("a",)

    def test_compress_arity_above_size(self):
        parts = [hypergraph(1, [3, 4], [[], []], ["a", "b"]) for _ in range(2)]
        result = compress_signature(parts)
        assert result.kept == ("a",)
        assert result.g == {"a": "a", "b": "a"}

    def test_compress_distinct(self, h):
        result = compress_signature([h])
        assert result.kept == ("a", "b")
        assert result.g == {"a": "a", "b": "b"}

    def test_compress_only_equal_in_union(self):
        """Families equal in one part but not in the union stay apart."""
        p1 = hypergraph(2, [2, 2], [[(0, 1)], [(0, 1)]], ["a", "b"])
        p2 = hypergraph(2, [2, 2], [[(0, 1)], []], ["a", "b"])
        assert compress_signature([p1, p2]).kept == ("a", "b")

    def test_compress_reexpands(self):
        parts = [
            hypergraph(3, [2, 2, 3], [[(0, 1)], [(0, 1)], [(0, 1, 2)]], ["a", "b", "c"]),
            hypergraph(2, [2, 2, 3], [[], [], []], ["a", "b", "c"]),
        ]
        result = compress_signature(parts)
        arities = dict(zip(parts[0].labels, parts[0].signature))
        for part, r in zip(parts, result.reducts):
            assert polymer(r, result.g, list(part.labels), arities) == part
        assert result.to_dict()["kept"] == ["a", "c"]
        assert result.irreducible_preserved
