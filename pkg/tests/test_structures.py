"""
Tests for ordered structures: validation, induced substructures, spectre and JSON
"""
from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, strategies as st

from errors import InputError
from structures import (
    Kind,
    as_edig,
    chain,
    empty,
    from_json,
    hypergraph,
    in_met_s,
    induced,
    is_oriented_graph,
    metric_from_pairs,
    ordered_graph,
    ordered_metric,
    poset,
    reflexive_digraph,
    relational,
    spectre,
    to_json,
    tournament,
    validate,
)
from diagram_transfer import enumerate_edigs, enumerate_posets


def all_subsets(n):
    for r in range(n + 1):
        yield from combinations(range(n), r)


def flips(n):
    """Each pair x < y kept forward or reversed, in every combination."""
    pairs = list(combinations(range(n), 2))
    for choice in product([False, True], repeat=len(pairs)):
        yield [(y, x) if f else (x, y) for (x, y), f in zip(pairs, choice)]


def subfamilies(items):
    for keep in product([False, True], repeat=len(items)):
        yield [t for t, k in zip(items, keep) if k]


def small_structures(kind):
    """Exhaustive small instances of ``kind``; metric spaces are filtered to valid ones."""
    if kind == Kind.CHAIN:
        yield from (chain(n) for n in range(6))
    elif kind == Kind.ORDERED_GRAPH:
        for n in range(5):
            yield from (ordered_graph(n, e) for e in subfamilies(list(combinations(range(n), 2))))
    elif kind == Kind.HYPERGRAPH:
        for n in range(5):
            for pairs in subfamilies(list(combinations(range(n), 2))):
                for triples in subfamilies(list(combinations(range(n), 3))):
                    yield hypergraph(n, [2, 3], [pairs, triples])
    elif kind == Kind.REFLEXIVE_DIGRAPH_LE:
        yield from (g for n in range(5) for g in enumerate_edigs(n))
    elif kind == Kind.TOURNAMENT:
        yield from (tournament(n, arcs) for n in range(5) for arcs in flips(n))
    elif kind == Kind.POSET_LE:
        yield from (p for n in range(5) for p in enumerate_posets(n))
    elif kind == Kind.ORDERED_METRIC:
        for n in range(5):
            pairs = list(combinations(range(n), 2))
            for values in product([1, 2, 3], repeat=len(pairs)):
                m = metric_from_pairs(n, dict(zip(pairs, values)))
                if validate(m).ok:
                    yield m
    elif kind == Kind.RELATIONAL:
        for n in range(4):
            yield from (relational(n, [2], [r]) for r in subfamilies(list(product(range(n), repeat=2))))


@st.composite
def ordered_graphs(draw, max_n=6):
    n = draw(st.integers(min_value=0, max_value=max_n))
    pairs = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return ordered_graph(n, [p for p, keep in zip(pairs, chosen) if keep])


class TestValidate:
    """Axiom checks per kind."""

    def test_graph_with_edge_ok(self, k2):
        """Smallest graph with an edge is valid."""
        assert validate(k2).ok

    def test_tournament_two_cycle(self, two_cycle_tournament):
        """Arcs both ways violate exactly-one-arc."""
        report = validate(two_cycle_tournament)
        assert not report.ok
        assert "exactly-one-arc" in report.axioms

    def test_tournament_missing_arc(self):
        """A pair without any arc violates exactly-one-arc."""
        assert "exactly-one-arc" in validate(tournament(2, [])).axioms

    def test_metric_zero_distance(self):
        """Zero distance between distinct points."""
        m = ordered_metric(2, [[0, 0], [0, 0]])
        assert "positivity off diagonal" in validate(m).axioms

    def test_metric_triangle(self):
        """1 + 1 < 3 breaks the triangle inequality."""
        m = metric_from_pairs(3, {(0, 1): 1, (1, 2): 1, (0, 2): 3})
        assert "triangle inequality" in validate(m).axioms

    def test_metric_asymmetric(self):
        m = ordered_metric(2, [[0, 1], [2, 0]])
        assert "symmetry" in validate(m).axioms

    def test_graph_loop(self):
        assert "no-loops" in validate(ordered_graph(2, [(1, 1)])).axioms

    def test_hypergraph_repeated_vertex(self):
        h = hypergraph(3, [2], [[(1, 1)]])
        assert "distinct-vertices" in validate(h).axioms

    def test_hypergraph_wrong_arity(self):
        h = hypergraph(3, [2], [[(0, 1, 2)]])
        assert "arity" in validate(h).axioms

    def test_vertex_out_of_range(self):
        assert "vertex-range" in validate(ordered_graph(2, [(0, 5)])).axioms

    def test_digraph_needs_loops(self):
        d = reflexive_digraph(2, [(0, 0), (0, 1)])
        report = validate(d)
        assert report.axioms == ["reflexive"]
        assert report.violations[0].elements == (1,)

    def test_digraph_backward_arc(self):
        d = reflexive_digraph(2, [(1, 0)], add_loops=True)
        assert "order-compatible" in validate(d).axioms

    def test_poset_not_transitive(self):
        p = poset(3, [(0, 1), (1, 2)], add_loops=True)
        assert "transitive" in validate(p).axioms

    def test_poset_antisymmetry(self):
        p = poset(2, [(0, 1), (1, 0)], add_loops=True)
        assert "antisymmetric" in validate(p).axioms

    def test_relational_allows_repetition(self, binary_relation):
        assert validate(binary_relation(1, [(0, 0)])).ok

    def test_empty_structures_valid(self):
        """n = 0 is admitted for every kind."""
        for kind in Kind:
            signature = (2,) if kind in (Kind.HYPERGRAPH, Kind.RELATIONAL) else ()
            assert validate(empty(kind, signature)).ok

    def test_report_to_dict(self, two_cycle_tournament):
        data = validate(two_cycle_tournament).to_dict()
        assert data["ok"] is False
        assert data["violations"][0] == {"axiom": "exactly-one-arc", "elements": [[0, 1]]}


class TestInduced:
    """Induced substructures."""

    def test_chain(self):
        assert induced(chain(3), [0, 2]) == chain(2)

    def test_empty_poset(self, two_chain_poset):
        """Inducing on no positions gives the empty poset."""
        result = induced(two_chain_poset, [])
        assert result == empty(Kind.POSET_LE)
        assert validate(result).ok

    def test_path_drops_edges(self, path_graph):
        assert induced(path_graph, [0, 2]) == ordered_graph(2, [])

    def test_hypergraph_keeps_inside_edges(self):
        h = hypergraph(4, [2, 3], [[(0, 1), (2, 3)], [(0, 1, 3)]])
        assert induced(h, [0, 1, 3]) == hypergraph(3, [2, 3], [[(0, 1)], [(0, 1, 2)]])

    def test_metric_submatrix(self):
        m = metric_from_pairs(3, {(0, 1): 1, (1, 2): 2, (0, 2): 3})
        assert induced(m, [0, 2]) == metric_from_pairs(2, {(0, 1): 3})

    def test_out_of_range(self, path_graph):
        with pytest.raises(InputError):
            induced(path_graph, [0, 3])

    def test_not_increasing(self, path_graph):
        with pytest.raises(InputError):
            induced(path_graph, [1, 0])

    @given(ordered_graphs())
    def test_full_position_set_is_identity(self, g):
        assert induced(g, range(g.n)) == g

    @given(ordered_graphs(), st.data())
    def test_induced_composes(self, g, data):
        p = sorted(data.draw(st.sets(st.integers(0, max(g.n - 1, 0)), max_size=g.n)) if g.n else set())
        q = sorted(data.draw(st.sets(st.integers(0, max(len(p) - 1, 0)), max_size=len(p))) if p else set())
        assert induced(induced(g, p), q) == induced(g, [p[i] for i in q])

    @pytest.mark.parametrize("kind", list(Kind), ids=lambda k: k.value)
    def test_hereditary(self, kind):
        """Every induced substructure of a small valid structure is valid, for every kind."""
        count = 0
        for s in small_structures(kind):
            assert s.kind == kind
            assert validate(s).ok
            for positions in all_subsets(s.n):
                assert validate(induced(s, positions)).ok
            count += 1
        assert count > 0


class TestMetricData:
    """spectre, Met(S) membership."""

    def test_one_point(self, one_point):
        assert spectre(one_point) == {Fraction(0)}

    def test_two_points(self):
        assert spectre(metric_from_pairs(2, {(0, 1): Fraction(3, 2)})) == {0, Fraction(3, 2)}

    def test_three_points(self):
        m = metric_from_pairs(3, {(0, 1): 1, (1, 2): 1, (0, 2): 2})
        assert spectre(m) == {0, 1, 2}

    def test_spectre_wrong_kind(self, k2):
        with pytest.raises(InputError):
            spectre(k2)

    def test_in_met_s(self, unit_pair):
        assert in_met_s(unit_pair, [0, 1])
        assert not in_met_s(unit_pair, [0, 2])


class TestKindHelpers:
    def test_as_edig(self, two_chain_poset):
        d = as_edig(two_chain_poset)
        assert d.kind == Kind.REFLEXIVE_DIGRAPH_LE
        assert d.relations == two_chain_poset.relations
        assert validate(d).ok

    def test_as_edig_wrong_kind(self, k2):
        with pytest.raises(InputError):
            as_edig(k2)

    def test_oriented_graph(self, binary_relation):
        assert is_oriented_graph(binary_relation(3, [(0, 1), (2, 1)]))
        assert not is_oriented_graph(binary_relation(1, [(0, 0)]))
        assert not is_oriented_graph(binary_relation(2, [(0, 1), (1, 0)]))

    def test_family_lookup(self):
        r = relational(2, (2, 1), [[(0, 1)], [(1,)]], ("R", "U"))
        assert r.family("U") == frozenset({(1,)})
        with pytest.raises(InputError):
            r.family("X")

    def test_hypergraph_label_count(self):
        with pytest.raises(InputError):
            hypergraph(2, [2, 2], [[]])


class TestJsonCodec:
    """Structure JSON."""

    def test_graph_edges_sorted(self):
        g = from_json({"kind": "ordered_graph", "n": 3, "edges": [[2, 1], [0, 1]]})
        assert to_json(g) == {"kind": "ordered_graph", "n": 3, "edges": [[0, 1], [1, 2]]}

    def test_metric_rationals(self):
        data = {"kind": "ordered_metric", "n": 2,
                "d": [[{"num": 0, "den": 1}, {"num": 3, "den": 2}], [{"num": 3, "den": 2}, 0]]}
        m = from_json(data)
        assert m.distance(0, 1) == Fraction(3, 2)
        assert to_json(m)["d"][1][0] == {"num": 3, "den": 2}
        assert to_json(m)["d"][1][1] == {"num": 0, "den": 1}

    def test_rational_not_reduced(self):
        with pytest.raises(InputError):
            from_json({"kind": "ordered_metric", "n": 1, "d": [[{"num": 0, "den": 2}]]})

    def test_rational_zero_denominator(self):
        with pytest.raises(InputError):
            from_json({"kind": "ordered_metric", "n": 1, "d": [[{"num": 0, "den": 0}]]})

    def test_one_indexed_input(self):
        t = from_json({"kind": "tournament", "n": 2, "arcs": [[2, 1]], "indexing": 1})
        assert t == tournament(2, [(1, 0)])

    def test_indexing_argument(self):
        g = from_json({"kind": "ordered_graph", "n": 2, "edges": [[1, 2]]}, indexing=1)
        assert g == ordered_graph(2, [(0, 1)])

    def test_hypergraph_round_trip(self):
        h = hypergraph(3, [2, 1], [[(0, 2)], [(1,)]], ["E", "U"])
        assert from_json(to_json(h)) == h

    def test_unknown_kind(self):
        with pytest.raises(InputError):
            from_json({"kind": "matroid", "n": 1})

    def test_missing_field(self):
        with pytest.raises(InputError):
            from_json({"kind": "chain"})

    def test_negative_n(self):
        with pytest.raises(InputError):
            from_json({"kind": "chain", "n": -1})
