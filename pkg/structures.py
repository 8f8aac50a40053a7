"""
Finite linearly ordered structures.

Every structure lives on the vertices 0..n-1 and the linear order is the
natural order of the indices, so two structures are equal exactly when
their fields are equal. All relational data is kept in one uniform shape:
``relations`` is a tuple of families, each family a frozenset of index
tuples. Graph and hypergraph edges are stored as increasing tuples;
digraph, tournament, poset and relational tuples are stored as given.
Metric spaces keep their exact rational distance matrix in ``distances``.
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from itertools import combinations, product
from math import gcd
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from errors import InputError

Family = FrozenSet[Tuple[int, ...]]


class Kind(str, Enum):
    CHAIN = "chain"
    ORDERED_GRAPH = "ordered_graph"
    HYPERGRAPH = "hypergraph"
    REFLEXIVE_DIGRAPH_LE = "reflexive_digraph_le"
    TOURNAMENT = "tournament"
    POSET_LE = "poset_le"
    ORDERED_METRIC = "ordered_metric"
    RELATIONAL = "relational"


# Kinds whose single binary relation is named by the JSON key below.
BINARY_KEYS = {
    Kind.ORDERED_GRAPH: "edges",
    Kind.REFLEXIVE_DIGRAPH_LE: "rho",
    Kind.TOURNAMENT: "arcs",
    Kind.POSET_LE: "leq",
}

SIGNED_KINDS = (Kind.HYPERGRAPH, Kind.RELATIONAL)


# ==============================
#  Domain Types
# ==============================
@dataclass(frozen=True)
class OrderedStructure:
    """A finite structure on 0..n-1 ordered by index."""

    kind: Kind
    n: int
    signature: Tuple[int, ...] = ()
    labels: Tuple[str, ...] = ()
    relations: Tuple[Family, ...] = ()
    distances: Tuple[Tuple[Fraction, ...], ...] = ()

    def family(self, label: str) -> Family:
        """Return the family stored under ``label``."""
        try:
            return self.relations[self.labels.index(label)]
        except ValueError:
            raise InputError(f"Unknown relation index '{label}'. Known: {', '.join(self.labels)}")

    def distance(self, x: int, y: int) -> Fraction:
        return self.distances[x][y]

    @property
    def vertices(self) -> range:
        return range(self.n)

    def same_shape(self, other: "OrderedStructure") -> bool:
        """True if both structures live in the same category."""
        return (
            self.kind == other.kind
            and self.signature == other.signature
            and self.labels == other.labels
        )


@dataclass(frozen=True)
class Violation:
    """One failed axiom together with the elements that break it."""

    axiom: str
    elements: Tuple = ()

    def to_dict(self) -> dict:
        return {"axiom": self.axiom, "elements": [list(e) if isinstance(e, tuple) else e for e in self.elements]}


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def axioms(self) -> List[str]:
        return sorted({v.axiom for v in self.violations})

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


# ==============================
#  Constructors
# ==============================
def _check_n(n: int):
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise InputError(f"Vertex count must be a non-negative integer, got {n!r}")


def _tuples(items: Iterable[Sequence[int]], sort_entries: bool) -> Family:
    out = set()
    for item in items:
        t = tuple(int(v) for v in item)
        out.add(tuple(sorted(t)) if sort_entries else t)
    return frozenset(out)


def _default_labels(count: int) -> Tuple[str, ...]:
    return tuple(str(i) for i in range(count))


def chain(n: int) -> OrderedStructure:
    _check_n(n)
    return OrderedStructure(Kind.CHAIN, n)


def ordered_graph(n: int, edges: Iterable[Sequence[int]] = ()) -> OrderedStructure:
    _check_n(n)
    return OrderedStructure(Kind.ORDERED_GRAPH, n, (2,), ("E",), (_tuples(edges, True),))


def hypergraph(
    n: int,
    signature: Sequence[int],
    families: Sequence[Iterable[Sequence[int]]],
    labels: Optional[Sequence[str]] = None,
) -> OrderedStructure:
    _check_n(n)
    signature = tuple(int(r) for r in signature)
    labels = tuple(labels) if labels is not None else _default_labels(len(signature))
    if len(families) != len(signature) or len(labels) != len(signature):
        raise InputError(
            f"Hypergraph needs one family and one label per arity: "
            f"{len(signature)} arities, {len(families)} families, {len(labels)} labels"
        )
    if len(set(labels)) != len(labels):
        raise InputError("Hypergraph labels must be distinct")
    rels = tuple(_tuples(fam, True) for fam in families)
    return OrderedStructure(Kind.HYPERGRAPH, n, signature, labels, rels)


def reflexive_digraph(n: int, rho: Iterable[Sequence[int]] = (), add_loops: bool = False) -> OrderedStructure:
    _check_n(n)
    pairs = set(_tuples(rho, False))
    if add_loops:
        pairs.update((x, x) for x in range(n))
    return OrderedStructure(Kind.REFLEXIVE_DIGRAPH_LE, n, (2,), ("rho",), (frozenset(pairs),))


def tournament(n: int, arcs: Iterable[Sequence[int]] = ()) -> OrderedStructure:
    _check_n(n)
    return OrderedStructure(Kind.TOURNAMENT, n, (2,), ("arcs",), (_tuples(arcs, False),))


def poset(n: int, leq: Iterable[Sequence[int]] = (), add_loops: bool = False) -> OrderedStructure:
    _check_n(n)
    pairs = set(_tuples(leq, False))
    if add_loops:
        pairs.update((x, x) for x in range(n))
    return OrderedStructure(Kind.POSET_LE, n, (2,), ("leq",), (frozenset(pairs),))


def ordered_metric(n: int, d: Sequence[Sequence]) -> OrderedStructure:
    _check_n(n)
    matrix = tuple(tuple(Fraction(v) for v in row) for row in d)
    return OrderedStructure(Kind.ORDERED_METRIC, n, distances=matrix)


def metric_from_pairs(n: int, pairs: Dict[Tuple[int, int], object]) -> OrderedStructure:
    """Build a metric space from the distances of the pairs x < y."""
    rows = [[Fraction(0)] * n for _ in range(n)]
    for (x, y), value in pairs.items():
        rows[x][y] = rows[y][x] = Fraction(value)
    return ordered_metric(n, rows)


def relational(
    n: int,
    signature: Sequence[int],
    relations: Sequence[Iterable[Sequence[int]]],
    labels: Optional[Sequence[str]] = None,
) -> OrderedStructure:
    _check_n(n)
    signature = tuple(int(r) for r in signature)
    labels = tuple(labels) if labels is not None else _default_labels(len(signature))
    if len(relations) != len(signature) or len(labels) != len(signature):
        raise InputError(
            f"Relational structure needs one relation and one label per arity: "
            f"{len(signature)} arities, {len(relations)} relations, {len(labels)} labels"
        )
    if len(set(labels)) != len(labels):
        raise InputError("Relation labels must be distinct")
    rels = tuple(_tuples(rel, False) for rel in relations)
    return OrderedStructure(Kind.RELATIONAL, n, signature, labels, rels)


def empty(kind: Kind, signature: Sequence[int] = (), labels: Optional[Sequence[str]] = None) -> OrderedStructure:
    """The empty structure of a kind (n = 0)."""
    kind = Kind(kind)
    if kind == Kind.HYPERGRAPH:
        return hypergraph(0, signature, [()] * len(signature), labels)
    if kind == Kind.RELATIONAL:
        return relational(0, signature, [()] * len(signature), labels)
    if kind == Kind.ORDERED_METRIC:
        return ordered_metric(0, ())
    if kind == Kind.CHAIN:
        return chain(0)
    return _binary(kind, 0, ())


def _binary(kind: Kind, n: int, pairs) -> OrderedStructure:
    return {
        Kind.ORDERED_GRAPH: ordered_graph,
        Kind.REFLEXIVE_DIGRAPH_LE: reflexive_digraph,
        Kind.TOURNAMENT: tournament,
        Kind.POSET_LE: poset,
    }[kind](n, pairs)


def as_edig(p: OrderedStructure) -> OrderedStructure:
    """View a poset with a linear extension as a reflexive digraph (rho = leq)."""
    if p.kind != Kind.POSET_LE:
        raise InputError(f"as_edig expects a poset_le structure, got {p.kind.value}")
    return OrderedStructure(Kind.REFLEXIVE_DIGRAPH_LE, p.n, (2,), ("rho",), p.relations)


def as_poset(d: OrderedStructure) -> OrderedStructure:
    """View a reflexive digraph whose relation is a partial order as a poset."""
    if d.kind != Kind.REFLEXIVE_DIGRAPH_LE:
        raise InputError(f"as_poset expects a reflexive_digraph_le structure, got {d.kind.value}")
    return OrderedStructure(Kind.POSET_LE, d.n, (2,), ("leq",), d.relations)


def relation_families(s: OrderedStructure) -> Tuple[Family, ...]:
    """Uniform tuple view of a structure's relations (empty for chains and metrics)."""
    return s.relations


# ==============================
#  Validation
# ==============================
class StructureValidator:
    """Checks the axioms of each structure kind and collects violations."""

    def validate(self, s: OrderedStructure) -> ValidationReport:
        violations: List[Violation] = []
        violations.extend(self._check_shape(s))
        if not violations:
            check = {
                Kind.CHAIN: self._check_none,
                Kind.ORDERED_GRAPH: self._check_graph,
                Kind.HYPERGRAPH: self._check_hypergraph,
                Kind.REFLEXIVE_DIGRAPH_LE: self._check_digraph,
                Kind.TOURNAMENT: self._check_tournament,
                Kind.POSET_LE: self._check_poset,
                Kind.ORDERED_METRIC: self._check_metric,
                Kind.RELATIONAL: self._check_none,
            }[s.kind]
            violations.extend(check(s))
        return ValidationReport(tuple(violations))

    def _check_shape(self, s: OrderedStructure) -> List[Violation]:
        out = []
        if len(s.relations) != len(s.signature):
            out.append(Violation("family-count", (len(s.signature), len(s.relations))))
            return out
        for label, arity, fam in zip(s.labels, s.signature, s.relations):
            if arity < 1:
                out.append(Violation("positive-arity", (label, arity)))
            for t in sorted(fam):
                if len(t) != arity:
                    out.append(Violation("arity", (label, t)))
                elif any(v < 0 or v >= s.n for v in t):
                    out.append(Violation("vertex-range", (label, t)))
        if s.kind == Kind.ORDERED_METRIC:
            if len(s.distances) != s.n or any(len(row) != s.n for row in s.distances):
                out.append(Violation("matrix-shape", (s.n,)))
        return out

    def _check_none(self, s: OrderedStructure) -> List[Violation]:
        return []

    def _check_graph(self, s: OrderedStructure) -> List[Violation]:
        return [Violation("no-loops", (e,)) for e in sorted(s.relations[0]) if e[0] == e[1]]

    def _check_hypergraph(self, s: OrderedStructure) -> List[Violation]:
        out = []
        for label, fam in zip(s.labels, s.relations):
            for e in sorted(fam):
                if len(set(e)) != len(e):
                    out.append(Violation("distinct-vertices", (label, e)))
        return out

    def _order_compatible(self, pairs: Family) -> List[Violation]:
        return [Violation("order-compatible", ((x, y),)) for x, y in sorted(pairs) if x > y]

    def _reflexive(self, s: OrderedStructure, pairs: Family) -> List[Violation]:
        return [Violation("reflexive", (x,)) for x in s.vertices if (x, x) not in pairs]

    def _check_digraph(self, s: OrderedStructure) -> List[Violation]:
        rho = s.relations[0]
        return self._reflexive(s, rho) + self._order_compatible(rho)

    def _check_tournament(self, s: OrderedStructure) -> List[Violation]:
        arcs = s.relations[0]
        out = [Violation("irreflexive", (x,)) for x in s.vertices if (x, x) in arcs]
        for x, y in combinations(s.vertices, 2):
            if ((x, y) in arcs) == ((y, x) in arcs):
                out.append(Violation("exactly-one-arc", ((x, y),)))
        return out

    def _check_poset(self, s: OrderedStructure) -> List[Violation]:
        leq = s.relations[0]
        out = self._reflexive(s, leq)
        for x, y in sorted(leq):
            if x != y and (y, x) in leq:
                out.append(Violation("antisymmetric", ((x, y),)))
        for (x, y), (y2, z) in product(sorted(leq), repeat=2):
            if y == y2 and (x, z) not in leq:
                out.append(Violation("transitive", ((x, y), (y, z))))
        return out + self._order_compatible(leq)

    def _check_metric(self, s: OrderedStructure) -> List[Violation]:
        d = s.distances
        out = []
        for x in s.vertices:
            if d[x][x] != 0:
                out.append(Violation("zero diagonal", (x,)))
        for x, y in combinations(s.vertices, 2):
            if d[x][y] != d[y][x]:
                out.append(Violation("symmetry", ((x, y),)))
            if d[x][y] <= 0 or d[y][x] <= 0:
                out.append(Violation("positivity off diagonal", ((x, y),)))
        for x, y, z in product(s.vertices, repeat=3):
            if d[x][z] > d[x][y] + d[y][z]:
                out.append(Violation("triangle inequality", ((x, y, z),)))
        return out


_validator = StructureValidator()


def validate(s: OrderedStructure) -> ValidationReport:
    return _validator.validate(s)


def require_valid(s: OrderedStructure, role: str = "structure") -> OrderedStructure:
    """Return ``s`` or raise InputError naming the first failed axioms."""
    report = validate(s)
    if not report.ok:
        raise InputError(f"Invalid {role} ({s.kind.value}): axioms violated: {', '.join(report.axioms)}")
    return s


# ==============================
#  Substructures and metric data
# ==============================
def check_positions(n: int, positions: Sequence[int]) -> Tuple[int, ...]:
    """Validate a strictly increasing list of positions inside 0..n-1."""
    positions = tuple(int(p) for p in positions)
    for p in positions:
        if p < 0 or p >= n:
            raise InputError(f"Position {p} out of range for {n} vertices")
    if any(a >= b for a, b in zip(positions, positions[1:])):
        raise InputError(f"Positions must be strictly increasing, got {list(positions)}")
    return positions


def induced(s: OrderedStructure, positions: Sequence[int]) -> OrderedStructure:
    """The substructure on ``positions``, re-indexed to 0..len-1 in order."""
    positions = check_positions(s.n, positions)
    index = {p: i for i, p in enumerate(positions)}
    rels = tuple(
        frozenset(tuple(index[v] for v in t) for t in fam if all(v in index for v in t))
        for fam in s.relations
    )
    dist = ()
    if s.kind == Kind.ORDERED_METRIC:
        dist = tuple(tuple(s.distances[x][y] for y in positions) for x in positions)
    return replace(s, n=len(positions), relations=rels, distances=dist)


def spectre(m: OrderedStructure) -> FrozenSet[Fraction]:
    """All distances attained in a metric space (0 included when nonempty)."""
    if m.kind != Kind.ORDERED_METRIC:
        raise InputError(f"spectre expects an ordered_metric structure, got {m.kind.value}")
    return frozenset(v for row in m.distances for v in row)


def in_met_s(m: OrderedStructure, scale: Iterable) -> bool:
    """Membership of a metric space in Met(S): spectre(M) is inside S."""
    return spectre(m) <= frozenset(Fraction(v) for v in scale)


def is_oriented_graph(s: OrderedStructure) -> bool:
    """Irreflexive and antisymmetric single binary relation."""
    if s.kind != Kind.RELATIONAL or s.signature != (2,):
        raise InputError("is_oriented_graph expects a relational structure with one binary relation")
    rel = s.relations[0]
    return all(x != y and (y, x) not in rel for x, y in rel)


# ==============================
#  JSON codec
# ==============================
def rational_to_json(value: Fraction) -> dict:
    value = Fraction(value)
    return {"num": value.numerator, "den": value.denominator}


def rational_from_json(obj) -> Fraction:
    if isinstance(obj, bool):
        raise InputError(f"Malformed rational: {obj!r}")
    if isinstance(obj, int):
        return Fraction(obj)
    if not isinstance(obj, dict) or set(obj) != {"num", "den"}:
        raise InputError(f"Malformed rational: {obj!r}")
    num, den = obj["num"], obj["den"]
    if not isinstance(num, int) or not isinstance(den, int) or den <= 0 or gcd(num, den) != 1:
        raise InputError(f"Rational must have den > 0 and gcd(num, den) = 1, got {obj!r}")
    return Fraction(num, den)


def _sorted_lists(fam: Family) -> List[List[int]]:
    return [list(t) for t in sorted(fam)]


def to_json(s: OrderedStructure) -> dict:
    data = {"kind": s.kind.value, "n": s.n}
    if s.kind in BINARY_KEYS:
        data[BINARY_KEYS[s.kind]] = _sorted_lists(s.relations[0])
    elif s.kind == Kind.HYPERGRAPH:
        data["signature"] = list(s.signature)
        data["labels"] = list(s.labels)
        data["families"] = [_sorted_lists(f) for f in s.relations]
    elif s.kind == Kind.RELATIONAL:
        data["signature"] = list(s.signature)
        data["labels"] = list(s.labels)
        data["relations"] = [_sorted_lists(f) for f in s.relations]
    elif s.kind == Kind.ORDERED_METRIC:
        data["d"] = [[rational_to_json(v) for v in row] for row in s.distances]
    return data


def _shift(items, offset: int):
    if offset == 0:
        return items
    return [[int(v) - offset for v in t] for t in items]


def from_json(obj: dict, indexing: int = 0) -> OrderedStructure:
    """Parse the structure JSON; an ``indexing`` field in ``obj`` overrides the argument."""
    if not isinstance(obj, dict):
        raise InputError(f"Structure JSON must be an object, got {type(obj).__name__}")
    try:
        kind = Kind(obj["kind"])
        n = obj["n"]
        offset = int(obj.get("indexing", indexing))
        if offset not in (0, 1):
            raise InputError(f"indexing must be 0 or 1, got {offset}")
        if kind == Kind.CHAIN:
            return chain(n)
        if kind in BINARY_KEYS:
            return _binary(kind, n, _shift(obj.get(BINARY_KEYS[kind], []), offset))
        if kind == Kind.HYPERGRAPH:
            fams = [_shift(f, offset) for f in obj.get("families", [])]
            return hypergraph(n, obj.get("signature", []), fams, obj.get("labels"))
        if kind == Kind.RELATIONAL:
            rels = [_shift(r, offset) for r in obj.get("relations", [])]
            return relational(n, obj.get("signature", []), rels, obj.get("labels"))
        rows = [[rational_from_json(v) for v in row] for row in obj.get("d", [])]
        return ordered_metric(n, rows)
    except KeyError as e:
        raise InputError(f"Structure JSON missing field {e}")
    except (TypeError, ValueError) as e:
        raise InputError(f"Malformed structure JSON: {e}")
