"""
Translations between structure kinds.

Covers the two isomorphism functor pairs (graphs with reflexive digraphs,
graphs with tournaments), total quasiorders and the tp / mat / tup
decomposition of tuples, the dagger / star encoding of relational
structures as hypergraphs, irreducibility, Forb membership, and the
reduct / polymer / disjoint union / signature compression toolkit for
hypergraphs.

Functors here act as the identity on embedding maps, so only their action
on objects is implemented.
"""
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from category import has_embedding, iter_rgs
from errors import InputError, InternalInconsistencyError
from structures import (
    Kind,
    OrderedStructure,
    hypergraph,
    ordered_graph,
    reflexive_digraph,
    relation_families,
    relational,
    tournament,
)

DEFAULT_QUASIORDER_CAP = 4
LABEL_SEPARATOR = "@"


# ==============================
#  Isomorphism functors
# ==============================
def _require_kind(s: OrderedStructure, kind: Kind, op: str):
    if s.kind != kind:
        raise InputError(f"{op} expects a {kind.value} structure, got {s.kind.value}")


def graph_digraph_iso(direction: str, s: OrderedStructure) -> OrderedStructure:
    """Gra <-> EDig: an edge {x, y} with x < y becomes the arc (x, y), plus all loops."""
    if direction == "to_digraph":
        _require_kind(s, Kind.ORDERED_GRAPH, "to_digraph")
        return reflexive_digraph(s.n, s.relations[0], add_loops=True)
    if direction == "to_graph":
        _require_kind(s, Kind.REFLEXIVE_DIGRAPH_LE, "to_graph")
        return ordered_graph(s.n, [(x, y) for x, y in s.relations[0] if x != y])
    raise InputError(f"Unknown direction '{direction}' for gra-edig (use to_digraph or to_graph)")


def graph_tournament_iso(direction: str, s: OrderedStructure) -> OrderedStructure:
    """Gra <-> Tour: edges point forward in the order, non-edges point backward."""
    if direction == "to_tournament":
        _require_kind(s, Kind.ORDERED_GRAPH, "to_tournament")
        edges = s.relations[0]
        arcs = [(x, y) if (x, y) in edges else (y, x) for x, y in combinations(range(s.n), 2)]
        return tournament(s.n, arcs)
    if direction == "to_graph":
        _require_kind(s, Kind.TOURNAMENT, "to_graph")
        return ordered_graph(s.n, [(x, y) for x, y in s.relations[0] if x < y])
    raise InputError(f"Unknown direction '{direction}' for gra-tour (use to_tournament or to_graph)")


FUNCTORS = {
    "gra-edig": graph_digraph_iso,
    "gra-tour": graph_tournament_iso,
}


def apply_functor(name: str, direction: str, s: OrderedStructure) -> OrderedStructure:
    try:
        functor = FUNCTORS[name]
    except KeyError:
        raise InputError(f"Unknown functor '{name}'. Known: {', '.join(sorted(FUNCTORS))}")
    return functor(direction, s)


# ==============================
#  Total quasiorders
# ==============================
@dataclass(frozen=True)
class TotalQuasiorder:
    """A total quasiorder on the positions 1..r, stored as its pair set."""

    r: int
    pairs: FrozenSet[Tuple[int, int]]

    @cached_property
    def ranks(self) -> Tuple[int, ...]:
        """0-based rank of each position's class in the induced linear order of classes."""
        return tuple(
            len({self._class_key(j) for j in range(1, self.r + 1) if (j, i) in self.pairs and (i, j) not in self.pairs})
            for i in range(1, self.r + 1)
        )

    def _class_key(self, i: int) -> FrozenSet[int]:
        return frozenset(j for j in range(1, self.r + 1) if (i, j) in self.pairs and (j, i) in self.pairs)

    @cached_property
    def classes(self) -> Tuple[Tuple[int, ...], ...]:
        """Equivalence classes (1-indexed positions), listed from smallest to largest."""
        out: List[List[int]] = [[] for _ in range(max(self.ranks) + 1)] if self.r else []
        for pos, rank in enumerate(self.ranks, start=1):
            out[rank].append(pos)
        return tuple(tuple(c) for c in out)

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @cached_property
    def code(self) -> str:
        """``rgs:order``: the class partition by position, then the class ids from smallest up."""
        rgs = _first_seen(self.ranks)
        ids = {rank: cid for rank, cid in zip(self.ranks, rgs)}
        order = [ids[rank] for rank in range(self.class_count)]
        return f"{''.join(map(str, rgs))}:{''.join(map(str, order))}"

    def sort_key(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        rgs, order = self.code.split(":")
        return tuple(map(int, rgs)), tuple(map(int, order))


def _first_seen(values: Sequence[int]) -> Tuple[int, ...]:
    names: Dict[int, int] = {}
    return tuple(names.setdefault(v, len(names)) for v in values)


def quasiorder_from_ranks(ranks: Sequence[int]) -> TotalQuasiorder:
    """Build the quasiorder in which position i sits below j iff rank i <= rank j."""
    r = len(ranks)
    pairs = frozenset((i + 1, j + 1) for i in range(r) for j in range(r) if ranks[i] <= ranks[j])
    return TotalQuasiorder(r, pairs)


def quasiorder_from_pairs(r: int, pairs) -> TotalQuasiorder:
    """Validate a pair set on 1..r and wrap it."""
    pairs = frozenset((int(i), int(j)) for i, j in pairs)
    positions = range(1, r + 1)
    if any(i not in positions or j not in positions for i, j in pairs):
        raise InputError(f"Quasiorder pairs must lie in 1..{r}")
    for i in positions:
        if (i, i) not in pairs:
            raise InputError(f"Quasiorder is not reflexive at {i}")
    for i, j in combinations(positions, 2):
        if (i, j) not in pairs and (j, i) not in pairs:
            raise InputError(f"Quasiorder is not total on ({i}, {j})")
    for i, j in pairs:
        for j2, k in pairs:
            if j == j2 and (i, k) not in pairs:
                raise InputError(f"Quasiorder is not transitive on ({i}, {j}), ({j}, {k})")
    return TotalQuasiorder(r, pairs)


def quasiorder_from_code(code: str) -> TotalQuasiorder:
    try:
        rgs_text, order_text = code.split(":")
        rgs = [int(c) for c in rgs_text]
        order = [int(c) for c in order_text]
    except ValueError:
        raise InputError(f"Malformed quasiorder code '{code}'")
    if not rgs or list(_first_seen(rgs)) != rgs or sorted(order) != list(range(max(rgs) + 1)):
        raise InputError(f"Malformed quasiorder code '{code}'")
    rank_of = {cid: rank for rank, cid in enumerate(order)}
    return quasiorder_from_ranks([rank_of[c] for c in rgs])


def enumerate_total_quasiorders(r: int, cap: int = DEFAULT_QUASIORDER_CAP) -> List[TotalQuasiorder]:
    """All total quasiorders on 1..r ordered by (class partition, class order)."""
    if r < 1:
        raise InputError(f"Quasiorder arity must be at least 1, got {r}")
    if r > cap:
        raise InputError(f"Quasiorder arity {r} is above the configured cap {cap}")
    out = []
    for rgs in iter_rgs(r):
        blocks = max(rgs) + 1
        for order in permutations(range(blocks)):
            rank_of = {cid: rank for rank, cid in enumerate(order)}
            out.append(quasiorder_from_ranks([rank_of[c] for c in rgs]))
    return out


def tp(values: Sequence[int]) -> TotalQuasiorder:
    """The order type of a tuple over a chain."""
    if not values:
        raise InputError("tp is undefined on the empty tuple")
    distinct = sorted(set(values))
    rank = {v: i for i, v in enumerate(distinct)}
    return quasiorder_from_ranks([rank[v] for v in values])


def mat(values: Sequence[int]) -> Tuple[int, ...]:
    """The distinct entries of a tuple, increasing."""
    if not values:
        raise InputError("mat is undefined on the empty tuple")
    return tuple(sorted(set(values)))


def tup(sigma: TotalQuasiorder, mu: Sequence[int]) -> Tuple[int, ...]:
    """Rebuild the tuple of type ``sigma`` whose entries are exactly ``mu``."""
    mu = tuple(mu)
    if any(a >= b for a, b in zip(mu, mu[1:])):
        raise InputError(f"Matrix must be strictly increasing, got {list(mu)}")
    if len(mu) != sigma.class_count:
        raise InputError(f"Quasiorder has {sigma.class_count} classes but the matrix has {len(mu)} entries")
    return tuple(mu[rank] for rank in sigma.ranks)


# ==============================
#  Dagger / star encoding
# ==============================
@dataclass(frozen=True)
class EncodingSignature:
    """The index family of pairs (relation, quasiorder) with their class counts as arities."""

    items: Tuple[Tuple[int, TotalQuasiorder], ...]
    source_signature: Tuple[int, ...]
    source_labels: Tuple[str, ...]

    @property
    def arities(self) -> Tuple[int, ...]:
        return tuple(sigma.class_count for _, sigma in self.items)

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(f"{self.source_labels[i]}{LABEL_SEPARATOR}{sigma.code}" for i, sigma in self.items)

    @cached_property
    def _index(self) -> Dict[Tuple[int, str], int]:
        return {(i, sigma.code): pos for pos, (i, sigma) in enumerate(self.items)}

    def index_of(self, rel: int, sigma: TotalQuasiorder) -> int:
        return self._index[(rel, sigma.code)]

    def to_list(self) -> List[dict]:
        return [{"rel": i, "sigma": sigma.code} for i, sigma in self.items]


def encoding_signature(
    arities: Sequence[int],
    labels: Optional[Sequence[str]] = None,
    cap: int = DEFAULT_QUASIORDER_CAP,
) -> EncodingSignature:
    labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(len(arities)))
    items = tuple((i, sigma) for i, r in enumerate(arities) for sigma in enumerate_total_quasiorders(r, cap))
    return EncodingSignature(items, tuple(arities), labels)


def dagger(a: OrderedStructure, cap: int = DEFAULT_QUASIORDER_CAP) -> OrderedStructure:
    """Encode a relational structure as a hypergraph over its encoding signature."""
    _require_kind(a, Kind.RELATIONAL, "dagger")
    sig = encoding_signature(a.signature, a.labels, cap)
    families: List[set] = [set() for _ in sig.items]
    for i, rel in enumerate(a.relations):
        for t in rel:
            families[sig.index_of(i, tp(t))].add(mat(t))
    return hypergraph(a.n, sig.arities, families, sig.labels)


def decode_signature(b: OrderedStructure, cap: int = DEFAULT_QUASIORDER_CAP) -> EncodingSignature:
    """Recover the encoding signature from a hypergraph's ``relation@code`` labels."""
    _require_kind(b, Kind.HYPERGRAPH, "star")
    rel_labels: List[str] = []
    arity_of: Dict[str, int] = {}
    for label in b.labels:
        if LABEL_SEPARATOR not in label:
            raise InputError(f"Hypergraph label '{label}' is not an encoding label")
        rel, code = label.rsplit(LABEL_SEPARATOR, 1)
        sigma = quasiorder_from_code(code)
        if rel not in arity_of:
            rel_labels.append(rel)
            arity_of[rel] = sigma.r
        elif arity_of[rel] != sigma.r:
            raise InputError(f"Relation '{rel}' appears with arities {arity_of[rel]} and {sigma.r}")
    sig = encoding_signature([arity_of[r] for r in rel_labels], rel_labels, max([cap, *arity_of.values()]))
    if sig.labels != b.labels or sig.arities != b.signature:
        raise InputError("Hypergraph signature is not a complete encoding signature in canonical order")
    return sig


def star(b: OrderedStructure, cap: int = DEFAULT_QUASIORDER_CAP) -> OrderedStructure:
    """Decode a hypergraph over an encoding signature back into a relational structure."""
    sig = decode_signature(b, cap)
    rels: List[set] = [set() for _ in sig.source_signature]
    for (i, sigma), arity, fam in zip(sig.items, sig.arities, b.relations):
        for mu in fam:
            if len(mu) != arity:
                raise InputError(f"Edge {list(mu)} has {len(mu)} vertices, expected {arity}")
            rels[i].add(tup(sigma, mu))
    return relational(b.n, sig.source_signature, rels, sig.source_labels)


# ==============================
#  Irreducibility and Forb classes
# ==============================
def is_irreducible(s: OrderedStructure) -> bool:
    """Every two distinct vertices occur together in some edge or tuple."""
    covered = set()
    for fam in relation_families(s):
        for t in fam:
            covered.update(combinations(sorted(set(t)), 2))
    return len(covered) == s.n * (s.n - 1) // 2


def forb_contains(a: OrderedStructure, forbidden: Sequence[OrderedStructure]) -> bool:
    """True iff no member of ``forbidden`` embeds into ``a``."""
    return not any(has_embedding(f, a) for f in forbidden)


def ogra_forbidden(label: str = "0") -> Tuple[OrderedStructure, OrderedStructure]:
    """The loop and the 2-cycle; excluding both leaves exactly the oriented graphs."""
    loop = relational(1, (2,), [{(0, 0)}], (label,))
    two_cycle = relational(2, (2,), [{(0, 1), (1, 0)}], (label,))
    return loop, two_cycle


# ==============================
#  Reducts, polymers and compression
# ==============================
@dataclass(frozen=True)
class CompressionResult:
    kept: Tuple[str, ...]
    g: Dict[str, str]
    reducts: Tuple[OrderedStructure, ...]
    union: OrderedStructure
    irreducible_preserved: bool

    def to_dict(self) -> dict:
        return {
            "kept": list(self.kept),
            "g": dict(self.g),
            "irreducible_preserved": self.irreducible_preserved,
        }


def reduct(h: OrderedStructure, keep: Sequence[str]) -> OrderedStructure:
    """Keep only the families whose labels are listed, in the hypergraph's own order."""
    _require_kind(h, Kind.HYPERGRAPH, "reduct")
    unknown = [label for label in keep if label not in h.labels]
    if unknown:
        raise InputError(f"Unknown index in reduct: {', '.join(unknown)}")
    wanted = set(keep)
    picked = [k for k, label in enumerate(h.labels) if label in wanted]
    return hypergraph(
        h.n,
        [h.signature[k] for k in picked],
        [h.relations[k] for k in picked],
        [h.labels[k] for k in picked],
    )


def polymer(
    h0: OrderedStructure,
    g: Dict[str, str],
    index: Sequence[str],
    arities: Optional[Dict[str, int]] = None,
) -> OrderedStructure:
    """The hypergraph whose family at i is the family of ``h0`` at g(i)."""
    _require_kind(h0, Kind.HYPERGRAPH, "polymer")
    arities = arities or {}
    missing = [i for i in index if i not in g]
    if missing:
        raise InputError(f"g is not defined on: {', '.join(missing)}")
    unknown = sorted({g[i] for i in index} - set(h0.labels))
    if unknown:
        raise InputError(f"g maps into unknown indices: {', '.join(unknown)}")
    if {g[i] for i in index} != set(h0.labels):
        raise InputError("g is not surjective onto the base signature")
    signature, families = [], []
    for i in index:
        k = h0.labels.index(g[i])
        r = arities.get(i, h0.signature[k])
        if r != h0.signature[k] and h0.relations[k]:
            raise InputError(f"Arity clash at '{i}': {r} vs {h0.signature[k]} for g({i}) = '{g[i]}'")
        signature.append(r)
        families.append(h0.relations[k])
    return hypergraph(h0.n, signature, families, index)


def disjoint_union(parts: Sequence[OrderedStructure]) -> OrderedStructure:
    """Order sum of hypergraphs: each block sits entirely above the previous ones."""
    if not parts:
        raise InputError("disjoint_union needs at least one hypergraph")
    first = parts[0]
    for p in parts:
        _require_kind(p, Kind.HYPERGRAPH, "disjoint_union")
        if not p.same_shape(first):
            raise InputError("disjoint_union needs hypergraphs with equal signatures")
    families: List[set] = [set() for _ in first.signature]
    offset = 0
    for p in parts:
        for k, fam in enumerate(p.relations):
            families[k].update(tuple(v + offset for v in e) for e in fam)
        offset += p.n
    return hypergraph(offset, first.signature, families, first.labels)


def compress_signature(parts: Sequence[OrderedStructure]) -> CompressionResult:
    """Merge indices whose families coincide in the disjoint union of ``parts``."""
    union = disjoint_union(parts)
    rep_of_family: Dict[FrozenSet, str] = {}
    g: Dict[str, str] = {}
    for label, fam in zip(union.labels, union.relations):
        g[label] = rep_of_family.setdefault(fam, label)
    kept = tuple(label for label in union.labels if g[label] == label)
    reducts = tuple(reduct(p, kept) for p in parts)
    arities = dict(zip(union.labels, union.signature))
    for p, r in zip(parts, reducts):
        if polymer(r, g, union.labels, arities) != p:
            raise InternalInconsistencyError("A part is not the polymer of its reduct along g")
    preserved = all(is_irreducible(p) == is_irreducible(r) for p, r in zip(parts, reducts))
    return CompressionResult(kept, g, reducts, union, preserved)
