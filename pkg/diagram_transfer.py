"""
Binary diagrams, cocones and the transfer of canonical witnesses from a
category to a subcategory closed for binary diagrams.

The built-in closure rule is Pos inside EDig: a cocone in EDig over a
diagram of posets is narrowed to the union of the leg images and the
restricted relation is replaced by its transitive closure.
"""
import multiprocessing as mp
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from canonical import CanonicalWitness, WitnessEngine, is_canonical_witness
from category import Coloring, Embedding, enumerate_colorings, enumerate_embeddings, is_embedding
from errors import BudgetExceededError, ClassOverlapError, ClosureError, InputError, InternalInconsistencyError
from structures import Kind, OrderedStructure, as_edig, as_poset, poset, reflexive_digraph, validate


# ==============================
#  Domain Types
# ==============================
@dataclass(frozen=True)
class DiagramNode:
    """A bottom object (u, v, i, j): legs i and j agree on A through u and v."""

    u: Embedding
    v: Embedding
    i: int
    j: int

    def to_dict(self) -> dict:
        return {"u": list(self.u.map), "v": list(self.v.map), "i": self.i, "j": self.j}


@dataclass(frozen=True)
class BinaryDiagram:
    a: OrderedStructure
    b: OrderedStructure
    top_count: int
    bottom: Tuple[DiagramNode, ...]

    def to_dict(self) -> dict:
        return {"n": self.top_count, "bottom": [node.to_dict() for node in self.bottom]}


@dataclass(frozen=True)
class Cocone:
    tip: OrderedStructure
    legs: Tuple[Embedding, ...]
    # Positions of the tip inside the cocone it was narrowed from, if any.
    support: Tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {"tip_size": self.tip.n, "legs": [list(leg.map) for leg in self.legs]}


def _compose_maps(inner: Sequence[int], outer: Sequence[int]) -> Tuple[int, ...]:
    return tuple(outer[x] for x in inner)


def _lift(s: OrderedStructure, tip: OrderedStructure) -> OrderedStructure:
    """Posets entering a diagram with an EDig tip are read as reflexive digraphs."""
    if s.kind == Kind.POSET_LE and tip.kind == Kind.REFLEXIVE_DIGRAPH_LE:
        return as_edig(s)
    return s


# ==============================
#  Diagrams and cocones
# ==============================
def build_binary_diagram(
    a: OrderedStructure, b: OrderedStructure, c: OrderedStructure
) -> Tuple[BinaryDiagram, Cocone]:
    """The binary diagram over hom(B, C) and its commuting cocone with tip C.

    Legs e_0, e_1, ... are hom(B, C) in canonical order; bottom nodes are the
    quadruples (u, v, i, j) with i != j and e_i . u = e_j . v, indices 0-based.
    """
    a, b = _lift(a, c), _lift(b, c)
    hom_ab = enumerate_embeddings(a, b)
    if not hom_ab:
        raise InputError("hom(A, B) is empty; binary diagrams need at least one embedding A -> B")
    legs = tuple(enumerate_embeddings(b, c))
    meeting: Dict[Tuple[int, ...], List[Tuple[int, Embedding]]] = {}
    for i, leg in enumerate(legs):
        for u in hom_ab:
            meeting.setdefault(_compose_maps(u.map, leg.map), []).append((i, u))
    bottom = []
    for group in meeting.values():
        for (i, u) in group:
            for (j, v) in group:
                if i != j:
                    bottom.append(DiagramNode(u, v, i, j))
    bottom.sort(key=lambda node: (node.i, node.j, node.u.map, node.v.map))
    return BinaryDiagram(a, b, len(legs), tuple(bottom)), Cocone(c, legs)


def check_cocone(d: BinaryDiagram, c: Cocone) -> bool:
    """legs[i] . u == legs[j] . v for every bottom node."""
    if len(c.legs) != d.top_count:
        raise InputError(f"Cocone has {len(c.legs)} legs but the diagram has {d.top_count} top objects")
    if any(leg.source.n != d.b.n for leg in c.legs):
        raise InputError("Cocone legs must start at the diagram's top object")
    for node in d.bottom:
        if _compose_maps(node.u.map, c.legs[node.i].map) != _compose_maps(node.v.map, c.legs[node.j].map):
            return False
    return True


def _closure(size: int, pairs) -> List[Tuple[int, int]]:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(size))
    graph.add_edges_from(pairs)
    return sorted(nx.transitive_closure(graph, reflexive=True).edges())


def pos_closure_cocone(d: BinaryDiagram, edig_cocone: Cocone) -> Cocone:
    """Narrow an EDig cocone over a diagram of posets to a Pos cocone.

    Raises ClosureError when the closed relation is not a partial order or
    a narrowed leg stops being an embedding.
    """
    tip = edig_cocone.tip
    if tip.kind != Kind.REFLEXIVE_DIGRAPH_LE:
        raise InputError(f"pos_closure_cocone expects an EDig tip, got {tip.kind.value}")
    if d.b.kind != Kind.REFLEXIVE_DIGRAPH_LE or not validate(as_poset(d.b)).ok or not validate(as_poset(d.a)).ok:
        raise InputError("pos_closure_cocone expects a diagram whose objects are posets")
    if not check_cocone(d, edig_cocone):
        raise InputError("The EDig cocone does not commute over the diagram")
    support = tuple(sorted({x for leg in edig_cocone.legs for x in leg.map}))
    index = {x: pos for pos, x in enumerate(support)}
    restricted = [(index[x], index[y]) for x, y in tip.relations[0] if x in index and y in index]
    closed = poset(len(support), _closure(len(support), restricted))
    report = validate(closed)
    if not report.ok:
        raise ClosureError(f"Closure of the restricted relation is not a partial order: {report.axioms}")
    b = as_poset(d.b)
    legs = []
    for i, leg in enumerate(edig_cocone.legs):
        mapped = tuple(index[x] for x in leg.map)
        if not is_embedding(b, closed, mapped):
            raise ClosureError(f"Leg {i} = {list(leg.map)} is not an embedding into the closed tip")
        legs.append(Embedding(b, closed, mapped))
    return Cocone(closed, tuple(legs), support)


# ==============================
#  Coloring and witness transfer
# ==============================
def transfer_coloring(chi: Coloring, d: BinaryDiagram, pos_cocone: Cocone, edig_cocone: Cocone) -> Coloring:
    """chi' on hom(A, C): e_s . u gets color chi(f_s . u) + 1, everything else 0.

    Color ids of ``chi`` are used as given so chi(f_s . u) = chi'(e_s . u) - 1.
    """
    hom_ac = enumerate_embeddings(d.a, edig_cocone.tip)
    hom_ab = enumerate_embeddings(d.a, d.b)
    chi_index = {h.map: i for i, h in enumerate(chi.homset)}
    assigned: Dict[Tuple[int, ...], Tuple[int, int]] = {}
    for s, (f_leg, e_leg) in enumerate(zip(pos_cocone.legs, edig_cocone.legs)):
        for u in hom_ab:
            down = _compose_maps(u.map, f_leg.map)
            if down not in chi_index:
                raise InputError(f"Coloring does not cover f_{s} . u = {list(down)}")
            color = chi.colors[chi_index[down]] + 1
            up = _compose_maps(u.map, e_leg.map)
            previous = assigned.setdefault(up, (color, s))
            if previous[0] != color:
                raise ClassOverlapError(
                    f"{list(up)} lands in classes {previous[0]} and {color}", first=previous[0], second=color
                )
    colors = tuple(assigned.get(h.map, (0, -1))[0] for h in hom_ac)
    return Coloring(tuple(hom_ac), colors)


def transfer_witness(
    wit_prime: CanonicalWitness,
    chi: Coloring,
    d: BinaryDiagram,
    pos_cocone: Cocone,
    edig_cocone: Cocone,
) -> CanonicalWitness:
    """Pull (e_l, P) for chi' back to (f_l, P) for chi and check it."""
    maps = [leg.map for leg in edig_cocone.legs]
    if wit_prime.w.map not in maps:
        raise InputError(f"Witness embedding {list(wit_prime.w.map)} is not a leg of the cocone")
    ell = maps.index(wit_prime.w.map)
    result = CanonicalWitness(pos_cocone.legs[ell], tuple(wit_prime.positions))
    hom_ab = enumerate_embeddings(as_poset(d.a), as_poset(d.b))
    if not is_canonical_witness(chi, result, hom_ab):
        raise InternalInconsistencyError(
            f"Pulled-back witness f_{ell}, P={list(result.positions)} is not canonical for chi"
        )
    return result


@dataclass
class PipelineResult:
    stage: str
    legs: int = 0
    bottom: int = 0
    tip_size: int = 0
    colorings: int = 0
    chi_prime_witnesses: int = 0
    transferred: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def transfer_pipeline(
    a: OrderedStructure,
    b: OrderedStructure,
    c: OrderedStructure,
    colors: Optional[Sequence[int]] = None,
    max_colorings: Optional[int] = None,
) -> PipelineResult:
    """Diagram, Pos closure, coloring transfer, witness search and pull-back for posets A, B and an EDig tip C.

    With ``colors`` the single coloring of hom(A, D) is processed, otherwise
    every coloring is. Stops at stage ``closure_failed`` when the closure
    does not yield a Pos cocone.
    """
    for s in (a, b):
        if s.kind != Kind.POSET_LE:
            raise InputError(f"transfer_pipeline expects posets A and B, got {s.kind.value}")
    if c.kind != Kind.REFLEXIVE_DIGRAPH_LE:
        raise InputError(f"transfer_pipeline expects an EDig tip, got {c.kind.value}")
    d, edig_cocone = build_binary_diagram(a, b, c)
    result = PipelineResult("diagram", len(edig_cocone.legs), len(d.bottom))
    try:
        pos_cocone = pos_closure_cocone(d, edig_cocone)
    except ClosureError:
        result.stage = "closure_failed"
        return result
    if not check_cocone(d, pos_cocone):
        raise InternalInconsistencyError("The Pos closure cocone does not commute over the diagram")
    result.tip_size = pos_cocone.tip.n
    hom_ad = enumerate_embeddings(a, pos_cocone.tip)
    if colors is not None:
        chis = [Coloring(tuple(hom_ad), tuple(colors))]
    else:
        chis = enumerate_colorings(hom_ad, cap=max_colorings)
    engine = WitnessEngine(d.a, d.b, c)
    for chi in chis:
        result.colorings += 1
        chi_prime = transfer_coloring(chi, d, pos_cocone, edig_cocone)
        wit_prime = engine.find(chi_prime)
        if wit_prime is None:
            continue
        result.chi_prime_witnesses += 1
        transfer_witness(wit_prime, chi, d, pos_cocone, edig_cocone)
        result.transferred += 1
    result.stage = "complete"
    return result


# ==============================
#  Exhaustive sweeps
# ==============================
def enumerate_posets(n: int) -> List[OrderedStructure]:
    """Every poset on 0..n-1 with the index order as a linear extension."""
    forward = list(combinations(range(n), 2))
    out = []
    for mask in range(1 << len(forward)):
        strict = {p for bit, p in enumerate(forward) if mask >> bit & 1}
        if all((x, z) in strict for x, y in strict for y2, z in strict if y == y2):
            out.append(poset(n, strict, add_loops=True))
    return out


def enumerate_edigs(n: int) -> List[OrderedStructure]:
    """Every reflexive digraph on 0..n-1 whose arcs point forward."""
    forward = list(combinations(range(n), 2))
    return [
        reflexive_digraph(n, [p for bit, p in enumerate(forward) if mask >> bit & 1], add_loops=True)
        for mask in range(1 << len(forward))
    ]


def _pipeline_task(task) -> Tuple[str, dict]:
    a, b, c, max_colorings = task
    try:
        return "ok", transfer_pipeline(a, b, c, max_colorings=max_colorings).to_dict()
    except InputError as e:
        return "skipped", {"detail": e.detail}
    except BudgetExceededError as e:
        return "budget", {"detail": e.detail}


def sweep(
    max_a: int = 2,
    max_b: int = 3,
    max_c: int = 4,
    workers: int = 1,
    max_colorings: Optional[int] = None,
) -> dict:
    """Run the pipeline on every (A, B, C) up to the given sizes and aggregate."""
    a_list = [p for n in range(1, max_a + 1) for p in enumerate_posets(n)]
    b_list = [p for n in range(1, max_b + 1) for p in enumerate_posets(n)]
    c_list = [g for n in range(1, max_c + 1) for g in enumerate_edigs(n)]
    tasks = [(a, b, c, max_colorings) for a in a_list for b in b_list for c in c_list]
    if workers > 1:
        with mp.Pool(processes=workers) as pool:
            outcomes = pool.map(_pipeline_task, tasks, chunksize=max(1, len(tasks) // (4 * workers)))
    else:
        outcomes = [_pipeline_task(t) for t in tasks]
    totals = {
        "instances": len(tasks),
        "skipped": 0,
        "budget_exhausted": 0,
        "closure_failures": 0,
        "completed": 0,
        "colorings": 0,
        "chi_prime_witnesses": 0,
        "transferred": 0,
    }
    for status, data in outcomes:
        if status == "skipped":
            totals["skipped"] += 1
        elif status == "budget":
            totals["budget_exhausted"] += 1
        elif data["stage"] == "closure_failed":
            totals["closure_failures"] += 1
        else:
            totals["completed"] += 1
            for key in ("colorings", "chi_prime_witnesses", "transferred"):
                totals[key] += data[key]
    totals["ok"] = totals["chi_prime_witnesses"] == totals["transferred"]
    return totals
