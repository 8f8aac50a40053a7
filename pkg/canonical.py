"""
The canonical Ramsey engine.

A canonical witness for a coloring chi of hom(A, C) is an embedding
w: B -> C together with a set P of positions of A such that, for all
f, g in hom(A, B), chi(w . f) = chi(w . g) exactly when f and g agree on P.
Restricting the abstract (Q, q) to induced substructures loses nothing:
the agreement relation only depends on the image of q.
"""
import multiprocessing as mp
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from category import (
    Coloring,
    Embedding,
    bell_number,
    compose,
    enumerate_embeddings,
    iter_rgs,
    normalize_colors,
    rgs_completions,
)
from errors import BudgetExceededError, InputError
from structures import OrderedStructure, chain, check_positions

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"


# ==============================
#  Domain Types
# ==============================
@dataclass(frozen=True)
class CanonicalWitness:
    w: Embedding
    positions: Tuple[int, ...]

    def to_dict(self) -> dict:
        return {"w": list(self.w.map), "P": list(self.positions)}


@dataclass
class CanVerdict:
    """Outcome of checking C -> (B)^A canonically over every coloring."""

    status: str
    examined: int
    total: int
    counterexample: Optional[Coloring] = None
    witnesses: Optional[List[Tuple[Tuple[int, ...], CanonicalWitness]]] = None
    chunks: int = 1

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def conclusive(self) -> bool:
        return self.status != INCONCLUSIVE

    def to_dict(self) -> dict:
        data = {
            "status": self.status,
            "holds": self.holds,
            "stats": {"colorings_examined": self.examined, "colorings_total": self.total},
            "counterexample": None,
        }
        if self.counterexample is not None:
            data["counterexample"] = {
                "colors": list(self.counterexample.colors),
                "classes": [[list(self.counterexample.homset[i].map) for i in cls] for cls in self.counterexample.classes()],
            }
        if self.witnesses is not None:
            data["witnesses"] = [{"colors": list(colors), **wit.to_dict()} for colors, wit in self.witnesses]
        return data


# ==============================
#  select and witness checking
# ==============================
def select(x: Sequence, q: Sequence[int]) -> Tuple:
    """The members of the chain ``x`` (given increasing) at positions ``q``."""
    q = check_positions(len(x), sorted(q))
    return tuple(x[i] for i in q)


def _restriction(f: Embedding, positions: Sequence[int]) -> Tuple[int, ...]:
    return tuple(f.map[p] for p in positions)


def is_canonical_witness(chi: Coloring, wit: CanonicalWitness, hom_ab: Sequence[Embedding]) -> bool:
    """Colors of w . f and restrictions f|P must induce the same partition of hom(A, B)."""
    index = {e.map: i for i, e in enumerate(chi.homset)}
    positions = tuple(wit.positions)
    color_to_key: Dict[int, Tuple[int, ...]] = {}
    key_to_color: Dict[Tuple[int, ...], int] = {}
    for f in hom_ab:
        if any(p < 0 or p >= f.source.n for p in positions):
            raise InputError(f"Witness positions {list(positions)} out of range for |A| = {f.source.n}")
        composite = compose(f, wit.w).map
        if composite not in index:
            raise InputError(f"Coloring does not cover the composite {list(composite)}")
        color = chi.colors[index[composite]]
        key = _restriction(f, positions)
        if color_to_key.setdefault(color, key) != key:
            return False
        if key_to_color.setdefault(key, color) != color:
            return False
    return True


class WitnessEngine:
    """Precomputed composition tables for repeated witness searches over one (A, B, C).

    For every w in hom(B, C), ``comp_idx[w]`` lists the hom(A, C) positions of
    w . f for f in hom(A, B). ``p_table`` maps each partition of hom(A, B)
    induced by a position set P to the first such P (by size, then lexically).
    """

    def __init__(self, a: OrderedStructure, b: OrderedStructure, c: OrderedStructure):
        self.a, self.b, self.c = a, b, c
        self.hom_ab = enumerate_embeddings(a, b)
        if not self.hom_ab:
            raise InputError("hom(A, B) is empty; canonical arrows need at least one embedding A -> B")
        self.hom_bc = enumerate_embeddings(b, c)
        self.hom_ac = enumerate_embeddings(a, c)
        index = {e.map: i for i, e in enumerate(self.hom_ac)}
        self.comp_idx: List[Tuple[int, ...]] = [
            tuple(index[tuple(w.map[v] for v in f.map)] for f in self.hom_ab) for w in self.hom_bc
        ]
        self.p_table: Dict[Tuple[int, ...], Tuple[int, ...]] = {}
        for size in range(a.n + 1):
            for positions in combinations(range(a.n), size):
                key = normalize_colors([_restriction(f, positions) for f in self.hom_ab])
                self.p_table.setdefault(key, positions)

    def search(self, colors: Sequence[int]) -> Optional[Tuple[int, Tuple[int, ...]]]:
        """(index of w in hom(B, C), P) of the first witness, or None."""
        table = self.p_table
        for wi, idx in enumerate(self.comp_idx):
            positions = table.get(normalize_colors([colors[i] for i in idx]))
            if positions is not None:
                return wi, positions
        return None

    def find(self, chi: Coloring) -> Optional[CanonicalWitness]:
        if len(chi.colors) != len(self.hom_ac):
            raise InputError(f"Coloring has {len(chi.colors)} colors but |hom(A, C)| = {len(self.hom_ac)}")
        found = self.search(chi.colors)
        if found is None:
            return None
        wi, positions = found
        return CanonicalWitness(self.hom_bc[wi], positions)


def find_canonical_witness(
    chi: Coloring, a: OrderedStructure, b: OrderedStructure, c: OrderedStructure
) -> Optional[CanonicalWitness]:
    """First witness ordered by w's hom-list index, then |P|, then P lexically."""
    return WitnessEngine(a, b, c).find(chi)


# ==============================
#  Exhaustive verification
# ==============================
@dataclass
class ChunkResult:
    examined: int
    counterexample: Optional[Tuple[int, ...]] = None
    witnesses: List[Tuple[Tuple[int, ...], Tuple[int, Tuple[int, ...]]]] = field(default_factory=list)


def _scan(engine: WitnessEngine, prefix: Tuple[int, ...], limit: int, collect: bool) -> ChunkResult:
    result = ChunkResult(0)
    if limit <= 0:
        return result
    for colors in iter_rgs(len(engine.hom_ac), prefix):
        result.examined += 1
        found = engine.search(colors)
        if found is None:
            result.counterexample = colors
            return result
        if collect:
            result.witnesses.append((colors, found))
        if result.examined >= limit:
            break
    return result


_worker_engine: Optional[WitnessEngine] = None


def _init_worker(a: OrderedStructure, b: OrderedStructure, c: OrderedStructure):
    global _worker_engine
    _worker_engine = WitnessEngine(a, b, c)


def _scan_in_worker(task: Tuple[Tuple[int, ...], int, bool]) -> ChunkResult:
    prefix, limit, collect = task
    return _scan(_worker_engine, prefix, limit, collect)


def plan_chunks(length: int, workers: int, cap: int) -> List[Tuple[Tuple[int, ...], int]]:
    """Split the restricted growth strings of ``length`` into prefix chunks.

    Returns (prefix, limit) pairs in enumeration order; the limits add up to
    min(cap, Bell(length)) so every run examines the same colorings.
    """
    depth = 0
    while depth < length and bell_number(depth) < 4 * workers:
        depth += 1
    plan = []
    start = 0
    for prefix in iter_rgs(depth):
        if start >= cap:
            break
        size = rgs_completions(prefix, length)
        plan.append((prefix, min(size, cap - start)))
        start += size
    return plan


def verify_can_arrow(
    a: OrderedStructure,
    b: OrderedStructure,
    c: OrderedStructure,
    max_colorings: Optional[int] = None,
    workers: int = 1,
    collect_witnesses: bool = False,
) -> CanVerdict:
    """Check every coloring of hom(A, C) for a canonical witness.

    The reported counterexample is the first in restricted-growth order and the
    examined count stops there, whatever the number of workers.
    """
    engine = WitnessEngine(a, b, c)
    total = bell_number(len(engine.hom_ac))
    cap = total if max_colorings is None else max_colorings
    if cap < 1:
        raise InputError(f"Coloring budget must be positive, got {cap}")
    plan = plan_chunks(len(engine.hom_ac), max(1, workers), cap)

    if workers <= 1:
        results: Iterator[ChunkResult] = (_scan(engine, p, lim, collect_witnesses) for p, lim in plan)
        verdict = _merge(engine, results, total, cap, collect_witnesses)
    else:
        tasks = [(p, lim, collect_witnesses) for p, lim in plan]
        with mp.Pool(processes=workers, initializer=_init_worker, initargs=(a, b, c)) as pool:
            verdict = _merge(engine, pool.imap(_scan_in_worker, tasks), total, cap, collect_witnesses)
    verdict.chunks = len(plan)
    return verdict


def _merge(engine: WitnessEngine, results: Iterator[ChunkResult], total: int, cap: int, collect: bool) -> CanVerdict:
    examined = 0
    witnesses = [] if collect else None
    for chunk in results:
        examined += chunk.examined
        if collect:
            witnesses.extend(
                (colors, CanonicalWitness(engine.hom_bc[wi], positions)) for colors, (wi, positions) in chunk.witnesses
            )
        if chunk.counterexample is not None:
            counterexample = Coloring(tuple(engine.hom_ac), chunk.counterexample)
            return CanVerdict(FAILS, examined, total, counterexample, witnesses)
    status = HOLDS if examined >= total else INCONCLUSIVE
    return CanVerdict(status, examined, total, None, witnesses)


# ==============================
#  Canonization numbers for chains
# ==============================
def erc_report(
    k: int,
    m: int,
    n_max: int,
    max_colorings: Optional[int] = None,
    workers: int = 1,
) -> dict:
    """Test C_n -> (C_m)^{C_k} canonically for n = m..n_max and report the first n that holds."""
    if not 0 <= k <= m <= n_max:
        raise InputError(f"erc needs 0 <= k <= m <= n_max, got k={k}, m={m}, n_max={n_max}")
    verdicts: Dict[str, dict] = {}
    found = None
    examined = 0
    for n in range(m, n_max + 1):
        verdict = verify_can_arrow(chain(k), chain(m), chain(n), max_colorings, workers)
        examined += verdict.examined
        verdicts[str(n)] = {"status": verdict.status, "colorings_examined": verdict.examined}
        if verdict.status == INCONCLUSIVE:
            raise BudgetExceededError(
                f"Coloring budget exhausted at n={n} before a minimal n was established",
                reached=verdict.examined,
                limit=max_colorings or 0,
            )
        if verdict.holds:
            found = n
            break
    return {"k": k, "m": m, "n_max": n_max, "n": found, "verdicts": verdicts, "colorings_examined": examined}


def erc_search(
    k: int,
    m: int,
    n_max: int,
    max_colorings: Optional[int] = None,
    workers: int = 1,
) -> Optional[int]:
    """Smallest n <= n_max with C_n -> (C_m)^{C_k} canonically, or None."""
    return erc_report(k, m, n_max, max_colorings, workers)["n"]
