"""
The canonical pre-adjunction between Met(S) and Pos for a finite tight set S.

For S = {0 = s_0 < s_1 < ... < s_k}:

* F sends a metric space M with spectre inside S to the poset on M x {0..k}
  where (x, i) sits below (y, j) iff i <= j and d(x, y) <= s_j - s_i; the
  point (x, i) gets index i * |M| + x.
* G sends a poset P to the metric space on the k-tuples over P ordered
  lexicographically, with d(a, b) = s_p for the least shift p making a and b
  comparable both ways along the shift, and s_k if there is none.
* Phi turns an embedding u: F(M) -> P into the embedding M -> G(P) sending x
  to (u(x, 0), ..., u(x, k - 1)); F on morphisms keeps levels.
"""
import multiprocessing as mp
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from canonical import CanonicalWitness, WitnessEngine, is_canonical_witness
from category import Coloring, Embedding, compose, enumerate_embeddings, is_embedding, normalize_colors
from errors import BudgetExceededError, InputError, InternalInconsistencyError
from structures import (
    Kind,
    OrderedStructure,
    check_positions,
    in_met_s,
    metric_from_pairs,
    ordered_metric,
    poset,
    rational_to_json,
    spectre,
    validate,
)

DEFAULT_MAX_POINTS = 4096
DEFAULT_EXTENSION_BOUND = 100000
# Full triangle-inequality validation of G(P) is cubic in its size.
VERIFY_LIMIT = 64

TightSet = Tuple[Fraction, ...]


# ==============================
#  Tight sets
# ==============================
def as_scale(values: Iterable) -> TightSet:
    """Sorted, distinct rationals starting at 0."""
    try:
        scale = tuple(Fraction(v) for v in values)
    except (TypeError, ValueError) as e:
        raise InputError(f"Malformed scale: {e}")
    if not scale or scale[0] != 0:
        raise InputError(f"Scale must start at 0, got {[str(v) for v in scale]}")
    if any(a >= b for a, b in zip(scale, scale[1:])):
        raise InputError(f"Scale must be strictly increasing, got {[str(v) for v in scale]}")
    return scale


def is_tight(values: Iterable) -> bool:
    t = as_scale(values)
    top = len(t) - 1
    for i in range(1, top + 1):
        for j in range(i, top - i + 1):
            if t[i + j] > t[i] + t[j]:
                return False
    return True


def tight_extension(values: Iterable, bound: int = DEFAULT_EXTENSION_BOUND) -> Optional[TightSet]:
    """Smallest tight superset of S inside the additive closure of S below max(S).

    The result keeps the least nonzero and the largest value of S. Returns
    None when no candidate works; raises BudgetExceededError past ``bound``
    candidates.
    """
    s = as_scale(sorted(set(Fraction(v) for v in values)))
    if len(s) < 2:
        raise InputError("tight_extension needs 0 and at least one positive value")
    top = s[-1]
    closure = set(s[1:])
    frontier = set(closure)
    while frontier:
        fresh = {a + b for a in frontier for b in s[1:] if a + b <= top} - closure
        closure |= fresh
        frontier = fresh
    extras = sorted(closure - set(s))
    tried = 0
    for size in range(len(extras) + 1):
        for added in combinations(extras, size):
            tried += 1
            if tried > bound:
                raise BudgetExceededError(
                    f"tight_extension tried {bound} candidate sets without success", reached=bound, limit=bound
                )
            candidate = tuple(sorted(set(s) | set(added)))
            if is_tight(candidate):
                return candidate
    return None


def tight_scale_for(spaces: Sequence[OrderedStructure], bound: int = DEFAULT_EXTENSION_BOUND) -> TightSet:
    """A tight scale containing every distance of ``spaces``."""
    values = {Fraction(0)}
    for m in spaces:
        values |= spectre(m)
    if len(values) < 2:
        raise InputError("tight_scale_for needs at least one positive distance")
    scale = tight_extension(values, bound)
    if scale is None:
        raise InputError(f"No tight extension of {sorted(str(v) for v in values)} inside its additive closure")
    return scale


# ==============================
#  The pre-adjunction
# ==============================
class PreAdjunction:
    """F, G, Phi and F on morphisms for one tight scale."""

    def __init__(self, scale: Iterable, max_points: int = DEFAULT_MAX_POINTS):
        self.scale = as_scale(scale)
        if len(self.scale) < 2:
            raise InputError("The scale needs at least one positive value")
        if not is_tight(self.scale):
            raise InputError(f"Scale {[str(v) for v in self.scale]} is not tight")
        self.k = len(self.scale) - 1
        self.max_points = max_points
        self._f_cache: Dict[OrderedStructure, OrderedStructure] = {}
        self._g_cache: Dict[OrderedStructure, OrderedStructure] = {}

    # ---- objects ----
    def f_obj(self, m: OrderedStructure) -> OrderedStructure:
        if m.kind != Kind.ORDERED_METRIC:
            raise InputError(f"f_obj expects an ordered_metric structure, got {m.kind.value}")
        if not in_met_s(m, self.scale):
            raise InputError("spectre(M) is not contained in the scale")
        if m in self._f_cache:
            return self._f_cache[m]
        n, s = m.n, self.scale
        leq = [
            (i * n + x, j * n + y)
            for i in range(self.k + 1)
            for j in range(i, self.k + 1)
            for x in range(n)
            for y in range(n)
            if m.distances[x][y] <= s[j] - s[i]
        ]
        result = poset((self.k + 1) * n, leq)
        if not validate(result).ok:
            raise InternalInconsistencyError(f"F(M) is not a poset: {validate(result).axioms}")
        self._f_cache[m] = result
        return result

    def g_obj(self, p: OrderedStructure, verify: Optional[bool] = None) -> OrderedStructure:
        """G(P) on the k-tuples of P, capped at ``max_points``.

        The triangle inequality and the other metric axioms are checked only
        when ``verify`` is true, or when it is None and G(P) has at most
        VERIFY_LIMIT points.
        """
        if p.kind != Kind.POSET_LE:
            raise InputError(f"g_obj expects a poset_le structure, got {p.kind.value}")
        size = p.n ** self.k
        if size > self.max_points:
            raise BudgetExceededError(
                f"G(P) would have {size} points, above the cap of {self.max_points}", reached=size, limit=self.max_points
            )
        if p in self._g_cache:
            return self._g_cache[p]
        leq = p.relations[0]
        points = list(product(range(p.n), repeat=self.k))
        rows = [[self._distance(a, b, leq) for b in points] for a in points]
        result = ordered_metric(len(points), rows)
        if verify if verify is not None else size <= VERIFY_LIMIT:
            report = validate(result)
            if not report.ok:
                raise InternalInconsistencyError(f"G(P) is not a metric space: {report.axioms}")
        self._g_cache[p] = result
        return result

    def _distance(self, a: Tuple[int, ...], b: Tuple[int, ...], leq) -> Fraction:
        k = self.k
        for shift in range(k):
            if all((a[i], b[i + shift]) in leq and (b[i], a[i + shift]) in leq for i in range(k - shift)):
                return self.scale[shift]
        return self.scale[k]

    # ---- morphisms ----
    def phi(self, m: OrderedStructure, u: Embedding) -> Embedding:
        """Phi(u): M -> G(P) for u: F(M) -> P."""
        if u.source != self.f_obj(m):
            raise InputError("phi expects an embedding whose source is F(M)")
        g = self.g_obj(u.target)
        base, n = u.target.n, m.n
        mapped = tuple(
            sum(u.map[i * n + x] * base ** (self.k - 1 - i) for i in range(self.k)) for x in range(n)
        )
        if not is_embedding(m, g, mapped):
            raise InternalInconsistencyError(f"Phi(u) = {list(mapped)} is not an embedding into G(P)")
        return Embedding(m, g, mapped)

    def f_mor(self, f: Embedding) -> Embedding:
        """F(f)(x, i) = (f(x), i)."""
        source, target = self.f_obj(f.source), self.f_obj(f.target)
        n, size = f.source.n, f.target.n
        mapped = tuple(i * size + f.map[x] for i in range(self.k + 1) for x in range(n))
        if not is_embedding(source, target, mapped):
            raise InternalInconsistencyError(f"F(f) = {list(mapped)} is not an embedding")
        return Embedding(source, target, mapped)

    # ---- axioms ----
    def cpa1_check(self, u: Embedding, f: Embedding) -> bool:
        """Phi(u) . f == Phi(u . F(f)) for f: E -> D and u: F(D) -> C."""
        d, e = f.target, f.source
        if u.source != self.f_obj(d):
            raise InputError("cpa1_check expects u: F(D) -> C where D is the target of f")
        lhs = compose(f, self.phi(d, u))
        rhs = self.phi(e, compose(self.f_mor(f), u))
        return lhs.map == rhs.map and lhs.target == rhs.target

    def cpa2_project(self, m_prime: OrderedStructure, positions: Sequence[int]) -> Tuple[int, ...]:
        """First coordinates of the points of F(M') at ``positions``."""
        positions = check_positions((self.k + 1) * m_prime.n, sorted(positions))
        return tuple(sorted({p % m_prime.n for p in positions}))

    def cpa2_check(self, m_prime: OrderedStructure, m: OrderedStructure, positions: Sequence[int]) -> bool:
        """F(f), F(g) agree on P iff f, g agree on the projection of P, for all f, g."""
        projected = self.cpa2_project(m_prime, positions)
        homs = enumerate_embeddings(m_prime, m)
        lifted = [self.f_mor(f) for f in homs]
        for (f, ff), (g, gg) in product(zip(homs, lifted), repeat=2):
            upstairs = all(ff.map[p] == gg.map[p] for p in positions)
            downstairs = all(f.map[x] == g.map[x] for x in projected)
            if upstairs != downstairs:
                return False
        return True

    # ---- witness transfer ----
    def pos_coloring(self, chi: Coloring, e: OrderedStructure, c: OrderedStructure) -> Coloring:
        """chi'(u) = chi(Phi(u)) over hom(F(E), C)."""
        homset = enumerate_embeddings(self.f_obj(e), c)
        index = {h.map: i for i, h in enumerate(chi.homset)}
        colors = []
        for u in homset:
            image = self.phi(e, u).map
            if image not in index:
                raise InputError(f"Coloring does not cover Phi(u) = {list(image)}")
            colors.append(chi.colors[index[image]])
        return Coloring(tuple(homset), normalize_colors(colors))

    def cpa_transfer_witness(
        self,
        chi: Coloring,
        wit_c: CanonicalWitness,
        e: OrderedStructure,
        d: OrderedStructure,
    ) -> CanonicalWitness:
        """Carry a Pos witness (u, P) for chi' to the Met(S) witness (Phi(u), projection of P)."""
        w = self.phi(d, wit_c.w)
        result = CanonicalWitness(w, self.cpa2_project(e, wit_c.positions))
        if not is_canonical_witness(chi, result, enumerate_embeddings(e, d)):
            raise InternalInconsistencyError(
                f"Transferred witness w={list(w.map)}, P={list(result.positions)} is not canonical for chi"
            )
        return result

    def transfer_instance(
        self, chi: Coloring, e: OrderedStructure, d: OrderedStructure, c: OrderedStructure
    ) -> Optional[CanonicalWitness]:
        """Build chi', search a Pos witness over (F(E), F(D), C) and carry it back; None if chi' has none."""
        chi_prime = self.pos_coloring(chi, e, c)
        wit_c = WitnessEngine(self.f_obj(e), self.f_obj(d), c).find(chi_prime)
        if wit_c is None:
            return None
        return self.cpa_transfer_witness(chi, wit_c, e, d)


# ==============================
#  Exhaustive sweeps
# ==============================
def enumerate_metric_spaces(n: int, scale: Sequence) -> List[OrderedStructure]:
    """All ordered metric spaces on n points with distances from the positive part of ``scale``."""
    positive = [Fraction(v) for v in scale if Fraction(v) > 0]
    pairs = list(combinations(range(n), 2))
    out = []
    for values in product(positive, repeat=len(pairs)):
        m = metric_from_pairs(n, dict(zip(pairs, values)))
        if validate(m).ok:
            out.append(m)
    return out


def sweep_scale(scale: Sequence, max_size: int, max_points: int = DEFAULT_MAX_POINTS) -> dict:
    """CPA1, CPA2, F and G validity over every space with at most ``max_size`` points."""
    adj = PreAdjunction(scale, max_points)
    spaces = [m for n in range(1, max_size + 1) for m in enumerate_metric_spaces(n, adj.scale)]
    stats = {"spaces": len(spaces), "f_obj_valid": 0, "g_obj_valid": 0,
             "cpa1_checks": 0, "cpa1_failures": 0, "cpa2_checks": 0, "cpa2_failures": 0}
    for m in spaces:
        fm = adj.f_obj(m)
        stats["f_obj_valid"] += validate(fm).ok
        stats["g_obj_valid"] += validate(adj.g_obj(fm, verify=False)).ok
    for d in spaces:
        fd = adj.f_obj(d)
        for e in spaces:
            homs = enumerate_embeddings(e, d)
            for c in spaces:
                for u in enumerate_embeddings(fd, adj.f_obj(c)):
                    for f in homs:
                        stats["cpa1_checks"] += 1
                        stats["cpa1_failures"] += not adj.cpa1_check(u, f)
            size = (adj.k + 1) * e.n
            for r in range(size + 1):
                for positions in combinations(range(size), r):
                    stats["cpa2_checks"] += 1
                    stats["cpa2_failures"] += not adj.cpa2_check(e, d, positions)
    stats["ok"] = (
        stats["f_obj_valid"] == stats["spaces"]
        and stats["g_obj_valid"] == stats["spaces"]
        and stats["cpa1_failures"] == 0
        and stats["cpa2_failures"] == 0
    )
    return {"S": [rational_to_json(v) for v in adj.scale], **stats}


def _sweep_task(task) -> dict:
    scale, max_size, max_points = task
    return sweep_scale(scale, max_size, max_points)


def sweep(
    scales: Sequence[Sequence],
    max_size: int = 2,
    workers: int = 1,
    max_points: int = DEFAULT_MAX_POINTS,
) -> dict:
    """Run ``sweep_scale`` for each scale; results keep the order of ``scales``."""
    tasks = [(tuple(Fraction(v) for v in s), max_size, max_points) for s in scales]
    if workers > 1 and len(tasks) > 1:
        with mp.Pool(processes=min(workers, len(tasks))) as pool:
            results = pool.map(_sweep_task, tasks)
    else:
        results = [_sweep_task(t) for t in tasks]
    return {"scales": results, "ok": all(r["ok"] for r in results)}
