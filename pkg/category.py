"""
Embeddings between ordered structures and colorings of hom-sets.

Every morphism is an embedding, hence a strictly increasing index map.
Hom-sets are materialized as lists sorted lexicographically by map, and an
omega-coloring of a hom-set is represented by the set partition it induces,
encoded as a restricted growth string aligned with that list.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from errors import BudgetExceededError, InputError
from structures import Kind, OrderedStructure


# ==============================
#  Domain Types
# ==============================
@dataclass(frozen=True)
class Embedding:
    """An increasing index map from ``source`` into ``target``."""

    source: OrderedStructure
    target: OrderedStructure
    map: Tuple[int, ...]

    def to_dict(self) -> dict:
        return {"map": list(self.map)}


@dataclass(frozen=True)
class Coloring:
    """Color ids aligned with an ordered hom-set.

    Ids are kept as given. Colorings from ``enumerate_colorings`` are
    normalized restricted growth strings; shifted ones such as a transferred
    coloring are not, so compare partitions through ``normalized()``.
    """

    homset: Tuple[Embedding, ...]
    colors: Tuple[int, ...]

    def __post_init__(self):
        if len(self.homset) != len(self.colors):
            raise InputError(
                f"Coloring has {len(self.colors)} colors for a hom-set of {len(self.homset)} embeddings"
            )

    def normalized(self) -> "Coloring":
        return Coloring(self.homset, normalize_colors(self.colors))

    @property
    def is_normalized(self) -> bool:
        return self.colors == normalize_colors(self.colors)

    def classes(self) -> List[List[int]]:
        """Hom-set positions grouped by color, in order of first appearance."""
        groups: Dict[int, List[int]] = {}
        for i, c in enumerate(self.colors):
            groups.setdefault(c, []).append(i)
        return list(groups.values())

    def to_dict(self) -> dict:
        return {"colors": list(self.colors)}


def normalize_colors(colors: Sequence) -> Tuple[int, ...]:
    """Rename color ids so first occurrences read 0, 1, 2, ..."""
    names: Dict = {}
    return tuple(names.setdefault(c, len(names)) for c in colors)


# ==============================
#  Embedding checks
# ==============================
def _check_same_category(a: OrderedStructure, b: OrderedStructure):
    if not a.same_shape(b):
        raise InputError(
            f"Structures live in different categories: {a.kind.value}{list(a.signature)} "
            f"vs {b.kind.value}{list(b.signature)}"
        )


def is_embedding(a: OrderedStructure, b: OrderedStructure, m: Sequence[int]) -> bool:
    """Check that ``m`` preserves the order and preserves and reflects every relation."""
    _check_same_category(a, b)
    m = tuple(m)
    if len(m) != a.n or any(v < 0 or v >= b.n for v in m):
        return False
    if any(x >= y for x, y in zip(m, m[1:])):
        return False
    for fam_a, fam_b in zip(a.relations, b.relations):
        if any(tuple(m[v] for v in t) not in fam_b for t in fam_a):
            return False
        preimage = {v: i for i, v in enumerate(m)}
        for t in fam_b:
            if all(v in preimage for v in t) and tuple(preimage[v] for v in t) not in fam_a:
                return False
    if a.kind == Kind.ORDERED_METRIC:
        for x, y in combinations(range(a.n), 2):
            if b.distances[m[x]][m[y]] != a.distances[x][y]:
                return False
    return True


@lru_cache(maxsize=1024)
def _tuples_by_max(s: OrderedStructure) -> Tuple[Tuple[Tuple[int, Tuple[int, ...]], ...], ...]:
    """For each vertex v, the (family, tuple) pairs whose largest entry is v."""
    buckets: List[List[Tuple[int, Tuple[int, ...]]]] = [[] for _ in range(s.n)]
    for k, fam in enumerate(s.relations):
        for t in sorted(fam):
            if t:
                buckets[max(t)].append((k, t))
    return tuple(tuple(b) for b in buckets)


class EmbeddingSearch:
    """Backtracking search for increasing embeddings, in lexicographic order.

    A partial map is extended one source vertex at a time. Source tuples are
    checked as soon as their largest vertex is placed; target tuples are
    checked when their largest vertex becomes the newest image point.
    """

    def __init__(self, a: OrderedStructure, b: OrderedStructure):
        _check_same_category(a, b)
        self.a = a
        self.b = b
        self.a_by_max = _tuples_by_max(a)
        self.b_by_max = _tuples_by_max(b)
        self.metric = a.kind == Kind.ORDERED_METRIC

    def _consistent(self, m: List[int], preimage: Dict[int, int]) -> bool:
        i = len(m) - 1
        t = m[i]
        b_rels = self.b.relations
        a_rels = self.a.relations
        for k, tup in self.a_by_max[i]:
            if tuple(m[v] for v in tup) not in b_rels[k]:
                return False
        for k, tup in self.b_by_max[t]:
            if all(v in preimage for v in tup) and tuple(preimage[v] for v in tup) not in a_rels[k]:
                return False
        if self.metric:
            da, db = self.a.distances, self.b.distances
            for j in range(i):
                if db[m[j]][t] != da[j][i]:
                    return False
        return True

    def maps(self) -> Iterator[Tuple[int, ...]]:
        n, size = self.a.n, self.b.n
        if n > size:
            return
        m: List[int] = []
        preimage: Dict[int, int] = {}

        def extend(start: int):
            i = len(m)
            if i == n:
                yield tuple(m)
                return
            for t in range(start, size - (n - i) + 1):
                m.append(t)
                preimage[t] = i
                if self._consistent(m, preimage):
                    yield from extend(t + 1)
                del preimage[t]
                m.pop()

        yield from extend(0)


@lru_cache(maxsize=4096)
def _hom(a: OrderedStructure, b: OrderedStructure) -> Tuple[Embedding, ...]:
    return tuple(Embedding(a, b, m) for m in EmbeddingSearch(a, b).maps())


def enumerate_embeddings(a: OrderedStructure, b: OrderedStructure) -> List[Embedding]:
    """hom(A, B) sorted lexicographically by map."""
    return list(_hom(a, b))


def hom_maps(a: OrderedStructure, b: OrderedStructure) -> List[Tuple[int, ...]]:
    return [e.map for e in _hom(a, b)]


def has_embedding(a: OrderedStructure, b: OrderedStructure) -> bool:
    """True as soon as one embedding A -> B is found."""
    return next(EmbeddingSearch(a, b).maps(), None) is not None


def identity(a: OrderedStructure) -> Embedding:
    return Embedding(a, a, tuple(range(a.n)))


def compose(f: Embedding, g: Embedding) -> Embedding:
    """First ``f`` then ``g``: the map is g.map after f.map."""
    if f.target != g.source:
        raise InputError("Cannot compose: target of the first embedding is not the source of the second")
    return Embedding(f.source, g.target, tuple(g.map[v] for v in f.map))


def embedding_from_map(a: OrderedStructure, b: OrderedStructure, m: Sequence[int]) -> Embedding:
    """Wrap a user-supplied map, rejecting anything that is not an embedding."""
    if not is_embedding(a, b, m):
        raise InputError(f"Map {list(m)} is not an embedding of {a.kind.value}")
    return Embedding(a, b, tuple(m))


# ==============================
#  Set partitions of hom-sets
# ==============================
def check_rgs(prefix: Sequence[int]) -> Tuple[int, ...]:
    prefix = tuple(prefix)
    top = -1
    for c in prefix:
        if c < 0 or c > top + 1:
            raise InputError(f"Not a restricted growth string: {list(prefix)}")
        top = max(top, c)
    return prefix


@lru_cache(maxsize=None)
def _completions(remaining: int, blocks: int) -> int:
    if remaining == 0:
        return 1
    return blocks * _completions(remaining - 1, blocks) + _completions(remaining - 1, blocks + 1)


def rgs_completions(prefix: Sequence[int], length: int) -> int:
    """Number of restricted growth strings of ``length`` starting with ``prefix``."""
    prefix = check_rgs(prefix)
    if len(prefix) > length:
        return 0
    blocks = max(prefix) + 1 if prefix else 0
    return _completions(length - len(prefix), blocks)


def bell_number(n: int) -> int:
    return rgs_completions((), n)


def iter_rgs(length: int, prefix: Sequence[int] = ()) -> Iterator[Tuple[int, ...]]:
    """Restricted growth strings of ``length`` extending ``prefix``, lexicographically."""
    a = list(check_rgs(prefix))
    if len(a) > length:
        return

    def extend(blocks: int):
        if len(a) == length:
            yield tuple(a)
            return
        for c in range(blocks + 1):
            a.append(c)
            yield from extend(max(blocks, c + 1))
            a.pop()

    yield from extend(max(a) + 1 if a else 0)


def enumerate_colorings(
    homset: Sequence[Embedding],
    cap: Optional[int] = None,
    prefix: Sequence[int] = (),
) -> Iterator[Coloring]:
    """Every set partition of ``homset`` once, in restricted-growth order.

    Raises BudgetExceededError when more than ``cap`` colorings would be produced.
    """
    homset = tuple(homset)
    count = 0
    for colors in iter_rgs(len(homset), prefix):
        if cap is not None and count >= cap:
            raise BudgetExceededError(
                f"Coloring budget of {cap} exhausted on a hom-set of size {len(homset)}",
                reached=count,
                limit=cap,
            )
        count += 1
        yield Coloring(homset, colors)


# ==============================
#  Functor checks
# ==============================
def functor_preserves(functor: Callable[[OrderedStructure], OrderedStructure], objects: Iterable[OrderedStructure]) -> bool:
    """Check a functor that acts as the identity on maps.

    Identities go to identities, composites to composites, and every hom-set
    is carried bijectively onto the hom-set between the images.
    """
    objects = list(objects)
    images = {obj: functor(obj) for obj in objects}
    for obj in objects:
        if identity(images[obj]).map != identity(obj).map:
            return False
    for a in objects:
        for b in objects:
            if not a.same_shape(b):
                continue
            if hom_maps(a, b) != hom_maps(images[a], images[b]):
                return False
    for a in objects:
        for b in objects:
            if not a.same_shape(b):
                continue
            for c in objects:
                if not b.same_shape(c):
                    continue
                for f in _hom(a, b):
                    for g in _hom(b, c):
                        mapped = compose(
                            Embedding(images[a], images[b], f.map),
                            Embedding(images[b], images[c], g.map),
                        )
                        if mapped.map != compose(f, g).map or not is_embedding(images[a], images[c], mapped.map):
                            return False
    return True
