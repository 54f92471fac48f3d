"""Specialization forcing on finite trees and the linked counterexample poset.

A condition of ``P(T)`` is a finite partial colouring of tree nodes that is
injective on chains; stronger conditions are larger maps.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import InvalidCondition, NoSeparator, OverflowCap, PreconditionFailed
from .poset import FinitePoset, from_leq


# trees ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FiniteTree:
    """Rooted tree given by a parent tuple (``None`` for the root).

    ``limit_levels`` marks the levels that play the part of limit levels.
    """

    parent: tuple
    limit_levels: frozenset = frozenset()
    level: tuple = field(init=False)
    anc: tuple = field(init=False)  # strict ancestors as bitmasks
    desc: tuple = field(init=False)
    _cache: dict = field(init=False, repr=False)

    def __post_init__(self):
        parent = tuple(self.parent)
        n = len(parent)
        roots = [i for i, p in enumerate(parent) if p is None]
        if n and len(roots) != 1:
            raise PreconditionFailed(f"a tree needs exactly one root, found {len(roots)}")
        level = [None] * n
        anc = [0] * n
        for i in range(n):
            path = []
            j = i
            while j is not None:
                if not 0 <= j < n:
                    raise PreconditionFailed(f"parent {j} outside the tree")
                if level[j] is not None:
                    break
                if j in path:
                    raise PreconditionFailed(f"parent map has a cycle through {j}")
                path.append(j)
                j = parent[j]
            base_lvl, base_anc = (-1, 0) if j is None else (level[j], anc[j] | 1 << j)
            for k in reversed(path):
                base_lvl += 1
                level[k] = base_lvl
                anc[k] = base_anc
                base_anc |= 1 << k
        desc = [0] * n
        for i in range(n):
            m = anc[i]
            while m:
                low = m & -m
                desc[low.bit_length() - 1] |= 1 << i
                m ^= low
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "limit_levels", frozenset(self.limit_levels))
        object.__setattr__(self, "level", tuple(level))
        object.__setattr__(self, "anc", tuple(anc))
        object.__setattr__(self, "desc", tuple(desc))
        object.__setattr__(self, "_cache", {})

    @property
    def n(self) -> int:
        return len(self.parent)

    @property
    def height(self) -> int:
        return max(self.level) + 1 if self.parent else 0

    def lt(self, a: int, b: int) -> bool:
        return bool(self.anc[b] >> a & 1)

    def comparable(self, a: int, b: int) -> bool:
        return a == b or self.lt(a, b) or self.lt(b, a)

    def nodes_at(self, lvl: int) -> list[int]:
        return [i for i in range(self.n) if self.level[i] == lvl]

    def below_level(self, lvl: int) -> int:
        """Mask of the nodes in ``T_{<lvl}``."""
        m = 0
        for i in range(self.n):
            if self.level[i] < lvl:
                m |= 1 << i
        return m

    def pred_at(self, t: int, lvl: int) -> int:
        if lvl > self.level[t]:
            raise PreconditionFailed(f"node {t} has no predecessor at level {lvl}")
        while self.level[t] > lvl:
            t = self.parent[t]
        return t

    def is_nonsplitting(self) -> bool:
        return not splitting_pairs(self)

    def to_json(self) -> str:
        d = {"nodes": self.n, "parent": list(self.parent)}
        if self.limit_levels:
            d["limit_levels"] = sorted(self.limit_levels)
        return json.dumps(d)


def tree_from_json(text: str) -> FiniteTree:
    d = json.loads(text)
    parent = d["parent"]
    if len(parent) != d.get("nodes", len(parent)):
        raise PreconditionFailed("'nodes' disagrees with the parent list")
    return FiniteTree(tuple(parent), frozenset(d.get("limit_levels", ())))


def splitting_pairs(T: FiniteTree) -> list[tuple[int, int]]:
    """Distinct nodes on a limit level with the same parent."""
    out = []
    for lvl in sorted(T.limit_levels):
        seen = {}
        for t in T.nodes_at(lvl):
            p = T.parent[t]
            if p in seen:
                out.append((seen[p], t))
            else:
                seen[p] = t
    return out


def random_tree(rng: random.Random, max_nodes: int = 40, max_height: int = 8,
                limit_levels: Iterable[int] | None = None, branching: int = 3,
                min_nodes: int = 1) -> FiniteTree:
    """Random tree that does not split at its limit levels.

    Retries until the tree has ``min_nodes`` nodes and at least one populated
    limit level.
    """
    for _ in range(10_000):
        T = _random_tree_once(rng, max_nodes, max_height, limit_levels, branching)
        if T.n >= min_nodes and T.limit_levels:
            return T
    raise PreconditionFailed("could not generate a tree with the requested shape")


def _random_tree_once(rng, max_nodes, max_height, limit_levels, branching) -> FiniteTree:
    height = rng.randint(2, max_height)
    if limit_levels is None:
        pool = list(range(1, height))
        levels = set(rng.sample(pool, rng.randint(1, max(1, len(pool) // 2))))
    else:
        levels = set(limit_levels)
    parent = [None]
    frontier = [0]
    for lvl in range(1, height):
        nxt = []
        for p in frontier:
            k = 1 if lvl in levels else rng.randint(0, branching)
            for _ in range(k):
                if len(parent) >= max_nodes:
                    break
                parent.append(p)
                nxt.append(len(parent) - 1)
        if not nxt:
            break
        frontier = nxt
    T = FiniteTree(tuple(parent))
    return FiniteTree(tuple(parent), frozenset(l for l in levels if 0 < l < T.height))


def rooted_trees(max_nodes: int) -> list[FiniteTree]:
    """One representative of every rooted tree shape with at most ``max_nodes`` nodes."""
    shapes = {1: [()]}  # shape = sorted tuple of child shapes

    def forests(total: int, max_shape) -> list[tuple]:
        if total == 0:
            return [()]
        out = []
        for size in range(1, total + 1):
            for s in shapes.get(size, []):
                if max_shape is not None and (size, s) > max_shape:
                    continue
                for rest in forests(total - size, (size, s)):
                    out.append(((size, s),) + rest)
        return out

    for n in range(2, max_nodes + 1):
        shapes[n] = [tuple(f) for f in forests(n - 1, None)]
    trees = []
    for n in range(1, max_nodes + 1):
        for s in shapes[n]:
            parent = [None]

            def grow(shape, at):
                for _, child in shape:
                    parent.append(at)
                    grow(child, len(parent) - 1)

            grow(s, 0)
            trees.append(FiniteTree(tuple(parent)))
    return trees


# conditions ----------------------------------------------------------------------

class SpecCondition(NamedTuple):
    """Sorted ``(node, colour)`` items of a partial colouring."""

    items: tuple

    @property
    def dom(self) -> tuple[int, ...]:
        return tuple(t for t, _ in self.items)

    def as_dict(self) -> dict:
        return dict(self.items)

    def __str__(self):
        return "{" + ", ".join(f"{t}:{c}" for t, c in self.items) + "}"


def pt_leq(p: SpecCondition, q: SpecCondition) -> bool:
    """``p`` is stronger than ``q`` (reversed inclusion)."""
    return set(q.items) <= set(p.items)


def _chain_clash(T: FiniteTree, assignment: Mapping[int, int]):
    by_colour: dict = {}
    for t, c in assignment.items():
        by_colour.setdefault(c, []).append(t)
    for c, nodes in by_colour.items():
        for a, b in itertools.combinations(sorted(nodes), 2):
            if T.lt(a, b) or T.lt(b, a):
                return (a, b)
    return None


def pt_validate(T: FiniteTree, assignment) -> SpecCondition:
    """Accept a partial colouring that is injective on chains."""
    if isinstance(assignment, SpecCondition):
        assignment = assignment.as_dict()
    assignment = dict(assignment)
    for t, c in assignment.items():
        if not 0 <= t < T.n:
            raise PreconditionFailed(f"node {t} is not in the tree")
        if not isinstance(c, int) or c < 0:
            raise PreconditionFailed(f"colour {c!r} of node {t} is not a natural")
    clash = _chain_clash(T, assignment)
    if clash is not None:
        raise InvalidCondition(f"nodes {clash[0]} < {clash[1]} share a colour", clash)
    return SpecCondition(tuple(sorted(assignment.items())))


def _masks(T: FiniteTree, s: SpecCondition):
    got = T._cache.get(s)
    if got is None:
        dom = 0
        by_colour: dict = {}
        cone: dict = {}
        for t, c in s.items:
            dom |= 1 << t
            by_colour[c] = by_colour.get(c, 0) | 1 << t
            cone[c] = cone.get(c, 0) | T.anc[t] | T.desc[t]
        got = (dom, by_colour, cone)
        if len(T._cache) > 1 << 16:
            T._cache.clear()
        T._cache[s] = got
    return got


def pt_compatible(T: FiniteTree, s0: SpecCondition, s1: SpecCondition) -> bool:
    """``s0 | s1`` is a function and stays injective on chains."""
    d0, m0, k0 = _masks(T, s0)
    d1, m1, k1 = _masks(T, s1)
    for c, nodes in m0.items():
        other = m1.get(c, 0)
        # shared nodes must carry the same colour on both sides
        if nodes & d1 & ~other:
            return False
        if other & k0[c]:
            return False
    return True


def pt_union(T: FiniteTree, s0: SpecCondition, s1: SpecCondition) -> SpecCondition:
    d = s0.as_dict()
    for t, c in s1.items:
        if d.get(t, c) != c:
            raise InvalidCondition(f"node {t} coloured {d[t]} and {c}", (t, t))
        d[t] = c
    return pt_validate(T, d)


def pt_enumerate(T: FiniteTree, max_dom: int, color_bound: int, cap: int = 200_000) -> list[SpecCondition]:
    """Valid conditions with ``|dom| <= max_dom`` and colours below ``color_bound``,
    ordered by domain size, then domain, then colours."""
    out = [SpecCondition(())]
    if color_bound <= 0:
        return out
    for k in range(1, min(max_dom, T.n) + 1):
        for dom in itertools.combinations(range(T.n), k):
            for cols in itertools.product(range(color_bound), repeat=k):
                a = dict(zip(dom, cols))
                if _chain_clash(T, a) is None:
                    out.append(SpecCondition(tuple(zip(dom, cols))))
                    if len(out) > cap:
                        raise OverflowCap(f"more than {cap} conditions")
    return out


class ExtensionOracle:
    """Brute-force common-extension search over an enumerated fragment.

    Keeps, for every ``(node, colour)`` item, the bitset of fragment
    conditions containing it; the extensions of ``s`` are the AND over its
    items.
    """

    def __init__(self, T: FiniteTree, max_dom: int, color_bound: int):
        self.T = T
        self.fragment = pt_enumerate(T, max_dom, color_bound)
        self._item_bits: dict = {}
        for i, s in enumerate(self.fragment):
            for item in s.items:
                self._item_bits[item] = self._item_bits.get(item, 0) | 1 << i
        self._full = (1 << len(self.fragment)) - 1
        self._ext: dict = {}

    def extensions(self, s: SpecCondition) -> int:
        got = self._ext.get(s)
        if got is None:
            got = self._full
            for item in s.items:
                got &= self._item_bits.get(item, 0)
            self._ext[s] = got
        return got

    def compatible(self, s0: SpecCondition, s1: SpecCondition) -> bool:
        return bool(self.extensions(s0) & self.extensions(s1))


def tree_reduct_refuter(T: FiniteTree, q: SpecCondition, t: int, beta: int) -> SpecCondition:
    """``q`` together with colour 0 at the level-``beta`` predecessor of ``t``.

    The result extends ``q`` and clashes with ``{t: 0}``, so ``q`` is not a
    reduct of ``{t: 0}`` into the part of the tree below ``beta``.
    """
    q = pt_validate(T, q)
    for s, c in q.items:
        if T.level[s] >= beta:
            raise PreconditionFailed(f"dom(q) not below level {beta}: node {s} has level {T.level[s]}")
        if c == 0 and T.lt(s, t):
            raise PreconditionFailed(f"q colours {s} < {t} with 0")
    if T.level[t] <= beta:
        # at level beta the predecessor is t itself and r would extend {t: 0}
        raise PreconditionFailed(f"level of {t} is {T.level[t]}, need more than {beta}")
    u = T.pred_at(t, beta)
    return pt_validate(T, dict(q.items) | {u: 0})


# the linked poset --------------------------------------------------------------------

class LinkedCondition(NamedTuple):
    s: tuple  # binary strings of length < lam
    a: frozenset  # strings of length lam from X

    def __str__(self):
        seq = ",".join(f'"{x}"' for x in self.s)
        return f"<({seq}), {{{','.join(sorted(self.a))}}}>"


def is_prefix(u: str, x: str) -> bool:
    return x.startswith(u)


def linked_leq(p: LinkedCondition, q: LinkedCondition) -> bool:
    """``p <= q``: ``s_q`` is an initial segment of ``s_p``, ``a_q`` is inside ``a_p``,
    and no new entry of ``s_p`` is an initial segment of a member of ``a_q``."""
    n_q = len(q.s)
    if len(p.s) < n_q or p.s[:n_q] != q.s or not q.a <= p.a:
        return False
    return not any(is_prefix(u, x) for u in p.s[n_q:] for x in q.a)


@dataclass(frozen=True)
class LinkedFragment:
    lam: int
    X: tuple
    n_cap: int
    a_cap: int

    def __post_init__(self):
        object.__setattr__(self, "X", tuple(sorted(set(self.X))))
        if self.lam > 6:
            raise PreconditionFailed("lambda must be at most 6")
        if len(self.X) > 16:
            raise PreconditionFailed("X may hold at most 16 strings")
        for x in self.X:
            if len(x) != self.lam or set(x) - {"0", "1"}:
                raise PreconditionFailed(f"{x!r} is not a binary string of length {self.lam}")

    def strings(self) -> list[str]:
        out = [""]
        for k in range(1, self.lam):
            out.extend("".join(b) for b in itertools.product("01", repeat=k))
        return out

    def elements(self):
        strs = self.strings()
        subsets = [frozenset(c) for k in range(min(self.a_cap, len(self.X)) + 1)
                   for c in itertools.combinations(self.X, k)]
        for n in range(self.n_cap + 1):
            for s in itertools.product(strs, repeat=n):
                for a in subsets:
                    yield LinkedCondition(tuple(s), a)

    def size(self) -> int:
        m = 2 ** self.lam - 1
        seqs = sum(m ** n for n in range(self.n_cap + 1))
        subs = sum(_binom(len(self.X), k) for k in range(min(self.a_cap, len(self.X)) + 1))
        return seqs * subs

    def contains(self, p: LinkedCondition) -> bool:
        return (len(p.s) <= self.n_cap and len(p.a) <= self.a_cap and p.a <= set(self.X)
                and all(len(u) < self.lam for u in p.s))

    def common_extension(self, p: LinkedCondition, q: LinkedCondition) -> LinkedCondition | None:
        """Exhaustive scan of the fragment for some ``z <= p, q``."""
        for z in self.elements():
            if linked_leq(z, p) and linked_leq(z, q):
                return z
        return None


def _binom(n, k):
    from math import comb
    return comb(n, k)


def build_linked_poset(lam: int, X: Iterable[str], n_cap: int = 2, a_cap: int = 2,
                       cap: int = 4096) -> tuple[LinkedFragment, FinitePoset]:
    frag = LinkedFragment(lam, tuple(X), n_cap, a_cap)
    if frag.size() > cap:
        raise OverflowCap(f"fragment would have {frag.size()} elements, cap {cap}")
    elems = list(frag.elements())
    P = from_leq(len(elems), lambda i, j: linked_leq(elems[i], elems[j]), labels=elems)
    return frag, P


def separating_length(x: str, a: Iterable[str]) -> int:
    """Least ``alpha`` with ``x[:alpha] != y[:alpha]`` for every ``y`` in ``a``."""
    best = 0
    for y in a:
        k = 0
        while k < len(x) and x[k] == y[k]:
            k += 1
        best = max(best, k + 1)
    return best


def linked_incompatible_syntactic(r: LinkedCondition, x: str) -> bool:
    """``r`` clashes with ``<(), {x}>`` exactly when some entry of ``s_r`` is an initial segment of ``x``."""
    return any(is_prefix(u, x) for u in r.s)


def linked_reduct_refuter(frag: LinkedFragment, q: LinkedCondition, x: str) -> LinkedCondition:
    """Append ``x`` cut at the least separating length to ``s_q``."""
    if x in q.a:
        raise PreconditionFailed(f"{x} already belongs to a_q")
    if x not in frag.X:
        raise PreconditionFailed(f"{x} is not in X")
    alpha = separating_length(x, q.a)
    if alpha == 0:
        raise NoSeparator("a_q is empty, so the separating string would be empty")
    if alpha >= frag.lam:
        raise NoSeparator(f"no length below {frag.lam} separates {x} from a_q")
    return LinkedCondition(q.s + (x[:alpha],), q.a)
