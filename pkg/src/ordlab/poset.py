"""Finite partial orders with regular suborders and support products.

Elements are ``0..n-1``.  The order is stored as bitmasks: ``down[p]`` holds
every ``r <= p`` and ``up[p]`` every ``r >= p``.  Stronger conditions sit
lower, so ``p`` and ``q`` are compatible when ``down[p] & down[q]`` is
nonzero.  Suborders use the induced order throughout.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cliques import bits, maximal_cliques
from .errors import CycleError, OverflowCap, PreconditionFailed

ANTICHAIN_CAP = 15


@dataclass(frozen=True, eq=False)
class FinitePoset:
    n: int
    down: tuple[int, ...]
    up: tuple[int, ...]
    strict: tuple[tuple[int, int], ...]  # generating pairs as given, before closure
    top: int | None = None
    labels: tuple | None = None

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def leq(self, p: int, q: int) -> bool:
        return bool(self.down[q] >> p & 1)

    def lt(self, p: int, q: int) -> bool:
        return p != q and self.leq(p, q)

    def compat_mask(self, p: int, within: int | None = None) -> int:
        """Elements compatible with ``p``, judged inside ``within``."""
        d = self.down[p] if within is None else self.down[p] & within
        m = 0
        for r in bits(d):
            m |= self.up[r]
        return m if within is None else m & within

    def index(self, label) -> int:
        if self.labels is None:
            return label
        return self.labels.index(label)

    def __repr__(self):
        return f"FinitePoset(n={self.n}, strict={list(self.strict)}, top={self.top})"


def _mask(elems: Iterable[int]) -> int:
    m = 0
    for e in elems:
        m |= 1 << e
    return m


def build_poset(n: int, strict_pairs: Iterable[tuple[int, int]] = (), top: int | None = None,
                labels: Sequence | None = None) -> FinitePoset:
    """Reflexive-transitive closure of ``strict_pairs`` (``(a, b)`` means ``a < b``)."""
    pairs = tuple((int(a), int(b)) for a, b in strict_pairs)
    down = [1 << i for i in range(n)]
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise PreconditionFailed(f"pair {(a, b)} outside 0..{n - 1}")
        if a == b:
            raise CycleError(f"{a} < {a}")
        down[b] |= 1 << a
    # Warshall on bitmasks: if k <= j then everything below k is below j
    for k in range(n):
        for j in range(n):
            if down[j] >> k & 1:
                down[j] |= down[k]
    for j in range(n):
        for k in bits(down[j] & ~(1 << j)):
            if down[k] >> j & 1:
                raise CycleError(f"{j} and {k} lie below each other")
    up = [0] * n
    for j in range(n):
        for k in bits(down[j]):
            up[k] |= 1 << j
    if top is not None and down[top] != (1 << n) - 1:
        raise PreconditionFailed(f"{top} is not above every element")
    return FinitePoset(n, tuple(down), tuple(up), pairs, top, tuple(labels) if labels is not None else None)


def from_leq(n: int, leq, top: int | None = None, labels: Sequence | None = None) -> FinitePoset:
    """Poset from a ``leq(i, j)`` predicate that is already a partial order."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j and leq(i, j)]
    return build_poset(n, pairs, top, labels)


def greatest(P: FinitePoset) -> int | None:
    for p in range(P.n):
        if P.down[p] == P.full:
            return p
    return None


# compatibility and antichains ------------------------------------------------

def compatible(P: FinitePoset, p: int, q: int) -> bool:
    return bool(P.down[p] & P.down[q])


def common_extension(P: FinitePoset, p: int, q: int, within: int | None = None) -> int | None:
    """A common extension of ``p`` and ``q`` (inside ``within`` if given).

    The lower of the two when they are comparable, else the least index.
    """
    m = P.down[p] & P.down[q]
    if within is not None:
        m &= within
    for x in (p, q):
        if m >> x & 1:
            return x
    return (m & -m).bit_length() - 1 if m else None


def _incompat_graph(P: FinitePoset, universe: int) -> list[int]:
    adj = [0] * P.n
    for p in bits(universe):
        adj[p] = universe & ~P.compat_mask(p, universe)
    return adj


def maximal_antichains_mask(P: FinitePoset, universe: int, cap: int = ANTICHAIN_CAP) -> list[tuple[int, ...]]:
    """Maximal antichains of the suborder on ``universe`` with its induced order."""
    if universe.bit_count() > cap:
        raise OverflowCap(f"antichain enumeration over {universe.bit_count()} elements exceeds cap {cap}")
    if not universe:
        return [()]
    return maximal_cliques(_incompat_graph(P, universe), universe)


def maximal_antichains(P: FinitePoset, cap: int = ANTICHAIN_CAP) -> list[tuple[int, ...]]:
    """All sets of pairwise incompatible elements that every element meets compatibly."""
    return maximal_antichains_mask(P, P.full, cap)


def is_antichain(P: FinitePoset, elems: Sequence[int]) -> bool:
    return all(not compatible(P, a, b) for a, b in itertools.combinations(elems, 2))


def is_maximal_in(P: FinitePoset, elems: Iterable[int]) -> bool:
    reach = 0
    for a in elems:
        reach |= P.compat_mask(a)
    return reach == P.full


# suborders -----------------------------------------------------------------------

def is_suborder(Q: FinitePoset, A: Iterable[int]) -> bool:
    """Elements of ``A`` compatible in ``Q`` have a common extension inside ``A``."""
    a = _mask(A)
    for p in bits(a):
        for q in bits(a):
            if q <= p:
                continue
            m = Q.down[p] & Q.down[q]
            if m and not m & a:
                return False
    return True


def is_regular_suborder(Q: FinitePoset, A: Iterable[int], cap: int = ANTICHAIN_CAP) -> bool:
    a = _mask(A)
    if not is_suborder(Q, bits(a)):
        return False
    return all(is_maximal_in(Q, X) for X in maximal_antichains_mask(Q, a, cap))


def find_reduct(Q: FinitePoset, A: Iterable[int], q: int) -> int | None:
    """Least ``p`` in ``A`` all of whose extensions inside ``A`` are compatible with ``q``."""
    a = _mask(A)
    ok = Q.compat_mask(q)
    for p in bits(a):
        if Q.down[p] & a & ~ok == 0:
            return p
    return None


def regular_closure(Q: FinitePoset, seed: Iterable[int], cap: int = ANTICHAIN_CAP) -> tuple[int, ...]:
    """Grow ``seed`` until it is a regular suborder of ``Q``.

    Each round adds the least missing common extension of a pair, then the
    least witness against a maximal antichain that is not maximal in ``Q``.
    The output is some regular suborder containing the seed, not a least one.
    """
    a = _mask(seed)
    if a & ~Q.full:
        raise PreconditionFailed("seed is not a subset of Q")
    while True:
        grew = False
        for p in bits(a):
            for q in bits(a):
                if q <= p:
                    continue
                m = Q.down[p] & Q.down[q]
                if m and not m & a:
                    a |= m & -m
                    grew = True
        if grew:
            continue
        for X in maximal_antichains_mask(Q, a, cap):
            reach = 0
            for x in X:
                reach |= Q.compat_mask(x)
            missing = Q.full & ~reach
            if missing:
                a |= missing & -missing
                grew = True
                break
        if not grew:
            return tuple(bits(a))


# products ------------------------------------------------------------------------

def with_top(P: FinitePoset) -> tuple[FinitePoset, int]:
    """``P`` itself if it has a greatest element, else ``P`` with a formal top adjoined."""
    g = P.top if P.top is not None else greatest(P)
    if g is not None:
        if P.top == g:
            return P, g
        return FinitePoset(P.n, P.down, P.up, P.strict, g, P.labels), g
    t = P.n
    pairs = list(P.strict) + [(i, t) for i in range(P.n)]
    labels = None if P.labels is None else P.labels + ("1",)
    return build_poset(P.n + 1, pairs, t, labels), t


@dataclass(frozen=True, eq=False)
class ProductPoset(FinitePoset):
    """Support-bounded product.  ``labels[i]`` is the coordinate tuple of element ``i``."""

    factors: tuple[FinitePoset, ...] = ()
    nu: int = 0
    _lookup: dict = field(default_factory=dict, repr=False)

    def coords(self, i: int) -> tuple[int, ...]:
        return self.labels[i]

    def support(self, i: int) -> frozenset:
        return frozenset(g for g, (x, F) in enumerate(zip(self.labels[i], self.factors)) if x != F.top)

    def element(self, coords: Sequence[int]) -> int | None:
        return self._lookup.get(tuple(coords))


def support_product(factors: Sequence[FinitePoset], nu: int, cap: int = 4096) -> ProductPoset:
    """Conditions with at most ``nu`` non-top coordinates, ordered coordinatewise."""
    facs = tuple(with_top(F)[0] for F in factors)
    rest = [[x for x in range(F.n) if x != F.top] for F in facs]
    tops = tuple(F.top for F in facs)
    labels = []
    for k in range(min(nu, len(facs)) + 1):
        for supp in itertools.combinations(range(len(facs)), k):
            for vals in itertools.product(*(rest[g] for g in supp)):
                c = list(tops)
                for g, v in zip(supp, vals):
                    c[g] = v
                labels.append(tuple(c))
                if len(labels) > cap:
                    raise OverflowCap(f"support product has more than {cap} elements")
    labels.sort()
    m = len(labels)
    down = [0] * m
    up = [0] * m
    for i, ci in enumerate(labels):
        for j, cj in enumerate(labels):
            if all(F.leq(x, y) for F, x, y in zip(facs, ci, cj)):
                down[j] |= 1 << i
                up[i] |= 1 << j
    top = labels.index(tops)
    strict = tuple((i, j) for j in range(m) for i in bits(down[j]) if i != j)
    return ProductPoset(m, tuple(down), tuple(up), strict, top, tuple(labels),
                        factors=facs, nu=nu, _lookup={c: i for i, c in enumerate(labels)})


# serialisation and generation ----------------------------------------------------------

def poset_to_json(P: FinitePoset) -> str:
    return json.dumps({"n": P.n, "le": [list(p) for p in P.strict], "top": P.top})


def poset_from_json(text: str) -> FinitePoset:
    d = json.loads(text)
    return build_poset(int(d["n"]), [tuple(p) for p in d.get("le", [])], d.get("top"))


def all_posets(n: int) -> list[FinitePoset]:
    """Every labeled partial order on ``0..n-1`` (219 of them for n = 4)."""
    cand = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    seen = set()
    # a partial order is determined by its set of strict pairs; walk all
    # transitive, antisymmetric subsets by building them pair by pair
    for k in range(len(cand) + 1):
        for subset in itertools.combinations(cand, k):
            s = set(subset)
            if any((b, a) in s for a, b in s):
                continue
            if any((a, c) not in s for a, b in s for b2, c in s if b == b2):
                continue
            key = frozenset(s)
            if key not in seen:
                seen.add(key)
                out.append(build_poset(n, sorted(s)))
    return out


def random_poset(n: int, rng: random.Random, density: float | None = None) -> FinitePoset:
    """Random order compatible with a random linear extension."""
    if density is None:
        density = rng.choice([0.15, 0.3, 0.5])
    perm = list(range(n))
    rng.shuffle(perm)
    pairs = [(perm[i], perm[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    return build_poset(n, pairs)
