"""Refinement pipelines producing pairwise compatible subfamilies.

``delta_system`` finds sunflowers, ``compatible_refinement_product`` thins a
family in a support-bounded product, and ``knaster_refinement`` thins a
family of specialization conditions indexed by limit levels.  Stationarity
arguments become pigeonhole over exact fingerprints.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .cliques import max_clique
from .errors import EmptyRefinement, PreconditionFailed, SplittingDetected, WitnessInvalid
from .poset import ProductPoset, compatible
from .rhotree import WitnessData, verify_witness
from .specforcing import FiniteTree, SpecCondition, pt_compatible, pt_validate, splitting_pairs

EXHAUSTIVE_LIMIT = 20
CLIQUE_CAP = 40


class DeltaSystem(NamedTuple):
    root: frozenset
    members: tuple[int, ...]  # indices into the input family

    def sets(self, family: Sequence) -> list[frozenset]:
        return [frozenset(family[i]) for i in self.members]


@dataclass
class RefinementTrace:
    """Per-stage groupings: ``stages`` is a list of ``(name, {key: member indices})``."""

    stages: list = field(default_factory=list)
    fingerprint_count: int | None = None
    extra: dict = field(default_factory=dict)

    def add(self, name: str, groups: dict):
        self.stages.append((name, groups))


# delta systems ---------------------------------------------------------------------

def is_delta_system(family: Sequence, members: Sequence[int], root: Iterable) -> bool:
    root = frozenset(root)
    sets = [frozenset(family[i]) for i in members]
    if len(sets) == 1:
        return root <= sets[0]
    return all(a & b == root for a, b in itertools.combinations(sets, 2))


def _exhaustive(sets: list[frozenset]) -> DeltaSystem:
    if not sets:
        return DeltaSystem(frozenset(), ())
    best = DeltaSystem(sets[0], (0,))
    roots = sorted({a & b for a, b in itertools.combinations(sets, 2)}, key=lambda r: sorted(r))
    for R in roots:
        adj = [0] * len(sets)
        universe = 0
        for i, a in enumerate(sets):
            if R <= a:
                universe |= 1 << i
        for i, j in itertools.combinations(range(len(sets)), 2):
            if universe >> i & 1 and universe >> j & 1 and sets[i] & sets[j] == R:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
        cl = max_clique(adj, universe)
        if len(cl) > len(best.members):
            best = DeltaSystem(R, cl)
    return best


def _greedy(sets: list[frozenset], idx: list[int], root: frozenset) -> DeltaSystem:
    """Sunflower search: pairwise disjoint residues, or recurse on the most
    frequent residual element; keep whichever is larger."""
    chosen, used = [], set()
    for i in idx:
        res = sets[i] - root
        if not res & used:
            chosen.append(i)
            used |= res
    best = DeltaSystem(root, tuple(chosen))
    counts = Counter(x for i in idx for x in sets[i] - root)
    if counts:
        x = min(counts, key=lambda e: (-counts[e], e))
        if counts[x] > len(best.members):
            sub = _greedy(sets, [i for i in idx if x in sets[i]], root | {x})
            if len(sub.members) > len(best.members):
                best = sub
    return best


def largest_delta_system(family: Sequence[Iterable]) -> DeltaSystem:
    """Exact for at most ``EXHAUSTIVE_LIMIT`` sets, greedy beyond.

    The greedy search runs on the whole family and on each size class, which
    covers the usual uniformise-then-pigeonhole route.
    """
    sets = [frozenset(s) for s in family]
    if len(sets) <= EXHAUSTIVE_LIMIT:
        return _exhaustive(sets)
    best = _greedy(sets, list(range(len(sets))), frozenset())
    for size in sorted({len(s) for s in sets}):
        idx = [i for i, s in enumerate(sets) if len(s) == size]
        cand = _greedy(sets, idx, frozenset())
        if len(cand.members) > len(best.members):
            best = cand
    return DeltaSystem(best.root, tuple(sorted(best.members)))


def delta_system(family: Sequence[Iterable], k: int) -> DeltaSystem | None:
    """A Delta-system with at least ``k`` members, or ``None`` if the search finds none."""
    if k <= 0:
        return DeltaSystem(frozenset(), ())
    got = largest_delta_system(family)
    return got if len(got.members) >= k else None


# the product pipeline ------------------------------------------------------------------

def product_coloring(P: ProductPoset, conditions: Sequence[int], delta: DeltaSystem) -> dict:
    """Colour pairs of Delta-system members.

    ``c(a, b)`` is the least position ``k`` of the root (in increasing order)
    where the coordinates clash, ``nu`` when ``a`` and ``b`` are compatible in
    the product, and ``nu + 1`` when no coordinate clashes but the union of
    supports is too large for the support bound.
    """
    root = sorted(delta.root)
    if len(root) > P.nu:
        raise PreconditionFailed(f"root of size {len(root)} exceeds nu = {P.nu}")
    table = {}
    for a, b in itertools.combinations(delta.members, 2):
        ca, cb = P.coords(conditions[a]), P.coords(conditions[b])
        colour = None
        for k, g in enumerate(root):
            if not compatible(P.factors[g], ca[g], cb[g]):
                colour = k
                break
        if colour is None:
            colour = P.nu if compatible(P, conditions[a], conditions[b]) else P.nu + 1
        table[(a, b)] = colour
    return table


def compatible_refinement_product(P: ProductPoset, conditions: Sequence[int],
                                  cap: int = CLIQUE_CAP) -> tuple[list[int], RefinementTrace]:
    """Delta-system on supports, colour pairs, keep the largest colour-``nu`` clique.

    Returns indices into ``conditions``.  Only the first ``cap`` members of the
    Delta-system enter the clique search.
    """
    trace = RefinementTrace()
    m = len(conditions)
    if m <= 1:
        trace.add("homogeneous", {(): list(range(m))})
        return list(range(m)), trace
    supports = [P.support(c) for c in conditions]
    delta = largest_delta_system(supports)
    members = delta.members[:cap]
    trace.add("delta", {tuple(sorted(delta.root)): list(members)})
    table = product_coloring(P, conditions, DeltaSystem(delta.root, members))
    trace.extra["coloring"] = {f"{a},{b}": c for (a, b), c in table.items()}
    pos = {a: k for k, a in enumerate(members)}
    adj = [0] * len(members)
    for (a, b), c in table.items():
        if c == P.nu:
            adj[pos[a]] |= 1 << pos[b]
            adj[pos[b]] |= 1 << pos[a]
    clique = [members[k] for k in max_clique(adj)]
    if len(clique) < 2:
        pair = next(((a, b) for a, b in itertools.combinations(range(m), 2)
                     if compatible(P, conditions[a], conditions[b])), None)
        if pair is None:
            raise EmptyRefinement("no two conditions are compatible")
        # a pair is itself a Delta-system with root the intersection of its supports
        clique = list(pair)
        trace.extra["fallback_pair"] = True
    for a, b in itertools.combinations(clique, 2):
        if not compatible(P, conditions[a], conditions[b]):
            raise AssertionError(f"refinement returned incompatible pair {a}, {b}")
    root = frozenset.intersection(*(supports[i] for i in clique))
    trace.add("homogeneous", {tuple(sorted(root)): clique})
    return clique, trace


# the Knaster pipeline ------------------------------------------------------------------

class Fingerprint(NamedTuple):
    n: int
    rho: int
    R: tuple
    d: tuple
    iota: tuple
    rbar: tuple
    c: tuple
    ts: tuple  # level-alpha predecessors of the upper part of the domain
    alpha_bar: int


def fingerprint(T: FiniteTree, w: WitnessData, alpha: int, p: SpecCondition) -> Fingerprint:
    lower = [(t, c) for t, c in p.items if T.level[t] < alpha]
    upper = [t for t, _ in p.items if T.level[t] >= alpha]
    ts = tuple(sorted({T.pred_at(u, alpha) for u in upper}))
    alpha_bar = 0
    if len(ts) > 1:
        for lvl in range(alpha):
            if len({T.pred_at(t, lvl) for t in ts}) == len(ts):
                alpha_bar = lvl
                break
        else:
            raise SplittingDetected(f"nodes {ts} at level {alpha} never separate below it")
    iota = tuple(T.pred_at(t, alpha_bar) for t in ts)
    for t in ts:
        if t not in w.r or t not in w.colors:
            raise WitnessInvalid(f"witness undefined at node {t}")
    rbar = tuple(w.r[t] for t in ts)
    c = tuple(w.colors[t] for t in ts)
    R = tuple(t for t, _ in lower)
    d = tuple(col for _, col in lower)
    levels = [T.level[t] for t in R + iota + rbar]
    # at finite scale rho can equal alpha; only rho <= alpha is guaranteed
    rho = 1 + max(levels) if levels else 0
    return Fingerprint(len(ts), rho, R, d, iota, rbar, c, ts, alpha_bar)


def _separated(T: FiniteTree, lo: tuple[int, SpecCondition, Fingerprint],
               hi: tuple[int, SpecCondition, Fingerprint]) -> bool:
    a0, p0, f0 = lo
    a1, _, f1 = hi
    if a0 == a1:
        # same group means the same lower part; distinct nodes of one level
        # have disjoint cones, so disjoint predecessor sets keep the upper parts apart
        return not set(f0.ts) & set(f1.ts)
    return all(T.level[t] < a1 for t in p0.dom)


def knaster_refinement(T: FiniteTree, w: WitnessData, conditions: Sequence[tuple[int, SpecCondition]]
                       ) -> tuple[list[int], RefinementTrace]:
    """Thin ``(alpha, p_alpha)`` pairs to a pairwise compatible subfamily.

    Groups by ``(n, rho)``, then ``(R, d, iota, rbar)``, then the colour vector
    ``c``; inside each final group keeps a greedy level-separated selection in
    increasing level order.  Returns the largest selection over all groups as
    indices into ``conditions``.
    """
    split = splitting_pairs(T)
    if split:
        raise SplittingDetected(f"nodes {split[0]} split a limit level")
    bad = verify_witness(T, w)
    if bad:
        raise WitnessInvalid(f"{bad[0].kind} at {bad[0].nodes}")
    entries = []
    for alpha, p in conditions:
        if alpha not in T.limit_levels or alpha not in w.S:
            raise PreconditionFailed(f"index {alpha} is not a limit level in S")
        p = pt_validate(T, p)
        entries.append((alpha, p, fingerprint(T, w, alpha, p)))

    trace = RefinementTrace()
    stage_keys = [
        ("n,rho", lambda f: (f.n, f.rho)),
        ("R,d,iota,rbar", lambda f: (f.n, f.rho, f.R, f.d, f.iota, f.rbar)),
        ("c", lambda f: (f.n, f.rho, f.R, f.d, f.iota, f.rbar, f.c)),
    ]
    for name, key in stage_keys:
        groups: dict = {}
        for i, (_, _, f) in enumerate(entries):
            groups.setdefault(key(f), []).append(i)
        trace.add(name, groups)
    final = trace.stages[-1][1]
    trace.fingerprint_count = len(final)

    best: list[int] = []
    selections = {}
    for k, members in final.items():
        chosen: list[int] = []
        for i in sorted(members, key=lambda i: (entries[i][0], i)):
            if all(_separated(T, entries[j], entries[i]) for j in chosen):
                chosen.append(i)
        selections[k] = chosen
        if len(chosen) > len(best):
            best = chosen
    trace.add("U", selections)
    for i, j in itertools.combinations(best, 2):
        if not pt_compatible(T, entries[i][1], entries[j][1]):
            raise AssertionError(f"refinement returned incompatible conditions {i}, {j}")
    return best, trace


def knaster_bound(m: int, fingerprint_count: int) -> int:
    return math.ceil(m / fingerprint_count) if fingerprint_count else 0
