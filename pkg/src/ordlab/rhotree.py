"""The tree of restricted code functions ``rho0(., beta) | alpha`` over a finite arena.

A node is a function with an infinite domain whenever its level is a limit,
so nodes are compared on finite probe sets: a disagreement is a sound
witness of distinctness, agreement is only a budget-bounded verdict.
Every node is stored by its canonical source, the least arena member whose
code function agrees with it on the probes of its level.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, NamedTuple

from .cseq import AvoidSet, CSequence
from .errors import NotInD, OverflowCap, PreconditionFailed
from .ordinal import OMEGA, ZERO, Ordinal, encode_seq, format_ordinal, nat, random_below
from .walks import rho0, trace

EXACT_FINITE_LEVEL = 64


@dataclass(frozen=True, order=True)
class TreeNode:
    level: Ordinal
    source: Ordinal

    @property
    def label(self) -> str:
        return f"{format_ordinal(self.level)}@{format_ordinal(self.source)}"

    def __str__(self):
        return self.label


class Verdict(NamedTuple):
    kind: str  # BELOW | ABOVE | EQUAL_ON_PROBES | DISTINCT
    witness: Ordinal | None = None


BELOW = "BELOW"
ABOVE = "ABOVE"
EQUAL = "EQUAL_ON_PROBES"
DISTINCT = "DISTINCT"


def _level_token(alpha: Ordinal) -> str:
    # decimal conversion of very large coded levels hits the int->str limit
    if alpha.is_finite:
        return format(int(alpha), "x")
    return format_ordinal(alpha)


@dataclass
class Arena:
    """Finite set ``W`` closed under walk steps, with per-level probe sets.

    ``probe_budget`` random ordinals and ``cseq_probes`` entries of
    ``C_alpha`` join ``W & alpha`` and the avoid points below ``alpha`` to form
    ``probes(alpha)``.  Levels ``<= EXACT_FINITE_LEVEL`` that are natural
    numbers are probed exhaustively.
    """

    C: CSequence
    W: tuple
    probe_budget: int = 16
    cseq_probes: int = 8
    avoid: AvoidSet = field(default_factory=AvoidSet)
    seed: int = 0
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.W = tuple(sorted(set(self.W)))
        self._members = frozenset(self.W)

    def __contains__(self, a):
        return a in self._members

    def escalated(self, factor: int = 4) -> "Arena":
        return Arena(self.C, self.W, self.probe_budget * factor, self.cseq_probes * factor,
                     self.avoid, self.seed)

    # probes ----------------------------------------------------------------
    def probes(self, alpha: Ordinal) -> tuple[Ordinal, ...]:
        key = ("probes", alpha)
        got = self._memo.get(key)
        if got is not None:
            return got
        if alpha.is_zero:
            out = ()
        elif alpha.is_finite and int(alpha) <= EXACT_FINITE_LEVEL:
            out = tuple(nat(k) for k in range(int(alpha)))
        else:
            pts = {x for x in self.W if x < alpha}
            pts.update(s for s in self.avoid if s < alpha)
            if alpha.is_successor:
                pts.add(alpha.pred())
            else:
                for i in range(self.cseq_probes):
                    v = self.C.entry(alpha, i)
                    pts.add(v)
                    if v.succ() < alpha:
                        pts.add(v.succ())
            rng = random.Random(f"{self.seed}|{_level_token(alpha)}|{self.probe_budget}")
            for _ in range(self.probe_budget):
                pts.add(random_below(alpha, rng))
            out = tuple(sorted(pts))
        self._memo[key] = out
        return out

    def code(self, xi: Ordinal, beta: Ordinal) -> tuple[int, ...]:
        codes = self._memo.setdefault("codes", {})
        got = codes.get((xi, beta))
        if got is None:
            got = codes[(xi, beta)] = rho0(self.C, xi, beta)
        return got

    def signature(self, alpha: Ordinal, beta: Ordinal) -> tuple:
        """Codes ``rho0(xi, beta)`` for ``xi`` in ``probes(alpha)``."""
        key = ("sig", alpha, beta)
        got = self._memo.get(key)
        if got is None:
            got = tuple(self.code(xi, beta) for xi in self.probes(alpha))
            self._memo[key] = got
        return got

    def level_nodes(self, alpha: Ordinal) -> dict:
        """Signature -> canonical node for every arena source ``beta >= alpha``."""
        key = ("level", alpha)
        got = self._memo.get(key)
        if got is None:
            got = {}
            for beta in self.W:
                if beta >= alpha:
                    sig = self.signature(alpha, beta)
                    if sig not in got:
                        got[sig] = TreeNode(alpha, beta)
            self._memo[key] = got
        return got


def _walk_closure(seed: Iterable[Ordinal], C: CSequence, cap: int) -> tuple:
    members = set()
    processed: list[Ordinal] = []
    queue = sorted(set(seed))
    members.update(queue)
    while queue:
        x = queue.pop()
        for y in processed + [x]:
            lo, hi = (x, y) if x <= y else (y, x)
            for step in trace(C, lo, hi).steps:
                if step not in members:
                    members.add(step)
                    queue.append(step)
                    if len(members) > cap:
                        raise OverflowCap(f"walk closure exceeded {cap} points")
        processed.append(x)
    return tuple(sorted(members))


def build_arena(seed: Iterable[Ordinal], C: CSequence, probe_budget: int = 16, *,
                avoid: AvoidSet | Iterable = (), cseq_probes: int = 8, rng_seed: int = 0,
                cap: int = 5000) -> Arena:
    avoid = avoid if isinstance(avoid, AvoidSet) else AvoidSet(frozenset(avoid))
    W = _walk_closure(seed, C, cap)
    return Arena(C, W, probe_budget, cseq_probes, avoid, rng_seed)


def node(arena: Arena, alpha: Ordinal, beta: Ordinal) -> TreeNode:
    """Canonical node for ``rho0(., beta) | alpha``."""
    if alpha > beta:
        raise PreconditionFailed(f"node needs level <= source, got {alpha} > {beta}")
    sig = arena.signature(alpha, beta)
    nodes = arena._memo.get(("level", alpha))
    if nodes is not None:
        got = nodes.get(sig)
        if got is None or got.source > beta:
            # beta lies outside the arena; it is then its own representative
            return TreeNode(alpha, beta)
        return got
    # least arena member with the same signature, without building the whole level
    for gamma in arena.W:
        if gamma > beta:
            break
        if gamma >= alpha and arena.signature(alpha, gamma) == sig:
            return TreeNode(alpha, gamma)
    return TreeNode(alpha, beta)


def root(arena: Arena) -> TreeNode:
    return node(arena, ZERO, arena.W[0])


def code_at(arena: Arena, t: TreeNode, xi: Ordinal) -> tuple[int, ...]:
    if not xi < t.level:
        raise ValueError(f"{xi} is outside the domain of {t}")
    return rho0(arena.C, xi, t.source)


def _compare_on(arena: Arena, alpha: Ordinal, b0: Ordinal, b1: Ordinal):
    if b0 == b1:
        return None
    s0, s1 = arena.signature(alpha, b0), arena.signature(alpha, b1)
    if s0 == s1:
        return None
    for xi, c0, c1 in zip(arena.probes(alpha), s0, s1):
        if c0 != c1:
            return xi
    raise AssertionError("signatures differ but no probe disagrees")


def tree_leq(arena: Arena, t0: TreeNode, t1: TreeNode) -> Verdict:
    low = min(t0.level, t1.level)
    xi = _compare_on(arena, low, t0.source, t1.source)
    if xi is not None:
        return Verdict(DISTINCT, xi)
    if t0.level < t1.level:
        return Verdict(BELOW)
    if t0.level > t1.level:
        return Verdict(ABOVE)
    return Verdict(EQUAL)


def below(arena: Arena, t0: TreeNode, t1: TreeNode) -> bool:
    return tree_leq(arena, t0, t1).kind == BELOW


# non-splitting --------------------------------------------------------------

class SplitReport(NamedTuple):
    resolved: list  # (t0, t1, level alpha < lambda where restrictions differ)
    unresolved: list  # pairs equal on probes
    violations: list


def check_nonsplitting(arena: Arena, lam: Ordinal, pairs: Iterable[tuple[TreeNode, TreeNode]]) -> SplitReport:
    if not lam.is_limit:
        raise PreconditionFailed(f"{lam} is not a limit level")
    resolved, unresolved, violations = [], [], []
    for t0, t1 in pairs:
        if t0.level != lam or t1.level != lam:
            raise PreconditionFailed("pairs must sit at the given level")
        v = tree_leq(arena, t0, t1)
        if v.kind == EQUAL:
            unresolved.append((t0, t1))
            continue
        xi = v.witness
        alpha = xi.succ()
        # restrictions to xi+1 are below t0, t1 and differ at xi
        if not alpha < lam:
            violations.append((t0, t1, f"disagreement level {alpha} not below {lam}"))
        elif code_at(arena, TreeNode(alpha, t0.source), xi) == code_at(arena, TreeNode(alpha, t1.source), xi):
            violations.append((t0, t1, f"restrictions to {alpha} agree at {xi}"))
        else:
            resolved.append((t0, t1, alpha))
    return SplitReport(resolved, unresolved, violations)


# the regressive map ------------------------------------------------------------

def in_desk_D(alpha: Ordinal) -> bool:
    """Limits above w: every finite sequence of naturals has its code below them."""
    return alpha.is_limit and alpha > OMEGA


def code_level(arena: Arena, t: TreeNode) -> int:
    return encode_seq(rho0(arena.C, t.level, t.source))


def regressive_r(arena: Arena, t: TreeNode, avoid: AvoidSet | None = None) -> TreeNode:
    """``rho0(., beta) | f`` with ``beta`` the canonical source of ``t`` and
    ``f`` the code of ``rho0(level, beta)`` read as a natural number."""
    if not in_desk_D(t.level):
        raise NotInD(f"level {t.level} is not a limit above w")
    avoid = arena.avoid if avoid is None else avoid
    if avoid.members and t.level not in avoid:
        raise PreconditionFailed(f"level {t.level} is not in S")
    f = code_level(arena, t)
    return node(arena, nat(f), t.source)


# witnesses ----------------------------------------------------------------------

@dataclass
class WitnessData:
    """``r`` maps nodes at S-levels to nodes below them; ``colors[t]`` is the
    value of ``c_{r(t)}`` at ``t``."""

    S: frozenset
    r: dict
    colors: dict


class ArenaFragment:
    """Adapter giving arena nodes the ``lt`` interface used by ``verify_witness``."""

    def __init__(self, arena: Arena, nodes: Iterable[TreeNode] = ()):
        self.arena = arena
        self.nodes = list(nodes)

    def lt(self, a, b) -> bool:
        return below(self.arena, a, b)

    def same(self, a, b) -> bool:
        return a == b or tree_leq(self.arena, a, b).kind == EQUAL


class WitnessViolation(NamedTuple):
    kind: str
    nodes: tuple
    detail: str = ""


def verify_witness(fragment, w: WitnessData) -> list[WitnessViolation]:
    """Regressiveness of ``w.r`` and chain-injectivity of each fibre colouring.

    ``fragment`` only needs ``lt(a, b)``; both arena fragments and finite trees
    qualify.
    """
    out = []
    for t, s in w.r.items():
        if not fragment.lt(s, t):
            out.append(WitnessViolation("not regressive", (t, s), f"r({t}) = {s}"))
        if t not in w.colors:
            out.append(WitnessViolation("missing colour", (t,)))
    fibres = defaultdict(list)
    for t, s in w.r.items():
        fibres[s].append(t)
    for s, fibre in fibres.items():
        for a, b in combinations(sorted(fibre, key=_sort_key), 2):
            if w.colors.get(a) != w.colors.get(b):
                continue
            if fragment.lt(a, b) or fragment.lt(b, a):
                out.append(WitnessViolation("colour not injective on chain", (a, b),
                                            f"fibre of {s}, colour {w.colors.get(a)}"))
    return out


def _sort_key(x):
    return (x.level, x.source) if isinstance(x, TreeNode) else x


def witness_from_r(arena: Arena, nodes: Iterable[TreeNode], colors=None) -> WitnessData:
    nodes = list(nodes)
    r = {t: regressive_r(arena, t) for t in nodes}
    if colors is None:
        colors = {t: 0 for t in nodes}
    return WitnessData(frozenset(t.level for t in nodes), r, dict(colors))


def chain_pairs_distinct(w: WitnessData, chain: Iterable) -> list:
    """Pairs ``(r(t), colour(t))`` along a chain must be pairwise distinct.

    Returns the colliding node pairs (empty for a valid witness).
    """
    seen = {}
    clashes = []
    for t in chain:
        if t not in w.r:
            continue
        key = (w.r[t], w.colors.get(t))
        if key in seen:
            clashes.append((seen[key], t))
        else:
            seen[key] = t
    return clashes


# the avoiding => nonstationary check ---------------------------------------------

@dataclass
class InjectivityReport:
    comparable_pairs: int = 0
    apparent: list = field(default_factory=list)
    persistent: list = field(default_factory=list)


def _same_r(arena: Arena, a: TreeNode, b: TreeNode) -> bool:
    return a.level == b.level and tree_leq(arena, a, b).kind == EQUAL


def s_level_nodes(arena: Arena, S: Iterable[Ordinal]) -> dict:
    return {a: sorted(arena.level_nodes(a).values()) for a in sorted(S) if in_desk_D(a) and a in arena}


def check_r_injective(arena: Arena, S: Iterable[Ordinal] | None = None, escalation: int = 4) -> InjectivityReport:
    """For probe-verified ``t0 <_T t1`` at S-levels, ``r(t0) != r(t1)``.

    Apparent equalities are re-examined on an arena with ``escalation`` times
    as many probes; those surviving are reported as persistent.
    """
    S = sorted(arena.avoid if S is None else S)
    report = InjectivityReport()
    levels = s_level_nodes(arena, S)
    ordered = list(levels)
    for j, a1 in enumerate(ordered):
        for t1 in levels[a1]:
            r1 = regressive_r(arena, t1, AvoidSet(frozenset()))
            for a0 in ordered[:j]:
                t0 = node(arena, a0, t1.source)
                if not below(arena, t0, t1):
                    continue
                report.comparable_pairs += 1
                r0 = regressive_r(arena, t0, AvoidSet(frozenset()))
                if _same_r(arena, r0, r1):
                    report.apparent.append((t0, t1))
    if report.apparent:
        big = arena.escalated(escalation)
        for t0, t1 in report.apparent:
            u0, u1 = node(big, t0.level, t0.source), node(big, t1.level, t1.source)
            if not below(big, u0, u1):
                continue
            if _same_r(big, regressive_r(big, u0, AvoidSet(frozenset())),
                       regressive_r(big, u1, AvoidSet(frozenset()))):
                report.persistent.append((t0, t1))
    return report


# emission -------------------------------------------------------------------------

def emit(arena: Arena, levels: Iterable[Ordinal]) -> tuple[list[TreeNode], list[tuple[TreeNode, TreeNode]]]:
    """Canonical nodes at the given levels and the covering edges between them."""
    levels = sorted(set(levels))
    nodes = []
    by_level = {}
    for a in levels:
        by_level[a] = sorted(arena.level_nodes(a).values())
        nodes.extend(by_level[a])
    edges = []
    for j, a in enumerate(levels):
        if j == 0:
            continue
        lower = levels[j - 1]
        for t in by_level[a]:
            edges.append((node(arena, lower, t.source), t))
    return nodes, edges


def to_dot(nodes, edges) -> str:
    lines = ["digraph T {", "  rankdir=BT;"]
    for t in nodes:
        lines.append(f'  "{t.label}";')
    for a, b in edges:
        lines.append(f'  "{a.label}" -> "{b.label}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
