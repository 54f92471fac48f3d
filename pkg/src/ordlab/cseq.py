"""C-sequences on ordinals below epsilon_0.

For a limit ``alpha`` the club ``C_alpha`` is an increasing omega-sequence
cofinal in ``alpha`` (an omega-sequence has no limit points below its
supremum, so it is automatically closed).  For ``alpha = abar + 1`` the
sequence is the singleton ``<abar>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .errors import BudgetExceeded, PreconditionFailed, Unavoidable
from .ordinal import ONE, ZERO, Ordinal, nat, subtract_left

DEFAULT_BUDGET = 1 << 20
STEP_CACHE_SIZE = 1 << 18


class CSequence:
    """Base class.  Subclasses implement ``_limit_entry``."""

    def entry(self, alpha: Ordinal, i: int) -> Ordinal:
        if alpha.is_zero:
            raise ValueError("C_0 is undefined")
        if i < 0:
            raise IndexError(i)
        if alpha.is_successor:
            if i != 0:
                raise IndexError(f"C_{alpha} has a single entry")
            return alpha.pred()
        return self._limit_entry(alpha, i)

    def length(self, alpha: Ordinal) -> int | None:
        """1 for successors, ``None`` (order type omega) for limits."""
        if alpha.is_zero:
            return 0
        return 1 if alpha.is_successor else None

    def _limit_entry(self, alpha: Ordinal, i: int) -> Ordinal:
        raise NotImplementedError

    def position(self, alpha: Ordinal, xi: Ordinal, budget: int) -> int:
        """Index of the least entry of ``C_alpha`` that is ``>= xi``."""
        return _gallop(self, alpha, xi, budget)


def _fundamental_position(alpha: Ordinal, xi: Ordinal) -> int:
    """Closed form for the least ``i`` with ``_fundamental(alpha, i) >= xi``."""
    gamma, e = alpha.split_last()
    if xi <= gamma:
        return 0
    delta = subtract_left(gamma, xi)  # 0 < delta < w^e
    if e.is_successor:
        lead_e, lead_c = delta.terms[0]
        if lead_e != e.pred():
            return 1
        return lead_c if len(delta.terms) == 1 else lead_c + 1
    # need w^(e[i]) >= delta, i.e. e[i] > lead(delta), or equality when delta is a pure power
    lead = delta.leading_exponent
    i = _fundamental_position(e, lead)
    if _fundamental(e, i) == lead and delta.terms != ((lead, 1),):
        i += 1
    return i


def _fundamental(alpha: Ordinal, i: int) -> Ordinal:
    gamma, e = alpha.split_last()
    if e.is_successor:
        # gamma + w^(e-1) * i ; concatenation keeps CNF since e-1 < every exponent of gamma
        if i == 0:
            return gamma
        return Ordinal(gamma.terms + ((e.pred(), i),))
    sub = _fundamental(e, i)
    return Ordinal(gamma.terms + ((sub, 1),))


class StandardCSequence(CSequence):
    """Fundamental sequences: ``(gamma + w^(e+1))[i] = gamma + w^e * i`` and
    ``(gamma + w^lam)[i] = gamma + w^(lam[i])`` for limit ``lam``.

    In particular ``C_w = <0, 1, 2, ...>`` and ``C_{w*2} = <w, w+1, ...>``.
    """

    def _limit_entry(self, alpha, i):
        return _fundamental(alpha, i)

    def position(self, alpha, xi, budget):
        return _fundamental_position(alpha, xi)

    def __repr__(self):
        return "StandardCSequence()"


def standard_csequence() -> StandardCSequence:
    return StandardCSequence()


@dataclass(frozen=True)
class AvoidSet:
    members: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        for m in self.members:
            if not isinstance(m, Ordinal) or not m.is_limit:
                raise PreconditionFailed(f"avoid set member {m} is not a limit ordinal")

    def __contains__(self, a):
        return a in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self):
        return len(self.members)


class AvoidingCSequence(CSequence):
    """``base`` with every limit-level entry that lands in ``S`` bumped upward.

    Entry ``i`` is the least ordinal ``>= base[i]`` that exceeds the previous
    bumped entry and is outside ``S``.  Successors of members of ``S`` are
    never in ``S``, so each bump moves by at most one step past the floor.
    """

    def __init__(self, avoid: AvoidSet, base: CSequence | None = None):
        self.avoid = avoid if isinstance(avoid, AvoidSet) else AvoidSet(frozenset(avoid))
        self.base = base if base is not None else StandardCSequence()
        # alpha -> tuple prefix of bumped entries; tuples are replaced whole,
        # never mutated, so concurrent readers see a consistent prefix
        self._prefix: dict = {}
        self._floor = min(self.avoid.members) if self.avoid.members else None

    def _touches(self, alpha) -> bool:
        return self._floor is not None and self._floor < alpha

    def position(self, alpha, xi, budget):
        if not self._touches(alpha):
            return self.base.position(alpha, xi, budget)
        return _gallop(self, alpha, xi, budget)

    def _limit_entry(self, alpha, i):
        if not self._touches(alpha):
            return self.base.entry(alpha, i)
        done = self._prefix.get(alpha, ())
        if i < len(done):
            return done[i]
        out = list(done)
        prev = out[-1] if out else None
        for j in range(len(out), i + 1):
            v = self.base.entry(alpha, j)
            if prev is not None and v <= prev:
                v = prev.succ()
            while v in self.avoid:
                v = v.succ()
            if v >= alpha:
                raise Unavoidable(f"bumping C_{alpha}[{j}] reached {alpha}")
            out.append(v)
            prev = v
        if len(self._prefix) > 8192:
            self._prefix = {}
        self._prefix[alpha] = tuple(out)
        return out[i]

    def __repr__(self):
        return f"AvoidingCSequence({sorted(map(str, self.avoid.members))})"


def build_avoiding(avoid, base: CSequence | None = None) -> AvoidingCSequence:
    return AvoidingCSequence(avoid if isinstance(avoid, AvoidSet) else AvoidSet(frozenset(avoid)), base)


class PatchedCSequence(CSequence):
    """``base`` with explicit ``(alpha, i) -> value`` overrides.

    Used to build deliberately broken sequences for verification tests.
    """

    def __init__(self, base: CSequence, patches: dict):
        self.base = base
        self.patches = dict(patches)

    def entry(self, alpha, i):
        if (alpha, i) in self.patches:
            return self.patches[(alpha, i)]
        return self.base.entry(alpha, i)


class Position(NamedTuple):
    value: Ordinal
    position: int


def min_above(C: CSequence, alpha: Ordinal, xi: Ordinal, budget: int = DEFAULT_BUDGET) -> Position:
    """Least element of ``C_alpha`` that is ``>= xi``, with its index.

    The index is ``otp(C_alpha & xi)``.  Sequences may supply a closed form
    through ``position``; otherwise the search gallops to an upper index and
    bisects.
    """
    if not xi < alpha:
        raise PreconditionFailed(f"need xi < alpha, got {xi} >= {alpha}")
    if alpha.is_successor:
        return Position(C.entry(alpha, 0), 0)
    cache = C.__dict__.setdefault("_steps", {})
    hit = cache.get((alpha, xi))
    if hit is None:
        i = C.position(alpha, xi, budget)
        hit = Position(C.entry(alpha, i), i)
        if len(cache) > STEP_CACHE_SIZE:
            cache.clear()
        cache[(alpha, xi)] = hit
    return hit


def _gallop(C: CSequence, alpha: Ordinal, xi: Ordinal, budget: int) -> int:
    if C.entry(alpha, 0) >= xi:
        return 0
    lo, hi = 0, 1
    while C.entry(alpha, hi) < xi:
        lo, hi = hi, hi * 2
        if hi > budget:
            raise BudgetExceeded(f"no entry of C_{alpha} reaches {xi} within {budget}")
    # invariant: entry(lo) < xi <= entry(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if C.entry(alpha, mid) < xi:
            lo = mid
        else:
            hi = mid
    return hi


def min_above_gallop(C: CSequence, alpha: Ordinal, xi: Ordinal, budget: int = DEFAULT_BUDGET) -> Position:
    """``min_above`` through the generic monotone search, ignoring closed forms."""
    if alpha.is_successor:
        return Position(C.entry(alpha, 0), 0)
    i = _gallop(C, alpha, xi, budget)
    return Position(C.entry(alpha, i), i)


def min_above_linear(C: CSequence, alpha: Ordinal, xi: Ordinal, budget: int = 4096) -> Position:
    """Entry-by-entry scan; slow reference for ``min_above``."""
    if alpha.is_successor:
        return Position(C.entry(alpha, 0), 0)
    for i in range(budget):
        v = C.entry(alpha, i)
        if v >= xi:
            return Position(v, i)
    raise BudgetExceeded(f"no entry of C_{alpha} reaches {xi} within {budget}")


class Violation(NamedTuple):
    kind: str
    alpha: Ordinal
    index: int | None
    detail: str = ""


def _probe_targets(alpha: Ordinal, probes: int) -> list[Ordinal]:
    targets = []
    for k in range(probes):
        t = _fundamental(alpha, k * k)
        targets.append(t)
        targets.append(t.succ())
    return sorted(set(x for x in targets if x < alpha))


def verify_csequence(C: CSequence, arena: Iterable[Ordinal], avoid: AvoidSet | Iterable = (),
                     probes: int = 10, budget: int = 4096) -> list[Violation]:
    """Check the C-sequence clauses on every member of ``arena``.

    Looks at the first ``probes`` entries of each limit level for strict
    increase, boundedness and avoidance, and at ``probes`` cofinality targets.
    Returns the list of violations found (empty when clean).
    """
    avoid = avoid if isinstance(avoid, AvoidSet) else AvoidSet(frozenset(avoid))
    out: list[Violation] = []
    for alpha in sorted(set(arena)):
        if alpha.is_zero:
            continue
        if alpha.is_successor:
            try:
                v = C.entry(alpha, 0)
            except Exception as exc:
                out.append(Violation("successor clause", alpha, 0, repr(exc)))
                continue
            if v != alpha.pred():
                out.append(Violation("successor clause", alpha, 0, f"entry {v}"))
            if C.length(alpha) != 1:
                out.append(Violation("successor clause", alpha, 1, "more than one entry"))
            continue
        prev = None
        for i in range(probes + 1):
            v = C.entry(alpha, i)
            if not v < alpha:
                out.append(Violation("boundedness", alpha, i, f"entry {v}"))
            if prev is not None and not prev < v:
                out.append(Violation("strict increase", alpha, i, f"{prev} then {v}"))
            if v in avoid:
                out.append(Violation("avoidance", alpha, i, f"entry {v} in S"))
            prev = v
        for s in avoid:
            if s < alpha:
                try:
                    hit = min_above(C, alpha, s, budget)
                except BudgetExceeded:
                    continue
                if hit.value == s:
                    out.append(Violation("avoidance", alpha, hit.position, f"{s} in C_alpha"))
        for xi in _probe_targets(alpha, probes):
            try:
                min_above_linear(C, alpha, xi, budget)
            except BudgetExceeded:
                out.append(Violation("cofinality", alpha, None, f"nothing reaches {xi}"))
    return out
