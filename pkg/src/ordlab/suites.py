"""Randomized acceptance suites.

Each suite returns a ``SuiteResult``; ``failures`` lists concrete
counterexamples (capped) so a red run is debuggable.  All randomness flows
from the ``seed`` argument.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from . import ordinal as O
from .cseq import AvoidSet, build_avoiding, standard_csequence, verify_csequence
from .errors import NoSeparator, OverflowCap
from .ordinal import OMEGA, Ordinal, omega_power, random_below
from .poset import (all_posets, find_reduct, is_regular_suborder, is_suborder, random_poset,
                    regular_closure, support_product)
from .refine import compatible_refinement_product, knaster_bound, knaster_refinement
from .rhotree import WitnessData, build_arena, check_nonsplitting, check_r_injective
from .specforcing import (ExtensionOracle, FiniteTree, LinkedCondition, LinkedFragment,
                          linked_incompatible_syntactic, linked_leq, linked_reduct_refuter,
                          pt_compatible, pt_enumerate, pt_validate, random_tree, rooted_trees,
                          tree_reduct_refuter)
from .walks import rho0, trace

DEFAULT_SEED = 20240601
MAX_REPORTED = 10
BELOW_W3 = omega_power(3)


@dataclass
class SuiteResult:
    number: int
    name: str
    passed: bool = True
    checked: int = 0
    failures: list = field(default_factory=list)
    elapsed: float = 0.0
    time_limit: float | None = None
    seed: int = DEFAULT_SEED
    notes: dict = field(default_factory=dict)

    def fail(self, what):
        self.passed = False
        if len(self.failures) < MAX_REPORTED:
            self.failures.append(what)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        limit = f" (limit {self.time_limit:g}s)" if self.time_limit else ""
        extra = "".join(f" {k}={v}" for k, v in self.notes.items())
        return f"[{verdict}] {self.number:2d} {self.name}: {self.checked} checks, {self.elapsed:.2f}s{limit}{extra}"


def _timed(number: int, name: str, limit: float | None = None):
    def wrap(fn: Callable[..., SuiteResult]):
        def run(seed: int = DEFAULT_SEED, **kw) -> SuiteResult:
            res = SuiteResult(number, name, time_limit=limit, seed=seed)
            t0 = time.perf_counter()
            fn(res, random.Random(f"{seed}:{number}"), **kw)
            res.elapsed = time.perf_counter() - t0
            if limit is not None and res.elapsed >= limit:
                res.fail(f"took {res.elapsed:.2f}s, limit {limit}s")
            return res

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        run.number = number
        return run

    return wrap


def _random_limits(rng: random.Random, k: int, above=O.ZERO, limit=BELOW_W3) -> list[Ordinal]:
    out = set()
    while len(out) < k:
        a = random_below(limit, rng)
        if a.is_limit and a > above:
            out.add(a)
    return sorted(out)


# 1 -----------------------------------------------------------------------------------

@_timed(1, "regular suborder <=> suborder with reducts", 60)
def suite_regular_equivalence(res: SuiteResult, rng: random.Random, random_posets: int = 1000):
    def check(Q, A):
        res.checked += 1
        lhs = is_regular_suborder(Q, A)
        rhs = is_suborder(Q, A) and all(find_reduct(Q, A, q) is not None for q in range(Q.n))
        if lhs != rhs:
            res.fail((Q.strict, Q.n, A, lhs, rhs))

    for n in range(5):
        for Q in all_posets(n):
            for m in range(1 << n):
                check(Q, [i for i in range(n) if m >> i & 1])
    for _ in range(random_posets):
        Q = random_poset(rng.randint(1, 8), rng)
        for m in range(1 << Q.n):
            check(Q, [i for i in range(Q.n) if m >> i & 1])


# 2 -----------------------------------------------------------------------------------

@_timed(2, "walks terminate and descend", 10)
def suite_walks(res: SuiteResult, rng: random.Random, pairs: int = 10_000):
    seqs = [standard_csequence()] + [build_avoiding(_random_limits(rng, rng.randint(1, 4))) for _ in range(3)]
    for k in range(pairs):
        C = seqs[k % len(seqs)]
        a, b = sorted((random_below(BELOW_W3, rng), random_below(BELOW_W3, rng)))
        res.checked += 1
        try:
            w = trace(C, a, b, budget=1 << 16)
        except Exception as exc:  # termination within budget is part of the check
            res.fail((str(a), str(b), repr(exc)))
            continue
        steps = w.steps
        if steps[0] != b or steps[-1] != a:
            res.fail((str(a), str(b), "endpoints"))
        if any(not y < x for x, y in zip(steps, steps[1:])):
            res.fail((str(a), str(b), "not strictly decreasing"))
        if len(w.code) != len(steps) - 1:
            res.fail((str(a), str(b), "code length"))
        if rho0(C, a, a) != ():
            res.fail((str(a), "rho0(a, a) nonempty"))


# 3 -----------------------------------------------------------------------------------

@_timed(3, "level distinctness of codes")
def suite_level_distinct(res: SuiteResult, rng: random.Random, triples: int = 1000):
    seqs = [standard_csequence(), build_avoiding(_random_limits(rng, 3))]
    done = 0
    while done < triples:
        a0, a1, b = sorted(random_below(BELOW_W3, rng) for _ in range(3))
        if not a0 < a1 < b:
            continue
        done += 1
        C = seqs[done % 2]
        res.checked += 1
        if rho0(C, a0, b) == rho0(C, a1, b):
            res.fail((str(a0), str(a1), str(b)))


# 4 -----------------------------------------------------------------------------------

@_timed(4, "avoiding sequences are valid")
def suite_avoiding(res: SuiteResult, rng: random.Random, sets: int = 100):
    base = O.enumerate_bounded(BELOW_W3, 2, 3)
    for _ in range(sets):
        S = _random_limits(rng, rng.randint(1, 6))
        C = build_avoiding(S)
        arena = set(base) | set(S) | {random_below(BELOW_W3, rng) for _ in range(20)}
        res.checked += 1
        bad = verify_csequence(C, arena, S, probes=10)
        if bad:
            res.fail(([str(s) for s in S], bad[:3]))


# 5 and 6 --------------------------------------------------------------------------------

@lru_cache(maxsize=4)
def walk_arenas(seed: int = DEFAULT_SEED, count: int = 20, points: int = 320):
    """Arenas below w^3 over C-sequences avoiding 3 to 6 limits above w."""
    rng = random.Random(f"{seed}:arenas")
    out = []
    for k in range(count):
        S = _random_limits(rng, rng.randint(3, 6), above=OMEGA)
        C = build_avoiding(S)
        pts = set(S) | {random_below(BELOW_W3, rng) for _ in range(points)}
        out.append(build_arena(pts, C, 16, avoid=S, rng_seed=k))
    return tuple(out)


@_timed(5, "avoiding sequence gives an injective regressive map")
def suite_regressive(res: SuiteResult, rng: random.Random, count: int = 20):
    sizes, pairs, apparent = [], 0, 0
    for arena in walk_arenas(res.seed, count):
        rep = check_r_injective(arena)
        sizes.append(len(arena.W))
        res.checked += 1
        pairs += rep.comparable_pairs
        apparent += len(rep.apparent)
        if rep.persistent:
            res.fail([(str(a), str(b)) for a, b in rep.persistent[:3]])
    res.notes.update(mean_W=round(sum(sizes) / max(1, len(sizes))), pairs=pairs, apparent=apparent)


@_timed(6, "no splitting at limit levels")
def suite_nonsplitting(res: SuiteResult, rng: random.Random, count: int = 20):
    unresolved = 0
    for arena in walk_arenas(res.seed, count):
        for lam in arena.W:
            if not lam.is_limit:
                continue
            nodes = sorted(arena.level_nodes(lam).values())
            rep = check_nonsplitting(arena, lam, itertools.combinations(nodes, 2))
            res.checked += len(rep.resolved) + len(rep.violations)
            unresolved += len(rep.unresolved)
            for v in rep.violations:
                res.fail((str(v[0]), str(v[1]), v[2]))
    res.notes["equal_on_probes"] = unresolved


# 7 -----------------------------------------------------------------------------------

@_timed(7, "P(T) union criterion matches brute force")
def suite_pt_oracle(res: SuiteResult, rng: random.Random, max_nodes: int = 6, color_bound: int = 3,
                    max_dom: int = 3):
    for T in rooted_trees(max_nodes):
        frag = pt_enumerate(T, max_dom, color_bound)
        oracle = ExtensionOracle(T, 6, color_bound)
        for i, a in enumerate(frag):
            for b in frag[i:]:
                res.checked += 1
                if pt_compatible(T, a, b) != oracle.compatible(a, b):
                    res.fail((T.parent, str(a), str(b)))


# 8 -----------------------------------------------------------------------------------

def random_witness(T: FiniteTree, rng: random.Random) -> WitnessData:
    """Random regressive ``r`` on the limit levels with greedy chain-injective colours."""
    r, colors = {}, {}
    for t in range(T.n):
        if T.level[t] in T.limit_levels:
            r[t] = rng.choice([a for a in range(T.n) if T.lt(a, t)])
    for t in sorted(r, key=lambda t: (T.level[t], t)):
        used = {colors[u] for u in colors if r[u] == r[t] and T.comparable(u, t)}
        c = 0
        while c in used:
            c += 1
        colors[t] = c
    return WitnessData(frozenset(T.limit_levels), r, colors)


def random_spec_family(T: FiniteTree, rng: random.Random, m: int = 64, color_bound: int = 3,
                       max_low: int = 2, max_up: int = 2) -> list:
    levels = [l for l in sorted(T.limit_levels) if T.nodes_at(l)]
    out = []
    while len(out) < m:
        a = rng.choice(levels)
        low = [t for t in range(T.n) if T.level[t] < a]
        up = [t for t in range(T.n) if T.level[t] >= a]
        d = {}
        for t in rng.sample(low, rng.randint(0, min(max_low, len(low)))):
            d[t] = rng.randrange(color_bound)
        for t in rng.sample(up, rng.randint(0, min(max_up, len(up)))):
            d[t] = rng.randrange(color_bound)
        try:
            out.append((a, pt_validate(T, d)))
        except ValueError:
            continue
    return out


def union_is_condition(T: FiniteTree, p: dict, q: dict) -> bool:
    """Walks parent pointers; independent of the bitmask machinery."""
    u = dict(p)
    for t, c in q.items():
        if u.get(t, c) != c:
            return False
        u[t] = c
    for t, c in u.items():
        x = T.parent[t]
        while x is not None:
            if u.get(x) == c:
                return False
            x = T.parent[x]
    return True


@_timed(8, "Knaster refinement of specialization conditions")
def suite_knaster(res: SuiteResult, rng: random.Random, trees: int = 20, m: int = 64):
    sizes, bounds = [], []
    for _ in range(trees):
        T = random_tree(rng, max_nodes=40, max_height=8, min_nodes=10)
        w = random_witness(T, rng)
        fam = random_spec_family(T, rng, m)
        U, tr = knaster_refinement(T, w, fam)
        res.checked += 1
        bound = knaster_bound(m, tr.fingerprint_count)
        sizes.append(len(U))
        bounds.append(bound)
        for i, j in itertools.combinations(U, 2):
            if not union_is_condition(T, fam[i][1].as_dict(), fam[j][1].as_dict()):
                res.fail((T.parent, "incompatible output", i, j))
        if len(U) < 2 or len(U) < bound:
            res.fail((T.parent, f"|U| = {len(U)}, fingerprints {tr.fingerprint_count}, bound {bound}"))
    res.notes.update(U=sizes, bound=bounds)


# 9 -----------------------------------------------------------------------------------

def _brute_compatible(P, a: int, b: int) -> bool:
    ca, cb = P.coords(a), P.coords(b)
    for r in range(P.n):
        cr = P.coords(r)
        if all(F.leq(x, y) and F.leq(x, z) for F, x, y, z in zip(P.factors, cr, ca, cb)):
            return True
    return False


@_timed(9, "support product refinement")
def suite_product(res: SuiteResult, rng: random.Random, products: int = 20, m: int = 32):
    sizes = []
    for _ in range(products):
        factors = [random_poset(rng.randint(1, 6), rng) for _ in range(rng.randint(1, 4))]
        P = support_product(factors, 1)
        conds = [rng.randrange(P.n) for _ in range(m)]
        res.checked += 1
        out, tr = compatible_refinement_product(P, conds)
        sizes.append(len(out))
        delta = tr.stages[0][1]
        (root, members), = delta.items()
        supports = [P.support(c) for c in conds]
        for i, j in itertools.combinations(members, 2):
            if supports[i] & supports[j] != frozenset(root):
                res.fail(("delta root", root, i, j))
        for i, j in itertools.combinations(out, 2):
            if not _brute_compatible(P, conds[i], conds[j]):
                res.fail(("incompatible output", i, j))
    res.notes["sizes"] = sizes


# 10 ----------------------------------------------------------------------------------

def random_refuter_instance(rng: random.Random):
    """``(T, q, t, beta)`` meeting the refuter's preconditions."""
    while True:
        T = random_tree(rng, max_nodes=20, max_height=6, min_nodes=4)
        deep = [t for t in range(T.n) if T.level[t] >= 2]
        if not deep:
            continue
        t = rng.choice(deep)
        beta = rng.randint(1, T.level[t] - 1)
        low = [s for s in range(T.n) if T.level[s] < beta]
        d = {}
        for s in rng.sample(low, rng.randint(0, min(3, len(low)))):
            c = rng.randrange(3)
            if c == 0 and T.lt(s, t):
                c = rng.randint(1, 2)
            d[s] = c
        try:
            return T, pt_validate(T, d), t, beta
        except ValueError:
            continue


def random_linked_instance(rng: random.Random):
    while True:
        lam = rng.randint(2, 4)
        strings = ["".join(b) for b in itertools.product("01", repeat=lam)]
        X = rng.sample(strings, rng.randint(2, min(6, len(strings))))
        frag = LinkedFragment(lam, tuple(X), 3, 3)
        short = frag.strings()
        x = rng.choice(X)
        rest = [y for y in X if y != x]
        a = frozenset(rng.sample(rest, rng.randint(1, min(2, len(rest)))))
        s = tuple(rng.choice(short) for _ in range(rng.randint(0, 1)))
        q = LinkedCondition(s, a)
        try:
            r = linked_reduct_refuter(frag, q, x)
        except NoSeparator:
            continue
        return frag, q, x, r


@_timed(10, "reduct refuters")
def suite_refuters(res: SuiteResult, rng: random.Random, instances: int = 100):
    for _ in range(instances):
        T, q, t, beta = random_refuter_instance(rng)
        r = tree_reduct_refuter(T, q, t, beta)
        res.checked += 1
        probe = pt_validate(T, {t: 0})
        if not set(q.items) <= set(r.items):
            res.fail(("tree", T.parent, str(q), "r does not extend q"))
        if pt_compatible(T, r, probe) or union_is_condition(T, r.as_dict(), {t: 0}):
            res.fail(("tree", T.parent, str(q), t, beta, "r compatible with {t: 0}"))
    for _ in range(instances):
        frag, q, x, r = random_linked_instance(rng)
        res.checked += 1
        p = LinkedCondition((), frozenset([x]))
        small = LinkedFragment(frag.lam, frag.X, len(r.s) + 1, len(r.a) + 1)
        brute = small.common_extension(r, p) is None
        syntactic = linked_incompatible_syntactic(r, x)
        if not linked_leq(r, q):
            res.fail(("linked", str(q), x, "r not below q"))
        if not (brute and syntactic):
            res.fail(("linked", str(q), x, str(r), brute, syntactic))


# 11 ----------------------------------------------------------------------------------

@_timed(11, "regular closure")
def suite_closure(res: SuiteResult, rng: random.Random, instances: int = 200):
    for _ in range(instances):
        Q = random_poset(rng.randint(1, 10), rng)
        seed = [i for i in range(Q.n) if rng.random() < 0.3]
        res.checked += 1
        try:
            P = regular_closure(Q, seed)
        except OverflowCap as exc:
            res.fail((Q.strict, seed, repr(exc)))
            continue
        if not set(seed) <= set(P) or not is_regular_suborder(Q, P):
            res.fail((Q.strict, seed, P))


# 12 ----------------------------------------------------------------------------------

@_timed(12, "ordinal algebra", 5)
def suite_ordinals(res: SuiteResult, rng: random.Random, cases: int = 10_000):
    limit = omega_power(omega_power(2))
    for _ in range(cases):
        a, b, c = (random_below(limit, rng) for _ in range(3))
        res.checked += 1
        if (a + b) + c != a + (b + c):
            res.fail(("assoc", str(a), str(b), str(c)))
        if a + O.ZERO != a or O.ZERO + a != a:
            res.fail(("identity", str(a)))
        lo, hi = sorted((b, c))
        if lo < hi and not a + lo < a + hi:
            res.fail(("monotone", str(a), str(lo), str(hi)))
        if not O.is_cnf(a + b):
            res.fail(("cnf", str(a), str(b)))
        seq = [rng.randint(0, 10_000) for _ in range(rng.randint(0, 8))]
        if O.decode_seq(O.encode_seq(seq)) != tuple(seq):
            res.fail(("seqcode", seq))


SUITES = [suite_regular_equivalence, suite_walks, suite_level_distinct, suite_avoiding,
          suite_regressive, suite_nonsplitting, suite_pt_oracle, suite_knaster, suite_product,
          suite_refuters, suite_closure, suite_ordinals]


def run_all(seed: int = DEFAULT_SEED, only: set[int] | None = None) -> list[SuiteResult]:
    return [s(seed) for s in SUITES if only is None or s.number in only]
