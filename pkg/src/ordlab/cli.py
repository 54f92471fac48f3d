"""Command line entry point: ``ordlab <command> ...``.

Exit status is 0 when the run is clean, 1 when it found violations and 2 on
usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import ordinal as O
from .cseq import AvoidSet, build_avoiding, min_above, standard_csequence, verify_csequence
from .errors import LabError, ParseError
from .poset import (find_reduct, is_regular_suborder, is_suborder, maximal_antichains,
                    poset_from_json, regular_closure, support_product)
from .refine import compatible_refinement_product, knaster_refinement, largest_delta_system
from .rhotree import WitnessData, build_arena, check_r_injective, emit, to_dot
from .specforcing import (LinkedCondition, LinkedFragment, linked_incompatible_syntactic,
                          linked_leq, linked_reduct_refuter, pt_compatible, pt_validate,
                          tree_from_json, tree_reduct_refuter)
from .walks import trace

OK, VIOLATIONS, ERROR = "OK", "VIOLATIONS", "ERROR"
EXIT = {OK: 0, VIOLATIONS: 1, ERROR: 2}


@dataclass
class RunReport:
    command: list
    outcome: str = OK
    result: Any = None
    violations: list = field(default_factory=list)
    kind: str | None = None
    message: str = ""
    artifacts: list = field(default_factory=list)
    elapsed: float = 0.0
    text: str = ""

    @property
    def exit_code(self) -> int:
        return EXIT[self.outcome]

    def to_json(self) -> dict:
        d = {"command": self.command, "outcome": self.outcome, "result": self.result,
             "violations": self.violations, "artifacts": self.artifacts,
             "elapsed": round(self.elapsed, 4)}
        if self.outcome == ERROR:
            d["kind"] = self.kind
            d["message"] = self.message
        return d


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


# input helpers --------------------------------------------------------------------------

def _ord(text: str) -> O.Ordinal:
    return O.parse(text)


def _ords(text: str | None) -> list[O.Ordinal]:
    if not text:
        return []
    return [O.parse(t) for t in text.split(",") if t.strip()]


def _ints(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ParseError(f"expected comma separated integers, got {text!r}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _json_file(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc.msg}") from None


def _avoid(args) -> list[O.Ordinal]:
    pts = _ords(getattr(args, "avoid", None))
    f = getattr(args, "avoid_file", None)
    if f:
        pts += [O.parse(line) for line in _read(f).splitlines() if line.strip()]
    return pts


def _cseq(args):
    pts = _avoid(args)
    return build_avoiding(pts) if pts else standard_csequence()


def _s(a) -> str:
    return O.format_ordinal(a)


def _assignment(text: str) -> dict:
    try:
        d = json.loads(text)
    except json.JSONDecodeError:
        raise ParseError(f"condition {text!r} is not JSON") from None
    return {int(k): int(v) for k, v in d.items()}


# commands -------------------------------------------------------------------------------

def cmd_ord(args, rep: RunReport):
    op = args.op
    if op == "parse":
        a = _ord(args.a)
        c = O.classify(a)
        rep.result = {"ordinal": _s(a), "kind": c.kind.value,
                      "pred": _s(c.pred) if c.pred is not None else None}
        rep.text = f"{_s(a)} ({c.kind.value})"
    elif op == "add":
        rep.result = _s(_ord(args.a) + _ord(args.b))
        rep.text = rep.result
    elif op == "cmp":
        rep.result = O.cmp(_ord(args.a), _ord(args.b)).name
        rep.text = rep.result
    elif op == "encode":
        rep.result = O.encode_seq(_ints(args.a))
        rep.text = str(rep.result)
    elif op == "decode":
        try:
            code = int(args.a)
        except ValueError:
            raise ParseError(f"code {args.a!r} is not an integer") from None
        rep.result = list(O.decode_seq(code))
        rep.text = ",".join(map(str, rep.result))
    elif op == "enumerate":
        got = O.enumerate_bounded(_ord(args.a), args.terms, args.coeff)
        rep.result = [_s(x) for x in got]
        rep.text = "\n".join(rep.result)


def cmd_cseq(args, rep: RunReport):
    C = _cseq(args)
    if args.op == "entry":
        v = C.entry(_ord(args.alpha), args.i)
        rep.result = _s(v)
        rep.text = rep.result
    elif args.op == "min-above":
        hit = min_above(C, _ord(args.alpha), _ord(args.xi))
        rep.result = {"value": _s(hit.value), "position": hit.position}
        rep.text = f"{_s(hit.value)} at {hit.position}"
    elif args.op == "verify":
        arena = [O.parse(line) for line in _read(args.arena_file).splitlines() if line.strip()]
        bad = verify_csequence(C, arena, AvoidSet(frozenset(_avoid(args))), probes=args.probes)
        rep.result = {"checked": len(arena)}
        rep.violations = [{"kind": v.kind, "alpha": _s(v.alpha), "index": v.index, "detail": v.detail}
                          for v in bad]
        rep.text = f"{len(arena)} levels checked, {len(bad)} violations"


def cmd_walk(args, rep: RunReport):
    w = trace(_cseq(args), _ord(args.alpha), _ord(args.beta))
    rep.result = {"steps": [_s(x) for x in w.steps], "code": list(w.code)}
    rep.text = f"steps: {', '.join(rep.result['steps'])}\ncode: {','.join(map(str, w.code))}"


def cmd_tree(args, rep: RunReport):
    avoid = _avoid(args)
    C = build_avoiding(avoid) if avoid else standard_csequence()
    seed = _ords(args.seed) + avoid
    if not seed:
        raise ParseError("--seed needs at least one ordinal")
    arena = build_arena(seed, C, args.probes, avoid=avoid, rng_seed=args.rng_seed)
    if args.op == "emit":
        levels = _ords(args.levels) or [a for a in arena.W if a.is_limit]
        nodes, edges = emit(arena, levels)
        rep.result = {"nodes": [{"level": _s(t.level), "source": _s(t.source)} for t in nodes],
                      "edges": [[a.label, b.label] for a, b in edges]}
        rep.text = to_dot(nodes, edges) if args.dot or not args.json else ""
        if args.out:
            Path(args.out).write_text(to_dot(nodes, edges) if args.dot else json.dumps(rep.result))
            rep.artifacts.append(args.out)
    elif args.op == "check":
        r = check_r_injective(arena)
        rep.result = {"arena": len(arena.W), "comparable_pairs": r.comparable_pairs,
                      "apparent": len(r.apparent)}
        rep.violations = [[a.label, b.label] for a, b in r.persistent]
        rep.text = (f"|W| = {len(arena.W)}, {r.comparable_pairs} comparable pairs, "
                    f"{len(r.apparent)} apparent and {len(r.persistent)} persistent collisions")


def cmd_poset(args, rep: RunReport):
    P = poset_from_json(_read(args.poset[0]))
    if args.op == "check-regular":
        A = _ints(args.subset)
        sub = is_suborder(P, A)
        reg = is_regular_suborder(P, A)
        missing = [q for q in range(P.n) if find_reduct(P, A, q) is None]
        rep.result = {"suborder": sub, "regular": reg, "no_reduct": missing}
        if not reg:
            rep.violations = [{"not_regular": A, "no_reduct": missing}]
        rep.text = f"suborder: {sub}, regular: {reg}"
    elif args.op == "closure":
        out = list(regular_closure(P, _ints(args.subset)))
        rep.result = out
        rep.text = ",".join(map(str, out))
    elif args.op == "antichains":
        rep.result = [list(a) for a in maximal_antichains(P)]
        rep.text = "\n".join(",".join(map(str, a)) for a in rep.result)
    elif args.op == "product":
        factors = [poset_from_json(_read(p)) for p in args.poset]
        Q = support_product(factors, args.nu)
        rep.result = {"n": Q.n, "top": Q.top, "elements": [list(c) for c in Q.labels],
                      "le": [list(p) for p in Q.strict]}
        rep.text = f"{Q.n} conditions, top {list(Q.labels[Q.top])}"


def cmd_refine(args, rep: RunReport):
    if args.op == "delta":
        fam = _json_file(args.sets)
        D = largest_delta_system(fam)
        ok = len(D.members) >= args.k
        rep.result = {"root": sorted(D.root), "members": list(D.members)} if ok else None
        rep.text = (f"root {sorted(D.root)}, members {list(D.members)}" if ok
                    else f"no Delta-system with {args.k} members found")
    elif args.op == "product":
        factors = [poset_from_json(_read(p)) for p in args.poset]
        P = support_product(factors, args.nu)
        conds = []
        for c in _json_file(args.conditions):
            i = P.element(c)
            if i is None:
                raise ParseError(f"{c} is not a condition of the product")
            conds.append(i)
        out, tr = compatible_refinement_product(P, conds)
        rep.result = {"indices": out, "trace": _trace_json(tr)}
        rep.text = f"kept {len(out)} of {len(conds)}: {out}"
    elif args.op == "knaster":
        T = tree_from_json(_read(args.tree))
        wd = _json_file(args.witness)
        w = WitnessData(frozenset(wd.get("S", T.limit_levels)),
                        {int(k): int(v) for k, v in wd["r"].items()},
                        {int(k): int(v) for k, v in wd["colors"].items()})
        fam = [(int(c["alpha"]), pt_validate(T, {int(k): int(v) for k, v in c["p"].items()}))
               for c in _json_file(args.conditions)]
        out, tr = knaster_refinement(T, w, fam)
        rep.result = {"indices": out, "fingerprints": tr.fingerprint_count, "trace": _trace_json(tr)}
        rep.text = f"kept {len(out)} of {len(fam)} ({tr.fingerprint_count} fingerprints): {out}"


def _trace_json(tr) -> dict:
    return {"stages": [{"name": name, "groups": [{"key": repr(k), "members": v} for k, v in groups.items()]}
                       for name, groups in tr.stages],
            "fingerprint_count": tr.fingerprint_count,
            "extra": tr.extra}


def cmd_spec(args, rep: RunReport):
    if args.op == "refute-linked":
        X = [x for x in args.X.split(",") if x]
        frag = LinkedFragment(args.lam, tuple(X), args.n_cap, args.a_cap)
        try:
            s_q = tuple(str(u) for u in json.loads(args.s or "[]"))
        except json.JSONDecodeError:
            raise ParseError(f"--s must be a JSON list of strings, got {args.s!r}") from None
        q = LinkedCondition(s_q, frozenset(a for a in (args.a or "").split(",") if a))
        r = linked_reduct_refuter(frag, q, args.x)
        rep.result = {"s": list(r.s), "a": sorted(r.a), "below_q": linked_leq(r, q),
                      "incompatible": linked_incompatible_syntactic(r, args.x)}
        rep.text = str(r)
        return
    T = tree_from_json(_read(args.tree))
    if args.op == "compat":
        p, q = pt_validate(T, _assignment(args.p)), pt_validate(T, _assignment(args.q))
        rep.result = pt_compatible(T, p, q)
        rep.text = "compatible" if rep.result else "incompatible"
    elif args.op == "refute-tree":
        r = tree_reduct_refuter(T, pt_validate(T, _assignment(args.q)), args.t, args.beta)
        rep.result = {str(k): v for k, v in r.items}
        rep.text = str(r)


def cmd_suite(args, rep: RunReport):
    from .suites import run_all

    only = set(_ints(args.only)) or None
    results = run_all(args.seed, only)
    rep.result = [{"number": r.number, "name": r.name, "passed": r.passed, "checks": r.checked,
                   "elapsed": round(r.elapsed, 3), "notes": r.notes} for r in results]
    rep.violations = [{"suite": r.number, "failures": [repr(f) for f in r.failures]}
                      for r in results if not r.passed]
    rep.text = "\n".join(r.line() for r in results)


# parser -----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ordlab", description="Walks on ordinals and finite forcing combinatorics.")
    p.add_argument("--json", action="store_true", help="print a JSON report")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        return sp

    o = common(sub.add_parser("ord", help="ordinal arithmetic and sequence codes"))
    o.add_argument("op", choices=["parse", "add", "cmp", "encode", "decode", "enumerate"])
    o.add_argument("a")
    o.add_argument("b", nargs="?")
    o.add_argument("--terms", type=int, default=2)
    o.add_argument("--coeff", type=int, default=2)

    c = common(sub.add_parser("cseq", help="C-sequence entries and verification"))
    c.add_argument("op", choices=["entry", "min-above", "verify"])
    c.add_argument("--alpha")
    c.add_argument("--i", type=int, default=0)
    c.add_argument("--xi")
    c.add_argument("--avoid")
    c.add_argument("--avoid-file")
    c.add_argument("--arena-file")
    c.add_argument("--probes", type=int, default=10)

    w = common(sub.add_parser("walk", help="walk from beta down to alpha"))
    w.add_argument("--alpha", required=True)
    w.add_argument("--beta", required=True)
    w.add_argument("--avoid")
    w.add_argument("--avoid-file")

    t = common(sub.add_parser("tree", help="the code tree over a walk-closed arena"))
    t.add_argument("op", choices=["emit", "check"])
    t.add_argument("--seed", help="arena seed ordinals")
    t.add_argument("--avoid")
    t.add_argument("--avoid-file")
    t.add_argument("--levels")
    t.add_argument("--probes", type=int, default=16)
    t.add_argument("--rng-seed", type=int, default=0)
    t.add_argument("--dot", action="store_true")
    t.add_argument("--out")

    q = common(sub.add_parser("poset", help="finite posets and regular suborders"))
    q.add_argument("op", choices=["check-regular", "closure", "antichains", "product"])
    q.add_argument("--poset", action="append", required=True)
    q.add_argument("--subset", default="")
    q.add_argument("--nu", type=int, default=1)

    r = common(sub.add_parser("refine", help="Delta-systems and refinement pipelines"))
    r.add_argument("op", choices=["delta", "product", "knaster"])
    r.add_argument("--sets")
    r.add_argument("--k", type=int, default=2)
    r.add_argument("--poset", action="append")
    r.add_argument("--nu", type=int, default=1)
    r.add_argument("--conditions")
    r.add_argument("--tree")
    r.add_argument("--witness")

    s = common(sub.add_parser("spec", help="specialization forcing and the linked poset"))
    s.add_argument("op", choices=["compat", "refute-tree", "refute-linked"])
    s.add_argument("--tree")
    s.add_argument("--p")
    s.add_argument("--q")
    s.add_argument("--t", type=int)
    s.add_argument("--beta", type=int)
    s.add_argument("--lam", type=int)
    s.add_argument("--X")
    s.add_argument("--s", help='s_q as a JSON list, e.g. \'["", "01"]\'')
    s.add_argument("--a", help="comma separated members of a_q")
    s.add_argument("--x")
    s.add_argument("--n-cap", type=int, default=3)
    s.add_argument("--a-cap", type=int, default=3)

    u = common(sub.add_parser("suite", help="run the acceptance suites"))
    u.add_argument("--seed", type=int, default=None)
    u.add_argument("--only", help="comma separated suite numbers")
    return p


COMMANDS = {"ord": cmd_ord, "cseq": cmd_cseq, "walk": cmd_walk, "tree": cmd_tree,
            "poset": cmd_poset, "refine": cmd_refine, "spec": cmd_spec, "suite": cmd_suite}

REQUIRED = {
    ("ord", "add"): ["b"], ("ord", "cmp"): ["b"],
    ("cseq", "entry"): ["alpha"], ("cseq", "min-above"): ["alpha", "xi"], ("cseq", "verify"): ["arena_file"],
    ("refine", "delta"): ["sets"], ("refine", "product"): ["poset", "conditions"],
    ("refine", "knaster"): ["tree", "witness", "conditions"],
    ("spec", "compat"): ["tree", "p", "q"], ("spec", "refute-tree"): ["tree", "q", "t", "beta"],
    ("spec", "refute-linked"): ["lam", "X", "x"],
}


def dispatch(argv: Sequence[str]) -> tuple[RunReport, bool]:
    """Run one command.  Returns the report and whether JSON output was requested."""
    argv = list(argv)
    rep = RunReport(command=argv)
    as_json = "--json" in argv
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        op = getattr(args, "op", None)
        for name in REQUIRED.get((args.command, op), []):
            if getattr(args, name, None) is None:
                flag = name if name == "b" else f"--{name.replace('_', '-')}"
                raise ParseError(f"{args.command} {op} needs {flag}")
        if args.command == "suite" and args.seed is None:
            from .suites import DEFAULT_SEED
            args.seed = DEFAULT_SEED
        COMMANDS[args.command](args, rep)
        if rep.violations:
            rep.outcome = VIOLATIONS
    except LabError as exc:
        rep.outcome, rep.kind, rep.message = ERROR, exc.kind, str(exc)
    except (ValueError, KeyError, TypeError, IndexError) as exc:
        rep.outcome, rep.kind, rep.message = ERROR, "USAGE", f"{type(exc).__name__}: {exc}"
    rep.elapsed = time.perf_counter() - t0
    return rep, as_json


def main(argv: Sequence[str] | None = None) -> int:
    rep, as_json = dispatch(sys.argv[1:] if argv is None else argv)
    if as_json:
        print(json.dumps(rep.to_json(), indent=2))
    elif rep.outcome == ERROR:
        print(f"error ({rep.kind}): {rep.message}", file=sys.stderr)
    else:
        if rep.text:
            print(rep.text, end="" if rep.text.endswith("\n") else "\n")
        if rep.outcome == VIOLATIONS:
            print(f"{len(rep.violations)} violation(s)", file=sys.stderr)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
