"""Ordinals below epsilon_0 in Cantor normal form.

An ordinal is a tuple of ``(exponent, coefficient)`` terms with strictly
decreasing exponents and positive coefficients, read as
``w^e1*c1 + ... + w^ek*ck``.  Exponents are ordinals themselves.

Comparison goes through a precomputed nested-tuple key, so ``<`` on two
ordinals is a single native tuple comparison.
"""

from __future__ import annotations

import math
import random
import re
from enum import Enum, IntEnum
from typing import Iterable, NamedTuple, Sequence

from .errors import OverflowCap, ParseError

__all__ = [
    "Ordinal",
    "Kind",
    "ZERO",
    "ONE",
    "OMEGA",
    "nat",
    "omega_power",
    "cmp",
    "Ordering",
    "add",
    "subtract_left",
    "classify",
    "enumerate_bounded",
    "encode_seq",
    "decode_seq",
    "parse",
    "format_ordinal",
    "is_cnf",
    "random_below",
]


class Ordinal:
    __slots__ = ("terms", "_key", "_hash")

    def __init__(self, terms: Iterable[tuple["Ordinal", int]] = ()):
        terms = tuple(terms)
        self.terms = terms
        self._key = tuple((e._key, c) for e, c in terms)
        self._hash = hash(self._key)

    # order and identity -------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Ordinal):
            return self._key == other._key
        if isinstance(other, int):
            return self._key == nat(other)._key if other >= 0 else False
        return NotImplemented

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self._key < _coerce(other)._key

    def __le__(self, other):
        return self._key <= _coerce(other)._key

    def __gt__(self, other):
        return self._key > _coerce(other)._key

    def __ge__(self, other):
        return self._key >= _coerce(other)._key

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __repr__(self):
        return f"Ordinal({format_ordinal(self)!r})"

    def __str__(self):
        return format_ordinal(self)

    # structure ----------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0].is_zero

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0].is_zero

    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0].is_zero)

    def __int__(self):
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    def pred(self) -> "Ordinal":
        if not self.is_successor:
            raise ValueError(f"{self} is not a successor")
        *head, (e, c) = self.terms
        if c > 1:
            head.append((e, c - 1))
        return Ordinal(head)

    def succ(self) -> "Ordinal":
        return add(self, ONE)

    @property
    def leading_exponent(self) -> "Ordinal":
        return self.terms[0][0] if self.terms else ZERO

    def split_last(self) -> tuple["Ordinal", "Ordinal"]:
        """Write a nonzero ordinal as ``gamma + w^e`` and return ``(gamma, e)``."""
        if not self.terms:
            raise ValueError("0 has no last term")
        *head, (e, c) = self.terms
        if c > 1:
            head.append((e, c - 1))
        return Ordinal(head), e


def _coerce(x) -> Ordinal:
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, int) and x >= 0:
        return nat(x)
    raise TypeError(f"cannot treat {x!r} as an ordinal")


ZERO = Ordinal()
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))

_NAT_CACHE = [ZERO] + [Ordinal(((ZERO, n),)) for n in range(1, 257)]


def nat(n: int) -> Ordinal:
    if n < 0:
        raise ValueError("negative natural")
    if n < len(_NAT_CACHE):
        return _NAT_CACHE[n]
    return Ordinal(((ZERO, n),))


def omega_power(e, c: int = 1) -> Ordinal:
    """``w^e * c``."""
    if c == 0:
        return ZERO
    return Ordinal(((_coerce(e), c),))


def is_cnf(a: Ordinal) -> bool:
    prev = None
    for e, c in a.terms:
        if not isinstance(c, int) or c < 1 or not is_cnf(e):
            return False
        if prev is not None and not e < prev:
            return False
        prev = e
    return True


class Kind(Enum):
    ZERO = "ZERO"
    SUCCESSOR = "SUCCESSOR"
    LIMIT = "LIMIT"


class Classification(NamedTuple):
    kind: Kind
    pred: Ordinal | None = None


class Ordering(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def cmp(a: Ordinal, b: Ordinal) -> Ordering:
    ka, kb = _coerce(a)._key, _coerce(b)._key
    return Ordering((ka > kb) - (ka < kb))


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    if not b.terms:
        return a
    if not a.terms:
        return b
    e0, c0 = b.terms[0]
    kept = []
    for e, c in a.terms:
        if e > e0:
            kept.append((e, c))
        elif e == e0:
            c0 += c
            break
        else:
            break
    return Ordinal(kept + [(e0, c0)] + list(b.terms[1:]))


def subtract_left(a: Ordinal, b: Ordinal) -> Ordinal:
    """The unique ``d`` with ``a + d = b``, for ``a <= b``."""
    if a > b:
        raise ValueError(f"{a} > {b}")
    k = 0
    at, bt = a.terms, b.terms
    while k < len(at) and at[k] == bt[k]:
        k += 1
    if k == len(at):
        return Ordinal(bt[k:])
    (ea, ca), (eb, cb) = at[k], bt[k]
    if ea == eb:
        return Ordinal(((eb, cb - ca),) + bt[k + 1:])
    return Ordinal(bt[k:])


def classify(a: Ordinal) -> Classification:
    if a.is_zero:
        return Classification(Kind.ZERO)
    if a.is_successor:
        return Classification(Kind.SUCCESSOR, a.pred())
    return Classification(Kind.LIMIT)


def enumerate_bounded(limit: Ordinal, max_term_count: int, max_coeff: int,
                      cap: int = 100_000) -> list[Ordinal]:
    """All ordinals below ``limit`` with at most ``max_term_count`` terms and
    coefficients at most ``max_coeff``, in increasing order.

    Exponents range over ordinals ``<= leading_exponent(limit)`` satisfying the
    same structural bounds.
    """
    limit = _coerce(limit)
    if limit.is_zero:
        return []
    if max_term_count <= 0 or max_coeff <= 0:
        return [ZERO]
    lead = limit.leading_exponent
    if lead.is_finite:
        exponents = [nat(k) for k in range(int(lead) + 1)]
    else:
        exponents = enumerate_bounded(lead.succ(), max_term_count, max_coeff, cap)
    exponents.sort(reverse=True)

    out: list[Ordinal] = []

    def rec(start: int, terms: list, left: int):
        if len(out) > cap:
            raise OverflowCap(f"more than {cap} ordinals below {limit}")
        a = Ordinal(terms)
        if a < limit:
            out.append(a)
        elif terms:
            # every extension of a prefix that already reaches the limit is larger
            return
        if left == 0:
            return
        for j in range(start, len(exponents)):
            for c in range(1, max_coeff + 1):
                terms.append((exponents[j], c))
                rec(j + 1, terms, left - 1)
                terms.pop()

    rec(0, [], max_term_count)
    out.sort()
    return out


# finite sequence coding ----------------------------------------------------

def _pair(x: int, y: int) -> int:
    return (x + y) * (x + y + 1) // 2 + y


def _unpair(z: int) -> tuple[int, int]:
    w = (math.isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def encode_seq(s: Sequence[int]) -> int:
    """Bijection from finite sequences of naturals onto the naturals.

    ``<> -> 0`` and ``<h, *t> -> 1 + pair(h, encode(t))`` with the Cantor
    pairing function.
    """
    code = 0
    for x in reversed(s):
        if x < 0:
            raise ValueError("sequence entries must be naturals")
        code = 1 + _pair(x, code)
    return code


def decode_seq(code: int) -> tuple[int, ...]:
    if code < 0:
        raise ValueError("codes are naturals")
    out = []
    while code:
        head, code = _unpair(code - 1)
        out.append(head)
    return tuple(out)


# text form -----------------------------------------------------------------

def format_ordinal(a: Ordinal) -> str:
    if a.is_zero:
        return "0"
    parts = []
    for e, c in a.terms:
        if e.is_zero:
            parts.append(str(c))
            continue
        base = "w" if e == ONE else f"w^({format_ordinal(e)})"
        parts.append(base if c == 1 else f"{base}*{c}")
    return "+".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|(w)|(\^)|(\()|(\))|(\*)|(\+))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"bad ordinal {self.text!r} at offset {pos}")
            kind = m.lastindex
            self.toks.append((kind, m.group(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, kind):
        if self.peek() != kind:
            raise ParseError(f"bad ordinal {self.text!r}")
        tok = self.toks[self.i][1]
        self.i += 1
        return tok

    def ordinal(self) -> Ordinal:
        total = self.term()
        while self.peek() == 7:
            self.take(7)
            total = add(total, self.term())
        return total

    def term(self) -> Ordinal:
        if self.peek() == 1:
            return nat(int(self.take(1)))
        self.take(2)
        e = ONE
        if self.peek() == 3:
            self.take(3)
            if self.peek() == 4:
                self.take(4)
                e = self.ordinal()
                self.take(5)
            elif self.peek() == 1:
                e = nat(int(self.take(1)))
            else:
                e = self.ordinal_atom()
        c = 1
        if self.peek() == 6:
            self.take(6)
            c = int(self.take(1))
            if c == 0:
                raise ParseError(f"zero coefficient in {self.text!r}")
        return omega_power(e, c)

    def ordinal_atom(self) -> Ordinal:
        # ``w^w`` without parentheses
        self.take(2)
        return OMEGA


def parse(text: str) -> Ordinal:
    """Parse ``w^(2)*3+w+4`` style text.  Non-canonical sums are normalised."""
    p = _Parser(text)
    if not p.toks:
        raise ParseError("empty ordinal")
    a = p.ordinal()
    if p.i != len(p.toks):
        raise ParseError(f"trailing input in {text!r}")
    return a


# random generation ---------------------------------------------------------

def random_below(limit: Ordinal, rng: random.Random, max_coeff: int = 6,
                 max_terms: int = 3) -> Ordinal:
    """A random ordinal ``< limit`` (limit > 0), biased towards small structure."""
    limit = _coerce(limit)
    if limit.is_zero:
        raise ValueError("nothing below 0")
    if limit.is_finite:
        return nat(rng.randrange(int(limit)))
    lead = limit.leading_exponent
    for _ in range(64):
        k = rng.randint(0, max_terms)
        if lead.is_finite:
            pool = list(range(int(lead) + 1))
            picks = sorted(rng.sample(pool, min(k, len(pool))), reverse=True)
            exps = [nat(p) for p in picks]
        else:
            exps = sorted({random_below(lead.succ(), rng, max_coeff, max_terms)
                           for _ in range(k)}, reverse=True)
        a = Ordinal((e, rng.randint(1, max_coeff)) for e in exps)
        if a < limit:
            return a
    return ZERO
