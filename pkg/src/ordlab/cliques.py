"""Clique search on small graphs given as adjacency bitmasks."""

from __future__ import annotations

from typing import Iterator, Sequence


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def maximal_cliques(adj: Sequence[int], universe: int | None = None) -> list[tuple[int, ...]]:
    """All maximal cliques of the graph restricted to ``universe`` (Bron-Kerbosch with pivot).

    ``adj[v]`` is the neighbour mask of ``v`` and must not contain ``v``.
    Output is sorted lexicographically.
    """
    if universe is None:
        universe = (1 << len(adj)) - 1
    out: list[tuple[int, ...]] = []

    def rec(r: int, p: int, x: int):
        if not p and not x:
            out.append(tuple(bits(r)))
            return
        pivot = max(bits(p | x), key=lambda u: (adj[u] & p).bit_count())
        for v in bits(p & ~adj[pivot]):
            rec(r | (1 << v), p & adj[v], x & adj[v])
            p &= ~(1 << v)
            x |= 1 << v

    rec(0, universe, 0)
    out.sort()
    return out


def max_clique(adj: Sequence[int], universe: int | None = None) -> tuple[int, ...]:
    """Lexicographically least maximum clique.

    Depth-first search over increasing vertex sequences visits cliques in
    lexicographic order, so keeping only strict improvements returns the
    least optimum.
    """
    if universe is None:
        universe = (1 << len(adj)) - 1
    best: list[int] = []

    def rec(cur: list[int], cand: int):
        nonlocal best
        if len(cur) > len(best):
            best = list(cur)
        if len(cur) + cand.bit_count() <= len(best):
            return
        for v in bits(cand):
            cand &= ~(1 << v)
            if len(cur) + 1 + (cand & adj[v]).bit_count() <= len(best):
                continue
            cur.append(v)
            rec(cur, cand & adj[v])
            cur.pop()

    rec([], universe)
    return tuple(best)
