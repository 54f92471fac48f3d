"""Walks along a C-sequence and their full codes rho_0."""

from __future__ import annotations

from typing import NamedTuple

from .cseq import DEFAULT_BUDGET, CSequence, min_above
from .errors import PreconditionFailed
from .ordinal import Ordinal


class Walk(NamedTuple):
    steps: tuple[Ordinal, ...]
    code: tuple[int, ...]


def trace(C: CSequence, alpha: Ordinal, beta: Ordinal, budget: int = DEFAULT_BUDGET) -> Walk:
    """Walk from ``beta`` down to ``alpha`` together with its full code.

    ``gamma_{i+1} = min(C_{gamma_i} minus alpha)`` and the code records the
    index of that minimum in ``C_{gamma_i}``, i.e. ``otp(C_{gamma_i} & alpha)``.
    """
    if alpha > beta:
        raise PreconditionFailed(f"walk needs alpha <= beta, got {alpha} > {beta}")
    steps = [beta]
    code = []
    gamma = beta
    while gamma != alpha:
        hit = min_above(C, gamma, alpha, budget)
        steps.append(hit.value)
        code.append(hit.position)
        gamma = hit.value
    return Walk(tuple(steps), tuple(code))


def walk(C: CSequence, alpha: Ordinal, beta: Ordinal) -> tuple[Ordinal, ...]:
    return trace(C, alpha, beta).steps


def rho0(C: CSequence, alpha: Ordinal, beta: Ordinal) -> tuple[int, ...]:
    return trace(C, alpha, beta).code
