"""Boundary and positive equilibria of the local system.

Positive equilibria lie on the predator nullcline v = sqrt(u)/c and are the
positive roots of h(u) = c u^2 + (1-(m+1)c) u + mc + n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import PreconditionError
from .model import ScaledParams

EQ_TOL = 1e-12  # absolute tolerance on n - m1 and n - m2


class Kind(str, Enum):
    E0 = "E0"
    E1 = "E1"
    E2 = "E2"
    E30 = "E30"
    E31 = "E31"
    E32 = "E32"
    E33 = "E33"

    @property
    def positive(self) -> bool:
        return self.value.startswith("E3")


@dataclass(frozen=True)
class Equilibrium:
    kind: Kind
    u: float
    v: float

    def as_dict(self) -> dict:
        return {"kind": self.kind.value, "u": self.u, "v": self.v}


@dataclass(frozen=True)
class EquilibriumCase:
    """Which existence case holds, with the thresholds that decide it.

    ``dist_m1`` and ``dist_m2`` are the signed distances n - m1 and n - m2;
    continuation code should use those rather than the label.
    """

    case: str
    m1: float
    m2: float
    delta: float
    dist_m1: float
    dist_m2: float
    note: str = ""

    def as_dict(self) -> dict:
        return {"case": self.case, "m1": self.m1, "m2": self.m2, "delta": self.delta,
                "n_minus_m1": self.dist_m1, "n_minus_m2": self.dist_m2, "note": self.note}


def h_poly(u, p: ScaledParams):
    return p.c * u * u + (1.0 - (p.m + 1.0) * p.c) * u + p.m * p.c + p.n


def thresholds(p: ScaledParams) -> tuple[float, float, float]:
    """(m1, m2, Delta)."""
    b = 1.0 - (p.m + 1.0) * p.c
    m1 = -p.m * p.c
    m2 = b * b / (4.0 * p.c) - p.m * p.c
    delta = b * b - 4.0 * p.c * (p.m * p.c + p.n)
    return m1, m2, delta


def classify_case(p: ScaledParams) -> EquilibriumCase:
    m1, m2, delta = thresholds(p)
    d1, d2 = p.n - m1, p.n - m2
    axis_pos = (p.m + 1.0) * p.c > 1.0
    if d1 < -EQ_TOL:
        case, note = "a", ""
    elif abs(d1) <= EQ_TOL:
        case, note = ("b", "") if axis_pos else ("e", "n = m1 but (m+1)c <= 1: no positive equilibrium")
    elif d2 < -EQ_TOL:
        case, note = ("c", "") if axis_pos else ("e", "m1 < n < m2 but (m+1)c <= 1: no positive equilibrium")
    elif abs(d2) <= EQ_TOL:
        case, note = ("d", "") if axis_pos else ("e", "n = m2 but (m+1)c <= 1: no positive equilibrium")
    else:
        case, note = "e", ""
    return EquilibriumCase(case, m1, m2, delta, d1, d2, note)


def _positive(kind: Kind, u: float, p: ScaledParams) -> Equilibrium:
    return Equilibrium(kind, u, math.sqrt(u) / p.c)


def _refine(u: float, p: ScaledParams) -> float:
    # one Newton step tidies cancellation in the quadratic formula
    dh = 2.0 * p.c * u + 1.0 - (p.m + 1.0) * p.c
    if abs(dh) > 1e-8:
        u2 = u - h_poly(u, p) / dh
        if abs(h_poly(u2, p)) < abs(h_poly(u, p)):
            return u2
    return u


def find_equilibria(p: ScaledParams) -> list[Equilibrium]:
    """All nonnegative equilibria, boundary ones first."""
    out = [Equilibrium(Kind.E0, 0.0, 0.0), Equilibrium(Kind.E1, 1.0, 0.0)]
    if p.m > 0:
        out.append(Equilibrium(Kind.E2, p.m, 0.0))
    cs = classify_case(p)
    a = (p.m + 1.0) * p.c - 1.0
    sq = math.sqrt(max(cs.delta, 0.0))
    if cs.case == "a":
        out.append(_positive(Kind.E30, _refine((a + sq) / (2.0 * p.c), p), p))
    elif cs.case == "b":
        out.append(_positive(Kind.E31, a / p.c, p))
    elif cs.case == "c":
        # product of roots (mc+n)/c avoids cancellation in the small root
        u30 = _refine((a + sq) / (2.0 * p.c), p)
        u32 = _refine((p.m * p.c + p.n) / (p.c * u30), p)
        out.append(_positive(Kind.E32, u32, p))
        out.append(_positive(Kind.E30, u30, p))
    elif cs.case == "d":
        out.append(_positive(Kind.E33, a / (2.0 * p.c), p))
    return out


def positive_equilibria(p: ScaledParams) -> list[Equilibrium]:
    return [e for e in find_equilibria(p) if e.kind.positive]


def get(p: ScaledParams, kind: Kind | str) -> Equilibrium:
    kind = Kind(kind)
    for e in find_equilibria(p):
        if e.kind == kind:
            return e
    raise PreconditionError(f"equilibrium {kind.value} does not exist for these parameters "
                            f"(case {classify_case(p).case})")
