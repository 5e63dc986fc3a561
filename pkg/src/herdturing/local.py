"""Local analysis of the system without diffusion.

Jacobians and stability verdicts at every equilibrium, the coefficient chain
that classifies the degenerate equilibrium E33, and Sotomayor nondegeneracy
quantities for the transcritical, saddle-node and Hopf bifurcations.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .equilibria import Equilibrium, Kind, classify_case, thresholds
from .errors import DegeneracyError, PreconditionError
from .model import ScaledParams, growth_derivs

SIGN_TOL = 1e-12
SOTOMAYOR_TOL = 1e-10


@dataclass(frozen=True)
class Jacobian2:
    j11: float
    j12: float
    j21: float
    j22: float

    @property
    def trace(self) -> float:
        return self.j11 + self.j22

    @property
    def det(self) -> float:
        return self.j11 * self.j22 - self.j12 * self.j21

    @property
    def discriminant(self) -> float:
        return self.trace ** 2 - 4.0 * self.det

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.j11, self.j12], [self.j21, self.j22]])

    def eigenvalues(self) -> tuple[complex, complex]:
        r = cmath.sqrt(self.discriminant)
        return (self.trace + r) / 2.0, (self.trace - r) / 2.0


@dataclass(frozen=True)
class StabilityVerdict:
    label: str
    thresholds: dict = field(default_factory=dict)
    trace: float | None = None
    det: float | None = None
    discriminant: float | None = None

    def as_dict(self) -> dict:
        return {"label": self.label, "thresholds": dict(self.thresholds),
                "trace": self.trace, "det": self.det, "discriminant": self.discriminant}


@dataclass(frozen=True)
class SotomayorReport:
    bifurcation: str
    critical_param: tuple[str, float]
    quantities: dict
    required: tuple[str, ...]
    nondegenerate: bool

    def as_dict(self) -> dict:
        return {"bifurcation": self.bifurcation,
                "critical_param": {"name": self.critical_param[0], "value": self.critical_param[1]},
                "quantities": dict(self.quantities), "required": list(self.required),
                "nondegenerate": self.nondegenerate}


def prey_self_rate(u: float, p: ScaledParams) -> float:
    mc_n = p.m * p.c + p.n
    return ((1.0 - (p.m + 1.0) * p.c) * u + 2.0 * mc_n) / (p.c * (u + p.n)) + 0.5 / p.c


def jacobian(eq: Equilibrium, p: ScaledParams) -> Jacobian2:
    """Jacobian of the local system at an equilibrium."""
    if eq.kind == Kind.E0:
        raise PreconditionError("E0 is not linearizable (sqrt(u) has no derivative at u = 0)")
    if eq.kind == Kind.E1:
        return Jacobian2((p.m - 1.0) / (p.n + 1.0), -1.0, 0.0, p.theta)
    if eq.kind == Kind.E2:
        sm = math.sqrt(p.m)
        return Jacobian2(p.m * (1.0 - p.m) / (p.n + p.m), -sm, 0.0, p.theta * sm)
    su = math.sqrt(eq.u)
    return Jacobian2(prey_self_rate(eq.u, p), -su, p.theta / (2.0 * p.c), -p.theta * su)


def theta_hopf(eq: Equilibrium, p: ScaledParams) -> float:
    """Trace-zero value of theta at a positive equilibrium.

    j11 does not depend on theta and j22 = -theta sqrt(u), so the root is
    j11/sqrt(u). For E31 (n = -mc) this equals
    [(3-2(m+1)c)u - mc] / [2c sqrt(u) (u - mc)].
    """
    if not eq.kind.positive:
        raise PreconditionError(f"no trace-zero threshold at {eq.kind.value}")
    u = eq.u
    num = (3.0 - 2.0 * (p.m + 1.0) * p.c) * u + 4.0 * p.m * p.c + 5.0 * p.n
    return num / (2.0 * p.c * math.sqrt(u) * (u + p.n))


def theta33(p: ScaledParams) -> float:
    u33 = ((p.m + 1.0) * p.c - 1.0) / (2.0 * p.c)
    return 1.0 / (2.0 * p.c * math.sqrt(u33))


def _label_from_jacobian(J: Jacobian2) -> str:
    if J.det < -SIGN_TOL:
        return "saddle"
    if J.det > SIGN_TOL:
        if J.trace < -SIGN_TOL:
            return "stable_focus_or_node"
        if J.trace > SIGN_TOL:
            return "unstable_focus_or_node"
        return "hopf_critical"
    return "degenerate_singularity"


def classify(eq: Equilibrium, p: ScaledParams) -> StabilityVerdict:
    """Stability label of an equilibrium."""
    J = jacobian(eq, p)
    info = dict(trace=J.trace, det=J.det, discriminant=J.discriminant)
    if eq.kind == Kind.E1:
        return StabilityVerdict("saddle", **info)
    if eq.kind == Kind.E2:
        return StabilityVerdict("unstable_node", **info)
    if eq.kind == Kind.E32:
        return StabilityVerdict("saddle" if J.det < 0 else _label_from_jacobian(J), **info)
    if eq.kind == Kind.E33:
        chain = degenerate_chain(p)
        return StabilityVerdict(chain.label, {"theta33": chain.theta33}, **info)

    th = theta_hopf(eq, p)
    key = "theta30" if eq.kind == Kind.E30 else "theta31"
    if J.det <= SIGN_TOL:
        return StabilityVerdict(_label_from_jacobian(J), {key: th}, **info)
    if abs(p.theta - th) <= SIGN_TOL * max(1.0, th):
        label = "hopf_critical"
    else:
        label = "stable_focus_or_node" if p.theta > th else "unstable_focus_or_node"
    return StabilityVerdict(label, {key: th}, **info)


# ---------------------------------------------------------------------------
# Degenerate equilibrium E33 (case d).


@dataclass(frozen=True)
class DegenerateChain:
    """Expansion coefficients at E33 and the resulting classification.

    ``a`` and ``b`` hold a1..a6 and b1..b7 of the shifted system. ``c``,
    ``d``, ``k`` and ``h`` follow the shear and the diagonalizing change of
    variables; they exist only when theta != theta33. ``alpha`` and ``beta``
    are the coefficients after the nilpotent change of variables, meaningful
    at theta = theta33.
    """

    u33: float
    theta33: float
    a: tuple
    b: tuple
    c: tuple | None
    d: tuple | None
    k: tuple | None
    h: tuple | None
    alpha: tuple
    beta: tuple
    k1: float | None
    cusp_test: float
    at_theta33: bool
    label: str

    def as_dict(self) -> dict:
        out = {}
        for name in ("a", "b", "c", "d", "k", "h", "alpha", "beta"):
            vals = getattr(self, name)
            if vals is not None:
                for i, x in enumerate(vals, 1):
                    out[f"{name}{i}"] = x
        out.update(u33=self.u33, theta33=self.theta33, k1=self.k1,
                   cusp_test=self.cusp_test, at_theta33=self.at_theta33, label=self.label)
        return out


def e33_coefficients(u: float, p: ScaledParams) -> tuple[tuple, tuple]:
    """(a1..a6, b1..b7) of the local system shifted to (u, sqrt(u)/c)."""
    c, th = p.c, p.theta
    _, _, g2, g3 = growth_derivs(u, p)
    su = math.sqrt(u)
    a = (1.0 / (2.0 * c), -su, 0.5 * g2 + 1.0 / (8.0 * c * u), -0.5 / su,
         1.0 / (8.0 * u * su), g3 / 6.0 - 1.0 / (16.0 * c * u * u))
    b = (th / (2.0 * c), -th * su, -th / (8.0 * c * u), th / (2.0 * su),
         -c * th, th / (16.0 * c * u * u), -th / (8.0 * u * su))
    return a, b


def degenerate_chain(p: ScaledParams) -> DegenerateChain:
    if classify_case(p).case != "d":
        raise PreconditionError("degenerate_chain needs case d (n = m2 and (m+1)c > 1)")
    th = p.theta
    u = ((p.m + 1.0) * p.c - 1.0) / (2.0 * p.c)
    t33 = theta33(p)
    a, b = e33_coefficients(u, p)
    a1, a2, a3, a4, a5, a6 = a
    b1, b2, b3, b4, b5, b6, b7 = b

    # nilpotent form, used when theta = theta33
    alpha = (a2, a3 + a4 * th, a4, a5, a6 + a5 * th)
    beta = (b3 + b4 * th + b5 * th ** 2 - a3 * th - a4 * th ** 2,
            b4 + 2.0 * b5 * th - a4 * th, b5, b7 - a5 * th,
            b6 + b7 * th - a5 * th ** 2 - a6 * th)
    cusp_test = 2.0 * alpha[1] + alpha[2]

    dd2 = b2 + b1 / th  # equals the trace; zero iff theta = theta33
    at33 = abs(th - t33) <= 1e-10 * t33 or abs(dd2) <= SIGN_TOL
    cc = dd = kk = hh = k1 = None
    if not at33:
        e1, e2, e3 = a3 - b3 / th, a4 - b4 / th, a5 - b7 / th
        e4 = a6 - b6 / th
        cc = (e1, e2 + 2.0 * e1 / th, e1 / th ** 2 + e2 / th - b5 / th,
              e3 + 3.0 * e4 / th, 2.0 * e3 / th + 3.0 * e4 / th ** 2, e4,
              e3 / th ** 2 + e4 / th ** 3)
        # v^2 coefficient: b3/theta^2 + b4/theta + b5 (from expanding the shear)
        dd = (b1, dd2, b3, b3 / th ** 2 + b4 / th + b5, b4 + 2.0 * b3 / th,
              b7 + 3.0 * b6 / th, 3.0 * b6 / th ** 2 + 2.0 * b7 / th, b6,
              b6 / th ** 3 + b7 / th ** 2)
        c1, c2, c3, c4, c5, c6, c7 = cc
        d1, d2, d3, d4, d5, d6, d7, d8, d9 = dd
        r = d1 / d2
        kk = (c1 - c2 * r + c3 * r ** 2, c2 / d2 - 2.0 * c3 * d1 / d2 ** 2, c3 / d2 ** 2,
              c4 / d2 - 2.0 * c5 * d1 / d2 ** 2 + 3.0 * c7 * d1 ** 2 / d2 ** 3,
              c5 / d2 ** 2 - 3.0 * c7 * d1 / d2 ** 3,
              c6 - c4 * r + c5 * r ** 2 - c7 * r ** 3, c7 / d2 ** 3)
        hh = (d3 + d4 * r ** 2 - d5 * r, d5 / d2 - 2.0 * d1 * d4 / d2 ** 2, d4 / d2 ** 2,
              d6 / d2 + 3.0 * d1 ** 2 * d9 / d2 ** 3 - 2.0 * d1 * d7 / d2 ** 2,
              d7 / d2 ** 2 - 3.0 * d1 * d9 / d2 ** 3,
              d7 * r ** 2 - d6 * r + d8 - d9 * r ** 3, d9 / d2 ** 3)
        k1 = kk[0]
        label = "saddle_node" if abs(k1) > SIGN_TOL else "degenerate_singularity"
    elif abs(beta[0]) <= SIGN_TOL:
        label = "degenerate_singularity"
    elif abs(cusp_test) > SIGN_TOL:
        label = "cusp_codim2"
    else:
        label = "cusp_codim_ge3"
    return DegenerateChain(u, t33, a, b, cc, dd, kk, hh, alpha, beta, k1,
                           cusp_test, at33, label)


# ---------------------------------------------------------------------------
# Sotomayor quantities.


def _report(bif, crit, q, required) -> SotomayorReport:
    ok = all(abs(q[name]) > SOTOMAYOR_TOL for name in required)
    return SotomayorReport(bif, crit, q, tuple(required), ok)


def sotomayor_transcritical(p: ScaledParams, at: str = "E1") -> SotomayorReport:
    """Transcritical bifurcation of E1 and E2 where they meet at m = 1.

    With V = (1, 0) and W = (theta, 1) at (1, 0) and m = 1:
    W.G_m = 0, W.[DG_m V] = theta/(n+1), W.[D^2G(V, V)] = -2 theta/(n+1).
    """
    if at not in ("E1", "E2"):
        raise PreconditionError(f"transcritical report is defined at E1 or E2, not {at!r}")
    if abs(p.m - 1.0) > SIGN_TOL:
        raise PreconditionError(f"transcritical point needs m = 1 (got m={p.m!r})")
    th, n = p.theta, p.n
    q = {"W.G_m": 0.0, "W.DG_m.V": th / (n + 1.0), "W.D2G(V,V)": -2.0 * th / (n + 1.0)}
    return _report("transcritical", ("m_TC", 1.0), q, ("W.DG_m.V", "W.D2G(V,V)"))


def sotomayor_saddle_node(p: ScaledParams) -> SotomayorReport:
    """Saddle-node bifurcation at E33 with n as the parameter.

    V = (1, 1/(2c sqrt(u33))) and W = (-theta, 1) span the kernels of J and
    J^T. W.G_n = -theta u(u-1)(u-m)/(u+n)^2 and W.[D^2G(V,V)] = -theta g''(u).
    """
    cs = classify_case(p)
    if cs.case != "d":
        raise PreconditionError("saddle-node report needs case d (n = m2 and (m+1)c > 1)")
    t33 = theta33(p)
    if abs(p.theta - t33) <= 1e-10 * t33:
        raise PreconditionError("saddle-node report needs theta != theta33 (double zero eigenvalue)")
    u = ((p.m + 1.0) * p.c - 1.0) / (2.0 * p.c)
    th, n = p.theta, p.n
    g2 = growth_derivs(u, p)[2]
    q = {"W.G_n": -th * u * (u - 1.0) * (u - p.m) / (u + n) ** 2,
         "W.D2G(V,V)": -th * g2}
    m2 = thresholds(p)[1]
    return _report("saddle_node", ("n_SN", m2), q, ("W.G_n", "W.D2G(V,V)"))


def hopf_local(eq: Equilibrium, p: ScaledParams) -> SotomayorReport:
    """Hopf bifurcation of the local system at E30 or E31 with theta as parameter."""
    if eq.kind not in (Kind.E30, Kind.E31):
        raise PreconditionError(f"Hopf report is defined at E30 or E31, not {eq.kind.value}")
    J = jacobian(eq, p)
    if J.det <= 0:
        raise DegeneracyError(f"no Hopf bifurcation: det J({eq.kind.value}) = {J.det:.6g} <= 0")
    th = theta_hopf(eq, p)
    su = math.sqrt(eq.u)
    omega = math.sqrt(J.det * th / p.theta)  # det is linear in theta
    name = "theta30" if eq.kind == Kind.E30 else "theta31"
    q = {"dtrace_dtheta": -su, "omega": omega}
    return _report("hopf", (name, th), q, ("dtrace_dtheta", "omega"))
