"""Model core: parameters, rescaling, reaction terms and their Taylor data.

The nondimensional local system is

    u' = u(1-u)(u-m)/(u+n) - sqrt(u) v
    v' = theta v (sqrt(u) - c v)

with the diffusive version adding d1 u_xx and d2 v_xx on (0, pi) with
homogeneous Neumann boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import AdmissibilityError, DegeneracyError, DomainError


@dataclass(frozen=True)
class RawParams:
    """Dimensional parameters of the predator-prey system."""

    r: float
    K: float
    A: float
    B: float
    D: float
    M: float
    N: float
    D1: float
    D2: float

    def __post_init__(self):
        for name in ("r", "K", "A", "B", "D", "D1", "D2"):
            if not getattr(self, name) > 0:
                raise AdmissibilityError(f"{name} > 0", f"{name}={getattr(self, name)!r}")
        if not -self.K < self.M < self.K:
            raise AdmissibilityError("-K < M < K", f"M={self.M!r}, K={self.K!r}")
        if not self.N > -self.M:
            raise AdmissibilityError("N > -M", f"N={self.N!r}, M={self.M!r}")
        if not self.N > 0:
            raise AdmissibilityError("N > 0", f"N={self.N!r}")


@dataclass(frozen=True)
class ScaledParams:
    """Nondimensional parameter vector (m, n, c, theta, d1, d2)."""

    m: float
    n: float
    c: float
    theta: float
    d1: float = 1.0
    d2: float = 1.0

    def __post_init__(self):
        for name in ("m", "n", "c", "theta", "d1", "d2"):
            val = getattr(self, name)
            if not isinstance(val, (int, float)) or isinstance(val, bool) or not math.isfinite(val):
                raise AdmissibilityError(f"{name} finite real", f"{name}={val!r}")
        if not -1.0 < self.m < 1.0:
            raise AdmissibilityError("-1 < m < 1", f"m={self.m!r}")
        if not self.n > max(0.0, -self.m):
            raise AdmissibilityError("n > max(0, -m)", f"n={self.n!r}, m={self.m!r}")
        for name in ("c", "theta", "d1", "d2"):
            if not getattr(self, name) > 0:
                raise AdmissibilityError(f"{name} > 0", f"{name}={getattr(self, name)!r}")

    def with_(self, **changes) -> "ScaledParams":
        """Copy with some fields replaced (re-validated)."""
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("m", "n", "c", "theta", "d1", "d2")}


# Parameter sets used throughout the numerical experiments.
H_C = 100.0 / 41.0
H_M = -0.5
H_N = 50.0 / 41.0


def preset_h1(theta: float = 0.6627, d2: float = 0.02) -> ScaledParams:
    """(H1): d1=0.01, d2=0.02, c=100/41, m=-0.5, n=50/41."""
    return ScaledParams(m=H_M, n=H_N, c=H_C, theta=theta, d1=0.01, d2=d2)


def preset_h2(theta: float = 0.662, d2: float = 0.15) -> ScaledParams:
    """(H2): d1=0.1, c=100/41, m=-0.5, n=50/41; theta and d2 vary by experiment."""
    return ScaledParams(m=H_M, n=H_N, c=H_C, theta=theta, d1=0.1, d2=d2)


PRESETS = {"H1": preset_h1, "H2": preset_h2}


def rescale(raw: RawParams) -> ScaledParams:
    """Map dimensional parameters to the nondimensional vector."""
    theta = raw.B * math.sqrt(raw.K) / raw.r
    return ScaledParams(
        m=raw.M / raw.K,
        n=raw.N / raw.K,
        c=(raw.D * math.sqrt(raw.K) / raw.A) / theta,
        theta=theta,
        d1=raw.D1 / raw.r,
        d2=raw.D2 / raw.r,
    )


def reaction(u, v, p: ScaledParams):
    """Reaction terms (f1, f2); accepts scalars or arrays."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(u < 0):
        raise DomainError("prey density u must be >= 0 (sqrt of negative density)")
    su = np.sqrt(u)
    f1 = u * (1.0 - u) * (u - p.m) / (u + p.n) - su * v
    f2 = p.theta * v * (su - p.c * v)
    if f1.ndim == 0:
        return float(f1), float(f2)
    return f1, f2


# ---------------------------------------------------------------------------
# Derivatives of the prey growth term g(u) = u(1-u)(u-m)/(u+n).
# Polynomial division gives g = Q(u) + R/(u+n) with R = n(1+n)(n+m), which
# makes every derivative a one-liner.


def _R(p: ScaledParams) -> float:
    return p.n * (1.0 + p.n) * (p.n + p.m)


def growth(u: float, p: ScaledParams) -> float:
    return u * (1.0 - u) * (u - p.m) / (u + p.n)


def growth_derivs(u: float, p: ScaledParams) -> tuple[float, float, float, float]:
    """(g, g', g'', g''') at u."""
    R = _R(p)
    w = u + p.n
    return (
        growth(u, p),
        -2.0 * u + (1.0 + p.m + p.n) - R / w**2,
        -2.0 + 2.0 * R / w**3,
        -6.0 * R / w**4,
    )


def jacobian_matrix(u: float, v: float, p: ScaledParams) -> np.ndarray:
    """Jacobian of the reaction terms at an arbitrary point with u > 0."""
    if u <= 0:
        raise DomainError("Jacobian requires u > 0 (sqrt(u) is not differentiable at 0)")
    su = math.sqrt(u)
    g1 = growth_derivs(u, p)[1]
    return np.array([
        [g1 - v / (2.0 * su), -su],
        [p.theta * v / (2.0 * su), p.theta * (su - 2.0 * p.c * v)],
    ])


@dataclass(frozen=True)
class TaylorTable:
    """Partial derivatives f_ijs of the shifted reaction terms.

    ``entries[(i, j, s)]`` is the pair (d^{i+j+s} f1, d^{i+j+s} f2) taken i
    times in u, j times in v and s times in eps = theta - theta_star, at the
    equilibrium and eps = 0.
    """

    u: float
    v: float
    theta_star: float
    entries: dict = field(default_factory=dict)

    def __getitem__(self, key) -> np.ndarray:
        return self.entries.get(tuple(key), np.zeros(2))

    def bilinear(self, x, y) -> np.ndarray:
        """Second-order form B(x, y) = sum f_ij0 over the symmetric product."""
        f200, f110, f020 = self[2, 0, 0], self[1, 1, 0], self[0, 2, 0]
        return (f200 * x[0] * y[0] + f110 * (x[0] * y[1] + x[1] * y[0])
                + f020 * x[1] * y[1])

    def trilinear(self, x, y, z) -> np.ndarray:
        """Third-order form C(x, y, z) from the f_ij0 with i+j = 3."""
        f300, f210, f120, f030 = (self[3, 0, 0], self[2, 1, 0],
                                  self[1, 2, 0], self[0, 3, 0])
        return (f300 * x[0] * y[0] * z[0]
                + f210 * (x[0] * y[0] * z[1] + x[0] * y[1] * z[0] + x[1] * y[0] * z[0])
                + f120 * (x[0] * y[1] * z[1] + x[1] * y[0] * z[1] + x[1] * y[1] * z[0])
                + f030 * x[1] * y[1] * z[1])


def taylor_table(eq, p: ScaledParams, theta_star: float) -> TaylorTable:
    """Analytic Taylor table at a positive equilibrium.

    ``eq`` is anything with ``u`` and ``v`` attributes (an Equilibrium) or a
    (u, v) pair. The equilibrium does not depend on theta, so the
    eps-derivatives come only from the predator equation.
    """
    u, v = (eq.u, eq.v) if hasattr(eq, "u") else (float(eq[0]), float(eq[1]))
    if not u > 0:
        raise DegeneracyError(f"Taylor table needs a positive equilibrium (u={u!r})")
    th, c = theta_star, p.c
    su = math.sqrt(u)
    _, g1, g2, g3 = growth_derivs(u, p)
    u_m12, u_m32, u_m52 = 1.0 / su, u ** -1.5, u ** -2.5

    e = {}
    # first order (these are the Jacobian entries at theta_star)
    e[1, 0, 0] = np.array([g1 - 0.5 * v * u_m12, 0.5 * th * v * u_m12])
    e[0, 1, 0] = np.array([-su, th * (su - 2.0 * c * v)])
    e[0, 0, 1] = np.array([0.0, v * (su - c * v)])
    # second order
    e[2, 0, 0] = np.array([g2 + 0.25 * v * u_m32, -0.25 * th * v * u_m32])
    e[1, 1, 0] = np.array([-0.5 * u_m12, 0.5 * th * u_m12])
    e[0, 2, 0] = np.array([0.0, -2.0 * c * th])
    e[1, 0, 1] = np.array([0.0, 0.5 * v * u_m12])
    e[0, 1, 1] = np.array([0.0, su - 2.0 * c * v])
    e[0, 0, 2] = np.zeros(2)
    # third order
    e[3, 0, 0] = np.array([g3 - 0.375 * v * u_m52, 0.375 * th * v * u_m52])
    e[2, 1, 0] = np.array([0.25 * u_m32, -0.25 * th * u_m32])
    e[1, 2, 0] = np.zeros(2)
    e[0, 3, 0] = np.zeros(2)
    e[2, 0, 1] = np.array([0.0, -0.25 * v * u_m32])
    e[1, 1, 1] = np.array([0.0, 0.5 * u_m12])
    e[0, 2, 1] = np.array([0.0, -2.0 * c])
    for key in ((1, 0, 2), (0, 1, 2), (0, 0, 3)):
        e[key] = np.zeros(2)
    return TaylorTable(u=u, v=v, theta_star=th, entries=e)
