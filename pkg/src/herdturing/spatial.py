"""Linear analysis of the diffusive system at E31.

Mode k (eigenfunction cos(kx) on (0, pi)) has the 2x2 matrix

    H_k = [[delta1 - d1 k^2, -delta2], [theta/(2c), -theta delta2 - d2 k^2]]

whose trace T_k and determinant D_k decide stability. Hopf curves are T_k = 0,
Turing lines are D_k = 0; both are closed-form in the (theta, d2) plane.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .equilibria import classify_case
from .errors import DegeneracyError, DomainError, PreconditionError
from .local import prey_self_rate
from .model import ScaledParams


@dataclass(frozen=True)
class LinearizationAtE31:
    delta1: float
    delta2: float
    theta: float
    d1: float
    d2: float
    c: float

    def __post_init__(self):
        if not self.delta2 > 0:
            raise PreconditionError(f"delta2 must be > 0 (got {self.delta2!r})")
        if not self.delta1 > 0:
            raise PreconditionError(f"spatial analysis assumes delta1 > 0 (got {self.delta1!r})")

    def with_(self, **changes) -> "LinearizationAtE31":
        return replace(self, **changes)

    @property
    def theta_h0(self) -> float:
        """Local Hopf threshold delta1/delta2 (the horizontal curve H_0)."""
        return self.delta1 / self.delta2


def linearize(p: ScaledParams) -> LinearizationAtE31:
    """delta1 = J11 and delta2 = sqrt(u31) at E31; needs case b."""
    cs = classify_case(p)
    if cs.case != "b":
        raise PreconditionError(f"E31 exists only in case b (n = m1, (m+1)c > 1); got case {cs.case}")
    u31 = ((p.m + 1.0) * p.c - 1.0) / p.c
    return LinearizationAtE31(prey_self_rate(u31, p), math.sqrt(u31), p.theta, p.d1, p.d2, p.c)


@dataclass(frozen=True)
class SpectralMode:
    k: int
    Tk: float
    Dk: float
    eigenvalues: tuple[complex, complex]

    @property
    def growth_rate(self) -> float:
        return max(e.real for e in self.eigenvalues)


def mode_matrix(k: int, lin: LinearizationAtE31) -> np.ndarray:
    k2 = k * k
    return np.array([[lin.delta1 - lin.d1 * k2, -lin.delta2],
                     [lin.theta / (2.0 * lin.c), -lin.theta * lin.delta2 - lin.d2 * k2]])


def trace_k(k: int, lin: LinearizationAtE31) -> float:
    return lin.delta1 - lin.theta * lin.delta2 - (lin.d1 + lin.d2) * k * k


def det_k(k: int, lin: LinearizationAtE31) -> float:
    k2 = k * k
    return (lin.d1 * lin.d2 * k2 * k2
            + (lin.d1 * lin.theta * lin.delta2 - lin.d2 * lin.delta1) * k2
            + lin.theta * lin.delta2 * (1.0 - 2.0 * lin.c * lin.delta1) / (2.0 * lin.c))


def mode(k: int, lin: LinearizationAtE31) -> SpectralMode:
    if k < 0:
        raise DomainError(f"wavenumber must be >= 0 (got {k})")
    T, D = trace_k(k, lin), det_k(k, lin)
    r = cmath.sqrt(T * T - 4.0 * D)
    return SpectralMode(k, T, D, ((T + r) / 2.0, (T - r) / 2.0))


def k_star(lin: LinearizationAtE31) -> int:
    """Largest k with delta1 - d1 k^2 > 0 (strict)."""
    k = int(math.floor(math.sqrt(lin.delta1 / lin.d1)))
    while k > 0 and not lin.delta1 - lin.d1 * k * k > 0:
        k -= 1
    while lin.delta1 - lin.d1 * (k + 1) ** 2 > 0:
        k += 1
    return k


# --- Hopf curves T_k = 0 -----------------------------------------------------

def hopf_curve_d2(k: int, theta: float, lin: LinearizationAtE31) -> float:
    """d2 on H_k as a function of theta (k >= 1)."""
    if k < 1:
        raise PreconditionError("H_0 is the line theta = delta1/delta2; use theta_H(0, ...)")
    k2 = k * k
    return (-lin.delta2 * theta + lin.delta1 - lin.d1 * k2) / k2


def theta_H(k: int, d2: float, lin: LinearizationAtE31) -> float:
    """theta on H_k as a function of d2."""
    k2 = k * k
    return (lin.delta1 - lin.d1 * k2 - d2 * k2) / lin.delta2


def theta_star_k(k: int, lin: LinearizationAtE31) -> float:
    """Lower end of H_k: where it meets the Turing line of the same mode."""
    return 2.0 * lin.c * (lin.delta1 - lin.d1 * k * k) ** 2 / lin.delta2


# --- Turing lines D_k = 0 -----------------------------------------------------

def eta(x, lin: LinearizationAtE31):
    """Slope of l_k as a function of x = k^2."""
    x = np.asarray(x, dtype=float)
    den = lin.d1 * lin.delta2 * x + lin.delta2 * (0.5 / lin.c - lin.delta1)
    out = (lin.delta1 - lin.d1 * x) * x / den
    return float(out) if out.ndim == 0 else out


def turing_slope(k: int, lin: LinearizationAtE31) -> float:
    den = lin.d1 * lin.delta2 * k * k + lin.delta2 * (0.5 / lin.c - lin.delta1)
    if abs(den) < 1e-14:
        raise DegeneracyError(f"Turing line l_{k} has a singular slope (denominator {den:.3g})")
    return (lin.delta1 - lin.d1 * k * k) * k * k / den


def turing_curve_theta(k: int, d2: float, lin: LinearizationAtE31) -> float:
    """theta on l_k as a function of d2."""
    if k < 1:
        raise PreconditionError("Turing lines are defined for k >= 1")
    return turing_slope(k, lin) * d2


def turing_curve_d2(k: int, theta: float, lin: LinearizationAtE31) -> float:
    slope = turing_slope(k, lin)
    if slope == 0.0:
        raise DegeneracyError(f"Turing line l_{k} is horizontal (d1 k^2 = delta1); d2 is undefined")
    return theta / slope


@dataclass(frozen=True)
class TuringTest:
    unstable: bool
    witnesses: list[int]

    def as_dict(self) -> dict:
        return {"unstable": self.unstable, "witnesses": list(self.witnesses)}


def turing_instability_test(lin: LinearizationAtE31, k_max: int | None = None) -> TuringTest:
    """Diffusion-driven instability: theta above H_0 but below some l_k."""
    ks = k_star(lin) if k_max is None else min(k_max, k_star(lin))
    if not lin.theta > lin.theta_h0:
        return TuringTest(False, [])
    wit = [k for k in range(1, ks + 1) if lin.theta < turing_curve_theta(k, lin.d2, lin)]
    return TuringTest(bool(wit), wit)


@dataclass(frozen=True)
class ModeSelection:
    k_star: int
    x_star: float
    k_m: int
    th_point: tuple[float, float]  # (d2_m, theta_m)

    def as_dict(self) -> dict:
        return {"k_star": self.k_star, "x_star": self.x_star, "k_m": self.k_m,
                "th_point": list(self.th_point)}


def mode_selection(lin: LinearizationAtE31) -> ModeSelection:
    """Wavenumber whose Turing line meets H_0 first, and that meeting point.

    eta is maximized at x* (in x = k^2); k_m compares the two integer
    wavenumbers around sqrt(x*), clamped to [1, k*].
    """
    ks = k_star(lin)
    if ks < 1:
        raise PreconditionError("no Turing line with positive slope (k* = 0)")
    disc = 1.0 - 2.0 * lin.c * lin.delta1
    if disc <= 0:
        raise DomainError(f"x* needs 1 - 2c delta1 > 0 (got {disc:.6g})")
    x_star = (2.0 * lin.c * lin.delta1 - 1.0 + math.sqrt(disc)) / (2.0 * lin.c * lin.d1)
    lo = int(math.floor(math.sqrt(max(x_star, 0.0))))
    cands = sorted({min(max(k, 1), ks) for k in (lo, lo + 1)})
    k_m = cands[0]
    for k in cands[1:]:
        if eta(k * k, lin) > eta(k_m * k_m, lin):
            k_m = k
    theta_m = lin.theta_h0
    return ModeSelection(ks, x_star, k_m, (theta_m / turing_slope(k_m, lin), theta_m))


def transversality(lin: LinearizationAtE31, at: str, k: int = 1) -> float:
    """d Re(lambda)/d theta on H_k ('hopf') or on l_k ('turing')."""
    if at == "hopf":
        return -lin.delta2 / 2.0
    if at != "turing":
        raise ValueError(f"at must be 'hopf' or 'turing', not {at!r}")
    on = lin.with_(theta=turing_curve_theta(k, lin.d2, lin))
    T = trace_k(k, on)
    if abs(T) < 1e-12:
        raise DegeneracyError("T_k = 0 on the Turing line: this is the Turing-Hopf point")
    return (lin.d1 * lin.delta2 * k * k + lin.delta2 * (0.5 / lin.c - lin.delta1)) / T


# --- regions --------------------------------------------------------------

REGION_LABELS = ("stable", "turing_unstable", "hopf_unstable")


def region_label(lin: LinearizationAtE31, k_max: int | None = None) -> str:
    """Label a (theta, d2) point by direct per-mode stability evaluation."""
    kmax = (k_star(lin) + 3) if k_max is None else k_max
    modes = [mode(k, lin) for k in range(kmax + 1)]
    if modes[0].Tk > 0 or modes[0].Dk < 0:
        return "hopf_unstable"
    if any(md.Dk < 0 for md in modes[1:]):
        return "turing_unstable"
    if any(md.Tk > 0 for md in modes[1:]):
        return "hopf_unstable"
    return "stable"


@dataclass
class BifurcationDiagram:
    k_star: int
    x_star: float
    k_m: int
    hopf_curves: list = field(default_factory=list)    # (k, theta_star_k)
    turing_lines: list = field(default_factory=list)   # (k, eta_k)
    th_point: tuple[float, float] = (math.nan, math.nan)
    thetas: np.ndarray | None = None
    d2s: np.ndarray | None = None
    regions: np.ndarray | None = None                  # shape (len(thetas), len(d2s))

    def as_dict(self) -> dict:
        out = {"k_star": self.k_star, "x_star": self.x_star, "k_m": self.k_m,
               "hopf_curves": [{"k": k, "theta_star": t} for k, t in self.hopf_curves],
               "turing_lines": [{"k": k, "slope": s} for k, s in self.turing_lines],
               "th_point": list(self.th_point)}
        return out


def bifurcation_diagram(lin: LinearizationAtE31, thetas=None, d2s=None) -> BifurcationDiagram:
    sel = mode_selection(lin)
    dia = BifurcationDiagram(sel.k_star, sel.x_star, sel.k_m, th_point=sel.th_point)
    dia.hopf_curves = [(k, theta_star_k(k, lin)) for k in range(sel.k_star + 1)]
    dia.turing_lines = [(k, turing_slope(k, lin)) for k in range(1, sel.k_star + 1)]
    if thetas is not None and d2s is not None:
        thetas, d2s = np.asarray(thetas, float), np.asarray(d2s, float)
        reg = np.empty((thetas.size, d2s.size), dtype=object)
        for i, th in enumerate(thetas):
            for j, d2 in enumerate(d2s):
                reg[i, j] = region_label(lin.with_(theta=float(th), d2=float(d2)))
        dia.thetas, dia.d2s, dia.regions = thetas, d2s, reg
    return dia
