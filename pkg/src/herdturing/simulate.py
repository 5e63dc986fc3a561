"""Time integration of the local ODE and the reaction-diffusion PDE.

Space: cell-centered grid on (0, pi) with mirror ghost cells, so the discrete
Laplacian satisfies homogeneous Neumann conditions and conserves mass exactly
under pure diffusion. Time: classical fourth-order Runge-Kutta.

sqrt(u) is evaluated as sqrt(max(u, 0)). After every step a slightly negative
prey density (discretization noise) is clamped to zero and counted; a value
below -1e-8 aborts the run as an instability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numba
import numpy as np

from .errors import ConfigError, DomainError, InstabilityError
from .model import ScaledParams, jacobian_matrix

NEG_TOL = 1e-8
DIFFUSION_SAFETY = 0.4      # auto dt = 0.4 h^2 / (2 max d)
RK4_DIFFUSION_LIMIT = 0.69  # RK4 is stable for dt <= ~0.696 h^2 / d


@numba.njit(cache=True)
def _rhs(u, v, du, dv, m, n, c, th, d1, d2, inv_h2, react):
    N = u.shape[0]
    for i in range(N):
        ui = u[i]
        vi = v[i]
        ul = u[i - 1] if i > 0 else ui
        ur = u[i + 1] if i < N - 1 else ui
        vl = v[i - 1] if i > 0 else vi
        vr = v[i + 1] if i < N - 1 else vi
        du[i] = d1 * (ul - 2.0 * ui + ur) * inv_h2
        dv[i] = d2 * (vl - 2.0 * vi + vr) * inv_h2
        if react:
            su = math.sqrt(ui) if ui > 0.0 else 0.0
            du[i] += ui * (1.0 - ui) * (ui - m) / (ui + n) - su * vi
            dv[i] += th * vi * (su - c * vi)


@numba.njit(cache=True)
def _advance(u, v, dt, nsteps, m, n, c, th, d1, d2, inv_h2, react, neg_tol):
    """RK4 steps in place. Returns (steps done, clamp events, min pre-clamp u)."""
    N = u.shape[0]
    k1u = np.empty(N); k1v = np.empty(N); k2u = np.empty(N); k2v = np.empty(N)
    k3u = np.empty(N); k3v = np.empty(N); k4u = np.empty(N); k4v = np.empty(N)
    tu = np.empty(N); tv = np.empty(N)
    clamps = 0
    umin = np.inf
    h2 = 0.5 * dt
    for s in range(nsteps):
        _rhs(u, v, k1u, k1v, m, n, c, th, d1, d2, inv_h2, react)
        for i in range(N):
            tu[i] = u[i] + h2 * k1u[i]
            tv[i] = v[i] + h2 * k1v[i]
        _rhs(tu, tv, k2u, k2v, m, n, c, th, d1, d2, inv_h2, react)
        for i in range(N):
            tu[i] = u[i] + h2 * k2u[i]
            tv[i] = v[i] + h2 * k2v[i]
        _rhs(tu, tv, k3u, k3v, m, n, c, th, d1, d2, inv_h2, react)
        for i in range(N):
            tu[i] = u[i] + dt * k3u[i]
            tv[i] = v[i] + dt * k3v[i]
        _rhs(tu, tv, k4u, k4v, m, n, c, th, d1, d2, inv_h2, react)
        for i in range(N):
            u[i] += dt / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i])
            v[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i])
            if u[i] < umin:
                umin = u[i]
            if u[i] < 0.0:
                if u[i] < -neg_tol:
                    return s, clamps, umin
                u[i] = 0.0
                clamps += 1
            if v[i] < 0.0:
                if v[i] < -neg_tol:
                    return s, clamps, umin
                v[i] = 0.0
                clamps += 1
    return nsteps, clamps, umin


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Grid1D:
    n_cells: int = 128

    def __post_init__(self):
        if not isinstance(self.n_cells, int) or self.n_cells < 8:
            raise ConfigError("/grid/n_cells", f"must be an integer >= 8 (got {self.n_cells!r})")

    @property
    def h(self) -> float:
        return math.pi / self.n_cells

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.h


@dataclass(frozen=True)
class Field:
    t: float
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        for name in ("u", "v"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class Initial:
    """Initial data: constant(u0, v0), cosine(u0, au, v0, av) or custom samples."""

    kind: str
    values: tuple = ()
    u: tuple | None = None
    v: tuple | None = None

    @staticmethod
    def constant(u0: float, v0: float) -> "Initial":
        return Initial("constant", (float(u0), float(v0)))

    @staticmethod
    def cosine(u0: float, au: float, v0: float, av: float) -> "Initial":
        return Initial("cosine", (float(u0), float(au), float(v0), float(av)))

    @staticmethod
    def custom(u, v) -> "Initial":
        return Initial("custom", (), tuple(map(float, u)), tuple(map(float, v)))

    def sample(self, grid: Grid1D) -> tuple[np.ndarray, np.ndarray]:
        x = grid.x
        if self.kind == "constant":
            u0, v0 = self.values
            u, v = np.full_like(x, u0), np.full_like(x, v0)
        elif self.kind == "cosine":
            u0, au, v0, av = self.values
            u, v = u0 + au * np.cos(x), v0 + av * np.cos(x)
        elif self.kind == "custom":
            u, v = np.array(self.u, float), np.array(self.v, float)
            if u.shape != x.shape or v.shape != x.shape:
                raise ConfigError("/initial", f"custom samples need {grid.n_cells} values each")
        else:
            raise ConfigError("/initial/kind", f"unknown initial kind {self.kind!r}")
        if np.any(u < 0) or np.any(v < 0):
            raise DomainError("initial densities must be >= 0")
        return u, v

    def as_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "u0": self.values[0], "v0": self.values[1]}
        if self.kind == "cosine":
            return dict(zip(("u0", "au", "v0", "av"), self.values), kind="cosine")
        return {"kind": "custom", "u": list(self.u), "v": list(self.v)}


@dataclass(frozen=True)
class Thresholds:
    spatial_var: float = 1e-8
    oscillation: float = 1e-6
    blowup: float = 1e3


@dataclass(frozen=True)
class RunConfig:
    params: ScaledParams
    grid: Grid1D = Grid1D()
    t_end: float = 100.0
    dt: Union[float, str] = "auto"
    initial: Initial = Initial.constant(0.09, 0.123)
    output_every: float = 1.0
    thresholds: Thresholds = Thresholds()
    reaction: bool = True

    def __post_init__(self):
        if not (isinstance(self.t_end, (int, float)) and self.t_end > 0):
            raise ConfigError("/t_end", f"must be > 0 (got {self.t_end!r})")
        if not (isinstance(self.output_every, (int, float)) and self.output_every > 0):
            raise ConfigError("/output_every", f"must be > 0 (got {self.output_every!r})")
        if self.dt != "auto" and not (isinstance(self.dt, (int, float)) and self.dt > 0):
            raise ConfigError("/dt", f"must be 'auto' or a positive number (got {self.dt!r})")

    def stability_limit(self) -> float:
        dmax = max(self.params.d1, self.params.d2)
        return RK4_DIFFUSION_LIMIT * self.grid.h ** 2 / dmax

    def resolve_dt(self) -> float:
        """Step size actually used; divides output_every exactly."""
        if self.dt == "auto":
            dmax = max(self.params.d1, self.params.d2)
            dt = DIFFUSION_SAFETY * self.grid.h ** 2 / (2.0 * dmax)
            u0, v0 = self.initial.sample(self.grid)
            um, vm = float(u0.mean()), float(v0.mean())
            if self.reaction and um > 0:
                lam = np.abs(np.linalg.eigvals(jacobian_matrix(um, vm, self.params))).max()
                if lam > 0:
                    dt = min(dt, 0.1 / lam)
        else:
            dt = float(self.dt)
            if dt > self.stability_limit():
                raise InstabilityError(
                    f"dt={dt:.3g} exceeds the explicit stability limit "
                    f"{self.stability_limit():.3g}; use a smaller dt or dt='auto'")
        nper = max(1, math.ceil(self.output_every / dt - 1e-9))
        return self.output_every / nper


# ---------------------------------------------------------------------------
# ODE


def _args(p: ScaledParams):
    return p.m, p.n, p.c, p.theta


def step_ode(state, p: ScaledParams, dt: float) -> tuple[float, float]:
    """One RK4 step of the local system."""
    u, v = float(state[0]), float(state[1])
    if u < 0:
        raise DomainError("prey density must be >= 0")
    uu, vv = np.array([u]), np.array([v])
    done, _, _ = _advance(uu, vv, dt, 1, *_args(p), 0.0, 0.0, 0.0, True, NEG_TOL)
    if done < 1:
        raise InstabilityError(f"prey density went below -{NEG_TOL:g}; reduce dt")
    return float(uu[0]), float(vv[0])


@dataclass
class OdeTrajectory:
    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    clamp_events: int = 0


def integrate_ode(state, p: ScaledParams, t_end: float, dt: float = 0.01,
                  output_every: float = 1.0) -> OdeTrajectory:
    """Trajectory of the local system sampled every ``output_every``."""
    nper = max(1, math.ceil(output_every / dt - 1e-9))
    dt = output_every / nper
    nout = int(round(t_end / output_every))
    uu, vv = np.array([float(state[0])]), np.array([float(state[1])])
    ts, us, vs = [0.0], [uu[0]], [vv[0]]
    clamps = 0
    for k in range(nout):
        done, cl, _ = _advance(uu, vv, dt, nper, *_args(p), 0.0, 0.0, 0.0, True, NEG_TOL)
        clamps += cl
        if done < nper:
            raise InstabilityError(f"prey density went below -{NEG_TOL:g} near t={(k + 1) * output_every:g}")
        ts.append((k + 1) * output_every)
        us.append(uu[0])
        vs.append(vv[0])
    return OdeTrajectory(np.array(ts), np.array(us), np.array(vs), clamps)


# ---------------------------------------------------------------------------
# PDE


def step_pde(fld: Field, cfg: RunConfig, dt: float | None = None) -> Field:
    """Advance one time step of size ``dt`` (default cfg.resolve_dt())."""
    dt = cfg.resolve_dt() if dt is None else dt
    u, v = np.array(fld.u), np.array(fld.v)
    p = cfg.params
    done, _, _ = _advance(u, v, dt, 1, *_args(p), p.d1, p.d2, 1.0 / cfg.grid.h ** 2,
                          cfg.reaction, NEG_TOL)
    if done < 1:
        raise InstabilityError(f"prey density went below -{NEG_TOL:g}; reduce dt")
    return Field(fld.t + dt, u, v)


ATTRACTORS = ("constant_state", "homogeneous_periodic", "inhomogeneous_steady",
              "inhomogeneous_periodic", "undecided")


@dataclass
class RunResult:
    config: RunConfig
    dt: float
    snapshots: list = field(default_factory=list)
    status: str = "ok"               # ok | diverged
    failure_time: float | None = None
    attractor: str = "undecided"
    metrics: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    def u_matrix(self) -> np.ndarray:
        return np.array([s.u for s in self.snapshots])

    def v_matrix(self) -> np.ndarray:
        return np.array([s.v for s in self.snapshots])


def oscillation_amplitude(series: np.ndarray) -> float:
    """Spread of the interior local extrema; 0 for a monotone series."""
    d = np.diff(series)
    idx = np.nonzero(d[:-1] * d[1:] < 0)[0] + 1
    if idx.size < 2:
        return 0.0
    ext = series[idx]
    return float(ext.max() - ext.min())


def classify_attractor(t: np.ndarray, U: np.ndarray, V: np.ndarray,
                       thr: Thresholds = Thresholds()) -> tuple[str, dict]:
    """Label the behavior over the last 20% of a run.

    Spatial variance below thr.spatial_var means spatially homogeneous;
    oscillation amplitude above thr.oscillation means periodic.
    """
    nt = len(t)
    w0 = int(math.floor(0.8 * (nt - 1)))
    Uw, Vw = U[w0:], V[w0:]
    metrics = {"window_start": float(t[w0]), "window_end": float(t[-1])}
    if len(Uw) < 5:
        metrics["reason"] = "fewer than 5 snapshots in the classification window"
        return "undecided", metrics
    svar = float(max((Uw.var(axis=1) + Vw.var(axis=1)).max(), 0.0))
    probes = [Uw.mean(axis=1), Vw.mean(axis=1), Uw[:, 0], Uw[:, -1], Vw[:, 0], Vw[:, -1]]
    amp = max(oscillation_amplitude(s) for s in probes)
    first = U[: max(5, nt - w0)]
    metrics.update(
        spatial_variance=svar,
        oscillation_amplitude=amp,
        oscillation_amplitude_first=oscillation_amplitude(first.mean(axis=1)),
        oscillation_amplitude_last=oscillation_amplitude(Uw.mean(axis=1)),
        final_mean_u=float(U[-1].mean()),
        final_mean_v=float(V[-1].mean()),
        final_u_min=float(U[-1].min()),
        final_u_max=float(U[-1].max()),
        final_u_left_minus_right=float(U[-1, 0] - U[-1, -1]),
        prey_extinct=bool(U[-1].max() < 1e-12),
    )
    homogeneous = svar < thr.spatial_var
    periodic = amp > thr.oscillation
    if homogeneous:
        label = "homogeneous_periodic" if periodic else "constant_state"
    else:
        label = "inhomogeneous_periodic" if periodic else "inhomogeneous_steady"
    return label, metrics


def run(cfg: RunConfig) -> RunResult:
    """Integrate to cfg.t_end, emitting a snapshot every cfg.output_every."""
    dt = cfg.resolve_dt()
    p = cfg.params
    u, v = cfg.initial.sample(cfg.grid)
    u, v = u.copy(), v.copy()
    nper = int(round(cfg.output_every / dt))
    nout = int(math.ceil(cfg.t_end / cfg.output_every - 1e-9))
    res = RunResult(cfg, dt, [Field(0.0, u, v)])
    clamps = 0
    umin = float(u.min())
    inv_h2 = 1.0 / cfg.grid.h ** 2
    for k in range(nout):
        done, cl, um = _advance(u, v, dt, nper, *_args(p), p.d1, p.d2, inv_h2,
                                cfg.reaction, NEG_TOL)
        clamps += cl
        umin = min(umin, um)
        t = k * cfg.output_every + done * dt
        if done < nper:
            raise InstabilityError(
                f"density went below -{NEG_TOL:g} at t={t:.6g} (min u={um:.3g}); "
                "reduce dt (prey may also be going extinct in finite time)")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))) or \
                max(np.abs(u).max(), np.abs(v).max()) > cfg.thresholds.blowup:
            res.status, res.failure_time = "diverged", t
            res.snapshots.append(Field(t, u, v))
            break
        res.snapshots.append(Field((k + 1) * cfg.output_every, u, v))
    res.metrics = {"clamp_events": clamps, "min_u_before_clamp": umin, "dt": dt,
                   "steps": nper * (len(res.snapshots) - 1)}
    if res.status == "diverged":
        res.attractor = "undecided"
        res.metrics["failure_time"] = res.failure_time
        return res
    label, m = classify_attractor(res.times, res.u_matrix(), res.v_matrix(), cfg.thresholds)
    res.attractor = label
    res.metrics.update(m)
    return res
