"""Helpers that measure simulator behavior independently of the analytic modules."""

from __future__ import annotations

import math

import numpy as np

from herdturing.model import preset_h2
from herdturing.simulate import Grid1D, Initial, RunConfig, run

E31 = (0.09, 0.123)


def _mode_matrix(k2, p):
    """Jacobian at E31 minus diffusion at squared wavenumber k2, from the raw formulas."""
    u, v = E31
    growth = lambda x: x * (1 - x) * (x - p.m) / (x + p.n)
    h = 1e-6
    j11 = (growth(u + h) - growth(u - h)) / (2 * h) - v / (2 * math.sqrt(u))
    J = np.array([[j11, -math.sqrt(u)],
                  [p.theta * v / (2 * math.sqrt(u)), p.theta * (math.sqrt(u) - 2 * p.c * v)]])
    return J - np.diag([p.d1, p.d2]) * k2


def measured_growth_rate(k: int, theta: float, d2: float, n_cells: int = 128,
                         t_end: float = 20.0, amp: float = 1e-6) -> float:
    """Re(lambda) of the dominant eigen-direction of mode k, from a PDE run.

    The run starts at E31 plus amp*cos(kx) in both components. The cosine
    coefficient vector a(t) is projected onto the left eigenvector of the
    dominant eigenvalue; its modulus grows like exp(Re(lambda) t).
    """
    p = preset_h2(theta=theta, d2=d2)
    g = Grid1D(n_cells)
    x = g.x
    phi = np.cos(k * x)
    u0, v0 = E31[0] + amp * phi, E31[1] + amp * phi
    cfg = RunConfig(p, g, t_end, "auto", Initial.custom(u0, v0), output_every=t_end / 4)
    res = run(cfg)
    k2 = (2.0 / g.h * math.sin(k * g.h / 2.0)) ** 2  # discrete Laplacian eigenvalue
    ev, W = np.linalg.eig(_mode_matrix(k2, p).T)
    w = W[:, int(np.argmax(ev.real))]
    nrm = phi @ phi

    def coef(snap):
        return np.array([(snap.u - E31[0]) @ phi, (snap.v - E31[1]) @ phi]) / nrm

    a0, a1 = coef(res.snapshots[0]), coef(res.snapshots[-1])
    return math.log(abs(w @ a1) / abs(w @ a0)) / (res.snapshots[-1].t - res.snapshots[0].t)
