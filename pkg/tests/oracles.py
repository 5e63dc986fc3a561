"""Independent oracles used by the test-suite.

Nothing here imports the package's analytic code: derivatives come from
sympy or mpmath finite differences, and normal-form coefficients from a
Galerkin projection of the PDE onto a few cosine modes followed by the
standard center-manifold formulas (first Lyapunov coefficient for Hopf,
cubic coefficient for a simple zero eigenvalue).
"""

from __future__ import annotations

import itertools
import math

import mpmath as mp
import numpy as np
import sympy as sp
from scipy.integrate import quad

_u, _v, _th = sp.symbols("u v theta", positive=True)


def reaction_sym(m, n, c):
    f1 = _u * (1 - _u) * (_u - m) / (_u + n) - sp.sqrt(_u) * _v
    f2 = _th * _v * (sp.sqrt(_u) - c * _v)
    return f1, f2


def taylor_sym(m, n, c, u, v, theta):
    """{(i, j, s): array([d f1, d f2])} for i+j+s <= 3, from sympy."""
    f = reaction_sym(m, n, c)
    out = {}
    for i, j, s in itertools.product(range(4), repeat=3):
        if 1 <= i + j + s <= 3:
            vals = []
            for fk in f:
                d = fk
                for sym, k in ((_u, i), (_v, j), (_th, s)):
                    if k:
                        d = sp.diff(d, sym, k)
                vals.append(float(d.subs({_u: u, _v: v, _th: theta})))
            out[(i, j, s)] = np.array(vals)
    return out


def fd_partial(m, n, c, u, v, theta, order, comp, dps=30):
    """Finite-difference partial derivative (mpmath, extended precision)."""
    mp.mp.dps = dps
    m, n, c = mp.mpf(m), mp.mpf(n), mp.mpf(c)
    if comp == 0:
        f = lambda uu, vv, tt: uu * (1 - uu) * (uu - m) / (uu + n) - mp.sqrt(uu) * vv
    else:
        f = lambda uu, vv, tt: tt * vv * (mp.sqrt(uu) - c * vv)
    return float(mp.diff(f, (mp.mpf(u), mp.mpf(v), mp.mpf(theta)), order))


# --- Galerkin normal-form oracle ------------------------------------------------

def _basis(k):
    nrm = math.sqrt(math.pi) if k == 0 else math.sqrt(math.pi / 2.0)
    return lambda x: math.cos(k * x) / nrm


def _integrals(modes, order):
    fs = [_basis(k) for k in modes]
    K = len(modes)
    out = np.zeros((K,) * order)
    for idx in itertools.product(range(K), repeat=order):
        out[idx] = quad(lambda x: math.prod(fs[i](x) for i in idx), 0.0, math.pi)[0]
    return out


class Galerkin:
    """Reaction-diffusion system at E31 projected onto cosine modes."""

    def __init__(self, m, n, c, d1, d2, theta, modes):
        self.modes = list(modes)
        self.K = len(self.modes)
        u = ((m + 1) * c - 1) / c
        v = math.sqrt(u) / c
        self.f = taylor_sym(m, n, c, u, v, theta)
        J = np.array([[self.f[1, 0, 0][0], self.f[0, 1, 0][0]],
                      [self.f[1, 0, 0][1], self.f[0, 1, 0][1]]])
        N = 2 * self.K
        self.A = np.zeros((N, N))
        for i, k in enumerate(self.modes):
            self.A[2 * i:2 * i + 2, 2 * i:2 * i + 2] = J - np.diag([d1, d2]) * k * k
        self.I3 = _integrals(self.modes, 3)
        self.I4 = _integrals(self.modes, 4)

    def _B0(self, x, y):
        f = self.f
        return (f[2, 0, 0] * x[0] * y[0] + f[1, 1, 0] * (x[0] * y[1] + x[1] * y[0])
                + f[0, 2, 0] * x[1] * y[1])

    def _C0(self, x, y, z):
        f = self.f
        return (f[3, 0, 0] * x[0] * y[0] * z[0]
                + f[2, 1, 0] * (x[0] * y[0] * z[1] + x[0] * y[1] * z[0] + x[1] * y[0] * z[0])
                + f[1, 2, 0] * (x[0] * y[1] * z[1] + x[1] * y[0] * z[1] + x[1] * y[1] * z[0])
                + f[0, 3, 0] * x[1] * y[1] * z[1])

    def B(self, X, Y):
        K = self.K
        out = np.zeros(2 * K, dtype=complex)
        for a in range(K):
            for b in range(K):
                val = self._B0(X[2 * a:2 * a + 2], Y[2 * b:2 * b + 2])
                for e in range(K):
                    out[2 * e:2 * e + 2] += val * self.I3[a, b, e]
        return out

    def C(self, X, Y, Z):
        K = self.K
        out = np.zeros(2 * K, dtype=complex)
        for a, b, e in itertools.product(range(K), repeat=3):
            val = self._C0(X[2 * a:2 * a + 2], Y[2 * b:2 * b + 2], Z[2 * e:2 * e + 2])
            for g in range(K):
                out[2 * g:2 * g + 2] += val * self.I4[a, b, e, g]
        return out

    def hopf(self, s):
        """(omega, c1) with eigenvector normalized to second component 1 in mode s."""
        ev, V = np.linalg.eig(self.A)
        i = int(np.argmin(np.abs(ev.real) + 1e9 * (ev.imag <= 0)))
        w = ev[i].imag
        P = V[:, i]
        evl, W = np.linalg.eig(self.A.T)
        Q = W[:, int(np.argmin(np.abs(evl - 1j * w)))]
        si = self.modes.index(s)
        P = P / P[2 * si + 1]
        Q = Q / (Q @ P)
        N = 2 * self.K
        h11 = -np.linalg.solve(self.A, self.B(P, P.conj()))
        h20 = np.linalg.solve(2j * w * np.eye(N) - self.A, self.B(P, P))
        c1 = 0.5 * Q @ (self.C(P, P, P.conj()) + 2 * self.B(P, h11) + self.B(P.conj(), h20))
        return w, c1

    def pitchfork(self, s, p_tilde, q_tilde):
        """Cubic coefficient of the reduced equation for a simple zero eigenvalue in mode s."""
        si = self.modes.index(s)
        P = np.zeros(2 * self.K, dtype=complex)
        Q = np.zeros(2 * self.K, dtype=complex)
        P[2 * si:2 * si + 2] = p_tilde
        Q[2 * si:2 * si + 2] = q_tilde
        rhs = -self.B(P, P)
        h = np.zeros_like(rhs)
        for i in range(self.K):
            blk = slice(2 * i, 2 * i + 2)
            if i == si:
                assert np.abs(rhs[blk]).max() < 1e-12
                continue
            h[blk] = np.linalg.solve(self.A[blk, blk], rhs[blk])
        return float((Q @ (self.C(P, P, P) + 3 * self.B(P, h))).real / 6.0)
