import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from herdturing.errors import AdmissibilityError, DegeneracyError, DomainError
from herdturing.equilibria import find_equilibria
from herdturing.local import jacobian
from herdturing.model import (H_C, H_M, H_N, RawParams, ScaledParams, growth_derivs,
                              jacobian_matrix, preset_h2, reaction, rescale, taylor_table)
from herdturing.spatial import linearize
from oracles import fd_partial, taylor_sym


def admissible():
    return st.tuples(
        st.floats(-0.95, 0.95), st.floats(0.01, 3.0), st.floats(0.1, 10.0), st.floats(0.05, 5.0)
    ).map(lambda t: ScaledParams(m=t[0], n=max(0.0, -t[0]) + t[1], c=t[2], theta=t[3]))


# --- parameters -----------------------------------------------------------------

def test_rescale_identity():
    p = rescale(RawParams(r=1, K=1, A=1, B=1, D=1, M=0, N=1, D1=1, D2=1))
    assert p == ScaledParams(m=0, n=1, c=1, theta=1, d1=1, d2=1)


def test_rescale_h2_raw():
    K, r, B = 4.0, 2.0, 0.5
    theta = B * math.sqrt(K) / r
    A = 1.0
    D = theta * H_C * A / math.sqrt(K)
    p = rescale(RawParams(r=r, K=K, A=A, B=B, D=D, M=-K / 2, N=50 * K / 41, D1=0.2, D2=0.3))
    assert p.m == pytest.approx(H_M, abs=1e-14)
    assert p.n == pytest.approx(H_N, abs=1e-14)
    assert p.c == pytest.approx(H_C, rel=1e-14)
    assert (p.d1, p.d2) == pytest.approx((0.1, 0.15))


def test_rescale_rejects_m_equal_one():
    with pytest.raises(AdmissibilityError, match="-K < M < K"):
        RawParams(r=1, K=1, A=1, B=1, D=1, M=1, N=1, D1=1, D2=1)


def test_rescale_scale_invariance():
    a = rescale(RawParams(r=1, K=1, A=1, B=1, D=1, M=-0.3, N=0.8, D1=1, D2=1))
    b = rescale(RawParams(r=1, K=2, A=1, B=1, D=1, M=-0.6, N=1.6, D1=1, D2=1))
    assert (a.m, a.n) == pytest.approx((b.m, b.n), abs=1e-15)


@pytest.mark.parametrize("kw, bound", [
    (dict(m=1.0, n=1.0), "-1 < m < 1"),
    (dict(m=-0.5, n=0.4), "n > max(0, -m)"),
    (dict(m=0.2, n=-0.1), "n > max(0, -m)"),
    (dict(m=0.2, n=1.0, c=0.0), "c > 0"),
])
def test_scaled_params_admissibility(kw, bound):
    kw = {"c": 1.0, "theta": 1.0, **kw}
    with pytest.raises(AdmissibilityError) as ei:
        ScaledParams(**kw)
    assert ei.value.bound == bound


# --- reaction -------------------------------------------------------------------

def test_reaction_examples():
    p = preset_h2()
    assert reaction(0.0, 0.0, p) == (0.0, 0.0)
    assert reaction(1.0, 0.0, p) == (0.0, 0.0)
    f1, f2 = reaction(0.09, 0.123, p)
    assert abs(f1) < 1e-6 and abs(f2) < 1e-6


def test_reaction_domain_error():
    with pytest.raises(DomainError):
        reaction(-1e-3, 0.1, preset_h2())


@given(admissible(), st.floats(1e-6, 3.0))
def test_predator_nullcline_identity(p, u):
    assert abs(reaction(u, math.sqrt(u) / p.c, p)[1]) < 1e-12


@settings(max_examples=50, deadline=None)
@given(admissible())
def test_equilibria_are_zeros_of_reaction(p):
    for e in find_equilibria(p):
        f1, f2 = reaction(e.u, e.v, p)
        assert abs(f1) < 1e-10 and abs(f2) < 1e-10


@given(admissible(), st.floats(0.01, 2.0))
def test_growth_derivatives_match_sympy(p, u):
    import sympy as sp
    x = sp.Symbol("x")
    g = x * (1 - x) * (x - p.m) / (x + p.n)
    ref = [float(sp.diff(g, x, k).subs(x, u)) for k in range(4)]
    assert np.allclose(growth_derivs(u, p), ref, rtol=1e-9, atol=1e-12)


# --- Taylor table ------------------------------------------------------------------

def test_taylor_table_reference_entries():
    p = preset_h2(theta=0.662)
    theta_star = linearize(p).theta_h0   # entries are taken at theta* = delta1/delta2
    t = taylor_table((0.09, 0.123), p, theta_star)
    assert t[2, 0, 0] == pytest.approx([0.8734, -0.7548], abs=5e-5)
    # the mixed theta derivative is 1/(2c) = 0.205; see the decisions ledger
    assert t[1, 0, 1] == pytest.approx([0.0, 1.0 / (2 * H_C)], abs=1e-14)
    assert t[0, 1, 1] == pytest.approx([0.0, -0.3], abs=1e-12)
    for key in ((1, 2, 0), (0, 3, 0)):
        assert np.all(t[key] == 0.0)


def test_taylor_first_order_equals_jacobian():
    p = preset_h2(theta=0.7)
    eq = [e for e in find_equilibria(p) if e.kind.positive][0]
    t = taylor_table(eq, p, p.theta)
    J = jacobian(eq, p).matrix
    got = np.column_stack([t[1, 0, 0], t[0, 1, 0]])
    assert np.allclose(got, J, atol=1e-10)


def test_taylor_requires_positive_u():
    with pytest.raises(DegeneracyError):
        taylor_table((0.0, 0.0), preset_h2(), 0.6)


@settings(max_examples=40, deadline=None)
@given(admissible(), st.floats(0.02, 2.0), st.floats(0.01, 2.0))
def test_taylor_table_matches_sympy(p, u, v):
    t = taylor_table((u, v), p, p.theta)
    ref = taylor_sym(p.m, p.n, p.c, u, v, p.theta)
    for key, val in ref.items():
        assert np.allclose(t[key], val, rtol=1e-9, atol=1e-11), key


@pytest.mark.parametrize("seed", range(3))
def test_taylor_table_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    m = rng.uniform(-0.9, 0.9)
    p = ScaledParams(m=m, n=max(0, -m) + rng.uniform(0.05, 2), c=rng.uniform(0.5, 5),
                     theta=rng.uniform(0.1, 3))
    u, v = rng.uniform(0.05, 1.5), rng.uniform(0.05, 1.5)
    t = taylor_table((u, v), p, p.theta)
    for key in t.entries:
        for comp in (0, 1):
            ref = fd_partial(p.m, p.n, p.c, u, v, p.theta, key, comp)
            assert t[key][comp] == pytest.approx(ref, rel=1e-6, abs=1e-9)


def test_jacobian_matrix_matches_finite_differences():
    p = preset_h2(theta=0.9)
    u, v, h = 0.3, 0.2, 1e-6
    J = jacobian_matrix(u, v, p)
    fd = np.column_stack([
        (np.array(reaction(u + h, v, p)) - np.array(reaction(u - h, v, p))) / (2 * h),
        (np.array(reaction(u, v + h, p)) - np.array(reaction(u, v - h, p))) / (2 * h)])
    assert np.allclose(J, fd, rtol=1e-6, atol=1e-9)
