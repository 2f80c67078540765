"""Polynomial state machinery, port maps, and domain sampling."""

import numpy as np
import pytest

from phstab import (
    BoundaryCondition,
    HamiltonianDensity,
    PHSDefinition,
    build_port_map,
    preset_model,
    validate_phs,
)
from phstab.core import (
    apply_A0,
    boundary_trace,
    gauss_legendre_01,
    h_inner_product,
    h_norm,
    interpolation_matrix,
    sample_domain_function,
    sigma_matrix,
)
from phstab.errors import RankDeficientW

PRESETS = [
    ("transport", {}),
    ("wave", {}),
    ("schrodinger", {}),
    ("eb-clamped-left", {}),
    ("eb-free-free-tipmass", {}),
]


@pytest.mark.parametrize("name,params", PRESETS)
def test_presets_validate(name, params):
    m = preset_model(name, **params)
    rep = validate_phs(m.defn)
    assert rep.passed, [c for c in rep.checks if not c.passed]


def test_gauss_legendre_01_polynomial_exactness():
    x, w = gauss_legendre_01(8)
    for p in range(2 * 8):
        assert np.dot(w, x**p) == pytest.approx(1.0 / (p + 1), abs=1e-14)


def test_interpolation_matrix_reproduces_polynomials():
    nodes = 0.5 * (1 - np.cos(np.pi * np.arange(9) / 8))
    pts = np.linspace(0, 1, 23)
    P = interpolation_matrix(nodes, pts)
    for p in range(9):
        assert np.allclose(P @ nodes**p, pts**p, atol=1e-12)


def test_sigma_matrix_is_symmetric_permutation():
    S = sigma_matrix(3)
    assert np.allclose(S, S.T)
    assert np.allclose(S @ S, np.eye(6))


@pytest.mark.parametrize("name,params", PRESETS)
def test_port_map_inverts(name, params):
    m = preset_model(name, **params)
    pm = build_port_map(m.defn)
    n = 2 * m.defn.N * m.defn.d
    assert np.allclose(pm.R_ext @ pm.R_inv, np.eye(n), atol=1e-10)
    # R_ext turns the boundary power pairing diag(Q, -Q) into the port form
    nd = pm.nd
    block = np.zeros((2 * nd, 2 * nd), dtype=complex)
    block[:nd, :nd] = pm.Q
    block[nd:, nd:] = -pm.Q
    assert np.allclose(
        pm.R_ext.conj().T @ sigma_matrix(nd) @ pm.R_ext, block, atol=1e-10
    )


@pytest.mark.parametrize("name,params", PRESETS)
def test_domain_samples_satisfy_constraints(name, params):
    m = preset_model(name, **params)
    pm = build_port_map(m.defn)
    wt = m.bc.trace_matrix(pm)
    for seed in range(5):
        x = sample_domain_function(m.defn, m.bc, seed)
        phi = boundary_trace(x, m.defn)
        assert np.linalg.norm(wt @ phi) < 1e-8
        assert h_norm(x, m.defn) == pytest.approx(1.0, abs=1e-10)


def test_h_inner_product_matches_quadrature():
    defn = preset_model("eb-clamped-left").defn
    x = sample_domain_function(defn, preset_model("eb-clamped-left").bc, 3)
    y = sample_domain_function(defn, preset_model("eb-clamped-left").bc, 4)
    ip = h_inner_product(x, y, defn)
    from phstab.core import evaluate_state

    pts, w = gauss_legendre_01(40)
    xv = evaluate_state(x, defn, pts)
    yv = evaluate_state(y, defn, pts)
    # evaluate H(z) y(z) pointwise from the polynomial coefficients
    d, _, p1 = defn.H.coeffs.shape
    Hz = np.einsum("ijp,pn->ijn", defn.H.coeffs, np.vander(pts, p1, increasing=True).T)
    hy = np.einsum("ijn,jn->in", Hz, yv)
    brute = np.sum(w * np.sum(xv.conj() * hy, axis=0))
    assert ip == pytest.approx(brute, abs=1e-10)


def test_apply_a0_is_polynomial_derivative_combination():
    m = preset_model("transport")
    x = sample_domain_function(m.defn, m.bc, 0)
    ax = apply_A0(x, m.defn)
    pts = np.linspace(0.1, 0.9, 7)
    from phstab.core import evaluate_state

    v = evaluate_state(ax, m.defn, pts)
    h = 1e-6
    num = (
        evaluate_state(x, m.defn, pts + h) - evaluate_state(x, m.defn, pts - h)
    ) / (2 * h)
    assert np.allclose(v, num, atol=1e-6)


def test_boundary_trace_ordering():
    # Phi = (values and derivatives at z=1, then at z=0)
    defn = PHSDefinition(
        N=1, d=1, P=(np.zeros((1, 1)), np.eye(1)), H=HamiltonianDensity.identity(1)
    )
    from phstab.core import StateFunction

    x = StateFunction.from_poly(np.array([[1.0, 2.0]]), represents="hx")  # 1 + 2z
    phi = boundary_trace(x, defn)
    assert phi[0] == pytest.approx(3.0)
    assert phi[1] == pytest.approx(1.0)


def test_rank_deficient_boundary_matrix_rejected():
    with pytest.raises(RankDeficientW):
        BoundaryCondition(form="trace", matrix=[[1.0, 1.0], [2.0, 2.0]])
