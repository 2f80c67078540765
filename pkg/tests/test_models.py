"""Preset library and the closed-form resolvent oracle."""

import numpy as np
import pytest

from phstab import (
    PRESET_NAMES,
    assemble_discrete_generator,
    chebyshev_operator,
    preset_model,
    schrodinger_highfreq_limit,
    schrodinger_resolvent_oracle,
)
from phstab.errors import BadParameter, UnknownPreset


def test_preset_names_complete():
    for name in PRESET_NAMES:
        m = preset_model(name)
        assert m.name == name


def test_unknown_preset_raises():
    with pytest.raises(UnknownPreset):
        preset_model("does-not-exist")


def test_bad_parameter_raises():
    with pytest.raises(BadParameter):
        preset_model("wave", k=-1.0)
    with pytest.raises(BadParameter):
        preset_model("wave", gain=2.0)


def _oracle_on_grid(beta, k, alpha, n=96):
    g = chebyshev_operator(n)
    return g, schrodinger_resolvent_oracle(beta, k, alpha, g.nodes)


@pytest.mark.parametrize("beta", [1.0, 10.0, 25.0])
def test_oracle_satisfies_resolvent_equation(beta):
    # (i beta - A) x = 1 with A x = i x''; checked by spectral differentiation
    k, alpha = 1.0, 2.0
    g, x = _oracle_on_grid(beta, k, alpha)
    resid = 1j * beta * x - 1j * (g.D @ (g.D @ x)) - 1.0
    assert np.max(np.abs(resid[3:-3])) < 1e-8


@pytest.mark.parametrize("beta", [1.0, 10.0, 25.0])
def test_oracle_satisfies_boundary_conditions(beta):
    k, alpha = 1.0, 2.0
    g, x = _oracle_on_grid(beta, k, alpha)
    dx = g.D @ x
    assert abs(dx[0] + 1j * k * x[0]) < 1e-8
    assert abs(dx[-1] - alpha * x[-1]) < 1e-8


@pytest.mark.parametrize("beta", [5.0, 10.0, 25.0])
def test_oracle_matches_discretized_resolvent(beta):
    k, alpha = 1.0, 2.0
    m = preset_model("schrodinger", k=k, alpha=alpha)
    op = assemble_discrete_generator(m.defn, m.bc, chebyshev_operator(96))
    ones = np.ones(op.V.shape[0], dtype=complex)
    rhs = op.project(ones)
    c = np.linalg.solve(1j * beta * np.eye(op.size) - op.A_h, rhs)
    co = op.project(schrodinger_resolvent_oracle(beta, k, alpha, op.grid.nodes))
    def mh_norm(v):
        return float(np.sqrt(np.real(v.conj() @ op.M_h @ v)))
    assert mh_norm(c - co) / mh_norm(co) < 1e-6


def test_oracle_norm_decays_like_inverse_beta():
    # ||R(i beta) 1|| ~ 1/beta: the resolvent stays bounded at high frequency
    k, alpha = 1.0, 2.0
    pts = np.linspace(0, 1, 2001)
    norms = []
    for beta in (1e2, 1e4, 1e6):
        x = schrodinger_resolvent_oracle(beta, k, alpha, pts)
        norms.append(float(np.sqrt(np.trapezoid(np.abs(x) ** 2, pts))))
    assert norms[1] < 0.05 * norms[0]
    assert norms[2] < 0.05 * norms[1]


def test_oracle_finite_at_extreme_beta():
    x = schrodinger_resolvent_oracle(1e8, 1.0, 2.0, np.linspace(0, 1, 11))
    assert np.all(np.isfinite(x))
    assert np.max(np.abs(x)) < 1e-3


def test_oracle_rejects_nonpositive_beta():
    with pytest.raises(BadParameter):
        schrodinger_resolvent_oracle(-1.0, 1.0, 2.0, [0.5])


def test_highfreq_table_scaled_values_vanish():
    table = schrodinger_highfreq_limit(1.0, 2.0, [1e2, 1e4, 1e6], 0.5)
    mags = [row[2] for row in table["rows"]]
    assert mags[0] > mags[1] > mags[2]
    assert abs(table["final"]) < 1e-6
