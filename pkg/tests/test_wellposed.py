"""Generation certificates, dissipation coefficients, stability rules."""

import numpy as np
import pytest

from phstab import (
    BoundaryCondition,
    TraceSelector,
    boundary_dissipation_coefficient,
    build_port_map,
    check_generation,
    classify_stability,
    preset_model,
    verify_energy_balance,
)
from phstab.core import apply_A0, boundary_trace, h_inner_product, sample_domain_function
from phstab.errors import NotDissipative


def test_transport_pair_verdicts():
    defn = preset_model("transport").defn
    good = BoundaryCondition(form="port", matrix=[[1.0, 1.0]])
    bad = BoundaryCondition(form="port", matrix=[[1.0, -1.0]])
    assert check_generation(defn, good).is_contraction
    assert not check_generation(defn, bad).is_contraction


def test_verdict_invariant_under_row_scaling():
    defn = preset_model("transport").defn
    rng = np.random.default_rng(1)
    for _ in range(10):
        g = rng.standard_normal() + 1j * rng.standard_normal()
        while abs(g) < 0.1:
            g = rng.standard_normal() + 1j * rng.standard_normal()
        bc = BoundaryCondition(form="port", matrix=[[g, g]])
        assert check_generation(defn, bc).is_contraction


@pytest.mark.parametrize("name", ["transport", "wave", "schrodinger", "eb-clamped-left"])
def test_energy_balance_residual(name):
    m = preset_model(name)
    assert verify_energy_balance(m.defn, m.bc, n_samples=10) < 1e-8


def test_kappa_soundness_on_samples():
    """Re<A0 x, x>_H <= -kappa |selected traces|^2 holds on domain samples."""
    m = preset_model("schrodinger", k=1.0, alpha=2.0)
    sel = TraceSelector(((0, 0), (0, 1)))
    kappa = boundary_dissipation_coefficient(m.defn, m.bc, sel)
    T = sel.selector_matrix(m.defn.N, m.defn.d)
    for seed in range(20):
        x = sample_domain_function(m.defn, m.bc, seed)
        lhs = h_inner_product(apply_A0(x, m.defn), x, m.defn).real
        traces = T @ boundary_trace(x, m.defn)
        assert lhs <= -kappa * float(np.vdot(traces, traces).real) + 1e-9


def test_kappa_optimality_minimizer_attains():
    m = preset_model("schrodinger", k=1.0, alpha=2.0)
    sel = TraceSelector(((0, 0), (0, 1)))
    kappa, z = boundary_dissipation_coefficient(
        m.defn, m.bc, sel, return_minimizer=True
    )
    pm = build_port_map(m.defn)
    from phstab.core import sigma_matrix

    power = 0.5 * float(np.real(z.conj() @ sigma_matrix(pm.nd) @ z))
    T = sel.selector_matrix(m.defn.N, m.defn.d) @ pm.R_inv
    tz = T @ z
    denom = float(np.vdot(tz, tz).real)
    assert denom > 0
    assert -power / denom == pytest.approx(kappa, abs=1e-9)


def test_kappa_raises_on_energy_increasing_boundary():
    defn = preset_model("transport").defn
    bad = BoundaryCondition(form="port", matrix=[[1.0, -1.0]])
    with pytest.raises(NotDissipative):
        boundary_dissipation_coefficient(defn, bad, TraceSelector(((0, 0),)))


def test_wave_classified_exponential():
    m = preset_model("wave", k=1.0)
    st = classify_stability(m.defn, m.bc)
    assert st.exponential
    assert st.certifying_rule == "first-order"


def test_conservative_beam_inconclusive():
    m = preset_model("eb-clamped-left", alpha1=0.0, alpha2=0.0)
    st = classify_stability(m.defn, m.bc)
    assert not st.asymptotic


def test_damped_beam_exponential():
    m = preset_model("eb-clamped-left", alpha1=1.0, alpha2=1.0)
    st = classify_stability(m.defn, m.bc)
    assert st.exponential


def test_half_damped_beam_structured_rule_needs_evidence():
    m = preset_model("eb-clamped-left", alpha1=1.0, alpha2=0.0)
    st = classify_stability(m.defn, m.bc)
    assert st.requires_external_asymptotic_evidence or st.exponential
    st2 = classify_stability(m.defn, m.bc, external_asymptotic_evidence=True)
    assert st2.exponential
    assert st2.certifying_rule == "structured-antidiagonal"
