"""Discrete spectra and resolvent sweeps."""

import numpy as np
import pytest

from phstab import (
    assemble_discrete_generator,
    chebyshev_operator,
    compute_spectrum,
    gearhart_scan,
    imaginary_axis_eigens,
    preset_model,
    resolvent_norm,
    trust_limit_for,
)
from phstab.errors import OnSpectrum


def _op(name, n, **params):
    m = preset_model(name, **params)
    return assemble_discrete_generator(m.defn, m.bc, chebyshev_operator(n))


def test_spectrum_sorted_and_finite():
    op = _op("eb-clamped-left", 32, alpha1=1.0, alpha2=1.0)
    rep = compute_spectrum(op)
    assert np.all(np.isfinite(rep.eigenvalues))
    assert np.all(np.diff(rep.eigenvalues.real) >= 0)
    assert rep.spectral_abscissa == pytest.approx(rep.eigenvalues.real.max())


def test_conservative_spectrum_on_axis():
    op = _op("eb-clamped-left", 32, alpha1=0.0, alpha2=0.0)
    rep = compute_spectrum(op, tol_axis=1e-6)
    scale = 1.0 + np.abs(rep.eigenvalues)
    assert np.all(np.abs(rep.eigenvalues.real) <= 1e-6 * scale)


def test_damped_axis_empty():
    vals = imaginary_axis_eigens(_op("eb-clamped-left", 48, alpha1=1.0, alpha2=1.0))
    assert vals.size == 0


def test_resolvent_norm_lower_bound():
    op = _op("eb-clamped-left", 32, alpha1=1.0, alpha2=1.0)
    vals = compute_spectrum(op).eigenvalues
    for w in (1.0, 5.0, 20.0):
        nm = resolvent_norm(op, w)
        assert nm >= 1.0 / np.min(np.abs(1j * w - vals)) - 1e-9


def test_resolvent_on_spectrum_raises():
    op = _op("eb-clamped-left", 24, alpha1=0.0, alpha2=0.0)
    vals = compute_spectrum(op).eigenvalues
    axis = vals[np.abs(vals.real) < 1e-12]
    assert axis.size > 0
    with pytest.raises(OnSpectrum):
        resolvent_norm(op, float(axis[0].imag))


def test_gearhart_scan_shapes_and_trust():
    op = _op("eb-clamped-left", 32, alpha1=1.0, alpha2=1.0)
    sweep = gearhart_scan(op, omega_max=100.0, n_samples=50)
    assert sweep.omegas.size == 100
    assert sweep.trust_limit == trust_limit_for(op) == (32 / 4.0) ** 2
    finite = np.isfinite(sweep.norms) & (np.abs(sweep.omegas) <= sweep.trust_limit)
    assert sweep.sup_estimate == pytest.approx(float(sweep.norms[finite].max()))


def test_gearhart_no_growth_for_exponentially_stable():
    op = _op("wave", 24, k=1.0)
    sweep = gearhart_scan(op, omega_max=30.0, n_samples=60)
    assert not sweep.growth_flag
