"""Eigenvalue location and resolvent-norm scans for discretized generators.

These are finite-dimensional surrogates for the operator-theoretic stability
tests: emptiness of the point spectrum on the imaginary axis, and uniform
boundedness of the resolvent along it.  All outputs are discretized evidence
about the matrix A_h, never claims about the underlying PDE operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eig, svdvals

from .discretize import DiscreteOperator
from .errors import EigenSolverFailure, OnSpectrum


@dataclass(frozen=True)
class SpectrumReport:
    """Dense spectrum of A_h with axis diagnostics.

    spectral_abscissa is the maximum real part over all listed eigenvalues;
    imaginary_axis_candidates collects those with |Re| <= tol_axis.
    """

    eigenvalues: np.ndarray
    spectral_abscissa: float
    imaginary_axis_candidates: np.ndarray
    grid_n: int
    tol_axis: float


@dataclass(frozen=True)
class ResolventSweep:
    """Sampled M_h-weighted resolvent norms along the imaginary axis.

    trust_limit is the frequency beyond which the grid cannot resolve the
    corresponding modes; sup_estimate ranges only over trusted samples.
    Samples landing on the discrete spectrum are recorded as +inf and
    excluded from the sup.
    """

    omegas: np.ndarray
    norms: np.ndarray
    sup_estimate: float
    trust_limit: float
    growth_flag: bool


def _sorted_eigs(vals: np.ndarray) -> np.ndarray:
    order = np.lexsort((vals.imag, vals.real))
    return vals[order]


def compute_spectrum(op: DiscreteOperator, tol_axis: float = 1e-8) -> SpectrumReport:
    """Dense eigenvalue solve of A_h in reduced coordinates."""
    try:
        vals = eig(op.A_h, right=False)
    except LinAlgError as exc:  # pragma: no cover - LAPACK non-convergence
        raise EigenSolverFailure(str(exc)) from exc
    if not np.all(np.isfinite(vals)):
        raise EigenSolverFailure("eigenvalue solve returned non-finite values")
    vals = _sorted_eigs(vals)
    axis = vals[np.abs(vals.real) <= tol_axis]
    return SpectrumReport(
        eigenvalues=vals,
        spectral_abscissa=float(vals.real.max()) if vals.size else -np.inf,
        imaginary_axis_candidates=axis,
        grid_n=op.grid.n,
        tol_axis=float(tol_axis),
    )


def imaginary_axis_eigens(op: DiscreteOperator, tol_axis: float = 1e-6) -> np.ndarray:
    """Eigenvalues of A_h with |Re| <= tol_axis (discrete axis-spectrum test)."""
    return compute_spectrum(op, tol_axis=tol_axis).imaginary_axis_candidates


def resolvent_norm(op: DiscreteOperator, omega: float) -> float:
    """M_h-weighted norm of (i omega I - A_h)^{-1}.

    Equals 1 / sigma_min(M^{1/2} (i omega I - A_h) M^{-1/2}); raises
    OnSpectrum when i omega sits on the discrete spectrum to within 1e-12.
    """
    vals = eig(op.A_h, right=False)
    if np.min(np.abs(1j * omega - vals)) <= 1e-12:
        raise OnSpectrum(f"i*{omega} is an eigenvalue of A_h within 1e-12")
    R, Rinv = op.sqrt_mh()
    B = R @ (1j * omega * np.eye(op.size) - op.A_h) @ Rinv
    smin = svdvals(B)[-1]
    if smin <= 0.0:
        raise OnSpectrum(f"i*{omega} is numerically on the spectrum of A_h")
    return float(1.0 / smin)


def trust_limit_for(op: DiscreteOperator) -> float:
    """Heuristic largest frequency the degree-n grid can represent."""
    return (op.grid.n / 4.0) ** 2


def gearhart_scan(
    op: DiscreteOperator,
    omega_max: float,
    n_samples: int = 100,
    growth_factor: float = 3.0,
) -> ResolventSweep:
    """Log-spaced resolvent-norm sweep over [0.1, omega_max] plus reflections.

    The growth flag is set when the sup over the top frequency decade exceeds
    growth_factor times the sup over the bottom decade, a pragmatic signal
    that the resolvent is not uniformly bounded along the axis.
    """
    pos = np.logspace(np.log10(0.1), np.log10(omega_max), n_samples)
    omegas = np.concatenate([-pos[::-1], pos])
    vals = eig(op.A_h, right=False)
    R, Rinv = op.sqrt_mh()
    I = np.eye(op.size)
    norms = np.empty(omegas.size)
    for i, w in enumerate(omegas):
        if np.min(np.abs(1j * w - vals)) <= 1e-12:
            norms[i] = np.inf
            continue
        smin = svdvals(R @ (1j * w * I - op.A_h) @ Rinv)[-1]
        norms[i] = 1.0 / smin if smin > 0 else np.inf
    limit = trust_limit_for(op)
    trusted = (np.abs(omegas) <= limit) & np.isfinite(norms)
    sup = float(norms[trusted].max()) if trusted.any() else np.inf
    a = np.abs(omegas)
    top = trusted & (a >= omega_max / 10.0)
    bottom = trusted & (a <= 1.0)
    flag = False
    if top.any() and bottom.any():
        flag = bool(norms[top].max() > growth_factor * norms[bottom].max())
    return ResolventSweep(
        omegas=omegas,
        norms=norms,
        sup_estimate=sup,
        trust_limit=limit,
        growth_flag=flag,
    )
