"""Command-line front end.

Subcommands cover the full analysis chain: ``certify`` (hypothesis checks and
the contraction-semigroup certificate), ``kappa`` (boundary dissipation
coefficient for a trace selection), ``spectrum`` / ``resolvent`` (discretized
axis diagnostics), ``simulate`` (implicit-midpoint energy traces and decay
fit), ``hybrid`` (closed-loop certification for controller-coupled models),
and ``oracle`` (closed-form resolvent evaluations).

Reports are JSON with fixed key order and 17-significant-digit floats, so a
given invocation is byte-reproducible.  Exit codes: 0 the analysis ran,
2 the model file is invalid, 3 the model is not dissipative / certification
failed.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .config import ModelConfig, canonical_json, parse_model_config
from .discretize import (
    assemble_discrete_generator,
    chebyshev_operator,
    discrete_dissipativity,
)
from .errors import (
    BadParameter,
    NearSingularDenominator,
    NotDissipative,
    NotPassive,
    ParseError,
    RankDeficientW,
    SchemaError,
    UnknownPreset,
)
from .hybrid import (
    assemble_hybrid_generator,
    build_closed_loop,
    closed_loop_dissipativity,
    sip_check,
    sip_stability_classify,
    verify_hybrid_passivity,
)
from .models import schrodinger_resolvent_oracle
from .spectral import compute_spectrum, gearhart_scan, trust_limit_for
from .timesim import (
    default_initial_state,
    energy_trace,
    fit_decay_rate,
    integrate_midpoint,
)
from .wellposed import (
    KAPPA_POSITIVE,
    PSD_TOL,
    TraceSelector,
    boundary_dissipation_coefficient,
    check_generation,
    classify_stability,
    verify_energy_balance,
)
from .core import HERMITIAN_TOL, validate_phs

_INVALID_MODEL = (ParseError, SchemaError, UnknownPreset, BadParameter)
_NOT_CERTIFIED = (NotDissipative, NotPassive, RankDeficientW)


def _g(x: float) -> str:
    if x != x:
        return "nan"
    if x == float("inf"):
        return "inf"
    if x == float("-inf"):
        return "-inf"
    return format(float(x), ".17g")


def parse_traces(text: str) -> TraceSelector:
    """Parse "0:0,0:1,1:0" (endpoint:order[:component], comma-separated)."""
    entries = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) not in (2, 3):
            raise BadParameter(
                f"trace entry {chunk!r} must be endpoint:order or endpoint:order:component"
            )
        try:
            entries.append(tuple(int(p) for p in parts))
        except ValueError as exc:
            raise BadParameter(f"trace entry {chunk!r} has non-integer fields") from exc
    if not entries:
        raise BadParameter("--traces selected no boundary traces")
    return TraceSelector(tuple(entries))


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _csv(header: str, rows) -> str:
    return header + "\n" + "\n".join(",".join(r) for r in rows) + "\n"


def _emit(args, report: dict, csv_text: str | None = None) -> None:
    """Print the report (or, under --format csv, the data table)."""
    if args.format == "csv" and csv_text is not None:
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(canonical_json(report) + "\n")


def _outpath(args, name: str) -> str:
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        return os.path.join(args.out, name)
    return name


def _validation_section(defn) -> dict:
    rep = validate_phs(defn)
    return {
        "passed": rep.passed,
        "tol": HERMITIAN_TOL,
        "checks": [
            {"name": c.name, "passed": c.passed, "value": float(c.value)}
            for c in rep.checks
        ],
    }


def _certificate_section(cert, tol_psd: float) -> dict:
    return {
        "verdict": cert.verdict,
        "rank_ok": cert.rank_ok,
        "wsigma_psd": cert.wsigma_psd,
        "wsigma_min_eig": cert.wsigma_min_eig,
        "rep0_nsd": cert.rep0_nsd,
        "rep0_max_eig": cert.rep0_max_eig,
        "tol_psd": tol_psd,
    }


# ---------------------------------------------------------------------------
# Subcommands


def cmd_certify(args) -> int:
    cfg = parse_model_config(args.model)
    defn, bc = cfg.definition(), cfg.boundary_condition()
    cert = check_generation(defn, bc, tol_psd=args.tol_psd)
    balance = verify_energy_balance(defn, bc, seed=args.seed)
    report = {
        "command": "certify",
        "validation": _validation_section(defn),
        "generation_certificate": _certificate_section(cert, args.tol_psd),
        "energy_balance_residual": {"value": balance, "tol": 1e-8},
        "warnings": [],
    }
    _emit(args, report)
    return 0 if cert.is_contraction else 3


def cmd_kappa(args) -> int:
    cfg = parse_model_config(args.model)
    defn, bc = cfg.definition(), cfg.boundary_condition()
    kappa_table = {}
    if args.traces:
        sel = parse_traces(args.traces)
        kappa_table[str(sel)] = boundary_dissipation_coefficient(defn, bc, sel)
    stab = classify_stability(defn, bc)
    kappa_table.update(stab.kappa)
    report = {
        "command": "kappa",
        "kappa_table": [
            {"traces": key, "kappa": float(val), "tol_positive": KAPPA_POSITIVE}
            for key, val in kappa_table.items()
        ],
        "classification": {
            "result": stab.classification,
            "certifying_rule": stab.certifying_rule,
            "requires_external_asymptotic_evidence": (
                stab.requires_external_asymptotic_evidence
            ),
        },
        "warnings": [],
    }
    _emit(args, report)
    return 0


def _discretize(cfg: ModelConfig, n: int):
    return assemble_discrete_generator(
        cfg.definition(), cfg.boundary_condition(), chebyshev_operator(n)
    )


_SURROGATE_NOTE = (
    "discretized evidence about the collocation matrix, not a certificate "
    "for the infinite-dimensional operator"
)


def cmd_spectrum(args) -> int:
    cfg = parse_model_config(args.model)
    op = _discretize(cfg, args.grid_n)
    rep = compute_spectrum(op, tol_axis=args.tol_axis)
    rows = [(_g(z.real), _g(z.imag)) for z in rep.eigenvalues]
    csv_text = _csv("re,im", rows)
    path = _outpath(args, "eigenvalues.csv")
    _write(path, csv_text)
    report = {
        "command": "spectrum",
        "spectrum": {
            "grid_n": rep.grid_n,
            "spectral_abscissa": rep.spectral_abscissa,
            "n_eigenvalues": int(rep.eigenvalues.size),
            "imaginary_axis_candidates": int(rep.imaginary_axis_candidates.size),
            "tol_axis": rep.tol_axis,
            "dissipativity_residual": {
                "value": discrete_dissipativity(op),
                "tol": 1e-8,
            },
            "csv": path,
        },
        "warnings": [_SURROGATE_NOTE],
    }
    _emit(args, report, csv_text)
    return 0


def cmd_resolvent(args) -> int:
    cfg = parse_model_config(args.model)
    op = _discretize(cfg, args.grid_n)
    sweep = gearhart_scan(op, omega_max=args.omega_max, n_samples=args.samples)
    limit = trust_limit_for(op)
    rows = [
        (_g(w), _g(nm), "1" if (abs(w) <= limit and np.isfinite(nm)) else "0")
        for w, nm in zip(sweep.omegas, sweep.norms)
    ]
    csv_text = _csv("omega,norm,trusted", rows)
    path = _outpath(args, "resolvent.csv")
    _write(path, csv_text)
    report = {
        "command": "resolvent",
        "resolvent": {
            "grid_n": args.grid_n,
            "omega_max": float(args.omega_max),
            "samples": int(args.samples),
            "sup_estimate": sweep.sup_estimate,
            "trust_limit": sweep.trust_limit,
            "growth_flag": sweep.growth_flag,
            "csv": path,
        },
        "warnings": [_SURROGATE_NOTE],
    }
    _emit(args, report, csv_text)
    return 0


def cmd_simulate(args) -> int:
    cfg = parse_model_config(args.model)
    op = _discretize(cfg, args.grid_n)
    x0 = default_initial_state(op, seed=args.seed)
    traj = integrate_midpoint(op, x0, args.dt, args.t_final)
    trace = energy_trace(traj, op.M_h, args.dt, model_id=os.path.basename(args.model))
    rows = [(_g(t), _g(E)) for t, E in zip(trace.times, trace.energies)]
    csv_text = _csv("t,E", rows)
    path = _outpath(args, "energy.csv")
    _write(path, csv_text)
    report = {
        "command": "simulate",
        "decay": {
            "grid_n": args.grid_n,
            "dt": float(args.dt),
            "t_final": float(args.t_final),
            "seed": int(args.seed),
            "initial_energy": float(trace.energies[0]),
            "final_energy": float(trace.energies[-1]),
            "max_energy_increase": float(
                np.max(np.diff(trace.energies), initial=0.0)
            ),
            "csv": path,
        },
        "warnings": [],
    }
    try:
        fit = fit_decay_rate(trace)
        report["decay"]["fit"] = {
            "omega_hat": fit.omega_hat,
            "window": [fit.window[0], fit.window[1]],
            "residual": fit.residual,
            "n_points": fit.n_points,
        }
    except Exception as exc:  # conservative models have no decay to fit
        report["warnings"].append(f"decay fit unavailable: {exc}")
    _emit(args, report, csv_text)
    return 0


def cmd_hybrid(args) -> int:
    cfg = parse_model_config(args.model)
    if not cfg.is_hybrid:
        raise SchemaError(
            "hybrid analysis needs both 'io_split' and 'controller' blocks"
        )
    defn = cfg.definition()
    cl = build_closed_loop(defn, cfg.io(), cfg.build_controller())
    sip_report = sip_check(cl.ctrl)
    diss = closed_loop_dissipativity(cl)
    passivity = verify_hybrid_passivity(cl, seed=args.seed)
    stab = sip_stability_classify(cl, seed=args.seed)
    op = assemble_hybrid_generator(cl, chebyshev_operator(args.grid_n))
    srep = compute_spectrum(op, tol_axis=1e-6)
    report = {
        "command": "hybrid",
        "validation": {
            "sip_structure_passed": sip_report.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "value": float(c.value)}
                for c in sip_report.checks
            ],
            "passivity_residual": {"value": float(passivity), "tol": 1e-8},
        },
        "generation_certificate": {
            "dissipative": diss.dissipative,
            "margin": float(diss.margin),
            "sip_margin": None if diss.sip_margin is None else float(diss.sip_margin),
            "kernel_dim": int(diss.kernel_dim),
            "tol_psd": args.tol_psd,
        },
        "kappa_table": [
            {"traces": key, "kappa": float(val), "tol_positive": KAPPA_POSITIVE}
            for key, val in stab.kappa.items()
        ],
        "classification": {
            "result": stab.classification,
            "certifying_rule": stab.certifying_rule,
            "requires_external_asymptotic_evidence": (
                stab.requires_external_asymptotic_evidence
            ),
        },
        "spectrum": {
            "grid_n": args.grid_n,
            "spectral_abscissa": srep.spectral_abscissa,
            "imaginary_axis_candidates": int(srep.imaginary_axis_candidates.size),
            "tol_axis": srep.tol_axis,
            "dissipativity_residual": {
                "value": discrete_dissipativity(op),
                "tol": 1e-8,
            },
        },
        "warnings": [_SURROGATE_NOTE],
    }
    _emit(args, report)
    return 0 if diss.dissipative else 3


def cmd_oracle(args) -> int:
    if args.name != "schrodinger":
        raise BadParameter(f"no oracle named {args.name!r}; available: schrodinger")
    if not 0.0 <= args.zeta <= 1.0:
        raise BadParameter("--zeta must lie in [0, 1]")
    val = complex(
        schrodinger_resolvent_oracle(args.beta, args.k, args.alpha, [args.zeta])[0]
    )
    s = np.sqrt(args.beta)
    scaled = args.beta ** 1.5 * np.exp(-s * args.zeta) * val
    report = {
        "command": "oracle",
        "oracle": {
            "name": "schrodinger",
            "k": float(args.k),
            "alpha": float(args.alpha),
            "beta": float(args.beta),
            "zeta": float(args.zeta),
            "value": {"re": val.real, "im": val.imag},
            "scaled_value": {"re": float(scaled.real), "im": float(scaled.imag)},
        },
        "warnings": [],
    }
    _emit(args, report)
    return 0


# ---------------------------------------------------------------------------
# Parser


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default="", help="directory for data files")
    common.add_argument("--tol-psd", type=float, default=PSD_TOL)
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(
        prog="phstab",
        description="Well-posedness and stability analysis of boundary-controlled "
        "port-Hamiltonian systems",
    )
    sub = p.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("certify", parents=[common])
    sp.add_argument("model")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("kappa", parents=[common])
    sp.add_argument("model")
    sp.add_argument("--traces", default="", help='e.g. "0:0,0:1,1:0"')
    sp.set_defaults(func=cmd_kappa)

    sp = sub.add_parser("spectrum", parents=[common])
    sp.add_argument("model")
    sp.add_argument("--grid-n", type=int, default=64)
    sp.add_argument("--tol-axis", type=float, default=1e-6)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("resolvent", parents=[common])
    sp.add_argument("model")
    sp.add_argument("--grid-n", type=int, default=64)
    sp.add_argument("--omega-max", type=float, default=100.0)
    sp.add_argument("--samples", type=int, default=200)
    sp.set_defaults(func=cmd_resolvent)

    sp = sub.add_parser("simulate", parents=[common])
    sp.add_argument("model")
    sp.add_argument("--grid-n", type=int, default=64)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--t-final", type=float, default=20.0)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("hybrid", parents=[common])
    sp.add_argument("model")
    sp.add_argument("--grid-n", type=int, default=48)
    sp.set_defaults(func=cmd_hybrid)

    sp = sub.add_parser("oracle", parents=[common])
    sp.add_argument("name")
    sp.add_argument("--k", type=float, default=1.0)
    sp.add_argument("--alpha", type=float, default=2.0)
    sp.add_argument("--beta", type=float, default=1e6)
    sp.add_argument("--zeta", type=float, default=0.5)
    sp.set_defaults(func=cmd_oracle)

    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _INVALID_MODEL as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (_NOT_CERTIFIED + (NearSingularDenominator,)) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
