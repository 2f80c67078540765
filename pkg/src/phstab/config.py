"""Model configuration files: parsing, validation, canonical serialization.

A model file is a JSON document describing the PDE (order N, state size d,
matrices P_0..P_N, polynomial Hamiltonian density H), its boundary condition,
and optionally an input/output split plus a controller, or a named preset
that expands into all of the above.  Serialization is canonical: fixed key
order and 17-significant-digit floats, so parse -> serialize -> parse is the
identity and reports are byte-reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import BoundaryCondition, HamiltonianDensity, PHSDefinition
from .errors import DimensionError, ParseError, SchemaError
from .hybrid import Controller, IOSplit
from .models import PresetModel, preset_model


# ---------------------------------------------------------------------------
# Canonical JSON emission (17 significant digits, fixed key order)


def _fmt_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        return f'"{x}"'
    s = format(float(x), ".17g")
    # keep a uniform numeric token (json requires a digit before any 'e')
    return s


def canonical_json(obj, indent: int = 0) -> str:
    """Serialize nested dict/list/scalar data with deterministic formatting.

    Dicts are emitted in insertion order; floats with 17 significant digits
    (lossless for doubles); ints and strings natively.
    """
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{inner}"{k}": {canonical_json(v, indent + 1)}' for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{canonical_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise SchemaError(f"cannot serialize value of type {type(obj).__name__}")


def _c2d(z: complex) -> dict:
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


def _matrix_to_json(M) -> list:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return [[_c2d(z) for z in row] for row in M]


def _real_matrix_to_json(M) -> list:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    return [[float(v) for v in row] for row in M]


def _matrix_from_json(rows, key: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise SchemaError(f"key {key!r} must be a non-empty list of rows")
    out = []
    width = None
    for row in rows:
        if not isinstance(row, list) or not row:
            raise SchemaError(f"key {key!r} rows must be non-empty lists")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DimensionError(f"key {key!r} has ragged rows")
        vals = []
        for ent in row:
            if isinstance(ent, dict):
                if set(ent) != {"re", "im"}:
                    raise SchemaError(
                        f"key {key!r} entries must be objects with 're' and 'im'"
                    )
                vals.append(complex(float(ent["re"]), float(ent["im"])))
            elif isinstance(ent, (int, float)):
                vals.append(complex(float(ent), 0.0))
            else:
                raise SchemaError(f"key {key!r} entries must be numbers or re/im objects")
        out.append(vals)
    return np.asarray(out, dtype=complex)


# ---------------------------------------------------------------------------
# ModelConfig


@dataclass(frozen=True)
class ModelConfig:
    """Validated model description plus the optional preset that produced it."""

    N: int
    d: int
    P: tuple
    H: np.ndarray  # (d, d, p+1) real coefficients
    boundary_form: str
    boundary_matrix: np.ndarray
    io_split: dict | None = None
    controller: dict | None = None
    preset: dict | None = None

    def definition(self) -> PHSDefinition:
        return PHSDefinition(N=self.N, d=self.d, P=self.P, H=HamiltonianDensity(self.H))

    def boundary_condition(self) -> BoundaryCondition:
        return BoundaryCondition(form=self.boundary_form, matrix=self.boundary_matrix)

    def io(self) -> IOSplit | None:
        if self.io_split is None:
            return None
        s = self.io_split
        return IOSplit(W1=s["W1"], W2=s["W2"], Wt1=s["Wt1"], Wt2=s["Wt2"])

    def build_controller(self) -> Controller | None:
        if self.controller is None:
            return None
        c = self.controller
        return Controller.sip(
            Jc=c["Jc"], Rc=c["Rc"], Qc=c["Qc"], Bc=c["Bc"], Dc=c["Dc"],
            sigma=float(c["sigma"]),
        )

    @property
    def is_hybrid(self) -> bool:
        return self.io_split is not None and self.controller is not None


def _require(doc: dict, key: str, typ, ctx: str = "model"):
    if key not in doc:
        raise SchemaError(f"{ctx}: missing required key {key!r}")
    v = doc[key]
    if typ is int:
        if not isinstance(v, int) or isinstance(v, bool):
            raise SchemaError(f"{ctx}: key {key!r} must be an integer")
    elif typ is dict and not isinstance(v, dict):
        raise SchemaError(f"{ctx}: key {key!r} must be an object")
    elif typ is list and not isinstance(v, list):
        raise SchemaError(f"{ctx}: key {key!r} must be a list")
    elif typ is str and not isinstance(v, str):
        raise SchemaError(f"{ctx}: key {key!r} must be a string")
    return v


def _h_from_json(entries, d: int) -> np.ndarray:
    if not isinstance(entries, list) or len(entries) != d:
        raise DimensionError(f"key 'H' must be a {d}x{d} grid of coefficient lists")
    pmax = 0
    for row in entries:
        if not isinstance(row, list) or len(row) != d:
            raise DimensionError(f"key 'H' must be a {d}x{d} grid of coefficient lists")
        for ent in row:
            if not isinstance(ent, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in ent
            ):
                raise SchemaError("key 'H' entries must be lists of real numbers")
            pmax = max(pmax, len(ent))
    H = np.zeros((d, d, max(pmax, 1)))
    for i, row in enumerate(entries):
        for j, ent in enumerate(row):
            H[i, j, : len(ent)] = ent
    return H


def _config_from_preset(name, params) -> ModelConfig:
    model = preset_model(name, **params)
    return model_to_config(model, preset={"name": name, "params": dict(params)})


def model_to_config(model: PresetModel, preset: dict | None = None) -> ModelConfig:
    """Expand an assembled model into a fully explicit configuration."""
    defn, bc = model.defn, model.bc
    io_split = None
    controller = None
    if model.io is not None:
        io_split = {
            "m": model.io.m,
            "W1": np.asarray(model.io.W1, dtype=complex),
            "W2": np.asarray(model.io.W2, dtype=complex),
            "Wt1": np.asarray(model.io.Wt1, dtype=complex),
            "Wt2": np.asarray(model.io.Wt2, dtype=complex),
        }
    if model.controller is not None:
        c = model.controller
        controller = {
            "Jc": np.asarray(c.Jc, dtype=complex),
            "Rc": np.asarray(c.Rc, dtype=complex),
            "Qc": np.asarray(c.Qc, dtype=complex),
            "Bc": np.asarray(c.Bc, dtype=complex),
            "Dc": np.asarray(c.Dc, dtype=complex),
            "sigma": float(c.sigma),
        }
    return ModelConfig(
        N=defn.N,
        d=defn.d,
        P=defn.P,
        H=defn.H.coeffs,
        boundary_form=bc.form,
        boundary_matrix=bc.matrix,
        io_split=io_split,
        controller=controller,
        preset=preset,
    )


def parse_model_dict(doc: dict) -> ModelConfig:
    """Validate a decoded JSON document into a ModelConfig."""
    if not isinstance(doc, dict):
        raise SchemaError("model document must be a JSON object")
    if "preset" in doc:
        p = _require(doc, "preset", dict)
        name = _require(p, "name", str, "preset")
        params = p.get("params", {})
        if not isinstance(params, dict):
            raise SchemaError("preset: key 'params' must be an object")
        return _config_from_preset(name, params)
    N = _require(doc, "N", int)
    d = _require(doc, "d", int)
    if N < 1 or d < 1:
        raise DimensionError("'N' and 'd' must be positive")
    plist = _require(doc, "P", list)
    if len(plist) != N + 1:
        raise SchemaError(f"key 'P' must list exactly N+1 = {N + 1} matrices")
    P = []
    for k, rows in enumerate(plist):
        M = _matrix_from_json(rows, f"P[{k}]")
        if M.shape != (d, d):
            raise DimensionError(f"P[{k}] must be {d}x{d}, got {M.shape}")
        P.append(M)
    H = _h_from_json(_require(doc, "H", list), d)
    b = _require(doc, "boundary", dict)
    form = _require(b, "form", str, "boundary")
    if form not in ("trace", "port"):
        raise SchemaError("boundary: 'form' must be 'trace' or 'port'")
    matrix = _matrix_from_json(_require(b, "matrix", list, "boundary"), "boundary.matrix")
    if matrix.shape[1] != 2 * N * d:
        raise DimensionError(
            f"boundary matrix needs 2Nd = {2 * N * d} columns, got {matrix.shape[1]}"
        )
    io_split = None
    if "io_split" in doc:
        s = _require(doc, "io_split", dict)
        m = _require(s, "m", int, "io_split")
        io_split = {"m": m}
        for key in ("W1", "W2", "Wt1", "Wt2"):
            M = _matrix_from_json(_require(s, key, list, "io_split"), f"io_split.{key}")
            if M.shape[1] != 2 * N * d:
                raise DimensionError(
                    f"io_split.{key} needs 2Nd = {2 * N * d} columns"
                )
            io_split[key] = M
        if io_split["W1"].shape[0] != m:
            raise DimensionError("io_split: W1 row count must equal m")
    controller = None
    if "controller" in doc:
        c = _require(doc, "controller", dict)
        controller = {}
        for key in ("Jc", "Rc", "Qc", "Bc", "Dc"):
            controller[key] = _matrix_from_json(
                _require(c, key, list, "controller"), f"controller.{key}"
            )
        sigma = c.get("sigma")
        if not isinstance(sigma, (int, float)) or isinstance(sigma, bool):
            raise SchemaError("controller: key 'sigma' must be a number")
        controller["sigma"] = float(sigma)
    return ModelConfig(
        N=N,
        d=d,
        P=tuple(P),
        H=H,
        boundary_form=form,
        boundary_matrix=matrix,
        io_split=io_split,
        controller=controller,
        preset=None,
    )


def parse_model_config(path: str) -> ModelConfig:
    """Load and validate a model configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read model file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {path!r}: {exc}") from exc
    return parse_model_dict(doc)


def config_to_dict(cfg: ModelConfig) -> dict:
    """Canonical plain-data form of a configuration (fixed key order)."""
    doc = {
        "N": cfg.N,
        "d": cfg.d,
        "P": [_matrix_to_json(M) for M in cfg.P],
        "H": [
            [[float(v) for v in cfg.H[i, j]] for j in range(cfg.d)]
            for i in range(cfg.d)
        ],
        "boundary": {
            "form": cfg.boundary_form,
            "matrix": _matrix_to_json(cfg.boundary_matrix),
        },
    }
    if cfg.io_split is not None:
        doc["io_split"] = {
            "m": int(cfg.io_split["m"]),
            "W1": _matrix_to_json(cfg.io_split["W1"]),
            "W2": _matrix_to_json(cfg.io_split["W2"]),
            "Wt1": _matrix_to_json(cfg.io_split["Wt1"]),
            "Wt2": _matrix_to_json(cfg.io_split["Wt2"]),
        }
    if cfg.controller is not None:
        doc["controller"] = {
            "Jc": _matrix_to_json(cfg.controller["Jc"]),
            "Rc": _matrix_to_json(cfg.controller["Rc"]),
            "Qc": _matrix_to_json(cfg.controller["Qc"]),
            "Bc": _matrix_to_json(cfg.controller["Bc"]),
            "Dc": _matrix_to_json(cfg.controller["Dc"]),
            "sigma": float(cfg.controller["sigma"]),
        }
    if cfg.preset is not None:
        doc["preset"] = {
            "name": cfg.preset["name"],
            "params": {k: cfg.preset["params"][k] for k in sorted(cfg.preset["params"])},
        }
    return doc


def serialize_model_config(cfg: ModelConfig) -> str:
    return canonical_json(config_to_dict(cfg)) + "\n"
