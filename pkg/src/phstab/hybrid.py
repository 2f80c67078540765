"""Hybrid PDE-controller interconnection and closed-loop certificates.

The boundary data of the PDE is split into an input u = (u1; u2) and an
output y = (y_1; y_2) by four full-rank matrices acting on the port vector
z = (f; e).  A finite-dimensional controller closes the loop through
u_c = y_1, u1 = -y_c, which condenses into a single boundary constraint
W_cl (z; xi) = 0 on the product state.  Dissipativity of the closed loop and
the strictly-input-passive (SIP) stability test reduce to Hermitian forms on
finite-dimensional constraint kernels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh, null_space

from .core import (
    PHSDefinition,
    StateFunction,
    ValidationCheck,
    ValidationReport,
    apply_A0,
    as_matrix,
    boundary_trace,
    build_port_map,
    h_inner_product,
    h_norm,
    sigma_matrix,
)
from .discretize import (
    CollocationGrid,
    DiscreteOperator,
    _weighted_collocation_longdouble,
    exact_gram_matrix,
    raw_collocation_operator,
    refined_null_space,
    trace_matrix_longdouble,
    trace_read_matrix,
)
from .errors import (
    ConstraintRankLoss,
    DimensionMismatch,
    EmptyInput,
    NotPassive,
)
from .wellposed import (
    PSD_TOL,
    KAPPA_POSITIVE,
    StabilityCertificate,
    TraceSelector,
    _pencil_min_ratio,
    _second_order_selectors,
    _structured_selectors,
    detect_antidiagonal_structure,
)


# ---------------------------------------------------------------------------
# Input/output split


@dataclass(frozen=True)
class IOSplit:
    """Port-space splitting into inputs (W1, W2) and outputs (Wt1, Wt2).

    All four blocks act on the port vector z = (f; e); u1 = W1 z is the
    controlled input, u2 = W2 z is held at zero, y_1 = Wt1 z is the output
    fed to the controller.
    """

    W1: np.ndarray
    W2: np.ndarray
    Wt1: np.ndarray
    Wt2: np.ndarray

    def __post_init__(self):
        for name in ("W1", "W2", "Wt1", "Wt2"):
            object.__setattr__(self, name, as_matrix(getattr(self, name)))
        cols = {getattr(self, n).shape[1] for n in ("W1", "W2", "Wt1", "Wt2")}
        if len(cols) != 1:
            raise DimensionMismatch("all split blocks need the same column count")

    @property
    def m(self) -> int:
        return self.W1.shape[0]

    @property
    def mt(self) -> int:
        return self.Wt1.shape[0]

    @property
    def W(self) -> np.ndarray:
        return np.vstack([self.W1, self.W2])

    @property
    def Wt(self) -> np.ndarray:
        return np.vstack([self.Wt1, self.Wt2])

    @property
    def stacked(self) -> np.ndarray:
        return np.vstack([self.W, self.Wt])


def validate_io_split(io: IOSplit) -> ValidationReport:
    """Rank/invertibility checks for the split; m = 0 is rejected outright."""
    if io.m == 0:
        raise EmptyInput("interconnection needs at least one input channel")
    checks = []
    for name, M in (("W", io.W), ("Wt", io.Wt)):
        sv = np.linalg.svd(M, compute_uv=False)
        scale = sv[0] if sv.size and sv[0] > 0 else 1.0
        rank = int(np.sum(sv > 1e-10 * scale))
        checks.append(ValidationCheck(f"{name}_full_rank", rank == M.shape[0], float(rank)))
    S = io.stacked
    if S.shape[0] != S.shape[1]:
        checks.append(ValidationCheck("stack_square", False, float(S.shape[0])))
        cond = np.inf
    else:
        sv = np.linalg.svd(S, compute_uv=False)
        cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
        checks.append(ValidationCheck("stack_invertible", np.isfinite(cond) and cond < 1e12, cond))
    return ValidationReport(tuple(checks))


# ---------------------------------------------------------------------------
# Controllers


@dataclass(frozen=True)
class Controller:
    """Finite-dimensional linear controller, optionally in SIP normal form.

    General form: xi' = Ac xi + Bc u_c, y_c = Cc xi + Dc u_c.  The SIP form
    fixes Ac = (Jc - Rc) Qc and Cc = Bc^* Qc and declares a feedthrough
    margin sigma with Dc >= sigma I.
    """

    Ac: np.ndarray
    Bc: np.ndarray
    Cc: np.ndarray
    Dc: np.ndarray
    Jc: np.ndarray | None = None
    Rc: np.ndarray | None = None
    Qc: np.ndarray | None = None
    sigma: float = 0.0

    def __post_init__(self):
        for name in ("Ac", "Bc", "Cc", "Dc"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=complex))
        for name in ("Jc", "Rc", "Qc"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, np.asarray(v, dtype=complex))

    @property
    def n_c(self) -> int:
        return self.Ac.shape[0]

    @property
    def m(self) -> int:
        return self.Dc.shape[0]

    @property
    def is_sip(self) -> bool:
        return self.Qc is not None

    @staticmethod
    def general(Ac, Bc, Cc, Dc) -> "Controller":
        return Controller(Ac=as_matrix(Ac), Bc=as_matrix(Bc), Cc=as_matrix(Cc), Dc=as_matrix(Dc))

    @staticmethod
    def sip(Jc, Rc, Qc, Bc, Dc, sigma: float) -> "Controller":
        Jc, Rc, Qc, Bc, Dc = (as_matrix(m) for m in (Jc, Rc, Qc, Bc, Dc))
        return Controller(
            Ac=(Jc - Rc) @ Qc,
            Bc=Bc,
            Cc=Bc.conj().T @ Qc,
            Dc=Dc,
            Jc=Jc,
            Rc=Rc,
            Qc=Qc,
            sigma=float(sigma),
        )

    @staticmethod
    def static(m: int) -> "Controller":
        """Zero-dimensional controller (static feedback through Dc = 0)."""
        z = np.zeros((0, 0))
        return Controller(
            Ac=z, Bc=np.zeros((0, m)), Cc=np.zeros((m, 0)), Dc=np.zeros((m, m))
        )


def sip_check(ctrl: Controller) -> ValidationReport:
    """Verify the SIP structure: Jc skew, Rc >= 0, Qc > 0, Dc >= sigma I, Ac Hurwitz."""
    checks = []
    if not ctrl.is_sip:
        checks.append(ValidationCheck("sip_form", False, 0.0))
        return ValidationReport(tuple(checks))
    r = float(np.max(np.abs(ctrl.Jc + ctrl.Jc.conj().T))) if ctrl.n_c else 0.0
    checks.append(ValidationCheck("Jc_skew", r <= 1e-12, r))
    for name, M, shift in (("Rc_psd", ctrl.Rc, 0.0), ("Dc_margin", ctrl.Dc, ctrl.sigma)):
        if M.size:
            vals = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
            ok = bool(vals[0] >= shift - 1e-12)
            checks.append(ValidationCheck(name, ok, float(vals[0] - shift)))
        else:
            checks.append(ValidationCheck(name, True, 0.0))
    if ctrl.n_c:
        qvals = np.linalg.eigvalsh(0.5 * (ctrl.Qc + ctrl.Qc.conj().T))
        checks.append(ValidationCheck("Qc_pd", bool(qvals[0] > 0.0), float(qvals[0])))
        avals = np.linalg.eigvals(ctrl.Ac)
        hur = float(np.max(avals.real))
        checks.append(ValidationCheck("Ac_hurwitz", hur < 0.0, hur))
    else:
        checks.append(ValidationCheck("Qc_pd", True, 0.0))
        checks.append(ValidationCheck("Ac_hurwitz", True, -np.inf))
    checks.append(ValidationCheck("sigma_positive", ctrl.sigma > 0.0, ctrl.sigma))
    return ValidationReport(tuple(checks))


# ---------------------------------------------------------------------------
# Closed loop


@dataclass(frozen=True)
class ClosedLoopSystem:
    defn: PHSDefinition
    io: IOSplit
    ctrl: Controller
    W_cl: np.ndarray


def build_closed_loop(defn: PHSDefinition, io: IOSplit, ctrl: Controller) -> ClosedLoopSystem:
    """Assemble W_cl = [[W1 + Dc Wt1, Cc], [W2, 0]] for u_c = y_1, u1 = -y_c."""
    report = validate_io_split(io)
    if not report.passed:
        raise DimensionMismatch("input/output split failed validation")
    if ctrl.m != io.m:
        raise DimensionMismatch(
            f"controller has {ctrl.m} channels, split has m = {io.m}"
        )
    if io.m != io.mt:
        raise DimensionMismatch("colocated interconnection needs m = m-tilde")
    cols = io.W1.shape[1]
    top = np.hstack([io.W1 + ctrl.Dc @ io.Wt1, ctrl.Cc])
    bottom = np.hstack([io.W2, np.zeros((io.W2.shape[0], ctrl.n_c))])
    W_cl = np.vstack([top, bottom])
    return ClosedLoopSystem(defn=defn, io=io, ctrl=ctrl, W_cl=W_cl)


@dataclass(frozen=True)
class DissipativityReport:
    margin: float
    sip_margin: float | None
    kernel_dim: int

    @property
    def dissipative(self) -> bool:
        return self.margin <= PSD_TOL


def _closed_loop_form(cl: ClosedLoopSystem) -> np.ndarray:
    """Hermitian matrix of the power form F(z, xi) on the product space."""
    nd2 = cl.W_cl.shape[1] - cl.ctrl.n_c
    sigma = sigma_matrix(nd2 // 2)
    nc = cl.ctrl.n_c
    F = np.zeros((nd2 + nc, nd2 + nc), dtype=complex)
    F[:nd2, :nd2] = 0.5 * sigma
    if nc:
        Qc = cl.ctrl.Qc if cl.ctrl.is_sip else np.eye(nc)
        M = Qc @ cl.ctrl.Bc @ cl.io.Wt1
        F[nd2:, :nd2] = 0.5 * M
        F[:nd2, nd2:] = 0.5 * M.conj().T
        # Re(xi^* Qc Ac xi) as a Hermitian block
        G = Qc @ cl.ctrl.Ac
        F[nd2:, nd2:] = 0.5 * (G + G.conj().T)
    return F


def closed_loop_dissipativity(cl: ClosedLoopSystem) -> DissipativityReport:
    """Largest value of the closed-loop power form on ker W_cl.

    The form is F(z, xi) = 1/2 z^* Sigma z + Re(xi^* Qc (Ac xi + Bc u_c))
    with u_c = Wt1 z; margin <= 0 certifies that the closed-loop generator
    is dissipative.  SIP controllers additionally report the margin of
    F <= -sigma |u_c|^2.
    """
    K = null_space(cl.W_cl, rcond=1e-12)
    F = _closed_loop_form(cl)
    if K.shape[1] == 0:
        return DissipativityReport(margin=-np.inf, sip_margin=None, kernel_dim=0)
    A = K.conj().T @ F @ K
    A = 0.5 * (A + A.conj().T)
    margin = float(np.linalg.eigvalsh(A)[-1])
    sip_margin = None
    if cl.ctrl.is_sip and cl.ctrl.sigma > 0:
        nd2 = cl.W_cl.shape[1] - cl.ctrl.n_c
        T = np.hstack([cl.io.Wt1, np.zeros((cl.io.mt, cl.ctrl.n_c))])
        B = (T @ K).conj().T @ (T @ K)
        S = A + cl.ctrl.sigma * B
        S = 0.5 * (S + S.conj().T)
        sip_margin = float(np.linalg.eigvalsh(S)[-1])
    return DissipativityReport(margin=margin, sip_margin=sip_margin, kernel_dim=K.shape[1])


# ---------------------------------------------------------------------------
# Hybrid discretization


def assemble_hybrid_generator(cl: ClosedLoopSystem, grid: CollocationGrid) -> DiscreteOperator:
    """Discretize the closed loop: PDE collocation block coupled to the controller.

    Unknowns are (grid values of x, xi); the constraint W_cl(z; xi) = 0 with
    z read from the grid is imposed by null-space projection, and the
    weighted Gram matrix is extended by the controller energy Qc.
    """
    defn = cl.defn
    pm = build_port_map(defn)
    phi_h = trace_read_matrix(defn, grid)  # Phi(Hx) from grid values
    z_read = pm.R_ext @ phi_h  # port vector z from grid values
    nd2 = 2 * defn.N * defn.d
    nc = cl.ctrl.n_c
    C = np.hstack([cl.W_cl[:, :nd2] @ z_read, cl.W_cl[:, nd2:]])
    sv = np.linalg.svd(C, compute_uv=False)
    scale = sv[0] if sv.size and sv[0] > 0 else 1.0
    if int(np.sum(sv > 1e-10 * scale)) != C.shape[0]:
        raise ConstraintRankLoss(f"closed-loop constraints lost rank at n = {grid.n}")
    cld = np.clongdouble
    Wl = cl.W_cl.astype(cld)
    z_read_ld = pm.R_ext.astype(cld) @ trace_matrix_longdouble(defn, grid.n)
    C_ld = np.hstack([Wl[:, :nd2] @ z_read_ld, Wl[:, nd2:]])
    V_ld = refined_null_space(C, C_hp=C_ld)
    V = np.asarray(V_ld, dtype=complex)
    L = raw_collocation_operator(defn, grid)
    npde = L.shape[0]

    def full_blocks(L_pde, M_pde, z_rd, dtype):
        Lf = np.zeros((npde + nc, npde + nc), dtype=dtype)
        Lf[:npde, :npde] = L_pde
        Mf = np.zeros((npde + nc, npde + nc), dtype=dtype)
        Mf[:npde, :npde] = M_pde
        if nc:
            Lf[npde:, :npde] = cl.ctrl.Bc.astype(dtype) @ (cl.io.Wt1.astype(dtype) @ z_rd)
            Lf[npde:, npde:] = cl.ctrl.Ac
            Qc = cl.ctrl.Qc if cl.ctrl.is_sip else np.eye(nc)
            Mf[npde:, npde:] = Qc
        return Lf, Mf

    Lfull, Mbar = full_blocks(L, exact_gram_matrix(defn, grid), z_read, complex)
    Mbar_ld, L_ld = _weighted_collocation_longdouble(defn, grid.n)
    Lfull_ld, Mbar_full_ld = full_blocks(L_ld, Mbar_ld, z_read_ld, cld)
    G_ld = V_ld.conj().T @ (Mbar_full_ld @ (Lfull_ld @ V_ld))
    M_h_ld = V_ld.conj().T @ (Mbar_full_ld @ V_ld)
    M_h_ld = 0.5 * (M_h_ld + M_h_ld.conj().T)
    S_ld = 0.5 * (G_ld + G_ld.conj().T)
    G = np.asarray(G_ld, dtype=complex)
    M_h = np.asarray(M_h_ld, dtype=complex)
    A_h = np.linalg.solve(M_h, G)
    # iterative refinement keeps herm(M_h A_h) at the rounding floor of A_h
    r = np.asarray(G_ld - M_h_ld @ A_h.astype(cld), dtype=complex)
    A_h = A_h + np.linalg.solve(M_h, r)
    S_herm = np.asarray(S_ld, dtype=complex)
    meta = {"n": grid.n, "n_c": nc, "hybrid": True, "constraint_rows": C.shape[0]}
    return DiscreteOperator(
        A_h=A_h, M_h=M_h, V=V, Mbar=Mbar, grid=grid, defn=defn, G=G,
        S_herm=S_herm, meta=meta,
    )


# ---------------------------------------------------------------------------
# Passivity and SIP stability


def _unconstrained_sample(defn: PHSDefinition, seed: int, degree: int | None = None) -> StateFunction:
    """Random smooth state (no boundary constraints), unit H-norm."""
    rng = np.random.default_rng(seed)
    deg = degree if degree is not None else 2 * defn.N + 6
    c = rng.standard_normal((defn.d, deg + 1)) + 1j * rng.standard_normal((defn.d, deg + 1))
    x = StateFunction.from_poly(c, represents="hx")
    return StateFunction.from_poly(c / h_norm(x, defn), represents="hx")


def verify_hybrid_passivity(
    cl: ClosedLoopSystem, n_samples: int = 50, seed: int = 0, tol: float = 1e-8
) -> float:
    """Worst violation of Re<A0 x, x>_H <= Re<u, y> over random smooth states.

    u = (W1; W2) z and y = (Wt1; Wt2) z with z the port vector of x; the
    inequality is the passivity hypothesis of the SIP stability theorem.
    """
    defn = cl.defn
    pm = build_port_map(defn)
    worst = -np.inf
    for i in range(n_samples):
        x = _unconstrained_sample(defn, seed + i)
        z = pm.R_ext @ boundary_trace(x, defn)
        u = cl.io.W @ z
        y = cl.io.Wt @ z
        power = h_inner_product(apply_A0(x, defn), x, defn).real
        worst = max(worst, power - float(np.real(np.vdot(u, y))))
    return worst


def sip_stability_classify(
    cl: ClosedLoopSystem,
    external_asymptotic_evidence: bool = False,
    passivity_samples: int = 50,
    seed: int = 0,
) -> StabilityCertificate:
    """Stability of the SIP-controlled loop via an unconstrained trace pencil.

    The SIP theorem asks for |u|^2 + |y_1|^2 >= kappa * |selected traces|^2
    on the whole boundary space, so kappa is the smallest eigenvalue of the
    pencil (W^*W + Wt1^*Wt1, T^*T) over all port vectors z, with T reading
    the selected traces.  The trace sets demanded by the first-order,
    second-order and structured rules are enumerated as in the static
    classification.
    """
    report = sip_check(cl.ctrl)
    if not report.passed:
        raise NotPassive("controller fails the SIP structure check")
    violation = verify_hybrid_passivity(cl, n_samples=passivity_samples, seed=seed)
    if violation > 1e-8:
        raise NotPassive(f"boundary passivity violated by {violation:.3e}")
    defn = cl.defn
    pm = build_port_map(defn)
    A = cl.io.W.conj().T @ cl.io.W + cl.io.Wt1.conj().T @ cl.io.Wt1
    kappa_table: dict = {}

    def kappa_of(sel: TraceSelector) -> float:
        key = str(sel)
        if key not in kappa_table:
            T = sel.selector_matrix(defn.N, defn.d) @ pm.R_inv
            val, _ = _pencil_min_ratio(A, T.conj().T @ T)
            kappa_table[key] = max(float(val), 0.0) if val is not None else 0.0
        return kappa_table[key]

    asymptotic_ok = False
    for endpoint in (0, 1):
        sel = TraceSelector(tuple((endpoint, k) for k in range(defn.N)))
        if kappa_of(sel) > KAPPA_POSITIVE:
            asymptotic_ok = True

    exponential_rule = None
    requires_external = False
    if defn.N == 1:
        for endpoint in (0, 1):
            if kappa_of(TraceSelector(((endpoint, 0),))) > KAPPA_POSITIVE:
                exponential_rule = "sip-first-order"
                break
    elif defn.N == 2:
        for sel in _second_order_selectors(defn.N):
            if kappa_of(sel) > KAPPA_POSITIVE:
                exponential_rule = "sip-second-order"
                break
        if exponential_rule is None:
            struct = detect_antidiagonal_structure(defn)
            if struct is not None:
                for sel in _structured_selectors(defn, struct):
                    if kappa_of(sel) > KAPPA_POSITIVE:
                        # trace coverage upgrades asymptotic decay to
                        # exponential; it needs asymptotic decay itself as a
                        # premise, either certified internally or supplied
                        if asymptotic_ok or external_asymptotic_evidence:
                            exponential_rule = "sip-structured-antidiagonal"
                        else:
                            requires_external = True
                        break

    if exponential_rule is not None:
        classification = "certified-exponential"
        rule = exponential_rule
    elif asymptotic_ok:
        classification = "certified-asymptotic"
        rule = "sip-single-endpoint-traces"
    else:
        classification = "inconclusive"
        rule = None
    return StabilityCertificate(
        kappa=kappa_table,
        classification=classification,
        certifying_rule=rule,
        requires_external_asymptotic_evidence=requires_external,
    )
