"""Generation certificates, boundary dissipation coefficients, stability rules.

Contraction generation is decided by three matrix conditions on the boundary
matrix W (acting on the port variables) and on P0:

    rank W = Nd,    W Sigma W^* >= 0,    Re P0 <= 0,

with Sigma = [[0, I], [I, 0]].  On ker W the boundary power is
Re<A0 x, x>_H = 1/2 z^* Sigma z for z = (f; e), so the optimal constant kappa
in  Re<A0 x, x>_H <= -kappa * |selected traces|^2  is the smallest generalized
eigenvalue of a Hermitian pencil on the kernel.  The classification rules
combine kappa values for specific trace sets into exponential / asymptotic
verdicts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, null_space

from .core import (
    BoundaryCondition,
    PHSDefinition,
    PortMap,
    apply_A0,
    build_port_map,
    h_inner_product,
    port_variables,
    boundary_trace,
    h_norm,
    sample_domain_function,
    sigma_matrix,
    volume_dissipation_term,
)
from .errors import (
    DimensionMismatch,
    EmptySelector,
    NotDissipative,
    RankDeficientW,
)

PSD_TOL = 1e-10
KAPPA_POSITIVE = 1e-9


# ---------------------------------------------------------------------------
# Generation certificate


@dataclass(frozen=True)
class GenerationCertificate:
    rank_ok: bool
    wsigma_psd: bool
    wsigma_min_eig: float
    rep0_nsd: bool
    rep0_max_eig: float
    verdict: str  # "contraction" | "not-contraction"
    sigma: np.ndarray

    @property
    def is_contraction(self) -> bool:
        return self.verdict == "contraction"


def _port_form_square(defn: PHSDefinition, bc: BoundaryCondition, pm: PortMap):
    """W on (f; e) with exactly Nd rows; full rank enforced."""
    W = bc.port_matrix(pm)
    nd = pm.nd
    if W.shape != (nd, 2 * nd):
        raise RankDeficientW(
            f"generation certificate needs {nd} boundary rows, got {W.shape[0]}"
        )
    sv = np.linalg.svd(W, compute_uv=False)
    if sv[-1] <= 1e-10 * max(sv[0], 1.0):
        raise RankDeficientW("boundary matrix W is rank deficient")
    return W


def check_generation(
    defn: PHSDefinition, bc: BoundaryCondition, tol_psd: float = PSD_TOL
) -> GenerationCertificate:
    """Contraction-semigroup certificate: rank W, W Sigma W^* >= 0, Re P0 <= 0."""
    pm = build_port_map(defn)
    W = _port_form_square(defn, bc, pm)
    sigma = sigma_matrix(pm.nd)
    WS = W @ sigma @ W.conj().T
    WS = 0.5 * (WS + WS.conj().T)
    eigs = np.linalg.eigvalsh(WS)
    scale = 1.0 + float(np.max(np.abs(WS)))
    wsigma_psd = bool(eigs[0] >= -tol_psd * scale)
    rp = defn.re_p0()
    rp_eigs = np.linalg.eigvalsh(rp)
    rp_scale = 1.0 + float(np.max(np.abs(rp))) if rp.size else 1.0
    rep0_nsd = bool(rp_eigs[-1] <= tol_psd * rp_scale)
    verdict = "contraction" if (wsigma_psd and rep0_nsd) else "not-contraction"
    return GenerationCertificate(
        rank_ok=True,
        wsigma_psd=wsigma_psd,
        wsigma_min_eig=float(eigs[0]),
        rep0_nsd=rep0_nsd,
        rep0_max_eig=float(rp_eigs[-1]),
        verdict=verdict,
        sigma=sigma,
    )


def verify_energy_balance(
    defn: PHSDefinition, bc: BoundaryCondition, n_samples: int = 50, seed: int = 0
) -> float:
    """Max normalized residual of Re<A0 x, x>_H = Re<f, e> + volume term."""
    pm = build_port_map(defn)
    worst = 0.0
    for i in range(n_samples):
        x = sample_domain_function(defn, bc, seed + i)
        ax = apply_A0(x, defn)
        lhs = h_inner_product(ax, x, defn).real
        f, e = port_variables(boundary_trace(x, defn), pm)
        boundary = float(np.real(np.vdot(f, e)))
        volume = volume_dissipation_term(x, defn)
        nrm2 = h_norm(x, defn) ** 2
        worst = max(worst, abs(lhs - boundary - volume) / (1.0 + nrm2))
    return worst


# ---------------------------------------------------------------------------
# Trace selectors


@dataclass(frozen=True)
class TraceSelector:
    """Set of boundary traces (endpoint, derivative order[, component]).

    Entries are (endpoint in {0,1}, order k < N) pairs, optionally extended
    by a component index i < d; a pair without component selects all d
    components of that trace.
    """

    entries: tuple

    def __post_init__(self):
        norm = []
        for ent in self.entries:
            ent = tuple(ent)
            if len(ent) == 2:
                ent = (int(ent[0]), int(ent[1]), None)
            elif len(ent) == 3:
                ent = (int(ent[0]), int(ent[1]), None if ent[2] is None else int(ent[2]))
            else:
                raise DimensionMismatch("selector entries are 2- or 3-tuples")
            if ent[0] not in (0, 1):
                raise DimensionMismatch("selector endpoint must be 0 or 1")
            norm.append(ent)
        if len(set(norm)) != len(norm):
            raise DimensionMismatch("duplicate selector entries")
        object.__setattr__(self, "entries", tuple(norm))

    def __str__(self):
        parts = []
        for zeta, k, comp in self.entries:
            parts.append(f"{zeta}:{k}" if comp is None else f"{zeta}:{k}:{comp}")
        return "{" + ",".join(parts) + "}"

    def selector_matrix(self, N: int, d: int) -> np.ndarray:
        """Rows of the 2Nd identity picking the selected Phi components."""
        rows = []
        for zeta, k, comp in self.entries:
            if k >= N:
                raise DimensionMismatch(f"derivative order {k} >= N = {N}")
            block = k if zeta == 1 else N + k
            comps = range(d) if comp is None else [comp]
            for i in comps:
                if i >= d:
                    raise DimensionMismatch(f"component {i} >= d = {d}")
                row = np.zeros(2 * N * d)
                row[block * d + i] = 1.0
                rows.append(row)
        if not rows:
            raise EmptySelector("selector has no entries")
        return np.asarray(rows)


# ---------------------------------------------------------------------------
# kappa pencil


def _pencil_min_ratio(A: np.ndarray, B: np.ndarray):
    """min z^*Az / z^*Bz over z with Bz != 0, for Hermitian A >= 0, B >= 0.

    Deflates ker B by a Schur complement.  Returns (value, minimizer) or
    (None, None) when B vanishes identically.
    """
    A = 0.5 * (A + A.conj().T)
    B = 0.5 * (B + B.conj().T)
    bvals, U = eigh(B)
    bmax = float(bvals[-1]) if bvals.size else 0.0
    if bmax <= 0.0:
        return None, None
    keep = bvals > 1e-11 * bmax
    V1 = U[:, keep]
    V0 = U[:, ~keep]
    B1 = np.diag(bvals[keep])
    A11 = V1.conj().T @ A @ V1
    if V0.shape[1]:
        A00 = V0.conj().T @ A @ V0
        A10 = V1.conj().T @ A @ V0
        A00p = np.linalg.pinv(A00, rcond=1e-10, hermitian=True)
        S = A11 - A10 @ A00p @ A10.conj().T
    else:
        A00p = None
        A10 = None
        S = A11
    S = 0.5 * (S + S.conj().T)
    vals, Y = eigh(S, B1)
    y = Y[:, 0]
    z = V1 @ y
    if A00p is not None:
        z = z - V0 @ (A00p @ (A10.conj().T @ y))
    return float(vals[0]), z


def boundary_dissipation_coefficient(
    defn: PHSDefinition,
    bc: BoundaryCondition,
    sel: TraceSelector,
    pm: PortMap | None = None,
    return_minimizer: bool = False,
):
    """Largest kappa with Re<A0 x, x>_H <= -kappa * |selected traces of Hx|^2.

    Over the constraint kernel, the boundary power is 1/2 z^* Sigma z and the
    selected traces are T z with T = M_sel R_inv, so kappa is the smallest
    generalized eigenvalue of (K^*(-1/2 Sigma)K, K^* T^*T K) on an
    orthonormal kernel basis K, after deflating directions with T z = 0.
    """
    if pm is None:
        pm = build_port_map(defn)
    rp_eigs = np.linalg.eigvalsh(defn.re_p0())
    if rp_eigs[-1] > PSD_TOL * (1.0 + float(np.max(np.abs(defn.re_p0())))):
        raise NotDissipative("Re P0 has a positive eigenvalue")
    W = bc.port_matrix(pm)
    K = null_space(W, rcond=1e-12)
    if K.shape[1] == 0:
        # empty kernel: the inequality is vacuous, any kappa works; report 0
        return (0.0, None) if return_minimizer else 0.0
    sigma = sigma_matrix(pm.nd)
    A = K.conj().T @ (-0.5 * sigma) @ K
    A = 0.5 * (A + A.conj().T)
    a_eigs = np.linalg.eigvalsh(A)
    a_scale = 1.0 + float(np.max(np.abs(A)))
    if a_eigs[0] < -PSD_TOL * a_scale:
        raise NotDissipative(
            f"boundary power is positive on the kernel (min eig {a_eigs[0]:.3e})"
        )
    M_sel = sel.selector_matrix(defn.N, defn.d)
    T = M_sel @ pm.R_inv
    TK = T @ K
    B = TK.conj().T @ TK
    val, y = _pencil_min_ratio(A, B)
    if val is None:
        # selected traces vanish identically on the kernel
        return (0.0, None) if return_minimizer else 0.0
    kappa = max(float(val), 0.0)
    z = K @ y if y is not None else None
    return (kappa, z) if return_minimizer else kappa


# ---------------------------------------------------------------------------
# Structure detection


@dataclass(frozen=True)
class AntidiagonalStructure:
    """Second-order two-block structure: P2 = [[0, B], [-B^*, 0]] style split.

    ``p2_block`` is the top-right block of P2, ``p1_block`` the top-right block
    of P1 (zero allowed), blocks of H on the diagonal.
    """

    half: int
    p2_block: np.ndarray
    p1_block: np.ndarray


def detect_antidiagonal_structure(defn: PHSDefinition):
    """Return the anti-diagonal block pattern of a second-order system, if any."""
    if defn.N != 2 or defn.d % 2 != 0:
        return None
    h = defn.d // 2
    tol = 1e-12

    def blocks(M):
        return M[:h, :h], M[:h, h:], M[h:, :h], M[h:, h:]

    p2aa, p2ab, p2ba, p2bb = blocks(defn.P[2])
    if max(np.max(np.abs(p2aa)), np.max(np.abs(p2bb))) > tol:
        return None
    if max(np.max(np.abs(p2ab)), np.max(np.abs(p2ba))) <= tol:
        return None
    p1aa, p1ab, p1ba, p1bb = blocks(defn.P[1])
    if max(np.max(np.abs(p1aa)), np.max(np.abs(p1bb))) > tol:
        return None
    # H must not couple the two blocks
    hc = defn.H.coeffs
    if np.max(np.abs(hc[:h, h:, :])) > tol or np.max(np.abs(hc[h:, :h, :])) > tol:
        return None
    return AntidiagonalStructure(half=h, p2_block=p2ab.copy(), p1_block=p1ab.copy())


# ---------------------------------------------------------------------------
# Stability classification


@dataclass(frozen=True)
class StabilityCertificate:
    kappa: dict  # str(TraceSelector) -> kappa value
    classification: str  # certified-exponential | certified-asymptotic | inconclusive
    certifying_rule: str | None
    requires_external_asymptotic_evidence: bool

    @property
    def exponential(self) -> bool:
        return self.classification == "certified-exponential"

    @property
    def asymptotic(self) -> bool:
        return self.classification in ("certified-exponential", "certified-asymptotic")


def _full_endpoint_selector(N: int, endpoint: int) -> TraceSelector:
    return TraceSelector(tuple((endpoint, k) for k in range(N)))


def _second_order_selectors(N: int):
    """Trace sets of the second-order exponential rule, all or-branches."""
    sels = []
    for zeta0 in (0, 1):
        other = 1 - zeta0
        for far_order in (0, 1):
            sels.append(TraceSelector(((zeta0, 0), (zeta0, 1), (other, far_order))))
    return sels


def _even_order_selectors(N: int):
    """alpha-pattern trace sets for even order N = 2K.

    The pattern requires, for some endpoint zeta0: traces (zeta0, 0) and
    (zeta0, K); for each k < K one of (zeta0, k+1) or (zeta0, N-k-1); and for
    each endpoint and k < K one of (zeta, k) or (zeta, N-k-1).  Additional
    traces never hurt (kappa of a superset certifies the subset inequality),
    so the full both-endpoint selector is tried first; small K also enumerates
    the minimal branch combinations.
    """
    K = N // 2
    sels = [
        TraceSelector(tuple((z, k) for z in (0, 1) for k in range(N)))
    ]
    if K > 3:
        return sels
    import itertools

    for zeta0 in (0, 1):
        base = {(zeta0, 0), (zeta0, K)}
        cond2 = [((zeta0, k + 1), (zeta0, N - k - 1)) for k in range(K)]
        cond3 = [((z, k), (z, N - k - 1)) for z in (0, 1) for k in range(K)]
        for pick2 in itertools.product(*cond2):
            for pick3 in itertools.product(*cond3):
                ent = base | set(pick2) | set(pick3)
                ent = {e for e in ent if e[1] < N}
                sels.append(TraceSelector(tuple(sorted(ent))))
    # dedupe
    seen = {}
    for s in sels:
        seen.setdefault(str(s), s)
    return list(seen.values())


def _structured_selectors(defn: PHSDefinition, struct: AntidiagonalStructure):
    """Trace sets of the anti-diagonal second-order rule.

    For an anchor endpoint zeta0 the rule needs the full trace (Hx)(zeta0),
    one first-derivative block at zeta0, and one trace (order 0 or 1) of a
    designated block at the other endpoint; both block roles and both
    endpoints are admissible by symmetry.
    """
    h = struct.half
    d = defn.d
    sels = []
    for zeta0 in (0, 1):
        other = 1 - zeta0
        for mid_block in (0, 1):
            mid = tuple((zeta0, 1, mid_block * h + i) for i in range(h))
            for far_block in (0, 1):
                for far_order in (0, 1):
                    far = tuple(
                        (other, far_order, far_block * h + i) for i in range(h)
                    )
                    ent = tuple((zeta0, 0, i) for i in range(d)) + mid + far
                    sels.append(TraceSelector(ent))
    seen = {}
    for s in sels:
        seen.setdefault(str(s), s)
    return list(seen.values())


def classify_stability(
    defn: PHSDefinition,
    bc: BoundaryCondition,
    external_asymptotic_evidence: bool = False,
) -> StabilityCertificate:
    """Classify stability by evaluating kappa on rule-specific trace sets.

    Rules, strongest first: first-order (N=1) and second-order (N=2)
    exponential rules; the even-order trace-pattern rule and the
    anti-diagonal structured rule (both of which upgrade an asymptotic
    certificate to exponential); the full-endpoint asymptotic rule.
    """
    cert = check_generation(defn, bc)
    if not cert.is_contraction:
        raise NotDissipative("generation certificate failed; nothing to classify")
    pm = build_port_map(defn)
    kappa_table: dict = {}

    def kappa_of(sel: TraceSelector) -> float:
        key = str(sel)
        if key not in kappa_table:
            kappa_table[key] = boundary_dissipation_coefficient(defn, bc, sel, pm=pm)
        return kappa_table[key]

    # asymptotic rule: all traces at a single endpoint
    asymptotic_ok = False
    for endpoint in (0, 1):
        if kappa_of(_full_endpoint_selector(defn.N, endpoint)) > KAPPA_POSITIVE:
            asymptotic_ok = True
    have_asymptotic = asymptotic_ok or external_asymptotic_evidence

    exponential_rule = None
    if defn.N == 1:
        for endpoint in (0, 1):
            sel = TraceSelector(((endpoint, 0),))
            if kappa_of(sel) > KAPPA_POSITIVE:
                exponential_rule = "first-order"
                break
    elif defn.N == 2:
        for sel in _second_order_selectors(defn.N):
            if kappa_of(sel) > KAPPA_POSITIVE:
                exponential_rule = "second-order"
                break

    if exponential_rule is None and defn.N % 2 == 0 and defn.N >= 4:
        for sel in _even_order_selectors(defn.N):
            if kappa_of(sel) > KAPPA_POSITIVE and have_asymptotic:
                exponential_rule = "even-order-pattern"
                break

    requires_external = False
    if exponential_rule is None and defn.N == 2:
        struct = detect_antidiagonal_structure(defn)
        if struct is not None:
            for sel in _structured_selectors(defn, struct):
                if kappa_of(sel) > KAPPA_POSITIVE:
                    if have_asymptotic:
                        exponential_rule = "structured-antidiagonal"
                    else:
                        requires_external = True
                    break

    if exponential_rule is not None:
        classification = "certified-exponential"
        rule = exponential_rule
    elif asymptotic_ok:
        classification = "certified-asymptotic"
        rule = "single-endpoint-traces"
    else:
        classification = "inconclusive"
        rule = None
    return StabilityCertificate(
        kappa=kappa_table,
        classification=classification,
        certifying_rule=rule,
        requires_external_asymptotic_evidence=requires_external,
    )
