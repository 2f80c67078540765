"""Port-Hamiltonian models on (0,1): densities, traces, ports, energy inner product.

The model class is

    dx/dt = sum_{k=0}^{N} P_k d^k/dz^k (H(z) x),   z in (0,1),

with P_k^* = (-1)^{k-1} P_k for k >= 1, P_N invertible, and H(z) pointwise
Hermitian and uniformly positive.  State functions are represented either by
polynomial coefficients or by values on a collocation grid; most boundary
machinery acts on the weighted state H x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import (
    DegenerateConstraints,
    DimensionMismatch,
    InsufficientSmoothness,
    RankDeficientW,
    SingularPortMap,
)

HERMITIAN_TOL = 1e-12
RANK_TOL = 1e-10


def as_matrix(a) -> np.ndarray:
    """Coerce input to a 2-D complex array (scalars become 1x1)."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise DimensionMismatch("matrix has non-finite entries")
    return m


def gauss_legendre_01(n: int):
    """Gauss-Legendre nodes/weights transplanted to [0,1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


def barycentric_weights(nodes: np.ndarray, dtype=float) -> np.ndarray:
    x = np.asarray(nodes, dtype=dtype)
    # factor 4/(b-a) keeps the pairwise products away from under/overflow
    diff = 4.0 * (x[:, None] - x[None, :])
    np.fill_diagonal(diff, 1.0)
    w = 1.0 / np.prod(diff, axis=1)
    return w / np.max(np.abs(w))


def interpolation_matrix(nodes: np.ndarray, pts: np.ndarray, dtype=float) -> np.ndarray:
    """Matrix E with (E f)(pts) = p(pts) for the interpolant p of f on nodes."""
    x = np.asarray(nodes, dtype=dtype)
    t = np.asarray(pts, dtype=dtype)
    w = barycentric_weights(x, dtype=dtype)
    d = t[:, None] - x[None, :]
    exact_row, exact_col = np.nonzero(np.abs(d) < 1e-14)
    d[exact_row, :] = 1.0  # avoid division by zero; rows fixed below
    num = w[None, :] / d
    E = num / num.sum(axis=1, keepdims=True)
    E[exact_row, :] = 0.0
    E[exact_row, exact_col] = 1.0
    return E


# ---------------------------------------------------------------------------
# Hamiltonian density


@dataclass(frozen=True)
class HamiltonianDensity:
    """Pointwise Hermitian weight H(z) with real-polynomial entries.

    ``coeffs`` has shape (d, d, p+1), ascending powers of z.  The entrywise
    polynomials must form a symmetric (hence Hermitian) matrix.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 3 or c.shape[0] != c.shape[1]:
            raise DimensionMismatch("H coefficients must have shape (d, d, p+1)")
        object.__setattr__(self, "coeffs", c)

    @staticmethod
    def constant(mat) -> "HamiltonianDensity":
        m = np.asarray(mat, dtype=float)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        return HamiltonianDensity(m[:, :, None])

    @staticmethod
    def identity(d: int) -> "HamiltonianDensity":
        return HamiltonianDensity.constant(np.eye(d))

    @staticmethod
    def diagonal(polys) -> "HamiltonianDensity":
        """Diagonal density from a list of coefficient lists."""
        d = len(polys)
        p = max(len(q) for q in polys)
        c = np.zeros((d, d, p))
        for i, q in enumerate(polys):
            c[i, i, : len(q)] = q
        return HamiltonianDensity(c)

    @property
    def d(self) -> int:
        return self.coeffs.shape[0]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[2] - 1

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    def __call__(self, zeta) -> np.ndarray:
        """Evaluate H at scalar or array zeta; trailing axes are (d, d)."""
        z = np.asarray(zeta, dtype=float)
        powers = z[..., None] ** np.arange(self.coeffs.shape[2])
        return np.einsum("ijk,...k->...ij", self.coeffs, powers)

    def derivative(self) -> "HamiltonianDensity":
        if self.degree == 0:
            return HamiltonianDensity.constant(np.zeros((self.d, self.d)))
        return HamiltonianDensity(npoly.polyder(self.coeffs, axis=2))

    def bounds(self, n_grid: int = 256):
        """(m, M): extreme eigenvalues of H over an n_grid sample of [0,1]."""
        z = np.linspace(0.0, 1.0, n_grid)
        vals = self(z)
        sym = 0.5 * (vals + np.swapaxes(vals, -1, -2))
        eig = np.linalg.eigvalsh(sym)
        return float(eig.min()), float(eig.max())

    def symmetry_residual(self, n_grid: int = 256) -> float:
        z = np.linspace(0.0, 1.0, n_grid)
        vals = self(z)
        return float(np.max(np.abs(vals - np.swapaxes(vals, -1, -2))))


# ---------------------------------------------------------------------------
# Model definition


@dataclass(frozen=True)
class PHSDefinition:
    """Order-N model: matrices P_0..P_N and the Hamiltonian density."""

    N: int
    d: int
    P: tuple
    H: HamiltonianDensity

    def __post_init__(self):
        if self.N < 1 or self.d < 1:
            raise DimensionMismatch("need N >= 1 and d >= 1")
        P = tuple(as_matrix(p) for p in self.P)
        if len(P) != self.N + 1:
            raise DimensionMismatch(f"expected {self.N + 1} matrices P_0..P_N")
        for p in P:
            if p.shape != (self.d, self.d):
                raise DimensionMismatch("every P_k must be d x d")
        if self.H.d != self.d:
            raise DimensionMismatch("H dimension does not match d")
        object.__setattr__(self, "P", P)

    def symmetry_residuals(self):
        """Residual of P_k^* = (-1)^(k-1) P_k for k = 1..N."""
        return [
            float(np.max(np.abs(p.conj().T - (-1.0) ** (k - 1) * p)))
            for k, p in enumerate(self.P)
            if k >= 1
        ]

    def re_p0(self) -> np.ndarray:
        return 0.5 * (self.P[0] + self.P[0].conj().T)


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    value: float


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> ValidationCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate_phs(defn: PHSDefinition) -> ValidationReport:
    """Check model hypotheses; always returns a report, never raises."""
    checks = []
    res = defn.symmetry_residuals()
    for k, r in enumerate(res, start=1):
        checks.append(ValidationCheck(f"P{k}_symmetry", r <= HERMITIAN_TOL, r))
    pn = defn.P[defn.N]
    sv = np.linalg.svd(pn, compute_uv=False)
    scale = sv[0] if sv[0] > 0 else 1.0
    checks.append(
        ValidationCheck("PN_invertible", sv[-1] > RANK_TOL * scale, float(sv[-1]))
    )
    hres = defn.H.symmetry_residual()
    checks.append(ValidationCheck("H_hermitian", hres <= HERMITIAN_TOL, hres))
    m, M = defn.H.bounds()
    checks.append(ValidationCheck("H_lower_bound", m > 0.0, m))
    checks.append(ValidationCheck("H_upper_bound", math.isfinite(M), M))
    return ValidationReport(tuple(checks))


# ---------------------------------------------------------------------------
# Port map


def sigma_matrix(nd: int) -> np.ndarray:
    """Swap matrix [[0, I], [I, 0]] of size 2*nd."""
    s = np.zeros((2 * nd, 2 * nd))
    s[:nd, nd:] = np.eye(nd)
    s[nd:, :nd] = np.eye(nd)
    return s


@dataclass(frozen=True)
class PortMap:
    """Boundary-port transformation (f; e) = R_ext Phi(Hx)."""

    Q: np.ndarray
    R_ext: np.ndarray
    R_inv: np.ndarray

    @property
    def nd(self) -> int:
        return self.Q.shape[0]


def build_port_map(defn: PHSDefinition) -> PortMap:
    """Assemble Q blockwise, Q_{ij} = (-1)^(i-1) P_{i+j-1} for i+j <= N+1.

    The sign on the row index makes Q Hermitian (given the P_k symmetries),
    which is exactly what the boundary form of the energy balance produces
    under repeated integration by parts:

        2 Re<A0 x, x>_H = [jet(Hx)^* Q jet(Hx)]_0^1 + 2 int (Hx)^* Re(P0) Hx.
    """
    N, d = defn.N, defn.d
    Q = np.zeros((N * d, N * d), dtype=complex)
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            if i + j <= N + 1:
                Q[(i - 1) * d : i * d, (j - 1) * d : j * d] = (
                    (-1.0) ** (i - 1) * defn.P[i + j - 1]
                )
    nd = N * d
    R = np.zeros((2 * nd, 2 * nd), dtype=complex)
    R[:nd, :nd] = Q
    R[:nd, nd:] = -Q
    R[nd:, :nd] = np.eye(nd)
    R[nd:, nd:] = np.eye(nd)
    R /= math.sqrt(2.0)
    try:
        R_inv = np.linalg.inv(R)
    except np.linalg.LinAlgError as exc:
        raise SingularPortMap("extended port map is singular") from exc
    resid = np.max(np.abs(R @ R_inv - np.eye(2 * nd)))
    if resid > 1e-8:
        raise SingularPortMap(f"port map inversion residual {resid:.2e}")
    return PortMap(Q=Q, R_ext=R, R_inv=R_inv)


# ---------------------------------------------------------------------------
# Boundary conditions


@dataclass(frozen=True)
class BoundaryCondition:
    """Homogeneous boundary constraint, either on traces or on port variables.

    form "trace": matrix W' with W' Phi(Hx) = 0.
    form "port":  matrix W with W (f; e) = 0.
    """

    form: str
    matrix: np.ndarray

    def __post_init__(self):
        if self.form not in ("trace", "port"):
            raise DimensionMismatch(f"unknown boundary form {self.form!r}")
        m = as_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        sv = np.linalg.svd(m, compute_uv=False)
        scale = sv[0] if sv.size and sv[0] > 0 else 1.0
        rank = int(np.sum(sv > RANK_TOL * scale))
        if rank != m.shape[0]:
            raise RankDeficientW(
                f"boundary matrix rank {rank} < row count {m.shape[0]}"
            )

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    def port_matrix(self, pm: PortMap) -> np.ndarray:
        """W acting on (f; e)."""
        if self.form == "port":
            return self.matrix
        return self.matrix @ pm.R_inv

    def trace_matrix(self, pm: PortMap) -> np.ndarray:
        """W' acting on Phi(Hx)."""
        if self.form == "trace":
            return self.matrix
        return self.matrix @ pm.R_ext


# ---------------------------------------------------------------------------
# State functions


@dataclass(frozen=True)
class StateFunction:
    """A C^d-valued function, as polynomial coefficients or grid values.

    ``represents`` is "x" for the raw state and "hx" when the stored data
    describes the weighted state H x (the natural choice when sampling the
    operator domain, where H x is the smooth object).
    """

    represents: str
    coeffs: np.ndarray | None = None
    values: np.ndarray | None = None
    grid: object | None = None  # CollocationGrid, when grid-valued

    def __post_init__(self):
        if self.represents not in ("x", "hx"):
            raise DimensionMismatch(f"unknown representation {self.represents!r}")
        if (self.coeffs is None) == (self.values is None):
            raise DimensionMismatch("provide exactly one of coeffs / values")
        if self.coeffs is not None:
            c = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
            object.__setattr__(self, "coeffs", c)
        else:
            v = np.atleast_2d(np.asarray(self.values, dtype=complex))
            if self.grid is None:
                raise DimensionMismatch("grid values need an attached grid")
            object.__setattr__(self, "values", v)

    @property
    def is_poly(self) -> bool:
        return self.coeffs is not None

    @property
    def d(self) -> int:
        return self.coeffs.shape[0] if self.is_poly else self.values.shape[0]

    @staticmethod
    def from_poly(coeffs, represents: str = "x") -> "StateFunction":
        return StateFunction(represents=represents, coeffs=coeffs)

    @staticmethod
    def from_grid(values, grid, represents: str = "x") -> "StateFunction":
        return StateFunction(represents=represents, values=values, grid=grid)


def _poly_matmul(H: HamiltonianDensity, coeffs: np.ndarray) -> np.ndarray:
    """Polynomial coefficients of H(z) * p(z) for vector polynomial p."""
    d, nc = coeffs.shape
    out = np.zeros((d, nc + H.degree), dtype=complex)
    for i in range(d):
        acc = np.zeros(nc + H.degree, dtype=complex)
        for j in range(d):
            acc += npoly.polymul(H.coeffs[i, j], coeffs[j])[: nc + H.degree]
        out[i] = acc
    return out


def hx_coeffs(x: StateFunction, defn: PHSDefinition) -> np.ndarray:
    """Polynomial coefficients of H x (requires polynomial representation)."""
    if not x.is_poly:
        raise InsufficientSmoothness("grid-valued function has no coefficients")
    if x.represents == "hx":
        return x.coeffs
    return _poly_matmul(defn.H, x.coeffs)


def hx_grid_values(x: StateFunction, defn: PHSDefinition) -> np.ndarray:
    """Values of H x at the attached grid nodes."""
    if x.represents == "hx":
        return x.values
    hvals = defn.H(np.asarray(x.grid.nodes))  # (n+1, d, d)
    return np.einsum("nij,jn->in", hvals, x.values)


def evaluate_state(x: StateFunction, defn: PHSDefinition, pts: np.ndarray):
    """Values of the raw state x at ``pts`` (shape (d, len(pts)))."""
    pts = np.asarray(pts, dtype=float)
    if x.is_poly:
        if x.represents == "x":
            return npoly.polyval(pts, x.coeffs.T)
        hx = npoly.polyval(pts, x.coeffs.T)  # (d, npts)
    else:
        E = interpolation_matrix(np.asarray(x.grid.nodes), pts)
        vals = x.values @ E.T
        if x.represents == "x":
            return vals
        hx = vals
    hmat = defn.H(pts)  # (npts, d, d)
    return np.linalg.solve(hmat, hx.T[:, :, None])[:, :, 0].T


# ---------------------------------------------------------------------------
# Boundary trace and ports


def boundary_trace(x: StateFunction, defn: PHSDefinition) -> np.ndarray:
    """Phi(Hx) = ((Hx)(1), ..., (Hx)^(N-1)(1), (Hx)(0), ..., (Hx)^(N-1)(0))."""
    N, d = defn.N, defn.d
    phi = np.zeros(2 * N * d, dtype=complex)
    if x.is_poly:
        c = hx_coeffs(x, defn)
        for k in range(N):
            dk = npoly.polyder(c, k, axis=1) if k else c
            phi[k * d : (k + 1) * d] = npoly.polyval(1.0, dk.T)
            phi[(N + k) * d : (N + k + 1) * d] = npoly.polyval(0.0, dk.T)
    else:
        D = np.asarray(x.grid.D)
        if N >= 2 and D.shape[0] != x.values.shape[1]:
            raise InsufficientSmoothness("grid lacks a matching differentiation matrix")
        hx = hx_grid_values(x, defn)
        Dk = np.eye(D.shape[0])
        for k in range(N):
            if k:
                Dk = Dk @ D
            vk = hx @ Dk.T
            phi[k * d : (k + 1) * d] = vk[:, -1]
            phi[(N + k) * d : (N + k + 1) * d] = vk[:, 0]
    return phi


def port_variables(phi: np.ndarray, pm: PortMap):
    """(f, e) = R_ext Phi, split halves."""
    phi = np.asarray(phi, dtype=complex).ravel()
    if phi.size != 2 * pm.nd:
        raise DimensionMismatch(
            f"trace vector length {phi.size}, expected {2 * pm.nd}"
        )
    fe = pm.R_ext @ phi
    return fe[: pm.nd], fe[pm.nd :]


def apply_A0(x: StateFunction, defn: PHSDefinition) -> StateFunction:
    """A0 x = sum_k P_k (Hx)^(k), in the same representation as x."""
    if x.is_poly:
        c = hx_coeffs(x, defn)
        out = np.zeros_like(np.pad(c, ((0, 0), (0, 1))))
        for k, Pk in enumerate(defn.P):
            dk = npoly.polyder(c, k, axis=1) if k else c
            term = Pk @ dk
            out[:, : term.shape[1]] += term
        return StateFunction.from_poly(out, represents="x")
    D = np.asarray(x.grid.D)
    hx = hx_grid_values(x, defn)
    out = np.zeros_like(hx)
    Dk = np.eye(D.shape[0])
    for k, Pk in enumerate(defn.P):
        if k:
            Dk = Dk @ D
        out += Pk @ (hx @ Dk.T)
    return StateFunction.from_grid(out, x.grid, represents="x")


# ---------------------------------------------------------------------------
# Weighted inner product


def _poly_degree(x: StateFunction) -> int:
    return x.coeffs.shape[1] - 1


def h_inner_product(
    x: StateFunction, y: StateFunction, defn: PHSDefinition, n_quad: int | None = None
) -> complex:
    """<x, y>_H = int_0^1 x(z)^* H(z) y(z) dz, conjugate-linear in x.

    Uses x^* H y = (Hx)^* y = x^* (Hy), so mixed raw/weighted polynomial
    representations integrate exactly by Gauss-Legendre; only the case where
    both factors are weighted against nonconstant H needs H^{-1} pointwise
    (then 96 nodes are used and the result carries quadrature error).
    """
    both_poly = x.is_poly and y.is_poly
    xh = x.represents == "hx"
    yh = y.represents == "hx"
    if both_poly:
        if xh and yh and not defn.H.is_constant:
            middle = "hinv"
            n_default = 96
        else:
            middle = {(False, False): "h", (True, False): "id", (False, True): "id"}.get(
                (xh, yh), "hinv"
            )
            extra = defn.H.degree if middle == "h" else 0
            n_default = (_poly_degree(x) + _poly_degree(y) + extra) // 2 + 2
    else:
        middle = "raw"
        n_default = 96
    if n_quad is None:
        n_quad = n_default
    z, w = gauss_legendre_01(n_quad)

    def stored_values(f: StateFunction) -> np.ndarray:
        if f.is_poly:
            return npoly.polyval(z, f.coeffs.T)
        E = interpolation_matrix(np.asarray(f.grid.nodes), z)
        return f.values @ E.T

    if middle == "raw":
        xv = evaluate_state(x, defn, z)
        yv = evaluate_state(y, defn, z)
        hmat = defn.H(z)
        integrand = np.einsum("in,nij,jn->n", xv.conj(), hmat, yv)
    else:
        xv = stored_values(x)
        yv = stored_values(y)
        if middle == "h":
            integrand = np.einsum("in,nij,jn->n", xv.conj(), defn.H(z), yv)
        elif middle == "id":
            integrand = np.einsum("in,in->n", xv.conj(), yv)
        else:  # hinv
            hmat = defn.H(z)
            if defn.H.is_constant:
                hinv = np.linalg.inv(hmat[0])
                integrand = np.einsum("in,ij,jn->n", xv.conj(), hinv, yv)
            else:
                sol = np.linalg.solve(hmat, yv.T[:, :, None])[:, :, 0].T
                integrand = np.einsum("in,in->n", xv.conj(), sol)
    return complex(np.sum(w * integrand))


def h_norm(x: StateFunction, defn: PHSDefinition) -> float:
    return math.sqrt(max(h_inner_product(x, x, defn).real, 0.0))


def volume_dissipation_term(x: StateFunction, defn: PHSDefinition) -> float:
    """int (Hx)^* Re(P0) (Hx) dz, the interior part of the energy balance."""
    rp = defn.re_p0()
    if np.max(np.abs(rp)) == 0.0:
        return 0.0
    z, w = gauss_legendre_01(96)
    if x.is_poly:
        hv = npoly.polyval(z, hx_coeffs(x, defn).T)
    else:
        hmat = defn.H(z)
        hv = np.einsum("nij,jn->in", hmat, evaluate_state(x, defn, z))
    integrand = np.einsum("in,ij,jn->n", hv.conj(), rp, hv).real
    return float(np.sum(w * integrand))


# ---------------------------------------------------------------------------
# Domain sampling


def trace_map_coefficients(N: int, d: int, n_coeff: int) -> np.ndarray:
    """Matrix T with Phi(p) = T c for stacked monomial coefficients c.

    Coefficients are stacked component-major: c = (c_1; ...; c_d), each block
    ascending in degree.
    """
    T = np.zeros((2 * N * d, d * n_coeff))
    mono = np.arange(n_coeff)
    for k in range(N):
        # d^k z^m at z=1 and z=0
        fall = np.ones(n_coeff)
        for j in range(k):
            fall *= np.maximum(mono - j, 0)
        at1 = fall.copy()
        at0 = np.zeros(n_coeff)
        if k < n_coeff:
            at0[k] = math.factorial(k)
        for i in range(d):
            T[k * d + i, i * n_coeff : (i + 1) * n_coeff] = at1
            T[(N + k) * d + i, i * n_coeff : (i + 1) * n_coeff] = at0
    return T


def sample_domain_function(
    defn: PHSDefinition,
    bc: BoundaryCondition,
    seed: int,
    degree: int | None = None,
) -> StateFunction:
    """Draw a deterministic pseudo-random element of the operator domain.

    H x is a polynomial of the requested degree (default 2N+6) satisfying the
    boundary constraints exactly; free coefficients come from a seeded RNG and
    the result is normalized to unit H-norm.
    """
    from scipy.linalg import null_space

    pm = build_port_map(defn)
    wt = bc.trace_matrix(pm)
    rng = np.random.default_rng(seed)
    deg = degree if degree is not None else 2 * defn.N + 6
    max_deg = 2 * defn.N + 16
    while True:
        n_coeff = deg + 1
        T = trace_map_coefficients(defn.N, defn.d, n_coeff)
        A = wt @ T
        K = null_space(A, rcond=1e-12)
        if K.shape[1] > 0:
            break
        deg += 2
        if deg > max_deg:
            raise DegenerateConstraints(
                "no nontrivial domain sample up to degree " + str(max_deg)
            )
    z = rng.standard_normal(K.shape[1]) + 1j * rng.standard_normal(K.shape[1])
    c = (K @ z).reshape(defn.d, n_coeff)
    x = StateFunction.from_poly(c, represents="hx")
    nrm = h_norm(x, defn)
    if nrm < 1e-13:
        raise DegenerateConstraints("sampled function is numerically zero")
    return StateFunction.from_poly(c / nrm, represents="hx")
