"""Spectral collocation discretization with null-space constraint projection.

The constrained generator is approximated on Chebyshev-Gauss-Lobatto nodes:
grid values of the state x are the raw unknowns, the boundary constraint
W' Phi(Hx) = 0 is imposed exactly by restricting to the null space of its
discrete realization, and the reduced operator is Galerkin-projected in the
discrete H-weighted inner product.  The weighted Gram matrix is computed
exactly (for polynomial H) by interpolating to a refined Gauss-Legendre grid,
so the discrete energy balance reproduces the continuous one to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import eigh, null_space

from .core import (
    BoundaryCondition,
    PHSDefinition,
    build_port_map,
    gauss_legendre_01,
    interpolation_matrix,
)
from .errors import ConstraintRankLoss, DimensionMismatch


@dataclass(frozen=True)
class CollocationGrid:
    """Chebyshev-Gauss-Lobatto collocation data on [0,1].

    nodes ascend, node_j = (1 - cos(j pi / n)) / 2; D differentiates the
    degree-n interpolant exactly at the nodes; w are Clenshaw-Curtis weights
    normalized to sum to 1.
    """

    n: int
    nodes: np.ndarray
    D: np.ndarray
    w: np.ndarray


_PI_LD = np.longdouble("3.141592653589793238462643383279502884")


def _cheb_matrix(n: int, dtype=float):
    """Differentiation matrix on x_j = cos(j pi / n).

    Node differences use cos(a) - cos(b) = 2 sin((a+b)/2) sin((b-a)/2), which
    avoids the cancellation of subtracting nearly equal cosines near the
    endpoints; diagonal entries come from the negative row-sum identity.
    """
    pi = _PI_LD if dtype is np.longdouble else np.pi
    j = np.arange(n + 1)
    x = np.cos(pi * j / n).astype(dtype)
    c = np.ones(n + 1, dtype=dtype)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** j
    I, J = np.meshgrid(j, j, indexing="ij")
    dX = 2.0 * np.sin((I + J) * pi / (2 * n)) * np.sin((J - I) * pi / (2 * n))
    np.fill_diagonal(dX, 1.0)
    D = np.outer(c, 1.0 / c) / dX
    np.fill_diagonal(D, 0.0)
    D -= np.diag(D.sum(axis=1))
    return x, D


def _clenshaw_curtis_weights(n: int) -> np.ndarray:
    """Clenshaw-Curtis weights for nodes cos(j pi / n) on [-1,1]."""
    if n == 1:
        return np.array([1.0, 1.0])
    theta = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n * n - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2.0 * k * theta[1:-1]) / (4.0 * k * k - 1)
        v -= np.cos(n * theta[1:-1]) / (n * n - 1)
    else:
        w[0] = w[n] = 1.0 / (n * n)
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2.0 * k * theta[1:-1]) / (4.0 * k * k - 1)
    w[1:-1] = 2.0 * v / n
    return w


def chebyshev_operator(n: int) -> CollocationGrid:
    """Collocation grid of polynomial degree n >= 2 on [0,1]."""
    if n < 2:
        raise DimensionMismatch("need polynomial degree n >= 2")
    x, Dc = _cheb_matrix(n)
    # x descends on [-1,1]; map z = (1-x)/2 ascends on [0,1], dz/dx = -1/2
    nodes = (1.0 - x) / 2.0
    D = -2.0 * Dc
    w = _clenshaw_curtis_weights(n) / 2.0
    w = w / w.sum()
    return CollocationGrid(n=n, nodes=nodes, D=D, w=w)


# ---------------------------------------------------------------------------
# Assembly


def _h_eval_matrix(defn: PHSDefinition, grid: CollocationGrid, dtype=float) -> np.ndarray:
    """Block matrix mapping stacked x grid values to stacked Hx grid values."""
    n1 = grid.n + 1
    if dtype is float:
        hv = defn.H(grid.nodes)  # (n1, d, d)
    else:
        powers = grid.nodes.astype(dtype)[:, None] ** np.arange(defn.H.coeffs.shape[2])
        hv = np.einsum("ijk,nk->nij", defn.H.coeffs.astype(dtype), powers)
    M = np.zeros((defn.d * n1, defn.d * n1), dtype=dtype)
    for i in range(defn.d):
        for j in range(defn.d):
            M[i * n1 : (i + 1) * n1, j * n1 : (j + 1) * n1] = np.diag(hv[:, i, j])
    return M


def trace_read_matrix(defn: PHSDefinition, grid: CollocationGrid) -> np.ndarray:
    """Matrix Phi_h with Phi_h u = Phi(Hx) for stacked grid values u of x."""
    N, d = defn.N, defn.d
    n1 = grid.n + 1
    hmat = _h_eval_matrix(defn, grid)
    T = np.zeros((2 * N * d, d * n1))
    Dk = np.eye(n1)
    for k in range(N):
        if k:
            Dk = Dk @ grid.D
        for i in range(d):
            T[k * d + i, i * n1 : (i + 1) * n1] = Dk[-1]
            T[(N + k) * d + i, i * n1 : (i + 1) * n1] = Dk[0]
    return T @ hmat


def exact_gram_matrix(defn: PHSDefinition, grid: CollocationGrid) -> np.ndarray:
    """H-weighted Gram matrix of the degree-n nodal polynomial space.

    Exact for polynomial H: values are interpolated to a Gauss-Legendre grid
    fine enough to integrate degree 2n + deg(H) products exactly.
    """
    n1 = grid.n + 1
    n_gl = grid.n + defn.H.degree // 2 + 2
    z, w = gauss_legendre_01(n_gl)
    E = interpolation_matrix(grid.nodes, z)  # (n_gl, n1)
    hv = defn.H(z)  # (n_gl, d, d)
    M = np.zeros((defn.d * n1, defn.d * n1))
    for i in range(defn.d):
        for j in range(defn.d):
            M[i * n1 : (i + 1) * n1, j * n1 : (j + 1) * n1] = (
                E.T * (w * hv[:, i, j])
            ) @ E
    return 0.5 * (M + M.T)


@dataclass(frozen=True)
class DiscreteOperator:
    """Reduced generator A_h with its weighted inner product M_h.

    V lifts reduced coordinates to stacked grid values of x (component-major,
    d blocks of n+1 values); Mbar is the full-grid weighted Gram matrix, so
    M_h = V* Mbar V and energies of lifted states agree with the continuous
    H-norm of the interpolating polynomial.
    """

    A_h: np.ndarray
    M_h: np.ndarray
    V: np.ndarray
    Mbar: np.ndarray
    grid: CollocationGrid
    defn: PHSDefinition
    G: np.ndarray | None = None  # weighted form M_h A_h before the M_h solve
    S_herm: np.ndarray | None = None  # Hermitian part of G, extended precision
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.A_h.shape[0]

    def lift(self, coords: np.ndarray) -> np.ndarray:
        """Grid values of x from reduced coordinates."""
        return self.V @ coords

    def project(self, u: np.ndarray) -> np.ndarray:
        """M-orthogonal projection of stacked grid values onto the subspace."""
        return np.linalg.solve(self.M_h, self.V.conj().T @ (self.Mbar @ u))

    def sqrt_mh(self):
        """(M_h^{1/2}, M_h^{-1/2}) via eigendecomposition."""
        vals, U = eigh(self.M_h)
        vals = np.maximum(vals, 0.0)
        r = np.sqrt(vals)
        return (U * r) @ U.conj().T, (U / r) @ U.conj().T


def raw_collocation_operator(defn: PHSDefinition, grid: CollocationGrid) -> np.ndarray:
    """L = sum_k (P_k (x) D^k) H-eval on stacked grid values of x."""
    n1 = grid.n + 1
    hmat = _h_eval_matrix(defn, grid)
    L = np.zeros((defn.d * n1, defn.d * n1), dtype=complex)
    Dk = np.eye(n1)
    for k, Pk in enumerate(defn.P):
        if k:
            Dk = Dk @ grid.D
        L += np.kron(Pk, Dk)
    return L @ hmat


def refined_null_space(
    C: np.ndarray, C_hp: np.ndarray | None = None, iterations: int = 3
) -> np.ndarray:
    """Null-space basis of C with iteratively refined constraint residuals.

    Plain SVD leaves residuals C V ~ eps * sigma_max(C), which the large
    derivative-trace rows turn into visible energy leaks.  Refinement drives
    the residual of C_hp (a long-double build of the same constraints, when
    supplied) to its rounding floor using the double-precision pseudoinverse
    as the correction operator.
    """
    V = null_space(C, rcond=1e-12)
    if V.shape[1] == 0:
        return V.astype(np.clongdouble)
    Cp = np.linalg.pinv(C, rcond=1e-12)
    Cl = C.astype(np.clongdouble) if C_hp is None else C_hp.astype(np.clongdouble)
    Vl = V.astype(np.clongdouble)
    for _ in range(iterations):
        Vl = Vl - Cp.astype(np.clongdouble) @ (Cl @ Vl)
    return Vl


def assemble_discrete_generator(
    defn: PHSDefinition, bc: BoundaryCondition, grid: CollocationGrid
) -> DiscreteOperator:
    """Discretize the constrained generator by null-space projection.

    The boundary rows W' Phi_h are removed by restricting to their null space
    V, then A_h = M_h^{-1} V* Mbar L V with M_h = V* Mbar V.
    """
    pm = build_port_map(defn)
    wt = bc.trace_matrix(pm)
    phi_h = trace_read_matrix(defn, grid)
    C = wt @ phi_h
    sv = np.linalg.svd(C, compute_uv=False)
    scale = sv[0] if sv.size and sv[0] > 0 else 1.0
    if int(np.sum(sv > 1e-10 * scale)) != C.shape[0]:
        raise ConstraintRankLoss(
            f"boundary constraints lost rank at n = {grid.n}"
        )
    C_ld = wt.astype(np.clongdouble) @ trace_matrix_longdouble(defn, grid.n)
    V_ld = refined_null_space(C, C_hp=C_ld)
    V = np.asarray(V_ld, dtype=complex)
    Mbar = exact_gram_matrix(defn, grid)
    Mbar_ld, L_ld = _weighted_collocation_longdouble(defn, grid.n)
    G_ld = V_ld.conj().T @ (Mbar_ld @ (L_ld @ V_ld))
    M_h_ld = V_ld.conj().T @ (Mbar_ld @ V_ld)
    M_h_ld = 0.5 * (M_h_ld + M_h_ld.conj().T)
    S_ld = 0.5 * (G_ld + G_ld.conj().T)
    G = np.asarray(G_ld, dtype=complex)
    M_h = np.asarray(M_h_ld, dtype=complex)
    A_h = np.linalg.solve(M_h, G)
    # one step of iterative refinement keeps herm(M_h A_h) at the rounding
    # floor of A_h itself rather than of the n^{2N}-sized intermediates
    r = np.asarray(G_ld - M_h_ld @ A_h.astype(np.clongdouble), dtype=complex)
    A_h = A_h + np.linalg.solve(M_h, r)
    meta = {"n": grid.n, "constraint_rows": C.shape[0]}
    return DiscreteOperator(
        A_h=A_h, M_h=M_h, V=V, Mbar=Mbar, grid=grid, defn=defn, G=G,
        S_herm=np.asarray(S_ld, dtype=complex), meta=meta,
    )


def trace_matrix_longdouble(defn: PHSDefinition, n: int) -> np.ndarray:
    """Long-double rebuild of trace_read_matrix on the degree-n grid."""
    ld = np.longdouble
    N, d = defn.N, defn.d
    n1 = n + 1
    x, Dc = _cheb_matrix(n, dtype=ld)
    D = -2.0 * Dc
    nodes = (1.0 - x) / 2.0
    hmat = np.zeros((d * n1, d * n1), dtype=ld)
    powers = nodes[:, None] ** np.arange(defn.H.coeffs.shape[2])
    hv = np.einsum("ijk,nk->nij", defn.H.coeffs.astype(ld), powers)
    for i in range(d):
        for j in range(d):
            hmat[i * n1 : (i + 1) * n1, j * n1 : (j + 1) * n1] = np.diag(hv[:, i, j])
    T = np.zeros((2 * N * d, d * n1), dtype=ld)
    Dk = np.eye(n1, dtype=ld)
    for k in range(N):
        if k:
            Dk = Dk @ D
        for i in range(d):
            T[k * d + i, i * n1 : (i + 1) * n1] = Dk[-1]
            T[(N + k) * d + i, i * n1 : (i + 1) * n1] = Dk[0]
    return T @ hmat


def gauss_legendre_longdouble(m: int):
    """Gauss-Legendre nodes/weights on [0,1] refined to long double.

    Double-precision weights carry ~1e-15 rounding which, multiplied by the
    O(n^{2N}) integrand of the weighted operator, dominates the certificate;
    a few Newton steps on the Legendre polynomial remove it.
    """
    x = leggauss(m)[0].astype(np.longdouble)
    for _ in range(3):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for k in range(2, m + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = m * (x * p1 - p0) / (x * x - 1.0)
        x = x - p1 / dp
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, m + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = m * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    return (x + 1.0) / 2.0, w / 2.0


def _weighted_collocation_longdouble(defn: PHSDefinition, n: int):
    """(Mbar, L) for degree n rebuilt self-consistently in long double.

    In exact arithmetic herm(Mbar L) consists only of O(1) boundary terms,
    the O(n^{2N}) interior entries cancelling pairwise; double rounding in
    the differentiation and interpolation matrices survives that cancellation
    multiplied by ||L||, so the dissipativity certificate rebuilds the whole
    weighted operator (nodes, differentiation, quadrature, H evaluation) in
    long double before symmetrizing.
    """
    ld = np.longdouble
    n1 = n + 1
    x, Dc = _cheb_matrix(n, dtype=ld)
    nodes = (1.0 - x) / 2.0
    D = -2.0 * Dc
    powers = nodes[:, None] ** np.arange(defn.H.coeffs.shape[2])
    hv = np.einsum("ijk,nk->nij", defn.H.coeffs.astype(ld), powers)
    hmat = np.zeros((defn.d * n1, defn.d * n1), dtype=ld)
    for i in range(defn.d):
        for j in range(defn.d):
            hmat[i * n1 : (i + 1) * n1, j * n1 : (j + 1) * n1] = np.diag(hv[:, i, j])
    L = np.zeros((defn.d * n1, defn.d * n1), dtype=np.clongdouble)
    Dk = np.eye(n1, dtype=ld)
    for k, Pk in enumerate(defn.P):
        if k:
            Dk = Dk @ D
        L += np.kron(Pk.astype(np.clongdouble), Dk)
    L = L @ hmat
    n_gl = n + defn.H.degree // 2 + 2
    z, w = gauss_legendre_longdouble(n_gl)
    E = interpolation_matrix(nodes, z, dtype=ld)
    zpow = z[:, None] ** np.arange(defn.H.coeffs.shape[2])
    hz = np.einsum("ijk,nk->nij", defn.H.coeffs.astype(ld), zpow)
    Mbar = np.zeros((defn.d * n1, defn.d * n1), dtype=ld)
    for i in range(defn.d):
        for j in range(defn.d):
            Mbar[i * n1 : (i + 1) * n1, j * n1 : (j + 1) * n1] = (
                E.T * (w * hz[:, i, j])
            ) @ E
    Mbar = 0.5 * (Mbar + Mbar.T)
    return Mbar, L


def discrete_dissipativity(op: DiscreteOperator) -> float:
    """Largest eigenvalue of the M_h-symmetrized part of A_h.

    Nonpositive (within tolerance) certifies that the discrete semigroup is a
    contraction in the M_h norm.
    """
    if op.S_herm is not None:
        S = op.S_herm
    else:
        G = op.G if op.G is not None else op.M_h @ op.A_h
        S = 0.5 * (G + G.conj().T)
    vals = eigh(S, op.M_h, eigvals_only=True)
    return float(vals[-1])
