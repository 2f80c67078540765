# Schrodinger equation: closed-form resolvent vs. discretization, and the
# behaviour of the resolvent along the imaginary axis.
#
# For i w_t + w_zz = 0 with w'(0) = -ik w(0) and w'(1) = alpha w(1) the
# resolvent applied to the constant function 1 has a closed form.  It is
# evaluated in a decaying-exponential basis so it stays finite at very large
# frequencies.  The demo checks it against the collocation solve and tracks
# the L2 norm of R(i beta) 1, which decays like 1/beta: the resolvent stays
# uniformly bounded on the axis, and the scaled interior values
# beta^{3/2} e^{-sqrt(beta) z} x(z) vanish as beta grows.

import numpy as np

from phstab import (
    assemble_discrete_generator,
    chebyshev_operator,
    preset_model,
    schrodinger_highfreq_limit,
    schrodinger_resolvent_oracle,
)

k, alpha = 1.0, 2.0
m = preset_model("schrodinger", k=k, alpha=alpha)

print("oracle vs. discretized resolvent solve (n = 96):")
op = assemble_discrete_generator(m.defn, m.bc, chebyshev_operator(96))
for beta in (5.0, 10.0, 25.0):
    rhs = op.project(np.ones(op.V.shape[0], dtype=complex))
    c = np.linalg.solve(1j * beta * np.eye(op.size) - op.A_h, rhs)
    co = op.project(schrodinger_resolvent_oracle(beta, k, alpha, op.grid.nodes))
    nm = lambda v: np.sqrt(np.real(v.conj() @ op.M_h @ v))
    print(f"  beta = {beta:5.1f}: relative error {nm(c - co) / nm(co):.2e}")

print("\nL2 norm of R(i beta) 1 along the axis:")
pts = np.linspace(0, 1, 4001)
for beta in (1e2, 1e3, 1e4, 1e5, 1e6):
    x = schrodinger_resolvent_oracle(beta, k, alpha, pts)
    norm = np.sqrt(np.trapezoid(np.abs(x) ** 2, pts))
    print(f"  beta = {beta:8.0e}: ||x|| = {norm:.3e}   beta*||x|| = {beta*norm:.3f}")

print("\nscaled interior values beta^{3/2} e^{-sqrt(beta)/2} x(1/2):")
table = schrodinger_highfreq_limit(k, alpha, [1e2, 1e4, 1e6], 0.5)
for beta, scaled, mag in table["rows"]:
    print(f"  beta = {beta:8.0e}: {scaled:.3e}   |.| = {mag:.3e}")
print("-> no growing boundary-layer mode is present; the scaled values tend")
print("   to zero and every spectral/resolvent indicator points to uniform")
print("   exponential decay for this boundary condition")
