# Boundary dissipation coefficients (kappa) and stability classification.
#
# kappa is the largest constant with Re<A x, x>_H <= -kappa * |selected
# boundary traces of Hx|^2 over the operator domain.  It is computed exactly
# as the smallest eigenvalue of a small Hermitian pencil on the kernel of the
# boundary constraint, and a positive kappa on the right trace set certifies
# asymptotic or exponential stability depending on the rule that applies.

from phstab import (
    TraceSelector,
    boundary_dissipation_coefficient,
    classify_stability,
    preset_model,
)

print("transport, inflow trace {0:0}:")
m = preset_model("transport")
kappa = boundary_dissipation_coefficient(m.defn, m.bc, TraceSelector(((0, 0),)))
print(f"  kappa = {kappa:.12f}   (exact value 1/2)")

print("\nwave equation with velocity damper gain k at z=0:")
for k in (0.5, 1.0, 2.0):
    m = preset_model("wave", k=k)
    st = classify_stability(m.defn, m.bc)
    print(f"  k={k}: {st.classification} via rule {st.certifying_rule!r}")

print("\nSchrodinger with w'(0) = -ik w(0), w'(1) = alpha w(1):")
print("  kappa on the z=0 traces {0:0,0:1} equals k/(1+k^2):")
for k in (0.5, 1.0, 2.0):
    m = preset_model("schrodinger", k=k, alpha=2.0)
    sel = TraceSelector(((0, 0), (0, 1)))
    kappa = boundary_dissipation_coefficient(m.defn, m.bc, sel)
    print(f"  k={k}: kappa = {kappa:.12f}   k/(1+k^2) = {k/(1+k*k):.12f}")
    st = classify_stability(m.defn, m.bc)
    print(f"        classification: {st.classification} ({st.certifying_rule})")
