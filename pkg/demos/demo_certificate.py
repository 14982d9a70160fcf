"""Building a smallness certificate from the constants ledger.

The global-decay theory works like this: given the model parameters
(absorption rate m, spectral gaps lambda1 and lambda1', sensitivity bound
C_S, ...), one can compute explicit constants C1..C7 and sigma, and from
them a tuple (M1..M4, eps) such that any initial data inside the eps-ball
launches a solution whose four trajectory norms stay under the M_i
envelopes forever and decay exponentially.  This script walks through
that construction for the unit square.
"""

from ctns import (
    build_grid,
    check_initial_smallness,
    choose_M_eps,
    choose_M_eps_alternative,
    default_parameters,
    lambda1_neumann,
    sigma,
)

from _states import cosine_state

LAMBDA1_PRIME = 52.34469  # unit-square Stokes gap (extrapolated)

d = build_grid(1.0, 1.0, 64, 64)
p = default_parameters(lambda1_neumann(d), LAMBDA1_PRIME, m=1.0, C_S=0.2)
print("Parameters: m=%.1f  lambda1=%.4f  lambda1'=%.4f  C_S=%.2f"
      % (p.m, p.lambda1, p.lambda1_prime, p.C_S))
print("Decay rates: alpha1=%.3f  alpha2=%.3f  (0.8 x spectral minima)"
      % (p.alpha1, p.alpha2))

print()
print("sigma(alpha1) = %.6f  (integral of (1+s^-a) e^{-alpha1 s})" % sigma(p))

cert = choose_M_eps(p)
print()
print("Main certificate:")
print("  M1=%-12.5g M2=%-12.5g M3=%-12.5g M4=%-12.5g" % (cert.M1, cert.M2, cert.M3, cert.M4))
print("  eps = %.6g" % cert.eps)
print("  inequality slacks, order (M3, M4, M2, M1) -- all must be >= 0:")
print("  " + "  ".join("%.4g" % s for s in cert.slacks))

print()
print("Checking concrete initial data against the certificate:")
for label, f in (("inside the eps-ball", 0.5), ("outside (10x too big)", 10.0)):
    st = cosine_state(d, m=p.m, amp_n=f * cert.eps, amp_c=0.5 * f * cert.eps,
                      amp_u=0.1 * f * cert.eps)
    chk = check_initial_smallness(st.n, st.c, st.u, p, cert)
    print("  %-24s passed=%s  n_margin=%+.3g" % (label, chk["passed"], chk["n_margin"]))

print()
print("Alternative certificate (mass-threshold variant): the construction")
print("carries an e^A amplification, so its eps is astronomically small --")
print("faithful to the underlying estimate, and mainly of structural interest.")
alt = choose_M_eps_alternative(p, M_c0=1.0)
print("  eps = %.3g   mass threshold m0 = %.3g  (m0 < eps/|Omega|^{1/p0})"
      % (alt.eps, alt.m0))
