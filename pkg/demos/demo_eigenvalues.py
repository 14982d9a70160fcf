"""Spectral gaps that set the decay clocks.

Two eigenvalues govern how fast the coupled system relaxes: lambda1, the
first nonzero Neumann eigenvalue of the Laplacian (scalar diffusion), and
lambda1', the smallest eigenvalue of the Stokes operator with no-slip
walls (fluid dissipation).  This script computes both on the unit square
under grid refinement and shows second-order convergence toward the
continuum values pi^2 and ~52.34.
"""

import numpy as np

from ctns import build_grid, neumann_lambda1, stokes_lambda1

PI2 = np.pi**2

print("Neumann Laplacian, unit square (continuum lambda1 = pi^2 = %.6f)" % PI2)
errs = []
for n in (32, 64, 128):
    rep = neumann_lambda1(build_grid(1.0, 1.0, n, n))
    err = abs(rep.lambda1 - PI2)
    errs.append(err)
    print("  %4dx%-4d  lambda1 = %.8f   error %.3e   residual %.1e"
          % (n, n, rep.lambda1, err, rep.residual))
orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
print("  observed orders:", ", ".join("%.2f" % o for o in orders))

print()
print("Neumann Laplacian, 2x1 box (continuum lambda1 = pi^2/4 = %.6f)" % (PI2 / 4))
rep = neumann_lambda1(build_grid(2.0, 1.0, 128, 64))
print("  128x64    lambda1 = %.8f" % rep.lambda1)

print()
print("Stokes operator, unit square (extrapolated reference 52.34469)")
for n in (32, 48, 64):
    eig = stokes_lambda1(build_grid(1.0, 1.0, n, n))
    print("  %4dx%-4d  lambda1' = %.6f   residual %.1e"
          % (n, n, eig.lambda1_prime, eig.residual))

print()
print("Domain scaling: eigenvalues scale like 1/L^2, so a 2x2 box at the")
print("same resolution gives exactly one quarter of the unit-square value:")
e1 = stokes_lambda1(build_grid(1.0, 1.0, 32, 32)).lambda1_prime
e2 = stokes_lambda1(build_grid(2.0, 2.0, 32, 32)).lambda1_prime
print("  %.6f vs 4 x %.6f = %.6f" % (e1, e2, 4 * e2))
