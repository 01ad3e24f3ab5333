"""Finite samples of the topologist's sine curve.

X_n samples the graph of sin(1/x) over [2^-n, 1], so each step in n adds
more oscillations near the y-axis.  Greedy upper bounds on GH(X_n, X_{n+3}) shrink as n grows,
which is the numerical face of the samples converging.
"""

from gromovkit.family import sine_curve
from gromovkit.gh import gh_lower_diam, gh_upper_greedy

spaces = {n: sine_curve(n, 128) for n in range(1, 10)}
for n in range(1, 7):
    up, _ = gh_upper_greedy(spaces[n], spaces[n + 3])
    lo = gh_lower_diam(spaces[n], spaces[n + 3])
    print(f"n={n}: {lo:.4f} <= GH(X_n, X_n+3) <= {up:.4f}")
