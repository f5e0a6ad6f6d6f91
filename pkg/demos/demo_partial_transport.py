"""The eps-partial problem: pay for what you must, drop what you may.

Relaxing the mass constraint to "transport at least 1 - eps" turns the
duality gap into a computable limit.  Two instructive profiles:

* diagonal instance: the value is max(1 - n*eps, 0).  The drop budget is
  shared across the whole row/column chain, so each unit of slack saves n
  units of cost; at eps = 1/n the one-step shift becomes feasible and the
  value hits 0.
* fat-set instance (cost = indicator of a fat closed set in x): the
  optimal drop concentrates on the expensive rows, so the value falls
  linearly with eps until the expensive mass is exhausted.
"""

from gaplab import diag_inf, discretize, solve_partial, solve_primal
from gaplab.catalog import complement_measure, fat_set, fat_set_alpha

n = 8
C, mu, nu = discretize(diag_inf(), n)
print(f"diagonal instance at n={n}: partial value vs eps")
print(f"  {'eps':>10}  {'value':>10}  {'max(1-n*eps,0)':>16}")
for k in range(0, 7):
    eps = k / (2 * n)
    val = solve_partial(C, mu, nu, eps).value
    print(f"  {eps:10.4f}  {val:10.6f}  {max(1 - n * eps, 0):16.6f}")

print()
alpha = fat_set_alpha()
inst = fat_set(20, alpha=alpha)
lam = complement_measure(alpha, 20)
C, mu, nu = discretize(inst, 64)
print(f"fat-set instance (K=20, n=64), lambda(D_K) = {lam:.7f}:")
print(f"  full primal  = {solve_primal(C, mu, nu).value:.7f}")
for eps in (0.05, 0.1, 0.2, 0.4, 0.6):
    val = solve_partial(C, mu, nu, eps).value
    print(f"  eps={eps:.2f}  partial = {val:.7f}   lambda - eps = {lam - eps:+.7f}")
print("the value tracks lambda(D_K) - eps while expensive mass remains,")
print("then bends once only cheap mass is left to drop.")
