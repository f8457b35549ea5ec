"""The bound calculators: rate parameters, crossover, truncation, budget.

No construction happens here; this is the a-priori side of the theory.
Given a decay sequence, choose (lambda, alpha), locate the crossover
dimension from the tail condition, tabulate the guaranteed criterion
bound over lambda, the dimension-truncation bound over s, the explicit
error constant over N, and combine a three-part error budget.
"""

import math

from polylat import (
    DecaySequence,
    WeightSpec,
    bound_constant,
    cbc_bound,
    crossover_dimension,
    error_budget,
    error_constant,
    select_rate_parameters,
    smallness_condition,
    truncation_bound,
)

seq = DecaySequence.power(0.05, 3.0, p=0.5)
lam, alpha = select_rate_parameters(seq.p)
print(f"decay c*j^-3 with p = {seq.p}: lambda = {lam}, interlacing order alpha = {alpha}")

J = crossover_dimension(seq, eps=0.01)
print(f"crossover dimension for eps = 0.01: J = {J} "
      f"(tail beyond J is {seq.tail(J):.3e} <= eps/4 = {0.01 / 4:.3e})")

spec = WeightSpec(alpha=alpha, b=2, J=J, beta=seq)
print(f"\nB constant at lambda={lam}: {bound_constant(alpha, 2, lam):.4e}")
print(f"smallness condition (only binding for p = 1): {smallness_condition(spec)}")

m, s = 10, 8
d = alpha * s
print(f"\nguaranteed criterion bound, b=2, m={m}, d={d}:")
for lam_grid in (0.45, 0.6, 0.8, 1.0):
    print(f"  lambda={lam_grid:4.2f}: {cbc_bound(spec, m, d, lam_grid):.6e}")

print("\ndimension-truncation bound vs true tail:")
for s_t in (1, 4, 16, 64):
    print(f"  s={s_t:3d}: bound {truncation_bound(seq, seq.p, s_t):.3e}, "
          f"tail {seq.tail(s_t):.3e}")

print("\nexplicit error constant of the N^(-1/p) rate:")
tiny = DecaySequence.power(5e-7, 3.0, p=0.5)
tiny_spec = WeightSpec(alpha=3, b=2, J=0, beta=tiny)
for mm in (8, 10, 12):
    print(f"  N=2^{mm}: {error_constant(tiny_spec, 2**mm):.4e}")
print("  (at larger decay scales the constant exceeds double range and is"
      " reported as inf with a warning; only the empirical rate is observable)")

budget = error_budget(trunc=2e-4, qmc=5e-5, pg_h=0.05, pg_t=2.0)
print(f"\nerror budget: truncation {budget.truncation:.1e} + quadrature "
      f"{budget.quadrature:.1e} + discretization {budget.discretization:.1e} "
      f"= {budget.total:.3e}")
assert math.isclose(budget.discretization, 0.05**2)
