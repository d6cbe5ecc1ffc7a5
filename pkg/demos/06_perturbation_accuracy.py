"""How good is the small-perturbation approximation of the power sums?

Two perturbation families around a base output law Q:

  uniform mode: each joint column is (Q/2 + d, Q/2 - d), a fair input
  bit nudged per symbol.  The quadratic approximation of the power-sum
  deviation is 2 a (a-1) sum[d^2 Q^(a-2)] / sum Q^a; at integer orders
  2 and 3 the expansion terminates, so "approximation" is exact.

  deterministic mode: each column is (d, Q - d), a constant input
  leaking slightly.  The approximation keeps the d^a and linear terms.

Exact values use rational arithmetic at integer orders and 50-digit
floats elsewhere, so the printed error measures the approximation
itself, not roundoff in the evaluator.
"""

from polarlens import PerturbationSpec, perturbation_sweep

specs = [
    ("uniform, alpha=2", PerturbationSpec("uniform", (0.5, 0.3, 0.2), (0.1, -0.05, 0.02), 2.0)),
    ("uniform, alpha=3", PerturbationSpec("uniform", (0.5, 0.3, 0.2), (0.1, -0.05, 0.02), 3.0)),
    ("uniform, alpha=0.5", PerturbationSpec("uniform", (0.5, 0.3, 0.2), (0.1, -0.05, 0.02), 0.5)),
    ("deterministic, alpha=3", PerturbationSpec("deterministic", (0.5, 0.5), (0.01, 0.01), 3.0)),
    ("deterministic, alpha=0.5", PerturbationSpec("deterministic", (0.5, 0.5), (1e-4, 1e-4), 0.5)),
]

for name, spec in specs:
    print(f"\n{name}")
    print(f"  {'scale':>8}  {'exact':>14}  {'approx':>14}  {'rel error':>10}")
    for row in perturbation_sweep(spec, halvings=5):
        print(
            f"  {row.scale:8.4f}  {row.exact:14.6e}  {row.approx:14.6e}"
            f"  {row.rel_error:10.2e}"
        )

print("""
Readings
 - at alpha = 2 and 3 in uniform mode the relative error is literally
   zero at every scale: the expansion terminates, nothing is dropped.
 - everywhere else the error falls with the square of the scale (one
   extra order beyond the kept terms), visible as the ~4x drop per row.
 - the deterministic alpha=0.5 family converges even though the d^0.5
   term is not small next to d: it is kept exactly by the formula.
""")
