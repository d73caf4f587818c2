"""Sandwich the closed-form approximation lower bounds with brute force.

For each norm we solve the discretized best-approximation problem with an
LP (or a Gram solve for the weighted-L2 case) and print it next to the
analytic lower bound.  The ratio column should never fall below 1.
"""

from lblab import harness

rows = harness.approx_check_rows(kmax=6, grid=2049)

print(f"{'norm':<10} {'k':>2} {'analytic_lb':>14} {'bruteforce':>14} {'ratio':>8}")
worst = float("inf")
for norm, k, lb, bf, ratio in rows:
    print(f"{norm:<10} {k:>2} {lb:>14.6e} {bf:>14.6e} {ratio:>8.4f}")
    worst = min(worst, ratio)

print(f"\nworst ratio {worst:.6f} (>= 1 means every bound is respected)")
