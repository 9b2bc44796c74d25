"""Same expected error, very different tails.

Three valid rules learn the zero function from n = 50 uniform draws over a
100-point star.  The closure rule never errs.  The random-flip rule errs a
little, independently across training sets.  The coordinated rule sabotages a
fixed family of training sets, so a delta fraction of samples pay a large error.

Run: python3 demos/03_heavy_tail.py   (about half a minute)
"""

import math
from fractions import Fraction

from oiglab.experiment import ExperimentConfig, monte_carlo

n, delta, trials = 50, Fraction(1, 10), 20_000
threshold = Fraction(1, int(16 * delta * n))
print(f"n={n}, delta={delta}, {trials} trials, tail threshold {threshold}\n")
print(f"{'rule':<12} {'mean':>8} {'Pr[err>=t]':>11} {'0.9-quantile':>13}")
for rule in ("closure", "random_flip", "adversarial"):
    s = monte_carlo(ExperimentConfig(n=n, delta=delta, rule=rule, trials=trials), jobs=2, keep_records=False)
    print(f"{rule:<12} {s.mean:8.4f} {s.tail(threshold):11.4f} {float(s.quantile(1 - delta)):13.3f}")
    if rule == "adversarial":
        print(f"\nsabotaged sets hit: {s.pr_w1:.3f} of samples (target {float(delta)})")
        print(f"expected-error benchmark 2/(n+1) = {2 / (n + 1):.4f}")
        print(f"random-flip tail level 10 ln(n)/n = {10 * math.log(n) / n:.3f}")
