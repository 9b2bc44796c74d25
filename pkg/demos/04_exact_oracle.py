"""Exact error laws for tiny n, checked against the Monte Carlo sampler.

Every training set s of size k arises from n draws with probability
onto(n, k) / (2n)^n, where onto counts sequences that use every point of s.

Run: python3 demos/04_exact_oracle.py
"""

from fractions import Fraction

from oiglab.experiment import ExperimentConfig, exact_distribution, monte_carlo

config = ExperimentConfig(n=4, delta=Fraction(3, 10), rule="adversarial", trials=50_000)
law = exact_distribution(config)
print("distinct training points:", {k: str(p) for k, p in law.size_law.items()})
print("error law:")
for err, p in sorted(law.error_law.items()):
    print(f"  {str(err):>4}: {p}")
print(f"exact mean {law.mean} = {float(law.mean):.5f}, Pr[sabotaged] = {float(law.pr_w1):.4f}")
print(f"sabotaged sets below the promised error: {law.w1_violations}")

s = monte_carlo(config, keep_records=False)
print(f"sampler mean {s.mean:.5f} +/- {s.se:.5f}")
