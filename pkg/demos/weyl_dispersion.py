"""Band structure of the Weyl automata along a path through the zone.

Run: python demos/weyl_dispersion.py
Prints ω(k) for the d=3 rule along the ray k ∝ (1, 0.3, 0) and compares the
small-k speed with 1/√3.
"""
import math

import numpy as np

from qcalab import WeylVariant, dispersion, group_velocity, unitarity_report, weyl_rule

rule = weyl_rule(WeylVariant(3, "+"))
print(rule.name, "unitary:", unitarity_report(rule).passed)

path = np.linspace(0, math.pi * math.sqrt(3) / 2, 9)[:, None] * np.array([1.0, 0.3, 0.0])
for k, om in zip(path, dispersion(rule, path)):
    print(f"k = {np.round(k, 3)}  ω = {om[1]:.6f}")

v = group_velocity(rule, np.array([1e-3, 0, 0]))
print(f"speed near k = 0: {np.linalg.norm(v):.6f} (1/√3 = {1 / math.sqrt(3):.6f})")
