"""Photons from pairs of Weyl fermions.

The bilinear G(k) rotates about n_{k/2} at each step; its transverse part
obeys Maxwell's equations, and smeared polarization operators become
bosonic as the excitation density M/N drops.

Run: python demos/photon_from_fermions.py
"""
import numpy as np

from qcalab.maxwell import conjugation_rotation_check, deviation_scan, maxwell_residual
from qcalab.models import WeylVariant

v = WeylVariant(3)
k = np.array([0.2, -0.1, 0.3])
print("rotation identity deviation:", conjugation_rotation_check(v, k, range(11)).deviation)
rep = maxwell_residual(v, k, np.arange(11))
print(f"transversality {rep.transversality:.1e}  curl {rep.curl:.1e}  speed mismatch {rep.speed_mismatch:.1e}")

print("N_k  M  [γ, γ†] - 1")
for n, m, dev in deviation_scan():
    print(f"{n:3d} {m:2d}  {dev:.4f}")
