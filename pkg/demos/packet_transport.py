"""Wave packets on the lattice: massless, massive and frozen.

Run: python demos/packet_transport.py
"""
import numpy as np

from qcalab import DiracParams, WeylVariant, dirac_rule, group_velocity, weyl_rule
from qcalab.lattice import PacketSpec, make_packet, track

cases = [
    ("weyl1d", weyl_rule(WeylVariant(1)), PacketSpec((0.8,), 0.05, spinor=(1, 0)), (512,)),
    ("dirac1d m=0.5", dirac_rule(DiracParams(0.5, WeylVariant(1))), PacketSpec((0.4,), 0.03), (1024,)),
    ("dirac3d m=1", dirac_rule(DiracParams(1.0)), PacketSpec((0.3, 0, 0), 0.15), (32, 32, 32)),
]
for name, rule, spec, shape in cases:
    traj = track(rule, make_packet(rule, shape, spec), 60)
    expected = group_velocity(rule, np.array(spec.k0))
    print(f"{name:14s} centroid velocity {np.round(traj.velocity, 5)}  group velocity {np.round(expected, 5)}")
