"""Quantum cellular automata on Cayley graphs: Weyl, Dirac and photon models."""

from .errors import QCAError
from .kspace import (
    BrillouinZone,
    TransitionRule,
    build_ak,
    dispersion,
    group_velocity,
    interpolating_hamiltonian,
    isotropy_check,
    unitarity_report,
)
from .models import (
    DiracParams,
    WeylVariant,
    dirac_rule,
    target_dirac_hamiltonian,
    target_weyl_hamiltonian,
    weyl_rule,
)

__version__ = "0.1.0"

__all__ = [
    "BrillouinZone",
    "DiracParams",
    "QCAError",
    "TransitionRule",
    "WeylVariant",
    "build_ak",
    "dirac_rule",
    "dispersion",
    "group_velocity",
    "interpolating_hamiltonian",
    "isotropy_check",
    "target_dirac_hamiltonian",
    "target_weyl_hamiltonian",
    "unitarity_report",
    "weyl_rule",
]
