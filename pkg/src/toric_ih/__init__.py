"""Intersection cohomology of toric varieties with rank-one torsion coefficients.

The package certifies vanishing of IH with twisted coefficients by running
Deligne's construction on the fan at the level of monodromy characters.
"""

from .charsys import Character, LocalSystemClass, descend, dual, is_trivial, is_twisted, restrict
from .fan import Cone, Fan, close_fan, codim_filtration, faces_of, orbit_data, validate_fan
from .icengine import (
    FanComplex,
    Perversity,
    VanishingCertificate,
    deligne_ic,
    initial_complex,
    pushforward_step,
    shift,
    truncate,
    twistedness_certificate,
    vanishing_verdict,
)
from .lattice import QuotientLattice, Sublattice, complete_basis, membership, saturate, smith_normal_form
from .toruscoh import torus_cohomology_closed_form, torus_cohomology_koszul_oracle

__all__ = [
    "Character",
    "LocalSystemClass",
    "descend",
    "dual",
    "is_trivial",
    "is_twisted",
    "restrict",
    "Cone",
    "Fan",
    "close_fan",
    "codim_filtration",
    "faces_of",
    "orbit_data",
    "validate_fan",
    "FanComplex",
    "Perversity",
    "VanishingCertificate",
    "deligne_ic",
    "initial_complex",
    "pushforward_step",
    "shift",
    "truncate",
    "twistedness_certificate",
    "vanishing_verdict",
    "QuotientLattice",
    "Sublattice",
    "complete_basis",
    "membership",
    "saturate",
    "smith_normal_form",
    "torus_cohomology_closed_form",
    "torus_cohomology_koszul_oracle",
]

__version__ = "0.1.0"
