"""Exact computations around B-free integers.

Structural sets (gcd-images, certificate scales, the derived family B* and
its free set E), exact densities of sets of multiples, Toeplitz
certification of the minimal subsystem, and CRT-based witness construction
between the lower and upper window codings.
"""

from .arith import Congruence, Factorization, crt_solve, factor, is_prime, next_prime_in_ap
from .errors import (
    BFreeError,
    CeilingExceeded,
    CertificateAuditFailure,
    CertificateMissing,
    ComputationalLimit,
    EnumerationCeiling,
    FlipNotAllowed,
    Incompatible,
    SearchExhausted,
    TermExplosion,
)
from .family import (
    BFamily,
    CoprimeCertificate,
    ExplicitFinite,
    FiniteUnion,
    ScaledPrimes,
    coprime_certificates,
    divides_member,
    enumerate_upto,
    gcd_image,
    load_family,
    spectrum_bounded,
)
from .heredity import (
    AvoidanceConstraint,
    CylinderWitness,
    IntegerWitness,
    avoidance_residues,
    approximate_point,
    block_language,
    clear_tail,
    construct_witness,
    extend_avoidance,
    hereditary_audit,
    verify_integer_witness,
)
from .periodic import Block, PeriodicSet, density, difference_density, indicator_window, periodic_window
from .structure import (
    Filtration,
    StructureReport,
    a_infinity,
    a_s,
    b_star,
    build_structure_report,
    davenport_erdos_delta,
    e_member,
    light_tails_bound,
    m_bstar_restricted,
    proximal,
    standard_filtration,
    taut_to_depth,
)
from .window import (
    Cylinder,
    CylinderClass,
    ToeplitzCertificate,
    TriBlock,
    boundary_measure_filtration,
    cylinder_vs_window,
    mirsky_block_bounds,
    phi_eval,
    phi_lower,
    regularity_verdict,
    toeplitz_certify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
