"""Exact-symbolic and numeric toolkit for rotation-algebra invariants.

Layers:

* :mod:`nctorus.algebra` -- exact normal-ordered Laurent polynomials in the
  generators U, V over the phase ring Z[i][L, L^-1], L = e(theta/4), with
  the order-four transform, the flip, the parity automorphism and the
  canonical trace.
* :mod:`nctorus.traces` -- the twisted-trace functionals and the five- and
  six-slot character vectors.
* :mod:`nctorus.lattice` -- integer decomposition of character vectors over
  the nine-vector lattice, semiflat-cone membership, genus arithmetic.
* :mod:`nctorus.realization` -- constructive certificates that given trace
  values are realized by projections of each symmetry kind.
* :mod:`nctorus.loops` -- numeric Powers-Rieffel projections as loop
  elements with verified residual gates and invariant tables.
* :mod:`nctorus.cli` -- the ``nctorus`` command-line front end.

Everything operates on immutable values and is safe for concurrent use.
"""

from .algebra import (
    ONE,
    U,
    V,
    Element,
    GaussRational,
    Monomial,
    PhaseScalar,
    apply_automorphism,
    canonical_trace,
    element_to_text,
    normalize_product,
    numeric_eval,
    parse_element,
    parse_phase,
    phase_to_text,
    sigma_average,
    star,
)
from .lattice import (
    ChernVector,
    Genus,
    K0Coordinates,
    KScalar,
    basis_rank,
    basis_vectors,
    chern_from_t4,
    chern_to_text,
    decompose,
    genus_basis_decompose,
    parse_chern,
    parse_kscalar,
    quantization_check,
    recompose,
    semiflat_coordinates,
    semiflat_membership,
    synthesis_recipe,
    trace_of,
)
from .loops import (
    CircleFunction,
    LoopElement,
    bump_pair,
    flip_apply,
    loop_invariants,
    loop_mul,
    loop_star,
    pr_build,
)
from .realization import (
    Certificate,
    Convergent,
    FourSquares,
    TraceValue,
    certificate_from_json,
    certificate_to_json,
    convergents,
    flat_decompose,
    four_squares,
    parse_trace,
    realize,
    subalgebra_generators,
    verify_certificate,
)
from .theta import PrecisionExhausted, ThetaParam, parse_theta
from .traces import (
    T2Vector,
    T4Vector,
    chern_T2,
    chern_T4,
    phi_eval,
    psi_eval,
    relation_check,
    twist_discovery,
)

__version__ = "0.1.0"
