"""Exact presentations, relation checks and blow-up schedules for rings of stable-map classes."""

from .order import DEFAULT_ORDER, ELIMINATION, GREVLEX, MonomialOrder
from .poly import (
    DegreeMismatchError,
    Generator,
    InexactDivisionError,
    PolyRing,
    Polynomial,
    RingMismatchError,
    add,
    exact_divide,
    homogeneous_component,
    mul,
    substitute,
)
from .ideal import (
    GroebnerBasis,
    HilbertFunction,
    KernelDegreeBoundError,
    QuotientRing,
    buchberger,
    hilbert_function,
    is_zero_in_quotient,
    normal_form,
    ring_map_kernel,
    standard_monomials,
)

from .strata import (
    BoundaryLabel,
    BlowupSchedule,
    DivisorType,
    EpsWeight,
    GroupElement,
    LabelContext,
    WeightSystem,
    all_labels,
    complement,
    is_compatible,
    is_unstable_component,
    schedule_m,
    schedule_m0,
)
from .presentations import (
    ConventionPinningError,
    RelationBundle,
    RingPresentation,
    flag_d1,
    grassmannian_lines,
    lemma31_R,
    m01_pn_d2,
    pin_convention,
    projective_space,
    thm33_relations,
    thm_m_relations,
)
from .invariants import (
    RingAction,
    VerificationReport,
    apply_action,
    example36_pipeline,
    inclusion_exclusion_check,
    invariant_hilbert,
    reynolds,
    swap_action,
)

__version__ = "0.1.0"
