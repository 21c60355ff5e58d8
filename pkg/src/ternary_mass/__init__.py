"""Primitive representation numbers of positive ternary quadratic forms,
class numbers, Dirichlet L-values, Siegel-type local densities, and twisted
central L-values, verified as exact identities or tightly toleranced numerics.
"""

from .arith import (
    DiscriminantInfo,
    Factorization,
    character_values,
    classify_discriminant,
    factorize,
    is_fundamental_discriminant,
    is_prime,
    is_squarefree,
    kronecker,
)
from .class_numbers import (
    BinaryForm,
    class_number,
    dirichlet_L1,
    dirichlet_L1_any,
    reduce_form,
    reduced_forms,
    unit_count,
)
from .errors import IntegrityError, RangeError, TernaryMassError
from .lfunctions import (
    CentralValue,
    NewformSeries,
    central_value,
    central_value_40,
    newform20,
    waldspurger_study,
)
from .local_densities import (
    DensityReport,
    GenusData,
    MassCheck,
    beta_infinity,
    beta_p_closed,
    beta_p_counting,
    density_report,
    exact_mass_identity_rows,
    genus,
    imprimitive_L1_correction,
    mass_formula_check,
    mass_survey,
)
from .amplification import (
    AmplifierSpec,
    CharacterTable,
    L_xi,
    SmoothWeight,
    amplified_moment,
    amplifier,
    character_table,
    plancherel_identity_check,
    shifted_convolution_expand,
)
from .ternary_forms import (
    RAMANUJAN_Q,
    RAMANUJAN_QPRIME,
    SPINOR_A,
    SPINOR_B,
    THREE_SQUARES,
    RealQuadraticRing,
    RepResult,
    TernaryForm,
    automorph_count,
    rep_count,
    rep_count_real_quadratic,
    rep_counts_upto,
    solutions,
)

__version__ = "0.1.0"
