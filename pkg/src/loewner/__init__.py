"""Evolution families of the unit disk with prescribed boundary regular
fixed points: field construction, Loewner-Kufarev integration, and the
boundary inequality verification suite."""

__version__ = "0.1.0"

from .boundary import (
    AngularDerivativeEstimate,
    ArcLengthResult,
    DWEstimate,
    JuliaCheckResult,
    angular_derivative,
    check_arc_length,
    check_half_plane_julia,
    check_julia,
    dilation_curve,
    estimate_dw,
    julia_alpha,
    normalize_fix_origin,
)
from .disk import (
    BoundaryPoint,
    CayleyMap,
    MobiusTransform,
    build_automorphism,
    cayley,
    cayley_inverse,
    mobius_apply,
    pseudo_hyperbolic_distance,
    require_interior,
)
from .errors import (
    ConfigError,
    ConstraintError,
    DomainError,
    InfeasibleError,
    IntegrationError,
    LoewnerError,
    NotTangentError,
    PoleError,
    ValidationError,
)
from .generators import (
    BerksonPortaField,
    CorollaryField,
    FieldSpec,
    NullQuotient,
    ReciprocalField,
    ThreeBrfpMap,
    berkson_porta_p,
    build_three_brfp_map,
    field_eval,
    field_from_dict,
    field_to_dict,
    null_quotient,
    prescribed_null_points,
    three_brfp_map_eval,
)
from .integrate import (
    EvolutionEvaluator,
    FlowWithBoundary,
    ToleranceSettings,
    Trajectory,
    autonomous_semiflow,
    evolution_map,
    evolve,
    evolve_on_circle,
    evolve_trajectory,
    rk4_oracle,
)
from .measures import (
    AtomicCircleMeasure,
    CircleAtom,
    MeasureSchedule,
    NevanlinnaRep,
    RealAtomicMeasure,
    ScheduleSegment,
    circle_measure,
    corollary_q_eval,
    herglotz_eval,
    measure_at,
    nevanlinna_eval,
)
