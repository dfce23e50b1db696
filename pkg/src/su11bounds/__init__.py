"""Multi-parameter precision bounds for the SU(1,1) displacement-estimation model.

Quadrature ordering is (q1, p1, q2, p2) with vacuum variance 1/4.
"""
from .bounds import (
    HcrbOptions,
    HcrbProblem,
    HcrbSolution,
    ReferenceBounds,
    hcrb_constraints,
    hcrb_pure,
    holevo_objective,
    paper_reference_bounds,
    qfim_pure,
    sld_crb,
)
from .config import DualHomodyneScheme, MeasurementSetting, ModelConfig, named_scheme
from .errors import (
    InfeasibleConstraints,
    InvalidState,
    ModelNotIdentifiable,
    ParametersNotIdentifiable,
    SchemeError,
    Su11BoundsError,
)
from .gaussian import (
    GaussianState,
    LinearGaussianOutcomeModel,
    PhaseSpaceEllipse,
    QuadratureConvention,
    SymplecticTransform,
    beam_splitter_5050,
    encode_displacements,
    homodyne_outcome_model,
    make_input_state,
    propagate_pipeline,
    two_mode_squeezer,
)
from .kernels import BACKEND
from .measurement import (
    BoundsRecord,
    EstimationResult,
    OutcomeBatch,
    bound_comparison,
    estimate_and_mse,
    fisher_information,
    sample_outcomes,
    scheme_fisher_information,
)
from .model import (
    OrthonormalFrame,
    PureModelGram,
    align_frame,
    gaussian_gram,
    orthonormalize,
    paper_frame,
    paper_gram,
)
from .oracle import hcrb_dual_bound, hcrb_oracle

__version__ = "0.1.0"
