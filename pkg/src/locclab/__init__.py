"""Two-agent LOCC protocol laboratory.

A dense-linear-algebra simulator for experiments two separated agents can
run over a shared pair of boundary qubits: quantum instruments and their
coarse-grainings, CHSH experiments against the quantum bound, worlds that
deliver the pair either by direct identification or through explicit
environment channel qubits, and exact transcript-distribution comparisons
between the two.
"""

from .bell import (
    CHSHConfig,
    CHSHResult,
    DecoherenceEstimate,
    MeasurementSetting,
    OPTIMAL_ANGLES,
    TSIRELSON_BOUND,
    chsh_transcript,
    estimate_decoherence,
    estimate_from_transcript,
    exact_chsh,
    exact_correlation,
    format_transcript,
    observable_at,
    sample_chsh,
)
from .distinguish import (
    EprParams,
    NoSignalingReport,
    OutcomeDistribution,
    SweepRow,
    accessible_distribution,
    channel_size_check,
    frame_misalignment_demo,
    indistinguishability_sweep,
    no_signaling_check,
    sweep_columnar,
    sweep_structured,
    total_variation,
)
from .errors import (
    CapacityError,
    ConfigError,
    ContractError,
    EmptyCellError,
    LayoutError,
    LocalityViolationError,
)
from .instruments import (
    CoarseGrainingPartition,
    InstrumentBranch,
    InstrumentOutcomeRecord,
    QuantumInstrument,
    ValidationReport,
    apply_instrument,
    coarse_grain,
    depolarizing_kraus,
    identity_instrument,
    load_instrument,
    measure_angle,
    measure_x,
    measure_z,
    one_way_local_instrument,
    parse_instrument,
    save_instrument,
    serialize_instrument,
    settings_choice_instrument,
    unsharp_z,
    validate_instrument,
)
from .linalg import (
    DensityMatrix,
    HermitianOperator,
    PureState,
    SubsystemLayout,
    Tolerances,
    embed_operator,
    evolve,
    expectation,
    partial_trace,
    purity,
    qubits,
    tensor_product,
    trace_distance,
)
from .protocols import (
    ProtocolRound,
    ProtocolScript,
    bundled_corpus,
    bundled_script_names,
    canonical_chsh_script,
    classify_locc_depth,
    load_bundled_script,
    load_script,
)
from .worlds import (
    BoundaryPair,
    HamiltonianDecomposition,
    World,
    build_epr_world,
    build_er_world,
    channel_purity_profile,
    deliver_pair,
    singlet_density,
)

__version__ = "0.1.0"
