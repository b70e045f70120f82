"""Approximate PSD factorizations X_ij ~ tr(A_i B_j) of nonnegative data
by alternating multiplicative updates with geometric-mean scaling."""

from .backend import backend_name, numba_enabled
from .errors import (
    DimMismatch,
    DivisionByZero,
    IterationFailure,
    NotPd,
    NotPsd,
    PsdfactError,
    Singular,
    ZeroData,
)
from .fileio import (
    FACTORS_MAGIC,
    HISTORY_HEADER,
    TENSOR_MAGIC,
    read_factors,
    read_matrix,
    read_tensor,
    write_factors,
    write_history,
    write_matrix,
    write_summary,
    write_tensor,
)
from .generate import (
    distance_exact_factors,
    distance_matrix,
    gen_distance,
    gen_planted,
    gen_planted_tensor,
)
from .rng import SplitMix64, random_pd, random_sym, substream_seed
from .measurement import (
    MeasurementMap,
    adjoint,
    apply,
    ata,
    domination_gap,
    mmu_scaler,
    trace_cs_gap,
)
from .solver import (
    FactorPair,
    RunHistory,
    SolverConfig,
    factorize,
    half_sweep_a,
    half_sweep_b,
    init_factors,
    kkt_residual,
    normalized_error,
    objective,
    subproblem_update,
)
from .structured import (
    BlockStructure,
    NmfFactors,
    blockwise_factorize,
    conforms,
    diagonal_mmu_update,
    lee_seung_step,
    pair_conforms,
)
from .symmat import (
    Psdness,
    SpectralDecomposition,
    classify_psd,
    eig_sym,
    geometric_mean,
    sym_inv,
    sym_sqrt,
)
from .tensor import (
    TensorFactors,
    init_tensor_factors,
    schur_map,
    tensor_eval,
    tensor_factorize,
    tensor_mode_update,
    tensor_normalized_error,
)

__version__ = "0.1.0"

__all__ = [
    "BlockStructure",
    "DimMismatch",
    "DivisionByZero",
    "FACTORS_MAGIC",
    "FactorPair",
    "HISTORY_HEADER",
    "IterationFailure",
    "MeasurementMap",
    "NmfFactors",
    "NotPd",
    "NotPsd",
    "Psdness",
    "PsdfactError",
    "RunHistory",
    "Singular",
    "SolverConfig",
    "SpectralDecomposition",
    "SplitMix64",
    "TENSOR_MAGIC",
    "TensorFactors",
    "ZeroData",
    "adjoint",
    "apply",
    "ata",
    "backend_name",
    "blockwise_factorize",
    "classify_psd",
    "conforms",
    "diagonal_mmu_update",
    "distance_exact_factors",
    "distance_matrix",
    "domination_gap",
    "eig_sym",
    "factorize",
    "gen_distance",
    "gen_planted",
    "gen_planted_tensor",
    "geometric_mean",
    "half_sweep_a",
    "half_sweep_b",
    "init_factors",
    "init_tensor_factors",
    "kkt_residual",
    "lee_seung_step",
    "mmu_scaler",
    "normalized_error",
    "numba_enabled",
    "objective",
    "pair_conforms",
    "random_pd",
    "random_sym",
    "read_factors",
    "read_matrix",
    "read_tensor",
    "schur_map",
    "substream_seed",
    "subproblem_update",
    "sym_inv",
    "sym_sqrt",
    "tensor_eval",
    "tensor_factorize",
    "tensor_mode_update",
    "tensor_normalized_error",
    "trace_cs_gap",
    "write_factors",
    "write_history",
    "write_matrix",
    "write_summary",
    "write_tensor",
]
