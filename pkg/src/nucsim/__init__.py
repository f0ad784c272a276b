"""State-vector simulation of deep projection-filter circuits.

The package covers the full workflow: OpenQASM 2.0 circuits in and out,
gate fusion, assertion-based mid-circuit measurement, Jordan-Wigner mapped
nuclear Hamiltonians, projection-filter circuit generation with analytic
success predictors, and a dense linear-combination-of-unitaries reference
for the cosine filter.
"""

from .circuit import Circuit, Instruction
from .engine import (
    EPS_MMA,
    RunReport,
    StateVector,
    apply_1q,
    apply_2q,
    apply_dense,
    assert_measure,
    bitstring,
    expectation_pauli,
    infer_ancilla,
    measure_project,
    run,
    sample,
    success_product,
)
from .errors import (
    DegenerateSpectrumError,
    FilterAssertionError,
    MmaStructureError,
    NucsimError,
    ProjectionError,
    QasmError,
    ResourceLimitError,
    SpectrumGuardError,
)
from .fusion import (
    FusionStats,
    PassStats,
    absorb_1q,
    fuse_2q,
    fuse_pipeline,
    gate_count,
    merge_1q,
    normalize_2q_order,
)
from .gates import Gate, gate_matrix
from .hamiltonian import (
    GroundState,
    PauliHamiltonian,
    SecondQuantizedInput,
    apply_pauli_string,
    build_hamiltonian,
    format_pauli_text,
    ground_state,
    jacobi_eigh,
    jw_annihilation,
    jw_creation,
    load_hamiltonian_text,
    parse_pauli_text,
    parse_second_quantized_text,
    shift_rescale,
)
from .lcu import LcuExpansion, apply_cos_filter, lcu_coefficients, lcu_reference, lcu_success_probability
from .projection import (
    FilterSchedule,
    TrialState,
    build_filter_circuit,
    default_schedule,
    filter_generator_dense,
    phase_penalty,
    predict_success,
    predicted_amplitude,
    rodeo_probability,
)
from .qasm import decompose_c2, emit_qasm, parse_qasm

__version__ = "0.1.0"
