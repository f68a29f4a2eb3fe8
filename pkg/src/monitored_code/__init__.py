"""Entanglement in monitored Clifford circuits through a dual classical code.

A measurement schedule (the time-evolved Paulis P_1..P_tau) defines a
classical linear code over GF(2).  Null counts of that code give every
entropy of the post-measurement state, its stabilizer and logical groups,
and the decoders used to distill EPR pairs.
"""

from .pauli_core import (
    DimensionError,
    Gf2RowSpace,
    PauliString,
    SignVector,
    SubsystemMask,
    commutes,
    kernel_basis,
    membership,
    multiply,
    rank,
    solve,
    symplectic_product,
)
from .schedule import MeasurementSchedule, ScheduleParseError, dumps, loads, read_schedule, write_schedule
from .tableau import PauliTable, StabilizerTableau, enumerate_branches
from .dual_code import (
    CleaningReport,
    DualCode,
    EntropyCalculator,
    EntropyReport,
    ExtendedDualCode,
    cleaning_report,
    code_distance_contiguous,
    entropy_suite,
)
from .groups import PauliGroupGens, build_logical, build_stabilizer, commutant, logical_qubit_count
from .distillation import distill_AB, distill_AB_average, distill_gullans_huse, distill_system_reference
from .experiments import CircuitSpec, gen_random_monitored_circuit, sweep_measurement_rate

__version__ = "0.1.0"
