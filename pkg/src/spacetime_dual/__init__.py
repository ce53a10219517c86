"""Sequential-unitary / measurement-feedback circuit duality toolkit."""

from .pauli import PauliOperator
from .tableau import (MeasurementRecord, StabilizerState, ZeroProbabilityProjection,
                      stabilizer_groups_equal)
from .circuit import Circuit, Instruction, MalformedCircuit, conjugate_by_circuit
from .dense import (DeformedGhzSpec, DenseState, build_deformed_ghz, build_ghz_dense,
                    deformed_ghz_zz_oracle, disorder_string_oracle)
from .mps import MpsUnitaryDilation, canonicalize, dense_to_mps, dilate_mps, mps_to_dense
from .probes import (AveragedStrangeResult, EstimateResult, ProbeSpec,
                     StrangeProbeResult, averaged_strange_correlator,
                     run_disorder_probe, run_milro_probe, run_strange_probe)

__all__ = [
    "PauliOperator", "StabilizerState", "MeasurementRecord",
    "ZeroProbabilityProjection", "stabilizer_groups_equal",
    "Circuit", "Instruction", "MalformedCircuit", "conjugate_by_circuit",
    "DenseState", "DeformedGhzSpec", "build_deformed_ghz", "build_ghz_dense",
    "deformed_ghz_zz_oracle", "disorder_string_oracle",
    "MpsUnitaryDilation", "canonicalize", "dense_to_mps", "dilate_mps", "mps_to_dense",
    "ProbeSpec", "EstimateResult", "StrangeProbeResult", "AveragedStrangeResult",
    "run_disorder_probe", "run_milro_probe", "run_strange_probe",
    "averaged_strange_correlator",
]

__version__ = "0.1.0"
