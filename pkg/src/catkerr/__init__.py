"""Cat-state engineering in a two-photon driven Kerr-nonlinear resonator."""

__version__ = "0.1.0"

from .fock import (  # noqa: F401
    DensityMatrix,
    PureState,
    QuantumOperator,
    annihilation,
    cat_state,
    coherent_state,
    creation,
    displacement,
    fock_state,
    identity,
    number_operator,
    parity_operator,
    tensor,
    tensor_states,
)
from .lindblad import (  # noqa: F401
    EvolutionProblem,
    Trajectory,
    evolve,
    liouvillian,
    steady_state,
)
from .model import (  # noqa: F401
    EigenAmplitude,
    ModelSpec,
    build_H0,
    build_Heff,
    build_Hn,
    build_Hx,
    build_Hz,
    build_Hzz,
    displaced_linear_residual,
    lossy_eigen_amplitude,
    project_to_logical,
)
from .observables import (  # noqa: F401
    WignerGrid,
    fidelity,
    mean_photon,
    parity_expectation,
    purity,
    wigner,
)
from .protocols import (  # noqa: F401
    DriveEnvelope,
    ProtocolReport,
    alpha_trajectory,
    analytic_init_dephasing,
    condition_sweep,
    counterdiabatic_envelope,
    exact_cd_term,
    run_adiabatic_init,
    run_gate_x,
    run_gate_z,
    run_gate_zz,
    run_stabilization,
    run_transitionless_init,
    select_cd_variant,
)
