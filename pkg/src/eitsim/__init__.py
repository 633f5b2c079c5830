"""EIT quantum-memory storage modelled as a lossy quantum channel.

Submodules
----------
polariton
    Dark-state-polariton attenuation factor, storage efficiency and the
    momentum-space ODE used to cross-check it.
fockspace
    Small dense multimode Fock-space algebra (oracle layer).
memorychannel
    Store/retrieve channel on single-rail logical registers and fidelities.
bell
    Clauser-Horne test of the retrieved path-entangled photon.
cli
    ``eitsim`` command-line front end.

Rates are in units of ``GAMMA_780`` and times in ``1 / GAMMA_780`` unless a
function says otherwise.
"""

from ._backend import BACKEND
from .bell import (
    CHResult,
    DisplacementSetting,
    ch_closed_form,
    ch_from_probs,
    critical_threshold,
    minimize_ch,
    no_count_probs,
)
from .errors import (
    BracketError,
    DimensionError,
    EitsimError,
    IntegrationError,
    InvalidStateError,
    QuadratureError,
    ScheduleError,
    SingularityError,
    UnphysicalParameterError,
)
from .fockspace import (
    FockSpace,
    SpectralProfile,
    TruncatedFockRegister,
    coherent_overlap,
    fock_inner,
    make_single_photon,
    number_expectation,
    vacuum_projector_expansion_check,
)
from .memorychannel import (
    LogicalDensityMatrix,
    bell_state_retrieved,
    fidelity,
    relabel_encoding,
    store_retrieve_nqubit,
    store_retrieve_qubit,
)
from .polariton import (
    GAMMA_780,
    AttenuationFactor,
    CouplingSchedule,
    MemoryParams,
    Segment,
    attenuation_factor,
    closed_form_attenuation,
    dsp_evolve_numeric,
    g1,
    g2,
    mixing_angle,
    storage_efficiency,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "GAMMA_780",
    "AttenuationFactor",
    "BracketError",
    "CHResult",
    "CouplingSchedule",
    "DimensionError",
    "DisplacementSetting",
    "EitsimError",
    "FockSpace",
    "IntegrationError",
    "InvalidStateError",
    "LogicalDensityMatrix",
    "MemoryParams",
    "QuadratureError",
    "ScheduleError",
    "Segment",
    "SingularityError",
    "SpectralProfile",
    "TruncatedFockRegister",
    "UnphysicalParameterError",
    "attenuation_factor",
    "bell_state_retrieved",
    "ch_closed_form",
    "ch_from_probs",
    "closed_form_attenuation",
    "coherent_overlap",
    "critical_threshold",
    "dsp_evolve_numeric",
    "fidelity",
    "fock_inner",
    "g1",
    "g2",
    "make_single_photon",
    "minimize_ch",
    "mixing_angle",
    "no_count_probs",
    "number_expectation",
    "relabel_encoding",
    "storage_efficiency",
    "store_retrieve_nqubit",
    "store_retrieve_qubit",
    "vacuum_projector_expansion_check",
    "__version__",
]
