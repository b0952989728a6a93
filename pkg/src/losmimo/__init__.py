"""Monte-Carlo link simulator for LOS MIMO spatial multiplexing under oscillator phase noise.

Building blocks: deterministic random streams (numerics), LOS/Rician channels
(channel), Wiener and mask-shaped stationary oscillators (phasenoise), Gray
constellations and framing (modem), LS/ZF receive chain with decision-directed
phase tracking (receiver), error metrics (metrics), and a scenario/sweep/CSV
harness with figure presets and an acceptance suite.
"""

from .channel import ChannelMatrix, UlaGeometry, los_dft, optimal_spacing, rician_mix, sample_nlos, ula_channel
from .harness import (
    CSV_COLUMNS,
    PsdReport,
    Scenario,
    SweepRow,
    parse_scenario,
    parse_scenario_file,
    psd_check,
    run_scenario,
    run_sweep,
    scenario_to_text,
    validate_scenario,
    write_rows,
)
from .metrics import (
    TrialResult,
    evm,
    frame_evm,
    merge,
    noise_variance,
    rel_improvement,
    ser,
    ser_qam_awgn,
)
from .modem import Constellation, Frame, build_frame, make_constellation, modulate, nearest_point
from .numerics import (
    HadamardConstructionError,
    RandomSource,
    RankDeficiencyError,
    dft_matrix,
    hadamard,
    pinv,
    sample_cgauss,
)
from .phasenoise import (
    BUILTIN_MASKS,
    OscillatorTopology,
    StationaryModel,
    WienerModel,
    beta_from_sigma2,
    builtin_mask,
    design_mask_filter,
    load_mask,
    lorentzian_level,
    mask_level_db,
    oscillator_bank,
    resolve_mask,
    save_mask,
    sigma2_from_beta,
    stationary_path,
    wiener_path,
)
from .receiver import (
    CSI_MODES,
    PnTracker,
    RxConfig,
    estimate_channel,
    run_frame,
    simulate_trial,
    track_and_compensate,
    zf_equalize,
)

__version__ = "0.1.0"
