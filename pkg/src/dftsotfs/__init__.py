"""Uplink multi-user DFT-spread OTFS: transmit chain, pulse shaping, PAPR
bounds and Monte Carlo CCDF, doubly dispersive channel, and MMSE receiver."""

__version__ = "0.1.0"

from .channel import (
    ChannelRealization,
    ChannelTap,
    apply_ltv_channel,
    eva_profile,
    identity_channel,
    load_profile,
    sample_channel,
    sample_eva_channel,
)
from .config import ConfigError, ExperimentConfig, load_config, parse_config_text, validate
from .grids import BLOCK, INTERLEAVED, AllocationPlan, GridConfig, UserFrame, random_user_frame
from .papr import (
    BoundQuery,
    CcdfCurve,
    ccdf_estimate,
    k_sweep,
    mean_frame_power,
    papr_db,
    papr_upper_bound,
    rolloff_sweep,
    simulate_papr_frames,
)
from .pulses import (
    RECT,
    RRC,
    PulseSpec,
    Waveform,
    eval_pulse,
    g0_analytic,
    g0_argmax,
    g0_numeric,
    pulse_taps,
    rrc_freq_response,
    rrc_time,
    shape_waveform,
)
from .qam import QamConstellation, make_constellation, max_symbol_power, qam_demodulate, qam_modulate
from .receiver import (
    BerResult,
    EffectiveChannel,
    NumericalError,
    ber_simulate,
    build_effective_channel,
    despread_and_detect,
    mmse_equalize,
    receive_frontend,
    tx_waveform,
)
from .transmitter import (
    DelayTimeFrame,
    SerialFrame,
    deserialize,
    dft_spread,
    idft_doppler,
    interleaved_fast_path,
    map_dodma,
    modulate_user,
    serialize_with_cp,
)
