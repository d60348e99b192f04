//! Low-complexity GFDM transceiver.
//!
//! The dense path builds the modulation matrix `A` and the equalizer
//! matrices explicitly and serves as the oracle. The fast path never forms a
//! matrix: modulation and every linear equalizer reduce to blockwise FFTs,
//! a perfect shuffle and one diagonal.

pub mod channel;
pub mod config;
pub mod dense;
pub mod error;
pub mod fast;
pub mod fec;
pub mod flops;
pub mod iq;
pub mod kv;
pub mod modmatrix;
pub mod params;
pub mod permute;
pub mod pulse;
pub mod qam;
pub mod receiver;
pub mod sim;
pub mod spectral;
pub mod transmitter;
mod transform;

pub use dense::{CMatrix, DEFAULT_ORACLE_CAP};
pub use error::{GfdmError, Result};
pub use fast::FastGfdm;
pub use modmatrix::{build_modmatrix_direct, build_modmatrix_factored, ModulationMatrix};
pub use params::GfdmParams;
pub use permute::{permute_forward, permute_inverse};
pub use pulse::{build_prototype_pulse, PrototypeFilter, PulseSpec};
pub use spectral::{spectral_diag_lambda, spectral_diag_lambda_bar, SpectralDiagonal};
pub use transmitter::{add_cp, modulate_direct, modulate_fast, BasebandSignal};
pub use channel::{
    apply_channel, channel_freq_coeffs, draw_channel, remove_cp, ChannelProfile, ChannelRealization,
};
pub use receiver::{
    bias_scalar, build_deq, build_equalizer_direct, condition_number, equalize_fast, fde_equalize,
    EqualizerFactors, EqualizerKind, FdeKind,
};
pub use config::{ChannelSpec, ExecPath, SimConfig, SnrUnit};
pub use fec::{conv_encode, viterbi_decode, CodeMetrics, CodeSpec};
pub use flops::{complexity_report, fft_flops, scheme_flops, ChannelCase, FlopExtras, Scheme};
pub use qam::{qam_demap, qam_map};
pub use sim::{ofdm_baseline, run_ber_sweep, run_condition_sweep, BerRecord};
