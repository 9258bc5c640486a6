//! Transmit precoders and receive combiners.

mod bd_mrc;
mod imperfect;
mod msv;
mod zf;

pub use bd_mrc::{
    bd_mrc, bd_mrc_sinr, projection, PrecoderSolution, ProjectionMatrix, UserPrecoder,
};
pub use imperfect::{zf_imperfect_csir_sinr, zf_imperfect_csit};
pub use msv::{msv_beamformers, msv_high_snr_gain_limit, msv_rates, MsvSolution};
pub use zf::{zf, zf_gains, ZfSolution};
