//! Noise, mollifiers, counterterms and enhanced data.

mod enhance;
mod mollifier;
mod noise;
mod renorm;
pub mod seed;
mod synth;
mod wick;

pub use enhance::{
    enhance_csbe, enhance_gpam, enhance_gsbe, inverse_neg_laplacian, CsbeEnhancement, GpamEnhancement, GsbeEnhancement,
    NoiseInfo,
};
pub use mollifier::{mollify, mollify_time, Mollifier};
pub use noise::{sample_spacetime_white_noise, sample_white_noise, white_noise_from};
pub use renorm::{renormalization_constant, RenormKind};
pub use seed::{derive_seed, rng_from_seed, splitmix64};
pub use synth::{band_limited, synthesize_gaussian, synthesize_lacunary};
pub use wick::{steps_for, wick_data, wick_data_from, Phi42Noise, WickData, OU_MASS};
