//! Random generation: Plancherel diagrams by RSK, Monte-Carlo linear
//! statistics and exact determinantal sampling on finite windows.
//!
//! Every sample draws from its own ChaCha stream keyed by `(seed, index)`,
//! so results do not depend on how samples are scheduled across threads.

mod clt;
mod dpp;
mod mc;
mod rsk;

pub use clt::{clt_predicted_variance, clt_report, clt_samples, CltMode, CltReport, CltSource};
pub use dpp::{dpp_window_sample, WindowDpp, MAX_DPP_WINDOW};
pub use mc::{
    corner_count, mc_linear_statistic, parallel_samples, plancherel_statistic_samples, McReport,
};
pub use rsk::{rsk_shape, sample_plancherel};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Base seed for per-sample generator streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// The generator for sample `index`: ChaCha8 keyed by the seed, with the
    /// sample index as stream id.
    pub fn stream(self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }
}

impl std::fmt::Display for RngSeed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}
