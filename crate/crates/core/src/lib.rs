//! Factorial-moment analysis of binned event sequences.
//!
//! The crate works on two kinds of input: sequences of return signs derived
//! from a price series, and integer multiplicities (counts of "particles" per
//! cell). Both are cut into windows that are subdivided into bins, and the
//! normalized factorial moments
//!
//! ```text
//! F_q = <n(n-1)...(n-q+1)> / <n>^q
//! ```
//!
//! are measured as a function of the bin count. Alongside the moments live the
//! generating-function and cumulant identities, the power-law scaling fit that
//! turns moment growth into a multifractal dimension, and the run-length (gap)
//! statistics whose exponential fall follows from `G(-1) = p_0`.
//!
//! Modules:
//! - [`moments`]: multiplicity distributions, `G(z)`, `F_q`, `K_q`, binned estimators
//! - [`intermittency`]: bin scans, log-log scaling fits, `D_q` prediction
//! - [`gaps`]: run extraction, gap histograms, exponential fits
//! - [`ingest`]: price CSV loading, resampling, signs, segmentation
//! - [`synth`]: seeded generators for null and intermittent processes

pub mod error;
pub mod gaps;
pub mod ingest;
pub mod intermittency;
pub mod moments;
pub mod numeric;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use gaps::{ExponentialFit, FitMethod, GapHistogram, RunScan, SamplingReport};
pub use ingest::{CsvConfig, HeaderMode, PriceSeries, SegmentationConfig, SignSeries};
pub use intermittency::{CouplingParams, ScalingFit, ScalingPoint};
pub use moments::{BinnedMoment, CumulantSet, EventWindow, MomentSet, MultiplicityDistribution};
pub use numeric::Estimate;
pub use synth::{Cascade, GeneratorKind, GeneratorSpec};

use std::fmt;
use std::str::FromStr;

/// Return sign channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sign::Pos => "pos",
            Sign::Neg => "neg",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pos" | "+" => Ok(Sign::Pos),
            "neg" | "-" => Ok(Sign::Neg),
            other => Err(Error::InvalidParameter(format!("unknown sign `{other}`"))),
        }
    }
}
