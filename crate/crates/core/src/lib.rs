//! Paley conference matrices, random principal submatrices and the
//! Kesten–McKay law, with the partition combinatorics that connect them.

pub mod comb;
pub mod conference;
pub mod error;
pub mod km;
pub mod linalg;
pub mod quad;
pub mod randmat;
pub mod verify;

pub use comb::{InclusionExclusion, MarkedDyckWord, NormalizedSum, SetPartition};
pub use conference::{etf_synthesis, gram_factor, is_conference, paley_conference, ConferenceMatrix, GramFactor};
pub use error::{Error, Result};
pub use km::KMDistribution;
pub use randmat::{HistogramData, PrincipalSubmatrix, Spectrum, SubsampleSpec};
