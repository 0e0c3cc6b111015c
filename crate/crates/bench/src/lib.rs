//! Fixed inputs shared by the benchmarks.

use paley_km::randmat::{principal_submatrix, sample_subset, SubsampleSpec};
pub use paley_km::{paley_conference, ConferenceMatrix, PrincipalSubmatrix};

pub const SEED: u64 = 0x5eed;

/// One seeded principal submatrix of the Paley matrix for `q`.
pub fn sampled_submatrix(s: &ConferenceMatrix, p: f64) -> PrincipalSubmatrix {
    let spec = SubsampleSpec::new(p, SEED, 0).expect("valid probability");
    let subset = sample_subset(s.order(), &spec).expect("non-empty order");
    principal_submatrix(s, &subset).expect("indices in range")
}
