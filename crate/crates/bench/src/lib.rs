//! Shared fixtures for the criterion benchmarks.

use renvol_core::adapted::ValidatedSystem;
use renvol_core::cusp::CuspTruncation;
use renvol_core::tube::TubeSpec;

pub fn cusp_fixture() -> CuspTruncation {
    CuspTruncation::new((-6.0f64).exp(), (-2.0f64).exp()).unwrap()
}

pub fn tube_fixture() -> TubeSpec {
    TubeSpec::new(0.1, 0.5).unwrap()
}

pub fn system_fixture(seed: u64, n: usize) -> ValidatedSystem {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    renvol_core::acceptance::random_system(&mut rng, n)
}
