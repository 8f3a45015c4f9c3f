//! Shared fixtures for the criterion benches.

pub use rtflab_core;

use rtflab_core::{LevelIdeal, QuadraticCharacterProfile};

/// Levels with growing numbers of rho assignments.
pub fn levels() -> Vec<(u64, LevelIdeal)> {
    [1u64, 72, 8 * 9 * 49, 144_144]
        .into_iter()
        .map(|n| (n, LevelIdeal::from_integer(n).expect("positive level")))
        .collect()
}

pub fn chi5() -> QuadraticCharacterProfile {
    let chi = rtflab_core::characters::quadratic_character(5).expect("fundamental discriminant");
    QuadraticCharacterProfile::from_dirichlet(chi).expect("even character")
}
