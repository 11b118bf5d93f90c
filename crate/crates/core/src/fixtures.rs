//! Reference matrices: a 6x6 judgment of relative distances between cities
//! and three corrupted variants of it.

use crate::pcm::{ComparisonMatrix, Position};

/// Upper triangle of the city-distance matrix, row-major.
pub const CITIES_UPPER: [f64; 15] = [
    1.0 / 3.0,
    8.0,
    3.0,
    3.0,
    7.0,
    9.0,
    3.0,
    3.0,
    9.0,
    1.0 / 6.0,
    1.0 / 5.0,
    2.0,
    1.0 / 3.0,
    6.0,
    6.0,
];

pub fn cities() -> ComparisonMatrix {
    ComparisonMatrix::from_upper(6, &CITIES_UPPER).expect("valid reference matrix")
}

fn with_13(value: f64) -> ComparisonMatrix {
    cities()
        .with_entry(Position::new(0, 2), value)
        .expect("valid reference matrix")
}

/// `a_12` and `a_21` exchanged.
pub fn a1() -> ComparisonMatrix {
    cities()
        .with_entry(Position::new(0, 1), 3.0)
        .expect("valid reference matrix")
}

/// `a_13` and `a_31` exchanged.
pub fn a2() -> ComparisonMatrix {
    with_13(1.0 / 8.0)
}

/// `a_13` set to 2.
pub fn a3() -> ComparisonMatrix {
    with_13(2.0)
}
