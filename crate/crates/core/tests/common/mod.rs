#![allow(dead_code)]

use fsdlab::sampling::{self, LabRng};
use fsdlab::spectra::{HermitianMatrix, UnitVector};
use rand::Rng;

pub const COND_MAX: f64 = 1e6;

/// Strictly positive `A` of dimension 2..=16 with a random unit vector.
pub fn instance(rng: &mut LabRng) -> (HermitianMatrix, UnitVector) {
    let n = rng.random_range(2..=16);
    let a = sampling::random_positive(n, COND_MAX, rng);
    let x = sampling::random_unit_vector(n, rng);
    (a, x)
}

/// `|a - b| <= rel * max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// `a <= b` up to a relative slack.
pub fn leq(a: f64, b: f64, rel: f64) -> bool {
    a <= b + rel * a.abs().max(b.abs()).max(1.0)
}
