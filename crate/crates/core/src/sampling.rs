//! Seeded random instances: unit vectors, Hermitian and positive matrices,
//! unitaries and ball/sphere points.
//!
//! All generators draw from a caller-supplied RNG so that every suite is
//! reproducible from a single `u64` seed.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::spectra::{c, CMatrix, CVector, HermitianMatrix, UnitVector, C64};

pub type LabRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for sub-task `index` of a seeded run.
pub fn substream(seed: u64, index: u64) -> LabRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard complex Gaussian entry (real and imaginary parts N(0, 1/2)).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    C64::new(s * normal(rng), s * normal(rng))
}

pub fn complex_gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    CVector::from_fn(n, |_, _| complex_normal(rng))
}

/// Uniform point on the complex unit sphere (normalized complex Gaussian).
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitVector {
    loop {
        if let Ok(u) = UnitVector::normalized(complex_gaussian_vector(n, rng)) {
            return u;
        }
    }
}

/// Uniform point of the ball `B(center, radius)` in `C^n`.
pub fn random_ball_point<R: Rng + ?Sized>(center: &CVector, radius: f64, rng: &mut R) -> CVector {
    let n = center.len();
    let dir = random_unit_vector(n, rng);
    let u: f64 = rng.random();
    // real dimension 2n
    let r = radius * u.powf(1.0 / (2.0 * n as f64));
    center + dir.as_vector() * c(r)
}

pub fn random_sphere_point<R: Rng + ?Sized>(center: &CVector, radius: f64, rng: &mut R) -> CVector {
    let dir = random_unit_vector(center.len(), rng);
    center + dir.as_vector() * c(radius)
}

/// GUE-type Hermitian matrix with entries of size about `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> HermitianMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    HermitianMatrix::symmetrize(g * c(scale)).expect("square")
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / c(d.norm()) } else { c(1.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `G G*` with `G` an `n x rank` Gaussian matrix, scaled by `scale / rank`.
pub fn random_psd<R: Rng + ?Sized>(n: usize, rank: usize, scale: f64, rng: &mut R) -> HermitianMatrix {
    let rank = rank.max(1);
    let g = CMatrix::from_fn(n, rank, |_, _| complex_normal(rng));
    HermitianMatrix::symmetrize(&g * g.adjoint() * c(scale / rank as f64)).expect("square")
}

/// Log-uniform spectrum in `[s, s * kappa]` with `kappa <= cond_max`.
pub fn random_spectrum<R: Rng + ?Sized>(n: usize, cond_max: f64, rng: &mut R) -> Vec<f64> {
    let cond_max = cond_max.max(1.0);
    let log_kappa = rng.random::<f64>() * cond_max.ln();
    let log_scale = (rng.random::<f64>() - 0.5) * 2.0 * 10f64.ln();
    (0..n)
        .map(|_| (log_scale + rng.random::<f64>() * log_kappa).exp())
        .collect()
}

/// Strictly positive matrix `U diag(lambda) U*` with condition number at most `cond_max`.
pub fn random_positive<R: Rng + ?Sized>(n: usize, cond_max: f64, rng: &mut R) -> HermitianMatrix {
    let spectrum = random_spectrum(n, cond_max, rng);
    let u = random_unitary(n, rng);
    HermitianMatrix::diag(&spectrum).conjugate_by(&u).expect("dims agree")
}

/// Strictly positive diagonal matrix with condition number at most `cond_max`.
pub fn random_positive_diagonal<R: Rng + ?Sized>(n: usize, cond_max: f64, rng: &mut R) -> HermitianMatrix {
    HermitianMatrix::diag(&random_spectrum(n, cond_max, rng))
}

/// Real Gaussian matrix, handy for polynomial coefficients and the like.
pub fn real_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| normal(rng))
}

pub fn uniform<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{eigh, op_norm};

    #[test]
    fn unitary_is_unitary() {
        let mut rng = seeded(1);
        for n in [1usize, 2, 5, 12] {
            let u = random_unitary(n, &mut rng);
            let e = &u * u.adjoint() - CMatrix::identity(n, n);
            assert!(op_norm(&e) < 1e-12);
        }
    }

    #[test]
    fn positive_respects_condition_cap() {
        let mut rng = seeded(2);
        for _ in 0..50 {
            let a = random_positive(6, 1e6, &mut rng);
            let d = eigh(&a).unwrap();
            assert!(d.min() > 0.0);
            assert!(d.max() / d.min() <= 1e6 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn ball_points_inside() {
        let mut rng = seeded(3);
        let center = CVector::from_element(4, c(1.0));
        for _ in 0..200 {
            let p = random_ball_point(&center, 0.5, &mut rng);
            assert!((p - &center).norm() <= 0.5 + 1e-15);
            let s = random_sphere_point(&center, 0.5, &mut rng);
            assert!(((s - &center).norm() - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn seeded_streams_replay() {
        let a: Vec<f64> = (0..5).map(|_| seeded(9).random()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut s1 = substream(9, 1);
        let mut s2 = substream(9, 2);
        assert_ne!(s1.random::<u64>(), s2.random::<u64>());
    }
}
