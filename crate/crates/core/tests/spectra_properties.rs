use fsdlab::sampling::{self, seeded};
use fsdlab::spectra::{eigh, fun_calc, geometric_mean, hadamard, is_psd, op_norm, CMatrix, FunctionTag, HermitianMatrix};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn eigh_reconstructs_with_orthonormal_vectors() {
    let mut rng = seeded(401);
    for _ in 0..200 {
        let n = rng.random_range(2..=32);
        let a = sampling::random_hermitian(n, 1.0, &mut rng);
        let d = eigh(&a).unwrap();
        let scale = a.spectral_norm().max(1.0);
        assert!(op_norm(&(d.reconstruct().as_matrix() - a.as_matrix())) <= 1e-10 * scale);
        let v = &d.eigenvectors;
        assert!(op_norm(&(v.adjoint() * v - CMatrix::identity(n, n))) <= 1e-10);
        assert!(d.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn power_and_log_round_trips() {
    let mut rng = seeded(402);
    for _ in 0..200 {
        let n = rng.random_range(2..=16);
        let a = sampling::random_positive(n, 1e4, &mut rng);
        let scale = a.spectral_norm();
        for p in [2.0, 0.5, -1.0] {
            let back = fun_calc(&fun_calc(&a, FunctionTag::Power(p)).unwrap(), FunctionTag::Power(1.0 / p)).unwrap();
            assert!(back.sub(&a).unwrap().spectral_norm() <= 1e-8 * scale, "p = {p}");
        }
        let back = fun_calc(&fun_calc(&a, FunctionTag::Log).unwrap(), FunctionTag::Exp).unwrap();
        assert!(back.sub(&a).unwrap().spectral_norm() <= 1e-8 * scale);
    }
}

#[test]
fn schur_products_stay_psd() {
    let mut rng = seeded(403);
    for _ in 0..200 {
        let n = rng.random_range(2..=12);
        let a = sampling::random_psd(n, rng.random_range(1..=n), 1.0, &mut rng);
        let b = sampling::random_psd(n, rng.random_range(1..=n), 1.0, &mut rng);
        let h = hadamard(&a, &b).unwrap();
        assert!(is_psd(&h, a.scale_hint().max(b.scale_hint())).unwrap().holds);
    }
}

#[test]
fn weighted_geometric_mean_is_symmetric() {
    let mut rng = seeded(404);
    for _ in 0..100 {
        let n = rng.random_range(2..=10);
        let a = sampling::random_positive(n, 1e3, &mut rng);
        let b = sampling::random_positive(n, 1e3, &mut rng);
        let alpha = sampling::uniform(0.0, 1.0, &mut rng);
        let g1 = geometric_mean(&a, &b, alpha).unwrap();
        let g2 = geometric_mean(&b, &a, 1.0 - alpha).unwrap();
        let scale = g1.spectral_norm().max(1.0);
        assert!(g1.sub(&g2).unwrap().spectral_norm() <= 1e-8 * scale);
    }
}

proptest! {
    #[test]
    fn symmetrize_is_idempotent(entries in prop::collection::vec(-5.0f64..5.0, 9)) {
        let m = nalgebra::DMatrix::from_vec(3, 3, entries);
        let h = HermitianMatrix::from_real(&m + m.transpose()).unwrap();
        let again = HermitianMatrix::symmetrize(h.as_matrix().clone()).unwrap();
        prop_assert_eq!(again, h);
    }
}
