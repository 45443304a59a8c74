use fsdlab::fsdet::delta;
use fsdlab::levi::{
    fsd, fsd_certificate, l2_log_state, levi_fd, midpoint_grid, sample_family, Region, TestFunction, CATALOG_IDS,
};
use fsdlab::sampling::{self, seeded};
use fsdlab::spectra::{eigh, is_psd, CVector, HermitianMatrix};

fn point(n: usize, radius: f64, rng: &mut fsdlab::sampling::LabRng) -> CVector {
    sampling::random_ball_point(&CVector::zeros(n), radius, rng)
}

#[test]
fn analytic_levi_matches_finite_differences() {
    let mut rng = seeded(301);
    for id in CATALOG_IDS {
        for n in 2..=8 {
            let f = TestFunction::from_id(id, n).unwrap();
            for _ in 0..20 {
                let z = point(n, 1.5, &mut rng);
                let exact = f.levi_analytic(&z).unwrap();
                let approx = levi_fd(&f, &z, 1e-4).unwrap();
                let err = approx.sub(&exact).unwrap().spectral_norm() / exact.spectral_norm().max(1.0);
                assert!(err <= 1e-5, "{id} n = {n}: {err:e}");
            }
        }
    }
}

#[test]
fn analytic_levi_is_psd() {
    let mut rng = seeded(302);
    for id in CATALOG_IDS {
        let f = TestFunction::from_id(id, 6).unwrap();
        for _ in 0..100 {
            let z = point(6, 2.0, &mut rng);
            let l = f.levi_analytic(&z).unwrap();
            assert!(is_psd(&l, l.scale_hint()).unwrap().holds, "{id}");
        }
    }
}

#[test]
fn phi_factory_cauchy_schwarz_and_majorant() {
    let mut rng = seeded(303);
    let f = TestFunction::from_id("phi-log", 8).unwrap();
    let cg = f.majorant_constant().unwrap();
    assert!(cg > 0.0);
    for _ in 0..200 {
        let z = point(8, 2.0, &mut rng);
        let h = sampling::complex_gaussian_vector(8, &mut rng);
        let l = f.levi_analytic(&z).unwrap();
        let bound = f.phi_lower_bound(&z, &h).unwrap().expect("log profile is concave");
        assert!(l.quad_form(&h) >= bound - 1e-12 * h.norm_squared());
        assert!(f.majorant_margin(&z).unwrap().unwrap() >= -1e-12);
    }
}

#[test]
fn fsd_is_the_sampled_determinant_infimum() {
    let mut rng = seeded(304);
    for id in CATALOG_IDS {
        let f = TestFunction::from_id(id, 5).unwrap();
        for _ in 0..10 {
            let z = point(5, 1.5, &mut rng);
            let cert = fsd_certificate(&f, &z, 200, &mut rng).unwrap();
            assert!(cert.consistent(1e-8), "{id}: {} vs {}", cert.fsd, cert.sampled_inf);
            assert_eq!(cert.fsd, fsd(&f, &z).unwrap());
            assert_eq!(cert.caveat.is_some(), f.truncation_caveat().is_some());
        }
    }
}

#[test]
fn harmonic_truncations_have_fsd_one_over_n() {
    for n in [4, 8, 16] {
        let f = TestFunction::harmonic(n).unwrap();
        let z = CVector::zeros(n);
        assert!((fsd(&f, &z).unwrap() - 1.0 / n as f64).abs() < 1e-12);
        assert!(f.truncation_caveat().is_some());
    }
}

#[test]
fn sampled_families_are_psd_and_sized() {
    for id in CATALOG_IDS {
        let f = TestFunction::from_id(id, 4).unwrap();
        let fam = sample_family(&f, &Region::centered(4, 1.0).with_counts(8, 32)).unwrap();
        assert_eq!(fam.len(), 40);
        for l in fam.matrices() {
            assert_eq!(l.dim(), 4);
            assert!(eigh(l).unwrap().min() >= -1e-9 * l.scale_hint());
        }
    }
}

#[test]
fn l2_state_determinant_decreases_with_resolution() {
    let vals: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| delta(&HermitianMatrix::diag(&midpoint_grid(n)), &l2_log_state(n).unwrap()).unwrap())
        .collect();
    assert!(vals[0] > vals[1] && vals[1] > vals[2] && vals[2] > 0.0, "{vals:?}");
}
