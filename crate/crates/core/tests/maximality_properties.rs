use fsdlab::levi::{moving_a_max, sample_family, LeviFamily, Region, TestFunction};
use fsdlab::maximality::{
    common_range_check, comparison_check, fsd_necessary_check, null_certificate, AveragingSets, ComparisonKind,
    ComparisonScenario, ComparisonStatus, NecessaryOutcome, Strategy,
};
use fsdlab::orders::specht;
use fsdlab::sampling::{self, seeded};
use fsdlab::spectra::{eigh, CMatrix, CVector, HermitianMatrix, UnitVector};
use rand::Rng;

#[test]
fn averaging_certificates_respect_closed_forms() {
    for (radius, seed) in [(1.0, 1), (2.0, 2)] {
        let f = TestFunction::quartic(32).unwrap();
        let fam = sample_family(&f, &Region::centered(32, radius).with_counts(64, 256).with_seed(seed)).unwrap();
        let cert = null_certificate(&fam, Strategy::AveragingSets(AveragingSets::Prefix), 32).unwrap();
        assert!(cert.replay_error(&fam) <= 1e-10);
        for (k, v) in cert.sup_values.iter().enumerate() {
            assert!(*v <= 4.0 * radius * radius / (k + 1) as f64 + 1e-10);
        }
    }
    let f = TestFunction::moving_rank(32).unwrap();
    let fam = sample_family(&f, &Region::centered(32, 3.0).with_counts(64, 256)).unwrap();
    let cert = null_certificate(&fam, Strategy::AveragingSets(AveragingSets::Prefix), 32).unwrap();
    let ma = moving_a_max();
    for (k, v) in cert.sup_values.iter().enumerate() {
        assert!(*v <= ma * 9.0 / (k + 1) as f64 + 1e-10);
    }
}

fn random_family(n: usize, rng: &mut fsdlab::sampling::LabRng) -> LeviFamily {
    let count = rng.random_range(1..=6);
    let mats = (0..count)
        .map(|_| {
            if rng.random::<f64>() < 0.3 {
                let mut l = sampling::random_psd(n, 1, 1.0, rng);
                if rng.random() {
                    l = l.shift(sampling::uniform(0.0, 0.5, rng));
                }
                l
            } else {
                sampling::random_positive(n, 1e3, rng)
            }
        })
        .collect();
    LeviFamily::from_matrices("random", mats).unwrap()
}

#[test]
fn necessary_check_excludes_exactly_on_positive_fsd() {
    let mut rng = seeded(501);
    let tol = 1e-9;
    for _ in 0..200 {
        let n = rng.random_range(2..=8);
        let fam = random_family(n, &mut rng);
        let rep = fsd_necessary_check(&fam, tol).unwrap();
        let any_positive = fam.matrices().any(|l| eigh(l).unwrap().min() > tol);
        assert_eq!(rep.excluded(), any_positive);
        assert_eq!(rep.outcome == NecessaryOutcome::Excluded, any_positive);
    }
    let null = LeviFamily::from_matrices("null", vec![HermitianMatrix::diag(&[0.0, 1.0]); 3]).unwrap();
    assert_eq!(fsd_necessary_check(&null, tol).unwrap().outcome, NecessaryOutcome::NotExcluded);
}

#[test]
fn common_range_yields_fixed_null_vectors() {
    let mut rng = seeded(502);
    for _ in 0..100 {
        let n = rng.random_range(3..=8);
        let k = rng.random_range(1..n);
        let u = sampling::random_unitary(n, &mut rng);
        let e: Vec<CVector> = (0..k).map(|j| u.column(j).into_owned()).collect();
        let q = CMatrix::from_columns(&e);
        let mats: Vec<HermitianMatrix> = (0..4)
            .map(|_| {
                let g = sampling::random_positive(k, 1e2, &mut rng);
                HermitianMatrix::symmetrize(&q * g.as_matrix() * q.adjoint()).unwrap()
            })
            .collect();
        let fam = LeviFamily::from_matrices("range", mats).unwrap();
        let rep = common_range_check(&fam, &e).unwrap();
        assert!(rep.holds);
        let perp: Vec<CVector> = (k..n).map(|j| u.column(j).into_owned()).collect();
        let coeffs = sampling::complex_gaussian_vector(perp.len(), &mut rng);
        let x = perp.iter().zip(coeffs.iter()).fold(CVector::zeros(n), |acc, (v, a)| acc + v * *a);
        let x = UnitVector::normalized(x).unwrap();
        assert!(null_certificate(&fam, Strategy::FixedVector(x), 8).unwrap().passes());
    }
}

#[test]
fn larger_specht_constant_never_produces_a_failure() {
    let mut rng = seeded(503);
    for _ in 0..20 {
        let n = rng.random_range(2..=4);
        let cst = sampling::uniform(0.5, 3.0, &mut rng);
        let f = || TestFunction::weighted(vec![cst; n]).unwrap();
        let mut sc = ComparisonScenario::new(f(), Some(f()), Region::centered(n, 1.0).with_counts(10, 40));
        let base = comparison_check(&sc, ComparisonKind::Cp1).unwrap();
        assert_eq!(base.status, ComparisonStatus::Pass);
        assert_eq!(base.constant, specht(1.0).unwrap());
        for extra in [0.0, 1e-3, 0.1, 1.0, 5.0] {
            sc.s_override = Some(base.constant + extra);
            let r = comparison_check(&sc, ComparisonKind::Cp1).unwrap();
            assert_ne!(r.status, ComparisonStatus::Fail);
            if extra == 0.0 {
                assert_eq!(r.status, ComparisonStatus::Pass);
            }
        }
    }
}

#[test]
fn conclusions_obey_the_boundary_max_principle() {
    let n = 3;
    let id = || TestFunction::weighted(vec![1.0; n]).unwrap();
    for radius in [0.5, 1.0, 2.0] {
        let region = Region::centered(n, radius).with_counts(40, 160);
        let sc = ComparisonScenario::new(id(), Some(id()), region.clone());
        for kind in [ComparisonKind::Cp1, ComparisonKind::Cp2, ComparisonKind::Cp3, ComparisonKind::Cp4] {
            let r = comparison_check(&sc, kind).unwrap();
            assert_eq!(r.status, ComparisonStatus::Pass, "{kind:?}");
            assert!(r.max_principle && r.margin >= -1e-10);
        }
        for cst in [0.5, 1.0, 3.0] {
            let u = TestFunction::weighted(vec![cst; n]).unwrap();
            let r = comparison_check(&ComparisonScenario::new(u, None, region.clone()), ComparisonKind::Bounds).unwrap();
            assert_eq!(r.status, ComparisonStatus::Pass);
            assert!(r.margin.abs() <= 1e-10 * cst.max(1.0) * radius * radius);
        }
    }
}

#[test]
fn hypothesis_gates_abort() {
    let region = Region::centered(3, 1.0).with_counts(20, 80);
    let twice = TestFunction::weighted(vec![2.0; 3]).unwrap();
    let r = comparison_check(&ComparisonScenario::new(twice, None, region.clone()), ComparisonKind::Cp3).unwrap();
    assert_eq!(r.status, ComparisonStatus::HypothesisViolated);
    assert!(r.margin.is_nan() && !r.diagnostics.is_empty());
    let half = TestFunction::weighted(vec![0.5; 3]).unwrap();
    let r = comparison_check(&ComparisonScenario::new(half.clone(), None, region.clone()), ComparisonKind::Cp3).unwrap();
    assert_eq!(r.status, ComparisonStatus::HypothesisViolated);
    let q = TestFunction::quartic(3).unwrap();
    let r = comparison_check(&ComparisonScenario::new(half, Some(q), region), ComparisonKind::Cp1).unwrap();
    assert_eq!(r.status, ComparisonStatus::HypothesisViolated);
}

#[test]
fn increasing_limit_demo_strict_inside() {
    let region = Region::centered(6, 0.5).with_counts(100, 400);
    let u = TestFunction::weighted(vec![1.0; 6]).unwrap();
    let r = comparison_check(&ComparisonScenario::new(u, None, region), ComparisonKind::IncreasingLimitDemo { j: 3 }).unwrap();
    assert_eq!(r.status, ComparisonStatus::Pass);
    assert!(r.margin > 0.0 && (r.constant - 0.25).abs() < 1e-15);
}
