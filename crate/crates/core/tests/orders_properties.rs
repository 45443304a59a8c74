use fsdlab::orders::{
    additive_constant, chaotic_leq, converse_probe_pair, counterexample_search, delta_order_sampled, furuta_check,
    kti_converse_probe, loewner_leq, mixed_bound, classic_pair, random_chaotic_pair_with, specht, specht_p, verify_kti,
    KtiVariant, PairParams,
};
use fsdlab::sampling::{self, seeded};
use fsdlab::spectra::{fun_calc, FunctionTag, HermitianMatrix};
use proptest::prelude::*;
use rand::Rng;

fn generic_pair(rng: &mut fsdlab::sampling::LabRng) -> (HermitianMatrix, HermitianMatrix) {
    let dim = rng.random_range(2..=8);
    let params = PairParams {
        k_scale: sampling::uniform(0.1, 1.5, rng),
        gap_scale: sampling::uniform(0.0, 1.0, rng),
        gap_rank: rng.random_range(1..=dim),
        diagonal: false,
        rotate: rng.random(),
    };
    random_chaotic_pair_with(dim, params, rng).unwrap()
}

#[test]
fn sampled_determinant_order_agrees_with_chaotic_order() {
    let mut rng = seeded(201);
    for i in 0..300 {
        let (a, b) = if i % 2 == 0 {
            generic_pair(&mut rng)
        } else {
            let n = rng.random_range(2..=6);
            (sampling::random_positive(n, 1e3, &mut rng), sampling::random_positive(n, 1e3, &mut rng))
        };
        let exact = chaotic_leq(&b, &a).unwrap();
        let sampled = delta_order_sampled(&a, &b, 64, i).unwrap();
        assert_eq!(exact.holds, sampled.holds, "pair {i}");
    }
}

#[test]
fn loewner_implies_chaotic() {
    let mut rng = seeded(202);
    for _ in 0..500 {
        let n = rng.random_range(2..=10);
        let a = sampling::random_positive(n, 1e4, &mut rng);
        let rank = rng.random_range(1..=n);
        let b = a.add(&sampling::random_psd(n, rank, a.spectral_norm(), &mut rng)).unwrap();
        assert!(loewner_leq(&a, &b).unwrap().holds);
        assert!(chaotic_leq(&a, &b).unwrap().holds);
    }
}

#[test]
fn commuting_pairs_have_equivalent_orders() {
    let mut rng = seeded(203);
    for _ in 0..200 {
        let n = rng.random_range(2..=10);
        let a: Vec<f64> = (0..n).map(|_| sampling::uniform(0.1, 10.0, &mut rng)).collect();
        let b: Vec<f64> = a.iter().map(|&x| x * sampling::uniform(0.5, 2.0, &mut rng)).collect();
        let u = sampling::random_unitary(n, &mut rng);
        let a = HermitianMatrix::diag(&a).conjugate_by(&u).unwrap();
        let b = HermitianMatrix::diag(&b).conjugate_by(&u).unwrap();
        for (x, y) in [(&a, &b), (&b, &a)] {
            assert_eq!(loewner_leq(x, y).unwrap().holds, chaotic_leq(x, y).unwrap().holds);
        }
    }
}

#[test]
fn forward_kantorovich_specht_family() {
    let mut rng = seeded(204);
    for _ in 0..300 {
        let (a, b) = generic_pair(&mut rng);
        for p in [0.5, 1.0, 2.0] {
            for v in [KtiVariant::Weak, KtiVariant::Strong, KtiVariant::Additive] {
                let m = verify_kti(&a, &b, None, p, v).unwrap();
                assert!(m.holds, "{v:?} p = {p}: margin {}", m.margin);
            }
            let s = specht_p(fsdlab::spectra::SpectralBounds::of(&b).unwrap().ratio(), p).unwrap();
            for c in [1.0, 0.5 * (1.0 + s), s] {
                assert!(mixed_bound(&a, &b, None, p, c).unwrap().holds, "mixed c = {c}");
            }
        }
    }
}

#[test]
fn furuta_grid() {
    let mut rng = seeded(205);
    for _ in 0..100 {
        let (a, b) = generic_pair(&mut rng);
        for p in [0.5, 1.0, 2.0] {
            for r in [0.5, 1.0, 2.0] {
                assert!(furuta_check(&a, &b, p, r).unwrap().holds);
            }
            let m = furuta_check(&a, &b, p, 0.0).unwrap();
            assert!(m.margin.abs() < 1e-12);
        }
    }
    let (lo, hi) = classic_pair();
    for p in [0.5, 1.0, 2.0] {
        for r in [0.5, 1.0, 2.0] {
            assert!(furuta_check(&hi, &lo, p, r).unwrap().holds);
        }
    }
}

#[test]
fn converse_probe_finds_a_witness() {
    let (a, b) = converse_probe_pair();
    let probe = kti_converse_probe(&a, &b, &[1.0, 0.1, 0.01, 0.001]).unwrap();
    assert!(probe.chaotic_margin <= -0.1);
    let p = probe.witness_p.expect("strong inequality fails somewhere on the grid");
    let (_, margin) = probe.margins.iter().find(|(q, _)| *q == p).unwrap();
    assert!(*margin < 0.0);
}

#[test]
fn counterexample_hits_are_reverified() {
    let rep = counterexample_search(2, 2000, 7).unwrap();
    assert!(rep.hits > 0);
    for pair in &rep.pairs {
        assert!(chaotic_leq(&pair.lower, &pair.upper).unwrap().holds);
        assert!(!loewner_leq(&pair.lower, &pair.upper).unwrap().holds);
    }
    let again = counterexample_search(2, 2000, 7).unwrap();
    assert_eq!(again.hits, rep.hits);
}

#[test]
fn commuting_chaotic_pair_is_loewner_ordered() {
    let mut rng = seeded(206);
    for _ in 0..100 {
        let params = PairParams { diagonal: true, ..PairParams::default() };
        let (a, b) = random_chaotic_pair_with(5, params, &mut rng).unwrap();
        assert!(loewner_leq(&b, &a).unwrap().holds);
        let ident = fun_calc(&a, FunctionTag::Log).unwrap();
        assert!(ident.is_diagonal(0.0));
    }
}

#[test]
fn specht_nondecreasing_on_grid() {
    let mut prev = 1.0;
    for i in 0..=2000 {
        let h = 1.0 + 99.0 * i as f64 / 2000.0;
        let s = specht(h).unwrap();
        assert!(s >= prev - 1e-15 && s >= 1.0);
        prev = s;
    }
}

proptest! {
    #[test]
    fn additive_constant_below_upper_bound(m in 0.01f64..10.0, ratio in 1.0f64..1e3) {
        let big_m = m * ratio;
        let c = additive_constant(m, big_m, 1.0).unwrap();
        prop_assert!(c >= 0.0 && c < big_m);
    }

    #[test]
    fn additive_constant_exceeds_lower_bound_past_six(m in 0.01f64..10.0, ratio in 6.0f64..1e3) {
        prop_assert!(additive_constant(m, m * ratio, 1.0).unwrap() > m);
    }

    #[test]
    fn specht_power_is_specht_of_power(h in 1.0f64..50.0, p in 0.05f64..3.0) {
        prop_assert_eq!(specht_p(h, p).unwrap(), specht(h.powf(p)).unwrap());
    }
}
