mod common;

use common::{close, instance, leq};
use fsdlab::fsdet::{
    commutant_variational, delta, dragomir_chain, geometric_mean_bounds, oppenheim_bounds, p_mean, DeltaEvaluator,
};
use fsdlab::orders::{additive_constant, specht};
use fsdlab::sampling::{self, seeded};
use fsdlab::spectra::{eigh, fun_calc, FunctionTag, HermitianMatrix, SpectralBounds};
use rand::Rng;

const N: usize = 500;
const REL: f64 = 1e-8;
const EXACT: f64 = 1e-10;

#[test]
fn continuity_under_commuting_perturbation() {
    let mut rng = seeded(101);
    for _ in 0..N {
        let (a, x) = instance(&mut rng);
        let d = eigh(&a).unwrap();
        let factors: Vec<f64> = (0..a.dim()).map(|_| sampling::uniform(-0.5, 0.5, &mut rng)).collect();
        let scaled: Vec<f64> = d.eigenvalues.iter().zip(&factors).map(|(l, f)| l * f).collect();
        let e = HermitianMatrix::diag(&scaled).conjugate_by(&d.eigenvectors).unwrap();
        let ae = a.add(&e).unwrap();
        let m = d.min().min(eigh(&ae).unwrap().min());
        let lhs = (delta(&ae, &x).unwrap().ln() - delta(&a, &x).unwrap().ln()).abs();
        assert!(leq(lhs, e.spectral_norm() / m, REL));
    }
}

#[test]
fn sandwiches_and_reverse_inequalities() {
    let mut rng = seeded(102);
    for _ in 0..N {
        let (a, x) = instance(&mut rng);
        let ev = DeltaEvaluator::new(&a).unwrap();
        let d = ev.delta(&x).unwrap();
        let am = ev.arithmetic_mean(&x).unwrap();
        let hm = ev.p_mean(&x, -1.0).unwrap();
        let dec = ev.decomposition();
        let (m, big_m) = (dec.min(), dec.max());
        assert!(leq(hm, d, REL) && leq(d, am, REL));
        assert!(leq(m, d, REL) && leq(d, big_m, REL));
        assert!(leq(am, specht(big_m / m).unwrap() * d, REL));
        let gap = am - d;
        assert!(gap >= -REL * am && leq(gap, additive_constant(m, big_m, 1.0).unwrap(), REL));
    }
}

#[test]
fn p_means_increase_towards_the_determinant() {
    let grid = [-1.0, -0.5, -0.1, -0.01, 0.01, 0.1, 0.5, 1.0];
    let mut rng = seeded(103);
    for _ in 0..N {
        let (a, x) = instance(&mut rng);
        let ev = DeltaEvaluator::new(&a).unwrap();
        let vals: Vec<f64> = grid.iter().map(|&p| ev.p_mean(&x, p).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[0] <= w[1] + 1e-10 * w[1].max(1.0), "{w:?}");
        }
        let d = ev.delta(&x).unwrap();
        let dec = ev.decomposition();
        let kappa = (dec.max() / dec.min()).ln();
        let bound = 1e-3 * (1.0 + dec.max()) * kappa + 1e-12 * d;
        for p in [-1e-3, 1e-3] {
            assert!((ev.p_mean(&x, p).unwrap() - d).abs() <= bound);
        }
    }
}

#[test]
fn inverse_power_and_homogeneity_laws() {
    let mut rng = seeded(104);
    for _ in 0..N {
        // A^3 must itself stay within the condition-number cap
        let n = rng.random_range(2..=16);
        let a = sampling::random_positive(n, common::COND_MAX.cbrt(), &mut rng);
        let x = sampling::random_unit_vector(n, &mut rng);
        let d = delta(&a, &x).unwrap();
        let inv = fun_calc(&a, FunctionTag::Power(-1.0)).unwrap();
        assert!(close(delta(&inv, &x).unwrap(), 1.0 / d, REL * (1.0 / d).max(1.0)));
        for p in [-2.0, -1.0, 0.5, 2.0, 3.0] {
            let ap = fun_calc(&a, FunctionTag::Power(p)).unwrap();
            let want = d.powf(p);
            assert!(((delta(&ap, &x).unwrap() - want) / want).abs() <= REL, "p = {p}");
        }
        for t in [0.5, 2.0, 10.0] {
            let err = ((delta(&a.scale(t), &x).unwrap() - t * d) / (t * d)).abs(); assert!(err <= EXACT, "{err:e}");
        }
    }
}

#[test]
fn monotone_in_loewner_order() {
    let mut rng = seeded(105);
    for _ in 0..N {
        let (a, x) = instance(&mut rng);
        let rank = rng.random_range(1..=a.dim());
        let b = a.add(&sampling::random_psd(a.dim(), rank, a.spectral_norm(), &mut rng)).unwrap();
        assert!(leq(delta(&a, &x).unwrap(), delta(&b, &x).unwrap(), REL));
    }
}

#[test]
fn commuting_multiplicative_and_superadditive() {
    let mut rng = seeded(106);
    for _ in 0..N {
        let (a, x) = instance(&mut rng);
        let d = eigh(&a).unwrap();
        // q <= 0 keeps AB inside the condition-number envelope
        let q = sampling::uniform(-1.0, 0.0, &mut rng);
        let s = sampling::uniform(0.1, 2.0, &mut rng);
        let b = d.map(|l| s * l.powf(q));
        let ab = d.map(|l| l * s * l.powf(q));
        let (da, db) = (delta(&a, &x).unwrap(), delta(&b, &x).unwrap());
        let err = ((delta(&ab, &x).unwrap() - da * db) / (da * db)).abs(); assert!(err <= EXACT, "{err:e}");
        let sum = a.add(&b).unwrap();
        assert!(leq(da + db, delta(&sum, &x).unwrap(), EXACT));
    }
}

#[test]
fn log_concave_along_segments() {
    let mut rng = seeded(107);
    for _ in 0..N {
        let (a, x) = instance(&mut rng);
        let b = sampling::random_positive(a.dim(), common::COND_MAX, &mut rng);
        let (da, db) = (delta(&a, &x).unwrap(), delta(&b, &x).unwrap());
        for t in [0.25, 0.5, 0.75] {
            let mix = a.scale(1.0 - t).add(&b.scale(t)).unwrap();
            let rhs = da.powf(1.0 - t) * db.powf(t);
            assert!(delta(&mix, &x).unwrap() >= rhs * (1.0 - REL));
        }
    }
}

#[test]
fn commutant_infimum_is_the_determinant() {
    let mut rng = seeded(108);
    for _ in 0..N {
        let (a, x) = instance(&mut rng);
        let rep = commutant_variational(&a, &x, 20, &mut rng).unwrap();
        assert!(rep.lower_bound_holds(REL * rep.delta.max(1.0)));
        assert!(close(rep.witness_value, rep.delta, REL));
        assert!(close(rep.witness_delta, 1.0, REL));
    }
}

#[test]
fn dragomir_chain_is_monotone() {
    let mut rng = seeded(109);
    for _ in 0..300 {
        let (a, x) = instance(&mut rng);
        let chain = dragomir_chain(&a, &x).unwrap();
        for w in chain.windows(2) {
            assert!(leq(w[0], w[1], REL), "{chain:?}");
        }
    }
}

#[test]
fn oppenheim_sandwich() {
    let mut rng = seeded(110);
    for _ in 0..200 {
        let (a, x) = instance(&mut rng);
        let b = sampling::random_positive(a.dim(), 1e3, &mut rng);
        assert!(oppenheim_bounds(&a, &b, &x).unwrap().holds(REL));
    }
}

#[test]
fn specht_is_supermultiplicative() {
    let grid: Vec<f64> = (0..40).map(|i| 1.01 * (50.0f64 / 1.01).powf(i as f64 / 39.0)).collect();
    for &h1 in &grid {
        for &h2 in &grid {
            let lhs = specht(h1).unwrap() * specht(h2).unwrap();
            assert!(leq(lhs, specht(h1 * h2).unwrap(), 1e-12), "h1 = {h1}, h2 = {h2}");
        }
    }
}

#[test]
fn geometric_mean_sandwich() {
    let mut rng = seeded(111);
    for _ in 0..200 {
        let (a, x) = instance(&mut rng);
        let b = sampling::random_positive(a.dim(), 1e3, &mut rng);
        for alpha in [0.25, 0.5, 0.75] {
            assert!(geometric_mean_bounds(&a, &b, alpha, &x).unwrap().holds(REL));
        }
        let d = eigh(&a).unwrap();
        let c = d.map(|l| l.sqrt() + 1.0);
        for alpha in [0.25, 0.5, 0.75] {
            let s = geometric_mean_bounds(&a, &c, alpha, &x).unwrap();
            assert!((s.value - 1.0).abs() <= REL);
        }
    }
}

#[test]
fn spectral_endpoint_bounds() {
    let mut rng = seeded(112);
    for _ in 0..100 {
        let (a, _) = instance(&mut rng);
        let b = SpectralBounds::of(&a).unwrap();
        let id = HermitianMatrix::identity(a.dim());
        assert!(b.contains(&a).unwrap());
        assert!(b.lower() > 0.0 && b.ratio() >= 1.0 && id.dim() == a.dim());
        let x = sampling::random_unit_vector(a.dim(), &mut rng);
        assert!(p_mean(&a, &x, 1.0).unwrap() <= b.upper() * (1.0 + REL));
    }
}
