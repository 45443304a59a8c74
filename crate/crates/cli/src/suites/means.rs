use fsdlab::fsdet::{geometric_mean_bounds, oppenheim_bounds, Sandwich};
use fsdlab::orders::specht;
use fsdlab::sampling;
use fsdlab::spectra::{eigh, geometric_mean, hadamard, is_psd};
use rand::Rng;
use serde_json::json;

use super::fsdet::{property, COND_MAX};
use super::Params;
use crate::report::{matrix_json, rel_eq, rel_leq, Check, CheckRecord};

const SUITE: &str = "orders-means";
const STREAM: u64 = 30;

fn sandwich_margin(s: &Sandwich) -> f64 {
    rel_leq(s.lower, s.value).min(rel_leq(s.value, s.upper))
}

fn supermultiplicative() -> CheckRecord {
    let mut check = Check::new(SUITE, "specht-supermultiplicative", "S(h1) S(h2) <= S(h1 h2) on [1.01, 50]^2", 1e-12);
    let grid: Vec<f64> = (0..40).map(|i| 1.01 * (50.0f64 / 1.01).powf(i as f64 / 39.0)).collect();
    for &h1 in &grid {
        for &h2 in &grid {
            match (specht(h1), specht(h2), specht(h1 * h2)) {
                (Ok(a), Ok(b), Ok(c)) => check.observe(rel_leq(a * b, c), || json!({"h1": h1, "h2": h2})),
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => check.error(e, || json!({"h1": h1, "h2": h2})),
            }
        }
    }
    check.finish()
}

pub fn run(p: &Params) -> Vec<CheckRecord> {
    let (rel, n) = (p.rel, p.trials);
    let mut out = vec![supermultiplicative()];
    out.push(property(p, STREAM, SUITE, "oppenheim-sandwich", "Hadamard-product determinant bounds via Specht ratios", rel, n, COND_MAX, |i| {
        let b = sampling::random_positive(i.a.dim(), 1e3, &mut i.rng);
        Ok(sandwich_margin(&oppenheim_bounds(&i.a, &b, &i.x)?))
    }));
    out.push(property(p, STREAM + 1, SUITE, "geometric-mean-sandwich", "K(h^2, alpha)/S(h) <= ratio <= S(h) for the weighted geometric mean", rel, n, COND_MAX, |i| {
        let b = sampling::random_positive(i.a.dim(), 1e3, &mut i.rng);
        let mut worst = f64::INFINITY;
        for alpha in [0.25, 0.5, 0.75] {
            worst = worst.min(sandwich_margin(&geometric_mean_bounds(&i.a, &b, alpha, &i.x)?));
        }
        Ok(worst)
    }));
    out.push(property(p, STREAM + 2, SUITE, "geometric-mean-commuting", "commuting pairs: delta of the geometric mean is the geometric mean of deltas", rel, n, COND_MAX, |i| {
        let c = eigh(&i.a)?.map(|l| l.sqrt() + 1.0);
        let mut worst = f64::INFINITY;
        for alpha in [0.25, 0.5, 0.75] {
            worst = worst.min(rel_eq(geometric_mean_bounds(&i.a, &c, alpha, &i.x)?.value, 1.0));
        }
        Ok(worst)
    }));
    out.push(property(p, STREAM + 3, SUITE, "geometric-mean-symmetry", "A #_alpha B = B #_(1-alpha) A", rel, n, 1e3, |i| {
        let b = sampling::random_positive(i.a.dim(), 1e3, &mut i.rng);
        let alpha = sampling::uniform(0.0, 1.0, &mut i.rng);
        let g1 = geometric_mean(&i.a, &b, alpha)?;
        let g2 = geometric_mean(&b, &i.a, 1.0 - alpha)?;
        Ok(-g1.sub(&g2)?.spectral_norm() / g1.spectral_norm().max(1.0))
    }));
    let mut schur = Check::new(SUITE, "hadamard-psd", "Hadamard product of PSD matrices is PSD", 0.0);
    for t in 0..n {
        let mut rng = p.rng(STREAM + 4, t);
        let d = p.dim(t);
        let a = sampling::random_psd(d, rng.random_range(1..=d), 1.0, &mut rng);
        let b = sampling::random_psd(d, rng.random_range(1..=d), 1.0, &mut rng);
        match hadamard(&a, &b).and_then(|h| is_psd(&h, a.scale_hint().max(b.scale_hint()))) {
            Ok(c) => schur.observe(if c.holds { 0.0 } else { c.margin }, || json!({"trial": t, "a": matrix_json(&a), "b": matrix_json(&b)})),
            Err(e) => schur.error(e, || json!({"trial": t})),
        }
    }
    out.push(schur.finish());
    out
}
