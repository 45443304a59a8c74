use fsdlab::orders::{
    additive_constant, chaotic_leq, classic_pair, converse_probe_pair, delta_order_sampled, furuta_check,
    kti_converse_probe, loewner_leq, mixed_bound, random_chaotic_pair_with, specht, specht_p, verify_kti,
    InequalityMargin, KtiVariant, PairParams,
};
use fsdlab::sampling::{self, LabRng};
use fsdlab::spectra::{HermitianMatrix, SpectralBounds, TAU_PSD};
use rand::Rng;
use serde_json::{json, Value};

use super::Params;
use crate::report::{matrix_json, Check, CheckRecord};

const KTI: &str = "orders-kti";
const FURUTA: &str = "orders-furuta";
const P_GRID: [f64; 3] = [0.5, 1.0, 2.0];

fn chaotic_pair(p: &Params, stream: u64, t: usize) -> (HermitianMatrix, HermitianMatrix, LabRng) {
    let mut rng = p.rng(stream, t);
    let dim = p.dim(t);
    // keeps the spectra of K and of the gap, hence cond(A) and cond(B), bounded in n
    let params = PairParams {
        k_scale: sampling::uniform(0.1, 1.5, &mut rng) / (dim as f64).sqrt(),
        gap_scale: sampling::uniform(0.0, 1.0, &mut rng) / dim as f64,
        gap_rank: rng.random_range(1..=dim),
        diagonal: false,
        rotate: rng.random(),
    };
    let (a, b) = random_chaotic_pair_with(dim, params, &mut rng).expect("dim >= 1");
    (a, b, rng)
}

fn pair_json(t: usize, a: &HermitianMatrix, b: &HermitianMatrix) -> Value {
    json!({"trial": t, "a": matrix_json(a), "b": matrix_json(b)})
}

fn normalized(m: &InequalityMargin) -> f64 {
    m.margin / m.scale
}

fn classic(checks: &mut Vec<CheckRecord>) {
    let (lo, hi) = classic_pair();
    let mut chaotic = Check::new(KTI, "classic-pair-chaotic", "diag(1,4) << [[5,5],[5,10]] in chaotic order", 1e-10);
    let mut loewner = Check::new(KTI, "classic-pair-not-loewner", "diag(1,4) <= [[5,5],[5,10]] fails by at least 0.05", 0.0);
    match (chaotic_leq(&lo, &hi), loewner_leq(&lo, &hi)) {
        (Ok(c), Ok(l)) => {
            chaotic.observe(c.margin, || json!({"margin": c.margin}));
            loewner.observe(-0.05 - l.margin, || json!({"margin": l.margin}));
            loewner.note(format!("lambda_min(B - A) = {:.6}", l.margin));
        }
        (Err(e), _) | (_, Err(e)) => {
            chaotic.error(&e, || json!(null));
            loewner.error(e, || json!(null));
        }
    }
    checks.push(chaotic.finish());
    checks.push(loewner.finish());
}

fn converse(checks: &mut Vec<CheckRecord>) {
    let mut check = Check::new(KTI, "converse-probe", "strong inequality fails for some p when log A >= log B fails", 0.0);
    let (a, b) = converse_probe_pair();
    match kti_converse_probe(&a, &b, &[1.0, 0.1, 0.01, 0.001]) {
        Ok(probe) => {
            let found = probe.witness_p.is_some() && probe.chaotic_margin <= -0.1;
            let w = json!({"chaotic_margin": probe.chaotic_margin, "margins": probe.margins, "witness_p": probe.witness_p});
            check.observe(if found { 0.0 } else { -1.0 }, || w.clone());
            if let Some(wp) = probe.witness_p {
                let m = probe.margins.iter().find(|(q, _)| *q == wp).map(|x| x.1).unwrap_or(f64::NAN);
                check.note(format!(
                    "log-order margin {:.4}; strong inequality fails at p = {wp} with margin {m:.4e}",
                    probe.chaotic_margin
                ));
            }
        }
        Err(e) => check.error(e, || json!(null)),
    }
    checks.push(check.finish());
}

fn scalar_facts(checks: &mut Vec<CheckRecord>) {
    let mut mono = Check::new(KTI, "specht-monotone", "Specht ratio is nondecreasing on [1, 100]", 1e-15);
    let mut prev = 1.0;
    for i in 0..=2000 {
        let h = 1.0 + 99.0 * i as f64 / 2000.0;
        match specht(h) {
            Ok(s) => {
                mono.observe(s - prev, || json!({"h": h}));
                prev = s;
            }
            Err(e) => mono.error(e, || json!({"h": h})),
        }
    }
    checks.push(mono.finish());
    let mut below = Check::new(KTI, "additive-constant-below-m-upper", "C(m, M) < M", 0.0);
    let mut above = Check::new(KTI, "additive-constant-above-m-lower", "C(m, M) > m once M/m >= 6", 0.0);
    for i in 0..20 {
        let m = 0.01 * 1000f64.powf(i as f64 / 19.0);
        for j in 0..40 {
            let ratio = 1000f64.powf(j as f64 / 39.0);
            let big_m = m * ratio;
            match additive_constant(m, big_m, 1.0) {
                Ok(c) => {
                    below.observe((big_m - c) / big_m - f64::EPSILON, || json!({"m": m, "M": big_m, "C": c}));
                    if ratio >= 6.0 {
                        above.observe((c - m) / m - f64::EPSILON, || json!({"m": m, "M": big_m, "C": c}));
                    }
                }
                Err(e) => below.error(e, || json!({"m": m, "M": big_m})),
            }
        }
    }
    checks.push(below.finish());
    checks.push(above.finish());
}

pub fn run_kti(p: &Params) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    classic(&mut out);
    converse(&mut out);
    scalar_facts(&mut out);

    let mut equiv = Check::new(KTI, "order-equivalence", "sampled determinant order agrees with log A >= log B", 0.0);
    let mut implies = Check::new(KTI, "loewner-implies-chaotic", "A <= B implies log A <= log B", TAU_PSD);
    let mut commuting = Check::new(KTI, "commuting-equivalence", "commuting pairs: Loewner iff chaotic", 0.0);
    for t in 0..p.trials {
        let (a, b, mut rng) = chaotic_pair(p, 10, t);
        let (x, y) = if t % 2 == 0 {
            (a, b)
        } else {
            let n = a.dim();
            (sampling::random_positive(n, 1e3, &mut rng), sampling::random_positive(n, 1e3, &mut rng))
        };
        match (chaotic_leq(&y, &x), delta_order_sampled(&x, &y, 64, t as u64)) {
            (Ok(e), Ok(s)) => equiv.observe(if e.holds == s.holds { 0.0 } else { -1.0 }, || pair_json(t, &x, &y)),
            (Err(err), _) | (_, Err(err)) => equiv.error(err, || pair_json(t, &x, &y)),
        }

        let mut rng = p.rng(11, t);
        let n = p.dim(t);
        let a = sampling::random_positive(n, 1e4, &mut rng);
        let rank = rng.random_range(1..=n);
        let b = a.add(&sampling::random_psd(n, rank, a.spectral_norm(), &mut rng)).expect("same dim");
        match chaotic_leq(&a, &b) {
            Ok(v) => implies.observe(v.margin / v.scale, || pair_json(t, &a, &b)),
            Err(e) => implies.error(e, || pair_json(t, &a, &b)),
        }

        let da: Vec<f64> = (0..n).map(|_| sampling::uniform(0.1, 10.0, &mut rng)).collect();
        let db: Vec<f64> = da.iter().map(|&v| v * sampling::uniform(0.5, 2.0, &mut rng)).collect();
        let u = sampling::random_unitary(n, &mut rng);
        let a = HermitianMatrix::diag(&da).conjugate_by(&u).expect("square");
        let b = HermitianMatrix::diag(&db).conjugate_by(&u).expect("square");
        match (loewner_leq(&a, &b), chaotic_leq(&a, &b)) {
            (Ok(l), Ok(c)) => commuting.observe(if l.holds == c.holds { 0.0 } else { -1.0 }, || pair_json(t, &a, &b)),
            (Err(e), _) | (_, Err(e)) => commuting.error(e, || pair_json(t, &a, &b)),
        }
    }
    out.extend([equiv.finish(), implies.finish(), commuting.finish()]);

    let anchors = [
        (KtiVariant::Weak, "kti-weak", "K(h^p) A^p >= B^p under A >> B"),
        (KtiVariant::Strong, "kti-strong", "S(h^p) A^p >= B^p under A >> B"),
        (KtiVariant::Additive, "kti-additive", "A^p + C_p(m, M) >= B^p under A >> B"),
    ];
    let mut kti: Vec<Check> = anchors.iter().map(|(_, id, a)| Check::new(KTI, id, a, TAU_PSD)).collect();
    let mut mixed = Check::new(KTI, "kti-mixed", "c A^p + (S - c)/(S - 1) C_p >= B^p for c in {1, (1+S)/2, S}", TAU_PSD);
    for t in 0..p.trials {
        let (a, b, _) = chaotic_pair(p, 12, t);
        for &q in &P_GRID {
            for (k, (variant, _, _)) in anchors.iter().enumerate() {
                match verify_kti(&a, &b, None, q, *variant) {
                    Ok(m) => kti[k].observe(normalized(&m), || json!({"p": q, "pair": pair_json(t, &a, &b)})),
                    Err(e) => kti[k].error(e, || json!({"p": q, "pair": pair_json(t, &a, &b)})),
                }
            }
            let s = SpectralBounds::of(&b).and_then(|bd| specht_p(bd.ratio(), q));
            let s = match s {
                Ok(s) => s,
                Err(e) => {
                    mixed.error(e, || pair_json(t, &a, &b));
                    continue;
                }
            };
            for c in [1.0, 0.5 * (1.0 + s), s] {
                match mixed_bound(&a, &b, None, q, c) {
                    Ok(m) => mixed.observe(normalized(&m), || json!({"p": q, "c": c, "pair": pair_json(t, &a, &b)})),
                    Err(e) => mixed.error(e, || json!({"p": q, "c": c, "pair": pair_json(t, &a, &b)})),
                }
            }
        }
    }
    out.extend(kti.into_iter().map(Check::finish));
    out.push(mixed.finish());
    out
}

pub fn run_furuta(p: &Params) -> Vec<CheckRecord> {
    let anchor = "A^r >= (A^(r/2) B^p A^(r/2))^(r/(p+r)) under A >> B";
    let mut grid = Check::new(FURUTA, "furuta-grid", anchor, TAU_PSD);
    let mut identity = Check::new(FURUTA, "furuta-r-zero", "r = 0 gives the identity on both sides", 1e-12);
    for t in 0..p.trials {
        let (a, b, _) = chaotic_pair(p, 20, t);
        for &q in &P_GRID {
            for &r in &P_GRID {
                match furuta_check(&a, &b, q, r) {
                    Ok(m) => grid.observe(normalized(&m), || json!({"p": q, "r": r, "pair": pair_json(t, &a, &b)})),
                    Err(e) => grid.error(e, || json!({"p": q, "r": r, "pair": pair_json(t, &a, &b)})),
                }
            }
            match furuta_check(&a, &b, q, 0.0) {
                Ok(m) => identity.observe(-m.margin.abs(), || json!({"p": q, "pair": pair_json(t, &a, &b)})),
                Err(e) => identity.error(e, || json!({"p": q, "pair": pair_json(t, &a, &b)})),
            }
        }
    }
    let mut classic_grid = Check::new(FURUTA, "furuta-classic-pair", anchor, TAU_PSD);
    let (lo, hi) = classic_pair();
    for &q in &P_GRID {
        for &r in &P_GRID {
            match furuta_check(&hi, &lo, q, r) {
                Ok(m) => classic_grid.observe(normalized(&m), || json!({"p": q, "r": r})),
                Err(e) => classic_grid.error(e, || json!({"p": q, "r": r})),
            }
        }
    }
    vec![grid.finish(), identity.finish(), classic_grid.finish()]
}
