use fsdlab::fsdet::{
    commutant_variational, degeneracy_report, delta, dragomir_chain, endpoint_certificate, DeltaEvaluator,
};
use fsdlab::orders::{additive_constant, specht};
use fsdlab::sampling::{self, LabRng};
use fsdlab::spectra::{eigh, fun_calc, op_norm, CMatrix, FunctionTag, HermitianMatrix, UnitVector};
use rand::Rng;
use serde_json::json;

use super::Params;
use crate::report::{matrix_json, rel_eq, rel_leq, unit_json, Check, CheckRecord};

const SUITE: &str = "fsdet-properties";
const STREAM: u64 = 1;
pub(crate) const COND_MAX: f64 = 1e6;

pub(crate) struct Instance {
    pub a: HermitianMatrix,
    pub x: UnitVector,
    pub rng: LabRng,
}

pub(crate) fn instance(p: &Params, stream: u64, t: usize, cond: f64) -> Instance {
    let mut rng = p.rng(stream, t);
    let n = p.dim(t);
    let a = sampling::random_positive(n, cond, &mut rng);
    let x = sampling::random_unit_vector(n, &mut rng);
    Instance { a, x, rng }
}

/// Runs `f` on `trials` fresh instances and keeps the worst margin.
pub(crate) fn property(
    p: &Params,
    stream: u64,
    suite: &str,
    name: &str,
    anchor: &str,
    tol: f64,
    trials: usize,
    cond: f64,
    mut f: impl FnMut(&mut Instance) -> fsdlab::Result<f64>,
) -> CheckRecord {
    let mut check = Check::new(suite, name, anchor, tol);
    for t in 0..trials {
        let mut inst = instance(p, stream, t, cond);
        let witness = |inst: &Instance| json!({"seed": p.seed, "trial": t, "a": matrix_json(&inst.a), "x": unit_json(&inst.x)});
        match f(&mut inst) {
            Ok(m) => check.observe(m, || witness(&inst)),
            Err(e) => check.error(e, || witness(&inst)),
        }
    }
    check.finish()
}

fn fixtures() -> Vec<CheckRecord> {
    let anchor = "normalized determinant: closed-form fixtures";
    let mut scalar = Check::new(SUITE, "fixture-scalar", anchor, 1e-12);
    let mut diagonal = Check::new(SUITE, "fixture-diagonal", anchor, 1e-10);
    let mut kernel = Check::new(SUITE, "fixture-kernel", anchor, 0.0);
    for t in [0.5, 1.0, 3.0] {
        for n in [1, 3] {
            match delta(&HermitianMatrix::scaled_identity(n, t), &UnitVector::basis(n, 0)) {
                Ok(d) => scalar.observe(rel_eq(d, t), || json!({"t": t, "n": n, "delta": d})),
                Err(e) => scalar.error(e, || json!({"t": t, "n": n})),
            }
        }
    }
    let x = UnitVector::from_real(&[1.0, 1.0]).expect("nonzero");
    match delta(&HermitianMatrix::diag(&[1.0, 4.0]), &x) {
        Ok(d) => diagonal.observe(rel_eq(d, 2.0), || json!({"delta": d, "expected": 2.0})),
        Err(e) => diagonal.error(e, || json!(null)),
    }
    match delta(&HermitianMatrix::diag(&[0.0, 4.0]), &x) {
        Ok(d) => kernel.observe(if d == 0.0 { 0.0 } else { -d }, || json!({"delta": d, "expected": 0.0})),
        Err(e) => kernel.error(e, || json!(null)),
    }
    vec![scalar.finish(), diagonal.finish(), kernel.finish()]
}

fn degeneracy(p: &Params) -> CheckRecord {
    let mut check = Check::new(SUITE, "degeneracy-equivalence", "six equivalent degeneracy conditions agree", 0.0);
    for t in 0..p.trials {
        let mut rng = p.rng(STREAM + 100, t);
        let n = p.dim(t);
        let a = if t % 2 == 0 {
            sampling::random_psd(n, rng.random_range(1..=n.max(2) - 1).max(1), 1.0, &mut rng)
        } else {
            sampling::random_positive(n, COND_MAX, &mut rng)
        };
        match degeneracy_report(&a) {
            Ok(r) => check.observe(if r.consistent() { 0.0 } else { -1.0 }, || {
                json!({"trial": t, "a": matrix_json(&a), "conditions": r.conditions})
            }),
            Err(e) => check.error(e, || json!({"trial": t, "a": matrix_json(&a)})),
        }
    }
    check.finish()
}

pub fn run(p: &Params) -> Vec<CheckRecord> {
    let (rel, exact, n) = (p.rel, p.exact, p.trials);
    let mut out = fixtures();
    out.push(degeneracy(p));
    let prop = |name: &str, anchor: &str, tol: f64, cond: f64, f: &mut dyn FnMut(&mut Instance) -> fsdlab::Result<f64>| {
        property(p, STREAM, SUITE, name, anchor, tol, n, cond, f)
    };

    out.push(prop("continuity", "commuting perturbation moves log delta by at most ||E||/m", rel, COND_MAX, &mut |i| {
        let d = eigh(&i.a)?;
        let scaled: Vec<f64> = d.eigenvalues.iter().map(|l| l * sampling::uniform(-0.5, 0.5, &mut i.rng)).collect();
        let e = HermitianMatrix::diag(&scaled).conjugate_by(&d.eigenvectors)?;
        let ae = i.a.add(&e)?;
        let m = d.min().min(eigh(&ae)?.min());
        let lhs = (delta(&ae, &i.x)?.ln() - delta(&i.a, &i.x)?.ln()).abs();
        Ok(rel_leq(lhs, e.spectral_norm() / m))
    }));
    out.push(prop("am-gm-sandwich", "harmonic mean <= delta <= arithmetic mean", rel, COND_MAX, &mut |i| {
        let ev = DeltaEvaluator::new(&i.a)?;
        let d = ev.delta(&i.x)?;
        Ok(rel_leq(ev.p_mean(&i.x, -1.0)?, d).min(rel_leq(d, ev.arithmetic_mean(&i.x)?)))
    }));
    out.push(prop("norm-sandwich", "||A^-1||^-1 <= delta <= ||A||", rel, COND_MAX, &mut |i| {
        let ev = DeltaEvaluator::new(&i.a)?;
        let d = ev.delta(&i.x)?;
        let dec = ev.decomposition();
        Ok(rel_leq(dec.min(), d).min(rel_leq(d, dec.max())))
    }));
    out.push(prop("specht-reverse", "<Ax,x> <= S(M/m) delta", rel, COND_MAX, &mut |i| {
        let ev = DeltaEvaluator::new(&i.a)?;
        let dec = ev.decomposition();
        Ok(rel_leq(ev.arithmetic_mean(&i.x)?, specht(dec.max() / dec.min())? * ev.delta(&i.x)?))
    }));
    out.push(prop("additive-reverse", "0 <= <Ax,x> - delta <= C(m,M)", rel, COND_MAX, &mut |i| {
        let ev = DeltaEvaluator::new(&i.a)?;
        let dec = ev.decomposition();
        let gap = ev.arithmetic_mean(&i.x)? - ev.delta(&i.x)?;
        Ok(rel_leq(0.0, gap).min(rel_leq(gap, additive_constant(dec.min(), dec.max(), 1.0)?)))
    }));
    out.push(prop("dragomir-chain", "five-term log-linear interpolation chain", rel, COND_MAX, &mut |i| {
        let chain = dragomir_chain(&i.a, &i.x)?;
        Ok(chain.windows(2).map(|w| rel_leq(w[0], w[1])).fold(f64::INFINITY, f64::min))
    }));
    let grid = [-1.0, -0.5, -0.1, -0.01, 0.01, 0.1, 0.5, 1.0];
    out.push(prop("p-mean-monotone", "p-means are nondecreasing in p", exact, COND_MAX, &mut |i| {
        let ev = DeltaEvaluator::new(&i.a)?;
        let vals: Vec<f64> = grid.iter().map(|&q| ev.p_mean(&i.x, q)).collect::<fsdlab::Result<_>>()?;
        Ok(vals.windows(2).map(|w| rel_leq(w[0], w[1])).fold(f64::INFINITY, f64::min))
    }));
    let mut limit = prop("p-mean-limit", "p-means converge to delta as p -> 0 (smoke test)", 0.0, COND_MAX, &mut |i| {
        let ev = DeltaEvaluator::new(&i.a)?;
        let d = ev.delta(&i.x)?;
        let dec = ev.decomposition();
        let bound = 1e-3 * (1.0 + dec.max()) * (dec.max() / dec.min()).ln() + 1e-12 * d;
        let err = (ev.p_mean(&i.x, -1e-3)? - d).abs().max((ev.p_mean(&i.x, 1e-3)? - d).abs());
        Ok(bound - err)
    });
    limit.note = Some("coarse bound 1e-3 (1 + ||A||) log cond; no rate is claimed".into());
    out.push(limit);
    out.push(prop("inverse-law", "delta(A^-1) = 1 / delta(A)", rel, COND_MAX, &mut |i| {
        let d = delta(&i.a, &i.x)?;
        let inv = fun_calc(&i.a, FunctionTag::Power(-1.0))?;
        Ok(rel_eq(delta(&inv, &i.x)? * d, 1.0))
    }));
    // A^p must stay inside the condition-number envelope for |p| <= 3
    let mut power = prop("power-law", "delta(A^p) = delta(A)^p", rel, COND_MAX.cbrt(), &mut |i| {
        let d = delta(&i.a, &i.x)?;
        let mut worst = f64::INFINITY;
        for q in [-2.0, -1.0, 0.5, 2.0, 3.0] {
            let aq = fun_calc(&i.a, FunctionTag::Power(q))?;
            worst = worst.min(rel_eq(delta(&aq, &i.x)? / d.powf(q), 1.0));
        }
        Ok(worst)
    });
    power.note = Some("instances drawn with condition number <= 1e2 so that A^3 stays within 1e6".into());
    out.push(power);
    out.push(prop("homogeneity", "delta(tA) = t delta(A)", exact, COND_MAX, &mut |i| {
        let d = delta(&i.a, &i.x)?;
        let mut worst = f64::INFINITY;
        for s in [0.5, 2.0, 10.0] {
            worst = worst.min(rel_eq(delta(&i.a.scale(s), &i.x)? / (s * d), 1.0));
        }
        Ok(worst)
    }));
    out.push(prop("loewner-monotone", "A <= B implies delta(A) <= delta(B)", rel, COND_MAX, &mut |i| {
        let n = i.a.dim();
        let rank = i.rng.random_range(1..=n);
        let b = i.a.add(&sampling::random_psd(n, rank, i.a.spectral_norm(), &mut i.rng))?;
        Ok(rel_leq(delta(&i.a, &i.x)?, delta(&b, &i.x)?))
    }));
    let commuting = |i: &mut Instance| -> fsdlab::Result<(f64, f64, HermitianMatrix, HermitianMatrix)> {
        let d = eigh(&i.a)?;
        // q <= 0 keeps AB inside the condition-number envelope
        let q = sampling::uniform(-1.0, 0.0, &mut i.rng);
        let s = sampling::uniform(0.1, 2.0, &mut i.rng);
        let b = d.map(|l| s * l.powf(q));
        let ab = d.map(|l| l * s * l.powf(q));
        Ok((delta(&i.a, &i.x)?, delta(&b, &i.x)?, b, ab))
    };
    out.push(prop("commuting-multiplicative", "commuting pairs: delta(AB) = delta(A) delta(B)", exact, COND_MAX, &mut |i| {
        let (da, db, _, ab) = commuting(i)?;
        Ok(rel_eq(delta(&ab, &i.x)? / (da * db), 1.0))
    }));
    out.push(prop("commuting-superadditive", "commuting pairs: delta(A+B) >= delta(A) + delta(B)", exact, COND_MAX, &mut |i| {
        let (da, db, b, _) = commuting(i)?;
        Ok(rel_leq(da + db, delta(&i.a.add(&b)?, &i.x)?))
    }));
    out.push(prop("log-concavity", "delta((1-t)A + tB) >= delta(A)^(1-t) delta(B)^t", rel, COND_MAX, &mut |i| {
        let b = sampling::random_positive(i.a.dim(), COND_MAX, &mut i.rng);
        let (da, db) = (delta(&i.a, &i.x)?, delta(&b, &i.x)?);
        let mut worst = f64::INFINITY;
        for t in [0.25, 0.5, 0.75] {
            let mix = i.a.scale(1.0 - t).add(&b.scale(t))?;
            worst = worst.min(rel_leq(da.powf(1.0 - t) * db.powf(t), delta(&mix, &i.x)?));
        }
        Ok(worst)
    }));
    out.push(prop("commutant-infimum", "inf over the commutant of <ABx,x> with delta(B) = 1 is delta(A)", rel, COND_MAX, &mut |i| {
        let rep = commutant_variational(&i.a, &i.x, 20, &mut i.rng)?;
        Ok(rel_leq(rep.delta, rep.sampled_inf)
            .min(rel_eq(rep.witness_value, rep.delta))
            .min(rel_eq(rep.witness_delta, 1.0)))
    }));
    out.push(prop("eigh-reconstruction", "eigen-system reconstructs A with orthonormal vectors", exact, COND_MAX, &mut |i| {
        let n = i.a.dim();
        let h = sampling::random_hermitian(n, 1.0, &mut i.rng);
        let d = eigh(&h)?;
        let v = &d.eigenvectors;
        let recon = op_norm(&(d.reconstruct().as_matrix() - h.as_matrix())) / h.spectral_norm().max(1.0);
        let ortho = op_norm(&(v.adjoint() * v - CMatrix::identity(n, n)));
        Ok(-recon.max(ortho))
    }));
    out.push(prop("calculus-round-trips", "(A^p)^(1/p) = A and exp(log A) = A", rel, 1e4, &mut |i| {
        let scale = i.a.spectral_norm();
        let mut worst = 0.0f64;
        for q in [2.0, 0.5, -1.0] {
            let back = fun_calc(&fun_calc(&i.a, FunctionTag::Power(q))?, FunctionTag::Power(1.0 / q))?;
            worst = worst.max(back.sub(&i.a)?.spectral_norm() / scale);
        }
        let back = fun_calc(&fun_calc(&i.a, FunctionTag::Log)?, FunctionTag::Exp)?;
        Ok(-worst.max(back.sub(&i.a)?.spectral_norm() / scale))
    }));
    out.push(prop("spectral-endpoints", "inf and sup of delta over unit vectors are the spectral endpoints", 0.0, COND_MAX, &mut |i| {
        let cert = endpoint_certificate(&i.a, 32, &mut i.rng)?;
        Ok(if cert.brackets() { 0.0 } else { -1.0 })
    }));
    out
}
