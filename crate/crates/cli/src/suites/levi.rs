use fsdlab::fsdet::delta;
use fsdlab::levi::{
    fsd, fsd_certificate, l2_log_state, levi_fd, midpoint_grid, TestFunction, CATALOG_IDS,
};
use fsdlab::sampling;
use fsdlab::spectra::{c, is_psd, CVector, HermitianMatrix, C64};
use serde_json::json;

use super::Params;
use crate::report::{rel_eq, vector_json, Check, CheckRecord};

const SUITE: &str = "levi-oracle";
const RADIUS: f64 = 1.5;

fn oracle_and_psd(p: &Params, id: &str, stream: u64) -> [CheckRecord; 2] {
    let mut oracle = Check::new(SUITE, &format!("oracle-{id}"), "analytic Levi form equals the finite-difference Levi form", p.fd);
    let mut psd = Check::new(SUITE, &format!("psd-{id}"), "Levi form of a C^2 plurisubharmonic function is PSD", 0.0);
    for t in 0..p.trials {
        let mut rng = p.rng(stream, t);
        let n = p.dim(t);
        let z = sampling::random_ball_point(&CVector::zeros(n), RADIUS, &mut rng);
        let w = || json!({"id": id, "n": n, "z": vector_json(&z)});
        let f = match TestFunction::from_id(id, n) {
            Ok(f) => f,
            Err(e) => {
                oracle.error(&e, w);
                continue;
            }
        };
        match (f.levi_analytic(&z), levi_fd(&f, &z, p.fd_step)) {
            (Ok(exact), Ok(approx)) => {
                let err = approx.sub(&exact).map(|d| d.spectral_norm()).unwrap_or(f64::NAN) / exact.spectral_norm().max(1.0);
                oracle.observe(-err, w);
                match is_psd(&exact, exact.scale_hint()) {
                    Ok(chk) => psd.observe(if chk.holds { 0.0 } else { chk.margin }, w),
                    Err(e) => psd.error(e, w),
                }
            }
            (Err(e), _) | (_, Err(e)) => oracle.error(e, w),
        }
    }
    [oracle.finish(), psd.finish()]
}

fn phi_checks(p: &Params) -> [CheckRecord; 2] {
    let mut cs = Check::new(SUITE, "phi-cauchy-schwarz", "<L(z)h,h> >= (Phi'(q) + q Phi''(q)) <Ah,h> for concave Phi", p.exact);
    let mut maj = Check::new(SUITE, "phi-majorant", "L(z) <= C_G A on the working ball", p.exact);
    for t in 0..p.trials {
        let mut rng = p.rng(41, t);
        let n = p.dim(t);
        let f = TestFunction::from_id("phi-log", n).expect("catalog id");
        let z = sampling::random_ball_point(&CVector::zeros(n), 2.0, &mut rng);
        let h = sampling::complex_gaussian_vector(n, &mut rng);
        let w = || json!({"n": n, "z": vector_json(&z), "h": vector_json(&h)});
        match (f.levi_analytic(&z), f.phi_lower_bound(&z, &h), f.majorant_margin(&z)) {
            (Ok(l), Ok(Some(bound)), Ok(Some(m))) => {
                cs.observe((l.quad_form(&h) - bound) / h.norm_squared().max(1e-300), w);
                maj.observe(m, w);
            }
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => cs.error(e, w),
            _ => cs.error("phi-log lost its concave profile", w),
        }
    }
    [cs.finish(), maj.finish()]
}

fn fsd_fixtures() -> Vec<CheckRecord> {
    let mut harmonic = Check::new(SUITE, "fsd-harmonic", "harmonic truncation has FSD 1/n with a truncation caveat", 1e-12);
    for n in [4, 5, 8, 16] {
        let f = TestFunction::harmonic(n).expect("n >= 1");
        match fsd(&f, &CVector::zeros(n)) {
            Ok(v) => {
                let caveat = f.truncation_caveat().is_some();
                harmonic.observe(if caveat { -(v - 1.0 / n as f64).abs() } else { -1.0 }, || json!({"n": n, "fsd": v, "caveat": caveat}));
            }
            Err(e) => harmonic.error(e, || json!({"n": n})),
        }
    }
    let mut quartic = Check::new(SUITE, "fsd-quartic", "quartic FSD at (1, i, 0) is 0", 0.0);
    let z = CVector::from_vec(vec![c(1.0), C64::i(), c(0.0)]);
    match fsd(&TestFunction::quartic(3).expect("n >= 1"), &z) {
        Ok(v) => quartic.observe(-v.abs(), || json!({"fsd": v})),
        Err(e) => quartic.error(e, || json!(null)),
    }
    let mut weighted = Check::new(SUITE, "fsd-weighted", "weighted FSD equals the smallest weight", 1e-15);
    for w in [vec![0.3, 0.7], vec![2.0, 0.25, 1.5], vec![1.0; 4]] {
        let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
        let n = w.len();
        match fsd(&TestFunction::weighted(w.clone()).expect("nonnegative"), &CVector::from_element(n, c(0.4))) {
            Ok(v) => weighted.observe(rel_eq(v, min), || json!({"weights": w, "fsd": v})),
            Err(e) => weighted.error(e, || json!({"weights": w})),
        }
    }
    vec![harmonic.finish(), quartic.finish(), weighted.finish()]
}

fn fsd_infimum(p: &Params) -> CheckRecord {
    let mut check = Check::new(SUITE, "fsd-sampled-infimum", "FSD equals the infimum of delta over unit vectors", p.rel);
    for (k, id) in CATALOG_IDS.iter().enumerate() {
        for t in 0..p.trials.min(10) {
            let mut rng = p.rng(50 + k as u64, t);
            let n = p.dim(t);
            let f = TestFunction::from_id(id, n).expect("catalog id");
            let z = sampling::random_ball_point(&CVector::zeros(n), RADIUS, &mut rng);
            match fsd_certificate(&f, &z, 200, &mut rng) {
                Ok(cert) => check.observe(if cert.consistent(p.rel) { 0.0 } else { cert.sampled_inf - cert.fsd }, || {
                    json!({"id": id, "n": n, "z": vector_json(&z)})
                }),
                Err(e) => check.error(e, || json!({"id": id, "n": n, "z": vector_json(&z)})),
            }
        }
    }
    check.finish()
}

fn l2_trend() -> CheckRecord {
    let mut check = Check::new(SUITE, "l2-state-trend", "discretized L^2 state: delta decreases with resolution", 0.0);
    let vals: Result<Vec<f64>, _> = [16, 32, 64]
        .iter()
        .map(|&n| delta(&HermitianMatrix::diag(&midpoint_grid(n)), &l2_log_state(n)?))
        .collect();
    match vals {
        Ok(v) => {
            let drop = (v[0] - v[1]).min(v[1] - v[2]);
            check.observe(drop.min(v[2]), || json!({"values": v}));
            check.note(format!(
                "delta at n = 16, 32, 64: {:.5}, {:.5}, {:.5}; the continuum value is 0, no rate is asserted",
                v[0], v[1], v[2]
            ));
        }
        Err(e) => check.error(e, || json!(null)),
    }
    check.finish()
}

pub fn run(p: &Params) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for (k, id) in CATALOG_IDS.iter().enumerate() {
        out.extend(oracle_and_psd(p, id, 40 + 100 * k as u64));
    }
    out.extend(phi_checks(p));
    out.extend(fsd_fixtures());
    out.push(fsd_infimum(p));
    out.push(l2_trend());
    out
}
