use fsdlab::levi::{Region, TestFunction};
use fsdlab::maximality::{comparison_check, ComparisonKind, ComparisonReport, ComparisonScenario, ComparisonStatus};
use serde_json::json;

use super::Params;
use crate::report::{vector_json, Check, CheckRecord, Status};

const SUITE: &str = "comparison-principles";

fn norm2(n: usize, c: f64) -> fsdlab::Result<TestFunction> {
    TestFunction::weighted(vec![c; n])
}

fn region(p: &Params, n: usize, radius: f64, stream: u64) -> Region {
    Region::centered(n, radius)
        .with_counts(p.interior, p.boundary)
        .with_seed(p.seed ^ stream)
}

fn report_json(r: &ComparisonReport) -> serde_json::Value {
    json!({
        "kind": r.kind.name(),
        "margin": r.margin,
        "levi_margin": r.levi_margin,
        "constant": r.constant,
        "diagnostics": r.diagnostics,
        "at": r.witness.as_ref().map(vector_json),
    })
}

fn dims(p: &Params) -> Vec<usize> {
    let mut d = p.dims.clone();
    d.sort_unstable();
    d.dedup();
    d
}

/// Equality scenarios `u = v = ||z||^2`: every conclusion holds with zero slack.
fn equality(p: &Params, kind: ComparisonKind, out: &mut Vec<CheckRecord>) {
    let mut check = Check::new(
        SUITE,
        &format!("{}-equality", kind.name()),
        "comparison conclusion holds in the equality case u = v = ||z||^2",
        1e-10,
    );
    for (i, n) in dims(p).into_iter().enumerate() {
        let run = || -> fsdlab::Result<ComparisonReport> {
            let v = match kind {
                ComparisonKind::Cp1 | ComparisonKind::Cp2 => Some(norm2(n, 1.0)?),
                _ => None,
            };
            comparison_check(&ComparisonScenario::new(norm2(n, 1.0)?, v, region(p, n, 1.0, 100 + i as u64)), kind)
        };
        match run() {
            Ok(r) if r.status == ComparisonStatus::Pass => check.observe(r.margin, || report_json(&r)),
            Ok(r) => check.observe(-1.0, || report_json(&r)),
            Err(e) => check.error(e, || json!({"n": n})),
        }
    }
    out.push(check.finish());
}

fn bounds(p: &Params, out: &mut Vec<CheckRecord>) {
    let mut sandwich = Check::new(SUITE, "bounds-sandwich", "two-sided bounds hold for u with m I <= L_u <= M I", 1e-10);
    let mut tight = Check::new(SUITE, "bounds-equality", "both bounds are attained for u = c ||z||^2", 1e-10);
    for (i, n) in dims(p).into_iter().enumerate() {
        for c in [0.5, 1.0, 2.5] {
            let run = || comparison_check(&ComparisonScenario::new(norm2(n, c)?, None, region(p, n, 1.0, 200 + i as u64)), ComparisonKind::Bounds);
            match run() {
                Ok(r) => {
                    let ok = if r.status == ComparisonStatus::Pass { r.margin } else { -1.0 };
                    sandwich.observe(ok, || report_json(&r));
                    tight.observe(-r.margin.abs(), || report_json(&r));
                }
                Err(e) => sandwich.error(e, || json!({"n": n, "c": c})),
            }
        }
    }
    out.extend([sandwich.finish(), tight.finish()]);
}

fn gates(p: &Params, out: &mut Vec<CheckRecord>) {
    let n = 2;
    let u = TestFunction::weighted(vec![0.5, 1.0]);
    let run = |kind| -> fsdlab::Result<ComparisonReport> { comparison_check(&ComparisonScenario::new(u.clone()?, None, region(p, n, 1.0, 400)), kind) };
    let mut gate = Check::new(SUITE, "cp3-gate", "violated Levi hypothesis is reported, not judged", 0.0);
    match run(ComparisonKind::Cp3) {
        Ok(r) => gate.observe(if r.status == ComparisonStatus::HypothesisViolated && r.margin.is_nan() { 0.0 } else { -1.0 }, || report_json(&r)),
        Err(e) => gate.error(e, || json!(null)),
    }
    out.push(gate.finish());
    let mut record = Check::new(SUITE, "cp3-hypothesis", "cp3 applied to u with lambda_min(L_u) = 1/2 < 1", 0.0);
    match run(ComparisonKind::Cp3) {
        Ok(r) => {
            record.observe(0.0, || json!(null));
            if r.status == ComparisonStatus::HypothesisViolated {
                record.status(Status::HypothesisViolated);
                record.witness(report_json(&r));
                record.note(r.diagnostics.join("; "));
            } else {
                record.observe(-1.0, || report_json(&r));
            }
        }
        Err(e) => record.error(e, || json!(null)),
    }
    out.push(record.finish());
}

fn increasing_limit(p: &Params, out: &mut Vec<CheckRecord>) {
    let mut check = Check::new(
        SUITE,
        "increasing-limit-demo",
        "increasing limit of maximal functions stays below v = r^2 with strict inequality inside",
        0.0,
    );
    let n = 6;
    let run = || {
        let reg = Region::centered(n, 0.5).with_counts(100, p.boundary).with_seed(p.seed ^ 500);
        comparison_check(&ComparisonScenario::new(norm2(n, 1.0)?, None, reg), ComparisonKind::IncreasingLimitDemo { j: 3 })
    };
    match run() {
        Ok(r) => {
            check.observe(if r.status == ComparisonStatus::Pass && r.margin > 0.0 { 0.0 } else { -1.0 }, || report_json(&r));
            check.note(format!("strict interior gap {:.4e}", r.margin));
        }
        Err(e) => check.error(e, || json!(null)),
    }
    out.push(check.finish());
}

pub fn run(p: &Params) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for kind in [ComparisonKind::Cp1, ComparisonKind::Cp2, ComparisonKind::Cp3, ComparisonKind::Cp4] {
        equality(p, kind, &mut out);
    }
    bounds(p, &mut out);
    gates(p, &mut out);
    increasing_limit(p, &mut out);
    out
}
