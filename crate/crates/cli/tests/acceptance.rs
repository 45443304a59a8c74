//! One line per acceptance criterion, at the pinned trial counts and
//! tolerances. Exits nonzero when any criterion fails.

use std::process::{Command, ExitCode};

use fsdlab::fsdet::delta;
use fsdlab::orders::{chaotic_leq, classic_pair, loewner_leq};
use fsdlab::spectra::{HermitianMatrix, UnitVector};
use fsdlab_cli::config::RunConfig;
use fsdlab_cli::report::{Status, VerificationReport};
use fsdlab_cli::runner;
use serde_json::Value;

fn run(suites: &[&str], dims: Vec<usize>, trials: usize) -> VerificationReport {
    let mut cfg = RunConfig {
        suites: suites.iter().map(|s| s.to_string()).collect(),
        dims,
        trials,
        seed: 20240601,
        ..RunConfig::default()
    };
    cfg.validate().expect("valid config");
    runner::run(&cfg)
}

/// Every listed check is present and passes; returns the offenders.
fn require(report: &VerificationReport, ids: &[&str]) -> Vec<String> {
    ids.iter()
        .filter_map(|id| match report.get(id) {
            Some(r) if r.status == Status::Pass => None,
            Some(r) => Some(format!("{id}: {} (margin {:?})", r.status.as_str(), r.margin)),
            None => Some(format!("{id}: missing")),
        })
        .collect()
}

/// Every check whose id starts with `prefix` passes.
fn require_prefix(report: &VerificationReport, prefix: &str, at_least: usize) -> Vec<String> {
    let hits: Vec<_> = report.records.iter().filter(|r| r.check_id.starts_with(prefix)).collect();
    let mut bad: Vec<String> = hits
        .iter()
        .filter(|r| r.status != Status::Pass)
        .map(|r| format!("{}: {}", r.check_id, r.status.as_str()))
        .collect();
    if hits.len() < at_least {
        bad.push(format!("{prefix}*: {} checks, expected at least {at_least}", hits.len()));
    }
    bad
}

fn min_trials(report: &VerificationReport, ids: &[&str], n: usize) -> Vec<String> {
    ids.iter()
        .filter_map(|id| report.get(id).filter(|r| r.trials < n).map(|r| format!("{id}: {} trials < {n}", r.trials)))
        .collect()
}

struct Ledger {
    failed: usize,
}

impl Ledger {
    fn line(&mut self, k: usize, what: &str, problems: Vec<String>) {
        if problems.is_empty() {
            println!("[PASS] {k:>2} {what}");
        } else {
            self.failed += 1;
            println!("[FAIL] {k:>2} {what}");
            for p in problems {
                println!("         {p}");
            }
        }
    }
}

fn fixtures_classic() -> Vec<String> {
    let (a, b) = classic_pair();
    let mut bad = Vec::new();
    match (chaotic_leq(&a, &b), loewner_leq(&a, &b)) {
        (Ok(c), Ok(l)) => {
            if !(c.holds && c.margin >= -1e-10) {
                bad.push(format!("chaotic margin {}", c.margin));
            }
            if !(!l.holds && l.margin <= -0.05) {
                bad.push(format!("loewner margin {}", l.margin));
            }
        }
        (Err(e), _) | (_, Err(e)) => bad.push(e.to_string()),
    }
    bad
}

fn fixtures_delta() -> Vec<String> {
    let mut bad = Vec::new();
    let x = UnitVector::from_real(&[1.0, 1.0]).expect("nonzero");
    for t in [0.5, 1.0, 3.0] {
        let v = delta(&HermitianMatrix::scaled_identity(2, t), &x).unwrap_or(f64::NAN);
        if !((v - t).abs() <= 1e-12) {
            bad.push(format!("delta(tI) = {v} for t = {t}"));
        }
    }
    let v = delta(&HermitianMatrix::diag(&[1.0, 4.0]), &x).unwrap_or(f64::NAN);
    if !((v - 2.0).abs() <= 1e-10) {
        bad.push(format!("delta(diag(1,4)) = {v}"));
    }
    let v = delta(&HermitianMatrix::diag(&[0.0, 4.0]), &x).unwrap_or(f64::NAN);
    if v != 0.0 {
        bad.push(format!("delta(diag(0,4)) = {v}"));
    }
    bad
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("wall_time_ms");
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn determinism_and_exit_codes() -> Vec<String> {
    let bin = env!("CARGO_BIN_EXE_fsdlab");
    let mut bad = Vec::new();
    let args = ["run", "--suite", "all", "--seed", "7", "--trials", "4", "--dims", "2,5", "--format", "json"];
    let runs: Vec<_> = (0..2).map(|_| Command::new(bin).args(args).output().expect("binary runs")).collect();
    let parsed: Vec<Option<Value>> = runs
        .iter()
        .map(|o| {
            let mut v: Value = serde_json::from_slice(&o.stdout).ok()?;
            strip_timing(&mut v);
            Some(v)
        })
        .collect();
    match (&parsed[0], &parsed[1]) {
        (Some(a), Some(b)) if a == b => {}
        (Some(_), Some(_)) => bad.push("reports differ between identical runs".into()),
        _ => bad.push("report is not valid JSON".into()),
    }
    if runs[0].status.code() != Some(0) {
        bad.push(format!("passing run exited with {:?}", runs[0].status.code()));
    }
    let code = |args: &[&str]| Command::new(bin).args(args).output().expect("binary runs").status.code();
    let dir = tempfile::tempdir().expect("tempdir");
    let strict = dir.path().join("strict.toml");
    std::fs::write(&strict, "suites = [\"levi-oracle\"]\ntrials = 2\n[tolerances]\nfd = 1e-300\n").expect("write");
    let unknown = dir.path().join("unknown.toml");
    std::fs::write(&unknown, "suites = [\"all\"]\ncolour = \"blue\"\n").expect("write");
    let cases: [(&[&str], i32); 5] = [
        (&["run", "--config", strict.to_str().expect("utf8")], 1),
        (&["run", "--suite", "no-such-suite"], 2),
        (&["run"], 2),
        (&["run", "--config", unknown.to_str().expect("utf8")], 2),
        (&["run", "--suite", "all", "--dims", "0"], 2),
    ];
    for (args, want) in cases {
        let got = code(args);
        if got != Some(want) {
            bad.push(format!("{args:?}: exit {got:?}, expected {want}"));
        }
    }
    bad
}

fn main() -> ExitCode {
    let mut ledger = Ledger { failed: 0 };
    let all_dims: Vec<usize> = (2..=16).collect();

    let kti = run(&["orders-kti", "orders-furuta"], all_dims.clone(), 300);
    let mut c1 = fixtures_classic();
    c1.extend(require(&kti, &["orders-kti/classic-pair-chaotic", "orders-kti/classic-pair-not-loewner"]));
    ledger.line(1, "classic pair: chaotic order holds, Loewner order fails by >= 0.05", c1);

    let fsdet = run(&["fsdet-properties"], all_dims.clone(), 500);
    let mut c2 = fixtures_delta();
    c2.extend(require(&fsdet, &["fsdet-properties/fixture-scalar", "fsdet-properties/fixture-diagonal", "fsdet-properties/fixture-kernel"]));
    ledger.line(2, "normalized determinant fixtures", c2);

    let props = [
        "fsdet-properties/degeneracy-equivalence",
        "fsdet-properties/continuity",
        "fsdet-properties/am-gm-sandwich",
        "fsdet-properties/norm-sandwich",
        "fsdet-properties/p-mean-monotone",
        "fsdet-properties/p-mean-limit",
        "fsdet-properties/inverse-law",
        "fsdet-properties/power-law",
        "fsdet-properties/homogeneity",
        "fsdet-properties/loewner-monotone",
        "fsdet-properties/commuting-multiplicative",
        "fsdet-properties/commuting-superadditive",
        "fsdet-properties/log-concavity",
        "fsdet-properties/commutant-infimum",
    ];
    let mut c3 = require(&fsdet, &props);
    c3.extend(min_trials(&fsdet, &props, 500));
    ledger.line(3, "thirteen determinant properties, 500 instances, dims 2-16", c3);

    let rev = [
        "fsdet-properties/am-gm-sandwich",
        "fsdet-properties/specht-reverse",
        "fsdet-properties/additive-reverse",
        "fsdet-properties/dragomir-chain",
    ];
    let mut c4 = require(&fsdet, &rev);
    c4.extend(min_trials(&fsdet, &rev, 300));
    ledger.line(4, "sandwich, Specht, additive and five-term chain, >= 300 instances", c4);

    let fwd = ["orders-kti/kti-weak", "orders-kti/kti-strong", "orders-kti/kti-additive", "orders-kti/kti-mixed"];
    let mut c5 = require(&kti, &fwd);
    c5.extend(min_trials(&kti, &fwd, 300));
    c5.extend(require(&kti, &["orders-furuta/furuta-grid", "orders-furuta/furuta-r-zero", "orders-furuta/furuta-classic-pair"]));
    ledger.line(5, "forward Kantorovich-type variants and the Furuta grid, 300 pairs", c5);

    ledger.line(6, "converse probe: strong inequality fails for a non-chaotic pair", require(&kti, &["orders-kti/converse-probe"]));

    let means = run(&["orders-means"], all_dims.clone(), 200);
    ledger.line(7, "Oppenheim, supermultiplicativity and geometric-mean bounds, 200 pairs", require_prefix(&means, "orders-means/", 5));

    let levi = run(&["levi-oracle"], (2..=8).collect(), 140);
    let mut c8 = require_prefix(&levi, "levi-oracle/oracle-", 8);
    c8.extend(require_prefix(&levi, "levi-oracle/psd-", 8));
    ledger.line(8, "Levi oracle: analytic vs finite differences and PSD, every kind, dims 2-8", c8);

    ledger.line(
        9,
        "FSD fixtures: harmonic 1/n with caveat, quartic 0, weighted min w",
        require(&levi, &["levi-oracle/fsd-harmonic", "levi-oracle/fsd-quartic", "levi-oracle/fsd-weighted"]),
    );

    let rest = run(&["maximality-criteria", "comparison-principles"], vec![2, 4, 8, 16], 50);
    ledger.line(
        10,
        "maximality: certificate decay, common ranges, FSD necessity",
        require(
            &rest,
            &[
                "maximality-criteria/certificate-quartic-r1",
                "maximality-criteria/certificate-quartic-r2",
                "maximality-criteria/certificate-moving-rank",
                "maximality-criteria/common-range-kernel",
                "maximality-criteria/common-range-moving-rank",
                "maximality-criteria/fsd-necessary",
            ],
        ),
    );
    ledger.line(
        11,
        "comparison principles, bounds equality, increasing-limit demo, hypothesis gate",
        require(
            &rest,
            &[
                "comparison-principles/cp1-equality",
                "comparison-principles/cp2-equality",
                "comparison-principles/cp3-equality",
                "comparison-principles/cp4-equality",
                "comparison-principles/bounds-equality",
                "comparison-principles/bounds-sandwich",
                "comparison-principles/increasing-limit-demo",
                "comparison-principles/cp3-gate",
            ],
        ),
    );

    ledger.line(12, "deterministic reports and documented exit codes", determinism_and_exit_codes());

    println!("acceptance: {} of 12 criteria pass", 12 - ledger.failed);
    if ledger.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
