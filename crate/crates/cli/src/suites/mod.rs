//! The verification suites. Each suite is a deterministic function of
//! [`Params`] returning one record per check.

use fsdlab::sampling::{self, LabRng};

use crate::config::RunConfig;
use crate::report::CheckRecord;

mod comparison;
mod fsdet;
mod levi;
mod maximality;
mod means;
mod orders;
mod search;

pub const SUITE_IDS: [&str; 8] = [
    "comparison-principles",
    "counterexample-search",
    "fsdet-properties",
    "levi-oracle",
    "maximality-criteria",
    "orders-furuta",
    "orders-kti",
    "orders-means",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub rel: f64,
    pub exact: f64,
    pub fd: f64,
    pub fd_step: f64,
    pub interior: usize,
    pub boundary: usize,
    pub certificate_length: usize,
    pub eps: f64,
    pub truncation: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            dims: vec![2, 4, 8, 16],
            trials: 50,
            seed: 0,
            rel: 1e-8,
            exact: 1e-10,
            fd: 1e-5,
            fd_step: 1e-4,
            interior: 64,
            boundary: 256,
            certificate_length: 32,
            eps: 0.1,
            truncation: 32,
        }
    }
}

impl Params {
    pub fn from_config(cfg: &RunConfig) -> Self {
        let d = Self::default();
        let t = &cfg.tolerances;
        let c = &cfg.catalog;
        let interior = c.interior.unwrap_or(d.interior);
        Self {
            dims: cfg.dims.clone(),
            trials: cfg.trials,
            seed: cfg.seed,
            rel: t.rel.unwrap_or(d.rel),
            exact: t.exact.unwrap_or(d.exact),
            fd: t.fd.unwrap_or(d.fd),
            fd_step: t.fd_step.unwrap_or(d.fd_step),
            interior,
            boundary: c.boundary.unwrap_or(4 * interior),
            certificate_length: c.certificate_length.unwrap_or(d.certificate_length),
            eps: c.eps.unwrap_or(d.eps),
            truncation: c.truncation.unwrap_or(d.truncation),
        }
    }

    /// Dimension of trial `t`, cycling through the configured list.
    pub fn dim(&self, t: usize) -> usize {
        self.dims[t % self.dims.len()]
    }

    /// Dimension of trial `t`, raised to at least `min`.
    pub fn dim_at_least(&self, t: usize, min: usize) -> usize {
        self.dim(t).max(min)
    }

    /// Independent stream for trial `t` of the suite with index `suite`.
    pub fn rng(&self, suite: u64, t: usize) -> LabRng {
        sampling::substream(self.seed ^ suite.wrapping_mul(0x9e37_79b9_7f4a_7c15), t as u64)
    }
}

pub fn run_suite(id: &str, p: &Params) -> Option<Vec<CheckRecord>> {
    Some(match id {
        "fsdet-properties" => fsdet::run(p),
        "orders-kti" => orders::run_kti(p),
        "orders-furuta" => orders::run_furuta(p),
        "orders-means" => means::run(p),
        "levi-oracle" => levi::run(p),
        "maximality-criteria" => maximality::run(p),
        "comparison-principles" => comparison::run(p),
        "counterexample-search" => search::run(p),
        _ => return None,
    })
}

/// One-line description per suite for `list-suites`.
pub fn describe(id: &str) -> &'static str {
    match id {
        "fsdet-properties" => "normalized determinant identities, sandwiches and reverse inequalities",
        "orders-kti" => "chaotic vs Loewner order, Kantorovich/Specht/additive forward and converse checks",
        "orders-furuta" => "Furuta-type inequality under chaotic order",
        "orders-means" => "Hadamard-product and geometric-mean determinant bounds",
        "levi-oracle" => "analytic Levi forms against finite differences, PSD and FSD fixtures",
        "maximality-criteria" => "null certificates, common ranges, majorants and the FSD necessity check",
        "comparison-principles" => "comparison principles and two-sided bounds at sampled points",
        "counterexample-search" => "random search for chaotically but not Loewner ordered pairs",
        _ => "",
    }
}
