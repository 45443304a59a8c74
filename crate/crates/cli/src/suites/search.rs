use fsdlab::orders::{chaotic_leq, counterexample_search, loewner_leq};
use serde_json::json;

use super::Params;
use crate::report::{matrix_json, Check, CheckRecord};

const SUITE: &str = "counterexample-search";

/// Every reported pair is re-verified from scratch: chaotic order holds,
/// Loewner order fails.
pub fn run(p: &Params) -> Vec<CheckRecord> {
    let mut dims: Vec<usize> = p.dims.iter().copied().filter(|&d| d >= 2).collect();
    dims.sort_unstable();
    dims.dedup();
    let mut out = Vec::new();
    for n in dims {
        let mut check = Check::new(
            SUITE,
            &format!("search-dim-{n:02}"),
            "search hits are chaotically but not Loewner ordered",
            0.0,
        );
        match counterexample_search(n, p.trials, p.seed ^ n as u64) {
            Ok(rep) => {
                for pair in &rep.pairs {
                    let w = || json!({"lower": matrix_json(&pair.lower), "upper": matrix_json(&pair.upper)});
                    match (chaotic_leq(&pair.lower, &pair.upper), loewner_leq(&pair.lower, &pair.upper)) {
                        (Ok(ch), Ok(lw)) => check.observe(if ch.holds && !lw.holds { 0.0 } else { -1.0 }, w),
                        (Err(e), _) | (_, Err(e)) => check.error(e, w),
                    }
                }
                check.note(format!(
                    "classic pair verified, {} hits in {} trials (rate {:.3})",
                    rep.hits,
                    rep.trials,
                    rep.hit_rate()
                ));
            }
            Err(e) => check.error(e, || json!({"n": n})),
        }
        out.push(check.finish());
    }
    out
}
