//! Named comparison suites with fixed adversaries and statements, as run by
//! the command line and the acceptance tests.

use super::chains::*;
use super::simulators::SIMULATOR_NOTE;
use super::stats::{hybrid_chain_check, ChainReport};
use crate::protocols::coinflip::party_a;
use crate::protocols::{demo_statement, CoinflipParams, SubproofMode, ZkaokParams, ZkcfParams};
use serde::{Deserialize, Serialize};

pub const SUITES: [&str; 3] = ["cf-corrupt-a", "zkaok-prover-chain", "zkcf-verifier-chain"];

/// Largest estimate allowed on the pseudorandom-vs-uniform link.
pub const S2_LINK_MAX: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub chain: ChainReport,
    /// What `pass` checks.
    pub criterion: String,
    pub pass: bool,
    pub note: String,
}

/// Runs `suite` with `trials` samples per machine and link. `n` and `mode`
/// override the suite's defaults.
pub fn run_suite(suite: &str, n: Option<usize>, mode: Option<SubproofMode>, trials: usize, seed: u64) -> Result<SuiteReport, String> {
    let (params, chain, criterion, pass): (serde_json::Value, ChainReport, String, fn(&ChainReport) -> bool) = match suite {
        "cf-corrupt-a" => {
            let mut p = CoinflipParams::hybrid(n.unwrap_or(8));
            if mode == Some(SubproofMode::Micro) {
                return Err("the corrupt-A simulator reads the opening from hybrid subproofs".into());
            }
            p.mode = SubproofMode::Hybrid;
            let pair = cf_corrupt_a_pair(p, party_a(p));
            let report = hybrid_chain_check(&pair, trials, &cf_corrupt_a_projection, seed);
            (json(&p), report, "real vs ideal estimate within its radius".into(), |r| {
                r.links.iter().all(|l| l.tv.estimate <= l.tv.radius)
            })
        }
        "zkaok-prover-chain" => {
            let mut p = ZkaokParams::micro(n.unwrap_or(4));
            if let Some(m) = mode {
                p.mode = m;
            }
            let (x, w) = demo_statement(if p.mode == SubproofMode::Micro { 3 } else { 5 });
            let report = hybrid_chain_check(&zkaok_prover_chain(p, &x, &w), trials, &zkaok_prover_projection, seed);
            (json(&p), report, "every link reports an estimate".into(), |r| r.links.len() == 4)
        }
        "zkcf-verifier-chain" => {
            let mut p = ZkcfParams::hybrid(n.unwrap_or(64));
            if let Some(m) = mode {
                p = if m == SubproofMode::Micro { ZkcfParams::micro(p.n) } else { p };
            }
            let (x, w) = demo_statement(if p.mode == SubproofMode::Micro { 3 } else { 5 });
            let proj = zkcf_s2_projection(p, 4);
            let report = hybrid_chain_check(&zkcf_verifier_chain(p, &x, &w), trials, &proj, seed);
            (json(&p), report, format!("link M2 -> M3 estimate below {S2_LINK_MAX}"), |r| {
                r.links.get(2).is_some_and(|l| l.tv.estimate < S2_LINK_MAX)
            })
        }
        other => return Err(format!("unknown suite {other:?}; known: {}", SUITES.join(", "))),
    };
    Ok(SuiteReport { suite: suite.into(), params, seed, pass: pass(&chain), chain, criterion, note: SIMULATOR_NOTE.into() })
}

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("parameters serialize")
}
