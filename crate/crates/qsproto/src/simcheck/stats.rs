//! Plug-in total variation estimates over projected samples.
//!
//! The radius is `(z/2) * sum_o sqrt(p1(1-p1)/N1 + p2(1-p2)/N2)` with the
//! empirical frequencies: a per-outcome normal bound summed over outcomes,
//! so it also dominates the upward bias of the plug-in estimate.

use crate::tape::derive_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Normal quantile behind every radius.
pub const Z_SCORE: f64 = 3.0;

/// A machine run many times: seed in, one classical sample out. Distinct
/// seeds give independent samples.
pub struct MachineEnsemble<T> {
    pub name: String,
    factory: Arc<dyn Fn(u64) -> T + Send + Sync>,
}

impl<T> Clone for MachineEnsemble<T> {
    fn clone(&self) -> Self {
        MachineEnsemble { name: self.name.clone(), factory: self.factory.clone() }
    }
}

impl<T> MachineEnsemble<T> {
    pub fn new(name: impl Into<String>, factory: impl Fn(u64) -> T + Send + Sync + 'static) -> Self {
        MachineEnsemble { name: name.into(), factory: Arc::new(factory) }
    }

    pub fn sample(&self, seed: u64) -> T {
        (self.factory)(seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvEstimate {
    pub estimate: f64,
    pub radius: f64,
    pub trials: usize,
    /// Outcomes seen on either side.
    pub outcomes: usize,
}

fn counts(samples: &[u16]) -> BTreeMap<u16, usize> {
    let mut m = BTreeMap::new();
    for &s in samples {
        *m.entry(s).or_insert(0) += 1;
    }
    m
}

/// The estimator on two sample vectors; symmetric, and in `[0, 1]` for
/// non-empty inputs.
pub fn tv_from_samples(s1: &[u16], s2: &[u16]) -> TvEstimate {
    let (c1, c2) = (counts(s1), counts(s2));
    let (n1, n2) = (s1.len().max(1) as f64, s2.len().max(1) as f64);
    let mut keys: Vec<u16> = c1.keys().chain(c2.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let (mut tv, mut spread) = (0.0, 0.0);
    for k in &keys {
        let p1 = *c1.get(k).unwrap_or(&0) as f64 / n1;
        let p2 = *c2.get(k).unwrap_or(&0) as f64 / n2;
        tv += (p1 - p2).abs();
        spread += (p1 * (1.0 - p1) / n1 + p2 * (1.0 - p2) / n2).sqrt();
    }
    TvEstimate {
        estimate: (tv / 2.0).min(1.0),
        radius: Z_SCORE / 2.0 * spread,
        trials: s1.len().min(s2.len()),
        outcomes: keys.len(),
    }
}

/// Seed of trial `i` on one side of a comparison.
pub fn trial_seed(seed: u64, side: &str, i: usize) -> u64 {
    let d = derive_seed(&seed.to_le_bytes(), &format!("{side}/{i}"));
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

/// Samples `trials` runs of each ensemble in parallel and compares the
/// projections. The two sides use independent seed streams.
pub fn estimate_tv<T>(
    e1: &MachineEnsemble<T>,
    e2: &MachineEnsemble<T>,
    trials: usize,
    projection: &(dyn Fn(&T) -> u16 + Sync),
    seed: u64,
) -> TvEstimate {
    let side = |e: &MachineEnsemble<T>, label: &str| -> Vec<u16> {
        (0..trials).into_par_iter().map(|i| projection(&e.sample(trial_seed(seed, label, i)))).collect()
    };
    tv_from_samples(&side(e1, "left"), &side(e2, "right"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkReport {
    pub from: String,
    pub to: String,
    pub seed: u64,
    #[serde(flatten)]
    pub tv: TvEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub machines: Vec<String>,
    pub trials: usize,
    pub seed: u64,
    pub links: Vec<LinkReport>,
    /// Triangle-inequality bound on the end-to-end distance.
    pub sum_estimate: f64,
    pub sum_radius: f64,
}

/// Link `k` compares machines `k` and `k + 1` under seed `seed + k`, so a
/// two-machine chain reproduces [`estimate_tv`] with the same seed.
pub fn hybrid_chain_check<T>(
    chain: &[MachineEnsemble<T>],
    trials: usize,
    projection: &(dyn Fn(&T) -> u16 + Sync),
    seed: u64,
) -> ChainReport {
    let links: Vec<LinkReport> = chain
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            let s = seed.wrapping_add(k as u64);
            LinkReport {
                from: w[0].name.clone(),
                to: w[1].name.clone(),
                seed: s,
                tv: estimate_tv(&w[0], &w[1], trials, projection, s),
            }
        })
        .collect();
    ChainReport {
        machines: chain.iter().map(|e| e.name.clone()).collect(),
        trials,
        seed,
        sum_estimate: links.iter().map(|l| l.tv.estimate).sum(),
        sum_radius: links.iter().map(|l| l.tv.radius).sum(),
        links,
    }
}
