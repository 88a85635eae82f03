//! Erdős–Rényi sampling and the closed-form predictions for `G(N, p)`.
//!
//! The regime index `i` is the largest integer with `δ^i ≤ N / ln N`, a
//! finite-size stand-in for `δ^i = o(N)`. All logarithms are natural;
//! `log_N(x)` is `ln x / ln N`.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use rand::distributions::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Samples `G(n, p)`: every unordered pair is an edge independently with
/// probability `p`. The same seed always gives the same graph.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidArgument("graph needs at least one node".into()));
    }
    let coin = Bernoulli::new(p).map_err(|_| Error::InvalidProbability(p))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adjacency = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if coin.sample(&mut rng) {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
    }
    Ok(Graph::from_sorted_adjacency(adjacency))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErParameters {
    pub n: usize,
    pub p: f64,
    /// Expected degree `N p`.
    pub delta: f64,
    pub i: u32,
    /// `δ^{i+1} / N`; only meaningful for `i ≥ 1`.
    pub c: Option<f64>,
    /// Error scale `max(sqrt(ln N / δ), δ^i / N)`. Diagnostic only.
    pub zeta: f64,
    pub gamma_smd: f64,
    pub gamma_md: f64,
    pub eta: f64,
    pub regime_valid: bool,
    /// Set when `ln N < δ ≤ ln^5 N`: connected, but below the density the
    /// asymptotic statements assume.
    pub connectivity_relaxed: bool,
    /// `i` was supplied by the caller rather than derived.
    pub i_forced: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundPrediction {
    pub smd_upper: f64,
    pub smd_lower: f64,
    pub md_value: f64,
    pub f_gamma: f64,
    pub f_eta: f64,
}

/// Largest `i ≥ 0` with `δ^i ≤ N / ln N`.
pub fn regime_index(n: usize, delta: f64) -> u32 {
    let limit = n as f64 / (n as f64).ln();
    let mut i = 0;
    while delta > 1.0 && delta.powi(i as i32 + 1) <= limit {
        i += 1;
    }
    i
}

pub fn er_parameters(n: usize, p: f64) -> Result<ErParameters> {
    er_parameters_with_index(n, p, None)
}

/// Like [`er_parameters`], with an optional override for the regime index.
pub fn er_parameters_with_index(n: usize, p: f64, force_i: Option<u32>) -> Result<ErParameters> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    if n < 3 {
        return Err(Error::InvalidArgument(format!("need n >= 3, got {n}")));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let delta = nf * p;
    let i = force_i.unwrap_or_else(|| regime_index(n, delta));
    let outer = delta.powi(i as i32) / nf;

    let (c, gamma_smd, gamma_md) = if i == 0 {
        let g_md = (p * p + (1.0 - p) * (1.0 - p)).sqrt();
        (None, p.max(1.0 - p), g_md)
    } else {
        let c = delta.powi(i as i32 + 1) / nf;
        let far = (-c).exp();
        let main = 1.0 - far - outer;
        (Some(c), far.max(main), (far * far + main * main).sqrt())
    };
    let eta = 1.0 + (1.0 / gamma_smd).ln().ln() / ln_n;

    Ok(ErParameters {
        n,
        p,
        delta,
        i,
        c,
        zeta: (ln_n / delta).sqrt().max(outer),
        gamma_smd,
        gamma_md,
        eta,
        regime_valid: delta > ln_n && 1.0 - p > 1.0 / nf.sqrt(),
        connectivity_relaxed: delta > ln_n && delta <= ln_n.powi(5),
        i_forced: force_i.is_some(),
    })
}

/// Leading-order SMD/MD predictions.
///
/// The lower bound takes the larger of `η · upper` and `log2 N`, capped at
/// the upper bound: when `γ_smd` falls slightly under one half at finite `N`
/// the `log2 N` floor would otherwise overshoot.
pub fn bound_prediction(params: &ErParameters) -> Result<BoundPrediction> {
    if !params.regime_valid {
        return Err(Error::RegimeInvalid(format!(
            "n={} p={} (need ln N < Np and 1-p > 1/sqrt N)",
            params.n, params.p
        )));
    }
    let ln_n = (params.n as f64).ln();
    let inv_smd = (1.0 / params.gamma_smd).ln();
    let inv_md = (1.0 / params.gamma_md).ln();
    let smd_upper = ln_n / inv_smd;
    let smd_lower = (params.eta * smd_upper).max(ln_n / LN_2).min(smd_upper);
    Ok(BoundPrediction {
        smd_upper,
        smd_lower,
        md_value: ln_n / inv_md,
        f_gamma: inv_md / inv_smd,
        f_eta: params.eta,
    })
}

/// Expected fraction of nodes at each distance `l ≥ 1` from a fixed node.
///
/// For `i = 0` the distances are 1 and 2 with masses `p` and `1 - p`. For
/// `i ≥ 1` levels `1..=i` hold `δ^l / N`, level `i + 1` holds
/// `1 - e^{-c} - δ^i / N` and level `i + 2` holds `e^{-c}`.
pub fn predicted_level_fractions(params: &ErParameters) -> Result<BTreeMap<u32, f64>> {
    if !params.regime_valid {
        return Err(Error::RegimeInvalid(format!("n={} p={}", params.n, params.p)));
    }
    let i = params.i;
    let nf = params.n as f64;
    let mut out = BTreeMap::new();
    match params.c {
        None => {
            out.insert(1, params.p);
            out.insert(2, 1.0 - params.p);
        }
        Some(c) => {
            for l in 1..=i {
                out.insert(l, params.delta.powi(l as i32) / nf);
            }
            let far = (-c).exp();
            out.insert(i + 1, 1.0 - far - params.delta.powi(i as i32) / nf);
            out.insert(i + 2, far);
        }
    }
    Ok(out)
}
