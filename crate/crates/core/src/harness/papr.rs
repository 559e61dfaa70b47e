use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::payload_symbols;
use crate::error::Result;
use crate::mapping::Modulation;
use crate::metrics::{oversample, papr_db, PaprSampleSet};
use crate::txchain::{Scheme, SchemeConfig, Transmitter};

/// CCDF thresholds: 0 to 14 dB in 0.1 dB steps.
pub fn ccdf_thresholds() -> Vec<f64> {
    (0..=140).map(|i| i as f64 / 10.0).collect()
}

/// Per-user per-block PAPR values for one (scheme, K, modulation).
#[derive(Debug, Clone, PartialEq)]
pub struct PaprPoint {
    pub scheme: Scheme,
    pub n: usize,
    pub k: usize,
    pub modulation: Modulation,
    pub samples: PaprSampleSet,
}

/// Every configured point. Samples are ordered by block, then user.
pub fn run_papr_experiment(cfg: &ExperimentConfig) -> Result<Vec<PaprPoint>> {
    let mut points = Vec::new();
    for &modulation in &cfg.modulations {
        for &k in &cfg.k {
            let txs = cfg
                .schemes
                .iter()
                .map(|&s| {
                    Transmitter::new(SchemeConfig::new(
                        s,
                        cfg.n,
                        k,
                        cfg.cp_for(cfg.n),
                        modulation,
                    )?)
                })
                .collect::<Result<Vec<_>>>()?;
            let per_block = (0..cfg.blocks as u64)
                .into_par_iter()
                .map(|block| block_paprs(cfg, &txs, block))
                .collect::<Result<Vec<_>>>()?;
            for (i, &scheme) in cfg.schemes.iter().enumerate() {
                let samples = per_block
                    .iter()
                    .flat_map(|b| b[i].iter().copied())
                    .collect();
                points.push(PaprPoint {
                    scheme,
                    n: cfg.n,
                    k,
                    modulation,
                    samples,
                });
            }
        }
    }
    Ok(points)
}

/// `[scheme][user]` PAPR values of one block.
fn block_paprs(cfg: &ExperimentConfig, txs: &[Transmitter], block: u64) -> Result<Vec<Vec<f64>>> {
    let first = txs[0].config();
    let payloads = (0..first.k)
        .map(|user| {
            payload_symbols(cfg.seed, block, user, first.m(), first.modulation).map(|(_, s)| s)
        })
        .collect::<Result<Vec<_>>>()?;
    txs.iter()
        .map(|tx| {
            payloads
                .iter()
                .enumerate()
                .map(|(user, s)| {
                    let out = tx.transmit(s, user)?;
                    let x = if cfg.papr_with_cp {
                        &out.samples[..]
                    } else {
                        out.body()
                    };
                    papr_db(&oversample(x, cfg.oversample)?)
                })
                .collect()
        })
        .collect()
}
