use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::payload_symbols;
use crate::error::Result;
use crate::metrics::{welch_psd, PsdEstimate};
use crate::txchain::{SchemeConfig, Transmitter};
use crate::C64;

/// Welch estimate of one transmitted stream.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdStream {
    /// `user<one-based index>` or `total`.
    pub id: String,
    pub estimate: PsdEstimate,
}

/// Spectra of the selected users' CP-extended block streams and of their
/// superposition over all users.
pub fn run_psd_experiment(cfg: &ExperimentConfig) -> Result<Vec<PsdStream>> {
    let modulation = cfg.modulations[0];
    let sc = SchemeConfig::new(
        cfg.psd_scheme,
        cfg.psd_n,
        cfg.psd_k,
        cfg.cp_for(cfg.psd_n),
        modulation,
    )?;
    let tx = Transmitter::new(sc)?;
    let blocks = (0..cfg.psd_blocks as u64)
        .into_par_iter()
        .map(|block| {
            let mut total = vec![C64::new(0.0, 0.0); sc.n + sc.cp_len];
            let mut selected = vec![Vec::new(); cfg.psd_users.len()];
            for user in 0..sc.k {
                let (_, s) = payload_symbols(cfg.seed, block, user, sc.m(), modulation)?;
                let out = tx.transmit(&s, user)?;
                for (t, v) in total.iter_mut().zip(&out.samples) {
                    *t += v;
                }
                for (slot, &u) in selected.iter_mut().zip(&cfg.psd_users) {
                    if u == user {
                        *slot = out.samples.clone();
                    }
                }
            }
            Ok((selected, total))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut streams = Vec::with_capacity(cfg.psd_users.len() + 1);
    for (i, &u) in cfg.psd_users.iter().enumerate() {
        let stream: Vec<C64> = blocks
            .iter()
            .flat_map(|(sel, _)| sel[i].iter().copied())
            .collect();
        streams.push(PsdStream {
            id: format!("user{}", u + 1),
            estimate: welch_psd(&stream, cfg.psd_segment, cfg.psd_overlap)?,
        });
    }
    let total: Vec<C64> = blocks.iter().flat_map(|(_, t)| t.iter().copied()).collect();
    streams.push(PsdStream {
        id: "total".into(),
        estimate: welch_psd(&total, cfg.psd_segment, cfg.psd_overlap)?,
    });
    Ok(streams)
}
