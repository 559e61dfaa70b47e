use rayon::prelude::*;

use super::config::{BerSweep, ExperimentConfig};
use super::payload_symbols;
use super::rng::{substream, Purpose};
use crate::channel::{
    apply_channel, complex_gaussian, draw_channel, noise_variance, ChannelProfile,
};
use crate::error::Result;
use crate::mapping::Modulation;
use crate::metrics::BerCounter;
use crate::rxchain::{superpose, Receiver};
use crate::txchain::{remove_cp, Scheme, SchemeConfig, Transmitter};
use crate::C64;

/// Nominal received power of the superposed block: `K` users of power
/// `M/N` each.
pub const SIGNAL_POWER: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub scheme: Scheme,
    pub n: usize,
    pub k: usize,
    pub modulation: Modulation,
    pub snr_db: f64,
    pub delay_ns: f64,
    pub counter: BerCounter,
}

/// Delay spreads to simulate, each with the SNRs evaluated at it.
pub fn sweep_points(cfg: &ExperimentConfig) -> Vec<(f64, Vec<f64>)> {
    let mut out: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut add = |delay: f64, snr: f64| match out.iter_mut().find(|(d, _)| *d == delay) {
        Some((_, snrs)) => {
            if !snrs.contains(&snr) {
                snrs.push(snr);
            }
        }
        None => out.push((delay, vec![snr])),
    };
    match cfg.ber_sweep {
        BerSweep::Figures => {
            for &snr in &cfg.snr_db {
                add(cfg.ber_delay_ns, snr);
            }
            for &d in &cfg.delay_spreads_ns {
                add(d, cfg.ber_snr_db);
            }
        }
        BerSweep::Grid => {
            for &d in &cfg.delay_spreads_ns {
                for &snr in &cfg.snr_db {
                    add(d, snr);
                }
            }
        }
    }
    out
}

struct Chain {
    tx: Transmitter,
    rx: Receiver,
}

/// Full link simulation for every configured point. Within a block all
/// schemes and SNRs share the payload, channel and unit noise draws.
pub fn run_ber_experiment(cfg: &ExperimentConfig) -> Result<Vec<BerPoint>> {
    let sweep = sweep_points(cfg);
    let mut points = Vec::new();
    for &modulation in &cfg.modulations {
        for &k in &cfg.ber_k {
            let chains = cfg
                .schemes
                .iter()
                .map(|&s| {
                    let sc = SchemeConfig::new(s, cfg.n, k, cfg.cp_for(cfg.n), modulation)?;
                    Ok(Chain {
                        tx: Transmitter::new(sc)?,
                        rx: Receiver::new(sc)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            for (delay, snrs) in &sweep {
                let profile = ChannelProfile::new(*delay);
                let per_block = (0..cfg.ber_blocks as u64)
                    .into_par_iter()
                    .map(|block| block_errors(cfg, &chains, &profile, snrs, block))
                    .collect::<Result<Vec<_>>>()?;
                for (i, &scheme) in cfg.schemes.iter().enumerate() {
                    for (j, &snr_db) in snrs.iter().enumerate() {
                        let mut counter = BerCounter::new();
                        for b in &per_block {
                            counter.merge(b[i * snrs.len() + j]);
                        }
                        points.push(BerPoint {
                            scheme,
                            n: cfg.n,
                            k,
                            modulation,
                            snr_db,
                            delay_ns: *delay,
                            counter,
                        });
                    }
                }
            }
        }
    }
    Ok(points)
}

/// Counters of one block, indexed `scheme * snrs.len() + snr`.
fn block_errors(
    cfg: &ExperimentConfig,
    chains: &[Chain],
    profile: &ChannelProfile,
    snrs: &[f64],
    block: u64,
) -> Result<Vec<BerCounter>> {
    let sc = *chains[0].tx.config();
    let payloads = (0..sc.k)
        .map(|user| payload_symbols(cfg.seed, block, user, sc.m(), sc.modulation))
        .collect::<Result<Vec<_>>>()?;
    let chans = (0..sc.k)
        .map(|user| {
            draw_channel(
                profile,
                sc.n,
                &mut substream(cfg.seed, Purpose::Channel, block, user as u64),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut noise_rng = substream(cfg.seed, Purpose::Noise, block, 0);
    let unit_noise: Vec<C64> = (0..sc.n + sc.cp_len)
        .map(|_| complex_gaussian(&mut noise_rng, 1.0))
        .collect();

    let mut counters = Vec::with_capacity(chains.len() * snrs.len());
    for chain in chains {
        let received = chain_output(chain, &payloads, &chans)?;
        for &snr in snrs {
            let noisy: Vec<C64> = if snr == f64::INFINITY {
                received.clone()
            } else {
                let sigma = noise_variance(snr, SIGNAL_POWER).sqrt();
                received
                    .iter()
                    .zip(&unit_noise)
                    .map(|(r, w)| r + w * sigma)
                    .collect()
            };
            let body = remove_cp(&noisy, sc.cp_len)?;
            let mut counter = BerCounter::new();
            for est in chain.rx.receive_all(&body, &chans)? {
                counter.update(&payloads[est.user].0, &est.bits)?;
            }
            counters.push(counter);
        }
    }
    Ok(counters)
}

fn chain_output(
    chain: &Chain,
    payloads: &[(Vec<u8>, Vec<C64>)],
    chans: &[crate::channel::ChannelRealization],
) -> Result<Vec<C64>> {
    let faded = payloads
        .iter()
        .zip(chans)
        .enumerate()
        .map(|(user, ((_, s), c))| Ok(apply_channel(&chain.tx.transmit(s, user)?.samples, c)))
        .collect::<Result<Vec<_>>>()?;
    superpose(&faded)
}
