//! Monte Carlo orchestration and CSV persistence.
//!
//! Every experiment runs on a rayon pool of `workers` threads. Per-block
//! results are collected in block order before they are reduced, so the
//! output bytes do not depend on the thread count.

pub mod ber;
pub mod config;
pub mod papr;
pub mod psd;
pub mod rng;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;

pub use ber::{run_ber_experiment, sweep_points, BerPoint};
pub use config::{parse_config, parse_snr_grid, BerSweep, ExperimentConfig, Overrides};
pub use papr::{ccdf_thresholds, run_papr_experiment, PaprPoint};
pub use psd::{run_psd_experiment, PsdStream};

use crate::complexity::{self, ComplexityReport};
use crate::error::{Error, Result};
use crate::mapping::{qam_modulate, Modulation};
use crate::txchain::Scheme;
use crate::C64;
use rng::{substream, Purpose};

pub const VERSION: &str = concat!("pofdma ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Papr,
    Ber,
    Psd,
    Complexity,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [
        Experiment::Papr,
        Experiment::Ber,
        Experiment::Psd,
        Experiment::Complexity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Papr => "papr",
            Experiment::Ber => "ber",
            Experiment::Psd => "psd",
            Experiment::Complexity => "complexity",
        }
    }
}

/// Random payload bits of one user in one block and their symbols.
pub fn payload_symbols(
    seed: u64,
    block: u64,
    user: usize,
    m: usize,
    modulation: Modulation,
) -> Result<(Vec<u8>, Vec<C64>)> {
    let mut rng = substream(seed, Purpose::Payload, block, user as u64);
    let bits: Vec<u8> = (0..m * modulation.bits_per_symbol())
        .map(|_| rng.random::<bool>() as u8)
        .collect();
    let symbols = qam_modulate(&bits, modulation)?;
    Ok((bits, symbols))
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scheme: Scheme,
    pub n: usize,
    pub k: usize,
    pub modulation: Modulation,
    pub snr_db: Option<f64>,
    pub delay_spread_ns: Option<f64>,
    pub metric: &'static str,
    pub value: f64,
    pub samples: u64,
    pub seed: u64,
}

const SUMMARY_HEADER: &str = "scheme,N,K,modulation,snr_db,delay_ns,metric,value,samples,seed";

impl ResultRow {
    fn csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.scheme,
            self.n,
            self.k,
            self.modulation,
            opt(self.snr_db),
            opt(self.delay_spread_ns),
            self.metric,
            fmt_f64(self.value),
            self.samples,
            self.seed
        )
    }
}

fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

/// `#` metadata block shared by every CSV.
fn metadata(cfg: &ExperimentConfig, experiment: &str, conventions: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {VERSION}");
    let _ = writeln!(s, "# experiment: {experiment}");
    let _ = writeln!(s, "# seed: {}", cfg.seed);
    for c in conventions {
        let _ = writeln!(s, "# convention: {c}");
    }
    for line in cfg.to_toml().lines() {
        let _ = writeln!(s, "# config: {line}");
    }
    s
}

fn papr_conventions(cfg: &ExperimentConfig) -> Vec<String> {
    vec![
        format!(
            "papr per user per block, oversample {}, cyclic prefix {}",
            cfg.oversample,
            if cfg.papr_with_cp {
                "included"
            } else {
                "excluded"
            }
        ),
        "avg_papr_db is the arithmetic mean of per-block dB values".into(),
        "ccdf is the fraction of samples strictly above threshold_db".into(),
    ]
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Create `dir` and check that it accepts writes.
pub fn probe_output_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".write-probe");
    write_file(&probe, "")?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

pub fn papr_csvs(cfg: &ExperimentConfig, points: &[PaprPoint]) -> Result<(String, String)> {
    let meta = metadata(cfg, "papr", &papr_conventions(cfg));
    let thresholds = ccdf_thresholds();
    let mut ccdf = meta.clone();
    ccdf.push_str("scheme,N,K,modulation,threshold_db,ccdf\n");
    let mut avg = meta;
    avg.push_str("scheme,N,K,modulation,avg_papr_db,samples\n");
    for p in points {
        for (z, c) in thresholds.iter().zip(p.samples.ccdf(&thresholds)?) {
            let _ = writeln!(
                ccdf,
                "{},{},{},{},{z:.1},{c}",
                p.scheme, p.n, p.k, p.modulation
            );
        }
        let _ = writeln!(
            avg,
            "{},{},{},{},{},{}",
            p.scheme,
            p.n,
            p.k,
            p.modulation,
            p.samples.average()?,
            p.samples.len()
        );
    }
    Ok((ccdf, avg))
}

pub fn ber_csv(cfg: &ExperimentConfig, points: &[BerPoint]) -> String {
    let conventions = vec![
        format!(
            "noise variance = {} / 10^(snr_db/10) per sample; snr_db inf disables noise",
            ber::SIGNAL_POWER
        ),
        "fresh channel per block per user; genie channel knowledge; zero-forcing".into(),
        "bits = blocks x K x M x bits per symbol".into(),
    ];
    let mut s = metadata(cfg, "ber", &conventions);
    s.push_str("scheme,N,K,modulation,snr_db,delay_ns,ber,bits\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            p.scheme,
            p.n,
            p.k,
            p.modulation,
            fmt_f64(p.snr_db),
            fmt_f64(p.delay_ns),
            p.counter.value(),
            p.counter.bits_total
        );
    }
    s
}

pub fn psd_csv(cfg: &ExperimentConfig, streams: &[PsdStream]) -> String {
    let conventions = vec![
        format!(
            "welch: hann window, segment {}, overlap {}, bins sum to mean power",
            cfg.psd_segment, cfg.psd_overlap
        ),
        "bin is the fft-shifted signed index; freq_norm in cycles per sample".into(),
    ];
    let mut s = metadata(cfg, "psd", &conventions);
    s.push_str("stream_id,bin,freq_norm,psd_db\n");
    for st in streams {
        let e = &st.estimate;
        for ((b, f), db) in e.bins.iter().zip(&e.freq_norm).zip(e.psd_db()) {
            let _ = writeln!(s, "{},{b},{f},{db}", st.id);
        }
    }
    s
}

pub fn run_complexity_report(
    cfg: &ExperimentConfig,
) -> Result<(Vec<ComplexityReport>, String, String)> {
    let reports = complexity::reference_report();
    let mut csv = metadata(
        cfg,
        "complexity",
        &["radix-2 counts; tx per user, rx total at the base station, tot = K*tx + rx".into()],
    );
    csv.push_str(&complexity::to_csv(&reports));

    let mut text = complexity::to_text_table(&reports);
    text.push_str("\nClosed-form totals against K*tx + rx:\n");
    for &(n, k) in &complexity::REFERENCE_ROWS {
        let m = n / k;
        for scheme in [Scheme::Ofdma, Scheme::POfdma] {
            let closed = complexity::total_counts(scheme, n, m)?;
            let r = complexity::op_counts(scheme, n, k)?;
            let _ = writeln!(
                text,
                "{:>5} {:>4} {:>4} {:<8} closed ({}, {}) aggregated ({}, {}){}",
                n,
                k,
                m,
                scheme.name(),
                closed.0,
                closed.1,
                r.tot_mult,
                r.tot_add,
                if closed == (r.tot_mult, r.tot_add) {
                    ""
                } else {
                    " MISMATCH"
                }
            );
        }
    }
    let o = complexity::total_counts(Scheme::Ofdma, 1024, 16)?;
    let p = complexity::total_counts(Scheme::POfdma, 1024, 16)?;
    let _ = writeln!(
        text,
        "\nN=1024 M=16: OFDMA/P-OFDMA multiplications {:.4}x, additions {:.4}x",
        o.0 as f64 / p.0 as f64,
        o.1 as f64 / p.1 as f64
    );
    Ok((reports, csv, text))
}

/// Files written by [`run`] and the rows of `summary.csv`.
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub rows: Vec<ResultRow>,
}

/// Run the selected experiments and write their CSVs to `cfg.out`. The
/// output directory is checked before any computation.
pub fn run(cfg: &ExperimentConfig, experiments: &[Experiment]) -> Result<RunSummary> {
    probe_output_dir(&cfg.out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))?;
    pool.install(|| run_in_pool(cfg, experiments))
}

fn run_in_pool(cfg: &ExperimentConfig, experiments: &[Experiment]) -> Result<RunSummary> {
    let mut summary = RunSummary::default();
    let emit = |summary: &mut RunSummary, name: &str, contents: &str| -> Result<()> {
        let path = cfg.out.join(name);
        write_file(&path, contents)?;
        summary.files.push(path);
        Ok(())
    };
    for &exp in experiments {
        match exp {
            Experiment::Papr => {
                let points = run_papr_experiment(cfg)?;
                let (ccdf, avg) = papr_csvs(cfg, &points)?;
                emit(&mut summary, "ccdf.csv", &ccdf)?;
                emit(&mut summary, "avg_papr.csv", &avg)?;
                for p in &points {
                    summary.rows.push(ResultRow {
                        scheme: p.scheme,
                        n: p.n,
                        k: p.k,
                        modulation: p.modulation,
                        snr_db: None,
                        delay_spread_ns: None,
                        metric: "avg_papr_db",
                        value: p.samples.average()?,
                        samples: p.samples.len() as u64,
                        seed: cfg.seed,
                    });
                }
            }
            Experiment::Ber => {
                let points = run_ber_experiment(cfg)?;
                emit(&mut summary, "ber.csv", &ber_csv(cfg, &points))?;
                for p in &points {
                    summary.rows.push(ResultRow {
                        scheme: p.scheme,
                        n: p.n,
                        k: p.k,
                        modulation: p.modulation,
                        snr_db: Some(p.snr_db),
                        delay_spread_ns: Some(p.delay_ns),
                        metric: "ber",
                        value: p.counter.value(),
                        samples: p.counter.bits_total,
                        seed: cfg.seed,
                    });
                }
            }
            Experiment::Psd => {
                let streams = run_psd_experiment(cfg)?;
                emit(&mut summary, "psd.csv", &psd_csv(cfg, &streams))?;
            }
            Experiment::Complexity => {
                let (_, csv, text) = run_complexity_report(cfg)?;
                emit(&mut summary, "complexity.csv", &csv)?;
                emit(&mut summary, "complexity.txt", &text)?;
            }
        }
    }
    let names: Vec<&str> = experiments.iter().map(|e| e.name()).collect();
    let mut s = metadata(cfg, &names.join("+"), &[]);
    s.push_str(SUMMARY_HEADER);
    s.push('\n');
    for row in &summary.rows {
        s.push_str(&row.csv());
        s.push('\n');
    }
    emit(&mut summary, "summary.csv", &s)?;
    Ok(summary)
}
