//! Closed-form complex operation counts under a radix-2 FFT model.
//!
//! An L-point transform costs `L/2 · log2 L` multiplications and
//! `L · log2 L` additions. Transmit counts are per user; receive counts
//! cover all `K` users at the base station; totals are `K · tx + rx`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::transforms::check_pow2;
use crate::txchain::Scheme;

/// (N, K) pairs of the reference comparison table.
pub const REFERENCE_ROWS: [(u64, u64); 21] = [
    (128, 8),
    (128, 32),
    (128, 64),
    (128, 128),
    (256, 8),
    (256, 32),
    (256, 64),
    (256, 128),
    (256, 256),
    (512, 8),
    (512, 32),
    (512, 64),
    (512, 128),
    (512, 256),
    (512, 512),
    (1024, 8),
    (1024, 32),
    (1024, 64),
    (1024, 128),
    (1024, 256),
    (1024, 512),
];

pub const CSV_HEADER: &str = "scheme,N,K,M,tx_mult,tx_add,rx_mult,rx_add,tot_mult,tot_add";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityReport {
    pub scheme: Scheme,
    pub n: u64,
    pub k: u64,
    pub m: u64,
    pub tx_mult: u64,
    pub tx_add: u64,
    pub rx_mult: u64,
    pub rx_add: u64,
    pub tot_mult: u64,
    pub tot_add: u64,
}

impl ComplexityReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.scheme,
            self.n,
            self.k,
            self.m,
            self.tx_mult,
            self.tx_add,
            self.rx_mult,
            self.rx_add,
            self.tot_mult,
            self.tot_add
        )
    }
}

fn log2(x: u64) -> u64 {
    x.trailing_zeros() as u64
}

/// `(mults, adds)` of one L-point radix-2 transform.
fn fft(l: u64) -> (u64, u64) {
    (l * log2(l) / 2, l * log2(l))
}

fn validate(n: u64, k: u64) -> Result<u64> {
    check_pow2(n as usize)?;
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::NotDivisible {
            subcarriers: n as usize,
            users: k as usize,
        });
    }
    Ok(n / k)
}

pub fn op_counts(scheme: Scheme, n: u64, k: u64) -> Result<ComplexityReport> {
    let m = validate(n, k)?;
    let (fn_mult, fn_add) = fft(n);
    let (fm_mult, fm_add) = fft(m);
    let ((tx_mult, tx_add), (rx_mult, rx_add)) = match scheme {
        Scheme::Ofdma => ((fn_mult, fn_add), (fn_mult + n, fn_add)),
        Scheme::ScFdma => (
            (fn_mult + fm_mult, fn_add + fm_add),
            (fn_mult + k * (fm_mult + m), fn_add + k * fm_add),
        ),
        Scheme::POfdma => ((fm_mult + n, fm_add), (k * (n + fm_mult + m), k * fm_add)),
        Scheme::POfdmaDct => (
            (2 * fm_mult + n, 2 * fm_add),
            (k * (n + 2 * fm_mult + m), k * 2 * fm_add),
        ),
        Scheme::POfdmaDft => ((n, 0), (k * (n + 2 * fm_mult + m), k * 2 * fm_add)),
    };
    Ok(ComplexityReport {
        scheme,
        n,
        k,
        m,
        tx_mult,
        tx_add,
        rx_mult,
        rx_add,
        tot_mult: k * tx_mult + rx_mult,
        tot_add: k * tx_add + rx_add,
    })
}

/// Simplified whole-uplink totals `(mults, adds)` for OFDMA and P-OFDMA,
/// written in terms of `N` and `M` only.
pub fn total_counts(scheme: Scheme, n: u64, m: u64) -> Result<(u64, u64)> {
    check_pow2(n as usize)?;
    check_pow2(m as usize)?;
    if !n.is_multiple_of(m) {
        return Err(Error::NotDivisible {
            subcarriers: n as usize,
            users: m as usize,
        });
    }
    let k = n / m;
    match scheme {
        Scheme::Ofdma => Ok(((k + 1) * n / 2 * log2(n) + n, (k + 1) * n * log2(n))),
        Scheme::POfdma => Ok((n * log2(m) + 2 * n * n / m + n, 2 * n * log2(m))),
        other => Err(Error::Domain(format!("no closed-form total for {other}"))),
    }
}

/// Every scheme for every reference row, row-major in [`REFERENCE_ROWS`]
/// order with schemes in [`Scheme::ALL`] order.
pub fn reference_report() -> Vec<ComplexityReport> {
    REFERENCE_ROWS
        .iter()
        .flat_map(|&(n, k)| Scheme::ALL.map(|s| op_counts(s, n, k).expect("valid reference row")))
        .collect()
}

pub fn to_csv(reports: &[ComplexityReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Aligned multiplication table: one line per (N, K), Tx and Rx columns per
/// scheme. Rows for the same (N, K) must be adjacent.
pub fn to_text_table(reports: &[ComplexityReport]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:>5} {:>4} {:>4}", "N", "K", "M");
    for s in Scheme::ALL {
        let _ = write!(out, " | {:^23}", s.name());
    }
    out.push('\n');
    let _ = write!(out, "{:>15}", "");
    for _ in Scheme::ALL {
        let _ = write!(out, " | {:>11} {:>11}", "Tx (user)", "Rx (total)");
    }
    out.push('\n');
    for group in reports.chunk_by(|a, b| (a.n, a.k) == (b.n, b.k)) {
        let first = group[0];
        let _ = write!(out, "{:>5} {:>4} {:>4}", first.n, first.k, first.m);
        for s in Scheme::ALL {
            match group.iter().find(|r| r.scheme == s) {
                Some(r) => {
                    let _ = write!(out, " | {:>11} {:>11}", r.tx_mult, r.rx_mult);
                }
                None => {
                    let _ = write!(out, " | {:>11} {:>11}", "-", "-");
                }
            }
        }
        out.push('\n');
    }
    out
}
