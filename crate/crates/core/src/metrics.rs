//! PAPR, CCDF, BER and Welch PSD estimation.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::transforms::{check_pow2, FftPlan};
use crate::C64;

/// Peak-to-average power ratio in dB.
pub fn papr_db(samples: &[C64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("papr_db"));
    }
    let (peak, sum) = samples.iter().fold((0.0f64, 0.0f64), |(p, s), x| {
        let e = x.norm_sqr();
        (p.max(e), s + e)
    });
    if sum == 0.0 {
        return Err(Error::AllZero);
    }
    Ok(10.0 * (peak * samples.len() as f64 / sum).log10())
}

/// Band-limited interpolation by zero-padding the spectrum.
///
/// Every `factor`-th output sample equals the input and the mean power is
/// preserved, so the PAPR can only grow with the factor.
pub fn oversample(samples: &[C64], factor: usize) -> Result<Vec<C64>> {
    check_pow2(factor)?;
    if factor == 1 {
        return Ok(samples.to_vec());
    }
    let n = samples.len();
    let plan = FftPlan::new(n)?;
    let mut spec = samples.to_vec();
    plan.forward(&mut spec);
    let big = n * factor;
    let mut padded = vec![C64::new(0.0, 0.0); big];
    let half = n / 2;
    padded[..half].copy_from_slice(&spec[..half]);
    padded[big - (n - half)..].copy_from_slice(&spec[half..]);
    FftPlan::new(big)?.inverse(&mut padded);
    let gain = (factor as f64).sqrt();
    padded.iter_mut().for_each(|v| *v *= gain);
    Ok(padded)
}

/// Empirical Pr(PAPR > z) for each threshold.
pub fn ccdf(samples: &[f64], thresholds: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::Empty("ccdf"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(thresholds
        .iter()
        .map(|z| {
            let at_or_below = sorted.partition_point(|s| s <= z);
            (sorted.len() - at_or_below) as f64 / n
        })
        .collect())
}

/// Arithmetic mean of per-block dB values.
pub fn average_papr(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("average_papr"));
    }
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

/// PAPR values in dB collected for one configuration point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PaprSampleSet {
    samples: Vec<f64>,
}

impl PaprSampleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, papr_db: f64) {
        self.samples.push(papr_db);
    }

    /// Append `other` after the existing samples.
    pub fn merge(&mut self, other: PaprSampleSet) {
        self.samples.extend(other.samples);
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn ccdf(&self, thresholds: &[f64]) -> Result<Vec<f64>> {
        ccdf(&self.samples, thresholds)
    }

    pub fn average(&self) -> Result<f64> {
        average_papr(&self.samples)
    }
}

impl FromIterator<f64> for PaprSampleSet {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Self {
            samples: iter.into_iter().collect(),
        }
    }
}

/// Running bit-error tally.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BerCounter {
    pub bit_errors: u64,
    pub bits_total: u64,
}

impl BerCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn update(&mut self, tx_bits: &[u8], rx_bits: &[u8]) -> Result<()> {
        if tx_bits.len() != rx_bits.len() {
            return Err(Error::LengthMismatch {
                expected: tx_bits.len(),
                actual: rx_bits.len(),
            });
        }
        let errors = tx_bits.iter().zip(rx_bits).filter(|(a, b)| a != b).count();
        self.bit_errors += errors as u64;
        self.bits_total += tx_bits.len() as u64;
        Ok(())
    }

    pub fn merge(&mut self, other: BerCounter) {
        self.bit_errors += other.bit_errors;
        self.bits_total += other.bits_total;
    }

    /// Error ratio; zero before any bits are counted.
    pub fn value(&self) -> f64 {
        if self.bits_total == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits_total as f64
        }
    }

    /// Wilson score interval for the error probability at normal quantile `z`.
    pub fn wilson_interval(&self, z: f64) -> (f64, f64) {
        if self.bits_total == 0 {
            return (0.0, 1.0);
        }
        let n = self.bits_total as f64;
        let p = self.value();
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        ((centre - half).max(0.0), (centre + half).min(1.0))
    }
}

/// Welch power spectral density, bins in FFT-shifted order.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    /// Signed bin index `-L/2 ..= L/2-1`.
    pub bins: Vec<i64>,
    /// Frequency in cycles per sample.
    pub freq_norm: Vec<f64>,
    /// Linear power per bin; the bins sum to the mean signal power.
    pub power: Vec<f64>,
    pub segment: usize,
    pub overlap: f64,
    pub segments_averaged: usize,
}

impl PsdEstimate {
    pub fn psd_db(&self) -> Vec<f64> {
        self.power
            .iter()
            .map(|p| 10.0 * p.max(1e-300).log10())
            .collect()
    }

    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }

    /// Linear power at unshifted DFT bin `k`.
    pub fn at_bin(&self, k: usize) -> f64 {
        self.power[(k + self.segment / 2) % self.segment]
    }

    /// Unshifted DFT bins holding a circular local maximum no more than
    /// `within_db` below the strongest bin, in ascending order.
    pub fn peak_bins(&self, within_db: f64) -> Vec<usize> {
        let l = self.segment;
        let max = self.power.iter().cloned().fold(0.0, f64::max);
        let floor = max * 10f64.powf(-within_db / 10.0);
        let p = |k: usize| self.at_bin(k % l);
        (0..l)
            .filter(|&k| {
                let v = p(k);
                v >= floor && v > p(k + l - 1) && v >= p(k + 1)
            })
            .collect()
    }
}

/// Averaged Hann-windowed periodograms with fractional `overlap`.
pub fn welch_psd(samples: &[C64], segment: usize, overlap: f64) -> Result<PsdEstimate> {
    let plan = FftPlan::new(segment)?;
    if segment > samples.len() {
        return Err(Error::SegmentTooLong {
            segment,
            len: samples.len(),
        });
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::Domain(format!("overlap {overlap} outside [0, 1)")));
    }
    let step = ((segment as f64) * (1.0 - overlap)).round().max(1.0) as usize;
    let window: Vec<f64> = (0..segment)
        .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / segment as f64).cos())
        .collect();
    let window_energy: f64 = window.iter().map(|w| w * w).sum();

    let mut acc = vec![0.0f64; segment];
    let mut count = 0usize;
    let mut buf = vec![C64::new(0.0, 0.0); segment];
    let mut start = 0;
    while start + segment <= samples.len() {
        for ((b, x), w) in buf
            .iter_mut()
            .zip(&samples[start..start + segment])
            .zip(&window)
        {
            *b = x * w;
        }
        plan.forward(&mut buf);
        for (a, v) in acc.iter_mut().zip(&buf) {
            *a += v.norm_sqr();
        }
        count += 1;
        start += step;
    }

    let norm = count as f64 * window_energy;
    let half = segment / 2;
    let power: Vec<f64> = (0..segment)
        .map(|i| acc[(i + half) % segment] / norm)
        .collect();
    let bins: Vec<i64> = (0..segment).map(|i| i as i64 - half as i64).collect();
    let freq_norm = bins.iter().map(|&b| b as f64 / segment as f64).collect();
    Ok(PsdEstimate {
        bins,
        freq_norm,
        power,
        segment,
        overlap,
        segments_averaged: count,
    })
}
