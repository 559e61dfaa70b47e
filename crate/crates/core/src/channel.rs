//! Tapped-delay-line Rayleigh channel with an exponential power-delay
//! profile, and AWGN injection at a target SNR.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::transforms::FftPlan;
use crate::C64;

/// Default sampling period: 20 MHz baseband.
pub const DEFAULT_SAMPLE_PERIOD_NS: f64 = 50.0;
/// Default power of the last tap relative to the first.
pub const DEFAULT_DECAY_FLOOR_DB: f64 = -20.0;

/// Power-delay profile parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelProfile {
    pub delay_spread_ns: f64,
    pub sample_period_ns: f64,
    pub decay_floor_db: f64,
}

impl ChannelProfile {
    pub fn new(delay_spread_ns: f64) -> Self {
        Self {
            delay_spread_ns,
            sample_period_ns: DEFAULT_SAMPLE_PERIOD_NS,
            decay_floor_db: DEFAULT_DECAY_FLOOR_DB,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delay_spread_ns.is_finite() || self.delay_spread_ns < 0.0 {
            return Err(Error::Domain(format!(
                "delay spread {} ns must be finite and non-negative",
                self.delay_spread_ns
            )));
        }
        if !self.sample_period_ns.is_finite() || self.sample_period_ns <= 0.0 {
            return Err(Error::Domain(format!(
                "sample period {} ns must be positive",
                self.sample_period_ns
            )));
        }
        Ok(())
    }

    /// `floor(delay_spread / sample_period) + 1`.
    pub fn tap_count(&self) -> usize {
        (self.delay_spread_ns / self.sample_period_ns).floor() as usize + 1
    }

    /// Mean tap powers `p_l ∝ exp(-α l)`, normalized to sum to one, with
    /// `p_{L-1} / p_0` equal to the decay floor.
    pub fn tap_powers(&self) -> Vec<f64> {
        let taps = self.tap_count();
        if taps == 1 {
            return vec![1.0];
        }
        let ratio = 10f64.powf(self.decay_floor_db / 10.0);
        let alpha = -ratio.ln() / (taps - 1) as f64;
        let raw: Vec<f64> = (0..taps).map(|l| (-alpha * l as f64).exp()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|p| p / total).collect()
    }
}

/// One user's channel for one block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub taps: Vec<C64>,
    /// Diagonal of `Λ_m`: unnormalized N-point DFT of the zero-padded taps.
    pub freq_response: Vec<C64>,
}

impl ChannelRealization {
    pub fn from_taps(taps: Vec<C64>, n: usize) -> Result<Self> {
        let freq_response = freq_response(&taps, n)?;
        Ok(Self {
            taps,
            freq_response,
        })
    }

    /// Single unit tap.
    pub fn identity(n: usize) -> Self {
        Self::from_taps(vec![C64::new(1.0, 0.0)], n).expect("identity channel")
    }
}

/// Circular complex Gaussian sample with the given variance.
pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let sigma = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * sigma, im * sigma)
}

/// Draw independent Rayleigh taps following `profile`.
pub fn draw_channel<R: Rng + ?Sized>(
    profile: &ChannelProfile,
    n: usize,
    rng: &mut R,
) -> Result<ChannelRealization> {
    profile.validate()?;
    let taps = profile
        .tap_powers()
        .into_iter()
        .map(|p| complex_gaussian(rng, p))
        .collect();
    ChannelRealization::from_taps(taps, n)
}

/// `Λ[k] = Σ_l h_l W_N^{kl}`, so the circulant with first column `h` equals
/// `F^H diag(Λ) F`.
pub fn freq_response(taps: &[C64], n: usize) -> Result<Vec<C64>> {
    if taps.len() > n {
        return Err(Error::TooManyTaps {
            taps: taps.len(),
            size: n,
        });
    }
    let plan = FftPlan::new(n)?;
    let mut buf = vec![C64::new(0.0, 0.0); n];
    buf[..taps.len()].copy_from_slice(taps);
    plan.forward(&mut buf);
    let gain = (n as f64).sqrt();
    for v in buf.iter_mut() {
        *v *= gain;
    }
    Ok(buf)
}

/// Linear convolution of `chan.taps` with a CP-extended block, truncated to
/// the block length. Taps reaching past the prefix leak energy across the
/// body boundary; nothing from a preceding block is modelled.
pub fn apply_channel(block: &[C64], chan: &ChannelRealization) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); block.len()];
    for (l, h) in chan.taps.iter().enumerate() {
        if l >= block.len() {
            break;
        }
        for (o, x) in out[l..].iter_mut().zip(block) {
            *o += h * x;
        }
    }
    out
}

/// Add circular complex Gaussian noise of per-sample variance
/// `signal_power / 10^(snr_db/10)`. `snr_db = +∞` disables the noise.
pub fn add_awgn<R: Rng + ?Sized>(
    samples: &[C64],
    snr_db: f64,
    signal_power: f64,
    rng: &mut R,
) -> Vec<C64> {
    if snr_db == f64::INFINITY {
        return samples.to_vec();
    }
    let variance = noise_variance(snr_db, signal_power);
    samples
        .iter()
        .map(|s| s + complex_gaussian(rng, variance))
        .collect()
}

pub fn noise_variance(snr_db: f64, signal_power: f64) -> f64 {
    signal_power / 10f64.powf(snr_db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::dft;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn max_err(a: &[C64], b: &[C64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
        (0..n).map(|_| complex_gaussian(rng, 1.0)).collect()
    }

    fn circular_conv(x: &[C64], h: &[C64]) -> Vec<C64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                h.iter()
                    .enumerate()
                    .map(|(l, hl)| hl * x[(i + n - l) % n])
                    .sum()
            })
            .collect()
    }

    #[test]
    fn short_spread_gives_single_tap() {
        let p = ChannelProfile::new(30.0);
        assert_eq!(p.tap_count(), 1);
        assert_eq!(p.tap_powers(), vec![1.0]);
        assert_eq!(ChannelProfile::new(300.0).tap_count(), 7);
        assert_eq!(ChannelProfile::new(3500.0).tap_count(), 71);
    }

    #[test]
    fn decay_floor_is_exact() {
        let p = ChannelProfile::new(350.0);
        let pw = p.tap_powers();
        assert_eq!(pw.len(), 8);
        assert!((pw[7] / pw[0] - 0.01).abs() < 1e-12);
        assert!((pw.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for w in pw.windows(3) {
            assert!((w[1] / w[0] - w[2] / w[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(ChannelProfile::new(-1.0).validate().is_err());
        let mut p = ChannelProfile::new(100.0);
        p.sample_period_ns = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn mean_total_tap_power_is_one() {
        let p = ChannelProfile::new(350.0);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let draws = 100_000;
        let mean: f64 = (0..draws)
            .map(|_| {
                draw_channel(&p, 8, &mut rng)
                    .unwrap()
                    .taps
                    .iter()
                    .map(|h| h.norm_sqr())
                    .sum::<f64>()
            })
            .sum::<f64>()
            / draws as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean power {mean}");
    }

    #[test]
    fn per_bin_gain_is_unit_on_average() {
        let p = ChannelProfile::new(300.0);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let n = 32;
        let draws = 40_000;
        let mut acc = vec![0.0; n];
        for _ in 0..draws {
            let c = draw_channel(&p, n, &mut rng).unwrap();
            for (a, v) in acc.iter_mut().zip(&c.freq_response) {
                *a += v.norm_sqr();
            }
        }
        for a in acc {
            assert!((a / draws as f64 - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn identity_and_pure_delay_responses() {
        let one = freq_response(&[C64::new(1.0, 0.0)], 8).unwrap();
        assert!(max_err(&one, &[C64::new(1.0, 0.0); 8]) < 1e-15);
        let delay = freq_response(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)], 4).unwrap();
        let expect = [
            C64::new(1.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, 1.0),
        ];
        assert!(max_err(&delay, &expect) < 1e-15);
        assert!(matches!(
            freq_response(&[C64::new(1.0, 0.0); 5], 4),
            Err(Error::TooManyTaps { taps: 5, size: 4 })
        ));
    }

    #[test]
    fn circulant_factorizes_through_response() {
        let n = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let taps = random_vec(3, &mut rng);
        let lam = freq_response(&taps, n).unwrap();
        // F^H diag(Λ) F applied column by column to the identity.
        for col in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[col] = C64::new(1.0, 0.0);
            let spec: Vec<C64> = dft(&e)
                .unwrap()
                .iter()
                .zip(&lam)
                .map(|(a, b)| a * b)
                .collect();
            let via_freq = crate::transforms::idft(&spec).unwrap();
            for row in 0..n {
                let dense = if (row + n - col) % n < 3 {
                    taps[(row + n - col) % n]
                } else {
                    C64::new(0.0, 0.0)
                };
                assert!((dense - via_freq[row]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_channel_passes_through() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let x = random_vec(40, &mut rng);
        assert_eq!(apply_channel(&x, &ChannelRealization::identity(32)), x);
    }

    #[test]
    fn within_prefix_channel_is_circular_on_body() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let (n, cp) = (32, 8);
        let body = random_vec(n, &mut rng);
        let taps = random_vec(cp + 1, &mut rng);
        let chan = ChannelRealization::from_taps(taps.clone(), n).unwrap();
        let block = crate::txchain::add_cp(&body, cp).unwrap();
        let rx = apply_channel(&block, &chan);
        assert!(max_err(&rx[cp..], &circular_conv(&body, &taps)) < 1e-12);
    }

    #[test]
    fn channel_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let a = random_vec(20, &mut rng);
        let b = random_vec(20, &mut rng);
        let chan = ChannelRealization::from_taps(random_vec(4, &mut rng), 16).unwrap();
        let sum: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let lhs = apply_channel(&sum, &chan);
        let rhs: Vec<C64> = apply_channel(&a, &chan)
            .iter()
            .zip(apply_channel(&b, &chan))
            .map(|(x, y)| x + y)
            .collect();
        assert!(max_err(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn awgn_disabled_at_infinite_snr() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let x = random_vec(16, &mut rng);
        assert_eq!(add_awgn(&x, f64::INFINITY, 1.0, &mut rng), x);
        assert_eq!(noise_variance(0.0, 1.0), 1.0);
    }

    #[test]
    fn awgn_variance_matches_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        let zeros = vec![C64::new(0.0, 0.0); 1_000_000];
        for (snr, power) in [(0.0, 1.0), (13.0, 2.5)] {
            let noisy = add_awgn(&zeros, snr, power, &mut rng);
            let var = noisy.iter().map(|v| v.norm_sqr()).sum::<f64>() / noisy.len() as f64;
            let target = noise_variance(snr, power);
            assert!(
                (var / target - 1.0).abs() < 0.01,
                "snr {snr}: {var} vs {target}"
            );
        }
        // Sanity on the phase distribution: circular, not real-only.
        let noisy = add_awgn(&zeros[..10_000], 0.0, 1.0, &mut rng);
        let im: f64 = noisy.iter().map(|v| v.im * v.im).sum::<f64>() / 10_000.0;
        assert!((im - 0.5).abs() < 0.05);
    }
}
