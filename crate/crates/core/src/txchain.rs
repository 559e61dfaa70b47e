//! Transmit chains for the five uplink schemes.
//!
//! * OFDMA: user symbols on a contiguous block of subcarriers, N-point IDFT.
//! * SC-FDMA: M-point DFT spreading, then the OFDMA localized mapping.
//! * P-OFDMA: `X_m · A · F^H_M · s`, an M-point IDFT repeated K times and
//!   phase-rotated by the user's ramp. Its N-point spectrum occupies the
//!   periodic comb `(N - ell_m + K·i) mod N`.
//! * P-OFDMA-DCT: as P-OFDMA with `s` precoded by the M-point DCT-II.
//! * P-OFDMA-DFT: the M-point DFT precoder cancels the IDFT, leaving
//!   `X_m · A · s`, a phase-rotated repetition of the raw symbols.
//!
//! Every chain maps `M` symbols to an `N`-sample body with the same energy,
//! then prepends a cyclic prefix. User `m` gets offset `ell_m = m`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mapping::Modulation;
use crate::transforms::{
    check_pow2, dct_matrix, user_phase_diagonal, DctMatrix, FftPlan, OpCount, PhaseDiagonal,
    UserOffset,
};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Ofdma,
    ScFdma,
    POfdma,
    POfdmaDct,
    POfdmaDft,
}

impl Scheme {
    /// Fixed presentation order.
    pub const ALL: [Scheme; 5] = [
        Scheme::Ofdma,
        Scheme::ScFdma,
        Scheme::POfdma,
        Scheme::POfdmaDct,
        Scheme::POfdmaDft,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ofdma => "OFDMA",
            Scheme::ScFdma => "SC-FDMA",
            Scheme::POfdma => "P-OFDMA",
            Scheme::POfdmaDct => "P-OFDMA-DCT",
            Scheme::POfdmaDft => "P-OFDMA-DFT",
        }
    }

    pub fn is_periodic(self) -> bool {
        matches!(self, Scheme::POfdma | Scheme::POfdmaDct | Scheme::POfdmaDft)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "ofdma" => Ok(Scheme::Ofdma),
            "scfdma" => Ok(Scheme::ScFdma),
            "pofdma" => Ok(Scheme::POfdma),
            "pofdmadct" => Ok(Scheme::POfdmaDct),
            "pofdmadft" => Ok(Scheme::POfdmaDft),
            _ => Err(Error::Domain(format!("unknown scheme `{s}`"))),
        }
    }
}

/// One transmit chain: scheme, `N` subcarriers shared by `K` users, CP
/// length and modulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub n: usize,
    pub k: usize,
    pub cp_len: usize,
    pub modulation: Modulation,
}

impl SchemeConfig {
    pub fn new(
        scheme: Scheme,
        n: usize,
        k: usize,
        cp_len: usize,
        modulation: Modulation,
    ) -> Result<Self> {
        check_pow2(n)?;
        if k == 0 || !n.is_multiple_of(k) {
            return Err(Error::NotDivisible {
                subcarriers: n,
                users: k,
            });
        }
        if cp_len == 0 || cp_len >= n {
            return Err(Error::CyclicPrefix { cp_len, size: n });
        }
        Ok(Self {
            scheme,
            n,
            k,
            cp_len,
            modulation,
        })
    }

    /// Same as [`SchemeConfig::new`] with the default `N/4` prefix.
    pub fn with_default_cp(
        scheme: Scheme,
        n: usize,
        k: usize,
        modulation: Modulation,
    ) -> Result<Self> {
        Self::new(scheme, n, k, (n / 4).max(1), modulation)
    }

    /// Symbols per user, `N / K`.
    pub fn m(&self) -> usize {
        self.n / self.k
    }

    pub fn bits_per_user(&self) -> usize {
        self.m() * self.modulation.bits_per_symbol()
    }

    fn check_user(&self, user: usize) -> Result<()> {
        if user >= self.k {
            Err(Error::UserOutOfRange {
                user,
                users: self.k,
            })
        } else {
            Ok(())
        }
    }

    fn check_payload(&self, symbols: &[C64]) -> Result<()> {
        if symbols.len() != self.m() {
            Err(Error::LengthMismatch {
                expected: self.m(),
                actual: symbols.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Subcarriers carrying user `user`'s symbols, in symbol order.
    pub fn subcarriers(&self, user: usize) -> Vec<usize> {
        let m = self.m();
        if self.scheme.is_periodic() {
            comb_indices(self.n, self.k, user)
        } else {
            (user * m..(user + 1) * m).collect()
        }
    }
}

/// Periodic comb `(N - ell + K·i) mod N` for `i < N/K`.
pub fn comb_indices(n: usize, k: usize, ell: usize) -> Vec<usize> {
    (0..n / k).map(|i| (n - ell % n + k * i) % n).collect()
}

/// Time-domain transmit block of one user.
#[derive(Debug, Clone, PartialEq)]
pub struct TxBlock {
    pub user: usize,
    /// CP-extended samples, length `N + cp_len`.
    pub samples: Vec<C64>,
    pub payload: Vec<C64>,
    pub cp_len: usize,
    /// Complex operations executed while building the body.
    pub ops: OpCount,
}

impl TxBlock {
    /// Samples without the cyclic prefix.
    pub fn body(&self) -> &[C64] {
        &self.samples[self.cp_len..]
    }
}

/// `A · s`: `K` back-to-back copies of `s`.
pub fn repeat_map(s: &[C64], k: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(s.len() * k);
    for _ in 0..k {
        out.extend_from_slice(s);
    }
    out
}

/// Prepend the last `cp_len` samples of `body`.
pub fn add_cp(body: &[C64], cp_len: usize) -> Result<Vec<C64>> {
    if cp_len >= body.len() {
        return Err(Error::CyclicPrefix {
            cp_len,
            size: body.len(),
        });
    }
    let mut out = Vec::with_capacity(body.len() + cp_len);
    out.extend_from_slice(&body[body.len() - cp_len..]);
    out.extend_from_slice(body);
    Ok(out)
}

/// Drop the first `cp_len` samples of a CP-extended block.
pub fn remove_cp(block: &[C64], cp_len: usize) -> Result<Vec<C64>> {
    if cp_len * 2 >= block.len() {
        return Err(Error::CyclicPrefix {
            cp_len,
            size: block.len().saturating_sub(cp_len),
        });
    }
    Ok(block[cp_len..].to_vec())
}

/// Precomputed transmit tables for one [`SchemeConfig`].
#[derive(Debug, Clone)]
pub struct Transmitter {
    cfg: SchemeConfig,
    plan_n: FftPlan,
    plan_m: FftPlan,
    dct: DctMatrix,
    ramps: Vec<PhaseDiagonal>,
}

impl Transmitter {
    pub fn new(cfg: SchemeConfig) -> Result<Self> {
        let ramps = if cfg.scheme.is_periodic() {
            (0..cfg.k)
                .map(|ell| UserOffset::new(ell, cfg.n, cfg.k).map(user_phase_diagonal))
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        Ok(Self {
            cfg,
            plan_n: FftPlan::new(cfg.n)?,
            plan_m: FftPlan::new(cfg.m())?,
            dct: dct_matrix(cfg.m())?,
            ramps,
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    /// Run the chain selected by the configured scheme.
    pub fn transmit(&self, symbols: &[C64], user: usize) -> Result<TxBlock> {
        match self.cfg.scheme {
            Scheme::Ofdma => self.ofdma(symbols, user),
            Scheme::ScFdma => self.scfdma(symbols, user),
            Scheme::POfdma => self.pofdma(symbols, user),
            Scheme::POfdmaDct => self.pofdma_dct(symbols, user),
            Scheme::POfdmaDft => self.pofdma_dft(symbols, user),
        }
    }

    fn finish(
        &self,
        user: usize,
        body: Vec<C64>,
        symbols: &[C64],
        ops: OpCount,
    ) -> Result<TxBlock> {
        Ok(TxBlock {
            user,
            samples: add_cp(&body, self.cfg.cp_len)?,
            payload: symbols.to_vec(),
            cp_len: self.cfg.cp_len,
            ops,
        })
    }

    /// `X_m · A · v`, charging the `N` ramp multiplications.
    fn periodic_body(&self, v: &[C64], user: usize, ops: &mut OpCount) -> Vec<C64> {
        let repeated = repeat_map(v, self.cfg.k);
        ops.mults += self.cfg.n as u64;
        match self.ramps.get(user) {
            Some(ramp) => ramp.apply(&repeated),
            // Tables are only built for periodic schemes.
            None => user_phase_diagonal(
                UserOffset::new(user, self.cfg.n, self.cfg.k).expect("validated user"),
            )
            .apply(&repeated),
        }
    }

    fn localized_body(&self, freq: &[C64], user: usize, ops: &mut OpCount) -> Vec<C64> {
        let m = self.cfg.m();
        let mut grid = vec![C64::new(0.0, 0.0); self.cfg.n];
        grid[user * m..(user + 1) * m].copy_from_slice(freq);
        self.plan_n.inverse_counted(&mut grid, ops);
        grid
    }

    pub fn ofdma(&self, symbols: &[C64], user: usize) -> Result<TxBlock> {
        self.cfg.check_user(user)?;
        self.cfg.check_payload(symbols)?;
        let mut ops = OpCount::default();
        let body = self.localized_body(symbols, user, &mut ops);
        self.finish(user, body, symbols, ops)
    }

    pub fn scfdma(&self, symbols: &[C64], user: usize) -> Result<TxBlock> {
        self.cfg.check_user(user)?;
        self.cfg.check_payload(symbols)?;
        let mut ops = OpCount::default();
        let mut spread = symbols.to_vec();
        self.plan_m.forward_counted(&mut spread, &mut ops);
        let body = self.localized_body(&spread, user, &mut ops);
        self.finish(user, body, symbols, ops)
    }

    pub fn pofdma(&self, symbols: &[C64], user: usize) -> Result<TxBlock> {
        self.cfg.check_user(user)?;
        self.cfg.check_payload(symbols)?;
        let mut ops = OpCount::default();
        let mut v = symbols.to_vec();
        self.plan_m.inverse_counted(&mut v, &mut ops);
        let body = self.periodic_body(&v, user, &mut ops);
        self.finish(user, body, symbols, ops)
    }

    /// P-OFDMA on `C_M · s`. The DCT is applied as a dense matrix, so its
    /// executed cost is not the fast-transform figure of the closed-form
    /// complexity model.
    pub fn pofdma_dct(&self, symbols: &[C64], user: usize) -> Result<TxBlock> {
        self.cfg.check_user(user)?;
        self.cfg.check_payload(symbols)?;
        let m = self.cfg.m() as u64;
        let mut ops = OpCount {
            mults: m * m,
            adds: m * m.saturating_sub(1),
        };
        let mut v = self.dct.apply(symbols);
        self.plan_m.inverse_counted(&mut v, &mut ops);
        let body = self.periodic_body(&v, user, &mut ops);
        self.finish(user, body, symbols, ops)
    }

    /// Simplified DFT-precoded chain: `X_m · A · s`.
    pub fn pofdma_dft(&self, symbols: &[C64], user: usize) -> Result<TxBlock> {
        self.cfg.check_user(user)?;
        self.cfg.check_payload(symbols)?;
        let mut ops = OpCount::default();
        let body = self.periodic_body(symbols, user, &mut ops);
        self.finish(user, body, symbols, ops)
    }

    /// DFT-precoded chain without the `F^H_M F_M = I` cancellation:
    /// `X_m · A · F^H_M · F_M · s`.
    pub fn pofdma_dft_unsimplified(&self, symbols: &[C64], user: usize) -> Result<TxBlock> {
        self.cfg.check_user(user)?;
        self.cfg.check_payload(symbols)?;
        let mut ops = OpCount::default();
        let mut v = symbols.to_vec();
        self.plan_m.forward_counted(&mut v, &mut ops);
        self.plan_m.inverse_counted(&mut v, &mut ops);
        let body = self.periodic_body(&v, user, &mut ops);
        self.finish(user, body, symbols, ops)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{dft, idft};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_vec(n: usize, seed: u64) -> Vec<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    fn max_err(a: &[C64], b: &[C64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn energy(x: &[C64]) -> f64 {
        x.iter().map(|v| v.norm_sqr()).sum()
    }

    fn tx(scheme: Scheme, n: usize, k: usize) -> Transmitter {
        Transmitter::new(SchemeConfig::with_default_cp(scheme, n, k, Modulation::Qam16).unwrap())
            .unwrap()
    }

    fn support(body: &[C64]) -> Vec<usize> {
        dft(body)
            .unwrap()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() > 1e-9)
            .map(|(i, _)| i)
            .collect()
    }

    #[test]
    fn repeat_map_examples() {
        let a = C64::new(1.0, 2.0);
        let b = C64::new(-3.0, 0.5);
        assert_eq!(repeat_map(&[a, b], 2), vec![a, b, a, b]);
        assert_eq!(repeat_map(&[a, b], 1), vec![a, b]);
    }

    #[test]
    fn cp_examples() {
        let v: Vec<C64> = (0..4).map(|i| C64::new(i as f64, 0.0)).collect();
        let with = add_cp(&v, 2).unwrap();
        assert_eq!(with, vec![v[2], v[3], v[0], v[1], v[2], v[3]]);
        assert_eq!(remove_cp(&with, 2).unwrap(), v);
        assert!(matches!(add_cp(&v, 4), Err(Error::CyclicPrefix { .. })));
    }

    #[test]
    fn config_validation() {
        let q = Modulation::Qam16;
        assert!(SchemeConfig::new(Scheme::POfdma, 256, 17, 64, q).is_err());
        assert!(SchemeConfig::new(Scheme::POfdma, 250, 10, 64, q).is_err());
        assert!(SchemeConfig::new(Scheme::POfdma, 256, 16, 0, q).is_err());
        assert!(SchemeConfig::new(Scheme::POfdma, 256, 16, 256, q).is_err());
        let cfg = SchemeConfig::with_default_cp(Scheme::POfdma, 256, 64, q).unwrap();
        assert_eq!((cfg.m(), cfg.cp_len, cfg.bits_per_user()), (4, 64, 16));
    }

    #[test]
    fn scheme_names_roundtrip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("foo".parse::<Scheme>().is_err());
    }

    #[test]
    fn single_user_pofdma_is_plain_idft() {
        let t = tx(Scheme::POfdma, 16, 1);
        let s = random_vec(16, 1);
        let block = t.pofdma(&s, 0).unwrap();
        assert!(max_err(block.body(), &idft(&s).unwrap()) < 1e-12);
        assert_eq!(&block.samples[..4], &block.body()[12..]);
    }

    #[test]
    fn pofdma_spectrum_sits_on_user_comb() {
        let t = tx(Scheme::POfdma, 16, 4);
        for m in 0..4 {
            let block = t.pofdma(&random_vec(4, m as u64), m).unwrap();
            let mut expect = comb_indices(16, 4, m);
            expect.sort_unstable();
            assert_eq!(support(block.body()), expect);
        }
        assert_eq!(comb_indices(16, 4, 0), vec![0, 4, 8, 12]);
        assert_eq!(comb_indices(16, 4, 1), vec![15, 3, 7, 11]);
    }

    #[test]
    fn pofdma_dct_factors_through_dct() {
        let t = tx(Scheme::POfdmaDct, 32, 4);
        let s = random_vec(8, 9);
        let pre = dct_matrix(8).unwrap().apply(&s);
        let a = t.pofdma_dct(&s, 2).unwrap();
        let b = t.pofdma(&pre, 2).unwrap();
        assert!(max_err(&a.samples, &b.samples) < 1e-12);
    }

    #[test]
    fn dft_variant_paths_agree() {
        let t = tx(Scheme::POfdmaDft, 32, 8);
        for m in 0..8 {
            let s = random_vec(4, 100 + m as u64);
            let fast = t.pofdma_dft(&s, m).unwrap();
            let slow = t.pofdma_dft_unsimplified(&s, m).unwrap();
            assert!(max_err(&fast.samples, &slow.samples) < 1e-12);
        }
    }

    #[test]
    fn dft_variant_constant_modulus_has_flat_envelope() {
        let t = tx(Scheme::POfdmaDft, 64, 16);
        let s: Vec<C64> = (0..4)
            .map(|i| C64::from_polar(1.0, PI / 4.0 + PI / 2.0 * i as f64))
            .collect();
        let block = t.pofdma_dft(&s, 5).unwrap();
        let p: Vec<f64> = block.body().iter().map(|v| v.norm_sqr()).collect();
        for v in &p {
            assert!((v - p[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn dft_variant_uses_no_additions() {
        let t = tx(Scheme::POfdmaDft, 256, 64);
        let block = t.pofdma_dft(&random_vec(4, 3), 7).unwrap();
        assert_eq!(
            block.ops,
            OpCount {
                mults: 256,
                adds: 0
            }
        );
    }

    #[test]
    fn executed_ops_match_radix2_model() {
        // (N, K): Table-style per-user transmitter counts.
        let (n, k) = (256u64, 64u64);
        let m = n / k;
        let lg = |x: u64| x.trailing_zeros() as u64;
        let s = random_vec(4, 4);
        let ofdma = tx(Scheme::Ofdma, 256, 64).ofdma(&s, 3).unwrap().ops;
        assert_eq!(
            ofdma,
            OpCount {
                mults: n / 2 * lg(n),
                adds: n * lg(n)
            }
        );
        let sc = tx(Scheme::ScFdma, 256, 64).scfdma(&s, 3).unwrap().ops;
        assert_eq!(
            sc,
            OpCount {
                mults: n / 2 * lg(n) + m / 2 * lg(m),
                adds: n * lg(n) + m * lg(m)
            }
        );
        let p = tx(Scheme::POfdma, 256, 64).pofdma(&s, 3).unwrap().ops;
        assert_eq!(
            p,
            OpCount {
                mults: m / 2 * lg(m) + n,
                adds: m * lg(m)
            }
        );
    }

    #[test]
    fn ofdma_tone_and_support() {
        let t = tx(Scheme::Ofdma, 16, 4);
        let mut s = vec![C64::new(0.0, 0.0); 4];
        s[1] = C64::new(1.0, 0.0);
        let block = t.ofdma(&s, 2).unwrap();
        let q = 2 * 4 + 1;
        for (n, v) in block.body().iter().enumerate() {
            let tone = C64::from_polar(0.25, 2.0 * PI * (q * n) as f64 / 16.0);
            assert!((v - tone).norm() < 1e-12);
        }
        let block = t.ofdma(&random_vec(4, 8), 2).unwrap();
        assert_eq!(support(block.body()), vec![8, 9, 10, 11]);
        let single = tx(Scheme::Ofdma, 16, 1);
        let s = random_vec(16, 5);
        assert!(max_err(single.ofdma(&s, 0).unwrap().body(), &idft(&s).unwrap()) < 1e-12);
    }

    #[test]
    fn scfdma_single_user_is_identity() {
        let t = tx(Scheme::ScFdma, 32, 1);
        let s = random_vec(32, 6);
        assert!(max_err(t.scfdma(&s, 0).unwrap().body(), &s) < 1e-12);
    }

    #[test]
    fn all_chains_preserve_energy_and_reject_bad_users() {
        for scheme in Scheme::ALL {
            for (n, k) in [(16, 4), (64, 8), (256, 128)] {
                let t = tx(scheme, n, k);
                let s = random_vec(n / k, (n + k) as u64);
                for m in [0, k - 1] {
                    let b = t.transmit(&s, m).unwrap();
                    let rel = (energy(b.body()) - energy(&s)).abs() / energy(&s);
                    assert!(rel < 1e-12, "{scheme} N={n} K={k}");
                }
                assert!(matches!(
                    t.transmit(&s, k),
                    Err(Error::UserOutOfRange { .. })
                ));
                assert!(t.transmit(&s[1..], 0).is_err());
            }
        }
    }

    #[test]
    fn user_spectra_are_disjoint_and_periodic_union_covers_band() {
        for scheme in Scheme::ALL {
            let t = tx(scheme, 32, 8);
            let mut seen = vec![0usize; 32];
            for m in 0..8 {
                let b = t.transmit(&random_vec(4, 40 + m as u64), m).unwrap();
                for i in support(b.body()) {
                    seen[i] += 1;
                }
            }
            assert!(seen.iter().all(|&c| c <= 1), "{scheme}: overlapping users");
            if scheme.is_periodic() {
                assert!(seen.iter().all(|&c| c == 1));
            }
        }
    }
}
