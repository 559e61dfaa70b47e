//! Per-user recovery from the superposed received block.
//!
//! For the periodic schemes the receiver computes `F_M · A^H · X_m^H · r`,
//! which isolates user `m`'s comb: entry `i` equals
//! `Λ_m[(N - ell_m + K·i) mod N] · (precoded symbol i)`, while every other
//! user's contribution cancels exactly. A single-tap zero-forcing division
//! and the inverse precoder then return the payload. The localized schemes
//! read their contiguous bins out of one N-point DFT.

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::mapping::qam_demodulate;
use crate::transforms::{
    dct_matrix, user_phase_diagonal, DctMatrix, FftPlan, PhaseDiagonal, UserOffset,
};
use crate::txchain::{comb_indices, Scheme, SchemeConfig};
use crate::C64;

/// Smallest equalizer coefficient magnitude used in a division.
pub const EQUALIZER_FLOOR: f64 = 1e-12;

/// Inverse precoder applied after equalization in the periodic receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precoding {
    Plain,
    Dct,
    Dft,
}

impl Precoding {
    pub fn for_scheme(scheme: Scheme) -> Option<Self> {
        match scheme {
            Scheme::POfdma => Some(Precoding::Plain),
            Scheme::POfdmaDct => Some(Precoding::Dct),
            Scheme::POfdmaDft => Some(Precoding::Dft),
            Scheme::Ofdma | Scheme::ScFdma => None,
        }
    }
}

/// Zero-forcing coefficients, one per recovered symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizerTaps {
    pub coeffs: Vec<C64>,
    /// How many coefficients were raised to [`EQUALIZER_FLOOR`].
    pub clamped: usize,
}

impl EqualizerTaps {
    pub fn from_response(freq_response: &[C64], indices: &[usize]) -> Self {
        let mut clamped = 0;
        let coeffs = indices
            .iter()
            .map(|&i| {
                let c = freq_response[i];
                let mag = c.norm();
                if mag >= EQUALIZER_FLOOR {
                    c
                } else {
                    clamped += 1;
                    if mag > 0.0 {
                        c * (EQUALIZER_FLOOR / mag)
                    } else {
                        C64::new(EQUALIZER_FLOOR, 0.0)
                    }
                }
            })
            .collect();
        Self { coeffs, clamped }
    }

    pub fn equalize(&self, x: &mut [C64]) {
        for (v, c) in x.iter_mut().zip(&self.coeffs) {
            *v /= c;
        }
    }
}

/// Recovered symbols and hard bit decisions for one user.
#[derive(Debug, Clone, PartialEq)]
pub struct RxEstimate {
    pub user: usize,
    pub symbols: Vec<C64>,
    pub bits: Vec<u8>,
    pub clamped_taps: usize,
}

/// Elementwise sum of equal-length received contributions.
pub fn superpose<V: AsRef<[C64]>>(blocks: &[V]) -> Result<Vec<C64>> {
    let first = blocks.first().ok_or(Error::Empty("superpose"))?.as_ref();
    let mut out = first.to_vec();
    for b in &blocks[1..] {
        let b = b.as_ref();
        if b.len() != out.len() {
            return Err(Error::LengthMismatch {
                expected: out.len(),
                actual: b.len(),
            });
        }
        for (o, v) in out.iter_mut().zip(b) {
            *o += v;
        }
    }
    Ok(out)
}

/// Precomputed receive tables for one [`SchemeConfig`].
#[derive(Debug, Clone)]
pub struct Receiver {
    cfg: SchemeConfig,
    plan_n: FftPlan,
    plan_m: FftPlan,
    dct: DctMatrix,
    ramps: Vec<PhaseDiagonal>,
}

impl Receiver {
    pub fn new(cfg: SchemeConfig) -> Result<Self> {
        let ramps = (0..cfg.k)
            .map(|ell| UserOffset::new(ell, cfg.n, cfg.k).map(user_phase_diagonal))
            .collect::<Result<_>>()?;
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

    fn check(&self, received: &[C64], user: usize, chan: &ChannelRealization) -> Result<()> {
        if user >= self.cfg.k {
            return Err(Error::UserOutOfRange {
                user,
                users: self.cfg.k,
            });
        }
        for len in [received.len(), chan.freq_response.len()] {
            if len != self.cfg.n {
                return Err(Error::LengthMismatch {
                    expected: self.cfg.n,
                    actual: len,
                });
            }
        }
        Ok(())
    }

    fn estimate(&self, user: usize, symbols: Vec<C64>, clamped_taps: usize) -> RxEstimate {
        let bits = qam_demodulate(&symbols, self.cfg.modulation);
        RxEstimate {
            user,
            symbols,
            bits,
            clamped_taps,
        }
    }

    /// Recover user `user` with the chain selected by the configured scheme.
    pub fn receive(
        &self,
        received: &[C64],
        user: usize,
        chan: &ChannelRealization,
    ) -> Result<RxEstimate> {
        match Precoding::for_scheme(self.cfg.scheme) {
            Some(p) => self.pofdma(received, user, chan, p),
            None if self.cfg.scheme == Scheme::Ofdma => self.ofdma(received, user, chan),
            None => self.scfdma(received, user, chan),
        }
    }

    /// Recover every user from one received block. The localized schemes
    /// share a single N-point DFT.
    pub fn receive_all(
        &self,
        received: &[C64],
        chans: &[ChannelRealization],
    ) -> Result<Vec<RxEstimate>> {
        if chans.len() != self.cfg.k {
            return Err(Error::LengthMismatch {
                expected: self.cfg.k,
                actual: chans.len(),
            });
        }
        if self.cfg.scheme.is_periodic() {
            return chans
                .iter()
                .enumerate()
                .map(|(m, c)| self.receive(received, m, c))
                .collect();
        }
        if received.len() != self.cfg.n {
            return Err(Error::LengthMismatch {
                expected: self.cfg.n,
                actual: received.len(),
            });
        }
        let mut spectrum = received.to_vec();
        self.plan_n.forward(&mut spectrum);
        chans
            .iter()
            .enumerate()
            .map(|(m, c)| {
                self.check(received, m, c)?;
                Ok(
                    self.localized_from_spectrum(
                        &spectrum,
                        m,
                        c,
                        self.cfg.scheme == Scheme::ScFdma,
                    ),
                )
            })
            .collect()
    }

    /// Symbols before the single-tap division: `F_M · A^H · X_m^H · r`.
    pub fn periodic_despread(&self, received: &[C64], user: usize) -> Vec<C64> {
        let m = self.cfg.m();
        let y = self.ramps[user].apply_adjoint(received);
        let mut z = vec![C64::new(0.0, 0.0); m];
        for chunk in y.chunks_exact(m) {
            for (acc, v) in z.iter_mut().zip(chunk) {
                *acc += v;
            }
        }
        self.plan_m.forward(&mut z);
        z
    }

    pub fn periodic_taps(&self, user: usize, chan: &ChannelRealization) -> EqualizerTaps {
        EqualizerTaps::from_response(
            &chan.freq_response,
            &comb_indices(self.cfg.n, self.cfg.k, user),
        )
    }

    pub fn pofdma(
        &self,
        received: &[C64],
        user: usize,
        chan: &ChannelRealization,
        precoding: Precoding,
    ) -> Result<RxEstimate> {
        self.check(received, user, chan)?;
        let mut z = self.periodic_despread(received, user);
        let taps = self.periodic_taps(user, chan);
        taps.equalize(&mut z);
        let symbols = match precoding {
            Precoding::Plain => z,
            Precoding::Dct => self.dct.apply_transpose(&z),
            Precoding::Dft => {
                self.plan_m.inverse(&mut z);
                z
            }
        };
        Ok(self.estimate(user, symbols, taps.clamped))
    }

    pub fn ofdma(
        &self,
        received: &[C64],
        user: usize,
        chan: &ChannelRealization,
    ) -> Result<RxEstimate> {
        self.check(received, user, chan)?;
        let mut spectrum = received.to_vec();
        self.plan_n.forward(&mut spectrum);
        Ok(self.localized_from_spectrum(&spectrum, user, chan, false))
    }

    pub fn scfdma(
        &self,
        received: &[C64],
        user: usize,
        chan: &ChannelRealization,
    ) -> Result<RxEstimate> {
        self.check(received, user, chan)?;
        let mut spectrum = received.to_vec();
        self.plan_n.forward(&mut spectrum);
        Ok(self.localized_from_spectrum(&spectrum, user, chan, true))
    }

    fn localized_from_spectrum(
        &self,
        spectrum: &[C64],
        user: usize,
        chan: &ChannelRealization,
        despread: bool,
    ) -> RxEstimate {
        let m = self.cfg.m();
        let bins: Vec<usize> = (user * m..(user + 1) * m).collect();
        let taps = EqualizerTaps::from_response(&chan.freq_response, &bins);
        let mut z = spectrum[user * m..(user + 1) * m].to_vec();
        taps.equalize(&mut z);
        if despread {
            self.plan_m.inverse(&mut z);
        }
        self.estimate(user, z, taps.clamped)
    }
}
