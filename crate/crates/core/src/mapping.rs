//! Gray-labelled square QAM with unit average symbol energy.
//!
//! Each symbol carries `log2(order)` bits, most significant first. The
//! first half of a label selects the in-phase level and the second half the
//! quadrature level; each half is a reflected Gray code over the amplitude
//! levels `-(L-1), ..., -1, 1, ..., L-1`.

use crate::error::{Error, Result};
use crate::C64;

/// Supported modulation orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modulation {
    Qam16,
    Qam64,
}

impl Modulation {
    pub fn from_order(order: u32) -> Result<Self> {
        match order {
            16 => Ok(Modulation::Qam16),
            64 => Ok(Modulation::Qam64),
            other => Err(Error::UnsupportedOrder(other)),
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Modulation::Qam16 => 16,
            Modulation::Qam64 => 64,
        }
    }

    pub fn bits_per_symbol(self) -> usize {
        self.order().trailing_zeros() as usize
    }

    /// Amplitude levels per axis.
    fn levels(self) -> usize {
        1 << (self.bits_per_symbol() / 2)
    }

    /// `sqrt(2(L²-1)/3)`: √10 for 16-QAM, √42 for 64-QAM.
    fn scale(self) -> f64 {
        let l = self.levels() as f64;
        (2.0 * (l * l - 1.0) / 3.0).sqrt()
    }
}

impl std::fmt::Display for Modulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.order())
    }
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

fn inverse_gray(mut g: usize) -> usize {
    let mut i = g;
    while g > 1 {
        g >>= 1;
        i ^= g;
    }
    i
}

/// Full point set of one constellation, indexed by bit label.
#[derive(Debug, Clone)]
pub struct Constellation {
    modulation: Modulation,
    points: Vec<C64>,
}

impl Constellation {
    pub fn new(modulation: Modulation) -> Self {
        let points = (0..modulation.order() as usize)
            .map(|label| map_label(modulation, label))
            .collect();
        Self { modulation, points }
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    /// Point for each label `0..order`.
    pub fn points(&self) -> &[C64] {
        &self.points
    }
}

fn map_label(modulation: Modulation, label: usize) -> C64 {
    let half = modulation.bits_per_symbol() / 2;
    let levels = modulation.levels();
    let amp = |g: usize| (2 * inverse_gray(g)) as f64 - (levels - 1) as f64;
    let i = amp(label >> half);
    let q = amp(label & (levels - 1));
    C64::new(i, q) / modulation.scale()
}

fn slice_axis(modulation: Modulation, v: f64) -> usize {
    let levels = modulation.levels();
    let pos = ((v * modulation.scale() + (levels - 1) as f64) / 2.0).round();
    gray(pos.clamp(0.0, (levels - 1) as f64) as usize)
}

/// Map bits (values 0/1) onto unit-energy Gray QAM symbols.
pub fn qam_modulate(bits: &[u8], modulation: Modulation) -> Result<Vec<C64>> {
    let bps = modulation.bits_per_symbol();
    if !bits.len().is_multiple_of(bps) {
        return Err(Error::RaggedBits {
            bits: bits.len(),
            bits_per_symbol: bps,
        });
    }
    Ok(bits
        .chunks_exact(bps)
        .map(|chunk| {
            let label = chunk
                .iter()
                .fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
            map_label(modulation, label)
        })
        .collect())
}

/// Minimum-distance hard decision followed by inverse Gray labelling.
///
/// For a square grid the nearest point separates into independent nearest
/// levels on each axis.
pub fn qam_demodulate(symbols: &[C64], modulation: Modulation) -> Vec<u8> {
    let bps = modulation.bits_per_symbol();
    let half = bps / 2;
    let mut bits = Vec::with_capacity(symbols.len() * bps);
    for s in symbols {
        let label = (slice_axis(modulation, s.re) << half) | slice_axis(modulation, s.im);
        bits.extend((0..bps).rev().map(|b| ((label >> b) & 1) as u8));
    }
    bits
}
