//! Unitary DFT/IDFT, the sample-shifted IDFT, the orthonormal DCT-II and
//! the per-user phase-ramp diagonal.
//!
//! Conventions: `W_N = exp(-j 2π / N)`. The forward transform is
//! `X[k] = N^{-1/2} Σ x[n] W_N^{kn}` and the inverse uses the conjugate
//! kernel, so both are unitary. The FFT is an iterative radix-2
//! decimation-in-time kernel driven by a precomputed twiddle table.

use std::f64::consts::PI;
use std::ops::AddAssign;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::C64;

/// Complex multiplications and additions executed by a transform or chain.
///
/// Normalization scalings (`1/√N`) are not counted; the radix-2 model
/// charges one multiplication and two additions per butterfly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount {
    pub mults: u64,
    pub adds: u64,
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, rhs: Self) {
        self.mults += rhs.mults;
        self.adds += rhs.adds;
    }
}

pub(crate) fn check_pow2(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        Err(Error::NotPowerOfTwo(n))
    } else {
        Ok(())
    }
}

/// Precomputed radix-2 FFT plan for one transform size.
#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    /// `W_N^k` for `k < N/2`.
    twiddles: Vec<C64>,
    bitrev: Vec<usize>,
    scale: f64,
}

impl FftPlan {
    pub fn new(n: usize) -> Result<Self> {
        check_pow2(n)?;
        let twiddles = (0..n / 2)
            .map(|k| Complex::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| {
                if bits == 0 {
                    0
                } else {
                    i.reverse_bits() >> (usize::BITS - bits)
                }
            })
            .collect();
        Ok(Self {
            n,
            twiddles,
            bitrev,
            scale: 1.0 / (n as f64).sqrt(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place unitary forward transform.
    pub fn forward(&self, buf: &mut [C64]) {
        self.run(buf, false);
    }

    /// In-place unitary inverse transform.
    pub fn inverse(&self, buf: &mut [C64]) {
        self.run(buf, true);
    }

    /// Forward transform that also charges its butterflies to `ops`.
    pub fn forward_counted(&self, buf: &mut [C64], ops: &mut OpCount) {
        self.run(buf, false);
        *ops += self.cost();
    }

    pub fn inverse_counted(&self, buf: &mut [C64], ops: &mut OpCount) {
        self.run(buf, true);
        *ops += self.cost();
    }

    /// Butterfly cost of one transform: `N/2·log2 N` mults, `N·log2 N` adds.
    pub fn cost(&self) -> OpCount {
        let stages = self.n.trailing_zeros() as u64;
        OpCount {
            mults: (self.n as u64 / 2) * stages,
            adds: self.n as u64 * stages,
        }
    }

    fn run(&self, buf: &mut [C64], inverse: bool) {
        assert_eq!(buf.len(), self.n, "buffer does not match plan size");
        let n = self.n;
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let w = if inverse { w.conj() } else { w };
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
        for v in buf.iter_mut() {
            *v *= self.scale;
        }
    }
}

/// Unitary forward DFT of a power-of-two-length vector.
pub fn dft(x: &[C64]) -> Result<Vec<C64>> {
    let plan = FftPlan::new(x.len())?;
    let mut out = x.to_vec();
    plan.forward(&mut out);
    Ok(out)
}

/// Unitary inverse DFT of a power-of-two-length vector.
pub fn idft(x: &[C64]) -> Result<Vec<C64>> {
    let plan = FftPlan::new(x.len())?;
    let mut out = x.to_vec();
    plan.inverse(&mut out);
    Ok(out)
}

/// IDFT whose output is delayed circularly by `ell` samples:
/// `out[n] = idft(x)[(n - ell) mod N]`, the action of `F^H_{ell,N}`.
pub fn shifted_idft(x: &[C64], ell: usize) -> Result<Vec<C64>> {
    if ell >= x.len() {
        return Err(Error::ShiftOutOfRange {
            shift: ell,
            size: x.len(),
        });
    }
    let mut out = idft(x)?;
    out.rotate_right(ell);
    Ok(out)
}

/// Time-domain offset `ell` assigned to one of `users` users sharing
/// `size` subcarriers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UserOffset {
    ell: usize,
    size: usize,
    users: usize,
}

impl UserOffset {
    pub fn new(ell: usize, size: usize, users: usize) -> Result<Self> {
        check_pow2(size)?;
        if users == 0 || !size.is_multiple_of(users) {
            return Err(Error::NotDivisible {
                subcarriers: size,
                users,
            });
        }
        if ell >= users {
            return Err(Error::ShiftOutOfRange {
                shift: ell,
                size: users,
            });
        }
        Ok(Self { ell, size, users })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn users(&self) -> usize {
        self.users
    }
}

/// Diagonal of `X_m = K^{-1/2} F_{0,N} F^H_{ell,N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagonal {
    pub entries: Vec<C64>,
}

impl PhaseDiagonal {
    /// Elementwise product `diag · x`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.entries.iter().zip(x).map(|(d, v)| d * v).collect()
    }

    /// Elementwise product with the conjugate diagonal, `diag^H · x`.
    pub fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        self.entries
            .iter()
            .zip(x)
            .map(|(d, v)| d.conj() * v)
            .collect()
    }
}

/// Phase ramp of user offset `ell`: entry `k` is `K^{-1/2} W_N^{k·ell}`.
///
/// Conjugating a circular delay of `ell` samples by the unitary DFT gives
/// exactly this diagonal; the dense-product tests pin the sign.
pub fn user_phase_diagonal(offset: UserOffset) -> PhaseDiagonal {
    let n = offset.size;
    let amp = 1.0 / (offset.users as f64).sqrt();
    let entries = (0..n)
        .map(|k| {
            let e = (k * offset.ell) % n;
            Complex::from_polar(amp, -2.0 * PI * e as f64 / n as f64)
        })
        .collect();
    PhaseDiagonal { entries }
}

/// Orthonormal M-point DCT-II matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DctMatrix {
    m: usize,
    data: Vec<f64>,
}

impl DctMatrix {
    pub fn size(&self) -> usize {
        self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.m + col]
    }

    /// `C · x`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.m);
        self.data
            .chunks_exact(self.m)
            .map(|row| row.iter().zip(x).map(|(c, v)| v * *c).sum())
            .collect()
    }

    /// `Cᵀ · x`, the inverse of [`DctMatrix::apply`].
    pub fn apply_transpose(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.m);
        let mut out = vec![C64::new(0.0, 0.0); self.m];
        for (row, v) in self.data.chunks_exact(self.m).zip(x) {
            for (o, c) in out.iter_mut().zip(row) {
                *o += v * *c;
            }
        }
        out
    }
}

pub fn dct_matrix(m: usize) -> Result<DctMatrix> {
    if m == 0 {
        return Err(Error::Domain("DCT size must be at least 1".into()));
    }
    let mf = m as f64;
    let mut data = Vec::with_capacity(m * m);
    for k in 0..m {
        let norm = if k == 0 {
            (1.0 / mf).sqrt()
        } else {
            (2.0 / mf).sqrt()
        };
        for n in 0..m {
            data.push(norm * (PI * (2 * n + 1) as f64 * k as f64 / (2.0 * mf)).cos());
        }
    }
    Ok(DctMatrix { m, data })
}
