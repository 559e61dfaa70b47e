//! Dense-matrix oracles shared by the integration targets. Each check
//! returns the largest absolute deviation between a fast path and its
//! explicit matrix product.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use pofdma::channel::ChannelRealization;
use pofdma::mapping::Modulation;
use pofdma::rxchain::{Precoding, Receiver};
use pofdma::transforms::{shifted_idft, user_phase_diagonal, UserOffset};
use pofdma::txchain::{comb_indices, Scheme, SchemeConfig, Transmitter};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Mat = DMatrix<C>;
pub type Vector = DVector<C>;

pub const ORACLE_SIZES: [usize; 3] = [8, 16, 32];

fn w(n: usize, e: i64) -> C {
    C::from_polar(1.0, -2.0 * PI * e.rem_euclid(n as i64) as f64 / n as f64)
}

/// `F^H_{ell,n}`: entry (r, k) is `W_n^{(ell - r) k} / sqrt(n)`.
pub fn shifted_idft_matrix(n: usize, ell: usize) -> Mat {
    let s = 1.0 / (n as f64).sqrt();
    Mat::from_fn(n, n, |r, k| w(n, (ell as i64 - r as i64) * k as i64) * s)
}

pub fn dft_matrix(n: usize) -> Mat {
    shifted_idft_matrix(n, 0).adjoint()
}

/// `K` stacked `M x M` identities.
pub fn repetition(m: usize, k: usize) -> Mat {
    Mat::from_fn(m * k, m, |r, c| C::new((r % m == c) as u8 as f64, 0.0))
}

pub fn dct(m: usize) -> Mat {
    Mat::from_fn(m, m, |k, j| {
        let a = if k == 0 {
            (1.0 / m as f64).sqrt()
        } else {
            (2.0 / m as f64).sqrt()
        };
        C::new(
            a * (PI * (2 * j + 1) as f64 * k as f64 / (2 * m) as f64).cos(),
            0.0,
        )
    })
}

/// `X_m = K^{-1/2} F_{0,N} F^H_{ell,N}`.
pub fn phase_matrix(n: usize, k: usize, ell: usize) -> Mat {
    dft_matrix(n) * shifted_idft_matrix(n, ell) / C::new((k as f64).sqrt(), 0.0)
}

/// Convolution circulant with first column `taps`.
pub fn circulant(taps: &[C], n: usize) -> Mat {
    Mat::from_fn(n, n, |r, c| {
        taps.get((r + n - c) % n).copied().unwrap_or_default()
    })
}

pub fn gaussian(rng: &mut ChaCha8Rng, len: usize) -> Vec<C> {
    (0..len)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C::new(re, im) / 2f64.sqrt()
        })
        .collect()
}

pub fn max_err(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn col(v: &[C]) -> Vector {
    Vector::from_column_slice(v)
}

/// Every power-of-two user count dividing `n`.
pub fn user_counts(n: usize) -> Vec<usize> {
    (0..=n.trailing_zeros()).map(|e| 1 << e).collect()
}

pub fn cfg(scheme: Scheme, n: usize, k: usize) -> SchemeConfig {
    SchemeConfig::with_default_cp(scheme, n, k, Modulation::Qam16).unwrap()
}

pub fn check_shifted_idft(n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|ell| {
            let x = gaussian(&mut rng, n);
            let dense = shifted_idft_matrix(n, ell) * col(&x);
            max_err(&shifted_idft(&x, ell).unwrap(), dense.as_slice())
        })
        .fold(0.0, f64::max)
}

/// Deviation of `X_m` from the ramp diagonal, off-diagonal entries included.
pub fn check_phase_matrix(n: usize) -> f64 {
    let mut worst = 0.0f64;
    for k in user_counts(n) {
        for ell in 0..k {
            let x = phase_matrix(n, k, ell);
            let ramp = user_phase_diagonal(UserOffset::new(ell, n, k).unwrap());
            for r in 0..n {
                for c in 0..n {
                    let want = if r == c {
                        ramp.entries[r]
                    } else {
                        C::default()
                    };
                    worst = worst.max((x[(r, c)] - want).norm());
                }
            }
        }
    }
    worst
}

pub fn check_periodic_tx(n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for k in user_counts(n) {
        let m = n / k;
        let fm_h = dft_matrix(m).adjoint();
        let a = repetition(m, k);
        let c = dct(m);
        let [plain_tx, dct_tx, dft_tx] = [Scheme::POfdma, Scheme::POfdmaDct, Scheme::POfdmaDft]
            .map(|s| Transmitter::new(cfg(s, n, k)).unwrap());
        for user in 0..k {
            let s = gaussian(&mut rng, m);
            let x = phase_matrix(n, k, user);
            let plain = &x * &a * &fm_h * col(&s);
            let with_dct = &x * &a * &fm_h * &c * col(&s);
            let raw = &x * &a * &fm_h * dft_matrix(m) * col(&s);
            let simplified = &x * &a * col(&s);
            for e in [
                max_err(plain_tx.pofdma(&s, user).unwrap().body(), plain.as_slice()),
                max_err(
                    dct_tx.pofdma_dct(&s, user).unwrap().body(),
                    with_dct.as_slice(),
                ),
                max_err(raw.as_slice(), simplified.as_slice()),
                max_err(
                    dft_tx.pofdma_dft(&s, user).unwrap().body(),
                    simplified.as_slice(),
                ),
                max_err(
                    dft_tx.pofdma_dft_unsimplified(&s, user).unwrap().body(),
                    raw.as_slice(),
                ),
            ] {
                worst = worst.max(e);
            }
        }
    }
    worst
}

pub fn check_localized_tx(n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for k in user_counts(n) {
        let m = n / k;
        let f_h = dft_matrix(n).adjoint();
        let ofdma = Transmitter::new(cfg(Scheme::Ofdma, n, k)).unwrap();
        let sc = Transmitter::new(cfg(Scheme::ScFdma, n, k)).unwrap();
        for user in 0..k {
            let mapping = Mat::from_fn(n, m, |r, c| C::new((r == user * m + c) as u8 as f64, 0.0));
            let s = gaussian(&mut rng, m);
            let o = &f_h * &mapping * col(&s);
            let d = &f_h * &mapping * dft_matrix(m) * col(&s);
            worst = worst.max(max_err(ofdma.ofdma(&s, user).unwrap().body(), o.as_slice()));
            worst = worst.max(max_err(sc.scfdma(&s, user).unwrap().body(), d.as_slice()));
        }
    }
    worst
}

/// `(X_k A F^H_M)^H H_m (X_m A F^H_M)` against zero for `k != m` and against
/// the response on the comb `(N - ell_m + K i) mod N` for `k == m`.
pub fn check_cross_terms(n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for k in user_counts(n) {
        let m = n / k;
        let fm_h = dft_matrix(m).adjoint();
        let a = repetition(m, k);
        let spread: Vec<Mat> = (0..k).map(|u| phase_matrix(n, k, u) * &a * &fm_h).collect();
        for user in 0..k {
            let taps = gaussian(&mut rng, 1 + user % 4);
            let chan = ChannelRealization::from_taps(taps.clone(), n).unwrap();
            let h = circulant(&taps, n);
            let comb = comb_indices(n, k, user);
            for (other, g) in spread.iter().enumerate() {
                let t = g.adjoint() * &h * &spread[user];
                for r in 0..m {
                    for c in 0..m {
                        let want = if other == user && r == c {
                            chan.freq_response[comb[r]]
                        } else {
                            C::default()
                        };
                        worst = worst.max((t[(r, c)] - want).norm());
                    }
                }
            }
        }
    }
    worst
}

/// Every receiver against the dense despread, divide and inverse-precode
/// chain applied to a dense superposition of circulant channels plus noise.
pub fn check_receivers(n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for k in user_counts(n) {
        let m = n / k;
        let fm = dft_matrix(m);
        let a = repetition(m, k);
        let taps: Vec<Vec<C>> = (0..k).map(|u| gaussian(&mut rng, 1 + u % 3)).collect();
        let chans: Vec<ChannelRealization> = taps
            .iter()
            .map(|t| ChannelRealization::from_taps(t.clone(), n).unwrap())
            .collect();
        let payloads: Vec<Vec<C>> = (0..k).map(|_| gaussian(&mut rng, m)).collect();
        for scheme in Scheme::ALL {
            let sc = cfg(scheme, n, k);
            let tx = Transmitter::new(sc).unwrap();
            let rx = Receiver::new(sc).unwrap();
            let mut r_sum = Vector::zeros(n);
            for user in 0..k {
                let body = tx.transmit(&payloads[user], user).unwrap().body().to_vec();
                r_sum += circulant(&taps[user], n) * col(&body);
            }
            r_sum += col(&gaussian(&mut rng, n)) * C::new(0.01, 0.0);
            for user in 0..k {
                let fast = rx.receive(r_sum.as_slice(), user, &chans[user]).unwrap();
                let resp = &chans[user].freq_response;
                let dense = match Precoding::for_scheme(scheme) {
                    Some(p) => {
                        let z = &fm * a.transpose() * phase_matrix(n, k, user).adjoint() * &r_sum;
                        let comb = comb_indices(n, k, user);
                        let eq = Vector::from_fn(m, |i, _| z[i] / resp[comb[i]]);
                        match p {
                            Precoding::Plain => eq,
                            Precoding::Dct => dct(m).transpose() * eq,
                            Precoding::Dft => fm.adjoint() * eq,
                        }
                    }
                    None => {
                        let spec = dft_matrix(n) * &r_sum;
                        let eq = Vector::from_fn(m, |i, _| spec[user * m + i] / resp[user * m + i]);
                        if scheme == Scheme::ScFdma {
                            fm.adjoint() * eq
                        } else {
                            eq
                        }
                    }
                };
                worst = worst.max(max_err(&fast.symbols, dense.as_slice()));
            }
        }
    }
    worst
}

/// Deviation of the literal `(1/K) F_M A^H F_{ell,N} Λ F^H_{ell,N} A F^H_M`
/// diagonal from the mirrored response `Λ[-(N - ell + K i) mod N]`.
pub fn check_literal_product_mirrors(n: usize, k: usize) -> f64 {
    let m = n / k;
    let a = repetition(m, k);
    let lambda: Vec<C> = (0..n)
        .map(|i| C::new(i as f64 + 1.0, 0.5 * i as f64))
        .collect();
    let mut worst = 0.0f64;
    for user in 0..k {
        let f_l = shifted_idft_matrix(n, user);
        let t = dft_matrix(m)
            * a.transpose()
            * f_l.adjoint()
            * Mat::from_diagonal(&col(&lambda))
            * &f_l
            * &a
            * dft_matrix(m).adjoint()
            / C::new(k as f64, 0.0);
        for (i, &idx) in comb_indices(n, k, user).iter().enumerate() {
            worst = worst.max((t[(i, i)] - lambda[(n - idx) % n]).norm());
        }
    }
    worst
}
