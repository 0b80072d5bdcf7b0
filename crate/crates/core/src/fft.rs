//! Discrete Fourier transform plans.
//!
//! Power-of-two lengths use an iterative radix-2 transform; any other length
//! goes through Bluestein's chirp-z algorithm on a padded power-of-two plan.
//! Both directions are unnormalized: `inverse(forward(x)) = n·x`.
//!
//! Twiddles are evaluated directly from `sin`/`cos` of the exact angle instead
//! of by recurrence, so round-off stays at the 1e-16·log₂n level that the
//! unitarity checks of the torus module rely on.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods win when std is linked
use num_traits::Float;

use crate::{Error, Result, PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Kernel `exp(-2πi jk/n)`.
    Forward,
    /// Kernel `exp(+2πi jk/n)`.
    Inverse,
}

#[derive(Debug, Clone)]
struct Radix2 {
    n: usize,
    /// `exp(-2πi k/n)` for `k < n/2`.
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Radix2 {
    fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        let twiddles = (0..n / 2)
            .map(|k| {
                let a = -TAU * k as f64 / n as f64;
                Complex64::new(a.cos(), a.sin())
            })
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Self { n, twiddles, bitrev }
    }

    fn process(&self, buf: &mut [Complex64], dir: Direction) {
        let n = self.n;
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if dir == Direction::Inverse {
                        w = w.conj();
                    }
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

#[derive(Debug, Clone)]
struct Bluestein {
    n: usize,
    inner: Radix2,
    /// `exp(-iπ k²/n)`.
    chirp: Vec<Complex64>,
    /// Forward transform of the conjugate chirp filter, already divided by the
    /// padded length.
    filter_hat: Vec<Complex64>,
}

impl Bluestein {
    fn new(n: usize) -> Self {
        let m = (2 * n - 1).next_power_of_two();
        let inner = Radix2::new(m);
        // k² mod 2n keeps the chirp angle small and exact
        let chirp: Vec<Complex64> = (0..n)
            .map(|k| {
                let k2 = ((k as u128 * k as u128) % (2 * n as u128)) as f64;
                let a = -PI * k2 / n as f64;
                Complex64::new(a.cos(), a.sin())
            })
            .collect();
        let mut filter = vec![Complex64::new(0.0, 0.0); m];
        filter[0] = chirp[0].conj();
        for k in 1..n {
            filter[k] = chirp[k].conj();
            filter[m - k] = chirp[k].conj();
        }
        inner.process(&mut filter, Direction::Forward);
        let scale = 1.0 / m as f64;
        for f in &mut filter {
            *f = *f * scale;
        }
        Self {
            n,
            inner,
            chirp,
            filter_hat: filter,
        }
    }

    fn process(&self, buf: &mut [Complex64], dir: Direction) {
        // inverse(x) = conj(forward(conj(x)))
        if dir == Direction::Inverse {
            buf.iter_mut().for_each(|v| *v = v.conj());
        }
        let m = self.inner.n;
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..self.n {
            work[k] = buf[k] * self.chirp[k];
        }
        self.inner.process(&mut work, Direction::Forward);
        for (w, f) in work.iter_mut().zip(&self.filter_hat) {
            *w *= f;
        }
        self.inner.process(&mut work, Direction::Inverse);
        for k in 0..self.n {
            buf[k] = work[k] * self.chirp[k];
        }
        if dir == Direction::Inverse {
            buf.iter_mut().for_each(|v| *v = v.conj());
        }
    }
}

#[derive(Debug, Clone)]
enum Plan {
    Trivial,
    Radix2(Radix2),
    Bluestein(Bluestein),
}

/// A reusable DFT plan for one transform length.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    plan: Plan,
}

impl Fft {
    pub fn new(n: usize) -> Result<Self> {
        let plan = match n {
            0 => return Err(Error::InvalidDimension(0)),
            1 => Plan::Trivial,
            n if n.is_power_of_two() => Plan::Radix2(Radix2::new(n)),
            n => Plan::Bluestein(Bluestein::new(n)),
        };
        Ok(Self { n, plan })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place unnormalized transform. Panics if `buf.len()` differs from the
    /// plan length.
    pub fn process(&self, buf: &mut [Complex64], dir: Direction) {
        assert_eq!(buf.len(), self.n, "buffer length does not match FFT plan");
        match &self.plan {
            Plan::Trivial => {}
            Plan::Radix2(p) => p.process(buf, dir),
            Plan::Bluestein(p) => p.process(buf, dir),
        }
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.process(buf, Direction::Forward);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.process(buf, Direction::Inverse);
    }
}
