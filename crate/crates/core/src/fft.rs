//! Square radix-2 2-D FFT.
//!
//! Forward transforms are unnormalized; inverse transforms carry the `1/N²`
//! factor so `ifft2(fft2(x)) == x`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Precomputed twiddles and bit-reversal table for `n × n` transforms.
#[derive(Debug, Clone)]
pub struct Fft2Plan {
    n: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Fft2Plan {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::Size(format!("FFT size {n} is not a power of two")));
        }
        let twiddles = (0..n / 2)
            .map(|k| {
                let a = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(libm::cos(a), libm::sin(a))
            })
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n).map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) }).collect();
        Ok(Self { n, twiddles, bitrev })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    // In-place 1-D transform over `buf[offset + k·stride]`.
    fn transform_1d(&self, buf: &mut [Complex64], offset: usize, stride: usize, inverse: bool) {
        let n = self.n;
        let at = |i: usize| offset + i * stride;
        for i in 0..n {
            let j = self.bitrev[i];
            if j > i {
                buf.swap(at(i), at(j));
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * step];
                    if inverse {
                        w = w.conj();
                    }
                    let a = buf[at(start + k)];
                    let b = buf[at(start + k + half)] * w;
                    buf[at(start + k)] = a + b;
                    buf[at(start + k + half)] = a - b;
                }
            }
            len <<= 1;
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n * self.n {
            return Err(Error::Size(format!("expected {0}x{0} = {1} samples, got {len}", self.n, self.n * self.n)));
        }
        Ok(())
    }

    /// Forward transform in place (rows, then columns).
    pub fn forward_in_place(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check_len(buf.len())?;
        self.transform_2d(buf, false);
        Ok(())
    }

    /// Inverse transform in place, including the `1/N²` normalization.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check_len(buf.len())?;
        self.transform_2d(buf, true);
        let scale = 1.0 / (self.n * self.n) as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
        Ok(())
    }

    fn transform_2d(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        for row in 0..n {
            self.transform_1d(buf, row * n, 1, inverse);
        }
        for col in 0..n {
            self.transform_1d(buf, col, n, inverse);
        }
    }

    pub fn fft2(&self, input: &[f64]) -> Result<Vec<Complex64>> {
        let mut buf: Vec<Complex64> = input.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_in_place(&mut buf)?;
        Ok(buf)
    }

    /// Inverse transform keeping only the real part.
    pub fn ifft2(&self, spectrum: &[Complex64]) -> Result<Vec<f64>> {
        let mut buf = spectrum.to_vec();
        self.inverse_in_place(&mut buf)?;
        Ok(buf.into_iter().map(|c| c.re).collect())
    }
}

fn side_of(len: usize) -> Result<usize> {
    let n = libm::sqrt(len as f64) as usize;
    if n * n != len {
        return Err(Error::Size(format!("{len} samples do not form a square array")));
    }
    Ok(n)
}

/// Forward 2-D DFT of a row-major `N × N` real array.
pub fn fft2(input: &[f64]) -> Result<Vec<Complex64>> {
    Fft2Plan::new(side_of(input.len())?)?.fft2(input)
}

/// Inverse 2-D DFT of a row-major `N × N` spectrum, real part.
pub fn ifft2(spectrum: &[Complex64]) -> Result<Vec<f64>> {
    Fft2Plan::new(side_of(spectrum.len())?)?.ifft2(spectrum)
}
