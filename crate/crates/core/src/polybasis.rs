//! Chebyshev and Fourier–Laurent interpolation bases.
//!
//! Coefficients are stored raw: a [`ChebCoeffs`] vector `d` represents
//! `d₀/2 + Σ_{l≥1} d_l T_l`, and a [`LaurentCoeffs`] vector `c` represents
//! `(1/2n) Σ_{l=-n}^{n-1} c_l z^l`. The normalising factors live in evaluation,
//! so `d_l = (2/n) Σ_k f(x_k) T_l(x_k)` and `c_l = Σ_k f(z_k) z_k^{-l}` are plain
//! discrete sums.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Zeros of `T_n`, `x_k = cos((2k+1)π/(2n))`, in decreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebGrid {
    nodes: Vec<f64>,
    // cos(πm/(2n)) for m = 0..4n; T_l(x_k) = cos(π l(2k+1) / (2n)).
    cos_table: Arc<[f64]>,
}

impl ChebGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `T_l(x_k)`, exact up to one rounding of a cosine.
    #[inline]
    pub fn t_at_node(&self, l: usize, k: usize) -> f64 {
        let n = self.nodes.len();
        self.cos_table[(l * (2 * k + 1)) % (4 * n)]
    }
}

/// Chebyshev coefficients `d_0..d_{n-1}` with the `d₀/2` convention.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebCoeffs {
    coeffs: Vec<Complex64>,
}

impl ChebCoeffs {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        cheb_eval(self, x)
    }
}

/// The `2n` roots of `−1`, `z_k = exp(iπ(2k+1)/(2n))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierGrid {
    half: usize,
    nodes: Vec<Complex64>,
    // exp(-iπm/(2n)) for m = 0..4n; z_k^{-l} = exp(-iπ l(2k+1)/(2n)).
    twiddles: Arc<[Complex64]>,
}

impl FourierGrid {
    /// `n`, half the number of nodes.
    pub fn half_len(&self) -> usize {
        self.half
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    /// `z_k^{-l}` for any integer degree `l`.
    #[inline]
    pub fn inverse_power(&self, k: usize, l: isize) -> Complex64 {
        let period = 4 * self.half as isize;
        let m = (l * (2 * k as isize + 1)).rem_euclid(period);
        self.twiddles[m as usize]
    }
}

/// Laurent coefficients `c_{-n}..c_{n-1}` with the `1/2n` convention.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentCoeffs {
    half: usize,
    coeffs: Vec<Complex64>,
}

impl LaurentCoeffs {
    /// Build from `2n` coefficients ordered by degree `-n..n-1`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() || !coeffs.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "Laurent coefficient vector must have positive even length, got {}",
                coeffs.len()
            )));
        }
        Ok(Self {
            half: coeffs.len() / 2,
            coeffs,
        })
    }

    pub fn half_len(&self) -> usize {
        self.half
    }

    /// Lowest stored degree, `-n`.
    pub fn min_degree(&self) -> isize {
        -(self.half as isize)
    }

    /// Highest stored degree, `n-1`.
    pub fn max_degree(&self) -> isize {
        self.half as isize - 1
    }

    /// Coefficient of `z^l`; zero outside `[-n, n-1]`.
    pub fn get(&self, l: isize) -> Complex64 {
        if l < self.min_degree() || l > self.max_degree() {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(l + self.half as isize) as usize]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        laurent_eval(self, z)
    }
}

pub fn cheb_nodes(n: usize) -> Result<ChebGrid> {
    if n == 0 {
        return Err(Error::EmptyBasis);
    }
    let cos_table: Arc<[f64]> = (0..4 * n)
        .map(|m| (PI * m as f64 / (2 * n) as f64).cos())
        .collect();
    let nodes = (0..n).map(|k| cos_table[2 * k + 1]).collect();
    Ok(ChebGrid { nodes, cos_table })
}

/// Coefficients of the degree-`(n-1)` interpolant at the Chebyshev nodes,
/// `d_l = (2/n) Σ_k f(x_k) T_l(x_k)`.
pub fn cheb_transform(grid: &ChebGrid, values: &[Complex64]) -> Result<ChebCoeffs> {
    let n = grid.len();
    if values.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: values.len(),
        });
    }
    let scale = 2.0 / n as f64;
    let coeffs = (0..n)
        .map(|l| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(k, v)| v * grid.t_at_node(l, k))
                .sum();
            sum * scale
        })
        .collect();
    Ok(ChebCoeffs { coeffs })
}

/// `d₀/2 + Σ d_l T_l(x)` by Clenshaw's recurrence; valid for complex `x`.
pub fn cheb_eval(coeffs: &ChebCoeffs, x: Complex64) -> Complex64 {
    let d = &coeffs.coeffs;
    let zero = Complex64::new(0.0, 0.0);
    match d.len() {
        0 => zero,
        1 => d[0] * 0.5,
        _ => {
            let two_x = x * 2.0;
            let (mut b1, mut b2) = (zero, zero);
            for &dk in d[1..].iter().rev() {
                let b0 = dk + two_x * b1 - b2;
                b2 = b1;
                b1 = b0;
            }
            d[0] * 0.5 + x * b1 - b2
        }
    }
}

/// `T_0(x), …, T_{n-1}(x)` by the three-term recurrence.
pub fn chebyshev_values(x: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(Complex64::new(1.0, 0.0));
    if n == 1 {
        return out;
    }
    out.push(x);
    let two_x = x * 2.0;
    for l in 2..n {
        let next = two_x * out[l - 1] - out[l - 2];
        out.push(next);
    }
    out
}

pub fn equi_nodes(n: usize) -> Result<FourierGrid> {
    if n == 0 {
        return Err(Error::EmptyBasis);
    }
    let twiddles: Arc<[Complex64]> = (0..4 * n)
        .map(|m| Complex64::from_polar(1.0, -PI * m as f64 / (2 * n) as f64))
        .collect();
    // z_k = conj(z_k^{-1}) = conj(twiddles[2k+1])
    let nodes = (0..2 * n).map(|k| twiddles[2 * k + 1].conj()).collect();
    Ok(FourierGrid {
        half: n,
        nodes,
        twiddles,
    })
}

/// Direct discrete transform `c_l = Σ_k f(z_k) z_k^{-l}`, `l = -n..n-1`.
pub fn laurent_transform(grid: &FourierGrid, values: &[Complex64]) -> Result<LaurentCoeffs> {
    let n = grid.half_len();
    if values.len() != 2 * n {
        return Err(Error::LengthMismatch {
            expected: 2 * n,
            got: values.len(),
        });
    }
    let coeffs = (-(n as isize)..n as isize)
        .map(|l| {
            values
                .iter()
                .enumerate()
                .map(|(k, v)| v * grid.inverse_power(k, l))
                .sum()
        })
        .collect();
    Ok(LaurentCoeffs { half: n, coeffs })
}

/// Same coefficients as [`laurent_transform`] through a length-`2n` FFT:
/// `c_l = e^{-iπl/(2n)} · DFT(f)[l mod 2n]`.
pub fn laurent_transform_fft(grid: &FourierGrid, values: &[Complex64]) -> Result<LaurentCoeffs> {
    let n = grid.half_len();
    let len = 2 * n;
    if values.len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            got: values.len(),
        });
    }
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let coeffs = (-(n as isize)..n as isize)
        .map(|l| {
            let bin = l.rem_euclid(len as isize) as usize;
            // z_0^{-l} = exp(-iπl/(2n))
            buf[bin] * grid.inverse_power(0, l)
        })
        .collect();
    Ok(LaurentCoeffs { half: n, coeffs })
}

/// `(1/2n) Σ c_l z^l` for nonzero `z`.
pub fn laurent_eval(coeffs: &LaurentCoeffs, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument("Laurent polynomial"));
    }
    let n = coeffs.half;
    let c = &coeffs.coeffs;
    let zero = Complex64::new(0.0, 0.0);
    // non-negative degrees 0..n-1 by Horner in z
    let mut pos = zero;
    for &cl in c[n..].iter().rev() {
        pos = pos * z + cl;
    }
    // negative degrees -n..-1 by Horner in 1/z
    let w = z.inv();
    let mut neg = zero;
    for &cl in c[..n].iter() {
        neg = (neg + cl) * w;
    }
    Ok((pos + neg) / (2 * n) as f64)
}
