//! Complex Schur decomposition `M = Z T Z*` by Householder reduction to
//! Hessenberg form followed by single-shift QR sweeps, and eigenvectors of
//! the triangular factor.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) struct Schur {
    pub t: DMatrix<Complex64>,
    pub z: DMatrix<Complex64>,
}

/// Rotation `G = [[c, s], [−s̄, c]]` with real `c` such that `G·[x; y] = [r; 0]`.
#[derive(Clone, Copy)]
struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    fn new(x: Complex64, y: Complex64) -> Self {
        if y == ZERO {
            return Self { c: 1.0, s: ZERO };
        }
        if x == ZERO {
            return Self { c: 0.0, s: ONE };
        }
        let ax = x.norm();
        let norm = ax.hypot(y.norm());
        let phase = x / ax;
        Self {
            c: ax / norm,
            s: phase * y.conj() / norm,
        }
    }

    /// Rows `i`, `i+1` of `m` ← `G ·` rows, for columns in `cols`.
    fn rotate_rows(self, m: &mut DMatrix<Complex64>, i: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let a = m[(i, j)];
            let b = m[(i + 1, j)];
            m[(i, j)] = a * self.c + self.s * b;
            m[(i + 1, j)] = -self.s.conj() * a + b * self.c;
        }
    }

    /// Columns `j`, `j+1` of `m` ← columns `· G*`, for rows in `rows`.
    fn rotate_cols(self, m: &mut DMatrix<Complex64>, j: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let a = m[(i, j)];
            let b = m[(i, j + 1)];
            m[(i, j)] = a * self.c + b * self.s.conj();
            m[(i, j + 1)] = -self.s * a + b * self.c;
        }
    }
}

/// Unitary reduction to upper Hessenberg form, `M = Q H Q*`.
fn hessenberg(mut h: DMatrix<Complex64>) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let n = h.nrows();
    let mut q = DMatrix::<Complex64>::identity(n, n);
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for c in v.iter_mut() {
            *c /= vnorm;
        }
        // H ← (I − 2vv*) H on rows k+1.., columns k..
        for j in k..n {
            let dot: Complex64 = v.iter().enumerate().map(|(a, va)| va.conj() * h[(k + 1 + a, j)]).sum();
            for (a, va) in v.iter().enumerate() {
                h[(k + 1 + a, j)] -= va * dot * 2.0;
            }
        }
        // H ← H (I − 2vv*) and Q ← Q (I − 2vv*) on columns k+1..
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let dot: Complex64 = v.iter().enumerate().map(|(a, va)| m[(i, k + 1 + a)] * va).sum();
                for (a, va) in v.iter().enumerate() {
                    m[(i, k + 1 + a)] -= dot * va.conj() * 2.0;
                }
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// Eigenvalue of the trailing 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let p = (a - d) * 0.5;
    let bc = b * c;
    let disc = (p * p + bc).sqrt();
    let (plus, minus) = (p + disc, p - disc);
    let denom = if plus.norm() >= minus.norm() { plus } else { minus };
    if denom == ZERO {
        d
    } else {
        d - bc / denom
    }
}

pub(crate) fn schur(m: &DMatrix<Complex64>) -> Result<Schur> {
    let n = m.nrows();
    let (mut h, mut z) = hessenberg(m.clone());
    if n < 2 {
        return Ok(Schur { t: h, z });
    }
    let eps = f64::EPSILON;
    let hnorm = h.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let max_iterations = 30 * n;
    let mut total = 0;
    let mut since_deflation = 0;
    let mut hi = n - 1;
    while hi > 0 {
        // find the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if scale == 0.0 {
                scale = hnorm;
            }
            if sub <= eps * scale || sub < f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > max_iterations {
            return Err(Error::NoConvergence { iterations: total });
        }
        let shift = if since_deflation % 10 == 0 {
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * 0.75
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for k in lo..hi {
            let (x, y) = if k == lo {
                (h[(lo, lo)] - shift, h[(lo + 1, lo)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let g = Givens::new(x, y);
            let first_col = if k == lo { lo } else { k - 1 };
            g.rotate_rows(&mut h, k, first_col..n);
            if k > lo {
                h[(k + 1, k - 1)] = ZERO;
            }
            g.rotate_cols(&mut h, k, 0..(k + 3).min(hi + 1));
            g.rotate_cols(&mut z, k, 0..n);
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = ZERO;
        }
    }
    Ok(Schur { t: h, z })
}

/// Right eigenvectors `x` with `T x = λ x`, one per diagonal entry, as columns.
pub(crate) fn triangular_right_vectors(t: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = t.nrows();
    let smin = small_pivot(t);
    let mut out = DMatrix::from_element(n, n, ZERO);
    for i in 0..n {
        let lambda = t[(i, i)];
        let mut x = vec![ZERO; i + 1];
        x[i] = ONE;
        for j in (0..i).rev() {
            let rhs: Complex64 = (j + 1..=i).map(|k| t[(j, k)] * x[k]).sum();
            x[j] = -rhs / pivot(t[(j, j)] - lambda, smin);
            rescale_if_large(&mut x, j);
        }
        for (j, v) in x.into_iter().enumerate() {
            out[(j, i)] = v;
        }
    }
    out
}

/// Left eigenvectors `w` with `w T = λ w`, as columns.
pub(crate) fn triangular_left_vectors(t: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = t.nrows();
    let smin = small_pivot(t);
    let mut out = DMatrix::from_element(n, n, ZERO);
    for i in 0..n {
        let lambda = t[(i, i)];
        let mut w = vec![ZERO; n];
        w[i] = ONE;
        for j in i + 1..n {
            let rhs: Complex64 = (i..j).map(|k| w[k] * t[(k, j)]).sum();
            w[j] = -rhs / pivot(t[(j, j)] - lambda, smin);
            rescale_if_large(&mut w, j);
        }
        for (j, v) in w.into_iter().enumerate() {
            out[(j, i)] = v;
        }
    }
    out
}

fn small_pivot(t: &DMatrix<Complex64>) -> f64 {
    let norm = t.iter().map(|c| c.norm()).fold(0.0, f64::max);
    (f64::EPSILON * norm).max(f64::MIN_POSITIVE)
}

fn pivot(d: Complex64, smin: f64) -> Complex64 {
    if d.norm() < smin {
        Complex64::new(smin, 0.0)
    } else {
        d
    }
}

fn rescale_if_large(v: &mut [Complex64], just_set: usize) {
    if v[just_set].norm() > 1e150 {
        let s = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for c in v.iter_mut() {
            *c /= s;
        }
    }
}
