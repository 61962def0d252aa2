//! Small dense/tridiagonal linear algebra over `Complex64`.
//!
//! The tridiagonal eigensolver is an implicit QL iteration with complex
//! orthogonal rotations (`c^2 + s^2 = 1`), which keeps complex symmetric
//! tridiagonal matrices tridiagonal. Those rotations are not unitary and can
//! break down, in which case the caller falls back to [`hessenberg_eigenvalues`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const EPS: f64 = f64::EPSILON;

/// Eigenvalues of a complex symmetric tridiagonal matrix together with the
/// first components of the eigenvectors, normalized so that `v^T v = 1`.
#[derive(Debug, Clone)]
pub struct TridiagEigen {
    pub values: Vec<Complex64>,
    pub first_components: Vec<Complex64>,
}

/// Solves `(T - shift I) x = rhs` for a general tridiagonal `T` by Gaussian
/// elimination with partial pivoting.
///
/// `lower[k] = T[k+1][k]`, `upper[k] = T[k][k+1]`.
pub fn tridiag_solve(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    shift: Complex64,
    rhs: &[Complex64],
) -> Option<Vec<Complex64>> {
    let n = diag.len();
    assert!(lower.len() + 1 >= n && upper.len() + 1 >= n && rhs.len() == n);
    if n == 0 {
        return Some(Vec::new());
    }
    // row k of U holds (u0 on diagonal, u1, u2)
    let mut u0: Vec<Complex64> = diag.iter().map(|d| d - shift).collect();
    let mut u1: Vec<Complex64> = (0..n).map(|k| if k + 1 < n { upper[k] } else { ZERO }).collect();
    let mut u2 = vec![ZERO; n];
    let mut l: Vec<Complex64> = (0..n).map(|k| if k + 1 < n { lower[k] } else { ZERO }).collect();
    let mut x = rhs.to_vec();
    for k in 0..n.saturating_sub(1) {
        if l[k].norm() > u0[k].norm() {
            // swap rows k and k+1
            let (r0, r1, r2) = (l[k], u0[k + 1], u1[k + 1]);
            let factor = u0[k] / r0;
            u0[k] = r0;
            let old_u1 = u1[k];
            u1[k] = r1;
            u2[k] = r2;
            x.swap(k, k + 1);
            u0[k + 1] = old_u1 - factor * r1;
            u1[k + 1] = -factor * r2;
            x[k + 1] = x[k + 1] - factor * x[k];
            l[k] = factor;
        } else {
            if u0[k] == ZERO {
                return None;
            }
            let factor = l[k] / u0[k];
            u0[k + 1] -= factor * u1[k];
            x[k + 1] = x[k + 1] - factor * x[k];
            l[k] = factor;
        }
    }
    for k in (0..n).rev() {
        if u0[k] == ZERO {
            return None;
        }
        let mut acc = x[k];
        if k + 1 < n {
            acc -= u1[k] * x[k + 1];
        }
        if k + 2 < n {
            acc -= u2[k] * x[k + 2];
        }
        x[k] = acc / u0[k];
    }
    if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Some(x)
    } else {
        None
    }
}

fn inf_norm_tridiag(lower: &[Complex64], diag: &[Complex64], upper: &[Complex64]) -> f64 {
    (0..diag.len())
        .map(|k| {
            let mut s = diag[k].norm();
            if k > 0 {
                s += lower[k - 1].norm();
            }
            if k < upper.len() && k + 1 < diag.len() {
                s += upper[k].norm();
            }
            s
        })
        .fold(0.0, f64::max)
}

/// Implicit QL on a complex symmetric tridiagonal matrix.
///
/// Tracks only the first row of the accumulated transformation.
pub fn symmetric_tridiag_eigen(diag: &[Complex64], offdiag: &[Complex64]) -> Result<TridiagEigen> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e: Vec<Complex64> = (0..n).map(|k| if k + 1 < n { offdiag[k] } else { ZERO }).collect();
    let mut z = vec![ZERO; n];
    if n == 0 {
        return Ok(TridiagEigen {
            values: d,
            first_components: z,
        });
    }
    z[0] = ONE;
    let norm = inf_norm_tridiag(offdiag, diag, offdiag).max(f64::MIN_POSITIVE);
    let max_iter = 60;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].norm() + d[m + 1].norm();
                if e[m].norm() <= EPS * dd.max(1e-3 * norm) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(Error::EigensolverFailure { iterations: iter });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let r = (g * g + ONE).sqrt();
            let denom = if (g + r).norm() >= (g - r).norm() { g + r } else { g - r };
            g = d[m] - d[l] + e[l] / denom;
            let (mut s, mut c, mut p) = (ONE, ONE, ZERO);
            let mut i = m;
            let mut recovered = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                let r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                let size = f.norm() + g.norm();
                if r.norm() <= 1e-300 + 1e-8 * size {
                    if size <= 1e-300 {
                        d[i + 1] -= p;
                        e[m] = ZERO;
                        recovered = true;
                        break;
                    }
                    // isotropic rotation: complex orthogonal QL cannot proceed
                    return Err(Error::EigensolverFailure { iterations: iter });
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if recovered {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = ZERO;
        }
    }
    if d.iter()
        .chain(z.iter())
        .any(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        return Err(Error::EigensolverFailure { iterations: max_iter });
    }
    Ok(TridiagEigen {
        values: d,
        first_components: z,
    })
}

/// Unitary Givens rotation `G` with `G (x, y)^T = (r, 0)^T`.
fn givens(x: Complex64, y: Complex64) -> (Complex64, Complex64) {
    let r = x.norm().hypot(y.norm());
    if r == 0.0 {
        (ONE, ZERO)
    } else {
        (x / r, y / r)
    }
}

/// Eigenvalues of an upper Hessenberg matrix by shifted QR with unitary
/// Givens rotations. The input is overwritten.
pub fn hessenberg_eigenvalues(h: &mut DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = h.nrows();
    assert_eq!(n, h.ncols());
    let mut eig = vec![ZERO; n];
    if n == 0 {
        return Ok(eig);
    }
    let norm = h.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let budget = 40 * n.max(10);
    let mut total = 0usize;
    let mut iter = 0usize;
    let mut hi = n - 1;
    let mut rot = Vec::with_capacity(n);
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let scale = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if h[(l, l - 1)].norm() <= EPS * scale.max(EPS * norm) {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > budget {
            return Err(Error::EigensolverFailure { iterations: total });
        }
        let shift = if iter % 11 == 10 {
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let (a, b, c, d) = (h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let mu1 = (a + d) * 0.5 + disc;
            let mu2 = (a + d) * 0.5 - disc;
            if (mu1 - d).norm() < (mu2 - d).norm() {
                mu1
            } else {
                mu2
            }
        };
        for k in l..=hi {
            h[(k, k)] -= shift;
        }
        rot.clear();
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = c.conj() * x + s.conj() * y;
                h[(k + 1, j)] = -s * x + c * y;
            }
            rot.push((c, s));
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = l + idx;
            for i in l..=(k + 1).min(hi) {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = x * c + y * s;
                h[(i, k + 1)] = -x * s.conj() + y * c.conj();
            }
        }
        for k in l..=hi {
            h[(k, k)] += shift;
        }
    }
    Ok(eig)
}

/// Dense matrix for a tridiagonal triple.
pub fn tridiag_dense(lower: &[Complex64], diag: &[Complex64], upper: &[Complex64]) -> DMatrix<Complex64> {
    let n = diag.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag[i]
        } else if i == j + 1 {
            lower[j]
        } else if j == i + 1 {
            upper[i]
        } else {
            ZERO
        }
    })
}

/// `Σ r_k'/r_k` for the pivots `r_k` of `T - λ I`, i.e. the logarithmic
/// derivative of the characteristic polynomial. `None` on an exact zero pivot.
fn log_det_derivative(diag: &[Complex64], offdiag_sq: &[Complex64], lambda: Complex64) -> Option<Complex64> {
    let mut r = diag[0] - lambda;
    let mut dr = -ONE;
    if r == ZERO {
        return None;
    }
    let mut acc = dr / r;
    for k in 1..diag.len() {
        let q = offdiag_sq[k - 1] / r;
        let r_next = diag[k] - lambda - q;
        let dr_next = -ONE + q * dr / r;
        r = r_next;
        dr = dr_next;
        if r == ZERO {
            return None;
        }
        acc += dr / r;
    }
    Some(acc)
}

/// Newton refinement on the characteristic polynomial of a tridiagonal
/// matrix, given by its diagonal and off-diagonal products.
pub fn newton_polish(diag: &[Complex64], offdiag_sq: &[Complex64], start: Complex64) -> Complex64 {
    let scale = start.norm().max(1.0);
    let mut lambda = start;
    let mut last_step = f64::INFINITY;
    for _ in 0..30 {
        let Some(ld) = log_det_derivative(diag, offdiag_sq, lambda) else {
            return lambda;
        };
        let step = ONE / ld;
        let size = step.norm();
        // stop once steps leave the basin or stop contracting
        if !size.is_finite() || size > 1e-3 * scale || size > 0.5 * last_step {
            break;
        }
        lambda -= step;
        last_step = size;
        if size <= 4.0 * EPS * scale {
            break;
        }
    }
    if (lambda - start).norm() > 1e-6 * scale {
        start
    } else {
        lambda
    }
}

/// Residual `‖T v - λ v‖₂` for an inverse-iteration eigenvector `‖v‖₂ = 1`.
pub fn eigen_residual(lower: &[Complex64], diag: &[Complex64], upper: &[Complex64], lambda: Complex64) -> f64 {
    let n = diag.len();
    let scale = inf_norm_tridiag(lower, diag, upper).max(1.0);
    let shift = lambda + Complex64::new(scale * 1e-14, scale * 1e-14);
    let mut v: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(1.0 + 0.1 * (k as f64 * 0.7).sin(), 0.1 * (k as f64 * 1.3).cos()))
        .collect();
    for _ in 0..3 {
        let Some(x) = tridiag_solve(lower, diag, upper, shift, &v) else {
            return 0.0;
        };
        let nrm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if nrm == 0.0 || !nrm.is_finite() {
            return f64::INFINITY;
        }
        v = x.into_iter().map(|c| c / nrm).collect();
    }
    (0..n)
        .map(|k| {
            let mut tv = (diag[k] - lambda) * v[k];
            if k > 0 {
                tv += lower[k - 1] * v[k - 1];
            }
            if k + 1 < n {
                tv += upper[k] * v[k + 1];
            }
            tv.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

/// Eigenvalues of a complex symmetric tridiagonal matrix; QL first,
/// dense Hessenberg QR when QL breaks down.
pub fn tridiag_eigenvalues(diag: &[Complex64], offdiag: &[Complex64]) -> Result<Vec<Complex64>> {
    match symmetric_tridiag_eigen(diag, offdiag) {
        Ok(te) => Ok(te.values),
        Err(_) => {
            let mut h = tridiag_dense(offdiag, diag, offdiag);
            hessenberg_eigenvalues(&mut h)
        }
    }
}
