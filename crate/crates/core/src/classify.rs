//! Real-parameter classification: sign signatures, the index `κ` of the
//! generalized Nevanlinna class containing `ε_0 B`, kernel negative squares,
//! Gauss quadrature in the classical case and the `G`-symmetric matrix `H`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cfrac::{diag_entry, jacobi_coeffs, offdiag_sq_entry, offdiag_vanishes};
use crate::eigen::{symmetric_tridiag_eigen, tridiag_solve};
use crate::error::{Error, Result};
use crate::hyp::HypParams;
use crate::spectral::{b_function, Method};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub const DEFAULT_SCAN_LIMIT: usize = 10_000;

/// Classical condition `0 < a < c + 1`, `0 < b + 1 < c + 1`, `c > 0`, under
/// which every `c_k < 0` and `B` is a Stieltjes transform on `[-2, 2]`.
pub fn stieltjes_check(p: &HypParams) -> Result<bool> {
    if !p.is_real {
        return Err(Error::NotRealParams);
    }
    let (a, b, c) = (p.a.re, p.b.re, p.c.re);
    Ok(0.0 < a && a < c + 1.0 && 0.0 < b + 1.0 && b + 1.0 < c + 1.0 && c > 0.0)
}

/// Signs `ε_j` absorbing the signs of `b_j^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignSignature {
    /// `ε_0 .. ε_{len-1}`; every later sign is `+1`.
    pub epsilons: Vec<i8>,
    /// Stabilization index: `b_j^2 > 0` for all `j ≥ n` and `b_{n-1}^2 < 0`.
    pub n: usize,
    pub kappa: usize,
    /// `b̃_j = sqrt(|b_j^2|)` for the listed indices.
    pub btilde: Vec<f64>,
    pub offdiag_sq: Vec<f64>,
    /// Set when the J-fraction terminates; the signature then describes the
    /// leading block only.
    pub terminated_at: Option<usize>,
}

impl SignSignature {
    pub fn epsilon(&self, j: usize) -> i8 {
        self.epsilons.get(j).copied().unwrap_or(1)
    }
}

/// First index past which every `b_k^2` is positive for real parameters.
///
/// All factors of `16 (a+k+1)(c-b+k+1)(b+k+1)(c-a+k+1) / ((c+2k+2)^2 (c+2k+3)(c+2k+1))`
/// are positive from there on.
pub fn stabilization_bound(p: &HypParams) -> usize {
    let (a, b, c) = (p.a.re, p.b.re, p.c.re);
    let first_above = |y: f64| -> i64 { y.floor() as i64 + 1 };
    let bound = [a, c - b, b, c - a]
        .iter()
        .map(|x| first_above(-x - 1.0))
        .chain(std::iter::once(first_above((-c - 1.0) / 2.0)))
        .max()
        .unwrap_or(0);
    bound.max(0) as usize
}

fn signature_from(offdiag_sq: Vec<f64>, len: usize, terminated_at: Option<usize>) -> SignSignature {
    let n = offdiag_sq.iter().rposition(|b2| *b2 < 0.0).map_or(0, |j| j + 1);
    let len = len.max(n + 1);
    let mut epsilons = vec![1i8; len];
    for j in (0..n).rev() {
        epsilons[j] = if offdiag_sq[j] < 0.0 {
            -epsilons[j + 1]
        } else {
            epsilons[j + 1]
        };
    }
    let kappa = epsilons[..n].iter().filter(|e| **e < 0).count();
    let btilde = offdiag_sq.iter().map(|b2| b2.abs().sqrt()).collect();
    SignSignature {
        epsilons,
        n,
        kappa,
        btilde,
        offdiag_sq,
        terminated_at,
    }
}

fn scan(p: &HypParams, scan_limit: usize, allow_termination: bool) -> Result<SignSignature> {
    if !p.is_real {
        return Err(Error::NotRealParams);
    }
    let bound = stabilization_bound(p);
    if bound > scan_limit {
        return Err(Error::ScanExhausted { limit: scan_limit });
    }
    let len = bound + 1;
    let mut offdiag_sq = Vec::with_capacity(len);
    for j in 0..len {
        if offdiag_vanishes(p, j) {
            if !allow_termination {
                return Err(Error::Terminating { index: j });
            }
            return Ok(signature_from(offdiag_sq, j + 1, Some(j)));
        }
        offdiag_sq.push(offdiag_sq_entry(p, j).re);
    }
    Ok(signature_from(offdiag_sq, len, None))
}

/// Sign signature of a non-terminating real J-fraction.
pub fn sign_signature(p: &HypParams, scan_limit: usize) -> Result<SignSignature> {
    scan(p, scan_limit, false)
}

/// Like [`sign_signature`], but a terminating fraction yields the signature
/// of its leading block instead of an error.
pub fn leading_block_signature(p: &HypParams, scan_limit: usize) -> Result<SignSignature> {
    scan(p, scan_limit, true)
}

/// Hermitian matrix `(φ(z_i) - conj φ(z_j)) / (z_i - conj z_j)`.
pub fn kernel_matrix(values: &[(Complex64, Complex64)]) -> Result<DMatrix<Complex64>> {
    for (i, (zi, _)) in values.iter().enumerate() {
        if zi.im == 0.0 {
            return Err(Error::DegenerateSamples);
        }
        for (zj, _) in &values[..i] {
            if (zi - zj).norm() <= 1e-12 * zi.norm().max(1.0) || (zi - zj.conj()).norm() == 0.0 {
                return Err(Error::DegenerateSamples);
            }
        }
    }
    let n = values.len();
    let mut k = DMatrix::from_fn(n, n, |i, j| {
        let (zi, fi) = values[i];
        let (zj, fj) = values[j];
        (fi - fj.conj()) / (zi - zj.conj())
    });
    // exact Hermitian symmetry for the eigensolver
    for i in 0..n {
        k[(i, i)].im = 0.0;
        for j in 0..i {
            let avg = (k[(i, j)] + k[(j, i)].conj()) * 0.5;
            k[(i, j)] = avg;
            k[(j, i)] = avg.conj();
        }
    }
    Ok(k)
}

/// Eigenvalues of the sampled kernel matrix.
pub fn kernel_eigenvalues(values: &[(Complex64, Complex64)]) -> Result<Vec<f64>> {
    let k = kernel_matrix(values)?;
    Ok(k.symmetric_eigenvalues().iter().copied().collect())
}

/// Number of kernel eigenvalues below `-tol`.
pub fn negative_squares(values: &[(Complex64, Complex64)], tol: f64) -> Result<usize> {
    Ok(kernel_eigenvalues(values)?.iter().filter(|l| **l < -tol).count())
}

/// Outcome of the randomized kernel search.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaCertificate {
    pub kappa: usize,
    pub kappa_bound_ok: bool,
    pub max_negatives_seen: usize,
    pub counts: Vec<usize>,
    /// The signature came from a terminating fraction's leading block.
    pub terminated: bool,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Relative threshold for counting a kernel eigenvalue as negative.
pub const KERNEL_REL_TOL: f64 = 1e-10;
const CERT_TOL: f64 = 1e-13;

fn sample_set(p: &HypParams, eps0: f64, size: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(Complex64, Complex64)>> {
    let mut values: Vec<(Complex64, Complex64)> = Vec::with_capacity(size);
    let mut attempts = 0;
    while values.len() < size {
        attempts += 1;
        if attempts > 100 * size.max(1) {
            return Err(Error::DegenerateSamples);
        }
        let z = Complex64::new(rng.random_range(-4.0..4.0), rng.random_range(0.3..3.0));
        if values.iter().any(|(w, _)| (w - z).norm() < 1e-3) {
            continue;
        }
        match b_function(p, z, Method::Cf, CERT_TOL) {
            Ok(b) if b.norm() < 1e8 => values.push((z, eps0 * b)),
            Ok(_) | Err(Error::NearPole { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(values)
}

/// Searches random point sets in `[-4, 4] × [0.3, 3]` for negative squares of
/// the kernel of `ε_0 B` and compares the largest count with `κ`.
pub fn kappa_certificate(p: &HypParams, trials: usize, sample_size: usize, seed: u64) -> Result<KappaCertificate> {
    let sig = leading_block_signature(p, DEFAULT_SCAN_LIMIT)?;
    let eps0 = f64::from(sig.epsilon(0));
    let counts = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(trial as u64)));
            let values = sample_set(p, eps0, sample_size, &mut rng)?;
            let eig = kernel_eigenvalues(&values)?;
            let scale = eig.iter().fold(0.0f64, |m, l| m.max(l.abs()));
            Ok(eig.iter().filter(|l| **l < -KERNEL_REL_TOL * scale).count())
        })
        .collect::<Result<Vec<usize>>>()?;
    let max_negatives_seen = counts.iter().copied().max().unwrap_or(0);
    Ok(KappaCertificate {
        kappa: sig.kappa,
        kappa_bound_ok: max_negatives_seen <= sig.kappa,
        max_negatives_seen,
        counts,
        terminated: sig.terminated_at.is_some(),
    })
}

/// `z ↦ -ε / (z - γ + ε δ^2 ψ(z))`.
pub fn schur_step<F>(psi: F, epsilon: i8, gamma: f64, delta: f64) -> impl Fn(Complex64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    assert!(delta > 0.0, "delta must be positive");
    let eps = f64::from(epsilon.signum());
    move |z| {
        let den = z - gamma + eps * delta * delta * psi(z)?;
        if den == ZERO {
            return Err(Error::NearPole { z });
        }
        Ok(Complex64::new(-eps, 0.0) / den)
    }
}

/// Classical tail `φ_start(z) = -1/(z - a_s) - b_s^2/(z - a_{s+1}) - ...`
/// by backward recurrence with doubling depth.
pub fn tail_m_function(p: &HypParams, start: usize, z: Complex64, tol: f64) -> Result<Complex64> {
    let max_depth = 1 << 16;
    let eval = |end: usize| -> Complex64 {
        let mut t = ZERO;
        for k in (start..end).rev() {
            let b2 = if k + 1 < end { offdiag_sq_entry(p, k) } else { ZERO };
            t = -ONE / (z - diag_entry(p, k) + b2 * t);
        }
        t
    };
    if let Some(t) = (start..start + max_depth).find(|&k| offdiag_vanishes(p, k)) {
        if t < start + 64 {
            return Ok(eval(t + 1));
        }
    }
    let mut depth = 32;
    let mut previous = eval(start + depth);
    loop {
        depth *= 2;
        let current = eval(start + depth);
        let correction = (current - previous).norm();
        if correction <= tol * current.norm().max(1.0) {
            return Ok(current);
        }
        if depth >= max_depth {
            return Err(Error::NoConvergence {
                steps: depth,
                last_correction: correction,
            });
        }
        previous = current;
    }
}

/// Rebuilds `ε_0 B(z)` from the Nevanlinna tail `φ_N` by the backward steps
/// `φ_j = -ε_j / (z - a_j + ε_j b̃_j^2 φ_{j+1})`.
pub fn schur_chain(p: &HypParams, z: Complex64, tol: f64) -> Result<Complex64> {
    let sig = leading_block_signature(p, DEFAULT_SCAN_LIMIT)?;
    let start = match sig.terminated_at {
        Some(t) => t + 1,
        None => sig.n,
    };
    let mut phi: Box<dyn Fn(Complex64) -> Result<Complex64>> = match sig.terminated_at {
        Some(_) => Box::new(|_| Ok(ZERO)),
        None => {
            let q = *p;
            Box::new(move |z| tail_m_function(&q, start, z, tol))
        }
    };
    for j in (0..start).rev() {
        let gamma = diag_entry(p, j).re;
        let (eps, delta) = (sig.epsilon(j), sig.btilde.get(j).copied());
        phi = match delta {
            Some(d) if d > 0.0 => Box::new(schur_step(phi, eps, gamma, d)),
            // last row of a terminated block has no coupling
            _ => {
                let e = f64::from(eps);
                Box::new(move |z: Complex64| {
                    let den = z - gamma;
                    if den == ZERO {
                        return Err(Error::NearPole { z });
                    }
                    Ok(Complex64::new(-e, 0.0) / den)
                })
            }
        };
    }
    phi(z)
}

/// Gauss quadrature for the measure of `B` in the classical case.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl Quadrature {
    /// `Σ w_i t_i^k`.
    pub fn moment(&self, k: u32) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * t.powi(k as i32))
            .sum()
    }
}

/// Nodes and weights from the eigen-decomposition of the real symmetric
/// order-`n` truncation.
pub fn quadrature(p: &HypParams, n: usize) -> Result<Quadrature> {
    if !stieltjes_check(p)? {
        return Err(Error::NotStieltjes);
    }
    if n == 0 {
        return Err(Error::InvalidArgument("quadrature order must be at least 1".into()));
    }
    let jc = jacobi_coeffs(p, n);
    let diag: Vec<Complex64> = jc.diag.iter().map(|a| Complex64::new(a.re, 0.0)).collect();
    let off: Vec<Complex64> = jc.offdiag_sq[..n - 1]
        .iter()
        .map(|b2| Complex64::new(b2.re.sqrt(), 0.0))
        .collect();
    let te = symmetric_tridiag_eigen(&diag, &off)?;
    let mut pairs: Vec<(f64, f64)> = te
        .values
        .iter()
        .zip(&te.first_components)
        .map(|(l, v)| (l.re, v.re * v.re))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(Quadrature {
        nodes,
        weights,
        order: n,
    })
}

/// `⟨J^k e, e⟩` for the real symmetric truncation, `k = 0 ..= max_power`.
pub fn jacobi_moments(p: &HypParams, n: usize, max_power: usize) -> Vec<f64> {
    let jc = jacobi_coeffs(p, n);
    let order = jc.length;
    let diag: Vec<f64> = jc.diag.iter().map(|a| a.re).collect();
    let off: Vec<f64> = jc.offdiag_sq[..order - 1].iter().map(|b2| b2.re.sqrt()).collect();
    let mut v = vec![0.0; order];
    v[0] = 1.0;
    let mut out = Vec::with_capacity(max_power + 1);
    for _ in 0..=max_power {
        out.push(v[0]);
        let next: Vec<f64> = (0..order)
            .map(|k| {
                let mut s = diag[k] * v[k];
                if k > 0 {
                    s += off[k - 1] * v[k - 1];
                }
                if k + 1 < order {
                    s += off[k] * v[k + 1];
                }
                s
            })
            .collect();
        v = next;
    }
    out
}

/// Real tridiagonal `H` with `H_{k,k+1} = b̃_k`, `H_{k+1,k} = ε_k ε_{k+1} b̃_k`
/// and the signature matrix `G = diag(ε_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GJacobi {
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub signs: Vec<i8>,
}

impl GJacobi {
    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.order();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.diag[i]
            } else if i == j + 1 {
                self.lower[j]
            } else if j == i + 1 {
                self.upper[i]
            } else {
                0.0
            }
        })
    }

    pub fn gram(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.order(),
            self.signs.iter().map(|s| f64::from(*s)),
        ))
    }

    /// `max_{k,l} |(H e_k, e_l)_G - (e_k, H e_l)_G|`.
    pub fn g_symmetry_residual(&self) -> f64 {
        let h = self.to_dense();
        let gh = self.gram() * &h;
        (&gh - gh.transpose()).amax()
    }

    pub fn norm(&self) -> f64 {
        self.to_dense().amax()
    }
}

/// Builds `H` and `G` of order `n` (or the terminated block).
pub fn build_h(p: &HypParams, n: usize) -> Result<GJacobi> {
    let sig = leading_block_signature(p, DEFAULT_SCAN_LIMIT)?;
    let available = sig.terminated_at.map_or(usize::MAX, |t| t + 1);
    let order = n.min(available);
    if order < sig.n {
        return Err(Error::OrderBelowStabilization { order, required: sig.n });
    }
    let diag: Vec<f64> = (0..order).map(|k| diag_entry(p, k).re).collect();
    let btilde: Vec<f64> = (0..order.saturating_sub(1))
        .map(|k| {
            sig.btilde
                .get(k)
                .copied()
                .unwrap_or_else(|| offdiag_sq_entry(p, k).re.abs().sqrt())
        })
        .collect();
    let lower = btilde
        .iter()
        .enumerate()
        .map(|(k, b)| f64::from(sig.epsilon(k) * sig.epsilon(k + 1)) * b)
        .collect();
    let signs = (0..order).map(|k| sig.epsilon(k)).collect();
    Ok(GJacobi {
        diag,
        upper: btilde,
        lower,
        signs,
    })
}

/// `((H - z)^{-1} e, e)_G = ε_0 x_0`.
pub fn h_m_function(p: &HypParams, z: Complex64, n: usize) -> Result<Complex64> {
    let h = build_h(p, n)?;
    let to_c = |v: &[f64]| v.iter().map(|x| Complex64::new(*x, 0.0)).collect::<Vec<_>>();
    let (lower, diag, upper) = (to_c(&h.lower), to_c(&h.diag), to_c(&h.upper));
    let mut rhs = vec![ZERO; h.order()];
    rhs[0] = ONE;
    let x = tridiag_solve(&lower, &diag, &upper, z, &rhs).ok_or(Error::NearSingular { growth: f64::INFINITY })?;
    let norm = h
        .to_dense()
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + z.norm();
    let growth = x.iter().map(|v| v.norm()).fold(0.0, f64::max) * norm;
    if growth > 1e12 {
        return Err(Error::NearSingular { growth });
    }
    Ok(f64::from(h.signs[0]) * x[0])
}
