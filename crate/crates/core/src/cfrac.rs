//! Continued fractions for `F(a,b,c;z) / F(a,b+1,c+1;z)` and their
//! contraction to Jacobi (J-fraction) coefficients.
//!
//! The C-fraction `1 + c_1 z/(1 + c_2 z/(1 + ...))` is rewritten with
//! `d_j = -c_j` as an S-fraction in `ζ = -1/z`, contracted to its even part,
//! and rescaled so that
//!
//! ```text
//! B(z) = -1/(z - a_0) - b_0^2/(z - a_1) - b_1^2/(z - a_2) - ...
//! a_0 = 2 - 4 d_2,   a_n = 2 - 4 d_{2n+1} - 4 d_{2n+2},   b_n^2 = 16 d_{2n+2} d_{2n+3}.
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hyp::HypParams;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Distance from the cut `[1, ∞)` below which evaluation is refused.
pub const CUT_GUARD: f64 = 1e-9;

/// Numerator and denominator factors of `c_j`, so that
/// `c_j = -num[0] num[1] / (den[0] den[1])`.
pub fn coeff_factors(p: &HypParams, j: usize) -> ([Complex64; 2], [Complex64; 2]) {
    assert!(j >= 1, "coefficient index starts at 1");
    let (a, b, c) = (p.a, p.b, p.c);
    if j % 2 == 1 {
        let m = ((j - 1) / 2) as f64;
        ([a + m, c - b + m], [c + 2.0 * m, c + 2.0 * m + 1.0])
    } else {
        let m = (j / 2) as f64;
        ([b + m, c - a + m], [c + 2.0 * m - 1.0, c + 2.0 * m])
    }
}

/// The C-fraction coefficient `c_j`, `j ≥ 1`.
pub fn c_coeff(p: &HypParams, j: usize) -> Complex64 {
    let (num, den) = coeff_factors(p, j);
    -(num[0] * num[1]) / (den[0] * den[1])
}

/// `d_j = -c_j`.
pub fn d_coeff(p: &HypParams, j: usize) -> Complex64 {
    -c_coeff(p, j)
}

/// True when a numerator factor of `c_j` is exactly zero.
pub fn coeff_vanishes(p: &HypParams, j: usize) -> bool {
    let (num, _) = coeff_factors(p, j);
    num[0] == ZERO || num[1] == ZERO
}

/// Lazily extended cache of `c_1, c_2, ...`.
///
/// Extension needs `&mut self`, so a stream has a single writer; share a
/// fully extended stream by reference for concurrent reads.
#[derive(Debug, Clone)]
pub struct CoeffStream {
    params: HypParams,
    c_coeffs: Vec<Complex64>,
}

impl CoeffStream {
    pub fn new(params: HypParams) -> Self {
        Self {
            params,
            c_coeffs: Vec::new(),
        }
    }

    pub fn params(&self) -> &HypParams {
        &self.params
    }

    pub fn extend_to(&mut self, j: usize) {
        let have = self.c_coeffs.len();
        if j > have {
            self.c_coeffs.reserve(j - have);
            for k in have + 1..=j {
                self.c_coeffs.push(c_coeff(&self.params, k));
            }
        }
    }

    pub fn c(&mut self, j: usize) -> Complex64 {
        assert!(j >= 1, "coefficient index starts at 1");
        self.extend_to(j);
        self.c_coeffs[j - 1]
    }

    pub fn d(&mut self, j: usize) -> Complex64 {
        -self.c(j)
    }

    /// Cached `c_1 ..= c_len`.
    pub fn c_coeffs(&self) -> &[Complex64] {
        &self.c_coeffs
    }

    pub fn d_coeffs(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.c_coeffs.iter().map(|c| -c)
    }
}

/// Value of a continued fraction evaluated to a converged depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CFValue {
    pub value: Complex64,
    pub depth_used: usize,
    pub last_correction: f64,
    pub converged: bool,
}

fn on_cut(z: Complex64) -> bool {
    let dist = if z.re >= 1.0 { z.im.abs() } else { (z - 1.0).norm() };
    dist <= CUT_GUARD
}

/// Backward evaluation of `1 + c_start w/(1 + ... + c_last w/1)`.
fn backward_tail(stream: &mut CoeffStream, start: usize, last: usize, w: Complex64) -> Complex64 {
    let mut t = ONE;
    for j in (start..=last).rev() {
        if t == ZERO {
            t = Complex64::new(f64::MIN_POSITIVE, 0.0);
        }
        t = ONE + stream.c(j) * w / t;
    }
    t
}

/// Evaluates the tail `1 + c_start w/(1 + c_{start+1} w/(1 + ...))` by
/// backward recurrence with doubling depth.
pub(crate) fn tail_eval(p: &HypParams, start: usize, w: Complex64, tol: f64, max_depth: usize) -> Result<CFValue> {
    if w == ZERO {
        return Ok(CFValue {
            value: ONE,
            depth_used: start,
            last_correction: 0.0,
            converged: true,
        });
    }
    let mut stream = CoeffStream::new(*p);
    let mut checked = start - 1;
    let mut last = (start + 15).min(max_depth.max(start));
    let mut previous: Option<Complex64> = None;
    loop {
        // a vanishing coefficient makes the fraction finite and exact
        for j in checked + 1..=last {
            if coeff_vanishes(p, j) {
                let value = if j == start {
                    ONE
                } else {
                    backward_tail(&mut stream, start, j - 1, w)
                };
                return Ok(CFValue {
                    value,
                    depth_used: j - 1,
                    last_correction: 0.0,
                    converged: true,
                });
            }
        }
        checked = last;
        let value = backward_tail(&mut stream, start, last, w);
        if let Some(prev) = previous {
            let correction = (value - prev).norm();
            if correction <= tol * value.norm().max(1.0) {
                return Ok(CFValue {
                    value,
                    depth_used: last,
                    last_correction: correction,
                    converged: true,
                });
            }
            if last >= max_depth {
                return Err(Error::NoConvergence {
                    steps: last,
                    last_correction: correction,
                });
            }
        } else if last >= max_depth {
            return Err(Error::NoConvergence {
                steps: last,
                last_correction: f64::INFINITY,
            });
        }
        previous = Some(value);
        last = (2 * last).min(max_depth);
    }
}

/// Evaluates the C-fraction for `F(a,b,c;z)/F(a,b+1,c+1;z)` off the cut.
pub fn cf_ratio_eval(p: &HypParams, z: Complex64, tol: f64, max_depth: usize) -> Result<CFValue> {
    if on_cut(z) {
        return Err(Error::OnCut { z });
    }
    if z == ZERO {
        return Ok(CFValue {
            value: ONE,
            depth_used: 1,
            last_correction: 0.0,
            converged: true,
        });
    }
    tail_eval(p, 1, z, tol, max_depth)
}

/// Which square root was taken for an off-diagonal entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Principal,
    Negated,
}

/// How to pick `b_k` from `b_k^2` before the stabilization point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootPolicy {
    #[default]
    Principal,
    /// Negated principal root ahead of stabilization; principal afterwards.
    NegatedHead,
}

/// J-fraction data.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiCoeffs {
    pub diag: Vec<Complex64>,
    pub offdiag_sq: Vec<Complex64>,
    /// Filled by [`offdiag_roots`]; empty before.
    pub offdiag: Vec<Complex64>,
    pub branches: Vec<Branch>,
    pub length: usize,
    /// First `n` with `b_n^2 = 0`; the sequences stop there.
    pub terminated_at: Option<usize>,
}

/// `1/4 - d_{2n+1}` without cancellation.
fn defect_odd(p: &HypParams, n: usize) -> Complex64 {
    let (a, b, c) = (p.a, p.b, p.c);
    let k = n as f64;
    let num = c * c + c - 4.0 * a * c + 4.0 * a * b + 2.0 * k * (1.0 - 2.0 * a + 2.0 * b);
    num / (4.0 * (c + 2.0 * k) * (c + 2.0 * k + 1.0))
}

/// `1/4 - d_{2m}` without cancellation, `m ≥ 1`.
fn defect_even(p: &HypParams, m: usize) -> Complex64 {
    let (a, b, c) = (p.a, p.b, p.c);
    let k = m as f64;
    let num = c * c - c - 4.0 * b * c + 4.0 * a * b + 2.0 * k * (2.0 * a - 2.0 * b - 1.0);
    num / (4.0 * (c + 2.0 * k - 1.0) * (c + 2.0 * k))
}

/// `a_n` computed from the cancellation-free defects.
pub(crate) fn diag_entry(p: &HypParams, n: usize) -> Complex64 {
    if n == 0 {
        1.0 + 4.0 * defect_even(p, 1)
    } else {
        4.0 * defect_odd(p, n) + 4.0 * defect_even(p, n + 1)
    }
}

/// `b_n^2` as the product `16 d_{2n+2} d_{2n+3}`.
pub(crate) fn offdiag_sq_entry(p: &HypParams, n: usize) -> Complex64 {
    16.0 * d_coeff(p, 2 * n + 2) * d_coeff(p, 2 * n + 3)
}

/// `b_n^2 - 1` without cancellation.
pub(crate) fn offdiag_sq_defect(p: &HypParams, n: usize) -> Complex64 {
    let de = defect_even(p, n + 1);
    let dodd = defect_odd(p, n + 1);
    -4.0 * de - 4.0 * dodd + 16.0 * de * dodd
}

pub(crate) fn offdiag_vanishes(p: &HypParams, n: usize) -> bool {
    coeff_vanishes(p, 2 * n + 2) || coeff_vanishes(p, 2 * n + 3)
}

/// Jacobi coefficients `a_0 .. a_{n_max-1}` and `b_0^2 .. b_{n_max-1}^2`,
/// cut at the first vanishing `b_n^2`.
pub fn jacobi_coeffs(p: &HypParams, n_max: usize) -> JacobiCoeffs {
    let mut diag = Vec::with_capacity(n_max);
    let mut offdiag_sq = Vec::with_capacity(n_max);
    let mut terminated_at = None;
    for n in 0..n_max {
        diag.push(diag_entry(p, n));
        if offdiag_vanishes(p, n) {
            terminated_at = Some(n);
            break;
        }
        offdiag_sq.push(offdiag_sq_entry(p, n));
    }
    JacobiCoeffs {
        length: diag.len(),
        diag,
        offdiag_sq,
        offdiag: Vec::new(),
        branches: Vec::new(),
        terminated_at,
    }
}

/// Fills `offdiag` with square roots of `offdiag_sq`.
///
/// Past the last index with `Re b_k^2 ≤ 0` the principal root is always used;
/// before it `policy` decides.
pub fn offdiag_roots(mut coeffs: JacobiCoeffs, policy: RootPolicy) -> JacobiCoeffs {
    let stable_from = coeffs
        .offdiag_sq
        .iter()
        .rposition(|b2| b2.re <= 0.0)
        .map_or(0, |k| k + 1);
    let (roots, branches) = coeffs
        .offdiag_sq
        .iter()
        .enumerate()
        .map(|(k, b2)| {
            let root = b2.sqrt();
            if k < stable_from && policy == RootPolicy::NegatedHead {
                (-root, Branch::Negated)
            } else {
                (root, Branch::Principal)
            }
        })
        .unzip();
    coeffs.offdiag = roots;
    coeffs.branches = branches;
    coeffs
}

/// Selects one of the three equivalent fraction forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FractionKind {
    /// `1 + c_1 z/1 + c_2 z/1 + ...` in the original variable.
    CFraction,
    /// `1 + d_1/ζ + d_2/1 + d_3/ζ + ...` in `ζ = -1/z`.
    SFraction,
    /// `-1/(z - a_0) - b_0^2/(z - a_1) - ...`, the representation of `B`.
    JFraction,
}

/// Forward (Wallis) evaluation of `lead + α_1/β_1 + α_2/β_2 + ...`.
fn wallis<I>(lead: Complex64, terms: I, n: usize, z: Complex64) -> Result<Complex64>
where
    I: IntoIterator<Item = (Complex64, Complex64)>,
{
    let (mut a_prev, mut a_cur) = (ONE, lead);
    let (mut b_prev, mut b_cur) = (ZERO, ONE);
    for (alpha, beta) in terms {
        let a_next = beta * a_cur + alpha * a_prev;
        let b_next = beta * b_cur + alpha * b_prev;
        a_prev = a_cur;
        b_prev = b_cur;
        a_cur = a_next;
        b_cur = b_next;
        let scale = a_cur.norm().max(b_cur.norm()).max(a_prev.norm()).max(b_prev.norm());
        if scale > 1e100 || (scale < 1e-100 && scale > 0.0) {
            a_prev /= scale;
            b_prev /= scale;
            a_cur /= scale;
            b_cur /= scale;
        }
    }
    if b_cur.norm() <= 1e-15 * a_cur.norm() || b_cur == ZERO {
        return Err(Error::PoleOfApproximant { n, z });
    }
    Ok(a_cur / b_cur)
}

/// The `n`-th approximant of the chosen fraction at `z`.
///
/// For [`FractionKind::SFraction`] the argument is the S-fraction variable `ζ`.
pub fn approximant(p: &HypParams, kind: FractionKind, n: usize, z: Complex64) -> Result<Complex64> {
    match kind {
        FractionKind::CFraction => wallis(ONE, (1..=n).map(|j| (c_coeff(p, j) * z, ONE)), n, z),
        FractionKind::SFraction => wallis(
            ONE,
            (1..=n).map(|j| (d_coeff(p, j), if j % 2 == 1 { z } else { ONE })),
            n,
            z,
        ),
        FractionKind::JFraction => {
            if n == 0 {
                return Ok(ZERO);
            }
            let jc = jacobi_coeffs(p, n);
            let terms = (0..jc.length).map(|k| {
                let alpha = if k == 0 { -ONE } else { -jc.offdiag_sq[k - 1] };
                (alpha, z - jc.diag[k])
            });
            wallis(ZERO, terms, n, z)
        }
    }
}

fn series_mul(x: &[Complex64], y: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; len];
    for (i, xi) in x.iter().enumerate().take(len) {
        for (j, yj) in y.iter().enumerate().take(len - i) {
            out[i + j] += xi * yj;
        }
    }
    out
}

fn series_div(x: &[Complex64], y: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; len];
    for k in 0..len {
        let mut acc = x[k];
        for j in 1..=k {
            acc -= y[j] * out[k - j];
        }
        out[k] = acc / y[0];
    }
    out
}

fn hyp_taylor(p: &HypParams, len: usize) -> Vec<Complex64> {
    let mut coeffs = Vec::with_capacity(len);
    let mut t = ONE;
    for n in 0..len {
        coeffs.push(t);
        let k = n as f64;
        t = t * (p.a + k) * (p.b + k) / ((p.c + k) * (k + 1.0));
    }
    coeffs
}

/// Moments `s_0 ..= s_order` of `B(z) = -Σ s_k z^{-k-1}` at infinity.
///
/// Built only from the hypergeometric Taylor coefficients composed with
/// `w = -4/(z-2)`, never from the J-fraction.
pub fn moment_oracle(p: &HypParams, order: usize) -> Result<Vec<Complex64>> {
    if order > 10 {
        return Err(Error::InvalidArgument(format!("moment order {order} exceeds 10")));
    }
    let d1 = d_coeff(p, 1);
    if d1 == ZERO {
        return Err(Error::DegenerateNormalization);
    }
    let len = order + 3;
    // w(u) = -4u/(1 - 2u) with u = 1/z
    let mut w = vec![ZERO; len];
    for (k, wk) in w.iter_mut().enumerate().skip(1) {
        *wk = Complex64::new(-4.0 * 2f64.powi(k as i32 - 1), 0.0);
    }
    let compose = |taylor: &[Complex64]| {
        let mut out = vec![ZERO; len];
        let mut power = vec![ZERO; len];
        power[0] = ONE;
        for coeff in taylor {
            for (o, pw) in out.iter_mut().zip(&power) {
                *o += coeff * pw;
            }
            power = series_mul(&power, &w, len);
        }
        out
    };
    let num = compose(&hyp_taylor(p, len));
    let den = compose(&hyp_taylor(&p.shifted(0.0, 1.0, 1.0)?, len));
    let mut ratio = series_div(&num, &den, len);
    ratio[0] -= ONE;
    let scale = -1.0 / (4.0 * d1);
    Ok((0..=order).map(|k| -scale * ratio[k + 1]).collect())
}
