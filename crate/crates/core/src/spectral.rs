//! Truncated complex Jacobi operators and their spectral data.
//!
//! `B(z) = <(J - z)^{-1} e, e>` for the complex symmetric Jacobi matrix `J`
//! built from the J-fraction coefficients. `J - J_0` is trace class, so the
//! essential spectrum is `[-2, 2]` and the poles of `B` off the band are the
//! eigenvalues of `J`.

use num_complex::Complex64;

use crate::cfrac::{
    diag_entry, jacobi_coeffs, offdiag_roots, offdiag_sq_defect, offdiag_vanishes, tail_eval, JacobiCoeffs, RootPolicy,
};
use crate::eigen::{eigen_residual, newton_polish, tridiag_eigenvalues, tridiag_solve};
use crate::error::{Error, Result};
use crate::hyp::HypParams;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Retained eigenvalues must be farther than this from `[-2, 2]`.
pub const BAND_GUARD: f64 = 1e-6;
/// `B` is not evaluated closer than this to `[-2, 2]`.
pub const EVAL_BAND_GUARD: f64 = 1e-9;
/// Eigenvalues closer than this are merged into one cluster.
pub const MERGE_RADIUS: f64 = 1e-6;
pub const DEFAULT_ORDER: usize = 256;
pub const MAX_ORDER: usize = 4096;
const GROWTH_LIMIT: f64 = 1e12;
const MAX_CF_DEPTH: usize = 1 << 22;

/// Distance from `z` to the segment `[-2, 2]`.
pub fn band_distance(z: Complex64) -> f64 {
    let nearest = z.re.clamp(-2.0, 2.0);
    Complex64::new(z.re - nearest, z.im).norm()
}

/// `w = -4/(λ - 2)`: maps `ℂ \ [-2, 2]` onto `ℂ \ [1, ∞)`.
pub fn spectral_to_hyp(lambda: Complex64) -> Complex64 {
    -4.0 / (lambda - 2.0)
}

/// Inverse of [`spectral_to_hyp`]: `λ = 2 - 4/w`.
pub fn hyp_to_spectral(w: Complex64) -> Complex64 {
    2.0 - 4.0 / w
}

/// Leading `order × order` block of the Jacobi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedJacobi {
    pub order: usize,
    pub diag: Vec<Complex64>,
    /// Chosen roots `b_k`, placed symmetrically.
    pub offdiag: Vec<Complex64>,
    pub offdiag_sq: Vec<Complex64>,
    pub source: HypParams,
    /// The J-fraction terminated, so this block is the whole operator seen by `B`.
    pub terminated: bool,
}

impl TruncatedJacobi {
    fn from_coeffs(source: HypParams, coeffs: &JacobiCoeffs, n: usize) -> Self {
        let order = n.min(coeffs.length);
        let terminated = coeffs.terminated_at.is_some_and(|t| t < n);
        TruncatedJacobi {
            order,
            diag: coeffs.diag[..order].to_vec(),
            offdiag: coeffs.offdiag[..order - 1].to_vec(),
            offdiag_sq: coeffs.offdiag_sq[..order - 1].to_vec(),
            source,
            terminated,
        }
    }

    /// `<(J_N - z)^{-1} e, e>` by a pivoted tridiagonal solve.
    pub fn resolvent_first(&self, z: Complex64) -> Result<Complex64> {
        let mut rhs = vec![ZERO; self.order];
        rhs[0] = ONE;
        let x = tridiag_solve(&self.offdiag, &self.diag, &self.offdiag, z, &rhs)
            .ok_or(Error::NearSingular { growth: f64::INFINITY })?;
        let growth = x.iter().map(|v| v.norm()).fold(0.0, f64::max) * self.shifted_norm(z);
        if growth > GROWTH_LIMIT {
            return Err(Error::NearSingular { growth });
        }
        Ok(x[0])
    }

    fn shifted_norm(&self, z: Complex64) -> f64 {
        (0..self.order)
            .map(|k| {
                let mut s = (self.diag[k] - z).norm();
                if k > 0 {
                    s += self.offdiag[k - 1].norm();
                }
                if k + 1 < self.order {
                    s += self.offdiag[k].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn norm_inf(&self) -> f64 {
        self.shifted_norm(ZERO)
    }

    /// All eigenvalues of the block.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        tridiag_eigenvalues(&self.diag, &self.offdiag)
    }
}

fn coeffs_with_roots(p: &HypParams, n: usize) -> JacobiCoeffs {
    offdiag_roots(jacobi_coeffs(p, n), RootPolicy::Principal)
}

/// Assembles the leading `n × n` block (or the whole block when the
/// fraction terminates earlier).
pub fn build_truncated(p: &HypParams, n: usize) -> Result<TruncatedJacobi> {
    if n == 0 {
        return Err(Error::InvalidArgument("truncation order must be at least 1".into()));
    }
    Ok(TruncatedJacobi::from_coeffs(*p, &coeffs_with_roots(p, n), n))
}

/// `<(J_N - z)^{-1} e, e>` for the order-`n` truncation.
pub fn m_function(p: &HypParams, z: Complex64, n: usize) -> Result<Complex64> {
    build_truncated(p, n)?.resolvent_first(z)
}

/// How [`b_function`] evaluates `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// C-fraction at `w = -4/(z-2)`.
    Cf,
    /// Resolvent of truncations with doubling order.
    Resolvent,
}

/// `B(a, b, c; z)` off the band.
pub fn b_function(p: &HypParams, z: Complex64, method: Method, tol: f64) -> Result<Complex64> {
    if band_distance(z) <= EVAL_BAND_GUARD {
        return Err(Error::OnBand { z });
    }
    match method {
        Method::Cf => {
            // B = (-1/(4 d_1)) (R(w) - 1) = -1/((z - 2) T_2(w)), T_2 the tail from c_2
            let w = spectral_to_hyp(z);
            let tail = tail_eval(p, 2, w, tol, MAX_CF_DEPTH)?;
            if tail.value == ZERO {
                return Err(Error::NearPole { z });
            }
            let value = -ONE / ((z - 2.0) * tail.value);
            if !(value.re.is_finite() && value.im.is_finite()) {
                return Err(Error::NearPole { z });
            }
            Ok(value)
        }
        Method::Resolvent => {
            let coeffs = coeffs_with_roots(p, MAX_ORDER);
            let mut n = 32usize.min(coeffs.length);
            let mut previous = TruncatedJacobi::from_coeffs(*p, &coeffs, n).resolvent_first(z)?;
            loop {
                if n >= coeffs.length {
                    // terminated: the block is exact
                    return Ok(previous);
                }
                n = (2 * n).min(MAX_ORDER);
                let current = TruncatedJacobi::from_coeffs(*p, &coeffs, n).resolvent_first(z)?;
                let correction = (current - previous).norm();
                if correction <= tol * current.norm().max(1.0) {
                    return Ok(current);
                }
                if n >= MAX_ORDER {
                    return Err(Error::NoConvergence {
                        steps: n,
                        last_correction: correction,
                    });
                }
                previous = current;
            }
        }
    }
}

/// A group of eigenvalues closer than [`MERGE_RADIUS`].
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub center: Complex64,
    pub multiplicity: usize,
}

/// Stable eigenvalues outside the band and the Lieb–Thirring data.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    /// Multiset of retained eigenvalues, sorted by real then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub distance_sum: f64,
    pub trace_bound: f64,
    pub n_used: usize,
    pub n_check: usize,
    /// Candidates that moved by more than the tolerance between orders.
    pub discarded: Vec<Complex64>,
    /// Merged near-coincident eigenvalues (multiplicity > 1 only).
    pub clusters: Vec<Cluster>,
    /// `max ‖Jv - λv‖ / ‖J‖` over retained eigenvalues.
    pub max_residual: f64,
    pub terminated: bool,
}

fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
}

fn outside_band(block: &TruncatedJacobi) -> Result<Vec<Complex64>> {
    let mut out: Vec<Complex64> = block
        .eigenvalues()?
        .into_iter()
        .filter(|l| band_distance(*l) > 0.5 * BAND_GUARD)
        .map(|l| newton_polish(&block.diag, &block.offdiag_sq, l))
        .filter(|l| band_distance(*l) > BAND_GUARD)
        .collect();
    sort_complex(&mut out);
    Ok(out)
}

/// Replaces near-conjugate pairs by exact conjugates and snaps
/// unpaired near-real values onto the axis.
fn enforce_conjugate_pairs(values: &mut [Complex64]) {
    let n = values.len();
    let mut paired = vec![false; n];
    for i in 0..n {
        if paired[i] || values[i].im <= 0.0 {
            continue;
        }
        let scale = values[i].norm().max(1.0);
        let best = (0..n)
            .filter(|&j| j != i && !paired[j] && values[j].im < 0.0)
            .min_by(|&x, &y| {
                (values[x] - values[i].conj())
                    .norm()
                    .total_cmp(&(values[y] - values[i].conj()).norm())
            });
        if let Some(j) = best {
            if (values[j] - values[i].conj()).norm() <= 1e-6 * scale {
                let mean = (values[i] + values[j].conj()) * 0.5;
                values[i] = mean;
                values[j] = mean.conj();
                paired[i] = true;
                paired[j] = true;
            }
        }
    }
    for (v, done) in values.iter_mut().zip(&paired) {
        if !done && v.im.abs() <= 1e-9 * v.norm().max(1.0) {
            v.im = 0.0;
        }
    }
}

fn merge_clusters(values: &mut [Complex64]) -> Vec<Cluster> {
    let n = values.len();
    let mut group = vec![usize::MAX; n];
    let mut clusters = Vec::new();
    for i in 0..n {
        if group[i] != usize::MAX {
            continue;
        }
        group[i] = i;
        let mut members = vec![i];
        let mut k = 0;
        while k < members.len() {
            let m = members[k];
            for j in 0..n {
                if group[j] == usize::MAX && (values[j] - values[m]).norm() <= MERGE_RADIUS {
                    group[j] = i;
                    members.push(j);
                }
            }
            k += 1;
        }
        if members.len() > 1 {
            let center = members.iter().map(|&m| values[m]).sum::<Complex64>() / members.len() as f64;
            for &m in &members {
                values[m] = center;
            }
            clusters.push(Cluster {
                center,
                multiplicity: members.len(),
            });
        }
    }
    clusters
}

/// Eigenvalues of `J` off `[-2, 2]`, kept only when they agree between the
/// truncations of order `n` and `2n` to within `tol · max(1, |λ|)`.
pub fn discrete_spectrum(p: &HypParams, n: usize, tol: f64) -> Result<SpectralResult> {
    let coeffs = coeffs_with_roots(p, 2 * n.max(1));
    let block = TruncatedJacobi::from_coeffs(*p, &coeffs, n.max(1));
    if !block.terminated && n < 8 {
        return Err(Error::InvalidArgument(format!(
            "spectral truncation order {n} is below 8"
        )));
    }
    let check = TruncatedJacobi::from_coeffs(*p, &coeffs, 2 * n.max(1));

    let candidates = outside_band(&block)?;
    let (mut eigenvalues, discarded) = if block.terminated {
        (candidates, Vec::new())
    } else {
        let reference = outside_band(&check)?;
        let mut used = vec![false; reference.len()];
        let mut kept = Vec::new();
        let mut dropped = Vec::new();
        for lambda in candidates {
            let best = (0..reference.len()).filter(|&j| !used[j]).min_by(|&x, &y| {
                (reference[x] - lambda)
                    .norm()
                    .total_cmp(&(reference[y] - lambda).norm())
            });
            match best {
                Some(j) if (reference[j] - lambda).norm() <= tol * lambda.norm().max(1.0) => {
                    used[j] = true;
                    kept.push(reference[j]);
                }
                _ => dropped.push(lambda),
            }
        }
        (kept, dropped)
    };

    if p.is_real {
        enforce_conjugate_pairs(&mut eigenvalues);
    }
    let clusters = merge_clusters(&mut eigenvalues);
    sort_complex(&mut eigenvalues);

    let verify = if block.terminated { &block } else { &check };
    let norm = verify.norm_inf().max(f64::MIN_POSITIVE);
    let max_residual = eigenvalues
        .iter()
        .map(|l| eigen_residual(&verify.offdiag, &verify.diag, &verify.offdiag, *l) / norm)
        .fold(0.0, f64::max);

    let distance_sum = eigenvalues.iter().map(|l| band_distance(*l)).sum();
    Ok(SpectralResult {
        distance_sum,
        trace_bound: trace_norm_bound(p, block.order),
        n_used: block.order,
        n_check: if block.terminated { block.order } else { check.order },
        eigenvalues,
        discarded,
        clusters,
        max_residual,
        terminated: block.terminated,
    })
}

/// Split of the trace-norm estimate of `J - J_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceBound {
    /// `Σ_{k<K} (|a_k| + 2|b_k - 1|)`.
    pub head: f64,
    /// Dominating estimate of the remaining terms.
    pub tail: f64,
    pub total: f64,
}

/// `|a_k| + 2|b_k - 1|` with the principal root, or `None` past termination.
fn trace_term(p: &HypParams, k: usize) -> f64 {
    let a = diag_entry(p, k).norm();
    if offdiag_vanishes(p, k) {
        // broken bond: the free matrix still has 1 there
        return a + 2.0;
    }
    let defect = offdiag_sq_defect(p, k);
    let root = (defect + 1.0).sqrt();
    a + 2.0 * (defect / (root + 1.0)).norm()
}

const EXPLICIT_TAIL: usize = 1 << 16;

/// Upper estimate of `‖J - J_0‖₁` split at index `k`.
pub fn trace_norm_estimate(p: &HypParams, k: usize) -> TraceBound {
    let k = k.max(1);
    let termination = (0..).take(k + EXPLICIT_TAIL).find(|&j| offdiag_vanishes(p, j));
    if let Some(t) = termination {
        let head: f64 = (0..k.min(t + 1)).map(|j| trace_term(p, j)).sum();
        let tail: f64 = (k..=t).map(|j| trace_term(p, j)).sum();
        return TraceBound {
            head,
            tail,
            total: head + tail,
        };
    }
    let head: f64 = (0..k).map(|j| trace_term(p, j)).sum();
    let m = k + EXPLICIT_TAIL;
    let mut explicit = 0.0;
    let mut weighted_max: f64 = 0.0;
    for j in k..m {
        let t = trace_term(p, j);
        explicit += t;
        if j >= m / 2 {
            weighted_max = weighted_max.max(t * (j as f64).powi(2));
        }
    }
    // j^2 term_j tends to a constant; probe far out for the supremum
    let mut probe = 4 * m;
    while probe < 1 << 30 {
        weighted_max = weighted_max.max(trace_term(p, probe) * (probe as f64).powi(2));
        probe *= 4;
    }
    let remainder = weighted_max * (1.0 + 1e-6) / (m as f64 - 0.5);
    let tail = explicit + remainder;
    TraceBound {
        head,
        tail,
        total: head + tail,
    }
}

/// Upper estimate of `‖J - J_0‖₁`.
pub fn trace_norm_bound(p: &HypParams, k: usize) -> f64 {
    trace_norm_estimate(p, k).total
}

/// Both sides of `Σ dist(λ_j, [-2, 2]) ≤ ‖J - J_0‖₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiebThirring {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub const DEFAULT_MATCH_TOL: f64 = 1e-8;

pub fn lieb_thirring_check(p: &HypParams, n: usize) -> Result<LiebThirring> {
    let spectrum = discrete_spectrum(p, n, DEFAULT_MATCH_TOL)?;
    Ok(LiebThirring {
        lhs: spectrum.distance_sum,
        rhs: spectrum.trace_bound,
        holds: spectrum.distance_sum <= spectrum.trace_bound + 1e-9,
    })
}

/// Zeros of `F(a, b + 1, c + 1; ·)` in `ℂ \ [1, ∞)`.
pub fn hyp_zeros(p: &HypParams, n: usize) -> Result<Vec<Complex64>> {
    let spectrum = discrete_spectrum(p, n, DEFAULT_MATCH_TOL)?;
    Ok(spectrum.eigenvalues.into_iter().map(spectral_to_hyp).collect())
}

/// Zeros of `F(a, b, c; ·)` itself, via the parameters `(a, b - 1, c - 1)`.
pub fn numerator_zeros(p: &HypParams, n: usize) -> Result<Vec<Complex64>> {
    let shifted = p.shifted(0.0, -1.0, -1.0).map_err(|_| Error::ShiftInvalid)?;
    hyp_zeros(&shifted, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp::validate_params;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn band_distance_segment() {
        assert_eq!(band_distance(c(3.0, 0.0)), 1.0);
        assert_eq!(band_distance(c(0.5, -2.0)), 2.0);
        assert_relative_eq!(band_distance(c(-5.0, 4.0)), 5.0);
    }

    #[test]
    fn truncated_examples() {
        let p = HypParams::real(-1.0, -1.5, 1.0).unwrap();
        let t = build_truncated(&p, 10).unwrap();
        assert_eq!(t.order, 1);
        assert!(t.terminated);
        assert_relative_eq!(t.diag[0].re, 3.0);

        let p = HypParams::real(-2.0, 0.0, 1.0).unwrap();
        let t = build_truncated(&p, 10).unwrap();
        assert_eq!(t.order, 2);
        assert_relative_eq!((t.offdiag[0] * t.offdiag[0]).re, -16.0 / 9.0, max_relative = 1e-14);

        let p = HypParams::real(1.0, 0.0, 1.0).unwrap();
        let t = build_truncated(&p, 3).unwrap();
        assert_eq!(t.order, 3);
        assert!(!t.terminated);
        assert_relative_eq!(t.offdiag[0].re, (8.0f64 / 9.0).sqrt(), max_relative = 1e-14);
        assert!(build_truncated(&p, 0).is_err());
    }

    #[test]
    fn m_function_examples() {
        let p = HypParams::real(-1.0, -1.5, 1.0).unwrap();
        assert_relative_eq!(m_function(&p, c(5.0, 0.0), 10).unwrap().re, -0.5, max_relative = 1e-15);

        let p = HypParams::real(1.0, 0.0, 1.0).unwrap();
        let v = m_function(&p, c(4.0, 0.0), 256).unwrap();
        let closed = -0.5 * (2.0 / 3f64.ln() - 1.0);
        assert_relative_eq!(v.re, closed, max_relative = 1e-12);

        let q = validate_params(c(0.4, 1.0), c(2.0, -0.5), c(1.3, 0.2)).unwrap();
        let z = c(1e4, 3e3);
        let m = m_function(&q, z, 64).unwrap();
        assert!((z * m + 1.0).norm() < 1e-3);
    }

    #[test]
    fn b_function_both_methods() {
        let p = HypParams::real(1.0, 0.0, 1.0).unwrap();
        let closed = -0.5 * (2.0 / 3f64.ln() - 1.0);
        for method in [Method::Cf, Method::Resolvent] {
            let v = b_function(&p, c(4.0, 0.0), method, 1e-14).unwrap();
            assert_relative_eq!(v.re, closed, max_relative = 1e-12);
            assert_relative_eq!(v.re, -0.4102392266268373, max_relative = 1e-12);
        }
        let p = HypParams::real(-2.0, 0.0, 1.0).unwrap();
        for method in [Method::Cf, Method::Resolvent] {
            let v = b_function(&p, c(1.0, 0.0), method, 1e-14);
            // z = 1 is on the band
            assert!(matches!(v, Err(Error::OnBand { .. })));
            let z = c(1.0, 0.5);
            let v = b_function(&p, z, method, 1e-14).unwrap();
            let exact = -(z - 2.0 / 3.0) / (z * z + 4.0 / 3.0);
            assert!((v - exact).norm() < 1e-13);
        }
    }

    #[test]
    fn b_function_near_pole() {
        let p = HypParams::real(-1.0, -1.5, 1.0).unwrap();
        let z = c(3.0 + 1e-8, 0.0);
        for method in [Method::Cf, Method::Resolvent] {
            match b_function(&p, z, method, 1e-12) {
                Ok(v) => assert!(v.norm() >= 1e7),
                Err(e) => assert!(matches!(e, Error::NearPole { .. } | Error::NearSingular { .. })),
            }
        }
    }

    #[test]
    fn spectrum_examples() {
        let p = HypParams::real(-1.0, -1.5, 1.0).unwrap();
        let s = discrete_spectrum(&p, 256, 1e-10).unwrap();
        assert_eq!(s.eigenvalues.len(), 1);
        assert!((s.eigenvalues[0] - c(3.0, 0.0)).norm() < 1e-12);
        assert_relative_eq!(s.distance_sum, 1.0, max_relative = 1e-12);

        let p = HypParams::real(-2.0, 0.0, 1.0).unwrap();
        let s = discrete_spectrum(&p, 256, 1e-10).unwrap();
        let root = 2.0 / 3f64.sqrt();
        assert_eq!(s.eigenvalues.len(), 2);
        assert!((s.eigenvalues[0] - c(0.0, -root)).norm() < 1e-12);
        assert!((s.eigenvalues[1] - c(0.0, root)).norm() < 1e-12);
        assert_eq!(s.eigenvalues[0], s.eigenvalues[1].conj());

        let p = HypParams::real(1.0, 0.0, 1.0).unwrap();
        let s = discrete_spectrum(&p, 256, 1e-10).unwrap();
        assert!(s.eigenvalues.is_empty());
        assert_eq!(s.distance_sum, 0.0);
    }

    #[test]
    fn trace_bound_examples() {
        let p = HypParams::real(-1.0, -1.5, 1.0).unwrap();
        assert_relative_eq!(trace_norm_bound(&p, 1), 5.0, max_relative = 1e-14);
        assert_relative_eq!(trace_norm_bound(&p, 7), 5.0, max_relative = 1e-14);

        let p = HypParams::real(1.0, 1.0, 2.0).unwrap();
        let tails: Vec<f64> = [1, 10, 100, 1000]
            .iter()
            .map(|&k| trace_norm_estimate(&p, k).tail)
            .collect();
        assert!(tails.windows(2).all(|w| w[1] < w[0]));
        assert!(trace_norm_bound(&p, 10).is_finite());

        let p = HypParams::real(1.0, 0.0, 1.0).unwrap();
        let x = trace_norm_bound(&p, 1000);
        let y = trace_norm_bound(&p, 2000);
        assert!((x - y).abs() <= 1e-6);
    }

    #[test]
    fn lieb_thirring_examples() {
        let p = HypParams::real(-1.0, -1.5, 1.0).unwrap();
        let lt = lieb_thirring_check(&p, 64).unwrap();
        assert_relative_eq!(lt.lhs, 1.0, max_relative = 1e-12);
        assert!(lt.holds);

        let p = HypParams::real(1.0, 0.0, 1.0).unwrap();
        let lt = lieb_thirring_check(&p, 64).unwrap();
        assert_eq!(lt.lhs, 0.0);
        assert!(lt.holds);

        let p = HypParams::real(-2.0, 0.0, 1.0).unwrap();
        let lt = lieb_thirring_check(&p, 64).unwrap();
        assert_relative_eq!(lt.lhs, 4.0 / 3f64.sqrt(), max_relative = 1e-12);
        assert!(lt.holds);
    }

    #[test]
    fn zero_examples() {
        let p = HypParams::real(-2.0, 0.0, 1.0).unwrap();
        let mut z = hyp_zeros(&p, 64).unwrap();
        z.sort_by(|x, y| x.im.total_cmp(&y.im));
        assert!((z[0] - c(1.5, -0.8660254037844386)).norm() < 1e-12);
        assert!((z[1] - c(1.5, 0.8660254037844386)).norm() < 1e-12);

        let p = HypParams::real(-1.0, -1.5, 1.0).unwrap();
        let z = hyp_zeros(&p, 64).unwrap();
        assert_eq!(z.len(), 1);
        assert!((z[0] - c(-4.0, 0.0)).norm() < 1e-12);

        let p = HypParams::real(1.0, 0.0, 1.0).unwrap();
        assert!(hyp_zeros(&p, 64).unwrap().is_empty());

        let p = HypParams::real(1.0, 0.0, 1.0).unwrap();
        assert!(matches!(numerator_zeros(&p, 64), Err(Error::ShiftInvalid)));
    }

    #[test]
    fn numerator_zeros_of_polynomial() {
        // F(-2, 1, 2; w) = 1 - w + w^2/3 through (a, b - 1, c - 1) = (-2, 0, 1)
        let p = HypParams::real(-2.0, 1.0, 2.0).unwrap();
        let z = numerator_zeros(&p, 64).unwrap();
        assert_eq!(z.len(), 2);
        for w in z {
            assert!((1.0 - w + w * w / 3.0).norm() < 1e-12);
        }
    }

    #[test]
    fn map_round_trip() {
        for k in 0..50 {
            let w = c((k as f64 * 0.37).sin() * 5.0, (k as f64 * 0.91).cos() * 3.0);
            let back = spectral_to_hyp(hyp_to_spectral(w));
            assert!((back - w).norm() <= 1e-14 * w.norm().max(1.0));
        }
    }
}
