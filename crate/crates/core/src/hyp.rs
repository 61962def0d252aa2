//! Gauss hypergeometric parameters and direct power-series evaluation.
//!
//! The series here is only trusted inside the unit disk (or for polynomial
//! cases) and serves as the reference the continued-fraction machinery is
//! checked against.

use num_complex::{Complex, Complex64};
use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Default exclusion radius around `c ∈ {0, -1, -2, ...}`.
pub const C_GUARD: f64 = 1e-9;

/// Margin kept from the unit circle for non-terminating series.
pub const DISK_MARGIN: f64 = 1e-3;

const UNDERFLOW_GUARD: f64 = 1e-290;

/// A validated parameter triple `(a, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypParams {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub is_real: bool,
}

/// Result of summing the hypergeometric series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub terms_used: usize,
    /// Magnitude of the first omitted term.
    pub truncation_estimate: f64,
    pub converged: bool,
}

/// Returns the nonpositive integer `-k` if `x` is exactly one.
pub(crate) fn as_nonpositive_integer(x: Complex64) -> Option<u64> {
    if x.im == 0.0 && x.re <= 0.0 && x.re.fract() == 0.0 && x.re > -(u64::MAX as f64) {
        Some((-x.re) as u64)
    } else {
        None
    }
}

/// Distance from `c` to the set `{0, -1, -2, ...}`.
fn distance_to_poles(c: Complex64) -> f64 {
    let nearest = if c.re >= 0.0 { 0.0 } else { c.re.round() };
    Complex64::new(c.re - nearest, c.im).norm()
}

/// Validates a parameter triple with the default guard [`C_GUARD`].
pub fn validate_params(a: Complex64, b: Complex64, c: Complex64) -> Result<HypParams> {
    validate_params_with_guard(a, b, c, C_GUARD)
}

pub fn validate_params_with_guard(a: Complex64, b: Complex64, c: Complex64, guard: f64) -> Result<HypParams> {
    for (name, x) in [("a", a), ("b", b), ("c", c)] {
        if !(x.re.is_finite() && x.im.is_finite()) {
            return Err(Error::NonFiniteParameter { name });
        }
    }
    if distance_to_poles(c) <= guard {
        return Err(Error::CNonpositiveInteger { c, guard });
    }
    Ok(HypParams {
        a,
        b,
        c,
        is_real: a.im == 0.0 && b.im == 0.0 && c.im == 0.0,
    })
}

impl HypParams {
    /// Convenience constructor for real triples.
    pub fn real(a: f64, b: f64, c: f64) -> Result<Self> {
        validate_params(a.into(), b.into(), c.into())
    }

    /// Parameters shifted by integers, revalidated.
    pub fn shifted(&self, da: f64, db: f64, dc: f64) -> Result<Self> {
        validate_params(self.a + da, self.b + db, self.c + dc)
    }

    /// Degree of the polynomial when `a` or `b` is a nonpositive integer.
    pub fn terminating_degree(&self) -> Option<u64> {
        match (as_nonpositive_integer(self.a), as_nonpositive_integer(self.b)) {
            (Some(m), Some(n)) => Some(m.min(n)),
            (m, n) => m.or(n),
        }
    }
}

type Dd = Complex<TwoFloat>;

fn dd(z: Complex64) -> Dd {
    Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

fn dd_real(x: f64) -> Dd {
    Complex::new(TwoFloat::from(x), TwoFloat::from(0.0))
}

fn from_dd(z: Dd) -> Complex64 {
    Complex64::new(f64::from(z.re), f64::from(z.im))
}

/// `1/x` by one Newton step from the f64 reciprocal; the crate's own
/// double-double quotient keeps only f64 accuracy.
fn recip(x: TwoFloat) -> TwoFloat {
    let x0 = TwoFloat::from(x.hi().recip());
    let residual = TwoFloat::from(1.0) - x * x0;
    x0 + x0 * residual
}

fn dd_div(x: Dd, y: Dd) -> Dd {
    let scale = recip(y.re * y.re + y.im * y.im);
    let num = x * y.conj();
    Complex::new(num.re * scale, num.im * scale)
}

/// Sums `Σ (a)_n (b)_n / ((c)_n n!) z^n` in forward order with double-double
/// accumulation, so cancellation between large terms costs no accuracy.
///
/// Stops once a term falls below `tol · max(1, |partial sum|)` or the series
/// terminates exactly.
pub fn hyp2f1_series(p: &HypParams, z: Complex64, tol: f64, max_terms: usize) -> Result<SeriesValue> {
    let terminating = p.terminating_degree().is_some();
    if !terminating && z.norm() >= 1.0 - DISK_MARGIN {
        return Err(Error::OutsideDisk {
            modulus: z.norm(),
            limit: 1.0 - DISK_MARGIN,
        });
    }

    if z == Complex64::new(0.0, 0.0) {
        return Ok(SeriesValue {
            value: Complex64::new(1.0, 0.0),
            terms_used: 1,
            truncation_estimate: 0.0,
            converged: true,
        });
    }

    let (a, b, c, zz) = (dd(p.a), dd(p.b), dd(p.c), dd(z));
    let mut sum = dd_real(1.0);
    let mut term = dd_real(1.0);
    let mut n = 0usize;
    loop {
        let k = n as f64;
        if p.a + k == Complex64::new(0.0, 0.0) || p.b + k == Complex64::new(0.0, 0.0) {
            return Ok(SeriesValue {
                value: from_dd(sum),
                terms_used: n + 1,
                truncation_estimate: 0.0,
                converged: true,
            });
        }
        let kk = dd_real(k);
        term = dd_div(term * (a + kk) * (b + kk) * zz, (c + kk) * dd_real(k + 1.0));
        let size = from_dd(term).norm();
        if size <= tol * from_dd(sum).norm().max(1.0) {
            return Ok(SeriesValue {
                value: from_dd(sum),
                terms_used: n + 1,
                truncation_estimate: size,
                converged: true,
            });
        }
        if n + 1 >= max_terms {
            return Err(Error::NoConvergence {
                steps: max_terms,
                last_correction: size,
            });
        }
        sum += term;
        n += 1;
    }
}

const SERIES_MAX_TERMS: usize = 1_000_000;

/// `F(a, b, c; z) / F(a, b + 1, c + 1; z)` from two direct series.
pub fn ratio_series(p: &HypParams, z: Complex64, tol: f64) -> Result<Complex64> {
    let shifted = p.shifted(0.0, 1.0, 1.0)?;
    let num = hyp2f1_series(p, z, tol, SERIES_MAX_TERMS)?;
    let den = hyp2f1_series(&shifted, z, tol, SERIES_MAX_TERMS)?;
    let magnitude = den.value.norm();
    if magnitude < UNDERFLOW_GUARD {
        return Err(Error::DenominatorZero { magnitude });
    }
    Ok(num.value / den.value)
}

/// Residual of the contiguous relation
/// `F(a,b,c) = F(a,b+1,c+1) - a(c-b)/(c(c+1)) z F(a+1,b+1,c+2)`.
pub fn contiguous_residual(p: &HypParams, z: Complex64) -> Result<f64> {
    if z.norm() >= 0.9 {
        return Err(Error::OutsideDisk {
            modulus: z.norm(),
            limit: 0.9,
        });
    }
    let tol = 1e-16;
    let f0 = hyp2f1_series(p, z, tol, SERIES_MAX_TERMS)?.value;
    let f1 = hyp2f1_series(&p.shifted(0.0, 1.0, 1.0)?, z, tol, SERIES_MAX_TERMS)?.value;
    let f2 = hyp2f1_series(&p.shifted(1.0, 1.0, 2.0)?, z, tol, SERIES_MAX_TERMS)?.value;
    let coeff = p.a * (p.c - p.b) / (p.c * (p.c + 1.0));
    Ok((f0 - f1 + coeff * z * f2).norm())
}
