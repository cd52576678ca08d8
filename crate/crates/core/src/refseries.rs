//! Direct hypergeometric series, the oracles every expansion is checked
//! against.
//!
//! `hyp_series` is the plain `f64` sum. For arguments where the terms grow
//! far beyond the final value (large negative real argument, e.g. the
//! Bessel-type argument -z²/4 at |z| ≈ 40) the same recurrence is run in
//! double-double arithmetic by [`hyp_series_extended`]; [`hyp_eval`] picks
//! between the two from the observed cancellation.

use std::ops::{Add, Div, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extended::{dd, dd_real, magnitude, to_c64, DdComplex};
use crate::numkernel::{check_lower, nonpositive_integer, POLE_TOL};

/// Stopping tolerance used when nothing else is requested.
pub const DEFAULT_TOL: f64 = 1e-13;
pub const DEFAULT_MAX_TERMS: usize = 10_000;

/// `kummer_m` switches to `e^z M(b-a, b, -z)` below this real part.
pub const KUMMER_TRANSFORM_THRESHOLD: f64 = -30.0;

/// Largest acceptable ratio of the biggest term to the sum before `hyp_eval`
/// reruns in double-double.
const CANCELLATION_LIMIT: f64 = 1e2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: Complex64,
    pub terms_used: usize,
    pub converged: bool,
    pub last_term_magnitude: f64,
    /// Largest term magnitude met; its ratio to `|value|` measures cancellation.
    pub max_term_magnitude: f64,
}

impl SeriesResult {
    /// Digits lost to cancellation, as the ratio max term / |value|.
    pub fn cancellation(&self) -> f64 {
        let v = self.value.norm();
        if v == 0.0 {
            if self.max_term_magnitude == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            self.max_term_magnitude / v
        }
    }

    pub fn ok_or_nonconvergence(self, z: Complex64) -> Result<Complex64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NonConvergence {
                z,
                terms: self.terms_used,
            })
        }
    }
}

/// Complex scalar the series recurrence can run in.
trait SeriesScalar: Copy + Add<Output = Self> + Mul<Output = Self> + Div<Output = Self> {
    fn from_index(k: usize) -> Self;
    fn mag(self) -> f64;
}

impl SeriesScalar for Complex64 {
    fn from_index(k: usize) -> Self {
        Complex64::new(k as f64, 0.0)
    }
    fn mag(self) -> f64 {
        self.norm()
    }
}

impl SeriesScalar for DdComplex {
    fn from_index(k: usize) -> Self {
        dd_real(k as f64)
    }
    fn mag(self) -> f64 {
        magnitude(self)
    }
}

/// Termwise summation of Σ (a)_k/(b)_k z^k/k! with the recurrent update
/// t_{k+1} = t_k Π(a_i+k)/Π(b_j+k) z/(k+1).
///
/// Stops after three consecutive terms below `tol·|sum|`, on an exactly zero
/// term (terminating series) or at `max_terms`.
fn sum_series<T: SeriesScalar>(
    upper: &[T],
    lower: &[T],
    z: T,
    tol: f64,
    max_terms: usize,
) -> (T, SeriesStats) {
    let one = T::from_index(1);
    let mut term = one;
    let mut sum = one;
    let mut stats = SeriesStats {
        terms: 1,
        converged: false,
        last: 1.0,
        max: 1.0,
    };
    let mut small_run = 0;
    for k in 0..max_terms.saturating_sub(1) {
        let kf = T::from_index(k);
        let mut num = z;
        for &a in upper {
            num = num * (a + kf);
        }
        let mut den = kf + one;
        for &b in lower {
            den = den * (b + kf);
        }
        term = term * num / den;
        let mag = term.mag();
        if mag == 0.0 {
            stats.converged = true;
            stats.last = 0.0;
            return (sum, stats);
        }
        sum = sum + term;
        stats.terms += 1;
        stats.last = mag;
        stats.max = stats.max.max(mag);
        if !mag.is_finite() {
            break;
        }
        if mag <= tol * sum.mag() {
            small_run += 1;
            if small_run == 3 {
                stats.converged = true;
                break;
            }
        } else {
            small_run = 0;
        }
    }
    (sum, stats)
}

struct SeriesStats {
    terms: usize,
    converged: bool,
    last: f64,
    max: f64,
}

fn check_series_shape(upper: &[Complex64], lower: &[Complex64]) -> Result<()> {
    if upper.len() > lower.len() {
        return Err(Error::InvalidParameters(format!(
            "series needs q <= p, got q = {}, p = {}",
            upper.len(),
            lower.len()
        )));
    }
    check_lower(lower)
}

/// Plain double-precision evaluation of qFp(a; b; z), q ≤ p.
pub fn hyp_series(
    upper: &[Complex64],
    lower: &[Complex64],
    z: Complex64,
    tol: f64,
    max_terms: usize,
) -> Result<SeriesResult> {
    check_series_shape(upper, lower)?;
    let (value, stats) = sum_series(upper, lower, z, tol, max_terms);
    Ok(SeriesResult {
        value,
        terms_used: stats.terms,
        converged: stats.converged,
        last_term_magnitude: stats.last,
        max_term_magnitude: stats.max,
    })
}

/// Same recurrence as [`hyp_series`] carried out in double-double arithmetic.
pub fn hyp_series_extended(
    upper: &[Complex64],
    lower: &[Complex64],
    z: Complex64,
    tol: f64,
    max_terms: usize,
) -> Result<SeriesResult> {
    check_series_shape(upper, lower)?;
    let up: Vec<DdComplex> = upper.iter().copied().map(dd).collect();
    let lo: Vec<DdComplex> = lower.iter().copied().map(dd).collect();
    let (value, stats) = sum_series(&up, &lo, dd(z), tol, max_terms);
    Ok(SeriesResult {
        value: to_c64(value),
        terms_used: stats.terms,
        converged: stats.converged,
        last_term_magnitude: stats.last,
        max_term_magnitude: stats.max,
    })
}

/// qFp(a; b; z) to about `tol` relative accuracy: the `f64` sum when it is
/// well conditioned, the double-double sum otherwise.
pub fn hyp_eval(
    upper: &[Complex64],
    lower: &[Complex64],
    z: Complex64,
    tol: f64,
) -> Result<Complex64> {
    let plain = hyp_series(upper, lower, z, tol, DEFAULT_MAX_TERMS)?;
    if plain.converged && plain.cancellation() <= CANCELLATION_LIMIT {
        return Ok(plain.value);
    }
    hyp_series_extended(upper, lower, z, tol, DEFAULT_MAX_TERMS)?.ok_or_nonconvergence(z)
}

/// Reference value for the Bessel-type family: p-1Fp(a; b; -z²/4).
pub fn bessel_type_reference(
    upper: &[Complex64],
    lower: &[Complex64],
    z: Complex64,
    tol: f64,
) -> Result<Complex64> {
    let x = -z * z / 4.0;
    hyp_series_extended(upper, lower, x, tol, DEFAULT_MAX_TERMS)?.ok_or_nonconvergence(z)
}

/// Reference value for the Kummer-type family: pFp(a; b; -z).
pub fn kummer_type_reference(
    upper: &[Complex64],
    lower: &[Complex64],
    z: Complex64,
    tol: f64,
) -> Result<Complex64> {
    hyp_series_extended(upper, lower, -z, tol, DEFAULT_MAX_TERMS)?.ok_or_nonconvergence(z)
}

/// Kummer's function M(a, b, z) = 1F1(a; b; z).
///
/// For `Re z < -30` the transformation M(a,b,z) = e^z M(b-a, b, -z) is
/// applied first.
pub fn kummer_m(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64> {
    kummer_m_tol(a, b, z, DEFAULT_TOL)
}

pub fn kummer_m_tol(a: Complex64, b: Complex64, z: Complex64, tol: f64) -> Result<Complex64> {
    if z.re < KUMMER_TRANSFORM_THRESHOLD {
        Ok(z.exp() * hyp_eval(&[b - a], &[b], -z, tol)?)
    } else {
        kummer_m_direct(a, b, z, tol)
    }
}

/// M(a, b, z) summed at z itself, whatever the sign of `Re z`.
pub fn kummer_m_direct(a: Complex64, b: Complex64, z: Complex64, tol: f64) -> Result<Complex64> {
    hyp_eval(&[a], &[b], z, tol)
}

/// Terminating sum 2F1(1-a, -n; c; -1) = Σ_{k≤n} (1-a)_k (-n)_k / ((c)_k k!) (-1)^k.
pub fn gauss2f1_neg1(one_minus_a: Complex64, n: usize, c: Complex64) -> Result<Complex64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..n {
        let kf = k as f64;
        let num = (one_minus_a + kf) * (kf - n as f64);
        if num == Complex64::new(0.0, 0.0) {
            break;
        }
        let den = c + kf;
        if nonpositive_integer(den, POLE_TOL) == Some(0) {
            return Err(Error::Degenerate { n, k: k + 1 });
        }
        term = -term * num / (den * (kf + 1.0));
        sum += term;
    }
    Ok(sum)
}

/// The split qFp(a;b;z) = Σ_{k<n} (a)_k z^k/((b)_k k!) + prefactor · q+1Fp+1(a+n, 1; b+n, n+1; z).
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftDecomposition {
    pub partial: Complex64,
    pub prefactor: Complex64,
    pub upper: Vec<Complex64>,
    pub lower: Vec<Complex64>,
    pub n: usize,
}

impl ShiftDecomposition {
    /// Recombines the parts given a value of the shifted function.
    pub fn combine(&self, shifted_value: Complex64) -> Complex64 {
        self.partial + self.prefactor * shifted_value
    }
}

pub fn decompose_shift(
    upper: &[Complex64],
    lower: &[Complex64],
    z: Complex64,
    n: usize,
) -> Result<ShiftDecomposition> {
    if n == 0 {
        return Err(Error::InvalidParameters(
            "decompose_shift needs n >= 1".into(),
        ));
    }
    check_lower(lower)?;
    let mut term = Complex64::new(1.0, 0.0);
    let mut partial = Complex64::new(0.0, 0.0);
    for k in 0..n {
        partial += term;
        let kf = k as f64;
        let num = upper.iter().fold(z, |acc, &a| acc * (a + kf));
        let den = lower
            .iter()
            .fold(Complex64::new(kf + 1.0, 0.0), |acc, &b| acc * (b + kf));
        term = term * num / den;
    }
    let shift = n as f64;
    let mut new_upper: Vec<Complex64> = upper.iter().map(|&a| a + shift).collect();
    new_upper.push(Complex64::new(1.0, 0.0));
    let mut new_lower: Vec<Complex64> = lower.iter().map(|&b| b + shift).collect();
    new_lower.push(Complex64::new(shift + 1.0, 0.0));
    Ok(ShiftDecomposition {
        partial,
        prefactor: term,
        upper: new_upper,
        lower: new_lower,
        n,
    })
}
