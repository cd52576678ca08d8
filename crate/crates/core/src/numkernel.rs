//! Complex helpers shared by every expansion: the gamma function, Pochhammer
//! products and the parameter excess ψ(a;b) = Σb − Σa.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Distance to the nearest non-positive integer below which an argument is
/// treated as a gamma pole.
pub const POLE_TOL: f64 = 1e-14;

/// Above this order Pochhammer symbols switch from the direct product to a
/// log-gamma ratio.
pub const POCHHAMMER_DIRECT_MAX: usize = 256;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// If `x` lies within `tol` of a non-positive integer, returns that integer.
pub fn nonpositive_integer(x: Complex64, tol: f64) -> Option<i64> {
    let k = x.re.round();
    if k <= 0.0 && (x.re - k).abs() <= tol && x.im.abs() <= tol {
        Some(k as i64)
    } else {
        None
    }
}

/// Rising factorial x(x+1)...(x+n-1).
///
/// Up to [`POCHHAMMER_DIRECT_MAX`] factors the product is formed directly
/// (exact zeros at non-positive integer `x`). Beyond that the value is
/// `exp(lnΓ(x+n) − lnΓ(x))`.
pub fn pochhammer(x: Complex64, n: usize) -> Complex64 {
    if n <= POCHHAMMER_DIRECT_MAX {
        return (0..n).fold(Complex64::new(1.0, 0.0), |acc, k| acc * (x + k as f64));
    }
    if let Some(k) = nonpositive_integer(x, POLE_TOL) {
        if ((-k) as usize) < n {
            return Complex64::new(0.0, 0.0);
        }
        // Γ(x) itself is a pole here.
        return (0..n).fold(Complex64::new(1.0, 0.0), |acc, k| acc * (x + k as f64));
    }
    match (ln_gamma_complex(x + n as f64), ln_gamma_complex(x)) {
        (Ok(top), Ok(bottom)) => (top - bottom).exp(),
        _ => (0..n).fold(Complex64::new(1.0, 0.0), |acc, k| acc * (x + k as f64)),
    }
}

/// A logarithm of (x)_n, for orders where the product itself leaves the
/// floating range. The imaginary part is fixed only modulo 2π.
pub fn ln_pochhammer(x: Complex64, n: usize) -> Result<Complex64> {
    if n <= POCHHAMMER_DIRECT_MAX {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let f = x + k as f64;
            if f == Complex64::new(0.0, 0.0) {
                return Err(Error::Pole(x));
            }
            acc += f.ln();
        }
        return Ok(acc);
    }
    Ok(ln_gamma_complex(x + n as f64)? - ln_gamma_complex(x)?)
}

/// sin(πx), with the real part reduced to [-1/2, 1/2] first.
pub fn sin_pi(x: Complex64) -> Complex64 {
    let k = x.re.round();
    let reduced = Complex64::new(x.re - k, x.im) * PI;
    let s = reduced.sin();
    if (k as i64).rem_euclid(2) == 0 {
        s
    } else {
        -s
    }
}

fn lanczos_sum(x: Complex64) -> Complex64 {
    LANCZOS_COEF[1..]
        .iter()
        .enumerate()
        .fold(Complex64::new(LANCZOS_COEF[0], 0.0), |acc, (i, &c)| {
            acc + c / (x + (i + 1) as f64)
        })
}

/// Complex gamma function: Lanczos approximation (g = 7, nine terms) with the
/// reflection formula for `Re x < 1/2`.
pub fn gamma_complex(x: Complex64) -> Result<Complex64> {
    if nonpositive_integer(x, POLE_TOL).is_some() {
        return Err(Error::Pole(x));
    }
    if x.re < 0.5 {
        let s = sin_pi(x);
        return Ok(Complex64::new(PI, 0.0) / (s * gamma_complex(1.0 - x)?));
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    let a = lanczos_sum(xm);
    Ok((2.0 * PI).sqrt() * t.powc(xm + 0.5) * (-t).exp() * a)
}

/// A logarithm of Γ(x). The imaginary part is only determined up to a
/// multiple of 2π; callers exponentiate differences of these values.
pub fn ln_gamma_complex(x: Complex64) -> Result<Complex64> {
    if nonpositive_integer(x, POLE_TOL).is_some() {
        return Err(Error::Pole(x));
    }
    if x.re < 0.5 {
        let s = sin_pi(x);
        return Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_complex(1.0 - x)?);
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    Ok(LN_SQRT_2PI + (xm + 0.5) * t.ln() - t + lanczos_sum(xm).ln())
}

/// 1/Γ(x), equal to zero at the poles of Γ.
pub fn recip_gamma(x: Complex64) -> Complex64 {
    match gamma_complex(x) {
        Ok(g) => 1.0 / g,
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// Γ(x₁)Γ(x₂)⋯ for a parameter vector.
pub fn gamma_product(xs: &[Complex64]) -> Result<Complex64> {
    xs.iter().try_fold(Complex64::new(1.0, 0.0), |acc, &x| {
        Ok(acc * gamma_complex(x)?)
    })
}

/// Γ(x₁)Γ(x₂)⋯ / Γ(y₁)Γ(y₂)⋯, through log-gamma once any argument is large.
pub fn gamma_ratio(upper: &[Complex64], lower: &[Complex64]) -> Result<Complex64> {
    if upper.iter().chain(lower).all(|x| x.norm() <= 50.0) {
        return Ok(gamma_product(upper)? / gamma_product(lower)?);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for &x in upper {
        acc += ln_gamma_complex(x)?;
    }
    for &y in lower {
        acc -= ln_gamma_complex(y)?;
    }
    Ok(acc.exp())
}

/// n!/Γ(x + n) without overflow for large n. Zero when x + n is a pole.
pub fn factorial_over_gamma(n: usize, x: Complex64) -> Complex64 {
    let y = x + n as f64;
    if nonpositive_integer(y, POLE_TOL).is_some() {
        return Complex64::new(0.0, 0.0);
    }
    if n <= 20 && y.norm() <= 50.0 {
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        return fact * recip_gamma(y);
    }
    let ln_fact = ln_gamma_complex(Complex64::new(n as f64 + 1.0, 0.0)).expect("positive argument");
    match ln_gamma_complex(y) {
        Ok(lg) => (ln_fact - lg).exp(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// Which hypergeometric family a parameter pair belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// `p-1Fp`: one fewer upper parameter than lower.
    BesselType,
    /// `pFp`: as many upper parameters as lower.
    KummerType,
}

/// Upper and lower parameter vectors of a hypergeometric function.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPair {
    pub upper: Vec<Complex64>,
    pub lower: Vec<Complex64>,
    pub kind: ParamKind,
}

impl ParameterPair {
    /// Validates lengths and rejects non-positive-integer lower parameters.
    pub fn new(upper: Vec<Complex64>, lower: Vec<Complex64>) -> Result<Self> {
        let kind = if upper.len() + 1 == lower.len() {
            ParamKind::BesselType
        } else if upper.len() == lower.len() && !lower.is_empty() {
            ParamKind::KummerType
        } else {
            return Err(Error::InvalidParameters(format!(
                "{} upper and {} lower parameters: need len(a) = len(b) - 1 or len(a) = len(b)",
                upper.len(),
                lower.len()
            )));
        };
        check_lower(&lower)?;
        Ok(ParameterPair { upper, lower, kind })
    }

    pub fn bessel_type(upper: Vec<Complex64>, lower: Vec<Complex64>) -> Result<Self> {
        let pair = Self::new(upper, lower)?;
        if pair.kind != ParamKind::BesselType {
            return Err(Error::InvalidParameters(
                "Bessel-type functions need len(a) = len(b) - 1".into(),
            ));
        }
        Ok(pair)
    }

    pub fn kummer_type(upper: Vec<Complex64>, lower: Vec<Complex64>) -> Result<Self> {
        let pair = Self::new(upper, lower)?;
        if pair.kind != ParamKind::KummerType {
            return Err(Error::InvalidParameters(
                "Kummer-type functions need len(a) = len(b)".into(),
            ));
        }
        Ok(pair)
    }

    pub fn psi(&self) -> Complex64 {
        psi_shift(&self.upper, &self.lower)
    }

    /// Both vectors shifted by the same constant.
    pub fn shifted(&self, alpha: Complex64) -> Self {
        ParameterPair {
            upper: self.upper.iter().map(|&x| x + alpha).collect(),
            lower: self.lower.iter().map(|&x| x + alpha).collect(),
            kind: self.kind,
        }
    }
}

/// Rejects lower parameters at 0, -1, -2, ...
pub fn check_lower(lower: &[Complex64]) -> Result<()> {
    match lower
        .iter()
        .find(|&&b| nonpositive_integer(b, POLE_TOL).is_some())
    {
        Some(b) => Err(Error::InvalidParameters(format!(
            "lower parameter {b} is a non-positive integer"
        ))),
        None => Ok(()),
    }
}

/// ψ(a;b) = Σ b_j − Σ a_j.
pub fn psi_shift(upper: &[Complex64], lower: &[Complex64]) -> Complex64 {
    lower.iter().sum::<Complex64>() - upper.iter().sum::<Complex64>()
}

/// Converts real parameters to complex.
pub fn real_params(xs: &[f64]) -> Vec<Complex64> {
    xs.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn pochhammer_small_cases() {
        assert_eq!(pochhammer(c(2.0, 0.0), 3), c(24.0, 0.0));
        assert_eq!(pochhammer(c(0.3, -7.0), 0), c(1.0, 0.0));
        assert_eq!(pochhammer(c(0.5, 0.0), 2), c(0.75, 0.0));
        assert_eq!(pochhammer(c(-3.0, 0.0), 5), c(0.0, 0.0));
        assert_eq!(pochhammer(c(-3.0, 0.0), 3), c(-6.0, 0.0));
    }

    #[test]
    fn pochhammer_large_order_switches_to_log_gamma() {
        let x = c(0.75, 0.25);
        let direct = (0..40).fold(c(1.0, 0.0), |acc, k| acc * (x + k as f64));
        assert!(rel(pochhammer(x, 40), direct) < 1e-13);
        let logs: Complex64 = (0..300).map(|k| (x + k as f64).ln()).sum();
        let via_gamma = ln_pochhammer(x, 300).unwrap();
        assert!((via_gamma.re - logs.re).abs() < 1e-11 * logs.re.abs());
        assert!((c(0.0, via_gamma.im).exp() - c(0.0, logs.im).exp()).norm() < 1e-10);
        let small = ln_pochhammer(x, 10).unwrap().exp();
        assert!(rel(small, pochhammer(x, 10)) < 1e-13);
        assert!(pochhammer(c(1.5, 0.0), 300).re.is_infinite());
        assert_eq!(pochhammer(c(-10.0, 0.0), 400), c(0.0, 0.0));
    }

    #[test]
    fn gamma_known_values() {
        assert!(rel(gamma_complex(c(1.0, 0.0)).unwrap(), c(1.0, 0.0)) < 1e-14);
        assert!(rel(gamma_complex(c(0.5, 0.0)).unwrap(), c(PI.sqrt(), 0.0)) < 1e-14);
        // 40-digit reference value
        let expected = c(0.498_015_668_118_356, -0.154_949_828_301_810_7);
        assert!(rel(gamma_complex(c(1.0, 1.0)).unwrap(), expected) < 1e-13);
        assert!(
            rel(
                gamma_complex(c(-0.5, 0.0)).unwrap(),
                c(-2.0 * PI.sqrt(), 0.0)
            ) < 1e-14
        );
        assert!(rel(gamma_complex(c(11.0, 0.0)).unwrap(), c(3_628_800.0, 0.0)) < 1e-13);
    }

    #[test]
    fn gamma_poles_are_errors() {
        for k in 0..5 {
            assert!(matches!(
                gamma_complex(c(-(k as f64), 0.0)),
                Err(Error::Pole(_))
            ));
        }
        assert!(gamma_complex(c(-2.0 + 1e-10, 0.0)).is_ok());
        assert_eq!(recip_gamma(c(-3.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[c(0.3, 0.2), c(4.5, -3.0), c(-2.5, 1.0), c(17.0, 0.0)] {
            let g = gamma_complex(x).unwrap();
            assert!(
                rel(ln_gamma_complex(x).unwrap().exp(), g) < 1e-12,
                "x = {x}"
            );
        }
    }

    #[test]
    fn factorial_over_gamma_agrees_with_direct() {
        let x = c(5.5, 0.0);
        for n in [0usize, 3, 19, 40, 200] {
            let direct = ln_gamma_complex(c(n as f64 + 1.0, 0.0)).unwrap()
                - ln_gamma_complex(x + n as f64).unwrap();
            assert!(rel(factorial_over_gamma(n, x), direct.exp()) < 1e-12);
        }
        assert_eq!(factorial_over_gamma(1, c(-1.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn psi_examples() {
        let a = real_params(&[3.0]);
        let b = real_params(&[3.5, 5.0]);
        assert_eq!(psi_shift(&a, &b), c(5.5, 0.0));
        assert_eq!(
            psi_shift(&real_params(&[1.0, 1.5]), &real_params(&[2.0, 3.0])),
            c(2.5, 0.0)
        );
        let pair = ParameterPair::new(a, b).unwrap();
        let alpha = c(0.7, -0.2);
        assert!((pair.shifted(alpha).psi() - (c(5.5, 0.0) + alpha)).norm() < 1e-14);
    }

    #[test]
    fn parameter_pair_validation() {
        assert!(ParameterPair::new(real_params(&[1.0]), real_params(&[0.0, 2.0])).is_err());
        assert!(ParameterPair::new(real_params(&[1.0, 2.0, 3.0]), real_params(&[2.0])).is_err());
        let p = ParameterPair::new(real_params(&[1.0, 1.5]), real_params(&[2.0, 3.0])).unwrap();
        assert_eq!(p.kind, ParamKind::KummerType);
        assert!(ParameterPair::bessel_type(p.upper.clone(), p.lower.clone()).is_err());
    }
}
