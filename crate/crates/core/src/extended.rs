//! Double-double arithmetic (about 32 significant digits) for sums that cancel
//! catastrophically in plain `f64`: the reference series at large |z|, and
//! the rational-trigonometric kernels near the origin.
//!
//! Error-free transformations follow the classic two-sum / FMA two-product
//! scheme; every operation keeps the pair normalized (`|lo| ≤ ulp(hi)/2`).

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_complex::{Complex, Complex64};
use num_traits::{Num, One, Zero};

/// An unevaluated sum `hi + lo` of two doubles.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

pub type DdComplex = Complex<Dd>;

const FRAC_PI_2: Dd = Dd {
    hi: std::f64::consts::FRAC_PI_2,
    lo: 6.123_233_995_736_766e-17,
};
const LN_2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    fn mul_f64(self, b: f64) -> Self {
        let p = two_prod(self.hi, b);
        quick_two_sum(p.hi, p.lo + self.lo * b)
    }

    fn ldexp(self, e: i32) -> Self {
        let s = 2f64.powi(e);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    /// Taylor sum Σ x^k / k! from `start` with step 2 (sin/cos) or 1 (exp).
    fn taylor(x: Dd, first: Dd, start: u32, step: u32) -> Dd {
        let mut term = first;
        let mut sum = first;
        let mut k = start;
        loop {
            let mut den = 1.0;
            for j in 1..=step {
                den *= (k + j) as f64;
            }
            let mut next = term;
            for _ in 0..step {
                next = next * x;
            }
            term = next / Dd::new(den);
            k += step;
            if step == 2 {
                term = -term;
            }
            sum = sum + term;
            if term.hi.abs() <= 1e-34 * sum.hi.abs().max(1e-300) || k > 200 {
                return sum;
            }
        }
    }

    /// Reduces `self` modulo π/2; returns the remainder and the quadrant.
    fn reduce_half_pi(self) -> (Dd, i64) {
        let k = (self.hi / FRAC_PI_2.hi).round();
        let kd = Dd::new(k);
        (self - kd * FRAC_PI_2, k as i64)
    }

    pub fn sin(self) -> Dd {
        let (r, q) = self.reduce_half_pi();
        match q.rem_euclid(4) {
            0 => Dd::taylor(r, r, 1, 2),
            1 => Dd::taylor(r, Dd::ONE, 0, 2),
            2 => -Dd::taylor(r, r, 1, 2),
            _ => -Dd::taylor(r, Dd::ONE, 0, 2),
        }
    }

    pub fn cos(self) -> Dd {
        let (r, q) = self.reduce_half_pi();
        match q.rem_euclid(4) {
            0 => Dd::taylor(r, Dd::ONE, 0, 2),
            1 => -Dd::taylor(r, r, 1, 2),
            2 => -Dd::taylor(r, Dd::ONE, 0, 2),
            _ => Dd::taylor(r, r, 1, 2),
        }
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let m = (self.hi / LN_2.hi).round();
        let r = self - Dd::new(m) * LN_2;
        // exp(r) = exp(r/256)^256
        let small = r.ldexp(-8);
        let mut e = Dd::taylor(small, Dd::ONE, 0, 1);
        for _ in 0..8 {
            e = e * e;
        }
        e.ldexp(m as i32)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let s = two_sum(self.hi, b.hi);
        let t = two_sum(self.lo, b.lo);
        let s = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(s.hi, s.lo + t.lo)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let p = two_prod(self.hi, b.hi);
        let lo = p.lo + (self.hi * b.lo + self.lo * b.hi);
        quick_two_sum(p.hi, lo)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        // long division: two correction steps
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let q = quick_two_sum(q1, q2);
        q + Dd::new(q3)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, b: Dd) -> Dd {
        let q = (self / b).hi.trunc();
        self - b.mul_f64(q)
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, b: f64) -> Dd {
        self + Dd::new(b)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, b: f64) -> Dd {
        self.mul_f64(b)
    }
}

impl Zero for Dd {
    fn zero() -> Self {
        Dd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd::ONE
    }
}

impl Num for Dd {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(Dd::new)
    }
}

#[inline]
pub fn dd(z: Complex64) -> DdComplex {
    Complex::new(Dd::new(z.re), Dd::new(z.im))
}

#[inline]
pub fn dd_real(x: f64) -> DdComplex {
    Complex::new(Dd::new(x), Dd::ZERO)
}

#[inline]
pub fn to_c64(z: DdComplex) -> Complex64 {
    Complex64::new(z.re.to_f64(), z.im.to_f64())
}

/// Magnitude rounded to `f64`.
#[inline]
pub fn magnitude(z: DdComplex) -> f64 {
    z.re.hi.hypot(z.im.hi)
}

/// (sin z, cos z) for complex z.
pub fn sin_cos(z: DdComplex) -> (DdComplex, DdComplex) {
    let (s, c) = (z.re.sin(), z.re.cos());
    if z.im.is_zero() {
        return (Complex::new(s, Dd::ZERO), Complex::new(c, Dd::ZERO));
    }
    let ep = z.im.exp();
    let em = (-z.im).exp();
    let half = 0.5;
    let cosh = (ep + em) * half;
    let sinh = (ep - em) * half;
    (
        Complex::new(s * cosh, c * sinh),
        Complex::new(c * cosh, -(s * sinh)),
    )
}
