//! Expansions of the Bessel-type function `p-1Fp(a; b; -z²/4)`, uniformly
//! convergent in horizontal strips.
//!
//! * kernel form: `Γ(b)/Γ(a) Σ_{n<N} g_n/Γ(ψ+n) · 0F1(-; ψ+n; -z²/4)`;
//! * elementary form: each `0F1` replaced by `P_m(z,ν) sin z/z − Q_m(z,ν) cos z`
//!   with `ν = ψ+n−1` and `m = N + ⌊Re ψ − 3/2⌋`.
//!
//! The rational-trigonometric kernels are evaluated in double-double. Below
//! [`Z_SWITCH`], or when a single term would still lose more than 16 digits,
//! the term is taken from the `0F1` kernel instead and the result is flagged.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extended::{dd, dd_real, magnitude, sin_cos, to_c64, DdComplex};
use crate::norlund::{norlund_coeffs, pole_analysis, NorlundTable};
use crate::numkernel::{check_lower, factorial_over_gamma, gamma_ratio, psi_shift};
use crate::refseries::{hyp_eval, DEFAULT_TOL};

/// Below this modulus the elementary form falls back to the kernel form.
pub const Z_SWITCH: f64 = 0.5;

/// Largest tolerated ratio of the biggest P/Q term to the kernel value.
const MAX_CANCELLATION: f64 = 1e16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    BesselKernel,
    TrigElementary,
    KummerKernel,
    ExpElementary,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::BesselKernel => "bessel",
            Method::TrigElementary => "bessel-elem",
            Method::KummerKernel => "kummer",
            Method::ExpElementary => "kummer-elem",
        }
    }

    pub fn is_bessel_type(self) -> bool {
        matches!(self, Method::BesselKernel | Method::TrigElementary)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionResult {
    pub value: Complex64,
    pub n_terms: usize,
    /// Remainder shape with unit constant, see [`bessel_bound`] / `kummer_bound`.
    pub bound_estimate: f64,
    pub method: Method,
    /// Inner truncation order `m` of the elementary forms.
    pub m: Option<usize>,
    /// Number of terms of an elementary form taken from the kernel form.
    pub fallback_terms: usize,
}

impl ExpansionResult {
    pub fn used_fallback(&self) -> bool {
        self.fallback_terms > 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Kernel,
    Elementary,
}

/// Coefficients of `P_m(z,ν) = Σ_{j≤m} a_{m,j}(ν)/(−z²)^j` and
/// `Q_m(z,ν) = Σ_{1≤j≤m} b_{m,j}(ν)/(−z²)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PQTable {
    pub m: usize,
    pub nu: Complex64,
    /// `a_{m,0} .. a_{m,m}`
    pub p_coeffs: Vec<DdComplex>,
    /// `b_{m,1} .. b_{m,m}`
    pub q_coeffs: Vec<DdComplex>,
}

impl PQTable {
    fn is_finite(&self) -> bool {
        self.p_coeffs
            .iter()
            .chain(&self.q_coeffs)
            .all(|c| magnitude(*c).is_finite())
    }

    /// `P_m(z,ν) sin z/z − Q_m(z,ν) cos z` and the largest single term.
    fn kernel(&self, w: DdComplex, sinc: DdComplex, cos: DdComplex) -> (DdComplex, f64) {
        let (ms, mc) = (magnitude(sinc), magnitude(cos));
        let mut power = dd_real(1.0);
        let mut p = self.p_coeffs[0];
        let mut q = dd_real(0.0);
        let mut biggest = magnitude(p) * ms;
        for j in 1..=self.m {
            power = power * w;
            let tp = self.p_coeffs[j] * power;
            let tq = self.q_coeffs[j - 1] * power;
            biggest = biggest.max(magnitude(tp) * ms).max(magnitude(tq) * mc);
            p = p + tp;
            q = q + tq;
        }
        (p * sinc - q * cos, biggest)
    }
}

/// Fills `a_{m,j}(ν)`, `b_{m,j}(ν)` in double-double.
pub fn pq_coeffs(m: usize, nu: Complex64) -> PQTable {
    // c_k = (1/2−ν)_k (2k)!/k!
    let half_minus_nu = dd(Complex64::new(0.5, 0.0) - nu);
    let mut c = Vec::with_capacity(m + 1);
    c.push(dd_real(1.0));
    for k in 0..m {
        let step = (half_minus_nu + dd_real(k as f64)) * dd_real(2.0 * (2 * k + 1) as f64);
        c.push(c[k] * step);
    }
    // 1/i! for i ≤ 2m+1
    let mut inv_fact = Vec::with_capacity(2 * m + 2);
    inv_fact.push(dd_real(1.0));
    for i in 1..=2 * m + 1 {
        inv_fact.push(inv_fact[i - 1] / dd_real(i as f64));
    }
    let p_coeffs = (0..=m)
        .map(|j| {
            (j..=m)
                .rev()
                .fold(dd_real(0.0), |acc, k| acc + c[k] * inv_fact[2 * (k - j)])
        })
        .collect();
    let q_coeffs = (1..=m)
        .map(|j| {
            (j..=m).rev().fold(dd_real(0.0), |acc, k| {
                acc + c[k] * inv_fact[2 * (k - j) + 1]
            })
        })
        .collect();
    PQTable {
        m,
        nu,
        p_coeffs,
        q_coeffs,
    }
}

/// Checks the hypotheses shared by both Bessel-type expansions.
pub fn check_bessel_params(a: &[Complex64], b: &[Complex64], n_terms: usize) -> Result<()> {
    if a.len() + 1 != b.len() {
        return Err(Error::InvalidParameters(format!(
            "Bessel-type expansions need len(a) = len(b) - 1, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    check_lower(b)?;
    if n_terms == 0 {
        return Err(Error::InvalidParameters(
            "the number of terms N must be at least 1".into(),
        ));
    }
    if let Some(x) = a.iter().find(|x| x.re <= 0.0) {
        return Err(Error::Precondition(format!(
            "Re a > 0 required, got a = {x}"
        )));
    }
    let psi = psi_shift(a, b);
    if psi.re <= 0.5 {
        return Err(Error::Precondition(format!(
            "Re ψ(a;b) > 1/2 required, got ψ = {psi}"
        )));
    }
    Ok(())
}

/// Default inner order `m = N + ⌊Re ψ − 3/2⌋`, at least 0.
pub fn default_trig_order(psi: Complex64, n_terms: usize) -> usize {
    (n_terms as i64 + (psi.re - 1.5).floor() as i64).max(0) as usize
}

/// Everything about `(a, b, N)` that does not depend on `z`.
#[derive(Debug, Clone)]
pub struct BesselPlan {
    pub table: NorlundTable,
    pub n_terms: usize,
    /// `Γ(b)/Γ(a)`
    prefactor: Complex64,
    /// `g_n/Γ(ψ+n−1/2)`
    half_ratio: Vec<Complex64>,
    pq: Vec<PQTable>,
    pub m: usize,
    tol: f64,
}

impl BesselPlan {
    pub fn new(a: &[Complex64], b: &[Complex64], n_terms: usize) -> Result<Self> {
        Self::with_order(a, b, n_terms, None)
    }

    /// As [`BesselPlan::new`] with an explicit inner order `m`.
    pub fn with_order(
        a: &[Complex64],
        b: &[Complex64],
        n_terms: usize,
        m_override: Option<usize>,
    ) -> Result<Self> {
        check_bessel_params(a, b, n_terms)?;
        let table = norlund_coeffs(a, b, n_terms)?;
        let psi = table.psi;
        let prefactor = gamma_ratio(b, a)?;
        let half_ratio = table
            .scaled
            .iter()
            .enumerate()
            .map(|(n, &u)| u * factorial_over_gamma(n, psi - 0.5))
            .collect();
        let m = m_override.unwrap_or_else(|| default_trig_order(psi, n_terms));
        let pq = (0..n_terms)
            .map(|n| pq_coeffs(m, psi + (n as f64 - 1.0)))
            .collect();
        Ok(BesselPlan {
            table,
            n_terms,
            prefactor,
            half_ratio,
            pq,
            m,
            tol: DEFAULT_TOL,
        })
    }

    fn kernel_term(&self, n: usize, x: Complex64) -> Result<Complex64> {
        let nu1 = self.table.psi + n as f64;
        Ok(self.table.ratio[n] * hyp_eval(&[], &[nu1], x, self.tol)?)
    }

    /// Sum through `0F1` kernels.
    pub fn eval_kernel(&self, z: Complex64) -> Result<ExpansionResult> {
        let x = -z * z / 4.0;
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 0..self.n_terms {
            sum += self.kernel_term(n, x)?;
        }
        Ok(ExpansionResult {
            value: self.prefactor * sum,
            n_terms: self.n_terms,
            bound_estimate: self.bound(z, BoundKind::Kernel),
            method: Method::BesselKernel,
            m: None,
            fallback_terms: 0,
        })
    }

    /// Sum through `sin z`, `cos z` and the `P_m`, `Q_m` rationals.
    pub fn eval_elementary(&self, z: Complex64) -> Result<ExpansionResult> {
        let mut result = ExpansionResult {
            value: Complex64::new(0.0, 0.0),
            n_terms: self.n_terms,
            bound_estimate: self.bound(z, BoundKind::Elementary),
            method: Method::TrigElementary,
            m: Some(self.m),
            fallback_terms: 0,
        };
        let x = -z * z / 4.0;
        if z.norm() < Z_SWITCH {
            let mut sum = Complex64::new(0.0, 0.0);
            for n in 0..self.n_terms {
                sum += self.kernel_term(n, x)?;
            }
            result.value = self.prefactor * sum;
            result.fallback_terms = self.n_terms;
            return Ok(result);
        }
        let zd = dd(z);
        let (s, c) = sin_cos(zd);
        let sinc = s / zd;
        let w = dd_real(-1.0) / (zd * zd);
        let two_over_sqrt_pi = std::f64::consts::FRAC_2_SQRT_PI;
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 0..self.n_terms {
            let table = &self.pq[n];
            let elementary = if table.is_finite() {
                let (v, biggest) = table.kernel(w, sinc, c);
                let size = magnitude(v);
                (size > 0.0 && biggest / size <= MAX_CANCELLATION).then(|| to_c64(v))
            } else {
                None
            };
            match elementary {
                Some(v) => sum += two_over_sqrt_pi * self.half_ratio[n] * v,
                None => {
                    log::debug!("trig kernel n = {n} at z = {z} too ill-conditioned, using 0F1");
                    result.fallback_terms += 1;
                    sum += self.kernel_term(n, x)?;
                }
            }
        }
        result.value = self.prefactor * sum;
        Ok(result)
    }

    pub fn bound(&self, z: Complex64, which: BoundKind) -> f64 {
        bound_shape(
            self.table.pole_a,
            self.table.pole_r,
            self.table.psi,
            z,
            self.n_terms,
            which,
        )
    }
}

fn bound_shape(
    pole_a: f64,
    r: usize,
    psi: Complex64,
    z: Complex64,
    n: usize,
    which: BoundKind,
) -> f64 {
    let nf = n as f64;
    let mut shape = nf.ln().powi(r as i32 - 1) / nf.powf(pole_a + 0.5);
    if which == BoundKind::Elementary {
        shape += nf.powf(-(psi.re - 0.5));
    }
    z.im.abs().exp() * shape
}

/// Remainder shape `e^{|Im z|} log^{r−1}N / N^{a+1/2}` (plus `N^{−(Re ψ−1/2)}`
/// for the elementary form), with unit constant.
pub fn bessel_bound(
    a: &[Complex64],
    b: &[Complex64],
    z: Complex64,
    n_terms: usize,
    which: BoundKind,
) -> Result<f64> {
    let report = pole_analysis(a, b)?;
    Ok(bound_shape(
        report.decay(),
        report.multiplicity,
        psi_shift(a, b),
        z,
        n_terms,
        which,
    ))
}

pub fn bessel_expansion(
    a: &[Complex64],
    b: &[Complex64],
    z: Complex64,
    n_terms: usize,
) -> Result<ExpansionResult> {
    BesselPlan::new(a, b, n_terms)?.eval_kernel(z)
}

pub fn elementary_bessel_expansion(
    a: &[Complex64],
    b: &[Complex64],
    z: Complex64,
    n_terms: usize,
) -> Result<ExpansionResult> {
    BesselPlan::new(a, b, n_terms)?.eval_elementary(z)
}

pub fn elementary_bessel_expansion_with_order(
    a: &[Complex64],
    b: &[Complex64],
    z: Complex64,
    n_terms: usize,
    m: usize,
) -> Result<ExpansionResult> {
    BesselPlan::with_order(a, b, n_terms, Some(m))?.eval_elementary(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::real_params;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn params() -> (Vec<Complex64>, Vec<Complex64>) {
        (real_params(&[3.0]), real_params(&[3.5, 5.0]))
    }

    #[test]
    fn pq_small_orders() {
        let t = pq_coeffs(0, c(2.3));
        assert_eq!(to_c64(t.p_coeffs[0]), c(1.0));
        assert!(t.q_coeffs.is_empty());
        let nu = Complex64::new(2.3, 0.4);
        let t = pq_coeffs(1, nu);
        let h = c(0.5) - nu;
        assert!((to_c64(t.p_coeffs[1]) - 2.0 * h).norm() < 1e-15);
        assert!((to_c64(t.p_coeffs[0]) - (1.0 + h)).norm() < 1e-15);
        assert!((to_c64(t.q_coeffs[0]) - 2.0 * h).norm() < 1e-15);
    }

    #[test]
    fn half_integer_order_is_exact() {
        // ν = 1/2: sqrt(π)/2 Γ(1)/Γ(3/2) 0F1(;3/2;−z²/4) = sin z / z
        let t = pq_coeffs(3, c(0.5));
        for j in 1..=3 {
            assert_eq!(to_c64(t.p_coeffs[j]), c(0.0));
        }
    }

    #[test]
    fn kernel_at_origin_single_term() {
        let (a, b) = params();
        let r = bessel_expansion(&a, &b, c(0.0), 1).unwrap();
        assert!((r.value - c(16.0 / 21.0)).norm() < 1e-14);
        assert_eq!(r.method, Method::BesselKernel);
    }

    #[test]
    fn elementary_n2_matches_closed_form() {
        let (a, b) = params();
        let closed = |z: f64| {
            (720.0 * z * (8.0 * z.powi(4) + 105.0 * z * z - 1890.0) * z.cos()
                + 720.0 * (z.powi(6) - 15.0 * z.powi(4) - 735.0 * z * z + 1890.0) * z.sin())
                / z.powi(11)
        };
        let r = elementary_bessel_expansion(&a, &b, c(5.0), 2).unwrap();
        assert!((r.value.re - closed(5.0)).abs() < 1e-13);
        assert!((r.value.re - 0.264_662_922_156_469_6).abs() < 1e-13);
        assert!(!r.used_fallback());
        assert_eq!(r.m, Some(6));
    }

    #[test]
    fn small_z_path_reaches_golden_limit() {
        let (a, b) = params();
        let r = elementary_bessel_expansion(&a, &b, c(1e-3), 2).unwrap();
        assert!(r.used_fallback());
        assert!((r.value.re - 208.0 / 231.0).abs() < 1e-6);
    }

    #[test]
    fn preconditions_reported() {
        let e = bessel_expansion(&real_params(&[-0.5]), &real_params(&[1.5, 2.0]), c(1.0), 3)
            .unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
        let e = bessel_expansion(&real_params(&[3.0]), &real_params(&[1.0, 2.0]), c(1.0), 3)
            .unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
        let e = bessel_expansion(&real_params(&[3.0]), &real_params(&[3.5, 5.0]), c(1.0), 0)
            .unwrap_err();
        assert!(matches!(e, Error::InvalidParameters(_)));
    }

    #[test]
    fn bound_shapes() {
        let (a, b) = params();
        let k = bessel_bound(&a, &b, Complex64::new(3.0, 1.5), 8, BoundKind::Kernel).unwrap();
        assert!((k - 1.5f64.exp() * 8f64.powf(-3.5)).abs() < 1e-15);
        let k16 = bessel_bound(&a, &b, c(3.0), 16, BoundKind::Kernel).unwrap();
        let k32 = bessel_bound(&a, &b, c(3.0), 32, BoundKind::Kernel).unwrap();
        assert!((k32 / k16 - 2f64.powf(-3.5)).abs() < 1e-14);
        let e = bessel_bound(&a, &b, c(3.0), 16, BoundKind::Elementary).unwrap();
        assert!((e - k16 - 16f64.powf(-5.0)).abs() < 1e-15);
    }
}
