//! Expansions of the Kummer-type function `pFp(a; b; -z)`, uniformly
//! convergent in right half-planes `Re z ≥ Λ` (errors weighted by
//! `H(z) = max(1, e^{-Re z})`).
//!
//! With `a_p` the upper parameter of smallest real part, `a_[p]` the others
//! and `ψ' = ψ(a_[p]; b)`:
//!
//! * kernel form: `Γ(b)/Γ(a_[p]) Σ_{n<N} g_n(a_[p];b)/Γ(ψ'+n) · M(a_p, ψ'+n, -z)`;
//! * elementary form: each `M` replaced by `Σ_{k<m} A_k(a_p, ψ'+n) F_k(-z)`
//!   with `m = N + ⌊Re ψ'⌋`.

use num_complex::Complex64;

use crate::besselexp::{ExpansionResult, Method};
use crate::error::{Error, Result};
use crate::norlund::{norlund_coeffs, pole_analysis, NorlundTable};
use crate::numkernel::{
    check_lower, gamma_ratio, nonpositive_integer, psi_shift, recip_gamma, POLE_TOL,
};
use crate::refseries::{gauss2f1_neg1, kummer_m_tol, DEFAULT_TOL};

/// Perturbation applied to the second parameter of `A_n` when its terminating
/// `2F1` is degenerate.
pub const DEGENERATE_SHIFT: f64 = 1e-8;

/// Below this modulus `F_n` is summed from its Taylor series.
const F_TAYLOR_RADIUS: f64 = 0.5;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub use crate::besselexp::BoundKind;

/// `H(z) = max(1, e^{-Re z})`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct HWeight(pub f64);

impl HWeight {
    pub fn at(z: Complex64) -> Self {
        HWeight((-z.re).exp().max(1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Index of the upper parameter with the smallest real part (first on ties),
/// and the vector with that entry swapped into the last slot.
pub fn select_min_param(a: &[Complex64]) -> (usize, Vec<Complex64>) {
    let mut index = 0;
    for (i, x) in a.iter().enumerate() {
        if x.re < a[index].re {
            index = i;
        }
    }
    let mut reordered = a.to_vec();
    if !reordered.is_empty() {
        let last = reordered.len() - 1;
        reordered.swap(index, last);
    }
    (index, reordered)
}

/// The coefficients `A_0 .. A_{m-1}` of `M(a, b; -z) ≈ Σ A_k(a,b) F_k(-z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AFTable {
    pub m: usize,
    pub a_sel: Complex64,
    pub b_eff: Complex64,
    pub coeffs: Vec<Complex64>,
}

/// `A_n(a,b) = 2^{n+2-b} (a+1-b)_n/n! · Γ(b)/(Γ(a)Γ(b-a)) · 2F1(1-a, -n; b-a-n; -1)`
/// for `n < m`.
pub fn afn_coeffs(a_sel: Complex64, b_eff: Complex64, m: usize) -> Result<AFTable> {
    let bma = b_eff - a_sel;
    let gamma_part = if nonpositive_integer(bma, POLE_TOL).is_some()
        || nonpositive_integer(a_sel, POLE_TOL).is_some()
    {
        ZERO
    } else if b_eff.norm() <= 50.0 && a_sel.norm() <= 50.0 && bma.norm() <= 50.0 {
        gamma_ratio(&[b_eff], &[])? * recip_gamma(a_sel) * recip_gamma(bma)
    } else {
        gamma_ratio(&[b_eff], &[a_sel, bma])?
    };
    let base = Complex64::new(2.0, 0.0).powc(2.0 - b_eff) * gamma_part;
    let mut coeffs = Vec::with_capacity(m);
    // (a+1-b)_n 2^n / n!
    let mut poch = ONE;
    for n in 0..m {
        if n > 0 {
            let k = (n - 1) as f64;
            poch = poch * (a_sel + 1.0 - b_eff + k) * 2.0 / (k + 1.0);
        }
        let f = gauss2f1_neg1(ONE - a_sel, n, bma - n as f64).map_err(|e| match e {
            Error::Degenerate { k, .. } => Error::Degenerate { n, k },
            other => other,
        })?;
        coeffs.push(base * poch * f);
    }
    Ok(AFTable {
        m,
        a_sel,
        b_eff,
        coeffs,
    })
}

/// As [`afn_coeffs`], moving `b` by [`DEGENERATE_SHIFT`] (with a warning) if
/// the terminating sum is degenerate.
fn afn_coeffs_perturbed(a_sel: Complex64, b_eff: Complex64, m: usize) -> Result<AFTable> {
    match afn_coeffs(a_sel, b_eff, m) {
        Err(Error::Degenerate { n, k }) => {
            log::warn!(
                "degenerate 2F1 in A_{n} (k = {k}) for a = {a_sel}, b = {b_eff}; shifting b by {DEGENERATE_SHIFT:e}"
            );
            afn_coeffs(a_sel, b_eff + DEGENERATE_SHIFT, m)
        }
        other => other,
    }
}

/// `F_n(w) = n!/(-w)^{n+1} [e_n(w/2) - e^w e_n(-w/2)]`, with
/// `e_n(x) = Σ_{k≤n} x^k/k!`.
pub fn f_kernel(n: usize, w: Complex64) -> Complex64 {
    if w.norm() < F_TAYLOR_RADIUS {
        f_kernel_taylor(n, w)
    } else if (n + 1) as f64 > w.norm() / 2.0 {
        f_kernel_tail(n, w)
    } else {
        f_kernel_direct(n, w)
    }
}

/// Power series of `F_n` about the origin: `(-1)^n Σ_i d_i w^i` with
/// `d_i = n! [ (1/2)^j/j! − Σ_{k=n+1}^{j} (−1/2)^k/(k!(j−k)!) ]`, `j = n+1+i`.
pub fn f_kernel_taylor(n: usize, w: Complex64) -> Complex64 {
    let min_terms = 2 * n + 8;
    let mut sum = ZERO;
    let mut power = ONE;
    let mut small_run = 0;
    for i in 0..min_terms + 200 {
        let j = n + 1 + i;
        // n!/j! (1/2)^j
        let mut lead = 0.5f64.powi(j as i32);
        for l in n + 1..=j {
            lead /= l as f64;
        }
        // Σ_{k=n+1}^{j} (−1/2)^k n!/(k!(j−k)!)
        let mut tail = 0.0;
        let mut nk = 1.0; // n!/k!
        for k in n + 1..=j {
            nk /= k as f64;
            let inv_fact_jk: f64 = (1..=j - k).map(|l| 1.0 / l as f64).product();
            tail += (-0.5f64).powi(k as i32) * nk * inv_fact_jk;
        }
        let term = power * (lead - tail);
        sum += term;
        power *= w;
        if i + 1 >= min_terms {
            if term.norm() <= 1e-17 * sum.norm() {
                small_run += 1;
                if small_run == 2 {
                    break;
                }
            } else {
                small_run = 0;
            }
        }
        if power == ZERO {
            break;
        }
    }
    if n % 2 == 1 {
        -sum
    } else {
        sum
    }
}

/// `F_n(w) = 2^{-(n+1)}/(n+1) [e^w S_n(-w/2) + (-1)^n S_n(w/2)]` with
/// `S_n(x) = Σ_i x^i / ((n+2)(n+3)⋯(n+1+i))`, free of the cancellation in
/// the defining formula when `|w|/2 < n+1`.
fn f_kernel_tail(n: usize, w: Complex64) -> Complex64 {
    let s = |x: Complex64| {
        let mut term = ONE;
        let mut sum = ONE;
        for i in 1..10_000 {
            term = term * x / (n + 1 + i) as f64;
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        sum
    };
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let bracket = w.exp() * s(-w / 2.0) + sign * s(w / 2.0);
    bracket * 0.5f64.powi(n as i32 + 1) / (n + 1) as f64
}

/// The defining formula, used when `|w|/2 ≥ n+1`.
pub fn f_kernel_direct(n: usize, w: Complex64) -> Complex64 {
    let e = |x: Complex64| {
        let mut term = ONE;
        let mut sum = ONE;
        for k in 1..=n {
            term = term * x / k as f64;
            sum += term;
        }
        sum
    };
    // n!/(-w)^{n+1} built as Π k/(-w)
    let mut scale = ONE / (-w);
    for k in 1..=n {
        scale = scale * k as f64 / (-w);
    }
    scale * (e(w / 2.0) - w.exp() * e(-w / 2.0))
}

/// Checks the hypotheses of the Kummer-type expansions; returns the
/// reordered upper vector.
pub fn check_kummer_params(
    a: &[Complex64],
    b: &[Complex64],
    n_terms: usize,
) -> Result<Vec<Complex64>> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidParameters(format!(
            "Kummer-type expansions need len(a) = len(b) >= 1, got {} and {}",
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
    let (_, reordered) = select_min_param(a);
    let rest = &reordered[..reordered.len() - 1];
    if let Some(x) = rest.iter().find(|x| x.re <= 0.0) {
        return Err(Error::Precondition(format!(
            "Re a > 0 required for all but a_p, got {x}"
        )));
    }
    let psi = psi_shift(a, b);
    if psi.re <= 0.0 {
        return Err(Error::Precondition(format!(
            "Re ψ(a;b) > 0 required, got ψ = {psi}"
        )));
    }
    Ok(reordered)
}

/// Default inner order `m = N + ⌊Re ψ'⌋`, at least 1.
pub fn default_exp_order(psi_rest: Complex64, n_terms: usize) -> usize {
    (n_terms as i64 + psi_rest.re.floor() as i64).max(1) as usize
}

/// Everything about `(a, b, N)` that does not depend on `z`.
#[derive(Debug, Clone)]
pub struct KummerPlan {
    /// Coefficients `g_n(a_[p]; b)`.
    pub table: NorlundTable,
    pub a_p: Complex64,
    pub n_terms: usize,
    /// `Γ(b)/Γ(a_[p])`
    prefactor: Complex64,
    /// `A_k(a_p, ψ'+n)`, one table per `n`, built on demand.
    af: Option<Vec<AFTable>>,
    pub m: usize,
    tol: f64,
}

impl KummerPlan {
    pub fn new(a: &[Complex64], b: &[Complex64], n_terms: usize) -> Result<Self> {
        let reordered = check_kummer_params(a, b, n_terms)?;
        let (rest, last) = reordered.split_at(reordered.len() - 1);
        let table = norlund_coeffs(rest, b, n_terms)?;
        let prefactor = gamma_ratio(b, rest)?;
        let m = default_exp_order(table.psi, n_terms);
        Ok(KummerPlan {
            table,
            a_p: last[0],
            n_terms,
            prefactor,
            af: None,
            m,
            tol: DEFAULT_TOL,
        })
    }

    /// Prepares the elementary form, optionally with an explicit inner order.
    pub fn with_elementary(mut self, m_override: Option<usize>) -> Result<Self> {
        if self.a_p.re <= 0.0 {
            return Err(Error::Precondition(format!(
                "the elementary form needs Re a > 0 for every upper parameter, got a_p = {}",
                self.a_p
            )));
        }
        if let Some(m) = m_override {
            self.m = m.max(1);
        }
        let af = (0..self.n_terms)
            .map(|n| afn_coeffs_perturbed(self.a_p, self.table.psi + n as f64, self.m))
            .collect::<Result<Vec<_>>>()?;
        self.af = Some(af);
        Ok(self)
    }

    pub fn eval_kernel(&self, z: Complex64) -> Result<ExpansionResult> {
        let mut sum = ZERO;
        for n in 0..self.n_terms {
            let w = self.table.ratio[n];
            if w == ZERO {
                continue;
            }
            sum += w * kummer_m_tol(self.a_p, self.table.psi + n as f64, -z, self.tol)?;
        }
        Ok(ExpansionResult {
            value: self.prefactor * sum,
            n_terms: self.n_terms,
            bound_estimate: self.bound(z, BoundKind::Kernel),
            method: Method::KummerKernel,
            m: None,
            fallback_terms: 0,
        })
    }

    pub fn eval_elementary(&self, z: Complex64) -> Result<ExpansionResult> {
        let af = self.af.as_ref().ok_or_else(|| {
            Error::Unsupported("plan was built without the elementary tables".into())
        })?;
        let f: Vec<Complex64> = (0..self.m).map(|k| f_kernel(k, -z)).collect();
        let mut sum = ZERO;
        for (n, table) in af.iter().enumerate() {
            let inner: Complex64 = table.coeffs.iter().zip(&f).map(|(a, f)| a * f).sum();
            sum += self.table.ratio[n] * inner;
        }
        Ok(ExpansionResult {
            value: self.prefactor * sum,
            n_terms: self.n_terms,
            bound_estimate: self.bound(z, BoundKind::Elementary),
            method: Method::ExpElementary,
            m: Some(self.m),
            fallback_terms: 0,
        })
    }

    pub fn bound(&self, z: Complex64, which: BoundKind) -> f64 {
        bound_shape(
            self.table.pole_a,
            self.table.pole_r,
            self.a_p,
            z,
            self.n_terms,
            which,
        )
    }
}

fn bound_shape(
    alpha: f64,
    r: usize,
    a_p: Complex64,
    z: Complex64,
    n: usize,
    which: BoundKind,
) -> f64 {
    let nf = n as f64;
    let mut shape = if alpha.is_finite() {
        nf.ln().powi(r as i32 - 1) / nf.powf(alpha)
    } else {
        0.0
    };
    if which == BoundKind::Elementary {
        shape += nf.powf(-a_p.re);
    }
    HWeight::at(z).value() * shape
}

/// Remainder shape `H(z) log^{r−1}N / N^α` (plus `N^{−Re a_p}` for the
/// elementary form), with unit constant.
pub fn kummer_bound(
    a: &[Complex64],
    b: &[Complex64],
    z: Complex64,
    n_terms: usize,
    which: BoundKind,
) -> Result<f64> {
    let (_, reordered) = select_min_param(a);
    let (rest, last) = reordered.split_at(reordered.len().max(1) - 1);
    let (alpha, r) = if rest.is_empty() {
        (f64::INFINITY, 1)
    } else {
        let report = pole_analysis(rest, b)?;
        (report.decay(), report.multiplicity)
    };
    let a_p = last.first().copied().unwrap_or(ZERO);
    Ok(bound_shape(alpha, r, a_p, z, n_terms, which))
}

pub fn kummer_expansion(
    a: &[Complex64],
    b: &[Complex64],
    z: Complex64,
    n_terms: usize,
) -> Result<ExpansionResult> {
    KummerPlan::new(a, b, n_terms)?.eval_kernel(z)
}

pub fn elementary_kummer_expansion(
    a: &[Complex64],
    b: &[Complex64],
    z: Complex64,
    n_terms: usize,
) -> Result<ExpansionResult> {
    KummerPlan::new(a, b, n_terms)?
        .with_elementary(None)?
        .eval_elementary(z)
}

pub fn elementary_kummer_expansion_with_order(
    a: &[Complex64],
    b: &[Complex64],
    z: Complex64,
    n_terms: usize,
    m: usize,
) -> Result<ExpansionResult> {
    KummerPlan::new(a, b, n_terms)?
        .with_elementary(Some(m))?
        .eval_elementary(z)
}
