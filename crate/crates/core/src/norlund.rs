//! Nørlund's coefficients `g_n(a; b)` for `len(a) = len(b) - 1`, defined by
//!
//! ```text
//! Γ(z+ψ) Γ(z+a) / Γ(z+b) = Σ g_n / (z+ψ)_n,    ψ = Σb − Σa,
//! ```
//!
//! together with the pole data `(a, r)` of `Γ(a+s)/Γ(b+s)` that fixes their
//! decay `g_n/Γ(ψ+n) = O(log^{r-1} n / n^{a+1})`.
//!
//! Coefficients are built by the recurrence in `p`: start from `g_n(-; b_1)`
//! and append the pairs `(a_1, b_2), (a_2, b_3), ...`. The table keeps
//! `g_n/n!` and `g_n/Γ(ψ+n)`; the raw `g_n` overflows long before the
//! expansions stop needing terms.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extended::{dd, dd_real, to_c64, DdComplex};
use crate::numkernel::{
    check_lower, factorial_over_gamma, ln_gamma_complex, pochhammer, psi_shift,
};

/// Absolute tolerance for deciding that two poles coincide.
pub const POLE_COINCIDENCE_TOL: f64 = 1e-9;
/// Default number of poles scanned to the left of each `-a_j`.
pub const DEFAULT_POLE_SCAN: usize = 8;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A pole of `Γ(a+s)/Γ(b+s)` that survives cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub location: Complex64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleReport {
    /// Real part of the rightmost pole(s); the decay constant is its negative.
    pub rightmost_real: f64,
    /// Largest multiplicity among the poles on the rightmost vertical line.
    pub multiplicity: usize,
    pub poles: Vec<Pole>,
}

impl PoleReport {
    /// The constant `a` (or `α`) of the decay estimates.
    pub fn decay(&self) -> f64 {
        -self.rightmost_real
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NorlundTable {
    pub upper: Vec<Complex64>,
    pub lower: Vec<Complex64>,
    pub psi: Complex64,
    /// `g_n / n!`
    pub scaled: Vec<Complex64>,
    /// `g_n / Γ(ψ+n)`
    pub ratio: Vec<Complex64>,
    pub pole_a: f64,
    pub pole_r: usize,
}

impl NorlundTable {
    pub fn len(&self) -> usize {
        self.scaled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scaled.is_empty()
    }

    /// The raw coefficient `g_n`.
    pub fn coeff(&self, n: usize) -> Result<Complex64> {
        let u = self.scaled[n];
        if u == ZERO {
            return Ok(ZERO);
        }
        if n <= 170 {
            let g = u * (1..=n).map(|k| k as f64).product::<f64>();
            return if g.re.is_finite() && g.im.is_finite() {
                Ok(g)
            } else {
                Err(Error::Overflow { n })
            };
        }
        let ln_fact = ln_gamma_complex(Complex64::new(n as f64 + 1.0, 0.0))?.re;
        if ln_fact + u.norm().ln() > f64::MAX.ln() {
            return Err(Error::Overflow { n });
        }
        let g = u * ln_fact.exp();
        if g.re.is_finite() && g.im.is_finite() {
            Ok(g)
        } else {
            Err(Error::Overflow { n })
        }
    }

    /// All raw coefficients, or the index of the first that overflows.
    pub fn coeffs(&self) -> Result<Vec<Complex64>> {
        (0..self.len()).map(|n| self.coeff(n)).collect()
    }
}

fn check_shape(a: &[Complex64], b: &[Complex64]) -> Result<()> {
    if b.is_empty() || a.len() + 1 != b.len() {
        return Err(Error::InvalidParameters(format!(
            "Nørlund coefficients need len(a) = len(b) - 1 >= 0, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// `g_n/n!` for `n < n_max` by the recurrence in `p`.
pub fn norlund_scaled(a: &[Complex64], b: &[Complex64], n_max: usize) -> Result<Vec<Complex64>> {
    check_shape(a, b)?;
    let mut u = vec![ZERO; n_max];
    if n_max == 0 {
        return Ok(u);
    }
    u[0] = ONE;
    let mut psi = b[0];
    let mut w = vec![ZERO; n_max];
    for (&alpha, &beta) in a.iter().zip(&b[1..]) {
        // w_j = (β−α)_j / j!
        w[0] = ONE;
        for j in 1..n_max {
            w[j] = w[j - 1] * (beta - alpha + (j - 1) as f64) / j as f64;
        }
        let shift = psi - alpha;
        let mut next = vec![ZERO; n_max];
        for (n, slot) in next.iter_mut().enumerate() {
            // t = (ψ−α+s)_{n−s} s!/n!, built from s = n downwards
            let mut t = ONE;
            let mut acc = u[n];
            for s in (0..n).rev() {
                t = t * (shift + s as f64) / (s + 1) as f64;
                acc += w[n - s] * t * u[s];
            }
            *slot = acc;
        }
        u = next;
        psi += beta - alpha;
    }
    if let Some(n) = u
        .iter()
        .position(|x| !x.re.is_finite() || !x.im.is_finite())
    {
        return Err(Error::Overflow { n });
    }
    Ok(u)
}

/// Builds the coefficient table `g_0 .. g_{n_max-1}` with pole data from a
/// scan of depth [`DEFAULT_POLE_SCAN`].
pub fn norlund_coeffs(a: &[Complex64], b: &[Complex64], n_max: usize) -> Result<NorlundTable> {
    norlund_coeffs_with_scan(a, b, n_max, DEFAULT_POLE_SCAN)
}

pub fn norlund_coeffs_with_scan(
    a: &[Complex64],
    b: &[Complex64],
    n_max: usize,
    scan: usize,
) -> Result<NorlundTable> {
    if n_max == 0 {
        return Err(Error::InvalidParameters("n_max must be at least 1".into()));
    }
    check_lower(b)?;
    let scaled = norlund_scaled(a, b, n_max)?;
    let psi = psi_shift(a, b);
    let ratio: Vec<Complex64> = scaled
        .iter()
        .enumerate()
        .map(|(n, &u)| u * factorial_over_gamma(n, psi))
        .collect();
    // with no poles (no upper parameters, or all cancelled) there is no decay constant
    let (pole_a, pole_r) = match pole_analysis_with_scan(a, b, scan) {
        Ok(report) => (report.decay(), report.multiplicity),
        Err(Error::NoPoles { .. }) => (f64::INFINITY, 1),
        Err(e) => return Err(e),
    };
    Ok(NorlundTable {
        upper: a.to_vec(),
        lower: b.to_vec(),
        psi,
        scaled,
        ratio,
        pole_a,
        pole_r,
    })
}

/// Terminating `3F2(-n, x1, x2; y1, y2; 1)`, summed in double-double.
fn terminating_3f2(
    n: usize,
    x1: Complex64,
    x2: Complex64,
    y1: Complex64,
    y2: Complex64,
) -> Result<DdComplex> {
    let (x1, x2, y1, y2) = (dd(x1), dd(x2), dd(y1), dd(y2));
    let mut term = dd_real(1.0);
    let mut sum = term;
    for k in 0..n {
        let kf = dd_real(k as f64);
        let den = (y1 + kf) * (y2 + kf) * (kf + dd_real(1.0));
        if to_c64(den) == ZERO {
            return Err(Error::Degenerate { n, k });
        }
        term = term * (kf - dd_real(n as f64)) * (x1 + kf) * (x2 + kf) / den;
        sum = sum + term;
    }
    Ok(sum)
}

/// Partial sums ψ_m = Σ_{i≤m}(b_i − a_i), indexed from 1.
fn psi_partial(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO];
    let mut acc = ZERO;
    for (ai, bi) in a.iter().zip(b) {
        acc += bi - ai;
        out.push(acc);
    }
    out
}

/// `g_0`, `g_1`, `g_2` for any `p`.
pub fn norlund_first_three(a: &[Complex64], b: &[Complex64], n: usize) -> Result<Complex64> {
    check_shape(a, b)?;
    let psi = psi_partial(a, b);
    let p = b.len();
    // d_m = b_{m+1} − a_m, 1-based m
    let d = |m: usize| b[m] - a[m - 1];
    match n {
        0 => Ok(ONE),
        1 => Ok((1..p).map(|m| d(m) * psi[m]).sum()),
        2 => {
            let first: Complex64 = (1..p)
                .map(|m| pochhammer(d(m), 2) * pochhammer(psi[m], 2))
                .sum::<Complex64>()
                * 0.5;
            let mut second = ZERO;
            for k in 2..p {
                let inner: Complex64 = (1..k).map(|m| d(m) * psi[m]).sum();
                second += d(k) * (psi[k] + 1.0) * inner;
            }
            Ok(first + second)
        }
        _ => Err(Error::Unsupported(format!(
            "general formula only covers n <= 2, got n = {n}"
        ))),
    }
}

/// `g_n` from Nørlund's closed forms (`p = 2, 3, 4`), or from the general
/// formulas for `n ≤ 2` at other `p`.
pub fn norlund_explicit(a: &[Complex64], b: &[Complex64], n: usize) -> Result<Complex64> {
    check_shape(a, b)?;
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    match b.len() {
        2 => Ok(pochhammer(b[0] - a[0], n) * pochhammer(b[1] - a[0], n) / fact),
        3 => {
            let nu3 = b[0] + b[1] + b[2] - a[0] - a[1];
            let (y1, y2) = (nu3 - b[1], nu3 - b[2]);
            let f = terminating_3f2(n, b[0] - a[0], b[0] - a[1], y1, y2)?;
            Ok(pochhammer(y1, n) * pochhammer(y2, n) / fact * to_c64(f))
        }
        4 => {
            let nu4: Complex64 = b.iter().sum::<Complex64>() - a.iter().sum::<Complex64>();
            let nu2 = b[0] + b[1] - a[0];
            let (y1, y2) = (nu4 - b[2], nu4 - b[3]);
            let (x1, x2) = (nu2 - a[1], nu2 - a[2]);
            let (dx1, dx2, dy1, dy2) = (dd(x1), dd(x2), dd(y1), dd(y2));
            let mut sum = dd_real(0.0);
            let mut weight = dd_real(1.0);
            for k in 0..=n {
                if k > 0 {
                    let kf = dd_real((k - 1) as f64);
                    let den = (dy1 + kf) * (dy2 + kf) * (kf + dd_real(1.0));
                    if to_c64(den) == ZERO {
                        return Err(Error::Degenerate { n, k });
                    }
                    weight = weight * (kf - dd_real(n as f64)) * (dx1 + kf) * (dx2 + kf) / den;
                }
                sum = sum + weight * terminating_3f2(k, b[0] - a[0], b[1] - a[0], x1, x2)?;
            }
            Ok(pochhammer(y1, n) * pochhammer(y2, n) / fact * to_c64(sum))
        }
        _ if n <= 2 => norlund_first_three(a, b, n),
        p => Err(Error::Unsupported(format!(
            "no closed form for p = {p}, n = {n}"
        ))),
    }
}

/// Net multiplicity of `s` as a pole of `Γ(a+s)/Γ(b+s)`: poles of the
/// numerator at `s` minus those of the denominator.
fn net_multiplicity(a: &[Complex64], b: &[Complex64], s: Complex64) -> i64 {
    let hits = |xs: &[Complex64]| {
        xs.iter()
            .filter(|&&x| {
                let m = -s - x;
                m.im.abs() <= POLE_COINCIDENCE_TOL
                    && m.re > -POLE_COINCIDENCE_TOL
                    && (m.re - m.re.round()).abs() <= POLE_COINCIDENCE_TOL
            })
            .count() as i64
    };
    hits(a) - hits(b)
}

/// Poles of `Γ(a+s)/Γ(b+s)` among `s = −a_j − m`, `m = 0..=8`.
pub fn pole_analysis(a: &[Complex64], b: &[Complex64]) -> Result<PoleReport> {
    pole_analysis_with_scan(a, b, DEFAULT_POLE_SCAN)
}

/// As [`pole_analysis`] with candidates `m = 0..=scan`.
pub fn pole_analysis_with_scan(
    a: &[Complex64],
    b: &[Complex64],
    scan: usize,
) -> Result<PoleReport> {
    if a.is_empty() {
        return Err(Error::NoPoles { depth: scan });
    }
    let mut poles: Vec<Pole> = Vec::new();
    for &aj in a {
        for m in 0..=scan {
            let s = -aj - m as f64;
            if poles
                .iter()
                .any(|p| (p.location - s).norm() <= POLE_COINCIDENCE_TOL)
            {
                continue;
            }
            let net = net_multiplicity(a, b, s);
            if net > 0 {
                poles.push(Pole {
                    location: s,
                    multiplicity: net as usize,
                });
            }
        }
    }
    let rightmost_real = poles
        .iter()
        .map(|p| p.location.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if poles.is_empty() {
        return Err(Error::NoPoles { depth: scan });
    }
    let multiplicity = poles
        .iter()
        .filter(|p| (p.location.re - rightmost_real).abs() <= POLE_COINCIDENCE_TOL)
        .map(|p| p.multiplicity)
        .max()
        .unwrap_or(1);
    poles.sort_by(|x, y| {
        y.location
            .re
            .total_cmp(&x.location.re)
            .then(x.location.im.total_cmp(&y.location.im))
    });
    Ok(PoleReport {
        rightmost_real,
        multiplicity,
        poles,
    })
}

/// `|Σ_{n<N} g_n/Γ(ψ+n+m+1) − Γ(a+m+1)/Γ(b+m+1)|`, the truncation defect
/// of the `m`-th moment of the Meijer–Nørlund function.
pub fn moment_identity_residual(
    a: &[Complex64],
    b: &[Complex64],
    m: usize,
    n_terms: usize,
) -> Result<f64> {
    let psi = psi_shift(a, b);
    if psi.re <= 0.0 {
        return Err(Error::Precondition(format!(
            "moment identity needs Re ψ > 0, got {psi}"
        )));
    }
    let report = pole_analysis(a, b)?;
    if report.decay() <= m as f64 {
        return Err(Error::Precondition(format!(
            "moment m = {m} is not below the pole constant {}",
            report.decay()
        )));
    }
    let table = norlund_coeffs(a, b, n_terms)?;
    let shift = (m + 1) as f64;
    let sum: Complex64 = table
        .ratio
        .iter()
        .enumerate()
        .map(|(n, &r)| r / pochhammer(psi + n as f64, m + 1))
        .sum();
    let mut ln_target = ZERO;
    for &x in a {
        ln_target += ln_gamma_complex(x + shift)?;
    }
    for &x in b {
        ln_target -= ln_gamma_complex(x + shift)?;
    }
    Ok((sum - ln_target.exp()).norm())
}
