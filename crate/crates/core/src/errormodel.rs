//! Sup-errors of the expansions against the series oracle over rectangular
//! grids, and log-log fits of their decay in `N`.
//!
//! Grid points are independent; with the `parallel` feature they are
//! evaluated on the rayon pool (results are collected in grid order, so the
//! output does not depend on scheduling).

use num_complex::Complex64;

use crate::besselexp::{BesselPlan, ExpansionResult, Method};
use crate::error::{Error, Result};
use crate::kummerexp::{select_min_param, HWeight, KummerPlan};
use crate::norlund::pole_analysis;
use crate::numkernel::psi_shift;
use crate::refseries::{bessel_type_reference, kummer_type_reference, DEFAULT_TOL};

/// N values used by [`fit_rate`] when none are given.
pub const DEFAULT_RATE_NS: [usize; 5] = [8, 16, 32, 64, 128];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionShape {
    /// `|Im z| ≤ Λ`, `Re z ∈ re_range`.
    Strip { lambda: f64, re_range: (f64, f64) },
    /// `Re z ≥ Λ`, sampled on `re_range × im_range`.
    HalfPlane {
        lambda: f64,
        re_range: (f64, f64),
        im_range: (f64, f64),
    },
}

/// A rectangular sampling grid over a strip or a half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSpec {
    pub shape: RegionShape,
    /// Points along the real and imaginary directions.
    pub grid: (usize, usize),
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    // coarse grid points reappear bit for bit in refined grids
    let last = (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo + (hi - lo) * (i as f64 / last)
            }
        })
        .collect()
}

fn check_axis(name: &str, (lo, hi): (f64, f64), count: usize) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::InvalidParameters(format!(
            "{name} range [{lo}, {hi}] is empty"
        )));
    }
    if count == 0 || (count == 1 && lo != hi) {
        return Err(Error::InvalidParameters(format!(
            "{name} axis needs at least 2 points (1 only for a degenerate range), got {count}"
        )));
    }
    Ok(())
}

impl RegionSpec {
    pub fn strip(lambda: f64, re_range: (f64, f64), grid: (usize, usize)) -> Result<Self> {
        let spec = RegionSpec {
            shape: RegionShape::Strip { lambda, re_range },
            grid,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn half_plane(
        lambda: f64,
        re_range: (f64, f64),
        im_range: (f64, f64),
        grid: (usize, usize),
    ) -> Result<Self> {
        let spec = RegionSpec {
            shape: RegionShape::HalfPlane {
                lambda,
                re_range,
                im_range,
            },
            grid,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Points `z` with `Re z` in `re_range`, `Im z = 0` (a degenerate strip
    /// of the real line).
    pub fn real_segment(re_range: (f64, f64), count: usize) -> Result<Self> {
        Self::half_plane(re_range.0, re_range, (0.0, 0.0), (count, 1))
    }

    pub fn validate(&self) -> Result<()> {
        let (n_re, n_im) = self.grid;
        match self.shape {
            RegionShape::Strip { lambda, re_range } => {
                if lambda.is_nan() || lambda <= 0.0 {
                    return Err(Error::InvalidParameters(format!(
                        "strip half-width must be positive, got {lambda}"
                    )));
                }
                check_axis("Re", re_range, n_re)?;
                check_axis("Im", (-lambda, lambda), n_im)
            }
            RegionShape::HalfPlane {
                lambda,
                re_range,
                im_range,
            } => {
                check_axis("Re", re_range, n_re)?;
                check_axis("Im", im_range, n_im)?;
                if re_range.0 < lambda {
                    return Err(Error::InvalidParameters(format!(
                        "half-plane Re z >= {lambda} does not contain Re z = {}",
                        re_range.0
                    )));
                }
                Ok(())
            }
        }
    }

    /// Grid points, real part outermost.
    pub fn points(&self) -> Vec<Complex64> {
        let (n_re, n_im) = self.grid;
        let (re_range, im_range) = match self.shape {
            RegionShape::Strip { lambda, re_range } => (re_range, (-lambda, lambda)),
            RegionShape::HalfPlane {
                re_range, im_range, ..
            } => (re_range, im_range),
        };
        let re = linspace(re_range.0, re_range.1, n_re);
        let im = linspace(im_range.0, im_range.1, n_im);
        re.iter()
            .flat_map(|&x| im.iter().map(move |&y| Complex64::new(x, y)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Oracle tolerance and execution strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub oracle_tol: f64,
    pub execution: Execution,
    /// Inner order of the elementary forms, if not the default.
    pub m_override: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            oracle_tol: DEFAULT_TOL,
            execution: Execution::default(),
            m_override: None,
        }
    }
}

fn map_points<T, F>(points: &[Complex64], execution: Execution, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Complex64) -> Result<T> + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            points.par_iter().map(|&z| f(z)).collect()
        }
        _ => points.iter().map(|&z| f(z)).collect(),
    }
}

/// A prepared expansion for one `(method, a, b, N)`.
#[derive(Debug, Clone)]
pub enum Plan {
    Bessel(BesselPlan, Method),
    Kummer(KummerPlan, Method),
}

impl Plan {
    pub fn new(
        method: Method,
        a: &[Complex64],
        b: &[Complex64],
        n_terms: usize,
        m_override: Option<usize>,
    ) -> Result<Self> {
        match method {
            Method::BesselKernel => Ok(Plan::Bessel(BesselPlan::new(a, b, n_terms)?, method)),
            Method::TrigElementary => Ok(Plan::Bessel(
                BesselPlan::with_order(a, b, n_terms, m_override)?,
                method,
            )),
            Method::KummerKernel => Ok(Plan::Kummer(KummerPlan::new(a, b, n_terms)?, method)),
            Method::ExpElementary => Ok(Plan::Kummer(
                KummerPlan::new(a, b, n_terms)?.with_elementary(m_override)?,
                method,
            )),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<ExpansionResult> {
        match self {
            Plan::Bessel(p, Method::BesselKernel) => p.eval_kernel(z),
            Plan::Bessel(p, _) => p.eval_elementary(z),
            Plan::Kummer(p, Method::KummerKernel) => p.eval_kernel(z),
            Plan::Kummer(p, _) => p.eval_elementary(z),
        }
    }
}

/// The series value the method approximates: `p-1Fp(a;b;-z²/4)` for the
/// Bessel-type methods, `pFp(a;b;-z)` for the Kummer-type ones.
pub fn reference_value(
    method: Method,
    a: &[Complex64],
    b: &[Complex64],
    z: Complex64,
    tol: f64,
) -> Result<Complex64> {
    if method.is_bessel_type() {
        bessel_type_reference(a, b, z, tol)
    } else {
        kummer_type_reference(a, b, z, tol)
    }
}

/// Error weight: `1/H(z)` for the Kummer-type methods, 1 otherwise.
pub fn error_weight(method: Method, z: Complex64) -> f64 {
    if method.is_bessel_type() {
        1.0
    } else {
        1.0 / HWeight::at(z).value()
    }
}

/// Reference values at every grid point.
pub fn reference_values(
    method: Method,
    a: &[Complex64],
    b: &[Complex64],
    points: &[Complex64],
    settings: &Settings,
) -> Result<Vec<Complex64>> {
    map_points(points, settings.execution, |z| {
        reference_value(method, a, b, z, settings.oracle_tol)
    })
}

/// Largest weighted error over the grid and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupError {
    pub value: f64,
    pub argmax: Complex64,
}

fn sup_against(
    plan: &Plan,
    method: Method,
    points: &[Complex64],
    refs: &[Complex64],
    execution: Execution,
) -> Result<SupError> {
    let pairs: Vec<(Complex64, Complex64)> =
        points.iter().copied().zip(refs.iter().copied()).collect();
    let errs = match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            pairs
                .par_iter()
                .map(|&(z, r)| Ok((plan.eval(z)?.value - r).norm() * error_weight(method, z)))
                .collect::<Result<Vec<f64>>>()?
        }
        _ => pairs
            .iter()
            .map(|&(z, r)| Ok((plan.eval(z)?.value - r).norm() * error_weight(method, z)))
            .collect::<Result<Vec<f64>>>()?,
    };
    let mut best = SupError {
        value: 0.0,
        argmax: points[0],
    };
    for (&z, &e) in points.iter().zip(&errs) {
        if e.is_nan() {
            return Err(Error::NonConvergence { z, terms: 0 });
        }
        if e > best.value {
            best = SupError {
                value: e,
                argmax: z,
            };
        }
    }
    Ok(best)
}

/// `max_z |expansion(z, N) − series(z)|`, divided by `H(z)` for the
/// Kummer-type methods.
pub fn sup_error_region(
    method: Method,
    a: &[Complex64],
    b: &[Complex64],
    region: &RegionSpec,
    n_terms: usize,
) -> Result<f64> {
    Ok(sup_error_detail(method, a, b, region, n_terms, &Settings::default())?.value)
}

pub fn sup_error_detail(
    method: Method,
    a: &[Complex64],
    b: &[Complex64],
    region: &RegionSpec,
    n_terms: usize,
    settings: &Settings,
) -> Result<SupError> {
    Ok(sup_errors(method, a, b, region, &[n_terms], settings)?[0])
}

/// Sup-errors for several `N` over one grid, sharing the reference values.
pub fn sup_errors(
    method: Method,
    a: &[Complex64],
    b: &[Complex64],
    region: &RegionSpec,
    n_list: &[usize],
    settings: &Settings,
) -> Result<Vec<SupError>> {
    region.validate()?;
    let points = region.points();
    let refs = reference_values(method, a, b, &points, settings)?;
    n_list
        .iter()
        .map(|&n| {
            let plan = Plan::new(method, a, b, n, settings.m_override)?;
            sup_against(&plan, method, &points, &refs, settings.execution)
        })
        .collect()
}

/// Predicted decay exponent of the sup-error in N (negative).
pub fn expected_slope(method: Method, a: &[Complex64], b: &[Complex64]) -> Result<(f64, usize)> {
    match method {
        Method::BesselKernel | Method::TrigElementary => {
            let report = pole_analysis(a, b)?;
            let mut rate = report.decay() + 0.5;
            if method == Method::TrigElementary {
                rate = rate.min(psi_shift(a, b).re - 0.5);
            }
            Ok((-rate, report.multiplicity))
        }
        Method::KummerKernel | Method::ExpElementary => {
            let (_, reordered) = select_min_param(a);
            let (rest, last) = reordered.split_at(reordered.len() - 1);
            let (mut rate, r) = if rest.is_empty() {
                (f64::INFINITY, 1)
            } else {
                let report = pole_analysis(rest, b)?;
                (report.decay(), report.multiplicity)
            };
            if method == Method::ExpElementary {
                rate = rate.min(last[0].re);
            }
            Ok((-rate, r))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub expected_slope: f64,
    pub n_values: Vec<usize>,
    pub sup_errors: Vec<f64>,
}

/// Least-squares line through `(log N, log(err / log^{r−1} N))`; returns
/// slope, intercept and r².
pub fn fit_log_log(n_values: &[usize], errors: &[f64], r: usize) -> Result<(f64, f64, f64)> {
    if n_values.len() != errors.len() || n_values.len() < 2 {
        return Err(Error::NonFittable(
            "need matching N and error lists of length >= 2".into(),
        ));
    }
    if let Some((n, e)) = n_values
        .iter()
        .zip(errors)
        .find(|(_, &e)| e.is_nan() || e <= 0.0 || !e.is_finite())
    {
        return Err(Error::NonFittable(format!(
            "error at N = {n} is {e}, nothing to fit"
        )));
    }
    let xs: Vec<f64> = n_values.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = n_values
        .iter()
        .zip(errors)
        .map(|(&n, &e)| e.ln() - (r as f64 - 1.0) * (n as f64).ln().ln())
        .collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::NonFittable(
            "log factor undefined at N = 1 with r > 1".into(),
        ));
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::NonFittable("all N values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok((slope, intercept, r_squared))
}

/// Fits the decay of the region sup-error in `N`.
pub fn fit_rate(
    method: Method,
    a: &[Complex64],
    b: &[Complex64],
    region: &RegionSpec,
    n_values: &[usize],
    settings: &Settings,
) -> Result<RateFit> {
    let mut ns = n_values.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 4 {
        return Err(Error::InvalidParameters(format!(
            "rate fit needs at least 4 distinct N values, got {}",
            ns.len()
        )));
    }
    region.validate()?;
    let points = region.points();
    let refs = reference_values(method, a, b, &points, settings)?;
    let scale = refs.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let mut errors = Vec::with_capacity(ns.len());
    for &n in &ns {
        let plan = Plan::new(method, a, b, n, settings.m_override)?;
        let sup = sup_against(&plan, method, &points, &refs, settings.execution)?;
        if sup.value <= 4.0 * f64::EPSILON * scale {
            return Err(Error::NonFittable(format!(
                "sup error {:e} at N = {n} is at rounding level; the expansion is already exact",
                sup.value
            )));
        }
        errors.push(sup.value);
    }
    let (expected, r) = expected_slope(method, a, b)?;
    let (slope, intercept, r_squared) = fit_log_log(&ns, &errors, r)?;
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        expected_slope: expected,
        n_values: ns,
        sup_errors: errors,
    })
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub z: Complex64,
    pub method: Method,
    pub n_terms: usize,
    pub value: Complex64,
    pub reference: Complex64,
    pub abs_err: f64,
    /// `abs_err / H(z)` for the Kummer-type methods, `abs_err` otherwise.
    pub weighted_err: f64,
}

/// Every grid point for every `N`, in (N, grid) order.
pub fn sweep(
    method: Method,
    a: &[Complex64],
    b: &[Complex64],
    region: &RegionSpec,
    n_list: &[usize],
    settings: &Settings,
) -> Result<Vec<SweepRecord>> {
    region.validate()?;
    sweep_points(method, a, b, &region.points(), n_list, settings)
}

/// As [`sweep`] on an explicit list of points.
pub fn sweep_points(
    method: Method,
    a: &[Complex64],
    b: &[Complex64],
    points: &[Complex64],
    n_list: &[usize],
    settings: &Settings,
) -> Result<Vec<SweepRecord>> {
    let refs = reference_values(method, a, b, points, settings)?;
    let pairs: Vec<(Complex64, Complex64)> =
        points.iter().copied().zip(refs.iter().copied()).collect();
    let mut out = Vec::with_capacity(points.len() * n_list.len());
    for &n in n_list {
        let plan = Plan::new(method, a, b, n, settings.m_override)?;
        let rows = map_points(
            &pairs.iter().map(|p| p.0).collect::<Vec<_>>(),
            settings.execution,
            |z| plan.eval(z),
        )?;
        for ((z, reference), res) in pairs.iter().copied().zip(rows) {
            let abs_err = (res.value - reference).norm();
            out.push(SweepRecord {
                z,
                method,
                n_terms: n,
                value: res.value,
                reference,
                abs_err,
                weighted_err: abs_err * error_weight(method, z),
            });
        }
    }
    Ok(out)
}
