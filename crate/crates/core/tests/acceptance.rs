//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unifex::besselexp::{BesselPlan, Method};
use unifex::errormodel::{fit_rate, sup_errors, RegionSpec, Settings};
use unifex::extended::Dd;
use unifex::norlund::{moment_identity_residual, norlund_coeffs, norlund_explicit, pole_analysis};
use unifex::numkernel::real_params;
use unifex::refseries::{decompose_shift, hyp_eval};
use unifex::Complex64;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn bessel_params() -> (Vec<Complex64>, Vec<Complex64>) {
    (real_params(&[3.0]), real_params(&[3.5, 5.0]))
}

fn kummer_params() -> (Vec<Complex64>, Vec<Complex64>) {
    (real_params(&[1.0, 1.5]), real_params(&[2.0, 3.0]))
}

fn golden_value() -> Outcome {
    let (a, b) = bessel_params();
    let start = Instant::now();
    let r = BesselPlan::new(&a, &b, 2).and_then(|p| p.eval_elementary(Complex64::new(1e-3, 0.0)));
    let elapsed = start.elapsed().as_secs_f64();
    match r {
        Ok(r) => {
            let err = (r.value - 208.0 / 231.0).norm();
            outcome(
                err <= 1e-6 && elapsed < 1.0,
                format!("value {:.10}, |err| {err:.2e}, {elapsed:.3}s", r.value.re),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn closed_form(z: f64) -> f64 {
    let z = Dd::new(z);
    let z2 = z * z;
    let z4 = z2 * z2;
    let z6 = z4 * z2;
    let c = z * (z4 * 8.0 + z2 * 105.0 + Dd::new(-1890.0)) * 720.0;
    let s = (z6 + z4 * -15.0 + z2 * -735.0 + Dd::new(1890.0)) * 720.0;
    let mut z11 = Dd::ONE;
    for _ in 0..11 {
        z11 = z11 * z;
    }
    ((c * z.cos() + s * z.sin()) / z11).to_f64()
}

fn closed_form_equivalence() -> Outcome {
    let (a, b) = bessel_params();
    let plan = match BesselPlan::new(&a, &b, 2) {
        Ok(p) => p,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let z = 1.0 + 29.0 * i as f64 / 19.0;
        let exact = closed_form(z);
        match plan.eval_elementary(Complex64::new(z, 0.0)) {
            Ok(r) => worst = worst.max((r.value - exact).norm() / exact.abs()),
            Err(e) => return outcome(false, format!("z = {z}: {e}")),
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max relative error {worst:.2e} over 20 points"),
    )
}

fn bessel_kernel_oracle() -> Outcome {
    let (a, b) = bessel_params();
    let start = Instant::now();
    let region = RegionSpec::strip(2.0, (-40.0, 40.0), (41, 9)).expect("region");
    let ns = [2, 4, 8, 16, 32];
    let sups = match sup_errors(
        Method::BesselKernel,
        &a,
        &b,
        &region,
        &ns,
        &Settings::default(),
    ) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let errs: Vec<f64> = sups.iter().map(|s| s.value).collect();
    let monotone = errs.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    let last = errs[errs.len() - 1];
    let listed: Vec<String> = ns
        .iter()
        .zip(&errs)
        .map(|(n, e)| format!("N={n}: {e:.3e}"))
        .collect();
    outcome(
        last <= 1e-6 && monotone && elapsed < 10.0,
        format!(
            "{} (monotone: {monotone}), {elapsed:.2}s",
            listed.join(", ")
        ),
    )
}

fn kummer_kernel_oracle() -> Outcome {
    let (a, b) = kummer_params();
    let region = RegionSpec::real_segment((0.0, 50.0), 51).expect("region");
    let ns = [10, 20, 30, 50, 200];
    let errs: Vec<f64> = match sup_errors(
        Method::KummerKernel,
        &a,
        &b,
        &region,
        &ns,
        &Settings::default(),
    ) {
        Ok(s) => s.iter().map(|s| s.value).collect(),
        Err(e) => return outcome(false, e.to_string()),
    };
    let ordered = errs[0] > errs[1] && errs[1] > errs[2];
    let ratio = errs[3] / errs[4];
    let listed: Vec<String> = ns
        .iter()
        .zip(&errs)
        .map(|(n, e)| format!("N={n}: {e:.3e}"))
        .collect();
    outcome(
        ordered && ratio >= 2.0,
        format!("{}, N=50/N=200 ratio {ratio:.2}", listed.join(", ")),
    )
}

fn rate_fits() -> Outcome {
    let settings = Settings::default();
    let ns = [8, 16, 32, 64, 128];
    let (a, b) = bessel_params();
    let strip = RegionSpec::strip(2.0, (-40.0, 40.0), (41, 9)).expect("region");
    let bessel = fit_rate(Method::BesselKernel, &a, &b, &strip, &ns, &settings);
    let (ka, kb) = kummer_params();
    let half = RegionSpec::real_segment((0.0, 50.0), 51).expect("region");
    let kummer = fit_rate(Method::KummerKernel, &ka, &kb, &half, &ns, &settings);
    let alpha = pole_analysis(&ka[1..], &kb).map(|r| r.decay());
    match (bessel, kummer, alpha) {
        (Ok(bf), Ok(kf), Ok(alpha)) => {
            let bessel_ok = (-4.5..=-2.5).contains(&bf.slope);
            let kummer_ok = kf.slope <= -alpha + 1.0;
            outcome(
                bessel_ok && kummer_ok,
                format!(
                    "bessel slope {:.3} (expected {:.2}), kummer slope {:.3} (expected {:.2}, alpha {alpha})",
                    bf.slope, bf.expected_slope, kf.slope, kf.expected_slope
                ),
            )
        }
        (b, k, al) => outcome(
            false,
            format!("{:?} / {:?} / {:?}", b.err(), k.err(), al.err()),
        ),
    }
}

fn random_complex(rng: &mut ChaCha8Rng, re: (f64, f64), im: f64) -> Complex64 {
    Complex64::new(rng.random_range(re.0..re.1), rng.random_range(-im..im))
}

fn norlund_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let mut closed_worst: f64 = 0.0;
    let mut shift_worst: f64 = 0.0;
    for draw in 0..10 {
        let p = 2 + draw % 3;
        let a: Vec<Complex64> = (0..p - 1)
            .map(|_| random_complex(&mut rng, (0.5, 3.0), 1.0))
            .collect();
        let b: Vec<Complex64> = (0..p)
            .map(|_| random_complex(&mut rng, (1.0, 5.0), 1.0))
            .collect();
        let table = match norlund_coeffs(&a, &b, 31) {
            Ok(t) => t,
            Err(e) => return outcome(false, e.to_string()),
        };
        let g = match table.coeffs() {
            Ok(g) => g,
            Err(e) => return outcome(false, e.to_string()),
        };
        for (n, &gn) in g.iter().enumerate() {
            match norlund_explicit(&a, &b, n) {
                Ok(x) => closed_worst = closed_worst.max((gn - x).norm() / x.norm()),
                Err(e) => return outcome(false, e.to_string()),
            }
        }
        let alpha = Complex64::from_polar(
            rng.random_range(0.0..5.0),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        let a2: Vec<Complex64> = a.iter().map(|&x| x + alpha).collect();
        let b2: Vec<Complex64> = b.iter().map(|&x| x + alpha).collect();
        match norlund_coeffs(&a2, &b2, 31).and_then(|t| t.coeffs()) {
            Ok(g2) => {
                for (x, y) in g.iter().zip(&g2) {
                    shift_worst = shift_worst.max((x - y).norm() / x.norm());
                }
            }
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    let (a, b) = bessel_params();
    let residual = match moment_identity_residual(&a, &b, 0, 40) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    outcome(
        closed_worst <= 1e-10 && shift_worst <= 1e-10 && residual <= 1e-8,
        format!(
            "closed forms {closed_worst:.2e}, shift invariance {shift_worst:.2e}, moment residual {residual:.3e} (N=40)"
        ),
    )
}

fn decomposition_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = rng.random_range(1..=3);
        let q = rng.random_range(p - 1..=p);
        let a: Vec<Complex64> = (0..q)
            .map(|_| random_complex(&mut rng, (-2.0, 4.0), 2.0))
            .collect();
        let b: Vec<Complex64> = (0..p)
            .map(|_| random_complex(&mut rng, (0.5, 5.0), 2.0))
            .collect();
        let z = Complex64::from_polar(
            rng.random_range(0.0..5.0),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        let result = decompose_shift(&a, &b, z, 3).and_then(|d| {
            let shifted = hyp_eval(&d.upper, &d.lower, z, 1e-16)?;
            let direct = hyp_eval(&a, &b, z, 1e-16)?;
            Ok((direct - d.combine(shifted)).norm())
        });
        match result {
            Ok(e) => worst = worst.max(e),
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    outcome(
        worst <= 1e-11,
        format!("max |difference| {worst:.2e} over 100 draws"),
    )
}

fn read_figure_rows(path: &Path) -> Result<Vec<[f64; 5]>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().ok_or("empty file")?.split(',').collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or(format!("no column {name}"))
    };
    let idx = [
        col("val_re")?,
        col("val_im")?,
        col("ref_re")?,
        col("ref_im")?,
        col("abs_err")?,
    ];
    lines
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            let mut row = [0.0; 5];
            for (slot, &i) in row.iter_mut().zip(&idx) {
                *slot = cells[i]
                    .parse()
                    .map_err(|_| format!("bad cell {:?}", cells[i]))?;
            }
            Ok(row)
        })
        .collect()
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_unifex");
    let dirs = [
        tempfile::tempdir().expect("tempdir"),
        tempfile::tempdir().expect("tempdir"),
    ];
    for d in &dirs {
        let status = Command::new(bin)
            .arg("figures")
            .arg("--out-dir")
            .arg(d.path())
            .status();
        if !status.map(|s| s.success()).unwrap_or(false) {
            return outcome(false, "figures run failed".into());
        }
    }
    let mut rows = 0;
    let mut inconsistent = 0;
    for i in 1..=5 {
        let name = format!("fig{i}.csv");
        let x = std::fs::read(dirs[0].path().join(&name));
        let y = std::fs::read(dirs[1].path().join(&name));
        match (x, y) {
            (Ok(x), Ok(y)) if x == y => {}
            _ => return outcome(false, format!("{name} differs between runs")),
        }
        match read_figure_rows(&dirs[0].path().join(&name)) {
            Ok(r) => {
                for [vr, vi, rr, ri, err] in r {
                    rows += 1;
                    if (Complex64::new(vr, vi) - Complex64::new(rr, ri)).norm() != err {
                        inconsistent += 1;
                    }
                }
            }
            Err(e) => return outcome(false, format!("{name}: {e}")),
        }
    }
    outcome(
        inconsistent == 0,
        format!("5 files byte-identical, {rows} rows, {inconsistent} abs_err mismatches"),
    )
}

fn main() {
    let criteria: [(&str, Check); 8] = [
        ("golden value 208/231", golden_value),
        ("two-term closed form", closed_form_equivalence),
        ("bessel kernel vs oracle", bessel_kernel_oracle),
        ("kummer kernel vs oracle", kummer_kernel_oracle),
        ("rate fits", rate_fits),
        ("norlund coefficient suite", norlund_suite),
        ("decomposition identity", decomposition_identity),
        ("figures determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let r = check();
        if !r.pass {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {}",
            if r.pass { "PASS" } else { "FAIL" },
            i + 1,
            r.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
