use unifex::numkernel::{pochhammer, real_params};
use unifex::refseries::{
    decompose_shift, gauss2f1_neg1, hyp_eval, hyp_series, kummer_m, kummer_m_direct, DEFAULT_TOL,
};
use unifex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(x: Complex64, y: Complex64) -> f64 {
    (x - y).norm() / y.norm()
}

#[test]
fn partial_sums_match_pochhammer_terms() {
    let a = vec![c(1.3, 0.2), c(2.5, 0.0)];
    let b = vec![c(1.7, -0.4), c(3.2, 0.1)];
    let z = c(2.0, 0.5);
    let mut direct = c(0.0, 0.0);
    let mut fact = 1.0;
    for k in 0..=30usize {
        if k > 0 {
            fact *= k as f64;
        }
        let num: Complex64 = a.iter().map(|&x| pochhammer(x, k)).product();
        let den: Complex64 = b.iter().map(|&x| pochhammer(x, k)).product();
        direct += num / den * z.powu(k as u32) / fact;
        let partial = hyp_series(&a, &b, z, 0.0, k + 1).unwrap();
        assert!(rel(partial.value, direct) <= 1e-13, "k = {k}");
    }
}

#[test]
fn series_examples() {
    let (a, b) = (real_params(&[3.0]), real_params(&[3.5, 5.0]));
    assert_eq!(
        hyp_eval(&a, &b, c(0.0, 0.0), DEFAULT_TOL).unwrap(),
        c(1.0, 0.0)
    );
    let v = hyp_eval(&a, &b, c(-0.25, 0.0), DEFAULT_TOL).unwrap();
    assert!((v.re - 0.957_927_980_264_305_4).abs() < 1e-14);
    assert_eq!(
        hyp_eval(&[], &real_params(&[1.0]), c(0.0, 0.0), DEFAULT_TOL).unwrap(),
        c(1.0, 0.0)
    );
}

#[test]
fn kummer_examples() {
    let m = kummer_m(c(1.0, 0.0), c(2.0, 0.0), c(-1.0, 0.0)).unwrap();
    assert!((m.re - (1.0 - (-1f64).exp())).abs() < 1e-15);
    assert_eq!(
        kummer_m(c(0.3, 1.0), c(2.5, 0.0), c(0.0, 0.0)).unwrap(),
        c(1.0, 0.0)
    );
    let z = c(-5.0, 0.0);
    let direct = hyp_series(&[c(1.0, 0.0)], &[c(3.5, 0.0)], z, DEFAULT_TOL, 10_000)
        .unwrap()
        .value;
    assert!(rel(kummer_m(c(1.0, 0.0), c(3.5, 0.0), z).unwrap(), direct) < 1e-13);
}

#[test]
fn kummer_transformation_overlap_band() {
    for (a, b) in [
        (c(1.0, 0.0), c(3.5, 0.0)),
        (c(1.5, 0.5), c(4.0, -1.0)),
        (c(0.7, 0.0), c(2.2, 0.0)),
    ] {
        for k in 0..=20 {
            let z = c(-35.0 + 0.5 * k as f64, 0.3 * (k % 3) as f64);
            let plain = kummer_m_direct(a, b, z, DEFAULT_TOL).unwrap();
            let transformed = z.exp() * kummer_m_direct(b - a, b, -z, DEFAULT_TOL).unwrap();
            assert!(rel(plain, transformed) <= 1e-9, "a = {a}, b = {b}, z = {z}");
        }
    }
}

#[test]
fn gauss_at_minus_one() {
    assert_eq!(
        gauss2f1_neg1(c(0.4, 0.2), 0, c(3.0, 0.0)).unwrap(),
        c(1.0, 0.0)
    );
    assert_eq!(
        gauss2f1_neg1(c(0.0, 0.0), 7, c(3.0, 0.0)).unwrap(),
        c(1.0, 0.0)
    );
    let v = gauss2f1_neg1(c(-1.0, 0.0), 1, c(1.5, 0.0)).unwrap();
    assert!((v.re - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn decomposition_examples() {
    let (a, b) = (real_params(&[3.0]), real_params(&[3.5, 5.0]));
    let d = decompose_shift(&a, &b, c(0.0, 0.0), 1).unwrap();
    assert_eq!(d.combine(c(42.0, 0.0)), c(1.0, 0.0));
    let d = decompose_shift(
        &real_params(&[-0.5]),
        &real_params(&[1.5, 2.0]),
        c(1.0, 0.0),
        1,
    )
    .unwrap();
    assert!(d.upper.iter().all(|x| x.re > 0.0), "{:?}", d.upper);
}
