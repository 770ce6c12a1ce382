mod common;

use approx::assert_abs_diff_eq;
use fracrisk::specfun::{beta_fn, inc_beta, mlf, mlf3, rl_derivative, MlfArgs, SeriesControl};
use fracrisk::Error;
use proptest::prelude::*;
use statrs::function::gamma::gamma;

#[test]
fn exponential_on_unit_parameters() {
    let ctl = SeriesControl::default();
    for i in 0..=1000 {
        let z = -5.0 + i as f64 * 0.01;
        let v = mlf3(&MlfArgs::new(1.0, 1.0, 1.0, z), &ctl).unwrap();
        assert_abs_diff_eq!(v, z.exp(), epsilon = 1e-10);
    }
}

#[test]
fn half_order_against_erfc_quadrature() {
    let ctl = SeriesControl::default();
    for x in [0.5, 1.0, 2.0] {
        let v = mlf(0.5, -x, &ctl).unwrap();
        assert_abs_diff_eq!(v, common::scaled_erfc(x), epsilon = 1e-8);
    }
}

#[test]
fn three_parameter_series_matches_direct_sum() {
    // E^2_{0.7,1.3}(z) = Σ (2)_n z^n / (n! Γ(0.7n + 1.3))
    let ctl = SeriesControl::default();
    for z in [-1.5, -0.3, 0.0, 0.8, 2.0] {
        let mut direct = 0.0;
        let mut poch = 1.0;
        let mut fact = 1.0;
        for n in 0..80 {
            if n > 0 {
                poch *= 1.0 + n as f64;
                fact *= n as f64;
            }
            direct += poch * f64::powi(z, n) / (fact * gamma(0.7 * n as f64 + 1.3));
        }
        let v = mlf3(&MlfArgs::new(2.0, 0.7, 1.3, z), &ctl).unwrap();
        assert_abs_diff_eq!(v, direct, epsilon = 1e-11 * direct.abs().max(1.0));
    }
}

#[test]
fn beta_function_against_quadrature() {
    let q = common::inc_beta_quad(0.5, 1.5, 1.0);
    assert_abs_diff_eq!(q, std::f64::consts::FRAC_PI_2, epsilon = 1e-9);
    assert_abs_diff_eq!(beta_fn(0.5, 1.5).unwrap(), q, epsilon = 1e-9);
    assert_abs_diff_eq!(beta_fn(2.0, 3.0).unwrap(), 1.0 / 12.0, epsilon = 1e-14);
}

#[test]
fn incomplete_beta_against_quadrature() {
    for (a, b, x) in [(0.6, 1.6, 0.5), (0.3, 2.5, 0.2), (1.7, 1.7, 0.9)] {
        let v = inc_beta(a, b, x).unwrap();
        assert_abs_diff_eq!(v, common::inc_beta_quad(a, b, x), epsilon = 1e-10);
    }
}

#[test]
fn incomplete_beta_plus_tail_is_complete() {
    let (a, b, x) = (0.6, 1.6, 0.35);
    let tail = common::integrate(
        &|u: f64| u.powf(a - 1.0) * (1.0 - u).powf(b - 1.0),
        x,
        1.0,
        1e-13,
    );
    assert_abs_diff_eq!(
        inc_beta(a, b, x).unwrap() + tail,
        beta_fn(a, b).unwrap(),
        epsilon = 1e-10
    );
}

#[test]
fn derivative_of_power_converges_first_order() {
    // D^q t = t^{1-q} / Γ(2-q)
    let q = 0.6;
    let exact = 1.0 / gamma(2.0 - q);
    let err = |h: f64| {
        let n = (1.0 / h).round() as usize;
        let xs: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let d = rl_derivative(&xs, q, h).unwrap();
        (d[n] - exact).abs()
    };
    let (e1, e2) = (err(0.01), err(0.005));
    assert!(e1 < 0.05, "{e1}");
    assert!(e1 / e2 > 1.8, "ratio {}", e1 / e2);
}

#[test]
fn large_negative_argument_is_refused() {
    let r = mlf(0.5, -40.0, &SeriesControl::default());
    assert!(matches!(r, Err(Error::PrecisionLoss { .. })), "{r:?}");
}

proptest! {
    #[test]
    fn mittag_leffler_decreases_on_negative_axis(beta in 0.5f64..1.0, x in 0.0f64..2.5) {
        let ctl = SeriesControl::default();
        let a = mlf(beta, -x, &ctl).unwrap();
        let b = mlf(beta, -x - 0.1, &ctl).unwrap();
        prop_assert!(a > b && b > 0.0 && a <= 1.0);
    }

    #[test]
    fn incomplete_beta_is_monotone(a in 0.2f64..3.0, b in 0.2f64..3.0, x in 0.0f64..0.95) {
        let lo = inc_beta(a, b, x).unwrap();
        let hi = inc_beta(a, b, x + 0.05).unwrap();
        prop_assert!(hi >= lo);
        prop_assert!(hi <= beta_fn(a, b).unwrap() * (1.0 + 1e-12));
    }
}
