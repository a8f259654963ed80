use pam_chaos::simplex::{
    ln_simplex_mixed_integral, ln_simplex_power_integral, mc_simplex_oracle, simplex_mixed_integral,
    simplex_power_integral, MixedExponents,
};
use pam_chaos::{Error, ExecMode};
use proptest::prelude::*;
use std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn volume_of_simplex() {
    // h = 0: t^n / n!
    let mut f = 1.0;
    for n in 1..=6 {
        f *= n as f64;
        assert!(rel(simplex_power_integral(n, 0.0, 2.0).unwrap(), 2f64.powi(n as i32) / f) < 1e-13);
    }
}

#[test]
fn half_exponent_values() {
    // Dirichlet: Gamma(1/2)^{n+1} / Gamma((n+1)/2)
    assert!(rel(simplex_power_integral(1, -0.5, 1.0).unwrap(), PI) < 1e-13);
    assert!(rel(simplex_power_integral(2, -0.5, 1.0).unwrap(), 2.0 * PI) < 1e-13);
    // Gamma(1/2)^4 / Gamma(2) = pi^2, times t^{3/2 - 1/2}
    assert!(rel(simplex_power_integral(3, -0.5, 4.0).unwrap(), PI * PI * 4.0) < 1e-13);
}

#[test]
fn first_order_mixed_is_beta_integral() {
    let (a, b, t) = (0.7f64, -0.3f64, 1.5f64);
    let e = MixedExponents::new(vec![a], vec![b], t).unwrap();
    // midpoint rule in s = t v^{1/(a+1)}, (t - s) = t w^{1/(b+1)} split at t/2
    let n = 2_000_000;
    let mut s = 0.0;
    for i in 0..n {
        let v = (i as f64 + 0.5) / n as f64;
        let x = 0.5 * t * v.powi(4);
        let jac = 0.5 * t * 4.0 * v.powi(3);
        s += jac * (x.powf(a) * (t - x).powf(b) + (t - x).powf(a) * x.powf(b));
    }
    s /= n as f64;
    assert!(rel(simplex_mixed_integral(&e), s) < 1e-7);
}

#[test]
fn rejects_bad_exponents() {
    assert!(matches!(simplex_power_integral(2, -1.0, 1.0), Err(Error::Domain(_))));
    assert!(simplex_power_integral(0, 0.5, 1.0).is_err());
    assert!(MixedExponents::new(vec![-1.2], vec![0.0], 1.0).is_err());
    assert!(MixedExponents::new(vec![0.0, 0.0], vec![0.0], 1.0).is_err());
    assert!(mc_simplex_oracle(1, |_| 1.0, 1.0, 10, 0, ExecMode::Sequential).is_err());
}

#[test]
fn large_order_stays_finite_in_log() {
    let l = ln_simplex_power_integral(400, -0.25, 3.0).unwrap();
    assert!(l.is_finite());
    assert_eq!(simplex_power_integral(400, -0.25, 3.0).unwrap(), l.exp());
}

#[test]
fn oracle_volume_and_modes() {
    let a = mc_simplex_oracle(3, |_| 1.0, 1.2, 20_000, 11, ExecMode::Parallel).unwrap();
    let b = mc_simplex_oracle(3, |_| 1.0, 1.2, 20_000, 11, ExecMode::Sequential).unwrap();
    assert_eq!(a, b);
    assert!(rel(a.estimate, 1.2f64.powi(3) / 6.0) < 1e-12);
    let c = mc_simplex_oracle(2, |s| s[0] * (1.0 - s[1]), 1.0, 200_000, 3, ExecMode::Parallel).unwrap();
    let e = MixedExponents::new(vec![1.0, 0.0], vec![0.0, 1.0], 1.0).unwrap();
    assert!((c.estimate - simplex_mixed_integral(&e)).abs() < 4.0 * c.stderr);
}

fn exps(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(-0.9f64..2.0, n),
        prop::collection::vec(-0.9f64..2.0, n),
    )
}

proptest! {
    #[test]
    fn power_is_mixed_special_case(n in 1usize..=5, h in -0.9f64..2.0, t in 0.2f64..3.0) {
        let mut a = vec![0.0; n];
        a[0] = h;
        let e = MixedExponents::new(a, vec![h; n], t).unwrap();
        let p = ln_simplex_power_integral(n, h, t).unwrap();
        prop_assert!((ln_simplex_mixed_integral(&e) - p).abs() < 1e-11 * (1.0 + p.abs()));
    }

    #[test]
    fn mixed_scales_with_t((a, b) in (1usize..=4).prop_flat_map(exps), t in 0.2f64..3.0) {
        let e1 = MixedExponents::new(a.clone(), b.clone(), 1.0);
        prop_assume!(e1.is_ok());
        let e1 = e1.unwrap();
        let et = MixedExponents::new(a, b, t).unwrap();
        let d = ln_simplex_mixed_integral(&et) - ln_simplex_mixed_integral(&e1);
        prop_assert!((d - e1.scaling_power() * t.ln()).abs() < 1e-11);
    }

    #[test]
    fn power_recursion(n in 2usize..=6, h in -0.9f64..2.0) {
        // peel off the last variable: I_n(t) = int_0^t I_{n-1}(s) (t - s)^h ds
        // = I_{n-1}(1) B((n-1)(h+1)+h+1, h+1)
        let lhs = ln_simplex_power_integral(n, h, 1.0).unwrap();
        let prev = ln_simplex_power_integral(n - 1, h, 1.0).unwrap();
        let a = (n - 1) as f64 * (h + 1.0) + h + 1.0;
        let lb = ln_beta(a, h + 1.0);
        prop_assert!((lhs - prev - lb).abs() < 1e-10);
    }

    #[test]
    fn integrand_matches_definition((a, b) in (1usize..=4).prop_flat_map(exps), raw in prop::collection::vec(0.01f64..0.99, 4)) {
        let n = a.len();
        let mut s: Vec<f64> = raw[..n].to_vec();
        s.sort_by(f64::total_cmp);
        let e = MixedExponents::new(a.clone(), b.clone(), 1.0);
        prop_assume!(e.is_ok());
        let e = e.unwrap();
        let mut v = 1.0;
        for i in 0..n {
            let next = if i + 1 < n { s[i + 1] } else { 1.0 };
            v *= s[i].powf(a[i]) * (next - s[i]).powf(b[i]);
        }
        prop_assert!((e.integrand(&s) - v).abs() <= 1e-12 * v.abs().max(1.0));
    }
}

/// `ln B(a, b)` through an independent Stirling `ln Gamma`.
fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma_ref(a) + ln_gamma_ref(b) - ln_gamma_ref(a + b)
}

/// Stirling series after shifting the argument above 20.
fn ln_gamma_ref(x: f64) -> f64 {
    let mut x = x;
    let mut acc = 0.0;
    while x < 20.0 {
        acc -= x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}
