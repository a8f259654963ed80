use pam_chaos::kernels::{
    fourier_chaos_kernel, fourier_heat_kernel, heat_kernel, kernel_energy_at_origin, physical_chain_kernel,
    symmetrized_fourier_chaos_kernel, weighted_kernel_energy, OrderedTimes,
};
use pam_chaos::measure::InitialMeasure;
use pam_chaos::params::{riesz_constants, SpatialParam};
use proptest::prelude::*;
use std::f64::consts::PI;

const GAMMA_QUARTER: f64 = 3.625_609_908_221_908;

/// Transform of the chain kernel for constant initial data, from the
/// increments `z_j = y_{j+1} - y_j`: `e^{-i x sum xi} prod_j e^{-gap_j |P_j|^2 / 2}`.
fn constant_data_kernel(t: f64, x: f64, times: &[f64], xis: &[f64]) -> (f64, f64) {
    let n = times.len();
    let mut p = 0.0;
    let mut lm = 0.0;
    for j in 0..n {
        p += xis[j];
        let next = if j + 1 < n { times[j + 1] } else { t };
        lm -= 0.5 * (next - times[j]) * p * p;
    }
    let ph = -x * xis.iter().sum::<f64>();
    (lm.exp() * ph.cos(), lm.exp() * ph.sin())
}

fn ordered(t: f64, raw: &[f64]) -> Option<Vec<f64>> {
    let mut s: Vec<f64> = raw.iter().map(|u| u * t).collect();
    s.sort_by(f64::total_cmp);
    if s.windows(2).any(|w| w[1] - w[0] < 1e-6) {
        return None;
    }
    Some(s)
}

#[test]
fn heat_kernel_normalization() {
    assert!((heat_kernel(1.0, &[0.0]) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-16);
    assert!((fourier_heat_kernel(2.0, &[1.0]) - (-1.0f64).exp()).abs() < 1e-16);
}

#[test]
fn dirac_first_order_closed_form() {
    let u0 = InitialMeasure::dirac(&[0.0]);
    let (t, s, x, xi) = (1.3f64, 0.4f64, 0.7f64, 1.1f64);
    let ord = OrderedTimes::new(t, vec![s]).unwrap();
    let v = fourier_chaos_kernel(&[x], &ord, &[vec![xi]], &u0).unwrap().value;
    let g = (-x * x / (2.0 * t)).exp() / (2.0 * PI * t).sqrt();
    let m = (-0.5 * s * (t - s) / t * xi * xi).exp();
    let ph = -xi * s * x / t;
    assert!((v.re - g * m * ph.cos()).abs() < 1e-15);
    assert!((v.im - g * m * ph.sin()).abs() < 1e-15);
}

#[test]
fn chain_kernel_first_order_is_product() {
    let u0 = InitialMeasure::gaussian(&[0.2], 0.5, 1.0).unwrap();
    let ord = OrderedTimes::new(1.0, vec![0.3]).unwrap();
    let v = physical_chain_kernel(&[0.1], &ord, &[vec![-0.4]], &u0).unwrap();
    let g = |var: f64, z: f64| (-z * z / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
    assert!((v - g(0.7, 0.5) * g(0.8, -0.6)).abs() < 1e-15);
}

#[test]
fn energy_at_origin_d1() {
    for t in [0.25f64, 1.0, 3.0] {
        let sp = SpatialParam::Regular { d: 1, alpha: 0.5 };
        let expect = GAMMA_QUARTER * t.powf(-0.25);
        assert!((kernel_energy_at_origin(t, &sp) - expect).abs() < 1e-12 * expect);
        let q = weighted_kernel_energy(t, &[0.0], &sp).unwrap();
        assert!((q - expect).abs() < 1e-8 * expect, "{q} vs {expect}");
    }
}

#[test]
fn shifted_energy_by_quadrature() {
    // int e^{-t (z + eta)^2} |z|^{-1/2} dz with z = +-u^2
    let (t, eta) = (0.8f64, 1.3f64);
    let n = 2_000_000;
    let umax = 4.0f64;
    let mut s = 0.0;
    for i in 0..n {
        let u = (i as f64 + 0.5) / n as f64 * umax;
        let z = u * u;
        s += 2.0 * ((-t * (z + eta).powi(2)).exp() + (-t * (z - eta).powi(2)).exp());
    }
    s *= umax / n as f64;
    let v = weighted_kernel_energy(t, &[eta], &SpatialParam::Regular { d: 1, alpha: 0.5 }).unwrap();
    assert!((v - s).abs() < 1e-8 * s, "{v} vs {s}");
}

#[test]
fn rough_energy_scaling() {
    let sp = SpatialParam::Rough { h: 0.3 };
    let a = weighted_kernel_energy(1.0, &[0.0], &sp).unwrap();
    let b = weighted_kernel_energy(4.0, &[0.0], &sp).unwrap();
    // |xi|^{1-2H} weight: energy scales like t^{-(1 + 1 - 2H)/2} = t^{-0.7}
    assert!((b / a - 4f64.powf(-0.7)).abs() < 1e-8);
    assert!((a - kernel_energy_at_origin(1.0, &sp)).abs() < 1e-8 * a);
}

proptest! {
    #[test]
    fn lebesgue_reduction(
        n in 1usize..=3,
        raw in prop::collection::vec(0.01f64..0.99, 3),
        xis in prop::collection::vec(-3.0f64..3.0, 3),
        t in 0.2f64..2.0,
        x in -2.0f64..2.0,
    ) {
        let Some(times) = ordered(t, &raw[..n]) else { return Ok(()) };
        let u0 = InitialMeasure::lebesgue(1, 1.0);
        let ord = OrderedTimes::new(t, times.clone()).unwrap();
        let xv: Vec<Vec<f64>> = xis[..n].iter().map(|v| vec![*v]).collect();
        let v = fourier_chaos_kernel(&[x], &ord, &xv, &u0).unwrap().value;
        let (re, im) = constant_data_kernel(t, x, &times, &xis[..n]);
        prop_assert!((v.re - re).abs() < 1e-10 && (v.im - im).abs() < 1e-10);
    }

    #[test]
    fn kernel_is_linear_in_initial_data(
        raw in prop::collection::vec(0.01f64..0.99, 2),
        xis in prop::collection::vec(-3.0f64..3.0, 2),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let Some(times) = ordered(1.0, &raw) else { return Ok(()) };
        let ord = OrderedTimes::new(1.0, times).unwrap();
        let xv: Vec<Vec<f64>> = xis.iter().map(|v| vec![*v]).collect();
        let u: InitialMeasure = format!("atom {a} 1").parse().unwrap();
        let v: InitialMeasure = format!("gauss {b} 0.3 -0.5").parse().unwrap();
        let s = u.add(&v).unwrap();
        let ks = fourier_chaos_kernel(&[0.2], &ord, &xv, &s).unwrap().value;
        let ku = fourier_chaos_kernel(&[0.2], &ord, &xv, &u).unwrap().value;
        let kv = fourier_chaos_kernel(&[0.2], &ord, &xv, &v).unwrap().value;
        prop_assert!((ks - ku - kv).norm() < 1e-14);
    }

    #[test]
    fn modulus_bounded_by_total_variation(
        raw in prop::collection::vec(0.01f64..0.99, 2),
        xis in prop::collection::vec(-3.0f64..3.0, 2),
        x in -2.0f64..2.0,
    ) {
        let Some(times) = ordered(1.0, &raw) else { return Ok(()) };
        let u0: InitialMeasure = "atom 1 1; atom -1 -1".parse().unwrap();
        let ord = OrderedTimes::new(1.0, times).unwrap();
        let xv: Vec<Vec<f64>> = xis.iter().map(|v| vec![*v]).collect();
        let v = fourier_chaos_kernel(&[x], &ord, &xv, &u0).unwrap().value;
        let wp = pam_chaos::measure::heat_evolve(&u0, 1.0, &[x]).unwrap().w_plus;
        prop_assert!(v.norm() <= wp * (1.0 + 1e-12));
    }

    #[test]
    fn symmetrization_permutes_pairs(
        raw in prop::collection::vec(0.01f64..0.99, 3),
        xis in prop::collection::vec(-3.0f64..3.0, 3),
    ) {
        let u0 = InitialMeasure::dirac(&[0.3]);
        let times: Vec<f64> = raw.clone();
        if ordered(1.0, &raw).is_none() { return Ok(()) }
        let xv: Vec<Vec<f64>> = xis.iter().map(|v| vec![*v]).collect();
        let a = symmetrized_fourier_chaos_kernel(1.0, &[0.1], &times, &xv, &u0).unwrap().value;
        let perm = [2usize, 0, 1];
        let pt: Vec<f64> = perm.iter().map(|&i| times[i]).collect();
        let px: Vec<Vec<f64>> = perm.iter().map(|&i| xv[i].clone()).collect();
        let b = symmetrized_fourier_chaos_kernel(1.0, &[0.1], &pt, &px, &u0).unwrap().value;
        prop_assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn riesz_energy_bounds(d in 1usize..=2, a in 0.05f64..0.95, t in 0.1f64..4.0, eta in 0.0f64..3.0) {
        let alpha = if d == 1 { a } else { 0.1 + 1.8 * a };
        let sp = SpatialParam::Regular { d, alpha };
        let mut e = vec![0.0; d];
        e[0] = eta;
        let v = weighted_kernel_energy(t, &e, &sp).unwrap();
        let zero = weighted_kernel_energy(t, &vec![0.0; d], &sp).unwrap();
        let rc = riesz_constants(d, alpha, t).unwrap();
        prop_assert!(v <= rc.k_bound * t.powf(-(d as f64 - alpha) / 2.0));
        prop_assert!(v <= zero * (1.0 + 1e-9));
    }
}
