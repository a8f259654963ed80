use pam_chaos::measure::{
    check_integrability, heat_evolve, oscillatory_heat_integral, Atom, GaussComponent, InitialMeasure,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn gauss_density(var: f64, z: f64) -> f64 {
    (-z * z / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

#[test]
fn dirac_evolves_to_heat_kernel() {
    let u = InitialMeasure::dirac(&[0.5]);
    for (t, x) in [(0.1, 0.0), (1.0, 1.3), (2.0, -0.7)] {
        let h = heat_evolve(&u, t, &[x]).unwrap();
        assert!((h.w - gauss_density(t, x - 0.5)).abs() < 1e-15);
        assert_eq!(h.w, h.w_plus);
    }
}

#[test]
fn dirac_in_two_dimensions() {
    let u = InitialMeasure::dirac(&[0.0, 0.0]);
    let h = heat_evolve(&u, 0.5, &[0.3, -0.4]).unwrap();
    let expect = gauss_density(0.5, 0.3) * gauss_density(0.5, -0.4);
    assert!((h.w - expect).abs() < 1e-15);
}

#[test]
fn gaussian_component_adds_variance() {
    let u = InitialMeasure::gaussian(&[1.0], 0.3, 2.0).unwrap();
    let h = heat_evolve(&u, 0.7, &[0.2]).unwrap();
    assert!((h.w - 2.0 * gauss_density(1.0, -0.8)).abs() < 1e-14);
}

#[test]
fn lebesgue_is_invariant() {
    let u = InitialMeasure::lebesgue(1, 1.7);
    for t in [0.01, 1.0, 5.0] {
        assert!((heat_evolve(&u, t, &[3.0]).unwrap().w - 1.7).abs() < 1e-15);
    }
}

#[test]
fn dipole_cancels_at_midpoint() {
    let u: InitialMeasure = "atom 1 1; atom -1 -1".parse().unwrap();
    let h = heat_evolve(&u, 1.0, &[0.0]).unwrap();
    assert!(h.w.abs() < 1e-16);
    assert!((h.w_plus - 2.0 * gauss_density(1.0, 1.0)).abs() < 1e-15);
}

#[test]
fn oscillatory_integral_matches_quadrature() {
    let u: InitialMeasure = "gauss 0.4 0.5 1.5; atom -0.3 0.8".parse().unwrap();
    let (t, x, c) = (0.6f64, 0.2f64, 1.7f64);
    // atom part in closed form, gaussian part by the midpoint rule
    let mut re = 0.8 * gauss_density(t, x + 0.3) * (c * 0.3).cos();
    let mut im = 0.8 * gauss_density(t, x + 0.3) * (c * 0.3).sin();
    let n = 200_000;
    let (lo, hi) = (-12.0, 12.0);
    let dy = (hi - lo) / n as f64;
    for i in 0..n {
        let y = lo + (i as f64 + 0.5) * dy;
        let f = gauss_density(t, x - y) * 1.5 * gauss_density(0.5, y - 0.4) * dy;
        re += f * (c * y).cos();
        im -= f * (c * y).sin();
    }
    let v = oscillatory_heat_integral(&u, t, &[x], &[c]).unwrap();
    assert!((v.re - re).abs() < 1e-9 && (v.im - im).abs() < 1e-9, "{v} vs {re} {im}");
}

#[test]
fn integrability_witness() {
    let u: InitialMeasure = "atom 0 1; gauss 1 1 -2; lebesgue 0.5".parse().unwrap();
    let w = check_integrability(&u);
    assert!(w.integrable);
    // e^{-|x|^2} against |u0|: 1 + 2 E e^{-X^2} (X ~ N(1, 1)) + 0.5 sqrt(pi)
    let gauss_part = 2.0 * (-1.0f64 / 3.0).exp() / 3f64.sqrt();
    let expect = 1.0 + gauss_part + 0.5 * PI.sqrt();
    assert!((w.value - expect).abs() < 1e-12, "{} vs {expect}", w.value);
}

#[test]
fn construction_rejects_bad_components() {
    assert!(InitialMeasure::new(1, vec![], vec![], None).is_err());
    assert!(InitialMeasure::new(
        1,
        vec![Atom { loc: vec![0.0, 1.0], weight: 1.0 }],
        vec![],
        None
    )
    .is_err());
    assert!(InitialMeasure::new(
        1,
        vec![],
        vec![GaussComponent { mean: vec![0.0], sigma2: 0.0, weight: 1.0 }],
        None
    )
    .is_err());
    assert!(InitialMeasure::new(4, vec![], vec![], Some(1.0)).is_err());
}

fn measure_strategy() -> impl Strategy<Value = InitialMeasure> {
    (
        prop::collection::vec((-3.0f64..3.0, -2.0f64..2.0), 0..4),
        prop::collection::vec((-3.0f64..3.0, 0.05f64..2.0, -2.0f64..2.0), 0..3),
        prop::option::of(-2.0f64..2.0),
    )
        .prop_filter("non-empty", |(a, g, l)| !a.is_empty() || !g.is_empty() || l.is_some())
        .prop_map(|(a, g, l)| {
            InitialMeasure::new(
                1,
                a.into_iter().map(|(loc, weight)| Atom { loc: vec![loc], weight }).collect(),
                g.into_iter()
                    .map(|(m, s, weight)| GaussComponent { mean: vec![m], sigma2: s, weight })
                    .collect(),
                l,
            )
            .unwrap()
        })
}

proptest! {
    #[test]
    fn text_round_trip(u in measure_strategy()) {
        let back: InitialMeasure = u.to_text().parse().unwrap();
        prop_assert_eq!(back, u);
    }

    #[test]
    fn evolution_dominated_by_total_variation(u in measure_strategy(), t in 0.05f64..3.0, x in -4.0f64..4.0) {
        let h = heat_evolve(&u, t, &[x]).unwrap();
        prop_assert!(h.w.abs() <= h.w_plus * (1.0 + 1e-12) + 1e-300);
        let jordan = heat_evolve(&u.positive_part(), t, &[x]).unwrap().w
            - heat_evolve(&u.negative_part(), t, &[x]).unwrap().w;
        prop_assert!((jordan - h.w).abs() <= 1e-12 * h.w_plus.max(1.0));
    }

    #[test]
    fn evolution_is_linear(u in measure_strategy(), v in measure_strategy(), t in 0.05f64..3.0, x in -4.0f64..4.0) {
        let s = u.add(&v).unwrap();
        let lhs = heat_evolve(&s, t, &[x]).unwrap().w;
        let rhs = heat_evolve(&u, t, &[x]).unwrap().w + heat_evolve(&v, t, &[x]).unwrap().w;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn semigroup(u in measure_strategy(), s in 0.05f64..2.0, t in 0.05f64..2.0, x in -4.0f64..4.0) {
        let a = heat_evolve(&u.evolved(s).unwrap(), t, &[x]).unwrap().w;
        let b = heat_evolve(&u, s + t, &[x]).unwrap().w;
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }

    #[test]
    fn oscillatory_at_zero_frequency_is_evolution(u in measure_strategy(), t in 0.05f64..3.0, x in -4.0f64..4.0) {
        let v = oscillatory_heat_integral(&u, t, &[x], &[0.0]).unwrap();
        let w = heat_evolve(&u, t, &[x]).unwrap().w;
        prop_assert!(v.im.abs() < 1e-14);
        prop_assert!((v.re - w).abs() <= 1e-12 * (1.0 + w.abs()));
    }
}
