use pam_chaos::measure::InitialMeasure;
use pam_chaos::params::{SpatialParam, TemporalParam};
use pam_chaos::spectral::bounds::per_term_majorant;
use pam_chaos::spectral::noise::{cache_path, cached_noise, load_noise, save_noise};
use pam_chaos::spectral::{
    build_grid, chaos_integral, chaos_variance, direct_chaos, sample_noise, truncated_solution, EngineConfig,
    FrequencyTimeGrid, GridConfig, NoiseDraw, Pairing, Simulator, TimeGrid, TimeRule, VarianceConfig,
};
use pam_chaos::Error;
use proptest::prelude::*;

const GAMMA_QUARTER: f64 = 3.625_609_908_221_908;
const GAMMA_0_7: f64 = 1.298_055_332_647_558;
const GAMMA_1_6: f64 = 0.893_515_349_287_690_3;

fn small_grid() -> FrequencyTimeGrid {
    build_grid(&GridConfig {
        xi_cutoff: 4.0,
        xi_cells: 8,
        tau_cutoff: 8.0,
        tau_cells: 8,
        ..GridConfig::default()
    })
    .unwrap()
}

fn tp() -> TemporalParam {
    TemporalParam::new(0.75).unwrap()
}

/// `E|I_1(t, x)|^2` for constant initial data: with `u = 2t - s - r` the
/// frequency integral is `cst (u/2)^{-beta}`, then `a = t - s = p`,
/// `b = t - r = p q` separates the time integral.
fn lebesgue_first_order(cst: f64, beta: f64, h0: f64, t: f64) -> f64 {
    let alpha_h0 = h0 * (2.0 * h0 - 1.0);
    let e = 2.0 * h0 - 2.0;
    let p_pow = e + 1.0 - beta;
    let p_int = t.powf(p_pow + 1.0) / (p_pow + 1.0);
    // 1 - q = w^m with m (2 H0 - 1) = 1 removes the endpoint singularity
    let m = 1.0 / (2.0 * h0 - 1.0);
    let n = 200_000;
    let mut q_int = 0.0;
    for i in 0..n {
        let w = (i as f64 + 0.5) / n as f64;
        let q = 1.0 - w.powf(m);
        q_int += m * ((1.0 + q) / 2.0).powf(-beta);
    }
    q_int /= n as f64;
    2.0 * alpha_h0 * cst * p_int * q_int
}

#[test]
fn first_order_variance_regular_lebesgue() {
    let u0 = InitialMeasure::lebesgue(1, 1.0);
    let sp = SpatialParam::Regular { d: 1, alpha: 0.5 };
    for t in [0.5, 1.0] {
        let v = chaos_variance(1, &sp, &tp(), t, 0.3, &u0, &VarianceConfig::default()).unwrap();
        let o = lebesgue_first_order(GAMMA_QUARTER, 0.25, 0.75, t);
        assert!((v - o).abs() < 1e-6 * o, "t={t}: {v} vs {o}");
    }
}

#[test]
fn first_order_variance_rough_lebesgue() {
    let u0 = InitialMeasure::lebesgue(1, 1.0);
    let sp = SpatialParam::Rough { h: 0.3 };
    let c_h = GAMMA_1_6 * (0.3 * std::f64::consts::PI).sin() / (2.0 * std::f64::consts::PI);
    let v = chaos_variance(1, &sp, &tp(), 1.0, 0.0, &u0, &VarianceConfig::default()).unwrap();
    let o = lebesgue_first_order(c_h * GAMMA_0_7, 0.7, 0.75, 1.0);
    assert!((v - o).abs() < 1e-6 * o, "{v} vs {o}");
}

#[test]
fn lebesgue_weight_scales_variance() {
    let sp = SpatialParam::Regular { d: 1, alpha: 0.5 };
    let cfg = VarianceConfig::default();
    let a = chaos_variance(1, &sp, &tp(), 1.0, 0.0, &InitialMeasure::lebesgue(1, 1.0), &cfg).unwrap();
    let b = chaos_variance(1, &sp, &tp(), 1.0, 0.0, &InitialMeasure::lebesgue(1, 3.0), &cfg).unwrap();
    assert!((b / a - 9.0).abs() < 1e-9);
}

#[test]
fn variance_below_majorant() {
    let cfg = VarianceConfig::default();
    for u0 in [InitialMeasure::lebesgue(1, 1.0), InitialMeasure::dirac(&[0.0])] {
        let wp = pam_chaos::measure::heat_evolve(&u0, 1.0, &[0.0]).unwrap().w_plus;
        for sp in [SpatialParam::Regular { d: 1, alpha: 0.5 }, SpatialParam::Rough { h: 0.3 }] {
            let v = chaos_variance(1, &sp, &tp(), 1.0, 0.0, &u0, &cfg).unwrap();
            let m = per_term_majorant(1, &sp, &tp(), 1.0).unwrap() * wp * wp;
            assert!(v <= m, "{sp:?}: {v} > {m}");
        }
    }
}

#[test]
fn engine_matches_direct_sum() {
    let grid = small_grid();
    let u0 = InitialMeasure::lebesgue(1, 1.0);
    let steps = 4;
    let sim = Simulator::new(&grid, &tp(), TimeGrid::new(1.0, steps).unwrap(), &u0, 3.0 * grid.xi.half_width).unwrap();
    let draw = sample_noise(&grid, 5);
    let st = sim.prepare(&draw).unwrap();
    for sp in [SpatialParam::Regular { d: 1, alpha: 0.5 }, SpatialParam::Rough { h: 0.3 }] {
        let f = sim.evaluate(&st, &sp, 3, &[1.0], &[0.2]).unwrap();
        for k in 1..=3 {
            let d = direct_chaos(k, &sp, &tp(), &grid, &draw, 1.0, 0.2, &u0, TimeRule::Midpoint { steps }, Pairing::FirstOrder)
                .unwrap();
            let e = f.term(k, 0, 0);
            assert!((d.re - e).abs() < 1e-9 * (1.0 + e.abs()), "k={k}: {} vs {e}", d.re);
            assert!(d.im.abs() < 1e-9 * (1.0 + e.abs()));
        }
    }
}

#[test]
fn homogeneous_in_noise() {
    let grid = small_grid();
    let u0 = InitialMeasure::dirac(&[0.0]);
    let sp = SpatialParam::Regular { d: 1, alpha: 0.5 };
    let w = sample_noise(&grid, 9);
    let w2 = w.add(&w).unwrap();
    let cfg = EngineConfig { time_steps: 8 };
    for k in 1..=3 {
        let a = chaos_integral(k, &sp, &tp(), &grid, &w, 1.0, 0.0, &u0, &cfg).unwrap().value;
        let b = chaos_integral(k, &sp, &tp(), &grid, &w2, 1.0, 0.0, &u0, &cfg).unwrap().value;
        assert!((b - 2f64.powi(k as i32) * a).abs() < 1e-10 * (1.0 + b.abs()), "k={k}");
    }
}

#[test]
fn zero_draw_and_truncation() {
    let grid = small_grid();
    let u0: InitialMeasure = "atom 1 1; atom -1 -1; lebesgue 0.5".parse().unwrap();
    let sp = SpatialParam::Rough { h: 0.3 };
    let cfg = EngineConfig { time_steps: 8 };
    let z = NoiseDraw::zeros(&grid);
    let w = pam_chaos::measure::heat_evolve(&u0, 1.0, &[0.4]).unwrap().w;
    assert_eq!(chaos_integral(2, &sp, &tp(), &grid, &z, 1.0, 0.4, &u0, &cfg).unwrap().value, 0.0);
    assert_eq!(truncated_solution(3, &sp, &tp(), &grid, &z, 1.0, 0.4, &u0, &cfg).unwrap(), w);
    assert_eq!(truncated_solution(0, &sp, &tp(), &grid, &sample_noise(&grid, 1), 1.0, 0.4, &u0, &cfg).unwrap(), w);
    let draw = sample_noise(&grid, 1);
    let u3 = truncated_solution(3, &sp, &tp(), &grid, &draw, 1.0, 0.4, &u0, &cfg).unwrap();
    let sim = Simulator::new(&grid, &tp(), TimeGrid::new(1.0, 8).unwrap(), &u0, 3.0 * grid.xi.half_width).unwrap();
    let f = sim.evaluate(&sim.prepare(&draw).unwrap(), &sp, 3, &[1.0], &[0.4]).unwrap();
    let parts: f64 = (1..=3).map(|k| f.term(k, 0, 0)).sum();
    assert!((u3 - w - parts).abs() < 1e-12 * (1.0 + u3.abs()));
}

#[test]
fn chaos_errors() {
    let grid = small_grid();
    let u0 = InitialMeasure::lebesgue(1, 1.0);
    let cfg = EngineConfig { time_steps: 8 };
    let w = sample_noise(&grid, 1);
    let bad = SpatialParam::Rough { h: 0.6 };
    assert!(matches!(
        chaos_integral(1, &bad, &tp(), &grid, &w, 1.0, 0.0, &u0, &cfg),
        Err(Error::Inadmissible(_))
    ));
    let sp = SpatialParam::Regular { d: 1, alpha: 0.5 };
    assert!(matches!(
        chaos_integral(4, &sp, &tp(), &grid, &w, 1.0, 0.0, &u0, &cfg),
        Err(Error::Capacity(_))
    ));
    assert!(chaos_integral(0, &sp, &tp(), &grid, &w, 1.0, 0.0, &u0, &cfg).is_err());
    assert!(matches!(
        chaos_variance(3, &sp, &tp(), 1.0, 0.0, &u0, &VarianceConfig::default()),
        Err(Error::Capacity(_))
    ));
}

#[test]
fn sample_moments_of_noise() {
    let grid = small_grid();
    let n = grid.cell_count();
    let mut second = 0.0;
    let mut pseudo = num_complex::Complex64::new(0.0, 0.0);
    let draws = 400;
    for s in 0..draws {
        let w = sample_noise(&grid, s);
        for c in 0..n / 2 {
            second += w.values()[c].norm_sqr();
            pseudo += w.values()[c] * w.values()[c];
        }
    }
    let m = (draws as f64) * (n / 2) as f64;
    let cm = grid.cell_measure();
    assert!((second / m / cm - 1.0).abs() < 0.02, "{}", second / m / cm);
    assert!(pseudo.norm() / m / cm < 0.02);
}

#[test]
fn cache_round_trip() {
    let grid = small_grid();
    let dir = tempfile::tempdir().unwrap();
    let a = cached_noise(dir.path(), &grid, 42).unwrap();
    assert!(cache_path(dir.path(), &grid, 42).exists());
    let b = cached_noise(dir.path(), &grid, 42).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, sample_noise(&grid, 42));
    let p = dir.path().join("x.bin");
    save_noise(&a, &p).unwrap();
    let other = build_grid(&GridConfig { xi_cells: 16, ..GridConfig::default() }).unwrap();
    assert!(load_noise(&p, &other, 42).is_err());
    assert!(load_noise(&p, &grid, 43).is_err());
    std::fs::write(&p, b"garbage").unwrap();
    assert!(load_noise(&p, &grid, 42).is_err());
}

#[test]
fn orthogonality_and_zero_mean() {
    let grid = small_grid();
    let u0 = InitialMeasure::lebesgue(1, 1.0);
    let sp = SpatialParam::Regular { d: 1, alpha: 0.5 };
    let sim = Simulator::new(&grid, &tp(), TimeGrid::new(1.0, 8).unwrap(), &u0, 2.0 * grid.xi.half_width).unwrap();
    let n = 2000;
    let (mut i1, mut i2, mut i12, mut v1, mut v2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for s in 0..n {
        let st = sim.prepare(&sample_noise(&grid, 1000 + s)).unwrap();
        let f = sim.evaluate(&st, &sp, 2, &[1.0], &[0.0]).unwrap();
        let (a, b) = (f.term(1, 0, 0), f.term(2, 0, 0));
        i1 += a;
        i2 += b;
        i12 += a * b;
        v1 += a * a;
        v2 += b * b;
    }
    let nf = n as f64;
    let (s1, s2) = ((v1 / nf).sqrt(), (v2 / nf).sqrt());
    assert!((i1 / nf).abs() < 4.0 * s1 / nf.sqrt());
    assert!((i2 / nf).abs() < 4.0 * s2 / nf.sqrt());
    assert!((i12 / nf).abs() < 4.0 * s1 * s2 / nf.sqrt());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn noise_is_hermitian(seed in any::<u64>()) {
        let grid = small_grid();
        let w = sample_noise(&grid, seed);
        prop_assert_eq!(w.hermitian_defect(), 0.0);
        let n = w.values().len();
        for c in 0..n {
            prop_assert_eq!(w.values()[w.mirror(c)], w.values()[c].conj());
        }
    }

    #[test]
    fn terms_are_real_and_additive_in_initial_data(seed in 0u64..1000, x in -1.0f64..1.0) {
        let grid = small_grid();
        let sp = SpatialParam::Rough { h: 0.35 };
        let cfg = EngineConfig { time_steps: 8 };
        let w = sample_noise(&grid, seed);
        let u: InitialMeasure = "atom 0.5 1".parse().unwrap();
        let v: InitialMeasure = "gauss -0.5 0.2 2".parse().unwrap();
        let s = u.add(&v).unwrap();
        for k in 1..=2 {
            let a = chaos_integral(k, &sp, &tp(), &grid, &w, 1.0, x, &u, &cfg).unwrap().value;
            let b = chaos_integral(k, &sp, &tp(), &grid, &w, 1.0, x, &v, &cfg).unwrap().value;
            let c = chaos_integral(k, &sp, &tp(), &grid, &w, 1.0, x, &s, &cfg).unwrap().value;
            prop_assert!((c - a - b).abs() < 1e-10 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn grid_hash_tracks_config(cells in 4usize..40, cutoff in 1.0f64..20.0) {
        let a = build_grid(&GridConfig { xi_cells: 2 * cells, xi_cutoff: cutoff, ..GridConfig::default() }).unwrap();
        let b = build_grid(&GridConfig { xi_cells: 2 * cells + 2, xi_cutoff: cutoff, ..GridConfig::default() }).unwrap();
        prop_assert_ne!(a.hash(), b.hash());
        prop_assert_eq!(a.hash(), build_grid(&GridConfig { xi_cells: 2 * cells, xi_cutoff: cutoff, ..GridConfig::default() }).unwrap().hash());
    }
}
