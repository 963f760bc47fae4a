use edecay::decay::{fit_rate, write_traces_csv, DecayTrace, FitKind};
use edecay::density::io::{read_density_csv, read_samples_csv, write_density_csv, write_samples_csv};
use edecay::density::{AnalyticDensity, Grid1D, GridDensity1D, GridDensityNd, GridNd, IsoGaussianMixture, SampleCloud};
use edecay::exact_nd::{drift_decay_check, evolve_exact, ExactBackend, LinearFlow};
use edecay::fp1d::{FpModel1D, RunManifest, SolverConfig};
use edecay::metrics::{
    cramer_cdf, cramer_empirical, cramer_expectation, cramer_fourier, energy_alpha_mixture, energy_alpha_pairwise,
    energy_negative_fourier, energy_negative_order, gini, MetricConstants,
};
use proptest::prelude::*;

fn cloud(xs: &[f64]) -> SampleCloud<f64> {
    SampleCloud::from_1d(xs.to_vec()).unwrap()
}

fn points() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..40)
}

fn grid_density(values: &[f64], grid: Grid1D<f64>) -> GridDensity1D<f64> {
    GridDensity1D::normalized(grid, values.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cramer_symmetric_and_nonnegative(a in prop::collection::vec(0.01f64..1.0, 16), b in prop::collection::vec(0.01f64..1.0, 16)) {
        let grid = Grid1D::new(-2.0, 2.0, 16).unwrap();
        let (f, g) = (grid_density(&a, grid), grid_density(&b, grid));
        let fg = cramer_cdf(&f.cdf(), &g.cdf()).unwrap().value;
        let gf = cramer_cdf(&g.cdf(), &f.cdf()).unwrap().value;
        prop_assert!(fg >= 0.0);
        prop_assert!((fg - gf).abs() <= 1e-15);
        let four = cramer_fourier(&f, &g, None).unwrap().value;
        prop_assert!(four >= -1e-15);
    }

    #[test]
    fn energy_pairwise_symmetric_nonnegative(x in points(), y in points(), alpha in 0.1f64..1.9) {
        let (cx, cy) = (cloud(&x), cloud(&y));
        let a = energy_alpha_pairwise(&cx, &cy, alpha).unwrap().value;
        let b = energy_alpha_pairwise(&cy, &cx, alpha).unwrap().value;
        prop_assert!(a >= -1e-12 * (1.0 + a.abs()));
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn energy_scaling_law(x in points(), y in points(), alpha in 0.1f64..1.9, c in 0.1f64..10.0) {
        let (cx, cy) = (cloud(&x), cloud(&y));
        let base = energy_alpha_pairwise(&cx, &cy, alpha).unwrap().value;
        let scaled = energy_alpha_pairwise(&cx.scaled(c), &cy.scaled(c), alpha).unwrap().value;
        prop_assert!((scaled - c.powf(alpha) * base).abs() <= 1e-10 * (1.0 + scaled.abs()));
    }

    #[test]
    fn energy_of_order_one_is_twice_cramer(x in points(), y in points()) {
        let (cx, cy) = (cloud(&x), cloud(&y));
        let e = energy_alpha_pairwise(&cx, &cy, 1.0).unwrap().value;
        let c = cramer_expectation(&cx, &cy).unwrap().value;
        let steps = cramer_empirical(&cx, &cy).unwrap().value;
        prop_assert!((e - 2.0 * c).abs() <= 1e-12 * (1.0 + e.abs()));
        prop_assert!((c - steps).abs() <= 1e-10 * (1.0 + c.abs()));
    }

    #[test]
    fn gini_forms_agree(x in prop::collection::vec(0.0f64..10.0, 2..60)) {
        prop_assume!(x.iter().any(|v| *v > 0.0));
        let gi = gini(&cloud(&x)).unwrap();
        prop_assert!(gi.discrepancy <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&gi.value()));
    }

    #[test]
    fn two_term_bound_dominates(n in 2usize..4, alpha in 0.1f64..1.9, d1 in 0.01f64..10.0, e in 1e-6f64..10.0, s in -2.0f64..2.0) {
        let k = MetricConstants::new(n, alpha).unwrap();
        let r = k.optimal_radius(d1, e) * 10f64.powf(s);
        prop_assert!(k.two_term_bound(d1, e, r) >= k.optimized_bound(d1, e) * (1.0 - 1e-12));
    }

    #[test]
    fn semigroup_on_state_parameters(m in prop::collection::vec(-3.0f64..3.0, 1..4), v in 0.0f64..4.0, s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let state = IsoGaussianMixture::single(m, v).unwrap();
        for flow in [LinearFlow::Drift, LinearFlow::Heat, LinearFlow::FullFp] {
            let once = evolve_exact(flow, &state, s + t).unwrap();
            let twice = evolve_exact(flow, &evolve_exact(flow, &state, s).unwrap(), t).unwrap();
            let (a, b) = (&once.components()[0], &twice.components()[0]);
            prop_assert!((a.var - b.var).abs() <= 1e-12 * (1.0 + a.var));
            for (x, y) in a.mean.iter().zip(&b.mean) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
            }
        }
    }

    #[test]
    fn drift_decay_is_exactly_exponential(a in 0.2f64..3.0, alpha in 0.2f64..1.8, n in 1usize..4) {
        let mut p = vec![0.0; n];
        p[0] = a;
        let f = IsoGaussianMixture::single(vec![0.0; n], 0.0).unwrap();
        let g = IsoGaussianMixture::single(p, 0.0).unwrap();
        let times: Vec<f64> = (0..10).map(|k| 0.4 * k as f64).collect();
        let tr = drift_decay_check(alpha, &f, &g, &times, ExactBackend::Expectation).unwrap();
        let fit = fit_rate(&tr, FitKind::Exponential).unwrap();
        prop_assert!((fit.slope + alpha).abs() < 1e-9);
        prop_assert!(fit.rms < 1e-6);
    }

    #[test]
    fn mixture_energy_scaling(m in -2.0f64..2.0, v in 0.1f64..2.0, alpha in 0.2f64..1.8, c in 0.2f64..5.0) {
        let f = IsoGaussianMixture::single(vec![0.0, 0.0], 1.0).unwrap();
        let g = IsoGaussianMixture::single(vec![m, 0.0], v).unwrap();
        let e = energy_alpha_mixture(&f, &g, alpha).unwrap().value;
        let scale = |x: &IsoGaussianMixture| x.map_components(|mu, var| (mu.iter().map(|y| y * c).collect(), var * c * c));
        let es = energy_alpha_mixture(&scale(&f), &scale(&g), alpha).unwrap().value;
        prop_assert!((es - c.powf(alpha) * e).abs() <= 1e-9 * (1.0 + es.abs()));
    }

    #[test]
    fn density_csv_round_trip(values in prop::collection::vec(0.0f64..3.0, 8..40), lo in -5.0f64..0.0, w in 0.5f64..10.0) {
        prop_assume!(values.iter().sum::<f64>() > 0.1);
        let grid = Grid1D::new(lo, lo + w, values.len()).unwrap();
        let f = grid_density(&values, grid);
        let mut buf = Vec::new();
        write_density_csv(&f, &mut buf).unwrap();
        let back = read_density_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.values(), f.values());
        prop_assert!((back.grid().x_min() - lo).abs() <= 1e-12 * (1.0 + lo.abs()));
        prop_assert!((back.grid().x_max() - (lo + w)).abs() <= 1e-12 * (1.0 + (lo + w).abs()));
    }

    #[test]
    fn samples_csv_round_trip(x in points()) {
        let c = cloud(&x);
        let mut buf = Vec::new();
        write_samples_csv(&c, &mut buf).unwrap();
        let back = read_samples_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn model_and_analytic_serde_round_trip(sigma in 0.1f64..3.0, lambda in 0.1f64..3.0, m in -0.9f64..0.9, p in 1.1f64..4.0) {
        for model in [
            FpModel1D::ConstantDiffusion { sigma },
            FpModel1D::PorousMedium { p },
            FpModel1D::Wealth { sigma, lambda },
            FpModel1D::Opinion { lambda, m },
        ] {
            let s = serde_json::to_string(&model).unwrap();
            prop_assert_eq!(serde_json::from_str::<FpModel1D>(&s).unwrap(), model);
        }
        for d in [
            AnalyticDensity::beta_opinion(m, lambda).unwrap(),
            AnalyticDensity::barenblatt(p).unwrap(),
            AnalyticDensity::gaussian_1d(m, sigma).unwrap(),
        ] {
            let s = serde_json::to_string(&d).unwrap();
            prop_assert_eq!(serde_json::from_str::<AnalyticDensity>(&s).unwrap(), d);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn negative_order_nonnegative_and_backends_agree(seed_a in prop::collection::vec(0.05f64..1.0, 64), seed_b in prop::collection::vec(0.05f64..1.0, 64), alpha in 0.3f64..1.7) {
        let grid = GridNd::cube(Grid1D::new(-2.0, 2.0, 8).unwrap(), 2);
        let f: GridDensityNd<f64> = GridDensityNd::normalized(grid.clone(), seed_a).unwrap();
        let g: GridDensityNd<f64> = GridDensityNd::normalized(grid, seed_b).unwrap();
        let pairwise = energy_negative_order::<f64, _>(&f, &g, alpha).unwrap();
        let fourier = energy_negative_fourier(&f, &g, alpha, None).unwrap();
        prop_assert!(pairwise.value >= -1e-10);
        prop_assert!(fourier.value >= -1e-10);
        prop_assert!((pairwise.value - fourier.value).abs() <= pairwise.err + fourier.err + 1e-10);
    }
}

#[test]
fn manifest_and_trace_round_trip() {
    let model = FpModel1D::Opinion { lambda: 1.0, m: 0.2 };
    let cfg = SolverConfig {
        t_final: 0.2,
        stride: 50,
        ..SolverConfig::default()
    };
    let s = edecay::fp1d::FpSolver::with_default_grid(model, 128, cfg).unwrap();
    let snaps = s.evolve(&s.equilibrium::<f64>().unwrap()).unwrap();
    let m = RunManifest::new(model, cfg, *s.grid(), serde_json::json!({"kind": "equilibrium"}), &snaps);
    let text = serde_json::to_string(&m).unwrap();
    let back: RunManifest = serde_json::from_str(&text).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.config_hash.len(), 64);

    let f = IsoGaussianMixture::single(vec![0.0], 1.0).unwrap();
    let g = IsoGaussianMixture::single(vec![1.0], 1.0).unwrap();
    let tr = drift_decay_check(1.0, &f, &g, &[0.0, 0.5, 1.0], ExactBackend::Fourier).unwrap();
    let json = serde_json::to_string(&tr).unwrap();
    assert_eq!(serde_json::from_str::<DecayTrace>(&json).unwrap(), tr);
    let mut csv = Vec::new();
    write_traces_csv(std::slice::from_ref(&tr), &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("run_id,t,metric,alpha,value,err"));
    assert_eq!(lines.count(), 3);
}

fn in_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let grid = GridNd::cube(Grid1D::new(-3.0, 3.0, 24).unwrap(), 2);
    let a = IsoGaussianMixture::single(vec![0.3, -0.2], 0.5).unwrap();
    let b = IsoGaussianMixture::new(vec![(0.5, vec![-0.5, 0.0], 0.3), (0.5, vec![0.6, 0.4], 0.4)]).unwrap();
    let f: GridDensityNd<f64> = a.rasterize(&grid, 1e-3).unwrap();
    let g: GridDensityNd<f64> = b.rasterize(&grid, 1e-3).unwrap();
    let x = cloud(&(0..500).map(|i| (i as f64 * 0.37).sin() * 3.0).collect::<Vec<_>>());
    let y = cloud(&(0..400).map(|i| (i as f64 * 0.11).cos() * 2.0 + 0.5).collect::<Vec<_>>());
    let run = || {
        (
            energy_negative_order::<f64, _>(&f, &g, 1.0).unwrap().value,
            energy_negative_fourier(&f, &g, 1.0, None).unwrap().value,
            energy_alpha_pairwise(&x, &y, 0.7).unwrap().value,
        )
    };
    let one = in_pool(1, run);
    let one_again = in_pool(1, run);
    let four = in_pool(4, run);
    assert_eq!(one, one_again);
    for (p, q) in [(one.0, four.0), (one.1, four.1), (one.2, four.2)] {
        assert!((p - q).abs() <= 1e-12 * p.abs().max(1e-300), "{p} vs {q}");
    }
}

#[test]
fn solver_runs_are_deterministic() {
    let spec = edecay::decay::Experiment::Solver {
        model: FpModel1D::PorousMedium { p: 2.0 },
        initial: edecay::decay::InitialData::GaussianMixture {
            components: vec![(1.0, 0.2, 0.1)],
        },
        cells: 128,
        solver: SolverConfig {
            dt: 1e-2,
            t_final: 1.0,
            stride: 10,
            theta: 1.0,
        },
        metric: edecay::decay::TraceMetric::Cramer,
    };
    let a = in_pool(1, || edecay::decay::run_experiment(&spec).unwrap());
    let b = in_pool(4, || edecay::decay::run_experiment(&spec).unwrap());
    assert_eq!(a, b);
}
