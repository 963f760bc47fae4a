use edecay::density::AnalyticDensity;
use edecay::fp1d::{FpModel1D, FpSolver, SolverConfig};
use edecay::metrics::{cramer_cdf, cramer_expectation, energy_alpha_pairwise, gini};
use edecay::{Grid1D32, GridDensity1D32, SampleCloud32};

#[test]
fn metrics_in_single_precision() {
    let x = SampleCloud32::from_1d(vec![0.0, 1.0, 2.0, 4.0]).unwrap();
    let y = SampleCloud32::from_1d(vec![0.5, 3.0]).unwrap();
    let c = cramer_expectation(&x, &y).unwrap().value;
    let e = energy_alpha_pairwise(&x, &y, 1.0).unwrap().value;
    assert!((e - 2.0 * c).abs() < 1e-5);
    let u = SampleCloud32::from_1d((0..1000).map(|i| (i as f32 + 0.5) / 1000.0).collect()).unwrap();
    assert!((gini(&u).unwrap().value() - 1.0 / 3.0).abs() < 1e-4);

    let grid = Grid1D32::new(-6.0, 6.0, 512).unwrap();
    let f: GridDensity1D32 = AnalyticDensity::gaussian_1d(0.0, 1.0).unwrap().rasterize(&grid).unwrap();
    let g: GridDensity1D32 = AnalyticDensity::gaussian_1d(1.0, 1.0).unwrap().rasterize(&grid).unwrap();
    let d = cramer_cdf(&f.cdf(), &g.cdf()).unwrap().value;
    let d64 = {
        let grid = edecay::Grid1D64::new(-6.0, 6.0, 512).unwrap();
        let f: edecay::GridDensity1D64 = AnalyticDensity::gaussian_1d(0.0, 1.0).unwrap().rasterize(&grid).unwrap();
        let g: edecay::GridDensity1D64 = AnalyticDensity::gaussian_1d(1.0, 1.0).unwrap().rasterize(&grid).unwrap();
        cramer_cdf(&f.cdf(), &g.cdf()).unwrap().value
    };
    assert!((d as f64 - d64).abs() < 1e-4 * d64);
}

#[test]
fn solver_in_single_precision() {
    let cfg = SolverConfig {
        dt: 1e-3,
        t_final: 0.5,
        stride: 100,
        theta: 0.5,
    };
    let s = FpSolver::with_default_grid(FpModel1D::ConstantDiffusion { sigma: 1.0 }, 256, cfg).unwrap();
    let g = s.grid();
    let g32 = Grid1D32::new(g.x_min() as f32, g.x_max() as f32, g.n_cells()).unwrap();
    let f0: GridDensity1D32 = AnalyticDensity::gaussian_1d(1.0, 1.0).unwrap().rasterize(&g32).unwrap();
    let snaps = s.evolve(&f0).unwrap();
    let last = snaps.last().unwrap();
    assert!((last.density.mass() - 1.0).abs() < 1e-4);
    assert!(last.density.values().iter().all(|v| *v >= 0.0));
}
