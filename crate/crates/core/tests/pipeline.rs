mod common;

use ifsquad::harness::{preset, read_csv, run_convergence, write_csv, ExperimentConfig, KernelSpec, SmoothFunction};
use ifsquad::kernel_phi_t::{integrate_phi_t_at_fixed_point, integrate_phi_t_double};

use common::aitken;

fn dust_nodes(rho: f64, level: usize) -> Vec<[f64; 2]> {
    let shift = 1.0 - rho;
    let mut nodes = vec![[0.5, 0.5]];
    for _ in 0..level {
        nodes = nodes
            .iter()
            .flat_map(|&[x, y]| {
                [[0.0, 0.0], [shift, 0.0], [0.0, shift], [shift, shift]].map(|[a, b]| [rho * x + a, rho * y + b])
            })
            .collect();
    }
    nodes
}

fn naive_dust_double(rho: f64, t: f64, level: usize) -> f64 {
    let nodes = dust_nodes(rho, level);
    let w = 1.0 / nodes.len() as f64;
    let mut total = 0.0;
    for (i, p) in nodes.iter().enumerate() {
        for q in &nodes[i + 1..] {
            total += 2.0 * ((p[0] - q[0]).hypot(p[1] - q[1])).powf(-t);
        }
    }
    total * w * w
}

fn naive_dust_log(rho: f64, eta: [f64; 2], level: usize) -> f64 {
    let nodes = dust_nodes(rho, level);
    let w = 1.0 / nodes.len() as f64;
    nodes.iter().map(|p| w * ((p[0] - eta[0]).hypot(p[1] - eta[1])).ln()).sum::<f64>()
}

fn study() -> ExperimentConfig {
    ExperimentConfig::new("cantor(0.3)", KernelSpec::Helmholtz { k: 5.0, n: None, c_osc: None }, vec![2, 3, 4, 5])
        .with_reference_level(8)
}

#[test]
fn csv_round_trip_preserves_rows() {
    let report = run_convergence(&study()).unwrap();
    let mut buf = Vec::new();
    write_csv(&report, &mut buf).unwrap();
    let rows = read_csv(buf.as_slice()).unwrap();
    assert_eq!(rows, report.rows);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let mut one = study();
    one.threads = Some(1);
    let mut four = study();
    four.threads = Some(4);
    let (a, b) = (run_convergence(&one).unwrap(), run_convergence(&four).unwrap());
    assert_eq!(a.rows, b.rows);
}

#[test]
fn errors_decrease_along_a_study() {
    let report = run_convergence(&study()).unwrap();
    for pair in report.rows.windows(2) {
        assert!(pair[1].abs_err < pair[0].abs_err);
    }
}

#[test]
fn smooth_double_integral_matches_exact_value() {
    // ∫∫ 1 dμ dμ = μ(Γ)² = 1 for any normalised attractor.
    let kernel = KernelSpec::Smooth { function: SmoothFunction::One, c: None };
    let config = ExperimentConfig::new("vicsek", kernel, vec![1, 2]).with_exact(1.0, 0.0);
    let report = run_convergence(&config).unwrap();
    assert!(report.rows.iter().all(|r| r.abs_err < 1e-13));
}

#[test]
fn planar_dust_double_matches_naive_sums() {
    let (rho, t) = (0.25, 0.5);
    let a = preset("cantor-dust(1/4)").unwrap();
    let oracle = aitken(naive_dust_double(rho, t, 3), naive_dust_double(rho, t, 4), naive_dust_double(rho, t, 5));
    let value = integrate_phi_t_double(&a, t, 0.25f64.powi(5) * a.diam()).unwrap();
    assert!((value - oracle).abs() < 1e-5 * oracle.abs(), "{value} vs {oracle}");
}

#[test]
fn planar_dust_log_at_corner_matches_naive_sums() {
    let rho = 1.0 / 3.0;
    let a = preset("cantor-dust").unwrap();
    let oracle = aitken(
        naive_dust_log(rho, [0.0, 0.0], 5),
        naive_dust_log(rho, [0.0, 0.0], 6),
        naive_dust_log(rho, [0.0, 0.0], 7),
    );
    let value = integrate_phi_t_at_fixed_point(&a, 0.0, 3, rho.powi(6) * a.diam()).unwrap();
    assert!((value - oracle).abs() < 1e-9, "{value} vs {oracle}");
}
