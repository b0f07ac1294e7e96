use approx_c1::assembly::{
    apply_essential_bc, assemble, boundary_projection, solve, solve_spd, QuadratureRule, SolverKind,
};
use approx_c1::basis::{eval_global, C1Basis, PatchSpaces};
use approx_c1::cli::{
    emit_plot_script, report_csv, run, sweep, sweep_csv, PlotKind, RunConfig, RunError, SolutionKind, CSV_HEADER,
};
use approx_c1::geometry::{catalog, Side, TwoPatchDomain};
use approx_c1::gluing::{exact_gluing, project_gluing};
use approx_c1::problem::{CosineBump, ExactSolution};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::Command;

fn build(name: &str, p: usize, r: usize, level: u32) -> (TwoPatchDomain, C1Basis) {
    let d = catalog(name).unwrap();
    let g = exact_gluing(&d).unwrap();
    let n = 2usize.pow(level);
    let pt = (p - 2).max(2);
    let a = project_gluing(&g, pt, pt - 1, n, d.patch(Side::Left).space.v.pattern()).unwrap();
    let b = C1Basis::build(&d, &g, &a, PatchSpaces::new(&d, p, r, n).unwrap()).unwrap();
    (d, b)
}

fn bump_system(d: &TwoPatchDomain, b: &C1Basis, quad: &QuadratureRule) -> approx_c1::assembly::DiscreteSystem {
    let u = CosineBump;
    assemble(d, b, quad, |x, y| u.bilaplacian(x, y), |x, y| u.laplacian(x, y)).unwrap()
}

#[test]
fn homogeneous_data_gives_zero_solution() {
    let (d, b) = build("ex3", 3, 1, 3);
    let quad = QuadratureRule::new(&b);
    let sys = assemble(&d, &b, &quad, |_, _| 0.0, |_, _| 0.0).unwrap();
    let red = apply_essential_bc(&sys, &d, &b, &quad, |_, _| 0.0).unwrap();
    assert!(red.lifting.iter().all(|&c| c == 0.0));
    let x = solve(&red, SolverKind::Direct).unwrap();
    assert!(x.iter().all(|c| c.abs() < 1e-14));
}

#[test]
fn stiffness_is_symmetric_and_positive_definite_on_free_dofs() {
    let (d, b) = build("ex4", 3, 1, 2);
    let quad = QuadratureRule::new(&b);
    let sys = bump_system(&d, &b, &quad);
    assert!(sys.matrix.asymmetry() <= 1e-13 * sys.matrix.max_abs());
    let free = &b.dofs.free;
    let a = sys.matrix.submatrix(free, free);
    let dense = DMatrix::from_fn(free.len(), free.len(), |i, j| a.get(i, j));
    let eig = dense.symmetric_eigenvalues();
    assert!(eig.min() > 1e-10 * eig.max(), "{} {}", eig.min(), eig.max());
}

#[test]
fn discrete_solution_satisfies_galerkin_orthogonality() {
    let (d, b) = build("ex2", 3, 1, 3);
    let quad = QuadratureRule::new(&b);
    let sys = bump_system(&d, &b, &quad);
    let u = CosineBump;
    let red = apply_essential_bc(&sys, &d, &b, &quad, |x, y| u.eval(x, y).f).unwrap();
    let c = solve(&red, SolverKind::Direct).unwrap();
    let ac = sys.matrix.matvec(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let scale: f64 = sys.load.iter().map(|x| x.abs()).sum();
    for _ in 0..20 {
        let res: f64 = b.dofs.free.iter().map(|&i| rng.gen_range(-1.0..1.0) * (ac[i] - sys.load[i])).sum();
        assert!(res.abs() < 1e-10 * scale, "{res:e}");
    }
}

#[test]
fn richer_quadrature_does_not_change_the_solution() {
    let (d, b) = build("ex2", 3, 1, 3);
    let u = CosineBump;
    let sol = |budget| {
        let quad = QuadratureRule::with_budget(&b, budget);
        let sys = bump_system(&d, &b, &quad);
        let red = apply_essential_bc(&sys, &d, &b, &quad, |x, y| u.eval(x, y).f).unwrap();
        solve(&red, SolverKind::Direct).unwrap()
    };
    let (a, c) = (sol(2), sol(8));
    let amax = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let diff = a.iter().zip(&c).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(diff < 1e-3 * amax, "{diff:e} vs {amax:e}");
}

#[test]
fn boundary_projection_reproduces_affine_traces() {
    for name in ["ex1", "ex2"] {
        let (d, b) = build(name, 3, 1, 2);
        let quad = QuadratureRule::new(&b);
        let g = |x: f64, y: f64| 0.3 - 1.1 * x + 0.7 * y;
        let c = boundary_projection(&d, &b, &quad, g).unwrap();
        let mut worst: f64 = 0.0;
        for side in Side::BOTH {
            for i in 0..=50 {
                let t = i as f64 / 50.0;
                for (u, v) in [(1.0, t), (t, 0.0), (t, 1.0)] {
                    let x = d.patch(side).eval(u, v, 0).unwrap().x;
                    worst = worst.max((eval_global(&b, &c, side, u, v).f - g(x[0], x[1])).abs());
                }
            }
        }
        assert!(worst < 1e-11, "{name}: {worst:e}");
        let zero = boundary_projection(&d, &b, &quad, |_, _| 0.0).unwrap();
        assert!(zero.iter().all(|&c| c == 0.0));
    }
}

#[test]
fn iterative_solver_agrees_with_direct() {
    let (d, b) = build("ex3", 3, 1, 3);
    let quad = QuadratureRule::new(&b);
    let sys = bump_system(&d, &b, &quad);
    let u = CosineBump;
    let red = apply_essential_bc(&sys, &d, &b, &quad, |x, y| u.eval(x, y).f).unwrap();
    let x = solve_spd(&red.matrix, &red.rhs, SolverKind::Direct).unwrap();
    let y = solve_spd(&red.matrix, &red.rhs, SolverKind::Cg).unwrap();
    let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = x.iter().zip(&y).fold(0.0f64, |m, (a, c)| m.max((a - c).abs()));
    assert!(diff < 1e-7 * xmax, "{diff:e}");
}

fn without_seconds(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string()).collect()
}

#[test]
fn runs_are_deterministic() {
    let cfg = RunConfig { geometry: "ex3".into(), levels: 3, ..Default::default() };
    let (a, b) = (run(&cfg).unwrap(), run(&cfg).unwrap());
    assert_eq!(without_seconds(&report_csv(&a.report)), without_seconds(&report_csv(&b.report)));
    assert_eq!(a.diagnostics, b.diagnostics);
}

#[test]
fn report_csv_layout() {
    let cfg = RunConfig { geometry: "ex2".into(), levels: 3, start_level: 2, ..Default::default() };
    let out = run(&cfg).unwrap();
    let csv = report_csv(&out.report);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 3);
    let first: Vec<&str> = lines[1].split(',').collect();
    let second: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(first.len(), 12);
    assert!(first[7..11].iter().all(|s| s.is_empty()));
    assert!(second[7..11].iter().all(|s| s.parse::<f64>().is_ok()));
    assert_eq!(first[0], "2");
}

#[test]
fn sweep_matches_single_runs() {
    let cfg = RunConfig { geometry: "ex2".into(), p: 4, r: 2, levels: 2, ..Default::default() };
    let single = run(&cfg).unwrap();
    let swept = sweep(std::slice::from_ref(&cfg)).unwrap();
    assert_eq!(swept.len(), 1);
    assert_eq!(without_seconds(&report_csv(&swept[0].report)), without_seconds(&report_csv(&single.report)));
    assert!(sweep(&[]).unwrap().is_empty());
    assert_eq!(sweep_csv(&[]).lines().count(), 1);
}

#[test]
fn plot_scripts_carry_reference_slopes() {
    let cfg = RunConfig { geometry: "ex2".into(), levels: 2, ..Default::default() };
    let out = run(&cfg).unwrap();
    let h = emit_plot_script(std::slice::from_ref(&out.report), PlotKind::ErrorVsH);
    // p = 3, p~ = 2: q = 2
    for o in ["2)", "3)", "4)"] {
        assert!(h.lines().any(|l| l.starts_with("slope_triangle(") && l.ends_with(o)), "{o}");
    }
    let j = emit_plot_script(std::slice::from_ref(&out.report), PlotKind::JumpVsH);
    assert!(j.lines().any(|l| l.starts_with("slope_triangle(") && l.ends_with(" 3)")));
    let dof = emit_plot_script(std::slice::from_ref(&out.report), PlotKind::ErrorVsDof);
    assert!(dof.contains("-1)"));
}

#[test]
fn output_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { geometry: "ex1".into(), levels: 2, out: Some(dir.path().to_path_buf()), ..Default::default() };
    run(&cfg).unwrap();
    let label = cfg.label();
    for suffix in [".csv", "_diagnostics.csv", "_error_vs_h.py", "_jump_vs_h.py"] {
        assert!(dir.path().join(format!("{label}{suffix}")).is_file(), "{suffix}");
    }
}

#[test]
fn affine_solution_is_reproduced() {
    let cfg = RunConfig { geometry: "ex1".into(), levels: 3, solution: SolutionKind::Linear, ..Default::default() };
    let out = run(&cfg).unwrap();
    for r in &out.report.records {
        assert!(r.err_h2 < 1e-9, "{r:?}");
    }
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_approx-c1"))
}

#[test]
fn cli_exit_codes() {
    let code = |args: &[&str]| cli().args(args).output().unwrap().status.code();
    assert_eq!(code(&["--geometry", "ex1", "--p", "2", "--r", "1", "--levels", "2"]), Some(2));
    assert_eq!(code(&["--geometry", "ex1", "--p", "3", "--r", "0", "--levels", "2"]), Some(2));
    assert_eq!(code(&["--geometry", "ex1", "--p", "3", "--r", "1", "--levels", "9"]), Some(2));
    assert_eq!(code(&["--geometry", "nowhere.geo", "--p", "3", "--r", "1", "--levels", "2"]), Some(2));
    assert_eq!(code(&["--p", "3", "--r", "1", "--levels", "2"]), Some(2));

    // output directory blocked by a file
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("out");
    std::fs::write(&blocker, "x").unwrap();
    let blocked = blocker.to_str().unwrap();
    assert_eq!(code(&["--geometry", "ex1", "--p", "3", "--r", "1", "--levels", "1", "--out", blocked]), Some(3));
    let stage = RunError::Stage { level: 1, stage: "solve", msg: "x".into() };
    assert_eq!(stage.exit_code(), 3);
}

#[test]
fn cli_prints_report() {
    let out = cli().args(["--geometry", "ex2", "--p", "3", "--r", "1", "--levels", "2"]).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().next(), Some(CSV_HEADER));
    assert_eq!(stdout.lines().count(), 3);
}
