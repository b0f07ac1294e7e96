use approx_c1::analysis::Quantity;
use approx_c1::assembly::SolverKind;
use approx_c1::cli::{
    emit_plot_script, regularity_sweep, report_csv, run, sweep, sweep_csv, PlotKind, RunConfig, RunError,
    SolutionKind,
};
use clap::{Parser, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Solver {
    Direct,
    Cg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Solution {
    /// (cos 4πx − 1)(cos 4πy − 1)
    Bump,
    /// u = x
    Linear,
}

/// Solve the biharmonic equation on a two-patch domain with an
/// approximately C1 isogeometric space and report convergence.
#[derive(Debug, Parser)]
#[command(name = "approx-c1", version)]
struct Args {
    /// Catalog name (ex1, ex2, ex3, ex4) or path to a geometry file.
    #[arg(long)]
    geometry: String,
    /// Spline degree of both patches.
    #[arg(long)]
    p: usize,
    /// Spline regularity.
    #[arg(long)]
    r: usize,
    /// Degree of the approximate gluing data [default: max(p-2, 2)].
    #[arg(long)]
    ptilde: Option<usize>,
    /// Regularity of the approximate gluing data [default: ptilde-1].
    #[arg(long)]
    rtilde: Option<usize>,
    /// Finest level; level l uses 2^l elements per direction.
    #[arg(long)]
    levels: usize,
    /// Coarsest level.
    #[arg(long, default_value_t = 1)]
    start_level: usize,
    /// Output directory for CSV files and plot scripts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed of the random property checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Solver::Direct)]
    solver: Solver,
    #[arg(long, value_enum, default_value_t = Solution::Bump)]
    solution: Solution,
    /// Run r = 1, ..., p-1 and write an error-versus-DOF table.
    #[arg(long)]
    sweep_r: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = RunConfig {
        geometry: args.geometry,
        p: args.p,
        r: args.r,
        p_tilde: args.ptilde,
        r_tilde: args.rtilde,
        levels: args.levels,
        start_level: args.start_level,
        solver: match args.solver {
            Solver::Direct => SolverKind::Direct,
            Solver::Cg => SolverKind::Cg,
        },
        out: args.out,
        seed: args.seed,
        solution: match args.solution {
            Solution::Bump => SolutionKind::Bump,
            Solution::Linear => SolutionKind::Linear,
        },
        ..Default::default()
    };
    match execute(&cfg, args.sweep_r) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cfg: &RunConfig, sweep_r: bool) -> Result<(), RunError> {
    for w in cfg.validate()? {
        eprintln!("warning: {w}");
    }
    if sweep_r {
        let outputs = sweep(&regularity_sweep(cfg))?;
        let table = sweep_csv(&outputs);
        print!("{table}");
        if let Some(dir) = &cfg.out {
            let reports: Vec<_> = outputs.iter().map(|o| o.report.clone()).collect();
            let stem = cfg.label();
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("sweep_{stem}.csv")), table)?;
            std::fs::write(
                dir.join(format!("sweep_{stem}_error_vs_dof.py")),
                emit_plot_script(&reports, PlotKind::ErrorVsDof),
            )?;
        }
        return Ok(());
    }
    let out = run(cfg)?;
    print!("{}", report_csv(&out.report));
    if let Some(e) = out.report.expected {
        let last = |q| out.report.last_eocs(q, 1).first().copied().flatten();
        eprintln!(
            "expected H2 order {}, jump order {}; last EOC: H2 {:?}, jump {:?}",
            e.q,
            e.jump,
            last(Quantity::H2),
            last(Quantity::Jump)
        );
    }
    Ok(())
}
