//! Run configuration, the per-level pipeline, sweeps, CSV output and plot
//! scripts.

use crate::analysis::{
    error_norms, interface_derivatives, jump_factor_sup, jump_factors, jump_norm, AnalysisError, ConvergenceReport,
    ErrorRecord, ExpectedOrders, Quantity,
};
use crate::assembly::{apply_essential_bc, assemble, solve, AssemblyError, QuadratureRule, SolverKind};
use crate::basis::{BasisError, C1Basis, DofKind, PatchSpaces};
use crate::geometry::{catalog, load_geometry, GeometryError, CATALOG_NAMES, Side, TwoPatchDomain};
use crate::gluing::{exact_gluing, g1_residual, project_gluing, GluingData, GluingError};
use crate::problem::{Affine, CosineBump, ExactSolution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

pub const MAX_LEVEL: usize = 8;

pub const CSV_HEADER: &str = "level,h,dofs,errL2,errH1,errH2,jumpL2,eocL2,eocH1,eocH2,eocJump,seconds";

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("degree p = {0} is too low: the construction needs p >= 3")]
    Degree(usize),
    #[error("regularity r = {r} must satisfy 1 <= r <= p - 1 = {max}")]
    Regularity { r: usize, max: usize },
    #[error("gluing degree p~ = 0 is not allowed")]
    GluingDegree,
    #[error("gluing regularity r~ = {r_tilde} exceeds p~ = {p_tilde}")]
    GluingRegularity { p_tilde: usize, r_tilde: usize },
    #[error("levels must lie in 1..={MAX_LEVEL}, got {0}")]
    Levels(usize),
    #[error("start level {start} is above the finest level {levels}")]
    StartLevel { start: usize, levels: usize },
    #[error("lifted interface degree {0} exceeds the supported maximum of 8")]
    LiftedDegree(usize),
    #[error("gluing data is not polynomial of degree {degree} (deviation {deviation:.3e}); r~ = p~ is only allowed for polynomial gluing data")]
    NotPolynomial { degree: usize, deviation: f64 },
    #[error("geometry: {0}")]
    Geometry(String),
}

/// A failure while running, labelled with the pipeline stage.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("level {level}, {stage}: {msg}")]
    Stage { level: usize, stage: &'static str, msg: String },
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// Process exit code: 2 for configuration errors, 3 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Stage { .. } | RunError::Io(_) => 3,
        }
    }

    fn stage(level: usize, stage: &'static str, e: impl std::fmt::Display) -> Self {
        RunError::Stage { level, stage, msg: e.to_string() }
    }
}

/// The manufactured solution of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolutionKind {
    /// `(cos 4πx − 1)(cos 4πy − 1)`.
    #[default]
    Bump,
    /// `u = x`.
    Linear,
}

impl SolutionKind {
    pub fn exact(self) -> Box<dyn ExactSolution> {
        match self {
            SolutionKind::Bump => Box::new(CosineBump),
            SolutionKind::Linear => Box::new(Affine { a: 0.0, b: 1.0, c: 0.0 }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Catalog name or path of a geometry file.
    pub geometry: String,
    pub p: usize,
    pub r: usize,
    pub p_tilde: Option<usize>,
    pub r_tilde: Option<usize>,
    /// Finest level; level `l` has `2^l` elements per direction.
    pub levels: usize,
    pub start_level: usize,
    pub solver: SolverKind,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub solution: SolutionKind,
    /// Extra exactness degree of the element quadrature.
    pub quad_budget: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: "ex1".into(),
            p: 3,
            r: 1,
            p_tilde: None,
            r_tilde: None,
            levels: 4,
            start_level: 1,
            solver: SolverKind::Direct,
            out: None,
            seed: 0,
            solution: SolutionKind::Bump,
            quad_budget: 2,
        }
    }
}

impl RunConfig {
    /// `p̃`, defaulting to `max(p − 2, 2)`.
    pub fn p_tilde(&self) -> usize {
        self.p_tilde.unwrap_or_else(|| self.p.saturating_sub(2).max(2))
    }

    /// `r̃`, defaulting to `p̃ − 1`.
    pub fn r_tilde(&self) -> usize {
        self.r_tilde.unwrap_or_else(|| self.p_tilde().saturating_sub(1))
    }

    /// Checks the configuration; returns warnings for accepted but
    /// degenerate choices.
    pub fn validate(&self) -> Result<Vec<String>, ConfigError> {
        let mut warnings = Vec::new();
        if self.p < 3 {
            return Err(ConfigError::Degree(self.p));
        }
        if self.r < 1 || self.r > self.p - 1 {
            return Err(ConfigError::Regularity { r: self.r, max: self.p - 1 });
        }
        let (pt, rt) = (self.p_tilde(), self.r_tilde());
        if pt == 0 {
            return Err(ConfigError::GluingDegree);
        }
        if rt > pt {
            return Err(ConfigError::GluingRegularity { p_tilde: pt, r_tilde: rt });
        }
        if !(1..=MAX_LEVEL).contains(&self.levels) {
            return Err(ConfigError::Levels(self.levels));
        }
        if self.start_level > self.levels {
            return Err(ConfigError::StartLevel { start: self.start_level, levels: self.levels });
        }
        let lifted = self.p.max(self.p + pt - 1);
        if lifted > crate::spline::MAX_DEGREE {
            return Err(ConfigError::LiftedDegree(lifted));
        }
        if rt == 0 {
            warnings.push(format!(
                "r~ = 0: the gluing data is only continuous, interface functions are not in H2 across gluing knots and rates are expected to degrade (p~ = {pt})"
            ));
        }
        if pt + 1 < self.p - 1 {
            warnings.push(format!(
                "p~ = {pt} is below p - 2 = {}: the H2 rate is limited to p~ + 1 = {}",
                self.p - 2,
                pt + 1
            ));
        }
        Ok(warnings)
    }

    /// Short label used for file names.
    pub fn label(&self) -> String {
        let geo = Path::new(&self.geometry).file_stem().and_then(|s| s.to_str()).unwrap_or("geometry");
        format!("{geo}_p{}_r{}_pt{}_rt{}", self.p, self.r, self.p_tilde(), self.r_tilde())
    }
}

pub fn load_domain(name: &str) -> Result<TwoPatchDomain, ConfigError> {
    let res = if CATALOG_NAMES.contains(&name) {
        catalog(name)
    } else {
        load_geometry(name)
    };
    res.map_err(|e: GeometryError| ConfigError::Geometry(e.to_string()))
}

/// Everything computed on one level.
#[derive(Debug, Clone)]
pub struct LevelSolution {
    pub basis: C1Basis,
    pub coefs: Vec<f64>,
    pub record: ErrorRecord,
    pub diagnostics: LevelDiagnostics,
}

/// Checks run alongside the solve.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LevelDiagnostics {
    pub level: usize,
    /// Sup of the G1 residual of the gluing data actually used.
    pub g1_residual: f64,
    /// Sup of `|E1|` and `|E2|`.
    pub e1_sup: f64,
    pub e2_sup: f64,
    /// Largest deviation of the pointwise jump from `E1 ∂t φ + E2 ∂n φ^(L)`
    /// over random interface functions and points, relative to their size.
    pub jump_identity: f64,
    /// Largest asymmetry of the stiffness matrix relative to its size.
    pub asymmetry: f64,
    pub homogeneous_dim: usize,
    pub predicted_dim: usize,
}

fn map_gluing(level: usize, stage: &'static str, e: GluingError) -> RunError {
    match e {
        GluingError::NotPolynomial { degree, deviation } => ConfigError::NotPolynomial { degree, deviation }.into(),
        other => RunError::stage(level, stage, other),
    }
}

fn map_basis(level: usize, e: BasisError) -> RunError {
    match e {
        BasisError::Gluing(g) => map_gluing(level, "basis", g),
        other => RunError::stage(level, "basis", other),
    }
}

/// Builds the space at `level` and solves the problem for `exact`.
pub fn solve_level(
    domain: &TwoPatchDomain,
    gluing: &GluingData,
    cfg: &RunConfig,
    level: usize,
    exact: &dyn ExactSolution,
    rng: &mut ChaCha8Rng,
) -> Result<LevelSolution, RunError> {
    let start = Instant::now();
    let n = 1usize << level;
    let spaces = PatchSpaces::new(domain, cfg.p, cfg.r, n).map_err(|e| map_basis(level, e))?;
    let geo_v = domain.patch(Side::Left).space.v.pattern();
    let approx =
        project_gluing(gluing, cfg.p_tilde(), cfg.r_tilde(), n, geo_v).map_err(|e| map_gluing(level, "projection", e))?;
    let basis = C1Basis::build(domain, gluing, &approx, spaces).map_err(|e| map_basis(level, e))?;
    let quad = QuadratureRule::with_budget(&basis, cfg.quad_budget);
    let system = assemble(domain, &basis, &quad, |x, y| exact.bilaplacian(x, y), |x, y| exact.laplacian(x, y))
        .map_err(|e: AssemblyError| RunError::stage(level, "assembly", e))?;
    let reduced = apply_essential_bc(&system, domain, &basis, &quad, |x, y| exact.eval(x, y).f)
        .map_err(|e| RunError::stage(level, "boundary conditions", e))?;
    let coefs = solve(&reduced, cfg.solver).map_err(|e| RunError::stage(level, "solve", e))?;
    let norms = error_norms(domain, &basis, &coefs, exact, &quad);
    let jump = jump_norm(domain, &basis, &coefs).map_err(|e| RunError::stage(level, "jump norm", e))?;
    let seconds = start.elapsed().as_secs_f64();

    let (e1_sup, e2_sup) =
        jump_factor_sup(gluing, &basis.gluing).map_err(|e| RunError::stage(level, "jump factors", e))?;
    let jump_identity =
        jump_identity_check(domain, gluing, &basis, rng, 8).map_err(|e| RunError::stage(level, "diagnostics", e))?;
    let scale = system.matrix.max_abs().max(f64::MIN_POSITIVE);
    let diagnostics = LevelDiagnostics {
        level,
        g1_residual: g1_residual(domain, &basis.gluing),
        e1_sup,
        e2_sup,
        jump_identity,
        asymmetry: system.matrix.asymmetry() / scale,
        homogeneous_dim: basis.dofs.free.len(),
        predicted_dim: basis.predicted_free_dim(),
    };
    let record = ErrorRecord {
        level,
        h: 1.0 / n as f64,
        dofs: basis.num_dofs(),
        err_l2: norms.l2,
        err_h1: norms.h1,
        err_h2: norms.h2,
        jump_l2: jump,
        seconds,
    };
    Ok(LevelSolution { basis, coefs, record, diagnostics })
}

/// Random combinations of interface DOFs: compares the pointwise jump with
/// `E1 ∂t0 φ + E2 ∂n φ^(L)` at random points and returns the largest
/// deviation relative to the size of the derivatives.
pub fn jump_identity_check(
    domain: &TwoPatchDomain,
    gluing: &GluingData,
    basis: &C1Basis,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<f64, AnalysisError> {
    let iface: Vec<usize> = (0..basis.num_dofs())
        .filter(|&d| matches!(basis.dofs.dofs[d].kind, DofKind::Interface(_)))
        .collect();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut c = vec![0.0; basis.num_dofs()];
        for &d in &iface {
            c[d] = rng.gen_range(-1.0..1.0);
        }
        for _ in 0..4 {
            let v: f64 = rng.gen_range(0.0..1.0);
            let d = interface_derivatives(domain, basis, &c, v)?;
            let (e1, e2) = jump_factors(gluing, &basis.gluing, v)?;
            let size = d.tangential.abs() + d.normal[0].abs() + d.normal[1].abs();
            let dev = (d.jump() - (e1 * d.tangential + e2 * d.normal[0])).abs();
            worst = worst.max(dev / size.max(1.0));
        }
    }
    Ok(worst)
}

/// Result of a full run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: RunConfig,
    pub report: ConvergenceReport,
    pub diagnostics: Vec<LevelDiagnostics>,
}

/// Runs every level from `start_level` to `levels` and writes the CSV
/// files when an output directory is set.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    cfg.validate()?;
    let domain = load_domain(&cfg.geometry)?;
    let gluing = exact_gluing(&domain).map_err(|e| RunError::stage(0, "gluing data", e))?;
    let exact = cfg.solution.exact();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    let mut polynomial = false;
    for level in cfg.start_level..=cfg.levels {
        let sol = solve_level(&domain, &gluing, cfg, level, exact.as_ref(), &mut rng)?;
        polynomial = sol.basis.gluing.polynomial;
        records.push(sol.record);
        diagnostics.push(sol.diagnostics);
    }
    let report = ConvergenceReport {
        label: cfg.label(),
        records,
        expected: Some(ExpectedOrders::new(cfg.p, cfg.p_tilde(), polynomial)),
    };
    let out = RunOutput { config: cfg.clone(), report, diagnostics };
    if let Some(dir) = &cfg.out {
        write_outputs(&out, dir)?;
    }
    Ok(out)
}

fn write_outputs(out: &RunOutput, dir: &Path) -> Result<(), RunError> {
    std::fs::create_dir_all(dir)?;
    let label = &out.report.label;
    std::fs::write(dir.join(format!("{label}.csv")), report_csv(&out.report))?;
    std::fs::write(dir.join(format!("{label}_diagnostics.csv")), diagnostics_csv(&out.diagnostics))?;
    for kind in [PlotKind::ErrorVsH, PlotKind::JumpVsH] {
        std::fs::write(
            dir.join(format!("{label}_{}.py", kind.name())),
            emit_plot_script(std::slice::from_ref(&out.report), kind),
        )?;
    }
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.15e}")).unwrap_or_default()
}

/// CSV with one row per level; the EOC columns are blank on the first row
/// and where an order is undefined.
pub fn report_csv(report: &ConvergenceReport) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    let eocs: Vec<Vec<Option<f64>>> = Quantity::ALL.iter().map(|&q| report.eoc(q)).collect();
    for (i, r) in report.records.iter().enumerate() {
        let _ = write!(
            s,
            "{},{:.15e},{},{:.15e},{:.15e},{:.15e},{:.15e}",
            r.level, r.h, r.dofs, r.err_l2, r.err_h1, r.err_h2, r.jump_l2
        );
        for e in &eocs {
            let v = if i == 0 { None } else { e[i - 1] };
            let _ = write!(s, ",{}", fmt_opt(v));
        }
        let _ = writeln!(s, ",{:.6}", r.seconds);
    }
    s
}

pub fn diagnostics_csv(diag: &[LevelDiagnostics]) -> String {
    let mut s = String::from("level,g1Residual,e1Sup,e2Sup,jumpIdentity,asymmetry,homogeneousDim,predictedDim\n");
    for d in diag {
        let _ = writeln!(
            s,
            "{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{},{}",
            d.level, d.g1_residual, d.e1_sup, d.e2_sup, d.jump_identity, d.asymmetry, d.homogeneous_dim, d.predicted_dim
        );
    }
    s
}

/// Runs every configuration; the reports are returned in order.
pub fn sweep(configs: &[RunConfig]) -> Result<Vec<RunOutput>, RunError> {
    configs.iter().map(run).collect()
}

/// The configurations `r = 1, ..., p − 1` derived from `base`.
pub fn regularity_sweep(base: &RunConfig) -> Vec<RunConfig> {
    (1..base.p).map(|r| RunConfig { r, ..base.clone() }).collect()
}

/// Error-versus-DOF table across runs.
pub fn sweep_csv(outputs: &[RunOutput]) -> String {
    let mut s = String::from("p,r,ptilde,rtilde,level,h,dofs,errL2,errH1,errH2,jumpL2\n");
    for o in outputs {
        for r in &o.report.records {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{:.15e},{},{:.15e},{:.15e},{:.15e},{:.15e}",
                o.config.p,
                o.config.r,
                o.config.p_tilde(),
                o.config.r_tilde(),
                r.level,
                r.h,
                r.dofs,
                r.err_l2,
                r.err_h1,
                r.err_h2,
                r.jump_l2
            );
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    ErrorVsH,
    ErrorVsDof,
    JumpVsH,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::ErrorVsH => "error_vs_h",
            PlotKind::ErrorVsDof => "error_vs_dof",
            PlotKind::JumpVsH => "jump_vs_h",
        }
    }
}

fn py_list(xs: impl IntoIterator<Item = f64>) -> String {
    let items: Vec<String> = xs.into_iter().map(|x| format!("{x:.15e}")).collect();
    format!("[{}]", items.join(", "))
}

/// A standalone matplotlib script with the data inlined, log-log axes and
/// reference slope triangles for the expected orders.
pub fn emit_plot_script(reports: &[ConvergenceReport], kind: PlotKind) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "#!/usr/bin/env python3");
    let _ = writeln!(s, "# {} plot, generated by approx-c1", kind.name());
    let _ = writeln!(s, "import matplotlib.pyplot as plt");
    let _ = writeln!(s);
    let _ = writeln!(s, "def slope_triangle(ax, x0, y0, order, width=0.5):");
    let _ = writeln!(s, "    x1 = x0 * 2 ** width");
    let _ = writeln!(s, "    y1 = y0 * (x1 / x0) ** order");
    let _ = writeln!(s, "    ax.plot([x0, x1, x1, x0], [y0, y0, y1, y0], 'k-', lw=0.8)");
    let _ = writeln!(s, "    ax.annotate(str(order), (x1, (y0 * y1) ** 0.5), fontsize=8)");
    let _ = writeln!(s);
    let nonempty: Vec<&ConvergenceReport> = reports.iter().filter(|r| !r.records.is_empty()).collect();
    if nonempty.is_empty() {
        return s;
    }
    let _ = writeln!(s, "fig, ax = plt.subplots()");
    let xs = |r: &ConvergenceReport| -> String {
        match kind {
            PlotKind::ErrorVsDof => py_list(r.records.iter().map(|x| x.dofs as f64)),
            _ => py_list(r.records.iter().map(|x| x.h)),
        }
    };
    let mut orders: Vec<f64> = Vec::new();
    for r in &nonempty {
        let x = xs(r);
        let quantities: &[(Quantity, &str)] = match kind {
            PlotKind::JumpVsH => &[(Quantity::Jump, "jump")],
            _ => &[(Quantity::L2, "L2"), (Quantity::H1, "H1"), (Quantity::H2, "H2")],
        };
        for (q, name) in quantities {
            let _ = writeln!(
                s,
                "ax.loglog({x}, {}, 'o-', label='{} {}')",
                py_list(r.values(*q)),
                r.label,
                name
            );
        }
        if let Some(e) = r.expected {
            match kind {
                PlotKind::JumpVsH => orders.push(e.jump),
                PlotKind::ErrorVsH => orders.extend([e.q, e.q + 1.0, e.q + 2.0]),
                // error ~ dofs^(-order/2) in two dimensions
                PlotKind::ErrorVsDof => orders.extend([-e.q / 2.0]),
            }
        }
    }
    orders.sort_by(f64::total_cmp);
    orders.dedup();
    let last = nonempty[0].records.last().expect("nonempty");
    let (x0, y0) = match kind {
        PlotKind::ErrorVsDof => (last.dofs as f64, last.err_h2),
        PlotKind::JumpVsH => (last.h, last.jump_l2),
        PlotKind::ErrorVsH => (last.h, last.err_h2),
    };
    for o in orders {
        let _ = writeln!(s, "slope_triangle(ax, {x0:.6e}, {:.6e}, {o})", y0.max(1e-300) * 0.5);
    }
    let xlabel = if kind == PlotKind::ErrorVsDof { "degrees of freedom" } else { "h" };
    let _ = writeln!(s, "ax.set_xlabel('{xlabel}')");
    let _ = writeln!(s, "ax.set_ylabel('error')");
    let _ = writeln!(s, "ax.legend(fontsize=7)");
    let _ = writeln!(s, "fig.savefig('{}.png', dpi=150)", kind.name());
    s
}
