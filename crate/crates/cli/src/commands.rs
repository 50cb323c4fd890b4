use std::path::Path;

use clap::ValueEnum;

use fairmesh::eval::{self, fixtures};
use fairmesh::io;
use fairmesh::pipeline::RoundDiagnostics;
use fairmesh::{denoise, fuse_normals, DenoiseConfig, FusionInput, Mesh, NormalField, SolverParams};

use crate::config::{required, Command, FixtureKind, RunConfig};
use crate::output::Outputs;
use crate::CliError;

const DEFAULT_BIN_WIDTH: f64 = 10.0;
const DEFAULT_COLLAPSE_FRACTION: f64 = 0.05;
const DEFAULT_BUMP_AMPLITUDE: f64 = 3.0;
const CUBE_SIDE: f64 = 2.0;
const SPHERE_RADIUS: f64 = 0.5;

pub type Report = Vec<(String, String)>;

/// Files to write plus the key=value report.
pub struct Plan {
    pub outputs: Outputs,
    pub report: Report,
    /// Text for stdout when no `--report` path is given and the command
    /// has no report of its own.
    pub stdout: Option<String>,
}

pub fn plan(cfg: &RunConfig) -> Result<Plan, CliError> {
    let mut plan = Plan {
        outputs: Outputs::default(),
        report: Vec::new(),
        stdout: None,
    };
    match cfg.command {
        Command::Denoise => run_denoise(cfg, &mut plan)?,
        Command::Fuse => run_fuse(cfg, &mut plan)?,
        Command::Addnoise => run_addnoise(cfg, &mut plan)?,
        Command::Eval => run_eval(cfg, &mut plan)?,
        Command::Hist => run_hist(cfg, &mut plan)?,
        Command::Fixture => run_fixture(cfg, &mut plan)?,
    }
    Ok(plan)
}

fn push(report: &mut Report, key: impl Into<String>, value: impl ToString) {
    report.push((key.into(), value.to_string()));
}

fn add_mesh(outputs: &mut Outputs, mesh: &Mesh, path: &Path) -> Result<(), CliError> {
    outputs.add(path, io::format_mesh(mesh, path)?)
}

fn solver_params(cfg: &RunConfig, base: SolverParams) -> SolverParams {
    SolverParams {
        lambda_v: cfg.lambda_v.unwrap_or(base.lambda_v),
        eta: cfg.eta.unwrap_or(base.eta),
        sigma1: cfg.sigma1.unwrap_or(base.sigma1),
        sigma2: cfg.sigma2.unwrap_or(base.sigma2),
        delta: cfg.delta.unwrap_or(base.delta),
        max_iters: cfg.max_iters.unwrap_or(base.max_iters),
        ..base
    }
}

fn round_report(report: &mut Report, rounds: &[RoundDiagnostics]) {
    push(report, "rounds", rounds.len());
    for r in rounds {
        log::info!("round {} took {:.3} s", r.round, r.elapsed.as_secs_f64());
        let key = |name: &str| format!("round{}_{name}", r.round);
        push(report, key("initial_cost"), r.initial_cost);
        push(report, key("final_cost"), r.final_cost);
        push(report, key("grad_norm_inf"), r.grad_norm_inf);
        push(report, key("solver_iterations"), r.solver_iterations);
        push(report, key("converged"), r.converged);
        push(report, key("mollify_iterations"), r.mollify_iterations);
        push(report, key("flipped_faces"), r.flipped_faces);
    }
}

fn metrics_report(report: &mut Report, cfg: &RunConfig, est: &Mesh, gt_path: &Path) -> Result<(), CliError> {
    let gt = io::read_mesh(gt_path)?;
    let metrics = eval::evaluate(est, &gt, cfg.bin_width.unwrap_or(DEFAULT_BIN_WIDTH))?;
    for (k, v) in metrics.key_values() {
        push(report, k, v);
    }
    Ok(())
}

fn run_denoise(cfg: &RunConfig, plan: &mut Plan) -> Result<(), CliError> {
    let input = required(&cfg.input, "in")?;
    let out = required(&cfg.out, "out")?;
    let mesh = io::read_mesh(input)?;

    let base = DenoiseConfig::default();
    let mut dc = DenoiseConfig {
        solver: solver_params(cfg, base.solver.clone()),
        outer_rounds: cfg.rounds.unwrap_or(base.outer_rounds),
        ..base
    };
    dc.mollify.lambda_n = cfg.lambda_n.unwrap_or(dc.mollify.lambda_n);
    dc.mollify.sigma1 = cfg.mollify_sigma1.unwrap_or(dc.mollify.sigma1);
    dc.mollify.sigma2 = cfg.mollify_sigma2.unwrap_or(dc.mollify.sigma2);

    let result = denoise(&mesh, &dc)?;
    if let Some(gt) = &cfg.gt {
        metrics_report(&mut plan.report, cfg, &result.mesh, gt)?;
    }
    round_report(&mut plan.report, &result.rounds);
    add_mesh(&mut plan.outputs, &result.mesh, out)
}

fn run_fuse(cfg: &RunConfig, plan: &mut Plan) -> Result<(), CliError> {
    let input = required(&cfg.input, "in")?;
    let out = required(&cfg.out, "out")?;
    let loaded = io::read_mesh_with_normals(input)?;
    let normals = match (&cfg.normals, loaded.vertex_normals) {
        (Some(path), _) => io::read_normal_field(path, loaded.mesh.n_vertices())?,
        (None, Some(normals)) => normals,
        (None, None) => {
            return Err(CliError::new(
                "missing required option --normals (or a PLY input with vertex normals)",
            ))
        }
    };
    let fusion = FusionInput::new(loaded.mesh, normals)?.with_rounds(cfg.rounds.unwrap_or(1))?;
    let params = solver_params(cfg, SolverParams::default());

    let result = fuse_normals(&fusion, &params)?;
    if let Some(gt) = &cfg.gt {
        metrics_report(&mut plan.report, cfg, &result.mesh, gt)?;
    }
    round_report(&mut plan.report, &result.rounds);
    add_mesh(&mut plan.outputs, &result.mesh, out)
}

fn run_addnoise(cfg: &RunConfig, plan: &mut Plan) -> Result<(), CliError> {
    let input = required(&cfg.input, "in")?;
    let out = required(&cfg.out, "out")?;
    let sigma_rel = *required(&cfg.sigma_rel, "sigma-rel")?;
    let seed = cfg.seed.unwrap_or(0);
    let mesh = io::read_mesh(input)?;
    let noisy = eval::add_gaussian_noise(&mesh, sigma_rel, seed)?;
    push(&mut plan.report, "sigma_rel", sigma_rel);
    push(&mut plan.report, "seed", seed);
    push(&mut plan.report, "mean_edge_length", mesh.mean_edge_length());
    add_mesh(&mut plan.outputs, &noisy, out)
}

fn run_eval(cfg: &RunConfig, plan: &mut Plan) -> Result<(), CliError> {
    let input = required(&cfg.input, "in")?;
    let gt = required(&cfg.gt, "gt")?;
    let est = io::read_mesh(input)?;
    metrics_report(&mut plan.report, cfg, &est, gt)
}

fn run_hist(cfg: &RunConfig, plan: &mut Plan) -> Result<(), CliError> {
    let input = required(&cfg.input, "in")?;
    let mesh = io::read_mesh(input)?;
    let hist = eval::corner_angle_histogram(&mesh, cfg.bin_width.unwrap_or(DEFAULT_BIN_WIDTH))?;
    if !hist.degenerate_faces.is_empty() {
        log::warn!("{} degenerate faces", hist.degenerate_faces.len());
    }
    let csv = io::histogram_csv(&hist);
    match &cfg.out {
        Some(out) => plan.outputs.add(out, csv),
        None => {
            plan.stdout = Some(csv);
            Ok(())
        }
    }
}

fn run_fixture(cfg: &RunConfig, plan: &mut Plan) -> Result<(), CliError> {
    let kind = *required(&cfg.kind, "kind")?;
    let out = required(&cfg.out, "out")?;
    let n = cfg.n.unwrap_or(kind.default_size());
    let amplitude = cfg.amplitude.unwrap_or(DEFAULT_BUMP_AMPLITUDE);
    let (mesh, normals): (Mesh, Option<NormalField>) = match kind {
        FixtureKind::Cube => (fixtures::cube(n, CUBE_SIDE)?, None),
        FixtureKind::Sphere => {
            let mesh = fixtures::icosphere(n, SPHERE_RADIUS)?;
            let normals = fixtures::sphere_vertex_normals(&mesh)?;
            (mesh, Some(normals))
        }
        FixtureKind::Grid => (fixtures::grid_mesh(n)?, None),
        FixtureKind::Collapsed => {
            let grid = fixtures::grid_mesh(n)?;
            let fraction = cfg.fraction.unwrap_or(DEFAULT_COLLAPSE_FRACTION);
            (fixtures::collapse_edges(&grid, fraction, cfg.seed.unwrap_or(0))?, None)
        }
        FixtureKind::Bump => {
            let (mesh, normals) = fixtures::sinusoid_bump(n, amplitude)?;
            (mesh, Some(normals))
        }
        FixtureKind::BumpSurface => (fixtures::bump_mesh(n, amplitude)?, None),
    };
    if let Some(path) = &cfg.normals {
        let normals = normals.ok_or_else(|| {
            let name = kind.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default();
            CliError::new(format!("fixture kind {name} has no analytic normals; drop --normals"))
        })?;
        plan.outputs.add(path, io::format_normal_field(&normals))?;
    }
    push(&mut plan.report, "vertices", mesh.n_vertices());
    push(&mut plan.report, "faces", mesh.n_faces());
    add_mesh(&mut plan.outputs, &mesh, out)
}
