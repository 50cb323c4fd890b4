use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};

use fairmesh::io;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Mollify face normals and optimize vertices.
    Denoise,
    /// Move vertices toward a high-quality vertex normal field.
    Fuse,
    /// Add seeded Gaussian noise to vertex positions.
    Addnoise,
    /// Compare a mesh against ground truth.
    Eval,
    /// Corner-angle histogram as CSV.
    Hist,
    /// Write a synthetic test mesh.
    Fixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureKind {
    /// Subdivided cube, side 2.
    Cube,
    /// Icosphere of radius 0.5.
    Sphere,
    /// Flat triangulated grid.
    Grid,
    /// Grid with a fraction of edges collapsed and the rest jittered.
    Collapsed,
    /// Flat grid; `--normals` receives the sinusoidal bump vertex normals.
    Bump,
    /// The sinusoidal bump surface itself.
    BumpSurface,
}

impl FixtureKind {
    pub fn default_size(self) -> usize {
        match self {
            FixtureKind::Cube => 16,
            FixtureKind::Sphere => 10,
            FixtureKind::Grid | FixtureKind::Collapsed => 36,
            FixtureKind::Bump | FixtureKind::BumpSurface => 32,
        }
    }
}

/// Everything that determines a run. Values from `--config` replace
/// values given as flags; keys are the flag names without dashes.
#[derive(Debug, Clone, Parser)]
#[command(name = "fairmesh", version, about = "Mesh denoising and mesh/normal fusion with face fairness")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,

    /// Input mesh (.obj or .ply).
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Output file.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Ground-truth mesh for metrics.
    #[arg(long, value_name = "PATH")]
    pub gt: Option<PathBuf>,
    /// Vertex normal file: input for fuse, output for fixture.
    #[arg(long, value_name = "PATH")]
    pub normals: Option<PathBuf>,
    /// key=value report; printed to stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// key=value file overriding flags.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[arg(long)]
    pub lambda_v: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Normal smoothing weight.
    #[arg(long)]
    pub lambda_n: Option<f64>,
    /// Laplacian normal-offset bandwidth.
    #[arg(long)]
    pub sigma1: Option<f64>,
    /// Laplacian spatial bandwidth, in local-scale units.
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Flatness offset for the fairness weight.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Mollifier angular bandwidth.
    #[arg(long)]
    pub mollify_sigma1: Option<f64>,
    /// Mollifier spatial bandwidth, in mean edge lengths.
    #[arg(long)]
    pub mollify_sigma2: Option<f64>,
    /// Vertex solver iteration cap.
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub rounds: Option<usize>,

    /// Noise standard deviation per coordinate, in mean edge lengths.
    #[arg(long)]
    pub sigma_rel: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, value_enum)]
    pub kind: Option<FixtureKind>,
    /// Fixture resolution.
    #[arg(long)]
    pub n: Option<usize>,
    /// Fraction of grid edges to collapse.
    #[arg(long)]
    pub fraction: Option<f64>,
    /// Bump height.
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Histogram bin width in degrees.
    #[arg(long)]
    pub bin_width: Option<f64>,
}

fn parse_value<T: FromStr>(path: &Path, key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::new(format!("{}: bad value `{value}` for `{key}`: {e}", path.display())))
}

impl RunConfig {
    /// Applies the `--config` file, if any.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        for (key, value) in io::read_config(&path)? {
            self.apply(&path, &key, &value)?;
        }
        Ok(self)
    }

    fn apply(&mut self, path: &Path, key: &str, value: &str) -> Result<(), CliError> {
        let p = |v: &str| Some(PathBuf::from(v));
        match key {
            "in" => self.input = p(value),
            "out" => self.out = p(value),
            "gt" => self.gt = p(value),
            "normals" => self.normals = p(value),
            "report" => self.report = p(value),
            "lambda-v" => self.lambda_v = Some(parse_value(path, key, value)?),
            "eta" => self.eta = Some(parse_value(path, key, value)?),
            "lambda-n" => self.lambda_n = Some(parse_value(path, key, value)?),
            "sigma1" => self.sigma1 = Some(parse_value(path, key, value)?),
            "sigma2" => self.sigma2 = Some(parse_value(path, key, value)?),
            "delta" => self.delta = Some(parse_value(path, key, value)?),
            "mollify-sigma1" => self.mollify_sigma1 = Some(parse_value(path, key, value)?),
            "mollify-sigma2" => self.mollify_sigma2 = Some(parse_value(path, key, value)?),
            "max-iters" => self.max_iters = Some(parse_value(path, key, value)?),
            "rounds" => self.rounds = Some(parse_value(path, key, value)?),
            "sigma-rel" => self.sigma_rel = Some(parse_value(path, key, value)?),
            "seed" => self.seed = Some(parse_value(path, key, value)?),
            "n" => self.n = Some(parse_value(path, key, value)?),
            "fraction" => self.fraction = Some(parse_value(path, key, value)?),
            "amplitude" => self.amplitude = Some(parse_value(path, key, value)?),
            "bin-width" => self.bin_width = Some(parse_value(path, key, value)?),
            "kind" => {
                let kind = FixtureKind::from_str(value, true)
                    .map_err(|e| CliError::new(format!("{}: bad value for `kind`: {e}", path.display())))?;
                self.kind = Some(kind);
            }
            _ => return Err(CliError::new(format!("{}: unknown key `{key}`", path.display()))),
        }
        Ok(())
    }
}

pub(crate) fn required<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T, CliError> {
    value
        .as_ref()
        .ok_or_else(|| CliError::new(format!("missing required option --{flag}")))
}
