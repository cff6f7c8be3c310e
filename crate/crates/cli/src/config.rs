//! Run configuration: command-line flags, the JSON config-file mirror, and
//! the merge of the two (explicit flags win).

use std::fs;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

/// Fully resolved configuration of a `solve` or `converge` run. For
/// `converge`, `n` is the base step count of the coarsest level.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub problem_key: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<f64>,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub n: usize,
    pub m: usize,
    pub out_dir: PathBuf,
    pub snapshot_stride: usize,
    pub diagnostics: bool,
}

/// JSON mirror of [`RunConfig`] with every field optional. `levels` may be
/// set for `converge`; `solve` ignores it.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    problem_key: Option<String>,
    ell: Option<f64>,
    #[serde(rename = "T", alias = "t_final")]
    t_final: Option<f64>,
    n: Option<usize>,
    m: Option<usize>,
    out_dir: Option<PathBuf>,
    snapshot_stride: Option<usize>,
    diagnostics: Option<bool>,
    levels: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON config file mirroring the run-configuration fields; explicit
    /// flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Catalog problem key (cos-mode, ramp-mode, cos-mode-tv, zero,
    /// free-vibration)
    #[arg(long)]
    pub problem: Option<String>,
    /// Domain length ℓ; defaults to the catalog entry's 1
    #[arg(long)]
    pub ell: Option<f64>,
    /// Time horizon T
    #[arg(long = "T")]
    pub t_final: Option<f64>,
    /// Number of time steps (base count of the coarsest level for converge)
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of interior spatial nodes
    #[arg(long)]
    pub m: Option<usize>,
    /// Directory the output files are written into (default "out")
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Emit every k-th layer into solution.csv; the final layer is always
    /// included
    #[arg(long)]
    pub snapshot_stride: Option<usize>,
    /// Skip the diagnostics trace and diagnostics.csv
    #[arg(long)]
    pub no_diagnostics: bool,
}

/// Merge flags over the optional config file and validate. Returns the
/// resolved config and the file's `levels` field, if any.
pub fn resolve(args: &RunArgs) -> Result<(RunConfig, Option<usize>), String> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| format!("cannot parse config {}: {e}", path.display()))?
        }
        None => FileConfig::default(),
    };

    let problem_key = args
        .problem
        .clone()
        .or(file.problem_key)
        .ok_or("missing problem key: pass --problem or set problem_key in the config file")?;
    let t_final = args
        .t_final
        .or(file.t_final)
        .ok_or("missing horizon: pass --T or set T in the config file")?;
    let n = args
        .n
        .or(file.n)
        .ok_or("missing step count: pass --n or set n in the config file")?;
    let m = args
        .m
        .or(file.m)
        .ok_or("missing node count: pass --m or set m in the config file")?;
    let ell = args.ell.or(file.ell);
    let out_dir = args
        .out_dir
        .clone()
        .or(file.out_dir)
        .unwrap_or_else(|| PathBuf::from("out"));
    let snapshot_stride = args.snapshot_stride.or(file.snapshot_stride).unwrap_or(1);
    let diagnostics = if args.no_diagnostics {
        false
    } else {
        file.diagnostics.unwrap_or(true)
    };

    if !t_final.is_finite() || t_final <= 0.0 {
        return Err(format!(
            "horizon T must be positive and finite, got {t_final}"
        ));
    }
    if n < 2 {
        return Err(format!("need at least 2 time steps, got {n}"));
    }
    if m < 2 {
        return Err(format!("need at least 2 interior nodes, got {m}"));
    }
    if snapshot_stride == 0 {
        return Err("snapshot_stride must be at least 1".into());
    }
    if let Some(l) = ell {
        if !l.is_finite() || l <= 0.0 {
            return Err(format!(
                "domain length must be positive and finite, got {l}"
            ));
        }
    }

    Ok((
        RunConfig {
            problem_key,
            ell,
            t_final,
            n,
            m,
            out_dir,
            snapshot_stride,
            diagnostics,
        },
        file.levels,
    ))
}
