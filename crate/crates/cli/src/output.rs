//! CSV and JSON artifact writers. Numbers go out with 17 significant digits
//! so every value round-trips binary64 exactly and tables can be diffed
//! across runs; headers and the `.` decimal separator are fixed, with no
//! locale dependence.

use std::fs::File;
use std::io::{BufWriter, Result, Write};
use std::path::Path;

use kirchhoff::analysis::{ConvergenceTable, DiagnosticsTrace};
use kirchhoff::grid::{SpatialGrid, TemporalGrid};
use kirchhoff::scheme::SolutionHistory;

/// 17 significant digits, round-trip exact for f64.
pub fn g17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// `solution.csv`: columns `k,t_k,x_j,u`, one row per node (boundary nodes
/// included with u = 0), for every layer index divisible by `stride` plus
/// the final layer.
pub fn write_solution_csv(
    path: &Path,
    history: &SolutionHistory,
    sgrid: &SpatialGrid,
    stride: usize,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "k,t_k,x_j,u")?;
    let n = history.times.n;
    for (k, layer) in history.layers.iter().enumerate() {
        if k % stride != 0 && k != n {
            continue;
        }
        let t = history.times.node(k);
        for j in 0..=sgrid.m + 1 {
            let u = if j == 0 || j == sgrid.m + 1 {
                0.0
            } else {
                layer.values[j - 1]
            };
            writeln!(w, "{},{},{},{}", k, g17(t), g17(sgrid.node(j)), g17(u))?;
        }
    }
    w.flush()
}

/// `diagnostics.csv`: columns `k,t_k,q_k,mu_k,gamma_k,lh_norm_k,delta_k`.
/// `mu` and `delta` involve the backward difference and are empty at k = 0.
pub fn write_diagnostics_csv(
    path: &Path,
    trace: &DiagnosticsTrace,
    tgrid: &TemporalGrid,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "k,t_k,q_k,mu_k,gamma_k,lh_norm_k,delta_k")?;
    for k in 0..trace.gamma.len() {
        let (mu, delta) = if k == 0 {
            (String::new(), String::new())
        } else {
            (g17(trace.mu[k - 1]), g17(trace.delta[k - 1]))
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            k,
            g17(tgrid.node(k)),
            g17(trace.q[k]),
            mu,
            g17(trace.gamma[k]),
            g17(trace.lh_norm[k]),
            delta
        )?;
    }
    w.flush()
}

/// `convergence.csv`: one row per refinement level; order columns are empty
/// on the finest row.
pub fn write_convergence_csv(path: &Path, table: &ConvergenceTable) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "n,tau,max_grad_err,max_dt_err,max_l2_err,order_grad,order_dt,order_l2"
    )?;
    for r in &table.rows {
        let fmt_ord = |o: Option<f64>| o.map(g17).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.n,
            g17(r.tau),
            g17(r.max_grad_err),
            g17(r.max_dt_err),
            g17(r.max_l2_err),
            fmt_ord(r.order_grad),
            fmt_ord(r.order_dt),
            fmt_ord(r.order_l2)
        )?;
    }
    w.flush()
}

/// Pretty-printed JSON artifact.
pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()
}
