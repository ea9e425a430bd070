//! Result serialization. Numbers are printed in shortest round-trip form, so
//! JSON and CSV carry identical values.

use std::io::Write;

use interior_svd::driver::SolverResult;
use serde::Serialize;

use crate::Format;

#[derive(Serialize)]
struct JsonReport {
    sigma: Vec<f64>,
    residual: Vec<f64>,
    iter: usize,
    mv: usize,
    time_sec: f64,
    stopcrit: f64,
    converged: bool,
}

pub fn write_result<W: Write>(out: &mut W, r: &SolverResult, format: Format) -> std::io::Result<()> {
    let s = &r.stats;
    match format {
        Format::Json => {
            let report = JsonReport {
                sigma: r.triplets.iter().map(|t| t.sigma).collect(),
                residual: r.triplets.iter().map(|t| t.residual).collect(),
                iter: s.restarts,
                mv: s.matvecs,
                time_sec: s.wall_seconds,
                stopcrit: s.stopcrit,
                converged: r.converged,
            };
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)
        }
        Format::Csv => {
            // triplet records, a blank line, then the summary record
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["index", "sigma", "residual"])?;
            for (i, t) in r.triplets.iter().enumerate() {
                w.serialize((i + 1, t.sigma, t.residual))?;
            }
            out.write_all(&w.into_inner().map_err(|e| e.into_error())?)?;
            writeln!(out)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["iter", "mv", "time_sec", "stopcrit", "converged"])?;
            w.serialize((s.restarts, s.matvecs, s.wall_seconds, s.stopcrit, r.converged))?;
            out.write_all(&w.into_inner().map_err(|e| e.into_error())?)
        }
        Format::Table => {
            writeln!(out, "{:>5}  {:>24}  {:>24}", "index", "sigma", "residual")?;
            for (i, t) in r.triplets.iter().enumerate() {
                writeln!(out, "{:>5}  {:>24e}  {:>24e}", i + 1, t.sigma, t.residual)?;
            }
            writeln!(
                out,
                "converged: {}  iter: {}  mv: {} ({} verification)  time: {:.3}s  stopcrit/|A|_1: {:e}",
                r.converged,
                s.restarts,
                s.matvecs,
                s.verification_matvecs,
                s.wall_seconds,
                s.stopcrit / r.a_norm
            )
        }
    }
}

/// One row per cycle: `restart,eps_1,...,eps_k`. Cycles with fewer than `k`
/// approximations leave trailing cells empty.
pub fn write_history<W: Write>(out: W, history: &[Vec<f64>], k: usize) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = std::iter::once("restart".to_string())
        .chain((1..=k).map(|i| format!("eps_{i}")))
        .collect();
    w.write_record(&header)?;
    for (i, row) in history.iter().enumerate() {
        let cells: Vec<String> = std::iter::once(i.to_string())
            .chain((0..k).map(|j| row.get(j).map(|v| format!("{v:e}")).unwrap_or_default()))
            .collect();
        w.write_record(&cells)?;
    }
    w.flush()?;
    Ok(())
}
