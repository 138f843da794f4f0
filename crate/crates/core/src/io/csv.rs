//! CSV outputs for sweeps, trajectories and bound curves.
//!
//! Floats use Rust's shortest round-trip `Display`; missing values are empty
//! fields and cells without a training set are written as `N/A`.

use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::{BoundCurve, CellSummary, OptimalC, SweepCell, SweepResult};
use crate::solvers::{AlphaSnapshot, TrajectoryPoint, TrajectoryRecord};

pub const SWEEP_HEADER: &str = "T,c,lambda,stepsize,mean_test_error,std_error,reps";
pub const OPTIMAL_C_HEADER: &str = "T,optimal_c,error_at_optimal_c,error_at_c1";
pub const TRAJECTORY_HEADER: &str = "t,epoch,primal_subopt,dual_subopt,gap,loss_term,norm_term";
pub const BOUND_HEADER: &str = "c,lambda,optimization,regularization,estimation,bound,risk";
pub const ALPHA_HEADER: &str = "epoch,index,alpha";

pub const SWEEP_FILE: &str = "sweep.csv";
pub const OPTIMAL_C_FILE: &str = "optimal_c.csv";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(result: &SweepResult, mut out: W) -> Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for cell in &result.cells {
        match cell.summary {
            Some(s) => writeln!(
                out,
                "{},{},{},{},{},{},{}",
                cell.budget,
                cell.c,
                s.lambda,
                opt(s.stepsize_multiplier),
                s.mean_test_error,
                s.std_error,
                s.reps
            )?,
            None => writeln!(out, "{},{},,,N/A,,0", cell.budget, cell.c)?,
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_optimal_c_csv<W: Write>(result: &SweepResult, mut out: W) -> Result<()> {
    writeln!(out, "{OPTIMAL_C_HEADER}")?;
    for o in &result.optimal {
        writeln!(
            out,
            "{},{},{},{}",
            o.budget,
            o.optimal_c,
            o.error_at_optimal_c,
            opt(o.error_at_c1)
        )?;
    }
    out.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes `sweep.csv` and `optimal_c.csv` into `dir`, creating it if needed.
pub fn write_sweep_files(result: &SweepResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    write_sweep_csv(result, create(&dir.join(SWEEP_FILE))?)?;
    write_optimal_c_csv(result, create(&dir.join(OPTIMAL_C_FILE))?)
}

pub fn write_trajectory_csv<W: Write>(record: &TrajectoryRecord, mut out: W) -> Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for p in &record.points {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.t, p.epoch, p.primal_subopt, p.dual_subopt, p.gap, p.loss_term, p.norm_term
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_alpha_csv<W: Write>(snapshots: &[AlphaSnapshot], mut out: W) -> Result<()> {
    writeln!(out, "{ALPHA_HEADER}")?;
    for s in snapshots {
        for (i, a) in s.alpha.iter().enumerate() {
            writeln!(out, "{},{},{}", s.epoch, i, a)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_bound_csv<W: Write>(curve: &BoundCurve, mut out: W) -> Result<()> {
    writeln!(out, "{BOUND_HEADER}")?;
    for p in &curve.points {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.c, p.lambda, p.optimization, p.regularization, p.estimation, p.total, p.risk
        )?;
    }
    out.flush()?;
    Ok(())
}

struct Rows<R> {
    reader: R,
    header: &'static str,
}

impl<R: BufRead> Rows<R> {
    /// Yields `(line number, fields)` after checking the header.
    fn collect(self) -> Result<Vec<(usize, Vec<String>)>> {
        let mut lines = self.reader.lines();
        let first = lines
            .next()
            .transpose()?
            .ok_or_else(|| parse_err(1, "missing header"))?;
        if first.trim() != self.header {
            return Err(parse_err(1, format!("expected header '{}'", self.header)));
        }
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            rows.push((k + 2, line.split(',').map(str::to_owned).collect()));
        }
        Ok(rows)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(fields: &[String], i: usize, line: usize) -> Result<T> {
    fields
        .get(i)
        .ok_or_else(|| parse_err(line, format!("missing column {i}")))?
        .parse()
        .map_err(|_| parse_err(line, format!("bad value '{}' in column {i}", fields[i])))
}

fn opt_field(fields: &[String], i: usize, line: usize) -> Result<Option<f64>> {
    match fields.get(i).map(String::as_str) {
        None | Some("") => Ok(None),
        Some(_) => field(fields, i, line).map(Some),
    }
}

/// Reads back the per-cell table. `m` is recomputed from `c` and `T`.
pub fn read_sweep_csv<R: BufRead>(reader: R) -> Result<Vec<SweepCell>> {
    Rows {
        reader,
        header: SWEEP_HEADER,
    }
    .collect()?
    .into_iter()
    .map(|(line, f)| {
        if f.len() != 7 {
            return Err(parse_err(
                line,
                format!("expected 7 columns, got {}", f.len()),
            ));
        }
        let budget: u64 = field(&f, 0, line)?;
        let c: f64 = field(&f, 1, line)?;
        let summary = if f[4] == "N/A" {
            None
        } else {
            Some(CellSummary {
                lambda: field(&f, 2, line)?,
                stepsize_multiplier: opt_field(&f, 3, line)?,
                mean_test_error: field(&f, 4, line)?,
                std_error: field(&f, 5, line)?,
                reps: field(&f, 6, line)?,
            })
        };
        Ok(SweepCell {
            budget,
            c,
            m: crate::experiments::training_size(c, budget),
            summary,
        })
    })
    .collect()
}

/// Reads back `optimal_c.csv`; standard errors are not part of the file.
pub fn read_optimal_c_csv<R: BufRead>(reader: R) -> Result<Vec<OptimalC>> {
    Rows {
        reader,
        header: OPTIMAL_C_HEADER,
    }
    .collect()?
    .into_iter()
    .map(|(line, f)| {
        Ok(OptimalC {
            budget: field(&f, 0, line)?,
            optimal_c: field(&f, 1, line)?,
            error_at_optimal_c: field(&f, 2, line)?,
            std_error_at_optimal_c: f64::NAN,
            error_at_c1: opt_field(&f, 3, line)?,
            std_error_at_c1: None,
        })
    })
    .collect()
}

/// Reads back a trajectory; `primal` and `dual` are not stored and come back as `NaN`.
pub fn read_trajectory_csv<R: BufRead>(reader: R) -> Result<Vec<TrajectoryPoint>> {
    Rows {
        reader,
        header: TRAJECTORY_HEADER,
    }
    .collect()?
    .into_iter()
    .map(|(line, f)| {
        Ok(TrajectoryPoint {
            t: field(&f, 0, line)?,
            epoch: field(&f, 1, line)?,
            primal: f64::NAN,
            dual: f64::NAN,
            primal_subopt: field(&f, 2, line)?,
            dual_subopt: field(&f, 3, line)?,
            gap: field(&f, 4, line)?,
            loss_term: field(&f, 5, line)?,
            norm_term: field(&f, 6, line)?,
        })
    })
    .collect()
}
