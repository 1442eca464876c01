//! Field serialization: two-column CSV and a small JSON record.
//!
//! CSV rows are `x,value` with 15 significant digits. The JSON record is
//! `{domain, n, l?, values}` with `l` present only on the truncated line.
//! Imported samples may live on a different resolution of the same domain;
//! they are moved to the target grid by trigonometric interpolation.

use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{build_grid, DomainSpec, Grid};

pub fn write_field_csv<W: Write>(field: &Field, mut out: W) -> Result<()> {
    writeln!(out, "x,value")?;
    for (x, v) in field.grid().x().iter().zip(field.values()) {
        writeln!(out, "{x:.15e},{v:.15e}")?;
    }
    Ok(())
}

/// Read `x,value` rows (header optional). Returns the raw columns.
pub fn read_xy_csv<R: BufRead>(input: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || (lineno == 0 && trimmed.starts_with('x')) {
            continue;
        }
        let mut parts = trimmed.split(',');
        let (Some(xs_str), Some(vs_str)) = (parts.next(), parts.next()) else {
            return Err(Error::Config(format!(
                "line {}: expected two comma-separated columns",
                lineno + 1
            )));
        };
        let x: f64 = xs_str
            .trim()
            .parse()
            .map_err(|e| Error::Config(format!("line {}: bad x value ({e})", lineno + 1)))?;
        let v: f64 = vs_str
            .trim()
            .parse()
            .map_err(|e| Error::Config(format!("line {}: bad value ({e})", lineno + 1)))?;
        xs.push(x);
        vs.push(v);
    }
    if xs.is_empty() {
        return Err(Error::Config("CSV holds no samples".into()));
    }
    Ok((xs, vs))
}

/// Resample imported `(x, value)` pairs onto `grid` by evaluating their
/// trigonometric interpolant. The import must sample the same domain
/// uniformly; its unpaired mode is dropped. Direct O(M * (M + N)) sums keep
/// this path independent of the fast transform.
pub fn resample_to_grid(xs: &[f64], values: &[f64], grid: &Arc<Grid>) -> Result<Field> {
    let m = xs.len();
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "resampling needs an even number of samples >= 4, got {m}"
        )));
    }
    let ds = xs[1] - xs[0];
    if ds <= 0.0 {
        return Err(Error::Config("sample abscissae must increase".into()));
    }
    for w in xs.windows(2) {
        if ((w[1] - w[0]) - ds).abs() > 1e-9 * ds.abs() {
            return Err(Error::Config("samples are not uniformly spaced".into()));
        }
    }
    let span = ds * m as f64;
    let (x0_expect, span_expect, dp) = match grid.domain() {
        DomainSpec::WholeLine { half_width, .. } => (
            -half_width,
            2.0 * half_width,
            std::f64::consts::PI / half_width,
        ),
        DomainSpec::PeriodicInterval { .. } => (0.0, 2.0 * std::f64::consts::PI, 1.0),
    };
    if (xs[0] - x0_expect).abs() > 1e-9 * span_expect
        || (span - span_expect).abs() > 1e-9 * span_expect
    {
        return Err(Error::Config(format!(
            "imported samples cover [{:.6}, {:.6}) but the grid expects [{:.6}, {:.6})",
            xs[0],
            xs[0] + span,
            x0_expect,
            x0_expect + span_expect
        )));
    }

    let root = (2.0 * std::f64::consts::PI).sqrt();
    let half = (m / 2) as i64;
    // forward coefficients of the import at its own frequencies; the slot
    // j = 0 is the unpaired mode and is dropped
    let mut coeffs = Vec::with_capacity(m);
    for j in 1..m as i64 {
        let mode = j - half;
        let p = dp * mode as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (&x, &v) in xs.iter().zip(values) {
            acc += v * Complex64::from_polar(1.0, -p * x);
        }
        coeffs.push((p, acc * ds / root));
    }
    // evaluate the interpolant on the target nodes
    let weight = dp / root;
    let out: Vec<f64> = grid
        .x()
        .iter()
        .map(|&x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(p, c) in &coeffs {
                acc += c * Complex64::from_polar(1.0, p * x);
            }
            weight * acc.re
        })
        .collect();
    Field::new(grid.clone(), out)
}

#[derive(Debug, Serialize, Deserialize)]
struct FieldRecord {
    domain: String,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    l: Option<f64>,
    values: Vec<f64>,
}

pub fn field_to_json(field: &Field) -> Result<String> {
    let grid = field.grid();
    let record = FieldRecord {
        domain: if grid.is_periodic() {
            "periodic_interval".into()
        } else {
            "whole_line".into()
        },
        n: grid.len(),
        l: grid.half_width(),
        values: field.values().to_vec(),
    };
    Ok(serde_json::to_string_pretty(&record)?)
}

pub fn field_from_json(text: &str) -> Result<Field> {
    let record: FieldRecord = serde_json::from_str(text)?;
    let domain = match record.domain.as_str() {
        "periodic_interval" => DomainSpec::PeriodicInterval { points: record.n },
        "whole_line" => DomainSpec::WholeLine {
            half_width: record.l.ok_or_else(|| {
                Error::Config("whole_line record requires the half-width l".into())
            })?,
            points: record.n,
        },
        other => return Err(Error::Config(format!("unknown domain '{other}'"))),
    };
    let grid = Arc::new(build_grid(domain)?);
    Field::new(grid, record.values)
}
