//! Side-by-side slacks of every estimate on the kernel, for tightness plots.

use serde::Serialize;

use super::{par_map, GridSpec};
use crate::error::Result;
use crate::estimates::{check, EstimateId, SolutionSample};
use crate::kernel::kernel;
use crate::SCHEMA_VERSION;

/// Column names, in output order.
pub const COMPARISON_COLUMNS: [&str; 10] = [
    "li_yau_1.5",
    "li_yau_2",
    "yau",
    "bakry_qian",
    "bakry_phi",
    "sharp_h3",
    "sharp_h3_simple",
    "general_h",
    "linearized_r0_0",
    "linearized_r0_1",
];

fn column_estimate(col: usize, n: usize) -> EstimateId {
    match col {
        0 => EstimateId::LiYau { alpha: 1.5, k: None },
        1 => EstimateId::LiYau { alpha: 2.0, k: None },
        2 => EstimateId::Yau { k: None },
        3 => EstimateId::BakryQian { k: None },
        4 => EstimateId::BakryPhi { k: None },
        5 => EstimateId::SharpH3,
        6 => EstimateId::SharpH3Simple,
        7 => EstimateId::general_for(n),
        8 => EstimateId::LinearizedH3 { r0: 0.0 },
        9 => EstimateId::LinearizedH3 { r0: 1.0 },
        _ => unreachable!("column {col}"),
    }
}

/// Slacks at one grid point; `None` where the estimate does not apply or the
/// evaluation failed (the message is kept in `errors`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub dim: usize,
    pub t: f64,
    pub r: f64,
    pub slacks: Vec<Option<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub schema_version: u32,
    pub columns: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    /// Column index by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// CSV with header `dim,t,r,<columns>,errors`; empty cells for missing values.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["dim".to_string(), "t".into(), "r".into()];
        header.extend(self.columns.iter().cloned());
        header.push("errors".into());
        w.write_record(&header).map_err(csv_error)?;
        for row in &self.rows {
            let mut rec = vec![row.dim.to_string(), row.t.to_string(), row.r.to_string()];
            rec.extend(row.slacks.iter().map(|s| s.map(|v| v.to_string()).unwrap_or_default()));
            rec.push(row.errors.join("; "));
            w.write_record(&rec).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::usage(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn csv_error(e: csv::Error) -> crate::Error {
    crate::Error::usage(format!("csv: {e}"))
}

fn compare_point(n: usize, t: f64, r: f64) -> ComparisonRow {
    let mut row = ComparisonRow {
        dim: n,
        t,
        r,
        slacks: vec![None; COMPARISON_COLUMNS.len()],
        errors: Vec::new(),
    };
    let sample = match kernel(n, t, r) {
        Ok(k) => SolutionSample::from_kernel(&k),
        Err(e) => {
            row.errors.push(format!("kernel: {e}"));
            return row;
        }
    };
    for (c, name) in COMPARISON_COLUMNS.iter().enumerate() {
        let id = column_estimate(c, n);
        if !id.applies_to(n) {
            continue;
        }
        match check(&id, &sample, 0.0) {
            Ok(o) => row.slacks[c] = Some(o.slack),
            Err(e) => row.errors.push(format!("{name}: {e}")),
        }
    }
    row
}

/// Slack of every applicable estimate at every grid point, with `k = n - 1`.
pub fn run_comparison_report(grid: &GridSpec) -> Result<ComparisonTable> {
    grid.validate()?;
    let total = grid.points_per_dim() * grid.dims.len();
    let rows = par_map(total, |i| {
        let (n, t, r) = grid.point(i);
        compare_point(n, t, r)
    });
    Ok(ComparisonTable {
        schema_version: SCHEMA_VERSION,
        columns: COMPARISON_COLUMNS.iter().map(|c| c.to_string()).collect(),
        rows,
    })
}
