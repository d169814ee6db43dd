use std::io::{self, Write};

use super::FlowMode;
use crate::csv::fmt_f64;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub dt: f64,
    pub log_scale: f64,
    /// `V_j` for `j` in [`TrajectoryRecord::quermass_indices`] order.
    pub quermass: Vec<f64>,
    /// `I_m` for `m` in [`TrajectoryRecord::ratio_indices`] order.
    pub ratios: Vec<f64>,
    pub r_t: f64,
    pub roundness_rescaled: f64,
    pub min_sigma_k: f64,
}

/// Sampled time series of one flow run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub n: usize,
    pub k: usize,
    pub mode: FlowMode,
    pub rows: Vec<TrajectoryRow>,
}

impl TrajectoryRecord {
    pub fn new(n: usize, k: usize, mode: FlowMode) -> Self {
        Self { n, k, mode, rows: Vec::new() }
    }

    /// `n+1, n, …, max(n−k, 1)`.
    pub fn quermass_indices(&self) -> Vec<usize> {
        (self.n.saturating_sub(self.k).max(1)..=self.n + 1).rev().collect()
    }

    /// `0, …, min(k, n−1)`.
    pub fn ratio_indices(&self) -> Vec<usize> {
        (0..=self.k.min(self.n - 1)).collect()
    }

    pub fn header(&self) -> Vec<String> {
        let mut cols: Vec<String> = ["t", "dt", "log_scale"].iter().map(|s| s.to_string()).collect();
        cols.extend(self.quermass_indices().iter().map(|j| format!("V{j}")));
        cols.extend(self.ratio_indices().iter().map(|m| format!("I{m}")));
        cols.extend(["r_t", "roundness_rescaled", "min_sigma_k"].iter().map(|s| s.to_string()));
        cols
    }

    /// Series of `V_j`, if recorded.
    pub fn quermass_series(&self, j: usize) -> Option<Vec<f64>> {
        let pos = self.quermass_indices().iter().position(|&x| x == j)?;
        Some(self.rows.iter().map(|r| r.quermass[pos]).collect())
    }

    /// Series of `I_m`, if recorded.
    pub fn ratio_series(&self, m: usize) -> Option<Vec<f64>> {
        let pos = self.ratio_indices().iter().position(|&x| x == m)?;
        Some(self.rows.iter().map(|r| r.ratios[pos]).collect())
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn last(&self) -> Option<&TrajectoryRow> {
        self.rows.last()
    }
}

/// Trajectory CSV with the column layout of [`TrajectoryRecord::header`].
pub fn write_trajectory_csv<W: Write>(record: &TrajectoryRecord, mut out: W) -> io::Result<()> {
    writeln!(out, "{}", record.header().join(","))?;
    for row in &record.rows {
        let mut fields = vec![fmt_f64(row.t), fmt_f64(row.dt), fmt_f64(row.log_scale)];
        fields.extend(row.quermass.iter().map(|&v| fmt_f64(v)));
        fields.extend(row.ratios.iter().map(|&v| fmt_f64(v)));
        fields.extend([row.r_t, row.roundness_rescaled, row.min_sigma_k].iter().map(|&v| fmt_f64(v)));
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
