use serde::{Deserialize, Serialize};

use super::sweep::SweepTable;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Spike threshold relative to the local median of `|second difference|`.
const SPIKE_FACTOR: f64 = 5.0;
/// Half-width of the local median window, and of the excluded core around the centre.
const WINDOW: usize = 6;
const CORE: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub j: usize,
    /// Centred second differences, indexed like the rows (zero at both ends).
    pub second: Vec<f64>,
    /// Row of the largest spike in each group of adjacent spikes.
    pub kinks: Vec<usize>,
    /// Rows where `lambda_j` meets a neighbouring eigenvalue.
    pub crossings: Vec<usize>,
    /// Kinks with no crossing within one grid step.
    pub flagged: Vec<Point>,
}

impl SmoothnessReport {
    pub fn passes(&self) -> bool {
        self.flagged.is_empty()
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn check_path(table: &SweepTable) -> Result<()> {
    let rows = &table.rows;
    if rows.len() < 2 * WINDOW + 1 {
        return Err(Error::Precondition(format!("path of {} poles is too short for the scan", rows.len())));
    }
    if let Some(r) = rows.iter().find(|r| r.error.is_some()) {
        return Err(Error::Precondition(format!(
            "pole ({}, {}) failed: {}",
            r.pole.x,
            r.pole.y,
            r.error.as_deref().unwrap_or("")
        )));
    }
    let step = rows[1].pole - rows[0].pole;
    let h = step.norm();
    if !(h > 0.0) {
        return Err(Error::Precondition("path has repeated poles".into()));
    }
    for w in rows.windows(2) {
        if (w[1].pole - w[0].pole - step).norm() > 1e-9 * h.max(1.0) {
            return Err(Error::Precondition("poles must follow a uniformly spaced straight path".into()));
        }
    }
    Ok(())
}

/// Rows where eigenvalues `j` and `j + 1` (1-based) meet: equal clusters, or a
/// local minimum of their gap no larger than the adjacent gap changes.
fn meetings(table: &SweepTable, j: usize) -> Vec<usize> {
    let n = table.rows.len();
    let lo = table.column(j);
    let hi = table.column(j + 1);
    let g: Vec<f64> = hi.iter().zip(&lo).map(|(a, b)| a - b).collect();
    (0..n)
        .filter(|&i| {
            let c = &table.rows[i].clusters;
            if c[j - 1] == c[j] {
                return true;
            }
            if i == 0 || i + 1 == n {
                return false;
            }
            g[i] <= g[i - 1] && g[i] <= g[i + 1] && g[i] <= (g[i + 1] - g[i]).abs().max((g[i] - g[i - 1]).abs())
        })
        .collect()
}

/// Second-difference kinks of `a -> lambda_j^a` along a uniform pole path,
/// each checked against the rows where `lambda_j` is not simple.
pub fn smoothness_scan(table: &SweepTable, j: usize) -> Result<SmoothnessReport> {
    if j == 0 || j + 1 > table.m {
        return Err(Error::Precondition(format!("smoothness scan of lambda_{j} needs m >= {}", j + 1)));
    }
    check_path(table)?;
    let n = table.rows.len();
    let lam = table.column(j);
    let mut second = vec![0.0; n];
    for i in 1..n - 1 {
        second[i] = lam[i - 1] - 2.0 * lam[i] + lam[i + 1];
    }
    let scale = lam.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // Remeshing noise is roughly uniform along the path, so the path-wide
    // median guards flat stretches where the local median is tiny.
    let global = median((1..n - 1).map(|i| second[i].abs()).collect());
    let floor = 1e-7 * scale + SPIKE_FACTOR * global;
    let spike: Vec<bool> = (0..n)
        .map(|i| {
            if i == 0 || i + 1 == n {
                return false;
            }
            let window: Vec<f64> = (i.saturating_sub(WINDOW).max(1)..=(i + WINDOW).min(n - 2))
                .filter(|&l| l.abs_diff(i) > CORE)
                .map(|l| second[l].abs())
                .collect();
            second[i].abs() > SPIKE_FACTOR * median(window) + floor
        })
        .collect();

    let mut kinks = Vec::new();
    let mut groups = Vec::new();
    let mut i = 0;
    while i < n {
        if spike[i] {
            let start = i;
            while i < n && spike[i] {
                i += 1;
            }
            let peak = (start..i).max_by(|&a, &b| second[a].abs().total_cmp(&second[b].abs())).unwrap();
            kinks.push(peak);
            groups.push((start, i - 1));
        } else {
            i += 1;
        }
    }

    let mut crossings = meetings(table, j);
    if j > 1 {
        crossings.extend(meetings(table, j - 1));
    }
    crossings.sort_unstable();
    crossings.dedup();

    let flagged = groups
        .iter()
        .filter(|&&(a, b)| !crossings.iter().any(|&c| c + 1 >= a && c <= b + 1))
        .map(|&(a, b)| {
            let peak = (a..=b).max_by(|&x, &y| second[x].abs().total_cmp(&second[y].abs())).unwrap();
            table.rows[peak].pole
        })
        .collect();
    Ok(SmoothnessReport { j, second, kinks, crossings, flagged })
}
