//! Distribution summaries over bills of materials.
//!
//! Quartiles use the inclusive linear-interpolation method (the value at
//! rank `p * (n - 1)`, 0-based, interpolated); SD is the sample standard
//! deviation with the n−1 denominator. A single observation has no sample
//! SD; it is reported as 0 with `sd_degenerate` set.

use serde::{Deserialize, Serialize};

use crate::bom::BillOfMaterials;
use crate::deps::Scope;
use crate::error::{Error, Result};

/// One distribution row: Median / Min / Max / Q1 / Q3 / SD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatLine {
    pub label: String,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub q1: f64,
    pub q3: f64,
    pub sd: f64,
    /// True when n = 1 and the sample SD is undefined (reported as 0).
    pub sd_degenerate: bool,
}

/// Distribution rows over construct counts and dependency counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    /// app constructs, dependency constructs, app + dependency constructs.
    pub construct_rows: Vec<StatLine>,
    /// all, runtime, and test dependency counts.
    pub dependency_rows: Vec<StatLine>,
}

/// Inclusive linear-interpolation quantile of a sorted slice.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = (n - 1) as f64 * p;
    let lo = rank.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = rank - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Sample standard deviation (n−1); (0, true) for a single observation.
fn sample_sd(values: &[f64]) -> (f64, bool) {
    let n = values.len();
    if n < 2 {
        return (0.0, true);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    ((ss / (n - 1) as f64).sqrt(), false)
}

/// Distribution row over one count vector.
pub fn stat_line(label: &str, counts: &[usize]) -> Result<StatLine> {
    if counts.is_empty() {
        return Err(Error::EmptySummaryInput);
    }
    let mut values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("counts are finite"));
    let (sd, sd_degenerate) = sample_sd(&values);
    Ok(StatLine {
        label: label.to_owned(),
        median: quantile(&values, 0.5),
        min: values[0],
        max: values[values.len() - 1],
        q1: quantile(&values, 0.25),
        q3: quantile(&values, 0.75),
        sd,
        sd_degenerate,
    })
}

/// Summarizes construct and dependency counts over a set of BOMs.
pub fn summarize(boms: &[BillOfMaterials]) -> Result<SummaryTable> {
    if boms.is_empty() {
        return Err(Error::EmptySummaryInput);
    }
    let app: Vec<usize> = boms.iter().map(|b| b.stats.app_count).collect();
    let dep: Vec<usize> = boms.iter().map(|b| b.stats.dep_count).collect();
    let total: Vec<usize> = boms.iter().map(|b| b.stats.total).collect();

    let all_deps: Vec<usize> = boms.iter().map(|b| b.dep_entries.len()).collect();
    let runtime_deps: Vec<usize> = boms
        .iter()
        .map(|b| {
            b.dep_entries
                .iter()
                .filter(|d| d.scope == Scope::Runtime)
                .count()
        })
        .collect();
    let test_deps: Vec<usize> = boms
        .iter()
        .map(|b| {
            b.dep_entries
                .iter()
                .filter(|d| d.scope == Scope::Test)
                .count()
        })
        .collect();

    Ok(SummaryTable {
        construct_rows: vec![
            stat_line("app constructs", &app)?,
            stat_line("dep constructs", &dep)?,
            stat_line("app + dep constructs", &total)?,
        ],
        dependency_rows: vec![
            stat_line("all deps", &all_deps)?,
            stat_line("runtime deps", &runtime_deps)?,
            stat_line("test deps", &test_deps)?,
        ],
    })
}
