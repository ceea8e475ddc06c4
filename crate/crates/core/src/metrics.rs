//! Solved count, accuracy, total time and markup of a strategy's choices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::ProblemRecord;
use crate::error::{Error, Result};
use crate::polyset::VariableOrdering;

/// Relative excess of a chosen time over the optimum, shifted by one second.
pub fn markup(t_chosen: f64, t_optimal: f64) -> f64 {
    (t_chosen - t_optimal) / (t_optimal + 1.0)
}

/// Metrics over cell counts, present when every record carries them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub accuracy: f64,
    pub total_cells: u64,
    /// `(c_chosen - c_optimal) / c_optimal`, averaged.
    pub markup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub records: usize,
    pub solved: usize,
    pub time_accuracy: f64,
    pub total_time: f64,
    pub markup: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<CellReport>,
}

struct PerRecord {
    solved: bool,
    accurate: bool,
    time: f64,
    markup: f64,
    cells: Option<(bool, u64, f64)>,
}

fn per_record(r: &ProblemRecord, choice: &VariableOrdering) -> Result<PerRecord> {
    if choice.nvars() != r.nvars() {
        return Err(Error::InvalidOrdering(format!("{choice} for a {}-variable record `{}`", r.nvars(), r.id)));
    }
    let i = choice.index();
    let optimal = r.optimal_time();
    let time = r.penalized(choice);
    let cells = r.cells.as_ref().map(|c| {
        let best = *c.iter().min().expect("nonempty");
        let m = if best == 0 { 0.0 } else { (c[i] - best) as f64 / best as f64 };
        (c[i] == best, c[i], m)
    });
    Ok(PerRecord {
        solved: r.timings[i].is_some(),
        accurate: time == optimal,
        time,
        markup: markup(time, optimal),
        cells,
    })
}

/// Evaluates one choice per record. Accuracy counts ties with the fastest as accurate.
pub fn evaluate_strategy(choices: &[VariableOrdering], records: &[ProblemRecord]) -> Result<StrategyReport> {
    if choices.len() != records.len() {
        return Err(Error::Data(format!("{} choices for {} records", choices.len(), records.len())));
    }
    let rows = records
        .par_iter()
        .zip(choices)
        .map(|(r, c)| per_record(r, c))
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len();
    let frac = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    let mean = |s: f64| if n == 0 { 0.0 } else { s / n as f64 };
    let cells = if n > 0 && rows.iter().all(|r| r.cells.is_some()) {
        let c: Vec<(bool, u64, f64)> = rows.iter().map(|r| r.cells.expect("checked")).collect();
        Some(CellReport {
            accuracy: frac(c.iter().filter(|x| x.0).count()),
            total_cells: c.iter().map(|x| x.1).sum(),
            markup: mean(c.iter().map(|x| x.2).sum()),
        })
    } else {
        None
    };
    Ok(StrategyReport {
        records: n,
        solved: rows.iter().filter(|r| r.solved).count(),
        time_accuracy: frac(rows.iter().filter(|r| r.accurate).count()),
        total_time: rows.iter().map(|r| r.time).sum(),
        markup: mean(rows.iter().map(|r| r.markup).sum()),
        cells,
    })
}

/// Field-wise mean of several reports (fold averaging). Cell metrics survive
/// only if every report has them.
pub fn average_reports(reports: &[StrategyReport]) -> StrategyReport {
    let n = reports.len().max(1) as f64;
    let avg = |f: &dyn Fn(&StrategyReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let cells = if !reports.is_empty() && reports.iter().all(|r| r.cells.is_some()) {
        let c = |r: &StrategyReport| r.cells.clone().expect("checked");
        Some(CellReport {
            accuracy: avg(&|r| c(r).accuracy),
            total_cells: (reports.iter().map(|r| c(r).total_cells).sum::<u64>() as f64 / n).round() as u64,
            markup: avg(&|r| c(r).markup),
        })
    } else {
        None
    };
    StrategyReport {
        records: (reports.iter().map(|r| r.records).sum::<usize>() as f64 / n).round() as usize,
        solved: (reports.iter().map(|r| r.solved).sum::<usize>() as f64 / n).round() as usize,
        time_accuracy: avg(&|r| r.time_accuracy),
        total_time: avg(&|r| r.total_time),
        markup: avg(&|r| r.markup),
        cells,
    }
}
