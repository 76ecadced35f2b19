//! Derivative-free search over a [`SearchSpace`].
//!
//! The algorithm is fixed:
//!
//! 1. Evaluate the base configuration (clamped into the intervals).
//! 2. Evaluate `samples` Latin-hypercube points drawn from a ChaCha8
//!    stream seeded with the space seed.
//! 3. Compass pattern search from the best point so far: poll ±step along
//!    every non-degenerate axis in unit coordinates, move to the best
//!    improving poll point, otherwise halve the step. The step starts at
//!    0.25 and the search stops below 1e-3 or after `iterations` polls.
//!
//! Points are ranked feasible-first, then by objective; infeasible points
//! by their negative total constraint violation. Ties keep the earlier
//! point. Evaluations within a batch run in parallel and are merged in
//! generation order, so the trace depends only on the seed.

use std::cmp::Ordering;
use std::io::{self, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::feasibility::{constraint_ids, feasibility, FeasibilityReport};
use super::space::SearchSpace;
use super::SearchError;
use crate::config::SystemConfig;
use crate::options::AnalysisOptions;
use crate::stability::balance_lower_power;

const INITIAL_STEP: f64 = 0.25;
const MIN_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    MaxClassicalMargin,
    MaxCoaRatio,
    MinFsql,
}

impl Objective {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "max_classical_margin" => Some(Objective::MaxClassicalMargin),
            "max_coa_ratio" => Some(Objective::MaxCoaRatio),
            "min_fsql" => Some(Objective::MinFsql),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Objective::MaxClassicalMargin => "max_classical_margin",
            Objective::MaxCoaRatio => "max_coa_ratio",
            Objective::MinFsql => "min_fsql",
        }
    }

    /// Objective value of a report, if computable.
    pub fn value(self, report: &FeasibilityReport) -> Option<f64> {
        match self {
            Objective::MaxClassicalMargin => report.classical_margin,
            Objective::MaxCoaRatio => report.coa_ratio,
            Objective::MinFsql => report.f_sql,
        }
    }

    /// Larger-is-better form of `value`.
    fn oriented(self, v: f64) -> f64 {
        match self {
            Objective::MinFsql => -v,
            _ => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Baseline,
    Sample,
    Pattern,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Baseline => "baseline",
            Phase::Sample => "sample",
            Phase::Pattern => "pattern",
        }
    }
}

/// Lexicographic ranking key: feasibility first, then `value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub feasible: bool,
    /// Oriented objective when feasible, negative violation otherwise.
    pub value: f64,
}

impl Score {
    fn better_than(&self, other: &Score) -> bool {
        match self.feasible.cmp(&other.feasible) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => self.value > other.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub index: usize,
    pub phase: Phase,
    /// Parameter values in space order.
    pub params: Vec<f64>,
    /// Constraint margins in report order; empty when the point could not
    /// be evaluated.
    pub margins: Vec<f64>,
    pub objective: Option<f64>,
    pub feasible: bool,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub best: SystemConfig,
    pub report: FeasibilityReport,
    pub objective: Option<f64>,
    /// False when no feasible point was found; `best` is then the least
    /// infeasible point.
    pub feasible: bool,
    pub trace: Vec<TraceRow>,
}

struct Evaluated {
    config: SystemConfig,
    report: Option<FeasibilityReport>,
    score: Score,
}

fn evaluate(
    space: &SearchSpace,
    u: &[f64],
    objective: Objective,
    options: &AnalysisOptions,
) -> Evaluated {
    let mut config = space.configure(u);
    if options.solve_balance {
        config = balance_lower_power(&config);
    }
    let report = feasibility(&config, options).ok();
    let score = match &report {
        Some(r) if r.overall => Score {
            feasible: true,
            value: objective
                .value(r)
                .map(|v| objective.oriented(v))
                .unwrap_or(f64::NEG_INFINITY),
        },
        Some(r) => Score {
            feasible: false,
            value: -r.total_violation(),
        },
        None => Score {
            feasible: false,
            value: f64::NEG_INFINITY,
        },
    };
    Evaluated {
        config,
        report,
        score,
    }
}

/// Latin-hypercube design of `n` points in `d` dimensions.
#[allow(clippy::needless_range_loop)]
fn latin_hypercube(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; d]; n];
    for dim in 0..d {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(rng);
        for (i, s) in strata.into_iter().enumerate() {
            points[i][dim] = (s as f64 + rng.gen::<f64>()) / n as f64;
        }
    }
    points
}

pub fn optimize(
    space: &SearchSpace,
    objective: Objective,
    options: &AnalysisOptions,
) -> Result<OptimizeResult, SearchError> {
    let mut trace = Vec::new();
    let mut best: Option<(Vec<f64>, Evaluated)> = None;

    let run_batch = |phase: Phase,
                         batch: Vec<Vec<f64>>,
                         trace: &mut Vec<TraceRow>,
                         best: &mut Option<(Vec<f64>, Evaluated)>|
     -> bool {
        let results: Vec<Evaluated> = batch
            .par_iter()
            .map(|u| evaluate(space, u, objective, options))
            .collect();
        let mut improved = false;
        for (u, ev) in batch.into_iter().zip(results) {
            trace.push(TraceRow {
                index: trace.len(),
                phase,
                params: space
                    .parameters
                    .iter()
                    .zip(&u)
                    .map(|(p, &x)| p.at(x))
                    .collect(),
                margins: ev
                    .report
                    .as_ref()
                    .map(|r| r.constraints.iter().map(|c| c.value).collect())
                    .unwrap_or_default(),
                objective: ev.report.as_ref().and_then(|r| objective.value(r)),
                feasible: ev.score.feasible,
                score: ev.score.value,
            });
            let replace = match best {
                None => true,
                Some((_, b)) => ev.score.better_than(&b.score),
            };
            if replace {
                improved = best.is_some();
                *best = Some((u, ev));
            }
        }
        improved
    };

    run_batch(Phase::Baseline, vec![space.base_coordinates()], &mut trace, &mut best);

    let dims = space.parameters.len();
    let free: Vec<usize> = (0..dims)
        .filter(|&i| space.parameters[i].width() > 0.0)
        .collect();
    if !free.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(space.seed);
        let samples = latin_hypercube(&mut rng, space.samples, dims);
        run_batch(Phase::Sample, samples, &mut trace, &mut best);

        let mut step = INITIAL_STEP;
        for _ in 0..space.iterations {
            if step < MIN_STEP {
                break;
            }
            let centre = best.as_ref().map(|(u, _)| u.clone()).unwrap_or_default();
            let mut polls = Vec::new();
            for &i in &free {
                for dir in [1.0, -1.0] {
                    let mut u = centre.clone();
                    u[i] = (u[i] + dir * step).clamp(0.0, 1.0);
                    if u[i] != centre[i] && !polls.contains(&u) {
                        polls.push(u);
                    }
                }
            }
            if polls.is_empty() || !run_batch(Phase::Pattern, polls, &mut trace, &mut best) {
                step /= 2.0;
            }
        }
    }

    let (_, ev) = best.expect("baseline is always evaluated");
    let report = match ev.report {
        Some(r) => r,
        None => feasibility(&ev.config, options)?,
    };
    Ok(OptimizeResult {
        objective: objective.value(&report),
        feasible: report.overall,
        best: ev.config,
        report,
        trace,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.8e}")).unwrap_or_default()
}

/// One CSV row per evaluation: parameters, margins, objective.
pub fn write_trace_csv<W: Write>(
    mut out: W,
    space: &SearchSpace,
    trace: &[TraceRow],
) -> io::Result<()> {
    let ids = constraint_ids();
    write!(out, "index,phase")?;
    for p in &space.parameters {
        write!(out, ",{}", p.field.path())?;
    }
    for id in &ids {
        write!(out, ",margin_{id}")?;
    }
    writeln!(out, ",objective,feasible,score")?;
    for row in trace {
        write!(out, "{},{}", row.index, row.phase.as_str())?;
        for v in &row.params {
            write!(out, ",{v:.8e}")?;
        }
        for i in 0..ids.len() {
            write!(out, ",{}", fmt_opt(row.margins.get(i).copied()))?;
        }
        writeln!(
            out,
            ",{},{},{:.8e}",
            fmt_opt(row.objective),
            row.feasible,
            row.score
        )?;
    }
    Ok(())
}
