//! Self-describing CSV output.
//!
//! Every file starts with `#` comment lines recording the command, the
//! crate version and each parameter, followed by a header row and data
//! rows. Nothing time- or machine-dependent is written, so equal configs
//! give byte-identical files.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::groups::FiniteSubgroup;
use crate::kazhdan::Correction;
use crate::lemma51::Lemma51Report;
use crate::net::CoverReport;
use crate::roundgroup::{EnergyMode, EnergyStats, FiberProfile};
use crate::stats::OpTableStats;
use crate::words::GenericityTable;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(command: impl Into<String>) -> Self {
        ExperimentConfig {
            command: command.into(),
            params: Vec::new(),
            output: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Display) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn output(mut self, path: Option<PathBuf>) -> Self {
        self.output = path;
        self
    }

    pub fn header(&self) -> String {
        let mut out = format!("# so3round {VERSION}\n# command {}\n", self.command);
        for (k, v) in &self.params {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        if let Some(p) = &self.output {
            out.push_str(&format!("# output = {}\n", p.display()));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Header row and data rows, without comments.
    pub fn body(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, config: &ExperimentConfig) -> String {
        config.header() + &self.body()
    }

    pub fn write(&self, config: &ExperimentConfig, path: &Path) -> Result<()> {
        fs::write(path, self.render(config))?;
        Ok(())
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Everything after the comment lines.
pub fn strip_comments(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn stats_cells(s: &OpTableStats) -> Vec<String> {
    vec![
        s.trials.to_string(),
        s.hits.to_string(),
        num(s.rate),
        num(s.ci95.0),
        num(s.ci95.1),
        s.seed.to_string(),
    ]
}

/// Columns `delta, n, trials, hits, rate, ci_lo, ci_hi, seed`.
pub fn op_stats_table(delta: f64, n: usize, stats: &OpTableStats) -> Table {
    let mut t = Table::new(&[
        "delta", "n", "trials", "hits", "rate", "ci_lo", "ci_hi", "seed",
    ]);
    let mut row = vec![num(delta), n.to_string()];
    row.extend(stats_cells(stats));
    t.push(row);
    t
}

pub fn energy_table(delta: f64, n: usize, e: &EnergyStats) -> Table {
    let mut t = Table::new(&[
        "delta",
        "n",
        "mode",
        "eta",
        "trials",
        "hits",
        "rate",
        "ci_lo",
        "ci_hi",
        "seed",
        "normalized_energy",
    ]);
    let (mode, eta) = match e.mode {
        EnergyMode::Table => ("table", String::new()),
        EnergyMode::Metric { eta } => ("metric", num(eta)),
    };
    let mut row = vec![num(delta), n.to_string(), mode.to_string(), eta];
    row.extend(stats_cells(&e.stats));
    row.push(num(e.normalized_energy));
    t.push(row);
    t
}

/// Columns `fiber_size, count`; sizes with zero count are skipped.
pub fn fiber_table(p: &FiberProfile) -> Table {
    let mut t = Table::new(&["fiber_size", "count"]);
    for (size, &count) in p.histogram.iter().enumerate().filter(|(_, c)| **c > 0) {
        t.push(vec![size.to_string(), count.to_string()]);
    }
    t
}

pub fn cover_table(delta: f64, n: usize, c: &CoverReport, min_distance: Option<f64>) -> Table {
    let mut t = Table::new(&[
        "delta",
        "n",
        "samples",
        "max_gap",
        "covers",
        "min_pairwise_distance",
    ]);
    t.push(vec![
        num(delta),
        n.to_string(),
        c.samples.to_string(),
        num(c.max_gap),
        c.pass.to_string(),
        min_distance.map(num).unwrap_or_default(),
    ]);
    t
}

pub fn lemma51_table(r: &Lemma51Report) -> Table {
    let mut t = Table::new(&["stratum", "a_norm", "comm_norm", "dist", "ratio"]);
    for s in &r.samples {
        t.push(vec![
            s.stratum.name().to_string(),
            num(s.a_norm),
            num(s.comm_norm),
            num(s.dist),
            num(s.ratio),
        ]);
    }
    t
}

pub fn genericity_csv(g: &GenericityTable) -> Table {
    let mut t = Table::new(&["s", "eta", "samples", "hits", "p_hat", "seed"]);
    for r in &g.rows {
        t.push(vec![
            g.s.to_string(),
            num(r.eta),
            g.samples.to_string(),
            r.hits.to_string(),
            num(r.p_hat),
            g.seed.to_string(),
        ]);
    }
    t
}

pub fn word_check_table(word: &str, results: &[(&FiniteSubgroup, f64)]) -> Table {
    let mut t = Table::new(&["word", "group", "order", "max_norm"]);
    for (g, v) in results {
        t.push(vec![
            word.to_string(),
            g.kind().to_string(),
            g.order().to_string(),
            num(*v),
        ]);
    }
    t
}

pub fn kazhdan_table(c: &Correction) -> Table {
    let mut t = Table::new(&["iter", "defect", "sup_dist"]);
    for r in &c.history {
        t.push(vec![r.iter.to_string(), num(r.defect), num(r.sup_dist)]);
    }
    t
}
