//! Format sweeps over beyond-by-one tensor spaces and machine readable
//! reports.
//!
//! A sweep enumerates the formats `(n_1+1, ..., n_k+1, n+2)` with
//! `1 <= n_1 <= ... <= n_k <= max_n`, measures the rank of the contraction
//! map for random tensors under the two-primes, two-seeds protocol, and
//! classifies each row against the maximal-rank prediction
//! `max(0, domain - codomain)`. Rows are emitted in canonical format order
//! and the output is byte-identical across runs with the same primes,
//! seeds and version.

use serde::{Deserialize, Serialize};
use std::io::{self, Write};

use critspace::critical::{alpha_dims, generic_rank, span_codim_via_alpha, Protocol};
use critspace::format::beyond_by_one;
use critspace::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Cap on `domain * codomain` entries of the contraction matrix before a
/// format is recorded as skipped rather than computed.
pub const DEFAULT_MAX_CELLS: u128 = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// kernel equals the maximal-rank prediction
    MaxRank,
    /// kernel strictly exceeds the prediction
    Defective,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConjectureStatus {
    /// maximal rank observed, as conjectured
    Consistent,
    /// a kernel larger than predicted outside the known family; this would
    /// refute the maximal-rank conjecture
    Violation,
    /// the one proven-defective family `(2, n, n+2)`
    DefectiveFamily,
}

/// One sweep entry. Failures are recorded in the row and never abort the
/// sweep; skipped and failed rows leave the measured fields empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub format: String,
    pub domain_dim: u128,
    pub codomain_dim: u128,
    pub alpha_rank: Option<u128>,
    pub kernel_dim: Option<u128>,
    /// maximal-rank prediction `max(0, domain - codomain)`
    pub expected_kernel: u128,
    pub classification: Option<Classification>,
    pub conjecture_status: Option<ConjectureStatus>,
    pub error: Option<String>,
}

/// Settings of one sweep invocation.
#[derive(Clone, Copy, Debug)]
pub struct SweepConfig {
    pub protocol: Protocol,
    pub max_cells: u128,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            protocol: Protocol::default(),
            max_cells: DEFAULT_MAX_CELLS,
        }
    }
}

fn leading_tuples(k: usize, max_n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut tuple = vec![1usize; k];
    loop {
        out.push(tuple.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if tuple[i] < max_n {
                tuple[i] += 1;
                let v = tuple[i];
                for t in tuple.iter_mut().skip(i + 1) {
                    *t = v;
                }
                break;
            }
        }
    }
}

fn sweep_one(firsts: &[usize], config: &SweepConfig) -> SweepRow {
    let format = beyond_by_one(firsts).expect("tuple entries are positive");
    let (domain, codomain) = alpha_dims(&format).expect("constructed beyond by one");
    let expected_kernel = domain.saturating_sub(codomain);
    let family = firsts.len() == 2 && firsts[0] == 1;

    let mut row = SweepRow {
        format: format.to_string(),
        domain_dim: domain,
        codomain_dim: codomain,
        alpha_rank: None,
        kernel_dim: None,
        expected_kernel,
        classification: None,
        conjecture_status: None,
        error: None,
    };

    let cells = domain.saturating_mul(codomain.max(1));
    if cells > config.max_cells {
        row.error = Some(format!(
            "skipped: {cells} matrix cells exceed the cap of {}",
            config.max_cells
        ));
        return row;
    }

    match generic_rank(&format, &config.protocol, span_codim_via_alpha) {
        Ok(kernel) => {
            let kernel = kernel as u128;
            row.kernel_dim = Some(kernel);
            row.alpha_rank = Some(domain - kernel);
            let classification = if kernel > expected_kernel {
                Classification::Defective
            } else {
                Classification::MaxRank
            };
            row.classification = Some(classification);
            row.conjecture_status = Some(if family {
                ConjectureStatus::DefectiveFamily
            } else if classification == Classification::MaxRank {
                ConjectureStatus::Consistent
            } else {
                ConjectureStatus::Violation
            });
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Sweeps every beyond-by-one format with `k` leading factors and
/// `n_i <= max_n`. Rows come back in enumeration order regardless of the
/// order of completion.
pub fn sweep(k: usize, max_n: usize, config: &SweepConfig) -> Result<Vec<SweepRow>, Error> {
    sweep_resuming(k, max_n, config, &[])
}

/// [`sweep`] that reuses rows from an earlier partial run: formats whose
/// computation already succeeded (or were skipped by the guard) are not
/// recomputed, so an interrupted sweep can be continued. Rows with a
/// recorded failure are retried. The output is identical to a fresh sweep
/// with the same configuration.
pub fn sweep_resuming(
    k: usize,
    max_n: usize,
    config: &SweepConfig,
    previous: &[SweepRow],
) -> Result<Vec<SweepRow>, Error> {
    if k < 2 {
        return Err(Error::InvalidFormat(
            "sweep needs at least 2 leading factors".into(),
        ));
    }
    let done: std::collections::HashMap<&str, &SweepRow> = previous
        .iter()
        .filter(|r| r.kernel_dim.is_some() || r.error.as_deref().is_some_and(|e| e.starts_with("skipped")))
        .map(|r| (r.format.as_str(), r))
        .collect();
    let tuples = leading_tuples(k, max_n);
    let compute = |firsts: &Vec<usize>| -> SweepRow {
        let name = beyond_by_one(firsts).expect("positive entries").to_string();
        match done.get(name.as_str()) {
            Some(&row) => row.clone(),
            None => sweep_one(firsts, config),
        }
    };
    #[cfg(feature = "parallel")]
    {
        Ok(tuples.par_iter().map(compute).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(tuples.iter().map(compute).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    JsonLines,
    Csv,
}

pub const CSV_HEADER: &str =
    "format,domain_dim,codomain_dim,alpha_rank,kernel_dim,expected_kernel,classification,conjecture_status,error";

fn opt_to_csv<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

fn class_str(c: &Option<Classification>) -> &'static str {
    match c {
        Some(Classification::MaxRank) => "MaxRank",
        Some(Classification::Defective) => "Defective",
        None => "",
    }
}

fn status_str(s: &Option<ConjectureStatus>) -> &'static str {
    match s {
        Some(ConjectureStatus::Consistent) => "Consistent",
        Some(ConjectureStatus::Violation) => "Violation",
        Some(ConjectureStatus::DefectiveFamily) => "DefectiveFamily",
        None => "",
    }
}

/// Serializes rows losslessly, one JSON object or CSV record per line,
/// with a stable column order.
pub fn write_report(
    rows: &[SweepRow],
    format: ReportFormat,
    out: &mut impl Write,
) -> io::Result<()> {
    match format {
        ReportFormat::JsonLines => {
            for row in rows {
                let line = serde_json::to_string(row).expect("row serializes");
                writeln!(out, "{line}")?;
            }
        }
        ReportFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for row in rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    row.format,
                    row.domain_dim,
                    row.codomain_dim,
                    opt_to_csv(&row.alpha_rank),
                    opt_to_csv(&row.kernel_dim),
                    row.expected_kernel,
                    class_str(&row.classification),
                    status_str(&row.conjecture_status),
                    row.error.as_deref().unwrap_or("").replace(',', ";"),
                )?;
            }
        }
    }
    Ok(())
}
