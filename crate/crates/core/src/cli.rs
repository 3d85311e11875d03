//! What the `gro-market` subcommands do, separated from argument parsing.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::experiment::Experiment;
use crate::harness::audit::{submartingale_audit, survival_test};
use crate::harness::suites::{run_suites, Suite, SuiteOptions, VerifyReport};
use crate::harness::summary::{ExperimentSummary, PathSummary};
use crate::harness::wealth::theorem4_audit;
use crate::harness::CheckReport;
use crate::market::fmt_f64;
use crate::payoff::{DiscreteDistribution, Market, PayoffModel};
use crate::zeta::gro_solution;

pub const OUT_DIR_ENV: &str = "GRO_MARKET_OUT_DIR";

#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub csv: Vec<PathBuf>,
    pub summary: PathBuf,
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    config: &'a ExperimentConfig,
    summary: &'a ExperimentSummary,
}

/// Write `path_NNNN.csv` for every path and `summary.json` into `out_dir`.
pub fn run_simulate(cfg: &ExperimentConfig, out_dir: &Path) -> Result<SimulateOutput> {
    let exp = cfg.build()?;
    fs::create_dir_all(out_dir)?;
    let results = exp.map_paths(|path, rec| {
        let file = out_dir.join(format!("path_{path:04}.csv"));
        let mut w = BufWriter::new(fs::File::create(&file)?);
        rec.write_csv(&mut w)?;
        w.flush()?;
        Ok((file, PathSummary::from_record(path, &rec)))
    })?;
    let (csv, paths): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let summary = ExperimentSummary::from_paths(paths);
    let file = out_dir.join("summary.json");
    let text = serde_json::to_string_pretty(&SummaryFile {
        config: cfg,
        summary: &summary,
    })
    .map_err(|e| Error::Io(e.to_string()))?;
    fs::write(&file, text + "\n")?;
    Ok(SimulateOutput { csv, summary: file })
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub passed: bool,
    pub report: VerifyReport,
    /// Audits of the user's own configuration, when one was given.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub config_checks: Vec<CheckReport>,
}

pub fn run_verify(
    suite: Suite,
    opts: &SuiteOptions,
    config: Option<&ExperimentConfig>,
) -> Result<VerifyOutcome> {
    let report = run_suites(suite, opts)?;
    let config_checks = match config {
        Some(cfg) => config_audit(&cfg.build()?)?,
        None => Vec::new(),
    };
    Ok(VerifyOutcome {
        passed: report.passed && config_checks.iter().all(|c| c.passed),
        report,
        config_checks,
    })
}

/// The exact drift and survival checks on every optimal investor of `exp`,
/// plus the discounted-wealth audit when all investors are optimal and
/// every interest factor is positive.
pub fn config_audit(exp: &Experiment<Market>) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    if exp.rules.iter().any(|r| r.claims_optimal()) {
        let a = submartingale_audit(exp)?;
        out.extend([a.drift, a.bound, a.complement]);
        for (m, _) in exp.rules.iter().enumerate().filter(|(_, r)| r.is_gro()) {
            let mut s = survival_test(exp, m)?.check;
            s.name = format!("survival_investor_{}", m + 1);
            out.push(s);
        }
    }
    let positive = (0..exp.model.num_states()).all(|s| exp.model.rate(s) > 0.0);
    if exp.rules.iter().all(|r| r.is_gro()) && positive {
        let a = theorem4_audit(exp)?;
        out.extend([a.supermartingale, a.growth_equation]);
    }
    Ok(out)
}

/// Solve for the cash level and print it with the optimal proportions.
pub fn run_zeta(c: f64, rho: f64, literal: &str, tol: f64) -> Result<String> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain(format!("wealth c = {c} must be positive")));
    }
    let law: DiscreteDistribution = literal.parse()?;
    let (sol, lambda) = gro_solution(c, rho, &law, tol)?;
    let weights: Vec<String> = lambda.as_slice().iter().map(|w| fmt_f64(*w)).collect();
    Ok(format!(
        "zeta = {}\nin_gamma = {}\nresidual = {}\nlambda = {}\n",
        fmt_f64(sol.zeta),
        sol.in_gamma,
        fmt_f64(sol.residual),
        weights.join(",")
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_output() {
        let out = run_zeta(5.0, 1.0, "2:1.0", 1e-12).unwrap();
        assert!(out.contains("zeta = 3.0000000000000000e0"), "{out}");
        assert!(out.contains("lambda = 4.0000000000000002e-1"), "{out}");
        let out = run_zeta(1.0, 0.0, "2:1.0", 1e-12).unwrap();
        assert!(
            out.contains("zeta = 0.0000000000000000e0")
                && out.contains("lambda = 1.0000000000000000e0")
        );
        assert!(run_zeta(0.0, 1.0, "2:1.0", 1e-12).is_err());
    }

    #[test]
    fn config_audit_of_presets() {
        for name in ["all-gro", "growth-duel", "discounted-constant"] {
            let mut cfg = ExperimentConfig::preset(name).unwrap();
            cfg.horizon = cfg.horizon.min(50);
            cfg.paths = 2;
            let checks = config_audit(&cfg.build().unwrap()).unwrap();
            assert!(!checks.is_empty());
            assert!(checks.iter().all(|c| c.passed), "{name}: {checks:?}");
        }
    }
}
