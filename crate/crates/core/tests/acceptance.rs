//! Acceptance criteria, one line each.  Exits non-zero if any criterion
//! fails; a failing criterion names its failing checks.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gro_market::cli::run_simulate;
use gro_market::config::ExperimentConfig;
use gro_market::harness::suites::{
    equilibrium_check, run_suite, zeta_checks, Suite, SuiteOptions, SuiteReport,
};
use gro_market::harness::CheckReport;

struct Outcome {
    passed: bool,
    detail: String,
}

fn judge(checks: &[&CheckReport], limit: Option<(Duration, Duration)>) -> Outcome {
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} (worst margin {:e})", c.name, c.worst_margin))
        .collect();
    let mut passed = failed.is_empty();
    let mut detail = checks
        .iter()
        .map(|c| format!("{}: {} checked", c.name, c.checked))
        .collect::<Vec<_>>()
        .join("; ");
    if let Some((took, max)) = limit {
        detail.push_str(&format!(
            "; {:.2}s of {}s",
            took.as_secs_f64(),
            max.as_secs()
        ));
        if took > max {
            passed = false;
            detail.push_str(" TOO SLOW");
        }
    }
    if !failed.is_empty() {
        detail = format!("failed: {}; {detail}", failed.join(", "));
    }
    Outcome { passed, detail }
}

fn pick<'a>(r: &'a SuiteReport, names: &[&str]) -> Vec<&'a CheckReport> {
    names
        .iter()
        .map(|n| {
            r.check(n)
                .unwrap_or_else(|| panic!("suite {} has no check {n}", r.suite))
        })
        .collect()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn suite(s: Suite, opts: &SuiteOptions) -> (SuiteReport, Duration) {
    timed(|| run_suite(s, opts).expect("suite runs"))
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect()
}

fn determinism() -> Outcome {
    let mut cfg = ExperimentConfig::preset("survival").unwrap();
    cfg.paths = 6;
    cfg.horizon = 300;
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_simulate(&cfg, a.path()).unwrap();
    run_simulate(&cfg, b.path()).unwrap();
    let lib_same = read_dir_bytes(a.path()) == read_dir_bytes(b.path());

    let cli = |dir: &Path| {
        Command::new(env!("CARGO_BIN_EXE_gro-market"))
            .args([
                "example",
                "dominance",
                "--paths",
                "4",
                "--horizon",
                "200",
                "--seed",
                "7",
                "--out-dir",
            ])
            .arg(dir)
            .status()
            .unwrap()
            .success()
    };
    let (c, d) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cli_ok = cli(c.path()) && cli(d.path());
    let cli_same = read_dir_bytes(c.path()) == read_dir_bytes(d.path());
    Outcome {
        passed: lib_same && cli_ok && cli_same,
        detail: format!(
            "library output identical: {lib_same}; CLI output identical: {}",
            cli_ok && cli_same
        ),
    }
}

fn main() -> ExitCode {
    let opts = SuiteOptions::default();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();

    let (gibbs, t) = suite(Suite::Gibbs, &opts);
    results.push((
        1,
        "Gibbs-type inequality",
        judge(
            &pick(
                &gibbs,
                &["gibbs_gap_nonnegative", "gibbs_gap_reference_values"],
            ),
            Some((t, secs(5))),
        ),
    ));

    let (zeta, t) = timed(|| zeta_checks(opts.seed).unwrap());
    results.push((
        2,
        "cash level solver",
        judge(&[&zeta[0], &zeta[1]], Some((t, secs(5)))),
    ));
    results.push((3, "cash identity", judge(&[&zeta[2]], None)));

    let (drift, t) = suite(Suite::Drift, &opts);
    results.push((
        4,
        "submartingale audit",
        judge(
            &pick(
                &drift,
                &["drift", "compensator_bound", "supermartingale_complement"],
            ),
            Some((t, secs(60))),
        ),
    ));
    let eq = equilibrium_check(opts.seed, 10).unwrap();
    results.push((5, "all-optimal equilibrium", judge(&[&eq], None)));

    let (dom, t) = suite(Suite::Dominance, &opts);
    results.push((
        6,
        "dominance",
        judge(&pick(&dom, &["dominance"]), Some((t, secs(60)))),
    ));

    let (surv, _) = suite(Suite::Survival, &opts);
    let mut o = judge(&pick(&surv, &["survival"]), None);
    o.detail.push_str(&format!(
        "; lowest minimum {:e}, paths below 1e-6: {}",
        surv.info["lowest_minimum"].as_f64().unwrap_or(f64::NAN),
        surv.info["paths_below_floor"]
    ));
    results.push((7, "survival", o));

    let (growth, _) = suite(Suite::Growth, &opts);
    results.push((
        8,
        "growth rates",
        judge(
            &pick(
                &growth,
                &["two_investor_log_growth", "three_investor_counterexample"],
            ),
            None,
        ),
    ));

    let (t4, _) = suite(Suite::Theorem4, &opts);
    results.push((
        9,
        "discounted total wealth",
        judge(
            &pick(
                &t4,
                &[
                    "inverse_discounted_wealth_supermartingale",
                    "discounted_wealth_equation",
                    "constant_payoff_closed_form",
                    "discounted_wealth_diverges",
                    "discount_reduction",
                ],
            ),
            None,
        ),
    ));

    let (ex6, t) = suite(Suite::Example6, &opts);
    let mut o = judge(
        &pick(
            &ex6,
            &[
                "engine_matches_recursion",
                "gro_proportion_half",
                "alpha_bounds",
                "r2_converges",
                "wealth_vanishes",
                "cash_only_keeps_wealth",
            ],
        ),
        Some((t, secs(60))),
    );
    o.detail.push_str(&format!(
        "; r2_T = {}, W_T/W_1 = {}",
        ex6.info["r2_limit_estimate"], ex6.info["w_ratio"]
    ));
    results.push((10, "vanishing-wealth example", o));

    results.push((11, "determinism", determinism()));

    let mut all = true;
    for (n, name, o) in &results {
        all &= o.passed;
        println!(
            "criterion {n:>2} {:<4} {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
