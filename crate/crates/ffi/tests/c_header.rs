//! Compiles and runs a small C program against the generated header and
//! the static library.  Skipped when no C compiler is on the path.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "gro_market.h"

int main(void) {
    double payoffs[] = {0.5, 2.0};
    double probs[] = {0.5, 0.5};
    double zeta = 0.0, lambda = 0.0;
    bool in_gamma = false;
    GroStatus s = gro_solve_zeta(1.0, 1.0, payoffs, probs, 2, 1, 1e-12, &zeta, &in_gamma, &lambda);
    if (s != GRO_STATUS_OK) return 1;
    printf("%.12f %.12f\n", zeta, lambda);

    GroConfig *cfg = NULL;
    if (gro_config_preset("discounted-constant", &cfg) != GRO_STATUS_OK) return 2;
    GroTrajectory *traj = NULL;
    if (gro_simulate_path(cfg, 0, &traj) != GRO_STATUS_OK) return 3;
    double y[2];
    if (gro_trajectory_wealth(traj, 5, y, 2) != GRO_STATUS_OK) return 4;
    printf("%.12f\n", y[0] + y[1]);
    gro_trajectory_free(traj);
    gro_config_free(cfg);

    if (gro_config_preset("missing", &cfg) != GRO_STATUS_INVALID_CONFIG) return 5;
    char msg[256];
    gro_last_error_message(msg, sizeof msg);
    printf("%s\n", msg);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let lib = target_dir().join("libgro_market_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "C program exited with {:?}",
        out.status
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let want = (-3.0 + 13f64.sqrt()) / 4.0;
    let zeta: f64 = lines[0].split(' ').next().unwrap().parse().unwrap();
    assert!((zeta - want).abs() < 1e-10);
    assert_eq!(lines[1], "5.000000000000");
    assert!(lines[2].contains("unknown preset"));
}
