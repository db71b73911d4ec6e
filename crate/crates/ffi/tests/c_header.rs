//! Compiles and runs a small C program against the generated header and the
//! static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "gpsol.h"

int main(void) {
    double a = 0.0;
    if (gpsol_dark_eom_rhs(0.0, 0.0, 1.0, -200.0, &a) != GPSOL_STATUS_OK) return 10;
    if (a > -0.00333 || a < -0.00334) return 11;

    GpsolConfig *cfg = NULL;
    const char *text = "mode=bright\nC=1\nD=-200\neta0=0.5\nxi0=0\nzeta0=0\nt_max=1\ntiers=eom\n";
    if (gpsol_config_parse(text, &cfg) != GPSOL_STATUS_OK) return 12;
    GpsolRecord *rec = NULL;
    if (gpsol_run(cfg, &rec) != GPSOL_STATUS_OK) return 13;
    size_t n = gpsol_record_rows(rec);
    double zeta[64];
    if (n != 11) return 14;
    if (gpsol_record_column(rec, GPSOL_COLUMN_X0_EOM, zeta, 64) != GPSOL_STATUS_OK) return 15;
    gpsol_record_free(rec);
    gpsol_config_free(cfg);

    GpsolConfig *bad = NULL;
    if (gpsol_config_parse("mode=dark\n", &bad) != GPSOL_STATUS_CONFIG) return 16;
    printf("%.6e %s\n", zeta[10], gpsol_last_error());
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // <target>/<profile>/deps/<this test>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let lib = target_dir().join("libgpsol_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();

    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());

    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let stdout = String::from_utf8(out.stdout).unwrap();
    // ζ(1) = 0.5 (1/300) t² to leading order
    let zeta: f64 = stdout.split_whitespace().next().unwrap().parse().unwrap();
    assert!((zeta - 1.0 / 600.0).abs() < 1e-6, "{stdout}");
    assert!(stdout.contains("missing key"), "{stdout}");
}
