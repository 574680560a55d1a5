//! Compiles and runs a small C program against the generated header and the
//! static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "bsfwm.h"

int main(void) {
    BsfwmTransfer *t = NULL;
    if (bsfwm_transfer_ideal(3, 2.0 * M_PI / 9.0, &t) != BSFWM_STATUS_OK) return 10;
    double re[9], im[9];
    if (bsfwm_transfer_entries(t, re, im, 9) != BSFWM_STATUS_OK) return 11;
    for (int k = 0; k < 9; ++k)
        if (fabs(re[k] * re[k] + im[k] * im[k] - 1.0 / 3.0) > 1e-12) return 12;
    bsfwm_transfer_free(t);
    if (bsfwm_transfer_ideal(0, 0.0, &t) != BSFWM_STATUS_INVALID_INPUT) return 13;
    char msg[256];
    if (bsfwm_last_error(msg, sizeof msg, NULL) != BSFWM_STATUS_OK) return 14;
    printf("%s|%s\n", bsfwm_version(), msg);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libbsfwm_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-D_DEFAULT_SOURCE")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(env!("CARGO_PKG_VERSION")), "{text}");
}
