//! Compiles and runs a small C program against the generated header and
//! the cdylib, proving the ABI end to end.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "shapcirc.h"

int main(void) {
    const char *circuit =
        "ddc 4\nv 1\nv 2\na 0 1\nn 2\nv 3\nv 4\na 4 5\nn 6\na 3 7\nn 8\n";
    const char *probs = "1 2/5\n2 1/2\n3 3/5\n4 4/5\n";

    ShapcircCircuit *c = NULL;
    ShapcircProbabilities *p = NULL;
    if (shapcirc_circuit_parse(circuit, &c) != SHAPCIRC_STATUS_OK) return 1;
    if (shapcirc_probabilities_parse(probs, &p) != SHAPCIRC_STATUS_OK) return 2;

    char *ev = NULL;
    char *score = NULL;
    double value = 0.0;
    if (shapcirc_ev_rational(c, p, &ev) != SHAPCIRC_STATUS_OK) return 3;
    if (shapcirc_score_rational(c, p, 3, SHAPCIRC_COEFFICIENT_SHAPLEY, &score)
            != SHAPCIRC_STATUS_OK) return 4;
    if (shapcirc_ev(c, p, &value) != SHAPCIRC_STATUS_OK) return 5;
    printf("%s %s %.3f\n", ev, score, value);

    shapcirc_string_free(ev);
    shapcirc_string_free(score);
    shapcirc_circuit_free(c);
    shapcirc_probabilities_free(p);

    /* Error path: bad input reports a status and a message. */
    ShapcircCircuit *bad = NULL;
    if (shapcirc_circuit_parse("ddc what\n", &bad)
            != SHAPCIRC_STATUS_INVALID_INPUT) return 6;
    if (strlen(shapcirc_last_error()) == 0) return 7;
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    match std::env::var_os("CARGO_TARGET_DIR") {
        Some(dir) => PathBuf::from(dir),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../target"),
    }
}

#[test]
fn c_program_runs_against_the_abi() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    let lib_dir = target_dir().join("debug/deps");
    let cdylib = lib_dir.join("libshapcirc_ffi.so");
    assert!(cdylib.exists(), "cdylib not built at {}", cdylib.display());

    let work = tempfile::tempdir().unwrap();
    let source = work.path().join("smoke.c");
    let binary = work.path().join("smoke");
    std::fs::write(&source, PROGRAM).unwrap();

    let compile = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Wextra")
        .arg("-Werror")
        .arg("-pedantic")
        .arg("-I")
        .arg(&include)
        .arg(&source)
        .arg(&cdylib)
        .arg("-o")
        .arg(&binary)
        .output()
        .expect("cc available");
    assert!(
        compile.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&binary)
        .env("LD_LIBRARY_PATH", &lib_dir)
        .output()
        .expect("smoke binary runs");
    assert!(
        run.status.success(),
        "smoke binary exited with {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout), "73/125 27/125 0.584\n");
}
