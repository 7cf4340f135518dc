use std::path::Path;
use std::process::Command;

const HEADER: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/include/solver_kit.h");

#[test]
fn header_declares_every_entry_point() {
    let text = std::fs::read_to_string(HEADER).unwrap();
    for name in [
        "sk_last_error_message",
        "sk_version",
        "sk_matrix_from_matrix_market",
        "sk_matrix_load",
        "sk_matrix_from_csr",
        "sk_matrix_read_csro",
        "sk_matrix_write_csro",
        "sk_matrix_dims",
        "sk_matrix_free",
        "sk_spmv",
        "sk_solver_config_default",
        "sk_solve",
        "sk_perf_config_default",
        "sk_model_solver",
        "typedef struct SkMatrix SkMatrix;",
        "SK_STATUS_NOT_CONVERGED = 8",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

/// Compiles a small C translation unit against the header when a C
/// compiler is on the PATH.
#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        r#"#include "solver_kit.h"
int main(void) {
    SkMatrix *m = NULL;
    SkSolverConfig cfg = sk_solver_config_default();
    SkSolveSummary s;
    cfg.precond = SK_PRECOND_ILU0;
    if (sk_matrix_load("a.mtx", &m) != SK_STATUS_OK) return 1;
    (void)sk_solve(m, NULL, NULL, NULL, 0, &cfg, &s);
    sk_matrix_free(m);
    return 0;
}
"#,
    )
    .unwrap();
    let include = Path::new(HEADER).parent().unwrap();
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(include)
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}
