//! Helpers for the acceptance run.

use std::path::PathBuf;

/// Path of the `backscatter` binary in the shared target directory.
///
/// Test executables live in `target/<profile>/deps`, the binary one level up.
/// `cargo test --workspace` builds it alongside the CLI crate's own tests;
/// when running this package alone, build it first with
/// `cargo build -p backscatter-cli`.
pub fn cli_binary() -> PathBuf {
    let exe = std::env::current_exe().expect("test executable path");
    let dir = exe.parent().and_then(|d| d.parent()).expect("target/<profile> directory");
    let bin = dir.join(format!("backscatter{}", std::env::consts::EXE_SUFFIX));
    assert!(bin.exists(), "{} not found; run `cargo build -p backscatter-cli` first", bin.display());
    bin
}
