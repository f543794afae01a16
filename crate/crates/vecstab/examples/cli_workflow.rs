//! The command-line surface end to end, driven in-process: generate the
//! benchmark, certify it, sweep levels, and replay trajectories against the
//! written certificate. Each call is exactly what the `vecstab` binary runs.
//!
//!     cargo run --example cli_workflow

use vecstab::cli::{run, EXIT_CERTIFIED, EXIT_UNCERTIFIABLE};

fn vecstab(args: &[&str]) -> i32 {
    let mut full = vec!["vecstab"];
    full.extend_from_slice(args);
    println!("\n$ vecstab {}", args.join(" "));
    run(full)
}

fn main() {
    let dir = std::env::temp_dir().join("vecstab_cli_workflow");
    std::fs::create_dir_all(&dir).unwrap();
    let p = |name: &str| dir.join(name).to_str().unwrap().to_string();

    let code = vecstab(&["benchmark", "--seed", "42", "--out", &p("net.json")]);
    assert_eq!(code, EXIT_CERTIFIED);

    // A level inside the certifiable range: exit 0 and a report whose
    // numbers rerun byte-identically.
    let code = vecstab(&[
        "analyze",
        "--network",
        &p("net.json"),
        "--gamma",
        "0.1",
        "--approach",
        "both",
        "--out",
        &p("report.json"),
    ]);
    assert_eq!(code, EXIT_CERTIFIED);

    // Push the level to the edge of the per-subsystem regions: self-decay
    // vanishes there and no comparison matrix can be both Hurwitz and
    // invariant. The report is still written, with exit code 2.
    let code = vecstab(&[
        "analyze",
        "--network",
        &p("net.json"),
        "--gamma",
        "0.999",
        "--approach",
        "direct",
        "--out",
        &p("report_hot.json"),
    ]);
    assert_eq!(code, EXIT_UNCERTIFIABLE);

    let code = vecstab(&[
        "sweep",
        "--network",
        &p("net.json"),
        "--grid",
        "0.05:0.2:3",
        "--out",
        &p("sweep.csv"),
    ]);
    assert_eq!(code, EXIT_CERTIFIED);
    println!("{}", std::fs::read_to_string(p("sweep.csv")).unwrap());

    // Trajectories from certified starts stay under the comparison bound.
    let code = vecstab(&[
        "simulate",
        "--network",
        &p("net.json"),
        "--cert",
        &p("report.json"),
        "--random",
        "2",
        "--seed",
        "9",
        "--T",
        "10",
        "--out",
        &p("traces"),
    ]);
    assert_eq!(code, EXIT_CERTIFIED);

    println!("\nartifacts in {}", dir.display());
    for name in ["net.json", "report.json", "sweep.csv", "traces/domination.json"] {
        let meta = std::fs::metadata(dir.join(name)).unwrap();
        println!("  {name} ({} bytes)", meta.len());
    }
}
