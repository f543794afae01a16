//! Batch command-line driver.
//!
//! Four subcommands cover the pipeline: `benchmark` writes the seeded
//! oscillator network, `analyze` certifies it and emits a JSON report,
//! `sweep` tabulates both approaches over a level grid, and `simulate`
//! integrates trajectories against a previously written certificate.
//!
//! Exit codes are a stable scripting contract: 0 when a certificate was
//! produced (or the requested simulations all dominated), 2 when the
//! system could not be certified, 1 for usage and I/O errors.
//!
//! Reports print every number with 17 significant digits through a
//! hand-rolled writer, so a rerun with the same flags is byte-identical;
//! CSVs use nine digits. NaN and infinities become JSON `null`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::comparison::{
    direct_matrix, gamma_sweep, squared_certificate, traditional_matrix, ComparisonCertificate,
    SweepStatus, TraditionalBounds,
};
use crate::linalg::Mat;
use crate::lyap::{analyze_subsystem, LyapunovFunction, SubsystemAnalysis};
use crate::network::{vdp_benchmark, vdp_params, Network};
use crate::sim::{sample_in_domain, verify_domination, DominationReport};

pub const EXIT_CERTIFIED: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNCERTIFIABLE: i32 = 2;

/// `println!` that survives a closed stdout (`vecstab ... | head`).
macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "vecstab",
    version,
    about = "Stability certificates for interconnected polynomial systems"
)]
struct Cli {
    /// Worker threads for the per-subsystem solves
    /// (default: VECSTAB_JOBS, then all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the seeded nine-oscillator benchmark network.
    Benchmark(BenchmarkArgs),
    /// Certify a network and write a JSON certificate report.
    Analyze(AnalyzeArgs),
    /// Tabulate both approaches over a grid of uniform levels.
    Sweep(SweepArgs),
    /// Integrate trajectories and check them against a certificate.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long)]
    seed: u64,
    /// Network file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    network: PathBuf,
    /// Uniform level in (0,1) applied to every subsystem.
    #[arg(long)]
    gamma: Option<f64>,
    /// Comma-separated per-subsystem levels, each in (0,1).
    #[arg(long)]
    gammas: Option<String>,
    #[arg(long, value_enum, default_value_t = ApproachArg::Both)]
    approach: ApproachArg,
    /// Report file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    network: PathBuf,
    /// Inclusive level grid `start:end:count`, e.g. `0.05:0.95:19`.
    #[arg(long)]
    grid: String,
    /// CSV file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    network: PathBuf,
    /// Certificate report produced by `analyze`.
    #[arg(long)]
    cert: PathBuf,
    /// JSON file with one initial state or a list of them.
    #[arg(long, conflicts_with = "random")]
    x0: Option<PathBuf>,
    /// Draw this many initial states uniformly from the certified domain.
    #[arg(long)]
    random: Option<usize>,
    /// Seed for --random draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "T", default_value_t = crate::sim::DEFAULT_HORIZON)]
    horizon: f64,
    #[arg(long, default_value_t = crate::sim::DEFAULT_STEP)]
    step: f64,
    /// Which certificate from the report to check against
    /// (default: the first certified one in level coordinates).
    #[arg(long, value_enum)]
    approach: Option<CertChoice>,
    /// Directory for trace CSVs and the domination summary.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ApproachArg {
    Direct,
    Traditional,
    Both,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum CertChoice {
    Direct,
    #[value(name = "traditional-squared")]
    TraditionalSquared,
}

impl CertChoice {
    fn name(self) -> &'static str {
        match self {
            CertChoice::Direct => "direct",
            CertChoice::TraditionalSquared => "traditional-squared",
        }
    }
}

/// A usage or I/O failure; certification failures are not errors but
/// reports with exit code 2.
#[derive(Debug)]
struct CliError(String);

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError(msg.into())
}

/// Parses `args` and runs the selected subcommand, returning the process
/// exit code. The binary is a one-line wrapper around this.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_CERTIFIED,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    configure_workers(cli.jobs);
    let result = match cli.command {
        Command::Benchmark(a) => cmd_benchmark(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Simulate(a) => cmd_simulate(&a),
    };
    match result {
        Ok(code) => code,
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

/// Resolves the worker count as --jobs, then VECSTAB_JOBS, then the rayon
/// default (all cores). Later calls in one process keep the first pool.
fn configure_workers(flag: Option<usize>) {
    let jobs = flag.or_else(|| {
        std::env::var("VECSTAB_JOBS")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
    });
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn cmd_benchmark(args: &BenchmarkArgs) -> Result<i32, CliError> {
    let params = vdp_params(args.seed);
    let net = vdp_benchmark(args.seed);
    net.save(&args.out)?;
    outln!(
        "benchmark seed {}: {} subsystems, {} interactions -> {}",
        args.seed,
        net.len(),
        net.interactions().len(),
        args.out.display()
    );
    for (j, mu) in params.mu.iter().enumerate() {
        outln!("  S{j}: mu = {mu:.6}");
    }
    for (t, s, beta) in &params.beta {
        outln!("  S{t} <- S{s}: beta = {beta:.6}");
    }
    Ok(EXIT_CERTIFIED)
}

fn parse_gammas(args: &AnalyzeArgs, n: usize) -> Result<Vec<f64>, CliError> {
    let gamma0 = match (args.gamma, &args.gammas) {
        (Some(g), None) => vec![g; n],
        (None, Some(list)) => list
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| usage(format!("--gammas: {e}")))?,
        _ => return Err(usage("exactly one of --gamma and --gammas is required")),
    };
    if gamma0.len() != n {
        return Err(usage(format!(
            "--gammas needs {n} values, got {}",
            gamma0.len()
        )));
    }
    if gamma0.iter().any(|g| !(g > &0.0 && g < &1.0)) {
        return Err(usage("levels must lie strictly between 0 and 1"));
    }
    Ok(gamma0)
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<i32, CliError> {
    let net = Network::load(&args.network)?;
    let gamma0 = parse_gammas(args, net.len())?;

    let report = match build_report(&net, &gamma0, args.approach) {
        Ok(r) => r,
        Err(msg) => {
            // Still a structured artifact: the reader learns why nothing
            // was certified.
            let body = error_report(&args.network, &gamma0, &msg);
            std::fs::write(&args.out, body)?;
            eprintln!("uncertifiable: {msg}");
            return Ok(EXIT_UNCERTIFIABLE);
        }
    };
    let certified = report.certificates.iter().any(|c| c.cert.certified());
    std::fs::write(&args.out, render_report(&args.network, &gamma0, &report))?;
    for entry in &report.certificates {
        outln!("{}", describe(&entry.cert));
    }
    for note in &report.notes {
        outln!("note: {note}");
    }
    outln!(
        "verdict: {} -> {}",
        if certified { "certified" } else { "uncertifiable" },
        args.out.display()
    );
    Ok(if certified {
        EXIT_CERTIFIED
    } else {
        EXIT_UNCERTIFIABLE
    })
}

struct CertEntry {
    cert: ComparisonCertificate,
    /// Present only on the sqrt-coordinate certificate.
    bounds: Option<TraditionalBounds>,
}

struct Report {
    analyses: Vec<SubsystemAnalysis>,
    certificates: Vec<CertEntry>,
    notes: Vec<String>,
}

/// Runs the per-subsystem pipeline and the selected approaches. A failure
/// anywhere means no certificate exists on this path; the caller turns the
/// message into an error report rather than aborting.
fn build_report(net: &Network, gamma0: &[f64], which: ApproachArg) -> Result<Report, String> {
    let analyses: Vec<SubsystemAnalysis> = net
        .subsystems()
        .iter()
        .map(analyze_subsystem)
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let lyap: Vec<LyapunovFunction> = analyses.iter().map(|a| a.lyapunov.clone()).collect();

    let mut certificates = Vec::new();
    let mut notes = Vec::new();
    if which != ApproachArg::Traditional {
        let direct = direct_matrix(net, &lyap, gamma0).map_err(|e| e.to_string())?;
        certificates.push(CertEntry {
            cert: direct.certificate,
            bounds: None,
        });
    }
    if which != ApproachArg::Direct {
        let (bounds, cert) = traditional_matrix(net, &lyap, gamma0).map_err(|e| e.to_string())?;
        let squared = if cert.complete {
            match squared_certificate(&cert) {
                Ok(sq) => Some(sq),
                Err(e) => {
                    notes.push(format!("squared transform skipped: {e}"));
                    None
                }
            }
        } else {
            notes.push("squared transform skipped: incomplete sqrt-coordinate matrix".into());
            None
        };
        certificates.push(CertEntry {
            cert,
            bounds: Some(bounds),
        });
        if let Some(sq) = squared {
            certificates.push(CertEntry {
                cert: sq,
                bounds: None,
            });
        }
    }
    Ok(Report {
        analyses,
        certificates,
        notes,
    })
}

fn describe(c: &ComparisonCertificate) -> String {
    format!(
        "{}: {} (max row sum {:.6}, max Re lambda {:.6})",
        c.approach,
        if c.certified() {
            "certified"
        } else if !c.complete {
            "incomplete"
        } else {
            "uncertified"
        },
        c.max_row_sum(),
        c.max_re_lambda
    )
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32, CliError> {
    let net = Network::load(&args.network)?;
    let grid = parse_grid(&args.grid)?;
    let lyap: Vec<LyapunovFunction> = net
        .subsystems()
        .iter()
        .map(analyze_subsystem)
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .map(|a| a.lyapunov)
        .collect();
    let table = gamma_sweep(&net, &lyap, &grid)?;
    std::fs::write(&args.out, table.to_csv())?;
    let certified = table
        .rows
        .iter()
        .filter(|r| r.status == SweepStatus::Certified)
        .count();
    outln!(
        "sweep over {} levels: {certified}/{} rows certified -> {}",
        grid.len(),
        table.rows.len(),
        args.out.display()
    );
    Ok(if certified > 0 {
        EXIT_CERTIFIED
    } else {
        EXIT_UNCERTIFIABLE
    })
}

/// `start:end:count`, endpoints included, all levels in (0,1).
fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || usage(format!("--grid expects start:end:count, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(a > 0.0 && b < 1.0 && a <= b && n >= 1) || (n == 1 && a != b) {
        return Err(usage("--grid needs 0 < start <= end < 1 and count >= 1"));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<i32, CliError> {
    let net = Network::load(&args.network)?;
    let lyap: Vec<LyapunovFunction> = net
        .subsystems()
        .iter()
        .map(analyze_subsystem)
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .map(|a| a.lyapunov)
        .collect();
    let (approach, a, gamma0) = load_certificate(&args.cert, args.approach)?;
    if gamma0.len() != net.len() || a.rows() != net.len() {
        return Err(usage("certificate and network sizes disagree"));
    }

    let starts: Vec<Vec<f64>> = if let Some(path) = &args.x0 {
        parse_states(path, net.total_dim())?
    } else {
        let n = args
            .random
            .ok_or_else(|| usage("one of --x0 and --random is required"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        (0..n)
            .map(|_| sample_in_domain(&net, &lyap, &gamma0, &mut rng))
            .collect()
    };
    if starts.is_empty() {
        return Err(usage("no initial states to simulate"));
    }

    std::fs::create_dir_all(&args.out)?;
    let labels: Vec<String> = (0..net.total_dim()).map(|i| format!("x{i}")).collect();
    let mut reports: Vec<DominationReport> = Vec::with_capacity(starts.len());
    for (k, x0) in starts.iter().enumerate() {
        let rep = verify_domination(&net, &lyap, &a, &gamma0, x0, args.horizon, args.step)?;
        let traj = crate::sim::integrate_network(&net, x0, args.horizon, args.step)?;
        std::fs::write(args.out.join(format!("state_{k:03}.csv")), traj.to_csv(&labels))?;
        std::fs::write(
            args.out.join(format!("levels_{k:03}.csv")),
            rep.trace.to_csv(),
        )?;
        outln!(
            "run {k}: {} (max excess {:.3e})",
            if rep.ok { "dominated" } else { "VIOLATED" },
            rep.max_excess
        );
        reports.push(rep);
    }
    let all_ok = reports.iter().all(|r| r.ok);
    std::fs::write(
        args.out.join("domination.json"),
        render_domination(args, &approach, &reports),
    )?;
    outln!(
        "domination: {}/{} runs ok -> {}",
        reports.iter().filter(|r| r.ok).count(),
        reports.len(),
        args.out.display()
    );
    Ok(if all_ok {
        EXIT_CERTIFIED
    } else {
        EXIT_UNCERTIFIABLE
    })
}

/// Reads back an `analyze` report and picks a certificate in level
/// coordinates. Sqrt-coordinate matrices bound the wrong quantity here, so
/// `traditional` is never eligible; its squared transform is.
fn load_certificate(
    path: &Path,
    choice: Option<CertChoice>,
) -> Result<(String, Mat, Vec<f64>), CliError> {
    let text = std::fs::read_to_string(path)?;
    let doc: serde_json::Value = serde_json::from_str(&text)?;
    let gamma0: Vec<f64> = doc["gamma0"]
        .as_array()
        .ok_or_else(|| usage("certificate report has no gamma0 array"))?
        .iter()
        .map(|v| v.as_f64().ok_or_else(|| usage("bad gamma0 entry")))
        .collect::<Result<_, _>>()?;
    let certs = doc["certificates"]
        .as_array()
        .ok_or_else(|| usage("certificate report has no certificates array"))?;
    let wanted = |name: &str| match choice {
        Some(c) => name == c.name(),
        None => name != "traditional",
    };
    for c in certs {
        let name = c["approach"].as_str().unwrap_or_default();
        if !wanted(name) || c["certified"] != serde_json::Value::Bool(true) {
            continue;
        }
        let rows = c["a"]
            .as_array()
            .ok_or_else(|| usage("certificate has no matrix"))?;
        let mut data = Vec::with_capacity(rows.len());
        for r in rows {
            let row: Vec<f64> = r
                .as_array()
                .ok_or_else(|| usage("bad matrix row"))?
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| usage("bad matrix entry")))
                .collect::<Result<_, _>>()?;
            data.push(row);
        }
        let a = Mat::from_rows(&data).map_err(|e| usage(e.to_string()))?;
        return Ok((name.to_string(), a, gamma0));
    }
    Err(usage(match choice {
        Some(c) => format!("report holds no certified {:?} certificate", c.name()),
        None => "report holds no certified certificate in level coordinates".into(),
    }))
}

/// One state `[x0,...]` or a list `[[...],[...]]`.
fn parse_states(path: &Path, dim: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let arr = doc
        .as_array()
        .ok_or_else(|| usage("--x0 file must hold a JSON array"))?;
    let states: Vec<Vec<f64>> = if arr.iter().all(|v| v.is_number()) {
        vec![arr.iter().filter_map(|v| v.as_f64()).collect()]
    } else {
        arr.iter()
            .map(|row| {
                row.as_array()
                    .map(|r| r.iter().filter_map(|v| v.as_f64()).collect())
                    .ok_or_else(|| usage("--x0 rows must be arrays of numbers"))
            })
            .collect::<Result<_, _>>()?
    };
    for s in &states {
        if s.len() != dim {
            return Err(usage(format!(
                "initial state has {} entries, network needs {dim}",
                s.len()
            )));
        }
    }
    Ok(states)
}

// ---- report rendering ----------------------------------------------------
//
// Hand-rolled so that field order, spacing, and float text are fixed by
// this file alone; serde pretty printing is deliberately avoided.

fn jnum(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn jstr(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn jvec(xs: &[f64]) -> String {
    let body: Vec<String> = xs.iter().map(|&x| jnum(x)).collect();
    format!("[{}]", body.join(", "))
}

fn render_certificate(out: &mut String, entry: &CertEntry, indent: &str) {
    let c = &entry.cert;
    let p = format!("{indent}  ");
    let _ = writeln!(out, "{indent}{{");
    let _ = writeln!(out, "{p}\"approach\": {},", jstr(&c.approach.to_string()));
    let _ = writeln!(out, "{p}\"complete\": {},", c.complete);
    let _ = writeln!(out, "{p}\"hurwitz\": {},", c.hurwitz);
    let _ = writeln!(out, "{p}\"invariant\": {},", c.invariant);
    let _ = writeln!(out, "{p}\"diag_dominant\": {},", c.diag_dominant);
    let _ = writeln!(out, "{p}\"certified\": {},", c.certified());
    let _ = writeln!(out, "{p}\"max_row_sum\": {},", jnum(c.max_row_sum()));
    let _ = writeln!(out, "{p}\"max_re_lambda\": {},", jnum(c.max_re_lambda));
    let _ = writeln!(out, "{p}\"a\": [");
    for i in 0..c.a.rows() {
        let comma = if i + 1 < c.a.rows() { "," } else { "" };
        let _ = writeln!(out, "{p}  {}{comma}", jvec(c.a.row(i)));
    }
    let _ = writeln!(out, "{p}],");
    match &c.roa_weights {
        Some(w) => {
            let _ = writeln!(out, "{p}\"roa_weights\": {},", jvec(w));
        }
        None => {
            let _ = writeln!(out, "{p}\"roa_weights\": null,");
        }
    }
    if let Some(bounds) = &entry.bounds {
        let _ = writeln!(out, "{p}\"bounds\": [");
        for (k, b) in bounds.per_subsystem.iter().enumerate() {
            let comma = if k + 1 < bounds.per_subsystem.len() { "," } else { "" };
            let zeta: Vec<String> = b
                .zeta
                .iter()
                .map(|&(j, z)| format!("{{\"source\": {j}, \"value\": {}}}", jnum(z)))
                .collect();
            let _ = writeln!(
                out,
                "{p}  {{\"id\": {}, \"available\": {}, \"eta1\": {}, \"eta2\": {}, \"eta3\": {}, \"zeta\": [{}]}}{comma}",
                b.id,
                b.available,
                jnum(b.eta1),
                jnum(b.eta2),
                jnum(b.eta3),
                zeta.join(", ")
            );
        }
        let _ = writeln!(out, "{p}],");
    }
    let _ = writeln!(out, "{p}\"rows\": [");
    for (k, r) in c.rows.iter().enumerate() {
        let comma = if k + 1 < c.rows.len() { "," } else { "" };
        let degrees: Vec<String> = r.sigma_degrees.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(
            out,
            "{p}  {{\"id\": {}, \"status\": {}, \"objective\": {}, \"sigma_degrees\": [{}]}}{comma}",
            r.id,
            jstr(&r.status.to_string()),
            jnum(r.objective),
            degrees.join(", ")
        );
    }
    let _ = writeln!(out, "{p}]");
    let _ = write!(out, "{indent}}}");
}

fn render_report(network: &Path, gamma0: &[f64], report: &Report) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(
        out,
        "  \"network\": {},",
        jstr(&network.display().to_string())
    );
    let _ = writeln!(out, "  \"gamma0\": {},", jvec(gamma0));
    let _ = writeln!(out, "  \"subsystems\": [");
    for (k, a) in report.analyses.iter().enumerate() {
        let comma = if k + 1 < report.analyses.len() { "," } else { "" };
        let _ = writeln!(
            out,
            "    {{\"id\": {}, \"gamma_max\": {}, \"global\": {}}}{comma}",
            a.lyapunov.id,
            jnum(a.gamma_max),
            a.global
        );
    }
    let _ = writeln!(out, "  ],");
    let _ = writeln!(out, "  \"certificates\": [");
    for (k, entry) in report.certificates.iter().enumerate() {
        render_certificate(&mut out, entry, "    ");
        out.push_str(if k + 1 < report.certificates.len() {
            ",\n"
        } else {
            "\n"
        });
    }
    let _ = writeln!(out, "  ],");
    let notes: Vec<String> = report.notes.iter().map(|n| jstr(n)).collect();
    let _ = writeln!(out, "  \"notes\": [{}],", notes.join(", "));
    let certified = report.certificates.iter().any(|c| c.cert.certified());
    let _ = writeln!(out, "  \"certified\": {certified}");
    out.push_str("}\n");
    out
}

fn error_report(network: &Path, gamma0: &[f64], msg: &str) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(
        out,
        "  \"network\": {},",
        jstr(&network.display().to_string())
    );
    let _ = writeln!(out, "  \"gamma0\": {},", jvec(gamma0));
    let _ = writeln!(out, "  \"error\": {},", jstr(msg));
    let _ = writeln!(out, "  \"certified\": false");
    out.push_str("}\n");
    out
}

fn render_domination(args: &SimulateArgs, approach: &str, reports: &[DominationReport]) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(
        out,
        "  \"network\": {},",
        jstr(&args.network.display().to_string())
    );
    let _ = writeln!(
        out,
        "  \"certificate\": {},",
        jstr(&args.cert.display().to_string())
    );
    let _ = writeln!(out, "  \"approach\": {},", jstr(approach));
    let _ = writeln!(out, "  \"horizon\": {},", jnum(args.horizon));
    let _ = writeln!(out, "  \"step\": {},", jnum(args.step));
    let _ = writeln!(out, "  \"runs\": [");
    for (k, r) in reports.iter().enumerate() {
        let comma = if k + 1 < reports.len() { "," } else { "" };
        let violation = match r.first_violation {
            Some((t, i)) => format!("{{\"t\": {}, \"subsystem\": {i}}}", jnum(t)),
            None => "null".into(),
        };
        let _ = writeln!(
            out,
            "    {{\"index\": {k}, \"ok\": {}, \"max_excess\": {}, \"first_violation\": {violation}, \"diverged\": {}}}{comma}",
            r.ok,
            jnum(r.max_excess),
            r.diverged
        );
    }
    let _ = writeln!(out, "  ],");
    let all_ok = reports.iter().all(|r| r.ok);
    let _ = writeln!(out, "  \"all_ok\": {all_ok}");
    out.push_str("}\n");
    out
}
