use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use qtet_core::report::{Check, LabReport, Report};
use qtet_core::scalar::powi;
use qtet_core::{analyze_source, relations_lab, Config, Until};

#[derive(Parser)]
#[command(name = "qtet", version, about = "Certify the q-tetrahedron algebra action on q-Racah distance-regular graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage and certify the reconstruction of A and A*.
    Analyze(GraphArgs),
    /// Stop after the irreducible T-module decomposition.
    Decompose(GraphArgs),
    /// Stop after fitting the q-Racah parameters.
    Fit(GraphArgs),
    /// Check the local generators for one (d, q, r) without a graph.
    Relations(RelationArgs),
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false, args = ["graph", "edges"])]
struct GraphArgs {
    /// Generator spec such as cycle:9, hypercube:4, path:6, complete:5.
    #[arg(long)]
    graph: Option<String>,
    /// File of whitespace-separated 0-based vertex pairs, one edge per line.
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    base_vertex: usize,
    /// Index into the Q-polynomial orderings found, in discovery order.
    #[arg(long, default_value_t = 0)]
    ordering: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol_group: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol_zero: f64,
    #[arg(long, default_value_t = 1e-7)]
    tol_rel: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol_fit: f64,
    /// Report non-thin modules instead of stopping at the first one.
    #[arg(long)]
    allow_nonthin: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RelationArgs {
    #[arg(long)]
    d: usize,
    /// Complex number: `a+bi`, `polar:modulus,argument`.
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    /// Complex number, or `q^k` for an integer power of q.
    #[arg(long, allow_hyphen_values = true)]
    r: String,
    #[arg(long, default_value_t = 1e-7)]
    tol_rel: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn parse_complex(text: &str) -> Result<Complex<f64>, String> {
    let t = text.trim();
    if let Some(rest) = t.strip_prefix("polar:") {
        let (m, a) = rest.split_once(',').ok_or_else(|| format!("'{t}': expected polar:modulus,argument"))?;
        let m: f64 = m.trim().parse().map_err(|e| format!("'{t}': modulus: {e}"))?;
        let a: f64 = a.trim().parse().map_err(|e| format!("'{t}': argument: {e}"))?;
        return Ok(Complex::from_polar(m, a));
    }
    let z: Complex<f64> = t.replace(' ', "").parse().map_err(|e| format!("'{t}': {e}"))?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("'{t}' is not finite"));
    }
    Ok(z)
}

fn parse_r(text: &str, q: Complex<f64>) -> Result<Complex<f64>, String> {
    match text.trim().strip_prefix("q^") {
        Some(k) => {
            let k: i64 = k.trim_matches(|c| c == '(' || c == ')').parse().map_err(|e| format!("'{text}': exponent: {e}"))?;
            Ok(powi(q, k))
        }
        None => parse_complex(text),
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| format!("writing {}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn fmt_c(z: &qtet_core::report::Cplx) -> String {
    format!("{:.6}{:+.6}i", z.re.0, z.im.0)
}

fn checks_text(s: &mut String, checks: &[Check]) {
    if checks.is_empty() {
        return;
    }
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let _ = writeln!(s, "checks:");
    for c in checks {
        let verdict = match (c.pass, c.gating) {
            (true, _) => "pass",
            (false, true) => "FAIL",
            (false, false) => "fail (diagnostic)",
        };
        let _ = writeln!(s, "  {:<width$}  {:>10.3e} < {:<8.0e} {verdict}", c.name, c.value.0, c.threshold.0);
    }
}

fn report_text(r: &Report) -> String {
    let mut s = String::new();
    if let Some(g) = &r.graph {
        let _ = write!(s, "graph {}: n = {}, edges = {}", g.source, g.n, g.edges);
        if let Some(d) = g.diameter {
            let _ = write!(s, ", D = {d}");
        }
        if let Some((b, c)) = &g.intersection_array {
            let _ = write!(s, ", intersection array {b:?}; {c:?}");
        }
        s.push('\n');
    }
    if let Some(q) = &r.qpoly {
        let theta: Vec<String> = q.theta.iter().map(|t| format!("{:.6}", t.0 + 0.0)).collect();
        let _ = writeln!(s, "Q-polynomial ordering {:?} ({} found), θ = [{}]", q.ordering, q.orderings_found, theta.join(", "));
    }
    if let Some(f) = &r.qracah {
        let _ = writeln!(s, "q = {}, u = {}, v = {}, fit residual {:.2e}", fmt_c(&f.q), fmt_c(&f.u), fmt_c(&f.v), f.fit_residual.0);
    }
    if let Some(dec) = &r.decomposition {
        let _ = writeln!(s, "{} modules, commutant dimension {}:", dec.modules.len(), dec.commutant_dim);
        for m in &dec.modules {
            let _ = write!(s, "  ρ={} τ={} d={} dim={} mult={} disp=({},{})", m.rho, m.tau, m.d, m.dim, m.mult, m.disp1, m.disp2);
            if !m.thin {
                s.push_str(" non-thin");
            }
            if let Some(rr) = &m.r {
                let _ = write!(s, " r={}", fmt_c(rr));
                if m.r_ambiguous == Some(true) {
                    s.push_str(" (one of two)");
                }
            }
            s.push('\n');
        }
    }
    if let Some(m) = &r.main_theorem {
        let _ = writeln!(s, "reconstruction residuals: A {:.2e}, A* {:.2e}", m.residual_a.0, m.residual_astar.0);
    }
    checks_text(&mut s, &r.status.checks);
    let _ = write!(s, "exit {} ({})", r.status.exit_code, r.status.stage);
    if let Some(msg) = &r.status.message {
        let _ = write!(s, ": {msg}");
    }
    s
}

fn lab_text(r: &LabReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "d = {}, q = {}, r = {}", r.d, fmt_c(&r.q), fmt_c(&r.r));
    for rel in &r.per_relation {
        let _ = writeln!(s, "  {:<28} {:.3e}", rel.name, rel.residual.0);
    }
    checks_text(&mut s, &r.status.checks);
    let _ = write!(s, "exit {} ({})", r.status.exit_code, r.status.stage);
    if let Some(msg) = &r.status.message {
        let _ = write!(s, ": {msg}");
    }
    s
}

fn run_graph(args: GraphArgs, until: Until) -> Result<i32, String> {
    let (source, label) = match (&args.graph, &args.edges) {
        (Some(spec), None) => (spec.clone(), spec.clone()),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
            (text, path.display().to_string())
        }
        _ => unreachable!("clap enforces exactly one source"),
    };
    let cfg = Config {
        source: label,
        base_vertex: args.base_vertex,
        ordering: args.ordering,
        seed: args.seed,
        tol_group: args.tol_group,
        tol_zero: args.tol_zero,
        tol_rel: args.tol_rel,
        tol_fit: args.tol_fit,
        allow_nonthin: args.allow_nonthin,
        until,
    };
    let outcome = analyze_source::<f64>(&source, &cfg);
    let text = match args.output.format {
        Format::Json => outcome.report.to_json(),
        Format::Text => report_text(&outcome.report),
    };
    emit(&text, &args.output.out)?;
    Ok(outcome.exit_code())
}

fn run_relations(args: RelationArgs) -> Result<i32, String> {
    let q = parse_complex(&args.q)?;
    let r = parse_r(&args.r, q)?;
    let report = relations_lab(args.d, q, r, args.tol_rel);
    let text = match args.output.format {
        Format::Json => report.to_json(),
        Format::Text => lab_text(&report),
    };
    emit(&text, &args.output.out)?;
    Ok(report.status.exit_code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => run_graph(a, Until::Full),
        Command::Decompose(a) => run_graph(a, Until::Decompose),
        Command::Fit(a) => run_graph(a, Until::Fit),
        Command::Relations(a) => run_relations(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("1.5").unwrap(), Complex::new(1.5, 0.0));
        assert_eq!(parse_complex("-0.5+1.2i").unwrap(), Complex::new(-0.5, 1.2));
        assert_eq!(parse_complex("2i").unwrap(), Complex::new(0.0, 2.0));
        let z = parse_complex("polar:2,1.5707963267948966").unwrap();
        assert!((z - Complex::new(0.0, 2.0)).norm() < 1e-15);
        assert!(parse_complex("polar:2").is_err());
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn powers_of_q() {
        let q = Complex::new(1.1, 0.0);
        assert!((parse_r("q^2", q).unwrap() - 1.21).norm() < 1e-15);
        assert!((parse_r("q^(-1)", q).unwrap() - 1.0 / 1.1).norm() < 1e-15);
        assert!(parse_r("q^x", q).is_err());
    }
}
