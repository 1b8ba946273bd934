//! Command-line front end: `trop`, `roots`, `be`, `exp1` and `exp2`.
//!
//! Exit codes: 0 success, 1 parse or I/O error, 2 numerical failure,
//! 3 violated precondition.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rootbe::harness::{
    exp1_csv, exp1_fraction_within, exp2_csv, exp2_fraction_within, EmbeState, EXP1_PLOT, EXP2_PLOT,
};
use rootbe::{
    experiment1, experiment2, find_roots, parse_complex_lines, tropical_roots, write_complex_lines,
    AberthConfig, EmbeStatus, Error, ErrorReport, ExperimentConfig, Measures, NewtonConfig, Polynomial,
    Provenance, RootSet,
};

const FILE_GRAMMAR: &str = "\
FILE FORMAT
  Polynomial and root files share one line-oriented grammar:

    file    := (line NEWLINE)* line?
    NEWLINE := \"\\n\" | \"\\r\\n\"
    line    := blank | comment | entry
    blank   := WS*
    comment := WS* \"#\" <any characters>
    entry   := WS* REAL WS+ REAL WS*          real part, then imaginary part
    REAL    := [+-]? (DIGITS (\".\" DIGITS?)? | \".\" DIGITS) ([eE] [+-]? DIGITS)?
    DIGITS  := [0-9]+
    WS      := any Unicode white space character

  Values must be finite. A polynomial file lists c_0, c_1, ..., c_d in
  ascending powers of x; the last entry is the leading coefficient and must
  be nonzero. A roots file lists one root per line in any order, and a root
  may not be zero. Files written by this tool use `{:.16e}` formatting
  (17 significant digits), so they read back bit for bit.

EXIT STATUS
  0 success, 1 parse or I/O error, 2 numerical failure (e.g. the rootfinder
  did not converge), 3 precondition violation (e.g. c_0 = 0 for `trop`).";

#[derive(Parser, Debug)]
#[command(
    name = "rootbe",
    version,
    about = "Backward error measures for approximate polynomial roots",
    after_long_help = FILE_GRAMMAR
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tropical roots, upper hull and r_i constants of a polynomial.
    Trop {
        #[arg(long, value_name = "FILE")]
        poly: PathBuf,
        /// Print CSV instead of a table.
        #[arg(long)]
        csv: bool,
    },
    /// Compute all roots with the built-in Aberth iteration.
    Roots {
        #[arg(long, value_name = "FILE")]
        poly: PathBuf,
        /// Write the roots to FILE instead of standard output.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Backward error measures of a roots file.
    Be {
        #[arg(long, value_name = "FILE")]
        poly: PathBuf,
        #[arg(long, value_name = "FILE")]
        roots: PathBuf,
        /// Comma-separated subset of nbe,ebe,tbe,embe.
        #[arg(long, default_value = "nbe,ebe,tbe,embe")]
        measures: String,
        /// Print CSV instead of a table.
        #[arg(long)]
        csv: bool,
    },
    /// TBE against the EMBE upper bound over random polynomials.
    Exp1(ExpArgs),
    /// Tropical roots against root moduli over random polynomials.
    Exp2(ExpArgs),
}

#[derive(Args, Debug)]
struct ExpArgs {
    /// Degree of the random polynomials.
    #[arg(long, default_value_t = 20)]
    d: usize,
    /// Coefficient moduli are 10^e with e uniform in [-k, k].
    #[arg(long, default_value_t = 8.0)]
    k: f64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for the CSV file and gnuplot script.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Numerical(String),
    Precondition(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Io(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Precondition(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Numerical(m) | Failure::Precondition(m) => m,
        }
    }
}

fn classify(context: &str, e: Error) -> Failure {
    let msg = format!("{context}: {e}");
    match e {
        Error::Parse { .. } => Failure::Io(msg),
        Error::RootfindFailed {
            iterations,
            restarts,
            ref residuals,
            ..
        } => {
            let worst = residuals.iter().cloned().fold(0.0, f64::max);
            Failure::Numerical(format!(
                "{msg}\n  {iterations} sweeps over {} attempts, worst relative residual {worst:e}",
                restarts + 1
            ))
        }
        ref e if e.is_numerical() => Failure::Numerical(msg),
        _ => Failure::Precondition(msg),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_poly(path: &Path) -> Result<Polynomial, Failure> {
    let text = read(path)?;
    let coeffs = parse_complex_lines(&text).map_err(|e| classify(&path.display().to_string(), e))?;
    Polynomial::new(coeffs).map_err(|e| classify(&path.display().to_string(), e))
}

/// Runs the tool with `args` (including the program name), writing to
/// standard output and standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    let result = match cli.command {
        Command::Trop { poly, csv } => trop(&poly, csv),
        Command::Roots { poly, out } => roots(&poly, out.as_deref()),
        Command::Be {
            poly,
            roots,
            measures,
            csv,
        } => be(&poly, &roots, &measures, csv),
        Command::Exp1(a) => exp1(&a),
        Command::Exp2(a) => exp2(&a),
    };
    match result {
        Ok(text) => {
            if let Err(e) = out.write_all(text.as_bytes()) {
                let _ = writeln!(err, "rootbe: writing output: {e}");
                return 1;
            }
            0
        }
        Err(f) => {
            let _ = writeln!(err, "rootbe: {}", f.message());
            f.code()
        }
    }
}

fn trop(path: &Path, csv: bool) -> Result<String, Failure> {
    let p = load_poly(path)?;
    let t = tropical_roots(&p).map_err(|e| classify(&path.display().to_string(), e))?;
    let mut s = String::new();
    let tau = |i: usize| if i == 0 { String::new() } else { format!("{:.17e}", t.tau_at(i)) };
    if csv {
        s.push_str("i,abs_c,v,vertex,tau,r\n");
        for i in 0..=p.degree() {
            let _ = writeln!(
                s,
                "{i},{:.17e},{:.17e},{},{},{:.17e}",
                p[i].norm(),
                t.valuations[i],
                t.is_vertex(i),
                tau(i),
                t.r[i]
            );
        }
        return Ok(s);
    }
    let hull: Vec<String> = t.hull.iter().map(|i| i.to_string()).collect();
    let _ = writeln!(s, "hull vertices: {}", hull.join(" "));
    let sub: Vec<String> = t.subdivision().iter().map(|(a, b)| format!("({a},{b})")).collect();
    let _ = writeln!(s, "subdivision:   {}", sub.join(" "));
    let _ = writeln!(s);
    let _ = writeln!(s, "{:>4}  {:>12}  {:>12}  {:>6}  {:>12}  {:>12}", "i", "|c_i|", "v_i", "vertex", "tau_i", "r_i");
    for i in 0..=p.degree() {
        let tau = if i == 0 { "-".to_string() } else { format!("{:.6e}", t.tau_at(i)) };
        let _ = writeln!(
            s,
            "{i:>4}  {:>12.6e}  {:>12.6e}  {:>6}  {tau:>12}  {:>12.6e}",
            p[i].norm(),
            t.valuations[i],
            if t.is_vertex(i) { "yes" } else { "" },
            t.r[i]
        );
    }
    Ok(s)
}

fn roots(path: &Path, out: Option<&Path>) -> Result<String, Failure> {
    let p = load_poly(path)?;
    let r = find_roots(&p, &AberthConfig::default()).map_err(|e| classify(&path.display().to_string(), e))?;
    let text = write_complex_lines(&r.roots);
    match out {
        Some(dest) => {
            write_file(dest, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn be(poly: &Path, roots: &Path, measures: &str, csv: bool) -> Result<String, Failure> {
    let m: Measures = measures
        .parse()
        .map_err(|e| Failure::Io(format!("--measures: {e}")))?;
    let p = load_poly(poly)?;
    let text = read(roots)?;
    let values = parse_complex_lines(&text).map_err(|e| classify(&roots.display().to_string(), e))?;
    let x = RootSet::new(values, Provenance::Supplied).map_err(|e| classify(&roots.display().to_string(), e))?;
    let report = ErrorReport::compute(&p, &x, m, &NewtonConfig::default())
        .map_err(|e| classify(&format!("{} with {}", poly.display(), roots.display()), e))?;

    let embe = match report.embe_ub {
        EmbeStatus::Available(v) => format!("{v:.6e}"),
        other => other.to_string(),
    };
    let mut rows: Vec<(&str, String)> = Vec::new();
    if m.nbe {
        rows.push(("nbe", format!("{:.6e}", report.nbe)));
    }
    if m.ebe {
        rows.push(("ebe", format!("{:.6e}", report.ebe)));
    }
    if m.tbe {
        rows.push(("tbe", format!("{:.6e}", report.tbe)));
    }
    if m.embe {
        rows.push(("embe_ub", embe));
    }
    let mut s = String::new();
    if csv {
        s.push_str("measure,value\n");
        for (k, v) in &rows {
            let _ = writeln!(s, "{k},{v}");
        }
        return Ok(s);
    }
    for (k, v) in &rows {
        let _ = writeln!(s, "{:<8} {v}", k.to_uppercase());
    }
    if report.pairing_collision {
        let _ = writeln!(s, "warning: two refined roots merged");
    }
    if m.ebe || m.tbe {
        let _ = writeln!(s);
        let _ = writeln!(s, "{:>4}  {:>12}  {:>12}  {:>12}  {:>12}", "i", "|c_i-ĉ_i|", "relative", "r_i", "scaled");
        for e in &report.per_coeff {
            let _ = writeln!(
                s,
                "{:>4}  {:>12.4e}  {:>12.4e}  {:>12.4e}  {:>12.4e}",
                e.index, e.abs_err, e.rel_err, e.r, e.scaled_err
            );
        }
    }
    Ok(s)
}

fn exp_config(a: &ExpArgs) -> Result<ExperimentConfig, Failure> {
    let cfg = ExperimentConfig {
        d: a.d,
        k: a.k,
        trials: a.trials,
        seed: a.seed,
        ..Default::default()
    };
    cfg.validate().map_err(|e| Failure::Precondition(e.to_string()))?;
    Ok(cfg)
}

fn write_outputs(dir: &Path, stem: &str, csv: &str, plot: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    write_file(&dir.join(format!("{stem}.csv")), csv)?;
    write_file(&dir.join(format!("{stem}.plt")), plot)
}

fn exp1(a: &ExpArgs) -> Result<String, Failure> {
    let cfg = exp_config(a)?;
    let recs = experiment1(&cfg).map_err(|e| classify("exp1", e))?;
    let csv = exp1_csv(&recs).map_err(|e| Failure::Io(e.to_string()))?;
    write_outputs(&a.out, "exp1", &csv, EXP1_PLOT)?;
    let count = |s: EmbeState| recs.iter().filter(|r| r.embe_status == s).count();
    let (frac, valid) = exp1_fraction_within(&recs, 100.0);
    let mut s = String::new();
    let _ = writeln!(s, "trials:            {}", recs.len());
    let _ = writeln!(s, "bound available:   {valid}");
    let _ = writeln!(s, "newton diverged:   {}", count(EmbeState::Diverged));
    let _ = writeln!(s, "failed:            {}", count(EmbeState::Failed));
    let _ = writeln!(s, "pairing collision: {}", recs.iter().filter(|r| r.collision).count());
    let _ = writeln!(s, "embe_ub <= 100 max(tbe, u): {:.1}%", 100.0 * frac);
    let _ = writeln!(s, "wrote {}", a.out.join("exp1.csv").display());
    Ok(s)
}

fn exp2(a: &ExpArgs) -> Result<String, Failure> {
    let cfg = exp_config(a)?;
    let recs = experiment2(&cfg).map_err(|e| classify("exp2", e))?;
    let csv = exp2_csv(&recs).map_err(|e| Failure::Io(e.to_string()))?;
    write_outputs(&a.out, "exp2", &csv, EXP2_PLOT)?;
    let trials = recs.len() / cfg.d;
    let mut s = String::new();
    let _ = writeln!(s, "trials used: {trials} of {}", cfg.trials);
    let _ = writeln!(s, "ratios:      {}", recs.len());
    let _ = writeln!(s, "within 10%:  {:.1}%", 100.0 * exp2_fraction_within(&recs, 1.1));
    let _ = writeln!(s, "wrote {}", a.out.join("exp2.csv").display());
    Ok(s)
}
