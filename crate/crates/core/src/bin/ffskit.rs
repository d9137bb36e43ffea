use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ffskit::error::{Error, Result};
use ffskit::ffs::{FormalSeries, GaussianRing, LambdaCache, RationalRing};
use ffskit::hodgebound;
use ffskit::io::{self, Check, Codec, SeriesFile};
use ffskit::numberfield::NumberField;
use ffskit::symcone::ConeLattice;
use ffskit::theta;

#[derive(Parser)]
#[command(name = "ffskit", version, about = "Exact formal Fourier series, theta series and special-cycle identities")]
struct Cli {
    /// Worker threads for enumeration (output does not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the cone points of height at most B as JSON lines.
    ConeEnum {
        /// Field JSON file, or one of the names Q, Q(sqrt5).
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 1)]
        genus: usize,
        #[arg(long, default_value_t = 1)]
        level: u64,
        #[arg(long)]
        bound: String,
    },
    /// Theta series of a lattice (optionally of a coset μ + Lⁿ) as a series file.
    Theta {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long, default_value_t = 1)]
        genus: usize,
        /// Coset representative: a JSON array of n vectors of L^∨.
        #[arg(long)]
        coset: Option<String>,
        #[arg(long)]
        level: Option<u64>,
        #[arg(long)]
        bound: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Product of two series files.
    Multiply {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Numerical value of a rational series at τ, with an error bound.
    Eval {
        series: PathBuf,
        #[arg(long)]
        tau: PathBuf,
        /// Largest acceptable error bound; defaults to FFSKIT_PRECISION or 1e-10.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// The filtration index λ(T).
    Lambda {
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 1)]
        level: u64,
        /// T as a JSON matrix.
        #[arg(long = "t")]
        t: String,
    },
    /// Check a cycle identity on an orbit-datum file; exit 0 iff it holds.
    Verify {
        orbit: PathBuf,
        #[arg(long, value_enum)]
        check: CheckArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Table of Hodge-type bounds.
    Hodge {
        #[arg(long, default_value_t = 1)]
        m_min: u32,
        #[arg(long, default_value_t = 20)]
        m_max: u32,
        #[arg(long, default_value_t = 1)]
        d_plus: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
    },
    /// Discriminant group L^∨/L of a lattice.
    Discgroup {
        #[arg(long)]
        lattice: PathBuf,
        /// Also list every element.
        #[arg(long)]
        elements: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    Product,
    Pullback,
    Natural,
    SeriesProduct,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

/// Successful runs report whether the checked identity held.
enum Outcome {
    Done,
    Failed,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value> {
    io::parse_json(&read(path)?)
}

fn load_field(arg: &str) -> Result<NumberField> {
    match arg {
        "Q" | "Q(sqrt5)" => io::field_from_json(&Value::String(arg.into())),
        path => io::field_from_json(&read_json(Path::new(path))?),
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(Error::Io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.17e}")
}

fn series_ring(text: &str) -> Result<String> {
    let header = io::parse_json(text.lines().next().unwrap_or(""))?;
    Ok(header.get("ring").and_then(Value::as_str).unwrap_or("").to_string())
}

fn multiply<R: Codec + Default>(a: &str, b: &str) -> Result<String> {
    let a: SeriesFile<R> = io::read_series(a)?;
    let b: SeriesFile<R> = io::read_series(b)?;
    let p = a.series.multiply(&b.series)?;
    let top = |s: &FormalSeries<R>| s.terms().last().map(|(p, _)| p.height.clone()).unwrap_or_default();
    let fits = top(&a.series) + top(&b.series) <= *p.bound();
    let tail = a.tail.product(&b.tail, fits);
    Ok(io::write_series(&SeriesFile { series: p, tail }))
}

fn run(cli: Cli) -> Result<Outcome> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| Error::Validation(format!("cannot set up {j} worker threads: {e}")))?;
    }
    match cli.cmd {
        Cmd::ConeEnum { field, genus, level, bound } => {
            let f = Arc::new(load_field(&field)?);
            let b = ffskit::arith::parse_q(&bound)?;
            let cone = ConeLattice::new(f.clone(), genus, level)?;
            let mut out = String::new();
            for p in cone.enumerate(&b) {
                out.push_str(&json!({ "T": io::symmat_to_json(&f, &p.t), "height": io::q_to_json(&p.height) }).to_string());
                out.push('\n');
            }
            emit(&out, None)?;
        }
        Cmd::Theta { lattice, genus, coset, level, bound, output } => {
            let l = io::lattice_from_json(&read_json(&lattice)?)?;
            let b = ffskit::arith::parse_q(&bound)?;
            let mu = match coset {
                Some(c) => Some(l.coset(io::matrix_from_json(l.field(), &io::parse_json(&c)?)?)?),
                None => None,
            };
            let s = l.theta_expansion(genus, mu.as_ref(), level, &b)?;
            let text = io::write_series(&SeriesFile { series: s, tail: l.tail_model(genus) });
            emit(&text, output.as_deref())?;
        }
        Cmd::Multiply { a, b, output } => {
            let (ta, tb) = (read(&a)?, read(&b)?);
            let ring = series_ring(&ta)?;
            let text = match ring.as_str() {
                RationalRing::TAG => multiply::<RationalRing>(&ta, &tb)?,
                GaussianRing::TAG => multiply::<GaussianRing>(&ta, &tb)?,
                other => return Err(Error::Schema(format!("unknown coefficient ring {other:?}"))),
            };
            emit(&text, output.as_deref())?;
        }
        Cmd::Eval { series, tau, tolerance } => {
            let s: SeriesFile<RationalRing> = io::read_series(&read(&series)?)?;
            let tau = io::tau_from_json(&read_json(&tau)?)?;
            let tol = match tolerance {
                Some(t) => t,
                None => theta::numeric::default_tolerance()?,
            };
            let ev = theta::numeric_eval(&s.series, &s.tail, &tau, Some(tol))?;
            let out = json!({
                "re": fmt_f64(ev.value.re),
                "im": fmt_f64(ev.value.im),
                "tail_bound": fmt_f64(ev.tail_bound),
                "rounding_bound": fmt_f64(ev.rounding_bound),
                "error_bound": fmt_f64(ev.error_bound()),
                "tail_model": io::tail_to_json(&s.tail),
            });
            emit(&io::to_pretty(&out), None)?;
        }
        Cmd::Lambda { field, level, t } => {
            let f = Arc::new(load_field(&field)?);
            let t = io::symmat_from_json(&f, &io::parse_json(&t)?)?;
            let cone = ConeLattice::new(f.clone(), t.n(), level)?;
            let k = LambdaCache::new(cone).lambda(&t)?;
            emit(&format!("{}\n", json!({ "T": io::symmat_to_json(&f, &t), "lambda": k })), None)?;
        }
        Cmd::Verify { orbit, check, output } => {
            let doc = read_json(&orbit)?;
            let check = match check {
                CheckArg::Product => Check::Product,
                CheckArg::Pullback => Check::Pullback,
                CheckArg::Natural => Check::Natural,
                CheckArg::SeriesProduct => Check::SeriesProduct,
            };
            let v = io::verify(&doc, check)?;
            emit(&io::to_pretty(&v.report), output.as_deref())?;
            if !v.holds {
                eprintln!("identity does not hold; see the \"diff\" entry of the report");
                return Ok(Outcome::Failed);
            }
        }
        Cmd::Hodge { m_min, m_max, d_plus, n, format } => {
            if m_min == 0 || m_min > m_max || d_plus == 0 || n == 0 {
                return Err(Error::Validation("need 1 ≤ m_min ≤ m_max and positive d_plus, n".into()));
            }
            let rows = hodgebound::table(m_min..=m_max, d_plus, n);
            let text = match format {
                Format::Csv => hodgebound::render_csv(&rows),
                Format::Markdown => hodgebound::render_markdown(&rows),
            };
            emit(&text, None)?;
        }
        Cmd::Discgroup { lattice, elements } => {
            let l = io::lattice_from_json(&read_json(&lattice)?)?;
            let f = l.field().clone();
            let g = l.discriminant_group();
            let mut out = json!({
                "invariants": g.invariants.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                "order": g.order.to_string(),
                "generators": io::matrix_to_json(&f, &g.generators),
            });
            if elements {
                out["elements"] = io::matrix_to_json(&f, &g.elements());
            }
            emit(&io::to_pretty(&out), None)?;
        }
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("ffskit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
