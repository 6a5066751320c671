use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use eulercong_core::curve::{local_data, local_data_over, LocalData};
use eulercong_core::euler::{local_abs_value, local_L_inverse};
use eulercong_core::pipeline::{
    analyze_pair, bundled_records, emit_report, find_record, parse_curve_records, parse_report, scan, AnalysisConfig,
    CurveRecord, DiskCache,
};
use eulercong_core::{BaseField, Error, ReportFormat};

/// Local curve data and Euler-characteristic congruence checks for
/// p-congruent elliptic curves.
#[derive(Parser, Debug)]
#[command(name = "eulercong", version, about)]
struct Cli {
    /// Disable the on-disk cache (otherwise $EULERCONG_CACHE_DIR, or ~/.cache/eulercong).
    #[arg(long, global = true)]
    no_cache: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Field {
    #[value(name = "Q")]
    Q,
    #[value(name = "Qi")]
    Qi,
}

impl From<Field> for BaseField {
    fn from(f: Field) -> Self {
        match f {
            Field::Q => BaseField::Q,
            Field::Qi => BaseField::Qi,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => ReportFormat::Text,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kodaira type, conductor exponent, Tamagawa number and trace at the places above ℓ.
    LocalData {
        label: String,
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum, default_value = "Q")]
        field: Field,
        /// Prime p for the |L_v(E,1)|_p column.
        #[arg(long)]
        p: Option<u64>,
        /// Curve record file (defaults to the bundled fixtures).
        #[arg(long)]
        db: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Full analysis of a pair; the exit code encodes the outcome.
    AnalyzePair {
        label1: String,
        label2: String,
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value = "Q")]
        field: Field,
        /// Compare traces at primes ℓ ≤ BOUND (at least 50).
        #[arg(long, default_value_t = 1000)]
        bound: u64,
        /// Working p-adic precision.
        #[arg(long, default_value_t = 30)]
        precision: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        db: Option<PathBuf>,
        /// Treat E[p] as irreducible instead of running the trace heuristic.
        #[arg(long)]
        assert_irreducible: bool,
    },
    /// List pairs in a record file whose traces agree mod p, ranked by |Σ₁|.
    Scan {
        db: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1000)]
        bound: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Re-render a saved JSON report (from FILE or stdin).
    Report {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        file: Option<PathBuf>,
    },
}

fn cache(disabled: bool) -> DiskCache {
    if disabled {
        return DiskCache::disabled();
    }
    let default = std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("eulercong"));
    DiskCache::from_env_or(default)
}

fn records(db: Option<&PathBuf>) -> Result<Vec<CurveRecord>, Error> {
    match db {
        Some(path) => parse_curve_records(path),
        None => Ok(bundled_records()),
    }
}

fn local_data_text(label: &str, rows: &[LocalData], p: Option<u64>) -> String {
    let mut s = format!(
        "{:<8} {:<7} {:>6} {:<9} {:<6} {:>4} {:>4} {:>5} {:>6} {:>12}{}\n",
        "curve", "place", "Nv", "type", "kod", "f_v", "c_v", "a_v", "ordΔ", "L^-1",
        if p.is_some() { "   |L|_p" } else { "" }
    );
    for d in rows {
        let l_inv = if d.a_v.is_some() || d.kind != eulercong_core::ReductionKind::Good {
            local_L_inverse(d).to_string()
        } else {
            "?".to_string()
        };
        let abs = match p {
            Some(p) if p != d.prime && l_inv != "?" => format!(" {:>8}", local_abs_value(d, p).render(p)),
            Some(_) => format!(" {:>8}", "-"),
            None => String::new(),
        };
        s.push_str(&format!(
            "{:<8} {:<7} {:>6} {:<9} {:<6} {:>4} {:>4} {:>5} {:>6} {:>12}{}\n",
            label,
            d.place.label,
            d.residue_norm,
            d.kind.as_str(),
            d.kodaira.to_string(),
            d.conductor_exponent,
            d.tamagawa,
            d.a_v.map_or("?".into(), |a| a.to_string()),
            d.ord_delta_min,
            l_inv,
            abs
        ));
    }
    s
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            let _ = io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Error> {
    Ok(serde_json::to_string_pretty(v).map_err(|e| Error::Serde(e.to_string()))? + "\n")
}

fn run(cli: Cli) -> Result<u8, Error> {
    let cache = cache(cli.no_cache);
    match cli.command {
        Command::LocalData { label, prime, field, p, db, format } => {
            let recs = records(db.as_ref())?;
            let e = find_record(&recs, &label)?.model()?;
            let rows = match BaseField::from(field) {
                BaseField::Q => vec![local_data(&e, prime)?],
                BaseField::Qi => local_data_over(&e.over(BaseField::Qi), prime)?,
            };
            let text = match format {
                Format::Text => local_data_text(&label, &rows, p),
                Format::Json => to_json(&rows)?,
            };
            emit(&text, None)?;
            Ok(0)
        }
        Command::AnalyzePair { label1, label2, p, field, bound, precision, format, out, db, assert_irreducible } => {
            let recs = records(db.as_ref())?;
            let config = AnalysisConfig { bound, precision, assert_irreducible, cache };
            let report = analyze_pair(&recs, &label1, &label2, p, field.into(), &config)?;
            emit(&emit_report(&report, format.into())?, out.as_ref())?;
            Ok(report.exit_code() as u8)
        }
        Command::Scan { db, p, bound, format } => {
            let recs = parse_curve_records(&db)?;
            let found = scan(&recs, p, bound, &cache)?;
            let text = match format {
                Format::Json => to_json(&found)?,
                Format::Text => {
                    let mut s = String::new();
                    for c in &found {
                        let places: Vec<_> = c.sigma1.iter().map(|v| v.label.as_str()).collect();
                        s.push_str(&format!(
                            "{} {}  |Σ₁| = {}  Σ₁ = {{{}}}  ({} primes compared)\n",
                            c.labels[0],
                            c.labels[1],
                            c.sigma1.len(),
                            places.join(","),
                            c.primes_tested
                        ));
                    }
                    if found.is_empty() {
                        s.push_str(&format!("no {p}-congruent pairs up to ℓ ≤ {bound}\n"));
                    }
                    s
                }
            };
            emit(&text, None)?;
            Ok(0)
        }
        Command::Report { format, file } => {
            let json = match &file {
                Some(path) => fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
                None => {
                    let mut s = String::new();
                    io::stdin().read_to_string(&mut s).map_err(|e| Error::Io(e.to_string()))?;
                    s
                }
            };
            let report = parse_report(&json)?;
            emit(&emit_report(&report, format.into())?, None)?;
            Ok(report.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    // Usage errors exit with 1 so they never collide with the outcome codes 2–4.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
