//! Command-line surface over the bistrat library.
//!
//! Exit codes: 0 on success, 1 when a domain violation is found (failed
//! bisheaf axioms, failed certification, internal invariant breach), 2 on
//! usage or parse errors. Failures additionally emit a machine-readable
//! `{"error": {"kind", "message"}}` object on standard error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use bistrat::io::{
    parse, parse_unvalidated, serialize_document, to_document, ParseError,
};
use bistrat::oracle::{certify_canonical, OracleError, DEFAULT_LIMIT};
use bistrat::stratify::{canonical_sweep, StratifyError};
use bistrat::{find_zigzag, transport, Bisheaf, Complex, Simplex, Stratification};

#[derive(Parser)]
#[command(name = "bistrat", version, about = "Canonical stratification of bisheaves over simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the bisheaf axioms of a document; exit 0 iff they hold
    Validate { file: PathBuf },
    /// Compute the canonical stratification of a document
    Stratify {
        file: PathBuf,
        /// Write the output here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Labels)]
        format: Format,
    },
    /// Certify by brute-force enumeration that the canonical stratification
    /// is the coarsest valid one; exit 0 iff the certificate holds
    Certify {
        file: PathBuf,
        /// Refuse complexes with more simplices than this
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
    },
    /// Search a zigzag witness between two simplices and transport along it
    Zigzag {
        file: PathBuf,
        /// Start simplex as a comma-joined vertex list, e.g. 0,1
        #[arg(long)]
        from: String,
        /// End simplex as a comma-joined vertex list
        #[arg(long)]
        to: String,
        /// Sweep level whose transport relations the witness may use
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Emit a bisheaf document over a complex given as a JSON file of
    /// maximal simplices
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stalk dimension for constant bisheaves
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Dimension bound for random bisheaves
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// One `simplex -> stratum id` line per simplex
    Labels,
    /// One line per filtration level
    Filtration,
    /// The frontier poset as a graphviz digraph
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Constant,
    Random,
}

struct Failure {
    kind: &'static str,
    message: String,
    code: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: "usage",
            message: message.into(),
            code: 2,
        }
    }

    fn domain(message: impl Into<String>) -> Self {
        Self {
            kind: "domain",
            message: message.into(),
            code: 1,
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::Validation(_) => Failure {
                kind: "validation",
                message: e.to_string(),
                code: 1,
            },
            _ => Failure {
                kind: "parse",
                message: e.to_string(),
                code: 2,
            },
        }
    }
}

impl From<StratifyError> for Failure {
    fn from(e: StratifyError) -> Self {
        match e {
            StratifyError::InvalidBisheaf(_) => Failure {
                kind: "validation",
                message: e.to_string(),
                code: 1,
            },
            StratifyError::ComponentContainsRemoved { .. }
            | StratifyError::UngradedFrontier { .. } => Failure {
                kind: "internal",
                message: e.to_string(),
                code: 1,
            },
            _ => Failure {
                kind: "domain",
                message: e.to_string(),
                code: 1,
            },
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::TooLarge { .. } => Failure::usage(e.to_string()),
            OracleError::Stratify(inner) => inner.into(),
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        kind: "io",
        message: format!("{}: {e}", path.display()),
        code: 2,
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => fs::write(path, text).map_err(|e| Failure {
            kind: "io",
            message: format!("{}: {e}", path.display()),
            code: 2,
        }),
    }
}

fn stratum_label(c: &Complex, s: &Stratification, id: usize) -> String {
    let stratum = &s.strata()[id];
    format!("{}:{}", stratum.dimension, c.simplex(stratum.simplices[0]))
}

fn render(s: &Stratification, format: Format) -> String {
    let c = s.complex();
    match format {
        Format::Labels => {
            let mut out = String::new();
            for i in 0..c.len() {
                out.push_str(&format!("{} -> {}\n", c.simplex(i), s.stratum_of(i)));
            }
            out
        }
        Format::Filtration => {
            let mut out = String::new();
            for level in -1..=c.dimension() {
                out.push_str(&format!("M[{level}]:"));
                for i in s.mask_at_level(level).members() {
                    out.push_str(&format!(" {}", c.simplex(i)));
                }
                out.push('\n');
            }
            out
        }
        Format::Dot => {
            let mut out = String::from("digraph frontier {\n");
            for id in 0..s.strata().len() {
                out.push_str(&format!("  \"{}\";\n", stratum_label(c, s, id)));
            }
            for &(a, b) in s.frontier() {
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\";\n",
                    stratum_label(c, s, a),
                    stratum_label(c, s, b)
                ));
            }
            out.push_str("}\n");
            out
        }
    }
}

fn resolve_simplex(b: &Bisheaf, text: &str) -> Result<usize, Failure> {
    let verts: Result<Vec<u32>, _> = text.split(',').map(|v| v.trim().parse()).collect();
    let verts = verts.map_err(|_| Failure::usage(format!("bad simplex {text:?}")))?;
    let s = Simplex::new(verts).map_err(|e| Failure::usage(format!("bad simplex {text:?}: {e}")))?;
    b.complex()
        .index_of(&s)
        .ok_or_else(|| Failure::usage(format!("simplex {text} is not in the complex")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { file } => {
            let b = parse_unvalidated(&read_file(&file)?)?;
            let violations = b.validate();
            if violations.is_empty() {
                println!("ok");
                Ok(())
            } else {
                for v in &violations {
                    println!("violation: {}", v.describe(b.complex()));
                }
                Err(Failure {
                    kind: "validation",
                    message: format!("{} violation(s) found", violations.len()),
                    code: 1,
                })
            }
        }
        Command::Stratify { file, out, format } => {
            let b = parse(&read_file(&file)?)?;
            let s = bistrat::canonical_stratification(&b)?;
            emit(&out, &render(&s, format))
        }
        Command::Certify { file, limit } => {
            let b = parse(&read_file(&file)?)?;
            let report = certify_canonical(&b, limit)?;
            println!("valid stratifications: {}", report.valid_count);
            println!("canonical found: {}", report.canonical_found);
            println!("all refine canonical: {}", report.all_refine_canonical);
            if report.passed() {
                println!("result: pass");
                Ok(())
            } else {
                println!("result: fail");
                Err(Failure::domain("certification failed"))
            }
        }
        Command::Zigzag {
            file,
            from,
            to,
            level,
        } => {
            let b = parse(&read_file(&file)?)?;
            let from = resolve_simplex(&b, &from)?;
            let to = resolve_simplex(&b, &to)?;
            let sweep = canonical_sweep(&b)?;
            let Some(relations) = sweep.transport_levels.get(level) else {
                return Err(Failure::usage(format!(
                    "level {level} is out of range (complex dimension is {})",
                    b.complex().dimension()
                )));
            };
            match find_zigzag(b.complex(), relations, from, to)
                .map_err(|e| Failure::domain(e.to_string()))?
            {
                None => {
                    println!("none");
                    Ok(())
                }
                Some(witness) => {
                    println!("witness: {}", witness.describe(b.complex()));
                    let t = transport(&b, &witness)
                        .map_err(|e| Failure::domain(e.to_string()))?;
                    println!("phi: {}", t.phi);
                    println!("psi: {}", t.psi);
                    Ok(())
                }
            }
        }
        Command::Generate {
            kind,
            complex,
            p,
            seed,
            dim,
            max_dim,
        } => {
            let maximal: Vec<Vec<u32>> = serde_json::from_str(&read_file(&complex)?)
                .map_err(|e| Failure::usage(format!("bad complex file: {e}")))?;
            let c = Arc::new(
                Complex::build(&maximal).map_err(|e| Failure::usage(e.to_string()))?,
            );
            let b = match kind {
                Kind::Constant => Bisheaf::constant(&c, p, dim),
                Kind::Random => Bisheaf::random(&c, p, max_dim, seed),
            }
            .map_err(|e| Failure::usage(e.to_string()))?;
            print!("{}", serialize_document(&to_document(&b)));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let payload = serde_json::json!({
                "error": { "kind": failure.kind, "message": failure.message }
            });
            eprintln!("{payload}");
            ExitCode::from(failure.code)
        }
    }
}
