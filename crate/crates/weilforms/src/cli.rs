//! Command-line front end. [`run`] parses arguments, dispatches one command
//! and returns the exit status together with everything destined for
//! standard output and standard error, so it can be driven from tests.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use weilforms_core::arith::{format_rational, parse_rational};
use weilforms_core::classnum::{hurwitz, prop10_check, remark12_check, HurwitzTable, Prop10Variant};
use weilforms_core::cuspgen::{cusp_basis, r_series, CuspIndex};
use weilforms_core::dimensions::dim_antisymmetric;
use weilforms_core::eisenstein::eisenstein_qexp;
use weilforms_core::exec::{DensityStore, NoStore, ParMap};
use weilforms_core::thetalift::{doi_naganuma, theta_lift, LorentzianGram};
use weilforms_core::weight3::weight3_cyclic;
use weilforms_core::{EvenLattice, FiniteQuadraticModule, HalfInteger, QExpansion, Rational};

use crate::error::CliError;
use crate::format::{read_json, GramFile, LiftKeys, OrthogonalExpansionJson, QExpansionJson};
use crate::par::RayonPar;
use crate::store::{default_cache_dir, DiskStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "weilforms", version, about = "Antisymmetric vector-valued cusp forms, theta lifts and class number identities")]
pub struct Cli {
    /// Output style; goes before the subcommand.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Local density cache; defaults to $WEILFORMS_CACHE_DIR or ./.weilforms-cache.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Do not read or write the density cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GramArgs {
    /// JSON file {"gram": [[...], ...]}.
    #[arg(long)]
    pub gram: PathBuf,
    /// Use the negated Gram matrix.
    #[arg(long)]
    pub negate: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Group structure, level, signature and Q-values of the discriminant module.
    FqmInfo {
        #[command(flatten)]
        gram: GramArgs,
    },
    /// Dimensions of M_k and S_k in an antisymmetric weight.
    Dim {
        #[command(flatten)]
        gram: GramArgs,
        #[arg(long)]
        weight: String,
    },
    /// Eisenstein series coefficients up to the precision.
    Eisenstein {
        #[command(flatten)]
        gram: GramArgs,
        #[arg(long)]
        weight: String,
        #[arg(long)]
        prec: String,
    },
    /// The cusp form R_{k,m,β}.
    RSeries {
        #[command(flatten)]
        gram: GramArgs,
        #[arg(long)]
        weight: String,
        #[arg(long)]
        m: String,
        /// β in generator coordinates, e.g. 3 or 1,0.
        #[arg(long, conflicts_with = "beta_dual", required_unless_present = "beta_dual")]
        beta: Option<String>,
        /// β as a dual lattice vector, e.g. 2/5,1/5.
        #[arg(long)]
        beta_dual: Option<String>,
        #[arg(long)]
        prec: String,
    },
    /// A basis of S_k made of R-series.
    CuspBasis {
        #[command(flatten)]
        gram: GramArgs,
        #[arg(long)]
        weight: String,
        #[arg(long)]
        prec: Option<String>,
    },
    /// The weight three form for the cyclic module of level N.
    Weight3 {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        prec: String,
    },
    /// Theta lift to an orthogonal modular form.
    ThetaLift {
        /// Lorentzian Gram matrix; an optional "cone_seed" picks the cone (default e₁).
        #[arg(long)]
        gram: PathBuf,
        /// QExpansion JSON of the input form.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        bound: String,
        #[arg(long, value_enum, default_value_t = LiftKeys::Lattice)]
        format: LiftKeys,
    },
    /// Doi–Naganuma lift to a Hilbert modular form for Q(√D).
    DoiNaganuma {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        bound: String,
    },
    /// Check the Hurwitz class number identities.
    ClassIdentity {
        #[arg(long, value_enum, conflicts_with = "remark12", required_unless_present = "remark12")]
        prop10: Option<Variant>,
        #[arg(long)]
        remark12: bool,
        #[arg(long)]
        n_max: u64,
    },
    /// The Hurwitz class number H(d).
    Hurwitz {
        #[arg(long)]
        d: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    I,
    Ii,
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => {
                    let report = json!({"error": {"kind": "usage", "message": text.trim_end(), "exit_code": 2}});
                    Outcome { code: 2, stdout: String::new(), stderr: format!("{report}\n") }
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(out) => Outcome { code: 0, stdout: out, stderr: String::new() },
        Err(e) => {
            let report = serde_json::to_string(&e.report()).unwrap_or_default();
            let stdout = match cli.format {
                OutputFormat::Json => String::new(),
                OutputFormat::Table => format!("error: {e}\n"),
            };
            Outcome { code: e.exit_code(), stdout, stderr: format!("{report}\n") }
        }
    }
}

fn rational(s: &str) -> Result<Rational, CliError> {
    Ok(parse_rational(s.trim())?)
}

fn half_integer(s: &str) -> Result<HalfInteger, CliError> {
    Ok(s.trim().parse()?)
}

fn lattice(g: &GramArgs) -> Result<EvenLattice, CliError> {
    let file: GramFile = read_json(&g.gram)?;
    let l = file.lattice()?;
    Ok(if g.negate { l.negated() } else { l })
}

fn read_qexp(path: &Path) -> Result<QExpansion, CliError> {
    read_json::<QExpansionJson>(path)?.to_expansion()
}

fn pretty<T: Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| CliError::Io(e.to_string()))
}

/// Left-aligned columns separated by two spaces.
pub fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    for r in rows {
        out += &line(r.iter().map(String::as_str).collect());
    }
    out
}

fn qexp_table(f: &QExpansion) -> String {
    let rows: Vec<Vec<String>> = f
        .iter()
        .map(|(g, n, c)| vec![g.to_string(), format_rational(n), format_rational(c)])
        .collect();
    render_table(&["gamma", "n", "c"], &rows)
}

fn emit_qexp(format: OutputFormat, f: &QExpansion) -> Result<String, CliError> {
    match format {
        OutputFormat::Json => pretty(&QExpansionJson::from_expansion(f)),
        OutputFormat::Table => Ok(qexp_table(f)),
    }
}

fn emit_lift(format: OutputFormat, j: &OrthogonalExpansionJson) -> Result<String, CliError> {
    match format {
        OutputFormat::Json => pretty(j),
        OutputFormat::Table => {
            let rows: Vec<Vec<String>> = j
                .coeffs
                .iter()
                .map(|t| {
                    let key = match (&t.n, &t.nu) {
                        (Some(n), _) => n.clone(),
                        (_, Some(nu)) => format!("{} + {}·√{}", nu.a, nu.b, nu.d),
                        _ => String::new(),
                    };
                    vec![format!("({})", t.r.join(", ")), t.height.clone(), key, t.c.clone()]
                })
                .collect();
            Ok(render_table(&["r", "height", "index", "c"], &rows))
        }
    }
}

fn emit_rows(format: OutputFormat, headers: &[&str], rows: Vec<Vec<String>>, json: Value) -> Result<String, CliError> {
    match format {
        OutputFormat::Json => pretty(&json),
        OutputFormat::Table => Ok(render_table(headers, &rows)),
    }
}

fn parse_beta(module: &FiniteQuadraticModule, beta: Option<&str>, beta_dual: Option<&str>) -> Result<weilforms_core::FqmElement, CliError> {
    if let Some(s) = beta {
        let coords: Vec<i64> = s
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|e| CliError::Input(format!("--beta {s}: {e}"))))
            .collect::<Result<_, _>>()?;
        return Ok(module.element(&coords)?);
    }
    let s = beta_dual.ok_or_else(|| CliError::Input(String::from("one of --beta and --beta-dual is required")))?;
    let v: Vec<Rational> = s.split(',').map(rational).collect::<Result<_, _>>()?;
    Ok(module.dual_coset(&v)?)
}

fn dispatch(cli: &Cli) -> Result<String, CliError> {
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        return Err(CliError::Input(String::from("--threads must be positive")));
    }
    let par = RayonPar::new(threads).map_err(|e| CliError::Io(e.to_string()))?;
    let disk;
    let store: &dyn DensityStore = if cli.no_cache {
        &NoStore
    } else {
        let dir = cli.cache_dir.clone().unwrap_or_else(default_cache_dir);
        disk = DiskStore::open(&dir).map_err(|e| CliError::Io(format!("cache {}: {e}", dir.display())))?;
        &disk
    };
    let fmt = cli.format;
    match &cli.command {
        Command::FqmInfo { gram } => fqm_info(fmt, &lattice(gram)?),
        Command::Dim { gram, weight } => {
            let module = FiniteQuadraticModule::new(lattice(gram)?)?;
            let r = dim_antisymmetric(&module, half_integer(weight)?)?;
            let json = json!({
                "weight": r.weight.to_string(),
                "dim_m": r.dim_m,
                "dim_s": r.dim_s,
                "alpha4_tilde": r.alpha4_tilde,
                "b1": format_rational(&r.b1),
                "b2": format_rational(&r.b2),
                "d_pairs": r.d_pairs,
                "numeric_residual": r.numeric_residual,
            });
            let rows = vec![vec![r.weight.to_string(), r.dim_m.to_string(), r.dim_s.to_string(), format!("{:.2e}", r.numeric_residual)]];
            emit_rows(fmt, &["weight", "dim_m", "dim_s", "residual"], rows, json)
        }
        Command::Eisenstein { gram, weight, prec } => {
            let f = eisenstein_qexp(&lattice(gram)?, half_integer(weight)?, &rational(prec)?, &par, store)?;
            emit_qexp(fmt, &f)
        }
        Command::RSeries { gram, weight, m, beta, beta_dual, prec } => {
            let l = lattice(gram)?;
            let module = FiniteQuadraticModule::new(l.clone())?;
            let b = parse_beta(&module, beta.as_deref(), beta_dual.as_deref())?;
            let idx = CuspIndex::new(&module, rational(m)?, b)?;
            let f = r_series(&l, half_integer(weight)?, &idx, &rational(prec)?, &par, store)?;
            emit_qexp(fmt, &f)
        }
        Command::CuspBasis { gram, weight, prec } => {
            let l = lattice(gram)?;
            let prec = prec.as_deref().map(rational).transpose()?;
            let basis = cusp_basis(&l, half_integer(weight)?, prec.as_ref(), &par, store)?;
            let json = json!({
                "dim_s": basis.len(),
                "basis": basis.iter().map(|(idx, f)| json!({
                    "m": format_rational(&idx.m),
                    "beta": idx.beta.coords,
                    "expansion": QExpansionJson::from_expansion(f),
                })).collect::<Vec<_>>(),
            });
            match fmt {
                OutputFormat::Json => pretty(&json),
                OutputFormat::Table => {
                    let mut out = String::new();
                    for (idx, f) in &basis {
                        out += &format!("R[m = {}, beta = {}]\n", format_rational(&idx.m), idx.beta);
                        out += &qexp_table(f);
                    }
                    Ok(out)
                }
            }
        }
        Command::Weight3 { n, prec } => {
            let f = weight3_cyclic(*n, &rational(prec)?, &mut HurwitzTable::new())?;
            emit_qexp(fmt, &f)
        }
        Command::ThetaLift { gram, input, weight, bound, format } => {
            let file: GramFile = read_json(gram)?;
            let seed = match &file.cone_seed {
                Some(v) => v.iter().map(|s| rational(s)).collect::<Result<Vec<_>, _>>()?,
                None => (0..file.gram.len()).map(|i| weilforms_core::arith::int((i == 0) as i64)).collect(),
            };
            let s = LorentzianGram::new(file.gram.clone(), seed)?;
            let lift = theta_lift(&read_qexp(input)?, &s, *weight, &rational(bound)?, &par)?;
            emit_lift(fmt, &OrthogonalExpansionJson::from_expansion(&lift, *format)?)
        }
        Command::DoiNaganuma { d, input, bound } => {
            let lift = doi_naganuma(*d, &read_qexp(input)?, &rational(bound)?, &par)?;
            emit_lift(fmt, &OrthogonalExpansionJson::from_expansion(&lift, LiftKeys::Hilbert)?)
        }
        Command::ClassIdentity { prop10, remark12, n_max } => class_identity(fmt, *prop10, *remark12, *n_max, &par),
        Command::Hurwitz { d } => {
            let h = format_rational(&hurwitz(*d));
            match fmt {
                OutputFormat::Json => pretty(&h),
                OutputFormat::Table => Ok(h + "\n"),
            }
        }
    }
}

fn fqm_info(fmt: OutputFormat, l: &EvenLattice) -> Result<String, CliError> {
    let a = FiniteQuadraticModule::new(l.clone())?;
    let els = a.elements();
    let order_of = |x: &weilforms_core::FqmElement| (1..=a.level()).find(|&k| a.scale(x, k as i64) == a.zero()).unwrap_or(1);
    let rows: Vec<Vec<String>> = els
        .iter()
        .map(|x| vec![x.to_string(), format_rational(&a.qvalue(x)), order_of(x).to_string()])
        .collect();
    let json = json!({
        "gram": l.gram(),
        "order": a.order(),
        "invariants": a.orders(),
        "level": a.level(),
        "signature": a.signature(),
        "elements": els.iter().map(|x| json!({
            "gamma": x.coords,
            "q": format_rational(&a.qvalue(x)),
            "order": order_of(x),
        })).collect::<Vec<_>>(),
    });
    match fmt {
        OutputFormat::Json => pretty(&json),
        OutputFormat::Table => {
            let head = format!(
                "order {}  invariants {:?}  level {}  signature {}\n",
                a.order(),
                a.orders(),
                a.level(),
                a.signature()
            );
            Ok(head + &render_table(&["gamma", "Q", "order"], &rows))
        }
    }
}

fn class_identity<P: ParMap>(fmt: OutputFormat, prop10: Option<Variant>, remark12: bool, n_max: u64, par: &P) -> Result<String, CliError> {
    // one Hurwitz table per chunk of consecutive n
    let chunks: Vec<Vec<u64>> = (1..=n_max).collect::<Vec<_>>().chunks(16).map(<[u64]>::to_vec).collect();
    if remark12 {
        let rows: Vec<_> = par
            .par_map(chunks, |ns| {
                let mut t = HurwitzTable::new();
                ns.into_iter().map(|n| remark12_check(n, &mut t)).collect::<Vec<_>>()
            })
            .into_iter()
            .flatten()
            .collect();
        let json = Value::Array(
            rows.iter()
                .map(|r| {
                    json!({"n": r.n, "lhs1": format_rational(&r.lhs1), "lhs2": format_rational(&r.lhs2),
                           "rhs": format_rational(&r.rhs), "equal": r.equal})
                })
                .collect(),
        );
        let table = rows
            .iter()
            .map(|r| {
                vec![r.n.to_string(), format_rational(&r.lhs1), format_rational(&r.lhs2), format_rational(&r.rhs), r.equal.to_string()]
            })
            .collect();
        return emit_rows(fmt, &["n", "lhs1", "lhs2", "rhs", "equal"], table, json);
    }
    let variant = match prop10 {
        Some(Variant::I) => Prop10Variant::I,
        Some(Variant::Ii) => Prop10Variant::II,
        None => return Err(CliError::Input(String::from("one of --prop10 and --remark12 is required"))),
    };
    let rows = par
        .par_map(chunks, |ns| {
            let mut t = HurwitzTable::new();
            ns.into_iter().map(|n| prop10_check(variant, n, &mut t)).collect::<Result<Vec<_>, _>>()
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    let json = Value::Array(
        rows.iter()
            .map(|r| json!({"n": r.n, "lhs": format_rational(&r.lhs), "rhs": format_rational(&r.rhs), "equal": r.equal}))
            .collect(),
    );
    let table = rows
        .iter()
        .map(|r| vec![r.n.to_string(), format_rational(&r.lhs), format_rational(&r.rhs), r.equal.to_string()])
        .collect();
    emit_rows(fmt, &["n", "lhs", "rhs", "equal"], table, json)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> String {
        let mut full = vec!["weilforms", "--no-cache"];
        full.extend_from_slice(args);
        let out = run(full);
        assert_eq!(out.code, 0, "stderr: {}", out.stderr);
        out.stdout
    }

    #[test]
    fn hurwitz_twelve() {
        assert_eq!(run_ok(&["hurwitz", "--d", "12"]), "\"4/3\"\n");
        assert_eq!(run_ok(&["--format", "table", "hurwitz", "--d", "3"]), "1/3\n");
    }

    #[test]
    fn remark12_rows() {
        let v: Value = serde_json::from_str(&run_ok(&["class-identity", "--remark12", "--n-max", "10"])).unwrap();
        let rows = v.as_array().unwrap();
        assert_eq!(rows.len(), 10);
        assert!(rows.iter().all(|r| r["equal"] == true));
    }

    #[test]
    fn table_alignment() {
        let t = render_table(&["a", "bb"], &[vec!["100".into(), "x".into()]]);
        assert_eq!(t, "a    bb\n100  x\n");
    }

    #[test]
    fn usage_errors_are_json() {
        let out = run(["weilforms", "hurwitz"]);
        assert_eq!(out.code, 2);
        let v: Value = serde_json::from_str(out.stderr.trim()).unwrap();
        assert_eq!(v["error"]["kind"], "usage");
    }
}
