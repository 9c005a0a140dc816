//! `chm`: command-line access to the complex Hadamard catalogue, analysis
//! and constructions.
//!
//! Exit codes: 0 success; 2 check failed (`verify`, `mub`); 3 proven not
//! equivalent; 4 search budget exhausted; 64 usage error, unknown id or
//! wrong arity; 65 input document or data rejected; 74 I/O error.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use chm::analysis::{
    chains, default_tol, defect, dephase, equivalence_search_with, haagerup_invariants,
    is_hadamard, is_unbiased_pair, SearchOutcome,
};
use chm::catalogue::{self, CatalogueEntry};
use chm::construct::{double, dita_compose, enumerate_patterns, quadruple, tensor, PatternLimits};
use chm::io::{parse_matrix, serialize_matrix, serialize_report, serialize_witness};
use chm::{ChmError, DiagonalPhase, HadamardMatrix, PhaseValue};

const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_NOT_EQUIVALENT: u8 = 3;
const EXIT_EXHAUSTED: u8 = 4;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_IO: u8 = 74;

/// Environment variable that overrides the default Gram tolerance.
const TOL_ENV: &str = "CHM_DEFAULT_TOL";

#[derive(Parser)]
#[command(name = "chm", version, about = "Complex Hadamard matrix catalogue and toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the catalogue index grouped by dimension.
    List {
        /// Emit the full records as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Generate a catalogue matrix as a document.
    Gen {
        id: String,
        /// Parameter binding `name=value`; give all or none (none means zeros).
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Read parameter values as turns (`p/q` or decimal) instead of radians.
        #[arg(long)]
        turns: bool,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Check the Hadamard property; exit 2 on failure.
    Verify {
        file: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Bring a matrix to dephased form.
    Dephase {
        file: String,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Print the defect.
    Defect {
        file: String,
        /// Also print the kernel basis, one n×n block per element.
        #[arg(long)]
        kernel: bool,
    },
    /// Print the rounded Haagerup invariant set.
    Invariants {
        file: String,
        #[arg(long)]
        tol_cluster: Option<f64>,
        /// Append the number of index quadruples per value.
        #[arg(long)]
        multiplicities: bool,
    },
    /// Search for an equivalence witness; exit 3 if none exists, 4 on budget.
    Equiv {
        a: String,
        b: String,
        #[arg(long)]
        budget: Option<u64>,
        /// Per-entry tolerance for matching and witness verification.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Check that two Hadamard matrices are unbiased; exit 2 if not.
    Mub {
        a: String,
        b: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Kronecker product `A ⊗ B`.
    Tensor {
        a: String,
        b: String,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Diță composition of a K×K core with K blocks of size M.
    Dita {
        core: String,
        #[arg(required = true, num_args = 1..)]
        blocks: Vec<String>,
        /// Free phases of one diagonal `E_k` as a comma list of M−1 values;
        /// repeat K−1 times or omit for zeros.
        #[arg(long = "e", value_name = "PHASES")]
        es: Vec<String>,
        #[arg(long)]
        turns: bool,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// `[[A, E·B], [A, −E·B]]`.
    Double {
        a: String,
        b: String,
        #[arg(long = "e", value_name = "PHASES")]
        e: Option<String>,
        #[arg(long)]
        turns: bool,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Four-block sign composition of A, B, C, D.
    Quadruple {
        a: String,
        b: String,
        c: String,
        d: String,
        #[arg(long)]
        e1: Option<String>,
        #[arg(long)]
        e2: Option<String>,
        #[arg(long)]
        e3: Option<String>,
        #[arg(long)]
        turns: bool,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Print the chain of rows `i < j` (0-based), one `re im` pair per line.
    Chains { file: String, i: usize, j: usize },
    /// List the maximal closed-subchain pattern spaces (N ≤ 6).
    Patterns { file: String },
    /// Summarise a matrix document, or a catalogue entry with `--id`.
    Info {
        #[arg(required_unless_present = "id")]
        file: Option<String>,
        #[arg(long, conflicts_with = "file")]
        id: Option<String>,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Io(m) => m,
        }
    }
}

impl From<ChmError> for CliError {
    fn from(e: ChmError) -> Self {
        match e {
            ChmError::UnknownId(_) | ChmError::Arity { .. } | ChmError::NotAffine(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Data(other.to_string()),
        }
    }
}

type CliResult = Result<u8, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("chm: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cmd: Command) -> CliResult {
    match cmd {
        Command::List { json } => list(json),
        Command::Gen {
            id,
            params,
            turns,
            output,
        } => {
            let m = generate(&id, &params, turns)?;
            write_out(&output, &serialize_matrix(&m))
        }
        Command::Verify { file, tol } => {
            let m = load(&file)?;
            let tol = tolerance(tol, m.n())?;
            let r = is_hadamard(&m, Some(tol));
            print_out(&format!(
                "{} max_gram_deviation={:e} max_unimodular_deviation={:e} tol={:e}\n",
                if r.pass { "pass" } else { "fail" },
                r.max_gram_deviation,
                r.max_unimodular_deviation,
                r.tol
            ))?;
            Ok(if r.pass { 0 } else { EXIT_CHECK_FAILED })
        }
        Command::Dephase { file, output } => {
            let m = load(&file)?;
            write_out(&output, &serialize_matrix(&dephase(&m).h.traced("dephase")))
        }
        Command::Defect { file, kernel } => {
            let m = load(&file)?;
            let r = defect(&m)?;
            let mut out = format!("{}\n", r.defect);
            if kernel {
                let n = m.n();
                for basis in &r.kernel_basis {
                    out.push('\n');
                    for row in basis.chunks(n) {
                        let cells: Vec<String> = row.iter().map(|x| fmt_real(*x, 12)).collect();
                        out.push_str(&cells.join(" "));
                        out.push('\n');
                    }
                }
            }
            print_out(&out)
        }
        Command::Invariants {
            file,
            tol_cluster,
            multiplicities,
        } => {
            let m = load(&file)?;
            let set = haagerup_invariants(&m, tol_cluster);
            let digits = (-set.tol_cluster.log10()).ceil().max(0.0) as usize;
            let mut out = String::new();
            for (z, count) in set.values.iter().zip(&set.multiplicities) {
                out.push_str(&format!("{} {}", fmt_real(z.re, digits), fmt_real(z.im, digits)));
                if multiplicities {
                    out.push_str(&format!(" {count}"));
                }
                out.push('\n');
            }
            print_out(&out)
        }
        Command::Equiv { a, b, budget, tol } => {
            let (ma, mb) = load_pair(&a, &b)?;
            match equivalence_search_with(&ma, &mb, budget, tol)? {
                SearchOutcome::Equivalent(w) => {
                    print_out(&serialize_witness(&w))?;
                    Ok(0)
                }
                SearchOutcome::NotFound => {
                    print_out("not equivalent\n")?;
                    Ok(EXIT_NOT_EQUIVALENT)
                }
                SearchOutcome::Exhausted { nodes } => {
                    print_out(&format!("exhausted after {nodes} nodes\n"))?;
                    Ok(EXIT_EXHAUSTED)
                }
            }
        }
        Command::Mub { a, b, tol } => {
            let (ma, mb) = load_pair(&a, &b)?;
            let tol = tolerance(tol, ma.n())?;
            let ok = is_unbiased_pair(&ma, &mb, Some(tol))?;
            print_out(if ok { "unbiased\n" } else { "not unbiased\n" })?;
            Ok(if ok { 0 } else { EXIT_CHECK_FAILED })
        }
        Command::Tensor { a, b, output } => {
            let (ma, mb) = load_pair(&a, &b)?;
            write_out(&output, &serialize_matrix(&tensor(&ma, &mb)))
        }
        Command::Dita {
            core,
            blocks,
            es,
            turns,
            output,
        } => {
            check_stdin_use(std::iter::once(&core).chain(blocks.iter()))?;
            let core = load(&core)?;
            let bs = blocks.iter().map(|f| load(f)).collect::<Result<Vec<_>, _>>()?;
            let m = bs[0].n();
            let k = core.n();
            let diags = if es.is_empty() {
                vec![DiagonalPhase::identity(m); k.saturating_sub(1)]
            } else {
                es.iter()
                    .map(|s| diagonal(s, m, turns))
                    .collect::<Result<Vec<_>, _>>()?
            };
            write_out(&output, &serialize_matrix(&dita_compose(&core, &bs, &diags)?))
        }
        Command::Double {
            a,
            b,
            e,
            turns,
            output,
        } => {
            let (ma, mb) = load_pair(&a, &b)?;
            let e = optional_diagonal(e.as_deref(), mb.n(), turns)?;
            write_out(&output, &serialize_matrix(&double(&ma, &mb, &e)?))
        }
        Command::Quadruple {
            a,
            b,
            c,
            d,
            e1,
            e2,
            e3,
            turns,
            output,
        } => {
            check_stdin_use([&a, &b, &c, &d])?;
            let ms = [&a, &b, &c, &d]
                .iter()
                .map(|f| load(f))
                .collect::<Result<Vec<_>, _>>()?;
            let m = ms[1].n();
            let e1 = optional_diagonal(e1.as_deref(), m, turns)?;
            let e2 = optional_diagonal(e2.as_deref(), m, turns)?;
            let e3 = optional_diagonal(e3.as_deref(), m, turns)?;
            let out = quadruple(&ms[0], &ms[1], &ms[2], &ms[3], &e1, &e2, &e3)?;
            write_out(&output, &serialize_matrix(&out))
        }
        Command::Chains { file, i, j } => {
            let m = load(&file)?;
            let mut out = String::new();
            for z in chains(&m, i, j)? {
                out.push_str(&format!("{} {}\n", fmt_real(z.re, 12), fmt_real(z.im, 12)));
            }
            print_out(&out)
        }
        Command::Patterns { file } => {
            let m = load(&file)?;
            let found = enumerate_patterns(&m, PatternLimits::default())?;
            #[derive(Serialize)]
            struct Row {
                dim: usize,
                blocks: Vec<Vec<Vec<usize>>>,
                basis: Vec<Vec<Vec<i64>>>,
            }
            let n = m.n();
            let rows: Vec<Row> = found
                .into_iter()
                .map(|(p, s)| Row {
                    dim: s.dim(),
                    blocks: p.blocks,
                    basis: s.basis.iter().map(|b| b.chunks(n).map(|r| r.to_vec()).collect()).collect(),
                })
                .collect();
            print_out(&serialize_report("pattern_spaces", &rows))
        }
        Command::Info { file, id } => match (file, id) {
            (_, Some(id)) => {
                let e = catalogue::entry(&id)?;
                print_out(&entry_info(&e))
            }
            (Some(file), None) => {
                let m = load(&file)?;
                print_out(&matrix_info(&m))
            }
            (None, None) => Err(CliError::Usage("give a file or --id".into())),
        },
    }
}

fn list(json: bool) -> CliResult {
    let entries = catalogue::list();
    if json {
        return print_out(&serialize_report("catalogue", &entries));
    }
    let mut by_n: BTreeMap<usize, Vec<&CatalogueEntry>> = BTreeMap::new();
    for e in &entries {
        by_n.entry(e.n).or_default().push(e);
    }
    let mut out = String::new();
    for (n, group) in by_n {
        out.push_str(&format!("N={n}\n"));
        for e in group {
            let params = if e.param_names.is_empty() {
                String::new()
            } else {
                format!("({})", e.param_names.join(","))
            };
            out.push_str(&format!(
                "  {:<8} [{:>2}] {:<18} {}{}{}\n",
                e.id,
                e.param_count,
                e.kind.as_str(),
                e.description,
                if params.is_empty() { "" } else { " " },
                params
            ));
        }
    }
    print_out(&out)
}

fn entry_info(e: &CatalogueEntry) -> String {
    format!(
        "id: {}\nn: {}\nkind: {}\nparam_count: {}\nparams: {}\napproximate: {}\nhadamard_tol: {:e}\ndescription: {}\n",
        e.id,
        e.n,
        e.kind.as_str(),
        e.param_count,
        e.param_names.join(","),
        e.approximate,
        e.hadamard_tol(),
        e.description
    )
}

fn matrix_info(m: &HadamardMatrix) -> String {
    let r = is_hadamard(m, None);
    let params: Vec<String> = m
        .meta()
        .params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    format!(
        "name: {}\nn: {}\nparams: {}\nexact: {}\nbutson_order: {}\ndephased: {}\nhadamard: {}\nmax_gram_deviation: {:e}\n",
        m.meta().name,
        m.n(),
        params.join(","),
        m.is_exact(),
        m.root_order().map_or("-".to_string(), |q| q.to_string()),
        m.is_dephased(),
        r.pass,
        r.max_gram_deviation
    )
}

/// Fixed-point formatting with negative zero folded to zero, so equal
/// rounded values print identically.
fn fmt_real(x: f64, digits: usize) -> String {
    let s = format!("{:.*}", digits, x);
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn tolerance(flag: Option<f64>, n: usize) -> Result<f64, CliError> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var(TOL_ENV) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t > 0.0)
            .ok_or_else(|| CliError::Usage(format!("{TOL_ENV}=`{v}` is not a positive number"))),
        Err(_) => Ok(default_tol(n)),
    }
}

/// A phase given on the command line: radians, or turns with `--turns`
/// (`p/q` stays exact).
fn parse_phase(s: &str, turns: bool) -> Result<PhaseValue, CliError> {
    let bad = || CliError::Usage(format!("`{s}` is not a phase value"));
    let s = s.trim();
    if turns {
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            return Ok(PhaseValue::turns(p, q));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        return Ok(PhaseValue::from_radians(x * std::f64::consts::TAU));
    }
    let x: f64 = s.parse().map_err(|_| bad())?;
    if !x.is_finite() {
        return Err(bad());
    }
    Ok(PhaseValue::from_radians(x))
}

fn generate(id: &str, bindings: &[String], turns: bool) -> Result<HadamardMatrix, CliError> {
    let entry = catalogue::entry(id)?;
    let mut values: Vec<Option<PhaseValue>> = vec![None; entry.param_count];
    for b in bindings {
        let (name, value) = b
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("`{b}` is not of the form name=value")))?;
        let idx = entry
            .param_names
            .iter()
            .position(|p| p == name.trim())
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "`{id}` has no parameter `{name}` (parameters: {})",
                    entry.param_names.join(",")
                ))
            })?;
        if values[idx].is_some() {
            return Err(CliError::Usage(format!("parameter `{name}` given twice")));
        }
        values[idx] = Some(parse_phase(value, turns)?);
    }
    let given = values.iter().filter(|v| v.is_some()).count();
    if given != 0 && given != entry.param_count {
        return Err(CliError::Usage(format!(
            "`{id}` takes {} parameters ({}); give all of them or none",
            entry.param_count,
            entry.param_names.join(",")
        )));
    }
    let params: Vec<PhaseValue> = values.into_iter().map(|v| v.unwrap_or(PhaseValue::ZERO)).collect();
    Ok(catalogue::get_phases(id, &params)?)
}

fn diagonal(s: &str, m: usize, turns: bool) -> Result<DiagonalPhase, CliError> {
    let rest: Vec<PhaseValue> = s
        .split(',')
        .map(|x| parse_phase(x, turns))
        .collect::<Result<_, _>>()?;
    if rest.len() + 1 != m {
        return Err(CliError::Usage(format!(
            "a diagonal for blocks of size {m} needs {} phases, got {}",
            m - 1,
            rest.len()
        )));
    }
    let mut phases = vec![PhaseValue::ZERO];
    phases.extend(rest);
    Ok(DiagonalPhase::new(phases))
}

fn optional_diagonal(s: Option<&str>, m: usize, turns: bool) -> Result<DiagonalPhase, CliError> {
    match s {
        Some(s) => diagonal(s, m, turns),
        None => Ok(DiagonalPhase::identity(m)),
    }
}

fn check_stdin_use<'a>(paths: impl IntoIterator<Item = &'a String>) -> Result<(), CliError> {
    if paths.into_iter().filter(|p| p.as_str() == "-").count() > 1 {
        return Err(CliError::Usage("stdin (`-`) can be used for one input only".into()));
    }
    Ok(())
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
    }
}

fn load(path: &str) -> Result<HadamardMatrix, CliError> {
    let text = read_input(path)?;
    parse_matrix(&text).map_err(|e| CliError::Data(format!("{path}: {e}")))
}

fn load_pair(a: &str, b: &str) -> Result<(HadamardMatrix, HadamardMatrix), CliError> {
    check_stdin_use([&a.to_string(), &b.to_string()])?;
    Ok((load(a)?, load(b)?))
}

fn print_out(text: &str) -> CliResult {
    write_out("-", text)
}

fn write_out(path: &str, text: &str) -> CliResult {
    if path == "-" {
        let mut stdout = io::stdout().lock();
        stdout
            .write_all(text.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
    } else {
        fs::write(path, text).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    }
    Ok(0)
}
