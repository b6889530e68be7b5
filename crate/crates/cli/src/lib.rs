//! The `greenhom` command line.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |---|---|
//! | 0 | success |
//! | 1 | internal error |
//! | 2 | usage error |
//! | 3 | input error (unreadable or invalid problem file, bad vertex, unknown B) |
//! | 4 | search truncated or result inconclusive |
//! | 5 | a checked property is violated |

use std::fmt::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use greenhom_core::green::{enumerate_mgs, MgsEnumeration, SearchBounds, SpectrumReport};
use greenhom_core::modules::{enumerate_schurian, enumerate_thin_schurian, ModuleCatalog, ModuleError, DEFAULT_BUDGET};
use greenhom_core::orthogonality::{
    build_catalog, compare_module_counts, compare_sequence_sets, enumerate_mfho, verify_theorem, CorrespondenceBounds,
    CorrespondenceReport, HomMatrix, MfhoSequence, ModuleCountComparison, OrthoError, Universe, VerificationReport,
    DEFAULT_MFHO_BUDGET,
};
use greenhom_core::problem::{load_preset, parse_problem, preset_source, ProblemFile};
use greenhom_core::quiver::{IceQuiver, VertexColor};
use serde::{Deserialize, Serialize};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_INCONCLUSIVE: u8 = 4;
pub const EXIT_VIOLATION: u8 = 5;

#[derive(Debug, Parser)]
#[command(name = "greenhom", version, about = "Maximal green sequences and hom-orthogonal module sequences")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// Pretty-printed JSON.
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mutate the framed quiver at the given vertices (red vertices allowed).
    Mutate {
        /// Problem file path or preset name.
        file: String,
        #[arg(required = true)]
        vertices: Vec<usize>,
    },
    /// Enumerate maximal green sequences.
    Mgs {
        file: String,
        /// Print only count, minimum and maximum length.
        #[arg(long, conflicts_with = "all")]
        spectrum: bool,
        /// Print every sequence (the default).
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// List the Schurian module catalog.
    Modules {
        file: String,
        #[command(flatten)]
        catalog: CatalogArgs,
    },
    /// List maximal forward hom-orthogonal sequences.
    Mfho {
        file: String,
        #[command(flatten)]
        catalog: CatalogArgs,
    },
    /// Check the designated B modules and the MGS correspondence.
    Verify {
        file: String,
        /// Only this B specification.
        #[arg(long = "b")]
        b: Option<String>,
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        catalog: CatalogArgs,
    },
    /// Start the session API.
    Serve {
        /// Problem used for sessions created without a body.
        file: Option<String>,
        #[arg(long, env = "GREENHOM_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "GREENHOM_BIND", default_value = "127.0.0.1")]
        bind: std::net::IpAddr,
        /// Idle session timeout in seconds.
        #[arg(long, env = "GREENHOM_IDLE_TIMEOUT", default_value_t = 1800)]
        idle_timeout: u64,
        /// State budget for completion searches.
        #[arg(long, env = "GREENHOM_COMPLETION_BUDGET", default_value_t = 1_000_000)]
        completion_budget: u64,
        /// Check every session state against a replay of its history.
        #[arg(long)]
        debug_replay: bool,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct BoundArgs {
    /// Maximum sequence length (default 4n).
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long, default_value_t = SearchBounds::DEFAULT_MAX_STATES)]
    pub max_states: u64,
}

impl BoundArgs {
    fn bounds(&self, n: usize) -> SearchBounds {
        let mut b = SearchBounds::for_vertices(n);
        b.max_states = self.max_states;
        if let Some(l) = self.max_len {
            b.max_len = l;
        }
        b
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct CatalogArgs {
    /// Thin modules only (the default).
    #[arg(long, conflicts_with = "max_entry")]
    pub thin: bool,
    /// Also brute-force dimension vectors with entries up to K.
    #[arg(long, value_name = "K")]
    pub max_entry: Option<usize>,
    /// Prime for the brute-force sweep.
    #[arg(long, default_value_t = 3)]
    pub field_size: u32,
    /// Node budget for the brute-force sweep.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub module_budget: u64,
    /// Node budget for the hom-orthogonal sequence search.
    #[arg(long, default_value_t = DEFAULT_MFHO_BUDGET)]
    pub mfho_budget: u64,
}

impl CatalogArgs {
    fn bounds(&self, search: SearchBounds) -> CorrespondenceBounds {
        CorrespondenceBounds {
            search,
            max_entry: self.max_entry.unwrap_or(1),
            field_size: self.field_size,
            module_budget: self.module_budget,
            mfho_budget: self.mfho_budget,
        }
    }
}

/// Output of one command: exit code and text for stdout, or a message for
/// stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn fail(code: u8, msg: impl Into<String>) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: msg.into(),
        }
    }
}

/// `spec` is a file path if one exists, otherwise a preset name.
pub fn load_problem(spec: &str) -> Result<ProblemFile, String> {
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).map_err(|e| format!("{spec}: {e}"))?;
        return parse_problem(&text).map_err(|e| format!("{spec}: {e}"));
    }
    if preset_source(spec).is_some() {
        return load_preset(spec).map_err(|e| e.to_string());
    }
    Err(format!("{spec}: no such file or preset"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowEntry {
    pub from: usize,
    pub to: usize,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutateReport {
    pub problem: String,
    pub sequence: Vec<usize>,
    pub n: usize,
    pub arrows: Vec<ArrowEntry>,
    /// Rows for mutable vertices `1..=n`, columns for all `2n` vertices.
    pub exchange_matrix: Vec<Vec<i64>>,
    pub c_matrix: Vec<Vec<i64>>,
    pub colors: Vec<VertexColor>,
    pub is_initial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MgsReport {
    pub problem: String,
    pub bounds: SearchBounds,
    pub enumeration: MgsEnumeration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumOutput {
    pub problem: String,
    pub bounds: SearchBounds,
    pub truncated: bool,
    pub spectrum: SpectrumReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleEntry {
    pub dims: Vec<usize>,
    /// One matrix per arrow, entries as exact rationals.
    pub matrices: Vec<NamedMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub arrow: String,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulesReport {
    pub problem: String,
    pub universe: Universe,
    pub truncated: bool,
    pub modules: Vec<ModuleEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MfhoReport {
    pub problem: String,
    pub universe: Universe,
    pub sequences: Vec<MfhoSequence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BResult {
    pub name: String,
    pub report: VerificationReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub problem: String,
    pub universe: Universe,
    pub mgs_count: usize,
    pub longest_mgs: usize,
    pub b_results: Vec<BResult>,
    pub correspondence: CorrespondenceReport,
    /// Exploratory only.
    pub module_counts: ModuleCountComparison,
}

pub fn modules_report(p: &ProblemFile, c: &ModuleCatalog, truncated: bool) -> ModulesReport {
    ModulesReport {
        problem: p.name.clone(),
        universe: Universe::of(c),
        truncated,
        modules: c
            .modules
            .iter()
            .map(|m| ModuleEntry {
                dims: m.dims().to_vec(),
                matrices: p
                    .quiver
                    .arrows()
                    .iter()
                    .zip(m.matrices())
                    .map(|(a, mat)| NamedMatrix {
                        arrow: a.name.clone(),
                        rows: mat.to_string_rows(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn fmt_vec<T: std::fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn fmt_seq<T: std::fmt::Display>(vs: &[Vec<T>]) -> String {
    vs.iter().map(|v| fmt_vec(v)).collect::<Vec<_>>().join(" ")
}

fn universe_line(u: &Universe) -> String {
    let mut s = format!(
        "module universe: {} Schurian modules, dimension-vector entries <= {}",
        u.catalog_size, u.dim_bound
    );
    if let Some(p) = u.field_size {
        let _ = write!(s, " (brute force over GF({p}), lifted to Q)");
    } else {
        s.push_str(" (thin modules only)");
    }
    s
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce(&T) -> String) -> String {
    match format {
        Format::Text => text(value),
        Format::Structured => serde_json::to_string_pretty(value).expect("serializable") + "\n",
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                Outcome::fail(code, rendered)
            }
        }
    }
}

pub fn execute(cli: Cli) -> Outcome {
    let format = cli.format;
    let problem = match &cli.command {
        Command::Serve { file: None, .. } => None,
        Command::Mutate { file, .. }
        | Command::Mgs { file, .. }
        | Command::Modules { file, .. }
        | Command::Mfho { file, .. }
        | Command::Verify { file, .. }
        | Command::Serve { file: Some(file), .. } => match load_problem(file) {
            Ok(p) => Some(p),
            Err(e) => return Outcome::fail(EXIT_INPUT, e),
        },
    };
    match cli.command {
        Command::Mutate { vertices, .. } => mutate(format, &problem.unwrap(), &vertices),
        Command::Mgs { spectrum, bounds, .. } => mgs(format, &problem.unwrap(), spectrum, bounds),
        Command::Modules { catalog, .. } => modules(format, &problem.unwrap(), catalog),
        Command::Mfho { catalog, .. } => mfho(format, &problem.unwrap(), catalog),
        Command::Verify { b, bounds, catalog, .. } => verify(format, &problem.unwrap(), b.as_deref(), bounds, catalog),
        Command::Serve {
            port,
            bind,
            idle_timeout,
            completion_budget,
            debug_replay,
            ..
        } => {
            let config = greenhom_service::Config {
                idle_timeout: std::time::Duration::from_secs(idle_timeout),
                completion_budget,
                debug_replay,
                default_problem: problem,
            };
            let rt = match tokio::runtime::Runtime::new() {
                Ok(rt) => rt,
                Err(e) => return Outcome::fail(EXIT_INTERNAL, e.to_string()),
            };
            let addr = std::net::SocketAddr::new(bind, port);
            eprintln!("listening on http://{addr}");
            match rt.block_on(greenhom_service::serve(addr, config)) {
                Ok(()) => Outcome::fail(EXIT_OK, ""),
                Err(e) => Outcome::fail(EXIT_INTERNAL, format!("{addr}: {e}")),
            }
        }
    }
}

fn mutate(format: Format, p: &ProblemFile, vertices: &[usize]) -> Outcome {
    let n = p.quiver.vertex_count();
    if let Some(v) = vertices.iter().find(|&&v| v == 0 || v > n) {
        return Outcome::fail(EXIT_INPUT, format!("vertex {v} is not mutable (mutable vertices are 1..={n})"));
    }
    let start = IceQuiver::framed(&p.quiver);
    let state = match start.mutate_sequence(vertices) {
        Ok(s) => s,
        Err(e) => return Outcome::fail(EXIT_INTERNAL, e.to_string()),
    };
    let c = match state.c_matrix() {
        Ok(c) => c,
        Err(e) => return Outcome::fail(EXIT_VIOLATION, e.to_string()),
    };
    let colors = (1..=n).map(|v| state.vertex_color(v)).collect::<Result<Vec<_>, _>>();
    let colors = match colors {
        Ok(c) => c,
        Err(e) => return Outcome::fail(EXIT_VIOLATION, e.to_string()),
    };
    let b = state.exchange_matrix();
    let report = MutateReport {
        problem: p.name.clone(),
        sequence: vertices.to_vec(),
        n,
        arrows: state
            .arrows()
            .into_iter()
            .map(|(from, to, multiplicity)| ArrowEntry { from, to, multiplicity })
            .collect(),
        exchange_matrix: b.rows().map(<[i64]>::to_vec).collect(),
        c_matrix: c.to_rows(),
        colors,
        is_initial: state == start,
    };
    let stdout = emit(format, &report, |r| {
        let mut s = String::new();
        let _ = writeln!(s, "{}: mutated at {}", r.problem, fmt_vec(&r.sequence));
        let _ = writeln!(s, "arrows (frozen i' = {} + i):", r.n);
        for a in &r.arrows {
            let _ = writeln!(s, "  {} -> {}{}", a.from, a.to, if a.multiplicity > 1 { format!(" x{}", a.multiplicity) } else { String::new() });
        }
        let _ = writeln!(s, "exchange matrix:");
        for (v, row) in r.exchange_matrix.iter().enumerate() {
            let _ = writeln!(s, "  {}: {}", v + 1, fmt_vec(row));
        }
        let _ = writeln!(s, "c-matrix:");
        for (v, row) in r.c_matrix.iter().enumerate() {
            let color = match r.colors[v] {
                VertexColor::Green => "green",
                VertexColor::Red => "red",
            };
            let _ = writeln!(s, "  {}: {} {color}", v + 1, fmt_vec(row));
        }
        if r.is_initial {
            let _ = writeln!(s, "state equals the framed quiver");
        }
        s
    });
    Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}

fn mgs(format: Format, p: &ProblemFile, spectrum: bool, args: BoundArgs) -> Outcome {
    let bounds = args.bounds(p.quiver.vertex_count());
    let e = match enumerate_mgs(&p.quiver, bounds) {
        Ok(e) => e,
        Err(e) => return Outcome::fail(EXIT_VIOLATION, e.to_string()),
    };
    let truncated = e.truncated;
    let code = if truncated.is_some() { EXIT_INCONCLUSIVE } else { EXIT_OK };
    let stderr = truncated
        .map(|t| format!("search truncated ({t}); results are partial"))
        .unwrap_or_default();
    let stdout = if spectrum {
        let out = SpectrumOutput {
            problem: p.name.clone(),
            bounds,
            truncated: truncated.is_some(),
            spectrum: SpectrumReport::from_sequences(&e.sequences),
        };
        emit(format, &out, |o| {
            let s = &o.spectrum;
            let mut t = format!("count={} p={} m={}\n", s.count, s.min, s.max);
            for (len, k) in &s.lengths {
                let _ = writeln!(t, "  length {len}: {k}");
            }
            t
        })
    } else {
        let out = MgsReport {
            problem: p.name.clone(),
            bounds,
            enumeration: e,
        };
        emit(format, &out, |o| {
            let mut t = String::new();
            for (k, s) in o.enumeration.sequences.iter().enumerate() {
                let _ = writeln!(
                    t,
                    "#{} length {}: {}  c-vectors {}",
                    k + 1,
                    s.length,
                    fmt_vec(&s.vertices),
                    fmt_seq(&s.c_vectors)
                );
            }
            let _ = writeln!(
                t,
                "{} maximal green sequences, {} states visited",
                o.enumeration.sequences.len(),
                o.enumeration.states_visited
            );
            t
        })
    };
    Outcome { code, stdout, stderr }
}

/// Catalog under `args`; a truncated brute force yields its partial catalog.
fn catalog(p: &ProblemFile, args: CatalogArgs) -> Result<(ModuleCatalog, bool), Outcome> {
    match args.max_entry {
        None | Some(1) => Ok((enumerate_thin_schurian(&p.algebra), false)),
        Some(k) => match enumerate_schurian(&p.algebra, k, args.field_size, args.module_budget) {
            Ok(c) => Ok((c, false)),
            Err(ModuleError::Truncated { partial, .. }) => Ok((*partial, true)),
            Err(e @ ModuleError::InvalidBound(_)) => Err(Outcome::fail(EXIT_INPUT, e.to_string())),
        },
    }
}

fn modules(format: Format, p: &ProblemFile, args: CatalogArgs) -> Outcome {
    let (c, truncated) = match catalog(p, args) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let report = modules_report(p, &c, truncated);
    let stdout = emit(format, &report, |r| {
        let mut s = String::new();
        for (k, m) in r.modules.iter().enumerate() {
            let maps: Vec<String> = m
                .matrices
                .iter()
                .filter(|a| !a.rows.is_empty() && !a.rows[0].is_empty())
                .map(|a| {
                    let rows: Vec<String> = a.rows.iter().map(|r| r.join(" ")).collect();
                    format!("{}=[{}]", a.arrow, rows.join("; "))
                })
                .collect();
            let _ = writeln!(s, "M{}: dim {}  {}", k + 1, fmt_vec(&m.dims), maps.join(" "));
        }
        let _ = writeln!(s, "{}", universe_line(&r.universe));
        s
    });
    Outcome {
        code: if truncated { EXIT_INCONCLUSIVE } else { EXIT_OK },
        stdout,
        stderr: if truncated { "module search budget exhausted; catalog is partial".into() } else { String::new() },
    }
}

fn mfho(format: Format, p: &ProblemFile, args: CatalogArgs) -> Outcome {
    let (c, truncated) = match catalog(p, args) {
        Ok(c) => c,
        Err(o) => return o,
    };
    if truncated {
        return Outcome::fail(EXIT_INCONCLUSIVE, "module search budget exhausted; maximality undecidable");
    }
    let hm = match HomMatrix::compute(&c) {
        Ok(h) => h,
        Err(e) => return Outcome::fail(EXIT_INTERNAL, e.to_string()),
    };
    let e = match enumerate_mfho(&c, &hm, args.mfho_budget) {
        Ok(e) => e,
        Err(e) => return Outcome::fail(EXIT_INCONCLUSIVE, e.to_string()),
    };
    let report = MfhoReport {
        problem: p.name.clone(),
        universe: Universe::of(&c),
        sequences: e.sequences,
    };
    let stdout = emit(format, &report, |r| {
        let mut s = String::new();
        for (k, q) in r.sequences.iter().enumerate() {
            let _ = writeln!(s, "#{} length {}: {}", k + 1, q.modules.len(), fmt_seq(&q.dim_vectors));
        }
        let _ = writeln!(s, "{} maximal forward hom-orthogonal sequences", r.sequences.len());
        let _ = writeln!(s, "{}", universe_line(&r.universe));
        s
    });
    Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}

fn verify(format: Format, p: &ProblemFile, only: Option<&str>, bounds: BoundArgs, cat: CatalogArgs) -> Outcome {
    let specs: Vec<(String, _)> = match only {
        Some(name) => match p.b_specs.get(name) {
            Some(s) => vec![(name.to_string(), s.clone())],
            None => {
                let known: Vec<&str> = p.b_specs.keys().map(String::as_str).collect();
                return Outcome::fail(EXIT_INPUT, format!("no b_spec `{name}` (have: {})", known.join(", ")));
            }
        },
        None => p.b_specs.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
    };
    let search = bounds.bounds(p.quiver.vertex_count());
    let mgs = match enumerate_mgs(&p.quiver, search) {
        Ok(e) => e,
        Err(e) => return Outcome::fail(EXIT_VIOLATION, e.to_string()),
    };
    if let Some(t) = mgs.truncated {
        return Outcome::fail(EXIT_INCONCLUSIVE, format!("MGS search truncated ({t}); verification inconclusive"));
    }
    let c = match build_catalog(&p.algebra, &cat.bounds(search)) {
        Ok(c) => c,
        Err(e) => return Outcome::fail(EXIT_INCONCLUSIVE, e.to_string()),
    };
    let hm = match HomMatrix::compute(&c) {
        Ok(h) => h,
        Err(e) => return Outcome::fail(EXIT_INTERNAL, e.to_string()),
    };
    let mut b_results = Vec::new();
    for (name, spec) in &specs {
        match verify_theorem(spec, &c, &hm, &mgs.sequences) {
            Ok(report) => b_results.push(BResult { name: name.clone(), report }),
            Err(OrthoError::InvalidBSpec(m)) => return Outcome::fail(EXIT_INPUT, format!("b_spec `{name}`: {m}")),
            Err(e) => return Outcome::fail(EXIT_INTERNAL, e.to_string()),
        }
    }
    let mfho = match enumerate_mfho(&c, &hm, cat.mfho_budget) {
        Ok(e) => e,
        Err(e) => return Outcome::fail(EXIT_INCONCLUSIVE, e.to_string()),
    };
    let correspondence = compare_sequence_sets(&mgs.sequences, &mfho.sequences, &c);
    let longest_mgs = correspondence.longest_mgs;
    let module_counts = match compare_module_counts(&specs, &c, longest_mgs) {
        Ok(m) => m,
        Err(e) => return Outcome::fail(EXIT_INTERNAL, e.to_string()),
    };
    let report = VerifyReport {
        problem: p.name.clone(),
        universe: Universe::of(&c),
        mgs_count: mgs.sequences.len(),
        longest_mgs,
        b_results,
        correspondence,
        module_counts,
    };
    let ok = report.b_results.iter().all(|b| b.report.holds) && report.correspondence.equal;
    let stdout = emit(format, &report, |r| {
        let mut s = String::new();
        for b in &r.b_results {
            let v = &b.report;
            match (&v.matched_mgs, v.holds) {
                (Some((k, _)), true) => {
                    let _ = writeln!(s, "{}: THEOREM HOLDS: length {}, matches MGS #{}", b.name, v.ordering.len(), k + 1);
                }
                _ => {
                    let _ = writeln!(s, "{}: THEOREM FAILS: length {}", b.name, v.ordering.len());
                    for d in &v.discrepancies {
                        let _ = writeln!(s, "  {d:?}");
                    }
                }
            }
            let _ = writeln!(s, "  order: {}", fmt_seq(&v.dim_vectors));
        }
        let c = &r.correspondence;
        if c.equal {
            let _ = writeln!(s, "CORRESPONDENCE HOLDS: {} MGS = {} maximal hom-orthogonal sequences", c.mgs_count, c.mfho_count);
        } else {
            let _ = writeln!(
                s,
                "CORRESPONDENCE FAILS: {} MGS, {} hom-orthogonal; {} only MGS, {} only hom-orthogonal",
                c.mgs_count,
                c.mfho_count,
                c.only_in_mgs.len(),
                c.only_in_mfho.len()
            );
        }
        if !c.unrealized_c_vectors.is_empty() {
            let _ = writeln!(s, "  c-vectors with no catalog module: {}", fmt_seq(&c.unrealized_c_vectors));
        }
        let counts: Vec<String> = r.module_counts.counts.iter().map(|(n, k)| format!("{n}={k}")).collect();
        let _ = writeln!(
            s,
            "exploratory (not a verification): longest MGS {}, B-module counts {}",
            r.longest_mgs,
            counts.join(" ")
        );
        let _ = writeln!(s, "{}", universe_line(&r.universe));
        s
    });
    Outcome {
        code: if ok { EXIT_OK } else { EXIT_VIOLATION },
        stdout,
        stderr: String::new(),
    }
}
