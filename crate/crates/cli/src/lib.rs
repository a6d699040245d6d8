//! Command-line workbench: argument parsing, pipelines and reports.
//!
//! [`run`] returns the report instead of printing it; the binary prints it
//! and exits with [`RunReport::exit_code`].

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fusionwb::corpus::{bundled, corpus_check, export_bundled};
use fusionwb::error::{FusionError, GroupError, LoadError, ModelError, StableError};
use fusionwb::files::{self, DirSource, FileSource};
use fusionwb::fusion::{fusion_equal, FusionSystem};
use fusionwb::group::{format_elements, Group, MAX_ORDER};
use fusionwb::models::sample::random_pinch_free_word;
use fusionwb::models::{hnn_presentation, recover_fusion, robinson_presentation, Presentation, MAX_RADIUS};
use fusionwb::stable::{poincare_series, stable_basis, EaCategory, MAX_STABLE_DEGREE};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const THREADS_ENV: &str = "WORKBENCH_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Input(String),
}

macro_rules! input_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Input(e.to_string())
            }
        }
    )*};
}
input_from!(GroupError, FusionError, ModelError, StableError, std::io::Error);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Failure,
    InputError,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failure => 1,
            Status::InputError => 2,
        }
    }
}

/// Validated run parameters shared by every verb.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkbenchConfig {
    pub prime: Option<u32>,
    pub max_degree: usize,
    pub radius: usize,
    pub inputs: Vec<String>,
    pub format: Format,
    pub seed: u64,
    pub threads: usize,
}

impl Default for WorkbenchConfig {
    fn default() -> Self {
        WorkbenchConfig { prime: None, max_degree: 8, radius: 2, inputs: Vec::new(), format: Format::Text, seed: 1, threads: 1 }
    }
}

impl WorkbenchConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.max_degree > MAX_STABLE_DEGREE {
            return Err(CliError::Usage(format!("--max-degree {} exceeds the cap {MAX_STABLE_DEGREE}", self.max_degree)));
        }
        if self.radius > MAX_RADIUS {
            return Err(CliError::Usage(format!("--radius {} exceeds the cap {MAX_RADIUS}", self.radius)));
        }
        if let Some(p) = self.prime {
            if !fusionwb::group::is_prime(p) {
                return Err(CliError::Usage(format!("--prime {p} is not prime")));
            }
        }
        Ok(())
    }
}

/// The outcome of one invocation.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub command: Vec<String>,
    pub status: Status,
    pub format: Format,
    /// Human-readable result lines.
    pub lines: Vec<String>,
    /// Structured results for `--format json`.
    pub results: Value,
    /// Failure witnesses, verbatim from the library reports.
    pub witnesses: Vec<String>,
    /// Wall-clock time per pipeline step; not part of the rendered report.
    pub timings: Vec<(String, Duration)>,
    pub out: Option<PathBuf>,
    pub show_timings: bool,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    command: &'a [String],
    status: Status,
    results: &'a Value,
    witnesses: &'a [String],
}

impl RunReport {
    fn new(command: Vec<String>) -> Self {
        RunReport {
            command,
            status: Status::Ok,
            format: Format::Text,
            lines: Vec::new(),
            results: json!({}),
            witnesses: Vec::new(),
            timings: Vec::new(),
            out: None,
            show_timings: false,
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.status.code()
    }

    /// The deterministic report body.
    pub fn render(&self) -> String {
        match self.format {
            Format::Text => {
                let mut out = format!("$ fusionwb {}\n", self.command.join(" "));
                for l in &self.lines {
                    out.push_str(l);
                    if !l.ends_with('\n') {
                        out.push('\n');
                    }
                }
                for w in &self.witnesses {
                    let _ = writeln!(out, "witness: {w}");
                }
                let status = match self.status {
                    Status::Ok => "ok",
                    Status::Failure => "failure",
                    Status::InputError => "input-error",
                };
                let _ = writeln!(out, "status: {status}");
                out
            }
            Format::Json => {
                let report = JsonReport {
                    command: &self.command,
                    status: self.status,
                    results: &self.results,
                    witnesses: &self.witnesses,
                };
                serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
            }
        }
    }

    pub fn render_timings(&self) -> String {
        let mut out = String::new();
        for (step, t) in &self.timings {
            let _ = writeln!(out, "timing {step}: {:.3}s", t.as_secs_f64());
        }
        out
    }

    fn line(&mut self, l: impl Into<String>) {
        self.lines.push(l.into());
    }

    fn result(&mut self, key: &str, v: Value) {
        self.results[key] = v;
    }

    fn step<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let v = f();
        self.timings.push((name.to_string(), start.elapsed()));
        v
    }
}

#[derive(Parser, Debug)]
#[command(name = "fusionwb", version, about = "Fusion systems on finite p-groups: saturation, group models, stable elements")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print per-step wall-clock times to standard error.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Inspect finite groups.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Build and check fusion systems.
    #[command(subcommand)]
    Fusion(FusionCmd),
    /// Emit and test HNN and amalgam models.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Stable elements at the elementary abelian level.
    #[command(subcommand)]
    Stable(StableCmd),
    /// Run or export the bundled example corpus.
    #[command(subcommand)]
    Corpus(CorpusCmd),
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    /// Order, Sylow subgroups and basic invariants.
    Info { file: String },
    /// List subgroups, optionally only the p-subgroups.
    Subgroups {
        file: String,
        #[arg(long)]
        prime: Option<u32>,
    },
}

#[derive(Args, Debug, Clone)]
struct FusionInput {
    /// Group file; the fusion system is F_S(G) for a Sylow S.
    #[arg(long, requires = "prime", conflicts_with = "fusion")]
    group: Option<String>,
    #[arg(long)]
    prime: Option<u32>,
    /// Fusion generator file.
    #[arg(long)]
    fusion: Option<String>,
}

#[derive(Subcommand, Debug)]
enum FusionCmd {
    /// Check the saturation axioms; exits 1 with witnesses if they fail.
    Saturate(FusionInput),
    /// List the F-centric subgroups with |Out_F(P)|.
    Centric(FusionInput),
    /// List F-conjugacy classes of subgroups.
    Classes(FusionInput),
}

#[derive(Subcommand, Debug)]
enum ModelCmd {
    /// Emit the amalgam presentation of an Alperin datum.
    Robinson { datum: String },
    /// Emit the HNN presentation of a fusion generator file.
    Hnn { fusion: String },
    /// Recover the fusion realized by a model within a ball and compare.
    Verify {
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, conflicts_with = "datum", required_unless_present = "datum")]
        fusion: Option<String>,
        #[arg(long)]
        datum: Option<String>,
        /// Seed for the HNN word spot-check.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of seeded pinch-free words checked on HNN models.
        #[arg(long, default_value_t = 100)]
        words: usize,
    },
}

#[derive(Subcommand, Debug)]
enum StableCmd {
    /// Basis families of the stable elements in each degree.
    Basis {
        #[command(flatten)]
        input: FusionInput,
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
    },
    /// Dimensions of the stable elements in degrees 0..=D.
    Poincare {
        #[command(flatten)]
        input: FusionInput,
        #[arg(long, default_value_t = 8)]
        max_degree: usize,
    },
    /// Compare the Quillen-category limit of a group with a fusion system.
    Compare {
        #[arg(long)]
        group: String,
        #[arg(long)]
        fusion: Option<String>,
        #[arg(long)]
        prime: Option<u32>,
        #[arg(long, default_value_t = 8)]
        max_degree: usize,
    },
    /// Decide nilpotence of a stable family.
    Nilpotent {
        #[arg(long)]
        family: String,
    },
}

#[derive(Subcommand, Debug)]
enum CorpusCmd {
    /// Run the invariant suite over the bundled corpus or a directory.
    Check {
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Worker threads; capped by WORKBENCH_THREADS.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write the bundled corpus to a directory.
    Export { dir: PathBuf },
}

const SYNOPSIS: &str = "usage: fusionwb [--format text|json] [--out FILE] [--timings] <verb>
  group info <file> | group subgroups <file> [--prime p]
  fusion saturate|centric|classes (--group g --prime p | --fusion f)
  model robinson <datum> | model hnn <fusion> | model verify --radius r (--fusion f | --datum d)
  stable basis|poincare (--group g --prime p | --fusion f) [--max-degree D]
  stable compare --group g (--fusion f | --prime p) [--max-degree D]
  stable nilpotent --family fam
  corpus check [--dir DIR] [--threads N] | corpus export <dir>";

/// Parses `argv` (without the program name) and runs the pipeline.
pub fn run<I, S>(argv: I) -> RunReport
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    run_with_threads(argv, std::env::var(THREADS_ENV).ok().as_deref())
}

/// [`run`] with an explicit `WORKBENCH_THREADS` value.
pub fn run_with_threads<I, S>(argv: I, threads_env: Option<&str>) -> RunReport
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = argv.into_iter().map(Into::into).collect();
    let mut report = RunReport::new(args.clone());
    let cli = match Cli::try_parse_from(std::iter::once("fusionwb".to_string()).chain(args)) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            report.lines.push(e.render().to_string());
            report.status = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Status::Ok,
                _ => {
                    report.lines.push(SYNOPSIS.to_string());
                    Status::InputError
                }
            };
            return report;
        }
    };
    report.format = cli.format;
    report.out = cli.out.clone();
    report.show_timings = cli.timings;
    let cap = threads_env.and_then(|t| t.trim().parse::<usize>().ok()).filter(|&t| t > 0);
    if let Err(e) = dispatch(cli.verb, cap, &mut report) {
        report.status = Status::InputError;
        report.witnesses.clear();
        report.line(format!("error: {e}"));
        report.result("error", json!(e.to_string()));
        if matches!(e, CliError::Usage(_)) {
            report.line(SYNOPSIS);
        }
    }
    report
}

fn source() -> DirSource {
    DirSource::new("")
}

fn load_fusion_input(input: &FusionInput, report: &mut RunReport) -> Result<FusionSystem, CliError> {
    let src = source();
    match (&input.fusion, &input.group) {
        (Some(f), _) => Ok(report.step("load fusion", || files::load_fusion(&src, f))?.fusion),
        (None, Some(g)) => {
            let p = input.prime.ok_or_else(|| CliError::Usage("--group needs --prime".into()))?;
            WorkbenchConfig { prime: Some(p), ..Default::default() }.validate()?;
            let group = report.step("load group", || files::load_group(&src, g))?;
            let s = group.sylow(p)?;
            Ok(report.step("transporter system", || FusionSystem::from_group(&group, &s, p))?)
        }
        (None, None) => Err(CliError::Usage("give --fusion <file> or --group <file> --prime <p>".into())),
    }
}

fn dispatch(verb: Verb, threads_cap: Option<usize>, report: &mut RunReport) -> Result<(), CliError> {
    match verb {
        Verb::Group(cmd) => group_cmd(cmd, report),
        Verb::Fusion(cmd) => fusion_cmd(cmd, report),
        Verb::Model(cmd) => model_cmd(cmd, report),
        Verb::Stable(cmd) => stable_cmd(cmd, report),
        Verb::Corpus(cmd) => corpus_cmd(cmd, threads_cap, report),
    }
}

fn group_cmd(cmd: GroupCmd, report: &mut RunReport) -> Result<(), CliError> {
    let src = source();
    match cmd {
        GroupCmd::Info { file } => {
            let g = report.step("load group", || files::load_group(&src, &file))?;
            let subs = report.step("subgroups", || g.subgroups())?;
            let center = g.center_of(&g.whole());
            report.line(format!("group {} order {} (cap {MAX_ORDER})", g.name(), g.order()));
            report.line(format!("abelian: {} ; center order {} ; {} subgroups", g.is_abelian(), center.len(), subs.len()));
            let mut sylows = Vec::new();
            for &(p, k) in g.factorization() {
                let s = g.sylow(p)?;
                let core = g.o_p(p)?;
                report.line(format!("p={p}: |S|={}^{k}={} S={} |O_p|={}", p, s.len(), format_elements(s.elements()), core.len()));
                sylows.push(json!({"p": p, "order": s.len(), "sylow": s.elements(), "o_p": core.len()}));
            }
            report.results = json!({
                "name": g.name(), "order": g.order(), "abelian": g.is_abelian(),
                "center_order": center.len(), "subgroups": subs.len(), "sylow": sylows,
            });
        }
        GroupCmd::Subgroups { file, prime } => {
            WorkbenchConfig { prime, ..Default::default() }.validate()?;
            let g = report.step("load group", || files::load_group(&src, &file))?;
            let subs = report.step("subgroups", || g.subgroups())?;
            let mut listed = Vec::new();
            for h in subs.iter().filter(|h| prime.is_none_or(|p| fusionwb::group::p_part(h.len(), p) == h.len())) {
                let mut tags = Vec::new();
                if g.is_normal(h) {
                    tags.push("normal");
                }
                if prime.is_some_and(|p| g.is_elementary_abelian(h, p)) {
                    tags.push("elementary-abelian");
                }
                report.line(format!("order {:>3} {} {}", h.len(), format_elements(h.elements()), tags.join(" ")).trim_end().to_string());
                listed.push(json!({"order": h.len(), "elements": h.elements(), "tags": tags}));
            }
            report.line(format!("{} subgroups", listed.len()));
            report.results = json!({"subgroups": listed});
        }
    }
    Ok(())
}

fn fusion_cmd(cmd: FusionCmd, report: &mut RunReport) -> Result<(), CliError> {
    match cmd {
        FusionCmd::Saturate(input) => {
            let f = load_fusion_input(&input, report)?;
            f.validate()?;
            let sat = report.step("saturation", || f.saturation());
            report.line(format!("S order {} ; p={} ; {} morphisms", f.base().order(), f.p(), f.morphism_count()));
            report.line(if sat.saturated { "saturated" } else { "not saturated" });
            report.witnesses = sat.witnesses.iter().map(ToString::to_string).collect();
            report.results = json!({"saturated": sat.saturated, "morphisms": f.morphism_count()});
            if !sat.saturated {
                report.status = Status::Failure;
            }
        }
        FusionCmd::Centric(input) => {
            let f = load_fusion_input(&input, report)?;
            let mut listed = Vec::new();
            for i in 0..f.subgroups().len() {
                if f.is_centric(i) {
                    let out = f.out_f(i)?;
                    let p = f.subgroup(i);
                    report.line(format!("P={} order {} |Out_F(P)|={}", format_elements(p.elements()), p.len(), out.order()));
                    listed.push(json!({"subgroup": p.elements(), "out_f": out.order()}));
                }
            }
            report.line(format!("{} centric subgroups", listed.len()));
            report.results = json!({"centric": listed});
        }
        FusionCmd::Classes(input) => {
            let f = load_fusion_input(&input, report)?;
            let classes = report.step("classes", || f.conjugacy_classes());
            let mut listed = Vec::new();
            for class in &classes {
                let rep = f.fully_normalized_representative(class[0]);
                let members: Vec<String> = class.iter().map(|&i| format_elements(f.subgroup(i).elements())).collect();
                report.line(format!(
                    "order {} ; representative {} ; members {}",
                    f.subgroup(rep).len(),
                    format_elements(f.subgroup(rep).elements()),
                    members.join(" ")
                ));
                listed.push(json!({
                    "order": f.subgroup(rep).len(),
                    "representative": f.subgroup(rep).elements(),
                    "members": class.iter().map(|&i| f.subgroup(i).elements().to_vec()).collect::<Vec<_>>(),
                }));
            }
            report.line(format!("{} classes", classes.len()));
            report.results = json!({"classes": listed});
        }
    }
    Ok(())
}

fn presentation_results(m: &Presentation) -> Value {
    json!({
        "kind": m.kind().to_string(),
        "generators": m.generators(),
        "relators": m.relators().iter().map(|r| m.format_word(r)).collect::<Vec<_>>(),
    })
}

fn model_cmd(cmd: ModelCmd, report: &mut RunReport) -> Result<(), CliError> {
    let src = source();
    match cmd {
        ModelCmd::Robinson { datum } => {
            let d = report.step("load datum", || files::load_datum(&src, &datum))?;
            let m = report.step("amalgam", || robinson_presentation(&d))?;
            report.line(m.to_text());
            report.results = presentation_results(&m);
        }
        ModelCmd::Hnn { fusion } => {
            let l = report.step("load fusion", || files::load_fusion(&src, &fusion))?;
            let m = report.step("hnn", || hnn_presentation(l.group.clone(), l.fusion.p(), &l.generators))?;
            report.line(m.to_text());
            report.results = presentation_results(&m);
        }
        ModelCmd::Verify { radius, fusion, datum, seed, words } => {
            WorkbenchConfig { radius, seed, ..Default::default() }.validate()?;
            let (m, target) = match (fusion, datum) {
                (Some(f), _) => {
                    let l = report.step("load fusion", || files::load_fusion(&src, &f))?;
                    let m = report.step("hnn", || hnn_presentation(l.group.clone(), l.fusion.p(), &l.generators))?;
                    (m, l.fusion)
                }
                (None, Some(d)) => {
                    let d = report.step("load datum", || files::load_datum(&src, &d))?;
                    let m = report.step("amalgam", || robinson_presentation(&d))?;
                    (m, d.fusion().clone())
                }
                (None, None) => return Err(CliError::Usage("give --fusion or --datum".into())),
            };
            let recovered = report.step("recover", || recover_fusion(&m, radius))?;
            let equal = fusion_equal(&recovered, &target)?;
            let auts: Vec<String> = recovered.automorphisms(recovered.top()).iter().map(|a| format_elements(a)).collect();
            report.line(format!("{} model: {} generators, {} relators", m.kind(), m.generators().len(), m.relators().len()));
            report.line(format!("radius {radius}: recovered {} of {} morphisms", recovered.morphism_count(), target.morphism_count()));
            report.line(format!("recovered Aut(S): {}", auts.join(" ")));
            let mut britton = Value::Null;
            if m.hnn().is_some_and(|h| h.stable_letters() > 0) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut trivial = 0;
                let start = Instant::now();
                for _ in 0..words {
                    let w = random_pinch_free_word(&m, &mut rng, 6)?;
                    if m.is_identity(&w)? {
                        trivial += 1;
                        report.witnesses.push(format!("pinch-free word reduces to 1: {}", m.format_word(&w)));
                    }
                }
                report.timings.push(("britton".into(), start.elapsed()));
                report.line(format!("britton: {} of {words} seeded pinch-free words nontrivial (seed {seed})", words - trivial));
                britton = json!({"words": words, "nontrivial": words - trivial, "seed": seed});
                if trivial > 0 {
                    report.status = Status::Failure;
                }
            }
            report.line(if equal { "recovered fusion equals F" } else { "recovered fusion is a proper subsystem of F" });
            report.line(format!("note: evidence is bounded by radius {radius}; S being Sylow in the infinite model is not certified"));
            report.results = json!({
                "kind": m.kind().to_string(), "radius": radius, "equal": equal,
                "recovered_morphisms": recovered.morphism_count(), "target_morphisms": target.morphism_count(),
                "recovered_automorphisms": recovered.automorphisms(recovered.top()),
                "britton": britton,
            });
            if !equal {
                report.status = Status::Failure;
            }
        }
    }
    Ok(())
}

const EA_NOTE: &str = "note: limit taken over the elementary abelian subgroups only";

fn series_text(s: &[usize]) -> String {
    s.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn stable_cmd(cmd: StableCmd, report: &mut RunReport) -> Result<(), CliError> {
    let src = source();
    match cmd {
        StableCmd::Basis { input, max_degree } => {
            WorkbenchConfig { max_degree, ..Default::default() }.validate()?;
            let f = load_fusion_input(&input, report)?;
            let mut degrees = Vec::new();
            for d in 0..=max_degree {
                let basis = report.step(&format!("basis degree {d}"), || stable_basis(&f, d))?;
                report.line(format!("degree {d}: dimension {}", basis.len()));
                let mut families = Vec::new();
                for (i, b) in basis.iter().enumerate() {
                    report.line(format!("  family {}", i + 1));
                    for l in b.to_string().lines() {
                        report.line(format!("    {l}"));
                    }
                    families.push(b.to_string());
                }
                degrees.push(json!({"degree": d, "families": families}));
            }
            report.line(EA_NOTE);
            report.results = json!({"degrees": degrees});
        }
        StableCmd::Poincare { input, max_degree } => {
            WorkbenchConfig { max_degree, ..Default::default() }.validate()?;
            let f = load_fusion_input(&input, report)?;
            let s = report.step("poincare", || poincare_series(&f, max_degree))?;
            report.line(format!("dimensions d=0..{max_degree}: {}", series_text(&s)));
            report.line(EA_NOTE);
            report.results = json!({"max_degree": max_degree, "dimensions": s});
        }
        StableCmd::Compare { group, fusion, prime, max_degree } => {
            WorkbenchConfig { max_degree, prime, ..Default::default() }.validate()?;
            let g: Group = report.step("load group", || files::load_group(&src, &group))?;
            let f = match (fusion, prime) {
                (Some(file), _) => report.step("load fusion", || files::load_fusion(&src, &file))?.fusion,
                (None, Some(p)) => {
                    let s = g.sylow(p)?;
                    FusionSystem::from_group(&g, &s, p)?
                }
                (None, None) => return Err(CliError::Usage("give --fusion <file> or --prime <p>".into())),
            };
            let p = f.p();
            let quillen = report.step("quillen", || EaCategory::quillen(&g, p))?.with_degree_bound(max_degree);
            let q = report.step("quillen series", || fusionwb::stable::category_series(&quillen, max_degree))?;
            let s = report.step("fusion series", || poincare_series(&f, max_degree))?;
            report.line(format!("quillen({}): {}", g.name(), series_text(&q)));
            report.line(format!("fusion:      {}", series_text(&s)));
            let first = q.iter().zip(&s).position(|(a, b)| a != b);
            match first {
                None => report.line(format!("equal through degree {max_degree}")),
                Some(d) => {
                    report.witnesses.push(format!("degree {d}: quillen {} vs fusion {}", q[d], s[d]));
                    report.status = Status::Failure;
                }
            }
            report.results = json!({"quillen": q, "fusion": s, "equal": first.is_none()});
        }
        StableCmd::Nilpotent { family } => {
            let fam = report.step("load family", || files::load_family(&src, &family))?;
            let nil = fam.is_nilpotent()?;
            let p = fam.category().p();
            let power_zero = fam.pow(p).is_zero();
            report.line(format!("degree {} ; nilpotent: {}", fam.degree(), if nil { "yes" } else { "no" }));
            report.line(format!("f^{p} is zero: {power_zero}"));
            report.results = json!({"degree": fam.degree(), "nilpotent": nil, "power_zero": power_zero, "p": p});
        }
    }
    Ok(())
}

fn corpus_cmd(cmd: CorpusCmd, threads_cap: Option<usize>, report: &mut RunReport) -> Result<(), CliError> {
    match cmd {
        CorpusCmd::Check { dir, threads } => {
            let available = std::thread::available_parallelism().map_or(1, |n| n.get());
            let wanted = threads.unwrap_or(available).max(1);
            let threads = threads_cap.map_or(wanted, |cap| wanted.min(cap));
            let src: Box<dyn FileSource> = match dir {
                Some(d) => Box::new(DirSource::new(d)),
                None => Box::new(bundled()),
            };
            let r = corpus_check(src.as_ref(), threads)?;
            for o in &r.items {
                report.timings.push((format!("{} {}", o.item.kind, o.item.file), o.elapsed));
            }
            report.line(r.render());
            let items: Vec<Value> = r
                .items
                .iter()
                .map(|o| match &o.result {
                    Ok(d) => json!({"kind": o.item.kind, "file": o.item.file, "passed": o.passed(), "details": d}),
                    Err(e) => json!({"kind": o.item.kind, "file": o.item.file, "passed": false, "error": e}),
                })
                .collect();
            for o in r.items.iter().filter(|o| !o.passed()) {
                if let Err(e) = &o.result {
                    report.witnesses.push(format!("{} {}: {e}", o.item.kind, o.item.file));
                } else {
                    report.witnesses.push(format!("{} {}: over budget", o.item.kind, o.item.file));
                }
            }
            report.results = json!({"items": items, "passed": r.passed()});
            if !r.passed() {
                report.status = Status::Failure;
            }
        }
        CorpusCmd::Export { dir } => {
            export_bundled(&dir)?;
            report.line(format!("exported {} files to {}", bundled().files().len(), dir.display()));
            report.results = json!({"files": bundled().files().keys().collect::<Vec<_>>()});
        }
    }
    Ok(())
}
