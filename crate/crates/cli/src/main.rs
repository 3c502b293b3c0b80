//! `metricat`: command-line access to the metricat-core constructions and
//! checkers.
//!
//! Exit status: 0 success or property holds, 1 property fails or a
//! counterexample was found, 2 usage or input error, 3 budget exceeded.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use metricat_core::{
    audit_saturation, build_chain, canonical_form, cylinder, enumerate_spaces, eps_coequalizer, eps_colimit, eps_pushout, injectivity_gap,
    is_approx_injective, is_eps_injective, is_eps_mono, is_eps_split, law_harness, purity, read_run, verify_coequalizer, verify_colimit,
    verify_universal, write_run, ApproxError, Budget, BudgetExceeded, ChainBudget, ColimitError, DistanceGrid, Document, ExtRat,
    IsometryCatalog, LawConfig, MetMap, RunError, SchemaError, Space, SpanPolicy, TestFamily, Variant, VerifyError,
};
use serde::Serialize;
use serde_json::{json, Value};

use config::FileConfig;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Budget(BudgetExceeded),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Budget(b) => write!(f, "budget exceeded: {b}"),
        }
    }
}

impl From<BudgetExceeded> for CliError {
    fn from(b: BudgetExceeded) -> Self {
        CliError::Budget(b)
    }
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ColimitError> for CliError {
    fn from(e: ColimitError) -> Self {
        match e {
            ColimitError::Budget(b) => CliError::Budget(b),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Budget(b) => CliError::Budget(b),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        CliError::Input(e.to_string())
    }
}

type Outcome = Result<bool, CliError>;

#[derive(Parser, Debug)]
#[command(name = "metricat", version, about = "Finite generalized metric spaces: epsilon-colimits, injectivity and Fraisse chains")]
struct Cli {
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Largest space an exponential search may handle.
    #[arg(long, global = true)]
    budget_points: Option<usize>,
    /// Search-node limit per search (capped by METRICAT_BUDGET_NODES).
    #[arg(long, global = true)]
    budget_nodes: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate or canonicalise a space.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Build epsilon-pushouts, coequalizers, colimits and cylinders.
    #[command(subcommand)]
    Colimit(ColimitCmd),
    /// Decide injectivity, splitness, purity and epsilon-monomorphy.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Run the randomized law harness.
    #[command(subcommand)]
    Laws(LawsCmd),
    /// Enumerate spaces, build amalgamation chains and audit them.
    #[command(subcommand)]
    Fraisse(FraisseCmd),
}

#[derive(Subcommand, Debug)]
enum SpaceCmd {
    /// Check every metric axiom; lists all violations.
    Validate { file: PathBuf },
    /// Print the canonical form and the relabelling that produces it.
    Canon { file: PathBuf },
}

#[derive(Args, Debug)]
struct IoArgs {
    /// Input JSON document.
    #[arg(value_name = "FILE", required_unless_present = "input")]
    file: Option<PathBuf>,
    /// Same as the positional FILE.
    #[arg(long = "in", value_name = "FILE", conflicts_with = "file")]
    input: Option<PathBuf>,
    /// Also write the result here, with a manifest beside it.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl IoArgs {
    fn path(&self) -> &Path {
        self.file.as_deref().or(self.input.as_deref()).expect("clap requires one")
    }
}

#[derive(Args, Debug)]
struct EpsArgs {
    /// Tolerance, e.g. 0, 1/2, 3 or inf.
    #[arg(long)]
    eps: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Check the universal property against every space over the grid.
    #[arg(long)]
    verify: bool,
    /// Distance values of the verification targets.
    #[arg(long, default_value = "1/2,1,2,inf")]
    grid: String,
    /// Largest verification target.
    #[arg(long, default_value_t = 3)]
    max_size: usize,
}

#[derive(Subcommand, Debug)]
enum ColimitCmd {
    /// Input: {"f": A -> B, "g": A -> C}.
    Pushout {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        eps: EpsArgs,
        #[command(flatten)]
        verify: VerifyArgs,
    },
    /// Input: {"f": A -> B, "g": A -> B}.
    Coequalizer {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        eps: EpsArgs,
        #[command(flatten)]
        verify: VerifyArgs,
    },
    /// Input: a diagram {"objects": [...], "arrows": [...]}, at the root or under "diagram".
    Colimit {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        eps: EpsArgs,
        #[command(flatten)]
        verify: VerifyArgs,
    },
    /// Input: a space; with "f" and "g" maps out of it, also tries to factor them.
    Cylinder {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        eps: EpsArgs,
    },
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// Test spaces are every space over these values.
    #[arg(long, default_value = "1/2,1,3/2,2,inf")]
    grid: String,
    /// Largest test space.
    #[arg(long, default_value_t = 2)]
    family_size: usize,
    /// JSON file with an explicit list of test spaces (at the root or under
    /// "family"); replaces the grid family.
    #[arg(long, value_name = "FILE")]
    family: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CheckCmd {
    /// Input: {"k": K, "f": A -> B}.
    Injective {
        file: PathBuf,
        #[command(flatten)]
        eps: EpsArgs,
        /// Strictly descending positive ε values; reports a verdict per value
        /// and the exact answer for all ε > 0.
        #[arg(long, value_name = "LIST")]
        eps_grid: Option<String>,
    },
    /// Input: {"f": K -> L}.
    Split {
        file: PathBuf,
        #[command(flatten)]
        eps: EpsArgs,
    },
    /// Input: {"f": K -> L}.
    Pure {
        file: PathBuf,
        #[command(flatten)]
        eps: EpsArgs,
        /// pure, weak or bare.
        #[arg(long, default_value = "pure")]
        variant: Variant,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Input: {"f": K -> L}.
    Mono {
        file: PathBuf,
        #[command(flatten)]
        eps: EpsArgs,
        #[command(flatten)]
        family: FamilyArgs,
    },
}

#[derive(Subcommand, Debug)]
enum LawsCmd {
    Run {
        #[arg(long)]
        seed: Option<u64>,
        /// Number of corpus instances.
        #[arg(long, visible_alias = "budget")]
        instances: Option<usize>,
        /// Directory for report.json and manifest.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Distance values, e.g. 1,2 or 1/2,1,inf.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    max_size: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum FraisseCmd {
    Enumerate {
        #[command(flatten)]
        grid: GridArgs,
    },
    Build {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        steps: Option<usize>,
        /// iso-skip, iso, full or full-skip.
        #[arg(long)]
        policy: Option<String>,
        /// Recorded in the manifest; the construction itself is deterministic.
        #[arg(long)]
        seed: Option<u64>,
        /// Most points allowed in a stage.
        #[arg(long)]
        stage_points: Option<usize>,
        /// Most spans processed in one step.
        #[arg(long)]
        max_spans: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    Audit {
        dir: PathBuf,
    },
}

struct Ctx {
    file: FileConfig,
    budget: Budget,
    argv: Vec<String>,
}

fn print(v: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("outputs serialize"));
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn document(path: &Path) -> Result<Document, CliError> {
    Document::parse(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_eps(flag: &EpsArgs, file: &FileConfig) -> Result<ExtRat, CliError> {
    let text = flag.eps.clone().or_else(|| file.eps.clone()).ok_or_else(|| CliError::Usage("--eps is required".into()))?;
    text.parse().map_err(|e| CliError::Usage(format!("--eps {text}: {e}")))
}

fn parse_grid(values: &str, max_size: usize) -> Result<DistanceGrid, CliError> {
    DistanceGrid::parse(values, max_size).map_err(|e| CliError::Usage(format!("--grid {values}: {e}")))
}

fn targets(v: &VerifyArgs, budget: &Budget) -> Result<Vec<Arc<Space>>, CliError> {
    Ok(enumerate_spaces(&parse_grid(&v.grid, v.max_size)?, budget)?.into_iter().map(Arc::new).collect())
}

fn family(f: &FamilyArgs, budget: &Budget) -> Result<TestFamily, CliError> {
    match &f.family {
        Some(path) => {
            let mut doc = document(path)?;
            let spaces = if doc.has("/family") { doc.space_list("/family")? } else { doc.space_list("")? };
            let cap = spaces.iter().map(|s| s.len()).max().unwrap_or(0);
            Ok(TestFamily::new(spaces.iter().map(|s| s.as_ref().clone()), cap, budget)?)
        }
        None => Ok(TestFamily::over_grid(&parse_grid(&f.grid, f.family_size)?, budget)?),
    }
}

fn atomic_write(path: &Path, text: &str) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_os_string();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, text).and_then(|_| fs::rename(&tmp, path)).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_manifest(path: &Path, ctx: &Ctx, settings: Value, started: SystemTime, clock: Instant, outcome: Value) -> Result<(), CliError> {
    let since_epoch = started.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let manifest = json!({
        "command": ctx.argv,
        "config": ctx.file,
        "settings": settings,
        "budget": { "points": ctx.budget.max_points, "nodes": ctx.budget.max_nodes },
        "versions": { "metricat": env!("CARGO_PKG_VERSION"), "format": 1 },
        "wall_clock": { "started_unix": since_epoch, "elapsed_ms": clock.elapsed().as_millis() as u64 },
        "outcome": outcome,
    });
    atomic_write(path, &(serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"))
}

fn space_cmd(cmd: &SpaceCmd, ctx: &Ctx) -> Outcome {
    match cmd {
        SpaceCmd::Validate { file } => {
            let mut doc = document(file)?;
            match doc.checked_space("")? {
                Ok(space) => {
                    print(&json!({ "valid": true, "points": space.len(), "noncanonical": doc.noncanonical() }));
                    Ok(true)
                }
                Err(invalid) => {
                    let violations: Vec<String> = invalid.0.iter().map(|v| v.to_string()).collect();
                    print(&json!({ "valid": false, "violations": violations }));
                    Ok(false)
                }
            }
        }
        SpaceCmd::Canon { file } => {
            let space = document(file)?.space("")?;
            let c = canonical_form(&space, &ctx.budget)?;
            print(&json!({ "space": c.space, "perm": c.perm }));
            Ok(true)
        }
    }
}

fn report_verification(out: &mut Value, report: Option<metricat_core::UniversalReport>) -> bool {
    match report {
        Some(r) => {
            let passed = r.passed;
            out["verification"] = serde_json::to_value(r).expect("reports serialize");
            passed
        }
        None => true,
    }
}

/// Prints the result and, with `--out`, writes it and `<out>.manifest.json`.
fn emit(out: &Value, io: &IoArgs, ctx: &Ctx, settings: Value, started: SystemTime, clock: Instant, ok: bool) -> Outcome {
    print(out);
    if let Some(path) = &io.out {
        atomic_write(path, &(serde_json::to_string_pretty(out).expect("results serialize") + "\n"))?;
        let mut name = path.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        write_manifest(&path.with_file_name(name), ctx, settings, started, clock, json!({ "passed": ok }))?;
    }
    Ok(ok)
}

fn colimit_cmd(cmd: &ColimitCmd, ctx: &Ctx) -> Outcome {
    let b = &ctx.budget;
    match cmd {
        ColimitCmd::Pushout { io, eps, verify } => {
            let (started, clock) = (SystemTime::now(), Instant::now());
            let e = parse_eps(eps, &ctx.file)?;
            let mut doc = document(io.path())?;
            let (f, g) = (doc.morphism("/f")?, doc.morphism("/g")?);
            let po = eps_pushout(&f, &g, &e).map_err(|e| CliError::Input(e.to_string()))?;
            let mut out = json!({ "eps": e, "apex": po.apex.as_ref(), "leg_g": po.leg_g.as_slice(), "leg_f": po.leg_f.as_slice() });
            let report = if verify.verify { Some(verify_universal(&po, &f, &g, &targets(verify, b)?, b)?) } else { None };
            let ok = report_verification(&mut out, report);
            emit(&out, io, ctx, json!({ "eps": e, "verify": verify.verify }), started, clock, ok)
        }
        ColimitCmd::Coequalizer { io, eps, verify } => {
            let (started, clock) = (SystemTime::now(), Instant::now());
            let e = parse_eps(eps, &ctx.file)?;
            let mut doc = document(io.path())?;
            let (f, g) = (doc.morphism("/f")?, doc.morphism("/g")?);
            let c = eps_coequalizer(&f, &g, &e).map_err(|e| CliError::Input(e.to_string()))?;
            let mut out = json!({ "eps": e, "apex": c.apex.as_ref(), "leg": c.leg.as_slice() });
            let report = if verify.verify { Some(verify_coequalizer(&c, &f, &g, &targets(verify, b)?, b)?) } else { None };
            let ok = report_verification(&mut out, report);
            emit(&out, io, ctx, json!({ "eps": e, "verify": verify.verify }), started, clock, ok)
        }
        ColimitCmd::Colimit { io, eps, verify } => {
            let (started, clock) = (SystemTime::now(), Instant::now());
            let e = parse_eps(eps, &ctx.file)?;
            let mut doc = document(io.path())?;
            let d = if doc.has("/diagram") { doc.diagram("/diagram")? } else { doc.diagram("")? };
            let c = eps_colimit(&d, &e, b)?;
            let legs: Vec<&[usize]> = c.legs.iter().map(|l| l.as_slice()).collect();
            let mut out = json!({ "eps": e, "apex": c.apex.as_ref(), "legs": legs });
            let report = if verify.verify { Some(verify_colimit(&c, &d, &targets(verify, b)?, b)?) } else { None };
            let ok = report_verification(&mut out, report);
            emit(&out, io, ctx, json!({ "eps": e, "verify": verify.verify }), started, clock, ok)
        }
        ColimitCmd::Cylinder { io, eps } => {
            let (started, clock) = (SystemTime::now(), Instant::now());
            let e = parse_eps(eps, &ctx.file)?;
            let mut doc = document(io.path())?;
            let k = if doc.has("/space") { doc.space("/space")? } else { doc.space("")? };
            let cyl = cylinder(&k, &e);
            let mut out = json!({ "eps": e, "cylinder": cyl.space.as_ref(), "inclusion": cyl.inclusion.as_slice() });
            let mut ok = true;
            if doc.has("/f") && doc.has("/g") {
                let (f, g) = (doc.morphism("/f")?, doc.morphism("/g")?);
                if !f.dom().same_metric(&k) {
                    return Err(CliError::Input("/f: domain differs from the cylinder base".into()));
                }
                let f = MetMap::new(k.clone(), f.cod().clone(), f.as_slice().to_vec()).expect("same metric");
                let g = MetMap::new(k.clone(), f.cod().clone(), g.as_slice().to_vec()).map_err(|e| CliError::Input(format!("/g: {e}")))?;
                let h = cyl.factor(&f, &g, b)?;
                ok = h.is_some();
                out["factor"] = h.map(|h| json!(h.as_slice())).unwrap_or(Value::Null);
            }
            emit(&out, io, ctx, json!({ "eps": e }), started, clock, ok)
        }
    }
}

fn check_cmd(cmd: &CheckCmd, ctx: &Ctx) -> Outcome {
    let b = &ctx.budget;
    match cmd {
        CheckCmd::Injective { file, eps, eps_grid } => {
            let mut doc = document(file)?;
            let (k, f) = (doc.space("/k")?, doc.morphism("/f")?);
            if let Some(list) = eps_grid {
                let grid = list
                    .split(',')
                    .map(|t| t.trim().parse::<ExtRat>().map_err(|e| CliError::Usage(format!("--eps-grid {t}: {e}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let report = is_approx_injective(&k, &f, &grid, b).map_err(|e| match e {
                    ApproxError::Budget(b) => CliError::Budget(b),
                    ApproxError::Grid(g) => CliError::Usage(format!("--eps-grid: {g}")),
                })?;
                print(&report);
                return Ok(report.grid_holds);
            }
            let e = parse_eps(eps, &ctx.file)?;
            let v = is_eps_injective(&k, &f, &e, b)?;
            let gap = injectivity_gap(&k, &f, b)?;
            print(&json!({ "eps": e, "injective": v.holds, "witness": v.witness, "gap": gap }));
            Ok(v.holds)
        }
        CheckCmd::Split { file, eps } => {
            let e = parse_eps(eps, &ctx.file)?;
            let f = document(file)?.morphism("/f")?;
            let p = is_eps_split(&f, &e, b)?;
            print(&json!({ "eps": e, "split": p.is_some(), "retraction": p.as_ref().map(|p| p.as_slice()) }));
            Ok(p.is_some())
        }
        CheckCmd::Pure { file, eps, variant, family: fam } => {
            let e = parse_eps(eps, &ctx.file)?;
            let f = document(file)?.morphism("/f")?;
            let v = purity(&f, &e, *variant, &family(fam, b)?, b)?;
            print(&json!({ "eps": e, "variant": variant, "verdict": v }));
            Ok(v.holds)
        }
        CheckCmd::Mono { file, eps, family: fam } => {
            let e = parse_eps(eps, &ctx.file)?;
            let f = document(file)?.morphism("/f")?;
            let w = is_eps_mono(&f, &e, &family(fam, b)?, b)?;
            print(&json!({ "eps": e, "mono": w.is_none(), "witness": w }));
            Ok(w.is_none())
        }
    }
}

fn laws_cmd(cmd: &LawsCmd, ctx: &Ctx) -> Outcome {
    let LawsCmd::Run { seed, instances, out } = cmd;
    let (started, clock) = (SystemTime::now(), Instant::now());
    let seed = seed.or(ctx.file.seed).unwrap_or(0);
    let mut cfg = LawConfig { budget: ctx.budget, ..LawConfig::default() };
    if let Some(n) = instances.or(ctx.file.instances) {
        cfg.instances = n;
    }
    let report = law_harness(&cfg, seed)?;
    print(&report);
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
        atomic_write(&dir.join("report.json"), &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
        let settings = json!({ "seed": seed, "instances": cfg.instances });
        write_manifest(
            &dir.join("manifest.json"),
            ctx,
            settings,
            started,
            clock,
            json!({ "passed": report.passed, "skipped": report.skipped }),
        )?;
    }
    Ok(report.passed)
}

fn grid_from(args: &GridArgs, file: &FileConfig, default_size: usize) -> Result<DistanceGrid, CliError> {
    let values = args.grid.clone().or_else(|| file.grid.clone()).ok_or_else(|| CliError::Usage("--grid is required".into()))?;
    parse_grid(&values, args.max_size.or(file.max_size).unwrap_or(default_size))
}

fn fraisse_cmd(cmd: &FraisseCmd, ctx: &Ctx) -> Outcome {
    let b = &ctx.budget;
    match cmd {
        FraisseCmd::Enumerate { grid } => {
            let g = grid_from(grid, &ctx.file, 3)?;
            let spaces = enumerate_spaces(&g, b)?;
            print(&json!({ "grid": g.to_string(), "max_size": g.max_size, "count": spaces.len(), "spaces": spaces }));
            Ok(true)
        }
        FraisseCmd::Build { grid, steps, policy, seed, stage_points, max_spans, out } => {
            let (started, clock) = (SystemTime::now(), Instant::now());
            let g = grid_from(grid, &ctx.file, 3)?;
            let steps = steps.or(ctx.file.steps).unwrap_or(3);
            let policy: SpanPolicy = match policy.clone().or_else(|| ctx.file.policy.clone()) {
                Some(p) => p.parse().map_err(CliError::Usage)?,
                None => SpanPolicy::default(),
            };
            let defaults = ChainBudget::default();
            let chain_budget = ChainBudget {
                max_stage_points: stage_points.or(ctx.file.stage_points).unwrap_or(defaults.max_stage_points),
                max_spans: max_spans.or(ctx.file.max_spans).unwrap_or(defaults.max_spans),
                search: *b,
            };
            let catalog = IsometryCatalog::build(&g, b)?;
            let (chain, stopped) = match build_chain(&catalog, steps, policy, &chain_budget) {
                Ok(c) => (c, None),
                Err(e) => (e.partial, Some(e.cause)),
            };
            fs::create_dir_all(out).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
            write_run(out, &catalog, &chain)?;
            let sizes: Vec<usize> = chain.stages.iter().map(|s| s.space.len()).collect();
            let spans: Vec<usize> = chain.stages.iter().map(|s| s.spans.len()).collect();
            let outcome = json!({
                "completed": stopped.is_none(),
                "stages": sizes,
                "spans": spans,
                "budget_exceeded": stopped.as_ref().map(|c| c.to_string()),
            });
            let settings = json!({
                "grid": g.to_string(),
                "max_size": g.max_size,
                "steps": steps,
                "policy": policy,
                "seed": seed.or(ctx.file.seed).unwrap_or(0),
                "stage_points": chain_budget.max_stage_points,
                "max_spans": chain_budget.max_spans,
            });
            write_manifest(&out.join("manifest.json"), ctx, settings, started, clock, outcome.clone())?;
            print(&outcome);
            match stopped {
                Some(cause) => Err(CliError::Budget(cause)),
                None => Ok(true),
            }
        }
        FraisseCmd::Audit { dir } => {
            let (catalog, stages) = read_run(dir)?;
            let report = audit_saturation(&catalog, &stages, b)?;
            atomic_write(&dir.join("audit.json"), &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
            print(&report);
            Ok(report.passed)
        }
    }
}

fn run(cli: &Cli, argv: Vec<String>) -> Outcome {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let budget = config::budget(cli.budget_points, cli.budget_nodes, &file)?;
    let ctx = Ctx { file, budget, argv };
    match &cli.command {
        Command::Space(c) => space_cmd(c, &ctx),
        Command::Colimit(c) => colimit_cmd(c, &ctx),
        Command::Check(c) => check_cmd(c, &ctx),
        Command::Laws(c) => laws_cmd(c, &ctx),
        Command::Fraisse(c) => fraisse_cmd(c, &ctx),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&argv);
    match run(&cli, argv) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("metricat: {e}");
            ExitCode::from(e.code())
        }
    }
}
