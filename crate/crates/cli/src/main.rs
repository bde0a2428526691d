//! `cellmat`: command-line front end.
//!
//! Exit status 0 on success, 1 on domain errors (one-line diagnostic on
//! stderr), 2 on usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Args, Parser, Subcommand};

use cellmat::complex::{read_complex, vietoris_rips, write_complex, CellComplex};
use cellmat::exactla::{Gf2, Rat};
use cellmat::flow::{flow_report, CapacityFunction};
use cellmat::harness::{analyze_cloud, reports_csv, timings_csv, Budgets, ExperimentConfig, InvariantReport};
use cellmat::homology::betti;
use cellmat::invariants::{delta5_catalog_check, find_u24_minor, minor_search, MinorCertificate, Search};
use cellmat::matroid::{Catalog, CatalogName, LinearMatroid};
use cellmat::pointcloud::{read_cloud, sample, write_cloud, Distribution, DistributionSpec, PointCloud};
use cellmat::{Error, Result};

#[derive(Parser)]
#[command(name = "cellmat", version, about = "Cellular matroids of Vietoris-Rips complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a point cloud from one of the four distributions.
    Sample(SampleArgs),
    /// Build the Vietoris-Rips complex of a point cloud.
    Build(BuildArgs),
    /// Run the invariant battery on a point cloud.
    Analyze(AnalyzeArgs),
    /// Decide fence coverage of a point cloud with a fence ring.
    Coverage(CoverageArgs),
    /// Flow bounds through the attached cell of a complex.
    Flow(FlowArgs),
    /// Search a complex's boundary matroid for a catalog minor.
    Minors(MinorsArgs),
    /// Run an experiment grid and write the trial and aggregate CSVs.
    Experiment(ExperimentArgs),
    /// Find the catalog minors in the triangle matroids of the 5-simplex.
    VerifyCatalog(VerifyCatalogArgs),
}

#[derive(Args)]
struct SampleArgs {
    /// D1, D2, D3 or D4.
    #[arg(long)]
    dist: Distribution,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Connection scale; sets the fence spacing for D2.
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    /// Point-cloud file.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 3)]
    max_dim: usize,
    /// Attach the 2-cell along the cloud's fence ring.
    #[arg(long)]
    attach_fence: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long)]
    minor_budget: Option<u64>,
    #[arg(long)]
    graphic_budget: Option<u64>,
    #[arg(long)]
    transversal_budget: Option<u64>,
    #[arg(long)]
    mfmc_minor_budget: Option<u64>,
}

impl BudgetArgs {
    fn apply(&self, b: &mut Budgets) {
        let pairs = [
            (&mut b.minor, self.minor_budget),
            (&mut b.graphic, self.graphic_budget),
            (&mut b.transversal, self.transversal_budget),
            (&mut b.mfmc_minor, self.mfmc_minor_budget),
        ];
        for (slot, v) in pairs {
            if let Some(v) = v {
                *slot = v;
            }
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    epsilon: f64,
    /// `all`, `none` or a comma-separated list of invariants.
    #[arg(long, default_value = "all")]
    battery: String,
    /// Seed for the randomised searches.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    budgets: BudgetArgs,
    /// Keep per-stage wall times in the JSON report.
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CoverageArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FlowArgs {
    /// Complex file with an attached cell.
    #[arg(long = "in", conflicts_with = "points")]
    input: Option<PathBuf>,
    /// Point cloud with a fence ring; the fence cell is attached.
    #[arg(long, requires = "epsilon")]
    points: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Capacity of every element not listed with `--cap`.
    #[arg(long, default_value_t = 1)]
    capacity: u64,
    /// Per-element capacity as `label=value`; repeatable.
    #[arg(long = "cap")]
    caps: Vec<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct MinorsArgs {
    /// Complex file.
    #[arg(long = "in")]
    input: PathBuf,
    /// U24, F7, F7*, N8 or N9.
    #[arg(long)]
    target: CatalogName,
    /// Cell dimension of the boundary matroid.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = cellmat::invariants::DEFAULT_MINOR_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Extra catalog file (needed for N8 and N9).
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// desk, full or acceptance; applied before the file and flags.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    distributions: Option<String>,
    #[arg(long)]
    n_values: Option<String>,
    #[arg(long)]
    epsilon_values: Option<String>,
    #[arg(long)]
    trials_per_cell: Option<String>,
    #[arg(long)]
    master_seed: Option<String>,
    #[arg(long)]
    battery: Option<String>,
    #[arg(long)]
    minor_budget: Option<String>,
    #[arg(long)]
    graphic_budget: Option<String>,
    #[arg(long)]
    transversal_budget: Option<String>,
    #[arg(long)]
    mfmc_minor_budget: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    /// Trial CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Aggregate CSV.
    #[arg(long)]
    aggregate: Option<PathBuf>,
    /// Per-stage timings CSV.
    #[arg(long)]
    timings: Option<PathBuf>,
    /// One JSON report per line.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Suppress progress on standard error.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct VerifyCatalogArgs {
    /// Catalog file adding N8 and N9.
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long, default_value_t = cellmat::invariants::DEFAULT_MINOR_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Invalid(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Invalid(format!("json: {e}")))
}

fn load_cloud(path: &Path) -> Result<PointCloud> {
    read_cloud(&read(path)?)
}

fn cmd_sample(a: &SampleArgs) -> Result<()> {
    let cloud = sample(&DistributionSpec { kind: a.dist, n: a.n, epsilon: a.epsilon, seed: a.seed })?;
    emit(a.out.as_deref(), &write_cloud(&cloud))
}

fn with_fence(r: CellComplex, cloud: &PointCloud) -> Result<CellComplex> {
    if !r.validate_fence(&cloud.fence_indices) {
        return Err(Error::InvalidFence);
    }
    let chain = r.ring_chain(&cloud.fence_indices)?;
    r.attach_cell(chain)
}

fn cmd_build(a: &BuildArgs) -> Result<()> {
    if a.max_dim == 0 {
        return Err(Error::Invalid("max-dim must be at least 1".into()));
    }
    let cloud = load_cloud(&a.input)?;
    let mut x = vietoris_rips(&cloud, a.epsilon, a.max_dim);
    if a.attach_fence {
        x = with_fence(x, &cloud)?;
    }
    emit(a.out.as_deref(), &write_complex(&x))
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<()> {
    let cloud = load_cloud(&a.input)?;
    let battery = a.battery.parse()?;
    let mut budgets = Budgets::default();
    a.budgets.apply(&mut budgets);
    let mut report = analyze_cloud(&cloud, a.epsilon, a.seed, &battery, &budgets);
    if !a.timings {
        report.timings_ms.clear();
    }
    if a.json {
        emit(None, &json(&report)?)
    } else {
        emit(None, &reports_csv(std::slice::from_ref(&report)))
    }
}

fn cmd_coverage(a: &CoverageArgs) -> Result<()> {
    let cloud = load_cloud(&a.input)?;
    if cloud.fence_indices.is_empty() {
        return Err(Error::PreconditionViolated("the cloud has no fence ring".into()));
    }
    let rp = with_fence(vietoris_rips(&cloud, a.epsilon, 3), &cloud)?;
    let b = betti::<Gf2>(&rp);
    let covered = b.get(2) > 0;
    if a.json {
        emit(None, &json(&serde_json::json!({ "covered": covered, "betti": b.values }))?)
    } else {
        emit(None, &format!("covered: {covered}\nbetti: {:?}\n", b.values))
    }
}

fn cmd_flow(a: &FlowArgs) -> Result<()> {
    let x = match (&a.input, &a.points, a.epsilon) {
        (Some(p), None, _) => read_complex(&read(p)?)?,
        (None, Some(p), Some(eps)) => {
            let cloud = load_cloud(p)?;
            with_fence(vietoris_rips(&cloud, eps, 3), &cloud)?
        }
        _ => return Err(Error::Invalid("give either --in or --points with --epsilon".into())),
    };
    let mut h = CapacityFunction::uniform(a.capacity);
    for c in &a.caps {
        let (label, v) = c.split_once('=').ok_or_else(|| Error::Parse(format!("capacity `{c}` is not label=value")))?;
        let v = v.trim().parse().map_err(|_| Error::Parse(format!("bad capacity `{v}`")))?;
        h.set(label.trim(), v);
    }
    let report = flow_report(&x, &h)?;
    if a.json {
        return emit(None, &json(&report)?);
    }
    let opt = |v: Option<u64>| v.map_or_else(|| "skipped".to_string(), |v| v.to_string());
    emit(
        None,
        &format!(
            "lp_max_flow: {}\ninteger_max_flow: {}\nmin_cut: {}\n",
            report.lp_upper,
            opt(report.int_max_flow),
            opt(report.min_cut_value)
        ),
    )
}

fn certificate_text(c: &MinorCertificate) -> String {
    let pairs: Vec<String> = c.bijection.iter().map(|(a, b)| format!("{a}->{b}")).collect();
    format!(
        "{}: delete [{}] contract [{}] map [{}]",
        c.target,
        c.spec.deletions.join(" "),
        c.spec.contractions.join(" "),
        pairs.join(" ")
    )
}

fn load_catalog(extra: Option<&Path>) -> Result<Catalog> {
    let base = Catalog::bundled();
    Ok(match extra {
        Some(p) => base.merged(Catalog::load(p)?),
        None => base,
    })
}

fn cmd_minors(a: &MinorsArgs) -> Result<()> {
    let x = read_complex(&read(&a.input)?)?;
    if a.dim == 0 || a.dim > x.max_dim() {
        return Err(Error::Invalid(format!("the complex has no {}-cells", a.dim)));
    }
    let target = load_catalog(a.catalog.as_deref())?.get(a.target)?;
    let search = if a.target == CatalogName::U24 {
        let m = LinearMatroid::<Rat>::from_boundary(&x, a.dim);
        match find_u24_minor(&m, a.budget, a.seed) {
            Search::Found(c) if c.verify(&m, &target)? => Search::Found(c),
            Search::Found(_) => Search::BudgetExceeded,
            s => s,
        }
    } else {
        minor_search(&LinearMatroid::<Gf2>::from_boundary(&x, a.dim), &target, a.budget, a.seed)
    };
    let status = match &search {
        Search::Found(_) => "found",
        Search::Exhausted => "absent",
        Search::BudgetExceeded => "unknown",
    };
    if a.json {
        let cert = search.found();
        return emit(None, &json(&serde_json::json!({ "target": a.target, "status": status, "certificate": cert }))?);
    }
    match search.found() {
        Some(c) => emit(None, &format!("{status}\n{}\n", certificate_text(c))),
        None => emit(None, &format!("{status}\n")),
    }
}

fn cmd_experiment(a: &ExperimentArgs) -> Result<()> {
    let mut cfg = match &a.preset {
        Some(p) => ExperimentConfig::preset(p)?,
        None => ExperimentConfig::desk(),
    };
    if let Some(p) = &a.config {
        cfg = ExperimentConfig::parse_over(cfg, &read(p)?)?;
    }
    let overrides = [
        ("distributions", &a.distributions),
        ("n_values", &a.n_values),
        ("epsilon_values", &a.epsilon_values),
        ("trials_per_cell", &a.trials_per_cell),
        ("master_seed", &a.master_seed),
        ("battery", &a.battery),
        ("minor_budget", &a.minor_budget),
        ("graphic_budget", &a.graphic_budget),
        ("transversal_budget", &a.transversal_budget),
        ("mfmc_minor_budget", &a.mfmc_minor_budget),
        ("workers", &a.workers),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    cfg.validate()?;
    let total = cfg.num_trials();
    let done = AtomicUsize::new(0);
    let quiet = a.quiet;
    let out = cellmat::harness::run_grid_with(&cfg, |_| {
        let k = done.fetch_add(1, Ordering::Relaxed) + 1;
        if !quiet && (k.is_multiple_of(100) || k == total) {
            eprintln!("{k}/{total} trials");
        }
    })?;
    emit(a.out.as_deref(), &reports_csv(&out.reports))?;
    if let Some(p) = &a.aggregate {
        emit(Some(p), &out.summary.to_csv())?;
    }
    if let Some(p) = &a.timings {
        emit(Some(p), &timings_csv(&out.reports))?;
    }
    if let Some(p) = &a.json {
        let mut lines = String::new();
        for r in &out.reports {
            let r = InvariantReport { timings_ms: Vec::new(), ..r.clone() };
            lines.push_str(&serde_json::to_string(&r).map_err(|e| Error::Invalid(format!("json: {e}")))?);
            lines.push('\n');
        }
        emit(Some(p), &lines)?;
    }
    Ok(())
}

fn cmd_verify_catalog(a: &VerifyCatalogArgs) -> Result<()> {
    let catalog = load_catalog(a.catalog.as_deref())?;
    let findings = delta5_catalog_check(&catalog, a.budget, a.seed);
    if a.json {
        emit(None, &json(&findings)?)?;
    } else {
        let mut text = String::new();
        for f in &findings {
            match &f.certificate {
                Some(c) => text.push_str(&format!("{} over {}: found in {:.2}s\n  {}\n", f.target, f.field.name(), f.seconds, certificate_text(c))),
                None => text.push_str(&format!("{} over {}: not found in {:.2}s\n", f.target, f.field.name(), f.seconds)),
            }
        }
        emit(None, &text)?;
    }
    match findings.iter().find(|f| f.certificate.is_none()) {
        Some(f) => Err(Error::Invalid(format!("no {} minor found in the 5-simplex", f.target))),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Build(a) => cmd_build(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Coverage(a) => cmd_coverage(a),
        Command::Flow(a) => cmd_flow(a),
        Command::Minors(a) => cmd_minors(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::VerifyCatalog(a) => cmd_verify_catalog(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
