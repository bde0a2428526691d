//! Ensemble runner: grid sweeps over (distribution, n, epsilon), the per-trial
//! invariant battery, aggregation and CSV output.
//!
//! Every trial is a pure function of its derived seed, so trials run in
//! parallel and the emitted rows are sorted afterwards. Wall-clock timings
//! are kept out of the trial CSV so that reruns are byte-identical.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{vietoris_rips, CellComplex};
use crate::error::{Error, Result};
use crate::exactla::{Field, Gf2, Rat};
use crate::flow::{integer_max_flow, lp_max_flow_matroid, min_cut, CapacityFunction, FLOW_GUARD};
use crate::homology::betti;
use crate::invariants::transversal_in;
use crate::invariants::{
    clique_f7_certificate, is_binary, is_cographic, is_graphic, is_regular, minor_search, Search, Verdict,
    DEFAULT_GRAPHIC_BUDGET, DEFAULT_TRANSVERSAL_BUDGET,
};
use crate::matroid::{catalog, CatalogName, LinearMatroid};
use crate::pointcloud::{derive_seed, sample, Distribution, DistributionSpec, PointCloud};

/// Version tag written above the trial CSV header.
pub const CSV_VERSION: &str = "# cellmat-trials v1";
/// Version tag written above the aggregate CSV header.
pub const AGGREGATE_VERSION: &str = "# cellmat-aggregate v1";

/// Which invariants a trial computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Battery {
    pub connectivity: bool,
    pub regularity: bool,
    pub tu: bool,
    pub graphic: bool,
    pub cographic: bool,
    pub binary: bool,
    pub flow_lp: bool,
    pub mfmc: bool,
    pub coverage: bool,
}

const BATTERY_NAMES: [&str; 9] =
    ["connectivity", "regularity", "tu", "graphic", "cographic", "binary", "flow_lp", "mfmc", "coverage"];

impl Battery {
    pub fn all() -> Battery {
        Battery {
            connectivity: true,
            regularity: true,
            tu: true,
            graphic: true,
            cographic: true,
            binary: true,
            flow_lp: true,
            mfmc: true,
            coverage: true,
        }
    }

    pub fn none() -> Battery {
        Battery {
            connectivity: false,
            regularity: false,
            tu: false,
            graphic: false,
            cographic: false,
            binary: false,
            flow_lp: false,
            mfmc: false,
            coverage: false,
        }
    }

    fn flag_mut(&mut self, name: &str) -> Option<&mut bool> {
        Some(match name {
            "connectivity" => &mut self.connectivity,
            "regularity" => &mut self.regularity,
            "tu" => &mut self.tu,
            "graphic" => &mut self.graphic,
            "cographic" => &mut self.cographic,
            "binary" => &mut self.binary,
            "flow_lp" => &mut self.flow_lp,
            "mfmc" => &mut self.mfmc,
            "coverage" => &mut self.coverage,
            _ => return None,
        })
    }

    fn flags(&self) -> [bool; 9] {
        [
            self.connectivity,
            self.regularity,
            self.tu,
            self.graphic,
            self.cographic,
            self.binary,
            self.flow_lp,
            self.mfmc,
            self.coverage,
        ]
    }
}

impl Default for Battery {
    fn default() -> Battery {
        Battery::all()
    }
}

/// `all`, `none`, or a comma-separated list of invariant names.
impl FromStr for Battery {
    type Err = Error;
    fn from_str(s: &str) -> Result<Battery> {
        match s.trim() {
            "all" => return Ok(Battery::all()),
            "none" | "" => return Ok(Battery::none()),
            _ => {}
        }
        let mut b = Battery::none();
        for name in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            *b.flag_mut(name).ok_or_else(|| Error::Parse(format!("unknown battery entry `{name}`")))? = true;
        }
        Ok(b)
    }
}

impl fmt::Display for Battery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flags = self.flags();
        if flags.iter().all(|&x| x) {
            return write!(f, "all");
        }
        if flags.iter().all(|&x| !x) {
            return write!(f, "none");
        }
        let on: Vec<&str> = BATTERY_NAMES.iter().zip(flags).filter(|(_, x)| *x).map(|(n, _)| *n).collect();
        write!(f, "{}", on.join(","))
    }
}

/// Search budgets for the bounded recognizers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// F7/F7* searches when the signing test cannot decide regularity.
    pub minor: u64,
    pub graphic: u64,
    pub transversal: u64,
    /// F7* search through the attached cell; zero disables it.
    pub mfmc_minor: u64,
}

impl Default for Budgets {
    fn default() -> Budgets {
        Budgets { minor: 20_000, graphic: DEFAULT_GRAPHIC_BUDGET, transversal: DEFAULT_TRANSVERSAL_BUDGET, mfmc_minor: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub distributions: Vec<Distribution>,
    pub n_values: Vec<usize>,
    pub epsilon_values: Vec<f64>,
    pub trials_per_cell: usize,
    pub master_seed: u64,
    pub battery: Battery,
    pub budgets: Budgets,
    /// Worker threads; zero lets the pool decide.
    pub workers: usize,
}

/// `count` values `first, first + step, ...` in hundredths.
fn hundredths(first: u32, step: u32, count: u32) -> Vec<f64> {
    (0..count).map(|k| f64::from(first + k * step) / 100.0).collect()
}

impl ExperimentConfig {
    /// Desk-scale sweep: every distribution, n in {10, 20, 40, 60} and
    /// epsilon from 0.01 to 0.35 in steps of 0.02.
    pub fn desk() -> ExperimentConfig {
        ExperimentConfig {
            distributions: Distribution::ALL.to_vec(),
            n_values: vec![10, 20, 40, 60],
            epsilon_values: hundredths(1, 2, 18),
            trials_per_cell: 20,
            master_seed: 1,
            battery: Battery::all(),
            budgets: Budgets::default(),
            workers: 0,
        }
    }

    /// The full published grid: n from 1 to 100, epsilon from 0.01 to 0.35.
    pub fn full() -> ExperimentConfig {
        ExperimentConfig { n_values: (1..=100).collect(), epsilon_values: hundredths(1, 1, 35), ..ExperimentConfig::desk() }
    }

    /// The qualitative acceptance grid.
    pub fn acceptance() -> ExperimentConfig {
        ExperimentConfig {
            n_values: vec![40, 60],
            epsilon_values: vec![0.15, 0.25],
            trials_per_cell: 200,
            ..ExperimentConfig::desk()
        }
    }

    pub fn preset(name: &str) -> Result<ExperimentConfig> {
        match name {
            "desk" => Ok(ExperimentConfig::desk()),
            "full" => Ok(ExperimentConfig::full()),
            "acceptance" => Ok(ExperimentConfig::acceptance()),
            other => Err(Error::Parse(format!("unknown preset `{other}`"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.distributions.is_empty() || self.n_values.is_empty() || self.epsilon_values.is_empty() {
            return Err(Error::Invalid("experiment grid must be nonempty".into()));
        }
        if self.trials_per_cell == 0 {
            return Err(Error::Invalid("trials_per_cell must be at least 1".into()));
        }
        if let Some(e) = self.epsilon_values.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(Error::Invalid(format!("epsilon must be positive, got {e}")));
        }
        Ok(())
    }

    /// Set one key from the flat configuration format.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
            value
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<T>().map_err(|_| Error::Parse(format!("bad value `{t}` for `{key}`"))))
                .collect()
        }
        fn one<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value.trim().parse::<T>().map_err(|_| Error::Parse(format!("bad value `{value}` for `{key}`")))
        }
        match key {
            "distributions" => self.distributions = list(key, value)?,
            "n_values" => self.n_values = list(key, value)?,
            "epsilon_values" => self.epsilon_values = list(key, value)?,
            "trials_per_cell" => self.trials_per_cell = one(key, value)?,
            "master_seed" => self.master_seed = one(key, value)?,
            "battery" => self.battery = value.parse()?,
            "minor_budget" => self.budgets.minor = one(key, value)?,
            "graphic_budget" => self.budgets.graphic = one(key, value)?,
            "transversal_budget" => self.budgets.transversal = one(key, value)?,
            "mfmc_minor_budget" => self.budgets.mfmc_minor = one(key, value)?,
            "workers" => self.workers = one(key, value)?,
            other => return Err(Error::Parse(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Parse `key = value` lines over the desk defaults. `#` starts a comment;
    /// a `preset` key replaces everything set before it.
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::parse_over(ExperimentConfig::desk(), text)
    }

    /// Parse `key = value` lines over `base`.
    pub fn parse_over(base: ExperimentConfig, text: &str) -> Result<ExperimentConfig> {
        let mut cfg = base;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", no + 1)))?;
            let key = key.trim();
            if key == "preset" {
                cfg = ExperimentConfig::preset(value.trim())?;
            } else {
                cfg.set(key, value).map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<ExperimentConfig> {
        ExperimentConfig::parse(&std::fs::read_to_string(path)?)
    }

    fn join<T: fmt::Display>(xs: &[T]) -> String {
        xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    }

    /// The flat text form read by `parse`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "distributions = {}", Self::join(&self.distributions));
        let _ = writeln!(s, "n_values = {}", Self::join(&self.n_values));
        let _ = writeln!(s, "epsilon_values = {}", Self::join(&self.epsilon_values));
        let _ = writeln!(s, "trials_per_cell = {}", self.trials_per_cell);
        let _ = writeln!(s, "master_seed = {}", self.master_seed);
        let _ = writeln!(s, "battery = {}", self.battery);
        let _ = writeln!(s, "minor_budget = {}", self.budgets.minor);
        let _ = writeln!(s, "graphic_budget = {}", self.budgets.graphic);
        let _ = writeln!(s, "transversal_budget = {}", self.budgets.transversal);
        let _ = writeln!(s, "mfmc_minor_budget = {}", self.budgets.mfmc_minor);
        let _ = writeln!(s, "workers = {}", self.workers);
        s
    }

    pub fn num_trials(&self) -> usize {
        self.distributions.len() * self.n_values.len() * self.epsilon_values.len() * self.trials_per_cell
    }
}

/// A recognizer outcome as it appears in a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    True,
    False,
    /// Budget exhausted or the stage failed.
    Unknown,
    /// Disabled in the battery.
    Skipped,
    /// Not defined for this trial (for example coverage outside D2).
    #[serde(rename = "na")]
    NotApplicable,
}

impl Flag {
    pub fn from_bool(b: bool) -> Flag {
        if b {
            Flag::True
        } else {
            Flag::False
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Flag::True => "true",
            Flag::False => "false",
            Flag::Unknown => "unknown",
            Flag::Skipped => "skipped",
            Flag::NotApplicable => "na",
        }
    }

    pub fn is_true(self) -> bool {
        self == Flag::True
    }

    pub fn is_false(self) -> bool {
        self == Flag::False
    }
}

impl From<Verdict> for Flag {
    fn from(v: Verdict) -> Flag {
        match v {
            Verdict::Yes => Flag::True,
            Verdict::No => Flag::False,
            Verdict::Unknown => Flag::Unknown,
        }
    }
}

impl<T> From<&Search<T>> for Flag {
    fn from(s: &Search<T>) -> Flag {
        match s {
            Search::Found(_) => Flag::True,
            Search::Exhausted => Flag::False,
            Search::BudgetExceeded => Flag::Unknown,
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One trial of the battery. Counts and homology refer to the analysed
/// complex, which for D2 is `R` with the fence cell attached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    /// `None` for clouds not drawn from a named distribution.
    pub distribution: Option<Distribution>,
    pub n: usize,
    pub epsilon: f64,
    pub trial: usize,
    pub seed: u64,
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub tetrahedra: usize,
    pub six_cliques: usize,
    pub betti: [usize; 3],
    pub fence_valid: Flag,
    pub covered: Flag,
    /// Size and rank of the degree-2 matroid over GF(2).
    pub ground_size: usize,
    pub rank: usize,
    pub components: Option<usize>,
    /// Components with at least two elements.
    pub nontrivial_components: Option<usize>,
    pub is_2_connected: Flag,
    pub is_binary: Flag,
    /// False when a `true` binary answer rests on sampling.
    pub binary_exact: Flag,
    pub is_tu: Flag,
    pub is_regular: Flag,
    /// How the regularity verdict was reached.
    pub regular_evidence: String,
    pub is_graphic: Flag,
    pub is_cographic: Flag,
    pub maxflow_lp: Option<String>,
    pub maxflow_int: Option<u64>,
    pub mincut: Option<u64>,
    pub mfmc_witness: Flag,
    /// `stage: message` for every stage that failed.
    pub errors: Vec<String>,
    /// Milliseconds per stage, in execution order. Not part of the CSV.
    pub timings_ms: Vec<(String, f64)>,
}

impl InvariantReport {
    fn empty(distribution: Option<Distribution>, n: usize, epsilon: f64, trial: usize, seed: u64) -> InvariantReport {
        InvariantReport {
            distribution,
            n,
            epsilon,
            trial,
            seed,
            vertices: 0,
            edges: 0,
            triangles: 0,
            tetrahedra: 0,
            six_cliques: 0,
            betti: [0; 3],
            fence_valid: Flag::NotApplicable,
            covered: Flag::NotApplicable,
            ground_size: 0,
            rank: 0,
            components: None,
            nontrivial_components: None,
            is_2_connected: Flag::Skipped,
            is_binary: Flag::Skipped,
            binary_exact: Flag::Skipped,
            is_tu: Flag::Skipped,
            is_regular: Flag::Skipped,
            regular_evidence: String::new(),
            is_graphic: Flag::Skipped,
            is_cographic: Flag::Skipped,
            maxflow_lp: None,
            maxflow_int: None,
            mincut: None,
            mfmc_witness: Flag::NotApplicable,
            errors: Vec::new(),
            timings_ms: Vec::new(),
        }
    }

    /// The consistency implications every report must satisfy.
    pub fn audit(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::PreconditionViolated(format!("trial seed {}: {what}", self.seed)));
        if self.is_tu.is_true() && self.is_regular.is_false() {
            return fail("totally unimodular but not regular");
        }
        if self.is_graphic.is_true() && self.is_regular.is_false() {
            return fail("graphic but not regular");
        }
        if self.is_cographic.is_true() && self.is_regular.is_false() {
            return fail("cographic but not regular");
        }
        if self.covered.is_true() && self.betti[2] == 0 {
            return fail("covered but the second Betti number is zero");
        }
        Ok(())
    }

    pub fn csv_header() -> &'static str {
        "distribution,n,epsilon,trial,seed,vertices,edges,triangles,tetrahedra,six_cliques,betti0,betti1,betti2,\
fence_valid,covered,ground_size,rank,components,nontrivial_components,is_2_connected,is_binary,binary_exact,\
is_tu,is_regular,regular_evidence,is_graphic,is_cographic,maxflow_lp,maxflow_int,mincut,mfmc_witness,errors"
    }

    pub fn csv_row(&self) -> String {
        fn opt<T: fmt::Display>(x: &Option<T>) -> String {
            x.as_ref().map_or_else(|| "skipped".to_string(), ToString::to_string)
        }
        // Messages are free text; keep them inside one field.
        let errors = self.errors.join(" | ").replace([',', '\n', '"'], " ");
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.distribution.map_or_else(|| "custom".to_string(), |d| d.to_string()),
            self.n,
            self.epsilon,
            self.trial,
            self.seed,
            self.vertices,
            self.edges,
            self.triangles,
            self.tetrahedra,
            self.six_cliques,
            self.betti[0],
            self.betti[1],
            self.betti[2],
            self.fence_valid,
            self.covered,
            self.ground_size,
            self.rank,
            opt(&self.components),
            opt(&self.nontrivial_components),
            self.is_2_connected,
            self.is_binary,
            self.binary_exact,
            self.is_tu,
            self.is_regular,
            if self.regular_evidence.is_empty() { "none" } else { &self.regular_evidence },
            self.is_graphic,
            self.is_cographic,
            opt(&self.maxflow_lp),
            opt(&self.maxflow_int),
            opt(&self.mincut),
            self.mfmc_witness,
            errors,
        )
    }

    fn sort_key(&self) -> (u64, usize, f64, usize) {
        (self.distribution.map_or(0, Distribution::index), self.n, self.epsilon, self.trial)
    }
}

/// Trial CSV: version line, header, one row per report in the given order.
pub fn reports_csv(reports: &[InvariantReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{CSV_VERSION}");
    let _ = writeln!(s, "{}", InvariantReport::csv_header());
    for r in reports {
        let _ = writeln!(s, "{}", r.csv_row());
    }
    s
}

/// Per-stage timings, one row per (trial, stage).
pub fn timings_csv(reports: &[InvariantReport]) -> String {
    let mut s = String::from("distribution,n,epsilon,trial,stage,ms\n");
    for r in reports {
        for (stage, ms) in &r.timings_ms {
            let d = r.distribution.map_or_else(|| "custom".to_string(), |d| d.to_string());
            let _ = writeln!(s, "{d},{},{},{},{stage},{ms:.3}", r.n, r.epsilon, r.trial);
        }
    }
    s
}

struct Stopwatch {
    at: Instant,
}

impl Stopwatch {
    fn start() -> Stopwatch {
        Stopwatch { at: Instant::now() }
    }

    fn lap(&mut self, report: &mut InvariantReport, stage: &str) {
        let now = Instant::now();
        report.timings_ms.push((stage.to_string(), (now - self.at).as_secs_f64() * 1e3));
        self.at = now;
    }
}

/// Sample the spec's cloud and run the battery on it.
pub fn run_trial(spec: &DistributionSpec, trial: usize, battery: &Battery, budgets: &Budgets) -> InvariantReport {
    let mut watch = Stopwatch::start();
    let mut report = InvariantReport::empty(Some(spec.kind), spec.n, spec.epsilon, trial, spec.seed);
    match sample(spec) {
        Ok(cloud) => {
            watch.lap(&mut report, "sample");
            analyze_into(&mut report, &cloud, battery, budgets);
        }
        Err(e) => report.errors.push(format!("sample: {e}")),
    }
    report
}

/// Run the battery on an explicit cloud. A nonempty fence ring makes the
/// trial a coverage trial.
pub fn analyze_cloud(
    cloud: &PointCloud,
    epsilon: f64,
    seed: u64,
    battery: &Battery,
    budgets: &Budgets,
) -> InvariantReport {
    let n = cloud.len() - cloud.fence_indices.len();
    let mut report = InvariantReport::empty(None, n, epsilon, 0, seed);
    analyze_into(&mut report, cloud, battery, budgets);
    report
}

fn analyze_into(report: &mut InvariantReport, cloud: &PointCloud, battery: &Battery, budgets: &Budgets) {
    let mut watch = Stopwatch::start();
    let r = vietoris_rips(cloud, report.epsilon, 3);
    report.vertices = r.num_cells(0);
    report.edges = r.num_cells(1);
    report.triangles = r.num_cells(2);
    report.tetrahedra = r.num_cells(3);
    let cliques6 = r.cliques(6);
    report.six_cliques = cliques6.len();
    watch.lap(report, "complex");

    // Coverage trials attach the fence cell when the fence is valid.
    let fenced = !cloud.fence_indices.is_empty();
    let mut x = r;
    if fenced {
        report.mfmc_witness = Flag::Skipped;
        report.fence_valid = Flag::from_bool(x.validate_fence(&cloud.fence_indices));
        if report.fence_valid.is_true() {
            match x.ring_chain(&cloud.fence_indices).and_then(|c| x.attach_cell(c)) {
                Ok(rp) => x = rp,
                Err(e) => report.errors.push(format!("fence: {e}")),
            }
        } else {
            report.errors.push("fence: invalid fence ring".into());
        }
        report.covered = if battery.coverage { Flag::Unknown } else { Flag::Skipped };
        watch.lap(report, "fence");
    }

    let b = betti::<Gf2>(&x);
    report.betti = [b.get(0), b.get(1), b.get(2)];
    if fenced && battery.coverage && x.attached_index().is_some() {
        report.covered = Flag::from_bool(report.betti[2] > 0);
    }
    watch.lap(report, "homology");

    let m2 = LinearMatroid::<Gf2>::from_boundary(&x, 2);
    report.ground_size = m2.len();
    report.rank = m2.rank();
    watch.lap(report, "matroid_gf2");

    if battery.connectivity {
        let comps = m2.connected_components();
        report.components = Some(comps.len());
        report.nontrivial_components = Some(comps.iter().filter(|c| c.len() >= 2).count());
        report.is_2_connected = Flag::from_bool(comps.len() == 1);
        watch.lap(report, "connectivity");
    }

    let seed = report.seed;
    if battery.regularity {
        regularity(report, &x, &m2, &cliques6, budgets, seed);
        watch.lap(report, "regularity");
    }

    // The rational matroid is only built when something needs it.
    let needs_q = battery.binary
        || (battery.tu && !report.is_regular.is_false())
        || (battery.flow_lp && x.attached_index().is_some());
    let mq = needs_q.then(|| LinearMatroid::<Rat>::from_boundary(&x, 2));
    if needs_q {
        watch.lap(report, "matroid_rational");
    }

    if battery.tu {
        report.is_tu = if report.is_regular.is_false() {
            // A TU standard form over Q is a regular representation of the same binary matroid.
            Flag::False
        } else {
            let mq = mq.as_ref().expect("built above");
            let unit = mq.standard_form().a.iter().flatten().all(|v| v.is_zero() || v.abs() == Rat::integer(1));
            if unit {
                Flag::from(is_regular(mq).verdict)
            } else {
                Flag::False
            }
        };
        watch.lap(report, "tu");
    }

    if battery.binary {
        let check = is_binary(mq.as_ref().expect("built above"));
        report.is_binary = Flag::from_bool(check.binary);
        report.binary_exact = Flag::from_bool(check.exact);
        watch.lap(report, "binary");
    }

    // Graphic and cographic matroids are regular.
    for (enabled, cographic) in [(battery.graphic, false), (battery.cographic, true)] {
        if !enabled {
            continue;
        }
        let flag = if report.is_regular.is_false() {
            Flag::False
        } else if cographic {
            Flag::from(&is_cographic(&m2, budgets.graphic))
        } else {
            Flag::from(&is_graphic(&m2, budgets.graphic))
        };
        if cographic {
            report.is_cographic = flag;
        } else {
            report.is_graphic = flag;
        }
    }
    if battery.graphic || battery.cographic {
        watch.lap(report, "graphic");
    }

    if let Some(l) = x.attached_index() {
        if battery.flow_lp {
            let mq = mq.as_ref().expect("built above");
            let unit = CapacityFunction::uniform(1);
            match lp_max_flow_matroid(mq, l, &unit) {
                Ok(v) => report.maxflow_lp = Some(v.to_string()),
                Err(e) => report.errors.push(format!("flow_lp: {e}")),
            }
            if m2.len() <= FLOW_GUARD {
                match (integer_max_flow(&m2, l, &unit), min_cut(&m2, l, &unit)) {
                    (Ok(f), Ok(c)) => {
                        report.maxflow_int = Some(f.value);
                        report.mincut = Some(c.value);
                    }
                    (Err(e), _) | (_, Err(e)) => report.errors.push(format!("flow_int: {e}")),
                }
            }
            watch.lap(report, "flow");
        }
        if battery.mfmc {
            report.mfmc_witness = match transversal_in(&x, &m2, budgets.transversal) {
                Ok(Search::Found(_)) => Flag::True,
                Ok(_) => {
                    let v = crate::invariants::mfmc_fails_matroid(&m2, l, budgets.mfmc_minor, seed);
                    Flag::from_bool(v.fails())
                }
                Err(e) => {
                    report.errors.push(format!("mfmc: {e}"));
                    Flag::Unknown
                }
            };
            watch.lap(report, "mfmc");
        }
    }
}

/// Regularity of the binary matroid: a 6-clique carries a verified F7 minor;
/// otherwise the signing test decides, with a budgeted F7/F7* search when
/// the verification step is too large.
fn regularity(
    report: &mut InvariantReport,
    x: &CellComplex,
    m2: &LinearMatroid<Gf2>,
    cliques6: &[Vec<usize>],
    budgets: &Budgets,
    seed: u64,
) {
    if let Some(q) = cliques6.first() {
        let verified = clique_f7_certificate(x, q)
            .and_then(|c| catalog(CatalogName::F7).and_then(|t| c.verify(m2, &t)))
            .unwrap_or(false);
        if verified {
            report.is_regular = Flag::False;
            report.regular_evidence = "clique_f7".into();
            return;
        }
        report.errors.push("regularity: 6-clique certificate did not verify".into());
    }
    let verdict = is_regular(m2).verdict;
    report.is_regular = Flag::from(verdict);
    report.regular_evidence = "signing".into();
    if verdict != Verdict::Unknown || budgets.minor == 0 {
        return;
    }
    for name in [CatalogName::F7, CatalogName::F7star] {
        let Ok(t) = catalog(name) else { continue };
        if minor_search(m2, &t, budgets.minor, seed).is_found() {
            report.is_regular = Flag::False;
            report.regular_evidence = format!("{}_minor", name.as_str().to_lowercase());
            return;
        }
    }
}

/// One grid point and trial index, in sweep order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialJob {
    pub spec: DistributionSpec,
    pub eps_index: usize,
    pub trial: usize,
}

/// Every trial of the grid with its derived seed, sorted by
/// (distribution, n, epsilon, trial).
pub fn grid_jobs(config: &ExperimentConfig) -> Vec<TrialJob> {
    let mut jobs = Vec::with_capacity(config.num_trials());
    for &kind in &config.distributions {
        for &n in &config.n_values {
            for (eps_index, &epsilon) in config.epsilon_values.iter().enumerate() {
                for trial in 0..config.trials_per_cell {
                    let seed = derive_seed(config.master_seed, &[kind.index(), n as u64, eps_index as u64, trial as u64]);
                    jobs.push(TrialJob { spec: DistributionSpec { kind, n, epsilon, seed }, eps_index, trial });
                }
            }
        }
    }
    jobs.sort_by(|a, b| {
        (a.spec.kind, a.spec.n)
            .cmp(&(b.spec.kind, b.spec.n))
            .then(a.spec.epsilon.total_cmp(&b.spec.epsilon))
            .then(a.trial.cmp(&b.trial))
    });
    jobs
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridOutput {
    pub reports: Vec<InvariantReport>,
    pub summary: AggregateSummary,
}

/// Run every trial of the grid, in parallel, calling `progress` after each
/// one. Rows come back sorted; an implication violation aborts with the
/// offending seed.
pub fn run_grid_with<P>(config: &ExperimentConfig, progress: P) -> Result<GridOutput>
where
    P: Fn(&InvariantReport) + Sync,
{
    config.validate()?;
    let jobs = grid_jobs(config);
    let run = || -> Vec<InvariantReport> {
        jobs.par_iter()
            .map(|job| {
                let r = run_trial(&job.spec, job.trial, &config.battery, &config.budgets);
                progress(&r);
                r
            })
            .collect()
    };
    let mut reports = if config.workers == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?
            .install(run)
    };
    reports.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        (ka.0, ka.1).cmp(&(kb.0, kb.1)).then(ka.2.total_cmp(&kb.2)).then(ka.3.cmp(&kb.3))
    });
    for r in &reports {
        r.audit()?;
    }
    let summary = aggregate(&reports);
    Ok(GridOutput { reports, summary })
}

pub fn run_grid(config: &ExperimentConfig) -> Result<GridOutput> {
    run_grid_with(config, |_| {})
}

/// Counts of each flag value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagCounts(pub BTreeMap<Flag, usize>);

impl FlagCounts {
    fn add(&mut self, f: Flag) {
        *self.0.entry(f).or_default() += 1;
    }

    fn merge(&mut self, other: &FlagCounts) {
        for (&f, &k) in &other.0 {
            *self.0.entry(f).or_default() += k;
        }
    }

    pub fn get(&self, f: Flag) -> usize {
        self.0.get(&f).copied().unwrap_or(0)
    }

    /// Fraction of `true` among decided trials, if any were decided.
    pub fn fraction_true(&self) -> Option<f64> {
        let decided = self.get(Flag::True) + self.get(Flag::False);
        (decided > 0).then(|| self.get(Flag::True) as f64 / decided as f64)
    }
}

impl fmt::Display for FlagCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        f.write_str(&parts.join(";"))
    }
}

fn histogram_text<K: fmt::Display>(h: &BTreeMap<K, usize>) -> String {
    h.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(";")
}

/// Statistics of one (distribution, n, epsilon) cell, kept as counts and
/// sums so that merging partial summaries is exact.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub trials: usize,
    pub with_errors: usize,
    pub sum_vertices: usize,
    pub sum_edges: usize,
    pub sum_triangles: usize,
    pub with_six_clique: usize,
    pub covered: FlagCounts,
    pub connected: FlagCounts,
    pub binary: FlagCounts,
    pub tu: FlagCounts,
    pub regular: FlagCounts,
    pub graphic: FlagCounts,
    pub cographic: FlagCounts,
    pub mfmc_witness: FlagCounts,
    /// Trials where regularity failed and a 6-clique was present.
    pub irregular_with_six_clique: usize,
    pub components: BTreeMap<usize, usize>,
    /// Keyed by the exact rational value.
    pub maxflow_lp: BTreeMap<String, usize>,
}

impl CellSummary {
    fn add(&mut self, r: &InvariantReport) {
        self.trials += 1;
        self.with_errors += usize::from(!r.errors.is_empty());
        self.sum_vertices += r.vertices;
        self.sum_edges += r.edges;
        self.sum_triangles += r.triangles;
        self.with_six_clique += usize::from(r.six_cliques > 0);
        self.covered.add(r.covered);
        self.connected.add(r.is_2_connected);
        self.binary.add(r.is_binary);
        self.tu.add(r.is_tu);
        self.regular.add(r.is_regular);
        self.graphic.add(r.is_graphic);
        self.cographic.add(r.is_cographic);
        self.mfmc_witness.add(r.mfmc_witness);
        self.irregular_with_six_clique += usize::from(r.is_regular.is_false() && r.six_cliques > 0);
        if let Some(c) = r.components {
            *self.components.entry(c).or_default() += 1;
        }
        if let Some(v) = &r.maxflow_lp {
            *self.maxflow_lp.entry(v.clone()).or_default() += 1;
        }
    }

    fn merge(&mut self, o: &CellSummary) {
        self.trials += o.trials;
        self.with_errors += o.with_errors;
        self.sum_vertices += o.sum_vertices;
        self.sum_edges += o.sum_edges;
        self.sum_triangles += o.sum_triangles;
        self.with_six_clique += o.with_six_clique;
        for (a, b) in [
            (&mut self.covered, &o.covered),
            (&mut self.connected, &o.connected),
            (&mut self.binary, &o.binary),
            (&mut self.tu, &o.tu),
            (&mut self.regular, &o.regular),
            (&mut self.graphic, &o.graphic),
            (&mut self.cographic, &o.cographic),
            (&mut self.mfmc_witness, &o.mfmc_witness),
        ] {
            a.merge(b);
        }
        self.irregular_with_six_clique += o.irregular_with_six_clique;
        for (&k, &v) in &o.components {
            *self.components.entry(k).or_default() += v;
        }
        for (k, &v) in &o.maxflow_lp {
            *self.maxflow_lp.entry(k.clone()).or_default() += v;
        }
    }

    fn mean(&self, sum: usize) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            sum as f64 / self.trials as f64
        }
    }

    /// The most frequent LP value; ties go to the smallest rational.
    pub fn modal_maxflow(&self) -> Option<Rat> {
        let mut best: Option<(usize, Rat)> = None;
        for (k, &v) in &self.maxflow_lp {
            let q = Rat::parse_elem(k)?;
            best = match best {
                Some((bv, bq)) if bv > v || (bv == v && bq < q) => Some((bv, bq)),
                _ => Some((v, q)),
            };
        }
        best.map(|(_, q)| q)
    }
}

/// Cell key: distribution (None for custom clouds), n and epsilon bits.
pub type CellKey = (Option<Distribution>, usize, u64);

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateSummary {
    pub cells: BTreeMap<CellKey, CellSummary>,
}

impl AggregateSummary {
    pub fn add(&mut self, r: &InvariantReport) {
        self.cells.entry((r.distribution, r.n, r.epsilon.to_bits())).or_default().add(r);
    }

    pub fn merge(&mut self, other: &AggregateSummary) {
        for (k, c) in &other.cells {
            self.cells.entry(*k).or_default().merge(c);
        }
    }

    pub fn cell(&self, d: Distribution, n: usize, epsilon: f64) -> Option<&CellSummary> {
        self.cells.get(&(Some(d), n, epsilon.to_bits()))
    }

    /// Rows sorted by distribution, n and epsilon value.
    fn ordered(&self) -> Vec<(&CellKey, &CellSummary)> {
        let mut v: Vec<_> = self.cells.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            (a.0, a.1).cmp(&(b.0, b.1)).then(f64::from_bits(a.2).total_cmp(&f64::from_bits(b.2)))
        });
        v
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{AGGREGATE_VERSION}");
        let _ = writeln!(
            s,
            "distribution,n,epsilon,trials,with_errors,mean_vertices,mean_edges,mean_triangles,with_six_clique,\
covered,connected,binary,tu,regular,graphic,cographic,mfmc_witness,irregular_with_six_clique,components,maxflow_lp"
        );
        for ((d, n, eps), c) in self.ordered() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{:.3},{:.3},{:.3},{},{},{},{},{},{},{},{},{},{},{},{}",
                d.map_or_else(|| "custom".to_string(), |d| d.to_string()),
                n,
                f64::from_bits(*eps),
                c.trials,
                c.with_errors,
                c.mean(c.sum_vertices),
                c.mean(c.sum_edges),
                c.mean(c.sum_triangles),
                c.with_six_clique,
                c.covered,
                c.connected,
                c.binary,
                c.tu,
                c.regular,
                c.graphic,
                c.cographic,
                c.mfmc_witness,
                c.irregular_with_six_clique,
                histogram_text(&c.components),
                histogram_text(&c.maxflow_lp),
            );
        }
        s
    }
}

pub fn aggregate(reports: &[InvariantReport]) -> AggregateSummary {
    let mut s = AggregateSummary::default();
    for r in reports {
        s.add(r);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::relative_h2_nonzero;
    use crate::pointcloud::sample;

    fn spec(kind: Distribution, n: usize, epsilon: f64, seed: u64) -> DistributionSpec {
        DistributionSpec { kind, n, epsilon, seed }
    }

    #[test]
    fn config_round_trip() {
        let mut cfg = ExperimentConfig::acceptance();
        cfg.battery.mfmc = false;
        cfg.budgets.minor = 7;
        let back = ExperimentConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(ExperimentConfig::parse("preset = full\n").unwrap().n_values.len(), 100);
        assert!(ExperimentConfig::parse("trials_per_cell = 0").is_err());
        assert!(ExperimentConfig::parse("colour = blue").is_err());
        assert_eq!(ExperimentConfig::desk().epsilon_values.last(), Some(&0.35));
    }

    #[test]
    fn sparse_trial_is_trivial() {
        let r = run_trial(&spec(Distribution::D1, 5, 0.01, 3), 0, &Battery::all(), &Budgets::default());
        assert_eq!((r.edges, r.triangles, r.ground_size), (0, 0, 0));
        assert_eq!(r.components, Some(0));
        assert!(r.errors.is_empty(), "{:?}", r.errors);
        r.audit().unwrap();
    }

    #[test]
    fn coverage_trial_is_deterministic() {
        let s = spec(Distribution::D2, 60, 0.25, 0xc0ffee);
        let a = run_trial(&s, 0, &Battery::all(), &Budgets::default());
        let b = run_trial(&s, 0, &Battery::all(), &Budgets::default());
        assert_eq!(a.csv_row(), b.csv_row());
        let cloud = sample(&s).unwrap();
        let r = vietoris_rips(&cloud, s.epsilon, 3);
        assert_eq!(a.covered.is_true(), relative_h2_nonzero(&r, &cloud.fence_indices).unwrap());
        assert!(a.maxflow_lp.is_some());
        a.audit().unwrap();
    }

    #[test]
    fn regularity_matches_f7_search() {
        for seed in 0..3 {
            let r = run_trial(&spec(Distribution::D3, 40, 0.3, seed), 0, &Battery::all(), &Budgets::default());
            if r.six_cliques > 0 {
                assert_eq!(r.is_regular, Flag::False);
            }
            if r.is_regular.is_true() {
                let cloud = sample(&spec(Distribution::D3, 40, 0.3, seed)).unwrap();
                let m = LinearMatroid::<Gf2>::from_boundary(&vietoris_rips(&cloud, 0.3, 3), 2);
                let f7 = catalog(CatalogName::F7).unwrap();
                assert!(!minor_search(&m, &f7, 20_000, seed).is_found());
            }
            r.audit().unwrap();
        }
    }

    #[test]
    fn grid_counts_and_merge() {
        let cfg = ExperimentConfig {
            distributions: vec![Distribution::D1],
            n_values: vec![12],
            epsilon_values: vec![0.3],
            trials_per_cell: 3,
            ..ExperimentConfig::desk()
        };
        let out = run_grid(&cfg).unwrap();
        assert_eq!(out.reports.len(), 3);
        let cell = out.summary.cell(Distribution::D1, 12, 0.3).unwrap();
        assert_eq!(cell.trials, 3);
        assert_eq!(cell.regular.0.values().sum::<usize>(), 3);

        let mut merged = aggregate(&out.reports[..1]);
        merged.merge(&aggregate(&out.reports[1..]));
        assert_eq!(merged, out.summary);
        assert!(aggregate(&[]).cells.is_empty());

        let again = run_grid(&cfg).unwrap();
        assert_eq!(reports_csv(&again.reports), reports_csv(&out.reports));
    }

    #[test]
    fn single_report_frequencies() {
        let r = run_trial(&spec(Distribution::D1, 20, 0.3, 9), 0, &Battery::all(), &Budgets::default());
        let s = aggregate(std::slice::from_ref(&r));
        let cell = s.cell(Distribution::D1, 20, 0.3).unwrap();
        for f in [cell.regular.fraction_true(), cell.graphic.fraction_true()].into_iter().flatten() {
            assert!(f == 0.0 || f == 1.0);
        }
    }

    #[test]
    fn audit_catches_violations() {
        let mut r = InvariantReport::empty(Some(Distribution::D1), 1, 0.1, 0, 42);
        r.is_tu = Flag::True;
        r.is_regular = Flag::False;
        let err = r.audit().unwrap_err().to_string();
        assert!(err.contains("42"), "{err}");
    }
}
