use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use backhaul::experiments::{
    create_output, load_config, oracle_compare, run_schemes, run_sweep, stability_audit, trial_rng, write_records,
    AuditConfig, Manifest, OracleConfig, Scheme, SchemeMetrics, Sweep, SweepConfig, TrialConfig,
};
use backhaul::{
    generate_scenario, realize_channels, validate_scenario, Error, GenerationParams, Market, Result, Scenario,
};
use rand::Rng;

#[derive(Parser)]
#[command(name = "backhaul", version, about = "Backhaul BRB allocation by one-to-many matching")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration, or a manifest.json from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Place stations and write a scenario file.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        stations: Option<usize>,
        #[arg(long)]
        anchors: Option<usize>,
    },
    /// Draw one channel realization and run the allocation schemes on it.
    Run {
        #[command(flatten)]
        common: Common,
        /// Scenario file to use instead of generating one.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        zeta: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<SchemeArg>>,
    },
    /// Monte Carlo sweep over one parameter.
    Sweep {
        kind: SweepKind,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        zeta: Option<f64>,
        /// Worker threads, 0 for one per core.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Compare the matching with the exhaustive optimum on micro instances.
    OracleCompare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long)]
        zeta: Option<f64>,
    },
    /// Check stability, convergence bounds and budgets over many trials.
    StabilityAudit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        zeta: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    N1,
    BudgetPrice,
    K,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Matching,
    BestEffort,
    Random,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Matching => Scheme::Matching,
            SchemeArg::BestEffort => Scheme::BestEffort,
            SchemeArg::Random => Scheme::Random,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenerateConfig {
    #[serde(default)]
    params: GenerationParams,
    seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    /// Scenario file; when absent one is generated from `base`.
    #[serde(default)]
    scenario: Option<PathBuf>,
    #[serde(default)]
    base: GenerationParams,
    zeta_bps_per_unit: f64,
    #[serde(default = "all_schemes")]
    schemes: Vec<Scheme>,
    seed: u64,
}

fn all_schemes() -> Vec<Scheme> {
    Scheme::ALL.to_vec()
}

fn load_or<C: serde::de::DeserializeOwned>(path: &Option<PathBuf>, default: impl FnOnce() -> C) -> Result<C> {
    match path {
        Some(p) => load_config(p),
        None => Ok(default()),
    }
}

fn finish(mut manifest: Manifest, dir: &Path, outputs: &[&str]) -> Result<()> {
    manifest.outputs = outputs.iter().map(|s| s.to_string()).collect();
    manifest.write(dir)?;
    for o in outputs {
        println!("wrote {}", dir.join(o).display());
    }
    Ok(())
}

fn generate(common: Common, stations: Option<usize>, anchors: Option<usize>) -> Result<()> {
    let mut cfg = load_or(&common.config, || GenerateConfig { params: GenerationParams::default(), seed: 1 })?;
    cfg.seed = common.seed.unwrap_or(cfg.seed);
    cfg.params.num_stations = stations.unwrap_or(cfg.params.num_stations);
    cfg.params.num_anchors = anchors.unwrap_or(cfg.params.num_anchors);
    let s: Scenario = generate_scenario(&cfg.params, cfg.seed)?;
    std::fs::create_dir_all(&common.out).map_err(|e| Error::io(&common.out, e))?;
    s.save(common.out.join("scenario.json"))?;
    finish(Manifest::new("generate", &cfg, cfg.seed)?, &common.out, &["scenario.json"])
}

fn run(common: Common, scenario: Option<PathBuf>, zeta: Option<f64>, schemes: Option<Vec<SchemeArg>>) -> Result<()> {
    let mut cfg = load_or(&common.config, || RunConfig {
        scenario: None,
        base: GenerationParams::default(),
        zeta_bps_per_unit: 1e6,
        schemes: all_schemes(),
        seed: 1,
    })?;
    cfg.seed = common.seed.unwrap_or(cfg.seed);
    cfg.scenario = scenario.or(cfg.scenario);
    cfg.zeta_bps_per_unit = zeta.unwrap_or(cfg.zeta_bps_per_unit);
    if let Some(s) = schemes {
        cfg.schemes = s.into_iter().map(Scheme::from).collect();
    }
    if cfg.schemes.is_empty() {
        return Err(Error::InvalidConfig("at least one scheme is required".into()));
    }

    let mut rng = trial_rng(cfg.seed, 0);
    let layout_seed: u64 = rng.random();
    let s: Scenario = match &cfg.scenario {
        Some(path) => Scenario::load(path)?,
        None => generate_scenario(&cfg.base, layout_seed)?,
    };
    let violations = validate_scenario(&s);
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| format!("  {:?}: {}", v.kind, v.detail)).collect();
        return Err(Error::InvalidConfig(format!("invalid scenario:\n{}", lines.join("\n"))));
    }
    let ch = realize_channels(&s, &mut rng);
    let market = Market::new(&s, &ch);
    let trial = TrialConfig { zeta_bps_per_unit: cfg.zeta_bps_per_unit, schemes: cfg.schemes.clone() };

    let mut outputs = vec!["metrics.csv".to_string()];
    let mut metrics = Vec::new();
    for (scheme, m) in run_schemes(&market, &trial, &mut rng) {
        let name = format!("allocation_{scheme}.csv");
        let mut f = create_output(&common.out, &name)?;
        m.write_csv(&market, &mut f)?;
        f.flush().map_err(|e| Error::io(common.out.join(&name), e))?;
        outputs.push(name);
        metrics.push(MetricsRow::new(scheme, SchemeMetrics::measure(&m, &market, cfg.zeta_bps_per_unit)?));
    }
    write_records(&metrics, create_output(&common.out, "metrics.csv")?)?;
    let names: Vec<&str> = outputs.iter().map(String::as_str).collect();
    finish(Manifest::new("run", &cfg, cfg.seed)?, &common.out, &names)
}

#[derive(Serialize)]
struct MetricsRow {
    scheme: Scheme,
    avg_rate_bps: f64,
    avg_cost: f64,
    demand_met_fraction: f64,
    over_budget: usize,
    rounds: usize,
    proposals: usize,
    blocking_pairs: usize,
}

impl MetricsRow {
    fn new(scheme: Scheme, m: SchemeMetrics) -> Self {
        MetricsRow {
            scheme,
            avg_rate_bps: m.avg_rate_bps,
            avg_cost: m.avg_cost,
            demand_met_fraction: m.demand_met_fraction,
            over_budget: m.over_budget,
            rounds: m.rounds,
            proposals: m.proposals,
            blocking_pairs: m.blocking_pairs,
        }
    }
}

fn sweep(
    kind: SweepKind,
    common: Common,
    trials: Option<usize>,
    zeta: Option<f64>,
    workers: Option<usize>,
) -> Result<()> {
    let (name, preset): (&str, fn() -> SweepConfig) = match kind {
        SweepKind::N1 => ("n1", SweepConfig::rate_vs_n1),
        SweepKind::BudgetPrice => ("budget-price", SweepConfig::rate_vs_budget_price),
        SweepKind::K => ("k", SweepConfig::rounds_vs_k),
    };
    let mut cfg = load_or(&common.config, preset)?;
    let kind_matches = matches!(
        (kind, &cfg.sweep),
        (SweepKind::N1, Sweep::N1(_))
            | (SweepKind::BudgetPrice, Sweep::BudgetPrice { .. })
            | (SweepKind::K, Sweep::K { .. })
    );
    if !kind_matches {
        return Err(Error::InvalidConfig(format!(
            "configuration describes a '{}' sweep, not '{name}'",
            cfg.sweep.name()
        )));
    }
    cfg.seed = common.seed.unwrap_or(cfg.seed);
    cfg.trials = trials.unwrap_or(cfg.trials);
    cfg.zeta_bps_per_unit = zeta.unwrap_or(cfg.zeta_bps_per_unit);
    cfg.workers = workers.unwrap_or(cfg.workers);

    let result = run_sweep(&cfg)?;
    let file = format!("sweep_{}.csv", name.replace('-', "_"));
    result.write_csv(create_output(&common.out, &file)?)?;

    let mut manifest = Manifest::new(&format!("sweep {name}"), &cfg, cfg.seed)?;
    manifest
        .notes
        .push(format!("trials = {}: the reference results average over an unstated number of draws", cfg.trials));
    if let Sweep::BudgetPrice { .. } = cfg.sweep {
        manifest
            .notes
            .push("budget and sub-6 price ranges are this tool's choice, not read from a reference figure".into());
    }
    finish(manifest, &common.out, &[&file])
}

fn oracle(common: Common, instances: Option<usize>, zeta: Option<f64>) -> Result<bool> {
    let mut cfg = load_or(&common.config, OracleConfig::default)?;
    cfg.seed = common.seed.unwrap_or(cfg.seed);
    cfg.instances = instances.unwrap_or(cfg.instances);
    cfg.zeta_bps_per_unit = zeta.unwrap_or(cfg.zeta_bps_per_unit);
    let records = oracle_compare(cfg.instances, cfg.seed, cfg.zeta_bps_per_unit)?;
    write_records(&records, create_output(&common.out, "oracle.csv")?)?;
    let failed = records.iter().filter(|r| !r.passed()).count();
    let compared = records.iter().filter(|r| r.gap.is_some()).count();
    println!(
        "{} instances, {} with all demands met by the matching, {} failed checks",
        records.len(),
        compared,
        failed
    );
    finish(Manifest::new("oracle-compare", &cfg, cfg.seed)?, &common.out, &["oracle.csv"])?;
    Ok(failed == 0)
}

fn audit(common: Common, trials: Option<usize>, zeta: Option<f64>) -> Result<bool> {
    let mut cfg = load_or(&common.config, AuditConfig::default)?;
    cfg.seed = common.seed.unwrap_or(cfg.seed);
    cfg.trials = trials.unwrap_or(cfg.trials);
    cfg.zeta_bps_per_unit = zeta.unwrap_or(cfg.zeta_bps_per_unit);
    let records = stability_audit(&cfg)?;
    write_records(&records, create_output(&common.out, "stability.csv")?)?;
    let blocking: usize = records.iter().map(|r| r.blocking_pairs).sum();
    let failed = records.iter().filter(|r| !r.passed()).count();
    println!(
        "{} trials, {} blocking pairs, {} trials violating a bound or budget",
        records.len(),
        blocking,
        records.iter().filter(|r| r.blocking_pairs == 0 && !r.passed()).count()
    );
    finish(Manifest::new("stability-audit", &cfg, cfg.seed)?, &common.out, &["stability.csv"])?;
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate { common, stations, anchors } => generate(common, stations, anchors).map(|()| true),
        Command::Run { common, scenario, zeta, schemes } => run(common, scenario, zeta, schemes).map(|()| true),
        Command::Sweep { kind, common, trials, zeta, workers } => {
            sweep(kind, common, trials, zeta, workers).map(|()| true)
        }
        Command::OracleCompare { common, instances, zeta } => oracle(common, instances, zeta),
        Command::StabilityAudit { common, trials, zeta } => audit(common, trials, zeta),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
