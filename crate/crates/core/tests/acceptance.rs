//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use backhaul::experiments::{
    oracle_compare, pearson, stability_audit, sweep_k, sweep_n1, AuditConfig, AuditRecord, Scheme, SweepConfig,
};
use backhaul::propagation::{brb_rate, mmw_pathloss_db, sample_sub6_fade, sinr_sub6, snr_mmw};
use backhaul::{generate_scenario, realize_channels, GenerationParams, Scenario};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Shared by criteria 1 to 3: 1000 Table II trials.
fn table2_audit() -> (Vec<AuditRecord>, Duration) {
    let t = Instant::now();
    let cfg = AuditConfig { base: GenerationParams::default(), trials: 1000, zeta_bps_per_unit: 1e6, seed: SEED };
    let records = stability_audit(&cfg).expect("audit runs");
    (records, t.elapsed())
}

fn stability(records: &[AuditRecord], elapsed: Duration) -> Outcome {
    let with_pairs = records.iter().filter(|r| r.blocking_pairs > 0).count();
    let fast = elapsed < Duration::from_secs(300);
    outcome(
        with_pairs == 0 && fast && records.len() == 1000,
        format!("{} trials, {with_pairs} with blocking pairs, {:.1} s", records.len(), elapsed.as_secs_f64()),
    )
}

fn convergence(records: &[AuditRecord]) -> Outcome {
    let over_p = records.iter().filter(|r| r.proposals > r.proposal_bound).count();
    let over_r = records.iter().filter(|r| r.rounds > r.round_bound).count();
    let max_p = records.iter().map(|r| r.proposals).max().unwrap_or(0);
    let max_r = records.iter().map(|r| r.rounds).max().unwrap_or(0);
    outcome(
        over_p == 0 && over_r == 0,
        format!(
            "max proposals {max_p} (bound {}), max rounds {max_r} (bound {}), {over_p} + {over_r} violations",
            records[0].proposal_bound, records[0].round_bound
        ),
    )
}

fn budget(records: &[AuditRecord]) -> Outcome {
    let over = records.iter().filter(|r| !r.budget_ok).count();
    let worst = records.iter().map(|r| r.max_budget_excess).fold(f64::NEG_INFINITY, f64::max);
    outcome(over == 0, format!("{over} trials over budget, largest cost - budget = {worst}"))
}

fn oracle() -> Outcome {
    let t = Instant::now();
    let records = oracle_compare(200, SEED, 1e6).expect("oracle comparison runs");
    let elapsed = t.elapsed();
    let constraints = records.iter().filter(|r| !r.constraints_ok).count();
    let dominance = records.iter().filter(|r| !r.dominance_ok).count();
    let verified = records.iter().filter(|r| !r.oracle_verified).count();
    let compared = records.iter().filter(|r| r.gap.is_some()).count();
    let max_gap = records.iter().filter_map(|r| r.gap).fold(0.0, f64::max);
    outcome(
        constraints == 0 && dominance == 0 && verified == 0 && elapsed < Duration::from_secs(120),
        format!(
            "200 instances: (a) {constraints} constraint failures (b) {dominance} dominance failures over {compared} \
             all-demands-met instances, largest gap {max_gap} (c) {verified} optimality-check failures; {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn fig2() -> Outcome {
    let r = sweep_n1(&SweepConfig { seed: SEED, ..SweepConfig::rate_vs_n1() }).expect("sweep runs");
    let rate = |p: &backhaul::experiments::PointResult, s| p.estimate(s, |m| m.avg_rate_bps).mean;
    let mut lines = Vec::new();
    let mut dominated = true;
    for p in &r.points {
        let (m, be, rnd) = (rate(p, Scheme::Matching), rate(p, Scheme::BestEffort), rate(p, Scheme::Random));
        // Budgets bind where the budget-blind scheme overspends.
        let binds = p.estimate(Scheme::BestEffort, |m| m.over_budget as f64).mean > 0.0;
        if binds && m < be {
            dominated = false;
        }
        lines.push(format!(
            "n1={} matching {:.2} best-effort {:.2} random {:.2} Mbit/s{}",
            p.coords[0],
            m / 1e6,
            be / 1e6,
            rnd / 1e6,
            if binds { " (budget binds)" } else { "" }
        ));
    }
    let last = r.point(&["180"]).expect("n1 = 180 is swept");
    let vs_be = rate(last, Scheme::Matching) / rate(last, Scheme::BestEffort);
    let vs_rnd = rate(last, Scheme::Matching) / rate(last, Scheme::Random);
    let pass = dominated && (1.1..=1.6).contains(&vs_be) && vs_rnd >= 2.0;
    outcome(
        pass,
        format!(
            "matching >= best-effort where budgets bind: {dominated}; at n1=180 matching/best-effort = {vs_be:.3} \
             (want [1.1, 1.6]), matching/random = {vs_rnd:.3} (want >= 2.0)\n      {}",
            lines.join("\n      ")
        ),
    )
}

fn fig4() -> Outcome {
    let r = sweep_k(&SweepConfig { seed: SEED, ..SweepConfig::rounds_vs_k() }).expect("sweep runs");
    let rounds =
        |k: &str, d: &str| r.point(&[k, d]).expect("point is swept").estimate(Scheme::Matching, |m| m.rounds as f64);
    let ks = ["4", "8", "12", "16", "20"];
    let x: Vec<f64> = ks.iter().map(|k| k.parse().unwrap()).collect();
    let y100: Vec<f64> = ks.iter().map(|k| rounds(k, "100000000").mean).collect();
    let y50: Vec<f64> = ks.iter().map(|k| rounds(k, "50000000").mean).collect();
    let r100 = pearson(&x, &y100);
    let ratio = y50[4] / y100[4];
    outcome(
        r100 >= 0.9 && (0.35..=0.65).contains(&ratio),
        format!(
            "Pearson r (rounds vs K, 100 Mbit/s) = {r100:.3} (want >= 0.9); rounds at K=20: 50 Mbit/s / 100 Mbit/s = \
             {ratio:.3} (want [0.35, 0.65])\n      mean rounds at 100 Mbit/s: {y100:.1?}\n      mean rounds at 50 Mbit/s: {y50:.1?}"
        ),
    )
}

fn numerics() -> Outcome {
    let pl = mmw_pathloss_db(1.0, 2.0, 70.0, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let fade_mean = (0..10_000).map(|_| sample_sub6_fade::<f64, _>(&mut rng)).sum::<f64>() / 1e4;

    let s: Scenario = generate_scenario(&GenerationParams::default(), SEED).unwrap();
    let mut ch = realize_channels(&s, &mut rng);
    let n = s.bands.mmw.num_brbs + 7;
    *ch.gain_mut(1, n, 3) = 0.0;
    let psi = [s.tx_power_w; 2];
    let sigma2 = s.noise_power_w();
    let sinr = sinr_sub6(0, n, 3, &psi, &ch, sigma2).unwrap();
    let snr = snr_mmw(s.tx_power_w, ch.gain(0, n, 3), sigma2);
    let rate = brb_rate(480e3, 1.0);

    let pass = pl == 70.0 && (0.95..=1.05).contains(&fade_mean) && sinr == snr && rate == 480e3;
    outcome(
        pass,
        format!(
            "path loss at 1 m = {pl} dB, fade mean = {fade_mean:.4}, SINR == SNR: {}, rate = {rate} bit/s",
            sinr == snr
        ),
    )
}

fn cli_determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_backhaul");
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str], out: &Path| -> bool {
        Command::new(exe).args(args).arg("--out").arg(out).output().map(|o| o.status.success()).unwrap_or(false)
    };
    let cases: [(&str, &[&str]); 7] = [
        ("generate", &["generate", "--seed", "7"]),
        ("run", &["run", "--seed", "7"]),
        ("sweep n1", &["sweep", "n1", "--trials", "20", "--seed", "7"]),
        ("sweep budget-price", &["sweep", "budget-price", "--trials", "5", "--seed", "7"]),
        ("sweep k", &["sweep", "k", "--trials", "20", "--seed", "7"]),
        ("oracle-compare", &["oracle-compare", "--seed", "7"]),
        ("stability-audit", &["stability-audit", "--trials", "200", "--seed", "7"]),
    ];
    let mut bad = Vec::new();
    for (i, (name, args)) in cases.iter().enumerate() {
        let first = dir.path().join(format!("{i}-first"));
        if !run(args, &first) {
            bad.push(format!("{name}: initial run failed"));
            continue;
        }
        let manifest = first.join("manifest.json");
        let sub: Vec<&str> = args.iter().take_while(|a| !a.starts_with("--")).copied().collect();
        let (a, b) = (dir.path().join(format!("{i}-a")), dir.path().join(format!("{i}-b")));
        let with_manifest: Vec<&str> = sub.iter().copied().chain(["--config", manifest.to_str().unwrap()]).collect();
        if !run(&with_manifest, &a) || !run(&with_manifest, &b) {
            bad.push(format!("{name}: replay failed"));
            continue;
        }
        let mut files: Vec<_> = fs::read_dir(&first)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|f| f.ends_with(".csv") || f == "scenario.json")
            .collect();
        files.sort();
        if files.is_empty() {
            bad.push(format!("{name}: no output files"));
        }
        for f in files {
            let bytes = |d: &Path| fs::read(d.join(&f)).ok();
            let (x, y, z) = (bytes(&first), bytes(&a), bytes(&b));
            if x.is_none() || x != y || y != z {
                bad.push(format!("{name}: {f} differs"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} subcommands, outputs byte-identical across manifest replays", cases.len())
        } else {
            bad.join("; ")
        },
    )
}

fn main() {
    let (records, elapsed) = table2_audit();
    let results = [
        ("1 stability at Table II scale", stability(&records, elapsed)),
        ("2 convergence bounds", convergence(&records)),
        ("3 budget constraint (exact)", budget(&records)),
        ("4 oracle sanity on micro instances", oracle()),
        ("5 rate vs mmWave BRBs trend", fig2()),
        ("6 rounds vs network size trend", fig4()),
        ("7 numerical checks", numerics()),
        ("8 CLI determinism", cli_determinism()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("criterion {name}: {} - {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
