use std::ops::Range;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rcbf::barrier::ContactObjective;
use rcbf::config::{PolicyKind, Resolved, ResolvedGain, ScenarioConfig};
use rcbf::sim::{self, SimOutcome, StartRegion, SAFETY_TOL};
use rcbf::verify;

/// Safety-filtered landing and docking simulations.
#[derive(Parser)]
#[command(name = "rcbf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write its trajectory and summary.
    Run {
        #[command(flatten)]
        common: Common,
        /// Seed for the random disturbance policy.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a scenario over a seed range and aggregate the outcomes.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Half-open seed range `A..B`.
        #[arg(long, value_parser = parse_seeds)]
        seeds: Range<u64>,
    },
    /// Generate phase-portrait trajectories and level sets for the single-axis model.
    Portrait {
        #[command(flatten)]
        common: Common,
    },
    /// Run the built-in numerical checks and print a PASS/FAIL table.
    Verify {
        /// Random samples for the sampled checks.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

#[derive(Args)]
struct Common {
    /// Config file or preset name (ceres-landing, leo-docking, phase-portrait).
    #[arg(value_name = "CONFIG", conflicts_with = "config")]
    preset: Option<String>,
    /// Same as the positional CONFIG.
    #[arg(long)]
    config: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Class-K gain: `auto` solves it from the tolerances.
    #[arg(long)]
    k: Option<String>,
    /// Disturbance policy: random, zero, adversarial or helpful.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    w_u_max: Option<f64>,
    #[arg(long)]
    w_x_max: Option<f64>,
    #[arg(long)]
    input_bound: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    timeout: Option<f64>,
    /// Any other numeric field, as `FIELD=VALUE`. Repeatable.
    #[arg(long = "set", value_name = "FIELD=VALUE")]
    set: Vec<String>,
}

fn parse_seeds(s: &str) -> Result<Range<u64>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got `{s}`"))?;
    let a: u64 = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
    let b: u64 = b.trim().parse().map_err(|_| format!("bad range end `{b}`"))?;
    if b <= a {
        return Err(format!("seed range {a}..{b} is empty"));
    }
    Ok(a..b)
}

fn load_config(name: Option<&str>, default: &str) -> anyhow::Result<ScenarioConfig> {
    let name = name.unwrap_or(default);
    if let Some(cfg) = ScenarioConfig::preset(name) {
        return Ok(cfg);
    }
    let path = Path::new(name);
    if !path.exists() {
        bail!(
            "`{name}` is neither a config file nor a preset ({})",
            ScenarioConfig::preset_names().join(", ")
        );
    }
    ScenarioConfig::load(path).with_context(|| format!("loading {}", path.display()))
}

impl Common {
    fn config_name(&self) -> Option<&str> {
        self.config.as_deref().or(self.preset.as_deref())
    }
}

fn apply_overrides(cfg: &mut ScenarioConfig, c: &Common) -> anyhow::Result<()> {
    if let Some(k) = &c.k {
        cfg.set_field("k", k)?;
    }
    let named = [
        ("gamma1", c.gamma1),
        ("gamma2", c.gamma2),
        ("w_u_max", c.w_u_max),
        ("w_x_max", c.w_x_max),
        ("input_bound", c.input_bound),
        ("dt", c.dt),
        ("timeout", c.timeout),
    ];
    for (field, value) in named {
        if let Some(v) = value {
            cfg.set_field(field, &v.to_string())?;
        }
    }
    for kv in &c.set {
        let (field, value) = kv.split_once('=').with_context(|| format!("expected FIELD=VALUE, got `{kv}`"))?;
        cfg.set_field(field.trim(), value.trim())?;
    }
    if let Some(p) = &c.policy {
        let policy: PolicyKind = p.parse()?;
        match cfg.run_settings_mut() {
            Some(run) => run.policy = policy,
            None => bail!("--policy does not apply to {}", cfg.name()),
        }
    }
    Ok(())
}

fn report_gain(gain: &ResolvedGain) {
    match (gain.auto, gain.solved) {
        (true, _) => println!("k = {:.6} (solved from tolerances)", gain.value),
        (false, Some(s)) => println!("k = {} (solved value {s:.6})", gain.value),
        (false, None) => println!("k = {}", gain.value),
    }
}

fn objective(scenario: &sim::Scenario<f64>) -> ContactObjective {
    scenario.law.h1().tolerances().map(|t| t.objective).unwrap_or(ContactObjective::Landing)
}

fn describe(o: &SimOutcome<f64>) -> String {
    format!(
        "{:?}: t_f = {:.3} s, terminal h_dot = {:.6}, violations = {}",
        o.classification, o.t_f, o.terminal_h_dot, o.violation_count
    )
}

fn run(common: &Common, seed: Option<u64>) -> anyhow::Result<bool> {
    let mut cfg = load_config(common.config_name(), "ceres-landing")?;
    apply_overrides(&mut cfg, common)?;
    if let Some(seed) = seed {
        match cfg.run_settings_mut() {
            Some(run) => run.seed = seed,
            None => bail!("--seed does not apply to {}", cfg.name()),
        }
    }
    let Resolved::Run { scenario, gain } = cfg.resolve()? else {
        bail!("{} is not a single-run scenario; use `rcbf portrait`", cfg.name());
    };
    report_gain(&gain);
    let (log, outcome) = sim::run_scenario(&scenario)?;
    let success = outcome.is_success(objective(&scenario));
    std::fs::create_dir_all(&common.out)?;
    let csv = common.out.join("trajectory.csv");
    let json = common.out.join("summary.json");
    sim::write_log_csv_file(&log, &csv)?;
    sim::write_summary_json(&json, &log.meta, &outcome, success, &cfg)?;
    println!("{}", describe(&outcome));
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(success)
}

fn sweep(common: &Common, seeds: Range<u64>) -> anyhow::Result<bool> {
    let mut cfg = load_config(common.config_name(), "ceres-landing")?;
    apply_overrides(&mut cfg, common)?;
    let hold = match cfg.run_settings_mut() {
        Some(run) => {
            run.policy = PolicyKind::Random;
            run.hold_interval
        }
        None => bail!("{} cannot be swept; use `rcbf portrait`", cfg.name()),
    };
    let Resolved::Run { scenario, gain } = cfg.resolve()? else {
        bail!("{} is not a single-run scenario", cfg.name());
    };
    report_gain(&gain);
    let report = sim::run_sweep(&scenario, seeds, hold)?;
    std::fs::create_dir_all(&common.out)?;
    let json = common.out.join("sweep.json");
    std::fs::write(&json, serde_json::to_string_pretty(&report)?)?;
    println!(
        "{}/{} successful ({:.1}%)",
        report.successes,
        report.total,
        100.0 * report.success_rate
    );
    if let (Some(tf), Some(hd)) = (&report.t_f, &report.terminal_h_dot) {
        println!("t_f {:.3}..{:.3} s, terminal h_dot {:.6}..{:.6}", tf.min, tf.max, hd.min, hd.max);
    }
    for r in report.runs.iter().filter(|r| !r.success) {
        match (&r.outcome, &r.error) {
            (Some(o), _) => println!("seed {}: {}", r.seed, describe(o)),
            (None, Some(e)) => println!("seed {}: error: {e}", r.seed),
            _ => {}
        }
    }
    println!("wrote {}", json.display());
    Ok(report.successes == report.total)
}

fn portrait(common: &Common) -> anyhow::Result<bool> {
    let mut cfg = load_config(common.config_name(), "phase-portrait")?;
    apply_overrides(&mut cfg, common)?;
    let Resolved::Portrait { settings, gain } = cfg.resolve()? else {
        bail!("{} is not a portrait config; use `rcbf run`", cfg.name());
    };
    report_gain(&gain);
    let p = sim::run_phase_portrait(&settings)?;
    let files = sim::write_portrait(&p, &common.out)?;
    let gamma1 = settings.tolerances.gamma1;
    let mut ok = true;
    let mut rows = Vec::new();
    for tr in &p.trajectories {
        let o = &tr.outcome;
        let mut good = o.peak_h1 <= SAFETY_TOL;
        if tr.region == StartRegion::Inside {
            good &= o.contact.is_some() && o.terminal_h_dot >= gamma1;
        }
        ok &= good;
        println!("{:>7} {:>11}: {}", tr.region.name(), tr.policy, describe(o));
        rows.push(serde_json::json!({
            "region": tr.region.name(),
            "policy": tr.policy,
            "passed": good,
            "outcome": o,
        }));
    }
    let json = common.out.join("portrait.json");
    let levels: Vec<f64> = p.level_sets.iter().map(|l| l.level).collect();
    let summary = serde_json::json!({
        "layer_width": p.spec.layer_width(),
        "levels": levels,
        "trajectories": rows,
        "config": cfg,
    });
    std::fs::write(&json, serde_json::to_string_pretty(&summary)?)?;
    println!("wrote {} files and {}", files.len(), json.display());
    Ok(ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RCBF_LOG_LEVEL", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { common, seed } => run(common, *seed),
        Command::Sweep { common, seeds } => sweep(common, seeds.clone()),
        Command::Portrait { common } => portrait(common),
        Command::Verify { samples } => {
            let checks = verify::run_suite(*samples);
            print!("{}", verify::format_table(&checks));
            Ok(checks.iter().all(|c| c.passed))
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
