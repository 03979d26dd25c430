use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use bpwa::config::KeyValues;
use bpwa::era::{
    build_hankel, fmt_num, realization_to_json, realize, to_continuous, validate_roundtrip, ImpulseSequence,
    DEFAULT_DT, DEFAULT_HANKEL, DEFAULT_ORDER,
};
use bpwa::mms::branch_sweep;
use bpwa::report::{build_design_map, power_map, write_branch_csv, Manifest, RunConfig};
use bpwa::simulator::{basin_map, frequency_sweep, steady_response, write_strobe_csv, write_trajectory_csv, FullState};
use bpwa::{bifurcation, Error, Result};

#[derive(Parser)]
#[command(name = "bpwa", version, about = "Bi-stable point wave absorber analysis")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key=value configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Extra KEY=VALUE overrides, repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, global = true)]
    gamma: Option<String>,
    #[arg(long, global = true)]
    delta1: Option<String>,
    #[arg(long, global = true)]
    delta2: Option<String>,
    #[arg(long = "omega-n", global = true)]
    omega_n: Option<String>,
    #[arg(long, global = true)]
    theta: Option<String>,
    #[arg(long = "force-ratio", global = true)]
    force_ratio: Option<String>,
    /// Wave amplitude ratio A/R: a value or start..end:step.
    #[arg(long, global = true)]
    amp: Option<String>,
    /// Frequency: a value or start..end:step.
    #[arg(long, global = true)]
    omega: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the radiation kernel.
    Kernel {
        #[arg(long = "t-end")]
        t_end: Option<String>,
        #[arg(long)]
        dt: Option<String>,
    },
    /// Identify a state-space radiation model from impulse samples.
    Era {
        /// `t,hbar` CSV; regenerated from the damping curve when absent.
        #[arg(long)]
        impulse: Option<PathBuf>,
        #[arg(long)]
        order: Option<String>,
        #[arg(long)]
        dt: Option<String>,
        #[arg(long)]
        hankel: Option<String>,
    },
    /// Multiple-scales steady states over frequency.
    Branches,
    /// Bifurcation loci over the (A/R, W) grid.
    Loci {
        #[arg(long = "harmonic-scale")]
        harmonic_scale: Option<String>,
    },
    /// Stroboscopic frequency sweep.
    Sweep {
        #[arg(long)]
        policy: Option<String>,
        /// Also write the steady trajectory (single frequency only).
        #[arg(long)]
        trajectory: bool,
    },
    /// Basins of attraction over initial displacement and velocity.
    Basins {
        #[arg(long = "y-range", allow_hyphen_values = true)]
        y_range: Option<String>,
        #[arg(long = "ydot-range", allow_hyphen_values = true)]
        ydot_range: Option<String>,
    },
    /// Region map with loci and critical amplitudes.
    DesignMap {
        /// Fraction of cells checked by simulation.
        #[arg(long)]
        verify: Option<String>,
        #[arg(long = "harmonic-scale")]
        harmonic_scale: Option<String>,
    },
    /// Simulated mean power over the (A/R, W) grid.
    PowerMap,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Kernel { .. } => "kernel",
            Command::Era { .. } => "era",
            Command::Branches => "branches",
            Command::Loci { .. } => "loci",
            Command::Sweep { .. } => "sweep",
            Command::Basins { .. } => "basins",
            Command::DesignMap { .. } => "design-map",
            Command::PowerMap => "power-map",
        }
    }

    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        let mut put = |k: &'static str, x: &Option<String>| {
            if let Some(x) = x {
                v.push((k, x.clone()));
            }
        };
        match self {
            Command::Kernel { t_end, dt } => {
                put("t_end", t_end);
                put("dt", dt);
            }
            Command::Era { impulse, order, dt, hankel } => {
                put("impulse", &impulse.as_ref().map(|p| p.display().to_string()));
                put("order", order);
                put("dt", dt);
                put("hankel", hankel);
            }
            Command::Loci { harmonic_scale } => put("harmonic_scale", harmonic_scale),
            Command::Sweep { policy, trajectory } => {
                put("policy", policy);
                put("trajectory", &trajectory.then(|| "true".to_string()));
            }
            Command::Basins { y_range, ydot_range } => {
                put("y_range", y_range);
                put("ydot_range", ydot_range);
            }
            Command::DesignMap { verify, harmonic_scale } => {
                put("verify", verify);
                put("harmonic_scale", harmonic_scale);
            }
            Command::Branches | Command::PowerMap => {}
        }
        v
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let c = &cli.common;
    let mut kv = match &c.config {
        Some(path) => KeyValues::from_file(path)
            .map_err(|e| Error::InvalidInput(format!("config {}: {e}", path.display())))?,
        None => KeyValues::default(),
    };
    for (k, v) in [
        ("gamma", &c.gamma),
        ("delta1", &c.delta1),
        ("delta2", &c.delta2),
        ("omega_n", &c.omega_n),
        ("theta", &c.theta),
        ("force_ratio", &c.force_ratio),
        ("amp", &c.amp),
        ("omega", &c.omega),
    ] {
        if let Some(v) = v {
            kv.set(k, v.clone());
        }
    }
    for (k, v) in cli.command.overrides() {
        kv.set(k, v);
    }
    for s in &c.set {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("--set expects KEY=VALUE, got {s:?}")))?;
        kv.set(k.trim(), v.trim());
    }
    RunConfig::from_key_values(&kv)
}

fn usize_key(cfg: &RunConfig, key: &str, default: usize) -> Result<usize> {
    match cfg.values.get(key) {
        None => Ok(default),
        Some(s) => s
            .parse()
            .map_err(|_| Error::Parse(format!("{key}: expected a positive integer, got {s:?}"))),
    }
}

fn f64_key(cfg: &RunConfig, key: &str, default: f64) -> Result<f64> {
    let v = cfg.values.f64(key)?.unwrap_or(default);
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidInput(format!("{key} must be positive, got {v}")));
    }
    Ok(v)
}

struct Run<'a> {
    cfg: &'a RunConfig,
    dir: &'a Path,
    manifest: Manifest,
    clock: Instant,
}

impl Run<'_> {
    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        self.manifest.artifacts.push(name.to_string());
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    fn lap(&mut self, phase: &str) {
        let t = self.clock.elapsed().as_secs_f64();
        log::info!("{phase}: {t:.3} s");
        self.manifest.timings.insert(phase.to_string(), t);
        self.clock = Instant::now();
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.manifest.notes.insert(key.to_string(), value.to_string());
    }
}

fn kernel(run: &mut Run) -> Result<()> {
    let t_end = f64_key(run.cfg, "t_end", 20.0)?;
    let dt = f64_key(run.cfg, "dt", 0.05)?;
    let n = (t_end / dt).round() as usize + 1;
    let realization = bpwa::RadiationRealization::hemisphere();
    let seq = ImpulseSequence::from_kernel(&realization.kernel, dt, n);
    run.create("kernel.csv")?.write_all(seq.to_csv().as_bytes())?;
    run.note("state_space_max_gap", fmt_num(realization.kernel_gap(t_end, dt)));
    run.lap("kernel");
    Ok(())
}

fn era(run: &mut Run) -> Result<()> {
    let order = usize_key(run.cfg, "order", DEFAULT_ORDER)?;
    let hankel = usize_key(run.cfg, "hankel", DEFAULT_HANKEL)?;
    let seq = match run.cfg.values.get("impulse") {
        Some(path) => ImpulseSequence::read_csv(Path::new(path))?,
        None => {
            let dt = f64_key(run.cfg, "dt", DEFAULT_DT)?;
            ImpulseSequence::from_damping_curve(&bpwa::hydro::KernelConstants::HEMISPHERE, dt, 2 * hankel + 2)
        }
    };
    let pair = build_hankel(&seq, hankel, hankel)?;
    let discrete = realize(&pair, order)?;
    let continuous = to_continuous(&discrete, seq.dt)?;
    let report = validate_roundtrip(&continuous, &seq);
    let json = realization_to_json(&continuous, seq.dt)?;
    writeln!(run.create("realization.json")?, "{json}")?;
    run.note("reconstruction_max_abs_error", fmt_num(report.max_abs_error));
    run.note(
        "eigenvalues",
        report
            .eigenvalues
            .iter()
            .map(|z| format!("{}{:+}i", fmt_num(z.re), z.im))
            .collect::<Vec<_>>()
            .join(" "),
    );
    run.lap("era");
    Ok(())
}

fn branches(run: &mut Run) -> Result<()> {
    let amp = run.cfg.amplitude()?;
    let rows = branch_sweep(&run.cfg.params, &run.cfg.geometry, amp, &run.cfg.omegas.values())?;
    write_branch_csv(run.create("branches.csv")?, &rows)?;
    run.lap("branches");
    Ok(())
}

fn loci(run: &mut Run) -> Result<()> {
    let (p, omegas, amps) = (&run.cfg.params, run.cfg.omegas.values(), run.cfg.amplitudes.values());
    let cf1 = bifurcation::cf1_locus(p, &omegas)?;
    let (cf2, cf3) = bifurcation::cf_intrawell_locus(p, &omegas)?;
    let pd = bifurcation::pd_locus(p, &omegas)?;
    let (sb1, sb2) = bifurcation::sb_locus(p, &omegas, &amps, run.cfg.harmonic_scale)?;
    bifurcation::write_loci_csv(run.create("loci.csv")?, &[cf1, cf2, cf3, pd, sb1, sb2])?;
    run.lap("loci");
    Ok(())
}

fn sweep(run: &mut Run) -> Result<()> {
    let cfg = run.cfg;
    let amp = cfg.amplitude()?;
    let omegas = cfg.omegas.values();
    let rows = frequency_sweep(&cfg.params, amp, &omegas, cfg.policy, &cfg.sim)?;
    write_strobe_csv(run.create("strobe.csv")?, &rows)?;
    let mut labels = run.create("labels.csv")?;
    writeln!(labels, "Omega,label,clusters,P_avg")?;
    for r in &rows {
        let label = r.label.map_or("diverged".to_string(), |l| l.to_string());
        writeln!(labels, "{},{},{},{}", fmt_num(r.omega), label, r.clusters, fmt_num(r.p_avg))?;
    }
    labels.flush()?;
    run.note("policy", cfg.policy.label());
    run.lap("sweep");
    if cfg.values.get("trajectory") == Some("true") {
        let w = cfg.omega()?;
        let g = cfg.params.g_wave(amp, w)?;
        let traj = steady_response(&cfg.params, w, g, &FullState::default(), &cfg.sim)?;
        write_trajectory_csv(run.create("trajectory.csv")?, &traj)?;
        run.lap("trajectory");
    }
    Ok(())
}

fn basins(run: &mut Run) -> Result<()> {
    let cfg = run.cfg;
    let (amp, w) = (cfg.amplitude()?, cfg.omega()?);
    let g = cfg.params.g_wave(amp, w)?;
    let map = basin_map(&cfg.params, w, g, &cfg.y_range.values(), &cfg.ydot_range.values(), &cfg.sim)?;
    map.write_csv(run.create("basins.csv")?)?;
    run.note(
        "labels",
        map.distinct().iter().map(|l| l.code().to_string()).collect::<Vec<_>>().join(" "),
    );
    run.lap("basins");
    Ok(())
}

fn design_map(run: &mut Run) -> Result<()> {
    let map = build_design_map(run.cfg)?;
    map.write_csv(run.create("design_map.csv")?)?;
    bifurcation::write_loci_csv(run.create("loci.csv")?, &map.loci)?;
    let c = &map.critical;
    let opt = |v: Option<f64>| v.map_or("absent".to_string(), fmt_num);
    run.note("cr1", opt(c.cr1));
    run.note("cr2", opt(c.cr2));
    run.note("cr3", opt(c.cr3));
    if !c.diagnostics.is_empty() {
        run.note("critical_diagnostics", c.diagnostics.join("; "));
    }
    run.note("bl_onset", opt(map.bl_onset()));
    if map.verification.checked > 0 {
        run.note(
            "verification",
            format!("{}/{} cells agree", map.verification.agreed, map.verification.checked),
        );
    }
    run.lap("design-map");
    Ok(())
}

fn power(run: &mut Run) -> Result<()> {
    let map = power_map(run.cfg)?;
    map.write_csv(run.create("power_map.csv")?)?;
    let missing = map.power.iter().flatten().filter(|p| p.is_nan()).count();
    run.note("missing_cells", missing);
    run.lap("power-map");
    Ok(())
}

fn execute(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    fs::create_dir_all(&cli.common.out)?;
    let mut run = Run {
        cfg: &cfg,
        dir: &cli.common.out,
        manifest: Manifest::new(cli.command.name(), &cfg),
        clock: Instant::now(),
    };
    match cli.command {
        Command::Kernel { .. } => kernel(&mut run)?,
        Command::Era { .. } => era(&mut run)?,
        Command::Branches => branches(&mut run)?,
        Command::Loci { .. } => loci(&mut run)?,
        Command::Sweep { .. } => sweep(&mut run)?,
        Command::Basins { .. } => basins(&mut run)?,
        Command::DesignMap { .. } => design_map(&mut run)?,
        Command::PowerMap => power(&mut run)?,
    }
    run.manifest.write(run.dir)
}

fn threads_from_env() -> std::result::Result<(), String> {
    let Ok(s) = std::env::var("BPWA_THREADS") else {
        return Ok(());
    };
    let n: usize = s
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("BPWA_THREADS must be a positive integer, got {s:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(msg) = threads_from_env() {
        log::error!("{msg}");
        return ExitCode::from(2);
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{} failed: {e}", cli.command.name());
            let usage = matches!(
                e,
                Error::InvalidInput(_) | Error::Parse(_) | Error::NotBistable { .. } | Error::ZeroAmplitude
            );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
