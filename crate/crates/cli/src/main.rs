mod commands;
mod config;
mod failure;
mod store;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use posdiff::families::{FamilyKind, FamilySpec};
use posdiff::lame::A2Interpretation;

use crate::commands::Outcome;
use crate::config::{parse_list, parse_pair, parse_scalar, LameConfig, RunConfig};
use crate::failure::Failure;
use crate::store::{Record, ReportFile};

/// Verification campaigns for commuting difference operators.
#[derive(Parser, Debug)]
#[command(name = "posdiff", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the master identity, the four-term residual and commutation for a family.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Extract the spectral curve of a family's commuting pair.
    Curve {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        family: FamilyArgs,
        /// Base points for the kernel basis, e.g. `-1,0,1`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_list::<i64>)]
        base_points: Option<Vec<i64>>,
    },
    /// Build the odd-order partner and write it as operator JSON.
    Partner {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Continuum limit and step independence of the discrete Lamé operator.
    Lame {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        lame: LameArgs,
    },
    /// Check the rank-2 pair of orders 4 and 6.
    Rank2 {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// JSON file with the same fields as the report's `config`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Working precision in bits [env: POSDIFF_PRECISION, default 113].
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Index window `lo,hi`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair::<i64>)]
    window: Option<[i64; 2]>,
    /// Interval `lo,hi` for spectral-parameter nodes.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair::<f64>)]
    z_interval: Option<[f64; 2]>,
    /// Report directory.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Recompute and append even if a report for this configuration exists.
    #[arg(long)]
    rerun: bool,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// trig, poly, geom or elliptic.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    g: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    r1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Sign of `W` in the geometric family.
    #[arg(long, allow_hyphen_values = true)]
    w_sign: Option<String>,
    /// Curve coefficients of the elliptic family.
    #[arg(long, allow_hyphen_values = true)]
    c2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c0: Option<String>,
    /// Seed for the random `γ_n` of the elliptic family.
    #[arg(long)]
    gamma_seed: Option<String>,
}

#[derive(Args, Debug)]
struct LameArgs {
    #[arg(long)]
    g: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    g2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g3: Option<String>,
    /// Lattice steps, e.g. `0.1,0.05`.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// wrapped or scalar_weights.
    #[arg(long)]
    a2_interpretation: Option<String>,
    /// Lattice window `[0, span]` per step.
    #[arg(long)]
    span: Option<i64>,
}

impl RunArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(t) = self.tolerance {
            cfg.tolerance = t;
        }
        if let Some(w) = self.window {
            cfg.window = w;
        }
        if let Some(z) = self.z_interval {
            cfg.z_interval = z;
        }
        if let Some(o) = &self.output {
            cfg.output_path = o.clone();
        }
    }
}

impl FamilyArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), Failure> {
        let mut spec = match (&self.family, cfg.family.take()) {
            (Some(name), _) => FamilySpec::new(FamilyKind::parse(name)?, self.g.unwrap_or(1)),
            (None, Some(spec)) => spec,
            (None, None) => return Ok(()),
        };
        if let Some(g) = self.g {
            spec.g = g;
        }
        let params = [
            ("r1", &self.r1),
            ("a2", &self.a2),
            ("a1", &self.a1),
            ("a0", &self.a0),
            ("a", &self.a),
            ("beta", &self.beta),
            ("w_sign", &self.w_sign),
            ("c2", &self.c2),
            ("c1", &self.c1),
            ("c0", &self.c0),
            ("gamma_seed", &self.gamma_seed),
        ];
        for (name, text) in params {
            if let Some(text) = text {
                spec = spec.with(name, parse_scalar(name, text)?);
            }
        }
        cfg.family = Some(spec);
        Ok(())
    }
}

impl LameArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), Failure> {
        let mut lame: LameConfig = cfg.lame.take().unwrap_or_default();
        if let Some(g) = self.g {
            lame.g = g;
        }
        if let Some(t) = &self.g2 {
            lame.g2 = parse_scalar("g2", t)?;
        }
        if let Some(t) = &self.g3 {
            lame.g3 = parse_scalar("g3", t)?;
        }
        if let Some(t) = &self.eps {
            lame.eps = Some(t.split(',').map(|s| parse_scalar("eps", s.trim())).collect::<Result<_, _>>()?);
        }
        if let Some(t) = &self.x0 {
            lame.x0 = parse_scalar("x0", t)?;
        }
        if let Some(t) = &self.a2_interpretation {
            lame.a2_interpretation = A2Interpretation::parse(t)?;
        }
        if let Some(s) = self.span {
            lame.span = s;
        }
        cfg.lame = Some(lame);
        Ok(())
    }
}

type Runner = fn(&RunConfig) -> Result<Outcome, Failure>;

fn prepare(cli: &Cli) -> Result<(&'static str, RunConfig, Runner, bool), Failure> {
    let run = match &cli.command {
        Command::Verify { run, .. } | Command::Curve { run, .. } | Command::Partner { run, .. } | Command::Lame { run, .. } | Command::Rank2 { run } => run,
    };
    let mut cfg = config::load(run.config.as_deref(), run.precision)?;
    run.apply(&mut cfg);
    let (name, runner): (&'static str, Runner) = match &cli.command {
        Command::Verify { family, .. } => {
            family.apply(&mut cfg)?;
            ("verify", commands::verify)
        }
        Command::Curve { family, base_points, .. } => {
            family.apply(&mut cfg)?;
            if let Some(b) = base_points {
                cfg.base_points = b.clone();
            }
            ("curve", commands::curve)
        }
        Command::Partner { family, .. } => {
            family.apply(&mut cfg)?;
            ("partner", commands::partner)
        }
        Command::Lame { lame, .. } => {
            lame.apply(&mut cfg)?;
            ("lame", commands::lame)
        }
        Command::Rank2 { .. } => ("rank2", commands::rank2),
    };
    cfg.validate()?;
    Ok((name, cfg, runner, run.rerun))
}

fn execute(cli: &Cli) -> Result<bool, Failure> {
    let (name, cfg, runner, rerun) = prepare(cli)?;
    let file = ReportFile::locate(name, &cfg)?;
    if file.exists() && !rerun {
        let record = file.last()?;
        println!("{name} {}: {}", verdict(record.passed), record.summary);
        println!("report: {} (existing; --rerun to recompute)", file.path.display());
        return Ok(record.passed);
    }
    let outcome = match runner(&cfg) {
        Ok(o) => o,
        // a failed check is still a result worth keeping
        Err(Failure::Check(message)) => Outcome {
            passed: false,
            summary: message.clone(),
            result: serde_json::json!({ "error": message }),
            attachments: Vec::new(),
        },
        Err(usage) => return Err(usage),
    };
    let mut result = outcome.result;
    if !outcome.attachments.is_empty() {
        store::ensure_dir(file.path.parent())?;
        let mut names = Vec::new();
        for (suffix, contents) in &outcome.attachments {
            let path = file.sibling(suffix);
            std::fs::write(&path, contents)?;
            names.push(path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default());
        }
        if let Some(obj) = result.as_object_mut() {
            obj.insert("attachments".into(), serde_json::json!(names));
        }
    }
    let record = Record {
        command: name.to_string(),
        config: cfg,
        passed: outcome.passed,
        summary: outcome.summary,
        result,
    };
    file.append(&record)?;
    println!("{name} {}: {}", verdict(record.passed), record.summary);
    println!("report: {}", file.path.display());
    Ok(record.passed)
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("posdiff: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
