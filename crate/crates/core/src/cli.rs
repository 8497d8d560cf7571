//! Command-line orchestration: sequence selection, scans, solves, and
//! artifact emission. Kept separate from `main` so the integration tests
//! can drive it directly.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::noise::NoiseParams;
use crate::scan::{self, GridSpec};
use crate::sequences::{self, Sequence};
use crate::solver::{self, ExpansionPoint, SolveProblem, Template};
use crate::svg;
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "cpseq", about = "Composite pulse sequence toolkit", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// 1D excitation profile over a Rabi-error grid.
    Profile(ScanArgs),
    /// 2D excitation profile over (Rabi error, detuning).
    Scan2d(ScanArgs),
    /// Re-derive composite phases by derivative cancellation.
    Solve(SolveArgs),
    /// List available families and universal labels.
    List,
    /// Export a sequence as a JSON document.
    ExportSeq(ScanArgs),
}

#[derive(Debug, Args, Default, Clone)]
pub struct ScanArgs {
    /// Recipe file (TOML); explicit flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sequence family: bb, nb, pb-bn, pb-nb, universal, theta-bb,
    /// theta-nb, theta-pb, single.
    #[arg(long)]
    pub family: Option<String>,
    /// Number of pulses (outer N for nested families; half length for
    /// theta-pb).
    #[arg(long)]
    pub n: Option<usize>,
    /// Inner N for nested passband families.
    #[arg(long)]
    pub inner_n: Option<usize>,
    /// Target probability for theta families.
    #[arg(long)]
    pub p: Option<f64>,
    /// Universal sequence label, e.g. U13a.
    #[arg(long)]
    pub label: Option<String>,
    /// 1D grid as min:max:points.
    #[arg(long)]
    pub grid: Option<String>,
    /// 2D grid as eps_min:eps_max:points:delta_min:delta_max:points.
    #[arg(long)]
    pub grid2d: Option<String>,
    /// Noise model: off, default, or file=PATH.
    #[arg(long)]
    pub noise: Option<String>,
    /// Refinement mode; only "center" is supported.
    #[arg(long)]
    pub refine: Option<String>,
    /// Output path; stdout when omitted. Multi-sequence CSV output expands
    /// a {label} placeholder (appended before the extension if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format: csv, json, or svg.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args, Clone)]
pub struct SolveArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Area template: pi or aba.
    #[arg(long)]
    pub template: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Target probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// Expansion point: zero-error or zero-field.
    #[arg(long)]
    pub expansion: Option<String>,
    /// Number of residual conditions including the value condition.
    #[arg(long)]
    pub conditions: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Recipe file contents. Every field can be overridden by a flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub format: Option<String>,
    pub out: Option<String>,
    pub grid: Option<String>,
    pub grid2d: Option<String>,
    pub noise: Option<String>,
    pub refine: Option<String>,
    pub seed: Option<u64>,
    pub sequences: Option<Vec<String>>,
    #[serde(default)]
    pub panel: Vec<PanelConfig>,
    pub template: Option<String>,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub expansion: Option<String>,
    pub conditions: Option<usize>,
    pub restarts: Option<usize>,
}

#[derive(Debug, Deserialize)]
pub struct PanelConfig {
    pub title: Option<String>,
    pub sequences: Vec<String>,
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)?;
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))
        }
    }
}

/// Parse a sequence selector like "bb:5", "pb-bn:3:15", "universal:U13a",
/// "theta-bb:4:0.5", or "single".
pub fn parse_selector(sel: &str) -> Result<Sequence> {
    let parts: Vec<&str> = sel.split(':').collect();
    let usage = |m: String| Err(Error::Usage(m));
    let want = |k: usize| -> Result<()> {
        if parts.len() != k + 1 {
            return Err(Error::Usage(format!(
                "selector {sel:?}: expected {k} argument(s) after the family"
            )));
        }
        Ok(())
    };
    let num = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::Usage(format!("selector {sel:?}: bad integer {s:?}")))
    };
    let prob = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::Usage(format!("selector {sel:?}: bad probability {s:?}")))
    };
    match parts[0] {
        "single" => {
            want(0)?;
            Ok(sequences::single_pi())
        }
        "bb" => {
            want(1)?;
            sequences::bb(num(parts[1])?)
        }
        "nb" => {
            want(1)?;
            sequences::nb(num(parts[1])?)
        }
        "pb-bn" => {
            want(2)?;
            sequences::pb_b_of_n(num(parts[1])?, num(parts[2])?)
        }
        "pb-nb" => {
            want(2)?;
            sequences::pb_n_of_b(num(parts[1])?, num(parts[2])?)
        }
        "universal" | "u" => {
            want(1)?;
            sequences::universal(parts[1])
        }
        "theta-bb" => {
            want(2)?;
            sequences::theta_bb(num(parts[1])?, prob(parts[2])?)
        }
        "theta-nb" => {
            want(2)?;
            sequences::theta_nb(num(parts[1])?, prob(parts[2])?)
        }
        "theta-pb" => {
            want(2)?;
            sequences::theta_pb(num(parts[1])?, prob(parts[2])?)
        }
        other => usage(format!("unknown family {other:?}")),
    }
}

fn selector_from_flags(args: &ScanArgs) -> Result<Option<String>> {
    if let Some(label) = &args.label {
        return Ok(Some(format!("universal:{label}")));
    }
    let Some(family) = &args.family else {
        return Ok(None);
    };
    let sel = match family.as_str() {
        "single" => "single".to_string(),
        "bb" | "nb" => format!("{family}:{}", req(args.n, "--n")?),
        "pb-bn" | "pb-nb" => format!(
            "{family}:{}:{}",
            req(args.n, "--n")?,
            req(args.inner_n, "--inner-n")?
        ),
        "universal" => format!(
            "universal:{}",
            args.label
                .clone()
                .ok_or_else(|| Error::Usage("--label required for universal".into()))?
        ),
        "theta-bb" | "theta-nb" | "theta-pb" => {
            format!("{family}:{}:{}", req(args.n, "--n")?, req(args.p, "--p")?)
        }
        other => return Err(Error::Usage(format!("unknown family {other:?}"))),
    };
    Ok(Some(sel))
}

fn req<T: Copy + std::fmt::Display>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Usage(format!("{flag} is required for this family")))
}

fn parse_grid_1d(s: &str) -> Result<GridSpec> {
    let p: Vec<&str> = s.split(':').collect();
    if p.len() != 3 {
        return Err(Error::Usage(format!("grid {s:?}: expected min:max:points")));
    }
    let f = |x: &str| -> Result<f64> {
        x.parse()
            .map_err(|_| Error::Usage(format!("grid {s:?}: bad number {x:?}")))
    };
    let pts: usize = p[2]
        .parse()
        .map_err(|_| Error::Usage(format!("grid {s:?}: bad point count")))?;
    Ok(GridSpec::one_d(f(p[0])?, f(p[1])?, pts))
}

fn parse_grid_2d(s: &str) -> Result<GridSpec> {
    let p: Vec<&str> = s.split(':').collect();
    if p.len() != 6 {
        return Err(Error::Usage(format!(
            "grid2d {s:?}: expected emin:emax:epts:dmin:dmax:dpts"
        )));
    }
    let f = |x: &str| -> Result<f64> {
        x.parse()
            .map_err(|_| Error::Usage(format!("grid2d {s:?}: bad number {x:?}")))
    };
    let n = |x: &str| -> Result<usize> {
        x.parse()
            .map_err(|_| Error::Usage(format!("grid2d {s:?}: bad point count {x:?}")))
    };
    Ok(GridSpec {
        eps_min: f(p[0])?,
        eps_max: f(p[1])?,
        eps_points: n(p[2])?,
        delta_min: f(p[3])?,
        delta_max: f(p[4])?,
        delta_points: n(p[5])?,
    })
}

fn parse_noise(s: &str) -> Result<Option<NoiseParams>> {
    match s {
        "off" => Ok(None),
        "default" => Ok(Some(NoiseParams::default())),
        other => {
            let Some(path) = other.strip_prefix("file=") else {
                return Err(Error::Usage(format!(
                    "noise {other:?}: expected off, default, or file=PATH"
                )));
            };
            let text = fs::read_to_string(path)?;
            let params: NoiseParams = if path.ends_with(".json") {
                serde_json::from_str(&text)?
            } else {
                toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
            };
            params.validate()?;
            Ok(Some(params))
        }
    }
}

fn write_artifact(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    fs::create_dir_all(dir)?;
                }
            }
            fs::write(path, content)?;
            Ok(())
        }
    }
}

fn slug(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' {
                c
            } else {
                '-'
            }
        })
        .collect::<String>()
        .trim_matches('-')
        .to_string()
}

fn per_sequence_path(out: &Path, label: &str, many: bool) -> PathBuf {
    if !many {
        return out.to_path_buf();
    }
    let s = out.to_string_lossy();
    if s.contains("{label}") {
        return PathBuf::from(s.replace("{label}", &slug(label)));
    }
    let ext = out.extension().map(|e| e.to_string_lossy().to_string());
    let stem = out.with_extension("");
    match ext {
        Some(e) => PathBuf::from(format!("{}_{}.{e}", stem.to_string_lossy(), slug(label))),
        None => PathBuf::from(format!("{}_{}", stem.to_string_lossy(), slug(label))),
    }
}

/// Panels resolved from config and flags: flag selectors form a single
/// panel and take precedence.
fn resolve_panels(args: &ScanArgs, cfg: &RunConfig) -> Result<Vec<(String, Vec<Sequence>)>> {
    if let Some(sel) = selector_from_flags(args)? {
        let seq = parse_selector(&sel)?;
        return Ok(vec![(seq.label.clone(), vec![seq])]);
    }
    let mut panels = Vec::new();
    if let Some(seqs) = &cfg.sequences {
        let parsed = seqs
            .iter()
            .map(|s| parse_selector(s))
            .collect::<Result<Vec<_>>>()?;
        panels.push((String::new(), parsed));
    }
    for p in &cfg.panel {
        let parsed = p
            .sequences
            .iter()
            .map(|s| parse_selector(s))
            .collect::<Result<Vec<_>>>()?;
        panels.push((p.title.clone().unwrap_or_default(), parsed));
    }
    if panels.is_empty() {
        return Err(Error::Usage(
            "no sequence selected; pass --family/--label or a config with sequences".into(),
        ));
    }
    Ok(panels)
}

fn records_to_json(records: &[scan::ProfileRecord]) -> String {
    serde_json::to_string(records).expect("records serialize")
}

/// Run a resolved command. Returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::List => {
            println!("families: bb nb pb-bn pb-nb universal theta-bb theta-nb theta-pb single");
            println!(
                "universal labels: {}",
                sequences::universal_labels().join(" ")
            );
            println!("theta targets: 0.1 .. 0.9 (step 0.1)");
            println!("theta-bb lengths: 2 3 4 5 6");
            println!("theta-nb lengths: 2 4 6 8");
            println!("theta-pb half lengths: 2 4 6 8 (sequence is twice as long)");
            Ok(0)
        }
        Command::Profile(args) => run_profile(args),
        Command::Scan2d(args) => run_scan2d(args),
        Command::ExportSeq(args) => run_export(args),
        Command::Solve(args) => run_solve(args),
    }
}

fn run_profile(args: ScanArgs) -> Result<i32> {
    let cfg = load_config(args.config.as_deref())?;
    let panels = resolve_panels(&args, &cfg)?;
    let grid = match args.grid.as_deref().or(cfg.grid.as_deref()) {
        Some(g) => parse_grid_1d(g)?,
        None => GridSpec::default_1d(),
    };
    let noise = parse_noise(
        args.noise
            .as_deref()
            .or(cfg.noise.as_deref())
            .unwrap_or("off"),
    )?;
    let refine = args.refine.as_deref().or(cfg.refine.as_deref());
    let refine_center = match refine {
        None | Some("") => false,
        Some("center") => true,
        Some(other) => return Err(Error::Usage(format!("unknown refine mode {other:?}"))),
    };
    let format = args
        .format
        .as_deref()
        .or(cfg.format.as_deref())
        .unwrap_or("csv");
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from));

    let scan_one = |seq: &Sequence| -> Result<Vec<scan::ProfileRecord>> {
        if refine_center {
            scan::scan_1d_refined(seq, &grid, noise.as_ref())
        } else {
            scan::scan_1d_noisy(seq, &grid, noise.as_ref())
        }
    };

    match format {
        "svg" => {
            let mut svg_panels = Vec::new();
            for (title, seqs) in &panels {
                let mut series = Vec::new();
                for seq in seqs {
                    series.push(svg::Series {
                        label: seq.label.clone(),
                        records: scan_one(seq)?,
                        use_noisy: noise.is_some(),
                    });
                }
                svg_panels.push(svg::Panel {
                    title: title.clone(),
                    series,
                });
            }
            write_artifact(out.as_deref(), &svg::emit_svg(&svg_panels)?)?;
        }
        "csv" | "json" => {
            let seqs: Vec<&Sequence> = panels.iter().flat_map(|(_, s)| s.iter()).collect();
            let many = seqs.len() > 1;
            for seq in seqs {
                let records = scan_one(seq)?;
                let content = if format == "csv" {
                    scan::to_csv(&records)
                } else {
                    records_to_json(&records)
                };
                let path = out
                    .as_deref()
                    .map(|o| per_sequence_path(o, &seq.label, many));
                write_artifact(path.as_deref(), &content)?;
            }
        }
        other => return Err(Error::Usage(format!("unknown format {other:?}"))),
    }
    Ok(0)
}

fn run_scan2d(args: ScanArgs) -> Result<i32> {
    let cfg = load_config(args.config.as_deref())?;
    let panels = resolve_panels(&args, &cfg)?;
    let grid = match args.grid2d.as_deref().or(cfg.grid2d.as_deref()) {
        Some(g) => parse_grid_2d(g)?,
        None => GridSpec::default_2d(),
    };
    let noise = parse_noise(
        args.noise
            .as_deref()
            .or(cfg.noise.as_deref())
            .unwrap_or("off"),
    )?;
    let format = args
        .format
        .as_deref()
        .or(cfg.format.as_deref())
        .unwrap_or("csv");
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from));

    let seqs: Vec<&Sequence> = panels.iter().flat_map(|(_, s)| s.iter()).collect();
    let many = seqs.len() > 1;
    for seq in seqs {
        let records = scan::scan_2d_noisy(seq, &grid, noise.as_ref())?;
        let content = match format {
            "csv" => scan::to_csv(&records),
            "json" => records_to_json(&records),
            "svg" => {
                svg::emit_svg_heatmap(&records, grid.eps_points, grid.delta_points, &seq.label)?
            }
            other => return Err(Error::Usage(format!("unknown format {other:?}"))),
        };
        let path = out
            .as_deref()
            .map(|o| per_sequence_path(o, &seq.label, many));
        write_artifact(path.as_deref(), &content)?;
    }
    Ok(0)
}

fn run_export(args: ScanArgs) -> Result<i32> {
    let cfg = load_config(args.config.as_deref())?;
    let panels = resolve_panels(&args, &cfg)?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from));
    let seqs: Vec<&Sequence> = panels.iter().flat_map(|(_, s)| s.iter()).collect();
    let many = seqs.len() > 1;
    for seq in seqs {
        let path = out
            .as_deref()
            .map(|o| per_sequence_path(o, &seq.label, many));
        let mut doc = seq.to_json();
        doc.push('\n');
        write_artifact(path.as_deref(), &doc)?;
    }
    Ok(0)
}

fn run_solve(args: SolveArgs) -> Result<i32> {
    let cfg = load_config(args.config.as_deref())?;
    let template = match args
        .template
        .as_deref()
        .or(cfg.template.as_deref())
        .unwrap_or("aba")
    {
        "pi" => Template::PiOnly,
        "aba" => Template::ThetaAba,
        other => return Err(Error::Usage(format!("unknown template {other:?}"))),
    };
    let expansion = match args
        .expansion
        .as_deref()
        .or(cfg.expansion.as_deref())
        .unwrap_or("zero-error")
    {
        "zero-error" => ExpansionPoint::AtZeroError,
        "zero-field" => ExpansionPoint::AtZeroField,
        other => return Err(Error::Usage(format!("unknown expansion point {other:?}"))),
    };
    let n_pulses = args
        .n
        .or(cfg.n)
        .ok_or_else(|| Error::Usage("--n is required".into()))?;
    let target_p = args.p.or(cfg.p).unwrap_or(1.0);
    // finite-difference noise limits usable derivative orders, so the
    // defaults cap below the free-phase count for long sequences
    let default_conditions = match expansion {
        ExpansionPoint::AtZeroError => (n_pulses - 1).min(4),
        // odd total: value condition plus Re/Im pairs
        ExpansionPoint::AtZeroField => {
            let odd = if (n_pulses - 1) % 2 == 1 {
                n_pulses - 1
            } else {
                n_pulses - 2
            };
            odd.min(5)
        }
    };
    let n_conditions = args
        .conditions
        .or(cfg.conditions)
        .unwrap_or(default_conditions);
    let problem = SolveProblem {
        template,
        n_pulses,
        target_p,
        expansion_point: expansion,
        n_conditions,
    };
    let restarts = args
        .restarts
        .or(cfg.restarts)
        .unwrap_or(solver::DEFAULT_RESTARTS);
    let seed = args.seed.or(cfg.seed).unwrap_or(0);

    let result = solver::solve(&problem, restarts, seed)?;
    let report = solver::SolveReport::new(problem, restarts, seed, &result);
    let mut doc = serde_json::to_string_pretty(&report)?;
    doc.push('\n');
    write_artifact(args.out.as_deref(), &doc)?;
    Ok(if result.converged { 0 } else { 3 })
}

/// Map an error to the documented exit code: 2 for usage errors, 1 for
/// anything else.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_)
        | Error::UnknownLabel { .. }
        | Error::MissingTableRow { .. }
        | Error::InvalidSequenceLength { .. }
        | Error::InvalidGrid(_)
        | Error::Config(_)
        | Error::InvalidProblem(_) => 2,
        _ => 1,
    }
}
