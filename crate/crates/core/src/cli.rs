//! The `vertalign` command line: argument parsing and subcommand dispatch.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 infeasible (or a
//! solution file that fails validation), 3 time or iteration limit hit.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CrossSectionSet, FitMode};
use crate::io::{
    apply_profile, load_cross_sections, load_network, load_profile, load_solution, save_cross_sections,
    save_network, summary_text, write_profile, write_profile_svg, write_report, write_solution,
    InstanceSummary, Report, SolutionFile,
};
use crate::model::{build_cuva, build_uva, validate_solution, FitSet, ModelInstance, SlabSet};
use crate::network::RoadNetwork;
use crate::oracle::{compare_models, write_comparison_csv, Variant};
use crate::solver::{export_mps, solve, SolverOptions, Status};
use crate::synth::{generate, SectionShape, SynthSpec, Terrain};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

/// Residual tolerance used by `solve` reports and `validate`.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "vertalign", version, about = "Road vertical alignment and earthwork optimizer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit volume models to the cross-section tables and report R².
    Fit(FitArgs),
    /// Assemble a model and print its size.
    Build(ModelArgs),
    /// Build, solve and write the report, solution and optional plot.
    Solve(SolveArgs),
    /// Check a solution file against the rebuilt model.
    Validate(ValidateArgs),
    /// Write the model in MPS format.
    Export(ModelArgs),
    /// Time several model variants on one network.
    Compare(CompareArgs),
    /// Write a synthetic network, ground profile and cross-sections.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Uva,
    Cuva,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Network document (TOML).
    #[arg(long)]
    pub network: PathBuf,
    /// Ground profile CSV overriding the section elevations.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Cross-section tables (CSV).
    #[arg(long)]
    pub sections: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "auto")]
    pub fit: FitMode,
    /// Directory for fits.json; the table goes to stdout either way.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "cuva")]
    pub model: ModelChoice,
    /// Slabs per side of every section (UVA).
    #[arg(long, default_value_t = 10)]
    pub slabs: usize,
    /// Volume fit family (CUVA).
    #[arg(long, default_value = "auto")]
    pub fit: FitMode,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Recorded in the run manifest.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write profile.svg.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Solution file written by `solve`.
    #[arg(long)]
    pub solution: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated variants: uva, cuva, angle. The first is the baseline.
    #[arg(long, default_value = "uva,cuva", value_delimiter = ',')]
    pub models: Vec<String>,
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    #[arg(long, default_value_t = 10)]
    pub slabs: usize,
    #[arg(long, default_value = "auto")]
    pub fit: FitMode,
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Directory for comparison.csv; without it the CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub roads: usize,
    #[arg(long, default_value_t = 0)]
    pub intersections: usize,
    /// Sections per road.
    #[arg(long, default_value_t = 6)]
    pub stations: usize,
    #[arg(long, default_value_t = 2)]
    pub segment_size: usize,
    #[arg(long, default_value_t = 20.0)]
    pub spacing: f64,
    #[arg(long, default_value_t = 1)]
    pub materials: usize,
    /// flat, ramp, steep, sinusoidal or noisy.
    #[arg(long, default_value = "flat")]
    pub terrain: Terrain,
    /// rectangular, trapezoid, noisy-trapezoid, concave or irregular.
    #[arg(long, default_value = "trapezoid")]
    pub shape: SectionShape,
    #[arg(long, default_value_t = 2.0)]
    pub offset_bound: f64,
    #[arg(long)]
    pub no_pits: bool,
}

/// Everything needed to repeat a `solve` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub network: PathBuf,
    pub profile: Option<PathBuf>,
    pub sections: PathBuf,
    pub model: ModelChoice,
    pub slabs: usize,
    pub fit: FitMode,
    pub time_limit: Option<f64>,
    pub out: PathBuf,
    pub seed: u64,
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code. Usage errors go to stderr.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn run(command: &Command) -> Result<i32> {
    match command {
        Command::Fit(a) => fit(a),
        Command::Build(a) => build(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Validate(a) => validate(a),
        Command::Export(a) => export(a),
        Command::Compare(a) => compare(a),
        Command::Gen(a) => gen(a),
    }
}

pub fn status_code(status: Status) -> i32 {
    match status {
        Status::Optimal => EXIT_OK,
        Status::Infeasible | Status::Unbounded => EXIT_INFEASIBLE,
        Status::LimitHit => EXIT_LIMIT,
    }
}

fn load_inputs(a: &InputArgs) -> Result<(RoadNetwork, CrossSectionSet)> {
    let mut net = load_network(&a.network)?;
    if let Some(p) = &a.profile {
        apply_profile(&mut net, &load_profile(p)?)?;
    }
    let tables = load_cross_sections(&a.sections, &net)?;
    if tables.is_empty() {
        return Err(Error::parse(&a.sections, "no cross-section rows"));
    }
    Ok((net, tables))
}

fn build_model(a: &ModelArgs, net: &RoadNetwork, tables: &CrossSectionSet) -> Result<ModelInstance> {
    match a.model {
        ModelChoice::Uva => build_uva(net, tables, &SlabSet::build(net, tables, (a.slabs, a.slabs))?),
        ModelChoice::Cuva => build_cuva(net, tables, &FitSet::build(net, tables, a.fit)?),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Emission(format!("{}: {e}", path.display())))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn fit(a: &FitArgs) -> Result<i32> {
    let (net, tables) = load_inputs(&a.input)?;
    let fits = FitSet::build(&net, &tables, a.fit)?;
    let mut out = String::from("owner\tmaterial\tside\tkind\tcoefficients\tr_squared\n");
    for e in &fits.entries {
        for f in [&e.cut, &e.fill] {
            let chi: Vec<String> = f.chi.iter().map(|c| format!("{c:.6}")).collect();
            out += &format!(
                "{}\t{}\t{}\t{:?}\t{}\t{:.6}\n",
                e.owner.label(),
                net.materials[e.material].id,
                f.side.label(),
                f.kind,
                chi.join(" "),
                f.r_squared
            );
        }
    }
    print!("{out}");
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write_json(&fits, &dir.join("fits.json"))?;
    }
    Ok(EXIT_OK)
}

fn build(a: &ModelArgs) -> Result<i32> {
    let (net, tables) = load_inputs(&a.input)?;
    let instance = build_model(a, &net, &tables)?;
    let summary = InstanceSummary::of(&instance);
    println!(
        "{} instance: {} variables ({} binary), {} linear rows, {} quadratic rows",
        instance.kind, summary.variables, summary.binaries, summary.linear_rows, summary.quadratic_rows
    );
    for (family, rows) in &summary.rows_by_family {
        println!("  {family:<24}{rows:>7}");
    }
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write_json(&summary, &dir.join("instance.json"))?;
    }
    Ok(EXIT_OK)
}

fn solve_cmd(a: &SolveArgs) -> Result<i32> {
    let m = &a.model;
    let Some(dir) = &m.out else {
        return Err(Error::Domain("solve needs --out DIR".into()));
    };
    let (net, tables) = load_inputs(&m.input)?;
    let instance = build_model(m, &net, &tables)?;
    let mut options = SolverOptions::default();
    if let Some(t) = a.time_limit {
        options = options.with_time_limit(t);
    }
    options.check()?;
    info!("solving {} with {} variables", instance.kind, instance.var_count());
    let solution = solve(&instance, &options)?;
    let report = Report::new(&net, &instance, &solution, DEFAULT_TOLERANCE)?;

    create_dir(dir)?;
    let manifest = RunManifest {
        network: m.input.network.clone(),
        profile: m.input.profile.clone(),
        sections: m.input.sections.clone(),
        model: m.model,
        slabs: m.slabs,
        fit: m.fit,
        time_limit: a.time_limit,
        out: dir.clone(),
        seed: a.seed,
    };
    write_json(&manifest, &dir.join("manifest.json"))?;
    write_report(&report, dir.join("report.json"))?;
    write_solution(&SolutionFile::new(&instance, &solution), dir.join("solution.json"))?;
    if a.svg && solution.has_point() {
        write_profile_svg(&net, &instance, &solution.values, dir.join("profile.svg"))?;
    }
    print!("{}", summary_text(&report));
    Ok(status_code(solution.status))
}

fn validate(a: &ValidateArgs) -> Result<i32> {
    let (net, tables) = load_inputs(&a.model.input)?;
    let instance = build_model(&a.model, &net, &tables)?;
    let file = load_solution(&a.solution)?;
    if file.model != instance.kind {
        return Err(Error::Domain(format!(
            "solution is for {}, model built is {}",
            file.model, instance.kind
        )));
    }
    let x = file.values_for(&instance)?;
    let res = validate_solution(&instance, &x, a.tolerance)?;
    for f in &res.families {
        println!("{:<24}{:>7} rows  {:.3e}", f.family.label(), f.rows, f.max_residual);
    }
    println!("integrality gap {:.3e}", res.integrality_gap);
    if res.is_feasible() {
        println!("feasible within {:.1e}", a.tolerance);
        Ok(EXIT_OK)
    } else {
        println!("{} violations:", res.violations.len());
        for v in &res.violations {
            println!("  {v}");
        }
        Ok(EXIT_INFEASIBLE)
    }
}

fn export(a: &ModelArgs) -> Result<i32> {
    let Some(dir) = &a.out else {
        return Err(Error::Domain("export needs --out DIR".into()));
    };
    let (net, tables) = load_inputs(&a.input)?;
    let instance = build_model(a, &net, &tables)?;
    create_dir(dir)?;
    let path = dir.join(format!("{}.mps", instance.kind.to_string().to_lowercase()));
    export_mps(&instance, &path)?;
    println!("{}", path.display());
    Ok(EXIT_OK)
}

fn compare(a: &CompareArgs) -> Result<i32> {
    let (net, tables) = load_inputs(&a.input)?;
    let variants = a
        .models
        .iter()
        .map(|name| Variant::parse(name, a.slabs, a.fit))
        .collect::<Result<Vec<_>>>()?;
    let mut options = SolverOptions::default();
    if let Some(t) = a.time_limit {
        options = options.with_time_limit(t);
    }
    let table = compare_models(&net, &tables, &variants, a.runs, &options)?;
    match &a.out {
        Some(dir) => {
            create_dir(dir)?;
            let path = dir.join("comparison.csv");
            let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            write_comparison_csv(&table, file)?;
            let mut stdout = std::io::stdout();
            write_comparison_csv(&table, &mut stdout)?;
            let _ = stdout.flush();
        }
        None => write_comparison_csv(&table, std::io::stdout())?,
    }
    Ok(EXIT_OK)
}

fn gen(a: &GenArgs) -> Result<i32> {
    let spec = SynthSpec {
        roads: a.roads,
        intersections: a.intersections,
        sections_per_road: a.stations,
        segment_size: a.segment_size,
        spacing: a.spacing,
        materials: a.materials,
        offset_bound: a.offset_bound,
        terrain: a.terrain,
        shape: a.shape,
        pits: !a.no_pits,
        seed: a.seed,
        ..SynthSpec::default()
    };
    let inst = generate(&spec)?;
    create_dir(&a.out)?;
    save_network(&inst.network, a.out.join("network.toml"))?;
    save_cross_sections(&inst.tables, &inst.network, a.out.join("sections.csv"))?;
    let path = a.out.join("profile.csv");
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_profile(&inst.network, file)?;
    println!(
        "{} roads, {} sections, {} intersections -> {}",
        inst.network.roads.len(),
        inst.network.section_count(),
        inst.network.intersections.len(),
        a.out.display()
    );
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("vertalign").chain(args.iter().copied()))
    }

    #[test]
    fn solve_flags_parse() {
        let cli = parse(&[
            "solve", "--model", "uva", "--network", "n.toml", "--sections", "s.csv", "--slabs", "4",
            "--fit", "linear", "--out", "run", "--time-limit", "2.5", "--seed", "7", "--svg",
        ])
        .unwrap();
        let Command::Solve(a) = cli.command else { panic!("not solve") };
        assert_eq!(a.model.model, ModelChoice::Uva);
        assert_eq!(a.model.slabs, 4);
        assert_eq!(a.model.fit, FitMode::Linear);
        assert_eq!(a.time_limit, Some(2.5));
        assert_eq!(a.seed, 7);
        assert!(a.svg);
    }

    #[test]
    fn defaults() {
        let cli = parse(&["build", "--network", "n.toml", "--sections", "s.csv"]).unwrap();
        let Command::Build(a) = cli.command else { panic!("not build") };
        assert_eq!(a.model, ModelChoice::Cuva);
        assert_eq!(a.fit, FitMode::Auto);
        let cli = parse(&["compare", "--network", "n", "--sections", "s"]).unwrap();
        let Command::Compare(c) = cli.command else { panic!("not compare") };
        assert_eq!(c.models, ["uva", "cuva"]);
        assert_eq!(c.runs, 5);
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        assert_eq!(dispatch(["vertalign", "solve", "--bogus"]), EXIT_USAGE);
        assert_eq!(dispatch(["vertalign", "frobnicate"]), EXIT_USAGE);
        assert_eq!(dispatch(["vertalign", "fit", "--fit", "cubic", "--network", "n", "--sections", "s"]), EXIT_USAGE);
    }

    #[test]
    fn exit_codes_follow_status() {
        assert_eq!(status_code(Status::Optimal), 0);
        assert_eq!(status_code(Status::Infeasible), 2);
        assert_eq!(status_code(Status::LimitHit), 3);
    }
}
