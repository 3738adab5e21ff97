//! Acceptance suite. Prints one PASS / FAIL / SKIPPED line per criterion
//! and exits non-zero when any criterion fails.

mod common;

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vertalign::geometry::{
    build_slabs, fit_side, mape, rmse, sample_side, select_volume_model, trapezoid_volume, FitKind,
    FitMode, Side, SideSlopes, TrapezoidGeometry, FIT_SAMPLES,
};
use vertalign::io::load_report;
use vertalign::model::volume::volume_source;
use vertalign::model::{
    build_cuva, build_uva, material_balance, validate_solution, FitSet, ModelInstance, Owner, SlabSet,
};
use vertalign::network::RoadNetwork;
use vertalign::oracle::{angle_baseline_fit, brute_force_optimum, compare_models, GridSpec, Variant};
use vertalign::solver::{solve, solve_milp, write_mps, SolverOptions, Status};
use vertalign::synth::{generate, SectionShape, SynthInstance, SynthSpec, Terrain};

use common::{on_grid, oracle_instance, GRID_STEP};

enum Verdict {
    Pass(String),
    Fail(String),
    Skipped(String),
}

type Outcome = Result<Verdict, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn uva(inst: &SynthInstance, slabs: usize) -> ModelInstance {
    let set = SlabSet::build(&inst.network, &inst.tables, (slabs, slabs)).unwrap();
    build_uva(&inst.network, &inst.tables, &set).unwrap()
}

fn cuva(inst: &SynthInstance) -> ModelInstance {
    let fits = FitSet::build(&inst.network, &inst.tables, FitMode::Auto).unwrap();
    build_cuva(&inst.network, &inst.tables, &fits).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let (mut gridded, mut below, mut worst_fixed) = (0, 0, 0.0f64);
    let mut failures = Vec::new();
    for seed in 0..20 {
        let inst = oracle_instance(seed);
        let slabs = SlabSet::build(&inst.network, &inst.tables, (2, 2)).map_err(|e| e.to_string())?;
        let model = build_uva(&inst.network, &inst.tables, &slabs).map_err(|e| e.to_string())?;
        let sol = solve_milp(&model, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let bf = brute_force_optimum(
            &inst.network,
            &inst.tables,
            &slabs,
            GridSpec {
                step: GRID_STEP,
                cap: 10_000_000,
            },
        )
        .map_err(|e| e.to_string())?;
        if sol.status != Status::Optimal || !bf.cost.is_finite() {
            failures.push(format!("seed {seed}: milp {:?}, brute {}", sol.status, bf.cost));
            continue;
        }
        if sol.objective > bf.cost + 1e-6 {
            failures.push(format!("seed {seed}: milp {} > brute {}", sol.objective, bf.cost));
        }
        let vars = model.vars.as_ref().unwrap();
        let offsets = vars.offsets(&sol.values);
        if offsets[0].iter().all(|&u| on_grid(u, GRID_STEP)) {
            gridded += 1;
            if (sol.objective - bf.cost).abs() > 1e-6 {
                failures.push(format!("seed {seed}: on-grid milp {} != brute {}", sol.objective, bf.cost));
            }
        } else if sol.objective < bf.cost - 1e-6 {
            below += 1;
        }
        // the MILP restricted to the brute-force offsets prices them the same
        let mut fixed = model.clone();
        let best = &bf.offsets.as_ref().unwrap()[0];
        for (&j, &u) in vars.offset[0].iter().zip(best) {
            fixed.catalog.set_bounds(j, u, u);
        }
        let fs = solve_milp(&fixed, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let diff = (fs.objective - bf.cost).abs();
        worst_fixed = worst_fixed.max(diff);
        if fs.status != Status::Optimal || diff > 1e-6 {
            failures.push(format!("seed {seed}: fixed offsets price {} vs brute {}", fs.objective, bf.cost));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        failures.push(format!("runtime {secs:.1} s"));
    }
    let detail = format!(
        "20 instances, {gridded} with on-grid MILP offsets (equal), {below} strictly below brute force off-grid, \
         fixed-offset gap {worst_fixed:.1e}, {secs:.2} s{}",
        if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
    );
    Ok(check(failures.is_empty(), detail))
}

fn trapezoid_convergence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let counts = [1usize, 10, 100, 1000];
    let mut worst = [0.0f64; 4];
    let mut failures = Vec::new();
    for t in 0..10 {
        let width = rng.gen_range(4.0..12.0);
        let length = rng.gen_range(5.0..30.0);
        let angle = |rng: &mut ChaCha8Rng| rng.gen_range(PI / 9.0..4.0 * PI / 9.0);
        let slopes = |rng: &mut ChaCha8Rng| SideSlopes {
            alpha: angle(rng),
            beta: angle(rng),
        };
        let geom = TrapezoidGeometry {
            width,
            length,
            cut: slopes(&mut rng),
            fill: slopes(&mut rng),
        };
        let mag = rng.gen_range(0.2..3.0);
        let u = if rng.gen_bool(0.5) { -mag } else { mag };
        let depth = mag * rng.gen_range(1.05..2.0);
        let s = geom.slopes(if u < 0.0 { Side::Cut } else { Side::Fill });
        let exact = width * length * mag + 0.5 * u * u * (1.0 / s.alpha.tan() + 1.0 / s.beta.tan()) * length;
        let closed = trapezoid_volume(&geom, u).map_err(|e| e.to_string())?;
        if (closed - exact).abs() > 1e-9 * exact {
            failures.push(format!("tuple {t}: closed form {closed} vs {exact}"));
        }
        let mut errs = Vec::new();
        for &k in &counts {
            let slabs = build_slabs(&geom, length, (depth, depth), (k, k)).map_err(|e| e.to_string())?;
            errs.push((slabs.volume(u) - exact).abs() / exact);
        }
        for (w, e) in worst.iter_mut().zip(&errs) {
            *w = w.max(*e);
        }
        if errs[2] >= 1e-2 || errs[3] >= 1e-3 {
            failures.push(format!("tuple {t}: errors {errs:?}"));
        }
        if errs.windows(2).any(|p| p[1] > p[0] + 1e-15) {
            failures.push(format!("tuple {t}: not monotone {errs:?}"));
        }
    }
    let detail = format!(
        "10 tuples, worst relative error {:.1e} / {:.1e} / {:.1e} / {:.1e} at 1 / 10 / 100 / 1000 slabs{}",
        worst[0],
        worst[1],
        worst[2],
        worst[3],
        if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
    );
    Ok(check(failures.is_empty(), detail))
}

fn convexity_guard() -> Outcome {
    let shapes = [
        SectionShape::Trapezoid,
        SectionShape::NoisyTrapezoid,
        SectionShape::Concave,
        SectionShape::Irregular,
        SectionShape::Rectangular,
    ];
    let (mut sections, mut quadratic, mut negative, mut emitted, mut nonconvex) = (0, 0, 0, 0, 0);
    for (k, shape) in shapes.into_iter().enumerate() {
        let inst = generate(&SynthSpec {
            roads: 10,
            sections_per_road: 10,
            shape,
            seed: 100 + k as u64,
            ..SynthSpec::default()
        })
        .map_err(|e| e.to_string())?;
        let net = &inst.network;
        for owner in Owner::all(net) {
            sections += 1;
            let src = volume_source(net, &inst.tables, owner, 0).map_err(|e| e.to_string())?;
            for (side, depth) in [(Side::Cut, -src.bounds.0), (Side::Fill, src.bounds.1)] {
                let samples = sample_side(src.table, src.length, side, depth, FIT_SAMPLES);
                let m = select_volume_model(&samples, side).map_err(|e| e.to_string())?;
                for fit in [m, fit_side(src.table, src.length, side, src.bounds, FitMode::Quadratic).map_err(|e| e.to_string())?] {
                    if fit.kind == FitKind::Quadratic {
                        quadratic += 1;
                        if fit.chi[0] < 0.0 {
                            negative += 1;
                        }
                    }
                }
            }
        }
        for mode in [FitMode::Auto, FitMode::Quadratic] {
            let fits = FitSet::build(net, &inst.tables, mode).map_err(|e| e.to_string())?;
            let model = build_cuva(net, &inst.tables, &fits).map_err(|e| e.to_string())?;
            emitted += model.quadratics.len();
            nonconvex += model.quadratics.iter().filter(|q| q.chi[0] < 0.0).count();
        }
    }
    Ok(check(
        sections >= 500 && negative == 0 && nonconvex == 0,
        format!(
            "{sections} sections, {quadratic} quadratic fits with {negative} negative leading terms, \
             {emitted} emitted quadratics with {nonconvex} non-convex"
        ),
    ))
}

fn fit_quality() -> Outcome {
    let inst = generate(&SynthSpec {
        roads: 10,
        sections_per_road: 10,
        shape: SectionShape::NoisyTrapezoid,
        table_points: 20,
        seed: 11,
        ..SynthSpec::default()
    })
    .map_err(|e| e.to_string())?;
    let net = &inst.network;
    let (mut wins, mut total, mut rmse_wins) = (0, 0, 0);
    let (mut sum_q, mut sum_a) = (0.0, 0.0);
    for owner in Owner::all(net) {
        let Owner::Section(i, j) = owner else { continue };
        let src = volume_source(net, &inst.tables, owner, 0).map_err(|e| e.to_string())?;
        let quad = fit_side(src.table, src.length, Side::Cut, src.bounds, FitMode::Quadratic)
            .map_err(|e| e.to_string())?;
        let angle = angle_baseline_fit(src.table, net.roads[i].sections[j].width, src.length)
            .map_err(|e| e.to_string())?;
        let cut: Vec<_> = src.table.samples().iter().filter(|s| s.offset < 0.0).collect();
        let actual = vec![cut.iter().map(|s| src.length * s.cut_area).collect::<Vec<f64>>()];
        let pq = vec![cut.iter().map(|s| quad.evaluate(s.offset)).collect::<Vec<f64>>()];
        let pa = vec![cut
            .iter()
            .map(|s| angle.geometry.volume(s.offset))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| e.to_string())?];
        let (mq, ma) = (mape(&actual, &pq).map_err(|e| e.to_string())?, mape(&actual, &pa).map_err(|e| e.to_string())?);
        sum_q += mq;
        sum_a += ma;
        total += 1;
        if mq <= ma {
            wins += 1;
        }
        if rmse(&actual, &pq).map_err(|e| e.to_string())? <= rmse(&actual, &pa).map_err(|e| e.to_string())? {
            rmse_wins += 1;
        }
    }
    Ok(check(
        total == 100 && wins * 10 >= total * 9,
        format!(
            "quadratic MAPE <= angle MAPE on {wins}/{total} cut sections (need 90), mean MAPE {:.2}% vs {:.2}%; \
             RMSE <= angle RMSE on {rmse_wins}/{total}",
            sum_q / total as f64,
            sum_a / total as f64
        ),
    ))
}

const HIGHS_SCRIPT: &str = r#"
import sys, highspy
for path in sys.argv[1:]:
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.readModel(path)
    h.run()
    print(h.modelStatusToString(h.getModelStatus()), repr(h.getInfo().objective_function_value))
"#;

fn solver_cross_check() -> Outcome {
    let probe = Command::new("python3").args(["-c", "import highspy"]).output();
    if !probe.map(|o| o.status.success()).unwrap_or(false) {
        return Ok(Verdict::Skipped("python3 with highspy not available".into()));
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut paths = Vec::new();
    let mut ours = Vec::new();
    for seed in 0..5 {
        let inst = oracle_instance(seed + 40);
        let model = uva(&inst, 2);
        let sol = solve_milp(&model, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let path = dir.path().join(format!("oracle{seed}.mps"));
        fs::write(&path, write_mps(&model, &format!("oracle{seed}"))).map_err(|e| e.to_string())?;
        paths.push(path);
        ours.push(sol.objective);
    }
    let out = Command::new("python3")
        .arg("-c")
        .arg(HIGHS_SCRIPT)
        .args(&paths)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Ok(Verdict::Fail(format!("highspy failed: {}", String::from_utf8_lossy(&out.stderr))));
    }
    let text = String::from_utf8_lossy(&out.stdout);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (k, (line, mine)) in text.lines().zip(&ours).enumerate() {
        let mut parts = line.split_whitespace();
        let status = parts.next().unwrap_or("");
        let theirs: f64 = parts.next().and_then(|v| v.parse().ok()).unwrap_or(f64::NAN);
        let rel = (theirs - mine).abs() / mine.abs().max(1.0);
        worst = worst.max(rel);
        if status != "Optimal" || !(rel <= 1e-6) {
            failures.push(format!("instance {k}: HiGHS {status} {theirs} vs {mine}"));
        }
    }
    if text.lines().count() != ours.len() {
        failures.push(format!("expected {} results, got {text:?}", ours.len()));
    }
    Ok(check(
        failures.is_empty(),
        format!(
            "5 UVA instances via MPS, HiGHS objectives {:?}, worst relative difference {worst:.1e}{}",
            text.lines().filter_map(|l| l.split_whitespace().nth(1)).collect::<Vec<_>>(),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    ))
}

fn residual_case(
    label: &str,
    net: &RoadNetwork,
    model: &ModelInstance,
    worst: &mut (f64, f64),
    failures: &mut Vec<String>,
) -> Result<(), String> {
    let sol = solve(model, &SolverOptions::default()).map_err(|e| e.to_string())?;
    if sol.status != Status::Optimal {
        failures.push(format!("{label}: {:?}", sol.status));
        return Ok(());
    }
    let res = validate_solution(model, &sol.values, 1e-6).map_err(|e| e.to_string())?;
    for f in &res.families {
        worst.0 = worst.0.max(f.max_residual);
        if f.max_residual > 1e-6 {
            failures.push(format!("{label}: {} residual {:e} at {:?}", f.family.label(), f.max_residual, f.worst));
        }
    }
    for b in material_balance(net, model, &sol.values).map_err(|e| e.to_string())? {
        let r = b.relative_imbalance();
        worst.1 = worst.1.max(r);
        if r > 1e-8 {
            failures.push(format!("{label}: material {} imbalance {r:e}", b.material));
        }
    }
    Ok(())
}

fn constraint_residuals() -> Outcome {
    let mut worst = (0.0, 0.0);
    let mut failures = Vec::new();
    let mut count = 0;
    for seed in 0..20 {
        let inst = oracle_instance(seed);
        residual_case(&format!("oracle {seed}"), &inst.network, &uva(&inst, 2), &mut worst, &mut failures)?;
        count += 1;
    }
    let networks = [
        generate(&SynthSpec {
            roads: 3,
            intersections: 2,
            terrain: Terrain::Sinusoidal {
                amplitude: 2.0,
                wavelength: 60.0,
            },
            seed: 5,
            ..SynthSpec::default()
        }),
        generate(&SynthSpec::medium(2, 1)),
    ];
    for (k, inst) in networks.into_iter().enumerate() {
        let inst = inst.map_err(|e| e.to_string())?;
        let slabs = if k == 0 { 6 } else { 4 };
        residual_case(&format!("network {k} UVA"), &inst.network, &uva(&inst, slabs), &mut worst, &mut failures)?;
        residual_case(&format!("network {k} CUVA"), &inst.network, &cuva(&inst), &mut worst, &mut failures)?;
        count += 2;
    }
    Ok(check(
        failures.is_empty(),
        format!(
            "{count} solves, max family residual {:.1e}, max relative material imbalance {:.1e}{}",
            worst.0,
            worst.1,
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    ))
}

/// Network sized like the first multi-material benchmark: 12 roads, 324
/// stations, 5 intersections, 42 slabs, mean of five runs.
fn speed_direction() -> Outcome {
    let medium = generate(&SynthSpec {
        sections_per_road: 27,
        ..SynthSpec::medium(2, 1)
    })
    .map_err(|e| e.to_string())?;
    let table = compare_models(
        &medium.network,
        &medium.tables,
        &[Variant::Uva { slabs: 42 }, Variant::Cuva { fit: FitMode::Auto }],
        5,
        &SolverOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let (u, c) = (&table.rows[0], &table.rows[1]);
    let speedup = c.speedup;

    let large = generate(&SynthSpec::large(2, 1)).map_err(|e| e.to_string())?;
    let budget = SolverOptions::default().with_time_limit(120.0);
    let start = Instant::now();
    let lc = solve(&cuva(&large), &budget).map_err(|e| e.to_string())?;
    let large_cuva = start.elapsed().as_secs_f64();
    let lu = solve(&uva(&large, 20), &budget).map_err(|e| e.to_string())?;

    let ok = u.status == Status::Optimal
        && c.status == Status::Optimal
        && speedup > 1.0
        && lc.status == Status::Optimal
        && large_cuva < 120.0;
    Ok(check(
        ok,
        format!(
            "12 roads / {} stations / 5 intersections / 2 materials / 42 slabs, mean of 5 runs: UVA {:.3} s ({:?}), CUVA {:.3} s ({:?}), speedup {speedup:.2}; \
             32 roads / 16 intersections: CUVA {large_cuva:.3} s ({:?}), UVA 20 slabs {:.3} s ({:?}, recorded only)",
            u.stations, u.seconds, u.status, c.seconds, c.status, lc.status, lu.stats.wall_seconds, lu.status
        ),
    ))
}

fn degenerate() -> Outcome {
    let specs = [
        ("1 road", SynthSpec::default()),
        (
            "3 roads",
            SynthSpec {
                roads: 3,
                intersections: 2,
                ..SynthSpec::default()
            },
        ),
        (
            "12 roads",
            SynthSpec {
                terrain: Terrain::Flat,
                ..SynthSpec::medium(1, 0)
            },
        ),
    ];
    let mut failures = Vec::new();
    let mut slowest = 0.0f64;
    for (label, spec) in specs {
        let inst = generate(&spec).map_err(|e| e.to_string())?;
        for (name, build) in [("UVA", true), ("CUVA", false)] {
            let start = Instant::now();
            let model = if build { uva(&inst, 10) } else { cuva(&inst) };
            let sol = solve(&model, &SolverOptions::default()).map_err(|e| e.to_string())?;
            let secs = start.elapsed().as_secs_f64();
            slowest = slowest.max(secs);
            let offsets = model.vars.as_ref().unwrap().offsets(&sol.values);
            let zero = offsets.iter().flatten().all(|&u| u == 0.0);
            if sol.status != Status::Optimal || sol.objective != 0.0 || !zero || secs >= 5.0 {
                failures.push(format!(
                    "{label} {name}: {:?} objective {:e}, zero offsets {zero}, {secs:.2} s",
                    sol.status, sol.objective
                ));
            }
        }
    }
    Ok(check(
        failures.is_empty(),
        format!(
            "flat 1 / 3 / 12 roads, UVA and CUVA: objective 0 and zero offsets, slowest {slowest:.3} s{}",
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    ))
}

fn run_cli(args: &[&str]) -> Result<i32, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_vertalign"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.status.code().unwrap_or(-1))
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = |p: &str| dir.path().join(p).to_string_lossy().into_owned();
    run_cli(&[
        "gen", "--out", &d("net"), "--roads", "3", "--intersections", "2", "--terrain", "sinusoidal", "--seed", "4",
    ])?;
    let mut compared = 0;
    for model in ["uva", "cuva"] {
        let out = d(&format!("run-{model}"));
        let args = [
            "solve", "--model", model, "--slabs", "4", "--network", &d("net/network.toml"), "--profile",
            &d("net/profile.csv"), "--sections", &d("net/sections.csv"), "--out", &out, "--seed", "9", "--svg",
        ];
        let out = Path::new(&out);
        run_cli(&args)?;
        let first_report = load_report(out.join("report.json")).map_err(|e| e.to_string())?;
        let first: Vec<Vec<u8>> = ["solution.json", "profile.svg", "manifest.json"]
            .iter()
            .map(|f| read(&out.join(f)))
            .collect::<Result<_, _>>()?;
        run_cli(&args)?;
        let second_report = load_report(out.join("report.json")).map_err(|e| e.to_string())?;
        let a = first_report.without_timing().to_json().map_err(|e| e.to_string())?;
        let b = second_report.without_timing().to_json().map_err(|e| e.to_string())?;
        if a != b {
            return Ok(Verdict::Fail(format!("{model}: reports differ outside the timing block")));
        }
        for (name, bytes) in ["solution.json", "profile.svg", "manifest.json"].iter().zip(first) {
            if read(&out.join(name))? != bytes {
                return Ok(Verdict::Fail(format!("{model}: {name} differs")));
            }
        }
        compared += 4;
    }
    Ok(Verdict::Pass(format!(
        "{compared} artifacts identical across repeated UVA and CUVA CLI runs (timing block excluded)"
    )))
}

fn metric_examples() -> Outcome {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    let m = |a: &[Vec<f64>], p: &[Vec<f64>]| mape(a, p).map_err(|e| e.to_string());
    let r = |a: &[Vec<f64>], p: &[Vec<f64>]| rmse(a, p).map_err(|e| e.to_string());
    let values = [
        m(&[vec![100.0, 50.0]], &[vec![100.0, 50.0]])?,
        m(&[vec![100.0]], &[vec![90.0]])?,
        m(&[vec![100.0, 100.0], vec![50.0]], &[vec![96.0, 104.0], vec![46.0]])?,
        r(&[vec![1.0, 2.0]], &[vec![1.0, 2.0]])?,
        r(&[vec![0.0, 0.0]], &[vec![3.0, 4.0]])?,
        r(&[vec![0.0], vec![0.0]], &[vec![1.0], vec![3.0]])?,
    ];
    let expected = [0.0, 10.0, 6.0, 0.0, 12.5f64.sqrt(), 2.0];
    let ok = values.iter().zip(&expected).all(|(&v, &e)| close(v, e));
    Ok(check(
        ok,
        format!("MAPE {:?} %, RMSE {:?} (expected 0, 10, 6 and 0, 3.5355, 2)", &values[..3], &values[3..]),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("trapezoid convergence", trapezoid_convergence),
        ("convexity guard", convexity_guard),
        ("fit-quality direction", fit_quality),
        ("solver cross-check", solver_cross_check),
        ("constraint residuals", constraint_residuals),
        ("speed direction", speed_direction),
        ("degenerate correctness", degenerate),
        ("determinism", determinism),
        ("metric unit tests", metric_examples),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let verdict = match std::panic::catch_unwind(run) {
            Ok(Ok(v)) => v,
            Ok(Err(e)) => Verdict::Fail(format!("error: {e}")),
            Err(_) => Verdict::Fail("panicked".into()),
        };
        let (tag, detail) = match verdict {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Verdict::Skipped(d) => ("SKIPPED", d),
        };
        println!("criterion {:>2} {name}: {tag} - {detail}", k + 1);
    }
    println!("acceptance: {} of {} criteria failed", failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
