use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{read_text, write_text};
use crate::error::{Error, Result};
use crate::model::residual::FamilyResidual;
use crate::model::{material_balance, validate_solution, MaterialBalance, ModelInstance, ModelKind};
use crate::network::RoadNetwork;
use crate::solver::{Solution, Status};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub variables: usize,
    pub binaries: usize,
    pub linear_rows: usize,
    pub quadratic_rows: usize,
    pub rows_by_family: BTreeMap<String, usize>,
}

impl InstanceSummary {
    pub fn of(instance: &ModelInstance) -> Self {
        Self {
            variables: instance.var_count(),
            binaries: instance.integer_vars().len(),
            linear_rows: instance.constraints.len(),
            quadratic_rows: instance.quadratics.len(),
            rows_by_family: instance
                .family_counts()
                .into_iter()
                .map(|(f, n)| (f.label().to_string(), n))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub lp_solves: usize,
    pub iterations: u64,
    pub nodes: usize,
    pub cuts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadResult {
    pub id: String,
    pub offsets: Vec<f64>,
    /// `[a0, a1, a2]` per segment, in segment-local stations.
    pub coefficients: Vec<f64>,
}

/// Fields that change from run to run; everything outside this block is
/// reproducible.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub created_unix: u64,
    pub solve_seconds: f64,
}

/// Machine-readable outcome of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub model: ModelKind,
    pub status: Status,
    pub message: Option<String>,
    /// Objective of the best point; absent when none was found.
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub gap: Option<f64>,
    pub instance: InstanceSummary,
    pub solver: SolverSummary,
    pub residual_tolerance: f64,
    pub max_residual: Option<f64>,
    pub integrality_gap: Option<f64>,
    pub residuals: Vec<FamilyResidual>,
    pub balance: Vec<MaterialBalance>,
    pub roads: Vec<RoadResult>,
    pub timing: Timing,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Report {
    pub fn new(
        net: &RoadNetwork,
        instance: &ModelInstance,
        solution: &Solution,
        tolerance: f64,
    ) -> Result<Self> {
        let (residuals, max_residual, integrality_gap, balance, roads) = if solution.has_point() {
            let res = validate_solution(instance, &solution.values, tolerance)?;
            let balance = match instance.vars {
                Some(_) => material_balance(net, instance, &solution.values)?,
                None => Vec::new(),
            };
            let roads = match &instance.vars {
                Some(vars) => {
                    let offsets = vars.offsets(&solution.values);
                    net.roads
                        .iter()
                        .enumerate()
                        .map(|(i, r)| RoadResult {
                            id: r.id.clone(),
                            offsets: offsets[i].clone(),
                            coefficients: vars.road_coefficients(i, &solution.values),
                        })
                        .collect()
                }
                None => Vec::new(),
            };
            let max = res.max_residual();
            (res.families, Some(max), Some(res.integrality_gap), balance, roads)
        } else {
            (Vec::new(), None, None, Vec::new(), Vec::new())
        };
        let gap = solution.gap();
        Ok(Self {
            model: instance.kind,
            status: solution.status,
            message: solution.message.clone(),
            objective: finite(solution.objective),
            bound: finite(solution.bound),
            gap: finite(gap),
            instance: InstanceSummary::of(instance),
            solver: SolverSummary {
                lp_solves: solution.stats.lp_solves,
                iterations: solution.stats.iterations,
                nodes: solution.stats.nodes,
                cuts: solution.stats.cuts,
            },
            residual_tolerance: tolerance,
            max_residual,
            integrality_gap,
            residuals,
            balance,
            roads,
            timing: Timing {
                created_unix: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map_or(0, |d| d.as_secs()),
                solve_seconds: solution.stats.wall_seconds,
            },
        })
    }

    /// The report with its timing block cleared, for run-to-run comparison.
    pub fn without_timing(&self) -> Self {
        Self {
            timing: Timing::default(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Emission(format!("report serialization: {e}")))
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

/// Plain-text digest of a report.
pub fn summary_text(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model      {}", report.model);
    let _ = writeln!(s, "status     {:?}", report.status);
    if let Some(msg) = &report.message {
        let _ = writeln!(s, "message    {msg}");
    }
    let _ = writeln!(s, "objective  {}", fmt_opt(report.objective));
    let _ = writeln!(s, "bound      {}", fmt_opt(report.bound));
    let _ = writeln!(s, "gap        {}", fmt_opt(report.gap));
    let i = &report.instance;
    let _ = writeln!(
        s,
        "instance   {} vars ({} binary), {} linear rows, {} quadratic rows",
        i.variables, i.binaries, i.linear_rows, i.quadratic_rows
    );
    let _ = writeln!(
        s,
        "solver     {} LP solves, {} nodes, {} cuts, {:.3} s",
        report.solver.lp_solves, report.solver.nodes, report.solver.cuts, report.timing.solve_seconds
    );
    if let Some(max) = report.max_residual {
        let _ = writeln!(s, "residual   max {max:.3e} (tolerance {:.1e})", report.residual_tolerance);
        for f in &report.residuals {
            let _ = writeln!(
                s,
                "  {:<24}{:>7} rows  {:.3e}",
                f.family.label(),
                f.rows,
                f.max_residual
            );
        }
    }
    for b in &report.balance {
        let _ = writeln!(
            s,
            "material   {}: cut {:.3} + borrow {:.3} = fill {:.3} + waste {:.3}",
            b.material, b.cut, b.borrow, b.fill, b.waste
        );
    }
    s
}

/// Writes the JSON report to `path` and the text summary next to it with a
/// `.txt` extension.
pub fn write_report(report: &Report, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_text(path, &(report.to_json()? + "\n"))?;
    write_text(&path.with_extension("txt"), &summary_text(report))
}

pub fn load_report(path: impl AsRef<Path>) -> Result<Report> {
    let path = path.as_ref();
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::parse(path, e.to_string()))
}

/// Variable values of a solve, keyed by variable name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub model: ModelKind,
    pub status: Status,
    pub objective: Option<f64>,
    pub values: Vec<(String, f64)>,
}

impl SolutionFile {
    pub fn new(instance: &ModelInstance, solution: &Solution) -> Self {
        Self {
            model: instance.kind,
            status: solution.status,
            objective: finite(solution.objective),
            values: instance
                .catalog
                .iter()
                .zip(&solution.values)
                .map(|(v, &x)| (v.name.clone(), x))
                .collect(),
        }
    }

    /// Point in the variable order of `instance`; every variable must be
    /// present and no extra names are allowed.
    pub fn values_for(&self, instance: &ModelInstance) -> Result<Vec<f64>> {
        if self.values.len() != instance.var_count() {
            return Err(Error::Dimension {
                expected: instance.var_count(),
                got: self.values.len(),
            });
        }
        let mut x = vec![f64::NAN; instance.var_count()];
        for (name, value) in &self.values {
            let k = instance
                .catalog
                .index_of(name)
                .ok_or_else(|| Error::Domain(format!("solution names unknown variable {name}")))?;
            x[k] = *value;
        }
        if let Some(k) = x.iter().position(|v| v.is_nan()) {
            return Err(Error::Domain(format!(
                "solution misses variable {}",
                instance.catalog.get(k).name
            )));
        }
        Ok(x)
    }
}

pub fn write_solution(file: &SolutionFile, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(file)
        .map_err(|e| Error::Emission(format!("solution serialization: {e}")))?;
    write_text(path.as_ref(), &(text + "\n"))
}

pub fn load_solution(path: impl AsRef<Path>) -> Result<SolutionFile> {
    let path = path.as_ref();
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::parse(path, e.to_string()))
}
