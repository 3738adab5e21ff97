use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::catalog::CommonVars;

/// Constraint family tag attached to every emitted row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Continuity,
    IntersectionElevation,
    Gap,
    IntersectionGap,
    Grade,
    Flow,
    Balance,
    VolumeSlab,
    VolumeFit,
    Capacity,
    Bounds,
    /// Rows read back from files under names the builders never emit.
    Other,
}

impl Family {
    pub const ALL: [Family; 12] = [
        Family::Continuity,
        Family::IntersectionElevation,
        Family::Gap,
        Family::IntersectionGap,
        Family::Grade,
        Family::Flow,
        Family::Balance,
        Family::VolumeSlab,
        Family::VolumeFit,
        Family::Capacity,
        Family::Bounds,
        Family::Other,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Family::Continuity => "continuity",
            Family::IntersectionElevation => "intersection-elevation",
            Family::Gap => "gap",
            Family::IntersectionGap => "intersection-gap",
            Family::Grade => "grade",
            Family::Flow => "flow",
            Family::Balance => "balance",
            Family::VolumeSlab => "volume-slab",
            Family::VolumeFit => "volume-fit",
            Family::Capacity => "capacity",
            Family::Bounds => "bounds",
            Family::Other => "other",
        }
    }

    /// Recovers the family of a row from its emitted name.
    pub fn from_row_name(name: &str) -> Family {
        let prefix: String = name.chars().take_while(|c| c.is_ascii_uppercase()).collect();
        match prefix.as_str() {
            "CONT" => Family::Continuity,
            "ELEV" => Family::IntersectionElevation,
            "GAP" => Family::Gap,
            "ZGAP" => Family::IntersectionGap,
            "GRADELO" | "GRADEHI" => Family::Grade,
            "FLOWP" | "FLOWM" | "FLOWE" | "ZEROU" | "ZEROL" => Family::Flow,
            "BALC" | "BALF" | "BALCE" | "BALFE" => Family::Balance,
            "VOLC" | "VOLF" | "DEPC" | "DEPF" | "ORDC" | "ORDF" => Family::VolumeSlab,
            "VOLL" | "VOLQ" => Family::VolumeFit,
            "CAPB" | "CAPW" => Family::Capacity,
            _ => Family::Other,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub name: String,
    pub family: Family,
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row, zero when satisfied.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// `Σ volume_vars >= chi[0]·u² + chi[1]·u + chi[2]` with `u = x[offset_var]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticConstraint {
    pub name: String,
    pub volume_vars: Vec<usize>,
    pub offset_var: usize,
    pub chi: [f64; 3],
}

impl QuadraticConstraint {
    pub fn bound(&self, u: f64) -> f64 {
        (self.chi[0] * u + self.chi[1]) * u + self.chi[2]
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        let v: f64 = self.volume_vars.iter().map(|&j| x[j]).sum();
        (self.bound(x[self.offset_var]) - v).max(0.0)
    }

    /// Tangent cut at `u0`: `Σ V - (2 chi0 u0 + chi1) u >= chi2 - chi0 u0²`.
    pub fn tangent(&self, u0: f64) -> (Vec<(usize, f64)>, f64) {
        let mut terms: Vec<(usize, f64)> = self.volume_vars.iter().map(|&j| (j, 1.0)).collect();
        let slope = 2.0 * self.chi[0] * u0 + self.chi[1];
        if slope != 0.0 {
            terms.push((self.offset_var, -slope));
        }
        (terms, self.chi[2] - self.chi[0] * u0 * u0)
    }
}

/// Fractions `δ_k` of consecutive slabs together with the binaries that
/// order them. Any depth `Σ h_k δ_k` can be refilled in order without
/// raising the volume bound, which the branch-and-bound uses to repair
/// relaxation points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabChain {
    pub fractions: Vec<usize>,
    pub heights: Vec<f64>,
    /// `binaries[k]` sits between `fractions[k]` and `fractions[k + 1]`.
    pub binaries: Vec<usize>,
}

impl SlabChain {
    /// Refills the chain's depth slab by slab and sets the binaries to match.
    pub fn refill(&self, x: &mut [f64]) {
        let mut depth: f64 = self
            .fractions
            .iter()
            .zip(&self.heights)
            .map(|(&d, h)| x[d] * h)
            .sum();
        for (&d, &h) in self.fractions.iter().zip(&self.heights) {
            let take = (depth / h).clamp(0.0, 1.0);
            x[d] = take;
            depth -= take * h;
        }
        for (k, &b) in self.binaries.iter().enumerate() {
            x[b] = if x[self.fractions[k]] >= 1.0 { 1.0 } else { 0.0 };
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarInfo {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

/// Dense, name-addressable variable list.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VariableCatalog {
    vars: Vec<VarInfo>,
    #[serde(skip)]
    by_name: HashMap<String, usize>,
}

impl VariableCatalog {
    pub fn add(&mut self, name: String, lower: f64, upper: f64, integer: bool) -> usize {
        let id = self.vars.len();
        let prev = self.by_name.insert(name.clone(), id);
        debug_assert!(prev.is_none(), "duplicate variable {name}");
        self.vars.push(VarInfo {
            name,
            lower,
            upper,
            integer,
        });
        id
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn set_bounds(&mut self, id: usize, lower: f64, upper: f64) {
        self.vars[id].lower = lower;
        self.vars[id].upper = upper;
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn get(&self, id: usize) -> &VarInfo {
        &self.vars[id]
    }

    pub fn iter(&self) -> impl Iterator<Item = &VarInfo> {
        self.vars.iter()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        if self.by_name.len() != self.vars.len() {
            return self.vars.iter().position(|v| v.name == name);
        }
        self.by_name.get(name).copied()
    }

    /// Rebuilds the name index after deserialization.
    pub fn reindex(&mut self) {
        self.by_name = self
            .vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.clone(), i))
            .collect();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Uva,
    Cuva,
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "uva" => Ok(ModelKind::Uva),
            "cuva" => Ok(ModelKind::Cuva),
            other => Err(format!("unknown model {other:?} (uva|cuva)")),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Uva => "uva",
            ModelKind::Cuva => "cuva",
        })
    }
}

/// An assembled optimization model: minimize `objective · x` subject to the
/// linear rows, the convex quadratic rows and the variable bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInstance {
    pub kind: ModelKind,
    pub catalog: VariableCatalog,
    pub constraints: Vec<LinearConstraint>,
    pub quadratics: Vec<QuadraticConstraint>,
    pub objective: Vec<f64>,
    #[serde(default)]
    pub slab_chains: Vec<SlabChain>,
    /// Structured indices of the variables shared by both models; absent
    /// for instances read back from files.
    pub vars: Option<CommonVars>,
}

impl ModelInstance {
    pub fn empty(kind: ModelKind) -> Self {
        Self {
            kind,
            catalog: VariableCatalog::default(),
            constraints: Vec::new(),
            quadratics: Vec::new(),
            objective: Vec::new(),
            slab_chains: Vec::new(),
            vars: None,
        }
    }

    pub fn var_count(&self) -> usize {
        self.catalog.len()
    }

    pub fn integer_vars(&self) -> Vec<usize> {
        self.catalog
            .iter()
            .enumerate()
            .filter(|(_, v)| v.integer)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn family_count(&self, family: Family) -> usize {
        self.constraints
            .iter()
            .filter(|c| c.family == family)
            .count()
    }

    /// Counts of rows per family, in tag order.
    pub fn family_counts(&self) -> Vec<(Family, usize)> {
        Family::ALL
            .iter()
            .map(|&f| (f, self.family_count(f)))
            .filter(|&(_, n)| n > 0)
            .collect()
    }
}

/// Incremental builder used by the emitters.
#[derive(Debug, Clone)]
pub struct InstanceBuilder {
    pub catalog: VariableCatalog,
    pub constraints: Vec<LinearConstraint>,
    pub quadratics: Vec<QuadraticConstraint>,
    pub objective: Vec<f64>,
    pub slab_chains: Vec<SlabChain>,
}

impl Default for InstanceBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl InstanceBuilder {
    pub fn new() -> Self {
        Self {
            catalog: VariableCatalog::default(),
            constraints: Vec::new(),
            quadratics: Vec::new(),
            objective: Vec::new(),
            slab_chains: Vec::new(),
        }
    }

    pub fn var(&mut self, name: String, lower: f64, upper: f64) -> usize {
        self.objective.push(0.0);
        self.catalog.add(name, lower, upper, false)
    }

    pub fn binary(&mut self, name: String) -> usize {
        self.objective.push(0.0);
        self.catalog.add(name, 0.0, 1.0, true)
    }

    pub fn nonneg(&mut self, name: String) -> usize {
        self.var(name, 0.0, f64::INFINITY)
    }

    pub fn free(&mut self, name: String) -> usize {
        self.var(name, f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Adds a row after merging duplicate columns and dropping zeros.
    pub fn row(
        &mut self,
        name: String,
        family: Family,
        terms: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) {
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (j, a) in terms {
            match merged.iter_mut().find(|(k, _)| *k == j) {
                Some(entry) => entry.1 += a,
                None => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        self.constraints.push(LinearConstraint {
            name,
            family,
            terms: merged,
            relation,
            rhs,
        });
    }

    pub fn finish(self, kind: ModelKind, vars: Option<CommonVars>) -> ModelInstance {
        ModelInstance {
            kind,
            catalog: self.catalog,
            constraints: self.constraints,
            quadratics: self.quadratics,
            objective: self.objective,
            slab_chains: self.slab_chains,
            vars,
        }
    }
}
