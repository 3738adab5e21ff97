//! MPS export and import. Names follow the emitted row and column names, so
//! the file uses whitespace-separated fields rather than fixed columns.
//! Quadratic volume bounds go into `QCMATRIX` sections in `<=` form.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{
    Family, InstanceBuilder, ModelInstance, ModelKind, QuadraticConstraint, Relation,
};

const OBJECTIVE_ROW: &str = "COST";

/// Renders an instance as MPS text.
pub fn write_mps(instance: &ModelInstance, name: &str) -> String {
    let mut out = String::new();
    let n = instance.var_count();
    let _ = writeln!(out, "NAME          {name}");
    out.push_str("OBJSENSE\n    MIN\nROWS\n");
    let _ = writeln!(out, " N  {OBJECTIVE_ROW}");
    for c in &instance.constraints {
        let tag = match c.relation {
            Relation::Le => 'L',
            Relation::Eq => 'E',
            Relation::Ge => 'G',
        };
        let _ = writeln!(out, " {tag}  {}", c.name);
    }
    for q in &instance.quadratics {
        let _ = writeln!(out, " L  {}", q.name);
    }

    let mut columns: Vec<Vec<(&str, f64)>> = vec![Vec::new(); n];
    for (j, &c) in instance.objective.iter().enumerate() {
        if c != 0.0 {
            columns[j].push((OBJECTIVE_ROW, c));
        }
    }
    for c in &instance.constraints {
        for &(j, a) in &c.terms {
            columns[j].push((&c.name, a));
        }
    }
    // q u² + l u - Σ V <= -c
    for q in &instance.quadratics {
        for &v in &q.volume_vars {
            columns[v].push((&q.name, -1.0));
        }
        if q.chi[1] != 0.0 {
            columns[q.offset_var].push((&q.name, q.chi[1]));
        }
    }

    out.push_str("COLUMNS\n");
    let mut in_integer = false;
    let mut markers = 0;
    for (j, entries) in columns.iter().enumerate() {
        let var = instance.catalog.get(j);
        if var.integer != in_integer {
            let kind = if var.integer { "INTORG" } else { "INTEND" };
            let _ = writeln!(out, "    MARKER{markers}  'MARKER'  '{kind}'");
            markers += 1;
            in_integer = var.integer;
        }
        if entries.is_empty() {
            let _ = writeln!(out, "    {}  {OBJECTIVE_ROW}  0", var.name);
        }
        for (row, a) in entries {
            let _ = writeln!(out, "    {}  {row}  {a}", var.name);
        }
    }
    if in_integer {
        let _ = writeln!(out, "    MARKER{markers}  'MARKER'  'INTEND'");
    }

    out.push_str("RHS\n");
    for c in &instance.constraints {
        if c.rhs != 0.0 {
            let _ = writeln!(out, "    RHS  {}  {}", c.name, c.rhs);
        }
    }
    for q in &instance.quadratics {
        if q.chi[2] != 0.0 {
            let _ = writeln!(out, "    RHS  {}  {}", q.name, -q.chi[2]);
        }
    }

    out.push_str("BOUNDS\n");
    for v in instance.catalog.iter() {
        let name = &v.name;
        let (lo, hi) = (v.lower, v.upper);
        if v.integer && lo == 0.0 && hi == 1.0 {
            let _ = writeln!(out, " BV BND  {name}");
        } else if lo == hi {
            let _ = writeln!(out, " FX BND  {name}  {lo}");
        } else if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            let _ = writeln!(out, " FR BND  {name}");
        } else {
            if lo == f64::NEG_INFINITY {
                let _ = writeln!(out, " MI BND  {name}");
            } else if lo != 0.0 || hi < 0.0 {
                let _ = writeln!(out, " LO BND  {name}  {lo}");
            }
            if hi != f64::INFINITY {
                let _ = writeln!(out, " UP BND  {name}  {hi}");
            }
        }
    }

    for q in &instance.quadratics {
        let u = &instance.catalog.get(q.offset_var).name;
        let _ = writeln!(out, "QCMATRIX   {}", q.name);
        let _ = writeln!(out, "    {u}  {u}  {}", q.chi[0]);
    }
    out.push_str("ENDATA\n");
    out
}

/// Writes an instance to an MPS file.
pub fn export_mps(instance: &ModelInstance, destination: &Path) -> Result<()> {
    let name = destination
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("vertalign");
    fs::write(destination, write_mps(instance, name)).map_err(|e| Error::io(destination, e))
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Bounds,
    Quadratic,
    ObjSense,
}

struct RowDecl {
    name: String,
    relation: Relation,
    terms: Vec<(usize, f64)>,
    rhs: f64,
}

/// Parses MPS text written by [`write_mps`] (or any file using the same
/// subset: no ranges, minimization, diagonal one-variable quadratic rows).
pub fn read_mps(text: &str, origin: &Path) -> Result<ModelInstance> {
    let fail = |line: usize, msg: String| Error::parse(origin, format!("line {line}: {msg}"));
    let mut section = Section::None;
    let mut objective_row: Option<String> = None;
    let mut maximize = false;
    let mut rows: Vec<RowDecl> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut b = InstanceBuilder::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut objective: Vec<(usize, f64)> = Vec::new();
    let mut integer = false;
    let mut bounds: Vec<(f64, f64)> = Vec::new();
    let mut quadratic: HashMap<usize, (usize, f64)> = HashMap::new();
    let mut current_q: Option<usize> = None;

    let num = |line: usize, s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| fail(line, format!("bad number {s:?}")))
    };

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(' ') {
            section = match fields[0] {
                "NAME" => Section::None,
                "OBJSENSE" => Section::ObjSense,
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "QCMATRIX" | "QSECTION" => {
                    let name = fields
                        .get(1)
                        .ok_or_else(|| fail(line, "QCMATRIX without row".into()))?;
                    let r = *row_index
                        .get(*name)
                        .ok_or_else(|| fail(line, format!("unknown row {name}")))?;
                    current_q = Some(r);
                    Section::Quadratic
                }
                "ENDATA" => break,
                other => return Err(fail(line, format!("unsupported section {other}"))),
            };
            if fields[0] == "OBJSENSE" && fields.len() > 1 {
                maximize = fields[1].starts_with("MAX");
            }
            continue;
        }
        match section {
            Section::None => return Err(fail(line, "data outside a section".into())),
            Section::ObjSense => maximize = fields[0].starts_with("MAX"),
            Section::Rows => {
                let [kind, name] = fields[..] else {
                    return Err(fail(line, "expected `<type> <name>`".into()));
                };
                let relation = match kind {
                    "N" => {
                        objective_row.get_or_insert_with(|| name.to_string());
                        continue;
                    }
                    "L" => Relation::Le,
                    "E" => Relation::Eq,
                    "G" => Relation::Ge,
                    other => return Err(fail(line, format!("unknown row type {other}"))),
                };
                row_index.insert(name.to_string(), rows.len());
                rows.push(RowDecl {
                    name: name.to_string(),
                    relation,
                    terms: Vec::new(),
                    rhs: 0.0,
                });
            }
            Section::Columns => {
                if fields.get(1) == Some(&"'MARKER'") {
                    match fields.get(2) {
                        Some(&"'INTORG'") => integer = true,
                        Some(&"'INTEND'") => integer = false,
                        _ => return Err(fail(line, "unknown marker".into())),
                    }
                    continue;
                }
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(fail(line, "expected `<column> (<row> <value>)+`".into()));
                }
                let col = match col_index.get(fields[0]) {
                    Some(&c) => c,
                    None => {
                        let c = if integer {
                            b.binary(fields[0].to_string())
                        } else {
                            b.nonneg(fields[0].to_string())
                        };
                        bounds.push((0.0, f64::INFINITY));
                        col_index.insert(fields[0].to_string(), c);
                        c
                    }
                };
                for pair in fields[1..].chunks(2) {
                    let value = num(line, pair[1])?;
                    if Some(pair[0]) == objective_row.as_deref() {
                        objective.push((col, value));
                    } else {
                        let r = *row_index
                            .get(pair[0])
                            .ok_or_else(|| fail(line, format!("unknown row {}", pair[0])))?;
                        if value != 0.0 {
                            rows[r].terms.push((col, value));
                        }
                    }
                }
            }
            Section::Rhs => {
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(fail(line, "expected `<set> (<row> <value>)+`".into()));
                }
                for pair in fields[1..].chunks(2) {
                    let value = num(line, pair[1])?;
                    if Some(pair[0]) == objective_row.as_deref() {
                        continue;
                    }
                    let r = *row_index
                        .get(pair[0])
                        .ok_or_else(|| fail(line, format!("unknown row {}", pair[0])))?;
                    rows[r].rhs = value;
                }
            }
            Section::Bounds => {
                let kind = fields[0];
                let name = fields
                    .get(2)
                    .ok_or_else(|| fail(line, "expected `<type> <set> <column>`".into()))?;
                let c = *col_index
                    .get(*name)
                    .ok_or_else(|| fail(line, format!("unknown column {name}")))?;
                let value = match fields.get(3) {
                    Some(v) => Some(num(line, v)?),
                    None => None,
                };
                let need = |v: Option<f64>| v.ok_or_else(|| fail(line, format!("{kind} needs a value")));
                let bound = &mut bounds[c];
                match kind {
                    "LO" | "LI" => bound.0 = need(value)?,
                    "UP" | "UI" => bound.1 = need(value)?,
                    "FX" => {
                        let v = need(value)?;
                        *bound = (v, v);
                    }
                    "FR" => *bound = (f64::NEG_INFINITY, f64::INFINITY),
                    "MI" => bound.0 = f64::NEG_INFINITY,
                    "PL" => bound.1 = f64::INFINITY,
                    "BV" => *bound = (0.0, 1.0),
                    other => return Err(fail(line, format!("unknown bound type {other}"))),
                }
            }
            Section::Quadratic => {
                let [a, c, v] = fields[..] else {
                    return Err(fail(line, "expected `<column> <column> <value>`".into()));
                };
                if a != c {
                    return Err(fail(line, "only diagonal quadratic terms are supported".into()));
                }
                let col = *col_index
                    .get(a)
                    .ok_or_else(|| fail(line, format!("unknown column {a}")))?;
                let r = current_q.expect("quadratic section has a row");
                if quadratic.insert(r, (col, num(line, v)?)).is_some() {
                    return Err(fail(line, "one quadratic term per row is supported".into()));
                }
            }
        }
    }

    let sign = if maximize { -1.0 } else { 1.0 };
    for (c, v) in objective {
        b.objective[c] += sign * v;
    }
    for (k, (lo, hi)) in bounds.into_iter().enumerate() {
        b.catalog.set_bounds(k, lo, hi);
    }
    for (r, row) in rows.into_iter().enumerate() {
        if let Some(&(u, q)) = quadratic.get(&r) {
            if row.relation != Relation::Le {
                return Err(Error::parse(origin, format!("quadratic row {} must be L", row.name)));
            }
            let mut volume = Vec::new();
            let mut linear = 0.0;
            for (j, a) in row.terms {
                if j == u {
                    linear = a;
                } else if a == -1.0 {
                    volume.push(j);
                } else {
                    return Err(Error::parse(
                        origin,
                        format!("quadratic row {}: unsupported coefficient {a}", row.name),
                    ));
                }
            }
            b.quadratics.push(QuadraticConstraint {
                name: row.name,
                volume_vars: volume,
                offset_var: u,
                chi: [q, linear, -row.rhs],
            });
        } else {
            let family = Family::from_row_name(&row.name);
            b.row(row.name, family, row.terms, row.relation, row.rhs);
        }
    }
    let kind = if b.catalog.iter().any(|v| v.integer) {
        ModelKind::Uva
    } else {
        ModelKind::Cuva
    };
    Ok(b.finish(kind, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FitMode;
    use crate::model::{build_cuva, build_uva, FitSet, SlabSet};
    use crate::synth::{generate, SectionShape, SynthSpec};

    fn canonical(mut m: ModelInstance) -> ModelInstance {
        for c in &mut m.constraints {
            c.terms.sort_by_key(|t| t.0);
        }
        m.vars = None;
        m.slab_chains.clear();
        m.catalog.reindex();
        m
    }

    fn round_trip(m: &ModelInstance) -> ModelInstance {
        read_mps(&write_mps(m, "t"), Path::new("t.mps")).unwrap()
    }

    #[test]
    fn empty_instance_has_only_headers() {
        let m = ModelInstance::empty(ModelKind::Cuva);
        let text = write_mps(&m, "empty");
        for header in ["NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"] {
            assert!(text.contains(header));
        }
        assert_eq!(round_trip(&m).var_count(), 0);
    }

    #[test]
    fn uva_round_trip_is_exact() {
        let inst = generate(&SynthSpec {
            roads: 2,
            intersections: 1,
            sections_per_road: 4,
            ..SynthSpec::default()
        })
        .unwrap();
        let slabs = SlabSet::build(&inst.network, &inst.tables, (3, 2)).unwrap();
        let m = build_uva(&inst.network, &inst.tables, &slabs).unwrap();
        let back = round_trip(&m);
        assert_eq!(canonical(back), canonical(m));
    }

    #[test]
    fn cuva_round_trip_keeps_quadratics() {
        let inst = generate(&SynthSpec {
            shape: SectionShape::Trapezoid,
            ..SynthSpec::default()
        })
        .unwrap();
        let fits = FitSet::build(&inst.network, &inst.tables, FitMode::Quadratic).unwrap();
        let m = build_cuva(&inst.network, &inst.tables, &fits).unwrap();
        assert!(!m.quadratics.is_empty());
        let text = write_mps(&m, "c");
        assert!(text.contains("QCMATRIX   VOLQ_0_1_0_CUT"));
        assert_eq!(canonical(round_trip(&m)), canonical(m));
    }
}
