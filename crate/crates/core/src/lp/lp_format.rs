//! Text export/import of models in a CPLEX-LP-style dialect.
//!
//! The dialect is deliberately small and self-round-tripping:
//!
//! ```text
//! \ model name
//! Minimize
//!  obj: 2 x + 3.5 y
//! Subject To
//!  c0: 1 x + 1 y >= 3
//! Bounds
//!  0 <= x <= 10
//!  y free
//! Binary
//!  z
//! End
//! ```
//!
//! Every variable appears in the `Bounds` section in creation order (binary
//! variables included), so a re-imported model has identical variable order,
//! bounds, kinds, objective and constraints. Floats are written with Rust's
//! shortest round-trip formatting, so values survive the trip bit-exactly.

use super::{ConstraintSense, Model, ObjectiveSense, VarKind};
use crate::error::{Error, Result};
use std::fmt::Write as _;

pub fn write_lp(model: &Model) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ {}", model.name());
    let _ = writeln!(
        out,
        "{}",
        match model.objective_sense() {
            ObjectiveSense::Minimize => "Minimize",
            ObjectiveSense::Maximize => "Maximize",
        }
    );
    let mut obj = String::from(" obj:");
    let mut any = false;
    for (var, &coef) in model.variables().iter().zip(model.objective()) {
        if coef != 0.0 {
            let _ = write!(obj, " {} {} {}", if coef < 0.0 { "-" } else { "+" }, coef.abs(), var.name);
            any = true;
        }
    }
    if !any {
        obj.push_str(" 0");
    }
    let _ = writeln!(out, "{obj}");
    let _ = writeln!(out, "Subject To");
    for con in model.constraints() {
        let mut line = format!(" {}:", con.name);
        if con.terms.is_empty() {
            line.push_str(" 0");
        }
        for &(v, coef) in &con.terms {
            let _ = write!(
                line,
                " {} {} {}",
                if coef < 0.0 { "-" } else { "+" },
                coef.abs(),
                model.variables()[v.index()].name
            );
        }
        let sense = match con.sense {
            ConstraintSense::Le => "<=",
            ConstraintSense::Ge => ">=",
            ConstraintSense::Eq => "=",
        };
        let _ = writeln!(out, "{line} {sense} {}", con.rhs);
    }
    let _ = writeln!(out, "Bounds");
    for var in model.variables() {
        match (var.lower, var.upper) {
            (lo, hi) if lo == f64::NEG_INFINITY && hi == f64::INFINITY => {
                let _ = writeln!(out, " {} free", var.name);
            }
            (lo, hi) if hi == f64::INFINITY => {
                let _ = writeln!(out, " {} >= {}", var.name, lo);
            }
            (lo, hi) if lo == f64::NEG_INFINITY => {
                let _ = writeln!(out, " {} <= {}", var.name, hi);
            }
            (lo, hi) => {
                let _ = writeln!(out, " {} <= {} <= {}", lo, var.name, hi);
            }
        }
    }
    let binaries: Vec<&str> = model
        .variables()
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        let _ = writeln!(out, "Binary");
        for name in binaries {
            let _ = writeln!(out, " {name}");
        }
    }
    let _ = writeln!(out, "End");
    out
}

fn parse_terms(model: &Model, tokens: &[&str], what: &str) -> Result<Vec<(super::VarId, f64)>> {
    // Token stream of the shape: ("+"|"-") coef name, repeated; or a lone "0".
    if tokens == ["0"] {
        return Ok(Vec::new());
    }
    if tokens.len() % 3 != 0 {
        return Err(Error::DataValidation(format!("malformed {what} expression: {tokens:?}")));
    }
    let mut terms = Vec::with_capacity(tokens.len() / 3);
    for chunk in tokens.chunks(3) {
        let sign = match chunk[0] {
            "+" => 1.0,
            "-" => -1.0,
            other => return Err(Error::DataValidation(format!("expected sign in {what}, got '{other}'"))),
        };
        let coef: f64 = chunk[1]
            .parse()
            .map_err(|_| Error::DataValidation(format!("bad coefficient '{}' in {what}", chunk[1])))?;
        let var = model
            .var_by_name(chunk[2])
            .ok_or_else(|| Error::DataValidation(format!("unknown variable '{}' in {what}", chunk[2])))?;
        terms.push((var, sign * coef));
    }
    Ok(terms)
}

/// Parse a model previously produced by [`write_lp`].
pub fn read_lp(text: &str) -> Result<Model> {
    #[derive(PartialEq)]
    enum Section {
        Preamble,
        Objective,
        Constraints,
        Bounds,
        Binary,
        Done,
    }

    let mut name = String::from("imported");
    let mut sense = ObjectiveSense::Minimize;
    let mut objective_line = String::new();
    let mut constraint_lines: Vec<String> = Vec::new();
    let mut bound_lines: Vec<String> = Vec::new();
    let mut binary_names: Vec<String> = Vec::new();
    let mut section = Section::Preamble;

    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('\\') {
            if section == Section::Preamble {
                name = comment.trim().to_string();
            }
            continue;
        }
        match line {
            "Minimize" | "Maximize" => {
                sense = if line == "Minimize" { ObjectiveSense::Minimize } else { ObjectiveSense::Maximize };
                section = Section::Objective;
                continue;
            }
            "Subject To" => {
                section = Section::Constraints;
                continue;
            }
            "Bounds" => {
                section = Section::Bounds;
                continue;
            }
            "Binary" => {
                section = Section::Binary;
                continue;
            }
            "End" => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Objective => objective_line.push_str(&format!(" {line}")),
            Section::Constraints => constraint_lines.push(line.to_string()),
            Section::Bounds => bound_lines.push(line.to_string()),
            Section::Binary => binary_names.push(line.to_string()),
            _ => return Err(Error::DataValidation(format!("unexpected line outside any section: '{line}'"))),
        }
    }
    if section != Section::Done {
        return Err(Error::DataValidation("missing End marker".into()));
    }

    let mut model = Model::new(name);
    model.set_objective_sense(sense);

    // Variables are declared by the Bounds section, in order.
    for line in &bound_lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let (var_name, lower, upper) = match tokens.as_slice() {
            [name, "free"] => (name.to_string(), f64::NEG_INFINITY, f64::INFINITY),
            [name, ">=", lo] => (
                name.to_string(),
                lo.parse::<f64>()
                    .map_err(|_| Error::DataValidation(format!("bad bound '{lo}'")))?,
                f64::INFINITY,
            ),
            [name, "<=", hi] => (
                name.to_string(),
                f64::NEG_INFINITY,
                hi.parse::<f64>()
                    .map_err(|_| Error::DataValidation(format!("bad bound '{hi}'")))?,
            ),
            [lo, "<=", name, "<=", hi] => (
                name.to_string(),
                lo.parse::<f64>()
                    .map_err(|_| Error::DataValidation(format!("bad bound '{lo}'")))?,
                hi.parse::<f64>()
                    .map_err(|_| Error::DataValidation(format!("bad bound '{hi}'")))?,
            ),
            _ => return Err(Error::DataValidation(format!("malformed bounds line: '{line}'"))),
        };
        model.add_continuous(var_name, lower, upper)?;
    }
    // Binary markers upgrade already-declared variables.
    let binary_set: std::collections::HashSet<&str> = binary_names.iter().map(|s| s.as_str()).collect();
    if !binary_set.is_empty() {
        let ids: Vec<_> = model
            .variables()
            .iter()
            .enumerate()
            .filter(|(_, v)| binary_set.contains(v.name.as_str()))
            .map(|(i, _)| i)
            .collect();
        if ids.len() != binary_set.len() {
            return Err(Error::DataValidation("Binary section names an undeclared variable".into()));
        }
        for i in ids {
            model.variables_mut()[i].kind = VarKind::Binary;
        }
    }

    let obj_tokens: Vec<&str> = objective_line.split_whitespace().collect();
    let obj_tokens = match obj_tokens.split_first() {
        Some((&"obj:", rest)) => rest.to_vec(),
        _ => return Err(Error::DataValidation("objective must start with 'obj:'".into())),
    };
    for (var, coef) in parse_terms(&model, &obj_tokens, "objective")? {
        model.add_objective_term(var, coef);
    }

    for line in &constraint_lines {
        let (con_name, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::DataValidation(format!("constraint without name: '{line}'")))?;
        let tokens: Vec<&str> = rest.split_whitespace().collect();
        let sense_pos = tokens
            .iter()
            .position(|t| matches!(*t, "<=" | ">=" | "="))
            .ok_or_else(|| Error::DataValidation(format!("constraint without sense: '{line}'")))?;
        let sense = match tokens[sense_pos] {
            "<=" => ConstraintSense::Le,
            ">=" => ConstraintSense::Ge,
            _ => ConstraintSense::Eq,
        };
        let rhs: f64 = tokens[sense_pos + 1..]
            .join("")
            .parse()
            .map_err(|_| Error::DataValidation(format!("bad rhs in '{line}'")))?;
        let terms = parse_terms(&model, &tokens[..sense_pos], "constraint")?;
        model.add_constraint(con_name.trim(), terms, sense, rhs)?;
    }
    Ok(model)
}

impl Model {
    pub(crate) fn variables_mut(&mut self) -> &mut [super::Variable] {
        &mut self.variables
    }
}

#[cfg(test)]
mod tests {
    use super::super::{HighsSolver, SolveOptions, Solver};
    use super::*;

    fn sample_model() -> Model {
        let mut m = Model::new("sample");
        let x = m.add_continuous("x", 0.0, 10.0).unwrap();
        let y = m.add_continuous("y", -1.5, f64::INFINITY).unwrap();
        let z = m.add_binary("z").unwrap();
        m.add_objective_term(x, 2.0);
        m.add_objective_term(y, 3.25);
        m.add_objective_term(z, -1.0);
        m.add_constraint("c0", vec![(x, 1.0), (y, 1.0)], ConstraintSense::Ge, 3.0).unwrap();
        m.add_constraint("c1", vec![(x, -2.5), (z, 4.0)], ConstraintSense::Le, 8.0).unwrap();
        m.add_constraint("c2", vec![(y, 1.0), (z, 1.0)], ConstraintSense::Eq, 1.0).unwrap();
        m
    }

    #[test]
    fn round_trip_preserves_structure() {
        let model = sample_model();
        let text = write_lp(&model);
        let back = read_lp(&text).unwrap();
        assert_eq!(model.num_vars(), back.num_vars());
        assert_eq!(model.num_constraints(), back.num_constraints());
        for (a, b) in model.variables().iter().zip(back.variables()) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.lower, b.lower);
            assert_eq!(a.upper, b.upper);
            assert_eq!(a.kind, b.kind);
        }
        assert_eq!(model.objective(), back.objective());
    }

    #[test]
    fn round_trip_preserves_solution() {
        let model = sample_model();
        let back = read_lp(&write_lp(&model)).unwrap();
        let solver = HighsSolver::default();
        let opts = SolveOptions::default();
        let a = solver.solve(&model, &opts).unwrap();
        let b = solver.solve(&back, &opts).unwrap();
        assert_eq!(a.status, b.status);
        let (oa, ob) = (a.objective.unwrap(), b.objective.unwrap());
        assert!((oa - ob).abs() <= 1e-9 * (1.0 + oa.abs()));
    }

    #[test]
    fn rejects_truncated_input() {
        let model = sample_model();
        let text = write_lp(&model);
        let cut = &text[..text.len() - 5];
        assert!(read_lp(cut).is_err());
    }
}
