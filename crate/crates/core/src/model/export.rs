//! Text export of the assembled model in CPLEX LP format, so the program
//! can be cross-checked with external solvers.

use crate::model::ir::{ModelIr, Sense, VarKind};
use std::fmt::Write;

fn push_terms(out: &mut String, model: &ModelIr, terms: &[(crate::model::ir::VarId, f64)]) {
    let mut first = true;
    for &(v, c) in terms {
        let name = model.var(v).name.to_string();
        if first {
            let _ = write!(out, "{c} {name}");
            first = false;
        } else if c < 0.0 {
            let _ = write!(out, " - {} {name}", -c);
        } else {
            let _ = write!(out, " + {c} {name}");
        }
    }
    if first {
        out.push('0');
    }
}

/// Renders the model as an LP-format string: objective, constraint rows
/// with their tags as names, bounds, and the binary section.
pub fn to_lp_text(model: &ModelIr) -> String {
    let mut out = String::new();
    out.push_str("\\ generated model export (LP format)\n");
    out.push_str("Minimize\n obj: ");
    push_terms(&mut out, model, &model.objective.terms);
    out.push_str("\nSubject To\n");
    for (i, c) in model.constraints.iter().enumerate() {
        let name: String = c
            .tag
            .chars()
            .map(|ch| if ch.is_alphanumeric() || ch == '_' { ch } else { '_' })
            .collect();
        let _ = write!(out, " r{i}_{name}: ");
        push_terms(&mut out, model, &c.expr.terms);
        let sense = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {sense} {}", c.rhs);
    }
    out.push_str("Bounds\n");
    for def in &model.vars {
        if def.kind == VarKind::Binary {
            continue;
        }
        let _ = writeln!(out, " {} <= {} <= {}", def.lb, def.name, def.ub);
    }
    out.push_str("Binaries\n");
    for def in &model.vars {
        if def.kind == VarKind::Binary {
            let _ = writeln!(out, " {}", def.name);
        }
    }
    out.push_str("End\n");
    out
}
