//! CPLEX-style LP text serialization.

use std::fmt::Write;

use super::model::{LinearExpr, MilpModel, VarKind};
use crate::error::Result;

const TERMS_PER_LINE: usize = 8;

fn push_expr(out: &mut String, expr: &LinearExpr, model: &MilpModel, fallback: &str) {
    if expr.terms().is_empty() {
        let _ = write!(out, "0 {fallback}");
        return;
    }
    for (i, &(v, c)) in expr.terms().iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let name = &model.var(v).name;
        let mag = c.abs();
        let sign = if c < 0.0 { "-" } else { "+" };
        match (i == 0, mag == 1.0) {
            (true, true) if c < 0.0 => {
                let _ = write!(out, "- {name}");
            }
            (true, true) => out.push_str(name),
            (true, false) if c < 0.0 => {
                let _ = write!(out, "- {mag} {name}");
            }
            (true, false) => {
                let _ = write!(out, "{mag} {name}");
            }
            (false, true) => {
                let _ = write!(out, " {sign} {name}");
            }
            (false, false) => {
                let _ = write!(out, " {sign} {mag} {name}");
            }
        }
    }
}

fn fmt_bound(x: f64) -> String {
    if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

/// Render `model` as an LP document.
///
/// Output order follows registration order, so identical models produce
/// byte-identical text.
pub fn write_lp(model: &MilpModel) -> Result<String> {
    model.validate()?;
    let fallback = model
        .vars()
        .first()
        .map(|v| v.name.clone())
        .unwrap_or_else(|| "_dummy".into());

    let mut out = String::new();
    out.push_str("\\ gridsizer MILP\nMinimize\n obj: ");
    let obj = model.objective();
    push_expr(&mut out, obj, model, &fallback);
    if obj.constant_part() != 0.0 {
        // the LP grammar accepts a bare constant in the objective
        let c = obj.constant_part();
        let _ = write!(out, " {} {}", if c < 0.0 { "-" } else { "+" }, c.abs());
    }
    out.push_str("\nSubject To\n");

    let mut referenced = vec![false; model.num_vars()];
    for &(v, _) in obj.terms() {
        referenced[v.index()] = true;
    }
    for c in model.constraints() {
        for &(v, _) in c.expr.terms() {
            referenced[v.index()] = true;
        }
        let _ = write!(out, " {}: ", c.name);
        push_expr(&mut out, &c.expr, model, &fallback);
        let _ = writeln!(out, " {} {}", c.sense, c.rhs);
    }

    out.push_str("Bounds\n");
    for (v, used) in model.vars().iter().zip(&referenced) {
        let name = &v.name;
        let (lo, hi) = (v.lower, v.upper);
        match v.kind {
            VarKind::Binary => {
                if lo != 0.0 || hi != 1.0 {
                    let _ = writeln!(out, " {} <= {name} <= {}", fmt_bound(lo), fmt_bound(hi));
                }
            }
            VarKind::Continuous => {
                if lo == hi {
                    let _ = writeln!(out, " {name} = {}", fmt_bound(lo));
                } else if lo == 0.0 && hi == f64::INFINITY {
                    if !used {
                        let _ = writeln!(out, " {name} >= 0");
                    }
                } else if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
                    let _ = writeln!(out, " {name} free");
                } else if hi == f64::INFINITY {
                    let _ = writeln!(out, " {name} >= {}", fmt_bound(lo));
                } else {
                    let _ = writeln!(out, " {} <= {name} <= {}", fmt_bound(lo), fmt_bound(hi));
                }
            }
        }
    }

    let binaries: Vec<&str> = model
        .vars()
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for chunk in binaries.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    Ok(out)
}
