use std::fmt::Write;

use super::{ModelSpec, Relation, Sense, VarId, VarKind};

fn write_expr(out: &mut String, model: &ModelSpec, terms: &[(VarId, f64)]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (i, (id, coef)) in terms.iter().enumerate() {
        let name = &model.variables[id.0].name;
        match (i, *coef < 0.0) {
            (0, false) => {}
            (_, true) => out.push_str(" -"),
            (_, false) => out.push_str(" +"),
        }
        let _ = write!(out, " {} {name}", coef.abs());
    }
}

fn fmt_bound(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

pub(super) fn render(model: &ModelSpec) -> String {
    let mut out = String::new();
    out.push_str(match model.objective.sense {
        Sense::Minimize => "Minimize\n",
        Sense::Maximize => "Maximize\n",
    });
    out.push_str(" obj:");
    write_expr(&mut out, model, &model.objective.terms);
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name);
        write_expr(&mut out, model, &c.terms);
        let rel = match c.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(out, " {rel} {}", c.rhs);
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        if v.lower == v.upper {
            let _ = writeln!(out, " {} = {}", v.name, v.lower);
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", fmt_bound(v.lower), v.name, fmt_bound(v.upper));
        }
    }
    let binaries: Vec<&str> = model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for name in binaries {
            let _ = writeln!(out, " {name}");
        }
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn renders_all_sections() {
        let mut m = ModelSpec::new();
        let x = m.add_var("x", 0.0, 1.0, VarKind::Binary);
        let y = m.add_var("y", f64::NEG_INFINITY, f64::INFINITY, VarKind::Continuous);
        m.add_constraint("c1", [(x, 2.0), (y, -1.5)], Relation::Le, 4.0);
        m.set_objective(Sense::Maximize, [(y, 1.0)]);
        let text = m.to_lp_string();
        assert!(text.starts_with("Maximize\n obj: 1 y\n"));
        assert!(text.contains(" c1: 2 x - 1.5 y <= 4\n"));
        assert!(text.contains(" -inf <= y <= +inf\n"));
        assert!(text.contains("Binaries\n x\n"));
        assert!(text.ends_with("End\n"));
    }
}
