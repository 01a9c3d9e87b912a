//! CPLEX-style LP text export, for auditing a model by eye or handing it to
//! an external solver.

use std::fmt::Write;

use super::{Col, MilpProblem, Sense, VarKind};

const MAX_LINE: usize = 200;

/// LP-safe column name: `x<col>_<name>` with disallowed characters replaced.
/// The column prefix keeps names unique after sanitizing.
pub fn lp_column_name(col: Col, name: &str) -> String {
    let mut out = format!("x{}_", col.0);
    out.extend(name.chars().map(|c| {
        if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
            c
        } else {
            '_'
        }
    }));
    out.truncate(250);
    out
}

fn number(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

struct Wrapped<'a> {
    out: &'a mut String,
    line: usize,
}

impl Wrapped<'_> {
    fn token(&mut self, tok: &str) {
        if self.line + tok.len() + 1 > MAX_LINE {
            self.out.push_str("\n   ");
            self.line = 3;
        }
        self.out.push(' ');
        self.out.push_str(tok);
        self.line += tok.len() + 1;
    }
}

fn write_expr(out: &mut String, start: usize, terms: &[(Col, f64)], names: &[String]) {
    let mut w = Wrapped { out, line: start };
    if terms.is_empty() {
        w.token("0");
        if let Some(first) = names.first() {
            w.token(first);
        }
        return;
    }
    for (k, &(c, a)) in terms.iter().enumerate() {
        let sign = if a < 0.0 { "-" } else { "+" };
        if k > 0 || a < 0.0 {
            w.token(sign);
        }
        w.token(&format!("{} {}", number(a.abs()), names[c.0]));
    }
}

/// Render `problem` in LP format. `names` gives one display name per column
/// (use [`lp_column_name`] to derive them); `None` numbers columns `x0..`.
pub fn write_lp(problem: &MilpProblem, names: Option<&[String]>) -> String {
    let generated: Vec<String>;
    let names: &[String] = match names {
        Some(n) => n,
        None => {
            generated = (0..problem.num_vars()).map(|j| format!("x{j}")).collect();
            &generated
        }
    };
    assert_eq!(names.len(), problem.num_vars());

    let mut out = String::new();
    out.push_str(match problem.sense {
        Sense::Minimize => "Minimize\n",
        Sense::Maximize => "Maximize\n",
    });
    out.push_str(" obj:");
    write_expr(&mut out, 5, &problem.objective, names);
    out.push_str("\nSubject To\n");
    for (i, row) in problem.rows.iter().enumerate() {
        let label = format!(" r{i}:");
        out.push_str(&label);
        write_expr(&mut out, label.len(), &row.coeffs, names);
        let _ = writeln!(out, " {} {}", row.relation.symbol(), number(row.rhs));
    }

    out.push_str("Bounds\n");
    for ((n, &lo), &hi) in names.iter().zip(&problem.lower).zip(&problem.upper) {
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) if lo == hi => {
                let _ = writeln!(out, " {n} = {}", number(lo));
            }
            (true, true) => {
                let _ = writeln!(out, " {} <= {n} <= {}", number(lo), number(hi));
            }
            (true, false) => {
                let _ = writeln!(out, " {n} >= {}", number(lo));
            }
            (false, true) => {
                let _ = writeln!(out, " -inf <= {n} <= {}", number(hi));
            }
            (false, false) => {
                let _ = writeln!(out, " {n} free");
            }
        }
    }

    for (kind, header) in [(VarKind::Integer, "General"), (VarKind::Binary, "Binary")] {
        let cols: Vec<&String> = (0..problem.num_vars())
            .filter(|&j| problem.kinds[j] == kind)
            .map(|j| &names[j])
            .collect();
        if cols.is_empty() {
            continue;
        }
        let _ = writeln!(out, "{header}");
        let mut w = Wrapped {
            out: &mut out,
            line: 0,
        };
        for c in cols {
            w.token(c);
        }
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::Relation;

    #[test]
    fn small_model_renders_all_sections() {
        let mut p = MilpProblem::new(Sense::Minimize);
        let x = p.add_column(VarKind::Binary, 0.0, 1.0).unwrap();
        let y = p.add_column(VarKind::Integer, 0.0, 3.0).unwrap();
        let z = p.add_column(VarKind::Continuous, -80.5, 80.5).unwrap();
        p.set_objective(Sense::Minimize, vec![(x, 300.0), (y, 2.5)]);
        p.add_row(vec![(x, 1.0), (y, -1.0), (z, 0.5)], Relation::Ge, -2.0)
            .unwrap();
        p.add_row(vec![], Relation::Le, 0.0).unwrap();
        let text = write_lp(&p, None);
        assert_eq!(
            text,
            "Minimize\n obj: 300 x0 + 2.5 x1\nSubject To\n r0: 1 x0 - 1 x1 + 0.5 x2 >= -2\n r1: 0 x0 <= 0\n\
             Bounds\n 0 <= x0 <= 1\n 0 <= x1 <= 3\n -80.5 <= x2 <= 80.5\nGeneral\n x1\nBinary\n x0\nEnd\n"
        );
    }

    #[test]
    fn long_rows_are_wrapped() {
        let mut p = MilpProblem::new(Sense::Maximize);
        let cols: Vec<Col> = (0..100)
            .map(|_| p.add_column(VarKind::Binary, 0.0, 1.0).unwrap())
            .collect();
        p.add_row(cols.iter().map(|&c| (c, 1.0)).collect(), Relation::Le, 1.0)
            .unwrap();
        let text = write_lp(&p, None);
        assert!(text.lines().all(|l| l.len() <= MAX_LINE + 20));
        assert!(text.starts_with("Maximize"));
    }

    #[test]
    fn names_are_sanitized() {
        assert_eq!(lp_column_name(Col(7), "S A.F-0:AB"), "x7_S_A.F_0_AB");
    }
}
