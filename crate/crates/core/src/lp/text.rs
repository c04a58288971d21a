//! LP-text rendering of an [`LpProblem`], close to the CPLEX LP format so the
//! dump can be fed to an external solver for cross-checking.
//!
//! ```text
//! \ <comment>
//! maximize
//!  obj: <terms>
//! subject to
//!  e<i>: <terms> = <rhs>
//!  u<i>: <terms> <= <rhs>
//! bounds
//!  <name> free | <name> >= <lo> | <name> <= <hi> | <lo> <= <name> <= <hi>
//! end
//! ```
//!
//! A term is `+<coef> <name>` or `-<coef> <name>`; zero coefficients are
//! omitted and an empty row is written as `0`. Numbers use Rust's shortest
//! round-trip formatting. Variables default to `x<j>` when unnamed.

use std::fmt::Write;

use super::problem::LpProblem;

pub fn to_lp_text(p: &LpProblem) -> String {
    let names: Vec<String> = match &p.names {
        Some(n) => n.iter().map(|s| sanitize(s)).collect(),
        None => (0..p.num_vars()).map(|j| format!("x{j}")).collect(),
    };
    let mut out = String::new();
    out.push_str("\\ robust-kelly LP dump\nmaximize\n obj:");
    write_terms(&mut out, &p.objective, &names);
    out.push_str("\nsubject to\n");
    for (i, (row, b)) in p.a_eq.iter().zip(&p.b_eq).enumerate() {
        let _ = write!(out, " e{i}:");
        write_terms(&mut out, row, &names);
        let _ = writeln!(out, " = {b}");
    }
    for (i, (row, b)) in p.a_ub.iter().zip(&p.b_ub).enumerate() {
        let _ = write!(out, " u{i}:");
        write_terms(&mut out, row, &names);
        let _ = writeln!(out, " <= {b}");
    }
    out.push_str("bounds\n");
    for (j, name) in names.iter().enumerate() {
        let (lo, hi) = (p.lower[j], p.upper[j]);
        let _ = match (lo.is_finite(), hi.is_finite()) {
            (false, false) => writeln!(out, " {name} free"),
            (true, false) => writeln!(out, " {name} >= {lo}"),
            (false, true) => writeln!(out, " {name} <= {hi}"),
            (true, true) => writeln!(out, " {lo} <= {name} <= {hi}"),
        };
    }
    out.push_str("end\n");
    out
}

fn write_terms(out: &mut String, coefs: &[f64], names: &[String]) {
    let mut any = false;
    for (c, name) in coefs.iter().zip(names) {
        if *c == 0.0 {
            continue;
        }
        any = true;
        let sign = if *c < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign}{} {name}", c.abs());
    }
    if !any {
        out.push_str(" 0");
    }
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '.' { c } else { '_' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_all_sections() {
        let mut p = LpProblem::new(2).with_objective(vec![1.0, -0.5]);
        p.add_eq(vec![1.0, 1.0], 1.0);
        p.add_ub(vec![0.0, 2.0], 3.0);
        p.set_free(1);
        p.names = Some(vec!["K[0]".into(), "W".into()]);
        let t = to_lp_text(&p);
        assert!(t.contains("maximize\n obj: +1 K_0_ -0.5 W\n"));
        assert!(t.contains(" e0: +1 K_0_ +1 W = 1\n"));
        assert!(t.contains(" u0: +2 W <= 3\n"));
        assert!(t.contains(" K_0_ >= 0\n W free\nend\n"));
    }
}
