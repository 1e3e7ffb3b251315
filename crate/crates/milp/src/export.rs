//! Fixed-format MPS and CPLEX-style LP writers.
//!
//! Fixed MPS limits names to 8 characters. When any column (or row) name
//! does not fit, every column (or row) is renamed `C0000000`, `C0000001`, ...
//! in index order and the original names are listed in `*` comment lines.

use std::fmt::Write as _;

use crate::model::{Model, Sense, VarKind};

const OBJ_ROW: &str = "OBJ";

/// Row names used by both writers: `<tag>_<row index>`.
pub fn row_names(model: &Model) -> Vec<String> {
    model
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let tag = if r.tag.is_empty() { "r" } else { r.tag.as_str() };
            format!("{}_{}", sanitize(tag), i)
        })
        .collect()
}

fn sanitize(s: &str) -> String {
    let mut out: String = s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect();
    if out.starts_with(|c: char| c.is_ascii_digit()) || out.is_empty() {
        out.insert(0, '_');
    }
    out
}

fn mps_names(names: &[String], prefix: char) -> (Vec<String>, bool) {
    let fits = names.iter().all(|n| !n.is_empty() && n.len() <= 8 && !n.contains(char::is_whitespace) && n != OBJ_ROW);
    let unique = {
        let mut sorted: Vec<&String> = names.iter().collect();
        sorted.sort();
        sorted.windows(2).all(|w| w[0] != w[1])
    };
    if fits && unique {
        (names.to_vec(), false)
    } else {
        ((0..names.len()).map(|i| format!("{prefix}{i:07}")).collect(), true)
    }
}

/// Formats a number into at most 12 characters, dropping precision only
/// when the shortest round-trip representation does not fit.
fn num12(v: f64) -> String {
    let s = format!("{v}");
    if s.len() <= 12 {
        return s;
    }
    for prec in (0..=11).rev() {
        let e = format!("{v:.prec$e}");
        if e.len() <= 12 {
            return e;
        }
    }
    unreachable!("an f64 always fits 12 characters in short exponent form")
}

pub fn write_mps(model: &Model) -> String {
    let col_src: Vec<String> = model.variables.iter().map(|v| v.name.clone()).collect();
    let (cols, cols_renamed) = mps_names(&col_src, 'C');
    let row_src = row_names(model);
    let (rows, rows_renamed) = mps_names(&row_src, 'R');

    let mut out = String::new();
    if cols_renamed || rows_renamed {
        out.push_str("* name map\n");
        if cols_renamed {
            for (a, b) in cols.iter().zip(&col_src) {
                let _ = writeln!(out, "* {a} = {b}");
            }
        }
        if rows_renamed {
            for (a, b) in rows.iter().zip(&row_src) {
                let _ = writeln!(out, "* {a} = {b}");
            }
        }
    }
    let name: String = sanitize(&model.name).chars().take(8).collect();
    let _ = writeln!(out, "NAME          {name}");
    out.push_str("ROWS\n");
    let _ = writeln!(out, " N  {OBJ_ROW}");
    for (r, n) in model.rows.iter().zip(&rows) {
        let t = match r.sense {
            Sense::Le => 'L',
            Sense::Eq => 'E',
            Sense::Ge => 'G',
        };
        let _ = writeln!(out, " {t}  {n}");
    }

    // Column-major view of the rows.
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.num_vars()];
    for (i, r) in model.rows.iter().enumerate() {
        for &(j, a) in &r.coeffs {
            by_col[j].push((i, a));
        }
    }

    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0;
    for (j, v) in model.variables.iter().enumerate() {
        let is_int = v.kind == VarKind::Binary;
        if is_int != in_int {
            let kind = if is_int { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(out, "    {:<8}  {:<8}  {:<12}", format!("M{marker:07}"), "'MARKER'", kind);
            marker += usize::from(!is_int);
            in_int = is_int;
        }
        let mut entries: Vec<(&str, f64)> = Vec::new();
        if model.objective[j] != 0.0 || by_col[j].is_empty() {
            entries.push((OBJ_ROW, model.objective[j]));
        }
        for &(i, a) in &by_col[j] {
            entries.push((rows[i].as_str(), a));
        }
        for (row, a) in entries {
            let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", cols[j], row, num12(a));
        }
    }
    if in_int {
        let _ = writeln!(out, "    {:<8}  {:<8}  {:<12}", format!("M{marker:07}"), "'MARKER'", "'INTEND'");
    }

    out.push_str("RHS\n");
    if model.objective_offset != 0.0 {
        // Solvers read the objective-row RHS as minus the constant term.
        let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", "RHS", OBJ_ROW, num12(-model.objective_offset));
    }
    for (r, n) in model.rows.iter().zip(&rows) {
        if r.rhs != 0.0 {
            let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", "RHS", n, num12(r.rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for (v, n) in model.variables.iter().zip(&cols) {
        let line = |t: &str, val: f64| format!(" {t} {:<8}  {:<8}  {:>12}\n", "BND", n, num12(val));
        if v.kind == VarKind::Binary && v.lower == 0.0 && v.upper == 1.0 {
            let _ = writeln!(out, " BV {:<8}  {:<8}", "BND", n);
        } else if v.lower == v.upper {
            out.push_str(&line("FX", v.lower));
        } else {
            if v.lower != 0.0 {
                out.push_str(&line("LO", v.lower));
            }
            if v.upper.is_finite() {
                out.push_str(&line("UP", v.upper));
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

const LP_WIDTH: usize = 78;

fn lp_terms(out: &mut String, head: &str, terms: &[(f64, &str)], tail: &str) {
    let mut line = String::from(head);
    let mut first = true;
    let mut push = |line: &mut String, piece: String| {
        if line.len() + piece.len() > LP_WIDTH && line.trim().len() > 0 {
            out.push_str(line.trim_end());
            out.push('\n');
            line.clear();
            line.push_str("   ");
        }
        line.push_str(&piece);
    };
    for &(a, name) in terms {
        let sign = if a < 0.0 {
            "-"
        } else if first {
            ""
        } else {
            "+"
        };
        let mag = a.abs();
        let piece = if mag == 1.0 { format!("{sign} {name} ") } else { format!("{sign} {mag} {name} ") };
        push(&mut line, piece.trim_start().to_string());
        first = false;
    }
    if terms.is_empty() {
        push(&mut line, "0 ".to_string());
    }
    push(&mut line, tail.to_string());
    out.push_str(line.trim_end());
    out.push('\n');
}

pub fn write_lp(model: &Model) -> String {
    let cols: Vec<String> = model.variables.iter().map(|v| sanitize(&v.name)).collect();
    let rows = row_names(model);
    let mut out = String::new();
    let _ = writeln!(out, "\\ Problem: {}", model.name);
    out.push_str("Minimize\n");
    let obj: Vec<(f64, &str)> =
        model.objective.iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(j, &c)| (c, cols[j].as_str())).collect();
    let tail = if model.objective_offset != 0.0 {
        let o = model.objective_offset;
        format!("{} {}", if o < 0.0 { "-" } else { "+" }, o.abs())
    } else {
        String::new()
    };
    lp_terms(&mut out, " obj: ", &obj, &tail);
    out.push_str("Subject To\n");
    for (r, n) in model.rows.iter().zip(&rows) {
        let terms: Vec<(f64, &str)> = r.coeffs.iter().map(|&(j, a)| (a, cols[j].as_str())).collect();
        let tail = format!("{} {}", r.sense.symbol(), r.rhs);
        lp_terms(&mut out, &format!(" {n}: "), &terms, &tail);
    }
    out.push_str("Bounds\n");
    for (v, n) in model.variables.iter().zip(&cols) {
        if v.lower == v.upper {
            let _ = writeln!(out, " {n} = {}", v.lower);
        } else if v.upper.is_finite() {
            let _ = writeln!(out, " {} <= {n} <= {}", v.lower, v.upper);
        } else if v.lower != 0.0 {
            let _ = writeln!(out, " {n} >= {}", v.lower);
        }
    }
    let bins: Vec<&String> =
        model.variables.iter().zip(&cols).filter(|(v, _)| v.kind == VarKind::Binary).map(|(_, n)| n).collect();
    if !bins.is_empty() {
        out.push_str("Binaries\n");
        let mut line = String::new();
        for n in bins {
            if line.len() + n.len() + 1 > LP_WIDTH {
                let _ = writeln!(out, "{}", line.trim_end());
                line.clear();
            }
            line.push(' ');
            line.push_str(n);
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
    out.push_str("End\n");
    out
}
