//! A compact text form for phase patterns.
//!
//! A pattern is a list of row templates. Each template is a comma-separated
//! list of cells, and both the row list and every cell list repeat cyclically
//! to fill `n×n`. A cell is `.` for zero or a signed sum of names such as
//! `c-a+g`.

use crate::error::ChmError;

/// One cell: `(name, coefficient)` terms.
pub(crate) type Cell = Vec<(String, i64)>;

pub(crate) fn parse_cell(text: &str) -> Result<Cell, ChmError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s == "." || s.is_empty() {
        return Ok(Vec::new());
    }
    let mut terms: Cell = Vec::new();
    let mut sign = 1i64;
    let mut name = String::new();
    let mut flush = |name: &mut String, sign: i64| -> Result<(), ChmError> {
        if name.is_empty() {
            return Err(ChmError::InvalidPattern(format!("dangling sign in `{text}`")));
        }
        match terms.iter_mut().find(|(n, _)| n == name) {
            Some(t) => t.1 += sign,
            None => terms.push((std::mem::take(name), sign)),
        }
        name.clear();
        Ok(())
    };
    for (pos, ch) in s.chars().enumerate() {
        match ch {
            '+' | '-' => {
                if pos > 0 {
                    flush(&mut name, sign)?;
                }
                sign = if ch == '-' { -1 } else { 1 };
            }
            c if c.is_ascii_alphanumeric() || c == '_' => name.push(c),
            c => {
                return Err(ChmError::InvalidPattern(format!(
                    "unexpected `{c}` in cell `{text}`"
                )))
            }
        }
    }
    flush(&mut name, sign)?;
    terms.retain(|(_, k)| *k != 0);
    Ok(terms)
}

/// Expands row templates to an `n×n` grid of cells.
pub(crate) fn expand(n: usize, rows: &[&str]) -> Result<Vec<Cell>, ChmError> {
    if rows.is_empty() || !n.is_multiple_of(rows.len()) {
        return Err(ChmError::InvalidPattern(format!(
            "{} row templates do not tile {n} rows",
            rows.len()
        )));
    }
    let parsed: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| r.split(',').map(parse_cell).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    for (k, r) in parsed.iter().enumerate() {
        if !n.is_multiple_of(r.len()) {
            return Err(ChmError::InvalidPattern(format!(
                "row template {k} has {} cells, which do not tile {n} columns",
                r.len()
            )));
        }
    }
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let row = &parsed[i % parsed.len()];
        for j in 0..n {
            out.push(row[j % row.len()].clone());
        }
    }
    Ok(out)
}

/// The coefficient matrix of `name` in an expanded grid.
pub(crate) fn coefficients(cells: &[Cell], name: &str) -> Vec<f64> {
    cells
        .iter()
        .map(|c| {
            c.iter()
                .filter(|(n, _)| n == name)
                .map(|(_, k)| *k as f64)
                .sum()
        })
        .collect()
}

/// Every name used in a grid, in order of first appearance.
pub(crate) fn names(cells: &[Cell]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for c in cells {
        for (n, _) in c {
            if !out.contains(n) {
                out.push(n.clone());
            }
        }
    }
    out
}

pub(crate) fn transpose(n: usize, r: &[f64]) -> Vec<f64> {
    (0..n * n).map(|idx| r[(idx % n) * n + idx / n]).collect()
}
