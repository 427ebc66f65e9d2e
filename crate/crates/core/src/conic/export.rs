//! Plain-text triplet format for [`ConicProblem`].
//!
//! ```text
//! conic-problem 1
//! vars <n>
//! offset <value>
//! equalities <count>
//! blocks <count> <size_0> <size_1> ...
//! label <var> <text>          one per variable, text runs to end of line
//! c <var> <value>             objective coefficient
//! a <row> <var> <value>       equality matrix entry
//! b <row> <value>             equality right-hand side
//! f <block> <var> <i> <j> <value>   block coefficient, i <= j; var = -1 for the constant term
//! end
//! ```
//!
//! Floats are written in shortest round-trip form, so reading back gives a
//! bit-identical problem. Zero entries may be omitted. Lines starting with
//! `#` are comments.

use std::fmt::Write as _;

use super::{ConicError, ConicProblem, PsdBlock, SymEntry};

const MAGIC: &str = "conic-problem 1";

pub fn write_problem(p: &ConicProblem) -> String {
    let mut s = String::new();
    let sizes: Vec<String> = p.blocks.iter().map(|b| b.size.to_string()).collect();
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "vars {}", p.num_vars());
    let _ = writeln!(s, "offset {:?}", p.offset);
    let _ = writeln!(s, "equalities {}", p.num_equalities());
    let _ = writeln!(s, "blocks {} {}", p.blocks.len(), sizes.join(" "));
    for (i, l) in p.labels.iter().enumerate() {
        let _ = writeln!(s, "label {i} {}", l.replace('\n', " "));
    }
    for (i, c) in p.objective.iter().enumerate() {
        if *c != 0.0 {
            let _ = writeln!(s, "c {i} {c:?}");
        }
    }
    for (r, row) in p.eq_rows.iter().enumerate() {
        for (v, c) in row {
            let _ = writeln!(s, "a {r} {v} {c:?}");
        }
    }
    for (r, g) in p.eq_rhs.iter().enumerate() {
        let _ = writeln!(s, "b {r} {g:?}");
    }
    for (bi, b) in p.blocks.iter().enumerate() {
        for e in &b.constant {
            let _ = writeln!(s, "f {bi} -1 {} {} {:?}", e.row, e.col, e.value);
        }
        for (v, e) in &b.linear {
            let _ = writeln!(s, "f {bi} {v} {} {} {:?}", e.row, e.col, e.value);
        }
    }
    s.push_str("end\n");
    s
}

fn err(line: usize, msg: impl std::fmt::Display) -> ConicError {
    ConicError::Format(format!("line {}: {msg}", line + 1))
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, ConicError> {
    tok.ok_or_else(|| err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| err(line, format!("bad {what}")))
}

pub fn read_problem(text: &str) -> Result<ConicProblem, ConicError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, l)) if l.trim() == MAGIC => {}
        _ => return Err(err(0, "missing header")),
    }
    let mut p = ConicProblem::new();
    let mut ended = false;
    for (ln, line) in lines {
        let mut tok = line.split_whitespace();
        let key = tok.next().unwrap_or("");
        match key {
            "vars" => {
                let n: usize = parse(tok.next(), ln, "count")?;
                p.objective = vec![0.0; n];
                p.labels = (0..n).map(|i| format!("y{i}")).collect();
            }
            "offset" => p.offset = parse(tok.next(), ln, "offset")?,
            "equalities" => {
                let m: usize = parse(tok.next(), ln, "count")?;
                p.eq_rows = vec![vec![]; m];
                p.eq_rhs = vec![0.0; m];
            }
            "blocks" => {
                let k: usize = parse(tok.next(), ln, "count")?;
                p.blocks = (0..k).map(|_| parse(tok.next(), ln, "block size").map(PsdBlock::new)).collect::<Result<_, _>>()?;
            }
            "label" => {
                let i: usize = parse(tok.next(), ln, "variable")?;
                let rest = line.trim_start()["label".len()..].trim_start();
                let text = rest.split_once(char::is_whitespace).map(|x| x.1).unwrap_or("");
                *p.labels.get_mut(i).ok_or_else(|| err(ln, "variable out of range"))? = text.to_string();
            }
            "c" => {
                let i: usize = parse(tok.next(), ln, "variable")?;
                let v: f64 = parse(tok.next(), ln, "value")?;
                *p.objective.get_mut(i).ok_or_else(|| err(ln, "variable out of range"))? = v;
            }
            "a" => {
                let r: usize = parse(tok.next(), ln, "row")?;
                let v: usize = parse(tok.next(), ln, "variable")?;
                let c: f64 = parse(tok.next(), ln, "value")?;
                p.eq_rows.get_mut(r).ok_or_else(|| err(ln, "row out of range"))?.push((v, c));
            }
            "b" => {
                let r: usize = parse(tok.next(), ln, "row")?;
                let g: f64 = parse(tok.next(), ln, "value")?;
                *p.eq_rhs.get_mut(r).ok_or_else(|| err(ln, "row out of range"))? = g;
            }
            "f" => {
                let b: usize = parse(tok.next(), ln, "block")?;
                let v: i64 = parse(tok.next(), ln, "variable")?;
                let i: usize = parse(tok.next(), ln, "row index")?;
                let j: usize = parse(tok.next(), ln, "column index")?;
                let val: f64 = parse(tok.next(), ln, "value")?;
                let blk = p.blocks.get_mut(b).ok_or_else(|| err(ln, "block out of range"))?;
                let e = SymEntry { row: i, col: j, value: val };
                if v < 0 {
                    blk.constant.push(e);
                } else {
                    blk.linear.push((v as usize, e));
                }
            }
            "end" => {
                ended = true;
                break;
            }
            other => return Err(err(ln, format!("unknown record `{other}`"))),
        }
    }
    if !ended {
        return Err(ConicError::Format("missing `end`".into()));
    }
    p.validate()?;
    Ok(p)
}
