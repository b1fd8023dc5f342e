//! Plain-text form: a header line `n J K d [approx=1]`, then one value per line.
//!
//! Cells are listed with the first axis (index 0) varying fastest. Values use the shortest decimal
//! string that parses back to the same `f64`, so write/read/write is byte-identical.

use std::fmt::Write as _;

use super::step::StepFunction;
use crate::error::{Error, Result};

pub fn to_text(f: &StepFunction) -> String {
    let mut s = String::with_capacity(16 * f.len() + 32);
    let _ = write!(s, "{} {} {} {}", f.dim(), f.level(), f.window(), f.depth());
    if f.approximate {
        s.push_str(" approx=1");
    }
    s.push('\n');
    for v in f.values() {
        let _ = writeln!(s, "{v:?}");
    }
    s
}

pub fn from_text(text: &str) -> Result<StepFunction> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if !(4..=5).contains(&toks.len()) {
        return Err(Error::Parse { line: hl, msg: "header must be `n J K d [approx=1]`".into() });
    }
    let bad = |what: &str| Error::Parse { line: hl, msg: format!("bad {what} in header") };
    let n: usize = toks[0].parse().map_err(|_| bad("n"))?;
    let j: i32 = toks[1].parse().map_err(|_| bad("J"))?;
    let k: i32 = toks[2].parse().map_err(|_| bad("K"))?;
    let d: u8 = toks[3].parse().map_err(|_| bad("d"))?;
    let approximate = match toks.get(4) {
        None | Some(&"approx=0") => false,
        Some(&"approx=1") => true,
        Some(_) => return Err(bad("flag")),
    };
    let mut f = StepFunction::zeros(n, j, k, d).map_err(|e| Error::Parse { line: hl, msg: e.to_string() })?;
    f.approximate = approximate;
    let expected = f.len();
    let mut count = 0usize;
    for (ln, l) in lines {
        if count == expected {
            return Err(Error::Parse { line: ln, msg: format!("more than {expected} values") });
        }
        let v: f64 = l.parse().map_err(|_| Error::Parse { line: ln, msg: format!("cannot parse value `{l}`") })?;
        f.values_mut()[count] = v;
        count += 1;
    }
    if count != expected {
        return Err(Error::Parse { line: hl, msg: format!("expected {expected} values, found {count}") });
    }
    Ok(f)
}
