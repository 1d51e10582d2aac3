//! Textual form format: `p=5 d=3 A=[[1,0,0],[0,1,0],[0,0,1]] u=[0,0,0] v=0`.
//! Parsed and emitted identically.

use super::QuadraticForm;
use crate::field::{Fp, FpMatrix, Prime};
use crate::{Error, Result};

pub fn parse_form(text: &str) -> Result<QuadraticForm> {
    let mut p = None;
    let mut d = None;
    let mut a = None;
    let mut u = None;
    let mut v = None;
    for tok in text.split_whitespace() {
        let (key, val) = tok
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {tok:?}")))?;
        match key {
            "p" => p = Some(parse_u64(val)?),
            "d" => d = Some(parse_u64(val)? as usize),
            "A" => a = Some(parse_nested(val)?),
            "u" => u = Some(parse_flat(val)?),
            "v" => v = Some(parse_i64(val)?),
            other => return Err(Error::Parse(format!("unknown form field {other:?}"))),
        }
    }
    let p = Prime::new(p.ok_or_else(|| Error::Parse("missing p".into()))?)?;
    let d = d.ok_or_else(|| Error::Parse("missing d".into()))?;
    let rows = a.ok_or_else(|| Error::Parse("missing A".into()))?;
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::Parse(format!("A must be {d}x{d}")));
    }
    let flat: Vec<i64> = rows.into_iter().flatten().collect();
    let a = FpMatrix::from_ints(d, d, &flat, p);
    let uv = u.ok_or_else(|| Error::Parse("missing u".into()))?;
    if uv.len() != d {
        return Err(Error::Parse(format!("u must have length {d}")));
    }
    let u: Vec<Fp> = uv.into_iter().map(|x| Fp::from_int(x, p)).collect();
    let v = Fp::from_int(v.ok_or_else(|| Error::Parse("missing v".into()))?, p);
    QuadraticForm::new(a, u, v)
}

fn parse_u64(s: &str) -> Result<u64> {
    s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

fn parse_i64(s: &str) -> Result<i64> {
    s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

fn parse_flat(s: &str) -> Result<Vec<i64>> {
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [..], got {s:?}")))?;
    if inner.is_empty() {
        return Ok(vec![]);
    }
    inner.split(',').map(parse_i64).collect()
}

fn parse_nested(s: &str) -> Result<Vec<Vec<i64>>> {
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [[..],..], got {s:?}")))?;
    let mut rows = Vec::new();
    let mut depth = 0usize;
    let mut start = None;
    for (i, c) in inner.char_indices() {
        match c {
            '[' => {
                if depth == 0 {
                    start = Some(i);
                }
                depth += 1;
            }
            ']' => {
                depth = depth.checked_sub(1).ok_or_else(|| Error::Parse("unbalanced ]".into()))?;
                if depth == 0 {
                    let seg = &inner[start.take().unwrap()..=i];
                    rows.push(parse_flat(seg)?);
                }
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse("unbalanced [".into()));
    }
    Ok(rows)
}

impl std::fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "p={} d={} A=[", self.prime(), self.dim())?;
        for i in 0..self.dim() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.dim() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.matrix()[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "] u=[")?;
        for (j, x) in self.linear_part().iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "] v={}", self.constant_part())
    }
}
