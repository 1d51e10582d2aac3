//! JSON schema for families:
//! `{p, d, k, A, functions: [{b: {"i,j": val}, v: [[..]], u}]}` with
//! 1-indexed block labels in the `b` keys. The CLI round-trips this format.

use super::{MFamily, MIntegralQuadratic};
use crate::field::{Fp, FpMatrix, Prime};
use crate::quadform::QuadraticForm;
use crate::{Error, Result};
use std::collections::BTreeMap;

#[derive(serde::Serialize, serde::Deserialize)]
struct FamilyDoc {
    p: u64,
    d: usize,
    k: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<u64>>,
    functions: Vec<FunctionDoc>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct FunctionDoc {
    b: BTreeMap<String, u64>,
    v: Vec<Vec<u64>>,
    u: u64,
}

pub fn family_to_json(family: &MFamily) -> Result<String> {
    let form = family.form();
    let d = form.dim();
    let a: Vec<Vec<u64>> = (0..d)
        .map(|i| (0..d).map(|j| form.matrix()[(i, j)].tau()).collect())
        .collect();
    let functions = family
        .functions()
        .iter()
        .map(|f| {
            let mut b = BTreeMap::new();
            for i in 0..family.blocks() {
                for j in i..family.blocks() {
                    let c = f.b(i, j);
                    if !c.is_zero() {
                        b.insert(format!("{},{}", i + 1, j + 1), c.tau());
                    }
                }
            }
            FunctionDoc {
                b,
                v: (0..family.blocks())
                    .map(|i| f.v(i).iter().map(|x| x.tau()).collect())
                    .collect(),
                u: f.u().tau(),
            }
        })
        .collect();
    let doc = FamilyDoc { p: form.prime().get(), d, k: family.blocks(), a, functions };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::MalformedData(e.to_string()))
}

pub fn family_from_json(text: &str) -> Result<MFamily> {
    let doc: FamilyDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let p = Prime::new(doc.p)?;
    if doc.a.len() != doc.d || doc.a.iter().any(|r| r.len() != doc.d) {
        return Err(Error::Parse(format!("A must be {0}x{0}", doc.d)));
    }
    let flat: Vec<i64> = doc.a.iter().flatten().map(|&x| x as i64).collect();
    let a = FpMatrix::from_ints(doc.d, doc.d, &flat, p);
    let form = QuadraticForm::homogeneous(a)?;
    let mut functions = Vec::with_capacity(doc.functions.len());
    for fd in &doc.functions {
        let mut f = MIntegralQuadratic::zero(doc.k, doc.d, p);
        for (key, &val) in &fd.b {
            let (i, j) = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
                .ok_or_else(|| Error::Parse(format!("bad b key {key:?}")))?;
            if i == 0 || j == 0 || i > doc.k || j > doc.k {
                return Err(Error::Parse(format!("b key {key:?} out of range (1-indexed)")));
            }
            f.set_b(i - 1, j - 1, Fp::new(val, p));
        }
        if fd.v.len() != doc.k || fd.v.iter().any(|vi| vi.len() != doc.d) {
            return Err(Error::Parse("v must be k vectors of length d".into()));
        }
        for (i, vi) in fd.v.iter().enumerate() {
            f.set_v(i, vi.iter().map(|&x| Fp::new(x, p)).collect());
        }
        f.set_u(Fp::new(fd.u, p));
        functions.push(f);
    }
    MFamily::new(form, doc.k, functions)
}
