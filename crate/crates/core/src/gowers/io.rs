//! Grid function serialization: a binary file with a `(p, d, D)` header of
//! three little-endian u64 followed by little-endian f64 pairs per complex
//! entry in index order, plus a JSON metadata sidecar at `<path>.json`.
//! Reads and writes are bit-exact.

use super::GridFunction;
use crate::field::Prime;
use crate::{Error, Result};
use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

#[derive(serde::Serialize, serde::Deserialize)]
struct Sidecar {
    p: u64,
    d: usize,
    codomain_dim: usize,
    points: usize,
    one_bounded: bool,
}

pub fn write_grid_function(f: &GridFunction, path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(&f.prime().get().to_le_bytes())?;
    w.write_all(&(f.dim() as u64).to_le_bytes())?;
    w.write_all(&(f.dim_out() as u64).to_le_bytes())?;
    for z in f.values() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()?;
    let sidecar = Sidecar {
        p: f.prime().get(),
        d: f.dim(),
        codomain_dim: f.dim_out(),
        points: f.points(),
        one_bounded: f.is_one_bounded(),
    };
    let json = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| Error::MalformedData(e.to_string()))?;
    std::fs::write(sidecar_path(path), json)?;
    Ok(())
}

pub fn read_grid_function(path: &Path) -> Result<GridFunction> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut u64buf = [0u8; 8];
    r.read_exact(&mut u64buf)?;
    let p = Prime::new(u64::from_le_bytes(u64buf))?;
    r.read_exact(&mut u64buf)?;
    let d = u64::from_le_bytes(u64buf) as usize;
    r.read_exact(&mut u64buf)?;
    let dim_out = u64::from_le_bytes(u64buf) as usize;
    if dim_out == 0 {
        return Err(Error::MalformedData("zero codomain dimension".into()));
    }
    let count = (p.get() as u128)
        .checked_pow(d as u32)
        .and_then(|n| n.checked_mul(dim_out as u128))
        .filter(|&n| n <= (1 << 34))
        .ok_or_else(|| Error::MalformedData("grid size out of range".into()))?;
    let mut values = Vec::with_capacity(count as usize);
    let mut f64buf = [0u8; 8];
    for _ in 0..count {
        r.read_exact(&mut f64buf)?;
        let re = f64::from_le_bytes(f64buf);
        r.read_exact(&mut f64buf)?;
        let im = f64::from_le_bytes(f64buf);
        values.push(Complex64::new(re, im));
    }
    let mut f = GridFunction::new(p, d, dim_out, values)?;
    f.verify_one_bounded();
    Ok(f)
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_os_string();
    os.push(".json");
    std::path::PathBuf::from(os)
}
