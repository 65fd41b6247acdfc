//! Text serialization of nets.
//!
//! ```text
//! # so3round net
//! format_version 1
//! delta 0.3
//! seed 42
//! count 2
//! 1.0000000000000000e0 0.0000000000000000e0 0.0000000000000000e0 0.0000000000000000e0
//! ...
//! ```
//!
//! Quaternions are written with 17 significant digits, which round-trips
//! every `f64` exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::Net;
use crate::error::{Error, Result};
use crate::so3::Rotation;

pub const FORMAT_VERSION: u32 = 1;

const MAGIC: &str = "# so3round net";

pub fn save(net: &Net, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "format_version {FORMAT_VERSION}")?;
    writeln!(out, "delta {:?}", net.delta())?;
    writeln!(out, "seed {}", net.seed())?;
    writeln!(out, "count {}", net.len())?;
    for p in net.points() {
        let [w, x, y, z] = p.quaternion();
        writeln!(out, "{w:.16e} {x:.16e} {y:.16e} {z:.16e}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a net and checks that it is δ-separated.
pub fn load(path: &Path) -> Result<Net> {
    let text = fs::read_to_string(path)?;
    let net = parse(&text, path)?;
    let bad = net.separation_violations();
    if let Some(&(i, j)) = bad.first() {
        return Err(Error::Integrity(format!(
            "{} point pairs closer than delta {}; first is ({i}, {j}) at distance {}",
            bad.len(),
            net.delta(),
            net.points()[i].distance(&net.points()[j])
        )));
    }
    Ok(net)
}

fn parse(text: &str, path: &Path) -> Result<Net> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let mut field = |name: &str| -> Result<(usize, String)> {
        loop {
            let Some((no, line)) = lines.next() else {
                return Err(err(
                    text.lines().count() + 1,
                    format!("missing header field `{name}`"),
                ));
            };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return match line.split_once(' ') {
                Some((key, value)) if key == name => Ok((no, value.trim().to_string())),
                _ => Err(err(
                    no,
                    format!("expected header field `{name}`, found `{line}`"),
                )),
            };
        }
    };

    let (no, version) = field("format_version")?;
    if version != FORMAT_VERSION.to_string() {
        return Err(err(no, format!("unsupported format_version {version}")));
    }
    let (no, delta) = field("delta")?;
    let delta: f64 = delta
        .parse()
        .map_err(|e| err(no, format!("bad delta `{delta}`: {e}")))?;
    let (no, seed) = field("seed")?;
    let seed: u64 = seed
        .parse()
        .map_err(|e| err(no, format!("bad seed `{seed}`: {e}")))?;
    let (no, count) = field("count")?;
    let count: usize = count
        .parse()
        .map_err(|e| err(no, format!("bad count `{count}`: {e}")))?;

    let mut points = Vec::with_capacity(count);
    let mut last_line = no;
    for (no, line) in lines {
        last_line = no;
        if line.is_empty() {
            continue;
        }
        if points.len() == count {
            return Err(err(no, format!("more than {count} point lines")));
        }
        let mut q = [0.0; 4];
        let mut parts = line.split_whitespace();
        for (k, slot) in q.iter_mut().enumerate() {
            let tok = parts
                .next()
                .ok_or_else(|| err(no, format!("expected 4 components, found {k}")))?;
            *slot = tok
                .parse()
                .map_err(|e| err(no, format!("bad component `{tok}`: {e}")))?;
        }
        if parts.next().is_some() {
            return Err(err(no, "expected 4 components, found more".into()));
        }
        let r = Rotation::from_canonical(q)
            .ok_or_else(|| err(no, format!("{q:?} is not a canonical unit quaternion")))?;
        points.push(r);
    }
    if points.len() != count {
        return Err(err(
            last_line + 1,
            format!(
                "truncated: header says {count} points, found {}",
                points.len()
            ),
        ));
    }
    Net::from_points(delta, seed, points)
}
