//! Line-oriented text formats for trusses, right-hand sides and fretsaw maps.
//!
//! Truss files hold `v <x> <y>`, `e <i> <j> <gamma>` and optional
//! `f <i> <j> <k>` records; `#` starts a comment. When no face records are
//! present the faces are inferred from the elements.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fretsaw::FretsawExtension;
use crate::geometry::Vec2;
use crate::truss::{Element, Truss};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what} '{tok}'")))
}

pub fn parse_truss(text: &str) -> Result<Truss> {
    let mut positions = Vec::new();
    let mut elements = Vec::new();
    let mut faces = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tok = content.split_whitespace();
        let Some(kind) = tok.next() else { continue };
        match kind {
            "v" => {
                let x: f64 = field(tok.next(), line, "x coordinate")?;
                let y: f64 = field(tok.next(), line, "y coordinate")?;
                positions.push(Vec2::new(x, y));
            }
            "e" => {
                let i = field(tok.next(), line, "vertex index")?;
                let j = field(tok.next(), line, "vertex index")?;
                let g = field(tok.next(), line, "weight")?;
                elements.push(Element::new(i, j, g));
            }
            "f" => {
                let a = field(tok.next(), line, "vertex index")?;
                let b = field(tok.next(), line, "vertex index")?;
                let c = field(tok.next(), line, "vertex index")?;
                faces.push([a, b, c]);
            }
            other => return Err(parse_err(line, format!("unknown record '{other}'"))),
        }
        if let Some(extra) = tok.next() {
            return Err(parse_err(line, format!("unexpected token '{extra}'")));
        }
    }
    let faces = if faces.is_empty() { None } else { Some(faces) };
    Truss::new(positions, elements, faces)
}

/// Writes every vertex, element and face. `{:?}` float formatting is
/// shortest-round-trip, so reading the text back reproduces the truss exactly.
pub fn format_truss(truss: &Truss) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# {} vertices, {} elements, {} faces",
        truss.vertex_count(),
        truss.elements().len(),
        truss.faces().len()
    );
    for p in truss.positions() {
        let _ = writeln!(s, "v {:?} {:?}", p.x, p.y);
    }
    for e in truss.elements() {
        let _ = writeln!(s, "e {} {} {:?}", e.i, e.j, e.gamma);
    }
    for f in truss.faces() {
        let _ = writeln!(s, "f {} {} {}", f[0], f[1], f[2]);
    }
    s
}

pub fn read_truss(path: &Path) -> Result<Truss> {
    parse_truss(&std::fs::read_to_string(path)?)
}

pub fn write_truss(path: &Path, truss: &Truss) -> Result<()> {
    std::fs::write(path, format_truss(truss))?;
    Ok(())
}

/// Whitespace-separated floats, `#` comments allowed.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        for tok in content.split_whitespace() {
            out.push(field(Some(tok), k + 1, "number")?);
        }
    }
    Ok(out)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    parse_vector(&std::fs::read_to_string(path)?)
}

pub fn format_vector(x: &[f64]) -> String {
    let mut s = String::new();
    for pair in x.chunks(2) {
        let line: Vec<String> = pair.iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

/// Sidecar for an extended truss: `p <ext_vertex> <orig_vertex>` and
/// `r <ext_face> <orig_face>` lines.
pub fn format_fretsaw_map(ext: &FretsawExtension) -> String {
    let mut s = String::new();
    for (i, &p) in ext.pi.iter().enumerate() {
        let _ = writeln!(s, "p {i} {p}");
    }
    for (f, &r) in ext.rho.iter().enumerate() {
        let _ = writeln!(s, "r {f} {r}");
    }
    s
}

/// Parses a sidecar map into `(pi, rho)`.
pub fn parse_fretsaw_map(text: &str) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut pi = Vec::new();
    let mut rho = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tok = content.split_whitespace();
        let Some(kind) = tok.next() else { continue };
        let a: usize = field(tok.next(), line, "index")?;
        let b: usize = field(tok.next(), line, "index")?;
        let target = match kind {
            "p" => &mut pi,
            "r" => &mut rho,
            other => return Err(parse_err(line, format!("unknown record '{other}'"))),
        };
        if a != target.len() {
            return Err(parse_err(line, format!("expected index {}, got {a}", target.len())));
        }
        target.push(b);
    }
    Ok((pi, rho))
}
