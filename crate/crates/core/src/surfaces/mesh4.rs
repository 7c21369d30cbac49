//! The MESH4 text format.
//!
//! ```text
//! MESH4 <nv> <nf>
//! x1 x2 x3 x4        (nv lines)
//! i j k              (nf lines, zero-based)
//! B i j k ...        (optional, fixed vertex indices)
//! ```

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::TriMesh4;
use crate::error::{Error, Result};
use crate::exterior_algebra::Vector4;

fn format_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        line,
        msg: msg.into(),
    }
}

pub fn read_mesh4<R: BufRead>(reader: R) -> Result<TriMesh4> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let (n, header) = lines
        .next()
        .ok_or_else(|| format_error(1, "empty file"))?;
    let header = header?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 || parts[0] != "MESH4" {
        return Err(format_error(n, "expected header `MESH4 <nv> <nf>`"));
    }
    let count = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| format_error(n, format!("bad count `{s}`")))
    };
    let (nv, nf) = (count(parts[1])?, count(parts[2])?);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, line) = lines
            .next()
            .ok_or_else(|| format_error(0, "file ends inside the vertex block"))?;
        let line = line?;
        let xs: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| format_error(n, format!("bad coordinate: {e}")))?;
        if xs.len() != 4 {
            return Err(format_error(n, format!("expected 4 coordinates, got {}", xs.len())));
        }
        vertices.push(Vector4::new(xs[0], xs[1], xs[2], xs[3]));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (n, line) = lines
            .next()
            .ok_or_else(|| format_error(0, "file ends inside the face block"))?;
        let line = line?;
        let ix: Vec<usize> = line
            .split_whitespace()
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| format_error(n, format!("bad index: {e}")))?;
        if ix.len() != 3 {
            return Err(format_error(n, format!("expected 3 indices, got {}", ix.len())));
        }
        if ix.iter().any(|&i| i >= nv) {
            return Err(format_error(n, "vertex index out of range"));
        }
        faces.push([ix[0], ix[1], ix[2]]);
    }
    let mut fixed = vec![false; nv];
    for (n, line) in lines {
        let line = line?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some("B") {
            return Err(format_error(n, "expected a `B` line after the face block"));
        }
        for s in parts {
            let i: usize = s
                .parse()
                .map_err(|_| format_error(n, format!("bad boundary index `{s}`")))?;
            if i >= nv {
                return Err(format_error(n, "boundary index out of range"));
            }
            fixed[i] = true;
        }
    }
    TriMesh4::new(vertices, faces, fixed)
}

/// Coordinates are written with 17 significant digits, fixed vertices on `B`
/// lines of at most 16 indices.
pub fn write_mesh4<W: Write>(mesh: &TriMesh4, mut out: W) -> Result<()> {
    let mut s = String::new();
    writeln!(s, "MESH4 {} {}", mesh.vertices().len(), mesh.faces().len()).unwrap();
    for v in mesh.vertices() {
        writeln!(s, "{:.16e} {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2], v[3]).unwrap();
    }
    for f in mesh.faces() {
        writeln!(s, "{} {} {}", f[0], f[1], f[2]).unwrap();
    }
    let fixed: Vec<usize> = (0..mesh.vertices().len()).filter(|&i| mesh.fixed()[i]).collect();
    for chunk in fixed.chunks(16) {
        s.push('B');
        for i in chunk {
            write!(s, " {i}").unwrap();
        }
        s.push('\n');
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}
