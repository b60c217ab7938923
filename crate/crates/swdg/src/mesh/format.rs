//! Plain-text mesh files.
//!
//! The format has three sections, each introduced by a header line with a
//! count. Vertex coordinates are written with 17 significant digits so a
//! save/load round trip reproduces every f64 bit for bit.
//!
//! ```text
//! VERTICES <n>
//! <x> <y>            (n lines, 0-based implicit indices)
//! CELLS <m>
//! <v0> <v1> <v2>     (m lines, counterclockwise)
//! BOUNDARY <k>
//! <va> <vb> <tag>    (k lines; tag: wall | transparent | inflow | periodic:<id>)
//! ```
//!
//! Blank lines and `#` comments are ignored. The BOUNDARY section may be
//! omitted entirely; untagged boundary edges default to walls.

use super::{BoundaryTag, Mesh};
use crate::error::MeshError;
use crate::geom::Point;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

pub fn save_mesh(mesh: &Mesh, path: &Path) -> Result<(), MeshError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "VERTICES {}", mesh.num_vertices())?;
    for v in 0..mesh.num_vertices() {
        let p = mesh.vertex(v);
        writeln!(out, "{:.16e} {:.16e}", p.x, p.y)?;
    }
    writeln!(out, "CELLS {}", mesh.num_cells())?;
    for c in 0..mesh.num_cells() {
        let [a, b, d] = mesh.cell_vertices(c);
        writeln!(out, "{a} {b} {d}")?;
    }
    let tagged: Vec<_> = mesh
        .edges()
        .iter()
        .filter_map(|e| e.boundary.map(|t| (e.vertices[0], e.vertices[1], t)))
        .collect();
    writeln!(out, "BOUNDARY {}", tagged.len())?;
    for (a, b, tag) in tagged {
        writeln!(out, "{a} {b} {}", tag.as_str())?;
    }
    out.flush()?;
    Ok(())
}

pub fn load_mesh(path: &Path) -> Result<Mesh, MeshError> {
    let file = std::fs::File::open(path)?;
    let mut lines = Lines::new(BufReader::new(file));

    let (nv, line) = lines.header("VERTICES")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (text, line) = lines.content()?;
        let mut it = text.split_whitespace();
        let x = parse_f64(it.next(), line)?;
        let y = parse_f64(it.next(), line)?;
        if it.next().is_some() {
            return Err(fmt_err(line, "expected exactly two coordinates"));
        }
        vertices.push(Point::new(x, y));
    }
    let _ = line;

    let (nc, _) = lines.header("CELLS")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (text, line) = lines.content()?;
        let mut it = text.split_whitespace();
        let a = parse_usize(it.next(), line)?;
        let b = parse_usize(it.next(), line)?;
        let c = parse_usize(it.next(), line)?;
        if it.next().is_some() {
            return Err(fmt_err(line, "expected exactly three vertex indices"));
        }
        cells.push([a, b, c]);
    }

    let mut boundary = Vec::new();
    if let Some((nb, _)) = lines.optional_header("BOUNDARY")? {
        for _ in 0..nb {
            let (text, line) = lines.content()?;
            let mut it = text.split_whitespace();
            let a = parse_usize(it.next(), line)?;
            let b = parse_usize(it.next(), line)?;
            let tag = BoundaryTag::parse(
                it.next().ok_or_else(|| fmt_err(line, "missing boundary tag"))?,
            )?;
            if it.next().is_some() {
                return Err(fmt_err(line, "unexpected trailing tokens"));
            }
            boundary.push((a, b, tag));
        }
    }
    if let Some((_, line)) = lines.peek()? {
        return Err(fmt_err(line, "unexpected content after mesh sections"));
    }

    Mesh::new(vertices, cells, boundary)
}

fn fmt_err(line: usize, message: &str) -> MeshError {
    MeshError::Format { line, message: message.into() }
}

fn parse_f64(tok: Option<&str>, line: usize) -> Result<f64, MeshError> {
    let t = tok.ok_or_else(|| fmt_err(line, "missing number"))?;
    t.parse().map_err(|_| fmt_err(line, "invalid floating point number"))
}

fn parse_usize(tok: Option<&str>, line: usize) -> Result<usize, MeshError> {
    let t = tok.ok_or_else(|| fmt_err(line, "missing index"))?;
    t.parse().map_err(|_| fmt_err(line, "invalid index"))
}

/// Line reader that skips blanks and `#` comments and tracks line numbers.
struct Lines<R: BufRead> {
    reader: R,
    line: usize,
    pending: Option<(String, usize)>,
}

impl<R: BufRead> Lines<R> {
    fn new(reader: R) -> Self {
        Lines { reader, line: 0, pending: None }
    }

    fn peek(&mut self) -> Result<Option<(String, usize)>, MeshError> {
        if self.pending.is_none() {
            let mut buf = String::new();
            loop {
                buf.clear();
                if self.reader.read_line(&mut buf)? == 0 {
                    return Ok(None);
                }
                self.line += 1;
                let text = match buf.find('#') {
                    Some(i) => &buf[..i],
                    None => buf.as_str(),
                };
                let text = text.trim();
                if !text.is_empty() {
                    self.pending = Some((text.to_string(), self.line));
                    break;
                }
            }
        }
        Ok(self.pending.clone())
    }

    fn content(&mut self) -> Result<(String, usize), MeshError> {
        let got = self.peek()?;
        self.pending = None;
        got.ok_or_else(|| fmt_err(self.line + 1, "unexpected end of file"))
    }

    fn header(&mut self, keyword: &str) -> Result<(usize, usize), MeshError> {
        match self.optional_header(keyword)? {
            Some(h) => Ok(h),
            None => {
                let line = self.peek()?.map(|(_, l)| l).unwrap_or(self.line + 1);
                Err(fmt_err(line, &format!("expected {keyword} header")))
            }
        }
    }

    fn optional_header(&mut self, keyword: &str) -> Result<Option<(usize, usize)>, MeshError> {
        let Some((text, line)) = self.peek()? else {
            return Ok(None);
        };
        let mut it = text.split_whitespace();
        if it.next() != Some(keyword) {
            return Ok(None);
        }
        let n = parse_usize(it.next(), line)?;
        if it.next().is_some() {
            return Err(fmt_err(line, "unexpected trailing tokens in header"));
        }
        self.pending = None;
        Ok(Some((n, line)))
    }
}
