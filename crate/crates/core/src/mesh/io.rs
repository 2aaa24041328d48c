//! OBJ and PLY (ASCII) mesh files.
//!
//! Coordinates are written with 17 significant digits, enough for an exact
//! round trip. OBJ carries labels as `usemtl region_<tag>` switches; PLY
//! carries a per-face `region` integer (I = 0, IIa = 1, IIb = 2, III = 3).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TriangleMesh;
use crate::bodies::CaseRegion;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "ply" => Ok(MeshFormat::Ply),
            _ => Err(Error::InvalidArgument(format!("unknown mesh format `{s}`"))),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn write_obj<W: Write>(mesh: &TriangleMesh, mut out: W) -> Result<()> {
    writeln!(out, "# constwidth boundary mesh")?;
    for v in &mesh.vertices {
        writeln!(out, "v {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2])?;
    }
    let mut current = None;
    for (tri, &label) in mesh.triangles.iter().zip(&mesh.labels) {
        if current != Some(label) {
            writeln!(out, "usemtl region_{label}")?;
            current = Some(label);
        }
        writeln!(out, "f {} {} {}", tri[0] + 1, tri[1] + 1, tri[2] + 1)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_obj<R: BufRead>(input: R) -> Result<TriangleMesh> {
    let mut mesh = TriangleMesh::default();
    let mut label = None;
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let xyz: Vec<f64> = parts
                    .take(3)
                    .map(|s| s.parse().map_err(|_| parse_err(lineno, format!("bad number `{s}`"))))
                    .collect::<Result<_>>()?;
                if xyz.len() != 3 {
                    return Err(parse_err(lineno, "vertex needs three coordinates"));
                }
                mesh.vertices.push([xyz[0], xyz[1], xyz[2]]);
            }
            Some("usemtl") => {
                let name = parts.next().unwrap_or_default();
                let tag = name
                    .strip_prefix("region_")
                    .ok_or_else(|| parse_err(lineno, format!("unexpected material `{name}`")))?;
                label = Some(tag.parse::<CaseRegion>().map_err(|e| parse_err(lineno, e.to_string()))?);
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .map(|s| {
                        let i = s.split('/').next().unwrap_or_default();
                        match i.parse::<usize>() {
                            Ok(i) if i >= 1 => Ok(i - 1),
                            _ => Err(parse_err(lineno, format!("bad face index `{s}`"))),
                        }
                    })
                    .collect::<Result<_>>()?;
                if idx.len() != 3 {
                    return Err(parse_err(lineno, "only triangles are supported"));
                }
                let label = label.ok_or_else(|| parse_err(lineno, "face before any region label"))?;
                mesh.triangles.push([idx[0], idx[1], idx[2]]);
                mesh.labels.push(label);
            }
            _ => {}
        }
    }
    Ok(mesh)
}

pub fn write_ply<W: Write>(mesh: &TriangleMesh, mut out: W) -> Result<()> {
    writeln!(out, "ply")?;
    writeln!(out, "format ascii 1.0")?;
    writeln!(out, "comment region codes: I=0 IIa=1 IIb=2 III=3")?;
    writeln!(out, "element vertex {}", mesh.vertices.len())?;
    for axis in ["x", "y", "z"] {
        writeln!(out, "property double {axis}")?;
    }
    writeln!(out, "element face {}", mesh.triangles.len())?;
    writeln!(out, "property list uchar int vertex_indices")?;
    writeln!(out, "property int region")?;
    writeln!(out, "end_header")?;
    for v in &mesh.vertices {
        writeln!(out, "{:.16e} {:.16e} {:.16e}", v[0], v[1], v[2])?;
    }
    for (tri, label) in mesh.triangles.iter().zip(&mesh.labels) {
        writeln!(out, "3 {} {} {} {}", tri[0], tri[1], tri[2], label.code())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_ply<R: BufRead>(input: R) -> Result<TriangleMesh> {
    let mut lines = input.lines().enumerate();
    let mut next = || -> Result<(usize, String)> {
        match lines.next() {
            Some((k, l)) => Ok((k + 1, l?)),
            None => Err(parse_err(0, "unexpected end of file")),
        }
    };
    let (n, first) = next()?;
    if first.trim() != "ply" {
        return Err(parse_err(n, "missing `ply` magic"));
    }
    let (mut n_vertices, mut n_faces) = (None, None);
    loop {
        let (n, line) = next()?;
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["format", fmt, ..] if *fmt != "ascii" => {
                return Err(parse_err(n, format!("unsupported format `{fmt}`")))
            }
            ["element", "vertex", count] => {
                n_vertices = Some(count.parse::<usize>().map_err(|_| parse_err(n, "bad count"))?)
            }
            ["element", "face", count] => {
                n_faces = Some(count.parse::<usize>().map_err(|_| parse_err(n, "bad count"))?)
            }
            ["end_header"] => break,
            _ => {}
        }
    }
    let n_vertices = n_vertices.ok_or_else(|| parse_err(0, "no vertex element"))?;
    let n_faces = n_faces.ok_or_else(|| parse_err(0, "no face element"))?;
    let mut mesh = TriangleMesh::default();
    for _ in 0..n_vertices {
        let (n, line) = next()?;
        let xyz: Vec<f64> = line
            .split_whitespace()
            .take(3)
            .map(|s| s.parse().map_err(|_| parse_err(n, format!("bad number `{s}`"))))
            .collect::<Result<_>>()?;
        if xyz.len() != 3 {
            return Err(parse_err(n, "vertex needs three coordinates"));
        }
        mesh.vertices.push([xyz[0], xyz[1], xyz[2]]);
    }
    for _ in 0..n_faces {
        let (n, line) = next()?;
        let nums: Vec<i64> = line
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| parse_err(n, format!("bad integer `{s}`"))))
            .collect::<Result<_>>()?;
        if nums.len() != 5 || nums[0] != 3 || nums[1..4].iter().any(|&i| i < 0) {
            return Err(parse_err(n, "expected `3 i j k region`"));
        }
        let label = CaseRegion::from_code(nums[4] as i32)
            .ok_or_else(|| parse_err(n, format!("unknown region code {}", nums[4])))?;
        mesh.triangles.push([nums[1] as usize, nums[2] as usize, nums[3] as usize]);
        mesh.labels.push(label);
    }
    Ok(mesh)
}

/// Writes `mesh` to `path` in the given format.
pub fn export_mesh(mesh: &TriangleMesh, format: MeshFormat, path: impl AsRef<Path>) -> Result<()> {
    let out = BufWriter::new(File::create(path)?);
    match format {
        MeshFormat::Obj => write_obj(mesh, out),
        MeshFormat::Ply => write_ply(mesh, out),
    }
}

pub fn import_mesh(format: MeshFormat, path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let input = BufReader::new(File::open(path)?);
    match format {
        MeshFormat::Obj => read_obj(input),
        MeshFormat::Ply => read_ply(input),
    }
}
