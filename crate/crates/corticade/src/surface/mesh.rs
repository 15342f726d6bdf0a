//! Triangle meshes and their edge graphs.
//!
//! Mesh file format (ASCII): line 1 `nv nt`, then nv lines `x y z` (mm),
//! then nt lines `i j k` with 0-based vertex indices.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn distance(a: Vec3, b: Vec3) -> f64 {
    norm(sub(a, b))
}

/// An immutable triangle mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    /// Validates index ranges and rejects degenerate triangles (repeated
    /// vertex indices). Connectivity is not required here; spectral
    /// operations check it separately.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::data("mesh: empty vertex list"));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::data(format!("mesh: non-finite vertex {i}")));
            }
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::data(format!(
                    "mesh: triangle {t} references vertex out of range"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::data(format!(
                    "mesh: degenerate triangle {t} (repeated vertex index)"
                )));
            }
        }
        Ok(TriMesh {
            vertices,
            triangles,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn vertex(&self, i: usize) -> Vec3 {
        self.vertices[i]
    }

    /// Undirected edges, each as (low, high).
    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        let mut edges = BTreeSet::new();
        for tri in &self.triangles {
            for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges
    }

    /// Sorted neighbor lists over the edge graph.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (a, b) in self.edges() {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn graph(&self) -> MeshGraph {
        MeshGraph {
            adjacency: self.adjacency(),
        }
    }

    pub fn is_connected(&self) -> bool {
        self.graph().is_connected()
    }
}

/// The undirected vertex-adjacency graph of a mesh (or any edge set),
/// the carrier of the spectral operations.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshGraph {
    adjacency: Vec<Vec<usize>>,
}

impl MeshGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::data("graph: zero vertices"));
        }
        let mut adj = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::data(format!("graph: edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::data(format!("graph: self-loop at {a}")));
            }
            adj[a].insert(b);
            adj[b].insert(a);
        }
        Ok(MeshGraph {
            adjacency: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.adjacency.len();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }
}

/// Reads the ASCII mesh format. Rejects disconnected meshes.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriMesh> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().map_while(|l| l.ok()).filter(|l| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });

    let header = lines
        .next()
        .ok_or_else(|| Error::data(format!("{}: empty mesh file", path.display())))?;
    let mut parts = header.split_whitespace();
    let nv: usize = parse_field(parts.next(), "vertex count", path)?;
    let nt: usize = parse_field(parts.next(), "triangle count", path)?;

    let mut vertices = Vec::with_capacity(nv);
    for i in 0..nv {
        let line = lines
            .next()
            .ok_or_else(|| Error::data(format!("{}: missing vertex {i}", path.display())))?;
        let coords: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::data(format!("{}: bad vertex line {i}", path.display())))?;
        if coords.len() != 3 {
            return Err(Error::data(format!(
                "{}: vertex {i} has {} coordinates",
                path.display(),
                coords.len()
            )));
        }
        vertices.push([coords[0], coords[1], coords[2]]);
    }
    let mut triangles = Vec::with_capacity(nt);
    for t in 0..nt {
        let line = lines
            .next()
            .ok_or_else(|| Error::data(format!("{}: missing triangle {t}", path.display())))?;
        let idx: Vec<usize> = line
            .split_whitespace()
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::data(format!("{}: bad triangle line {t}", path.display())))?;
        if idx.len() != 3 {
            return Err(Error::data(format!(
                "{}: triangle {t} has {} indices",
                path.display(),
                idx.len()
            )));
        }
        triangles.push([idx[0], idx[1], idx[2]]);
    }

    let mesh = TriMesh::new(vertices, triangles)?;
    if !mesh.is_connected() {
        return Err(Error::data(format!(
            "{}: mesh edge graph is disconnected",
            path.display()
        )));
    }
    Ok(mesh)
}

fn parse_field(field: Option<&str>, what: &str, path: &Path) -> Result<usize> {
    field
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::data(format!("{}: bad {what} in header", path.display())))
}

pub fn save_mesh(mesh: &TriMesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{} {}", mesh.vertex_count(), mesh.triangle_count())
        .map_err(|e| Error::io(path, e))?;
    for v in mesh.vertices() {
        writeln!(w, "{} {} {}", v[0], v[1], v[2]).map_err(|e| Error::io(path, e))?;
    }
    for t in mesh.triangles() {
        writeln!(w, "{} {} {}", t[0], t[1], t[2]).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
