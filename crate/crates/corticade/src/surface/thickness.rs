//! Per-vertex cortical thickness from linked inner/outer surfaces.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::mesh::{add, distance, dot, scale, sub, TriMesh, Vec3};

/// A per-vertex scalar field over a mesh. Values are finite; thickness
/// produced by [`compute_thickness`] is additionally non-negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThicknessMap {
    values: Vec<f64>,
}

impl ThicknessMap {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::data("scalar map: empty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!("scalar map: non-finite value at {i}")));
        }
        Ok(ThicknessMap { values })
    }

    pub fn constant(value: f64, len: usize) -> Self {
        ThicknessMap {
            values: vec![value; len],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Linked inner (white/grey) and outer (pial) surfaces: identical vertex
/// counts and triangle topology, vertex i on one surface corresponds to
/// vertex i on the other.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePair {
    inner: TriMesh,
    outer: TriMesh,
}

impl SurfacePair {
    pub fn new(inner: TriMesh, outer: TriMesh) -> Result<Self> {
        if inner.vertex_count() != outer.vertex_count() {
            return Err(Error::data(format!(
                "surface pair: inner has {} vertices, outer has {}",
                inner.vertex_count(),
                outer.vertex_count()
            )));
        }
        if inner.triangles() != outer.triangles() {
            return Err(Error::data(
                "surface pair: inner and outer triangle topology differs",
            ));
        }
        Ok(SurfacePair { inner, outer })
    }

    pub fn inner(&self) -> &TriMesh {
        &self.inner
    }

    pub fn outer(&self) -> &TriMesh {
        &self.outer
    }

    pub fn swapped(&self) -> SurfacePair {
        SurfacePair {
            inner: self.outer.clone(),
            outer: self.inner.clone(),
        }
    }
}

/// Thickness definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThicknessMode {
    /// Mean of the two nearest-point distances: vertex on one surface to the
    /// closest point anywhere on the other surface, both ways.
    SymmetricNearest,
    /// Plain Euclidean distance between linked vertices.
    Linked,
}

impl Default for ThicknessMode {
    fn default() -> Self {
        ThicknessMode::SymmetricNearest
    }
}

/// Closest point on triangle (a, b, c) to p.
pub fn closest_point_on_triangle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ap = sub(p, a);
    let d1 = dot(ab, ap);
    let d2 = dot(ac, ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = sub(p, b);
    let d3 = dot(ab, bp);
    let d4 = dot(ac, bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return add(a, scale(ab, v));
    }
    let cp = sub(p, c);
    let d5 = dot(ab, cp);
    let d6 = dot(ac, cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return add(a, scale(ac, w));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return add(b, scale(sub(c, b), w));
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    add(a, add(scale(ab, v), scale(ac, w)))
}

/// Distance from p to the nearest point on any triangle of the mesh.
pub fn point_to_surface_distance(p: Vec3, mesh: &TriMesh) -> f64 {
    let mut best = f64::INFINITY;
    for tri in mesh.triangles() {
        let q = closest_point_on_triangle(
            p,
            mesh.vertex(tri[0]),
            mesh.vertex(tri[1]),
            mesh.vertex(tri[2]),
        );
        best = best.min(distance(p, q));
    }
    best
}

/// Per-vertex thickness of a linked pair:
/// `T(v) = ½ (dist(inner_v → outer surface) + dist(outer_v → inner surface))`
/// in the default mode, or the linked-vertex Euclidean distance.
pub fn compute_thickness(pair: &SurfacePair, mode: ThicknessMode) -> Result<ThicknessMap> {
    if pair.inner().triangle_count() == 0 {
        return Err(Error::data("thickness: mesh has no triangles"));
    }
    let n = pair.inner().vertex_count();
    let mut values = Vec::with_capacity(n);
    for v in 0..n {
        let t = match mode {
            ThicknessMode::Linked => distance(pair.inner().vertex(v), pair.outer().vertex(v)),
            ThicknessMode::SymmetricNearest => {
                let a = point_to_surface_distance(pair.inner().vertex(v), pair.outer());
                let b = point_to_surface_distance(pair.outer().vertex(v), pair.inner());
                0.5 * (a + b)
            }
        };
        values.push(t);
    }
    ThicknessMap::new(values)
}

/// Reads a per-vertex scalar file: one value per line.
pub fn load_scalars(path: impl AsRef<Path>) -> Result<ThicknessMap> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut values = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        values.push(t.parse::<f64>().map_err(|_| {
            Error::data(format!("{}: bad scalar on line {}", path.display(), i + 1))
        })?);
    }
    ThicknessMap::new(values)
}

pub fn save_scalars(map: &ThicknessMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for v in map.values() {
        writeln!(w, "{v}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::shapes::{grid_mesh, offset_along_z};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_square() -> TriMesh {
        TriMesh::new(
            vec![
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [1.0, 1.0, 0.0],
                [0.0, 1.0, 0.0],
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn identical_surfaces_have_zero_thickness() {
        let m = unit_square();
        let pair = SurfacePair::new(m.clone(), m).unwrap();
        let t = compute_thickness(&pair, ThicknessMode::SymmetricNearest).unwrap();
        assert!(t.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn parallel_planes_at_known_distance() {
        let inner = unit_square();
        let outer = offset_along_z(&inner, &vec![2.5; 4]);
        let pair = SurfacePair::new(inner, outer).unwrap();
        let t = compute_thickness(&pair, ThicknessMode::SymmetricNearest).unwrap();
        for &v in t.values() {
            assert_relative_eq!(v, 2.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn tilted_outer_nearest_point_beats_linked_distance() {
        // Outer plane rises from 3.0 mm to 5.0 mm across x: nearest triangle
        // points are closer than the vertically linked vertices.
        let inner = grid_mesh(5, 5, 1.0);
        let offsets: Vec<f64> = inner
            .vertices()
            .iter()
            .map(|v| 3.0 + 0.5 * v[0])
            .collect();
        let outer = offset_along_z(&inner, &offsets);
        let pair = SurfacePair::new(inner.clone(), outer.clone()).unwrap();
        let nearest = compute_thickness(&pair, ThicknessMode::SymmetricNearest).unwrap();
        let linked = compute_thickness(&pair, ThicknessMode::Linked).unwrap();
        for (n, l) in nearest.values().iter().zip(linked.values()) {
            assert!(*n <= l + 1e-12, "nearest {n} must not exceed linked {l}");
        }
        assert!(
            nearest.values().iter().zip(linked.values()).any(|(n, l)| *n < l - 1e-6),
            "tilted plane must make some nearest distances strictly smaller"
        );

        // Brute-force oracle: dense barycentric sampling over all triangles.
        let sample_distance = |p: Vec3, mesh: &TriMesh| -> f64 {
            let mut best = f64::INFINITY;
            let steps = 40;
            for tri in mesh.triangles() {
                let (a, b, c) = (mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2]));
                for i in 0..=steps {
                    for j in 0..=(steps - i) {
                        let u = i as f64 / steps as f64;
                        let v = j as f64 / steps as f64;
                        let w = 1.0 - u - v;
                        let q = add(add(scale(a, u), scale(b, v)), scale(c, w));
                        best = best.min(distance(p, q));
                    }
                }
            }
            best
        };
        for v in [0, 6, 12, 18, 24] {
            let expected = 0.5
                * (sample_distance(inner.vertex(v), &outer)
                    + sample_distance(outer.vertex(v), &inner));
            assert_relative_eq!(nearest.get(v), expected, epsilon = 2e-3);
        }
    }

    #[test]
    fn thickness_is_symmetric_in_surface_order() {
        let inner = grid_mesh(4, 4, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let offsets: Vec<f64> = (0..inner.vertex_count())
            .map(|_| 2.0 + rng.random_range(-0.5..0.5))
            .collect();
        let outer = offset_along_z(&inner, &offsets);
        let pair = SurfacePair::new(inner, outer).unwrap();
        let a = compute_thickness(&pair, ThicknessMode::SymmetricNearest).unwrap();
        let b = compute_thickness(&pair.swapped(), ThicknessMode::SymmetricNearest).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_relative_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn thickness_bounded_by_linked_distance_and_nonnegative() {
        let inner = grid_mesh(6, 3, 0.7);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let offsets: Vec<f64> = (0..inner.vertex_count())
            .map(|_| 1.0 + rng.random_range(0.0..2.0))
            .collect();
        let outer = offset_along_z(&inner, &offsets);
        let pair = SurfacePair::new(inner, outer).unwrap();
        let nearest = compute_thickness(&pair, ThicknessMode::SymmetricNearest).unwrap();
        let linked = compute_thickness(&pair, ThicknessMode::Linked).unwrap();
        for (n, l) in nearest.values().iter().zip(linked.values()) {
            assert!(*n >= 0.0);
            assert!(*n <= l + 1e-12);
        }
    }

    #[test]
    fn mismatched_vertex_counts_rejected() {
        let a = unit_square();
        let b = grid_mesh(3, 3, 1.0);
        assert!(SurfacePair::new(a, b).is_err());
    }

    #[test]
    fn scalar_file_round_trip() {
        let map = ThicknessMap::new(vec![1.25, -0.5, 3.0]).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_scalars(&map, f.path()).unwrap();
        let back = load_scalars(f.path()).unwrap();
        assert_eq!(map, back);
    }
}
