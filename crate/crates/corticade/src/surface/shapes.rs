//! Procedural test-scale meshes: planar grids and icospheres.

use super::mesh::{norm, scale, TriMesh, Vec3};

/// A planar `nx × ny` vertex grid at z = 0 with the given spacing, two
/// triangles per cell. Vertices are row-major: index = iy * nx + ix.
pub fn grid_mesh(nx: usize, ny: usize, spacing: f64) -> TriMesh {
    assert!(nx >= 2 && ny >= 2, "grid needs at least 2x2 vertices");
    let mut vertices = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            vertices.push([ix as f64 * spacing, iy as f64 * spacing, 0.0]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for iy in 0..ny - 1 {
        for ix in 0..nx - 1 {
            let v00 = iy * nx + ix;
            let v10 = v00 + 1;
            let v01 = v00 + nx;
            let v11 = v01 + 1;
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    TriMesh::new(vertices, triangles).expect("grid construction is valid")
}

/// An icosphere: the regular icosahedron subdivided `subdivisions` times and
/// projected onto a sphere of the given radius. Vertex counts by level:
/// 12, 42, 162, 642, 2562, 10242, 40962.
pub fn icosphere(subdivisions: u32, radius: f64) -> TriMesh {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3> = vec![
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoint_cache = std::collections::HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for tri in &triangles {
            let mut midpoint = |a: usize, b: usize| -> usize {
                let key = (a.min(b), a.max(b));
                *midpoint_cache.entry(key).or_insert_with(|| {
                    let m = [
                        (vertices[a][0] + vertices[b][0]) / 2.0,
                        (vertices[a][1] + vertices[b][1]) / 2.0,
                        (vertices[a][2] + vertices[b][2]) / 2.0,
                    ];
                    vertices.push(m);
                    vertices.len() - 1
                })
            };
            let ab = midpoint(tri[0], tri[1]);
            let bc = midpoint(tri[1], tri[2]);
            let ca = midpoint(tri[2], tri[0]);
            next.push([tri[0], ab, ca]);
            next.push([tri[1], bc, ab]);
            next.push([tri[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        triangles = next;
    }

    for v in vertices.iter_mut() {
        let n = norm(*v);
        *v = scale(*v, radius / n);
    }
    TriMesh::new(vertices, triangles).expect("icosphere construction is valid")
}

/// Displaces every vertex radially (unit-sphere normal direction) by the
/// per-vertex offset; used to synthesize outer surfaces from inner ones.
pub fn offset_radially(mesh: &TriMesh, offsets: &[f64]) -> TriMesh {
    assert_eq!(offsets.len(), mesh.vertex_count());
    let vertices = mesh
        .vertices()
        .iter()
        .zip(offsets)
        .map(|(v, &o)| {
            let n = norm(*v);
            if n == 0.0 {
                *v
            } else {
                scale(*v, (n + o) / n)
            }
        })
        .collect();
    TriMesh::new(vertices, mesh.triangles().to_vec()).expect("offset keeps topology")
}

/// Raises every vertex by the per-vertex offset along +z; the planar
/// counterpart of [`offset_radially`].
pub fn offset_along_z(mesh: &TriMesh, offsets: &[f64]) -> TriMesh {
    assert_eq!(offsets.len(), mesh.vertex_count());
    let vertices = mesh
        .vertices()
        .iter()
        .zip(offsets)
        .map(|(v, &o)| [v[0], v[1], v[2] + o])
        .collect();
    TriMesh::new(vertices, mesh.triangles().to_vec()).expect("offset keeps topology")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn icosphere_vertex_counts() {
        assert_eq!(icosphere(0, 1.0).vertex_count(), 12);
        assert_eq!(icosphere(1, 1.0).vertex_count(), 42);
        assert_eq!(icosphere(2, 1.0).vertex_count(), 162);
        assert_eq!(icosphere(3, 1.0).vertex_count(), 642);
    }

    #[test]
    fn icosphere_triangle_counts_and_radius() {
        let m = icosphere(3, 2.5);
        assert_eq!(m.triangle_count(), 20 * 4usize.pow(3));
        for v in m.vertices() {
            assert_relative_eq!(norm(*v), 2.5, epsilon = 1e-12);
        }
        assert!(m.is_connected());
    }

    #[test]
    fn grid_shape() {
        let m = grid_mesh(4, 3, 1.0);
        assert_eq!(m.vertex_count(), 12);
        assert_eq!(m.triangle_count(), 12);
        assert!(m.is_connected());
    }
}
