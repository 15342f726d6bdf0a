//! Noise reduction for per-vertex scalar maps: SUSAN structure-preserving
//! filtering on the mesh neighborhood graph, and heat-kernel (spectral)
//! Gaussian smoothing.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{distance, from_frequency, to_frequency, SpectralBasis, ThicknessMap, TriMesh};

/// σ = FWHM / (2·√(2·ln 2)).
pub fn fwhm_to_sigma(fwhm: f64) -> Result<f64> {
    if fwhm <= 0.0 {
        return Err(Error::config(format!("fwhm must be positive, got {fwhm}")));
    }
    Ok(fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt()))
}

/// SUSAN parameters: spatial kernel FWHM (mm), brightness threshold in the
/// units of the smoothed scalar, and the neighborhood cutoff radius
/// (default 3σ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SusanParams {
    pub fwhm: f64,
    pub brightness_threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_radius: Option<f64>,
    /// Exponent of the brightness weight; 6 in the original formulation.
    #[serde(default = "default_brightness_exponent")]
    pub brightness_exponent: i32,
}

fn default_brightness_exponent() -> i32 {
    6
}

impl SusanParams {
    pub fn new(fwhm: f64, brightness_threshold: f64) -> Result<Self> {
        if fwhm <= 0.0 {
            return Err(Error::config("susan: fwhm must be positive"));
        }
        if brightness_threshold <= 0.0 {
            return Err(Error::config("susan: brightness threshold must be positive"));
        }
        Ok(SusanParams {
            fwhm,
            brightness_threshold,
            cutoff_radius: None,
            brightness_exponent: 6,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt())
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff_radius.unwrap_or(3.0 * self.sigma())
    }
}

/// Default brightness threshold rule: 0.1 × (max − min) of the map, or 1.0
/// for constant maps (any positive value leaves them unchanged).
pub fn default_brightness_threshold(map: &ThicknessMap) -> f64 {
    let range = map.max() - map.min();
    if range > 0.0 {
        0.1 * range
    } else {
        1.0
    }
}

/// Heat-kernel smoothing parameters: FWHM converted to diffusion time
/// t = σ²/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatParams {
    pub fwhm: f64,
}

impl HeatParams {
    pub fn new(fwhm: f64) -> Result<Self> {
        if fwhm <= 0.0 {
            return Err(Error::config("heat: fwhm must be positive"));
        }
        Ok(HeatParams { fwhm })
    }

    pub fn diffusion_time(&self) -> f64 {
        let sigma = self.fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
        sigma * sigma / 2.0
    }
}

/// Shortest edge-path distances from `source`, truncated at `cutoff`.
/// Returns (vertex, distance) pairs excluding the source itself.
fn dijkstra_within(mesh: &TriMesh, adjacency: &[Vec<usize>], source: usize, cutoff: f64) -> Vec<(usize, f64)> {
    let n = mesh.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap: BinaryHeap<Reverse<(ordered::F64, usize)>> = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((ordered::F64(0.0), source)));
    let mut reached = Vec::new();
    while let Some(Reverse((ordered::F64(d), v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        if v != source {
            reached.push((v, d));
        }
        for &w in &adjacency[v] {
            let nd = d + distance(mesh.vertex(v), mesh.vertex(w));
            if nd <= cutoff && nd < dist[w] {
                dist[w] = nd;
                heap.push(Reverse((ordered::F64(nd), w)));
            }
        }
    }
    reached
}

mod ordered {
    /// Total order for non-NaN path lengths in the Dijkstra heap.
    #[derive(PartialEq, PartialOrd)]
    pub struct F64(pub f64);

    impl Eq for F64 {}

    #[allow(clippy::derive_ord_xor_partial_ord)]
    impl Ord for F64 {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.partial_cmp(other).expect("path lengths are never NaN")
        }
    }
}

/// SUSAN smoothing on the mesh: each vertex is replaced by the weighted mean
/// of its geodesic neighborhood (center vertex excluded), with weights
/// combining spatial proximity and intensity similarity:
/// `w = exp(−d²/2σ²) · exp(−((I(v)−I(v₀))/t)^6)`.
/// A vanishing weight sum falls back to the neighborhood median.
pub fn susan_smooth(map: &ThicknessMap, mesh: &TriMesh, params: &SusanParams) -> Result<ThicknessMap> {
    if map.len() != mesh.vertex_count() {
        return Err(Error::data(format!(
            "susan: map has {} values, mesh has {} vertices",
            map.len(),
            mesh.vertex_count()
        )));
    }
    if params.fwhm <= 0.0 || params.brightness_threshold <= 0.0 {
        return Err(Error::config("susan: invalid parameters"));
    }
    let sigma = params.sigma();
    let cutoff = params.cutoff();
    let t = params.brightness_threshold;
    let exponent = params.brightness_exponent;
    let adjacency = mesh.adjacency();

    let mut out = Vec::with_capacity(map.len());
    for v0 in 0..map.len() {
        if adjacency[v0].is_empty() {
            return Err(Error::data(format!("susan: isolated vertex {v0}")));
        }
        let neighborhood = dijkstra_within(mesh, &adjacency, v0, cutoff);
        if neighborhood.is_empty() {
            return Err(Error::data(format!(
                "susan: empty neighborhood at vertex {v0} (cutoff {cutoff})"
            )));
        }
        let center = map.get(v0);
        let mut num = 0.0;
        let mut den = 0.0;
        for &(v, d) in &neighborhood {
            let value = map.get(v);
            let spatial = (-d * d / (2.0 * sigma * sigma)).exp();
            let brightness = (-((value - center) / t).powi(exponent)).exp();
            let w = spatial * brightness;
            num += value * w;
            den += w;
        }
        if den < 1e-12 {
            let mut values: Vec<f64> = neighborhood.iter().map(|&(v, _)| map.get(v)).collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mid = values.len() / 2;
            let median = if values.len() % 2 == 1 {
                values[mid]
            } else {
                0.5 * (values[mid - 1] + values[mid])
            };
            out.push(median);
        } else {
            out.push(num / den);
        }
    }
    ThicknessMap::new(out)
}

/// Heat-kernel smoothing in the spectral basis: coefficients are scaled by
/// `exp(−λᵢ·t)` and the map reconstructed from the retained subspace.
pub fn heat_smooth(map: &ThicknessMap, basis: &SpectralBasis, params: &HeatParams) -> Result<ThicknessMap> {
    let t = params.diffusion_time();
    let mut coeffs = to_frequency(map, basis)?;
    for (c, l) in coeffs.iter_mut().zip(basis.eigenvalues()) {
        *c *= (-l * t).exp();
    }
    from_frequency(&coeffs, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::shapes::grid_mesh;
    use crate::surface::{build_basis, save_mesh};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fwhm_conversion() {
        assert_relative_eq!(fwhm_to_sigma(15.0).unwrap(), 6.3700, epsilon = 1e-3);
        assert_relative_eq!(fwhm_to_sigma(2.35482).unwrap(), 1.0, epsilon = 1e-5);
        assert!(fwhm_to_sigma(0.0).is_err());
        assert!(fwhm_to_sigma(-3.0).is_err());
    }

    /// Two plateaus (1.0 left, 4.0 right) across the vertical midline of a
    /// unit-spaced grid.
    fn two_plateau(nx: usize, ny: usize) -> (TriMesh, ThicknessMap) {
        let mesh = grid_mesh(nx, ny, 1.0);
        let mid = (nx as f64 - 1.0) / 2.0;
        let values = mesh
            .vertices()
            .iter()
            .map(|v| if v[0] < mid { 1.0 } else { 4.0 })
            .collect();
        (mesh, ThicknessMap::new(values).unwrap())
    }

    #[test]
    fn constant_map_unchanged() {
        let mesh = grid_mesh(6, 6, 1.0);
        let map = ThicknessMap::constant(2.5, 36);
        let params = SusanParams::new(15.0, 1.0).unwrap();
        let smoothed = susan_smooth(&map, &mesh, &params).unwrap();
        for &v in smoothed.values() {
            assert_relative_eq!(v, 2.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn plateaus_preserved_while_heat_blurs() {
        let (mesh, clean) = two_plateau(12, 6);
        let params = SusanParams::new(15.0, 0.3).unwrap();
        let susan = susan_smooth(&clean, &mesh, &params).unwrap();
        for (s, c) in susan.values().iter().zip(clean.values()) {
            assert_relative_eq!(s, c, epsilon = 1e-6);
        }
        let basis = build_basis(&mesh, mesh.vertex_count()).unwrap();
        let heat = heat_smooth(&clean, &basis, &HeatParams::new(15.0).unwrap()).unwrap();
        let rms = |a: &ThicknessMap| -> f64 {
            (a.values()
                .iter()
                .zip(clean.values())
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                / a.len() as f64)
                .sqrt()
        };
        assert!(rms(&susan) < 1e-6);
        assert!(rms(&heat) > 0.5, "heat smoothing should blur the step, rms {}", rms(&heat));
    }

    #[test]
    fn spike_pulled_to_background() {
        let mesh = grid_mesh(7, 7, 1.0);
        let t = 0.2;
        let background = 2.0;
        let center = 24; // middle vertex
        let mut values = vec![background; 49];
        values[center] = background + 10.0 * t;
        let map = ThicknessMap::new(values).unwrap();
        let params = SusanParams::new(6.0, t).unwrap();
        let smoothed = susan_smooth(&map, &mesh, &params).unwrap();
        // The spike vertex sees only background neighbors: brightness weights
        // on them are exp(-10^6) ≈ 0, so the median fallback applies.
        assert!(
            (smoothed.get(center) - background).abs() <= t,
            "spike vertex {} not pulled to background",
            smoothed.get(center)
        );
        // Background vertices are barely affected.
        for (v, &s) in smoothed.values().iter().enumerate() {
            if v != center {
                assert!((s - background).abs() < 0.05, "vertex {v} moved to {s}");
            }
        }
    }

    #[test]
    fn susan_output_within_input_range() {
        let mesh = grid_mesh(8, 8, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let map =
            ThicknessMap::new((0..64).map(|_| rng.random_range(1.0..3.0)).collect()).unwrap();
        let params = SusanParams::new(10.0, default_brightness_threshold(&map)).unwrap();
        let smoothed = susan_smooth(&map, &mesh, &params).unwrap();
        let (lo, hi) = (map.min(), map.max());
        for &v in smoothed.values() {
            assert!(v >= lo - 1e-12 && v <= hi + 1e-12, "value {v} outside [{lo}, {hi}]");
        }
    }

    #[test]
    fn susan_permutation_equivariance() {
        // Relabeling vertices consistently permutes the output.
        let mesh = grid_mesh(5, 4, 1.0);
        let n = mesh.vertex_count();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..4.0)).collect();
        let map = ThicknessMap::new(values.clone()).unwrap();
        let params = SusanParams::new(8.0, 0.4).unwrap();
        let base = susan_smooth(&map, &mesh, &params).unwrap();

        let perm: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect(); // bijective: gcd(7, 20) = 1
        let mut inv = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let vertices = (0..n).map(|i| mesh.vertex(inv[i])).collect();
        let triangles = mesh
            .triangles()
            .iter()
            .map(|t| [perm[t[0]], perm[t[1]], perm[t[2]]])
            .collect();
        let permuted_mesh = TriMesh::new(vertices, triangles).unwrap();
        let permuted_values: Vec<f64> = (0..n).map(|i| values[inv[i]]).collect();
        let permuted = susan_smooth(
            &ThicknessMap::new(permuted_values).unwrap(),
            &permuted_mesh,
            &params,
        )
        .unwrap();
        for i in 0..n {
            assert_relative_eq!(base.get(i), permuted.get(perm[i]), epsilon = 1e-12);
        }
    }

    #[test]
    fn heat_constant_map_invariant() {
        let mesh = grid_mesh(5, 5, 1.0);
        let basis = build_basis(&mesh, 25).unwrap();
        let map = ThicknessMap::constant(3.0, 25);
        let smoothed = heat_smooth(&map, &basis, &HeatParams::new(15.0).unwrap()).unwrap();
        for &v in smoothed.values() {
            assert_relative_eq!(v, 3.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn heat_eigenvector_scaling() {
        let mesh = grid_mesh(5, 5, 1.0);
        let basis = build_basis(&mesh, 10).unwrap();
        let j = 4;
        let map = ThicknessMap::new(basis.eigenvector(j).to_vec()).unwrap();
        let params = HeatParams::new(4.0).unwrap();
        let smoothed = heat_smooth(&map, &basis, &params).unwrap();
        let expected = (-basis.eigenvalues()[j] * params.diffusion_time()).exp();
        for (s, v) in smoothed.values().iter().zip(basis.eigenvector(j)) {
            assert_relative_eq!(s, &(expected * v), epsilon = 1e-9);
        }
    }

    #[test]
    fn heat_diffusion_limit_is_mesh_mean() {
        let mesh = grid_mesh(6, 4, 1.0);
        let n = mesh.vertex_count();
        let basis = build_basis(&mesh, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let map = ThicknessMap::new((0..n).map(|_| rng.random_range(1.0..3.0)).collect()).unwrap();
        let smoothed = heat_smooth(&map, &basis, &HeatParams { fwhm: 1e6 }).unwrap();
        let mean = map.mean();
        for &v in smoothed.values() {
            assert_relative_eq!(v, mean, epsilon = 1e-9);
        }
    }

    #[test]
    fn heat_is_linear() {
        let mesh = grid_mesh(5, 5, 1.0);
        let n = mesh.vertex_count();
        let basis = build_basis(&mesh, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let x = ThicknessMap::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let y = ThicknessMap::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let (a, b) = (2.5, -1.25);
        let params = HeatParams::new(7.0).unwrap();
        let combo = ThicknessMap::new(
            x.values()
                .iter()
                .zip(y.values())
                .map(|(xi, yi)| a * xi + b * yi)
                .collect(),
        )
        .unwrap();
        let lhs = heat_smooth(&combo, &basis, &params).unwrap();
        let sx = heat_smooth(&x, &basis, &params).unwrap();
        let sy = heat_smooth(&y, &basis, &params).unwrap();
        for i in 0..n {
            assert_relative_eq!(lhs.get(i), a * sx.get(i) + b * sy.get(i), epsilon = 1e-9);
        }
    }

    #[test]
    fn isolated_vertex_rejected() {
        // A mesh file cannot carry isolated vertices past the connectivity
        // check, but in-memory construction can.
        let mesh = TriMesh::new(
            vec![
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [9.0, 9.0, 9.0],
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        assert!(save_mesh(&mesh, f.path()).is_ok());
        let map = ThicknessMap::constant(1.0, 4);
        let params = SusanParams::new(5.0, 0.5).unwrap();
        let err = susan_smooth(&map, &mesh, &params).unwrap_err();
        assert!(err.to_string().contains("isolated"), "{err}");
    }
}
