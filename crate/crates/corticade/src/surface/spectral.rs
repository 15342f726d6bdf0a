//! Graph-Laplacian eigenbases: the geometric-to-frequency transform.
//!
//! The operator is the combinatorial Laplacian L = D − A on the mesh edge
//! graph. Low eigenvalues are smooth ("low-frequency") components; a
//! thickness map's coefficients in this basis are its frequency content.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::mesh::{MeshGraph, TriMesh};
use super::thickness::ThicknessMap;

/// The k smallest eigenpairs of the graph Laplacian, eigenvalues ascending,
/// eigenvectors orthonormal. The first eigenvalue of a connected graph is 0
/// with the constant eigenvector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralBasis {
    eigenvalues: Vec<f64>,
    /// `eigenvectors[i]` has one entry per mesh vertex.
    eigenvectors: Vec<Vec<f64>>,
    n_vertices: usize,
}

impl SpectralBasis {
    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.n_vertices
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, i: usize) -> &[f64] {
        &self.eigenvectors[i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisConfig {
    /// Below this vertex count the dense symmetric eigensolver is used.
    pub dense_threshold: usize,
    /// Residual tolerance for the iterative solver.
    pub tol: f64,
    /// Iteration cap for the iterative solver.
    pub max_iter: usize,
    /// Force one solver (mainly for tests).
    pub force_solver: Option<SolverKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Dense,
    Iterative,
}

impl Default for BasisConfig {
    fn default() -> Self {
        BasisConfig {
            dense_threshold: 2000,
            tol: 1e-8,
            max_iter: 5000,
            force_solver: None,
        }
    }
}

/// Builds the k-component spectral basis of a mesh's edge graph.
pub fn build_basis(mesh: &TriMesh, k: usize) -> Result<SpectralBasis> {
    build_basis_graph(&mesh.graph(), k, &BasisConfig::default())
}

pub fn build_basis_with(mesh: &TriMesh, k: usize, cfg: &BasisConfig) -> Result<SpectralBasis> {
    build_basis_graph(&mesh.graph(), k, cfg)
}

/// Basis over an explicit graph (meshes reduce to their edge graphs).
pub fn build_basis_graph(graph: &MeshGraph, k: usize, cfg: &BasisConfig) -> Result<SpectralBasis> {
    let n = graph.vertex_count();
    if k == 0 || k > n {
        return Err(Error::data(format!(
            "spectral: k = {k} out of range for {n} vertices"
        )));
    }
    if !graph.is_connected() {
        return Err(Error::data("spectral: disconnected mesh"));
    }
    let solver = cfg.force_solver.unwrap_or(if n < cfg.dense_threshold {
        SolverKind::Dense
    } else {
        SolverKind::Iterative
    });
    let (mut eigenvalues, mut eigenvectors) = match solver {
        SolverKind::Dense => dense_smallest(graph, k),
        SolverKind::Iterative => subspace_smallest(graph, k, cfg)?,
    };

    // Snap round-off around the kernel eigenvalue to exactly 0 (a connected
    // graph has λ₁ = 0; leaving +1e-15 would leak through exp(−λt) at large
    // diffusion times) and fix eigenvector signs so the entry of largest
    // magnitude is non-negative.
    let zero_snap = 1e-11 * (graph.max_degree() as f64).max(1.0);
    for l in eigenvalues.iter_mut() {
        if *l < -1e-9 {
            return Err(Error::numeric(format!("spectral: negative eigenvalue {l}")));
        }
        if l.abs() <= zero_snap {
            *l = 0.0;
        }
    }
    for v in eigenvectors.iter_mut() {
        let lead = v
            .iter()
            .cloned()
            .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
            .unwrap_or(0.0);
        if lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }

    Ok(SpectralBasis {
        eigenvalues,
        eigenvectors,
        n_vertices: n,
    })
}

fn laplacian_matvec(graph: &MeshGraph, x: &[f64], out: &mut [f64]) {
    for v in 0..graph.vertex_count() {
        let mut acc = graph.degree(v) as f64 * x[v];
        for &w in graph.neighbors(v) {
            acc -= x[w];
        }
        out[v] = acc;
    }
}

fn dense_smallest(graph: &MeshGraph, k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = graph.vertex_count();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for v in 0..n {
        l[(v, v)] = graph.degree(v) as f64;
        for &w in graph.neighbors(v) {
            l[(v, w)] = -1.0;
        }
    }
    let eig = SymmetricEigen::new(l);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let eigenvalues = order.iter().take(k).map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = order
        .iter()
        .take(k)
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (eigenvalues, eigenvectors)
}

/// Subspace iteration with Rayleigh–Ritz projection on B = cI − L, where c
/// is an upper bound on L's spectrum, so B's dominant invariant subspace is
/// L's bottom one. Handles the high eigenvalue multiplicities of symmetric
/// meshes, unlike plain Lanczos. Deterministic: the start block comes from a
/// fixed-seed generator.
fn subspace_smallest(
    graph: &MeshGraph,
    k: usize,
    cfg: &BasisConfig,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = graph.vertex_count();
    // Anderson–Morley bound: λ_max(L) ≤ max over edges of deg(u) + deg(v).
    let mut shift = 0.0f64;
    for v in 0..n {
        for &w in graph.neighbors(v) {
            shift = shift.max((graph.degree(v) + graph.degree(w)) as f64);
        }
    }
    if shift == 0.0 {
        return Err(Error::data("spectral: graph has no edges"));
    }

    let p = (k + (k / 2).max(8)).min(n); // guard block beyond the wanted pairs
    let mut rng = ChaCha8Rng::seed_from_u64(0x1ac2_05e5);
    let mut x = DMatrix::<f64>::from_fn(n, p, |_, _| rng.random_range(-1.0..1.0));

    let b_apply = |m: &DMatrix<f64>| -> DMatrix<f64> {
        let mut out = DMatrix::<f64>::zeros(n, m.ncols());
        let mut col_in = vec![0.0; n];
        let mut col_out = vec![0.0; n];
        for j in 0..m.ncols() {
            for i in 0..n {
                col_in[i] = m[(i, j)];
            }
            laplacian_matvec(graph, &col_in, &mut col_out);
            for i in 0..n {
                out[(i, j)] = shift * col_in[i] - col_out[i];
            }
        }
        out
    };

    for _sweep in 0..cfg.max_iter {
        // One power step then Rayleigh–Ritz on the orthonormalized block.
        let q = x.qr().q();
        let bq = b_apply(&q);
        let h = q.transpose() * &bq;
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let rotation = DMatrix::<f64>::from_fn(p, p, |i, j| eig.eigenvectors[(i, order[j])]);
        let ritz_vectors = &q * &rotation; // columns sorted by descending θ
        let b_ritz = &bq * &rotation;

        // Residual ‖B v − θ v‖ for the k wanted pairs.
        let mut converged = true;
        for j in 0..k {
            let theta = eig.eigenvalues[order[j]];
            let mut res = 0.0;
            for i in 0..n {
                let r = b_ritz[(i, j)] - theta * ritz_vectors[(i, j)];
                res += r * r;
            }
            if res.sqrt() > cfg.tol * shift.max(1.0) {
                converged = false;
                break;
            }
        }
        if converged {
            let eigenvalues = (0..k)
                .map(|j| shift - eig.eigenvalues[order[j]])
                .collect();
            let eigenvectors = (0..k)
                .map(|j| (0..n).map(|i| ritz_vectors[(i, j)]).collect())
                .collect();
            return Ok((eigenvalues, eigenvectors));
        }
        x = b_ritz; // next power step starts from B·(QS)
    }
    Err(Error::numeric(format!(
        "spectral: eigensolver did not converge after {} iterations",
        cfg.max_iter
    )))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Coefficients c_i = ⟨eigenvector i, values⟩.
pub fn to_frequency(map: &ThicknessMap, basis: &SpectralBasis) -> Result<Vec<f64>> {
    if map.len() != basis.vertex_count() {
        return Err(Error::data(format!(
            "spectral: map has {} values, basis covers {} vertices",
            map.len(),
            basis.vertex_count()
        )));
    }
    Ok((0..basis.k())
        .map(|i| dot(basis.eigenvector(i), map.values()))
        .collect())
}

/// Reconstruction Σ c_i · eigenvector i; fewer coefficients than basis
/// components give a low-pass reconstruction.
pub fn from_frequency(coefficients: &[f64], basis: &SpectralBasis) -> Result<ThicknessMap> {
    if coefficients.len() > basis.k() {
        return Err(Error::data(format!(
            "spectral: {} coefficients exceed basis size {}",
            coefficients.len(),
            basis.k()
        )));
    }
    let mut values = vec![0.0; basis.vertex_count()];
    for (c, i) in coefficients.iter().zip(0..) {
        for (v, e) in values.iter_mut().zip(basis.eigenvector(i)) {
            *v += c * e;
        }
    }
    ThicknessMap::new(values)
}
