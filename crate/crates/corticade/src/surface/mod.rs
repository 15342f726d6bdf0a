//! Triangle meshes, cortical thickness, region atlases, and the spectral
//! (graph-Laplacian) frequency transform.

mod atlas;
mod mesh;
pub mod shapes;
mod spectral;
mod thickness;

pub use atlas::{load_atlas, region_means, save_atlas, RegionAtlas};
pub use mesh::{distance, load_mesh, save_mesh, MeshGraph, TriMesh, Vec3};
pub use spectral::{
    build_basis, build_basis_graph, build_basis_with, from_frequency, to_frequency, BasisConfig,
    SolverKind, SpectralBasis,
};
pub use thickness::{
    closest_point_on_triangle, compute_thickness, load_scalars, point_to_surface_distance,
    save_scalars, SurfacePair, ThicknessMap, ThicknessMode,
};
