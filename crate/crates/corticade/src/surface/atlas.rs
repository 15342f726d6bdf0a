//! Vertex-to-region atlases and region-mean feature extraction.
//!
//! Atlas file format: CSV `vertex_id,region_id,region_name`, one row per
//! vertex. Region ids need not be contiguous; regions are ordered by id.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::thickness::ThicknessMap;

#[derive(Debug, Clone, PartialEq)]
pub struct RegionAtlas {
    /// Per-vertex dense region index (0..region_count).
    region_of: Vec<usize>,
    /// Region names ordered by original region id.
    names: Vec<String>,
    /// Original region ids, ascending.
    ids: Vec<u64>,
}

impl RegionAtlas {
    /// `assignments[v] = (region_id, region_name)` for every vertex v.
    pub fn new(assignments: Vec<(u64, String)>) -> Result<Self> {
        if assignments.is_empty() {
            return Err(Error::data("atlas: empty"));
        }
        let mut by_id: BTreeMap<u64, String> = BTreeMap::new();
        for (id, name) in &assignments {
            match by_id.get(id) {
                None => {
                    by_id.insert(*id, name.clone());
                }
                Some(existing) if existing != name => {
                    return Err(Error::data(format!(
                        "atlas: region {id} named both \"{existing}\" and \"{name}\""
                    )));
                }
                _ => {}
            }
        }
        let ids: Vec<u64> = by_id.keys().copied().collect();
        let names: Vec<String> = by_id.values().cloned().collect();
        let dense: BTreeMap<u64, usize> =
            ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let region_of = assignments.iter().map(|(id, _)| dense[id]).collect();
        Ok(RegionAtlas {
            region_of,
            names,
            ids,
        })
    }

    /// Uniform split of `n` vertices into `regions` contiguous blocks.
    pub fn uniform_blocks(n: usize, regions: usize) -> Result<Self> {
        if regions == 0 || regions > n {
            return Err(Error::data(format!(
                "atlas: cannot split {n} vertices into {regions} regions"
            )));
        }
        let assignments = (0..n)
            .map(|v| {
                let r = (v * regions / n) as u64;
                (r, format!("region_{r}"))
            })
            .collect();
        Self::new(assignments)
    }

    pub fn vertex_count(&self) -> usize {
        self.region_of.len()
    }

    pub fn region_count(&self) -> usize {
        self.names.len()
    }

    pub fn region_names(&self) -> &[String] {
        &self.names
    }

    pub fn region_index(&self, vertex: usize) -> usize {
        self.region_of[vertex]
    }

    /// Vertex lists per region, ordered by region id.
    pub fn region_members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.names.len()];
        for (v, &r) in self.region_of.iter().enumerate() {
            members[r].push(v);
        }
        members
    }
}

/// Mean scalar value per region, ordered by region id.
pub fn region_means(map: &ThicknessMap, atlas: &RegionAtlas) -> Result<Vec<f64>> {
    if map.len() != atlas.vertex_count() {
        return Err(Error::data(format!(
            "atlas covers {} vertices but the map has {}",
            atlas.vertex_count(),
            map.len()
        )));
    }
    let mut sums = vec![0.0; atlas.region_count()];
    let mut counts = vec![0usize; atlas.region_count()];
    for (v, &value) in map.values().iter().enumerate() {
        let r = atlas.region_index(v);
        sums[r] += value;
        counts[r] += 1;
    }
    sums.iter()
        .zip(&counts)
        .enumerate()
        .map(|(r, (s, &c))| {
            if c == 0 {
                Err(Error::data(format!("atlas: region {r} has zero vertices")))
            } else {
                Ok(s / c as f64)
            }
        })
        .collect()
}

/// Loads `vertex_id,region_id,region_name` rows. Every vertex in
/// 0..vertex-count must appear exactly once.
pub fn load_atlas(path: impl AsRef<Path>, expected_vertices: Option<usize>) -> Result<RegionAtlas> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let mut rows: BTreeMap<usize, (u64, String)> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != 3 {
            return Err(Error::data(format!(
                "{}: atlas rows need 3 fields, got {}",
                path.display(),
                record.len()
            )));
        }
        let vertex: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| Error::data(format!("{}: bad vertex id \"{}\"", path.display(), &record[0])))?;
        let region: u64 = record[1]
            .trim()
            .parse()
            .map_err(|_| Error::data(format!("{}: bad region id \"{}\"", path.display(), &record[1])))?;
        if rows.insert(vertex, (region, record[2].trim().to_string())).is_some() {
            return Err(Error::data(format!(
                "{}: vertex {vertex} assigned twice",
                path.display()
            )));
        }
    }
    if rows.is_empty() {
        return Err(Error::data(format!("{}: empty atlas", path.display())));
    }
    let n = *rows.keys().max().unwrap() + 1;
    if rows.len() != n {
        return Err(Error::data(format!(
            "{}: atlas covers {} of {n} vertices",
            path.display(),
            rows.len()
        )));
    }
    if let Some(expected) = expected_vertices {
        if n != expected {
            return Err(Error::data(format!(
                "{}: atlas covers {n} vertices, mesh has {expected}",
                path.display()
            )));
        }
    }
    RegionAtlas::new(rows.into_values().collect())
}

pub fn save_atlas(atlas: &RegionAtlas, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "vertex_id,region_id,region_name").map_err(|e| Error::io(path, e))?;
    for v in 0..atlas.vertex_count() {
        let r = atlas.region_index(v);
        writeln!(w, "{v},{},{}", atlas.ids[r], atlas.names[r]).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
