//! Subject records, cohorts, and CSV ingestion.
//!
//! Cohort CSV format: header row `id,label,age,sex,mmse,education,f_1..f_n`
//! followed by one row per subject. Feature column names are taken from the
//! header, so `f_1..f_n` may be any names (e.g. atlas region names).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::labels::{DiagnosticLabel, Sex};

/// One labeled subject: demographics plus a numeric feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subject {
    pub id: String,
    pub label: DiagnosticLabel,
    pub age: f64,
    pub sex: Sex,
    pub mmse: f64,
    pub education: f64,
    pub features: Vec<f64>,
}

/// Where a cohort came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    Ingested { path: String },
    Synthetic { seed: u64, spec: String },
}

/// An immutable set of subjects with a shared feature schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cohort {
    subjects: Vec<Subject>,
    feature_names: Vec<String>,
    provenance: Provenance,
}

impl Cohort {
    /// Validates the cohort invariants: non-empty, unique ids, uniform
    /// feature width matching `feature_names`, all feature values finite.
    pub fn new(
        subjects: Vec<Subject>,
        feature_names: Vec<String>,
        provenance: Provenance,
    ) -> Result<Self> {
        if subjects.is_empty() {
            return Err(Error::data("empty data section"));
        }
        let width = feature_names.len();
        let mut seen = std::collections::HashSet::new();
        for s in &subjects {
            if !seen.insert(s.id.clone()) {
                return Err(Error::data(format!("duplicate id \"{}\"", s.id)));
            }
            if s.id.is_empty() {
                return Err(Error::data("missing id"));
            }
            if s.features.len() != width {
                return Err(Error::data(format!(
                    "subject \"{}\" has {} features, expected {}",
                    s.id,
                    s.features.len(),
                    width
                )));
            }
            if let Some(j) = s.features.iter().position(|v| !v.is_finite()) {
                return Err(Error::data(format!(
                    "subject \"{}\" feature {} is not finite",
                    s.id, j
                )));
            }
        }
        Ok(Cohort {
            subjects,
            feature_names,
            provenance,
        })
    }

    pub fn subjects(&self) -> &[Subject] {
        &self.subjects
    }

    pub fn len(&self) -> usize {
        self.subjects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subjects.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn labels(&self) -> Vec<DiagnosticLabel> {
        self.subjects.iter().map(|s| s.label).collect()
    }

    pub fn label_counts(&self) -> BTreeMap<DiagnosticLabel, usize> {
        let mut counts = BTreeMap::new();
        for s in &self.subjects {
            *counts.entry(s.label).or_insert(0) += 1;
        }
        counts
    }

    /// A copy with demographic columns (age, mmse, education) appended to the
    /// feature vectors. Sex is omitted: it is categorical and the classifiers
    /// here consume real-valued features.
    pub fn with_demographic_features(&self) -> Result<Cohort> {
        let mut names = self.feature_names.clone();
        names.extend(["age", "mmse", "education"].map(String::from));
        let subjects = self
            .subjects
            .iter()
            .map(|s| {
                let mut features = s.features.clone();
                features.extend([s.age, s.mmse, s.education]);
                Subject {
                    features,
                    ..s.clone()
                }
            })
            .collect();
        Cohort::new(subjects, names, self.provenance.clone())
    }
}

const FIXED_COLUMNS: [&str; 6] = ["id", "label", "age", "sex", "mmse", "education"];

/// Loads a cohort from CSV. When `expected_features` is given, the file's
/// feature column count must match it.
pub fn load_cohort(path: impl AsRef<Path>, expected_features: Option<usize>) -> Result<Cohort> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(BufReader::new(file));

    let headers = reader.headers()?.clone();
    if headers.len() < FIXED_COLUMNS.len() {
        return Err(Error::data(format!(
            "header has {} columns, expected at least {} ({})",
            headers.len(),
            FIXED_COLUMNS.len(),
            FIXED_COLUMNS.join(",")
        )));
    }
    for (got, want) in headers.iter().zip(FIXED_COLUMNS) {
        if !got.trim().eq_ignore_ascii_case(want) {
            return Err(Error::data(format!(
                "unexpected header column \"{got}\" (expected \"{want}\")"
            )));
        }
    }
    let feature_names: Vec<String> = headers
        .iter()
        .skip(FIXED_COLUMNS.len())
        .map(|s| s.trim().to_string())
        .collect();
    if let Some(expected) = expected_features {
        if feature_names.len() != expected {
            return Err(Error::data(format!(
                "file has {} feature columns, expected {expected}",
                feature_names.len()
            )));
        }
    }

    let width = FIXED_COLUMNS.len() + feature_names.len();
    let mut subjects = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let row = line + 2; // 1-based, after header
        if record.len() != width {
            return Err(Error::data(format!(
                "row {row}: has {} fields, expected {width}",
                record.len()
            )));
        }
        let id = record[0].trim().to_string();
        if id.is_empty() {
            return Err(Error::data(format!("row {row}: missing id")));
        }
        let label = DiagnosticLabel::parse(&record[1])
            .map_err(|e| Error::data(format!("row {row}: {e}")))?;
        let parse_num = |field: usize, name: &str| -> Result<f64> {
            record[field].trim().parse::<f64>().map_err(|_| {
                Error::data(format!(
                    "row {row}: non-numeric {name} \"{}\"",
                    &record[field]
                ))
            })
        };
        let age = parse_num(2, "age")?;
        let sex = Sex::parse(&record[3]).map_err(|e| Error::data(format!("row {row}: {e}")))?;
        let mmse = parse_num(4, "mmse")?;
        let education = parse_num(5, "education")?;
        let mut features = Vec::with_capacity(feature_names.len());
        for (j, name) in feature_names.iter().enumerate() {
            let v = parse_num(FIXED_COLUMNS.len() + j, name)?;
            if !v.is_finite() {
                return Err(Error::data(format!(
                    "row {row}: non-finite feature cell in column \"{name}\""
                )));
            }
            features.push(v);
        }
        subjects.push(Subject {
            id,
            label,
            age,
            sex,
            mmse,
            education,
            features,
        });
    }

    Cohort::new(
        subjects,
        feature_names,
        Provenance::Ingested {
            path: path.display().to_string(),
        },
    )
}

/// Writes a cohort as CSV. Floats use Rust's shortest round-trip formatting,
/// so save -> load -> save is byte-stable.
pub fn save_cohort(cohort: &Cohort, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut header: Vec<&str> = FIXED_COLUMNS.to_vec();
    header.extend(cohort.feature_names.iter().map(|s| s.as_str()));
    writeln!(w, "{}", header.join(",")).map_err(|e| Error::io(path, e))?;
    for s in cohort.subjects() {
        let mut fields = vec![
            s.id.clone(),
            s.label.to_string(),
            format_float(s.age),
            s.sex.to_string(),
            format_float(s.mmse),
            format_float(s.education),
        ];
        fields.extend(s.features.iter().map(|v| format_float(*v)));
        writeln!(w, "{}", fields.join(",")).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn format_float(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_basic_cohort() {
        let f = write_temp(
            "id,label,age,sex,mmse,education,r1,r2\n\
             s1,CN,68.0,M,29,14,2.5,2.6\n\
             s2,ad,72.5,F,24,13,2.1,2.0\n",
        );
        let cohort = load_cohort(f.path(), Some(2)).unwrap();
        assert_eq!(cohort.len(), 2);
        assert_eq!(cohort.feature_names(), &["r1", "r2"]);
        assert_eq!(cohort.subjects()[1].label, DiagnosticLabel::Ad);
        assert_eq!(cohort.subjects()[0].features, vec![2.5, 2.6]);
    }

    #[test]
    fn header_only_is_empty_data_section() {
        let f = write_temp("id,label,age,sex,mmse,education,r1\n");
        let err = load_cohort(f.path(), None).unwrap_err();
        assert!(err.to_string().contains("empty data section"), "{err}");
    }

    #[test]
    fn ftd_row_is_unknown_label() {
        let f = write_temp(
            "id,label,age,sex,mmse,education,r1\n\
             s1,ftd,68.0,M,29,14,2.5\n",
        );
        let err = load_cohort(f.path(), None).unwrap_err();
        assert!(err.to_string().contains("unknown label"), "{err}");
    }

    #[test]
    fn duplicate_id_rejected() {
        let f = write_temp(
            "id,label,age,sex,mmse,education,r1\n\
             s1,CN,68.0,M,29,14,2.5\n\
             s1,AD,71.0,F,25,12,2.2\n",
        );
        let err = load_cohort(f.path(), None).unwrap_err();
        assert!(err.to_string().contains("duplicate id"), "{err}");
    }

    #[test]
    fn non_numeric_feature_cell_rejected() {
        let f = write_temp(
            "id,label,age,sex,mmse,education,r1\n\
             s1,CN,68.0,M,29,14,abc\n",
        );
        let err = load_cohort(f.path(), None).unwrap_err();
        assert!(err.to_string().contains("non-numeric"), "{err}");
    }

    #[test]
    fn inconsistent_row_width_rejected() {
        let f = write_temp(
            "id,label,age,sex,mmse,education,r1,r2\n\
             s1,CN,68.0,M,29,14,2.5\n",
        );
        let err = load_cohort(f.path(), None).unwrap_err();
        assert!(err.to_string().contains("expected 8"), "{err}");
    }

    #[test]
    fn schema_mismatch_rejected() {
        let f = write_temp(
            "id,label,age,sex,mmse,education,r1\n\
             s1,CN,68.0,M,29,14,2.5\n",
        );
        let err = load_cohort(f.path(), Some(3)).unwrap_err();
        assert!(err.to_string().contains("expected 3"), "{err}");
    }

    #[test]
    fn save_load_round_trip_is_byte_stable() {
        let f = write_temp(
            "id,label,age,sex,mmse,education,r1,r2\n\
             s1,CN,68.25,M,29,14,2.5000001,2.6\n\
             s2,svPPA,61,F,20,11,-0.125,3.75\n",
        );
        let cohort = load_cohort(f.path(), None).unwrap();
        let out1 = tempfile::NamedTempFile::new().unwrap();
        save_cohort(&cohort, out1.path()).unwrap();
        let reloaded = load_cohort(out1.path(), None).unwrap();
        let out2 = tempfile::NamedTempFile::new().unwrap();
        save_cohort(&reloaded, out2.path()).unwrap();
        let b1 = std::fs::read(out1.path()).unwrap();
        let b2 = std::fs::read(out2.path()).unwrap();
        assert_eq!(b1, b2);
        // Parsed values survive exactly.
        assert_eq!(reloaded.subjects()[0].features, cohort.subjects()[0].features);
    }

    #[test]
    fn demographics_append() {
        let f = write_temp(
            "id,label,age,sex,mmse,education,r1\n\
             s1,CN,68.0,M,29,14,2.5\n",
        );
        let cohort = load_cohort(f.path(), None).unwrap().with_demographic_features().unwrap();
        assert_eq!(cohort.feature_count(), 4);
        assert_eq!(cohort.subjects()[0].features, vec![2.5, 68.0, 29.0, 14.0]);
    }
}
