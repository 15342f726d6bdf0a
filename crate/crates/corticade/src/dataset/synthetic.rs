//! Synthetic cohort generation.
//!
//! Stands in for the access-restricted clinical data: per-label mean-thickness
//! templates plus isotropic Gaussian noise, with demographics drawn from
//! per-label normal distributions. Fully deterministic for a fixed seed.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::cohort::{Cohort, Provenance, Subject};
use super::labels::{DiagnosticLabel, Sex};

/// A contiguous run of regions with a mean-thickness offset, in mm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionBlock {
    pub start: usize,
    pub len: usize,
    pub delta_mm: f64,
}

/// Template construction by rule: a uniform baseline with per-label atrophy
/// blocks, instead of spelling out full per-region templates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateRules {
    pub baseline_mm: f64,
    #[serde(default)]
    pub atrophy: BTreeMap<DiagnosticLabel, Vec<RegionBlock>>,
}

/// Generation parameters. Exactly one of `templates` / `template_rules`
/// must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub counts: BTreeMap<DiagnosticLabel, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub templates: Option<BTreeMap<DiagnosticLabel, Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template_rules: Option<TemplateRules>,
    pub std: f64,
    pub regions: usize,
    pub seed: u64,
}

/// Per-label demographic distributions: (age mean, age sd), (mmse mean, sd),
/// (education mean, sd). MMSE is clamped to [0, 30] after sampling.
fn demographics(label: DiagnosticLabel) -> ((f64, f64), (f64, f64), (f64, f64)) {
    match label {
        DiagnosticLabel::Cn => ((68.3, 5.51), (28.8, 1.21), (13.9, 3.10)),
        DiagnosticLabel::Ad => ((72.1, 5.0), (24.0, 6.0), (13.0, 3.1)),
        // The three FTD variants share the FTD group demographics.
        DiagnosticLabel::BvFtd | DiagnosticLabel::NfvPpa | DiagnosticLabel::SvPpa => {
            ((68.5, 6.0), (23.2, 6.7), (13.4, 2.96))
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.counts.values().all(|&c| c == 0) {
            return Err(Error::data("synthetic spec: all counts are zero"));
        }
        if self.std < 0.0 {
            return Err(Error::data("synthetic spec: negative std"));
        }
        if self.regions == 0 {
            return Err(Error::data("synthetic spec: zero regions"));
        }
        match (&self.templates, &self.template_rules) {
            (Some(_), Some(_)) => Err(Error::data(
                "synthetic spec: give templates or template_rules, not both",
            )),
            (None, None) => Err(Error::data(
                "synthetic spec: missing templates or template_rules",
            )),
            (Some(templates), None) => {
                for (label, t) in templates {
                    if t.len() != self.regions {
                        return Err(Error::data(format!(
                            "synthetic spec: template for {label} has {} regions, expected {}",
                            t.len(),
                            self.regions
                        )));
                    }
                }
                for label in self.counts.keys() {
                    if self.counts[label] > 0 && !templates.contains_key(label) {
                        return Err(Error::data(format!(
                            "synthetic spec: no template for {label}"
                        )));
                    }
                }
                Ok(())
            }
            (None, Some(rules)) => {
                for (label, blocks) in &rules.atrophy {
                    for b in blocks {
                        if b.start + b.len > self.regions {
                            return Err(Error::data(format!(
                                "synthetic spec: {label} block {}..{} exceeds {} regions",
                                b.start,
                                b.start + b.len,
                                self.regions
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// The per-label mean-thickness template, resolved from either form.
    pub fn template_for(&self, label: DiagnosticLabel) -> Result<Vec<f64>> {
        if let Some(templates) = &self.templates {
            return templates
                .get(&label)
                .cloned()
                .ok_or_else(|| Error::data(format!("synthetic spec: no template for {label}")));
        }
        let rules = self
            .template_rules
            .as_ref()
            .ok_or_else(|| Error::data("synthetic spec: missing templates or template_rules"))?;
        let mut t = vec![rules.baseline_mm; self.regions];
        if let Some(blocks) = rules.atrophy.get(&label) {
            for b in blocks {
                for r in b.start..b.start + b.len {
                    t[r] += b.delta_mm;
                }
            }
        }
        Ok(t)
    }
}

/// Draws a cohort from the spec. Subjects are generated label by label in
/// canonical order with a fixed per-subject draw order, so equal seeds give
/// byte-identical cohorts.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Cohort> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut subjects = Vec::new();
    for label in DiagnosticLabel::ALL {
        let count = spec.counts.get(&label).copied().unwrap_or(0);
        if count == 0 {
            continue;
        }
        let template = spec.template_for(label)?;
        let ((age_m, age_sd), (mmse_m, mmse_sd), (edu_m, edu_sd)) = demographics(label);
        let age_dist = normal(age_m, age_sd)?;
        let mmse_dist = normal(mmse_m, mmse_sd)?;
        let edu_dist = normal(edu_m, edu_sd)?;
        for i in 0..count {
            let features: Vec<f64> = if spec.std == 0.0 {
                template.clone()
            } else {
                let noise = normal(0.0, spec.std)?;
                template.iter().map(|&m| m + noise.sample(&mut rng)).collect()
            };
            let age = age_dist.sample(&mut rng);
            let sex = if rng.random_range(0.0..1.0) < 0.485 {
                Sex::M
            } else {
                Sex::F
            };
            let mmse = mmse_dist.sample(&mut rng).clamp(0.0, 30.0);
            let education = edu_dist.sample(&mut rng).max(0.0);
            subjects.push(Subject {
                id: format!("{label}_{:04}", i + 1),
                label,
                age,
                sex,
                mmse,
                education,
                features,
            });
        }
    }
    let feature_names = (1..=spec.regions).map(|i| format!("f_{i}")).collect();
    let provenance = Provenance::Synthetic {
        seed: spec.seed,
        spec: serde_json::to_string(spec)?,
    };
    Cohort::new(subjects, feature_names, provenance)
}

fn normal(mean: f64, sd: f64) -> Result<Normal<f64>> {
    Normal::new(mean, sd).map_err(|e| Error::data(format!("bad normal({mean}, {sd}): {e}")))
}

/// Class counts matching the study cohort: 84 CN, 24 AD, 30 bvFTD,
/// 25 nfvPPA, 41 svPPA (204 subjects).
pub fn paper_counts() -> BTreeMap<DiagnosticLabel, usize> {
    BTreeMap::from([
        (DiagnosticLabel::Cn, 84),
        (DiagnosticLabel::Ad, 24),
        (DiagnosticLabel::BvFtd, 30),
        (DiagnosticLabel::NfvPpa, 25),
        (DiagnosticLabel::SvPpa, 41),
    ])
}

/// Default atrophy layout over a 68-region atlas: lowered thickness on
/// anatomically motivated blocks (frontal/insular for bvFTD and nfvPPA,
/// anterior temporal for svPPA, temporoparietal for AD), with a shared mild
/// dementia-wide component so the coarse split is easier than the fine ones.
///
/// Region index convention: 0..10 frontal, 10..14 insula, 14..22 anterior
/// temporal, 22..30 temporoparietal, 30..regions untouched.
pub fn default_atrophy_rules() -> TemplateRules {
    use DiagnosticLabel::*;
    let shared = |blocks: &mut Vec<RegionBlock>| {
        // Global cortical thinning common to all dementias.
        blocks.push(RegionBlock {
            start: 30,
            len: 38,
            delta_mm: -0.25,
        });
    };
    let mut atrophy = BTreeMap::new();
    let mut ad = vec![
        RegionBlock { start: 22, len: 8, delta_mm: -0.55 },
        RegionBlock { start: 14, len: 4, delta_mm: -0.15 },
    ];
    shared(&mut ad);
    atrophy.insert(Ad, ad);
    let mut bv = vec![
        RegionBlock { start: 0, len: 10, delta_mm: -0.55 },
        RegionBlock { start: 10, len: 4, delta_mm: -0.35 },
    ];
    shared(&mut bv);
    atrophy.insert(BvFtd, bv);
    let mut nfv = vec![
        RegionBlock { start: 4, len: 6, delta_mm: -0.35 },
        RegionBlock { start: 10, len: 4, delta_mm: -0.55 },
    ];
    shared(&mut nfv);
    atrophy.insert(NfvPpa, nfv);
    let mut sv = vec![
        RegionBlock { start: 14, len: 8, delta_mm: -0.55 },
        RegionBlock { start: 10, len: 2, delta_mm: -0.2 },
    ];
    shared(&mut sv);
    atrophy.insert(SvPpa, sv);
    TemplateRules {
        baseline_mm: 2.5,
        atrophy,
    }
}

/// A noisy cohort with the study's class counts over 68 regions; `std`
/// controls class overlap.
pub fn paper_counts_spec(std: f64, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        counts: paper_counts(),
        templates: None,
        template_rules: Some(default_atrophy_rules()),
        std,
        regions: 68,
        seed,
    }
}

/// A cohort whose class templates differ on disjoint region blocks separated
/// by `separation_mm`; with small `std` it is linearly separable.
pub fn separable_spec(
    counts: BTreeMap<DiagnosticLabel, usize>,
    regions: usize,
    separation_mm: f64,
    std: f64,
    seed: u64,
) -> SyntheticSpec {
    use DiagnosticLabel::*;
    let block = 6usize.min(regions / 5).max(1);
    let mut atrophy = BTreeMap::new();
    for (i, label) in [Ad, BvFtd, NfvPpa, SvPpa].into_iter().enumerate() {
        atrophy.insert(
            label,
            vec![RegionBlock {
                start: (i + 1) * block,
                len: block,
                delta_mm: -separation_mm,
            }],
        );
    }
    SyntheticSpec {
        counts,
        templates: None,
        template_rules: Some(TemplateRules {
            baseline_mm: 2.5,
            atrophy,
        }),
        std,
        regions,
        seed,
    }
}
