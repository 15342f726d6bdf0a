//! Training and routing for the diagnostic cascade.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::classifiers::{lda_fit, nb_fit, svm_fit, BinaryScorer, SvmConfig};
use crate::dataset::{Cohort, DiagnosticLabel};
use crate::error::{Error, Result};
use crate::features::{identity_pca, pca_fit, ComponentPolicy, FeatureMatrix, PcaModel};

use super::{HierarchySpec, StepInfo};

/// Method selector for cascade/flat training. `Oracle` routes by the true
/// label and is used by the evaluation harness to verify that routing itself
/// introduces no error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainMethod {
    Svm,
    Lda,
    Nb,
    Oracle,
}

impl std::fmt::Display for TrainMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TrainMethod::Svm => "svm",
            TrainMethod::Lda => "lda",
            TrainMethod::Nb => "nb",
            TrainMethod::Oracle => "oracle",
        })
    }
}

impl From<crate::classifiers::Method> for TrainMethod {
    fn from(m: crate::classifiers::Method) -> Self {
        match m {
            crate::classifiers::Method::Svm => TrainMethod::Svm,
            crate::classifiers::Method::Lda => TrainMethod::Lda,
            crate::classifiers::Method::Nb => TrainMethod::Nb,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub method: TrainMethod,
    pub pca: ComponentPolicy,
    /// Refit PCA per cascade node (default) or share one projection fit on
    /// the whole training set.
    pub per_node_pca: bool,
    /// Disable PCA entirely (identity projection).
    pub skip_pca: bool,
    pub svm: SvmConfig,
    pub lda_shrinkage: Option<f64>,
    pub nb_var_floor: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            method: TrainMethod::Svm,
            pca: ComponentPolicy::default(),
            per_node_pca: true,
            skip_pca: false,
            svm: SvmConfig::default(),
            lda_shrinkage: None,
            nb_var_floor: None,
        }
    }
}

/// A fitted cascade node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NodeModel {
    Trained { pca: PcaModel, scorer: BinaryScorer },
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedStep {
    pub name: String,
    pub positive_labels: BTreeSet<DiagnosticLabel>,
    pub negative_labels: BTreeSet<DiagnosticLabel>,
    pub model: NodeModel,
}

/// One routing decision: the pre-order step index, its name, and the raw
/// decision score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub step: usize,
    pub name: String,
    pub score: f64,
}

/// A trained cascade: the spec plus one fitted scorer (and projection) per
/// internal node, aligned with the spec's pre-order step list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeModel {
    pub spec: HierarchySpec,
    pub steps: Vec<TrainedStep>,
}

/// Display name for a label group, preferring the domain group names.
pub fn group_name(labels: &BTreeSet<DiagnosticLabel>) -> String {
    use DiagnosticLabel::*;
    if labels.len() == 1 {
        return labels.iter().next().unwrap().to_string();
    }
    let dementia: BTreeSet<_> = [Ad, BvFtd, NfvPpa, SvPpa].into_iter().collect();
    let ftd: BTreeSet<_> = [BvFtd, NfvPpa, SvPpa].into_iter().collect();
    let ppa: BTreeSet<_> = [NfvPpa, SvPpa].into_iter().collect();
    if *labels == dementia {
        "Dementia".to_string()
    } else if *labels == ftd {
        "FTD".to_string()
    } else if *labels == ppa {
        "PPA".to_string()
    } else {
        labels
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Trains the cascade on a cohort's stored feature vectors.
pub fn train_cascade(cohort: &Cohort, spec: &HierarchySpec, cfg: &TrainConfig) -> Result<CascadeModel> {
    let x = FeatureMatrix::from_cohort(cohort);
    train_cascade_matrix(&x, &cohort.labels(), spec, cfg)
}

/// Trains the cascade on an explicit feature matrix. Each internal node is
/// fit (PCA then scorer) on exactly the rows whose true label belongs to
/// that node's subtree.
pub fn train_cascade_matrix(
    x: &FeatureMatrix,
    labels: &[DiagnosticLabel],
    spec: &HierarchySpec,
    cfg: &TrainConfig,
) -> Result<CascadeModel> {
    spec.validate()?;
    if labels.len() != x.nrows() {
        return Err(Error::data(format!(
            "cascade: {} labels for {} rows",
            labels.len(),
            x.nrows()
        )));
    }
    let global_pca = if cfg.per_node_pca || cfg.skip_pca || cfg.method == TrainMethod::Oracle {
        None
    } else {
        Some(pca_fit(x, cfg.pca).map_err(|e| Error::data(format!("global pca: {e}")))?)
    };

    let mut steps = Vec::new();
    for info in spec.steps() {
        let model = fit_node(x, labels, &info, cfg, global_pca.as_ref())?;
        steps.push(TrainedStep {
            name: info.name.clone(),
            positive_labels: info.positive_labels.clone(),
            negative_labels: info.negative_labels.clone(),
            model,
        });
    }
    Ok(CascadeModel {
        spec: spec.clone(),
        steps,
    })
}

fn fit_node(
    x: &FeatureMatrix,
    labels: &[DiagnosticLabel],
    info: &StepInfo,
    cfg: &TrainConfig,
    global_pca: Option<&PcaModel>,
) -> Result<NodeModel> {
    if cfg.method == TrainMethod::Oracle {
        return Ok(NodeModel::Oracle);
    }
    let union = info.union();
    let members: Vec<usize> = (0..x.nrows()).filter(|&i| union.contains(&labels[i])).collect();
    let y: Vec<bool> = members
        .iter()
        .map(|&i| info.positive_labels.contains(&labels[i]))
        .collect();
    let pos_count = y.iter().filter(|&&p| p).count();
    let neg_count = y.len() - pos_count;
    if pos_count == 0 {
        return Err(Error::data(format!(
            "{}: empty positive side ({})",
            info.name,
            group_name(&info.positive_labels)
        )));
    }
    if neg_count == 0 {
        return Err(Error::data(format!(
            "{}: empty negative side ({})",
            info.name,
            group_name(&info.negative_labels)
        )));
    }

    let sub = x.subset_rows(&members)?;
    let pca = if cfg.skip_pca {
        identity_pca(x.ncols())
    } else if let Some(global) = global_pca {
        global.clone()
    } else {
        pca_fit(&sub, cfg.pca).map_err(|e| Error::data(format!("{}: {e}", info.name)))?
    };
    let projected = pca.transform(&sub)?;
    let scorer = match cfg.method {
        TrainMethod::Svm => svm_fit(&projected, &y, &cfg.svm),
        TrainMethod::Lda => lda_fit(&projected, &y, cfg.lda_shrinkage),
        TrainMethod::Nb => nb_fit(&projected, &y, cfg.nb_var_floor),
        TrainMethod::Oracle => unreachable!(),
    }
    .map_err(|e| match e {
        Error::SvmNonConvergence { .. } => e,
        other => Error::data(format!("{}: {other}", info.name)),
    })?
    .with_classes(
        group_name(&info.positive_labels),
        group_name(&info.negative_labels),
    );
    Ok(NodeModel::Trained { pca, scorer })
}

impl CascadeModel {
    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Routes a feature vector from the root by each step's decision sign.
    /// Fails on oracle nodes, which need the reference label.
    pub fn classify(&self, x: &[f64]) -> Result<(DiagnosticLabel, Vec<PathStep>)> {
        self.route(x, None)
    }

    /// Routing that supports oracle nodes: those score +1/−1 by the
    /// reference label's side, exercising the same path machinery.
    pub fn classify_with_reference(
        &self,
        x: &[f64],
        reference: DiagnosticLabel,
    ) -> Result<(DiagnosticLabel, Vec<PathStep>)> {
        self.route(x, Some(reference))
    }

    /// Raw decision score of one step applied directly to a feature vector
    /// (pca then scorer), independent of routing.
    pub fn step_score(&self, step: usize, x: &[f64], reference: Option<DiagnosticLabel>) -> Result<f64> {
        let s = &self.steps[step];
        match &s.model {
            NodeModel::Trained { pca, scorer } => scorer.score(&pca.transform_row(x)?),
            NodeModel::Oracle => {
                let label = reference.ok_or_else(|| {
                    Error::data("oracle scorer requires a reference label")
                })?;
                Ok(if s.positive_labels.contains(&label) { 1.0 } else { -1.0 })
            }
        }
    }

    fn route(
        &self,
        x: &[f64],
        reference: Option<DiagnosticLabel>,
    ) -> Result<(DiagnosticLabel, Vec<PathStep>)> {
        let mut path = Vec::new();
        let mut idx = 0usize;
        loop {
            let step = &self.steps[idx];
            let score = self.step_score(idx, x, reference)?;
            let positive = match &step.model {
                NodeModel::Trained { scorer, .. } => score > scorer.threshold,
                NodeModel::Oracle => score > 0.0,
            };
            path.push(PathStep {
                step: idx,
                name: step.name.clone(),
                score,
            });
            let side = if positive {
                &step.positive_labels
            } else {
                &step.negative_labels
            };
            if side.len() == 1 {
                return Ok((*side.iter().next().unwrap(), path));
            }
            idx = if positive {
                idx + 1
            } else {
                idx + 1 + (step.positive_labels.len() - 1)
            };
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synthetic, paper_counts, separable_spec};
    use crate::hierarchy::default_hierarchy;

    fn separable_cohort(seed: u64) -> Cohort {
        generate_synthetic(&separable_spec(paper_counts(), 40, 0.6, 0.0, seed)).unwrap()
    }

    #[test]
    fn separable_cohort_trains_all_steps_perfectly() {
        let cohort = separable_cohort(1);
        let spec = default_hierarchy();
        let model = train_cascade(&cohort, &spec, &TrainConfig::default()).unwrap();
        assert_eq!(model.step_count(), 4);
        let mut correct = 0;
        for s in cohort.subjects() {
            let (label, path) = model.classify(&s.features).unwrap();
            if label == s.label {
                assert_eq!(path.len(), spec.depth_of(s.label).unwrap());
                correct += 1;
            }
        }
        assert_eq!(correct, cohort.len(), "separable cohort must train to 100%");
    }

    #[test]
    fn missing_class_errors_at_the_right_step() {
        let mut counts = paper_counts();
        counts.insert(DiagnosticLabel::SvPpa, 0);
        let cohort = generate_synthetic(&separable_spec(counts, 40, 0.6, 0.0, 2)).unwrap();
        let err = train_cascade(&cohort, &default_hierarchy(), &TrainConfig::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("Step4"), "error should name Step4: {msg}");
        assert!(msg.contains("svPPA"), "error should name the empty side: {msg}");
    }

    #[test]
    fn oracle_routing_reaches_every_true_leaf() {
        let cohort = separable_cohort(3);
        let spec = default_hierarchy();
        let cfg = TrainConfig {
            method: TrainMethod::Oracle,
            ..TrainConfig::default()
        };
        let model = train_cascade(&cohort, &spec, &cfg).unwrap();
        for s in cohort.subjects() {
            let (label, path) = model.classify_with_reference(&s.features, s.label).unwrap();
            assert_eq!(label, s.label);
            assert_eq!(path.len(), spec.depth_of(s.label).unwrap());
        }
        // Plain classify refuses oracle nodes.
        assert!(model.classify(&cohort.subjects()[0].features).is_err());
    }

    #[test]
    fn forced_scores_route_to_svppa() {
        // All-positive routing along Dementia → FTD → PPA-side → svPPA takes
        // steps 1, 2, 4 positive and step 3 negative in the default tree.
        let cohort = separable_cohort(4);
        let cfg = TrainConfig {
            method: TrainMethod::Oracle,
            ..TrainConfig::default()
        };
        let model = train_cascade(&cohort, &default_hierarchy(), &cfg).unwrap();
        let (label, path) =
            model.classify_with_reference(&[0.0; 40], DiagnosticLabel::SvPpa).unwrap();
        assert_eq!(label, DiagnosticLabel::SvPpa);
        assert_eq!(path.len(), 4);
        assert!(path[0].score > 0.0 && path[1].score > 0.0 && path[3].score > 0.0);
        assert!(path[2].score < 0.0, "svPPA sits on Step3's negative (PPA) side");
    }

    #[test]
    fn cn_exits_at_step_one() {
        let cohort = separable_cohort(5);
        let model = train_cascade(&cohort, &default_hierarchy(), &TrainConfig::default()).unwrap();
        let cn = cohort
            .subjects()
            .iter()
            .find(|s| s.label == DiagnosticLabel::Cn)
            .unwrap();
        let (label, path) = model.classify(&cn.features).unwrap();
        assert_eq!(label, DiagnosticLabel::Cn);
        assert_eq!(path.len(), 1);
    }

    #[test]
    fn classify_is_deterministic() {
        let cohort = separable_cohort(6);
        let model = train_cascade(&cohort, &default_hierarchy(), &TrainConfig::default()).unwrap();
        let x = &cohort.subjects()[10].features;
        let a = model.classify(x).unwrap();
        let b = model.classify(x).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn out_of_subtree_rows_do_not_influence_a_node() {
        // Step4 (nfvPPA vs svPPA) must be identical when rows outside the PPA
        // subtree are shuffled among themselves.
        let cohort = separable_cohort(7);
        let x = FeatureMatrix::from_cohort(&cohort);
        let labels = cohort.labels();
        let spec = default_hierarchy();
        let cfg = TrainConfig::default();
        let base = train_cascade_matrix(&x, &labels, &spec, &cfg).unwrap();

        // Build a permutation that reverses the non-PPA rows but keeps PPA
        // rows (nfvPPA, svPPA) in place relative to each other.
        let ppa: Vec<usize> = (0..labels.len())
            .filter(|&i| {
                matches!(labels[i], DiagnosticLabel::NfvPpa | DiagnosticLabel::SvPpa)
            })
            .collect();
        let rest: Vec<usize> = (0..labels.len()).filter(|i| !ppa.contains(i)).collect();
        let mut order = Vec::new();
        order.extend(rest.iter().rev());
        order.extend(&ppa);
        let x2 = x.subset_rows(&order).unwrap();
        let labels2: Vec<DiagnosticLabel> = order.iter().map(|&i| labels[i]).collect();
        let permuted = train_cascade_matrix(&x2, &labels2, &spec, &cfg).unwrap();

        assert_eq!(base.steps[3].model, permuted.steps[3].model);
    }

    #[test]
    fn model_json_round_trip() {
        let cohort = separable_cohort(8);
        let model = train_cascade(&cohort, &default_hierarchy(), &TrainConfig::default()).unwrap();
        let json = model.to_json().unwrap();
        let back = CascadeModel::from_json(&json).unwrap();
        for s in cohort.subjects().iter().take(20) {
            assert_eq!(
                model.classify(&s.features).unwrap().0,
                back.classify(&s.features).unwrap().0
            );
        }
    }
}
