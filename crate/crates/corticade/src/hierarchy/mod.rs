//! Diagnostic cascades: the binary decision tree wiring two-class scorers to
//! label groups, plus the flat five-class baseline.

mod cascade;
mod flat;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dataset::DiagnosticLabel;
use crate::error::{Error, Result};

pub use cascade::{train_cascade, train_cascade_matrix, CascadeModel, NodeModel, PathStep, TrainConfig, TrainMethod};
pub use flat::{train_flat, train_flat_matrix, FlatModel, FlatParams};

/// A node of the cascade tree: either a leaf label or a binary step routing
/// positives to one subtree and negatives to the other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HierarchyNode {
    Leaf(DiagnosticLabel),
    Step {
        name: String,
        positive: Box<HierarchyNode>,
        negative: Box<HierarchyNode>,
    },
}

impl HierarchyNode {
    fn leaves_into(&self, out: &mut Vec<DiagnosticLabel>) {
        match self {
            HierarchyNode::Leaf(l) => out.push(*l),
            HierarchyNode::Step { positive, negative, .. } => {
                positive.leaves_into(out);
                negative.leaves_into(out);
            }
        }
    }

    pub fn leaves(&self) -> Vec<DiagnosticLabel> {
        let mut out = Vec::new();
        self.leaves_into(&mut out);
        out
    }
}

/// A full cascade specification. Steps are indexed in pre-order
/// (positive subtree first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchySpec {
    pub root: HierarchyNode,
}

/// A resolved internal node: its name and the leaf groups on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct StepInfo {
    pub index: usize,
    pub name: String,
    pub positive_labels: BTreeSet<DiagnosticLabel>,
    pub negative_labels: BTreeSet<DiagnosticLabel>,
}

impl StepInfo {
    pub fn union(&self) -> BTreeSet<DiagnosticLabel> {
        self.positive_labels
            .union(&self.negative_labels)
            .copied()
            .collect()
    }
}

impl HierarchySpec {
    /// Checks the tree invariants: at least one step, no duplicate leaves
    /// (so each label is reachable by exactly one root-to-leaf path), and by
    /// construction each step's two groups are disjoint and cover exactly
    /// the labels reaching it.
    pub fn validate(&self) -> Result<()> {
        if matches!(self.root, HierarchyNode::Leaf(_)) {
            return Err(Error::data("hierarchy: root cannot be a leaf"));
        }
        let leaves = self.root.leaves();
        let unique: BTreeSet<_> = leaves.iter().copied().collect();
        if unique.len() != leaves.len() {
            return Err(Error::data("hierarchy: a label appears on two paths"));
        }
        Ok(())
    }

    /// Leaf labels in tree order.
    pub fn leaves(&self) -> Vec<DiagnosticLabel> {
        self.root.leaves()
    }

    /// All internal nodes in pre-order with their side groups.
    pub fn steps(&self) -> Vec<StepInfo> {
        fn walk(node: &HierarchyNode, out: &mut Vec<StepInfo>) {
            if let HierarchyNode::Step { name, positive, negative } = node {
                let info = StepInfo {
                    index: out.len(),
                    name: name.clone(),
                    positive_labels: positive.leaves().into_iter().collect(),
                    negative_labels: negative.leaves().into_iter().collect(),
                };
                out.push(info);
                walk(positive, out);
                walk(negative, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    /// Root-to-leaf path for a label: the step indices visited and whether
    /// the positive side was taken at each.
    pub fn path_for(&self, label: DiagnosticLabel) -> Result<Vec<(usize, bool)>> {
        let steps = self.steps();
        let mut path = Vec::new();
        let mut node = 0usize; // pre-order index of the current step
        loop {
            let step = &steps[node];
            let take_positive = if step.positive_labels.contains(&label) {
                true
            } else if step.negative_labels.contains(&label) {
                false
            } else {
                return Err(Error::data(format!(
                    "hierarchy: label {label} not reachable from step \"{}\"",
                    step.name
                )));
            };
            path.push((node, take_positive));
            // Child step index in pre-order: positive child follows
            // immediately; negative child follows the whole positive subtree.
            let side = if take_positive {
                &step.positive_labels
            } else {
                &step.negative_labels
            };
            if side.len() == 1 {
                return Ok(path);
            }
            node = if take_positive {
                node + 1
            } else {
                node + 1 + internal_count(step.positive_labels.len())
            };
        }
    }

    /// Depth of a leaf = number of steps on its path.
    pub fn depth_of(&self, label: DiagnosticLabel) -> Result<usize> {
        Ok(self.path_for(label)?.len())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let spec: HierarchySpec = serde_json::from_str(json)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Number of internal nodes in a subtree with `leaves` leaf labels (a binary
/// tree has leaves − 1 internal nodes).
fn internal_count(leaves: usize) -> usize {
    leaves.saturating_sub(1)
}

fn leaf(label: DiagnosticLabel) -> HierarchyNode {
    HierarchyNode::Leaf(label)
}

fn step(name: &str, positive: HierarchyNode, negative: HierarchyNode) -> HierarchyNode {
    HierarchyNode::Step {
        name: name.to_string(),
        positive: Box::new(positive),
        negative: Box::new(negative),
    }
}

/// The four-step diagnostic cascade. The positive side of every step is the
/// diseased / more specific group:
/// Step1 CN vs Dementia, Step2 NonFTD vs FTD, Step3 bvFTD vs PPA,
/// Step4 nfvPPA vs svPPA.
pub fn default_hierarchy() -> HierarchySpec {
    use DiagnosticLabel::*;
    HierarchySpec {
        root: step(
            "Step1 (CN vs Dementia)",
            step(
                "Step2 (FTD vs Non-FTD)",
                step(
                    "Step3 (bvFTD vs PPA)",
                    leaf(BvFtd),
                    step("Step4 (nfvPPA vs svPPA)", leaf(SvPpa), leaf(NfvPpa)),
                ),
                leaf(Ad),
            ),
            leaf(Cn),
        ),
    }
}

/// Two alternate cascade orderings used for comparison experiments. Both
/// split one specific class off per step, in a different order than the
/// default tree.
pub fn alternate_hierarchies() -> Vec<HierarchySpec> {
    use DiagnosticLabel::*;
    let alt1 = HierarchySpec {
        root: step(
            "Alt1-Step1 (CN vs Dementia)",
            step(
                "Alt1-Step2 (FTD vs Non-FTD)",
                step(
                    "Alt1-Step3 (svPPA vs bvFTD+nfvPPA)",
                    leaf(SvPpa),
                    step("Alt1-Step4 (nfvPPA vs bvFTD)", leaf(NfvPpa), leaf(BvFtd)),
                ),
                leaf(Ad),
            ),
            leaf(Cn),
        ),
    };
    let alt2 = HierarchySpec {
        root: step(
            "Alt2-Step1 (CN vs Dementia)",
            step(
                "Alt2-Step2 (bvFTD vs Non-FTD+PPA)",
                leaf(BvFtd),
                step(
                    "Alt2-Step3 (svPPA vs AD+nfvPPA)",
                    leaf(SvPpa),
                    step("Alt2-Step4 (nfvPPA vs AD)", leaf(NfvPpa), leaf(Ad)),
                ),
            ),
            leaf(Cn),
        ),
    };
    vec![alt1, alt2]
}

/// Looks up a hierarchy by CLI name: `default`, `alt1`, `alt2`.
pub fn hierarchy_by_name(name: &str) -> Option<HierarchySpec> {
    match name.to_ascii_lowercase().as_str() {
        "default" => Some(default_hierarchy()),
        "alt1" => Some(alternate_hierarchies().remove(0)),
        "alt2" => Some(alternate_hierarchies().remove(1)),
        _ => None,
    }
}
