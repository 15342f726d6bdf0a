//! Repeated stratified k-fold plans with train/test/validation roles.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Cohort, DiagnosticLabel};
use crate::error::{Error, Result};

/// One repetition: the k folds (subject indices) and which fold indices play
/// the train / test / validation roles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepFolds {
    pub folds: Vec<Vec<usize>>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub validation: Vec<usize>,
}

impl RepFolds {
    fn subjects_of(&self, roles: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = roles
            .iter()
            .flat_map(|&f| self.folds[f].iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    pub fn train_subjects(&self) -> Vec<usize> {
        self.subjects_of(&self.train)
    }

    pub fn test_subjects(&self) -> Vec<usize> {
        self.subjects_of(&self.test)
    }

    pub fn validation_subjects(&self) -> Vec<usize> {
        self.subjects_of(&self.validation)
    }
}

/// A full cross-validation plan: folds reshuffled per repetition, role
/// assignment rotated by a per-repetition draw, everything derived from the
/// seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub assignments: Vec<RepFolds>,
    pub warnings: Vec<String>,
}

/// Builds a stratified plan. With k = 10 the roles split 6/2/2 folds; in
/// general (k−4)/2/2 for k ≥ 5, and (k−2)/1/1 for k in {3, 4} so all three
/// roles stay non-empty.
pub fn make_folds(cohort: &Cohort, k: usize, repetitions: usize, seed: u64) -> Result<FoldPlan> {
    if k < 3 {
        return Err(Error::config(format!(
            "cross-validation needs k >= 3 (train/test/validation), got {k}"
        )));
    }
    if cohort.len() < k {
        return Err(Error::config(format!(
            "cohort of {} subjects cannot fill {k} folds",
            cohort.len()
        )));
    }
    if repetitions == 0 {
        return Err(Error::config("need at least one repetition"));
    }
    let (n_test, n_val) = if k >= 5 { (2, 2) } else { (1, 1) };

    let mut warnings = Vec::new();
    for (label, count) in cohort.label_counts() {
        if count < k {
            warnings.push(format!(
                "class {label} has {count} subjects (< k = {k}); its members cannot reach every fold"
            ));
        }
    }

    // Subject indices grouped by label, canonical order, for stratification.
    let mut by_label: Vec<Vec<usize>> = vec![Vec::new(); DiagnosticLabel::ALL.len()];
    for (i, s) in cohort.subjects().iter().enumerate() {
        by_label[s.label.canonical_index()].push(i);
    }

    let mut assignments = Vec::with_capacity(repetitions);
    for rep in 0..repetitions {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(rep as u64 + 1);

        let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
        let mut counter = 0usize;
        for members in &by_label {
            let mut shuffled = members.clone();
            shuffled.shuffle(&mut rng);
            for idx in shuffled {
                folds[counter % k].push(idx);
                counter += 1;
            }
        }
        for fold in folds.iter_mut() {
            fold.sort_unstable();
        }

        let offset = rng.random_range(0..k);
        let role = |slot: usize| (offset + slot) % k;
        let test: Vec<usize> = (0..n_test).map(role).collect();
        let validation: Vec<usize> = (n_test..n_test + n_val).map(role).collect();
        let train: Vec<usize> = (n_test + n_val..k).map(role).collect();
        assignments.push(RepFolds {
            folds,
            train,
            test,
            validation,
        });
    }

    Ok(FoldPlan {
        k,
        repetitions,
        seed,
        assignments,
        warnings,
    })
}
