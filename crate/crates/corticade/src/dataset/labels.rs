//! Diagnostic leaf labels and the label groups used by cascade steps.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five leaf diagnostic classes, in canonical order.
///
/// The canonical order (CN, AD, bvFTD, nfvPPA, svPPA) is the tie-break order
/// for flat-model argmax ties and the row/column order of confusion matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DiagnosticLabel {
    #[serde(rename = "CN")]
    Cn,
    #[serde(rename = "AD")]
    Ad,
    #[serde(rename = "bvFTD")]
    BvFtd,
    #[serde(rename = "nfvPPA")]
    NfvPpa,
    #[serde(rename = "svPPA")]
    SvPpa,
}

impl DiagnosticLabel {
    pub const ALL: [DiagnosticLabel; 5] = [
        DiagnosticLabel::Cn,
        DiagnosticLabel::Ad,
        DiagnosticLabel::BvFtd,
        DiagnosticLabel::NfvPpa,
        DiagnosticLabel::SvPpa,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticLabel::Cn => "CN",
            DiagnosticLabel::Ad => "AD",
            DiagnosticLabel::BvFtd => "bvFTD",
            DiagnosticLabel::NfvPpa => "nfvPPA",
            DiagnosticLabel::SvPpa => "svPPA",
        }
    }

    /// Case-insensitive parse of the five leaf names.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cn" => Ok(DiagnosticLabel::Cn),
            "ad" => Ok(DiagnosticLabel::Ad),
            "bvftd" => Ok(DiagnosticLabel::BvFtd),
            "nfvppa" => Ok(DiagnosticLabel::NfvPpa),
            "svppa" => Ok(DiagnosticLabel::SvPpa),
            other => Err(Error::data(format!("unknown label \"{other}\""))),
        }
    }

    /// Index into [`DiagnosticLabel::ALL`].
    pub fn canonical_index(self) -> usize {
        match self {
            DiagnosticLabel::Cn => 0,
            DiagnosticLabel::Ad => 1,
            DiagnosticLabel::BvFtd => 2,
            DiagnosticLabel::NfvPpa => 3,
            DiagnosticLabel::SvPpa => 4,
        }
    }

    pub fn from_canonical_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for DiagnosticLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DiagnosticLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DiagnosticLabel::parse(s)
    }
}

/// Label groups at the cascade's internal nodes, plus the leaves themselves.
///
/// In this dataset AD is the only non-FTD dementia, so NonFTD is a
/// single-member group rather than a leaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupLabel {
    Dementia,
    Ftd,
    NonFtd,
    Ppa,
    Leaf(DiagnosticLabel),
}

impl GroupLabel {
    pub fn members(self) -> &'static [DiagnosticLabel] {
        use DiagnosticLabel::*;
        match self {
            GroupLabel::Dementia => &[Ad, BvFtd, NfvPpa, SvPpa],
            GroupLabel::Ftd => &[BvFtd, NfvPpa, SvPpa],
            GroupLabel::NonFtd => &[Ad],
            GroupLabel::Ppa => &[NfvPpa, SvPpa],
            GroupLabel::Leaf(DiagnosticLabel::Cn) => &[Cn],
            GroupLabel::Leaf(DiagnosticLabel::Ad) => &[Ad],
            GroupLabel::Leaf(DiagnosticLabel::BvFtd) => &[BvFtd],
            GroupLabel::Leaf(DiagnosticLabel::NfvPpa) => &[NfvPpa],
            GroupLabel::Leaf(DiagnosticLabel::SvPpa) => &[SvPpa],
        }
    }

    pub fn contains(self, label: DiagnosticLabel) -> bool {
        self.members().contains(&label)
    }

    pub fn name(self) -> &'static str {
        match self {
            GroupLabel::Dementia => "Dementia",
            GroupLabel::Ftd => "FTD",
            GroupLabel::NonFtd => "NonFTD",
            GroupLabel::Ppa => "PPA",
            GroupLabel::Leaf(l) => l.as_str(),
        }
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sex {
    M,
    F,
}

impl Sex {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "M" => Ok(Sex::M),
            "F" => Ok(Sex::F),
            other => Err(Error::data(format!("unknown sex \"{other}\" (expected M or F)"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sex::M => "M",
            Sex::F => "F",
        }
    }
}

impl fmt::Display for Sex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
