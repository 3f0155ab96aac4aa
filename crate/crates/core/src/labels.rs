//! The closed set of modulation classes handled by the pipeline.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// One of the ten supported modulation schemes.
///
/// The string form of each variant is used verbatim in prompts, reports and
/// shortlist files, so it is part of the wire format and must not change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModulationLabel {
    #[serde(rename = "4ASK")]
    Ask4,
    #[serde(rename = "4PAM")]
    Pam4,
    #[serde(rename = "8ASK")]
    Ask8,
    #[serde(rename = "16PAM")]
    Pam16,
    #[serde(rename = "CPFSK")]
    Cpfsk,
    #[serde(rename = "DQPSK")]
    Dqpsk,
    #[serde(rename = "GFSK")]
    Gfsk,
    #[serde(rename = "GMSK")]
    Gmsk,
    #[serde(rename = "OOK")]
    Ook,
    #[serde(rename = "OQPSK")]
    Oqpsk,
}

impl ModulationLabel {
    /// All ten labels in canonical (alphabetical-by-name) order.
    ///
    /// This order is the tie-break order everywhere a deterministic label
    /// ordering is needed.
    pub const ALL: [ModulationLabel; 10] = [
        ModulationLabel::Ask4,
        ModulationLabel::Pam4,
        ModulationLabel::Ask8,
        ModulationLabel::Pam16,
        ModulationLabel::Cpfsk,
        ModulationLabel::Dqpsk,
        ModulationLabel::Gfsk,
        ModulationLabel::Gmsk,
        ModulationLabel::Ook,
        ModulationLabel::Oqpsk,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModulationLabel::Ask4 => "4ASK",
            ModulationLabel::Pam4 => "4PAM",
            ModulationLabel::Ask8 => "8ASK",
            ModulationLabel::Pam16 => "16PAM",
            ModulationLabel::Cpfsk => "CPFSK",
            ModulationLabel::Dqpsk => "DQPSK",
            ModulationLabel::Gfsk => "GFSK",
            ModulationLabel::Gmsk => "GMSK",
            ModulationLabel::Ook => "OOK",
            ModulationLabel::Oqpsk => "OQPSK",
        }
    }

    /// Stable index into [`ModulationLabel::ALL`].
    pub fn index(&self) -> usize {
        ModulationLabel::ALL
            .iter()
            .position(|l| l == self)
            .expect("label present in ALL")
    }
}

impl fmt::Display for ModulationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModulationLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        ModulationLabel::ALL
            .iter()
            .find(|l| l.as_str() == upper)
            .copied()
            .ok_or_else(|| Error::invalid(format!("unknown modulation label `{s}`")))
    }
}
