//! Messages and exported language tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed-length sequence of symbol indices in [0, |V|).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Message(pub Vec<u16>);

impl Message {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u16] {
        &self.0
    }

    /// Fraction of positions where both messages carry the same symbol.
    pub fn per_symbol_accuracy(&self, other: &Message) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::InvalidArgument(format!(
                "message length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        let matches = self
            .0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| a == b)
            .count();
        Ok(matches as f64 / self.len() as f64)
    }
}

/// Deterministic input-to-message mapping exported for analysis; the
/// interchange format for all metrics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LanguageTable {
    pub meta: LanguageMeta,
    pub entries: Vec<LanguageEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LanguageMeta {
    pub n_att: usize,
    pub n_val: usize,
    #[serde(rename = "V")]
    pub vocab: usize,
    #[serde(rename = "L")]
    pub msg_len: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub topsim: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LanguageEntry {
    pub input: Vec<u16>,
    pub message: Vec<u16>,
}

impl LanguageTable {
    pub fn messages(&self) -> Vec<Message> {
        self.entries
            .iter()
            .map(|e| Message(e.message.clone()))
            .collect()
    }

    pub fn inputs(&self) -> Vec<Vec<u16>> {
        self.entries.iter().map(|e| e.input.clone()).collect()
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
