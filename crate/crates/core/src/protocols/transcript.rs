use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Messages of one (possibly repeated) execution. Vectors have one entry
/// per coordinate.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coins: Option<Vec<usize>>,
    pub queries: Vec<Vec<usize>>,
    pub responses: Vec<Vec<usize>>,
    pub aborted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdicts: Option<Vec<bool>>,
}

impl Transcript {
    pub fn aborted() -> Self {
        Self { aborted: true, ..Self::default() }
    }

    pub fn is_complete(&self, rounds: usize) -> bool {
        !self.aborted && self.queries.len() == rounds && self.responses.len() == rounds
    }

    /// Prefix with only the first `rounds` query/response pairs.
    pub fn prefix(&self, rounds: usize) -> Self {
        Self {
            first: self.first.clone(),
            coins: self.coins.clone(),
            queries: self.queries[..rounds].to_vec(),
            responses: self.responses[..rounds].to_vec(),
            aborted: false,
            verdicts: None,
        }
    }
}
