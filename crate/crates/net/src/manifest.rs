use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::NetError;

/// One share server as listed for the combiner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Endpoint {
    pub id: u64,
    pub addr: String,
    pub scheme: String,
}

/// A JSON array of endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Manifest {
    pub endpoints: Vec<Endpoint>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self, NetError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, NetError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| NetError::Io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// The single scheme named by every entry.
    pub fn scheme(&self) -> Result<&str, NetError> {
        let first = self
            .endpoints
            .first()
            .ok_or_else(|| NetError::Manifest("no endpoints".into()))?;
        if let Some(other) = self.endpoints.iter().find(|e| e.scheme != first.scheme) {
            return Err(NetError::Manifest(format!(
                "mixed schemes {} and {}",
                first.scheme, other.scheme
            )));
        }
        Ok(&first.scheme)
    }
}
