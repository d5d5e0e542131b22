//! Tensor file format: a JSON object `{"d", "b", "format": "f64le", "data"}`
//! where `data` is base64 of the `b^d` little-endian `f64` entries.

use base64::Engine as _;
use serde::{Deserialize, Serialize};

use super::ProbabilityTensor;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorFile {
    pub d: usize,
    pub b: usize,
    pub format: String,
    pub data: String,
}

const FORMAT: &str = "f64le";

impl TensorFile {
    pub fn encode(t: &ProbabilityTensor) -> Self {
        let bytes: Vec<u8> = t.data().iter().flat_map(|x| x.to_le_bytes()).collect();
        Self {
            d: t.d(),
            b: t.b(),
            format: FORMAT.into(),
            data: base64::engine::general_purpose::STANDARD.encode(bytes),
        }
    }

    pub fn decode(&self) -> Result<ProbabilityTensor> {
        if self.format != FORMAT {
            return Err(Error::Parse(format!("unsupported tensor format {:?}", self.format)));
        }
        let bytes = base64::engine::general_purpose::STANDARD
            .decode(&self.data)
            .map_err(|e| Error::Parse(format!("tensor data: {e}")))?;
        if bytes.len() % 8 != 0 {
            return Err(Error::Parse("tensor data is not a whole number of f64".into()));
        }
        let data = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        ProbabilityTensor::new(self.d, self.b, data)
    }
}
