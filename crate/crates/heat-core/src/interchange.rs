use serde::{Deserialize, Serialize};

use crate::kernel::SymmetricKernel;
use crate::space::StateSpace;
use crate::vector::NonnegVector;
use crate::{CoreError, Result};

/// Kernel interchange format. Weights travel as decimal strings so that an
/// exact-rational consumer can ingest them without a float round trip;
/// entries carry only the upper triangle (`i <= j`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelJson {
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub entries: Vec<(usize, usize, String)>,
}

impl KernelJson {
    pub fn from_kernel(kernel: &SymmetricKernel) -> Self {
        Self {
            size: kernel.size(),
            labels: kernel.space().labels().map(<[String]>::to_vec),
            entries: kernel
                .triplets_upper()
                .into_iter()
                .map(|(i, j, w)| (i, j, format_weight(w)))
                .collect(),
        }
    }

    pub fn to_kernel(&self) -> Result<SymmetricKernel> {
        let space = match &self.labels {
            Some(labels) => StateSpace::with_labels(self.size, labels.clone())?,
            None => StateSpace::new(self.size)?,
        };
        let mut triplets = Vec::with_capacity(self.entries.len());
        for (i, j, w) in &self.entries {
            triplets.push((*i, *j, parse_weight(w)?));
        }
        SymmetricKernel::from_triplets(space, &triplets)
    }
}

/// Renders a weight as a decimal string round-trippable to the same f64.
fn format_weight(w: f64) -> String {
    let mut buf = ryu_like(w);
    if !buf.contains('.') && !buf.contains('e') && !buf.contains('/') {
        buf.push_str(".0");
    }
    buf
}

fn ryu_like(w: f64) -> String {
    // serde_json's f64 formatting: shortest representation that round-trips
    serde_json::to_string(&w).unwrap_or_else(|_| w.to_string())
}

/// Accepts decimal strings ("0.25", "1e-3") and fraction strings ("1/3").
fn parse_weight(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|e| CoreError::Parse(format!("bad fraction numerator {num:?}: {e}")))?;
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|e| CoreError::Parse(format!("bad fraction denominator {den:?}: {e}")))?;
        if d == 0.0 {
            return Err(CoreError::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(n / d);
    }
    s.parse()
        .map_err(|e| CoreError::Parse(format!("bad weight {s:?}: {e}")))
}

/// Parses the kernel interchange JSON, reporting line/column on failure.
pub fn parse_kernel_json(text: &str) -> Result<SymmetricKernel> {
    let parsed: KernelJson = serde_json::from_str(text)
        .map_err(|e| CoreError::Parse(format!("kernel json: {e}")))?;
    parsed.to_kernel()
}

/// Parses a vector as a JSON array of decimal strings over the given space.
pub fn parse_vector_json(text: &str, space: &StateSpace) -> Result<NonnegVector> {
    let parsed: Vec<String> = serde_json::from_str(text)
        .map_err(|e| CoreError::Parse(format!("vector json: {e}")))?;
    if parsed.is_empty() {
        return Err(CoreError::Parse("vector file holds no entries".into()));
    }
    let mut values = Vec::with_capacity(parsed.len());
    for s in &parsed {
        values.push(parse_weight(s)?);
    }
    NonnegVector::new(space.clone(), values)
}
