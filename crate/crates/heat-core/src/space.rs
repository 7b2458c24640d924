use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

/// A finite state space, optionally with display labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpace {
    size: usize,
    labels: Option<Vec<String>>,
}

impl StateSpace {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(CoreError::InvalidParameter(
                "state space must have at least one state".into(),
            ));
        }
        Ok(Self { size, labels: None })
    }

    pub fn with_labels(size: usize, labels: Vec<String>) -> Result<Self> {
        if labels.len() != size {
            return Err(CoreError::DimensionMismatch {
                expected: size,
                got: labels.len(),
            });
        }
        let mut space = Self::new(size)?;
        space.labels = Some(labels);
        Ok(space)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of state `i`, falling back to its index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_space() {
        assert!(StateSpace::new(0).is_err());
    }

    #[test]
    fn label_length_must_match() {
        assert!(StateSpace::with_labels(2, vec!["a".into()]).is_err());
        let s = StateSpace::with_labels(2, vec!["a".into(), "b".into()]).unwrap();
        assert_eq!(s.label(1), "b");
        assert_eq!(StateSpace::new(3).unwrap().label(2), "2");
    }
}
