//! Serde shapes of the JSON interchange formats.
//!
//! ```json
//! {"outcomes": ["a", "b"], "probs": ["1/3", 0.5]}   // space
//! {"blocks": [[0, 2], [1]]}                          // partition
//! {"space": {...}, "atoms": [{"blocks": ...}, ...]}  // noise-type algebra
//! {"space": {...}, "elements": [{"blocks": ...}, ...]}  // arbitrary family
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finmeas::ProbSpace;
use crate::ntba::Ntba;
use crate::scalar::Scalar;
use crate::sigma::SigmaField;

/// A probability given as text (`"p/q"`, decimal) or a JSON number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbValue {
    Text(String),
    Number(f64),
}

impl ProbValue {
    /// Numbers go through their shortest decimal form, so `0.1` is read as
    /// exactly one tenth by the rational backend.
    pub fn to_scalar<S: Scalar>(&self) -> Result<S> {
        match self {
            ProbValue::Text(t) => S::parse_value(t),
            ProbValue::Number(x) => S::parse_value(&format!("{x}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceJson {
    pub outcomes: Vec<String>,
    pub probs: Vec<ProbValue>,
}

impl SpaceJson {
    pub fn from_space<S: Scalar>(space: &ProbSpace<S>) -> Self {
        SpaceJson {
            outcomes: space.outcomes().to_vec(),
            probs: space
                .probs()
                .iter()
                .map(|p| ProbValue::Text(p.to_string()))
                .collect(),
        }
    }

    pub fn to_space<S: Scalar>(&self) -> Result<ProbSpace<S>> {
        let probs = self
            .probs
            .iter()
            .map(ProbValue::to_scalar)
            .collect::<Result<Vec<S>>>()?;
        ProbSpace::new(self.outcomes.clone(), probs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionJson {
    pub blocks: Vec<Vec<usize>>,
}

impl PartitionJson {
    pub fn from_field<S: Scalar>(x: &SigmaField<S>) -> Self {
        PartitionJson {
            blocks: x.blocks().to_vec(),
        }
    }

    pub fn to_field<S: Scalar>(&self, space: &ProbSpace<S>) -> Result<SigmaField<S>> {
        SigmaField::from_blocks(space, &self.blocks)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NtbaJson {
    pub space: SpaceJson,
    pub atoms: Vec<PartitionJson>,
}

impl NtbaJson {
    pub fn from_ntba<S: Scalar>(b: &Ntba<S>) -> Self {
        NtbaJson {
            space: SpaceJson::from_space(b.space()),
            atoms: b.atoms().iter().map(PartitionJson::from_field).collect(),
        }
    }

    pub fn to_ntba<S: Scalar>(&self) -> Result<Ntba<S>> {
        let space = self.space.to_space()?;
        let atoms = self
            .atoms
            .iter()
            .map(|a| a.to_field(&space))
            .collect::<Result<Vec<_>>>()?;
        Ntba::new(&space, atoms)
    }
}

/// A candidate family of σ-fields, audited element by element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyJson {
    pub space: SpaceJson,
    pub elements: Vec<PartitionJson>,
}

impl FamilyJson {
    pub fn to_family<S: Scalar>(&self) -> Result<(ProbSpace<S>, Vec<SigmaField<S>>)> {
        let space = self.space.to_space()?;
        let elems = self
            .elements
            .iter()
            .map(|a| a.to_field(&space))
            .collect::<Result<Vec<_>>>()?;
        Ok((space, elems))
    }
}

/// Parses an atom set written as `{0,2}`, `0,2` or `[]`.
pub fn parse_atom_list(text: &str) -> Result<Vec<usize>> {
    let body = text
        .trim()
        .trim_start_matches(['{', '['])
        .trim_end_matches(['}', ']']);
    body.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad atom index {s:?} in {text:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn space_roundtrip() {
        let json = r#"{"outcomes": ["a", "b", "c"], "probs": ["1/3", 0.5, "1/6"]}"#;
        let s: SpaceJson = serde_json::from_str(json).unwrap();
        let space = s.to_space::<Rational>().unwrap();
        assert_eq!(space.probs()[1], Rational::from_ratio(1, 2));
        let back = SpaceJson::from_space(&space);
        assert_eq!(back.to_space::<Rational>().unwrap(), space);
        assert!(serde_json::from_str::<SpaceJson>(r#"{"outcomes": [], "probs": [], "x": 1}"#).is_err());
    }

    #[test]
    fn ntba_roundtrip() {
        let b = Ntba::<Rational>::parity(2).unwrap();
        let json = serde_json::to_string(&NtbaJson::from_ntba(&b)).unwrap();
        let back: NtbaJson = serde_json::from_str(&json).unwrap();
        let b2 = back.to_ntba::<Rational>().unwrap();
        assert_eq!(b2.atoms(), b.atoms());
        let f = back.to_ntba::<f64>().unwrap();
        assert_eq!(f.num_atoms(), 3);
    }

    #[test]
    fn atom_lists() {
        assert_eq!(parse_atom_list("{0, 2}").unwrap(), vec![0, 2]);
        assert_eq!(parse_atom_list("1").unwrap(), vec![1]);
        assert!(parse_atom_list("[]").unwrap().is_empty());
        assert!(parse_atom_list("a").is_err());
    }
}
