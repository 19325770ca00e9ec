//! JSON exchange format for rational polynomials.
//!
//! ```json
//! { "vars": ["x","y"], "terms": [ { "exp": [1,2], "num": "-12", "den": "1" } ] }
//! ```
//! Big integers travel as decimal strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::PolyError;
use crate::poly::{QPoly, Vars};

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub num: String,
    pub den: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

impl From<&QPoly> for PolyJson {
    fn from(p: &QPoly) -> Self {
        PolyJson {
            vars: p.vars().to_vec(),
            terms: p
                .iter_exps()
                .map(|(exp, c)| TermJson {
                    exp,
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&PolyJson> for QPoly {
    type Error = PolyError;

    fn try_from(j: &PolyJson) -> Result<Self, PolyError> {
        if j.vars.len() > crate::mono::MAX_VARS {
            return Err(PolyError::Parse(format!("too many variables: {}", j.vars.len())));
        }
        let vars: Vars = j.vars.clone().into();
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            if t.exp.len() != vars.len() {
                return Err(PolyError::Parse(format!(
                    "exponent vector {:?} does not match {} variables",
                    t.exp,
                    vars.len()
                )));
            }
            let num: BigInt = t
                .num
                .trim()
                .parse()
                .map_err(|e| PolyError::Parse(format!("numerator {:?}: {e}", t.num)))?;
            let den: BigInt = t
                .den
                .trim()
                .parse()
                .map_err(|e| PolyError::Parse(format!("denominator {:?}: {e}", t.den)))?;
            if den.is_zero() {
                return Err(PolyError::Parse("zero denominator".into()));
            }
            terms.push((t.exp.clone(), BigRational::new(num, den)));
        }
        Ok(QPoly::from_terms(vars, terms))
    }
}

pub fn to_json(p: &QPoly) -> String {
    serde_json::to_string(&PolyJson::from(p)).expect("serialisable")
}

pub fn to_json_pretty(p: &QPoly) -> String {
    serde_json::to_string_pretty(&PolyJson::from(p)).expect("serialisable")
}

pub fn from_json(s: &str) -> Result<QPoly, PolyError> {
    let j: PolyJson = serde_json::from_str(s).map_err(|e| PolyError::Parse(e.to_string()))?;
    QPoly::try_from(&j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;

    #[test]
    fn round_trip() {
        let v = vars(&["x", "y"]);
        let p = QPoly::from_terms(
            v,
            vec![
                (vec![1, 2], BigRational::new((-12).into(), 7.into())),
                (vec![0, 0], BigRational::from_integer(BigInt::from(10).pow(40))),
            ],
        );
        let s = to_json(&p);
        assert!(s.contains("\"den\":\"7\""));
        assert_eq!(from_json(&s).unwrap(), p);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(from_json(r#"{"vars":["x"],"terms":[{"exp":[1,2],"num":"1","den":"1"}]}"#).is_err());
        assert!(from_json(r#"{"vars":["x"],"terms":[{"exp":[1],"num":"1","den":"0"}]}"#).is_err());
        assert!(from_json(r#"{"vars":["x"],"terms":[{"exp":[1],"num":"q","den":"1"}]}"#).is_err());
    }
}
