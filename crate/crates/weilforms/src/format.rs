//! JSON forms of Gram matrices, q-expansions and lifts. Every rational is a
//! `"p/q"` string so nothing passes through floating point.

use std::path::Path;

use serde::{Deserialize, Serialize};
use weilforms_core::arith::{format_rational, parse_rational};
use weilforms_core::thetalift::{hilbert_index, LorentzianGram, OrthogonalExpansion};
use weilforms_core::{EvenLattice, FiniteQuadraticModule, FqmElement, HalfInteger, QExpansion, Rational};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramFile {
    pub gram: Vec<Vec<i64>>,
    /// only read by the lift commands
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone_seed: Option<Vec<String>>,
}

impl GramFile {
    pub fn lattice(&self) -> Result<EvenLattice, CliError> {
        Ok(EvenLattice::new(self.gram.clone())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffJson {
    pub gamma: Vec<u64>,
    pub n: String,
    pub c: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QExpansionJson {
    pub gram: Vec<Vec<i64>>,
    pub weight: String,
    pub prec: String,
    pub coeffs: Vec<CoeffJson>,
}

impl QExpansionJson {
    pub fn from_expansion(f: &QExpansion) -> Self {
        Self {
            gram: f.module().lattice().gram().clone(),
            weight: f.weight().to_string(),
            prec: format_rational(f.prec()),
            coeffs: f
                .iter()
                .map(|(g, n, c)| CoeffJson { gamma: g.coords.clone(), n: format_rational(n), c: format_rational(c) })
                .collect(),
        }
    }

    pub fn to_expansion(&self) -> Result<QExpansion, CliError> {
        let module = FiniteQuadraticModule::new(EvenLattice::new(self.gram.clone())?)?;
        let weight: HalfInteger = self.weight.parse()?;
        let mut f = QExpansion::zero(module.clone(), weight, parse_rational(&self.prec)?);
        for t in &self.coeffs {
            let gamma = FqmElement::new(t.gamma.clone());
            module.check(&gamma)?;
            f.set(gamma, parse_rational(&t.n)?, parse_rational(&t.c)?)?;
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertIndexJson {
    /// `ν = a + b√d`
    pub a: String,
    pub b: String,
    pub d: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftCoeffJson {
    pub r: Vec<String>,
    pub height: String,
    pub c: String,
    /// `⟨r, e₁⟩`, rank one only
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<HilbertIndexJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalExpansionJson {
    pub gram: Vec<Vec<i64>>,
    pub cone_seed: Vec<String>,
    pub weight: u32,
    pub height_bound: String,
    pub coeffs: Vec<LiftCoeffJson>,
}

/// How lift coefficients are labelled besides the vector `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum LiftKeys {
    Lattice,
    Scalar,
    Hilbert,
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn parse_all(v: &[String]) -> Result<Vec<Rational>, CliError> {
    v.iter().map(|s| parse_rational(s).map_err(CliError::from)).collect()
}

/// The `D` with `S = [[2, 1], [1, (1−D)/2]]`, if `S` has that shape.
pub fn doi_naganuma_discriminant(s: &LorentzianGram) -> Option<i64> {
    let g = s.gram();
    if g.len() == 2 && g[0][0] == 2 && g[0][1] == 1 {
        let d = 1 - 2 * g[1][1];
        if LorentzianGram::doi_naganuma(d).ok().as_ref() == Some(s) {
            return Some(d);
        }
    }
    None
}

impl OrthogonalExpansionJson {
    pub fn from_expansion(f: &OrthogonalExpansion, keys: LiftKeys) -> Result<Self, CliError> {
        let s = f.lattice();
        let d = match keys {
            LiftKeys::Hilbert => Some(doi_naganuma_discriminant(s).ok_or_else(|| {
                CliError::Input(String::from("hilbert keys need the Doi–Naganuma lattice [[2,1],[1,(1-D)/2]]"))
            })?),
            _ => None,
        };
        if keys == LiftKeys::Scalar && s.rank() != 1 {
            return Err(CliError::Input(format!("scalar keys need rank 1, not {}", s.rank())));
        }
        let coeffs = f
            .iter()
            .map(|(r, c)| LiftCoeffJson {
                r: strings(r),
                height: format_rational(&s.height(r)),
                c: format_rational(c),
                n: (keys == LiftKeys::Scalar).then(|| format_rational(&s.integral_coords(r)[0])),
                nu: d.map(|d| {
                    let nu = hilbert_index(d, r);
                    HilbertIndexJson { a: format_rational(&nu.a), b: format_rational(&nu.b), d }
                }),
            })
            .collect();
        Ok(Self {
            gram: s.gram().clone(),
            cone_seed: strings(s.seed()),
            weight: f.weight(),
            height_bound: format_rational(f.height_bound()),
            coeffs,
        })
    }

    pub fn to_expansion(&self) -> Result<OrthogonalExpansion, CliError> {
        let s = LorentzianGram::new(self.gram.clone(), parse_all(&self.cone_seed)?)?;
        let mut f = OrthogonalExpansion::zero(s, self.weight, parse_rational(&self.height_bound)?);
        for t in &self.coeffs {
            f.set(&parse_all(&t.r)?, parse_rational(&t.c)?)?;
        }
        Ok(f)
    }
}

/// Reads and parses a JSON file, reporting syntax errors with line and column.
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use weilforms_core::arith::{int, rat};
    use weilforms_core::exec::Sequential;
    use weilforms_core::thetalift::theta_lift;

    fn sample() -> QExpansion {
        let l = EvenLattice::new(vec![vec![-4]]).unwrap();
        let a = FiniteQuadraticModule::new(l).unwrap();
        let mut f = QExpansion::zero(a.clone(), HalfInteger::from_twice(11), int(3));
        for (n, c) in [(rat(1, 8), 1), (rat(9, 8), 237), (rat(17, 8), 1440)] {
            f.set(a.element(&[3]).unwrap(), n.clone(), int(c)).unwrap();
            f.set(a.element(&[1]).unwrap(), n, int(-c)).unwrap();
        }
        f
    }

    #[test]
    fn qexpansion_round_trip() {
        let f = sample();
        let json = serde_json::to_string(&QExpansionJson::from_expansion(&f)).unwrap();
        let back: QExpansionJson = parse_json(&json, "mem").unwrap();
        assert_eq!(back.to_expansion().unwrap(), f);
        assert!(json.contains("\"n\":\"9/8\""));
    }

    #[test]
    fn lift_round_trip_in_every_key_style() {
        let s = LorentzianGram::shimura(2).unwrap();
        let lift = theta_lift(&sample(), &s, 5, &int(4), &Sequential).unwrap();
        for keys in [LiftKeys::Lattice, LiftKeys::Scalar] {
            let j = OrthogonalExpansionJson::from_expansion(&lift, keys).unwrap();
            let text = serde_json::to_string(&j).unwrap();
            let back: OrthogonalExpansionJson = parse_json(&text, "mem").unwrap();
            assert_eq!(back.to_expansion().unwrap(), lift);
        }
        assert!(OrthogonalExpansionJson::from_expansion(&lift, LiftKeys::Hilbert).is_err());
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_json::<GramFile>("{\n  \"gram\": [[2, 1],\n  [1 2]]\n}", "g.json").unwrap_err();
        match err {
            CliError::Parse { line, column, .. } => assert_eq!((line, column), (3, 6)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_foreign_elements() {
        let mut j = QExpansionJson::from_expansion(&sample());
        j.coeffs[0].gamma = vec![7];
        assert!(j.to_expansion().is_err());
        let mut j = QExpansionJson::from_expansion(&sample());
        j.coeffs[0].n = String::from("1/3");
        assert!(j.to_expansion().is_err());
    }
}
