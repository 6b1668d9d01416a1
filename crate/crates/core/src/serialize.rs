//! JSON form of an engine run. Layout:
//!
//! ```text
//! {"max_weight": W,
//!  "C":     [{"n", "lambda_coeffs": [{"deg", "terms": [{"words", "ip", "num", "den"}]}]}],
//!  "kappa": [same shape as C],
//!  "V":     [{"n", "terms": [{"word", "lambda_coeffs": [...]}]}]}
//! ```
//!
//! Rationals are decimal strings; words use the '0'/'1' encoding ("e" for
//! the empty word). Every list is in canonical order, so equal states give
//! byte-identical documents.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::engine::EngineState;
use crate::error::{Error, Result};
use crate::mzvalg::{LambdaPoly, MzvElem, MzvMonomial};
use crate::ring::{Ring, Q};
use crate::words::{Word, WordPoly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub words: Vec<String>,
    pub ip: u8,
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaCoeffJson {
    pub deg: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedPolyJson {
    pub n: usize,
    pub lambda_coeffs: Vec<LambdaCoeffJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VTermJson {
    pub word: String,
    pub lambda_coeffs: Vec<LambdaCoeffJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VJson {
    pub n: usize,
    pub terms: Vec<VTermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineJson {
    pub max_weight: usize,
    #[serde(rename = "C")]
    pub c: Vec<IndexedPolyJson>,
    pub kappa: Vec<IndexedPolyJson>,
    #[serde(rename = "V")]
    pub v: Vec<VJson>,
}

pub fn mzv_to_json(e: &MzvElem) -> Vec<TermJson> {
    e.terms()
        .iter()
        .map(|(m, c)| TermJson {
            words: m.factors().iter().map(|w| w.to_string()).collect(),
            ip: m.has_ip() as u8,
            num: c.numer().to_string(),
            den: c.denom().to_string(),
        })
        .collect()
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.parse::<BigInt>().map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

pub fn mzv_from_json(terms: &[TermJson]) -> Result<MzvElem> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let words = t.words.iter().map(|s| Word::parse(s)).collect::<Result<Vec<_>>>()?;
        if let Some(w) = words.iter().find(|w| !w.is_convergent()) {
            return Err(Error::Parse(format!("zeta symbol with divergent word {w}")));
        }
        let ip = match t.ip {
            0 => false,
            1 => true,
            k => return Err(Error::Parse(format!("ip flag must be 0 or 1, got {k}"))),
        };
        let den = parse_int(&t.den)?;
        if den == BigInt::from(0) {
            return Err(Error::Parse("zero denominator".into()));
        }
        out.push((MzvMonomial::new(words, ip), Q::new(parse_int(&t.num)?, den)));
    }
    Ok(MzvElem::from_terms(out))
}

pub fn lambda_to_json(p: &LambdaPoly) -> Vec<LambdaCoeffJson> {
    p.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(deg, c)| LambdaCoeffJson { deg, terms: mzv_to_json(c) })
        .collect()
}

pub fn lambda_from_json(cs: &[LambdaCoeffJson]) -> Result<LambdaPoly> {
    let mut acc = LambdaPoly::zero();
    for c in cs {
        acc.add_assign_ref(&LambdaPoly::monomial(c.deg, mzv_from_json(&c.terms)?));
    }
    Ok(acc)
}

fn indexed(ps: &[LambdaPoly], from: usize) -> Vec<IndexedPolyJson> {
    ps.iter().enumerate().skip(from).map(|(n, p)| IndexedPolyJson { n, lambda_coeffs: lambda_to_json(p) }).collect()
}

fn from_indexed(ps: &[IndexedPolyJson], from: usize) -> Result<Vec<LambdaPoly>> {
    let mut out = vec![LambdaPoly::zero(); from];
    for (i, p) in ps.iter().enumerate() {
        if p.n != i + from {
            return Err(Error::Parse(format!("expected entry n = {}, found {}", i + from, p.n)));
        }
        out.push(lambda_from_json(&p.lambda_coeffs)?);
    }
    Ok(out)
}

/// Builds the document for a state and its coefficients C_0..C_W
/// (`c[0]` = 1 is not written).
pub fn engine_to_json(state: &EngineState, c: &[LambdaPoly]) -> EngineJson {
    let v = state
        .v
        .iter()
        .enumerate()
        .map(|(n, p)| VJson {
            n,
            terms: p
                .sorted_terms()
                .into_iter()
                .map(|(w, c)| VTermJson { word: w.to_string(), lambda_coeffs: lambda_to_json(c) })
                .collect(),
        })
        .collect();
    EngineJson { max_weight: state.order, c: indexed(c, 1), kappa: indexed(&state.kappa, 1), v }
}

/// Inverse of [`engine_to_json`]: the state and C_0..C_W.
pub fn engine_from_json(doc: &EngineJson) -> Result<(EngineState, Vec<LambdaPoly>)> {
    let kappa = from_indexed(&doc.kappa, 1)?;
    let mut c = from_indexed(&doc.c, 1)?;
    c[0] = LambdaPoly::one();
    let mut v = Vec::with_capacity(doc.v.len());
    for (i, row) in doc.v.iter().enumerate() {
        if row.n != i {
            return Err(Error::Parse(format!("expected V entry n = {i}, found {}", row.n)));
        }
        let mut p = WordPoly::new();
        for t in &row.terms {
            p.add_term(Word::parse(&t.word)?, lambda_from_json(&t.lambda_coeffs)?);
        }
        v.push(p);
    }
    if kappa.len() != doc.max_weight + 1 || c.len() != doc.max_weight + 1 {
        return Err(Error::Parse(format!("kappa and C must run through n = {}", doc.max_weight)));
    }
    Ok((EngineState { kappa, v, order: doc.max_weight }, c))
}

pub fn to_string(doc: &EngineJson) -> Result<String> {
    Ok(serde_json::to_string_pretty(doc)?)
}

pub fn from_str(s: &str) -> Result<EngineJson> {
    Ok(serde_json::from_str(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine;
    use crate::ring::{q, QAlgebra};

    #[test]
    fn mzv_round_trip() {
        let z3 = MzvElem::zeta_comp(&[3]);
        let e = z3.mul_ref(&z3).scale(&q(-8, 3)).add_ref(&MzvElem::ip()).add_ref(&MzvElem::rational(q(1, 2)));
        let j = mzv_to_json(&e);
        assert_eq!(mzv_from_json(&j).unwrap(), e);
        let t = &j.iter().find(|t| t.words.len() == 2).unwrap();
        assert_eq!((t.num.as_str(), t.den.as_str(), t.ip), ("-8", "3", 0));
        assert_eq!(t.words, vec!["001", "001"]);
    }

    #[test]
    fn rejects_malformed() {
        let bad = |words: &[&str], ip, den: &str| TermJson {
            words: words.iter().map(|s| s.to_string()).collect(),
            ip,
            num: "1".into(),
            den: den.into(),
        };
        assert!(mzv_from_json(&[bad(&["10"], 0, "1")]).is_err());
        assert!(mzv_from_json(&[bad(&["01"], 2, "1")]).is_err());
        assert!(mzv_from_json(&[bad(&["01"], 0, "0")]).is_err());
        assert!(mzv_from_json(&[bad(&["01"], 0, "x")]).is_err());
    }

    #[test]
    fn engine_round_trip() {
        let state = engine::run(6).unwrap();
        let c = state.c_coefficients().unwrap();
        let doc = engine_to_json(&state, &c);
        let text = to_string(&doc).unwrap();
        let back = from_str(&text).unwrap();
        assert_eq!(back, doc);
        let (s2, c2) = engine_from_json(&back).unwrap();
        assert_eq!(s2, state);
        assert_eq!(c2, c);
        assert_eq!(to_string(&engine_to_json(&s2, &c2)).unwrap(), text);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["max_weight"], 6);
        assert_eq!(v["C"][2]["n"], 3);
        assert_eq!(v["C"][2]["lambda_coeffs"][0]["terms"][0]["words"][0], "001");
        assert_eq!(v["C"][2]["lambda_coeffs"][0]["terms"][0]["num"], "4");
        assert_eq!(v["V"][1]["terms"][0]["word"], "1");
    }
}
