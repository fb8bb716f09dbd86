//! The repo-wide JSON polynomial format.
//!
//! `{"order":"lex","vars":[...],"terms":[{"c":"p/q","e":[...]}, ...]}` with
//! terms in descending order. `vars` lists only the symbols that occur, in
//! table order, and `e` is aligned with it.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::monomial::Monomial;
use super::order::MonomialOrder;
use super::poly::Poly;
use super::rational::Q;
use super::table::table;
use super::PolyError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub c: Q,
    pub e: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub order: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranking: Option<Vec<String>>,
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

impl PolyJson {
    pub fn from_poly(p: &Poly) -> PolyJson {
        let vars = p.vars();
        let terms = p
            .terms()
            .iter()
            .map(|(m, c)| TermJson { c: c.clone(), e: vars.iter().map(|&i| m.exp(i)).collect() })
            .collect();
        PolyJson {
            order: p.order().name(),
            ranking: p.order().ranking_names(),
            vars: vars.iter().map(|&i| table().name(i).to_string()).collect(),
            terms,
        }
    }

    /// Validates and rebuilds the polynomial. The term order is re-checked, not trusted.
    pub fn to_poly(&self) -> Result<Poly, PolyError> {
        let order = Arc::new(MonomialOrder::from_name(&self.order, self.ranking.as_deref()).map_err(PolyError::Format)?);
        let idx: Vec<usize> = self
            .vars
            .iter()
            .map(|n| table().lookup(n).ok_or_else(|| PolyError::UnknownSymbol(n.clone())))
            .collect::<Result<_, _>>()?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.e.len() != idx.len() {
                return Err(PolyError::Format("exponent list length differs from vars".into()));
            }
            let mut m = Monomial::one();
            for (&i, &e) in idx.iter().zip(&t.e) {
                if e > 127 {
                    return Err(PolyError::Format(format!("exponent {e} out of range")));
                }
                m.set(i, m.exp(i) + e);
            }
            terms.push((m, t.c.clone()));
        }
        let p = Poly::from_terms(&order, terms);
        if p.len() != self.terms.len() {
            return Err(PolyError::Format("terms are not canonical (zero or repeated)".into()));
        }
        Ok(p)
    }
}

pub fn to_json_string(p: &Poly) -> String {
    serde_json::to_string(&PolyJson::from_poly(p)).expect("serializable")
}

pub fn from_json_str(s: &str) -> Result<Poly, PolyError> {
    let j: PolyJson = serde_json::from_str(s).map_err(|e| PolyError::Format(e.to_string()))?;
    j.to_poly()
}
