//! Structured verdicts: the steps that were checked, counterexamples, and the
//! named hypotheses a conclusion rests on.

use num_rational::BigRational;
use serde::{Serialize, Serializer};
use serde_json::{Map, Value};

use super::GramMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "CONDITIONAL")]
    Conditional,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Conditional => "CONDITIONAL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub claim: String,
    pub evidence: String,
    pub holds: bool,
}

/// The Hodge-theoretic hypothesis behind the discriminant-group test.
pub const HODGE_AXIOM: &str = "Hodge-axiom: g*σ_S = ±σ_S";
/// Exclusion of finite-order candidates through the Torelli theorem.
pub const TORELLI_AXIOM: &str = "Torelli-axiom";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gram: Option<GramMatrix>,
    pub verdict: Verdict,
    pub steps: Vec<Step>,
    pub witnesses: Vec<Value>,
    pub axioms: Vec<String>,
    pub notes: Vec<String>,
    pub data: Map<String, Value>,
}

impl Certificate {
    pub fn builder(gram: Option<GramMatrix>) -> CertificateBuilder {
        CertificateBuilder { gram, steps: Vec::new(), witnesses: Vec::new(), axioms: Vec::new(), notes: Vec::new(), data: Map::new() }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("certificate serializes")
    }

    pub fn uses_axiom(&self, name: &str) -> bool {
        self.axioms.iter().any(|a| a == name)
    }
}

pub struct CertificateBuilder {
    gram: Option<GramMatrix>,
    steps: Vec<Step>,
    witnesses: Vec<Value>,
    axioms: Vec<String>,
    notes: Vec<String>,
    data: Map<String, Value>,
}

impl CertificateBuilder {
    pub fn step(&mut self, claim: impl Into<String>, evidence: impl Into<String>, holds: bool) -> &mut Self {
        self.steps.push(Step { claim: claim.into(), evidence: evidence.into(), holds });
        self
    }

    pub fn witness(&mut self, w: Value) -> &mut Self {
        self.witnesses.push(w);
        self
    }

    /// Records an axiom once, keeping first-use order.
    pub fn axiom(&mut self, name: &str) -> &mut Self {
        if !self.axioms.iter().any(|a| a == name) {
            self.axioms.push(name.to_string());
        }
        self
    }

    pub fn note(&mut self, n: impl Into<String>) -> &mut Self {
        self.notes.push(n.into());
        self
    }

    pub fn data(&mut self, key: &str, v: Value) -> &mut Self {
        self.data.insert(key.to_string(), v);
        self
    }

    /// FAIL when a witness exists or a step failed; otherwise CONDITIONAL
    /// when axioms were used, PASS when not. Failed steps become witnesses
    /// when none were given, so a FAIL always carries one.
    pub fn finish(mut self) -> Certificate {
        if self.witnesses.is_empty() {
            let failed: Vec<Value> = self
                .steps
                .iter()
                .filter(|s| !s.holds)
                .map(|s| serde_json::json!({ "failed_step": s.claim, "evidence": s.evidence }))
                .collect();
            self.witnesses = failed;
        }
        let verdict = if !self.witnesses.is_empty() || self.steps.iter().any(|s| !s.holds) {
            Verdict::Fail
        } else if !self.axioms.is_empty() {
            Verdict::Conditional
        } else {
            Verdict::Pass
        };
        Certificate {
            gram: self.gram,
            verdict,
            steps: self.steps,
            witnesses: self.witnesses,
            axioms: self.axioms,
            notes: self.notes,
            data: self.data,
        }
    }
}

/// `"p/q"`, or `"p"` for integers.
pub fn rational_string(x: &BigRational) -> String {
    x.to_string()
}

pub fn rational_json(x: &BigRational) -> Value {
    Value::String(rational_string(x))
}

pub(crate) fn ser_rational_vec<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    v.iter().map(rational_string).collect::<Vec<_>>().serialize(s)
}

pub(crate) fn ser_rational_matrix<S: Serializer>(m: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
    m.iter().map(|r| r.iter().map(rational_string).collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn verdict_rules() {
        let mut b = Certificate::builder(None);
        b.step("a", "b", true);
        assert_eq!(b.finish().verdict, Verdict::Pass);

        let mut b = Certificate::builder(None);
        b.step("a", "b", true).axiom(TORELLI_AXIOM).axiom(TORELLI_AXIOM);
        let c = b.finish();
        assert_eq!(c.verdict, Verdict::Conditional);
        assert_eq!(c.axioms.len(), 1);

        let mut b = Certificate::builder(None);
        b.axiom(HODGE_AXIOM).witness(json!([1, 0]));
        assert_eq!(b.finish().verdict, Verdict::Fail);
    }

    #[test]
    fn json_shape() {
        let mut b = Certificate::builder(Some(GramMatrix::binary(4, 6, 4)));
        b.data("bound", rational_json(&BigRational::new(16.into(), 9.into())));
        let v = b.finish().to_json();
        assert_eq!(v["gram"], json!([[4, 6], [6, 4]]));
        assert_eq!(v["verdict"], json!("PASS"));
        assert_eq!(v["data"]["bound"], json!("16/9"));
        assert!(v["steps"].is_array() && v["axioms"].is_array());
    }
}
