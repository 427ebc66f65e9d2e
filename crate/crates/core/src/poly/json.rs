//! `{"layout": [["x", n], ...], "field": "real"|"complex", "terms": [{"exp": [..], "re": r, "im": i}]}`

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexPoly, Field, Monomial, PolyError, Polynomial, RealPoly, Scalar, VariableLayout};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PolyDoc {
    layout: Vec<(String, usize)>,
    field: Field,
    terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermDoc {
    exp: Vec<u16>,
    re: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<f64>,
}

/// A parsed polynomial of either field.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPoly {
    Real(RealPoly),
    Complex(ComplexPoly),
}

impl AnyPoly {
    pub fn from_json_str(s: &str) -> Result<Self, PolyError> {
        let doc: PolyDoc = serde_json::from_str(s).map_err(|e| PolyError::Json(e.to_string()))?;
        let layout = VariableLayout::new(doc.layout.iter().map(|(n, d)| (n.clone(), *d)))?;
        match doc.field {
            Field::Real => {
                if doc.terms.iter().any(|t| t.im.is_some_and(|v| v != 0.0)) {
                    return Err(PolyError::Json("imaginary part given for a real polynomial".into()));
                }
                let terms = doc.terms.into_iter().map(|t| (Monomial::from_exponents(t.exp), t.re));
                Ok(AnyPoly::Real(RealPoly::from_terms(&layout, terms)?))
            }
            Field::Complex => {
                let terms = doc
                    .terms
                    .into_iter()
                    .map(|t| (Monomial::from_exponents(t.exp), Complex64::new(t.re, t.im.unwrap_or(0.0))));
                Ok(AnyPoly::Complex(ComplexPoly::from_terms(&layout, terms)?))
            }
        }
    }

    pub fn into_real(self) -> Result<RealPoly, PolyError> {
        match self {
            AnyPoly::Real(p) => Ok(p),
            AnyPoly::Complex(_) => Err(PolyError::Json("expected a real polynomial".into())),
        }
    }
}

fn layout_doc(layout: &VariableLayout) -> Vec<(String, usize)> {
    layout.blocks().iter().map(|b| (b.name.clone(), b.dim)).collect()
}

impl RealPoly {
    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = PolyDoc {
            layout: layout_doc(self.layout()),
            field: Field::Real,
            terms: self.terms().map(|(m, &c)| TermDoc { exp: m.exponents().to_vec(), re: c, im: None }).collect(),
        };
        serde_json::to_value(doc).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self, PolyError> {
        AnyPoly::from_json_str(s)?.into_real()
    }
}

impl ComplexPoly {
    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = PolyDoc {
            layout: layout_doc(self.layout()),
            field: Field::Complex,
            terms: self
                .terms()
                .map(|(m, c)| TermDoc { exp: m.exponents().to_vec(), re: c.re, im: Some(c.im) })
                .collect(),
        };
        serde_json::to_value(doc).expect("serializable")
    }
}

impl<T: Scalar> Polynomial<T> {
    pub fn field(&self) -> Field {
        T::FIELD
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bilinear_form() {
        let s = r#"{"layout": [["x", 2], ["y", 2]], "field": "real",
                    "terms": [{"exp": [1,0,1,0], "re": 1.0}, {"exp": [0,1,0,1], "re": 1.0}]}"#;
        let p = RealPoly::from_json_str(s).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.eval(&[1.0, 2.0, 3.0, 4.0]), 11.0);
    }

    #[test]
    fn serialization_is_grlex_ordered_and_round_trips() {
        let l = VariableLayout::bipartite(1);
        let p = &(&RealPoly::var(&l, 0) * &RealPoly::var(&l, 0)) + &RealPoly::constant(&l, 2.0);
        let v = p.to_json_value();
        let exps: Vec<_> = v["terms"].as_array().unwrap().iter().map(|t| t["exp"].clone()).collect();
        assert_eq!(exps[0], serde_json::json!([0, 0]));
        assert!(v["terms"][0].get("im").is_none());
        let back = RealPoly::from_json_str(&v.to_string()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn complex_round_trip() {
        let l = VariableLayout::single(1);
        let p = ComplexPoly::var(&l, 0).scale(Complex64::new(1.0, -2.0));
        let back = AnyPoly::from_json_str(&p.to_json_value().to_string()).unwrap();
        assert_eq!(back, AnyPoly::Complex(p));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(AnyPoly::from_json_str("{not json"), Err(PolyError::Json(_))));
        let wrong_len = r#"{"layout": [["x", 2]], "field": "real", "terms": [{"exp": [1], "re": 1.0}]}"#;
        assert!(AnyPoly::from_json_str(wrong_len).is_err());
    }
}
