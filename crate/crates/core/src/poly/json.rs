//! JSON form encoding: `{"vars": n, "deg": d, "terms": [{"e": [...], "re": .., "im": ..}]}`.
//! Rational coefficients are strings `"p/q"`; float coefficients are numbers.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::multi::{ExactForm, Form, HomogeneousForm};
use super::scalar::{format_rational, parse_rational, Rational, Scalar, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FormJson {
    pub vars: usize,
    pub deg: u32,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub e: Vec<u32>,
    pub re: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Value>,
}

/// A parsed form: exact when every coefficient is a rational string with
/// no imaginary part.
#[derive(Clone, Debug)]
pub enum AnyForm {
    Exact(ExactForm),
    Float(Form),
}

impl AnyForm {
    pub fn to_c64(&self) -> Form {
        match self {
            AnyForm::Exact(f) => f.to_c64(),
            AnyForm::Float(f) => f.clone(),
        }
    }

    pub fn exact(&self) -> Option<&ExactForm> {
        match self {
            AnyForm::Exact(f) => Some(f),
            AnyForm::Float(_) => None,
        }
    }
}

enum Coef {
    Exact(Rational),
    Float(f64),
}

fn parse_value(v: &Value) -> Result<Coef> {
    match v {
        Value::Number(n) => n.as_f64().map(Coef::Float).ok_or_else(|| Error::InvalidInput(format!("bad number {}", n))),
        Value::String(s) => match parse_rational(s) {
            Some(r) => Ok(Coef::Exact(r)),
            None => s.trim().parse::<f64>().map(Coef::Float).map_err(|_| Error::InvalidInput(format!("bad coefficient {:?}", s))),
        },
        other => Err(Error::InvalidInput(format!("bad coefficient {}", other))),
    }
}

fn coef_f64(c: &Coef) -> f64 {
    match c {
        Coef::Exact(r) => r.to_c64().re,
        Coef::Float(f) => *f,
    }
}

impl Serialize for HomogeneousForm<C64> {
    fn serialize<Z: serde::Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        FormJson::from_float(self).serialize(s)
    }
}

impl FormJson {
    pub fn from_exact(f: &ExactForm) -> FormJson {
        FormJson {
            vars: f.nvars(),
            deg: f.degree(),
            terms: f.poly().terms().map(|(e, c)| TermJson { e: e.clone(), re: Value::String(format_rational(c)), im: None }).collect(),
        }
    }

    pub fn from_float(f: &Form) -> FormJson {
        FormJson {
            vars: f.nvars(),
            deg: f.degree(),
            terms: f
                .poly()
                .terms()
                .map(|(e, c)| TermJson { e: e.clone(), re: serde_json::json!(c.re), im: if c.im != 0.0 { Some(serde_json::json!(c.im)) } else { None } })
                .collect(),
        }
    }

    pub fn parse(&self) -> Result<AnyForm> {
        let mut exact = true;
        let mut parsed = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.e.len() != self.vars {
                return Err(Error::InvalidInput(format!("exponent {:?} has wrong length for {} variables", t.e, self.vars)));
            }
            let re = parse_value(&t.re)?;
            let im = match &t.im {
                None => None,
                Some(v) => Some(parse_value(v)?),
            };
            if matches!(re, Coef::Float(_)) {
                exact = false;
            }
            match &im {
                Some(Coef::Exact(r)) if num_traits::Zero::is_zero(r) => {}
                Some(Coef::Float(x)) if *x == 0.0 => {}
                Some(_) => exact = false,
                None => {}
            }
            parsed.push((t.e.clone(), re, im));
        }
        if exact {
            let terms = parsed.into_iter().map(|(e, re, _)| match re {
                Coef::Exact(r) => (e, r),
                Coef::Float(_) => unreachable!(),
            });
            Ok(AnyForm::Exact(HomogeneousForm::from_terms(self.vars, self.deg, terms)?))
        } else {
            let terms = parsed.into_iter().map(|(e, re, im)| (e, C64::new(coef_f64(&re), im.as_ref().map(coef_f64).unwrap_or(0.0))));
            Ok(AnyForm::Float(HomogeneousForm::from_terms(self.vars, self.deg, terms)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::scalar::rational;

    #[test]
    fn exact_form_round_trip() {
        let f = HomogeneousForm::from_terms(3, 2, vec![(vec![2, 0, 0], rational(-3, 7)), (vec![0, 1, 1], rational(5, 1))]).unwrap();
        let j = FormJson::from_exact(&f);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"-3/7\""));
        let back: FormJson = serde_json::from_str(&text).unwrap();
        match back.parse().unwrap() {
            AnyForm::Exact(g) => assert_eq!(g, f),
            AnyForm::Float(_) => panic!("expected exact"),
        }
    }

    #[test]
    fn float_form_parses() {
        let text = r#"{"vars":2,"deg":1,"terms":[{"e":[1,0],"re":1.5,"im":-2},{"e":[0,1],"re":"1/2"}]}"#;
        let j: FormJson = serde_json::from_str(text).unwrap();
        match j.parse().unwrap() {
            AnyForm::Float(f) => {
                assert_eq!(f.poly().coeff(&[1, 0]), C64::new(1.5, -2.0));
                assert_eq!(f.poly().coeff(&[0, 1]), C64::new(0.5, 0.0));
            }
            AnyForm::Exact(_) => panic!("expected float"),
        }
    }

    #[test]
    fn malformed_exponent_rejected() {
        let j: FormJson = serde_json::from_str(r#"{"vars":2,"deg":1,"terms":[{"e":[1],"re":"1"}]}"#).unwrap();
        assert!(j.parse().is_err());
    }
}
