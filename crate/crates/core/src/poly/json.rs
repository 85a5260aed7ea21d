//! JSON encodings of coefficients and polynomials.
//!
//! Integers are written as JSON numbers of arbitrary length. An Eisenstein
//! integer `a·r + b` is written `{"a": a, "b": b}`.

use num_bigint::BigInt;
use serde_json::{json, Map, Number, Value};
use std::fmt;

use super::form::Monomial;
use super::ring::{CoefficientRing, Eisenstein};
use super::sparse::SparsePoly;
use crate::error::{Error, Result};

pub fn int_to_json(n: &BigInt) -> Value {
    // arbitrary_precision keeps the digits verbatim
    Value::Number(serde_json::from_str::<Number>(&n.to_string()).expect("integer literal"))
}

pub fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .to_string()
            .parse()
            .map_err(|_| Error::Parse(format!("expected an integer, found {n}"))),
        other => Err(Error::Parse(format!("expected an integer, found {other}"))),
    }
}

pub fn u64_from_json(v: &Value) -> Result<u64> {
    v.as_u64().ok_or_else(|| Error::Parse(format!("expected a nonnegative integer, found {v}")))
}

/// Coefficients that have a JSON encoding.
pub trait JsonCoeff: Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl JsonCoeff for BigInt {
    fn to_json(&self) -> Value {
        int_to_json(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        int_from_json(v)
    }
}

impl JsonCoeff for u64 {
    fn to_json(&self) -> Value {
        json!(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        u64_from_json(v)
    }
}

impl JsonCoeff for Eisenstein {
    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("a".into(), int_to_json(&self.v));
        m.insert("b".into(), int_to_json(&self.u));
        Value::Object(m)
    }
    fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse(format!("expected {{\"a\":…,\"b\":…}}, found {v}")))?;
        let get = |k: &str| obj.get(k).ok_or_else(|| Error::Parse(format!("missing field {k}")));
        Ok(Eisenstein {
            u: int_from_json(get("b")?)?,
            v: int_from_json(get("a")?)?,
        })
    }
}

/// A certificate coefficient: an integer, or an element of `Z[r]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coefficient {
    Integer(BigInt),
    Eisenstein(Eisenstein),
}

impl Coefficient {
    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Integer(n) => n.sign() == num_bigint::Sign::NoSign,
            Coefficient::Eisenstein(e) => e.is_zero(),
        }
    }

    /// The integer itself, or the norm of an Eisenstein integer.
    pub fn norm_or_value(&self) -> BigInt {
        match self {
            Coefficient::Integer(n) => n.clone(),
            Coefficient::Eisenstein(e) => e.norm(),
        }
    }
}

impl JsonCoeff for Coefficient {
    fn to_json(&self) -> Value {
        match self {
            Coefficient::Integer(n) => n.to_json(),
            Coefficient::Eisenstein(e) => e.to_json(),
        }
    }
    fn from_json(v: &Value) -> Result<Self> {
        if v.is_object() {
            Ok(Coefficient::Eisenstein(Eisenstein::from_json(v)?))
        } else {
            Ok(Coefficient::Integer(int_from_json(v)?))
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Integer(n) => write!(f, "{n}"),
            Coefficient::Eisenstein(e) => write!(f, "{e}"),
        }
    }
}

pub fn poly_to_json<T: Clone + PartialEq + JsonCoeff>(p: &SparsePoly<T>) -> Value {
    Value::Array(
        p.terms()
            .into_iter()
            .map(|(m, c)| {
                let mut o = Map::new();
                o.insert("coeff".into(), c.to_json());
                o.insert("exponents".into(), json!(m.0));
                Value::Object(o)
            })
            .collect(),
    )
}

/// `(monomial, coefficient)` pairs of a serialized polynomial.
pub fn poly_terms_from_json<T: JsonCoeff>(v: &Value) -> Result<Vec<(Monomial, T)>> {
    let arr = v.as_array().ok_or_else(|| Error::Parse("polynomial must be a JSON array".into()))?;
    arr.iter()
        .map(|t| {
            let exps = t
                .get("exponents")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("term without exponents".into()))?
                .iter()
                .map(|e| e.as_u64().map(|x| x as u32).ok_or_else(|| Error::Parse("bad exponent".into())))
                .collect::<Result<Vec<u32>>>()?;
            let c = T::from_json(t.get("coeff").ok_or_else(|| Error::Parse("term without coeff".into()))?)?;
            Ok((Monomial(exps), c))
        })
        .collect()
}

/// Rebuilds a polynomial from its JSON form.
pub fn poly_from_json<R: CoefficientRing>(ring: &R, nvars: usize, v: &Value) -> Result<SparsePoly<R::Elem>>
where
    R::Elem: JsonCoeff,
{
    let mut p = SparsePoly::zero(nvars);
    for (m, c) in poly_terms_from_json::<R::Elem>(v)? {
        if m.nvars() != nvars {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                got: m.nvars(),
            });
        }
        p.insert(ring, &m, c)?;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::form::LinearForm;
    use crate::poly::ring::{EisensteinIntegers, Integers};
    use crate::poly::sparse::product_naive;

    #[test]
    fn big_integers_keep_all_digits() {
        let n: BigInt = "-1234567890123456789012345678901234567890".parse().unwrap();
        let s = serde_json::to_string(&int_to_json(&n)).unwrap();
        assert_eq!(s, "-1234567890123456789012345678901234567890");
        let back = int_from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, n);
    }

    #[test]
    fn eisenstein_layout() {
        let c = Coefficient::Eisenstein(Eisenstein::new(0, -1));
        assert_eq!(serde_json::to_string(&c.to_json()).unwrap(), r#"{"a":-1,"b":0}"#);
        assert_eq!(Coefficient::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn polynomial_round_trip() {
        let ring = Integers;
        let f = LinearForm::new(&ring, vec![BigInt::from(1), BigInt::from(-2)]).unwrap();
        let p = product_naive(&ring, 2, &[f.clone(), f]).unwrap();
        let v = poly_to_json(&p);
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"[{"coeff":4,"exponents":[0,2]},{"coeff":-4,"exponents":[1,1]},{"coeff":1,"exponents":[2,0]}]"#
        );
        let back = poly_from_json(&ring, 2, &v).unwrap();
        assert!(back.equals(&ring, &p));

        let e = EisensteinIntegers;
        let g = LinearForm::new(&e, vec![Eisenstein::new(1, 0), Eisenstein::r()]).unwrap();
        let q = product_naive(&e, 2, &[g]).unwrap();
        let back = poly_from_json(&e, 2, &poly_to_json(&q)).unwrap();
        assert!(back.equals(&e, &q));
    }
}
