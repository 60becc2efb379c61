//! Serialization helpers shared by the report types.
//!
//! Exact values are written as `"p/q"` strings so reports stay diffable and
//! can be re-checked by hand. Each [`Verdict`] carries both sides of the
//! inequality it asserts.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::boolfn::TruthTable;
use crate::Rational;

pub fn rational_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: BigInt = p.trim().parse().ok()?;
    let q: BigInt = q.trim().parse().ok()?;
    (!q.is_zero()).then(|| Rational::new(p, q))
}

pub fn ser_rational<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(q))
}

pub fn ser_rationals<S: Serializer>(qs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(qs.iter().map(rational_string))
}

pub fn ser_bigint<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn ser_table<S: Serializer>(t: &TruthTable, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("n={} 0x{}", t.n(), t.to_hex()))
}

/// Renders a cube point as its bit string `x_1 … x_n`.
pub fn point_string(n: usize, x: u32) -> String {
    (0..n)
        .map(|v| if crate::boolfn::var_value(n, x, v) { '1' } else { '0' })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "==")]
    Eq,
}

/// A checked relation `lhs rel rhs` between exact values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub lhs: String,
    pub relation: Relation,
    pub rhs: String,
    pub ok: bool,
}

impl Verdict {
    pub fn le(name: impl Into<String>, lhs: &Rational, rhs: &Rational) -> Self {
        Verdict {
            name: name.into(),
            lhs: rational_string(lhs),
            relation: Relation::Le,
            rhs: rational_string(rhs),
            ok: lhs <= rhs,
        }
    }

    pub fn eq(name: impl Into<String>, lhs: &Rational, rhs: &Rational) -> Self {
        Verdict {
            name: name.into(),
            lhs: rational_string(lhs),
            relation: Relation::Eq,
            rhs: rational_string(rhs),
            ok: lhs == rhs,
        }
    }

    /// A relation checked elsewhere (e.g. on big integers) with its sides
    /// rendered as given.
    pub fn checked(name: impl Into<String>, lhs: String, relation: Relation, rhs: String, ok: bool) -> Self {
        Verdict {
            name: name.into(),
            lhs,
            relation,
            rhs,
            ok,
        }
    }
}

pub fn all_ok(verdicts: &[Verdict]) -> bool {
    verdicts.iter().all(|v| v.ok)
}

pub fn rat(v: usize) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Rational stand-ins for `ln 2` from above and below.
pub fn ln2_upper() -> Rational {
    Rational::new(BigInt::from(6932), BigInt::from(10000))
}

pub fn ln2_lower() -> Rational {
    Rational::new(BigInt::from(6931), BigInt::from(10000))
}

/// A rational lower bound on `ln m` for `m ≥ 1`.
///
/// `f64::ln` is accurate to well under `1e-12` at these magnitudes; the
/// result is shifted down by `1e-9` before being converted exactly.
pub fn ln_lower(m: usize) -> Rational {
    if m <= 1 {
        return Rational::zero();
    }
    let approx = (m as f64).ln() - 1e-9;
    Rational::from_float(approx).expect("finite").max(Rational::zero())
}

/// Floating view for human-facing summaries only.
pub fn approx(q: &Rational) -> f64 {
    let n = q.numer().to_f64().unwrap_or(f64::NAN);
    let d = q.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings() {
        let q = Rational::new(BigInt::from(6), BigInt::from(-4));
        assert_eq!(rational_string(&q), "-3/2");
        assert_eq!(parse_rational("-3/2"), Some(q));
        assert_eq!(parse_rational("5"), Some(rat(5)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn ln_bounds_bracket() {
        assert!(approx(&ln2_lower()) < std::f64::consts::LN_2);
        assert!(approx(&ln2_upper()) > std::f64::consts::LN_2);
        for m in 1..100 {
            assert!(approx(&ln_lower(m)) <= (m as f64).ln());
        }
    }
}
