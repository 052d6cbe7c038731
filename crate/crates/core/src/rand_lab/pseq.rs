//! Edge probability sequences `p_i`, indexed by the distance `i` between
//! two points, with `p_0 = 0`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::RandError;

#[derive(Debug, Clone, PartialEq)]
pub enum PSeq {
    /// `p_i = c·q^i` for `i ≥ 1`.
    Geometric { c: f64, q: f64 },
    /// `p_i = c·i^{-s}` for `i ≥ 1`.
    Power { c: f64, s: f64 },
    /// `p_1, p_2, …` listed, zero beyond. Values are exact rationals.
    Finite(Vec<BigRational>),
}

/// Parses `a/b`, an integer, or a decimal such as `0.25`, exactly.
pub fn parse_rational(text: &str) -> Result<BigRational, RandError> {
    let bad = || RandError::Parse(format!("not a rational: {text}"));
    let text = text.trim();
    if let Some((a, b)) = text.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    Ok(BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32)))
}

impl PSeq {
    pub fn zero() -> Self {
        PSeq::Finite(Vec::new())
    }

    pub fn finite(values: &[(i64, i64)]) -> Self {
        PSeq::Finite(values.iter().map(|&(a, b)| BigRational::new(a.into(), b.into())).collect())
    }

    fn validate(self) -> Result<Self, RandError> {
        let ok = match &self {
            PSeq::Geometric { c, q } => *c >= 0.0 && (0.0..1.0).contains(q) && c * q <= 1.0,
            PSeq::Power { c, s } => (0.0..=1.0).contains(c) && *s > 1.0,
            PSeq::Finite(v) => v.iter().all(|x| !x.is_negative_fraction() && *x <= BigRational::one()),
        };
        if ok {
            Ok(self)
        } else {
            Err(RandError::Parse(format!("{self} is not a summable probability sequence")))
        }
    }

    /// `p_i` as a double.
    pub fn p(&self, i: usize) -> f64 {
        if i == 0 {
            return 0.0;
        }
        match self {
            PSeq::Geometric { c, q } => c * q.powi(i as i32),
            PSeq::Power { c, s } => c * (i as f64).powf(-s),
            PSeq::Finite(v) => v.get(i - 1).map_or(0.0, |x| x.to_f64().unwrap_or(0.0)),
        }
    }

    /// `p_i` as an exact rational. Geometric and power values are the exact
    /// binary value of the double.
    pub fn p_exact(&self, i: usize) -> BigRational {
        match self {
            PSeq::Finite(v) => {
                if i == 0 {
                    BigRational::zero()
                } else {
                    v.get(i - 1).cloned().unwrap_or_else(BigRational::zero)
                }
            }
            _ => BigRational::from_float(self.p(i)).expect("finite probability"),
        }
    }

    /// An upper bound on `Σ_{i ≥ t} p_i`, exact for the geometric and
    /// finite families. For the power family it is `c·(t^{-s} + t^{1-s}/(s-1))`.
    pub fn tail(&self, t: usize) -> f64 {
        let t = t.max(1);
        match self {
            PSeq::Geometric { c, q } => c * q.powi(t as i32) / (1.0 - q),
            PSeq::Power { c, s } => {
                let tf = t as f64;
                c * (tf.powf(-s) + tf.powf(1.0 - s) / (s - 1.0))
            }
            PSeq::Finite(v) => (t..=v.len()).map(|i| self.p(i)).sum(),
        }
    }

    /// Largest distance with nonzero probability, when there is one.
    pub fn support_end(&self) -> Option<usize> {
        match self {
            PSeq::Finite(v) => Some(v.iter().rposition(|x| !x.is_zero()).map_or(0, |i| i + 1)),
            _ => None,
        }
    }
}

trait NegFrac {
    fn is_negative_fraction(&self) -> bool;
}

impl NegFrac for BigRational {
    fn is_negative_fraction(&self) -> bool {
        *self < BigRational::zero()
    }
}

impl fmt::Display for PSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PSeq::Geometric { c, q } => write!(f, "geometric:{c},{q}"),
            PSeq::Power { c, s } => write!(f, "power:{c},{s}"),
            PSeq::Finite(v) if v.is_empty() => write!(f, "zero"),
            PSeq::Finite(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "finite:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for PSeq {
    type Err = RandError;

    /// `geometric:c,q`, `power:c,s`, `finite:p1,p2,…` or `zero`.
    fn from_str(text: &str) -> Result<Self, RandError> {
        let text = text.trim();
        if text == "zero" {
            return Ok(PSeq::zero());
        }
        let (family, args) = text.split_once(':').ok_or_else(|| RandError::Parse(format!("bad sequence: {text}")))?;
        let floats = || -> Result<Vec<f64>, RandError> {
            args.split(',')
                .map(|a| match a.trim().parse::<f64>() {
                    Ok(x) => Ok(x),
                    Err(_) => parse_rational(a)?.to_f64().ok_or_else(|| RandError::Parse(format!("bad number: {a}"))),
                })
                .collect()
        };
        let two = |v: Vec<f64>| -> Result<(f64, f64), RandError> {
            match v[..] {
                [a, b] => Ok((a, b)),
                _ => Err(RandError::Parse(format!("{family} takes two parameters"))),
            }
        };
        match family {
            "geometric" => {
                let (c, q) = two(floats()?)?;
                PSeq::Geometric { c, q }.validate()
            }
            "power" => {
                let (c, s) = two(floats()?)?;
                PSeq::Power { c, s }.validate()
            }
            "finite" => PSeq::Finite(args.split(',').map(parse_rational).collect::<Result<_, _>>()?).validate(),
            _ => Err(RandError::Parse(format!("unknown family {family}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing_round_trips() {
        for text in ["geometric:0.5,0.5", "power:1,2", "finite:1/2,0,1/4", "zero"] {
            let p: PSeq = text.parse().unwrap();
            assert_eq!(p.to_string().parse::<PSeq>().unwrap(), p);
        }
        assert!("geometric:3,0.5".parse::<PSeq>().is_err());
        assert!("power:1,1".parse::<PSeq>().is_err());
        assert!("finite:3/2".parse::<PSeq>().is_err());
        assert_eq!(parse_rational("0.25").unwrap(), BigRational::new(1.into(), 4.into()));
    }

    #[test]
    fn values() {
        let g = PSeq::Geometric { c: 0.5, q: 0.5 };
        assert_eq!(g.p(0), 0.0);
        assert_eq!(g.p(2), 0.125);
        let f = PSeq::finite(&[(1, 2)]);
        assert_eq!(f.p(1), 0.5);
        assert_eq!(f.p(2), 0.0);
        assert_eq!(f.support_end(), Some(1));
        assert_eq!(PSeq::zero().support_end(), Some(0));
    }

    #[test]
    fn geometric_tail_matches_partial_sums() {
        let g = PSeq::Geometric { c: 0.7, q: 0.6 };
        for t in 1..20 {
            let partial: f64 = (t..2000).map(|i| g.p(i)).sum();
            assert!((partial - g.tail(t)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn power_tail_is_an_upper_bound() {
        let p = PSeq::Power { c: 1.0, s: 2.0 };
        for t in 1..30 {
            let partial: f64 = (t..200_000).map(|i| p.p(i)).sum();
            assert!(partial <= p.tail(t));
        }
    }
}
