//! Parameters of one family member and their JSON file format.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family;
use crate::scalar::Scalar;

/// How the linear coefficient `c` is specified.
#[derive(Clone, Debug, PartialEq)]
pub enum CSpec {
    /// `c = sign * 2 cos(j pi / n)`, evaluated lazily at the working precision.
    Root { j: u32, sign: i8 },
    /// A user-supplied value (extended family with jacobian `delta`).
    Explicit(f64),
}

/// One member `(n, k, c, a, delta)` of the family
/// `f(x,y) = (y, -delta x + c y + sum_l a_l y^-l + y^-k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MapParams {
    pub n: u32,
    pub k: u32,
    pub c: CSpec,
    /// Coefficients `a_l` keyed by the even index `l`, `2 <= l <= k-2`.
    pub a: BTreeMap<u32, Complex64>,
    pub delta: Complex64,
}

impl MapParams {
    /// Validated parameters with `delta = 1`.
    pub fn new(n: u32, k: u32, c: CSpec, a: BTreeMap<u32, Complex64>) -> Result<Self> {
        Self::with_delta(n, k, c, a, Complex64::new(1.0, 0.0))
    }

    pub fn with_delta(n: u32, k: u32, c: CSpec, a: BTreeMap<u32, Complex64>, delta: Complex64) -> Result<Self> {
        let p = MapParams { n, k, c, a, delta };
        p.validate()?;
        Ok(p)
    }

    /// The first admissible root `c` for the given `(n, k)` and no `a` terms.
    pub fn default_for(n: u32, k: u32) -> Result<Self> {
        validate_nk(n, k)?;
        let j = family::c_n_indices(n)
            .first()
            .map(|&(j, _)| j)
            .ok_or_else(|| Error::InvalidParams(format!("C_{n} is empty")))?;
        Self::new(n, k, CSpec::Root { j, sign: 1 }, BTreeMap::new())
    }

    /// The phase-portrait preset `n=2, k=4, c=0, a_2=-2.64`.
    pub fn figure1() -> Self {
        let mut a = BTreeMap::new();
        a.insert(2, Complex64::new(-2.64, 0.0));
        Self::new(2, 4, CSpec::Root { j: 1, sign: 1 }, a).expect("preset is valid")
    }

    pub fn delta_is_one(&self) -> bool {
        (self.delta - Complex64::new(1.0, 0.0)).norm() == 0.0
    }

    /// True when all parameters are real, so real points stay real.
    pub fn is_real(&self) -> bool {
        self.delta.im == 0.0 && self.a.values().all(|v| v.im == 0.0)
    }

    /// `c` at the precision of `proto`.
    pub fn c_like<S: Scalar>(&self, proto: &S) -> S {
        match self.c {
            CSpec::Root { j, sign } => {
                let two_cos = proto.cos_pi_ratio_like(j as i64, self.n as i64);
                let two_cos = two_cos.clone() + two_cos;
                if sign < 0 {
                    -two_cos
                } else {
                    two_cos
                }
            }
            CSpec::Explicit(v) => proto.from_c64_like(Complex64::new(v, 0.0)),
        }
    }

    pub fn c_value(&self) -> f64 {
        self.c_like(&Complex64::new(0.0, 0.0)).re
    }

    pub fn validate(&self) -> Result<()> {
        validate_nk(self.n, self.k)?;
        for &l in self.a.keys() {
            if l % 2 != 0 || l < 2 || l + 2 > self.k {
                return Err(Error::InvalidParams(format!(
                    "a_{l} not allowed: indices must be even with 2 <= l <= k-2 = {}",
                    self.k as i64 - 2
                )));
            }
        }
        if !self.delta.re.is_finite() || !self.delta.im.is_finite() || self.delta.norm() == 0.0 {
            return Err(Error::InvalidParams("delta must be finite and nonzero".into()));
        }
        if let CSpec::Root { j, sign } = self.c {
            if j == 0 || j >= self.n || num_integer::gcd(j, self.n) != 1 {
                return Err(Error::InvalidParams(format!("c index j={j} must satisfy 0 < j < n and gcd(j, n) = 1")));
            }
            if sign != 1 && sign != -1 {
                return Err(Error::InvalidParams("c sign must be +1 or -1".into()));
            }
        }
        if let CSpec::Explicit(v) = self.c {
            if !v.is_finite() {
                return Err(Error::InvalidParams("c must be finite".into()));
            }
        }
        if self.delta_is_one() {
            let c = self.c_value();
            let admissible = family::compute_c_n(self.n);
            if !admissible.iter().any(|&x| (x - c).abs() < 1e-9 * (1.0 + c.abs())) {
                return Err(Error::InvalidParams(format!("c = {c} is not in C_{} = {admissible:?}", self.n)));
            }
        } else {
            // periodicity at infinity is asserted by the user and checked here
            family::orbit_w(self)?;
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ParamFile = serde_json::from_str(text).map_err(|e| Error::ParamFile(e.to_string()))?;
        file.into_params()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::ParamFile(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_file_format(&self) -> ParamFile {
        ParamFile {
            n: self.n,
            k: self.k,
            c: Some(match self.c {
                CSpec::Root { j, sign } => CFile::Root { j, sign: if sign < 0 { "-".into() } else { "+".into() } },
                CSpec::Explicit(v) => CFile::Value(v),
            }),
            a: self.a.iter().map(|(l, v)| (l.to_string(), [v.re, v.im])).collect(),
            delta: Some([self.delta.re, self.delta.im]),
        }
    }
}

fn validate_nk(n: u32, k: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("n = {n} must be at least 2")));
    }
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!("k = {k} must be even and at least 2")));
    }
    if n * k <= k + 2 {
        return Err(Error::InvalidParams(format!("(n, k) = ({n}, {k}) has zero entropy (need nk > k + 2)")));
    }
    Ok(())
}

/// `c` entry of the parameter file: a root index or a plain number.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CFile {
    Root { j: u32, sign: String },
    Value(f64),
}

/// On-disk JSON shape of [`MapParams`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    pub n: u32,
    pub k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<CFile>,
    #[serde(default)]
    pub a: BTreeMap<String, [f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<[f64; 2]>,
}

impl ParamFile {
    pub fn into_params(self) -> Result<MapParams> {
        let mut a = BTreeMap::new();
        for (key, [re, im]) in &self.a {
            let l: u32 = key.trim().parse().map_err(|_| Error::ParamFile(format!("bad coefficient index {key:?}")))?;
            a.insert(l, Complex64::new(*re, *im));
        }
        let delta = self.delta.map(|[re, im]| Complex64::new(re, im)).unwrap_or(Complex64::new(1.0, 0.0));
        let c = match self.c {
            Some(CFile::Root { j, sign }) => CSpec::Root { j, sign: parse_sign(&sign)? },
            Some(CFile::Value(v)) => CSpec::Explicit(v),
            None => {
                validate_nk(self.n, self.k)?;
                let j = family::c_n_indices(self.n)
                    .first()
                    .map(|&(j, _)| j)
                    .ok_or_else(|| Error::InvalidParams("C_n is empty".into()))?;
                CSpec::Root { j, sign: 1 }
            }
        };
        MapParams::with_delta(self.n, self.k, c, a, delta)
    }
}

pub fn parse_sign(s: &str) -> Result<i8> {
    match s.trim() {
        "+" | "+1" | "1" | "plus" => Ok(1),
        "-" | "-1" | "minus" => Ok(-1),
        other => Err(Error::InvalidParams(format!("sign must be + or -, got {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_entropy_pair() {
        assert!(matches!(MapParams::default_for(2, 2), Err(Error::InvalidParams(_))));
        assert!(MapParams::default_for(3, 2).is_ok());
    }

    #[test]
    fn rejects_bad_coefficients() {
        let mut a = BTreeMap::new();
        a.insert(3, Complex64::new(1.0, 0.0));
        assert!(MapParams::new(2, 6, CSpec::Root { j: 1, sign: 1 }, a).is_err());
        let mut a = BTreeMap::new();
        a.insert(4, Complex64::new(1.0, 0.0));
        assert!(MapParams::new(2, 4, CSpec::Root { j: 1, sign: 1 }, a).is_err());
    }

    #[test]
    fn rejects_c_outside_c_n() {
        // c = -1 is periodic for n = 3 but has w_* = -1
        assert!(MapParams::new(3, 2, CSpec::Root { j: 2, sign: 1 }, BTreeMap::new()).is_err());
        assert!(MapParams::new(3, 2, CSpec::Explicit(1.0), BTreeMap::new()).is_ok());
        assert!(MapParams::new(4, 2, CSpec::Root { j: 2, sign: 1 }, BTreeMap::new()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = MapParams::figure1();
        let text = serde_json::to_string(&p.to_file_format()).unwrap();
        assert_eq!(MapParams::from_json_str(&text).unwrap(), p);
        let q = MapParams::from_json_str(r#"{"n": 4, "k": 2, "c": {"j": 3, "sign": "-"}}"#).unwrap();
        assert!((q.c_value() - 2f64.sqrt()).abs() < 1e-15);
        assert!(MapParams::from_json_str(r#"{"n": 4, "k": 2, "bogus": 1}"#).is_err());
    }
}
