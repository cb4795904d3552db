//! Planar domains, their rasterization, real-line compact sets, and the
//! Hartogs profile family with its fibers.

mod domain;
mod grid;
mod hartogs;
mod hermite;
mod intervals;

pub use domain::DomainSpec;
pub(crate) use domain::circle_enter;
pub use grid::{NodeKind, PlanarGridDomain, DIRECTIONS};
pub use hartogs::{Cusp, Fiber, HartogsProfileDomain, Profile};
pub use hermite::MonotoneHermite;
pub use intervals::{appendix_set, IntervalUnionSet, APPENDIX_TERMS};

use crate::{Error, Result, C64};

/// Parses `"1.5"`, `"2i"`, `"-i"`, `"1+2i"`, `"0.5-0.25i"` or `"x,y"`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidInput(format!("cannot parse complex number {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((a, b)) = t.split_once(',') {
        let re = a.parse::<f64>().map_err(|_| bad())?;
        let im = b.parse::<f64>().map_err(|_| bad())?;
        return Ok(C64::new(re, im));
    }
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        let coef = |u: &str| -> Result<f64> {
            match u {
                "" | "+" => Ok(1.0),
                "-" => Ok(-1.0),
                _ => u.parse::<f64>().map_err(|_| bad()),
            }
        };
        return match split {
            Some(k) => {
                let re = body[..k].parse::<f64>().map_err(|_| bad())?;
                Ok(C64::new(re, coef(&body[k..])?))
            }
            None => Ok(C64::new(0.0, coef(body)?)),
        };
    }
    t.parse::<f64>().map(|x| C64::new(x, 0.0)).map_err(|_| bad())
}

/// Serde adapter: complex numbers are written as `[re, im]` and read from a
/// number, a pair, or a string accepted by [`parse_complex`].
pub mod cpx {
    use super::parse_complex;
    use crate::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Pair([f64; 2]),
        Text(String),
    }

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(C64::new(x, 0.0)),
            Repr::Pair([x, y]) => Ok(C64::new(x, y)),
            Repr::Text(t) => parse_complex(&t).map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("2i").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("1+2i").unwrap(), C64::new(1.0, 2.0));
        assert_eq!(parse_complex("0.5 - 0.25i").unwrap(), C64::new(0.5, -0.25));
        assert_eq!(parse_complex("1e-3-2e-1i").unwrap(), C64::new(1e-3, -0.2));
        assert_eq!(parse_complex("-3").unwrap(), C64::new(-3.0, 0.0));
        assert_eq!(parse_complex("1,2").unwrap(), C64::new(1.0, 2.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }
}
