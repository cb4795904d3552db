use serde::{Deserialize, Serialize};

use super::domain::DomainSpec;
use super::hermite::MonotoneHermite;
use crate::{Error, Result, C64};

/// Which profile function to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    R1,
    R2,
    C,
}

/// The two parameters where the hole touches the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cusp {
    Three,
    Four,
}

impl Cusp {
    pub fn at(self) -> f64 {
        match self {
            Cusp::Three => 3.0,
            Cusp::Four => 4.0,
        }
    }
}

/// The Hartogs domain
/// `{(z, w): 1 < |w| < 6, |z| < r2(|w|), |z - c(|w|)| > r1(|w|)}`.
///
/// `r1 = 3 - sqrt(x - 1)` and `r2 = 3 + sqrt(x - 1)` near both ends (mirrored
/// about 3.5), `r1 = 1`, `r2 = 4` on `[2, 5]`, and `c` follows
/// `1/2 exp(-2|x - a|^-s) -/+ 1` within `transition_eps` of `a = 3, 4`.
/// Gaps are bridged with monotone cubic Hermite segments that match the
/// one-sided derivatives of the analytic pieces.
#[derive(Clone, Debug, Serialize)]
pub struct HartogsProfileDomain {
    pub s: f64,
    pub transition_eps: f64,
    /// Width of the square-root pieces at each end.
    pub sqrt_width: f64,
    #[serde(skip)]
    r1_join: MonotoneHermite,
    #[serde(skip)]
    r2_join: MonotoneHermite,
    #[serde(skip)]
    c_left: MonotoneHermite,
    #[serde(skip)]
    c_mid: MonotoneHermite,
    #[serde(skip)]
    c_right: MonotoneHermite,
}

/// A fiber `{|z| < r2} - D(c, r1)` over `|w| = t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fiber {
    pub t: f64,
    pub r1: f64,
    pub r2: f64,
    pub c: f64,
    /// `ln(r1 - |c|)`, the log-distance from the origin to the hole, kept
    /// separately because the gap underflows near the cusps.
    pub ln_gap: f64,
}

impl Fiber {
    pub fn region(&self) -> DomainSpec {
        DomainSpec::DiskMinusDisk { outer_radius: self.r2, hole_center: C64::new(self.c, 0.0), hole_radius: self.r1 }
    }

    pub fn is_centered(&self) -> bool {
        self.c == 0.0
    }

    pub fn contains(&self, z: C64) -> bool {
        z.norm() < self.r2 && (z - self.c).norm() > self.r1
    }

    /// Distance from the origin to the farthest point of the hole.
    pub fn hole_far(&self) -> f64 {
        self.r1 + self.c.abs()
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * (self.r2 * self.r2 - self.r1 * self.r1)
    }
}

impl HartogsProfileDomain {
    pub const DEFAULT_TRANSITION_EPS: f64 = 0.2;

    pub fn new(s: f64, transition_eps: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidInput(format!("s = {s} must lie in (0, 1)")));
        }
        if !(transition_eps > 0.0 && transition_eps < 0.5) {
            return Err(Error::InvalidInput(format!("transition_eps = {transition_eps} must lie in (0, 0.5)")));
        }
        let a: f64 = 0.25;
        let sa = a.sqrt();
        let slope = 0.5 / sa;
        let r1_join = MonotoneHermite::new(1.0 + a, 3.0 - sa, -slope, 2.0, 1.0, 0.0);
        let r2_join = MonotoneHermite::new(1.0 + a, 3.0 + sa, slope, 2.0, 4.0, 0.0);
        let e = transition_eps;
        let eta = 0.5 * (-2.0 * e.powf(-s)).exp();
        let deta = s * e.powf(-s - 1.0) * (-2.0 * e.powf(-s)).exp();
        let c_left = MonotoneHermite::new(2.0, 0.0, 0.0, 3.0 - e, eta - 1.0, -deta);
        let c_mid = MonotoneHermite::new(3.0 + e, eta - 1.0, deta, 4.0 - e, 1.0 - eta, deta);
        let c_right = MonotoneHermite::new(4.0 + e, 1.0 - eta, -deta, 5.0, 0.0, 0.0);
        Ok(HartogsProfileDomain { s, transition_eps, sqrt_width: a, r1_join, r2_join, c_left, c_mid, c_right })
    }

    pub fn with_default_eps(s: f64) -> Result<Self> {
        Self::new(s, Self::DEFAULT_TRANSITION_EPS)
    }

    /// `1/2 exp(-2 tau^-s)`: the distance from the hole to the origin at
    /// `|x - cusp| = tau` inside a collar.
    pub fn cusp_gap(&self, tau: f64) -> f64 {
        0.5 * (-2.0 * tau.powf(-self.s)).exp()
    }

    pub fn cusp_ln_gap(&self, tau: f64) -> f64 {
        -std::f64::consts::LN_2 - 2.0 * tau.powf(-self.s)
    }

    fn end_profile(&self, which: Profile, x: f64) -> f64 {
        let u = if x > 3.5 { 7.0 - x } else { x };
        let a = self.sqrt_width;
        match which {
            Profile::R1 if u <= 1.0 + a => 3.0 - (u - 1.0).sqrt(),
            Profile::R1 => self.r1_join.eval(u),
            Profile::R2 if u <= 1.0 + a => 3.0 + (u - 1.0).sqrt(),
            Profile::R2 => self.r2_join.eval(u),
            Profile::C => 0.0,
        }
    }

    pub fn profile_eval(&self, which: Profile, x: f64) -> Result<f64> {
        if !(1.0..=6.0).contains(&x) {
            return Err(Error::ProfileRange(x));
        }
        let e = self.transition_eps;
        Ok(match which {
            Profile::R1 | Profile::R2 if (2.0..=5.0).contains(&x) => {
                if which == Profile::R1 {
                    1.0
                } else {
                    4.0
                }
            }
            Profile::R1 | Profile::R2 => self.end_profile(which, x),
            Profile::C => {
                let d3 = (x - 3.0).abs();
                let d4 = (x - 4.0).abs();
                if x <= 2.0 || x >= 5.0 {
                    0.0
                } else if d3 <= e {
                    self.cusp_gap(d3) - 1.0
                } else if d4 <= e {
                    1.0 - self.cusp_gap(d4)
                } else if x < 3.0 {
                    self.c_left.eval(x)
                } else if x < 4.0 {
                    self.c_mid.eval(x)
                } else {
                    self.c_right.eval(x)
                }
            }
        })
    }

    /// `ln(r1(x) - |c(x)|)`, exact inside the collars.
    pub fn ln_gap(&self, x: f64) -> Result<f64> {
        let e = self.transition_eps;
        let d3 = (x - 3.0).abs();
        let d4 = (x - 4.0).abs();
        if (1.0..=6.0).contains(&x) && d3 <= e {
            return Ok(self.cusp_ln_gap(d3));
        }
        if (1.0..=6.0).contains(&x) && d4 <= e {
            return Ok(self.cusp_ln_gap(d4));
        }
        let r1 = self.profile_eval(Profile::R1, x)?;
        let c = self.profile_eval(Profile::C, x)?;
        Ok((r1 - c.abs()).ln())
    }

    pub fn fiber(&self, t: f64) -> Result<Fiber> {
        if !(t > 1.0 && t < 6.0) {
            return Err(Error::FiberRange(t));
        }
        Ok(Fiber {
            t,
            r1: self.profile_eval(Profile::R1, t)?,
            r2: self.profile_eval(Profile::R2, t)?,
            c: self.profile_eval(Profile::C, t)?,
            ln_gap: self.ln_gap(t)?,
        })
    }

    /// Fiber at `|t - cusp| = tau` for `tau` within the collar; `tau` may be
    /// far below the resolution of `t` itself.
    pub fn cusp_fiber(&self, cusp: Cusp, tau: f64) -> Result<Fiber> {
        if !(tau >= 0.0 && tau <= self.transition_eps) {
            return Err(Error::InvalidInput(format!("tau = {tau} outside the collar")));
        }
        let eta = self.cusp_gap(tau);
        let c = match cusp {
            Cusp::Three => eta - 1.0,
            Cusp::Four => 1.0 - eta,
        };
        Ok(Fiber { t: cusp.at(), r1: 1.0, r2: 4.0, c, ln_gap: self.cusp_ln_gap(tau) })
    }

    /// Membership of `(z, w)` in the Hartogs domain.
    pub fn contains(&self, z: C64, w: C64) -> bool {
        let t = w.norm();
        match self.fiber(t) {
            Ok(f) => f.contains(z),
            Err(_) => false,
        }
    }

    /// Points in `[1, 6]` where the profiles change formula.
    pub fn breakpoints(&self) -> Vec<f64> {
        let e = self.transition_eps;
        let a = self.sqrt_width;
        vec![1.0, 1.0 + a, 2.0, 3.0 - e, 3.0, 3.0 + e, 4.0 - e, 4.0, 4.0 + e, 5.0, 6.0 - a, 6.0]
    }
}
