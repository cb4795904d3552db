/// Cubic Hermite segment with Fritsch-Carlson slope limiting, so the segment
/// is monotone whenever the endpoint data are.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotoneHermite {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub m0: f64,
    pub m1: f64,
}

impl MonotoneHermite {
    pub fn new(x0: f64, y0: f64, m0: f64, x1: f64, y1: f64, m1: f64) -> Self {
        let delta = (y1 - y0) / (x1 - x0);
        let (mut m0, mut m1) = (m0, m1);
        if delta == 0.0 {
            m0 = 0.0;
            m1 = 0.0;
        } else {
            let mut a = m0 / delta;
            let mut b = m1 / delta;
            if a < 0.0 {
                a = 0.0;
            }
            if b < 0.0 {
                b = 0.0;
            }
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                a *= tau;
                b *= tau;
            }
            m0 = a * delta;
            m1 = b * delta;
        }
        MonotoneHermite { x0, x1, y0, y1, m0, m1 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let h = self.x1 - self.x0;
        let t = (x - self.x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y0 + h10 * h * self.m0 + h01 * self.y1 + h11 * h * self.m1
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let h = self.x1 - self.x0;
        let t = (x - self.x0) / h;
        let t2 = t * t;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        d00 * self.y0 + d10 * self.m0 + d01 * self.y1 + d11 * self.m1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_data_reproduced() {
        let h = MonotoneHermite::new(1.0, 2.0, -1.0, 2.0, 0.5, 0.0);
        assert!((h.eval(1.0) - 2.0).abs() < 1e-15);
        assert!((h.eval(2.0) - 0.5).abs() < 1e-15);
        assert!((h.derivative(1.0) + 1.0).abs() < 1e-14);
        assert!(h.derivative(2.0).abs() < 1e-14);
    }

    #[test]
    fn limiter_keeps_monotone() {
        let h = MonotoneHermite::new(0.0, 0.0, 10.0, 1.0, 1.0, 10.0);
        let mut prev = h.eval(0.0);
        for k in 1..=1000 {
            let v = h.eval(k as f64 / 1000.0);
            assert!(v >= prev);
            prev = v;
        }
    }
}
