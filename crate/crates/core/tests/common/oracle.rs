//! Shooting + bisection oracle for periodic eigenvalue ODEs `u' = F(x, u, lambda)`.
//!
//! For fixed `lambda` the periodic orbits are the fixed points of the period map
//! `P(u0) = u(1)`. Each orbit has a mean; the oracle bisects on `lambda` until the
//! chosen orbit has the prescribed mean. Integration is classical RK4.

pub struct Shooter<F: Fn(f64, f64, f64) -> f64> {
    pub rhs: F,
    pub steps: usize,
    /// Orbits are searched for in `[-bound, bound]`; larger values count as blow-up.
    pub bound: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Orbit {
    pub u0: f64,
    pub mean: f64,
    /// `P'(u0) > 1`
    pub repelling: bool,
}

impl<F: Fn(f64, f64, f64) -> f64> Shooter<F> {
    /// `(u(1), int_0^1 u)` or `None` on blow-up.
    pub fn shoot(&self, lambda: f64, u0: f64) -> Option<(f64, f64)> {
        let h = 1.0 / self.steps as f64;
        let f = &self.rhs;
        let (mut u, mut m) = (u0, 0.0);
        for k in 0..self.steps {
            let x = k as f64 * h;
            let k1 = f(x, u, lambda);
            let k2 = f(x + 0.5 * h, u + 0.5 * h * k1, lambda);
            let k3 = f(x + 0.5 * h, u + 0.5 * h * k2, lambda);
            let k4 = f(x + h, u + h * k3, lambda);
            // the quadrature of u rides along as a second component
            let m1 = u;
            let m2 = u + 0.5 * h * k1;
            let m3 = u + 0.5 * h * k2;
            let m4 = u + h * k3;
            u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            m += h / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
            if !u.is_finite() || u.abs() > 1e3 * self.bound {
                return None;
            }
        }
        Some((u, m))
    }

    fn defect(&self, lambda: f64, u0: f64) -> f64 {
        match self.shoot(lambda, u0) {
            Some((u1, _)) => u1 - u0,
            None => {
                // blow-up direction
                let du = (self.rhs)(0.0, u0, lambda);
                if du > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// All periodic orbits found by a scan of `[-bound, bound]` followed by bisection.
    pub fn orbits(&self, lambda: f64, scan: usize) -> Vec<Orbit> {
        let mut out = Vec::new();
        let xs: Vec<f64> = (0..=scan)
            .map(|i| -self.bound + 2.0 * self.bound * i as f64 / scan as f64)
            .collect();
        let ds: Vec<f64> = xs.iter().map(|&x| self.defect(lambda, x)).collect();
        for i in 0..scan {
            let (mut a, mut b) = (xs[i], xs[i + 1]);
            let (da, db) = (ds[i], ds[i + 1]);
            if da == 0.0 || (da < 0.0) == (db < 0.0) {
                continue;
            }
            let rising = da < 0.0;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let dm = self.defect(lambda, m);
                if (dm < 0.0) == (da < 0.0) {
                    a = m;
                } else {
                    b = m;
                }
            }
            let u0 = 0.5 * (a + b);
            if let Some((_, mean)) = self.shoot(lambda, u0) {
                out.push(Orbit {
                    u0,
                    mean,
                    repelling: rising,
                });
            }
        }
        out
    }

    /// Eigenvalue in `[lo, hi]` whose repelling (`upper = true`) or attracting orbit has
    /// mean `target`; the orbit mean must be monotone in `lambda` on the bracket.
    pub fn eigenvalue(&self, target: f64, mut lo: f64, mut hi: f64, upper: bool, scan: usize) -> (f64, Orbit) {
        let pick = |lambda: f64| -> Option<Orbit> {
            let orbits = self.orbits(lambda, scan);
            if upper {
                orbits.into_iter().rev().find(|o| o.repelling)
            } else {
                orbits.into_iter().find(|o| !o.repelling)
            }
        };
        let side = |lambda: f64| -> f64 {
            match pick(lambda) {
                Some(o) => o.mean - target,
                None => f64::NAN,
            }
        };
        let s_hi = side(hi);
        assert!(s_hi.is_finite(), "no orbit at the upper end of the bracket");
        for _ in 0..80 {
            let m = 0.5 * (lo + hi);
            let s = side(m);
            // no orbit below the fold counts as the wrong side
            if s.is_nan() || (s < 0.0) != (s_hi < 0.0) {
                lo = m;
            } else {
                hi = m;
            }
            if hi - lo < 1e-14 {
                break;
            }
        }
        let lambda = 0.5 * (lo + hi);
        (lambda, pick(hi).expect("orbit"))
    }
}
