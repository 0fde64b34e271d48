//! Adaptive Simpson quadrature on a finite interval.

use crate::Error;

struct Adaptive<'a> {
    f: &'a dyn Fn(f64) -> f64,
    tol: f64,
    max_depth: u32,
    achieved: f64,
}

impl Adaptive<'_> {
    fn simpson(&self, a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }

    fn recurse(&mut self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        let left = self.simpson(a, m, fa, flm, fm);
        let right = self.simpson(m, b, fm, frm, fb);
        let err = (left + right - whole) / 15.0;
        if depth >= self.max_depth || err.abs() <= tol {
            self.achieved += err.abs();
            return left + right + err;
        }
        self.recurse(a, m, fa, flm, fm, left, tol / 2.0, depth + 1)
            + self.recurse(m, b, fm, frm, fb, right, tol / 2.0, depth + 1)
    }
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, Error> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::invalid("interval", format!("bad interval [{a}, {b}]")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be > 0, got {tol}")));
    }
    let mut ad = Adaptive {
        f: &f,
        tol,
        max_depth: 50,
        achieved: 0.0,
    };
    // Adapt within a fixed initial panel grid so sharply localized integrands
    // cannot be missed by a coarse first pass.
    let panels = 16usize;
    let mut value = 0.0;
    for i in 0..panels {
        let pa = a + (b - a) * i as f64 / panels as f64;
        let pb = a + (b - a) * (i + 1) as f64 / panels as f64;
        let fa = f(pa);
        let m = 0.5 * (pa + pb);
        let fm = f(m);
        let fb = f(pb);
        let whole = ad.simpson(pa, pb, fa, fm, fb);
        value += ad.recurse(pa, pb, fa, fm, fb, whole, tol / panels as f64, 0);
    }
    if !value.is_finite() || ad.achieved > ad.tol {
        return Err(Error::QuadratureFailure {
            achieved: ad.achieved,
            tolerance: tol,
        });
    }
    Ok(value)
}
