//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

/// Adaptive Simpson integration with Richardson-corrected panels.
///
/// The interval is first cut into `initial_panels` equal pieces so oscillatory
/// integrands are not accepted on a lucky coarse sample; each panel is then bisected
/// until `|S₂ − S₁| ≤ 15·ε_local`, with the tolerance halved at every level.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveSimpson {
    /// Target absolute error over the whole interval.
    pub tol: f64,
    pub max_depth: u32,
    pub initial_panels: usize,
}

impl Default for AdaptiveSimpson {
    fn default() -> Self {
        AdaptiveSimpson {
            tol: 1e-9,
            max_depth: 50,
            initial_panels: 16,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

impl AdaptiveSimpson {
    pub fn with_tol(tol: f64) -> Self {
        AdaptiveSimpson {
            tol,
            ..Default::default()
        }
    }

    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "integration bounds must be finite, got [{a}, {b}]"
            )));
        }
        if a == b {
            return Ok(0.0);
        }
        if b < a {
            return self.integrate(f, b, a).map(|v| -v);
        }
        let panels = self.initial_panels.max(1);
        let h = (b - a) / panels as f64;
        let local_tol = self.tol / panels as f64;
        let mut total = 0.0;
        let mut failures = 0usize;
        let mut fa = eval(&f, a)?;
        for i in 0..panels {
            let lo = a + h * i as f64;
            let hi = if i + 1 == panels { b } else { a + h * (i + 1) as f64 };
            let mid = 0.5 * (lo + hi);
            let fm = eval(&f, mid)?;
            let fb = eval(&f, hi)?;
            let panel = Panel {
                a: lo,
                b: hi,
                fa,
                fm,
                fb,
                whole: simpson(lo, hi, fa, fm, fb),
            };
            total += self.refine(&f, panel, local_tol, 0, &mut failures)?;
            fa = fb;
        }
        if failures > 0 {
            return Err(Error::Accuracy(format!(
                "{failures} panel(s) hit the depth limit {} on [{a}, {b}]",
                self.max_depth
            )));
        }
        Ok(total)
    }

    fn refine<F>(&self, f: &F, p: Panel, tol: f64, depth: u32, failures: &mut usize) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = eval(f, lm)?;
        let frm = eval(f, rm)?;
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        if depth >= 2 && delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth >= self.max_depth || m <= p.a || m >= p.b {
            *failures += 1;
            return Ok(left + right + delta / 15.0);
        }
        let l = Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
        };
        let r = Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
        };
        Ok(self.refine(f, l, 0.5 * tol, depth + 1, failures)?
            + self.refine(f, r, 0.5 * tol, depth + 1, failures)?)
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Accuracy(format!("integrand is {v} at x = {x}")))
    }
}
