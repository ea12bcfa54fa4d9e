//! Warped Fourier analysis and synthesis over one variable-period segment.
//!
//! A function on `[x₀, x₀ + T(x₀)]` is projected onto `{1, cos m·g, sin m·g}` with
//! the weighted inner product of [`crate::orthobasis`]:
//!
//! ```text
//! a₀ = ⟨f, 1⟩/‖1‖²,  a_m = ⟨f, cos m·g⟩/‖cos m·g‖²,  b_m = ⟨f, sin m·g⟩/‖sin m·g‖²
//! ```
//!
//! This expansion is built on top of the orthogonality of the system; nothing here
//! asserts completeness of the basis. Long signals are handled as a chain of
//! consecutive segments, each expanded on its own.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numfmt::sig17;
use crate::orthobasis::{weighted_integral, BasisFunction, Segment};
use crate::phase::{PhaseFunction, DEFAULT_INVERSION_TOL};

pub const DEFAULT_HARMONICS: u32 = 8;

const MAX_SPECTRUM_HARMONIC: usize = 1 << 20;

/// Warped Fourier coefficients anchored at a segment start.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub phase: PhaseFunction,
    pub x0: f64,
    pub a0: f64,
    /// Cosine coefficients `a_1..a_M`.
    pub a: Vec<f64>,
    /// Sine coefficients `b_1..b_M`.
    pub b: Vec<f64>,
}

impl Spectrum {
    pub fn new(phase: PhaseFunction, x0: f64, a0: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidParameter(format!(
                "cosine and sine coefficient counts differ: {} vs {}",
                a.len(),
                b.len()
            )));
        }
        Ok(Spectrum { phase, x0, a0, a, b })
    }

    pub fn harmonics(&self) -> usize {
        self.a.len()
    }

    /// The segment the coefficients belong to.
    pub fn segment(&self) -> Result<Segment> {
        Segment::one_period(&self.phase, self.x0, DEFAULT_INVERSION_TOL)
    }

    /// `a₀ + Σ a_m·cos(m·g(x)) + b_m·sin(m·g(x))`.
    ///
    /// Points outside the segment are extrapolations; see [`Spectrum::is_extrapolation`].
    pub fn synthesize(&self, x: f64) -> Result<f64> {
        let u = self.phase.eval(x)?;
        let sum = self
            .a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(k, (a, b))| {
                let t = (k + 1) as f64 * u;
                a * t.cos() + b * t.sin()
            })
            .sum::<f64>();
        Ok(self.a0 + sum)
    }

    pub fn is_extrapolation(&self, x: f64) -> Result<bool> {
        Ok(!self.segment()?.contains(x))
    }

    /// Largest coefficient-wise difference to another spectrum of equal size.
    pub fn max_coefficient_diff(&self, other: &Spectrum) -> f64 {
        let mut max = (self.a0 - other.a0).abs();
        for (x, y) in self.a.iter().zip(&other.a).chain(self.b.iter().zip(&other.b)) {
            max = max.max((x - y).abs());
        }
        max
    }
}

/// Projects `f` onto the first `harmonics` harmonics over `[x₀, x₀ + T(x₀)]`.
pub fn expand<F>(f: F, phase: &PhaseFunction, x0: f64, harmonics: u32) -> Result<Spectrum>
where
    F: Fn(f64) -> f64 + Sync,
{
    let seg = Segment::one_period(phase, x0, DEFAULT_INVERSION_TOL)?;
    expand_on(&f, &seg, harmonics)
}

fn expand_on<F>(f: &F, seg: &Segment, harmonics: u32) -> Result<Spectrum>
where
    F: Fn(f64) -> f64 + Sync,
{
    let phase = seg.phase();
    let one = BasisFunction::constant(phase);
    let a0 = weighted_integral(seg, f)? / one.squared_norm();

    let pairs = (1..=harmonics)
        .into_par_iter()
        .map(|m| {
            let cos = BasisFunction::cosine(phase, m)?;
            let sin = BasisFunction::sine(phase, m)?;
            let mf = f64::from(m);
            let a = weighted_integral(seg, |x| f(x) * (mf * phase.eval_unchecked(x)).cos())?
                / cos.squared_norm();
            let b = weighted_integral(seg, |x| f(x) * (mf * phase.eval_unchecked(x)).sin())?
                / sin.squared_norm();
            Ok((a, b))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let (a, b) = pairs.into_iter().unzip();
    Ok(Spectrum {
        phase: phase.clone(),
        x0: seg.start(),
        a0,
        a,
        b,
    })
}

/// Consecutive period segments `[x₀, x₁], [x₁, x₂], …` covering `[x₀, x_end]`.
///
/// The last segment is the first one whose end reaches `x_end`.
pub fn segment_chain(phase: &PhaseFunction, x0: f64, x_end: f64) -> Result<Vec<Segment>> {
    if !(x_end > x0) {
        return Err(Error::InvalidParameter(format!(
            "chain needs x_end > x0, got [{x0}, {x_end}]"
        )));
    }
    let mut out = Vec::new();
    let mut x = x0;
    while x < x_end {
        let seg = Segment::one_period(phase, x, DEFAULT_INVERSION_TOL)?;
        x = seg.end();
        out.push(seg);
    }
    Ok(out)
}

/// Expands `f` independently on every segment of [`segment_chain`].
pub fn expand_chain<F>(
    f: F,
    phase: &PhaseFunction,
    x0: f64,
    x_end: f64,
    harmonics: u32,
) -> Result<Vec<Spectrum>>
where
    F: Fn(f64) -> f64 + Sync,
{
    segment_chain(phase, x0, x_end)?
        .par_iter()
        .map(|seg| expand_on(&f, seg, harmonics))
        .collect()
}

/// Writes the spectrum as CSV with columns `m,a,b`; row `m = 0` holds `a₀` and an
/// empty `b`.
pub fn write_spectrum_to<W: Write>(s: &Spectrum, mut w: W) -> Result<()> {
    writeln!(w, "m,a,b")?;
    writeln!(w, "0,{},", sig17(s.a0))?;
    for (k, (a, b)) in s.a.iter().zip(&s.b).enumerate() {
        writeln!(w, "{},{},{}", k + 1, sig17(*a), sig17(*b))?;
    }
    Ok(())
}

/// Reads a spectrum written by [`write_spectrum_to`]. Rows may come in any order but
/// must cover `m = 0..=M` exactly once.
pub fn read_spectrum_from<R: Read>(reader: R, phase: &PhaseFunction, x0: f64) -> Result<Spectrum> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Parse {
        row: 1,
        message: e.to_string(),
    })?;
    if header.iter().collect::<Vec<_>>() != ["m", "a", "b"] {
        return Err(Error::Parse {
            row: 1,
            message: "expected header `m,a,b`".into(),
        });
    }
    let mut rows: Vec<Option<(f64, f64)>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        let bad = |what: &str| Error::Parse {
            row,
            message: what.to_string(),
        };
        if rec.len() != 3 {
            return Err(bad(&format!("expected 3 fields, found {}", rec.len())));
        }
        let m: usize = rec[0].parse().map_err(|_| bad("invalid harmonic index"))?;
        if m > MAX_SPECTRUM_HARMONIC {
            return Err(bad(&format!("harmonic {m} exceeds {MAX_SPECTRUM_HARMONIC}")));
        }
        let num = |t: &str| -> Result<f64> {
            let v: f64 = t.parse().map_err(|_| bad(&format!("invalid number `{t}`")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad(&format!("non-finite coefficient `{t}`")))
            }
        };
        let a = num(&rec[1])?;
        let b = if m == 0 && rec[2].is_empty() { 0.0 } else { num(&rec[2])? };
        if rows.len() <= m {
            rows.resize(m + 1, None);
        }
        if rows[m].replace((a, b)).is_some() {
            return Err(bad(&format!("duplicate harmonic {m}")));
        }
    }
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(m, r)| {
            r.ok_or_else(|| Error::Parse {
                row: 0,
                message: format!("missing harmonic {m}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (a0, _) = *rows.first().ok_or_else(|| Error::Parse {
        row: 0,
        message: "spectrum has no rows".into(),
    })?;
    let (a, b) = rows[1..].iter().copied().unzip();
    Spectrum::new(phase.clone(), x0, a0, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn pow(alpha: f64) -> PhaseFunction {
        PhaseFunction::power_law(alpha).unwrap()
    }

    #[test]
    fn single_warped_harmonic() {
        let p = pow(0.75);
        let s = expand(|x: f64| (2.0 * x.powf(0.75)).sin(), &p, 0.0, 4).unwrap();
        for m in 0..4 {
            let want_b = if m == 1 { 1.0 } else { 0.0 };
            assert!((s.b[m] - want_b).abs() < 1e-6, "b{} = {}", m + 1, s.b[m]);
            assert!(s.a[m].abs() < 1e-6, "a{} = {}", m + 1, s.a[m]);
        }
        assert!(s.a0.abs() < 1e-6);
    }

    #[test]
    fn constant_projection() {
        for p in [pow(0.5), pow(2.0), PhaseFunction::identity()] {
            let s = expand(|_| 3.5, &p, 1.0, 3).unwrap();
            assert!((s.a0 - 3.5).abs() < 1e-9);
            assert!(s.a.iter().chain(&s.b).all(|c| c.abs() < 1e-9));
        }
    }

    #[test]
    fn classical_cosine() {
        let s = expand(|x: f64| (3.0 * x).cos(), &pow(1.0), 0.0, 3).unwrap();
        assert!((s.a[2] - 1.0).abs() < 1e-9);
        assert!(s.a0.abs() < 1e-9);
        assert!(s.a[..2].iter().chain(&s.b).all(|c| c.abs() < 1e-9));
    }

    #[test]
    fn synthesize_examples() {
        let p = pow(0.75);
        let s = Spectrum::new(p.clone(), 0.0, 0.0, vec![0.0; 3], vec![0.0, 1.0, 0.0]).unwrap();
        for x in [0.0, 1.0, 7.3, 11.0] {
            let want = (2.0 * f64::powf(x, 0.75)).sin();
            assert!((s.synthesize(x).unwrap() - want).abs() < 1e-15);
        }
        let c = Spectrum::new(p, 0.0, 2.25, vec![], vec![]).unwrap();
        assert_eq!(c.synthesize(4.0).unwrap(), 2.25);
        assert!(Spectrum::new(pow(1.0), 0.0, 0.0, vec![1.0], vec![]).is_err());
    }

    #[test]
    fn extrapolation_flag() {
        let s = Spectrum::new(pow(1.0), 0.0, 1.0, vec![], vec![]).unwrap();
        assert!(!s.is_extrapolation(PI).unwrap());
        assert!(s.is_extrapolation(7.0).unwrap());
    }

    #[test]
    fn linearity() {
        let p = PhaseFunction::power_plus_sine(4.0 / 3.0, 1.2, 1.0).unwrap();
        let f = |x: f64| (0.3 * x).exp();
        let h = |x: f64| x.sin() + 0.1 * x * x;
        let (lam, mu) = (1.7, -0.4);
        let sf = expand(f, &p, 2.0, 4).unwrap();
        let sh = expand(h, &p, 2.0, 4).unwrap();
        let sc = expand(|x| lam * f(x) + mu * h(x), &p, 2.0, 4).unwrap();
        assert!((sc.a0 - (lam * sf.a0 + mu * sh.a0)).abs() < 1e-8);
        for m in 0..4 {
            assert!((sc.a[m] - (lam * sf.a[m] + mu * sh.a[m])).abs() < 1e-8);
            assert!((sc.b[m] - (lam * sf.b[m] + mu * sh.b[m])).abs() < 1e-8);
        }
    }

    #[test]
    fn idempotence_on_random_spectra() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for (alpha, x0) in [(0.75, 0.0), (1.5, 2.0), (0.5, 4.0)] {
            let p = pow(alpha);
            let a: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let s = Spectrum::new(p.clone(), x0, rng.gen_range(-1.0..1.0), a, b).unwrap();
            let back = expand(|x| s.synthesize(x).unwrap(), &p, x0, 5).unwrap();
            assert!(back.max_coefficient_diff(&s) < 1e-6, "alpha {alpha}");
        }
    }

    #[test]
    fn spectrum_csv() {
        let p = pow(0.75);
        let s = Spectrum::new(p.clone(), 1.5, 0.25, vec![1.0, -0.5], vec![0.1, 1e-17]).unwrap();
        let mut buf = Vec::new();
        write_spectrum_to(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("m,a,b\n0,0.25,\n1,1,0.10000000000000001\n"));
        assert_eq!(read_spectrum_from(buf.as_slice(), &p, 1.5).unwrap(), s);

        assert!(read_spectrum_from("m,a,b\n0,1,\n2,1,1\n".as_bytes(), &p, 0.0).is_err());
        assert!(read_spectrum_from("m,a,b\n0,1,\n0,1,\n".as_bytes(), &p, 0.0).is_err());
        assert!(read_spectrum_from("m,a\n0,1\n".as_bytes(), &p, 0.0).is_err());
        assert!(read_spectrum_from("m,a,b\n".as_bytes(), &p, 0.0).is_err());
        let only_mean = read_spectrum_from("m,a,b\n0,2,\n".as_bytes(), &p, 0.0).unwrap();
        assert_eq!(only_mean.harmonics(), 0);
    }

    #[test]
    fn chain_tiles_the_range() {
        let p = pow(4.0 / 3.0);
        let chain = segment_chain(&p, 0.0, 15.0).unwrap();
        assert_eq!(chain[0].start(), 0.0);
        for w in chain.windows(2) {
            assert_eq!(w[0].end(), w[1].start());
        }
        assert!(chain.last().unwrap().end() >= 15.0);
        assert!(chain[chain.len() - 2].end() < 15.0);
        // 15^{4/3}/2π ≈ 5.89 turns → 6 segments
        assert_eq!(chain.len(), 6);

        let spectra =
            expand_chain(|x: f64| (x.powf(4.0 / 3.0)).cos(), &p, 0.0, 15.0, 2).unwrap();
        assert_eq!(spectra.len(), 6);
        for s in &spectra {
            assert!((s.a[0] - 1.0).abs() < 1e-6);
        }
        assert!(segment_chain(&p, 3.0, 1.0).is_err());
    }
}
