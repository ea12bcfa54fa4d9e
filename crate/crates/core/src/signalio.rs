//! Sampled signals: generation of warped sinusoids, cycle counting and CSV I/O.
//!
//! CSV files carry a header `x,y` followed by one sample per row, `x` strictly
//! increasing. Values are written with 17 significant digits so a write/read cycle
//! reproduces every `f64` exactly.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::numfmt::sig17;
use crate::phase::{PhaseFunction, Wave};
use crate::TWO_PI;

/// Samples `(xs[i], ys[i])` with strictly increasing, finite abscissas.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampledSignal {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl SampledSignal {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidParameter(format!(
                "length mismatch: {} abscissas, {} ordinates",
                xs.len(),
                ys.len()
            )));
        }
        for (i, (x, y)) in xs.iter().zip(&ys).enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::Parse {
                    row: i + 1,
                    message: format!("non-finite sample ({x}, {y})"),
                });
            }
            if i > 0 && !(*x > xs[i - 1]) {
                return Err(Error::Parse {
                    row: i + 1,
                    message: format!("x = {x} does not increase (previous {})", xs[i - 1]),
                });
            }
        }
        Ok(SampledSignal { xs, ys })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn span(&self) -> Option<(f64, f64)> {
        Some((*self.xs.first()?, *self.xs.last()?))
    }

    /// Piecewise-linear interpolation; fails outside the sampled span.
    pub fn interpolate(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.span().ok_or_else(|| {
            Error::InvalidParameter("cannot interpolate an empty signal".into())
        })?;
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfDomain { x, start: lo, end: hi });
        }
        let i = self.xs.partition_point(|&p| p <= x);
        if i == 0 {
            return Ok(self.ys[0]);
        }
        if i == self.xs.len() {
            return Ok(self.ys[i - 1]);
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let t = (x - x0) / (x1 - x0);
        Ok(self.ys[i - 1] + t * (self.ys[i] - self.ys[i - 1]))
    }
}

/// `n` uniform samples of `sin(m·g(x))` or `cos(m·g(x))` over `[x_lo, x_hi]`.
pub fn generate(
    phase: &PhaseFunction,
    m: u32,
    wave: Wave,
    x_lo: f64,
    x_hi: f64,
    n: usize,
) -> Result<SampledSignal> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {n}")));
    }
    if !(x_lo < x_hi) {
        return Err(Error::InvalidParameter(format!("empty range [{x_lo}, {x_hi}]")));
    }
    let step = (x_hi - x_lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { x_hi } else { x_lo + step * i as f64 })
        .collect();
    let ys = xs
        .iter()
        .map(|&x| phase.wave(wave, m, x))
        .collect::<Result<Vec<f64>>>()?;
    SampledSignal::new(xs, ys)
}

/// Cycle count of an oscillating signal.
///
/// `complete` counts full periods between consecutive upward zero crossings;
/// `fractional` is what remains of the total phase advance, so
/// `complete + fractional` is the total number of turns. The remainder collects the
/// partial cycles before the first and after the last upward crossing, so it can
/// exceed one when the record starts and ends mid-cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleCount {
    pub complete: u64,
    pub fractional: f64,
}

impl CycleCount {
    pub fn total(&self) -> f64 {
        self.complete as f64 + self.fractional
    }
}

/// Counts cycles of a sampled `sin(m·g(x))`.
///
/// With `phase = Some((g, m))` the total is exact, `m·(g(x_hi) − g(x_lo))/2π`.
/// Without it the total is estimated from the crossings plus the phase at each end,
/// recovered from the normalised value and the local slope.
pub fn count_cycles(sig: &SampledSignal, phase: Option<(&PhaseFunction, u32)>) -> Result<CycleCount> {
    if sig.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 samples to count cycles, got {}",
            sig.len()
        )));
    }
    let ys = sig.ys();
    let amplitude = ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    if amplitude == 0.0 {
        return Ok(CycleCount {
            complete: 0,
            fractional: 0.0,
        });
    }
    // values within rounding of zero count as exact zeros
    let eps = 1e-12 * amplitude;
    let sign = |y: f64| {
        if y.abs() <= eps {
            0
        } else if y > 0.0 {
            1
        } else {
            -1
        }
    };

    // Upward crossings, one per transition from negative to positive; a run of
    // zeros between them counts once. A leading zero followed by a rise counts too.
    let mut upward = 0u64;
    let mut last_nonzero = 0i8;
    let mut inner_wraps = 0u64;
    for (i, &y) in ys.iter().enumerate() {
        let s = sign(y);
        if s == 0 {
            continue;
        }
        if s > 0 {
            if last_nonzero < 0 {
                upward += 1;
                inner_wraps += 1;
            } else if last_nonzero == 0 && i > 0 {
                // signal began on an exact zero and rose from it
                upward += 1;
            }
        }
        last_nonzero = s as i8;
    }
    // trailing zero after a negative stretch is an upward crossing at the end
    if sign(ys[ys.len() - 1]) == 0 && last_nonzero < 0 {
        upward += 1;
        inner_wraps += 1;
    }
    let complete = upward.saturating_sub(1);

    let total = match phase {
        Some((g, m)) => {
            let (lo, hi) = sig.span().expect("non-empty");
            f64::from(m) * (g.eval(hi)? - g.eval(lo)?) / TWO_PI
        }
        None => {
            let n = ys.len();
            let head = endpoint_phase(ys[0], ys[1] - ys[0], amplitude, eps);
            let tail = endpoint_phase(ys[n - 1], ys[n - 1] - ys[n - 2], amplitude, eps);
            inner_wraps as f64 + (tail - head) / TWO_PI
        }
    };
    Ok(CycleCount {
        complete,
        fractional: total - complete as f64,
    })
}

/// Phase in `[0, 2π)` of `A·sin φ` from its value and slope.
fn endpoint_phase(y: f64, slope: f64, amplitude: f64, eps: f64) -> f64 {
    let s = if y.abs() <= eps { 0.0 } else { (y / amplitude).clamp(-1.0, 1.0) };
    let base = s.asin();
    let phi = if slope >= 0.0 { base } else { std::f64::consts::PI - base };
    phi.rem_euclid(TWO_PI) % TWO_PI
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<SampledSignal> {
    let file = File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    read_from(file)
}

/// Parses `x,y` CSV. Row numbers in errors count the header as row 1.
pub fn read_from<R: Read>(reader: R) -> Result<SampledSignal> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    match records.next() {
        None => return Ok(SampledSignal::default()),
        Some(header) => {
            let header = header.map_err(|e| Error::Parse {
                row: 1,
                message: e.to_string(),
            })?;
            if header.len() != 2 || &header[0] != "x" || &header[1] != "y" {
                return Err(Error::Parse {
                    row: 1,
                    message: format!("expected header `x,y`, found `{}`", header.iter().collect::<Vec<_>>().join(",")),
                });
            }
        }
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, rec) in records.enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        if rec.len() != 2 {
            return Err(Error::Parse {
                row,
                message: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        let field = |k: usize| {
            rec[k].parse::<f64>().map_err(|_| Error::Parse {
                row,
                message: format!("invalid number `{}`", &rec[k]),
            })
        };
        let (x, y) = (field(0)?, field(1)?);
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Parse {
                row,
                message: format!("non-finite sample ({x}, {y})"),
            });
        }
        if let Some(&prev) = xs.last() {
            if !(x > prev) {
                return Err(Error::Parse {
                    row,
                    message: format!("x = {x} does not increase (previous {prev})"),
                });
            }
        }
        xs.push(x);
        ys.push(y);
    }
    Ok(SampledSignal { xs, ys })
}

pub fn write_csv(sig: &SampledSignal, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    let mut w = std::io::BufWriter::new(file);
    write_to(sig, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_to<W: Write>(sig: &SampledSignal, mut w: W) -> Result<()> {
    writeln!(w, "x,y")?;
    for (x, y) in sig.xs.iter().zip(&sig.ys) {
        writeln!(w, "{},{}", sig17(*x), sig17(*y))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pow(alpha: f64) -> PhaseFunction {
        PhaseFunction::power_law(alpha).unwrap()
    }

    #[test]
    fn reference_cycle_counts() {
        let cases = [
            (0.75, 30.0, 2u64, 30f64.powf(0.75) / TWO_PI),
            (4.0 / 3.0, 15.0, 5, 15f64.powf(4.0 / 3.0) / TWO_PI),
            (1.0, 30.0, 4, 30.0 / TWO_PI),
        ];
        for (alpha, hi, complete, total) in cases {
            let p = pow(alpha);
            let sig = generate(&p, 1, Wave::Sine, 0.0, hi, 3000).unwrap();
            let known = count_cycles(&sig, Some((&p, 1))).unwrap();
            assert_eq!(known.complete, complete, "alpha {alpha}");
            assert!((known.total() - total).abs() < 1e-12);
            let blind = count_cycles(&sig, None).unwrap();
            assert_eq!(blind.complete, complete);
            assert!((blind.total() - total).abs() < 0.01, "alpha {alpha}: {blind:?}");
        }
    }

    #[test]
    fn fractional_remainder_mid_cycle() {
        let p = pow(4.0 / 3.0);
        let sig = generate(&p, 1, Wave::Sine, 0.0, 15.0, 3000).unwrap();
        let c = count_cycles(&sig, Some((&p, 1))).unwrap();
        assert_eq!(c.complete, 5);
        assert!((c.fractional - 0.89).abs() < 0.01);
    }

    #[test]
    fn one_classical_cycle() {
        let p = pow(1.0);
        let sig = generate(&p, 1, Wave::Sine, 0.0, TWO_PI, 500).unwrap();
        let c = count_cycles(&sig, None).unwrap();
        assert_eq!(c.complete, 1);
        assert!(c.fractional.abs() < 1e-6, "{c:?}");
    }

    #[test]
    fn constant_signal_has_no_cycles() {
        let sig = SampledSignal::new(vec![0.0, 1.0, 2.0], vec![0.4; 3]).unwrap();
        let c = count_cycles(&sig, None).unwrap();
        assert_eq!(c.complete, 0);
        assert!(c.fractional.abs() < 1e-12);
        let flat = SampledSignal::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(count_cycles(&flat, None).unwrap().total(), 0.0);
    }

    #[test]
    fn too_few_samples() {
        let sig = SampledSignal::new(vec![0.0], vec![0.0]).unwrap();
        assert!(count_cycles(&sig, None).is_err());
        assert!(generate(&pow(1.0), 1, Wave::Sine, 0.0, 1.0, 1).is_err());
        assert!(generate(&pow(1.0), 1, Wave::Sine, 1.0, 1.0, 10).is_err());
        assert!(generate(&pow(1.0), 1, Wave::Sine, -1.0, 1.0, 10).is_err());
    }

    #[test]
    fn harmonic_multiplies_count() {
        let p = PhaseFunction::power_plus_sine(4.0 / 3.0, 1.2, 1.0).unwrap();
        let sig = generate(&p, 3, Wave::Sine, 0.0, 10.0, 6000).unwrap();
        let want = 3.0 * p.eval(10.0).unwrap() / TWO_PI;
        let blind = count_cycles(&sig, None).unwrap();
        assert!((blind.total() - want).abs() < 0.01, "{blind:?} vs {want}");
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let sig = generate(&pow(0.75), 2, Wave::Cosine, 0.5, 9.0, 257).unwrap();
        let mut buf = Vec::new();
        write_to(&sig, &mut buf).unwrap();
        let back = read_from(buf.as_slice()).unwrap();
        assert_eq!(back, sig);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_csv(&sig, &path).unwrap();
        assert_eq!(read_csv(&path).unwrap(), sig);

        let bad = "x,y\n0,1\n2,3\n1,4\n";
        assert_eq!(
            read_from(bad.as_bytes()).unwrap_err(),
            Error::Parse {
                row: 4,
                message: "x = 1 does not increase (previous 2)".into()
            }
        );
        assert!(matches!(
            read_from("x,y\n0,abc\n".as_bytes()),
            Err(Error::Parse { row: 2, .. })
        ));
        assert!(matches!(
            read_from("x,y\n0,1,2\n".as_bytes()),
            Err(Error::Parse { row: 2, .. })
        ));
        assert!(matches!(
            read_from("x,y\n0,inf\n".as_bytes()),
            Err(Error::Parse { row: 2, .. })
        ));
        assert!(matches!(
            read_from("t,v\n0,1\n".as_bytes()),
            Err(Error::Parse { row: 1, .. })
        ));
        assert!(read_from("x,y\n".as_bytes()).unwrap().is_empty());
        assert!(read_from("".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn interpolation() {
        let sig = SampledSignal::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(sig.interpolate(0.5).unwrap(), 1.0);
        assert_eq!(sig.interpolate(2.0).unwrap(), 1.0);
        assert_eq!(sig.interpolate(3.0).unwrap(), 0.0);
        assert!(sig.interpolate(3.5).is_err());
    }

    proptest! {
        #[test]
        fn csv_is_bit_exact(values in prop::collection::vec(-1e300f64..1e300, 1..50)) {
            let xs: Vec<f64> = (0..values.len()).map(|i| i as f64 * 0.1).collect();
            let sig = SampledSignal::new(xs, values).unwrap();
            let mut buf = Vec::new();
            write_to(&sig, &mut buf).unwrap();
            let back = read_from(buf.as_slice()).unwrap();
            for (a, b) in back.ys().iter().zip(sig.ys()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }

        #[test]
        fn cycle_total_tracks_phase(alpha in 0.5f64..2.0, m in 1u32..4, hi in 5.0f64..30.0) {
            let p = pow(alpha);
            let turns = f64::from(m) * p.eval(hi).unwrap() / TWO_PI;
            // at least 100 samples per cycle
            let n = ((turns.ceil() * 100.0) as usize).max(200) * 2;
            let sig = generate(&p, m, Wave::Sine, 0.0, hi, n).unwrap();
            let blind = count_cycles(&sig, None).unwrap();
            prop_assert!((blind.total() - turns).abs() < 0.01, "{:?} vs {}", blind, turns);
        }
    }
}
