//! Sampled density grids with enough metadata to say where they came from.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marginals::{MarginalKind, Marginals, ScaledDensityQuery};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Spectral,
    Pde,
    MonteCarlo,
    Walk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    pub kind: MarginalKind,
    /// t for fixed-time kinds, s for exponential-time kinds.
    pub time_scale: f64,
    pub method: Method,
    pub arguments: Vec<f64>,
    pub values: Vec<f64>,
    pub std_errors: Option<Vec<f64>>,
}

impl DensityTable {
    /// Evaluates `kind` at `points` equally spaced arguments over [lo, hi].
    pub fn tabulate(m: &Marginals, kind: MarginalKind, time_scale: f64, lo: f64, hi: f64, points: usize) -> Result<Self> {
        if points < 2 || !(hi > lo) {
            return Err(Error::Config("table needs ≥ 2 points and hi > lo".into()));
        }
        let step = (hi - lo) / (points - 1) as f64;
        let arguments: Vec<f64> = (0..points).map(|i| lo + step * i as f64).collect();
        let values = arguments
            .iter()
            .map(|&argument| {
                m.density_at_time(ScaledDensityQuery {
                    kind,
                    t_or_s: time_scale,
                    argument,
                })
            })
            .collect::<Result<_>>()?;
        let method = match kind {
            MarginalKind::PositionFixedTime | MarginalKind::PositionExpTime => Method::Spectral,
            _ => Method::ClosedForm,
        };
        Ok(Self {
            kind,
            time_scale,
            method,
            arguments,
            values,
            std_errors: None,
        })
    }

    pub fn len(&self) -> usize {
        self.arguments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arguments.is_empty()
    }

    /// Trapezoid integral of the tabulated values.
    pub fn trapezoid(&self) -> f64 {
        self.arguments
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(a, v)| 0.5 * (a[1] - a[0]) * (v[0] + v[1]))
            .sum()
    }

    /// Writes `argument,value[,std_error]` rows; `header` lines are emitted
    /// as `#` comments first.
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> std::io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        match &self.std_errors {
            Some(se) => {
                writeln!(out, "argument,value,std_error")?;
                for ((a, v), s) in self.arguments.iter().zip(&self.values).zip(se) {
                    writeln!(out, "{a:.16e},{v:.16e},{s:.16e}")?;
                }
            }
            None => {
                writeln!(out, "argument,value")?;
                for (a, v) in self.arguments.iter().zip(&self.values) {
                    writeln!(out, "{a:.16e},{v:.16e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn height_table_normalizes() {
        let m = Marginals::new(50).unwrap();
        let t = DensityTable::tabulate(&m, MarginalKind::HeightExpTime, 1.0, 0.0, 6.0, 6001).unwrap();
        assert!((t.trapezoid() - 1.0).abs() < 1e-4);
        let mut buf = Vec::new();
        t.write_csv(&mut buf, &["test".into()]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("# test\nargument,value\n"));
        assert_eq!(s.lines().count(), 6003);
    }

    #[test]
    fn scaling_preserves_mass() {
        let m = Marginals::new(50).unwrap();
        let t = DensityTable::tabulate(&m, MarginalKind::HeightFixedTime, 8.0, 0.0, 12.0, 4001).unwrap();
        assert!((t.trapezoid() - 1.0).abs() < 1e-4);
        assert!(DensityTable::tabulate(&m, MarginalKind::HeightFixedTime, 1.0, 1.0, 1.0, 10).is_err());
    }
}
