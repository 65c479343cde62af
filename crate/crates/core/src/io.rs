//! File formats: sequences (JSON or one phase per line), masks (JSON), and CSV exports.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::run::{StepDetail, TraceEntry};
use crate::sequence::UnimodularSequence;
use crate::spectral::{band_to_indices, SpectralMask};

pub fn sequence_to_json(x: &UnimodularSequence) -> String {
    serde_json::to_string_pretty(x).expect("sequence serializes")
}

pub fn sequence_from_json(text: &str) -> Result<UnimodularSequence> {
    Ok(serde_json::from_str(text)?)
}

/// One phase (radians) per line; blank lines and `#` comments are skipped.
pub fn sequence_from_text(text: &str) -> Result<UnimodularSequence> {
    let phases = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(i, l)| {
            l.parse::<f64>()
                .map_err(|e| Error::Parse(format!("phase {}: '{l}': {e}", i + 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    UnimodularSequence::from_phases(phases)
}

pub fn sequence_to_text(x: &UnimodularSequence) -> String {
    let mut out = String::with_capacity(24 * x.len());
    for t in x.phases() {
        out.push_str(&format!("{t:?}\n"));
    }
    out
}

/// Reads JSON when the content starts with `{`, plain text otherwise.
pub fn read_sequence(path: &Path) -> Result<UnimodularSequence> {
    let text = fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        sequence_from_json(&text)
    } else {
        sequence_from_text(&text)
    }
}

pub fn write_sequence_json(path: &Path, x: &UnimodularSequence) -> Result<()> {
    fs::write(path, sequence_to_json(x) + "\n")?;
    Ok(())
}

/// `{"lambda": .., "bands": [[lo, hi], ..]}` or `{"lambda": .., "indices": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum MaskFile {
    Bands { lambda: f64, bands: Vec<[f64; 2]> },
    Indices { lambda: f64, indices: Vec<usize> },
}

impl MaskFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("mask must have lambda and bands or indices: {e}")))
    }

    pub fn into_mask(self, n: usize) -> Result<SpectralMask> {
        let mask = match self {
            MaskFile::Bands { lambda, bands } => {
                let bands: Vec<(f64, f64)> = bands.iter().map(|b| (b[0], b[1])).collect();
                SpectralMask::new(band_to_indices(&bands, n)?, lambda)?
            }
            MaskFile::Indices { lambda, indices } => SpectralMask::new(indices, lambda)?,
        };
        mask.check_len(n)?;
        Ok(mask)
    }
}

pub fn read_mask(path: &Path, n: usize) -> Result<SpectralMask> {
    MaskFile::parse(&fs::read_to_string(path)?)?.into_mask(n)
}

fn detail_header(detail: &StepDetail) -> &'static str {
    match detail {
        StepDetail::Initial => "",
        StepDetail::Misl { .. } => ",p_max",
        StepDetail::Squarem { .. } => ",alpha,halvings",
        StepDetail::Backtrack { .. } => ",i_k,L",
        StepDetail::Can { .. } => ",objective_can",
    }
}

/// Trace CSV: `iteration,isl,objective` followed by the variant's step columns.
/// The initial row leaves the step columns empty.
pub fn write_trace_csv<W: Write>(mut w: W, trace: &[TraceEntry]) -> Result<()> {
    let extra = trace
        .iter()
        .map(|t| detail_header(&t.detail))
        .find(|h| !h.is_empty())
        .unwrap_or("");
    let blanks = extra.matches(',').count();
    writeln!(w, "iteration,isl,objective{extra}")?;
    for t in trace {
        write!(w, "{},{:?},{:?}", t.iteration, t.isl, t.objective)?;
        match t.detail {
            StepDetail::Initial => write!(w, "{}", ",".repeat(blanks))?,
            StepDetail::Misl { p_max } => write!(w, ",{p_max:?}")?,
            StepDetail::Squarem { alpha, halvings } => write!(w, ",{alpha:?},{halvings}")?,
            StepDetail::Backtrack { ladder_index, l } => write!(w, ",{ladder_index},{l:?}")?,
            StepDetail::Can { objective_can } => write!(w, ",{objective_can:?}")?,
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Two-column CSV; non-finite values print as `inf`, `-inf` or `NaN`.
pub fn write_two_column_csv<W, K>(mut w: W, header: (&str, &str), rows: &[(K, f64)]) -> Result<()>
where
    W: Write,
    K: std::fmt::Display,
{
    writeln!(w, "{},{}", header.0, header.1)?;
    for (k, v) in rows {
        if v.is_finite() {
            writeln!(w, "{k},{v:?}")?;
        } else {
            writeln!(w, "{k},{v}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_sequences() {
        let x = sequence_from_text("# phases\n0.5\n\n-1.25\n").unwrap();
        assert_eq!(x.phases(), &[0.5, -1.25]);
        assert_eq!(sequence_from_text(&sequence_to_text(&x)).unwrap(), x);
        assert!(sequence_from_text("0.1\nabc\n").is_err());
        assert!(sequence_from_text("").is_err());
    }

    #[test]
    fn masks() {
        let m = MaskFile::parse(r#"{"lambda": 10000.0, "bands": [[0.7853981633974483, 1.5707963267948966]]}"#)
            .unwrap()
            .into_mask(100)
            .unwrap();
        assert_eq!(m.bins(), (25..50).collect::<Vec<_>>().as_slice());
        assert_eq!(m.lambda(), 1e4);

        let m = MaskFile::parse(r#"{"lambda": 2, "indices": [5, 3, 3]}"#)
            .unwrap()
            .into_mask(4)
            .unwrap();
        assert_eq!(m.bins(), &[3, 5]);

        assert!(MaskFile::parse(r#"{"lambda": 2, "indices": [9]}"#).unwrap().into_mask(4).is_err());
        assert!(MaskFile::parse(r#"{"bands": []}"#).is_err());
        assert!(MaskFile::parse(r#"{"lambda": 1, "weights": []}"#).is_err());
    }

    #[test]
    fn csv_sentinel() {
        let mut buf = Vec::new();
        write_two_column_csv(&mut buf, ("lag", "value_db"), &[(-1, f64::NEG_INFINITY), (0, 0.0)])
            .unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "lag,value_db\n-1,-inf\n0,0.0\n");
    }

    #[test]
    fn trace_columns() {
        let trace = [
            TraceEntry {
                iteration: 0,
                objective: 3.0,
                isl: 3.0,
                detail: StepDetail::Initial,
            },
            TraceEntry {
                iteration: 1,
                objective: 2.0,
                isl: 2.0,
                detail: StepDetail::Squarem {
                    alpha: -1.5,
                    halvings: 2,
                },
            },
        ];
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &trace).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "iteration,isl,objective,alpha,halvings\n0,3.0,3.0,,\n1,2.0,2.0,-1.5,2\n"
        );
    }
}
