use std::io::{Read, Write};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::FeatureKind;
use crate::class::Class;
use crate::error::{Error, Result};

/// Header of the little-endian binary block format.
pub const BINARY_MAGIC: &[u8; 8] = b"RDAFEAT1";

/// Extraction parameters recorded alongside a matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMeta {
    pub sample_rate: u32,
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub frame_len: usize,
    pub hop: usize,
    pub n_filters: usize,
    pub n_coeffs: usize,
    /// CWT scales in samples, empty for kinds that use none.
    pub scales: Vec<f64>,
}

/// Rows of feature vectors, one per frame or window.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub data: Array2<f64>,
    pub kind: FeatureKind,
    pub names: Vec<String>,
    pub row_labels: Option<Vec<Class>>,
    pub meta: FeatureMeta,
}

impl FeatureMatrix {
    pub fn new(
        data: Array2<f64>,
        kind: FeatureKind,
        names: Vec<String>,
        row_labels: Option<Vec<Class>>,
        meta: FeatureMeta,
    ) -> Result<Self> {
        if names.len() != data.ncols() {
            return Err(Error::DimensionMismatch {
                expected: data.ncols(),
                got: names.len(),
            });
        }
        if let Some(l) = &row_labels {
            if l.len() != data.nrows() {
                return Err(Error::DimensionMismatch {
                    expected: data.nrows(),
                    got: l.len(),
                });
            }
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("feature matrix contains non-finite values"));
        }
        Ok(Self {
            data,
            kind,
            names,
            row_labels,
            meta,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    /// CSV with a header of feature names, plus a trailing `label` column
    /// when row labels are present. Values use the shortest round-trip form.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = self.names.join(",");
        if self.row_labels.is_some() {
            header.push_str(",label");
        }
        writeln!(w, "{header}")?;
        for (i, row) in self.data.rows().into_iter().enumerate() {
            let mut line = row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
            if let Some(labels) = &self.row_labels {
                line.push(',');
                line.push_str(labels[i].name());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// `RDAFEAT1`, rows (u64 LE), cols (u64 LE), then row-major f64 LE.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&(self.data.nrows() as u64).to_le_bytes())?;
        w.write_all(&(self.data.ncols() as u64).to_le_bytes())?;
        for v in self.data.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Reads a block written by [`FeatureMatrix::write_binary`].
pub fn read_binary<R: Read>(mut r: R) -> Result<Array2<f64>> {
    let bad = |m: &str| Error::Serialization(format!("feature block: {m}"));
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| bad("truncated header"))?;
    if &magic != BINARY_MAGIC {
        return Err(bad("bad magic"));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word).map_err(|_| bad("truncated header"))?;
    let rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word).map_err(|_| bad("truncated header"))?;
    let cols = u64::from_le_bytes(word) as usize;
    let len = rows.checked_mul(cols).ok_or_else(|| bad("dimensions overflow"))?;
    let mut data = Vec::with_capacity(len.min(1 << 24));
    for _ in 0..len {
        r.read_exact(&mut word).map_err(|_| bad("truncated data"))?;
        data.push(f64::from_le_bytes(word));
    }
    Array2::from_shape_vec((rows, cols), data).map_err(|e| bad(&e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn meta() -> FeatureMeta {
        FeatureMeta {
            sample_rate: 8000,
            frame_ms: 40.0,
            hop_ms: 20.0,
            frame_len: 320,
            hop: 160,
            n_filters: 0,
            n_coeffs: 0,
            scales: vec![],
        }
    }

    #[test]
    fn csv_layout() {
        let m = FeatureMatrix::new(
            array![[1.0, 0.5], [-2.0, 1e-3]],
            FeatureKind::Time,
            vec!["a".into(), "b".into()],
            Some(vec![Class::Noise, Class::Actuation]),
            meta(),
        )
        .unwrap();
        let mut out = Vec::new();
        m.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "a,b,label\n1,0.5,noise\n-2,0.001,actuation\n");
    }

    #[test]
    fn binary_round_trip() {
        let data = array![[1.0, f64::MIN_POSITIVE, -0.1], [3.5, 0.0, 1e300]];
        let m = FeatureMatrix::new(data.clone(), FeatureKind::Mfcc, vec!["x".into(); 3], None, meta()).unwrap();
        let mut out = Vec::new();
        m.write_binary(&mut out).unwrap();
        assert_eq!(out.len(), 8 + 16 + 6 * 8);
        assert_eq!(&out[..8], BINARY_MAGIC);
        assert_eq!(read_binary(&out[..]).unwrap(), data);
        assert!(read_binary(&out[..20]).is_err());
        assert!(read_binary(&b"NOTMAGIC"[..]).is_err());
    }

    #[test]
    fn rejects_non_finite_and_shape_errors() {
        assert!(FeatureMatrix::new(array![[f64::NAN]], FeatureKind::Volume, vec!["v".into()], None, meta()).is_err());
        assert!(FeatureMatrix::new(array![[1.0]], FeatureKind::Volume, vec![], None, meta()).is_err());
        assert!(
            FeatureMatrix::new(array![[1.0]], FeatureKind::Volume, vec!["v".into()], Some(vec![]), meta()).is_err()
        );
    }
}
