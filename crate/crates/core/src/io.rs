//! File formats shared with the command-line tool and plotting scripts.
//!
//! States: `{"dims": [..], "re": [[..]], "im": [[..]]}` (full square matrix,
//! row-major). POVMs: `{"dim": d, "elements": [{"re": .., "im": ..}, ..]}`.
//! Channels: `{"d_in": .., "d_out": .., "kraus": [{"re": .., "im": ..}, ..]}`.
//! Floats are written as the shortest decimal that parses back to the same
//! `f64`, so files round-trip bit-exactly.
//!
//! Sweeps are CSV with the single header `q,discord`, LF line endings.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::states::{DensityMatrix, KrausChannel, Povm};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmJson {
    pub dim: usize,
    pub elements: Vec<MatrixJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub d_in: usize,
    pub d_out: usize,
    pub kraus: Vec<MatrixJson>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let re = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m[(i, j)].re).collect())
            .collect();
        let im = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m[(i, j)].im).collect())
            .collect();
        Self { re, im }
    }

    /// Shape problems are schema errors.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let rows = self.re.len();
        if self.im.len() != rows {
            return Err(Error::Schema(format!(
                "re has {rows} rows, im has {}",
                self.im.len()
            )));
        }
        let cols = self.re.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows * cols);
        for (i, (r, m)) in self.re.iter().zip(&self.im).enumerate() {
            if r.len() != cols || m.len() != cols {
                return Err(Error::Schema(format!("row {i} is ragged")));
            }
            data.extend(r.iter().zip(m).map(|(&a, &b)| Complex64::new(a, b)));
        }
        ComplexMatrix::from_vec(rows, cols, data)
    }

    fn to_square(&self, dim: usize, what: &str) -> Result<ComplexMatrix> {
        let m = self.to_matrix()?;
        if m.rows() != dim || m.cols() != dim {
            return Err(Error::Schema(format!(
                "{what} is {}x{}, expected {dim}x{dim}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(m)
    }
}

impl StateJson {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let m = MatrixJson::from_matrix(rho.matrix());
        Self {
            dims: rho.dims().to_vec(),
            re: m.re,
            im: m.im,
        }
    }

    /// Schema errors for malformed shapes, invariant errors for invalid states.
    pub fn to_state(&self) -> Result<DensityMatrix> {
        let total: usize = self.dims.iter().product();
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::Schema(format!("invalid dims {:?}", self.dims)));
        }
        let m = MatrixJson {
            re: self.re.clone(),
            im: self.im.clone(),
        }
        .to_square(total, "state matrix")?;
        DensityMatrix::new(self.dims.clone(), m)
    }
}

impl PovmJson {
    pub fn from_povm(povm: &Povm) -> Self {
        Self {
            dim: povm.dim(),
            elements: povm
                .elements()
                .iter()
                .map(MatrixJson::from_matrix)
                .collect(),
        }
    }

    pub fn to_povm(&self) -> Result<Povm> {
        if self.elements.is_empty() {
            return Err(Error::Schema("POVM has no elements".into()));
        }
        let elements = self
            .elements
            .iter()
            .map(|e| e.to_square(self.dim, "POVM element"))
            .collect::<Result<Vec<_>>>()?;
        Povm::new(elements)
    }
}

impl ChannelJson {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        Self {
            d_in: ch.d_in(),
            d_out: ch.d_out(),
            kraus: ch.kraus().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_channel(&self) -> Result<KrausChannel> {
        let mut kraus = Vec::with_capacity(self.kraus.len());
        for k in &self.kraus {
            let m = k.to_matrix()?;
            if m.rows() != self.d_out || m.cols() != self.d_in {
                return Err(Error::Schema(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    self.d_out,
                    self.d_in
                )));
            }
            kraus.push(m);
        }
        if kraus.is_empty() {
            return Err(Error::Schema("channel has no Kraus operators".into()));
        }
        KrausChannel::new(kraus)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateJson::from_state(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        StateJson::deserialize(d)?
            .to_state()
            .map_err(serde::de::Error::custom)
    }
}

impl Serialize for Povm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PovmJson::from_povm(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Povm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        PovmJson::deserialize(d)?
            .to_povm()
            .map_err(serde::de::Error::custom)
    }
}

fn parse_schema<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}

pub fn state_from_str(text: &str) -> Result<DensityMatrix> {
    parse_schema::<StateJson>(text)?.to_state()
}

pub fn povm_from_str(text: &str) -> Result<Povm> {
    parse_schema::<PovmJson>(text)?.to_povm()
}

pub fn channel_from_str(text: &str) -> Result<KrausChannel> {
    parse_schema::<ChannelJson>(text)?.to_channel()
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    state_from_str(&fs::read_to_string(path)?)
}

pub fn read_povm(path: &Path) -> Result<Povm> {
    povm_from_str(&fs::read_to_string(path)?)
}

pub fn state_to_string(rho: &DensityMatrix) -> String {
    to_pretty_json(&StateJson::from_state(rho))
}

pub fn povm_to_string(povm: &Povm) -> String {
    to_pretty_json(&PovmJson::from_povm(povm))
}

pub fn channel_to_string(ch: &KrausChannel) -> String {
    to_pretty_json(&ChannelJson::from_channel(ch))
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory JSON serialization");
    s.push('\n');
    s
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run never leaves a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub const SWEEP_CSV_HEADER: &str = "q,discord";

/// `q,discord` rows; floats use Rust's shortest round-trip formatting.
pub fn sweep_csv(q: &[f64], discord: &[f64]) -> String {
    let mut out = String::with_capacity(32 * (q.len() + 1));
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for (a, b) in q.iter().zip(discord) {
        out.push_str(&format!("{a},{b}\n"));
    }
    out
}

/// Parses a sweep CSV, enforcing the header and strictly increasing `q`.
pub fn parse_sweep_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = text.split('\n');
    match lines.next() {
        Some(SWEEP_CSV_HEADER) => {}
        other => {
            return Err(Error::Schema(format!(
                "expected header `{SWEEP_CSV_HEADER}`, got {other:?}"
            )))
        }
    }
    let (mut qs, mut ds) = (Vec::new(), Vec::new());
    for (n, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::Schema(format!("row {}: expected two columns", n + 1)))?;
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Schema(format!("row {}: {e}", n + 1)))
        };
        let (q, d) = (parse(a)?, parse(b)?);
        if qs.last().is_some_and(|&prev| q <= prev) {
            return Err(Error::Schema(format!(
                "row {}: q not strictly increasing",
                n + 1
            )));
        }
        qs.push(q);
        ds.push(d);
    }
    Ok((qs, ds))
}
