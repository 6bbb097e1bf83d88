use serde::{Deserialize, Serialize};

use super::Mesh;
use crate::error::{Error, Result};

/// Which vertices a [`ScalarField`] lives on.
///
/// `Boundary` means the vertices of D0-tagged boundary facets; `Interior` is
/// its complement (so DM-only vertices count as interior).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    All,
    Interior,
    Boundary,
}

/// Nodal samples on a subset of mesh vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    support: Support,
    vertices: Vec<usize>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(mesh: &Mesh, support: Support, values: Vec<f64>) -> Result<Self> {
        let vertices = mesh.support_vertices(support);
        if vertices.len() != values.len() {
            return Err(Error::Field(format!(
                "{:?} field needs {} values, got {}",
                support,
                vertices.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Field(format!("non-finite value at vertex {}", vertices[i])));
        }
        Ok(Self { support, vertices, values })
    }

    pub fn from_fn(mesh: &Mesh, support: Support, mut f: impl FnMut(usize, [f64; 3]) -> f64) -> Result<Self> {
        let values = mesh.support_vertices(support).into_iter().map(|i| f(i, mesh.vertex(i))).collect();
        Self::new(mesh, support, values)
    }

    pub fn constant(mesh: &Mesh, support: Support, c: f64) -> Result<Self> {
        Self::from_fn(mesh, support, |_, _| c)
    }

    /// Restricts a full-length nodal vector to `support`.
    pub fn from_dense(mesh: &Mesh, support: Support, dense: &[f64]) -> Result<Self> {
        if dense.len() != mesh.num_vertices() {
            return Err(Error::Field(format!(
                "dense vector has length {}, mesh has {} vertices",
                dense.len(),
                mesh.num_vertices()
            )));
        }
        Self::from_fn(mesh, support, |i, _| dense[i])
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.vertices.iter().copied().zip(self.values.iter().copied())
    }

    /// Full-length nodal vector with zeros off the support.
    pub fn to_dense(&self, num_vertices: usize) -> Vec<f64> {
        let mut out = vec![0.0; num_vertices];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { support: self.support, vertices: self.vertices.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// `vertex_index,value` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["vertex_index", "value"]).expect("in-memory write");
        for (i, v) in self.iter() {
            w.write_record([i.to_string(), format!("{v:e}")]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    /// Parses `vertex_index,value` rows; the listed vertices must be exactly
    /// the support set of `support` on `mesh`.
    pub fn from_csv(mesh: &Mesh, support: Support, text: &str) -> Result<Self> {
        let expected = mesh.support_vertices(support);
        let mut slot = vec![usize::MAX; mesh.num_vertices()];
        for (k, &i) in expected.iter().enumerate() {
            slot[i] = k;
        }
        let mut values = vec![f64::NAN; expected.len()];
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
        for (row, record) in reader.records().enumerate() {
            let line = row + 2;
            let parse_err = |msg: &str| Error::Parse { line, msg: msg.to_string() };
            let record = record.map_err(|e| parse_err(&e.to_string()))?;
            if record.len() != 2 {
                return Err(parse_err("expected `vertex_index,value`"));
            }
            let i: usize = record[0].parse().map_err(|_| parse_err("bad vertex index"))?;
            let v: f64 = record[1].parse().map_err(|_| parse_err("bad value"))?;
            let k = *slot.get(i).filter(|&&k| k != usize::MAX).ok_or_else(|| parse_err("vertex outside support"))?;
            values[k] = v;
        }
        if let Some(k) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::Field(format!("missing value for vertex {}", expected[k])));
        }
        Self::new(mesh, support, values)
    }
}
