//! JSON channel and state files.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major arrays of rows.

use std::path::Path;

use indexmap::IndexMap;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::qobjects::{CQChannel, Channel, DensityMatrix};

pub type ComplexJson = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexJson>>;
pub type VectorJson = Vec<ComplexJson>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecKind {
    Kraus,
    Eb,
    Cq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ChannelSpec {
    pub kind: SpecKind,
    pub in_dim: usize,
    pub out_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<VectorJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<IndexMap<String, MatrixJson>>,
}

/// A validated channel from a spec file.
#[derive(Clone, Debug)]
pub enum ChannelModel {
    Quantum(Channel),
    Classical(CQChannel),
}

/// Two channels to be discriminated; the file form is `{"first": …, "second": …}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub first: ChannelSpec,
    pub second: ChannelSpec,
}

#[derive(Clone, Debug)]
pub enum PairModel {
    Quantum(Channel, Channel),
    Classical(CQChannel, CQChannel),
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(m: &MatrixJson, rows: usize, cols: usize, what: &str) -> Result<CMatrix> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(Error::validation(format!("{what} must be {rows}×{cols}")));
    }
    if m.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::validation(format!("{what} has a non-finite entry")));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| Complex64::new(m[i][j][0], m[i][j][1])))
}

fn vector_from_json(v: &VectorJson, dim: usize, what: &str) -> Result<CVector> {
    if v.len() != dim {
        return Err(Error::validation(format!("{what} must have length {dim}")));
    }
    Ok(CVector::from_fn(dim, |i, _| Complex64::new(v[i][0], v[i][1])))
}

impl ChannelSpec {
    pub fn kraus(in_dim: usize, out_dim: usize, kraus: &[CMatrix]) -> Self {
        ChannelSpec {
            kind: SpecKind::Kraus,
            in_dim,
            out_dim,
            kraus: Some(kraus.iter().map(matrix_to_json).collect()),
            alphabet: None,
            basis: None,
            outputs: None,
        }
    }

    fn outputs_of(w: &CQChannel) -> IndexMap<String, MatrixJson> {
        w.alphabet()
            .iter()
            .zip(w.outputs())
            .map(|(s, o)| (s.clone(), matrix_to_json(o.as_hermitian().matrix())))
            .collect()
    }

    pub fn cq(w: &CQChannel) -> Self {
        ChannelSpec {
            kind: SpecKind::Cq,
            in_dim: w.len(),
            out_dim: w.output_dim(),
            kraus: None,
            alphabet: Some(w.alphabet().to_vec()),
            basis: None,
            outputs: Some(Self::outputs_of(w)),
        }
    }

    /// Measure in the columns of `basis`, prepare the output of the matching symbol of `w`.
    pub fn eb(basis: &CMatrix, w: &CQChannel) -> Self {
        let basis_json = (0..basis.ncols())
            .map(|j| basis.column(j).iter().map(|z| [z.re, z.im]).collect())
            .collect();
        ChannelSpec {
            kind: SpecKind::Eb,
            in_dim: basis.nrows(),
            out_dim: w.output_dim(),
            kraus: None,
            alphabet: Some(w.alphabet().to_vec()),
            basis: Some(basis_json),
            outputs: Some(Self::outputs_of(w)),
        }
    }

    fn load_outputs(&self) -> Result<CQChannel> {
        let alphabet = self
            .alphabet
            .clone()
            .ok_or_else(|| Error::validation("missing \"alphabet\""))?;
        let outputs = self
            .outputs
            .as_ref()
            .ok_or_else(|| Error::validation("missing \"outputs\""))?;
        if outputs.len() != alphabet.len() || outputs.keys().zip(&alphabet).any(|(k, a)| k != a) {
            return Err(Error::validation("\"outputs\" keys must list the alphabet in order"));
        }
        let states = outputs
            .iter()
            .map(|(sym, m)| {
                let what = format!("output for symbol {sym:?}");
                DensityMatrix::from_matrix(matrix_from_json(m, self.out_dim, self.out_dim, &what)?)
            })
            .collect::<Result<Vec<_>>>()?;
        CQChannel::new(alphabet, states)
    }

    pub fn load(&self) -> Result<ChannelModel> {
        if self.in_dim == 0 || self.out_dim == 0 {
            return Err(Error::validation("dimensions must be positive"));
        }
        match self.kind {
            SpecKind::Kraus => {
                let kraus = self
                    .kraus
                    .as_ref()
                    .ok_or_else(|| Error::validation("missing \"kraus\""))?;
                if kraus.is_empty() {
                    return Err(Error::validation("empty Kraus list"));
                }
                let ops = kraus
                    .iter()
                    .map(|k| matrix_from_json(k, self.out_dim, self.in_dim, "Kraus operator"))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ChannelModel::Quantum(Channel::from_kraus(ops)?))
            }
            SpecKind::Cq => {
                let w = self.load_outputs()?;
                if w.len() != self.in_dim {
                    return Err(Error::validation("for CQ channels inDim is the alphabet size"));
                }
                Ok(ChannelModel::Classical(w))
            }
            SpecKind::Eb => {
                let w = self.load_outputs()?;
                let basis = self
                    .basis
                    .as_ref()
                    .ok_or_else(|| Error::validation("missing \"basis\""))?
                    .iter()
                    .map(|v| vector_from_json(v, self.in_dim, "basis vector"))
                    .collect::<Result<Vec<_>>>()?;
                if basis.len() != w.len() {
                    return Err(Error::validation("one basis vector per alphabet symbol is required"));
                }
                Ok(ChannelModel::Quantum(Channel::entanglement_breaking(&basis, w.outputs())?))
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl PairSpec {
    pub fn load(&self) -> Result<PairModel> {
        match (self.first.load()?, self.second.load()?) {
            (ChannelModel::Quantum(a), ChannelModel::Quantum(b)) => Ok(PairModel::Quantum(a, b)),
            (ChannelModel::Classical(a), ChannelModel::Classical(b)) => Ok(PairModel::Classical(a, b)),
            _ => Err(Error::validation(
                "a pair must be two quantum (kraus/eb) channels or two CQ channels",
            )),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// A state file holds a bare square matrix.
pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    let m: MatrixJson = serde_json::from_str(text)?;
    let d = m.len();
    if d == 0 {
        return Err(Error::validation("empty state matrix"));
    }
    DensityMatrix::from_matrix(matrix_from_json(&m, d, d, "state")?)
}

pub fn read_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    state_from_json(&std::fs::read_to_string(path)?)
}

pub fn state_to_json(rho: &DensityMatrix) -> Result<String> {
    Ok(serde_json::to_string(&matrix_to_json(rho.as_hermitian().matrix()))?)
}

#[cfg(test)]
mod tests {
    use super::super::instances::{instance_spec, INSTANCE_NAMES};
    use super::*;

    #[test]
    fn shipped_instances_round_trip_byte_identical() {
        for name in INSTANCE_NAMES {
            let first = instance_spec(name).unwrap().to_json().unwrap();
            let again = PairSpec::from_json(&first).unwrap().to_json().unwrap();
            assert_eq!(first, again, "{name}");
        }
    }

    #[test]
    fn loaded_instances_revalidate() {
        for name in INSTANCE_NAMES {
            let spec = instance_spec(name).unwrap();
            let text = spec.to_json().unwrap();
            let back = PairSpec::from_json(&text).unwrap();
            assert_eq!(spec, back);
            back.load().unwrap();
        }
    }

    #[test]
    fn outputs_keep_declaration_order() {
        let text = r#"{"kind":"cq","inDim":2,"outDim":1,"alphabet":["b","a"],
            "outputs":{"b":[[[1,0]]],"a":[[[1,0]]]}}"#;
        let spec = ChannelSpec::from_json(text).unwrap();
        let ChannelModel::Classical(w) = spec.load().unwrap() else { panic!() };
        assert_eq!(w.alphabet(), ["b", "a"]);
        assert!(spec.to_json().unwrap().find("\"b\"").unwrap() < spec.to_json().unwrap().find("\"a\"").unwrap());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let bad_kraus = r#"{"kind":"kraus","inDim":2,"outDim":2,"kraus":[[[[1,0],[0,0]],[[0,0],[0,0]]]]}"#;
        assert!(matches!(ChannelSpec::from_json(bad_kraus).unwrap().load(), Err(Error::Validation(_))));
        let wrong_shape = r#"{"kind":"kraus","inDim":2,"outDim":2,"kraus":[[[[1,0]]]]}"#;
        assert!(ChannelSpec::from_json(wrong_shape).unwrap().load().is_err());
        let missing = r#"{"kind":"cq","inDim":1,"outDim":1}"#;
        assert!(ChannelSpec::from_json(missing).unwrap().load().is_err());
        let unknown = r#"{"kind":"cq","inDim":1,"outDim":1,"extra":1}"#;
        assert!(matches!(ChannelSpec::from_json(unknown), Err(Error::Json(_))));
        let not_state = r#"{"kind":"cq","inDim":1,"outDim":1,"alphabet":["0"],"outputs":{"0":[[[2,0]]]}}"#;
        assert!(ChannelSpec::from_json(not_state).unwrap().load().is_err());
    }

    #[test]
    fn mixed_pair_is_rejected() {
        let q = instance_spec("example1").unwrap();
        let c = instance_spec("example1-cq").unwrap();
        let mixed = PairSpec { first: q.first, second: c.second };
        assert!(mixed.load().is_err());
    }

    #[test]
    fn pair_files_round_trip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pair.json");
        let spec = instance_spec("classical-eb").unwrap();
        spec.write(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(PairSpec::read(&path).unwrap(), spec);
        assert_eq!(text, spec.to_json().unwrap() + "\n");
        let state = dir.path().join("state.json");
        std::fs::write(&state, "[[[1,0]]]").unwrap();
        assert_eq!(read_state(&state).unwrap().dim(), 1);
        assert!(matches!(read_state(dir.path().join("missing.json")), Err(Error::Io(_))));
    }

    #[test]
    fn state_files() {
        let rho = state_from_json("[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]").unwrap();
        assert_eq!(rho.dim(), 2);
        let back = state_from_json(&state_to_json(&rho).unwrap()).unwrap();
        assert_eq!(back.as_hermitian().matrix(), rho.as_hermitian().matrix());
        assert!(state_from_json("[[[1,0],[0,0]],[[0,0],[1,0]]]").is_err());
        assert!(state_from_json("[]").is_err());
    }
}
