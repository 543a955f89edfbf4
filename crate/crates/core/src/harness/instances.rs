//! Named channel pairs shipped with the tool.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::qobjects::{CQChannel, Channel, DensityMatrix};

use super::io::{ChannelSpec, PairSpec};

fn single_entry(row: usize, col: usize, v: f64) -> CMatrix {
    let mut k = CMatrix::zeros(2, 2);
    k[(row, col)] = c(v);
    k
}

fn example1_kraus() -> (Vec<CMatrix>, Vec<CMatrix>) {
    (
        vec![
            single_entry(0, 0, 1.0),
            single_entry(0, 1, FRAC_1_SQRT_2),
            single_entry(1, 1, FRAC_1_SQRT_2),
        ],
        vec![
            single_entry(0, 0, FRAC_1_SQRT_2),
            single_entry(1, 0, FRAC_1_SQRT_2),
            single_entry(1, 1, 1.0),
        ],
    )
}

/// `N1(ρ) = ⟨0|ρ|0⟩ |0⟩⟨0| + ½⟨1|ρ|1⟩ I`, `N2(ρ) = ½⟨0|ρ|0⟩ I + ⟨1|ρ|1⟩ |1⟩⟨1|`.
pub fn example1_channels() -> (Channel, Channel) {
    let (k1, k2) = example1_kraus();
    (
        Channel::from_kraus(k1).expect("complete Kraus set"),
        Channel::from_kraus(k2).expect("complete Kraus set"),
    )
}

/// `W1: 0 ↦ |0⟩⟨0|, 1 ↦ I/2` and `W2: 0 ↦ I/2, 1 ↦ |1⟩⟨1|`.
pub fn example1_cq_channels() -> (CQChannel, CQChannel) {
    let z0 = DensityMatrix::basis_state(2, 0);
    let z1 = DensityMatrix::basis_state(2, 1);
    let mm = DensityMatrix::maximally_mixed(2);
    (
        CQChannel::with_indexed_alphabet(vec![z0, mm.clone()]).expect("valid outputs"),
        CQChannel::with_indexed_alphabet(vec![mm, z1]).expect("valid outputs"),
    )
}

/// Classical measure-and-prepare pair with diagonal outputs
/// `(diag(.8,.2), diag(.6,.4))` versus `(diag(.3,.7), diag(.1,.9))`; the output hulls are disjoint.
pub fn classical_eb_cq() -> (CQChannel, CQChannel) {
    let d = |a: f64| DensityMatrix::from_diag(&[a, 1.0 - a]).expect("probability vector");
    (
        CQChannel::with_indexed_alphabet(vec![d(0.8), d(0.6)]).expect("valid outputs"),
        CQChannel::with_indexed_alphabet(vec![d(0.3), d(0.1)]).expect("valid outputs"),
    )
}

pub fn classical_eb_channels() -> (Channel, Channel) {
    let (w1, w2) = classical_eb_cq();
    (w1.to_eb_channel(false), w2.to_eb_channel(false))
}

/// Qubit-input channels that ignore their input: `diag(.5,.5)` versus `diag(.9,.1)`.
pub fn constant_channels() -> (Channel, Channel) {
    let t1 = DensityMatrix::from_diag(&[0.5, 0.5]).expect("probability vector");
    let t2 = DensityMatrix::from_diag(&[0.9, 0.1]).expect("probability vector");
    (Channel::constant(&t1, 2), Channel::constant(&t2, 2))
}

pub const INSTANCE_NAMES: [&str; 4] = ["example1", "example1-cq", "classical-eb", "constant"];

/// Serialized form of a named instance.
pub fn instance_spec(name: &str) -> Result<PairSpec> {
    match name {
        "example1" => {
            let (k1, k2) = example1_kraus();
            Ok(PairSpec {
                first: ChannelSpec::kraus(2, 2, &k1),
                second: ChannelSpec::kraus(2, 2, &k2),
            })
        }
        "example1-cq" => {
            let (w1, w2) = example1_cq_channels();
            Ok(PairSpec {
                first: ChannelSpec::cq(&w1),
                second: ChannelSpec::cq(&w2),
            })
        }
        "classical-eb" => {
            let (w1, w2) = classical_eb_cq();
            let basis = crate::linalg::CMatrix::identity(2, 2);
            Ok(PairSpec {
                first: ChannelSpec::eb(&basis, &w1),
                second: ChannelSpec::eb(&basis, &w2),
            })
        }
        "constant" => {
            let (n1, n2) = constant_channels();
            Ok(PairSpec {
                first: ChannelSpec::kraus(2, 2, n1.kraus()),
                second: ChannelSpec::kraus(2, 2, n2.kraus()),
            })
        }
        other => Err(Error::validation(format!(
            "unknown instance {other:?}; known: {}",
            INSTANCE_NAMES.join(", ")
        ))),
    }
}
