//! Density matrices, Kraus-form channels, classical-quantum channels and
//! distributions over finite alphabets.

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{c, eigh, kron, kron_power, CMatrix, CVector, HermitianMatrix, PSD_TOL, ZERO};

/// Allowed deviation of a density matrix trace from 1.
pub const TRACE_TOL: f64 = 1e-10;
/// Allowed Frobenius defect of `Σ K†K − I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Allowed deviation of probability weights from summing to 1.
pub const PROB_TOL: f64 = 1e-12;

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    pub fn new(m: HermitianMatrix) -> Result<Self> {
        let min = eigh(&m).min();
        if min < -PSD_TOL {
            return Err(Error::validation(format!(
                "not a density matrix: negative eigenvalue {min:e}"
            )));
        }
        let t = m.trace();
        if (t - 1.0).abs() > TRACE_TOL {
            return Err(Error::validation(format!(
                "not a density matrix: trace {t} differs from 1"
            )));
        }
        Ok(DensityMatrix(m))
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    pub fn from_diag(p: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diag(p))
    }

    /// Wraps a matrix that is a state by construction (channel outputs, mixtures).
    pub(crate) fn from_hermitian_unchecked(m: HermitianMatrix) -> Self {
        DensityMatrix(m)
    }

    /// `|i⟩⟨i|` in dimension `d`.
    pub fn basis_state(d: usize, i: usize) -> Self {
        let mut p = vec![0.0; d];
        p[i] = 1.0;
        DensityMatrix(HermitianMatrix::from_real_diag(&p))
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn pure(v: &CVector) -> Result<Self> {
        let n2 = v.norm_squared();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::validation("pure state from a zero vector"));
        }
        Ok(DensityMatrix(HermitianMatrix::projector(v).scaled(1.0 / n2)))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix(HermitianMatrix::identity(d).scaled(1.0 / d as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.0
    }

    /// `(1 − t)·self + t·other`.
    pub fn mix(&self, other: &DensityMatrix, t: f64) -> DensityMatrix {
        DensityMatrix(&self.0.scaled(1.0 - t) + &other.0.scaled(t))
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix(kron(&self.0, &other.0))
    }

    pub fn kron_power(&self, n: usize) -> DensityMatrix {
        DensityMatrix(kron_power(&self.0, n))
    }

    /// Trace distance `½‖self − other‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        0.5 * crate::linalg::trace_norm(&(&self.0 - &other.0))
    }
}

/// Completely positive trace-preserving map in Kraus form.
#[derive(Clone, Debug)]
pub struct Channel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<CMatrix>,
    kraus_adj: Vec<CMatrix>,
}

impl Channel {
    /// Validates shapes and the completeness relation `Σ K†K = I`.
    pub fn from_kraus(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::validation("empty Kraus set"))?;
        let (out_dim, in_dim) = first.shape();
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::validation("Kraus operator with a zero dimension"));
        }
        for k in &kraus {
            if k.shape() != (out_dim, in_dim) {
                return Err(Error::validation(format!(
                    "inconsistent Kraus shapes: {:?} vs {:?}",
                    k.shape(),
                    (out_dim, in_dim)
                )));
            }
        }
        let kraus_adj: Vec<CMatrix> = kraus.iter().map(|k| k.adjoint()).collect();
        let mut sum = CMatrix::zeros(in_dim, in_dim);
        for (k, ka) in kraus.iter().zip(&kraus_adj) {
            sum += ka * k;
        }
        let defect = (sum - CMatrix::identity(in_dim, in_dim)).norm();
        if defect > COMPLETENESS_TOL {
            return Err(Error::validation(format!(
                "Kraus set is not trace preserving: |Σ K†K − I|_F = {defect:e}"
            )));
        }
        Ok(Channel {
            in_dim,
            out_dim,
            kraus,
            kraus_adj,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self::from_kraus(vec![CMatrix::identity(d, d)]).expect("identity is complete")
    }

    /// The replacement channel `ρ ↦ τ` on an `in_dim`-dimensional input.
    pub fn constant(tau: &DensityMatrix, in_dim: usize) -> Self {
        let basis: Vec<CVector> = (0..in_dim).map(|i| unit(in_dim, i)).collect();
        let outputs = vec![tau.clone(); in_dim];
        Self::entanglement_breaking(&basis, &outputs).expect("constant channel is valid")
    }

    /// Completely dephasing channel in the computational basis.
    pub fn dephasing(d: usize) -> Self {
        let kraus = (0..d)
            .map(|i| {
                let mut k = CMatrix::zeros(d, d);
                k[(i, i)] = c(1.0);
                k
            })
            .collect();
        Self::from_kraus(kraus).expect("projectors are complete")
    }

    /// Measure-and-prepare channel `ρ ↦ Σ_x ⟨v_x|ρ|v_x⟩ ρ_x` for an orthonormal basis `{v_x}`.
    pub fn entanglement_breaking(basis: &[CVector], outputs: &[DensityMatrix]) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::validation("empty measurement basis"));
        }
        if basis.len() != outputs.len() {
            return Err(Error::validation(format!(
                "{} basis vectors but {} outputs",
                basis.len(),
                outputs.len()
            )));
        }
        let in_dim = basis[0].len();
        for v in basis {
            ensure_dim(in_dim, v.len())?;
        }
        for (i, vi) in basis.iter().enumerate() {
            for (j, vj) in basis.iter().enumerate() {
                let g = vi.dotc(vj);
                let expected = if i == j { 1.0 } else { 0.0 };
                if (g - c(expected)).norm() > 1e-10 {
                    return Err(Error::validation(format!(
                        "measurement basis is not orthonormal: ⟨v_{i}|v_{j}⟩ = {g}"
                    )));
                }
            }
        }
        let out_dim = outputs[0].dim();
        let mut kraus = Vec::new();
        for (v, rho) in basis.iter().zip(outputs) {
            ensure_dim(out_dim, rho.dim())?;
            let spec = eigh(rho.as_hermitian());
            let clip = spec.clip_threshold();
            for (i, &mu) in spec.eigenvalues.iter().enumerate() {
                if mu > clip {
                    let e = spec.eigenvector(i) * c(mu.sqrt());
                    kraus.push(e * v.adjoint());
                }
            }
        }
        Self::from_kraus(kraus)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix(self.apply_operator(rho.as_hermitian())?))
    }

    /// Linear extension `X ↦ Σ K X K†` to any Hermitian input.
    pub fn apply_operator(&self, x: &HermitianMatrix) -> Result<HermitianMatrix> {
        ensure_dim(self.in_dim, x.dim())?;
        let mut out = CMatrix::zeros(self.out_dim, self.out_dim);
        for (k, ka) in self.kraus.iter().zip(&self.kraus_adj) {
            out += k * x.matrix() * ka;
        }
        Ok(HermitianMatrix::from_raw(out))
    }

    /// Heisenberg-picture map `A ↦ Σ K† A K`.
    pub fn adjoint_apply(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        ensure_dim(self.out_dim, a.dim())?;
        let mut out = CMatrix::zeros(self.in_dim, self.in_dim);
        for (k, ka) in self.kraus.iter().zip(&self.kraus_adj) {
            out += ka * a.matrix() * k;
        }
        Ok(HermitianMatrix::from_raw(out))
    }

    pub fn tensor(&self, other: &Channel) -> Channel {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kronecker(b));
            }
        }
        let kraus_adj = kraus.iter().map(|k| k.adjoint()).collect();
        Channel {
            in_dim: self.in_dim * other.in_dim,
            out_dim: self.out_dim * other.out_dim,
            kraus,
            kraus_adj,
        }
    }

    pub fn tensor_power(&self, n: usize) -> Channel {
        assert!(n >= 1, "tensor power needs at least one factor");
        let mut out = self.clone();
        for _ in 1..n {
            out = out.tensor(self);
        }
        out
    }
}

pub(crate) fn unit(d: usize, i: usize) -> CVector {
    let mut v = CVector::from_element(d, ZERO);
    v[i] = c(1.0);
    v
}

/// Probability distribution over an ordered alphabet of opaque symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbDist {
    alphabet: Vec<String>,
    weights: Vec<f64>,
}

impl ProbDist {
    pub fn new(alphabet: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::validation("empty alphabet"));
        }
        ensure_dim(alphabet.len(), weights.len())?;
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
            return Err(Error::validation(format!("negative or NaN weight {w}")));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > PROB_TOL {
            return Err(Error::validation(format!("weights sum to {s}, not 1")));
        }
        Ok(ProbDist { alphabet, weights })
    }

    /// Clamps tiny negatives and renormalizes; for optimizer iterates.
    pub(crate) fn from_weights_normalized(alphabet: Vec<String>, weights: Vec<f64>) -> Self {
        let clamped: Vec<f64> = weights.into_iter().map(|w| w.max(0.0)).collect();
        let s: f64 = clamped.iter().sum();
        ProbDist {
            alphabet,
            weights: clamped.into_iter().map(|w| w / s).collect(),
        }
    }

    pub fn point_mass(alphabet: Vec<String>, index: usize) -> Self {
        let mut weights = vec![0.0; alphabet.len()];
        weights[index] = 1.0;
        ProbDist { alphabet, weights }
    }

    pub fn uniform(alphabet: Vec<String>) -> Self {
        let n = alphabet.len();
        ProbDist {
            alphabet,
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Classical-quantum channel `x ↦ ρ_x` over an ordered alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct CQChannel {
    alphabet: Vec<String>,
    outputs: Vec<DensityMatrix>,
}

impl CQChannel {
    pub fn new(alphabet: Vec<String>, outputs: Vec<DensityMatrix>) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::validation("CQ channel with an empty alphabet"));
        }
        if alphabet.len() != outputs.len() {
            return Err(Error::validation(format!(
                "{} symbols but {} outputs",
                alphabet.len(),
                outputs.len()
            )));
        }
        for (i, s) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(s) {
                return Err(Error::validation(format!("duplicate symbol {s:?}")));
            }
        }
        let d = outputs[0].dim();
        for o in &outputs {
            ensure_dim(d, o.dim())?;
        }
        Ok(CQChannel { alphabet, outputs })
    }

    /// Symbols `"0", "1", …` in order.
    pub fn with_indexed_alphabet(outputs: Vec<DensityMatrix>) -> Result<Self> {
        let alphabet = (0..outputs.len()).map(|i| i.to_string()).collect();
        Self::new(alphabet, outputs)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn outputs(&self) -> &[DensityMatrix] {
        &self.outputs
    }

    pub fn output(&self, index: usize) -> &DensityMatrix {
        &self.outputs[index]
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    pub fn output_dim(&self) -> usize {
        self.outputs[0].dim()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.alphabet.iter().position(|s| s == symbol)
    }

    fn check_alphabet(&self, p: &ProbDist) -> Result<()> {
        if p.alphabet() != self.alphabet.as_slice() {
            return Err(Error::validation(format!(
                "alphabet mismatch: distribution over {:?}, channel over {:?}",
                p.alphabet(),
                self.alphabet
            )));
        }
        Ok(())
    }

    /// `Σ_x p(x) ρ_x`.
    pub fn apply(&self, p: &ProbDist) -> Result<DensityMatrix> {
        self.check_alphabet(p)?;
        Ok(self.mixture(p.weights()))
    }

    pub(crate) fn mixture(&self, weights: &[f64]) -> DensityMatrix {
        let mut acc = HermitianMatrix::zeros(self.output_dim());
        for (w, o) in weights.iter().zip(&self.outputs) {
            if *w != 0.0 {
                acc = &acc + &o.as_hermitian().scaled(*w);
            }
        }
        DensityMatrix(acc)
    }

    /// Block-diagonal state `Σ_x p(x) |x⟩⟨x| ⊗ ρ_x` on dimension `|X|·d`.
    pub fn effective_apply(&self, p: &ProbDist) -> Result<DensityMatrix> {
        self.check_alphabet(p)?;
        let n = self.len();
        let mut acc = HermitianMatrix::zeros(n * self.output_dim());
        for (x, (w, o)) in p.weights().iter().zip(&self.outputs).enumerate() {
            if *w != 0.0 {
                let reg = DensityMatrix::basis_state(n, x);
                acc = &acc + &kron(reg.as_hermitian(), o.as_hermitian()).scaled(*w);
            }
        }
        Ok(DensityMatrix(acc))
    }

    /// The measure-and-prepare channel that reads `x` in the computational basis.
    /// With `keep_register` the symbol is also copied to a classical output register.
    pub fn to_eb_channel(&self, keep_register: bool) -> Channel {
        let n = self.len();
        let basis: Vec<CVector> = (0..n).map(|x| unit(n, x)).collect();
        let outputs: Vec<DensityMatrix> = if keep_register {
            (0..n)
                .map(|x| DensityMatrix::basis_state(n, x).kron(&self.outputs[x]))
                .collect()
        } else {
            self.outputs.clone()
        };
        Channel::entanglement_breaking(&basis, &outputs).expect("CQ outputs are valid states")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn example1_n1() -> Channel {
        let mut k0 = CMatrix::zeros(2, 2);
        k0[(0, 0)] = c(1.0);
        let mut k1 = CMatrix::zeros(2, 2);
        k1[(0, 1)] = c(FRAC_1_SQRT_2);
        let mut k2 = CMatrix::zeros(2, 2);
        k2[(1, 1)] = c(FRAC_1_SQRT_2);
        Channel::from_kraus(vec![k0, k1, k2]).unwrap()
    }

    fn alphabet2() -> Vec<String> {
        vec!["0".into(), "1".into()]
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::from_diag(&[0.5, 0.5]).is_ok());
        assert!(DensityMatrix::from_diag(&[0.7, 0.3]).is_ok());
        let err = DensityMatrix::from_diag(&[1.1, -0.1]).unwrap_err();
        assert!(err.to_string().contains("negative eigenvalue"));
        assert!(DensityMatrix::from_diag(&[0.5, 0.6]).is_err());
    }

    #[test]
    fn kraus_validation() {
        assert!(Channel::from_kraus(vec![CMatrix::identity(2, 2)]).is_ok());
        let n1 = example1_n1();
        assert_eq!((n1.in_dim(), n1.out_dim()), (2, 2));
        let mut k0 = CMatrix::zeros(2, 2);
        k0[(0, 0)] = c(1.0);
        let err = Channel::from_kraus(vec![k0]).unwrap_err();
        assert!(err.to_string().contains("|Σ K†K − I|_F = 1e0"), "{err}");
        assert!(Channel::from_kraus(vec![]).is_err());
        assert!(
            Channel::from_kraus(vec![CMatrix::identity(2, 2), CMatrix::zeros(3, 2)]).is_err()
        );
    }

    #[test]
    fn apply_examples() {
        let mut rng = seeded(10);
        let rho = random_state(3, &mut rng);
        let id = Channel::identity(3);
        assert!(id.apply(&rho).unwrap().as_hermitian().distance(rho.as_hermitian()) < 1e-14);

        let out = example1_n1()
            .apply(&DensityMatrix::basis_state(2, 1))
            .unwrap();
        assert!(out.as_hermitian().distance(DensityMatrix::maximally_mixed(2).as_hermitian()) < 1e-15);
        assert!(matches!(
            id.apply(&DensityMatrix::maximally_mixed(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn adjoint_examples() {
        let mut rng = seeded(11);
        let ch = random_channel(2, 3, 2, &mut rng);
        let unital = ch.adjoint_apply(&HermitianMatrix::identity(3)).unwrap();
        assert!(unital.distance(&HermitianMatrix::identity(2)) < 1e-12);
        let a = random_hermitian(3, &mut rng);
        let rho = random_state(2, &mut rng);
        let lhs = a.inner(ch.apply(&rho).unwrap().as_hermitian());
        let rhs = ch.adjoint_apply(&a).unwrap().inner(rho.as_hermitian());
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
        let b = random_hermitian(2, &mut rng);
        assert!(Channel::identity(2).adjoint_apply(&b).unwrap().distance(&b) < 1e-15);
    }

    #[test]
    fn tensor_examples() {
        let id2 = Channel::identity(2).tensor(&Channel::identity(2));
        assert_eq!(id2.in_dim(), 4);
        let mut rng = seeded(12);
        let rho = random_state(4, &mut rng);
        assert!(id2.apply(&rho).unwrap().as_hermitian().distance(rho.as_hermitian()) < 1e-14);

        let n = random_channel(2, 2, 3, &mut rng);
        let m = random_channel(3, 2, 2, &mut rng);
        let r = random_state(2, &mut rng);
        let t = random_state(3, &mut rng);
        let lhs = n.tensor(&m).apply(&r.kron(&t)).unwrap();
        let rhs = n.apply(&r).unwrap().kron(&m.apply(&t).unwrap());
        assert!(lhs.as_hermitian().distance(rhs.as_hermitian()) < 1e-10);

        let n1 = example1_n1();
        let out = n1
            .tensor(&n1)
            .apply(&DensityMatrix::basis_state(4, 3))
            .unwrap();
        assert!(out.as_hermitian().distance(DensityMatrix::maximally_mixed(4).as_hermitian()) < 1e-14);
    }

    #[test]
    fn eb_examples() {
        let basis = vec![unit(2, 0), unit(2, 1)];
        let deph = Channel::entanglement_breaking(
            &basis,
            &[DensityMatrix::basis_state(2, 0), DensityMatrix::basis_state(2, 1)],
        )
        .unwrap();
        let plus = DensityMatrix::pure(&CVector::from_vec(vec![c(1.0), c(1.0)])).unwrap();
        let out = deph.apply(&plus).unwrap();
        assert!(out.as_hermitian().distance(DensityMatrix::maximally_mixed(2).as_hermitian()) < 1e-15);

        let mut rng = seeded(13);
        let u = random_unitary(3, &mut rng);
        let basis3: Vec<CVector> = (0..3).map(|i| u.column(i).into_owned()).collect();
        let outs: Vec<DensityMatrix> = (0..3).map(|_| random_state(2, &mut rng)).collect();
        let eb = Channel::entanglement_breaking(&basis3, &outs).unwrap();
        for (v, o) in basis3.iter().zip(&outs) {
            let got = eb.apply(&DensityMatrix::pure(v).unwrap()).unwrap();
            assert!(got.as_hermitian().distance(o.as_hermitian()) < 1e-12);
        }

        // Example 1's first channel built as measure-and-prepare agrees with its Kraus form
        let rebuilt = Channel::entanglement_breaking(
            &basis,
            &[DensityMatrix::basis_state(2, 0), DensityMatrix::maximally_mixed(2)],
        )
        .unwrap();
        let kr = example1_n1();
        for _ in 0..20 {
            let r = random_state(2, &mut rng);
            let a = rebuilt.apply(&r).unwrap();
            let b = kr.apply(&r).unwrap();
            assert!(a.as_hermitian().distance(b.as_hermitian()) < 1e-10);
        }
    }

    #[test]
    fn eb_validation() {
        let bad = vec![unit(2, 0), CVector::from_vec(vec![c(1.0), c(1.0)])];
        let outs = vec![DensityMatrix::basis_state(2, 0); 2];
        assert!(Channel::entanglement_breaking(&bad, &outs).is_err());
        assert!(Channel::entanglement_breaking(&[unit(2, 0), unit(2, 1)], &outs[..1]).is_err());
    }

    fn example_w1() -> CQChannel {
        CQChannel::new(
            alphabet2(),
            vec![DensityMatrix::basis_state(2, 0), DensityMatrix::maximally_mixed(2)],
        )
        .unwrap()
    }

    #[test]
    fn cq_apply_examples() {
        let w = example_w1();
        let at0 = w.apply(&ProbDist::point_mass(alphabet2(), 0)).unwrap();
        assert_eq!(&at0, w.output(0));
        let deph = CQChannel::new(
            alphabet2(),
            vec![DensityMatrix::basis_state(2, 0), DensityMatrix::basis_state(2, 1)],
        )
        .unwrap();
        let u = deph.apply(&ProbDist::uniform(alphabet2())).unwrap();
        assert!(u.as_hermitian().distance(DensityMatrix::maximally_mixed(2).as_hermitian()) < 1e-15);
        let half = w.apply(&ProbDist::uniform(alphabet2())).unwrap();
        assert_eq!(half.as_hermitian().diagonal_real(), vec![0.75, 0.25]);
        let other = ProbDist::uniform(vec!["a".into(), "b".into()]);
        assert!(w.apply(&other).is_err());
    }

    #[test]
    fn cq_channel_validation() {
        assert!(CQChannel::new(vec![], vec![]).is_err());
        assert!(CQChannel::new(
            vec!["a".into(), "a".into()],
            vec![DensityMatrix::maximally_mixed(2); 2]
        )
        .is_err());
        assert!(CQChannel::new(
            alphabet2(),
            vec![DensityMatrix::maximally_mixed(2), DensityMatrix::maximally_mixed(3)]
        )
        .is_err());
        assert!(ProbDist::new(alphabet2(), vec![0.5, 0.6]).is_err());
        assert!(ProbDist::new(alphabet2(), vec![1.5, -0.5]).is_err());
    }

    fn partial_trace_register(m: &HermitianMatrix, n: usize, d: usize) -> HermitianMatrix {
        let mut out = CMatrix::zeros(d, d);
        for x in 0..n {
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] += m.matrix()[(x * d + i, x * d + j)];
                }
            }
        }
        HermitianMatrix::new(out).unwrap()
    }

    #[test]
    fn effective_apply_examples() {
        let mut rng = seeded(14);
        let alphabet: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let outs: Vec<DensityMatrix> = (0..3).map(|_| random_state(2, &mut rng)).collect();
        let w = CQChannel::new(alphabet.clone(), outs.clone()).unwrap();

        let pm = w.effective_apply(&ProbDist::point_mass(alphabet.clone(), 1)).unwrap();
        let expected = DensityMatrix::basis_state(3, 1).kron(&outs[1]);
        assert!(pm.as_hermitian().distance(expected.as_hermitian()) < 1e-15);

        let p = ProbDist::new(alphabet.clone(), random_probability(3, &mut rng)).unwrap();
        let eff = w.effective_apply(&p).unwrap();
        for x in 0..3 {
            let block: f64 = (0..2).map(|i| eff.as_hermitian().matrix()[(x * 2 + i, x * 2 + i)].re).sum();
            assert_abs_diff_eq!(block, p.weights()[x], epsilon = 1e-14);
        }
        let marginal = partial_trace_register(eff.as_hermitian(), 3, 2);
        assert!(marginal.distance(w.apply(&p).unwrap().as_hermitian()) < 1e-14);
    }

    #[test]
    fn cq_to_eb_examples() {
        let mut rng = seeded(15);
        let outs: Vec<DensityMatrix> = (0..2).map(|_| random_state(3, &mut rng)).collect();
        let w = CQChannel::with_indexed_alphabet(outs.clone()).unwrap();
        let plain = w.to_eb_channel(false);
        for x in 0..2 {
            let got = plain.apply(&DensityMatrix::basis_state(2, x)).unwrap();
            assert!(got.as_hermitian().distance(outs[x].as_hermitian()) < 1e-12);
        }
        let p = ProbDist::new(w.alphabet().to_vec(), vec![0.3, 0.7]).unwrap();
        let with_reg = w.to_eb_channel(true);
        let got = with_reg.apply(&DensityMatrix::from_diag(&[0.3, 0.7]).unwrap()).unwrap();
        let expected = w.effective_apply(&p).unwrap();
        assert!(got.as_hermitian().distance(expected.as_hermitian()) < 1e-12);

        let plus = DensityMatrix::pure(&CVector::from_vec(vec![c(1.0), c(1.0)])).unwrap();
        let got = plain.apply(&plus).unwrap();
        let avg = outs[0].mix(&outs[1], 0.5);
        assert!(got.as_hermitian().distance(avg.as_hermitian()) < 1e-12);
    }

    #[test]
    fn channel_outputs_are_states() {
        let mut rng = seeded(16);
        for i in 0..1000 {
            let din = 1 + i % 3;
            let dout = 1 + (i / 3) % 3;
            let ch = random_channel(din, dout, 1 + i % 4, &mut rng);
            let rho = random_state_rank(din, 1 + i % din, &mut rng);
            let out = ch.apply(&rho).unwrap();
            DensityMatrix::new(out.into_hermitian()).unwrap();
        }
    }

    #[test]
    fn eb_outputs_in_convex_hull() {
        // Least-squares weights of the output over {ρ_x} must be a probability vector.
        let mut rng = seeded(17);
        for _ in 0..50 {
            let outs: Vec<DensityMatrix> = (0..3).map(|_| random_state(3, &mut rng)).collect();
            let basis: Vec<CVector> = (0..3).map(|i| unit(3, i)).collect();
            let eb = Channel::entanglement_breaking(&basis, &outs).unwrap();
            let rho = random_state(3, &mut rng);
            let out = eb.apply(&rho).unwrap();
            let cols: Vec<Vec<f64>> = outs
                .iter()
                .map(|o| o.as_hermitian().matrix().iter().flat_map(|z| [z.re, z.im]).collect())
                .collect();
            let target: Vec<f64> = out.as_hermitian().matrix().iter().flat_map(|z| [z.re, z.im]).collect();
            let a = nalgebra::DMatrix::from_fn(target.len(), 3, |r, k| cols[k][r]);
            let b = nalgebra::DVector::from_vec(target);
            let w = a.clone().svd(true, true).solve(&b, 1e-14).unwrap();
            let resid = (&a * &w - &b).norm();
            assert!(resid < 1e-10);
            assert!(w.iter().all(|&x| x > -1e-9));
            assert_abs_diff_eq!(w.sum(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn measurement_absorbs_dephasing() {
        let mut rng = seeded(18);
        let outs: Vec<DensityMatrix> = (0..3).map(|_| random_state(2, &mut rng)).collect();
        let eb = CQChannel::with_indexed_alphabet(outs).unwrap().to_eb_channel(false);
        let deph = Channel::dephasing(3);
        for _ in 0..20 {
            let rho = random_state(3, &mut rng);
            let direct = eb.apply(&rho).unwrap();
            let composed = eb.apply(&deph.apply(&rho).unwrap()).unwrap();
            assert!(direct.as_hermitian().distance(composed.as_hermitian()) < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn tensor_is_associative(seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let n = random_channel(2, 2, 2, &mut rng);
            let m = random_channel(2, 3, 2, &mut rng);
            let p = random_channel(2, 2, 3, &mut rng);
            let input = random_state(2, &mut rng)
                .kron(&random_state(2, &mut rng))
                .kron(&random_state(2, &mut rng));
            let left = n.tensor(&m).tensor(&p).apply(&input).unwrap();
            let right = n.tensor(&m.tensor(&p)).apply(&input).unwrap();
            prop_assert!(left.as_hermitian().distance(right.as_hermitian()) < 1e-10);
        }
    }
}
