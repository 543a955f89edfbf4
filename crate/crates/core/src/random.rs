//! Seeded random instances: states, channels, tests.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{eigh, CMatrix, CVector, HermitianMatrix};
use crate::qobjects::{Channel, DensityMatrix};
use num_complex::Complex64;

pub type Rng64 = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianMatrix {
    HermitianMatrix::from_raw(ginibre(d, d, rng))
}

/// `G G† / d`, positive semidefinite and generically full rank.
pub fn random_psd<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianMatrix {
    let g = ginibre(d, d, rng);
    HermitianMatrix::from_raw(&g * g.adjoint()).scaled(1.0 / d as f64)
}

/// Random density matrix of the given rank (Hilbert–Schmidt measure for full rank).
pub fn random_state_rank<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(d, rank.max(1), rng);
    let m = HermitianMatrix::from_raw(&g * g.adjoint());
    let t = m.trace();
    DensityMatrix::from_hermitian_unchecked(m.scaled(1.0 / t))
}

pub fn random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    random_state_rank(d, d, rng)
}

pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    random_state_rank(d, 1, rng)
}

/// Random state whose eigenvalues are all at least `floor`.
pub fn random_state_with_floor<R: Rng + ?Sized>(d: usize, floor: f64, rng: &mut R) -> DensityMatrix {
    assert!(floor * d as f64 <= 1.0);
    let base = random_state(d, rng);
    let mixed = &base.as_hermitian().scaled(1.0 - floor * d as f64)
        + &HermitianMatrix::identity(d).scaled(floor);
    DensityMatrix::from_hermitian_unchecked(mixed)
}

/// `rows × cols` isometry (`V†V = I`), `rows >= cols`.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(rows >= cols);
    let g = ginibre(rows, cols, rng);
    let gram = HermitianMatrix::from_raw(g.adjoint() * &g);
    let inv_sqrt = eigh(&gram).map(|l| 1.0 / l.sqrt());
    g * inv_sqrt.matrix()
}

pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    random_isometry(d, d, rng)
}

pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// Random channel with `kraus_count` Kraus operators, sliced from a random isometry.
pub fn random_channel<R: Rng + ?Sized>(
    in_dim: usize,
    out_dim: usize,
    kraus_count: usize,
    rng: &mut R,
) -> Channel {
    let k = kraus_count.max(in_dim.div_ceil(out_dim));
    let v = random_isometry(k * out_dim, in_dim, rng);
    let kraus = (0..k)
        .map(|i| v.rows(i * out_dim, out_dim).into_owned())
        .collect();
    Channel::from_kraus(kraus).expect("isometry slices form a complete Kraus set")
}

/// Random operator `0 <= T <= I`.
pub fn random_test<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianMatrix {
    let u = random_unitary(d, rng);
    let diag: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
    HermitianMatrix::from_real_diag(&diag).conjugate_by(&u)
}

/// Random diagonal operator `0 <= T <= I`.
pub fn random_diagonal_test<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianMatrix {
    let diag: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
    HermitianMatrix::from_real_diag(&diag)
}

/// Random probability vector (flat Dirichlet).
pub fn random_probability<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Random diagonal density matrix.
pub fn random_diagonal_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::from_diag(&random_probability(d, rng)).expect("probability vector")
}
