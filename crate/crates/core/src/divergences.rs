//! Scalar comparisons between states and between finite families of
//! positive operators.
//!
//! All logarithms are natural; [`Divergence::to_bits`] converts.

use std::fmt;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{
    eigh, matrix_function, trace_norm, CMatrix, HermitianMatrix, MatrixFunction, Spectrum, PSD_TOL,
};
use crate::lp;
use crate::numeric::golden_section_min;
use crate::qobjects::DensityMatrix;
use crate::random::{random_test, Rng64};

/// Nonnegative extended real in nats; `+∞` is a legitimate value.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Divergence(f64);

impl Divergence {
    pub const INFINITE: Divergence = Divergence(f64::INFINITY);
    pub const ZERO: Divergence = Divergence(0.0);

    /// Wraps a finite value or `+∞`. NaN is rejected.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() {
            return Err(Error::validation("divergence value is NaN"));
        }
        Ok(Divergence(value))
    }

    pub(crate) fn from_raw(value: f64) -> Self {
        debug_assert!(!value.is_nan());
        Divergence(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn to_bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            write!(f, "{}", self.0)
        } else {
            f.write_str("inf")
        }
    }
}

/// Operator `0 ≤ T ≤ I` (within 1e-10).
#[derive(Clone, Debug)]
pub struct TestOperator(HermitianMatrix);

impl TestOperator {
    pub const TOL: f64 = 1e-10;

    pub fn new(m: HermitianMatrix) -> Result<Self> {
        let spec = eigh(&m);
        if spec.min() < -Self::TOL || spec.max() > 1.0 + Self::TOL {
            return Err(Error::validation(format!(
                "test operator spectrum [{:e}, {}] is outside [0, 1]",
                spec.min(),
                spec.max()
            )));
        }
        Ok(TestOperator(m))
    }

    pub(crate) fn from_unchecked(m: HermitianMatrix) -> Self {
        TestOperator(m)
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// Outcome of a constrained type-II error minimization.
#[derive(Clone, Debug)]
pub struct BetaResult {
    /// Minimal type-II error found.
    pub beta: f64,
    /// `−ln β`, or `+∞` when `β = 0`.
    pub dh: Divergence,
    pub test: TestOperator,
    /// Neyman–Pearson cut `t` when the test has that form.
    pub threshold: Option<f64>,
    /// Weight placed on the boundary eigenspace.
    pub boundary_weight: f64,
}

impl BetaResult {
    fn new(beta: f64, test: HermitianMatrix, threshold: Option<f64>, boundary_weight: f64) -> Self {
        let beta = if beta <= 1e-15 { 0.0 } else { beta.min(1.0) };
        let dh = if beta == 0.0 {
            Divergence::INFINITE
        } else {
            Divergence::from_raw(-beta.ln())
        };
        BetaResult {
            beta,
            dh,
            test: TestOperator::from_unchecked(test),
            threshold,
            boundary_weight,
        }
    }
}

/// Both spectra plus `|⟨u_k|v_i⟩|²`, where `u_k` diagonalizes `B` and `v_i` diagonalizes `A`.
struct PairSpectra {
    a: Spectrum,
    b: Spectrum,
    /// `overlap[(k, i)] = |⟨b_k|a_i⟩|²`
    overlap: nalgebra::DMatrix<f64>,
}

impl PairSpectra {
    fn new(a: &HermitianMatrix, b: &HermitianMatrix) -> Self {
        let sa = eigh(a);
        let sb = eigh(b);
        let o: CMatrix = sb.eigenvectors.adjoint() * &sa.eigenvectors;
        let overlap = o.map(|z| z.norm_sqr());
        PairSpectra {
            a: sa,
            b: sb,
            overlap,
        }
    }

    fn check_psd(&self) -> Result<()> {
        for (name, s) in [("first", &self.a), ("second", &self.b)] {
            let tol = PSD_TOL * s.clip_threshold() / crate::linalg::CLIP_REL;
            if s.min() < -tol {
                return Err(Error::domain(format!(
                    "{name} operator has negative eigenvalue {:e}",
                    s.min()
                )));
            }
        }
        Ok(())
    }

    /// `tr[A^{1−s} B^s]` with `x^0 = 1` on the support and `0` elsewhere.
    fn overlap_power(&self, s: f64) -> f64 {
        let sa = self.a.support();
        let sb = self.b.support();
        let mut total = 0.0;
        for &i in &sa {
            let p = self.a.eigenvalues[i].powf(1.0 - s);
            for &k in &sb {
                total += p * self.b.eigenvalues[k].powf(s) * self.overlap[(k, i)];
            }
        }
        total
    }
}

/// `tr(ρ ln ρ − ρ ln σ)`, or `+∞` unless `supp ρ ⊆ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Divergence> {
    ensure_dim(rho.dim(), sigma.dim())?;
    let ps = PairSpectra::new(rho.as_hermitian(), sigma.as_hermitian());
    let ker_sigma = ps.b.kernel();
    let supp_sigma = ps.b.support();
    let mut value = 0.0;
    for i in ps.a.support() {
        let p = ps.a.eigenvalues[i];
        let leak: f64 = ker_sigma.iter().map(|&k| ps.overlap[(k, i)]).sum();
        if leak > 1e-9 {
            return Ok(Divergence::INFINITE);
        }
        let cross: f64 = supp_sigma
            .iter()
            .map(|&k| ps.overlap[(k, i)] * ps.b.eigenvalues[k].ln())
            .sum();
        value += p * (p.ln() - cross);
    }
    Ok(Divergence::from_raw(value.max(0.0)))
}

/// `(1/(s−1)) ln tr[ρ^s σ^{1−s}]` for `s ∈ (0,1)`.
///
/// Finite whenever the trace is positive, `+∞` otherwise.
pub fn petz_renyi(rho: &DensityMatrix, sigma: &DensityMatrix, s: f64) -> Result<Divergence> {
    ensure_dim(rho.dim(), sigma.dim())?;
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::validation(format!("Rényi parameter {s} is outside (0, 1)")));
    }
    let ps = PairSpectra::new(rho.as_hermitian(), sigma.as_hermitian());
    let q = ps.overlap_power(1.0 - s);
    if q <= 0.0 {
        return Ok(Divergence::INFINITE);
    }
    Ok(Divergence::from_raw((q.ln() / (s - 1.0)).max(0.0)))
}

/// `‖√A √B‖₁` for positive semidefinite `A`, `B`.
pub fn fidelity(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    ensure_dim(a.dim(), b.dim())?;
    let sqrt_b = matrix_function(b, MatrixFunction::Sqrt)?;
    // Validate A as well; its square root is not otherwise needed.
    matrix_function(a, MatrixFunction::Sqrt)?;
    let inner = HermitianMatrix::from_raw(sqrt_b.matrix() * a.matrix() * sqrt_b.matrix());
    Ok(eigh(&inner)
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .sum())
}

/// `min_{s∈[0,1]} tr[A^{1−s} B^s]` for positive semidefinite operators.
///
/// Returns `(s*, value)`; a flat profile reports `s* = 0.5`.
pub fn chernoff_overlap_psd(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<(f64, f64)> {
    ensure_dim(a.dim(), b.dim())?;
    let ps = PairSpectra::new(a, b);
    ps.check_psd()?;
    let (s_gold, v_gold) = golden_section_min(|s| ps.overlap_power(s), 0.0, 1.0, 1e-8);
    let mut best = (s_gold, v_gold);
    for s in [0.0, 1.0] {
        let v = ps.overlap_power(s);
        if v < best.1 {
            best = (s, v);
        }
    }
    let mid = ps.overlap_power(0.5);
    if mid <= best.1 + 1e-15 * best.1.abs().max(1.0) {
        best = (0.5, mid.min(best.1));
    }
    Ok((best.0, best.1.max(0.0)))
}

pub fn chernoff_overlap(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<(f64, f64)> {
    chernoff_overlap_psd(rho.as_hermitian(), sigma.as_hermitian())
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::validation(format!("ε = {eps} is outside (0, 1)")))
    }
}

/// Neyman–Pearson test `P₊ + w P₀` at threshold `t`, with boundary band `tb`.
struct NpCandidate {
    test: HermitianMatrix,
    weight: f64,
    alpha: f64,
    beta: f64,
}

fn np_candidate(rho: &HermitianMatrix, sigma: &HermitianMatrix, t: f64, band: f64, eps: f64) -> NpCandidate {
    let spec = eigh(&(rho - &sigma.scaled(t)));
    let band = band.max(spec.clip_threshold());
    let p_plus = spec.projector_where(|l| l > band);
    let p_zero = spec.projector_where(|l| l.abs() <= band);
    let a = rho.inner(&p_plus);
    let b = rho.inner(&p_zero);
    let weight = if b > 0.0 {
        ((1.0 - eps - a) / b).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let test = &p_plus + &p_zero.scaled(weight);
    NpCandidate {
        alpha: 1.0 - rho.inner(&test),
        beta: sigma.inner(&test),
        test,
        weight,
    }
}

/// `inf { tr(Tσ) : 0 ≤ T ≤ I, tr((I−T)ρ) ≤ ε }` via the quantum Neyman–Pearson family.
pub fn beta_eps(rho: &DensityMatrix, sigma: &DensityMatrix, eps: f64) -> Result<BetaResult> {
    check_eps(eps)?;
    ensure_dim(rho.dim(), sigma.dim())?;
    let r = rho.as_hermitian();
    let s = sigma.as_hermitian();
    let target = 1.0 - eps;

    let s_spec = eigh(s);
    let s_clip = s_spec.clip_threshold();
    let kernel = s_spec.projector_where(|l| l <= s_clip);
    if r.inner(&kernel) >= target {
        let beta = s.inner(&kernel);
        return Ok(BetaResult::new(beta, kernel, Some(f64::INFINITY), 0.0));
    }

    let accept_mass = |t: f64| {
        let spec = eigh(&(r - &s.scaled(t)));
        let clip = spec.clip_threshold();
        r.inner(&spec.projector_where(|l| l > clip))
    };

    let min_pos = s_spec
        .eigenvalues
        .iter()
        .copied()
        .filter(|&l| l > s_clip)
        .fold(f64::INFINITY, f64::min);
    let r_max = eigh(r).max();
    let mut lo = 0.0;
    let mut hi = r_max / min_pos + 1.0;
    let mut expansions = 0;
    while accept_mass(hi) >= target {
        lo = hi;
        hi *= 10.0;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::NonConvergence(
                "Neyman–Pearson threshold bracket did not close".into(),
            ));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = accept_mass(mid);
        if f >= target {
            lo = mid;
            if f <= target + 1e-10 {
                hi = mid;
                break;
            }
        } else {
            hi = mid;
        }
    }

    let band = 2.0 * (hi - lo) * s_spec.max().abs() + s_clip;
    let mut best: Option<(NpCandidate, f64)> = None;
    for t in [hi, lo] {
        let cand = np_candidate(r, s, t, band, eps);
        if cand.alpha <= eps + 1e-10 && best.as_ref().is_none_or(|(b, _)| cand.beta < b.beta) {
            best = Some((cand, t));
        }
    }
    let (cand, t) = match best {
        Some(b) => b,
        // The bisection keeps `lo` feasible, so the plain projector at `lo` always works.
        None => (np_candidate(r, s, lo, 0.0, 1.0), lo),
    };
    Ok(BetaResult::new(cand.beta, cand.test, Some(t), cand.weight))
}

fn check_family(name: &str, family: &[HermitianMatrix]) -> Result<usize> {
    let first = family
        .first()
        .ok_or_else(|| Error::validation(format!("{name} is empty")))?;
    let d = first.dim();
    for m in family {
        ensure_dim(d, m.dim())?;
    }
    Ok(d)
}

/// Eigenbasis of a fixed pseudo-random combination; diagonalizes every member of a commuting family.
pub(crate) fn generic_basis(ops: &[&HermitianMatrix]) -> CMatrix {
    let d = ops[0].dim();
    let mut acc = HermitianMatrix::zeros(d);
    for (k, m) in ops.iter().enumerate() {
        let c = 1.0 + ((k as f64 + 1.0) * 0.618_033_988_749_895).fract() * std::f64::consts::PI;
        acc = &acc + &m.scaled(c);
    }
    eigh(&acc).eigenvectors
}

pub(crate) fn family_commutes(ops: &[&HermitianMatrix]) -> bool {
    let scale = ops.iter().map(|m| m.max_abs()).fold(1.0_f64, f64::max);
    ops.iter().enumerate().all(|(i, x)| {
        ops[i + 1..]
            .iter()
            .all(|y| x.commutator_norm(y) <= 1e-10 * scale * scale)
    })
}

fn diagonal_in(basis: &CMatrix, m: &HermitianMatrix) -> Vec<f64> {
    let t = basis.adjoint() * m.matrix() * basis;
    (0..t.nrows()).map(|i| t[(i, i)].re).collect()
}

fn test_from_weights(basis: &CMatrix, w: &[f64]) -> HermitianMatrix {
    HermitianMatrix::from_real_diag(w).conjugate_by(basis)
}

/// Projection onto `{0 ≤ T ≤ I}` in Frobenius norm.
fn clamp_to_tests(m: &HermitianMatrix) -> HermitianMatrix {
    eigh(m).map(|l| l.clamp(0.0, 1.0))
}

fn max_inner(family: &[HermitianMatrix], t: &HermitianMatrix) -> (usize, f64) {
    family
        .iter()
        .map(|m| m.inner(t))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc })
}

fn group_objective(s1: &[HermitianMatrix], s2: &[HermitianMatrix], t: &HermitianMatrix) -> f64 {
    let type1 = s1
        .iter()
        .map(|m| m.trace() - m.inner(t))
        .fold(f64::NEG_INFINITY, f64::max);
    type1 + max_inner(s2, t).1
}

const GROUP_ITERS: usize = 5000;
const CERTIFICATE_SAMPLES: usize = 2000;
const PAIR_BASIS_LIMIT: usize = 64;

/// `inf_T max_{A∈S1} tr[A(I−T)] + max_{B∈S2} tr[BT]` over tests `0 ≤ T ≤ I`.
///
/// Inputs may be unnormalized. Exact LPs over a handful of candidate bases seed
/// a projected subgradient descent; the result is checked against
/// 2000 random tests.
pub fn group_error_sum(
    s1: &[HermitianMatrix],
    s2: &[HermitianMatrix],
) -> Result<(f64, TestOperator)> {
    let d = check_family("first family", s1)?;
    ensure_dim(d, check_family("second family", s2)?)?;

    let all: Vec<&HermitianMatrix> = s1.iter().chain(s2).collect();
    let commuting = family_commutes(&all);
    let sum1 = s1.iter().fold(HermitianMatrix::zeros(d), |acc, m| &acc + m);
    let sum2 = s2.iter().fold(HermitianMatrix::zeros(d), |acc, m| &acc + m);

    let mut bases = vec![
        CMatrix::identity(d, d),
        generic_basis(&all),
        eigh(&(&sum1 - &sum2)).eigenvectors,
    ];
    if !commuting {
        'pairs: for a in s1 {
            for b in s2 {
                if bases.len() >= PAIR_BASIS_LIMIT {
                    break 'pairs;
                }
                bases.push(eigh(&(a - b)).eigenvectors);
            }
        }
    }

    let mut best_t = eigh(&(&sum1 - &sum2)).projector_where(|l| l > 0.0);
    let mut best_v = group_objective(s1, s2, &best_t);
    for basis in &bases {
        let a: Vec<_> = s1.iter().map(|m| diagonal_in(basis, m)).collect();
        let b: Vec<_> = s2.iter().map(|m| diagonal_in(basis, m)).collect();
        let (_, w) = lp::minimax_error_diag(&a, &b)?;
        let t = test_from_weights(basis, &w);
        let v = group_objective(s1, s2, &t);
        if v < best_v {
            best_v = v;
            best_t = t;
        }
    }

    if !commuting {
        let step0 = 0.1 * (d as f64).sqrt();
        let mut t = best_t.clone();
        for k in 1..=GROUP_ITERS {
            let (i1, _) = s1
                .iter()
                .map(|m| m.trace() - m.inner(&t))
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
            let (j2, _) = max_inner(s2, &t);
            let g = &s2[j2] - &s1[i1];
            let norm = g.frobenius_norm();
            if norm < 1e-14 {
                break;
            }
            let step = step0 / (k as f64).sqrt() / norm;
            t = clamp_to_tests(&(&t - &g.scaled(step)));
            let v = group_objective(s1, s2, &t);
            if v < best_v {
                best_v = v;
                best_t = t.clone();
            }
        }
    }

    let mut rng = Rng64::seed_from_u64(0x5eed_0001);
    for _ in 0..CERTIFICATE_SAMPLES {
        let t = random_test(d, &mut rng);
        let v = group_objective(s1, s2, &t);
        if v < best_v - 1e-6 {
            return Err(Error::NonConvergence(format!(
                "group error solver stopped at {best_v}, a random test achieves {v}"
            )));
        }
    }
    Ok((best_v.max(0.0), TestOperator::from_unchecked(best_t)))
}

/// Mixes `T` toward `I` just enough that every type-I constraint holds.
fn repair_type1(s1: &[HermitianMatrix], t: &HermitianMatrix, eps: f64) -> HermitianMatrix {
    let target = 1.0 - eps;
    let theta = s1
        .iter()
        .map(|m| {
            let acc = m.inner(t);
            if acc >= target {
                0.0
            } else {
                (target - acc) / (1.0 - acc).max(1e-300)
            }
        })
        .fold(0.0_f64, f64::max)
        .clamp(0.0, 1.0);
    if theta == 0.0 {
        return t.clone();
    }
    // A hair beyond θ absorbs round-off.
    let theta = (theta * (1.0 + 1e-12) + 1e-15).min(1.0);
    let d = t.dim();
    &t.scaled(1.0 - theta) + &HermitianMatrix::identity(d).scaled(theta)
}

fn type1_violation(s1: &[HermitianMatrix], t: &HermitianMatrix, eps: f64) -> f64 {
    s1.iter()
        .map(|m| (1.0 - eps) - m.inner(t))
        .fold(0.0_f64, f64::max)
}

fn normalized(m: &HermitianMatrix) -> Option<DensityMatrix> {
    let tr = m.trace();
    (tr > 0.0).then(|| DensityMatrix::from_hermitian_unchecked(m.scaled(1.0 / tr)))
}

/// `inf_T { max_{B∈S2} tr(TB) : tr((I−T)ρ) ≤ ε for all ρ ∈ S1 }`.
pub fn set_beta_constraint(
    s1: &[DensityMatrix],
    s2: &[HermitianMatrix],
    eps: f64,
) -> Result<BetaResult> {
    check_eps(eps)?;
    let s1h: Vec<HermitianMatrix> = s1.iter().map(|r| r.as_hermitian().clone()).collect();
    let d = check_family("first family", &s1h)?;
    ensure_dim(d, check_family("second family", s2)?)?;
    let all: Vec<&HermitianMatrix> = s1h.iter().chain(s2).collect();
    let commuting = family_commutes(&all);

    let mut bases = vec![CMatrix::identity(d, d), generic_basis(&all)];
    let mut candidates: Vec<HermitianMatrix> = vec![HermitianMatrix::identity(d)];

    let avg1 = s1h
        .iter()
        .fold(HermitianMatrix::zeros(d), |acc, m| &acc + m)
        .scaled(1.0 / s1h.len() as f64);
    let avg2 = s2
        .iter()
        .fold(HermitianMatrix::zeros(d), |acc, m| &acc + m)
        .scaled(1.0 / s2.len() as f64);
    let mut pairs: Vec<(HermitianMatrix, HermitianMatrix)> = vec![(avg1, avg2)];
    if !commuting || s1.len() * s2.len() <= 4 {
        for a in &s1h {
            for b in s2 {
                if pairs.len() >= PAIR_BASIS_LIMIT {
                    break;
                }
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    for (a, b) in &pairs {
        let (Some(rho), Some(sigma)) = (normalized(a), normalized(b)) else {
            continue;
        };
        let np = beta_eps(&rho, &sigma, eps)?;
        let tr_b = b.trace();
        match np.threshold {
            Some(t) if t.is_finite() => {
                bases.push(eigh(&(a - &b.scaled(t / tr_b))).eigenvectors);
            }
            _ => {}
        }
        candidates.push(np.test.into_matrix());
    }

    for basis in &bases {
        let a: Vec<_> = s1h.iter().map(|m| diagonal_in(basis, m)).collect();
        let b: Vec<_> = s2.iter().map(|m| diagonal_in(basis, m)).collect();
        let (_, w) = lp::set_beta_diag(&a, &b, eps)?;
        candidates.push(test_from_weights(basis, &w));
    }

    let mut best: Option<(f64, HermitianMatrix)> = None;
    let consider = |t: HermitianMatrix, best: &mut Option<(f64, HermitianMatrix)>| {
        let t = repair_type1(&s1h, &t, eps);
        if type1_violation(&s1h, &t, eps) > 1e-8 {
            return;
        }
        let v = max_inner(s2, &t).1;
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            *best = Some((v, t));
        }
    };
    for t in candidates {
        consider(t, &mut best);
    }

    if !commuting {
        let mut mu = 10.0;
        let start = best.as_ref().expect("identity is feasible").1.clone();
        for _round in 0..12 {
            let (t_pen, viol) = penalty_descent(&s1h, s2, eps, mu, &start);
            consider(t_pen, &mut best);
            if viol <= 1e-8 {
                break;
            }
            mu *= 2.0;
        }
    }

    let (beta, test) = best.expect("identity is feasible");
    Ok(BetaResult::new(beta.max(0.0), test, None, 0.0))
}

/// Projected subgradient on `max_j tr(B_j T) + μ·max(0, max_i (1−ε) − tr(A_i T))`.
/// Returns the best iterate and its type-I violation.
fn penalty_descent(
    s1: &[HermitianMatrix],
    s2: &[HermitianMatrix],
    eps: f64,
    mu: f64,
    start: &HermitianMatrix,
) -> (HermitianMatrix, f64) {
    let d = start.dim();
    let penalized = |t: &HermitianMatrix| max_inner(s2, t).1 + mu * type1_violation(s1, t, eps);
    let step0 = 0.1 * (d as f64).sqrt();
    let mut t = start.clone();
    let mut best = (penalized(&t), t.clone());
    for k in 1..=GROUP_ITERS {
        let (j, _) = max_inner(s2, &t);
        let mut g = s2[j].clone();
        let (i, worst) = s1
            .iter()
            .map(|m| (1.0 - eps) - m.inner(&t))
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        if worst > 0.0 {
            g = &g - &s1[i].scaled(mu);
        }
        let norm = g.frobenius_norm();
        if norm < 1e-14 {
            break;
        }
        t = clamp_to_tests(&(&t - &g.scaled(step0 / (k as f64).sqrt() / norm)));
        let v = penalized(&t);
        if v < best.0 {
            best = (v, t.clone());
        }
    }
    let viol = type1_violation(s1, &best.1, eps);
    (best.1, viol)
}

/// `Σ_{A∈S1, B∈S2} min_s √(2 tr[A^{1−s} B^s])`.
pub fn am_upper_bound(s1: &[HermitianMatrix], s2: &[HermitianMatrix]) -> Result<f64> {
    let mut total = 0.0;
    for a in s1 {
        for b in s2 {
            let (_, q) = chernoff_overlap_psd(a, b)?;
            total += (2.0 * q).sqrt();
        }
    }
    Ok(total)
}

/// Helstrom quantity `1 − ½‖A − B‖₁`, used as an independent check in tests.
pub fn helstrom_error_sum(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    ensure_dim(a.dim(), b.dim())?;
    Ok(0.5 * (a.trace() + b.trace()) - 0.5 * trace_norm(&(a - b)))
}
