//! n-copy machinery: types, type-class states, regularized estimates.

use rayon::prelude::*;

use crate::divergences::{relative_entropy, Divergence};
use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{dominates, HermitianMatrix};
use crate::numeric::{binomial, ln_factorial, ln_factorial_table, log_sum_exp};
use crate::optimize::{informed_objective, minimize_inf, minimize_informed};
use crate::qobjects::{CQChannel, Channel, DensityMatrix};

pub const MAX_TYPES: usize = 1_000_000;
pub const MAX_SEQUENCES: usize = 100_000;
pub const MAX_OUTPUT_DIM: usize = 4096;
pub const MAX_INPUT_DIM: usize = 64;

/// Symbol counts of a length-n sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeVector {
    counts: Vec<usize>,
}

impl TypeVector {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::validation("type over an empty alphabet"));
        }
        Ok(TypeVector { counts })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn d(&self) -> usize {
        self.counts.len()
    }

    /// Empirical distribution `counts / n`.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// `ln (n! / Π counts!)`.
    pub fn ln_multinomial(&self) -> f64 {
        ln_factorial(self.n()) - self.counts.iter().map(|&c| ln_factorial(c)).sum::<f64>()
    }
}

/// `|T_d^n| = C(n+d−1, d−1)`.
pub fn type_count(d: usize, n: usize) -> f64 {
    binomial(n + d - 1, d - 1)
}

/// All types of length-`n` sequences over `d` symbols, in lexicographic order.
pub fn types_enumerate(d: usize, n: usize) -> Result<Vec<TypeVector>> {
    if d == 0 || n == 0 {
        return Err(Error::validation("types need d ≥ 1 and n ≥ 1"));
    }
    let count = type_count(d, n);
    if count > MAX_TYPES as f64 {
        return Err(Error::cap(format!("{count} types of length {n} over {d} symbols exceed {MAX_TYPES}")));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0; d];
    fill_types(&mut current, 0, n, &mut out);
    Ok(out)
}

fn fill_types(current: &mut [usize], pos: usize, remaining: usize, out: &mut Vec<TypeVector>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(TypeVector { counts: current.to_vec() });
        return;
    }
    for c in 0..=remaining {
        current[pos] = c;
        fill_types(current, pos + 1, remaining - c, out);
    }
}

fn check_output_cap(d: usize, n: usize) -> Result<usize> {
    let dim = (d as f64).powi(n as i32);
    if dim > MAX_OUTPUT_DIM as f64 {
        return Err(Error::cap(format!("{d}^{n} exceeds the output dimension cap {MAX_OUTPUT_DIM}")));
    }
    Ok(dim as usize)
}

/// `ρ_{x₁} ⊗ … ⊗ ρ_{xₙ}` for a sequence of symbol indices.
pub fn sequence_output(w: &CQChannel, xs: &[usize]) -> Result<DensityMatrix> {
    if xs.is_empty() {
        return Err(Error::validation("empty sequence"));
    }
    check_output_cap(w.output_dim(), xs.len())?;
    if let Some(&bad) = xs.iter().find(|&&x| x >= w.len()) {
        return Err(Error::validation(format!("symbol index {bad} outside alphabet of size {}", w.len())));
    }
    let mut acc = w.output(xs[0]).clone();
    for &x in &xs[1..] {
        acc = acc.kron(w.output(x));
    }
    Ok(acc)
}

/// All distinct orderings of the multiset described by `counts`, lexicographic.
fn sequences_of_type(counts: &[usize]) -> Vec<Vec<usize>> {
    fn rec(counts: &mut [usize], prefix: &mut Vec<usize>, total: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == total {
            out.push(prefix.clone());
            return;
        }
        for x in 0..counts.len() {
            if counts[x] > 0 {
                counts[x] -= 1;
                prefix.push(x);
                rec(counts, prefix, total, out);
                prefix.pop();
                counts[x] += 1;
            }
        }
    }
    let total = counts.iter().sum();
    let mut out = Vec::new();
    rec(&mut counts.to_vec(), &mut Vec::with_capacity(total), total, &mut out);
    out
}

fn check_type(w: &CQChannel, p: &TypeVector) -> Result<()> {
    ensure_dim(w.len(), p.d())?;
    if p.n() == 0 {
        return Err(Error::validation("type of an empty sequence"));
    }
    Ok(())
}

/// Uniform mixture of `sequence_output` over all sequences of type `p`.
pub fn type_uniform_state(w: &CQChannel, p: &TypeVector) -> Result<DensityMatrix> {
    check_type(w, p)?;
    let dim = check_output_cap(w.output_dim(), p.n())?;
    let count = p.ln_multinomial().exp().round();
    if count > MAX_SEQUENCES as f64 {
        return Err(Error::cap(format!("{count} sequences of this type exceed {MAX_SEQUENCES}")));
    }
    let seqs = sequences_of_type(p.counts());
    let sum = seqs
        .par_iter()
        .map(|xs| sequence_output(w, xs).map(DensityMatrix::into_hermitian))
        .try_reduce(|| HermitianMatrix::zeros(dim), |a, b| Ok(&a + &b))?;
    Ok(DensityMatrix::from_hermitian_unchecked(sum.scaled(1.0 / seqs.len() as f64)))
}

/// Whether `ρ_p^{(n)} ≤ |T_d^n| · (Σ_x p(x) ρ_x)^{⊗n}` with `p` the empirical frequencies.
pub fn type_domination_check(w: &CQChannel, p: &TypeVector) -> Result<bool> {
    let lhs = type_uniform_state(w, p)?;
    let mix = w.mixture(&p.frequencies());
    let rhs = mix.kron_power(p.n());
    dominates(lhs.as_hermitian(), rhs.as_hermitian(), type_count(p.d(), p.n()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DivergenceKind {
    /// `min_ρ D(N1(ρ)‖N2(ρ))`
    Informed,
    /// `min_{ρ,σ} D(N1(ρ)‖N2(σ))`
    Inf,
}

#[derive(Clone, Debug)]
pub enum Witness {
    State(DensityMatrix),
    Pair(DensityMatrix, DensityMatrix),
    None,
}

/// Per-copy value of a divergence of tensor-power channels.
#[derive(Clone, Debug)]
pub struct RegularizedEstimate {
    pub n: usize,
    /// Nats per copy.
    pub value: Divergence,
    pub witness: Witness,
    pub solver_gap: f64,
}

/// `(1/n) D(N1^{⊗n}‖N2^{⊗n})` (informed) or `(1/n) D^{inf}(N1^{⊗n}‖N2^{⊗n})`.
pub fn regularized_estimate(
    n1: &Channel,
    n2: &Channel,
    n: usize,
    kind: DivergenceKind,
    tol: f64,
) -> Result<RegularizedEstimate> {
    if n == 0 {
        return Err(Error::validation("n must be at least 1"));
    }
    ensure_dim(n1.in_dim(), n2.in_dim())?;
    ensure_dim(n1.out_dim(), n2.out_dim())?;
    let in_dim = (n1.in_dim() as f64).powi(n as i32);
    if in_dim > MAX_INPUT_DIM as f64 {
        return Err(Error::cap(format!(
            "{}^{n} inputs exceed the optimizer cap {MAX_INPUT_DIM}",
            n1.in_dim()
        )));
    }
    check_output_cap(n1.out_dim(), n)?;
    let t1 = n1.tensor_power(n);
    let t2 = n2.tensor_power(n);
    let per_copy = |v: Divergence| Divergence::from_raw(v.value() / n as f64);
    Ok(match kind {
        DivergenceKind::Informed => {
            let r = minimize_informed(&t1, &t2, tol)?;
            RegularizedEstimate {
                n,
                value: per_copy(r.value),
                witness: r.argument.map_or(Witness::None, Witness::State),
                solver_gap: r.gap,
            }
        }
        DivergenceKind::Inf => {
            let r = minimize_inf(&t1, &t2, tol)?;
            RegularizedEstimate {
                n,
                value: per_copy(r.value),
                witness: r.argument.map_or(Witness::None, |(a, b)| Witness::Pair(a, b)),
                solver_gap: r.gap,
            }
        }
    })
}

/// `(1−ε) D(N1(ρ)‖N2(σ)) + ε D(N1(σ)‖N2(σ)) − ln(ε)/n`.
///
/// This upper-bounds the per-copy informed divergence at `n` copies, via the
/// input `(1−ε) ρ^{⊗n} + ε σ^{⊗n}`.
pub fn mixing_upper_bound(
    n1: &Channel,
    n2: &Channel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    eps_mix: f64,
    n: usize,
) -> Result<Divergence> {
    if !(eps_mix > 0.0 && eps_mix < 1.0) {
        return Err(Error::validation(format!("mixing weight {eps_mix} is outside (0, 1)")));
    }
    if n == 0 {
        return Err(Error::validation("n must be at least 1"));
    }
    let cross = relative_entropy(&n1.apply(rho)?, &n2.apply(sigma)?)?;
    let own = relative_entropy(&n1.apply(sigma)?, &n2.apply(sigma)?)?;
    if !cross.is_finite() || !own.is_finite() {
        return Ok(Divergence::INFINITE);
    }
    let v = (1.0 - eps_mix) * cross.value() + eps_mix * own.value() - eps_mix.ln() / n as f64;
    Ok(Divergence::from_raw(v))
}

/// One i.i.d. block of a commuting product hypothesis: `n` copies of `p` versus `q`.
#[derive(Clone, Debug)]
pub struct IidBlock {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub n: usize,
}

/// Exact Neyman–Pearson result for commuting product hypotheses.
#[derive(Clone, Copy, Debug)]
pub struct TypeClassBeta {
    pub beta: f64,
    /// `ln β`, accurate even when `β` underflows.
    pub ln_beta: f64,
    pub dh: Divergence,
}

/// Per-type log-probabilities `(ln P, ln Q)` of one block, all types listed.
fn block_type_logs(block: &IidBlock) -> Result<Vec<(f64, f64)>> {
    let d = block.p.len();
    ensure_dim(d, block.q.len())?;
    if block.n == 0 {
        return Ok(vec![(0.0, 0.0)]);
    }
    let lp: Vec<f64> = block.p.iter().map(|x| x.max(0.0).ln()).collect();
    let lq: Vec<f64> = block.q.iter().map(|x| x.max(0.0).ln()).collect();
    let log_term = |c: usize, l: f64| if c == 0 { 0.0 } else { c as f64 * l };
    let lf = ln_factorial_table(block.n);
    Ok(types_enumerate(d, block.n)?
        .into_iter()
        .map(|t| {
            let m = lf[block.n] - t.counts().iter().map(|&c| lf[c]).sum::<f64>();
            let a: f64 = t.counts().iter().zip(&lp).map(|(&c, &l)| log_term(c, l)).sum();
            let b: f64 = t.counts().iter().zip(&lq).map(|(&c, &l)| log_term(c, l)).sum();
            (m + a, m + b)
        })
        .collect())
}

/// Smallest type-II error of a test on `⊗_b (p_b^{⊗n_b})` vs `⊗_b (q_b^{⊗n_b})` with
/// type-I error at most `ε`.
///
/// The likelihood ratio is constant on joint type classes, so the optimal test
/// accepts classes in decreasing ratio order and splits the last one.
pub fn type_class_beta(blocks: &[IidBlock], eps: f64) -> Result<TypeClassBeta> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::validation(format!("ε = {eps} is outside (0, 1)")));
    }
    let mut joint: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for block in blocks {
        let logs = block_type_logs(block)?;
        if (joint.len() as f64) * (logs.len() as f64) > MAX_TYPES as f64 {
            return Err(Error::cap(format!("joint type classes exceed {MAX_TYPES}")));
        }
        joint = joint
            .iter()
            .flat_map(|&(a, b)| logs.iter().map(move |&(c, d)| (a + c, b + d)))
            .collect();
    }
    // Classes impossible under the null carry no type-I benefit.
    joint.retain(|&(lp, _)| lp > f64::NEG_INFINITY);
    joint.sort_by(|x, y| (y.0 - y.1).total_cmp(&(x.0 - x.1)));

    let target = 1.0 - eps;
    let mut mass = 0.0;
    let mut accepted_lq: Vec<f64> = Vec::new();
    for &(lp, lq) in &joint {
        let p = lp.exp();
        if mass + p >= target {
            let w = ((target - mass) / p).clamp(0.0, 1.0);
            if w > 0.0 {
                accepted_lq.push(lq + w.ln());
            }
            break;
        }
        mass += p;
        accepted_lq.push(lq);
    }
    let ln_beta = log_sum_exp(accepted_lq);
    let beta = ln_beta.exp();
    let dh = if ln_beta == f64::NEG_INFINITY {
        Divergence::INFINITE
    } else {
        Divergence::from_raw(-ln_beta)
    };
    Ok(TypeClassBeta { beta, ln_beta, dh })
}

/// `D(N1(ρ)‖N2(ρ))` at `ρ = witness`, per copy, for re-checking a [`RegularizedEstimate`].
pub fn reevaluate_informed(n1: &Channel, n2: &Channel, n: usize, witness: &DensityMatrix) -> Result<f64> {
    let v = informed_objective(&n1.tensor_power(n), &n2.tensor_power(n), witness)?;
    Ok(v.value() / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::DEFAULT_TOL;
    use crate::random::{random_channel, random_state, seeded};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn example1() -> (Channel, Channel) {
        crate::harness::example1_channels()
    }

    fn diag(p: &[f64]) -> DensityMatrix {
        DensityMatrix::from_diag(p).unwrap()
    }

    fn tv(c: &[usize]) -> TypeVector {
        TypeVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn enumerate_examples() {
        let t = types_enumerate(2, 3).unwrap();
        let counts: Vec<_> = t.iter().map(|t| t.counts().to_vec()).collect();
        assert_eq!(counts, vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);
        assert_eq!(types_enumerate(1, 7).unwrap(), vec![tv(&[7])]);
        assert_eq!(types_enumerate(3, 2).unwrap().len(), 6);
        assert!(matches!(types_enumerate(10, 60), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn enumerate_counts_match_stars_and_bars() {
        for d in 1..=4 {
            for n in 1..=6 {
                let t = types_enumerate(d, n).unwrap();
                assert_eq!(t.len() as f64, type_count(d, n));
                assert!(t.windows(2).all(|w| w[0] < w[1]));
                assert!(t.iter().all(|t| t.n() == n && t.d() == d));
            }
        }
    }

    fn random_cq(k: usize, d: usize, rng: &mut crate::random::Rng64) -> CQChannel {
        CQChannel::with_indexed_alphabet((0..k).map(|_| random_state(d, rng)).collect()).unwrap()
    }

    #[test]
    fn sequence_output_examples() {
        let mut rng = seeded(1);
        let w = random_cq(2, 2, &mut rng);
        assert!(sequence_output(&w, &[1]).unwrap().as_hermitian().distance(w.output(1).as_hermitian()) < 1e-15);
        let twice = sequence_output(&w, &[0, 0]).unwrap();
        assert!(twice.as_hermitian().distance(w.output(0).kron(w.output(0)).as_hermitian()) < 1e-15);
        for _ in 0..10 {
            let xs: Vec<usize> = (0..4).map(|_| rand::Rng::gen_range(&mut rng, 0..2)).collect();
            assert_abs_diff_eq!(sequence_output(&w, &xs).unwrap().as_hermitian().trace(), 1.0, epsilon = 1e-12);
        }
        assert!(matches!(sequence_output(&w, &[0; 13]), Err(Error::CapExceeded(_))));
        assert!(sequence_output(&w, &[2]).is_err());
    }

    #[test]
    fn type_state_examples() {
        let mut rng = seeded(2);
        let w = random_cq(2, 2, &mut rng);
        let point = type_uniform_state(&w, &tv(&[3, 0])).unwrap();
        assert!(point.as_hermitian().distance(w.output(0).kron_power(3).as_hermitian()) < 1e-14);
        let mixed = type_uniform_state(&w, &tv(&[1, 1])).unwrap();
        let a = w.output(0).kron(w.output(1));
        let b = w.output(1).kron(w.output(0));
        let oracle = (a.as_hermitian() + b.as_hermitian()).scaled(0.5);
        assert!(mixed.as_hermitian().distance(&oracle) < 1e-14);
    }

    /// Unitary swapping tensor factors `i` and `j` of `n` qudits.
    fn swap_factors(d: usize, n: usize, i: usize, j: usize) -> crate::linalg::CMatrix {
        let dim = d.pow(n as u32);
        let mut u = crate::linalg::CMatrix::zeros(dim, dim);
        for idx in 0..dim {
            let mut digits: Vec<usize> = (0..n).map(|k| (idx / d.pow((n - 1 - k) as u32)) % d).collect();
            digits.swap(i, j);
            let out = digits.iter().fold(0, |acc, &x| acc * d + x);
            u[(out, idx)] = crate::linalg::c(1.0);
        }
        u
    }

    #[test]
    fn type_state_is_permutation_invariant() {
        let mut rng = seeded(3);
        for _ in 0..5 {
            let w = random_cq(2, 2, &mut rng);
            let s = type_uniform_state(&w, &tv(&[2, 1])).unwrap();
            let u = swap_factors(2, 3, 0, 2);
            assert!(s.as_hermitian().conjugate_by(&u).distance(s.as_hermitian()) < 1e-12);
        }
    }

    #[test]
    fn type_state_commutes_with_relabeling() {
        let mut rng = seeded(4);
        let w = random_cq(3, 2, &mut rng);
        let perm = [2, 0, 1];
        let relabeled = CQChannel::with_indexed_alphabet(perm.iter().map(|&x| w.output(x).clone()).collect()).unwrap();
        let t = tv(&[1, 2, 0]);
        // Symbol k of `relabeled` is symbol perm[k] of `w`.
        let mut moved = vec![0; 3];
        for (k, &x) in perm.iter().enumerate() {
            moved[x] = t.counts()[k];
        }
        let a = type_uniform_state(&relabeled, &t).unwrap();
        let b = type_uniform_state(&w, &tv(&moved)).unwrap();
        assert!(a.as_hermitian().distance(b.as_hermitian()) < 1e-13);
    }

    #[test]
    fn domination_examples() {
        let w = CQChannel::with_indexed_alphabet(vec![DensityMatrix::basis_state(2, 0), DensityMatrix::basis_state(2, 1)]).unwrap();
        assert!(type_domination_check(&w, &tv(&[1, 1])).unwrap());
        // PSD oracle: 3·(I/4) − ½(|01⟩⟨01|+|10⟩⟨10|) = diag(3/4, 1/4, 1/4, 3/4).
        let lhs = type_uniform_state(&w, &tv(&[1, 1])).unwrap();
        assert_eq!(lhs.as_hermitian().diagonal_real(), vec![0.0, 0.5, 0.5, 0.0]);
        let mut rng = seeded(5);
        let w = random_cq(2, 2, &mut rng);
        assert!(type_domination_check(&w, &tv(&[3, 0])).unwrap());
    }

    #[test]
    fn domination_holds_on_qubit_sweep() {
        let mut rng = seeded(6);
        for _ in 0..10 {
            let w = random_cq(2, 2, &mut rng);
            for n in 1..=3 {
                for t in types_enumerate(2, n).unwrap() {
                    assert!(type_domination_check(&w, &t).unwrap());
                }
            }
        }
    }

    #[test]
    fn regularized_single_copy_matches_optimizer() {
        let (n1, n2) = example1();
        let r = regularized_estimate(&n1, &n2, 1, DivergenceKind::Informed, DEFAULT_TOL).unwrap();
        let direct = minimize_informed(&n1, &n2, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(r.value.value(), direct.value.value(), epsilon = 1e-12);
        let r = regularized_estimate(&n1, &n2, 1, DivergenceKind::Inf, DEFAULT_TOL).unwrap();
        assert!(r.value.value() < 1e-6);
    }

    #[test]
    fn regularized_example1_drops_at_two_copies() {
        let (n1, n2) = example1();
        let one = regularized_estimate(&n1, &n2, 1, DivergenceKind::Informed, DEFAULT_TOL).unwrap();
        let two = regularized_estimate(&n1, &n2, 2, DivergenceKind::Informed, DEFAULT_TOL).unwrap();
        // Explicit witness ½(|00⟩⟨00| + |11⟩⟨11|).
        let r = diag(&[0.5, 0.0, 0.0, 0.5]);
        let explicit = reevaluate_informed(&n1, &n2, 2, &r).unwrap();
        assert_abs_diff_eq!(explicit, 0.25 * 5f64.ln(), epsilon = 1e-12);
        assert!(two.value.value() <= explicit + DEFAULT_TOL);
        assert!(two.value.value() <= 0.403);
        assert!(one.value.value() >= 0.532);
        let Witness::State(w) = &two.witness else { panic!("missing witness") };
        assert_abs_diff_eq!(reevaluate_informed(&n1, &n2, 2, w).unwrap(), two.value.value(), epsilon = 1e-8);
    }

    #[test]
    fn regularized_identical_channels_vanish() {
        let mut rng = seeded(7);
        let n = random_channel(2, 2, 2, &mut rng);
        for k in 1..=2 {
            let r = regularized_estimate(&n, &n, k, DivergenceKind::Informed, DEFAULT_TOL).unwrap();
            assert!(r.value.value() < 1e-9);
        }
        assert!(matches!(
            regularized_estimate(&n, &n, 7, DivergenceKind::Informed, DEFAULT_TOL),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn regularized_per_copy_does_not_grow() {
        let mut rng = seeded(8);
        for _ in 0..3 {
            let n1 = random_channel(2, 2, 2, &mut rng);
            let n2 = random_channel(2, 2, 2, &mut rng);
            let one = regularized_estimate(&n1, &n2, 1, DivergenceKind::Informed, DEFAULT_TOL).unwrap();
            let two = regularized_estimate(&n1, &n2, 2, DivergenceKind::Informed, DEFAULT_TOL).unwrap();
            assert!(two.value.value() <= one.value.value() + DEFAULT_TOL);
        }
    }

    #[test]
    fn eb_collapse_on_classical_instance() {
        let w1 = CQChannel::with_indexed_alphabet(vec![diag(&[0.8, 0.2]), diag(&[0.4, 0.6])]).unwrap();
        let w2 = CQChannel::with_indexed_alphabet(vec![diag(&[0.5, 0.5]), diag(&[0.1, 0.9])]).unwrap();
        let (n1, n2) = (w1.to_eb_channel(false), w2.to_eb_channel(false));
        let one = regularized_estimate(&n1, &n2, 1, DivergenceKind::Inf, DEFAULT_TOL).unwrap();
        let two = regularized_estimate(&n1, &n2, 2, DivergenceKind::Inf, DEFAULT_TOL).unwrap();
        assert!((one.value.value() - two.value.value()).abs() <= 10.0 * DEFAULT_TOL);
    }

    #[test]
    fn mixing_bound_examples() {
        let (n1, n2) = example1();
        let z0 = DensityMatrix::basis_state(2, 0);
        let z1 = DensityMatrix::basis_state(2, 1);
        let b = mixing_upper_bound(&n1, &n2, &z1, &z0, 0.5, 2).unwrap();
        assert_abs_diff_eq!(b.value(), LN_2, epsilon = 1e-12);
        assert!(b.value() >= 0.25 * 5f64.ln());

        let mut rng = seeded(9);
        let n = random_channel(2, 2, 2, &mut rng);
        let rho = random_state(2, &mut rng);
        let b = mixing_upper_bound(&n, &n, &rho, &rho, 0.25, 3).unwrap();
        assert_abs_diff_eq!(b.value(), -(0.25f64).ln() / 3.0, epsilon = 1e-12);

        let b2 = mixing_upper_bound(&n1, &n2, &z1, &z0, 0.5, 2).unwrap();
        let b4 = mixing_upper_bound(&n1, &n2, &z1, &z0, 0.5, 4).unwrap();
        assert!(b4 <= b2);
        // σ = |1⟩: N1(|1⟩) = I/2 is not supported in N2(|1⟩) = |1⟩⟨1|.
        assert!(!mixing_upper_bound(&n1, &n2, &z0, &z1, 0.5, 2).unwrap().is_finite());
    }

    #[test]
    fn mixing_bound_dominates_two_copy_estimate() {
        let (n1, n2) = example1();
        let two = regularized_estimate(&n1, &n2, 2, DivergenceKind::Informed, DEFAULT_TOL).unwrap();
        for eps in [0.1, 0.3, 0.5, 0.7] {
            let b = mixing_upper_bound(&n1, &n2, &DensityMatrix::basis_state(2, 1), &DensityMatrix::basis_state(2, 0), eps, 2)
                .unwrap();
            assert!(b.value() >= two.value.value() - 1e-9);
        }
    }

    #[test]
    fn type_class_beta_matches_beta_eps_at_small_n() {
        let p = [0.5, 0.5];
        let q = [0.9, 0.1];
        for n in 1..=4 {
            let exact = type_class_beta(&[IidBlock { p: p.to_vec(), q: q.to_vec(), n }], 0.3).unwrap();
            let rho = diag(&p).kron_power(n);
            let sigma = diag(&q).kron_power(n);
            let np = crate::divergences::beta_eps(&rho, &sigma, 0.3).unwrap();
            assert_abs_diff_eq!(exact.beta, np.beta, epsilon = 1e-10);
        }
        let r = type_class_beta(&[IidBlock { p: p.to_vec(), q: q.to_vec(), n: 1 }], 0.4).unwrap();
        assert_abs_diff_eq!(r.beta, 0.28, epsilon = 1e-12);
    }

    #[test]
    fn type_class_beta_multi_block_matches_kron() {
        let a = IidBlock { p: vec![0.7, 0.3], q: vec![0.2, 0.8], n: 2 };
        let b = IidBlock { p: vec![0.1, 0.6, 0.3], q: vec![0.3, 0.3, 0.4], n: 1 };
        let exact = type_class_beta(&[a.clone(), b.clone()], 0.2).unwrap();
        let rho = diag(&a.p).kron_power(2).kron(&diag(&b.p));
        let sigma = diag(&a.q).kron_power(2).kron(&diag(&b.q));
        let np = crate::divergences::beta_eps(&rho, &sigma, 0.2).unwrap();
        assert_abs_diff_eq!(exact.beta, np.beta, epsilon = 1e-10);
    }

    #[test]
    fn type_class_beta_handles_zeros_and_underflow() {
        let r = type_class_beta(&[IidBlock { p: vec![1.0, 0.0], q: vec![0.0, 1.0], n: 5 }], 0.1).unwrap();
        assert_eq!(r.beta, 0.0);
        assert!(!r.dh.is_finite());
        let r = type_class_beta(&[IidBlock { p: vec![0.5, 0.5], q: vec![0.999, 0.001], n: 2000 }], 0.3).unwrap();
        assert!(r.ln_beta.is_finite() && r.ln_beta < -700.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn type_class_beta_is_monotone_in_eps(seed in any::<u64>(), n in 1usize..=8) {
            let mut rng = seeded(seed);
            let p = crate::random::random_probability(3, &mut rng);
            let q = crate::random::random_probability(3, &mut rng);
            let mut prev = f64::INFINITY;
            for k in 1..=9 {
                let b = type_class_beta(&[IidBlock { p: p.clone(), q: q.clone(), n }], k as f64 / 10.0).unwrap().beta;
                prop_assert!(b <= prev + 1e-12);
                prev = b;
            }
        }
    }
}
