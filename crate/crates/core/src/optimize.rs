//! Convex minimisation of channel divergences.
//!
//! One Frank–Wolfe engine serves every problem here. Its variable is a short
//! list of blocks. Each block is either a density matrix (the linear
//! minimisation oracle picks the bottom eigenvector of the gradient) or a
//! probability vector stored as a diagonal state (the oracle picks the
//! smallest diagonal entry).

use rand::Rng;

use crate::divergences::{relative_entropy, Divergence};
use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{eigh, frechet_log_at, matrix_function, HermitianMatrix, MatrixFunction};
use crate::numeric::golden_section_min;
use crate::qobjects::{CQChannel, Channel, DensityMatrix, ProbDist};
use crate::random::{random_pure_state, random_state, seeded};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 10_000;
const LINE_SEARCH_TOL: f64 = 1e-10;
const SHRINK: f64 = 1e-3;
const PROBE_POINTS: usize = 1000;

/// Minimum found by an iterative solver.
#[derive(Clone, Debug)]
pub struct OptResult<T> {
    pub value: Divergence,
    /// Minimiser; `None` when the objective is `+∞` everywhere.
    pub argument: Option<T>,
    pub iterations: usize,
    /// Frank–Wolfe gap at the returned point (0 for exact finite searches).
    pub gap: f64,
    pub converged: bool,
}

impl<T> OptResult<T> {
    fn infinite() -> Self {
        OptResult {
            value: Divergence::INFINITE,
            argument: None,
            iterations: 0,
            gap: 0.0,
            converged: true,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum BlockKind {
    State,
    Simplex,
}

#[derive(Clone, Copy, PartialEq)]
enum StepRule {
    Joint,
    /// One step per block, then a joint step.
    Alternating,
}

/// `D(A‖B)` for states, `+∞` on support violation.
fn divergence_value(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    let a = DensityMatrix::from_hermitian_unchecked(a.clone());
    let b = DensityMatrix::from_hermitian_unchecked(b.clone());
    relative_entropy(&a, &b).map_or(f64::INFINITY, |d| d.value())
}

/// `(log A − log B + I, Dlog_B[A])`: the partial derivatives of `D(A‖B)` in `A` and (up to sign) in `B`.
fn divergence_partials(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let log_a = matrix_function(a, MatrixFunction::Log)?;
    let b_spec = eigh(b);
    let log_b = crate::linalg::apply_function(&b_spec, MatrixFunction::Log)?;
    let d = a.dim();
    let da = &(&log_a - &log_b) + &HermitianMatrix::identity(d);
    let db = frechet_log_at(&b_spec, a)?;
    Ok((da, db))
}

trait Objective {
    fn value(&self, x: &[HermitianMatrix]) -> f64;
    fn gradient(&self, x: &[HermitianMatrix]) -> Result<Vec<HermitianMatrix>>;
}

/// `ρ ↦ D(N1(ρ)‖N2(ρ))`.
struct Informed<'a> {
    n1: &'a Channel,
    n2: &'a Channel,
}

impl Objective for Informed<'_> {
    fn value(&self, x: &[HermitianMatrix]) -> f64 {
        match (self.n1.apply_operator(&x[0]), self.n2.apply_operator(&x[0])) {
            (Ok(a), Ok(b)) => divergence_value(&a, &b),
            _ => f64::INFINITY,
        }
    }

    fn gradient(&self, x: &[HermitianMatrix]) -> Result<Vec<HermitianMatrix>> {
        let a = self.n1.apply_operator(&x[0])?;
        let b = self.n2.apply_operator(&x[0])?;
        let (da, db) = divergence_partials(&a, &b)?;
        Ok(vec![&self.n1.adjoint_apply(&da)? - &self.n2.adjoint_apply(&db)?])
    }
}

/// `(ρ, σ) ↦ D(N1(ρ)‖N2(σ))`.
struct Pair<'a> {
    n1: &'a Channel,
    n2: &'a Channel,
}

impl Objective for Pair<'_> {
    fn value(&self, x: &[HermitianMatrix]) -> f64 {
        match (self.n1.apply_operator(&x[0]), self.n2.apply_operator(&x[1])) {
            (Ok(a), Ok(b)) => divergence_value(&a, &b),
            _ => f64::INFINITY,
        }
    }

    fn gradient(&self, x: &[HermitianMatrix]) -> Result<Vec<HermitianMatrix>> {
        let a = self.n1.apply_operator(&x[0])?;
        let b = self.n2.apply_operator(&x[1])?;
        let (da, db) = divergence_partials(&a, &b)?;
        Ok(vec![
            self.n1.adjoint_apply(&da)?,
            self.n2.adjoint_apply(&db)?.scaled(-1.0),
        ])
    }
}

/// Gradient of the informed objective `ρ ↦ D(N1(ρ)‖N2(ρ))`.
pub fn grad_informed(n1: &Channel, n2: &Channel, rho: &DensityMatrix) -> Result<HermitianMatrix> {
    ensure_dim(n1.in_dim(), n2.in_dim())?;
    ensure_dim(n1.out_dim(), n2.out_dim())?;
    ensure_dim(n1.in_dim(), rho.dim())?;
    let a = n1.apply(rho)?;
    let b = n2.apply(rho)?;
    if !relative_entropy(&a, &b)?.is_finite() {
        return Err(Error::domain(
            "output of the first channel is not supported in the output of the second",
        ));
    }
    Ok(Informed { n1, n2 }.gradient(&[rho.as_hermitian().clone()])?.remove(0))
}

struct FwOutcome {
    value: f64,
    point: Vec<HermitianMatrix>,
    iterations: usize,
    gap: f64,
    converged: bool,
}

fn lmo(kind: BlockKind, g: &HermitianMatrix) -> (HermitianMatrix, f64) {
    match kind {
        BlockKind::State => {
            let spec = eigh(g);
            (HermitianMatrix::projector(&spec.eigenvector(0)), spec.min())
        }
        BlockKind::Simplex => {
            let diag = g.diagonal_real();
            let (idx, min) = diag
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
            let mut e = vec![0.0; diag.len()];
            e[idx] = 1.0;
            (HermitianMatrix::from_real_diag(&e), min)
        }
    }
}

/// Away vertex: the support direction of `x` along which the gradient is largest,
/// with its weight in `x`.
fn away_vertex(kind: BlockKind, g: &HermitianMatrix, x: &HermitianMatrix) -> (HermitianMatrix, f64, f64) {
    match kind {
        BlockKind::State => {
            let spec = eigh(x);
            let mut best: Option<(f64, usize)> = None;
            for (i, &lam) in spec.eigenvalues.iter().enumerate() {
                if lam <= 1e-14 {
                    continue;
                }
                let u = spec.eigenvector(i);
                let val = (u.adjoint() * g.matrix() * &u)[(0, 0)].re;
                if best.is_none_or(|(bv, _)| val > bv) {
                    best = Some((val, i));
                }
            }
            let (val, i) = best.unwrap_or((f64::NEG_INFINITY, spec.dim() - 1));
            let proj = HermitianMatrix::projector(&spec.eigenvector(i));
            (proj, spec.eigenvalues[i].clamp(0.0, 1.0), val)
        }
        BlockKind::Simplex => {
            let gd = g.diagonal_real();
            let xd = x.diagonal_real();
            let (idx, val) = gd
                .iter()
                .zip(&xd)
                .enumerate()
                .filter(|(_, (_, &w))| w > 1e-14)
                .fold((0, f64::NEG_INFINITY), |acc, (i, (&gv, _))| if gv > acc.1 { (i, gv) } else { acc });
            let mut e = vec![0.0; xd.len()];
            e[idx] = 1.0;
            (HermitianMatrix::from_real_diag(&e), xd[idx].clamp(0.0, 1.0), val)
        }
    }
}

/// `x + γ d` on the `active` blocks.
fn advance(x: &[HermitianMatrix], d: &[HermitianMatrix], gamma: f64, active: &[bool]) -> Vec<HermitianMatrix> {
    x.iter()
        .zip(d)
        .zip(active)
        .map(|((xi, di), &on)| if on { xi + &di.scaled(gamma) } else { xi.clone() })
        .collect()
}

fn blend(x: &[HermitianMatrix], v: &[HermitianMatrix], gamma: f64, active: &[bool]) -> Vec<HermitianMatrix> {
    x.iter()
        .zip(v)
        .zip(active)
        .map(|((xi, vi), &on)| {
            if on {
                &xi.scaled(1.0 - gamma) + &vi.scaled(gamma)
            } else {
                xi.clone()
            }
        })
        .collect()
}

/// Exact line search on `x + γ d`, `γ ∈ [0, γ_max]`, over the `active` blocks.
fn line_step(
    obj: &dyn Objective,
    x: &[HermitianMatrix],
    d: &[HermitianMatrix],
    gamma_max: f64,
    active: &[bool],
) -> (f64, Vec<HermitianMatrix>) {
    let (gamma, value) = golden_section_min(
        |g| obj.value(&advance(x, d, g, active)),
        0.0,
        gamma_max,
        LINE_SEARCH_TOL,
    );
    (value, advance(x, d, gamma, active))
}

fn frank_wolfe(
    obj: &dyn Objective,
    kinds: &[BlockKind],
    start: Vec<HermitianMatrix>,
    anchor: &[HermitianMatrix],
    tol: f64,
    rule: StepRule,
) -> FwOutcome {
    let mut x = start;
    let mut value = obj.value(&x);
    let mut gap = f64::INFINITY;
    let mut stalls = 0;
    let mut shrinks = 0;
    let all = vec![true; kinds.len()];
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let grad = match obj.gradient(&x) {
            Ok(g) => g,
            Err(_) => {
                // Gradient undefined on this face: pull toward the interior.
                shrinks += 1;
                if shrinks > 100 {
                    break;
                }
                let shrunk = blend(&x, anchor, SHRINK, &all);
                let v = obj.value(&shrunk);
                if !v.is_finite() {
                    break;
                }
                x = shrunk;
                value = v;
                continue;
            }
        };
        iterations += 1;
        gap = 0.0;
        // Per block, the Frank–Wolfe direction or the away direction, whichever descends faster.
        let mut dirs = Vec::with_capacity(kinds.len());
        let mut limits = Vec::with_capacity(kinds.len());
        for ((kind, g), xi) in kinds.iter().zip(&grad).zip(&x) {
            let (v, min) = lmo(*kind, g);
            let here = g.inner(xi);
            gap += (here - min).max(0.0);
            let (a, weight, top) = away_vertex(*kind, g, xi);
            if top - here > here - min && weight < 1.0 {
                dirs.push(xi - &a);
                limits.push(weight / (1.0 - weight));
            } else {
                dirs.push(&v - xi);
                limits.push(1.0);
            }
        }
        if gap <= tol {
            return FwOutcome {
                value,
                point: x,
                iterations,
                gap,
                converged: true,
            };
        }
        let before = value;
        let mut moved = false;
        if rule == StepRule::Alternating && kinds.len() > 1 {
            // Block steps touch disjoint blocks, so every direction stays valid.
            for b in 0..kinds.len() {
                let mut active = vec![false; kinds.len()];
                active[b] = true;
                let (v, nx) = line_step(obj, &x, &dirs, limits[b], &active);
                if v < value {
                    value = v;
                    x = nx;
                    moved = true;
                }
            }
        }
        if !moved {
            let joint_limit = limits.iter().copied().fold(1.0, f64::min);
            let (v, nx) = line_step(obj, &x, &dirs, joint_limit, &all);
            if v < value {
                value = v;
                x = nx;
            }
        }
        if value >= before {
            stalls += 1;
            if stalls >= 3 {
                break;
            }
        } else {
            stalls = 0;
        }
    }
    FwOutcome {
        value,
        point: x,
        iterations,
        gap,
        converged: gap <= tol,
    }
}

/// Start point and interior anchor: the maximally mixed point when finite,
/// otherwise the best of a seeded random probe (which then also serves as anchor).
fn initial_point(
    obj: &dyn Objective,
    kinds: &[BlockKind],
    dims: &[usize],
) -> Option<Vec<HermitianMatrix>> {
    let mm: Vec<HermitianMatrix> = dims
        .iter()
        .map(|&d| HermitianMatrix::identity(d).scaled(1.0 / d as f64))
        .collect();
    if obj.value(&mm).is_finite() {
        return Some(mm);
    }
    let mut rng = seeded(0x0b5e_55ed);
    let mut best: Option<(f64, Vec<HermitianMatrix>)> = None;
    for k in 0..PROBE_POINTS {
        let point: Vec<HermitianMatrix> = kinds
            .iter()
            .zip(dims)
            .map(|(kind, &d)| probe_block(*kind, d, k, &mut rng))
            .collect();
        let v = obj.value(&point);
        if v.is_finite() && best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, point));
        }
    }
    best.map(|(_, p)| p)
}

/// Probe points cycle through vertices, random pure states and full-rank states.
fn probe_block(kind: BlockKind, d: usize, k: usize, rng: &mut impl Rng) -> HermitianMatrix {
    match (kind, k % 3) {
        (BlockKind::Simplex, 0) | (BlockKind::State, 0) => {
            let i = rng.gen_range(0..d);
            DensityMatrix::basis_state(d, i).into_hermitian()
        }
        (BlockKind::Simplex, _) => {
            let p = crate::random::random_probability(d, rng);
            HermitianMatrix::from_real_diag(&p)
        }
        (BlockKind::State, 1) => random_pure_state(d, rng).into_hermitian(),
        (BlockKind::State, _) => random_state(d, rng).into_hermitian(),
    }
}

fn solve(
    obj: &dyn Objective,
    kinds: &[BlockKind],
    dims: &[usize],
    start: Option<Vec<HermitianMatrix>>,
    tol: f64,
    rule: StepRule,
) -> Option<FwOutcome> {
    let anchor = initial_point(obj, kinds, dims)?;
    let start = match start {
        Some(s) if obj.value(&s).is_finite() => s,
        _ => anchor.clone(),
    };
    Some(frank_wolfe(obj, kinds, start, &anchor, tol, rule))
}

fn to_state(h: HermitianMatrix) -> DensityMatrix {
    // Renormalise away round-off accumulated over many convex combinations.
    let t = h.trace();
    DensityMatrix::from_hermitian_unchecked(h.scaled(1.0 / t))
}

fn check_pair(n1: &Channel, n2: &Channel) -> Result<()> {
    ensure_dim(n1.in_dim(), n2.in_dim())?;
    ensure_dim(n1.out_dim(), n2.out_dim())
}

/// `min_ρ D(N1(ρ)‖N2(ρ))` by Frank–Wolfe from the maximally mixed state.
pub fn minimize_informed(n1: &Channel, n2: &Channel, tol: f64) -> Result<OptResult<DensityMatrix>> {
    minimize_informed_from(n1, n2, None, tol)
}

/// [`minimize_informed`] from a chosen starting state (falls back to the default
/// start when the objective is infinite there).
pub fn minimize_informed_from(
    n1: &Channel,
    n2: &Channel,
    start: Option<&DensityMatrix>,
    tol: f64,
) -> Result<OptResult<DensityMatrix>> {
    check_pair(n1, n2)?;
    if let Some(s) = start {
        ensure_dim(n1.in_dim(), s.dim())?;
    }
    let obj = Informed { n1, n2 };
    let kinds = [BlockKind::State];
    let start = start.map(|s| vec![s.as_hermitian().clone()]);
    let Some(out) = solve(&obj, &kinds, &[n1.in_dim()], start, tol, StepRule::Joint) else {
        return Ok(OptResult::infinite());
    };
    Ok(OptResult {
        value: Divergence::from_raw(out.value.max(0.0)),
        argument: out.point.into_iter().next().map(to_state),
        iterations: out.iterations,
        gap: out.gap,
        converged: out.converged,
    })
}

/// `min_{ρ,σ} D(N1(ρ)‖N2(σ))` by joint Frank–Wolfe on the product of state spaces.
pub fn minimize_inf(
    n1: &Channel,
    n2: &Channel,
    tol: f64,
) -> Result<OptResult<(DensityMatrix, DensityMatrix)>> {
    ensure_dim(n1.out_dim(), n2.out_dim())?;
    let obj = Pair { n1, n2 };
    let kinds = [BlockKind::State, BlockKind::State];
    let Some(out) = solve(&obj, &kinds, &[n1.in_dim(), n2.in_dim()], None, tol, StepRule::Joint) else {
        return Ok(OptResult::infinite());
    };
    let mut it = out.point.into_iter().map(to_state);
    let rho = it.next().expect("two blocks");
    let sigma = it.next().expect("two blocks");
    Ok(OptResult {
        value: Divergence::from_raw(out.value.max(0.0)),
        argument: Some((rho, sigma)),
        iterations: out.iterations,
        gap: out.gap,
        converged: out.converged,
    })
}

/// Value and minimising symbol of `min_x D(ρ_{1,x}‖ρ_{2,x})`; first declared symbol wins ties.
#[derive(Clone, Debug)]
pub struct SymbolMin {
    pub value: Divergence,
    pub index: usize,
    pub symbol: String,
}

fn check_cq_pair(w1: &CQChannel, w2: &CQChannel) -> Result<()> {
    if w1.alphabet() != w2.alphabet() {
        return Err(Error::validation(format!(
            "CQ channels use different alphabets: {:?} vs {:?}",
            w1.alphabet(),
            w2.alphabet()
        )));
    }
    ensure_dim(w1.output_dim(), w2.output_dim())
}

/// `min_{x∈X} D(ρ_{1,x}‖ρ_{2,x})`, exact.
pub fn cq_informed_divergence(w1: &CQChannel, w2: &CQChannel) -> Result<SymbolMin> {
    check_cq_pair(w1, w2)?;
    let mut best = (Divergence::INFINITE, 0);
    for (x, (r1, r2)) in w1.outputs().iter().zip(w2.outputs()).enumerate() {
        let d = relative_entropy(r1, r2)?;
        if d < best.0 {
            best = (d, x);
        }
    }
    Ok(SymbolMin {
        value: best.0,
        index: best.1,
        symbol: w1.alphabet()[best.1].clone(),
    })
}

/// `(p, p') ↦ D(Σ p(x) ρ_{1,x} ‖ Σ p'(x) ρ_{2,x})` with `p`, `p'` stored as diagonal states.
struct CqPair<'a> {
    w1: &'a CQChannel,
    w2: &'a CQChannel,
}

impl CqPair<'_> {
    fn outputs(&self, x: &[HermitianMatrix]) -> (HermitianMatrix, HermitianMatrix) {
        let a = self.w1.mixture(&x[0].diagonal_real()).into_hermitian();
        let b = self.w2.mixture(&x[1].diagonal_real()).into_hermitian();
        (a, b)
    }
}

impl Objective for CqPair<'_> {
    fn value(&self, x: &[HermitianMatrix]) -> f64 {
        let (a, b) = self.outputs(x);
        divergence_value(&a, &b)
    }

    fn gradient(&self, x: &[HermitianMatrix]) -> Result<Vec<HermitianMatrix>> {
        let (a, b) = self.outputs(x);
        let (da, db) = divergence_partials(&a, &b)?;
        let g1: Vec<f64> = self.w1.outputs().iter().map(|r| r.as_hermitian().inner(&da)).collect();
        let g2: Vec<f64> = self.w2.outputs().iter().map(|r| -r.as_hermitian().inner(&db)).collect();
        Ok(vec![HermitianMatrix::from_real_diag(&g1), HermitianMatrix::from_real_diag(&g2)])
    }
}

fn to_dist(alphabet: &[String], h: &HermitianMatrix) -> ProbDist {
    let w: Vec<f64> = h.diagonal_real().into_iter().map(|v| v.max(0.0)).collect();
    ProbDist::from_weights_normalized(alphabet.to_vec(), w)
}

/// `min_{p,p'} D(Σ p(x) ρ_{1,x} ‖ Σ p'(x) ρ_{2,x})`: alternating block steps with a joint polish.
/// The alphabets may differ; output dimensions must agree.
pub fn cq_pair_divergence(
    w1: &CQChannel,
    w2: &CQChannel,
    tol: f64,
) -> Result<OptResult<(ProbDist, ProbDist)>> {
    ensure_dim(w1.output_dim(), w2.output_dim())?;
    let obj = CqPair { w1, w2 };
    let kinds = [BlockKind::Simplex, BlockKind::Simplex];
    let Some(out) = solve(&obj, &kinds, &[w1.len(), w2.len()], None, tol, StepRule::Alternating) else {
        return Ok(OptResult::infinite());
    };
    let p = to_dist(w1.alphabet(), &out.point[0]);
    let q = to_dist(w2.alphabet(), &out.point[1]);
    Ok(OptResult {
        value: Divergence::from_raw(out.value.max(0.0)),
        argument: Some((p, q)),
        iterations: out.iterations,
        gap: out.gap,
        converged: out.converged,
    })
}

/// Objective of [`minimize_informed`] at a given input, `D(N1(ρ)‖N2(ρ))`.
pub fn informed_objective(n1: &Channel, n2: &Channel, rho: &DensityMatrix) -> Result<Divergence> {
    check_pair(n1, n2)?;
    relative_entropy(&n1.apply(rho)?, &n2.apply(rho)?)
}
