//! Self-check of the Example 1 instances against independent closed forms.

use std::f64::consts::LN_2;

use crate::error::Result;
use crate::linalg::HermitianMatrix;
use crate::multicopy::{reevaluate_informed, regularized_estimate, DivergenceKind, Witness};
use crate::optimize::{cq_informed_divergence, cq_pair_divergence, minimize_inf, minimize_informed};
use crate::qobjects::{DensityMatrix, ProbDist};

use super::experiment::cq_informed_beta;
use super::instances::{example1_channels, example1_cq_channels};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn kl2(p: f64, q: f64) -> f64 {
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    term(p, q) + term(1.0 - p, 1.0 - q)
}

/// `min_a D(diag((1+a)/2, (1−a)/2) ‖ diag(a/2, 1−a/2))` on a fine grid: the Example 1
/// outputs depend only on the diagonal of the input.
pub fn example1_diagonal_oracle() -> (f64, f64) {
    (1..100_000)
        .map(|k| {
            let a = k as f64 / 100_000.0;
            (a, kl2((1.0 + a) / 2.0, a / 2.0))
        })
        .fold((0.0, f64::INFINITY), |best, x| if x.1 < best.1 { x } else { best })
}

/// Closed-form Example 1 checks plus the CQ-versus-EB comparison.
pub fn verify_example1() -> Result<Vec<Check>> {
    let (n1, n2) = example1_channels();
    let (w1, w2) = example1_cq_channels();
    let mut out = Vec::new();

    let mut worst = 0.0_f64;
    for d in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                let mut m = crate::linalg::CMatrix::zeros(2, 2);
                m[(i, j)] = crate::linalg::c(1.0);
                m[(j, i)] = crate::linalg::c(1.0);
                let h = HermitianMatrix::new(m)?;
                let diag = h.diagonal_real();
                let expected = if d == 0 {
                    HermitianMatrix::from_real_diag(&[diag[0] + 0.5 * diag[1], 0.5 * diag[1]])
                } else {
                    HermitianMatrix::from_real_diag(&[0.5 * diag[0], 0.5 * diag[0] + diag[1]])
                };
                let got = if d == 0 { n1.apply_operator(&h)? } else { n2.apply_operator(&h)? };
                worst = worst.max(got.distance(&expected));
            }
        }
    }
    out.push(check("channel action", worst < 1e-12, format!("max deviation {worst:.2e}")));

    let inf = minimize_inf(&n1, &n2, 1e-8)?;
    let v = inf.value.value();
    out.push(check("D^inf(N1‖N2) = 0", v.abs() <= 1e-6, format!("{v:.3e}")));

    let informed = minimize_informed(&n1, &n2, 1e-8)?;
    let (a, oracle) = example1_diagonal_oracle();
    let v = informed.value.value();
    out.push(check(
        "D(N1‖N2) matches diagonal oracle",
        (v - oracle).abs() <= 2e-3,
        format!("{v:.6} vs {oracle:.6} (a = {a:.4})"),
    ));

    let reg = regularized_estimate(&n1, &n2, 2, DivergenceKind::Informed, 1e-6)?;
    let v = reg.value.value();
    let rho = DensityMatrix::from_diag(&[0.5, 0.0, 0.0, 0.5])?;
    let explicit = reevaluate_informed(&n1, &n2, 2, &rho)?;
    let witness_ok = match &reg.witness {
        Witness::State(r) => (reevaluate_informed(&n1, &n2, 2, r)? - v).abs() < 1e-6,
        _ => false,
    };
    out.push(check(
        "two-copy informed value drops",
        v <= 0.403 && informed.value.value() - v >= 0.12 && witness_ok,
        format!("{v:.5} per copy; explicit input gives {explicit:.5} (¼ ln 5 = {:.5})", 0.25 * 5f64.ln()),
    ));

    let cq = cq_informed_divergence(&w1, &w2)?;
    let v = cq.value.value();
    out.push(check("CQ informed = ln 2", (v - LN_2).abs() <= 1e-9, format!("{v:.12} at x = {}", cq.symbol)));
    let pair = cq_pair_divergence(&w1, &w2, 1e-8)?;
    let v = pair.value.value();
    out.push(check("CQ non-informed = 0", v.abs() <= 1e-6, format!("{v:.3e}")));
    out.push(check(
        "CQ informed exceeds non-informed",
        cq.value.value() > pair.value.value(),
        String::new(),
    ));

    for (eps, expected) in [(0.25, 0.5), (0.5, 0.25)] {
        let b = cq_informed_beta(&w1, &w2, eps)?;
        out.push(check(
            "CQ informed β",
            (b.beta - expected).abs() <= 1e-6,
            format!("ε = {eps}: {:.9} (set side {:.6}) at x = {}", b.beta, b.set_beta, b.symbol),
        ));
    }

    let (e1, e2) = (w1.to_eb_channel(false), w2.to_eb_channel(false));
    let mut worst = 0.0_f64;
    for k in 0..=10 {
        let a = k as f64 / 10.0;
        let rho = DensityMatrix::from_diag(&[a, 1.0 - a])?;
        let p = ProbDist::new(w1.alphabet().to_vec(), vec![a, 1.0 - a])?;
        worst = worst
            .max(e1.apply(&rho)?.trace_distance(&n1.apply(&rho)?))
            .max(e2.apply(&rho)?.trace_distance(&n2.apply(&rho)?))
            .max(w1.apply(&p)?.trace_distance(&n1.apply(&rho)?));
    }
    out.push(check("CQ pair as EB channels", worst < 1e-12, format!("max deviation {worst:.2e}")));
    Ok(out)
}
