use itertools::Itertools;

use crate::error::{Error, Result};
use crate::metrics::{ProjectivePair, TangentPoint};

use super::PERMUTATION_CUTOFF;

/// `+1` for even permutations, `-1` for odd ones, by counting inversions.
pub fn permutation_sign(perm: &[usize]) -> f64 {
    let inversions = perm
        .iter()
        .enumerate()
        .map(|(i, a)| perm[i + 1..].iter().filter(|b| *b < a).count())
        .sum::<usize>();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `δ_α` as an explicit double sum over `S_n × S_n`:
///
/// `δ_α = (F/F̃)^{n-α} / ((α-1)! (n-α)!) · Σ ε(σ)ε(τ)
///        Π_{k<α} h_{σ_k τ_k} · Π_{α≤k<n} h̃_{σ_k τ_k} · F_{y^{σ_n}} F_{y^{τ_n}}`
///
/// with `α` running over `1..=n`. Enumerated directly, so limited to `n ≤ 3`.
pub fn delta_alpha_combinatorial(pair: &ProjectivePair, p: &TangentPoint, alpha: usize) -> Result<f64> {
    let n = pair.dimension();
    if n > PERMUTATION_CUTOFF {
        return Err(Error::OracleScopeExceeded {
            n,
            max: PERMUTATION_CUTOFF,
        });
    }
    if alpha == 0 || alpha > n {
        return Err(Error::Config(format!("alpha = {alpha} outside 1..={n}")));
    }
    let (jet, jet_tilde) = pair.jets(p)?;
    let perms: Vec<(Vec<usize>, f64)> = (0..n)
        .permutations(n)
        .map(|s| {
            let sign = permutation_sign(&s);
            (s, sign)
        })
        .collect();

    let mut sum = 0.0;
    for (s, es) in &perms {
        for (t, et) in &perms {
            let mut term = es * et;
            for k in 0..n - 1 {
                let tensor = if k < alpha - 1 { &jet.h } else { &jet_tilde.h };
                term *= tensor[(s[k], t[k])];
            }
            term *= jet.f_y[s[n - 1]] * jet.f_y[t[n - 1]];
            sum += term;
        }
    }
    let ratio = jet.f / jet_tilde.f;
    Ok(ratio.powi((n - alpha) as i32) / (factorial(alpha - 1) * factorial(n - alpha)) * sum)
}
