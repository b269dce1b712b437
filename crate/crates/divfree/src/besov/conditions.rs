//! Approximating sequences and the level conditions a)-d).

use rayon::prelude::*;
use serde::Serialize;

use super::{BesovError, RegularMeasure};
use crate::jets::{remainder, Jet};
use crate::multi_index::MultiIndex;

/// A sequence passes when every ratio is at most `1 + VALID_SLACK`.
pub const VALID_SLACK: f64 = 1e-9;

/// `(f_nu, a_nu)` for `nu = 0..levels`, jets of order `floor(beta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BesovSequence {
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    /// Exponent `s` of the `2^(s nu)` normalization in condition c).
    pub dyadic_exponent: f64,
    pub jets: Vec<Jet>,
    pub a: Vec<f64>,
}

impl BesovSequence {
    /// `k = ceil(beta) - 1`: orders of the target jet.
    pub fn k(&self) -> u32 {
        (self.beta.ceil() as u32).saturating_sub(1)
    }

    /// `floor(beta)`: orders of the approximating jets.
    pub fn top(&self) -> u32 {
        self.beta.floor() as u32
    }

    pub fn levels(&self) -> usize {
        self.jets.len()
    }

    /// `(sum a_nu^q)^(1/q)`.
    pub fn norm(&self) -> f64 {
        self.a.iter().map(|a| a.powf(self.q)).sum::<f64>().powf(1.0 / self.q)
    }

    fn validate(&self) -> Result<(), BesovError> {
        if !(self.beta > 0.0) {
            return Err(BesovError::InvalidBeta(self.beta));
        }
        for e in [self.p, self.q] {
            if !(e >= 1.0) {
                return Err(BesovError::InvalidExponent(e));
            }
        }
        if self.jets.len() != self.a.len() {
            return Err(BesovError::LengthMismatch { jets: self.jets.len(), scalars: self.a.len() });
        }
        Ok(())
    }
}

/// Deepest level: the first `nu` with `2^-nu < 4 h`.
pub fn max_level(grid_h: f64) -> usize {
    let mut nu = 0;
    while 0.5f64.powi(nu as i32) >= 4.0 * grid_h {
        nu += 1;
    }
    nu
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionEntry {
    pub level: usize,
    pub condition: char,
    pub j: [u32; 2],
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BesovReport {
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    pub dyadic_exponent: f64,
    pub levels: usize,
    pub entries: Vec<ConditionEntry>,
    pub max_ratio: f64,
    pub valid: bool,
    /// Levels with a ratio above `1 + VALID_SLACK`.
    pub violated_levels: Vec<usize>,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// `(2^(s nu) sum_{|x - y| < 2^-nu} |R_j(x, y)|^p mu_x mu_y)^(1/p)`.
fn near_diagonal(jet: &Jet, jdx: MultiIndex, mu: &RegularMeasure, nu: usize, p: f64, s: f64) -> Result<f64, BesovError> {
    let r = 0.5f64.powi(nu as i32);
    // Per-point sums in index order, then a sequential total: deterministic.
    let rows: Vec<f64> = (0..mu.len())
        .into_par_iter()
        .map(|x| {
            let mut acc = 0.0;
            let mut err = None;
            mu.locator().for_each_within(mu.points[x], r, |y, _| match remainder(jet, jdx, x, y) {
                Ok(v) => acc += v.abs().powf(p) * mu.weights[y],
                Err(e) => err = Some(e),
            });
            match err {
                Some(_) => f64::NAN,
                None => acc * mu.weights[x],
            }
        })
        .collect();
    if rows.iter().any(|v| v.is_nan()) {
        return Err(BesovError::OrderTooLow { needed: jdx.order(), got: jet.order });
    }
    let total: f64 = rows.iter().sum();
    Ok((2f64.powf(s * nu as f64) * total).powf(1.0 / p))
}

fn diff_norm(mu: &RegularMeasure, a: &[f64], b: &[f64], p: f64) -> f64 {
    mu.lp_norm(a.iter().zip(b).map(|(x, y)| x - y), p)
}

/// Left-hand sides of a)-d) with unit right-hand factors: entry `rhs` holds
/// the factor multiplying `a_nu`.
fn raw_conditions(f: &Jet, seq: &BesovSequence, mu: &RegularMeasure) -> Result<Vec<ConditionEntry>, BesovError> {
    seq.validate()?;
    let (k, top) = (seq.k(), seq.top());
    if f.points != mu.points {
        return Err(BesovError::SampleMismatch);
    }
    if f.order < k {
        return Err(BesovError::OrderTooLow { needed: k, got: f.order });
    }
    for jet in &seq.jets {
        if jet.points != mu.points {
            return Err(BesovError::SampleMismatch);
        }
        if jet.order < top {
            return Err(BesovError::OrderTooLow { needed: top, got: jet.order });
        }
    }
    let integer = seq.beta == (k + 1) as f64;
    let p = seq.p;
    let mut out = Vec::new();
    let push = |out: &mut Vec<ConditionEntry>, level, condition, jdx: MultiIndex, lhs, rhs| {
        out.push(ConditionEntry { level, condition, j: [jdx.0, jdx.1], lhs, rhs, ratio: 0.0 });
    };
    for (nu, jet) in seq.jets.iter().enumerate() {
        let jet = jet.truncate(top)?;
        let decay = |jdx: MultiIndex| 0.5f64.powf(nu as f64 * (seq.beta - jdx.order() as f64));
        for jdx in MultiIndex::up_to(k) {
            let lhs = diff_norm(mu, f.column(jdx), jet.column(jdx), p);
            push(&mut out, nu, 'a', jdx, lhs, decay(jdx));
        }
        if integer && nu + 1 < seq.jets.len() {
            for jdx in MultiIndex::of_order(k + 1) {
                let lhs = diff_norm(mu, jet.column(jdx), seq.jets[nu + 1].column(jdx), p);
                push(&mut out, nu, 'b', jdx, lhs, 1.0);
            }
        }
        for jdx in MultiIndex::up_to(top) {
            let lhs = near_diagonal(&jet, jdx, mu, nu, p, seq.dyadic_exponent)?;
            push(&mut out, nu, 'c', jdx, lhs, decay(jdx));
        }
        if nu == 0 {
            for jdx in MultiIndex::up_to(top) {
                let lhs = mu.lp_norm(jet.column(jdx).iter().copied(), p);
                push(&mut out, nu, 'd', jdx, lhs, 1.0);
            }
        }
    }
    Ok(out)
}

/// Ratios `LHS / RHS` of a)-d) per level and multi-index.
pub fn besov_conditions(f: &Jet, seq: &BesovSequence, mu: &RegularMeasure) -> Result<BesovReport, BesovError> {
    let mut entries = raw_conditions(f, seq, mu)?;
    for e in &mut entries {
        e.rhs *= seq.a[e.level];
        e.ratio = ratio(e.lhs, e.rhs);
    }
    let max_ratio = entries.iter().map(|e| e.ratio).fold(0.0, f64::max);
    let mut violated_levels: Vec<usize> =
        entries.iter().filter(|e| !(e.ratio <= 1.0 + VALID_SLACK)).map(|e| e.level).collect();
    violated_levels.dedup();
    Ok(BesovReport {
        beta: seq.beta,
        p: seq.p,
        q: seq.q,
        dyadic_exponent: seq.dyadic_exponent,
        levels: seq.levels(),
        valid: violated_levels.is_empty(),
        max_ratio,
        entries,
        violated_levels,
    })
}

/// The smallest admissible `a_nu` for the given jets: the largest
/// `LHS / factor` at each level.
pub fn fit_sequence(
    f: &Jet,
    jets: Vec<Jet>,
    beta: f64,
    p: f64,
    q: f64,
    dyadic_exponent: f64,
    mu: &RegularMeasure,
) -> Result<BesovSequence, BesovError> {
    let mut seq = BesovSequence { beta, p, q, dyadic_exponent, a: vec![0.0; jets.len()], jets };
    let raw = raw_conditions(f, &seq, mu)?;
    for e in raw {
        let need = if e.rhs > 0.0 { e.lhs / e.rhs } else { 0.0 };
        seq.a[e.level] = seq.a[e.level].max(need);
    }
    Ok(seq)
}

/// `f_nu = f` on every level (padded with zeros to order `floor(beta)`),
/// with fitted `a_nu`.
pub fn canonical_sequence(
    f: &Jet,
    beta: f64,
    p: f64,
    q: f64,
    dyadic_exponent: f64,
    levels: usize,
    mu: &RegularMeasure,
) -> Result<BesovSequence, BesovError> {
    let top = beta.floor() as u32;
    let padded = if f.order >= top {
        f.truncate(top)?
    } else {
        let mut z = Jet::zeros(top, f.points.clone());
        for (pos, col) in f.values.iter().enumerate() {
            z.values[pos] = col.clone();
        }
        z
    };
    fit_sequence(f, vec![padded; levels], beta, p, q, dyadic_exponent, mu)
}
