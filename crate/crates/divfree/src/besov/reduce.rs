//! Dropping the derivatives of an approximating sequence, and monotone
//! compression of Besov data.

use serde::Serialize;

use super::conditions::{besov_conditions, BesovReport, BesovSequence};
use super::{BesovError, RegularMeasure};
use crate::approx::{compress_jet, CompressionMap};
use crate::jets::Jet;
use crate::multi_index::MultiIndex;

#[derive(Debug, Clone)]
pub struct Reduction {
    pub seq: BesovSequence,
    /// `sum a~^q / sum a^q`.
    pub ratio: f64,
    /// `(1 + sup_nu sum_l B_nu / l!)^q` with `B_nu = (2^(s nu) M_nu)^(1/p)`,
    /// for non-integer `beta`; `M_nu` is the largest ball mass at radius
    /// `2^-nu`.
    pub c_theory: Option<f64>,
    pub report: BesovReport,
}

fn max_entry(jet: &Jet) -> f64 {
    jet.higher_sup()
}

/// `(2^(s nu) max_y mu(B(y, 2^-nu)))^(1/p)` per level.
fn ball_factors(seq: &BesovSequence, mu: &RegularMeasure) -> Vec<f64> {
    (0..seq.levels())
        .map(|nu| {
            let m = mu.max_ball_mass(0.5f64.powi(nu as i32));
            (2f64.powf(seq.dyadic_exponent * nu as f64) * m).powf(1.0 / seq.p)
        })
        .collect()
}

/// Replaces every `f_nu` by `(f_nu^(0), 0, ...)` and enlarges `a_nu` by the
/// dropped Taylor terms:
///
/// `a~_nu = a_nu + 2^(nu beta) sum_{1 <= |l| <= floor(beta)} 2^(-nu |l|) B_nu N_l / l!`
///
/// where `N_l` bounds `||f_nu^(l)||_p`: `2^(-nu (beta - |l|)) a_nu` from a)
/// when `|l| <= k`, and `2 sum_{i <= nu} a_i` otherwise, or the measured
/// norm when smaller.
pub fn zero_derivative_reduce(f: &Jet, seq: &BesovSequence, mu: &RegularMeasure) -> Result<Reduction, BesovError> {
    let target = max_entry(f);
    if target != 0.0 {
        return Err(BesovError::NonzeroTarget(target));
    }
    let (k, top) = (seq.k(), seq.top());
    let balls = ball_factors(seq, mu);
    let mut a_new = Vec::with_capacity(seq.levels());
    let mut partial = 0.0;
    let mut sup_sum = 0.0f64;
    for (nu, &a) in seq.a.iter().enumerate() {
        partial += a;
        let nuf = nu as f64;
        let mut extra = 0.0;
        let mut unit = 0.0;
        for l in MultiIndex::up_to(top).into_iter().filter(|l| l.order() >= 1) {
            let lo = l.order() as f64;
            let bound = if l.order() <= k { 0.5f64.powf(nuf * (seq.beta - lo)) * a } else { 2.0 * partial };
            let bound = bound.min(mu.lp_norm(seq.jets[nu].column(l).iter().copied(), seq.p));
            extra += 2f64.powf(nuf * seq.beta) * 0.5f64.powf(nuf * lo) * balls[nu] * bound / l.factorial();
            unit += balls[nu] / l.factorial();
        }
        sup_sum = sup_sum.max(unit);
        a_new.push(a + extra);
    }
    let jets = seq
        .jets
        .iter()
        .map(|j| {
            let mut r = j.clone();
            for col in r.values.iter_mut().skip(1) {
                col.iter_mut().for_each(|v| *v = 0.0);
            }
            r
        })
        .collect();
    let out = BesovSequence { jets, a: a_new, ..seq.clone() };
    let before: f64 = seq.a.iter().map(|a| a.powf(seq.q)).sum();
    let after: f64 = out.a.iter().map(|a| a.powf(seq.q)).sum();
    let ratio = if before > 0.0 { after / before } else { 1.0 };
    let integer = seq.beta == (k + 1) as f64;
    let c_theory = (!integer).then(|| (1.0 + sup_sum).powf(seq.q));
    let report = besov_conditions(f, &out, mu)?;
    Ok(Reduction { seq: out, ratio, c_theory, report })
}

#[derive(Debug, Clone)]
pub struct BesovCompression {
    pub jet: Jet,
    pub seq: BesovSequence,
    /// `sup |eta|`, the `C^0` size of the compressed data.
    pub eps: f64,
    /// `C = sup_nu 2 (2^(s nu) mu(K) M_nu)^(1/p)`.
    pub c_constant: f64,
    pub report: BesovReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesovCompressionSummary {
    pub eps: f64,
    pub c_constant: f64,
    pub norm: f64,
    pub valid: bool,
    pub max_ratio: f64,
}

impl BesovCompression {
    pub fn summary(&self) -> BesovCompressionSummary {
        BesovCompressionSummary {
            eps: self.eps,
            c_constant: self.c_constant,
            norm: self.seq.norm(),
            valid: self.report.valid,
            max_ratio: self.report.max_ratio,
        }
    }
}

/// `f_eps = eta o f`, `f_(eps, nu) = eta o f_nu`, with
///
/// `a_(eps, nu) = max(min(a_nu, C 2^(beta nu) eps), min(2^(beta nu + 1) eps mu(K)^(1/p), a_nu))`
///
/// for `nu >= 1` and `a_(eps, 0) = min(a_0, max(2 eps mu(K)^(1/p), C eps))`.
pub fn besov_compress(
    f: &Jet,
    seq: &BesovSequence,
    eta: &CompressionMap,
    mu: &RegularMeasure,
) -> Result<BesovCompression, BesovError> {
    let target = max_entry(f);
    if target != 0.0 {
        return Err(BesovError::NonzeroTarget(target));
    }
    if let Some(nu) = seq.jets.iter().position(|j| j.higher_sup() != 0.0) {
        return Err(BesovError::Unreduced(nu));
    }
    let map = |j: &Jet| compress_jet(j, eta).map_err(|_| BesovError::Unreduced(0));
    let jet = map(f)?;
    let jets = seq.jets.iter().map(map).collect::<Result<Vec<_>, _>>()?;
    let eps = eta.sup();
    let mass_p = mu.total_mass.powf(1.0 / seq.p);
    let c_constant = ball_factors(seq, mu).iter().map(|b| 2.0 * mass_p * b).fold(0.0, f64::max);
    let a = seq
        .a
        .iter()
        .enumerate()
        .map(|(nu, &a)| {
            if nu == 0 {
                a.min((2.0 * eps * mass_p).max(c_constant * eps))
            } else {
                let up = 2f64.powf(seq.beta * nu as f64);
                a.min(c_constant * up * eps).max((2.0 * up * eps * mass_p).min(a))
            }
        })
        .collect();
    let out = BesovSequence { jets, a, ..seq.clone() };
    let report = besov_conditions(&jet, &out, mu)?;
    Ok(BesovCompression { jet, seq: out, eps, c_constant, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{compression_map, cover_values};
    use crate::besov::{canonical_sequence, fit_sequence, sample_measure};
    use crate::geometry::{make_compact_set, Shape};
    use crate::grid::Grid;

    fn setup() -> (RegularMeasure, Jet) {
        let g = Grid::square(-1.0, 2.0, 128).unwrap();
        let k = make_compact_set(&[Shape::disk([-0.45, 0.0], 0.15), Shape::disk([0.45, 0.0], 0.15)], g).unwrap();
        let mu = sample_measure(&k, 1.0, 400).unwrap();
        let f0 = mu.points.iter().map(|p| if p[0] > 0.0 { 1.0 } else { 0.0 }).collect();
        let f = Jet::from_values(1, mu.points.clone(), f0).unwrap();
        (mu, f)
    }

    #[test]
    fn reduction_of_a_sequence_with_slopes() {
        let (mu, f) = setup();
        let jets: Vec<Jet> = (0..6)
            .map(|nu| {
                let amp = 0.5f64.powi(nu + 1);
                Jet::from_fn(1, mu.points.clone(), |p| {
                    let base = if p[0] > 0.0 { 1.0 } else { 0.0 };
                    vec![base + amp * p[1], 0.0, amp]
                })
            })
            .collect();
        let seq = fit_sequence(&f, jets, 1.5, 2.0, 2.0, 1.0, &mu).unwrap();
        assert!(besov_conditions(&f, &seq, &mu).unwrap().valid);
        let red = zero_derivative_reduce(&f, &seq, &mu).unwrap();
        assert!(red.report.valid, "{:?}", red.report.max_ratio);
        assert!(red.seq.jets.iter().all(|j| j.higher_sup() == 0.0));
        assert!(red.ratio <= red.c_theory.unwrap());
        // Idempotent up to the constant.
        let again = zero_derivative_reduce(&f, &red.seq, &mu).unwrap();
        assert_eq!(again.seq.a, red.seq.a);
    }

    #[test]
    fn compression_shrinks_the_sequence() {
        let (mu, f) = setup();
        let f = Jet::from_values(0, f.points.clone(), f.values[0].clone()).unwrap();
        let seq = canonical_sequence(&f, 0.5, 2.0, 2.0, 1.0, 6, &mu).unwrap();
        let mut prev = seq.norm();
        let mut eps = 0.5;
        for _ in 0..4 {
            let eta = compression_map(&cover_values(&f.values[0], eps).unwrap()).unwrap();
            let out = besov_compress(&f, &seq, &eta, &mu).unwrap();
            assert!(out.report.valid, "{:?}", out.report);
            assert!(out.jet.values[0].iter().all(|v| v.abs() <= eps));
            let n = out.seq.norm();
            assert!(n < prev);
            prev = n;
            eps *= 0.5;
        }
    }

    #[test]
    fn compression_needs_reduced_input() {
        let (mu, f) = setup();
        let mut slope = f.clone();
        slope.values[1] = vec![1.0; mu.len()];
        let seq = BesovSequence { beta: 0.5, p: 2.0, q: 2.0, dyadic_exponent: 1.0, jets: vec![slope.clone()], a: vec![1.0] };
        let eta = compression_map(&[(-0.1, 0.1), (0.9, 1.1)]).unwrap();
        assert!(matches!(besov_compress(&f, &seq, &eta, &mu), Err(BesovError::Unreduced(0))));
        assert!(matches!(besov_compress(&slope, &seq, &eta, &mu), Err(BesovError::NonzeroTarget(_))));
        let zero = Jet::zeros(1, mu.points.clone());
        let zseq = BesovSequence { jets: vec![zero.clone()], a: vec![0.0], ..seq };
        let out = besov_compress(&zero, &zseq, &eta, &mu).unwrap();
        assert_eq!(out.seq.norm(), 0.0);
    }
}
