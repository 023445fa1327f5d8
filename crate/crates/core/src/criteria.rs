//! Characterizations, inequality ladders, gap functionals and coupling
//! bounds for second-chaos variables against the normal-product / tetilla
//! target laws.
//!
//! Every check produces a [`CriterionReport`] (or a plain gap value) so the
//! outcomes are machine-readable. Bounds whose constants the theory leaves
//! unspecified are exposed as bracket/gap values only; no verdict ever
//! depends on an unknown constant.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{binomial, catalan_number, noncrossing_no_singleton_count};
use crate::spectral::{
    classical_cumulant_prefactor, cumulants_from_coefficients, ChaosKind, CoefficientSequence,
    CumulantSequence, MomentSequence,
};
use crate::transforms::{moments_from_cumulants_recursive, target_moments};

/// Tolerance used when an operation requires unit variance.
pub const NORMALIZATION_TOL: f64 = 1e-8;
/// Default relative tolerance for equality verdicts, scaled by the larger
/// side's magnitude (order-16 moments reach 1e12).
pub const DEFAULT_RELATIVE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
    Equality,
}

/// Outcome of one named inequality: the two sides, the signed gap (positive
/// means the inequality holds strictly), the verdict and the absolute
/// tolerance the verdict used.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriterionReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
}

fn effective_tolerance(rel_tol: f64, lhs: f64, rhs: f64) -> f64 {
    rel_tol * lhs.abs().max(rhs.abs()).max(1.0)
}

impl CriterionReport {
    /// Builds a report from a signed gap; `rel_tol` is scaled by the larger
    /// side before verdicts are drawn.
    fn from_gap(name: impl Into<String>, lhs: f64, rhs: f64, gap: f64, rel_tol: f64) -> Self {
        let tolerance = effective_tolerance(rel_tol, lhs, rhs);
        let verdict = if gap.abs() <= tolerance {
            Verdict::Equality
        } else if gap > tolerance {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        CriterionReport {
            name: name.into(),
            lhs,
            rhs,
            gap,
            verdict,
            tolerance,
        }
    }
}

fn factorial_f64(n: usize) -> f64 {
    let mut acc = 1.0;
    for i in 2..=n {
        acc *= i as f64;
    }
    acc
}

fn check_delta_orders(c: &CumulantSequence, n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 || n == m {
        return Err(Error::invalid("delta gap needs distinct orders n, m >= 1"));
    }
    if !(n + m).is_multiple_of(2) {
        return Err(Error::invalid("delta gap requires n + m even"));
    }
    let top = 2 * n.max(m);
    if top > c.max_order() {
        return Err(Error::invalid(format!(
            "delta gap needs cumulants up to order {top}, have {}",
            c.max_order()
        )));
    }
    Ok(())
}

/// The iterated-Gamma variance gap expressed in cumulants.
///
/// Classical: `kappa_2n/(2n-1)! - 2 kappa_{n+m}/(n+m-1)! + kappa_2m/(2m-1)!`;
/// free: `2^m kappa_2m + 2^n kappa_2n - 2^{(n+m+2)/2} kappa_{n+m}`. Both are
/// sums of squares in the spectral coefficients, so genuine sequences always
/// give a non-negative value; zero (plus one vanishing odd cumulant)
/// characterizes the target law.
pub fn delta_gap(c: &CumulantSequence, n: usize, m: usize) -> Result<f64> {
    check_delta_orders(c, n, m)?;
    Ok(match c.kind() {
        ChaosKind::Classical => {
            c.order(2 * n) / factorial_f64(2 * n - 1) - 2.0 * c.order(n + m) / factorial_f64(n + m - 1)
                + c.order(2 * m) / factorial_f64(2 * m - 1)
        }
        ChaosKind::Free => {
            2f64.powi(m as i32) * c.order(2 * m) + 2f64.powi(n as i32) * c.order(2 * n)
                - 2f64.powf((n + m + 2) as f64 / 2.0) * c.order(n + m)
        }
    })
}

/// The same gap straight from the coefficients,
/// `(1/2) sum_i (2^{n/2} lambda_i^n - 2^{m/2} lambda_i^m)^2`, manifestly
/// non-negative. Classical kind only.
pub fn delta_gap_spectral(seq: &CoefficientSequence, n: usize, m: usize) -> Result<f64> {
    if seq.kind() != ChaosKind::Classical {
        return Err(Error::UnsupportedKind {
            kind: seq.kind(),
            what: "spectral delta gap (no square identity on the free side)",
        });
    }
    if n == 0 || m == 0 || n == m {
        return Err(Error::invalid("delta gap needs distinct orders n, m >= 1"));
    }
    let half_n = 2f64.powf(n as f64 / 2.0);
    let half_m = 2f64.powf(m as f64 / 2.0);
    let sum: f64 = seq
        .lambdas()
        .iter()
        .map(|&l| {
            let d = half_n * l.powi(n as i32) - half_m * l.powi(m as i32);
            d * d
        })
        .sum();
    Ok(0.5 * sum)
}

/// Target-law characterization: the law matches the normal product (tetilla)
/// iff the (3,1) delta gap vanishes and the third cumulant vanishes.
/// `lhs` carries the delta gap, `rhs` the absolute odd cumulant, `gap` their
/// maximum; the verdict is `equality` exactly when both are below `tol`.
pub fn characterization_check(seq: &CoefficientSequence, tol: f64) -> Result<CriterionReport> {
    if !seq.is_normalized(NORMALIZATION_TOL) {
        return Err(Error::invalid(format!(
            "characterization requires sum lambda^2 = 1 (got {})",
            seq.sum_of_squares()
        )));
    }
    let c = cumulants_from_coefficients(seq, 6)?;
    let delta = delta_gap(&c, 3, 1)?;
    let odd = c.order(3).abs();
    let gap = delta.max(odd);
    let verdict = if gap <= tol {
        Verdict::Equality
    } else {
        Verdict::Violated
    };
    Ok(CriterionReport {
        name: "characterization".to_string(),
        lhs: delta,
        rhs: odd,
        gap,
        verdict,
        tolerance: tol,
    })
}

/// The even-cumulant ladder. Classical:
/// `kappa_2r/((2r-1)! kappa_2) - 1 >= (r-1)(kappa_4/(3! kappa_2) - 1)`;
/// free: `2^{r-1} kappa_2r - kappa_2 >= (r-1)(2 kappa_4 - kappa_2)`.
pub fn cumulant_ladder_report(c: &CumulantSequence, r: usize) -> Result<CriterionReport> {
    if r < 2 {
        return Err(Error::invalid("cumulant ladder needs r >= 2"));
    }
    if 2 * r > c.max_order() {
        return Err(Error::invalid(format!(
            "cumulant ladder needs cumulants up to order {}, have {}",
            2 * r,
            c.max_order()
        )));
    }
    let k2 = c.order(2);
    if k2 <= 0.0 {
        return Err(Error::invalid("cumulant ladder requires kappa_2 > 0"));
    }
    let (lhs, rhs) = match c.kind() {
        ChaosKind::Classical => (
            c.order(2 * r) / (factorial_f64(2 * r - 1) * k2) - 1.0,
            (r as f64 - 1.0) * (c.order(4) / (6.0 * k2) - 1.0),
        ),
        ChaosKind::Free => (
            2f64.powi(r as i32 - 1) * c.order(2 * r) - k2,
            (r as f64 - 1.0) * (2.0 * c.order(4) - k2),
        ),
    };
    Ok(CriterionReport::from_gap(
        format!("cumulant-ladder[r={r}]"),
        lhs,
        rhs,
        lhs - rhs,
        DEFAULT_RELATIVE_TOL,
    ))
}

fn require_unit_second_moment(m: &MomentSequence) -> Result<()> {
    if (m.order(2) - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::precondition(
            "E(F^2) = 1",
            format!("second moment is {}", m.order(2)),
        ));
    }
    Ok(())
}

fn require_fourth_moment_hypothesis(m: &MomentSequence) -> Result<f64> {
    let target4 = match m.kind() {
        ChaosKind::Classical => 9.0,
        ChaosKind::Free => 2.5,
    };
    // tiny relative slack so the target itself is never rejected by rounding
    if m.order(4) < target4 * (1.0 - 1e-12) {
        let name = match m.kind() {
            ChaosKind::Classical => "E(F^4) >= 9",
            ChaosKind::Free => "phi(F^4) >= 5/2",
        };
        return Err(Error::precondition(
            name,
            format!("fourth moment is {}", m.order(4)),
        ));
    }
    Ok(target4)
}

/// Even-moment lower bound against the target law, valid under the
/// fourth-moment hypothesis (which is enforced; the numerical
/// counterexample shows it cannot be dropped).
pub fn moment_lower_bound_report(m: &MomentSequence, r: usize) -> Result<CriterionReport> {
    if r < 1 {
        return Err(Error::invalid("moment lower bound needs r >= 1"));
    }
    if 2 * r > m.max_order() {
        return Err(Error::invalid(format!(
            "moment lower bound needs moments up to order {}",
            2 * r
        )));
    }
    require_unit_second_moment(m)?;
    require_fourth_moment_hypothesis(m)?;
    let target = target_moments(m.kind(), 2 * r)?;
    let lhs = m.order(2 * r);
    let rhs = target.order(2 * r);
    Ok(CriterionReport::from_gap(
        format!("moment-lower-bound[r={r}]"),
        lhs,
        rhs,
        lhs - rhs,
        DEFAULT_RELATIVE_TOL,
    ))
}

/// Moment-gap comparison between two even orders: the higher-order gap
/// dominates the lower-order gap times a combinatorial factor
/// (`binom(2n-2m, 2)` classically, `Catalan(n-m)` on the free side).
pub fn moment_gap_ratio_report(
    m: &MomentSequence,
    m_small: usize,
    n_large: usize,
) -> Result<CriterionReport> {
    if m_small < 2 || m_small > n_large {
        return Err(Error::invalid("gap ratio needs 2 <= m <= n"));
    }
    if 2 * n_large > m.max_order() {
        return Err(Error::invalid(format!(
            "gap ratio needs moments up to order {}",
            2 * n_large
        )));
    }
    require_unit_second_moment(m)?;
    require_fourth_moment_hypothesis(m)?;
    let target = target_moments(m.kind(), 2 * n_large)?;
    let factor = match m.kind() {
        ChaosKind::Classical => binomial(2 * (n_large - m_small), 2)
            .to_f64()
            .unwrap_or(f64::INFINITY),
        ChaosKind::Free => catalan_number(n_large - m_small)
            .to_f64()
            .unwrap_or(f64::INFINITY),
    };
    let lhs = m.order(2 * n_large) - target.order(2 * n_large);
    let rhs = factor * (m.order(2 * m_small) - target.order(2 * m_small));
    Ok(CriterionReport::from_gap(
        format!("moment-gap-ratio[m={m_small},n={n_large}]"),
        lhs,
        rhs,
        lhs - rhs,
        DEFAULT_RELATIVE_TOL,
    ))
}

/// Upper bounds for spectrally symmetric variables with variance at most one:
/// every even cumulant and moment is dominated by the target's. `lhs` carries
/// the cumulant-side gap `kappa_2r(target) - kappa_2r(F)`, `rhs` the
/// moment-side gap, `gap` their minimum; equality pins the target law.
pub fn symmetric_upper_bound_report(
    seq: &CoefficientSequence,
    r: usize,
) -> Result<CriterionReport> {
    if r < 1 {
        return Err(Error::invalid("symmetric upper bound needs r >= 1"));
    }
    if !seq.is_spectrally_symmetric() {
        return Err(Error::precondition(
            "spectral symmetry",
            "every positive coefficient needs a matching negative one",
        ));
    }
    if seq.sum_of_squares() > 1.0 + NORMALIZATION_TOL {
        return Err(Error::precondition(
            "E(F^2) <= 1",
            format!("sum of squares is {}", seq.sum_of_squares()),
        ));
    }
    let order = (2 * r).max(2);
    let c = cumulants_from_coefficients(seq, order)?;
    let m = moments_from_cumulants_recursive(&c, order)?;
    let tc = crate::transforms::target_cumulants(seq.kind(), order)?;
    let tm = target_moments(seq.kind(), order)?;
    let cumulant_gap = tc.order(2 * r) - c.order(2 * r);
    let moment_gap = tm.order(2 * r) - m.order(2 * r);
    let gap = cumulant_gap.min(moment_gap);
    let tolerance = effective_tolerance(
        DEFAULT_RELATIVE_TOL,
        tc.order(2 * r).abs().max(tm.order(2 * r).abs()),
        0.0,
    );
    let verdict = if cumulant_gap.abs().max(moment_gap.abs()) <= tolerance {
        Verdict::Equality
    } else if gap > tolerance {
        Verdict::Holds
    } else if gap.abs() <= tolerance {
        // one side at equality forces the target, so the other follows
        Verdict::Equality
    } else {
        Verdict::Violated
    };
    Ok(CriterionReport {
        name: format!("symmetric-upper-bound[r={r}]"),
        lhs: cumulant_gap,
        rhs: moment_gap,
        gap,
        verdict,
        tolerance,
    })
}

/// Result of the dominant-pair detection: the two (0-based) indices whose
/// entries sit within `eps` of 1/2, and the total mass left elsewhere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominantPair {
    pub first: usize,
    pub second: usize,
    pub residual: f64,
}

/// Detects the two dominant entries of a non-negative sequence under the
/// hypotheses `||x||_1 = 1`, `||x||_inf < 1/2`, `||x||_2^2 > 1/2 - eps` with
/// `eps < 1/6`. The residual mass off the pair is guaranteed below `2 eps`.
pub fn dominant_pair_detect(x: &[f64], eps: f64) -> Result<DominantPair> {
    if !(eps > 0.0 && eps < 1.0 / 6.0) {
        return Err(Error::precondition(
            "epsilon < 1/6",
            format!("epsilon is {eps}"),
        ));
    }
    if x.iter().any(|&v| v.is_nan() || v < 0.0) {
        return Err(Error::invalid("entries must be non-negative reals"));
    }
    let l1: f64 = x.iter().sum();
    if (l1 - 1.0).abs() > 1e-8 {
        return Err(Error::precondition(
            "||x||_1 = 1",
            format!("l1 norm is {l1}"),
        ));
    }
    let linf = x.iter().copied().fold(0.0f64, f64::max);
    if linf >= 0.5 {
        return Err(Error::precondition(
            "||x||_inf < 1/2",
            format!("max entry is {linf}"),
        ));
    }
    let l2sq: f64 = x.iter().map(|v| v * v).sum();
    if l2sq <= 0.5 - eps {
        return Err(Error::precondition(
            "||x||_2^2 > 1/2 - epsilon",
            format!("l2 norm squared is {l2sq}"),
        ));
    }
    let near: Vec<usize> = (0..x.len()).filter(|&i| 0.5 - x[i] < eps).collect();
    if near.len() != 2 {
        return Err(Error::Numerical(format!(
            "expected exactly two entries within epsilon of 1/2, found {}",
            near.len()
        )));
    }
    let residual = l1 - x[near[0]] - x[near[1]];
    Ok(DominantPair {
        first: near[0],
        second: near[1],
        residual,
    })
}

/// The sharp classical moment bound constant
/// `C_n = 2^{-n/2} sum_k binom(n,k) (-1)^{n-k} (2k)!/(k! 2^k)`.
pub fn classical_moment_bound_constant(n: usize) -> f64 {
    let mut sum = BigInt::from(0);
    for k in 0..=n {
        let mut dd = BigInt::from(1); // (2k-1)!!
        for j in 1..=k {
            dd *= BigInt::from(2 * j - 1);
        }
        let term = BigInt::from(binomial(n, k)) * dd;
        if (n - k).is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum.to_f64().expect("constant fits in f64") * 2f64.powf(-(n as f64) / 2.0)
}

/// Hypercontractive bounds at order `n`. Classical kind yields two reports
/// (cumulant bound, moment bound with constant `C_n`); free kind yields three
/// (cumulant bound, the Catalan moment bound, and the sharp moment bound with
/// the no-singleton non-crossing count, which is the constant actually
/// attained by single-coefficient elements).
pub fn hypercontractivity_report(
    c: &CumulantSequence,
    m: &MomentSequence,
    n: usize,
) -> Result<Vec<CriterionReport>> {
    if n < 2 {
        return Err(Error::invalid("hypercontractivity needs n >= 2"));
    }
    if c.kind() != m.kind() {
        return Err(Error::invalid("cumulant and moment kinds must match"));
    }
    if n > c.max_order() || n > m.max_order() {
        return Err(Error::invalid(format!("need both sequences up to order {n}")));
    }
    let k2 = c.order(2);
    if k2 < 0.0 {
        return Err(Error::invalid("kappa_2 must be non-negative"));
    }
    let scale = k2.powf(n as f64 / 2.0);
    let mut out = Vec::new();
    match c.kind() {
        ChaosKind::Classical => {
            let cum_bound = classical_cumulant_prefactor(n) * scale;
            out.push(CriterionReport::from_gap(
                format!("hypercontractivity-cumulant[n={n}]"),
                c.order(n).abs(),
                cum_bound,
                cum_bound - c.order(n).abs(),
                DEFAULT_RELATIVE_TOL,
            ));
            let mom_bound = classical_moment_bound_constant(n) * scale;
            out.push(CriterionReport::from_gap(
                format!("hypercontractivity-moment[n={n}]"),
                m.order(n).abs(),
                mom_bound,
                mom_bound - m.order(n).abs(),
                DEFAULT_RELATIVE_TOL,
            ));
        }
        ChaosKind::Free => {
            let cum_bound = scale;
            out.push(CriterionReport::from_gap(
                format!("hypercontractivity-cumulant[n={n}]"),
                c.order(n).abs(),
                cum_bound,
                cum_bound - c.order(n).abs(),
                DEFAULT_RELATIVE_TOL,
            ));
            let catalan = catalan_number(n).to_f64().unwrap_or(f64::INFINITY);
            out.push(CriterionReport::from_gap(
                format!("hypercontractivity-moment[n={n}]"),
                m.order(n).abs(),
                catalan * scale,
                catalan * scale - m.order(n).abs(),
                DEFAULT_RELATIVE_TOL,
            ));
            let sharp = noncrossing_no_singleton_count(n)
                .to_f64()
                .unwrap_or(f64::INFINITY);
            out.push(CriterionReport::from_gap(
                format!("hypercontractivity-moment-sharp[n={n}]"),
                m.order(n).abs(),
                sharp * scale,
                sharp * scale - m.order(n).abs(),
                DEFAULT_RELATIVE_TOL,
            ));
        }
    }
    Ok(out)
}

/// Which bracket [`w2_gap`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum W2Mode {
    /// `(mu_6 - 225) - 55 (mu_4 - 9)` classically,
    /// `(mu_6 - 33/4) - 7 (mu_4 - 5/2)` on the free side.
    Sextic,
    /// `mu_2r - target_2r` for `r >= 3`, under the fourth-moment hypothesis.
    Even { r: usize },
}

/// The quantity under the square root in the Wasserstein-2 bounds, without
/// the unspecified constant. Non-negative for genuine chaos inputs; its
/// square root is the shape of the reported bound.
pub fn w2_gap(m: &MomentSequence, mode: W2Mode) -> Result<f64> {
    require_unit_second_moment(m)?;
    match mode {
        W2Mode::Sextic => {
            if m.max_order() < 6 {
                return Err(Error::invalid("sextic bracket needs moments up to order 6"));
            }
            Ok(match m.kind() {
                ChaosKind::Classical => (m.order(6) - 225.0) - 55.0 * (m.order(4) - 9.0),
                ChaosKind::Free => (m.order(6) - 8.25) - 7.0 * (m.order(4) - 2.5),
            })
        }
        W2Mode::Even { r } => {
            if r < 3 {
                return Err(Error::invalid("even-moment bracket needs r >= 3"));
            }
            if 2 * r > m.max_order() {
                return Err(Error::invalid(format!(
                    "even-moment bracket needs moments up to order {}",
                    2 * r
                )));
            }
            require_fourth_moment_hypothesis(m)?;
            let target = target_moments(m.kind(), 2 * r)?;
            Ok(m.order(2 * r) - target.order(2 * r))
        }
    }
}

/// Checks the sextic polynomial identity with both sides computed through
/// independent paths: the moment side via the cumulant-to-moment transform,
/// the cumulant side via the delta gap and the third cumulant. Classical:
/// `E(P(F)) = 5! Delta_{3,1} + 10 kappa_3^2` with
/// `P(x) = x^6 - 55 x^4 + 331 x^2 - 61`; free:
/// `phi(P(F)) = kappa_6 - kappa_4 + kappa_2/4 + 3 kappa_3^2` with
/// `P(x) = x^6 - 7 x^4 + (37/4) x^2`.
pub fn polynomial_identity_check(seq: &CoefficientSequence) -> Result<CriterionReport> {
    if !seq.is_normalized(NORMALIZATION_TOL) {
        return Err(Error::invalid(format!(
            "polynomial identity requires sum lambda^2 = 1 (got {})",
            seq.sum_of_squares()
        )));
    }
    let c = cumulants_from_coefficients(seq, 6)?;
    let m = moments_from_cumulants_recursive(&c, 6)?;
    let k3 = c.order(3);
    let (lhs, rhs) = match seq.kind() {
        ChaosKind::Classical => (
            m.order(6) - 55.0 * m.order(4) + 331.0 * m.order(2) - 61.0,
            120.0 * delta_gap(&c, 3, 1)? + 10.0 * k3 * k3,
        ),
        ChaosKind::Free => (
            m.order(6) - 7.0 * m.order(4) + 9.25 * m.order(2),
            c.order(6) - c.order(4) + 0.25 * c.order(2) + 3.0 * k3 * k3,
        ),
    };
    Ok(CriterionReport::from_gap(
        "polynomial-identity",
        lhs,
        rhs,
        lhs - rhs,
        DEFAULT_RELATIVE_TOL,
    ))
}

fn aligned_squared_distance(a: &CoefficientSequence, b: &CoefficientSequence) -> f64 {
    let mut sq = 0.0;
    let pa = a.positive_part();
    let pb = b.positive_part();
    for i in 0..pa.len().max(pb.len()) {
        let x = pa.get(i).copied().unwrap_or(0.0);
        let y = pb.get(i).copied().unwrap_or(0.0);
        sq += (x - y) * (x - y);
    }
    // negative side: most negative matched with most negative
    let na = a.negative_part_abs();
    let nb = b.negative_part_abs();
    for i in 0..na.len().max(nb.len()) {
        let x = na.get(i).copied().unwrap_or(0.0);
        let y = nb.get(i).copied().unwrap_or(0.0);
        sq += (x - y) * (x - y);
    }
    sq
}

/// The coupling bound on the Wasserstein-2 distance: the l2 distance between
/// the two coefficient vectors in the two-sided canonical alignment
/// (positives matched descending, negatives matched by depth, missing slots
/// zero). Among all bijections this alignment minimizes the distance.
pub fn coupling_distance(a: &CoefficientSequence, b: &CoefficientSequence) -> Result<f64> {
    if a.kind() != b.kind() {
        return Err(Error::invalid("coupling distance requires matching kinds"));
    }
    Ok(aligned_squared_distance(a, b).sqrt())
}

/// Runs every criterion applicable to the sequence and collects the reports:
/// the characterization, ladder rungs, lower bounds and gap ratios when their
/// hypotheses hold, symmetric bounds when the sequence is symmetric,
/// hypercontractive bounds, the polynomial identity and the sextic bracket.
pub fn standard_battery(
    seq: &CoefficientSequence,
    tol: f64,
) -> Result<Vec<CriterionReport>> {
    let mut out = Vec::new();
    let c = cumulants_from_coefficients(seq, 12)?;
    let m = moments_from_cumulants_recursive(&c, 12)?;
    let normalized = seq.is_normalized(NORMALIZATION_TOL);
    if normalized {
        out.push(characterization_check(seq, tol)?);
    }
    for r in 2..=4 {
        out.push(cumulant_ladder_report(&c, r)?);
    }
    for r in 3..=4 {
        match moment_lower_bound_report(&m, r) {
            Ok(rep) => out.push(rep),
            Err(Error::PreconditionFailed { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    match moment_gap_ratio_report(&m, 2, 3) {
        Ok(rep) => out.push(rep),
        Err(Error::PreconditionFailed { .. }) => {}
        Err(e) => return Err(e),
    }
    if seq.is_spectrally_symmetric() && seq.sum_of_squares() <= 1.0 + NORMALIZATION_TOL {
        for r in 2..=3 {
            out.push(symmetric_upper_bound_report(seq, r)?);
        }
    }
    for n in 3..=6 {
        out.extend(hypercontractivity_report(&c, &m, n)?);
    }
    if normalized {
        out.push(polynomial_identity_check(seq)?);
        let bracket = w2_gap(&m, W2Mode::Sextic)?;
        out.push(CriterionReport::from_gap(
            "w2-sextic-bracket",
            bracket,
            0.0,
            bracket,
            tol.max(DEFAULT_RELATIVE_TOL),
        ));
    }
    Ok(out)
}
