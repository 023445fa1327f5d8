//! Moment/cumulant conversion for both chaos kinds, plus exact target-law
//! tables.
//!
//! Two forward paths exist on purpose. The partition-sum path evaluates the
//! defining relation literally (all set partitions classically, non-crossing
//! partitions on the free side) and is gated by the enumeration caps; the
//! recursive path is the fast default. They must agree wherever both are
//! defined, which is one of the standing test anchors of the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::partitions::{
    binomial, for_each_noncrossing_sizes, for_each_set_partition_sizes, PartitionCaps,
};
use crate::spectral::{ChaosKind, CumulantSequence, MomentSequence};

/// Minimal scalar interface so the same recursions serve f64, exact rational
/// arithmetic, and the optimizer's dual numbers.
pub(crate) trait Scalar: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_count(c: u64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_count(c: u64) -> Self {
        c as f64
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_count(c: u64) -> Self {
        BigRational::from_integer(BigInt::from(c))
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

fn binom_u64(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// k-fold convolution of the moment sequence at total order m, with the
/// order-0 moment pinned to 1 (the first-block decomposition needs it).
fn convolution_power<T: Scalar>(mu: &[T], k: usize, m: usize) -> T {
    let mut d: Vec<T> = vec![T::zero(); m + 1];
    d[0] = T::one();
    for _ in 0..k {
        let mut nd: Vec<T> = Vec::with_capacity(m + 1);
        for t in 0..=m {
            let mut acc = T::zero();
            for j in 0..=t {
                acc = acc.add(&d[t - j].mul(&mu[j]));
            }
            nd.push(acc);
        }
        d = nd;
    }
    d[m].clone()
}

/// Recursive cumulant-to-moment map. `kappa[i]` holds order `i + 1`; output
/// has the same layout. Classical uses the binomial recursion, free the
/// first-block decomposition.
pub(crate) fn moments_rec<T: Scalar>(kind: ChaosKind, kappa: &[T], max_order: usize) -> Vec<T> {
    let mut mu: Vec<T> = Vec::with_capacity(max_order + 1);
    mu.push(T::one());
    for n in 1..=max_order {
        let mut acc = T::zero();
        for k in 1..=n {
            let term = match kind {
                ChaosKind::Classical => T::from_count(binom_u64(n - 1, k - 1))
                    .mul(&kappa[k - 1])
                    .mul(&mu[n - k]),
                ChaosKind::Free => kappa[k - 1].mul(&convolution_power(&mu, k, n - k)),
            };
            acc = acc.add(&term);
        }
        mu.push(acc);
    }
    mu.remove(0);
    mu
}

/// Triangular inverse of [`moments_rec`]. `mu_in[i]` holds order `i + 1` and
/// the order-1 entry must be zero (centered variables only).
fn cumulants_rec<T: Scalar>(kind: ChaosKind, mu_in: &[T], max_order: usize) -> Vec<T> {
    let mut mu: Vec<T> = Vec::with_capacity(max_order + 1);
    mu.push(T::one());
    mu.extend(mu_in.iter().take(max_order).cloned());
    let mut kappa: Vec<T> = Vec::with_capacity(max_order);
    for n in 1..=max_order {
        let mut acc = mu[n].clone();
        for k in 1..n {
            let term = match kind {
                ChaosKind::Classical => T::from_count(binom_u64(n - 1, k - 1))
                    .mul(&kappa[k - 1])
                    .mul(&mu[n - k]),
                ChaosKind::Free => kappa[k - 1].mul(&convolution_power(&mu, k, n - k)),
            };
            acc = acc.sub(&term);
        }
        kappa.push(acc);
    }
    kappa
}

/// Moments by the literal partition sum: over all set partitions for the
/// classical kind, over non-crossing partitions for the free kind.
pub fn moments_from_cumulants_enum(
    c: &CumulantSequence,
    max_order: usize,
    caps: &PartitionCaps,
) -> Result<MomentSequence> {
    if max_order > c.max_order() {
        return Err(Error::invalid(format!(
            "requested order {max_order} exceeds available cumulants {}",
            c.max_order()
        )));
    }
    let cap = match c.kind() {
        ChaosKind::Classical => caps.set_partitions,
        ChaosKind::Free => caps.noncrossing,
    };
    if max_order > cap {
        return Err(Error::CapacityExceeded {
            what: "partition-sum moment conversion",
            n: max_order,
            cap,
        });
    }
    let kappa = c.values();
    let mut values = Vec::with_capacity(max_order);
    for n in 1..=max_order {
        let mut total = 0.0f64;
        let visit = |sizes: &[usize]| {
            let mut prod = 1.0f64;
            for &s in sizes {
                prod *= kappa[s - 1];
            }
            total += prod;
        };
        match c.kind() {
            ChaosKind::Classical => for_each_set_partition_sizes(n, visit),
            ChaosKind::Free => for_each_noncrossing_sizes(n, visit),
        }
        values.push(total);
    }
    Ok(MomentSequence::new(c.kind(), values))
}

/// Moments by the fast recursion; identical values to the partition sum
/// wherever both are defined.
pub fn moments_from_cumulants_recursive(
    c: &CumulantSequence,
    max_order: usize,
) -> Result<MomentSequence> {
    if max_order > c.max_order() {
        return Err(Error::invalid(format!(
            "requested order {max_order} exceeds available cumulants {}",
            c.max_order()
        )));
    }
    let values = moments_rec(c.kind(), c.values(), max_order);
    Ok(MomentSequence::new(c.kind(), values))
}

/// Exact inverse of the forward conversion by triangular solve.
pub fn cumulants_from_moments(m: &MomentSequence, max_order: usize) -> Result<CumulantSequence> {
    if max_order > m.max_order() {
        return Err(Error::invalid(format!(
            "requested order {max_order} exceeds available moments {}",
            m.max_order()
        )));
    }
    if m.order(1) != 0.0 {
        return Err(Error::invalid(
            "moment inversion requires a centered sequence (order-1 moment must be 0)",
        ));
    }
    let values = cumulants_rec(m.kind(), m.values(), max_order);
    Ok(CumulantSequence::new(m.kind(), values))
}

/// Rational-arithmetic forward conversion, same layout as the f64 path.
pub fn moments_from_cumulants_exact(
    kind: ChaosKind,
    kappa: &[BigRational],
    max_order: usize,
) -> Result<Vec<BigRational>> {
    if max_order > kappa.len() {
        return Err(Error::invalid("requested order exceeds available cumulants"));
    }
    Ok(moments_rec(kind, kappa, max_order))
}

/// Rational-arithmetic inversion.
pub fn cumulants_from_moments_exact(
    kind: ChaosKind,
    mu: &[BigRational],
    max_order: usize,
) -> Result<Vec<BigRational>> {
    if max_order > mu.len() {
        return Err(Error::invalid("requested order exceeds available moments"));
    }
    if !mu[0].is_zero() {
        return Err(Error::invalid(
            "moment inversion requires a centered sequence (order-1 moment must be 0)",
        ));
    }
    Ok(cumulants_rec(kind, mu, max_order))
}

fn big_factorial(n: usize) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

/// `(2r - 1)!! = 1 * 3 * ... * (2r - 1)`.
fn odd_double_factorial(r: usize) -> BigInt {
    let mut acc = BigInt::from(1);
    for j in 1..=r {
        acc *= BigInt::from(2 * j - 1);
    }
    acc
}

fn big_binomial(n: usize, k: usize) -> BigInt {
    BigInt::from(binomial(n, k))
}

/// Exact target-law moments, `out[i]` holding order `i + 1`. Odd orders are
/// zero; classical order `2r` is `((2r-1)!!)^2`, free order `2n` is the
/// closed-form sum `(1/(2^n n)) sum_k 2^k binom(n,k) binom(2n,k-1)`.
pub fn target_moments_exact(kind: ChaosKind, max_order: usize) -> Result<Vec<BigRational>> {
    if max_order < 2 {
        return Err(Error::invalid("target moments need max order >= 2"));
    }
    let mut out = Vec::with_capacity(max_order);
    for order in 1..=max_order {
        if order % 2 == 1 {
            out.push(BigRational::from_integer(BigInt::from(0)));
            continue;
        }
        let value = match kind {
            ChaosKind::Classical => {
                let df = odd_double_factorial(order / 2);
                BigRational::from_integer(&df * &df)
            }
            ChaosKind::Free => {
                let n = order / 2;
                let mut sum = BigInt::from(0);
                for k in 1..=n {
                    sum += BigInt::from(2).pow(k as u32)
                        * big_binomial(n, k)
                        * big_binomial(2 * n, k - 1);
                }
                BigRational::new(sum, BigInt::from(2).pow(n as u32) * BigInt::from(n))
            }
        };
        out.push(value);
    }
    Ok(out)
}

/// Exact target-law cumulants: classical order `2r` is `(2r-1)!`, free order
/// `2n` is `2^(1-n)`; odd orders vanish.
pub fn target_cumulants_exact(kind: ChaosKind, max_order: usize) -> Result<Vec<BigRational>> {
    if max_order < 2 {
        return Err(Error::invalid("target cumulants need max order >= 2"));
    }
    let mut out = Vec::with_capacity(max_order);
    for order in 1..=max_order {
        if order % 2 == 1 {
            out.push(BigRational::from_integer(BigInt::from(0)));
            continue;
        }
        let value = match kind {
            ChaosKind::Classical => BigRational::from_integer(big_factorial(order - 1)),
            ChaosKind::Free => {
                let n = order / 2;
                BigRational::new(BigInt::from(2), BigInt::from(2).pow(n as u32))
            }
        };
        out.push(value);
    }
    Ok(out)
}

pub(crate) fn rationals_to_floats(values: &[BigRational]) -> Vec<f64> {
    values
        .iter()
        .map(|v| v.to_f64().expect("target value fits in f64"))
        .collect()
}

/// Float view of [`target_moments_exact`].
pub fn target_moments(kind: ChaosKind, max_order: usize) -> Result<MomentSequence> {
    Ok(MomentSequence::new(
        kind,
        rationals_to_floats(&target_moments_exact(kind, max_order)?),
    ))
}

/// Float view of [`target_cumulants_exact`].
pub fn target_cumulants(kind: ChaosKind, max_order: usize) -> Result<CumulantSequence> {
    Ok(CumulantSequence::new(
        kind,
        rationals_to_floats(&target_cumulants_exact(kind, max_order)?),
    ))
}
