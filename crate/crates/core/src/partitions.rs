//! Set partitions and non-crossing partitions of `{1..n}` with exact counts.
//!
//! Everything the moment/cumulant transforms need from combinatorics lives
//! here: enumeration of the partition lattice (restricted-growth recursion),
//! enumeration of the non-crossing lattice (stack of open blocks), and exact
//! arbitrary-precision counts (Bell, Catalan, and both no-singleton refinements).

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Enumeration caps. Bell(13) is ~27.6M partitions, so going past the
/// defaults is a deliberate caller choice, not an accident.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartitionCaps {
    /// Cap for full set-partition enumeration (default 12).
    pub set_partitions: usize,
    /// Cap for non-crossing enumeration (default 14).
    pub noncrossing: usize,
}

impl Default for PartitionCaps {
    fn default() -> Self {
        PartitionCaps {
            set_partitions: 12,
            noncrossing: 14,
        }
    }
}

impl PartitionCaps {
    /// Same value for both families.
    pub fn uniform(cap: usize) -> Self {
        PartitionCaps {
            set_partitions: cap,
            noncrossing: cap,
        }
    }
}

/// A partition of `{1..n}` into disjoint non-empty blocks.
///
/// Canonical form: blocks sorted by least element, elements within a block
/// ascending. Constructors enforce this.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
    n: usize,
}

impl SetPartition {
    /// Builds a partition from blocks, validating that they are disjoint,
    /// non-empty and cover `{1..n}` exactly. Blocks are put in canonical order.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("partition ground set must be non-empty"));
        }
        let mut seen = vec![false; n + 1];
        let mut total = 0usize;
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::invalid("empty block in partition"));
            }
            for &e in block {
                if e == 0 || e > n {
                    return Err(Error::invalid(format!(
                        "element {e} outside ground set 1..={n}"
                    )));
                }
                if seen[e] {
                    return Err(Error::invalid(format!("element {e} appears twice")));
                }
                seen[e] = true;
                total += 1;
            }
        }
        if total != n {
            return Err(Error::invalid(format!(
                "blocks cover {total} elements, expected {n}"
            )));
        }
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(SetPartition { blocks, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    /// Block label of each element, indexed 1..=n.
    fn assignment(&self) -> Vec<usize> {
        let mut assign = vec![0usize; self.n + 1];
        for (label, block) in self.blocks.iter().enumerate() {
            for &e in block {
                assign[e] = label;
            }
        }
        assign
    }

    /// Literal four-index crossing test: a crossing is `p1 < q1 < p2 < q2`
    /// with `p1, p2` in one block and `q1, q2` in a different block.
    pub fn is_noncrossing(&self) -> bool {
        let assign = self.assignment();
        for p1 in 1..=self.n {
            for q1 in (p1 + 1)..=self.n {
                if assign[q1] == assign[p1] {
                    continue;
                }
                for p2 in (q1 + 1)..=self.n {
                    if assign[p2] != assign[p1] {
                        continue;
                    }
                    for q2 in (p2 + 1)..=self.n {
                        if assign[q2] == assign[q1] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// A [`SetPartition`] that passes the crossing test.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NonCrossingPartition(SetPartition);

impl NonCrossingPartition {
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let p = SetPartition::from_blocks(n, blocks)?;
        if !p.is_noncrossing() {
            return Err(Error::invalid("partition has a crossing"));
        }
        Ok(NonCrossingPartition(p))
    }

    pub fn as_set_partition(&self) -> &SetPartition {
        &self.0
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        self.0.blocks()
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.0.block_sizes()
    }
}

fn check_enumeration_args(n: usize, cap: usize, what: &'static str) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("enumeration requires n >= 1"));
    }
    if n > cap {
        return Err(Error::CapacityExceeded { what, n, cap });
    }
    Ok(())
}

/// All `Bell(n)` partitions of `{1..n}` in canonical form, deterministic order.
pub fn enumerate_set_partitions(n: usize, caps: &PartitionCaps) -> Result<Vec<SetPartition>> {
    check_enumeration_args(n, caps.set_partitions, "set partition enumeration")?;
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn rec(next: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<SetPartition>) {
        if next > n {
            out.push(SetPartition {
                blocks: blocks.clone(),
                n,
            });
            return;
        }
        for j in 0..blocks.len() {
            blocks[j].push(next);
            rec(next + 1, n, blocks, out);
            blocks[j].pop();
        }
        blocks.push(vec![next]);
        rec(next + 1, n, blocks, out);
        blocks.pop();
    }
    rec(1, n, &mut blocks, &mut out);
    Ok(out)
}

/// All `Catalan(n)` non-crossing partitions of `{1..n}`, canonical form,
/// deterministic order.
pub fn enumerate_noncrossing_partitions(
    n: usize,
    caps: &PartitionCaps,
) -> Result<Vec<NonCrossingPartition>> {
    check_enumeration_args(n, caps.noncrossing, "non-crossing enumeration")?;
    let mut out = Vec::new();
    // Scan 1..n keeping a stack of open blocks. An element may start a
    // singleton, open a new block, or extend exactly the top open block
    // (optionally closing it). The stack discipline is the non-crossing
    // property; every non-crossing partition arises from exactly one
    // decision sequence because "open" means the block receives a later
    // element.
    fn rec(
        next: usize,
        n: usize,
        blocks: &mut Vec<Vec<usize>>,
        open: &mut Vec<usize>,
        out: &mut Vec<NonCrossingPartition>,
    ) {
        let remaining = n + 1 - next;
        if open.len() > remaining {
            return; // every open block still needs an element
        }
        if next > n {
            out.push(NonCrossingPartition(SetPartition {
                blocks: blocks.clone(),
                n,
            }));
            return;
        }
        // singleton {next}
        blocks.push(vec![next]);
        rec(next + 1, n, blocks, open, out);
        blocks.pop();
        // open a new block that will be extended later
        if remaining >= 2 {
            blocks.push(vec![next]);
            open.push(blocks.len() - 1);
            rec(next + 1, n, blocks, open, out);
            open.pop();
            blocks.pop();
        }
        if let Some(&top) = open.last() {
            // extend the top open block, keep it open
            if remaining >= 2 {
                blocks[top].push(next);
                rec(next + 1, n, blocks, open, out);
                blocks[top].pop();
            }
            // extend the top open block and close it
            blocks[top].push(next);
            let saved = open.pop().unwrap();
            rec(next + 1, n, blocks, open, out);
            open.push(saved);
            blocks[top].pop();
        }
    }
    rec(1, n, &mut Vec::new(), &mut Vec::new(), &mut out);
    Ok(out)
}

/// Visits the block-size multiset of every set partition of `{1..n}` without
/// allocating the partitions. The slice holds one entry per block.
pub(crate) fn for_each_set_partition_sizes(n: usize, mut f: impl FnMut(&[usize])) {
    fn rec(remaining: usize, sizes: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if remaining == 0 {
            f(sizes);
            return;
        }
        for j in 0..sizes.len() {
            sizes[j] += 1;
            rec(remaining - 1, sizes, f);
            sizes[j] -= 1;
        }
        sizes.push(1);
        rec(remaining - 1, sizes, f);
        sizes.pop();
    }
    rec(n, &mut Vec::new(), &mut f);
}

/// Same as [`for_each_set_partition_sizes`] restricted to non-crossing
/// partitions.
pub(crate) fn for_each_noncrossing_sizes(n: usize, mut f: impl FnMut(&[usize])) {
    fn rec(
        remaining: usize,
        closed: &mut Vec<usize>,
        open: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if open.len() > remaining {
            return;
        }
        if remaining == 0 {
            f(closed);
            return;
        }
        closed.push(1);
        rec(remaining - 1, closed, open, f);
        closed.pop();
        if remaining >= 2 {
            open.push(1);
            rec(remaining - 1, closed, open, f);
            open.pop();
        }
        if !open.is_empty() {
            if remaining >= 2 {
                *open.last_mut().unwrap() += 1;
                rec(remaining - 1, closed, open, f);
                *open.last_mut().unwrap() -= 1;
            }
            let size = open.pop().unwrap();
            closed.push(size + 1);
            rec(remaining - 1, closed, open, f);
            closed.pop();
            open.push(size);
        }
    }
    rec(n, &mut Vec::new(), &mut Vec::new(), &mut f);
}

/// Which partition family a count refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionFamily {
    All,
    Noncrossing,
    NoncrossingNoSingleton,
    AllNoSingleton,
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Exact Bell number via the Bell triangle.
pub fn bell_number(n: usize) -> BigUint {
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().unwrap().clone());
        for v in &row {
            let last = next.last().unwrap().clone();
            next.push(last + v);
        }
        row = next;
    }
    row[0].clone()
}

/// Exact Catalan number `binom(2n, n) / (n + 1)`.
pub fn catalan_number(n: usize) -> BigUint {
    binomial(2 * n, n) / BigUint::from(n + 1)
}

/// Non-crossing partitions of `{1..n}` with every block of size >= 2
/// (Riordan numbers): 1, 0, 1, 1, 3, 6, 15, 36, 91, ...
pub fn noncrossing_no_singleton_count(n: usize) -> BigUint {
    // (n+1) a(n) = (n-1) (2 a(n-1) + 3 a(n-2)), exact division.
    let mut a: Vec<BigUint> = vec![BigUint::one(), BigUint::zero()];
    for m in 2..=n.max(1) {
        let v = BigUint::from(m - 1) * (BigUint::from(2u32) * &a[m - 1] + BigUint::from(3u32) * &a[m - 2])
            / BigUint::from(m + 1);
        a.push(v);
    }
    a[n].clone()
}

/// Set partitions of `{1..n}` with every block of size >= 2:
/// 1, 0, 1, 1, 4, 11, 41, 162, 715, ...
pub fn no_singleton_count(n: usize) -> BigUint {
    // V(m+1) = Bell(m) - V(m)
    let mut v = BigUint::one();
    for m in 0..n {
        v = bell_number(m) - v;
    }
    v
}

/// Exact count for the requested family; agrees with the filtered
/// enumeration for every n below the caps.
pub fn partition_counts(n: usize, family: PartitionFamily) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::invalid("partition_counts requires n >= 1"));
    }
    Ok(match family {
        PartitionFamily::All => bell_number(n),
        PartitionFamily::Noncrossing => catalan_number(n),
        PartitionFamily::NoncrossingNoSingleton => noncrossing_no_singleton_count(n),
        PartitionFamily::AllNoSingleton => no_singleton_count(n),
    })
}
