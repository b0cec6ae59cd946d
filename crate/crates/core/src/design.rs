//! Block construction: the canonical uniform block, enumeration of every
//! uniform subset with a given sequence, block counts, the explicit
//! parameter family and chain collapses.

use std::fmt;
use std::io::{self, Write};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::chain::{join, ChainSpec};
use crate::error::{DesignError, Result};
use crate::feasibility::{check_ft, UniformSequence};

/// Default cap on the number of blocks that may be streamed.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// A block: a set of point ranks kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    ranks: Vec<u32>,
}

impl Block {
    /// Builds a block from arbitrary ranks; rejects duplicates and ranks
    /// outside the chain.
    pub fn from_ranks(chain: &ChainSpec, mut ranks: Vec<u32>) -> Result<Self> {
        chain.check_materializable()?;
        ranks.sort_unstable();
        if let Some(w) = ranks.windows(2).find(|w| w[0] == w[1]) {
            return Err(DesignError::PointOutOfRange(format!(
                "rank {} repeated in block",
                w[0]
            )));
        }
        if let Some(&r) = ranks.last() {
            if r as u64 >= chain.v() {
                return Err(DesignError::PointOutOfRange(format!(
                    "rank {r} is not below v={}",
                    chain.v()
                )));
            }
        }
        Ok(Block { ranks })
    }

    pub(crate) fn from_sorted_unchecked(ranks: Vec<u32>) -> Self {
        debug_assert!(ranks.windows(2).all(|w| w[0] < w[1]));
        Block { ranks }
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn contains(&self, rank: u32) -> bool {
        self.ranks.binary_search(&rank).is_ok()
    }

    /// Image of the block under the permutation `images`.
    pub fn image(&self, images: &[u32]) -> Block {
        let mut ranks: Vec<u32> = self.ranks.iter().map(|&r| images[r as usize]).collect();
        ranks.sort_unstable();
        Block { ranks }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ranks.iter().map(|r| r.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// `{ (d_1..d_s) : 0 <= d_i < y_i / y_{i-1} }`.
pub fn canonical_block(chain: &ChainSpec, y: &UniformSequence) -> Result<Block> {
    chain.check_materializable()?;
    UniformSequence::new(chain, y.values().to_vec())?;
    let mut ranks = vec![0u32];
    // extend coordinate by coordinate, highest first, so ranks stay sorted
    for i in (1..=chain.s()).rev() {
        let step = chain.c(i - 1) as u32;
        ranks = ranks
            .iter()
            .flat_map(|&base| (0..y.ratio(i) as u32).map(move |t| base + t * step))
            .collect();
    }
    ranks.sort_unstable();
    Ok(Block { ranks })
}

/// Returns the uniform sequence of a nonempty point set, or a witness level
/// with two classes holding different nonzero counts.
pub fn is_uniform(chain: &ChainSpec, block: &Block) -> Result<UniformSequence> {
    if block.is_empty() {
        return Err(DesignError::EmptyBlock);
    }
    let array = chain.array_of(block.ranks());
    let mut y = vec![1u64];
    for level in 1..=chain.s() {
        let mut entries = array.level_entries(level);
        let (j0, x0) = entries.next().expect("nonempty block meets every level");
        if let Some((j1, x1)) = entries.find(|&(_, x)| x != x0) {
            return Err(DesignError::NotUniform {
                level,
                first: chain.class_from_index(level, j0).to_string(),
                second: chain.class_from_index(level, j1).to_string(),
                first_count: x0,
                second_count: x1,
            });
        }
        y.push(x0);
    }
    UniformSequence::new(chain, y)
}

/// Exact `n choose r`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Number of uniform subsets with sequence `y`:
/// `prod_j binom(e_j, y_j / y_{j-1})^(k / y_j)`.
pub fn block_count(chain: &ChainSpec, y: &UniformSequence) -> BigUint {
    let k = y.k();
    (1..=chain.s()).fold(BigUint::one(), |acc, j| {
        let exp = (k / y.get(j)) as u32;
        acc * binomial(chain.e_at(j), y.ratio(j)).pow(exp)
    })
}

/// Lazy, deterministic stream of every uniform subset with a given sequence.
///
/// A block inside a level-`i` class is a choice of `y_i / y_{i-1}` of its
/// `e_i` subclasses together with a block inside each chosen subclass.
/// Subclass choices run in colexicographic order; for a fixed choice the
/// sub-blocks are varied odometer-style with the highest chosen subclass
/// changing fastest. The outermost choice (at level `s`) changes slowest.
pub struct BlockEnumerator {
    chain: ChainSpec,
    y: UniformSequence,
    root: Node,
    state: StreamState,
    total: BigUint,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum StreamState {
    Fresh,
    Running,
    Done,
}

struct Node {
    level: usize,
    base: u64,
    subset: Vec<u64>,
    children: Vec<Node>,
}

impl Node {
    fn first(chain: &ChainSpec, y: &UniformSequence, level: usize, base: u64) -> Node {
        let subset: Vec<u64> = (0..y.ratio(level)).collect();
        let children = Node::children_for(chain, y, level, base, &subset);
        Node {
            level,
            base,
            subset,
            children,
        }
    }

    fn children_for(
        chain: &ChainSpec,
        y: &UniformSequence,
        level: usize,
        base: u64,
        subset: &[u64],
    ) -> Vec<Node> {
        if level == 1 {
            return Vec::new();
        }
        let width = chain.c(level - 1);
        subset
            .iter()
            .map(|&t| Node::first(chain, y, level - 1, base + t * width))
            .collect()
    }

    /// Moves to the next state; on wrap-around resets and returns `false`.
    fn advance(&mut self, chain: &ChainSpec, y: &UniformSequence) -> bool {
        for child in self.children.iter_mut().rev() {
            if child.advance(chain, y) {
                return true;
            }
        }
        let advanced = next_colex(&mut self.subset, chain.e_at(self.level));
        if !advanced {
            for (t, slot) in self.subset.iter_mut().enumerate() {
                *slot = t as u64;
            }
        }
        self.children = Node::children_for(chain, y, self.level, self.base, &self.subset);
        advanced
    }

    fn collect(&self, out: &mut Vec<u32>) {
        if self.level == 1 {
            out.extend(self.subset.iter().map(|&t| (self.base + t) as u32));
        } else {
            for child in &self.children {
                child.collect(out);
            }
        }
    }
}

/// Advances a sorted r-subset of `0..n` to its colex successor.
fn next_colex(subset: &mut [u64], n: u64) -> bool {
    let r = subset.len();
    for j in 0..r {
        let limit = if j + 1 < r { subset[j + 1] } else { n };
        if subset[j] + 1 < limit {
            subset[j] += 1;
            for (t, slot) in subset[..j].iter_mut().enumerate() {
                *slot = t as u64;
            }
            return true;
        }
    }
    false
}

impl BlockEnumerator {
    /// Fails with the exact block count when it exceeds `cap`.
    pub fn new(chain: &ChainSpec, y: &UniformSequence, cap: u64) -> Result<Self> {
        chain.check_materializable()?;
        let y = UniformSequence::new(chain, y.values().to_vec())?;
        let total = block_count(chain, &y);
        if total > BigUint::from(cap) {
            return Err(DesignError::CapExceeded {
                what: "block",
                size: total,
                cap,
            });
        }
        let root = Node::first(chain, &y, chain.s(), 0);
        Ok(BlockEnumerator {
            chain: chain.clone(),
            y,
            root,
            state: StreamState::Fresh,
            total,
        })
    }

    /// Number of blocks the stream yields in total.
    pub fn total(&self) -> &BigUint {
        &self.total
    }
}

impl Iterator for BlockEnumerator {
    type Item = Block;

    fn next(&mut self) -> Option<Block> {
        match self.state {
            StreamState::Done => return None,
            StreamState::Fresh => self.state = StreamState::Running,
            StreamState::Running => {
                if !self.root.advance(&self.chain, &self.y) {
                    self.state = StreamState::Done;
                    return None;
                }
            }
        }
        let mut ranks = Vec::with_capacity(self.y.k() as usize);
        self.root.collect(&mut ranks);
        Some(Block::from_sorted_unchecked(ranks))
    }
}

/// Convenience wrapper around [`BlockEnumerator::new`].
pub fn enumerate_blocks(
    chain: &ChainSpec,
    y: &UniformSequence,
    cap: u64,
) -> Result<BlockEnumerator> {
    BlockEnumerator::new(chain, y, cap)
}

/// Draws a uniform subset with sequence `y`, uniformly at random among all of
/// them: at every level each meeting class picks its subclasses independently.
pub fn random_uniform_block<R: Rng + ?Sized>(
    chain: &ChainSpec,
    y: &UniformSequence,
    rng: &mut R,
) -> Result<Block> {
    chain.check_materializable()?;
    let mut bases = vec![0u64];
    for level in (1..=chain.s()).rev() {
        let width = chain.c(level - 1);
        let r = y.ratio(level) as usize;
        let e = chain.e_at(level) as usize;
        bases = bases
            .iter()
            .flat_map(|&base| {
                let picks = rand::seq::index::sample(rng, e, r);
                picks
                    .into_iter()
                    .map(|t| base + t as u64 * width)
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    let mut ranks: Vec<u32> = bases.into_iter().map(|r| r as u32).collect();
    ranks.sort_unstable();
    Ok(Block::from_sorted_unchecked(ranks))
}

/// Full parameter set of the design whose blocks are all uniform subsets
/// with the sequence determined by `(chain, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignSpec {
    pub chain: ChainSpec,
    pub k: u64,
    pub d: u64,
    pub u: u64,
    pub y: UniformSequence,
    pub b: BigUint,
    pub lambda: BigUint,
    /// Replication number `b k / v`.
    pub r: BigUint,
}

pub fn design_spec(chain: &ChainSpec, k: u64) -> Result<DesignSpec> {
    let report = check_ft(chain, k)?;
    let (Some(y), Some(u)) = (report.y.clone(), report.u) else {
        return Err(DesignError::Infeasible {
            e: chain.label(),
            k,
            reason: report.failure_reason().unwrap_or_default(),
        });
    };
    let b = block_count(chain, &y);
    let v = BigUint::from(chain.v());
    let bk = &b * k;
    let (lambda, lrem) = (&bk * (k - 1)).div_rem(&(&v * (chain.v() - 1)));
    let (r, rrem) = bk.div_rem(&v);
    if !lrem.is_zero() || !rrem.is_zero() {
        return Err(DesignError::Internal(format!(
            "lambda or r not integral for e={} k={k}",
            chain.label()
        )));
    }
    if &lambda * (chain.v() - 1) != &r * (k - 1) {
        return Err(DesignError::Internal(format!(
            "lambda (v-1) != r (k-1) for e={} k={k}",
            chain.label()
        )));
    }
    Ok(DesignSpec {
        chain: chain.clone(),
        k,
        d: report.d,
        u,
        y,
        b,
        lambda,
        r,
    })
}

/// The explicit family: `e_1 = d + 1`, `e_i = d + e_1 ... e_{i-1}`,
/// `k = 1 + (v - 1) / d`.
pub fn family_params(s: usize, d: u64) -> Result<(ChainSpec, u64)> {
    if s < 2 || d < 2 {
        return Err(DesignError::InvalidChain(format!(
            "family needs s >= 2 and d >= 2, got s={s} d={d}"
        )));
    }
    let overflow = || DesignError::InvalidChain("family parameters overflow u64".into());
    let mut e = vec![d + 1];
    let mut prod = d + 1;
    for _ in 1..s {
        let ei = d.checked_add(prod).ok_or_else(overflow)?;
        prod = prod.checked_mul(ei).ok_or_else(overflow)?;
        e.push(ei);
    }
    let chain = ChainSpec::new(e)?;
    let k = 1 + (chain.v() - 1) / d;
    Ok((chain, k))
}

/// Merges the levels around partition `i` (`1 <= i < s`): the new chain has
/// `e_i e_{i+1}` in place of `e_i, e_{i+1}`, and the same points and `k`.
pub fn collapse_chain(chain: &ChainSpec, k: u64, i: usize) -> Result<(ChainSpec, u64)> {
    let s = chain.s();
    if s < 3 {
        return Err(DesignError::CannotCollapse { s });
    }
    if i == 0 || i >= s {
        return Err(DesignError::LevelOutOfRange { level: i, s: s - 1 });
    }
    let report = check_ft(chain, k)?;
    if !report.feasible() {
        return Err(DesignError::Infeasible {
            e: chain.label(),
            k,
            reason: report.failure_reason().unwrap_or_default(),
        });
    }
    let e = chain.e();
    let mut merged = e[..i - 1].to_vec();
    merged.push(e[i - 1] * e[i]);
    merged.extend_from_slice(&e[i + 1..]);
    let collapsed = ChainSpec::new(merged)?;
    let after = check_ft(&collapsed, k)?;
    if !after.feasible() {
        return Err(DesignError::Internal(format!(
            "collapse of e={} at {i} gives infeasible e={}: {}",
            chain.label(),
            collapsed.label(),
            after.failure_reason().unwrap_or_default()
        )));
    }
    Ok((collapsed, k))
}

/// Writes the design header and, if `blocks` is given, one block per line.
///
/// ```text
/// v=16
/// k=6
/// lambda=108
/// b=864
/// e=4,4
/// y=1,2,6
/// 0 1 4 5 8 9
/// ...
/// ```
pub fn write_design<W: Write + ?Sized>(
    out: &mut W,
    spec: &DesignSpec,
    blocks: Option<Result<BlockEnumerator>>,
) -> io::Result<ExportOutcome> {
    writeln!(out, "v={}", spec.chain.v())?;
    writeln!(out, "k={}", spec.k)?;
    writeln!(out, "lambda={}", spec.lambda)?;
    writeln!(out, "b={}", spec.b)?;
    writeln!(out, "e={}", join(spec.chain.e()))?;
    writeln!(out, "y={}", spec.y)?;
    match blocks {
        None => Ok(ExportOutcome::HeaderOnly),
        Some(Err(DesignError::CapExceeded { .. })) => {
            writeln!(out, "blocks=omitted(cap-exceeded)")?;
            Ok(ExportOutcome::CapExceeded)
        }
        Some(Err(e)) => Err(io::Error::other(e)),
        Some(Ok(iter)) => {
            let mut n = 0u64;
            for block in iter {
                writeln!(out, "{block}")?;
                n += 1;
            }
            Ok(ExportOutcome::Enumerated(n))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportOutcome {
    HeaderOnly,
    CapExceeded,
    Enumerated(u64),
}

impl DesignSpec {
    /// `b` as a `u64` when it fits.
    pub fn b_u64(&self) -> Option<u64> {
        self.b.to_u64()
    }
}
