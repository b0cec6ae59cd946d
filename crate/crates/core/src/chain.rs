//! Point sets `Z_{e_1} x ... x Z_{e_s}` together with their nested chain of
//! partitions.
//!
//! Points are addressed by a mixed-radix rank in which the first coordinate
//! is least significant:
//!
//! ```text
//! rank(d_1, ..., d_s) = d_1 + e_1 * (d_2 + e_2 * (d_3 + ...))
//! ```
//!
//! With this encoding every class at level `i` (all points sharing the
//! coordinates above position `i`) is the contiguous rank interval
//! `[j * c_i, (j + 1) * c_i)`, where `j = rank / c_i` is the class index.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{DesignError, Result};

/// Largest point count for which points, blocks and permutations are
/// materialized. Arithmetic-only routines accept any chain whose `v` fits in
/// a `u64`.
pub const MAX_MATERIALIZED_POINTS: u64 = u32::MAX as u64;

/// The parameters `(e_1, ..., e_s)` of a partition chain plus the derived
/// class sizes and class counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainSpec {
    e: Vec<u64>,
    v: u64,
    c: Vec<u64>,
    d_counts: Vec<u64>,
}

impl ChainSpec {
    pub fn new(e: Vec<u64>) -> Result<Self> {
        if e.len() < 2 {
            return Err(DesignError::InvalidChain(format!(
                "chain length s={} must be at least 2",
                e.len()
            )));
        }
        if let Some(bad) = e.iter().find(|&&x| x < 2) {
            return Err(DesignError::InvalidChain(format!(
                "every e_i must be at least 2, found {bad}"
            )));
        }
        let mut c = Vec::with_capacity(e.len() + 1);
        c.push(1u64);
        for &ei in &e {
            let next = c
                .last()
                .unwrap()
                .checked_mul(ei)
                .ok_or_else(|| DesignError::InvalidChain("point count overflows u64".into()))?;
            c.push(next);
        }
        let v = *c.last().unwrap();
        let d_counts = c.iter().map(|&ci| v / ci).collect();
        Ok(ChainSpec { e, v, c, d_counts })
    }

    /// Chain length `s`.
    pub fn s(&self) -> usize {
        self.e.len()
    }

    /// The sequence `(e_1, ..., e_s)`.
    pub fn e(&self) -> &[u64] {
        &self.e
    }

    /// `e_i` for `1 <= i <= s`; `e_0 = 1` by convention.
    pub fn e_at(&self, i: usize) -> u64 {
        if i == 0 {
            1
        } else {
            self.e[i - 1]
        }
    }

    pub fn v(&self) -> u64 {
        self.v
    }

    /// Size of each level-`i` class.
    pub fn c(&self, i: usize) -> u64 {
        self.c[i]
    }

    /// Number of level-`i` classes.
    pub fn d_count(&self, i: usize) -> u64 {
        self.d_counts[i]
    }

    /// `gcd(e_1 - 1, ..., e_s - 1)`.
    pub fn gcd_d(&self) -> u64 {
        self.e
            .iter()
            .fold(0u64, |acc, &x| num_integer::gcd(acc, x - 1))
    }

    pub fn check_level(&self, level: usize) -> Result<()> {
        if level > self.s() {
            Err(DesignError::LevelOutOfRange { level, s: self.s() })
        } else {
            Ok(())
        }
    }

    pub fn check_materializable(&self) -> Result<()> {
        if self.v > MAX_MATERIALIZED_POINTS {
            Err(DesignError::ChainTooLarge { v: self.v })
        } else {
            Ok(())
        }
    }

    /// Comma-separated `e_1,...,e_s`.
    pub fn label(&self) -> String {
        join(&self.e)
    }

    pub fn point(&self, coords: &[u64]) -> Result<Point> {
        if coords.len() != self.s() {
            return Err(DesignError::PointOutOfRange(format!(
                "expected {} coordinates, got {}",
                self.s(),
                coords.len()
            )));
        }
        for (i, (&x, &ei)) in coords.iter().zip(&self.e).enumerate() {
            if x >= ei {
                return Err(DesignError::PointOutOfRange(format!(
                    "coordinate {} is {x}, must be below {ei}",
                    i + 1
                )));
            }
        }
        Ok(Point {
            coords: coords.to_vec(),
        })
    }

    pub fn rank(&self, p: &Point) -> u64 {
        p.coords.iter().zip(&self.c).map(|(&x, &ci)| x * ci).sum()
    }

    pub fn point_from_rank(&self, rank: u64) -> Result<Point> {
        if rank >= self.v {
            return Err(DesignError::PointOutOfRange(format!(
                "rank {rank} is not below v={}",
                self.v
            )));
        }
        let mut r = rank;
        let coords = self
            .e
            .iter()
            .map(|&ei| {
                let x = r % ei;
                r /= ei;
                x
            })
            .collect();
        Ok(Point { coords })
    }

    /// Parses `(d1,...,ds)` or `#rank`.
    pub fn parse_point(&self, text: &str) -> Result<Point> {
        let t = text.trim();
        if let Some(r) = t.strip_prefix('#') {
            let rank = r
                .trim()
                .parse::<u64>()
                .map_err(|_| DesignError::Parse(format!("bad point rank {t:?}")))?;
            return self.point_from_rank(rank);
        }
        let inner = t
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(|| DesignError::Parse(format!("bad point syntax {t:?}")))?;
        let coords = inner
            .split(',')
            .map(|x| x.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| DesignError::Parse(format!("bad point coordinates {t:?}")))?;
        self.point(&coords)
    }

    /// Index of the level-`level` class that contains the point of rank `rank`.
    #[inline]
    pub fn class_index(&self, rank: u64, level: usize) -> u64 {
        rank / self.c[level]
    }

    pub fn class_from_index(&self, level: usize, index: u64) -> ClassId {
        let mut r = index;
        let suffix = self.e[level..]
            .iter()
            .map(|&ej| {
                let x = r % ej;
                r /= ej;
                x
            })
            .collect();
        ClassId { level, suffix }
    }

    pub fn class_index_of(&self, class: &ClassId) -> u64 {
        class
            .suffix
            .iter()
            .rev()
            .zip(self.e[class.level..].iter().rev())
            .fold(0u64, |acc, (&x, &ej)| acc * ej + x)
    }

    pub fn class_of(&self, p: &Point, level: usize) -> Result<ClassId> {
        self.check_level(level)?;
        if p.coords.len() != self.s() {
            return Err(DesignError::PointOutOfRange(format!(
                "point has {} coordinates, chain has {}",
                p.coords.len(),
                self.s()
            )));
        }
        Ok(ClassId {
            level,
            suffix: p.coords[level..].to_vec(),
        })
    }

    /// The unique level-`(i+1)` class containing the given level-`i` class.
    pub fn parent_class(&self, class: &ClassId) -> Result<ClassId> {
        if class.level >= self.s() {
            return Err(DesignError::LevelOutOfRange {
                level: class.level + 1,
                s: self.s(),
            });
        }
        Ok(ClassId {
            level: class.level + 1,
            suffix: class.suffix[1..].to_vec(),
        })
    }

    /// Rank interval occupied by a class.
    pub fn class_range(&self, class: &ClassId) -> std::ops::Range<u64> {
        let ci = self.c[class.level];
        let start = self.class_index_of(class) * ci;
        start..start + ci
    }

    pub fn classes_at(&self, level: usize) -> impl Iterator<Item = ClassId> + '_ {
        (0..self.d_counts[level]).map(move |j| self.class_from_index(level, j))
    }

    /// Classes at `level` that meet the point set given by ranks.
    pub fn classes_meeting(&self, ranks: &[u32], level: usize) -> Result<BTreeSet<ClassId>> {
        self.check_level(level)?;
        let indices: BTreeSet<u64> = ranks
            .iter()
            .map(|&r| self.class_index(r as u64, level))
            .collect();
        Ok(indices
            .into_iter()
            .map(|j| self.class_from_index(level, j))
            .collect())
    }

    /// Array function `C -> |B ∩ C|` over levels `1..=s`.
    pub fn array_of(&self, ranks: &[u32]) -> ArrayFunction {
        let mut levels = vec![BTreeMap::new(); self.s()];
        for &r in ranks {
            for (slot, level) in levels.iter_mut().zip(1..=self.s()) {
                *slot
                    .entry(self.class_index(r as u64, level))
                    .or_insert(0u64) += 1;
            }
        }
        ArrayFunction {
            chain: self.clone(),
            levels,
        }
    }

    /// Level-`level` class index that the image of class `index` occupies
    /// under `images`, or an error when the image is not a single class.
    fn image_class(&self, images: &[u32], level: usize, index: u64) -> Result<u64> {
        let ci = self.c[level];
        let start = index * ci;
        let target = self.class_index(images[start as usize] as u64, level);
        for r in start + 1..start + ci {
            if self.class_index(images[r as usize] as u64, level) != target {
                return Err(DesignError::NotChainPreserving { level });
            }
        }
        Ok(target)
    }

    /// `a^g` where `a^g(C) = a(C^{g^{-1}})`, i.e. every value moves to the image
    /// of its class. `images[r]` is the rank that `g` sends rank `r` to.
    pub fn permute_array(&self, a: &ArrayFunction, images: &[u32]) -> Result<ArrayFunction> {
        self.check_materializable()?;
        if images.len() as u64 != self.v {
            return Err(DesignError::InvalidChain(format!(
                "permutation has {} images, chain has {} points",
                images.len(),
                self.v
            )));
        }
        let mut levels = vec![BTreeMap::new(); self.s()];
        for (level_idx, values) in a.levels.iter().enumerate() {
            let level = level_idx + 1;
            for (&index, &x) in values {
                let target = self.image_class(images, level, index)?;
                if levels[level_idx].insert(target, x).is_some() {
                    return Err(DesignError::NotChainPreserving { level });
                }
            }
        }
        Ok(ArrayFunction {
            chain: self.clone(),
            levels,
        })
    }
}

/// A point `(d_1, ..., d_s)` with `0 <= d_i < e_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    coords: Vec<u64>,
}

impl Point {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", join(&self.coords))
    }
}

/// The level-`level` class `C_{(d_j)_{j > level}}`, identified by the
/// coordinates above `level`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId {
    pub level: usize,
    pub suffix: Vec<u64>,
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}({})", self.level, join(&self.suffix))
    }
}

/// Sparse array function of a point subset: absent classes hold zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayFunction {
    chain: ChainSpec,
    // levels[i - 1] maps class index at level i to |B ∩ C|
    levels: Vec<BTreeMap<u64, u64>>,
}

impl ArrayFunction {
    pub fn chain(&self) -> &ChainSpec {
        &self.chain
    }

    pub fn get(&self, class: &ClassId) -> u64 {
        if class.level == 0 || class.level > self.chain.s() {
            return 0;
        }
        self.value_at(class.level, self.chain.class_index_of(class))
    }

    /// Value at the class with the given index on `level` (`1..=s`).
    pub fn value_at(&self, level: usize, index: u64) -> u64 {
        self.levels[level - 1].get(&index).copied().unwrap_or(0)
    }

    /// Nonzero entries on `level` as `(class index, value)`, ascending.
    pub fn level_entries(&self, level: usize) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.levels[level - 1].iter().map(|(&j, &x)| (j, x))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (ClassId, u64)> + '_ {
        self.levels.iter().enumerate().flat_map(move |(l, m)| {
            m.iter()
                .map(move |(&j, &x)| (self.chain.class_from_index(l + 1, j), x))
        })
    }

    /// Value on the whole point set.
    pub fn total(&self) -> u64 {
        self.value_at(self.chain.s(), 0)
    }

    /// Sorted multiset of nonzero values on a level.
    pub fn level_multiset(&self, level: usize) -> Vec<u64> {
        let mut vals: Vec<u64> = self.levels[level - 1].values().copied().collect();
        vals.sort_unstable();
        vals
    }
}

pub(crate) fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses `e1,e2,...` into a chain.
pub fn parse_chain(text: &str) -> Result<ChainSpec> {
    let e = text
        .split(',')
        .map(|x| x.trim().parse::<u64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| DesignError::Parse(format!("bad chain {text:?}, expected e1,e2,...")))?;
    ChainSpec::new(e)
}
