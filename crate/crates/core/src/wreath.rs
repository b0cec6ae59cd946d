//! Explicit permutations of the iterated wreath product
//! `W = S_{e_1} wr ... wr S_{e_s}` acting on point ranks, and orbit
//! computations under a generating set.
//!
//! An element of `W` rewrites coordinate `i` of a point by a permutation of
//! `Z_{e_i}` that may depend on the coordinates above `i`. Every permutation
//! built here has that shape.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::Hash;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::chain::ChainSpec;
use crate::design::{canonical_block, is_uniform, Block};
use crate::error::{DesignError, Result};
use crate::feasibility::UniformSequence;

/// A permutation of the point ranks that maps every class of every level
/// onto a class of the same level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainPermutation {
    images: Vec<u32>,
}

impl ChainPermutation {
    /// Validates bijectivity and chain preservation.
    pub fn new(chain: &ChainSpec, images: Vec<u32>) -> Result<Self> {
        chain.check_materializable()?;
        if images.len() as u64 != chain.v() {
            return Err(DesignError::InvalidChain(format!(
                "permutation has {} images, chain has {} points",
                images.len(),
                chain.v()
            )));
        }
        let mut seen = vec![false; images.len()];
        for &x in &images {
            let slot = seen
                .get_mut(x as usize)
                .ok_or_else(|| DesignError::PointOutOfRange(format!("image {x} is not a point")))?;
            if *slot {
                return Err(DesignError::InvalidChain(format!(
                    "image {x} appears twice, not a bijection"
                )));
            }
            *slot = true;
        }
        for level in 1..chain.s() {
            let ci = chain.c(level) as usize;
            for class in images.chunks(ci) {
                let target = chain.class_index(class[0] as u64, level);
                if class[1..]
                    .iter()
                    .any(|&x| chain.class_index(x as u64, level) != target)
                {
                    return Err(DesignError::NotChainPreserving { level });
                }
            }
        }
        Ok(ChainPermutation { images })
    }

    fn from_images_unchecked(images: Vec<u32>) -> Self {
        ChainPermutation { images }
    }

    pub fn identity(chain: &ChainSpec) -> Result<Self> {
        chain.check_materializable()?;
        Ok(ChainPermutation {
            images: (0..chain.v() as u32).collect(),
        })
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, rank: u32) -> u32 {
        self.images[rank as usize]
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &ChainPermutation) -> ChainPermutation {
        ChainPermutation {
            images: self
                .images
                .iter()
                .map(|&x| other.images[x as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> ChainPermutation {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        ChainPermutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// Parses the one-line image array format written by `Display`.
    pub fn parse(chain: &ChainSpec, text: &str) -> Result<Self> {
        let images = text
            .split_whitespace()
            .map(|t| t.parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| DesignError::Parse(format!("bad permutation {text:?}")))?;
        ChainPermutation::new(chain, images)
    }
}

impl AsRef<[u32]> for ChainPermutation {
    fn as_ref(&self) -> &[u32] {
        &self.images
    }
}

impl fmt::Display for ChainPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub chain: ChainSpec,
    pub gens: Vec<ChainPermutation>,
}

/// Permutation acting on coordinate `level` of the points in the level-`level`
/// class with index `class`, by `sigma` on `Z_{e_level}`; identity elsewhere.
fn coordinate_permutation(
    chain: &ChainSpec,
    level: usize,
    class: u64,
    sigma: &[u64],
) -> ChainPermutation {
    let mut images: Vec<u32> = (0..chain.v() as u32).collect();
    let (ci, step, e) = (chain.c(level), chain.c(level - 1), chain.e_at(level));
    for r in class * ci..(class + 1) * ci {
        let x = (r / step) % e;
        images[r as usize] = (r + sigma[x as usize] * step - x * step) as u32;
    }
    ChainPermutation::from_images_unchecked(images)
}

/// Transposition `(0 1)` and the cycle `(0 1 ... n-1)` on `Z_e`, moving only
/// the first `n` symbols.
fn transposition_and_cycle(e: u64, n: u64) -> [Vec<u64>; 2] {
    let mut swap: Vec<u64> = (0..e).collect();
    swap.swap(0, 1);
    let cycle = (0..e)
        .map(|x| if x < n { (x + 1) % n } else { x })
        .collect();
    [swap, cycle]
}

/// Two generators per level: a transposition and a full `e_i`-cycle on
/// coordinate `i`, each supported on the first level-`i` class. Together they
/// generate the whole chain stabilizer.
pub fn wreath_generators(chain: &ChainSpec) -> Result<GeneratorSet> {
    chain.check_materializable()?;
    let gens = (1..=chain.s())
        .flat_map(|level| {
            let e = chain.e_at(level);
            transposition_and_cycle(e, e)
                .into_iter()
                .map(move |sigma| coordinate_permutation(chain, level, 0, &sigma))
        })
        .collect();
    Ok(GeneratorSet {
        chain: chain.clone(),
        gens,
    })
}

/// Anything the chain stabilizer acts on.
pub trait Act: Clone + Eq + Hash + Send + Sync {
    fn act(&self, g: &ChainPermutation) -> Self;
}

impl Act for u32 {
    fn act(&self, g: &ChainPermutation) -> Self {
        g.apply(*self)
    }
}

impl Act for Block {
    fn act(&self, g: &ChainPermutation) -> Self {
        self.image(g.images())
    }
}

/// A block on a chain of at most 64 points, as a bit set of ranks. Orbits of
/// millions of blocks fit in memory this way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockMask(pub u64);

impl BlockMask {
    pub fn from_block(chain: &ChainSpec, block: &Block) -> Result<Self> {
        if chain.v() > 64 {
            return Err(DesignError::ChainTooLarge { v: chain.v() });
        }
        Ok(BlockMask(block.ranks().iter().fold(0, |m, &r| m | 1 << r)))
    }

    pub fn to_block(self) -> Block {
        Block::from_sorted_unchecked((0..64).filter(|&r| self.0 >> r & 1 == 1).collect())
    }
}

impl Act for BlockMask {
    fn act(&self, g: &ChainPermutation) -> Self {
        let mut bits = self.0;
        let mut image = 0u64;
        while bits != 0 {
            let r = bits.trailing_zeros();
            image |= 1 << g.apply(r);
            bits &= bits - 1;
        }
        BlockMask(image)
    }
}

/// An incident (point, block) pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Flag {
    pub point: u32,
    pub block: Block,
}

impl Act for Flag {
    fn act(&self, g: &ChainPermutation) -> Self {
        Flag {
            point: g.apply(self.point),
            block: self.block.act(g),
        }
    }
}

/// Breadth-first closure of `seed` under `gens`. Fails once the orbit grows
/// past `cap`, reporting how many elements had been reached.
pub fn orbit<T: Act>(seed: &T, gens: &[ChainPermutation], cap: usize) -> Result<HashSet<T>> {
    let mut seen = HashSet::new();
    seen.insert(seed.clone());
    let mut frontier = vec![seed.clone()];
    while !frontier.is_empty() {
        let images: Vec<T> = frontier
            .par_iter()
            .flat_map_iter(|x| gens.iter().map(move |g| x.act(g)))
            .collect();
        frontier = Vec::new();
        for img in images {
            if seen.insert(img.clone()) {
                frontier.push(img);
                if seen.len() > cap {
                    return Err(DesignError::OrbitCapExceeded {
                        cap,
                        partial: seen.len(),
                    });
                }
            }
        }
    }
    Ok(seen)
}

/// `prod_i (e_i!)^(d_i)`, the order of the chain stabilizer.
pub fn wreath_order(chain: &ChainSpec) -> BigUint {
    (1..=chain.s()).fold(BigUint::from(1u32), |acc, i| {
        let fact = (1..=chain.e_at(i)).fold(BigUint::from(1u32), |f, x| f * x);
        acc * fact.pow(chain.d_count(i) as u32)
    })
}

/// Enumerates the generated group element by element. Only sensible for
/// tiny groups; fails past `cap` elements.
pub fn group_order_naive(gens: &GeneratorSet, cap: usize) -> Result<u64> {
    let id = ChainPermutation::identity(&gens.chain)?;
    Ok(orbit_of_elements(&id, &gens.gens, cap)? as u64)
}

fn orbit_of_elements(
    id: &ChainPermutation,
    gens: &[ChainPermutation],
    cap: usize,
) -> Result<usize> {
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    seen.insert(id.images.clone());
    let mut frontier = vec![id.clone()];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = x.then(g);
            if seen.insert(y.images.clone()) {
                if seen.len() > cap {
                    return Err(DesignError::OrbitCapExceeded {
                        cap,
                        partial: seen.len(),
                    });
                }
                frontier.push(y);
            }
        }
    }
    Ok(seen.len())
}

struct StabLevel {
    base: u32,
    gens: Vec<ChainPermutation>,
    // transversal[x] maps base to x
    transversal: HashMap<u32, ChainPermutation>,
}

/// Group order from a base and strong generating set built by the
/// deterministic Schreier-Sims procedure.
pub fn group_order(gens: &GeneratorSet) -> Result<BigUint> {
    let n = gens.chain.v() as usize;
    let id = ChainPermutation::identity(&gens.chain)?;
    let mut levels: Vec<StabLevel> = Vec::new();

    fn strong_gens(levels: &[StabLevel], from: usize) -> Vec<ChainPermutation> {
        levels[from..]
            .iter()
            .flat_map(|l| l.gens.iter().cloned())
            .collect()
    }

    fn rebuild(levels: &mut [StabLevel], upto: usize, id: &ChainPermutation) {
        for l in (0..=upto).rev() {
            let sgens = strong_gens(levels, l);
            let base = levels[l].base;
            let mut trans = HashMap::new();
            trans.insert(base, id.clone());
            let mut queue = vec![base];
            while let Some(x) = queue.pop() {
                let ux = trans[&x].clone();
                for s in &sgens {
                    let y = s.apply(x);
                    if let std::collections::hash_map::Entry::Vacant(slot) = trans.entry(y) {
                        slot.insert(ux.then(s));
                        queue.push(y);
                    }
                }
            }
            levels[l].transversal = trans;
        }
    }

    fn strip(
        levels: &[StabLevel],
        mut h: ChainPermutation,
        from: usize,
    ) -> (ChainPermutation, usize) {
        for (l, level) in levels.iter().enumerate().skip(from) {
            match level.transversal.get(&h.apply(level.base)) {
                Some(u) => h = h.then(&u.inverse()),
                None => return (h, l),
            }
        }
        (h, levels.len())
    }

    fn add(levels: &mut Vec<StabLevel>, h: ChainPermutation, at: usize, id: &ChainPermutation) {
        if at == levels.len() {
            let base = h
                .images
                .iter()
                .enumerate()
                .find(|&(i, &x)| i as u32 != x)
                .map(|(i, _)| i as u32)
                .expect("non-identity residue moves a point");
            levels.push(StabLevel {
                base,
                gens: Vec::new(),
                transversal: HashMap::new(),
            });
        }
        levels[at].gens.push(h);
        rebuild(levels, at, id);
    }

    for g in &gens.gens {
        let (h, at) = strip(&levels, g.clone(), 0);
        if !h.is_identity() {
            add(&mut levels, h, at, &id);
        }
    }

    'outer: loop {
        for l in (0..levels.len()).rev() {
            let sgens = strong_gens(&levels, l);
            let points: Vec<u32> = levels[l].transversal.keys().copied().collect();
            for x in points {
                for s in &sgens {
                    let y = s.apply(x);
                    let schreier = levels[l].transversal[&x]
                        .then(s)
                        .then(&levels[l].transversal[&y].inverse());
                    let (h, at) = strip(&levels, schreier, l + 1);
                    if !h.is_identity() {
                        add(&mut levels, h, at, &id);
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    debug_assert!(levels.iter().all(|l| (l.base as usize) < n));
    Ok(levels
        .iter()
        .fold(BigUint::from(1u32), |acc, l| acc * l.transversal.len()))
}

/// Uniformly random element of the chain stabilizer: an independent random
/// permutation of `Z_{e_i}` for every level-`i` class.
pub fn random_element<R: Rng + ?Sized>(chain: &ChainSpec, rng: &mut R) -> Result<ChainPermutation> {
    chain.check_materializable()?;
    let tables: Vec<Vec<Vec<u64>>> = (1..=chain.s())
        .map(|level| {
            (0..chain.d_count(level))
                .map(|_| {
                    let mut sigma: Vec<u64> = (0..chain.e_at(level)).collect();
                    sigma.shuffle(rng);
                    sigma
                })
                .collect()
        })
        .collect();
    Ok(ChainPermutation::from_images_unchecked(apply_tables(
        chain,
        |level, class| Some(&tables[level - 1][class as usize]),
    )))
}

/// Builds the permutation sending each rank `r` to the point whose `i`-th
/// coordinate is `table(i, class of r at level i)[d_i]`, with `None` meaning
/// the identity on that coordinate.
fn apply_tables<'a, F>(chain: &ChainSpec, table: F) -> Vec<u32>
where
    F: Fn(usize, u64) -> Option<&'a Vec<u64>>,
{
    (0..chain.v())
        .map(|r| {
            let mut image = 0u64;
            for level in 1..=chain.s() {
                let step = chain.c(level - 1);
                let x = (r / step) % chain.e_at(level);
                let class = chain.class_index(r, level);
                let nx = table(level, class).map_or(x, |sigma| sigma[x as usize]);
                image += nx * step;
            }
            image as u32
        })
        .collect()
}

/// A chain stabilizer element mapping the uniform set `block` onto the
/// canonical block with the same uniform sequence.
///
/// Inside every class, the subclasses meeting `block` are relabelled
/// `0, 1, ...` in increasing order and the others follow.
pub fn canonicalizing_permutation(chain: &ChainSpec, block: &Block) -> Result<ChainPermutation> {
    is_uniform(chain, block)?;
    let array = chain.array_of(block.ranks());
    let mut tables: Vec<HashMap<u64, Vec<u64>>> = vec![HashMap::new(); chain.s()];
    for level in 1..=chain.s() {
        let e = chain.e_at(level);
        let meeting: Vec<u64> = if level == 1 {
            block.ranks().iter().map(|&r| r as u64).collect()
        } else {
            array.level_entries(level - 1).map(|(j, _)| j).collect()
        };
        let mut used: HashMap<u64, Vec<bool>> = HashMap::new();
        for j in meeting {
            used.entry(j / e).or_insert_with(|| vec![false; e as usize])[(j % e) as usize] = true;
        }
        for (class, flags) in used {
            let mut sigma = vec![0u64; e as usize];
            let order = (0..e)
                .filter(|&t| flags[t as usize])
                .chain((0..e).filter(|&t| !flags[t as usize]));
            for (pos, t) in order.enumerate() {
                sigma[t as usize] = pos as u64;
            }
            tables[level - 1].insert(class, sigma);
        }
    }
    Ok(ChainPermutation::from_images_unchecked(apply_tables(
        chain,
        |level, class| tables[level - 1].get(&class),
    )))
}

/// Generators of `Sym(E_1) wr ... wr Sym(E_s)` with `E_i = {0..y_i/y_{i-1}}`,
/// realized inside the chain stabilizer. They fix the canonical block setwise.
pub fn canonical_block_stabilizer_generators(
    chain: &ChainSpec,
    y: &UniformSequence,
) -> Result<Vec<ChainPermutation>> {
    chain.check_materializable()?;
    Ok((1..=chain.s())
        .filter(|&level| y.ratio(level) >= 2)
        .flat_map(|level| {
            transposition_and_cycle(chain.e_at(level), y.ratio(level))
                .into_iter()
                .map(move |sigma| coordinate_permutation(chain, level, 0, &sigma))
        })
        .collect())
}

/// Whether the setwise stabilizer of the uniform set `block` acts
/// transitively on it, shown by an explicit subgroup: the wreath product of
/// symmetric groups on the used coordinate values, conjugated onto `block`.
pub fn stabilizer_transitive_on_block(chain: &ChainSpec, block: &Block) -> Result<bool> {
    let y = is_uniform(chain, block)?;
    let to_canonical = canonicalizing_permutation(chain, block)?;
    let from_canonical = to_canonical.inverse();
    let canonical = canonical_block(chain, &y)?;
    if block.image(to_canonical.images()) != canonical {
        return Err(DesignError::Internal(
            "canonicalizing permutation missed the canonical block".into(),
        ));
    }
    let mut conjugated = Vec::new();
    for g in canonical_block_stabilizer_generators(chain, &y)? {
        let h = to_canonical.then(&g).then(&from_canonical);
        let h = ChainPermutation::new(chain, h.images)?;
        if block.image(h.images()) != *block {
            return Ok(false);
        }
        conjugated.push(h);
    }
    let reached = orbit(&block.ranks()[0], &conjugated, block.len())?;
    Ok(reached.len() == block.len() && reached.iter().all(|&p| block.contains(p)))
}
