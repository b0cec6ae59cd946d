//! Two independent 2-design checks and the certificates built on them.
//!
//! The array check evaluates per-level sums of the array function of a
//! block. The pair check counts, for every pair of points, the blocks that
//! contain it. The two share no code beyond reading block ranks.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chain::{join, ChainSpec};
use crate::design::{
    block_count, canonical_block, design_spec, enumerate_blocks, is_uniform, random_uniform_block,
    Block,
};
use crate::error::{DesignError, Result};
use crate::feasibility::UniformSequence;
use crate::wreath::{
    canonicalizing_permutation, orbit, random_element, stabilizer_transitive_on_block,
    wreath_generators, Flag,
};

/// Largest chain on which dense pair counting is attempted.
pub const MAX_PAIR_COUNT_POINTS: u64 = 1 << 13;

/// Outcome of the array sums for one block at one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSum {
    pub level: usize,
    /// `(v - 1)` times the left-hand sum.
    pub scaled_lhs: u128,
    /// `k (k - 1) (e_i - 1) c_{i-1}`.
    pub scaled_rhs: u128,
}

impl LevelSum {
    pub fn holds(&self) -> bool {
        self.scaled_lhs == self.scaled_rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayCheck {
    pub sums: Vec<LevelSum>,
}

impl ArrayCheck {
    pub fn pass(&self) -> bool {
        self.sums.iter().all(LevelSum::holds)
    }

    /// First level whose sum fails.
    pub fn first_failure(&self) -> Option<&LevelSum> {
        self.sums.iter().find(|s| !s.holds())
    }
}

/// Level `1`: `sum_C x_C (x_C - 1)` over level-1 classes must equal
/// `k (k-1) (e_1 - 1) / (v - 1)`. Level `i >= 2`: `sum_C x_C (x_{C+} - x_C)`
/// over level-`(i-1)` classes must equal `k (k-1) (e_i - 1) c_{i-1} / (v - 1)`.
/// Both sides are compared after multiplying by `v - 1`, so nothing is
/// divided.
pub fn check_2design_arrays(chain: &ChainSpec, block: &Block) -> Result<ArrayCheck> {
    let k = block.len() as u128;
    if k < 2 {
        return Err(DesignError::BlockSizeOutOfRange {
            k: k as u64,
            v: chain.v(),
        });
    }
    let array = chain.array_of(block.ranks());
    let vm1 = chain.v() as u128 - 1;
    let mut sums = Vec::with_capacity(chain.s());
    for level in 1..=chain.s() {
        let lhs: u128 = if level == 1 {
            array
                .level_entries(1)
                .map(|(_, x)| x as u128 * (x as u128 - 1))
                .sum()
        } else {
            let e = chain.e_at(level);
            array
                .level_entries(level - 1)
                .map(|(j, x)| {
                    let parent = array.value_at(level, j / e);
                    x as u128 * (parent - x) as u128
                })
                .sum()
        };
        sums.push(LevelSum {
            level,
            scaled_lhs: lhs * vm1,
            scaled_rhs: k * (k - 1) * (chain.e_at(level) as u128 - 1) * chain.c(level - 1) as u128,
        });
    }
    Ok(ArrayCheck { sums })
}

/// Array sums accumulated over a block set, resolved per class.
///
/// For a level-`i` class `D`, the ordered pairs inside `D` that lie in
/// different level-`(i-1)` classes number `c_i (c_i - c_{i-1})`; each block
/// covers `sum_{C in D} x_C (x_D - x_C)` of them. In a 2-design every such
/// total equals `lambda` times the pair count of `D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayProfile {
    /// `(level, class index) -> covered ordered pairs`, for classes met by
    /// some block; classes met by none hold zero.
    pub totals: BTreeMap<(usize, u64), u128>,
    /// Ordered pairs per level-`i` class, indexed by `i - 1`.
    pub pairs_per_class: Vec<u128>,
    pub class_counts: Vec<u64>,
}

impl ArrayProfile {
    /// The common value `lambda` of every per-class ratio, if there is one.
    pub fn constant_lambda(&self) -> Option<u128> {
        let mut lambda = None;
        for (level0, (&pairs, &classes)) in self
            .pairs_per_class
            .iter()
            .zip(&self.class_counts)
            .enumerate()
        {
            for j in 0..classes {
                let t = self.totals.get(&(level0 + 1, j)).copied().unwrap_or(0);
                if t % pairs != 0 {
                    return None;
                }
                match lambda {
                    None => lambda = Some(t / pairs),
                    Some(l) if l != t / pairs => return None,
                    Some(_) => {}
                }
            }
        }
        lambda
    }
}

/// Sums the per-class array statistics of a block set.
pub fn array_profile<I>(chain: &ChainSpec, blocks: I) -> ArrayProfile
where
    I: IntoIterator<Item = Block>,
{
    let mut totals: BTreeMap<(usize, u64), u128> = BTreeMap::new();
    for block in blocks {
        let array = chain.array_of(block.ranks());
        for level in 1..=chain.s() {
            let e = chain.e_at(level);
            if level == 1 {
                for (j, x) in array.level_entries(1) {
                    *totals.entry((1, j)).or_default() += x as u128 * (x as u128 - 1);
                }
            } else {
                for (j, x) in array.level_entries(level - 1) {
                    let parent = array.value_at(level, j / e);
                    *totals.entry((level, j / e)).or_default() += x as u128 * (parent - x) as u128;
                }
            }
        }
    }
    let pairs_per_class = (1..=chain.s())
        .map(|i| chain.c(i) as u128 * (chain.c(i) - chain.c(i - 1)) as u128)
        .collect();
    let class_counts = (1..=chain.s()).map(|i| chain.d_count(i)).collect();
    ArrayProfile {
        totals,
        pairs_per_class,
        class_counts,
    }
}

/// Dense counts of blocks through every unordered pair of points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCounts {
    v: u64,
    // index q (q - 1) / 2 + p for p < q
    counts: Vec<u64>,
    pub blocks: u64,
}

impl PairCounts {
    fn new(v: u64) -> Self {
        PairCounts {
            v,
            counts: vec![0; (v * (v - 1) / 2) as usize],
            blocks: 0,
        }
    }

    fn add_block(&mut self, ranks: &[u32]) {
        for (i, &q) in ranks.iter().enumerate() {
            let row = (q as usize) * (q as usize).saturating_sub(1) / 2;
            for &p in &ranks[..i] {
                self.counts[row + p as usize] += 1;
            }
        }
        self.blocks += 1;
    }

    fn merge(mut self, other: PairCounts) -> PairCounts {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.blocks += other.blocks;
        self
    }

    /// Blocks through `{p, q}`, `p != q`.
    pub fn get(&self, p: u32, q: u32) -> u64 {
        let (p, q) = if p < q { (p, q) } else { (q, p) };
        assert!(p != q && (q as u64) < self.v, "need two distinct points");
        self.counts[q as usize * (q as usize - 1) / 2 + p as usize]
    }

    pub fn pairs(&self) -> usize {
        self.counts.len()
    }

    pub fn min(&self) -> u64 {
        self.counts.iter().copied().min().unwrap_or(0)
    }

    pub fn max(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// `Some(lambda)` when every pair is covered equally often.
    pub fn constant(&self) -> Option<u64> {
        (self.min() == self.max()).then(|| self.min())
    }

    /// `((p, q), count)` for every pair with `p < q`.
    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), u64)> + '_ {
        (1..self.v as u32).flat_map(move |q| {
            (0..q).map(move |p| {
                (
                    (p, q),
                    self.counts[q as usize * (q as usize - 1) / 2 + p as usize],
                )
            })
        })
    }
}

const PAIR_SHARD: usize = 4096;

/// Counts, for every pair of distinct points, the blocks containing both.
/// Blocks are consumed in shards counted in parallel and merged by addition.
pub fn brute_force_pair_count<I>(chain: &ChainSpec, blocks: I) -> Result<PairCounts>
where
    I: IntoIterator<Item = Block>,
{
    let v = chain.v();
    if v > MAX_PAIR_COUNT_POINTS {
        return Err(DesignError::ChainTooLarge { v });
    }
    let mut total = PairCounts::new(v);
    let mut iter = blocks.into_iter();
    loop {
        let shard: Vec<Block> = iter.by_ref().take(PAIR_SHARD).collect();
        if shard.is_empty() {
            break;
        }
        let counted = shard
            .par_chunks(256)
            .fold(
                || PairCounts::new(v),
                |mut acc, chunk| {
                    for b in chunk {
                        acc.add_block(b.ranks());
                    }
                    acc
                },
            )
            .reduce(|| PairCounts::new(v), PairCounts::merge);
        total = total.merge(counted);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Exhaustive when the instance fits under the caps, arithmetic otherwise.
    Auto,
    Exhaustive,
    Arithmetic,
}

/// Mode a certificate was actually produced in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateMode {
    Exhaustive,
    Arithmetic,
    Sampled,
}

impl fmt::Display for CertificateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertificateMode::Exhaustive => "exhaustive",
            CertificateMode::Arithmetic => "arithmetic",
            CertificateMode::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationCertificate {
    pub chain: ChainSpec,
    pub k: u64,
    pub mode: CertificateMode,
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    /// The constant pair count, present only when every pair was counted.
    pub lambda_observed: Option<u64>,
    pub lambda: BigUint,
    pub b: BigUint,
    pub flag_orbit: Option<u64>,
}

impl VerificationCertificate {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, name: &str, pass: bool, witness: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            witness: witness.into(),
        });
    }
}

impl fmt::Display for VerificationCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "e={}", join(self.chain.e()))?;
        writeln!(f, "v={}", self.chain.v())?;
        writeln!(f, "k={}", self.k)?;
        writeln!(f, "mode={}", self.mode)?;
        match self.seed {
            Some(seed) => writeln!(f, "seed={seed}")?,
            None => writeln!(f, "seed=none")?,
        }
        writeln!(f, "b={}", self.b)?;
        writeln!(f, "lambda={}", self.lambda)?;
        match self.lambda_observed {
            Some(l) => writeln!(f, "lambda_observed={l}")?,
            None => writeln!(f, "lambda_observed=absent")?,
        }
        for c in &self.checks {
            let verdict = if c.pass { "pass" } else { "fail" };
            writeln!(f, "check.{}={verdict} {}", c.name, c.witness)?;
        }
        writeln!(f, "result={}", if self.pass() { "pass" } else { "fail" })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub mode: VerifyMode,
    /// Largest block count enumerated.
    pub enumeration_cap: u64,
    /// Largest orbit explored.
    pub orbit_cap: usize,
    pub seed: u64,
    pub samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: VerifyMode::Auto,
            enumeration_cap: 1_000_000,
            orbit_cap: 1_000_000,
            seed: 0,
            samples: 64,
        }
    }
}

fn array_witness(check: &ArrayCheck) -> String {
    match check.first_failure() {
        None => format!("levels=1..{}", check.sums.len()),
        Some(s) => format!(
            "level={} lhs*(v-1)={} rhs*(v-1)={}",
            s.level, s.scaled_lhs, s.scaled_rhs
        ),
    }
}

/// Certifies that all uniform subsets with the sequence of `(chain, k)` form
/// a 2-design on which the chain stabilizer is flag-transitive.
///
/// Exhaustively: the blocks are enumerated and every pair counted, and the
/// flag orbit of the canonical block is computed and compared with `b k`.
/// Arithmetically: the array sums on the canonical block, transitivity of
/// its stabilizer on it, and sampled checks that random stabilizer elements
/// keep the canonical block uniform with the same sequence and that random
/// uniform subsets are mapped onto it by a stabilizer element.
pub fn certify_flag_transitive(
    chain: &ChainSpec,
    k: u64,
    opts: &VerifyOptions,
) -> Result<VerificationCertificate> {
    let spec = design_spec(chain, k)?;
    chain.check_materializable()?;
    let flags = &spec.b * k;
    let fits = spec.b <= BigUint::from(opts.enumeration_cap)
        && flags <= BigUint::from(opts.orbit_cap)
        && chain.v() <= MAX_PAIR_COUNT_POINTS;
    let mode = match opts.mode {
        VerifyMode::Exhaustive if !fits => {
            return Err(DesignError::CapExceeded {
                what: "flag",
                size: flags,
                cap: opts.orbit_cap.min(opts.enumeration_cap as usize) as u64,
            })
        }
        VerifyMode::Exhaustive => CertificateMode::Exhaustive,
        VerifyMode::Auto if fits => CertificateMode::Exhaustive,
        _ => CertificateMode::Arithmetic,
    };
    let mut cert = VerificationCertificate {
        chain: chain.clone(),
        k,
        mode,
        seed: (mode == CertificateMode::Arithmetic).then_some(opts.seed),
        checks: Vec::new(),
        lambda_observed: None,
        lambda: spec.lambda.clone(),
        b: spec.b.clone(),
        flag_orbit: None,
    };
    cert.push(
        "ft",
        true,
        format!("d={} u={} y={}", spec.d, spec.u, spec.y),
    );

    let canonical = canonical_block(chain, &spec.y)?;
    let arrays = check_2design_arrays(chain, &canonical)?;
    cert.push("arrays", arrays.pass(), array_witness(&arrays));
    cert.push(
        "stabilizer_transitive",
        stabilizer_transitive_on_block(chain, &canonical)?,
        format!("block_size={}", canonical.len()),
    );

    match mode {
        CertificateMode::Exhaustive => {
            let blocks: Vec<Block> =
                enumerate_blocks(chain, &spec.y, opts.enumeration_cap)?.collect();
            let counts = brute_force_pair_count(chain, blocks.iter().cloned())?;
            let expected = spec.lambda.to_u64();
            let constant = counts.constant();
            cert.push(
                "pair_counts",
                constant.is_some() && constant == expected,
                format!(
                    "pairs={} min={} max={} blocks={}",
                    counts.pairs(),
                    counts.min(),
                    counts.max(),
                    counts.blocks
                ),
            );
            cert.lambda_observed = constant;

            let gens = wreath_generators(chain)?;
            let seed = Flag {
                point: canonical.ranks()[0],
                block: canonical.clone(),
            };
            let flag_orbit = orbit(&seed, &gens.gens, opts.orbit_cap)?;
            let size = flag_orbit.len() as u64;
            let block_set: HashSet<&Block> = blocks.iter().collect();
            let inside = flag_orbit
                .iter()
                .all(|f| f.block.contains(f.point) && block_set.contains(&f.block));
            cert.push(
                "flag_orbit",
                inside && BigUint::from(size) == flags,
                format!("size={size} b*k={flags}"),
            );
            cert.flag_orbit = Some(size);
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut images_ok = 0;
            let mut first_bad = None;
            for t in 0..opts.samples {
                let g = random_element(chain, &mut rng)?;
                let image = canonical.image(g.images());
                match is_uniform(chain, &image) {
                    Ok(y) if y == spec.y => images_ok += 1,
                    _ => {
                        first_bad.get_or_insert(t);
                    }
                }
            }
            cert.push(
                "sampled_images_uniform",
                first_bad.is_none(),
                match first_bad {
                    None => format!("samples={images_ok}"),
                    Some(t) => format!("first_failing_sample={t}"),
                },
            );
            let mut members = 0;
            let mut first_bad = None;
            for t in 0..opts.samples {
                let b = random_uniform_block(chain, &spec.y, &mut rng)?;
                let phi = canonicalizing_permutation(chain, &b)?;
                if b.image(phi.images()) == canonical {
                    members += 1;
                } else {
                    first_bad.get_or_insert(t);
                }
            }
            cert.push(
                "sampled_orbit_membership",
                first_bad.is_none(),
                match first_bad {
                    None => format!("samples={members}"),
                    Some(t) => format!("first_failing_sample={t}"),
                },
            );
        }
    }
    Ok(cert)
}

/// Certifies that the uniform subsets with the sequence of `(chain, k)` are
/// exactly the orbit of the canonical block, so the flag-transitive design
/// with these parameters is unique.
///
/// Over the enumeration cap this degrades to checking `trials` random
/// uniform subsets for orbit membership, recorded as `mode=sampled`.
pub fn certify_uniqueness(
    chain: &ChainSpec,
    k: u64,
    trials: usize,
    cap: u64,
    seed: u64,
) -> Result<VerificationCertificate> {
    let spec = design_spec(chain, k)?;
    certify_uniqueness_of_sequence(chain, &spec.y, trials, cap, seed)
}

/// [`certify_uniqueness`] for an explicit uniform sequence, which need not
/// come from a feasible block size.
pub fn certify_uniqueness_of_sequence(
    chain: &ChainSpec,
    y: &UniformSequence,
    trials: usize,
    cap: u64,
    seed: u64,
) -> Result<VerificationCertificate> {
    let k = y.k();
    let canonical = canonical_block(chain, y)?;
    let b = block_count(chain, y);
    let lambda = if k >= 2 {
        (&b * k * (k - 1)) / (chain.v() * (chain.v() - 1))
    } else {
        BigUint::default()
    };
    let exhaustive = b <= BigUint::from(cap);
    let mut cert = VerificationCertificate {
        chain: chain.clone(),
        k,
        mode: if exhaustive {
            CertificateMode::Exhaustive
        } else {
            CertificateMode::Sampled
        },
        seed: (!exhaustive).then_some(seed),
        checks: Vec::new(),
        lambda_observed: None,
        lambda,
        b,
        flag_orbit: None,
    };
    if exhaustive {
        let all: HashSet<Block> = enumerate_blocks(chain, y, cap)?.collect();
        let gens = wreath_generators(chain)?;
        let reached = orbit(&canonical, &gens.gens, all.len().max(1))?;
        let outside = all.iter().find(|b| !reached.contains(*b));
        cert.push(
            "uniform_subsets_equal_orbit",
            outside.is_none() && reached.len() == all.len(),
            match outside {
                None => format!("uniform={} orbit={}", all.len(), reached.len()),
                Some(b) => format!("outside_orbit={{{b}}}"),
            },
        );
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut witness = None;
        for _ in 0..trials {
            let b = random_uniform_block(chain, y, &mut rng)?;
            let phi = canonicalizing_permutation(chain, &b)?;
            if b.image(phi.images()) != canonical {
                witness = Some(b);
                break;
            }
        }
        cert.push(
            "sampled_orbit_containment",
            witness.is_none(),
            match witness {
                None => format!("trials={trials}"),
                Some(b) => format!("outside_orbit={{{b}}}"),
            },
        );
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(e: &[u64]) -> ChainSpec {
        ChainSpec::new(e.to_vec()).unwrap()
    }

    fn canonical(ch: &ChainSpec, y: &[u64]) -> Block {
        canonical_block(ch, &UniformSequence::new(ch, y.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn arrays_on_canonical_blocks() {
        let ch = chain(&[4, 4]);
        let check = check_2design_arrays(&ch, &canonical(&ch, &[1, 2, 6])).unwrap();
        assert!(check.pass());
        // 3 classes holding 2 points: 3 * 2 * 1 = 6 = 6 * 5 * 3 / 15
        assert_eq!(check.sums[0].scaled_lhs, 6 * 15);

        let ch = chain(&[3, 5, 17]);
        let check = check_2design_arrays(&ch, &canonical(&ch, &[1, 2, 8, 128])).unwrap();
        assert!(check.pass());
        assert_eq!(check.sums.len(), 3);
    }

    #[test]
    fn arrays_reject_non_uniform_block() {
        let ch = chain(&[4, 4]);
        let b = Block::from_ranks(&ch, vec![0, 1, 2, 3, 4, 5]).unwrap();
        let check = check_2design_arrays(&ch, &b).unwrap();
        assert!(!check.pass());
        let fail = check.first_failure().unwrap();
        assert_eq!(fail.level, 1);
        assert_eq!(fail.scaled_lhs, 14 * 15);
        assert_eq!(fail.scaled_rhs, 6 * 15);
    }

    #[test]
    fn pair_counts_small_instances() {
        let ch = chain(&[2, 2]);
        let y = UniformSequence::new(&ch, vec![1, 2, 4]).unwrap();
        let counts = brute_force_pair_count(&ch, enumerate_blocks(&ch, &y, 10).unwrap()).unwrap();
        assert_eq!(counts.pairs(), 6);
        assert_eq!(counts.constant(), Some(1));

        let ch = chain(&[3, 5]);
        let y = UniformSequence::new(&ch, vec![1, 2, 8]).unwrap();
        let counts = brute_force_pair_count(&ch, enumerate_blocks(&ch, &y, 1000).unwrap()).unwrap();
        assert_eq!(counts.pairs(), 105);
        assert_eq!(counts.blocks, 405);
        assert_eq!(counts.constant(), Some(108));
        assert_eq!(counts.get(3, 0), 108);
    }

    #[test]
    fn profile_detects_a_missing_block() {
        let ch = chain(&[4, 4]);
        let y = UniformSequence::new(&ch, vec![1, 2, 6]).unwrap();
        let blocks: Vec<Block> = enumerate_blocks(&ch, &y, 1000).unwrap().collect();
        assert_eq!(
            array_profile(&ch, blocks.iter().cloned()).constant_lambda(),
            Some(108)
        );
        let fewer = blocks[1..].iter().cloned();
        assert_eq!(array_profile(&ch, fewer).constant_lambda(), None);
    }

    #[test]
    fn exhaustive_certificate() {
        let ch = chain(&[4, 4]);
        let opts = VerifyOptions {
            mode: VerifyMode::Exhaustive,
            ..VerifyOptions::default()
        };
        let cert = certify_flag_transitive(&ch, 6, &opts).unwrap();
        assert!(cert.pass(), "{cert}");
        assert_eq!(cert.mode, CertificateMode::Exhaustive);
        assert_eq!(cert.lambda_observed, Some(108));
        assert_eq!(cert.flag_orbit, Some(5184));
        let text = cert.to_string();
        assert!(text.contains("mode=exhaustive\n"));
        assert!(text.ends_with("result=pass\n"));

        let ch = chain(&[3, 5]);
        let cert = certify_flag_transitive(&ch, 8, &opts).unwrap();
        assert!(cert.pass());
        assert_eq!(cert.flag_orbit, Some(3240));
    }

    #[test]
    fn arithmetic_certificate_for_large_design() {
        let ch = chain(&[3, 5, 17]);
        let opts = VerifyOptions {
            samples: 8,
            seed: 11,
            ..VerifyOptions::default()
        };
        let cert = certify_flag_transitive(&ch, 128, &opts).unwrap();
        assert_eq!(cert.mode, CertificateMode::Arithmetic);
        assert_eq!(cert.seed, Some(11));
        assert!(cert.pass(), "{cert}");
        assert_eq!(cert.lambda_observed, None);
        assert_eq!(cert, certify_flag_transitive(&ch, 128, &opts).unwrap());

        let forced = VerifyOptions {
            mode: VerifyMode::Exhaustive,
            ..opts
        };
        assert!(matches!(
            certify_flag_transitive(&ch, 128, &forced),
            Err(DesignError::CapExceeded { .. })
        ));
    }

    #[test]
    fn infeasible_input_is_an_error() {
        let ch = chain(&[4, 4]);
        assert!(matches!(
            certify_flag_transitive(&ch, 5, &VerifyOptions::default()),
            Err(DesignError::Infeasible { .. })
        ));
    }

    #[test]
    fn uniqueness() {
        for (e, k) in [(&[4u64, 4][..], 6), (&[3, 5], 8)] {
            let cert = certify_uniqueness(&chain(e), k, 10, 100_000, 0).unwrap();
            assert_eq!(cert.mode, CertificateMode::Exhaustive);
            assert!(cert.pass(), "{cert}");
        }
        let ch = chain(&[2, 2]);
        let whole = UniformSequence::new(&ch, vec![1, 2, 4]).unwrap();
        let cert = certify_uniqueness_of_sequence(&ch, &whole, 10, 10, 0).unwrap();
        assert!(cert.pass());
        assert_eq!(cert.b, BigUint::from(1u32));
        let cert = certify_uniqueness(&chain(&[3, 5, 17]), 128, 5, 1000, 3).unwrap();
        assert_eq!(cert.mode, CertificateMode::Sampled);
        assert!(cert.pass());
    }
}
