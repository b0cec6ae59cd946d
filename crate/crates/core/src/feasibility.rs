//! Exact feasibility test for flag-transitive designs on a partition chain.
//!
//! For a chain `(e_1, ..., e_s)` with `v` points and block size `k`, let
//! `d = gcd(e_i - 1)` and
//!
//! ```text
//! y_i = 1 + (k - 1)(c_i - 1) / (v - 1),     c_i = e_1 * ... * e_i.
//! ```
//!
//! The pair is feasible iff (FT1) `v - 1 | (k - 1) d` and (FT2) for every
//! `1 <= i < s`, `y_i` is a positive integer dividing `(e_{i+1} - 1) c_i / d`.
//! Everything here is integer arithmetic.

use std::fmt;

use num_integer::Integer;

use crate::chain::{join, ChainSpec};
use crate::error::{DesignError, Result};

/// A uniform sequence `(y_0, ..., y_s)`: `y_0 = 1`, and each `y_{i-1}`
/// divides `y_i` with quotient at most `e_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UniformSequence {
    y: Vec<u64>,
}

impl UniformSequence {
    pub fn new(chain: &ChainSpec, y: Vec<u64>) -> Result<Self> {
        let bad = |msg: String| Err(DesignError::InvalidUniformSequence(msg));
        if y.len() != chain.s() + 1 {
            return bad(format!(
                "expected {} entries, got {}",
                chain.s() + 1,
                y.len()
            ));
        }
        if y[0] != 1 {
            return bad(format!("y_0 must be 1, got {}", y[0]));
        }
        for i in 1..y.len() {
            if y[i] == 0 || !y[i].is_multiple_of(y[i - 1]) {
                return bad(format!(
                    "y_{} = {} does not divide y_{} = {}",
                    i - 1,
                    y[i - 1],
                    i,
                    y[i]
                ));
            }
            if y[i] / y[i - 1] > chain.e_at(i) {
                return bad(format!(
                    "y_{i}/y_{} = {} exceeds e_{i} = {}",
                    i - 1,
                    y[i] / y[i - 1],
                    chain.e_at(i)
                ));
            }
        }
        Ok(UniformSequence { y })
    }

    pub fn values(&self) -> &[u64] {
        &self.y
    }

    pub fn get(&self, i: usize) -> u64 {
        self.y[i]
    }

    /// `y_i / y_{i-1}` for `1 <= i <= s`.
    pub fn ratio(&self, i: usize) -> u64 {
        self.y[i] / self.y[i - 1]
    }

    /// Block size `y_s`.
    pub fn k(&self) -> u64 {
        *self.y.last().unwrap()
    }
}

impl fmt::Display for UniformSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.y))
    }
}

/// Exact value of `y_i`, kept as a reduced fraction when it is not integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YValue {
    Integer(u64),
    Fraction { numerator: u128, denominator: u128 },
}

impl YValue {
    pub fn as_integer(self) -> Option<u64> {
        match self {
            YValue::Integer(y) => Some(y),
            YValue::Fraction { .. } => None,
        }
    }
}

impl fmt::Display for YValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            YValue::Integer(y) => write!(f, "{y}"),
            YValue::Fraction {
                numerator,
                denominator,
            } => write!(f, "{numerator}/{denominator}"),
        }
    }
}

/// One FT2 test: does `y_index` divide `target = (e_{index+1} - 1) c_index / d`?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ft2Witness {
    pub index: usize,
    pub y: YValue,
    pub target: u64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub chain: ChainSpec,
    pub k: u64,
    pub d: u64,
    /// `(k - 1) d / (v - 1)` when FT1 holds.
    pub u: Option<u64>,
    /// `y_0..=y_s` from the closed form, exact.
    pub y_values: Vec<YValue>,
    /// Present exactly when both conditions hold.
    pub y: Option<UniformSequence>,
    pub ft1: bool,
    pub ft2: bool,
    pub ft2_witnesses: Vec<Ft2Witness>,
    /// `1 < y_i / y_{i-1} < e_i` for every `i`, checked rather than assumed.
    pub strict_ratio_bounds: bool,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.ft1 && self.ft2
    }

    /// Short reason string for an infeasible report.
    pub fn failure_reason(&self) -> Option<String> {
        if !self.ft1 {
            return Some(format!(
                "FT1 fails: {} does not divide {}",
                self.chain.v() - 1,
                (self.k as u128 - 1) * self.d as u128
            ));
        }
        self.ft2_witnesses.iter().find(|w| !w.holds).map(|w| {
            format!(
                "FT2 fails at i={}: y_{}={} does not divide {}",
                w.index, w.index, w.y, w.target
            )
        })
    }
}

pub(crate) fn check_k(chain: &ChainSpec, k: u64) -> Result<()> {
    if k < 2 || k >= chain.v() {
        Err(DesignError::BlockSizeOutOfRange { k, v: chain.v() })
    } else {
        Ok(())
    }
}

fn y_value(chain: &ChainSpec, k: u64, i: usize) -> YValue {
    let num = (k as u128 - 1) * (chain.c(i) as u128 - 1);
    let den = chain.v() as u128 - 1;
    let g = num.gcd(&den);
    let (n, dd) = (num / g, den / g);
    if dd == 1 {
        YValue::Integer(1 + n as u64)
    } else {
        // 1 + n/dd as a reduced fraction
        YValue::Fraction {
            numerator: dd + n,
            denominator: dd,
        }
    }
}

/// `y_0, ..., y_s` from the closed form, or the first non-integral index.
pub fn y_sequence(chain: &ChainSpec, k: u64) -> Result<Vec<u64>> {
    check_k(chain, k)?;
    (0..=chain.s())
        .map(|i| match y_value(chain, k, i) {
            YValue::Integer(y) => Ok(y),
            YValue::Fraction {
                numerator,
                denominator,
            } => Err(DesignError::NonIntegral {
                index: i,
                numerator,
                denominator,
            }),
        })
        .collect()
}

pub fn check_ft(chain: &ChainSpec, k: u64) -> Result<FeasibilityReport> {
    check_k(chain, k)?;
    let v = chain.v();
    let d = chain.gcd_d();
    let km1d = (k as u128 - 1) * d as u128;
    let ft1 = km1d.is_multiple_of(v as u128 - 1);
    let u = ft1.then(|| (km1d / (v as u128 - 1)) as u64);

    let y_values: Vec<YValue> = (0..=chain.s()).map(|i| y_value(chain, k, i)).collect();

    let ft2_witnesses: Vec<Ft2Witness> = (1..chain.s())
        .map(|i| {
            let target = (chain.e_at(i + 1) - 1) / d * chain.c(i);
            let holds = match y_values[i] {
                YValue::Integer(y) => y > 0 && target.is_multiple_of(y),
                YValue::Fraction { .. } => false,
            };
            Ft2Witness {
                index: i,
                y: y_values[i],
                target,
                holds,
            }
        })
        .collect();
    let ft2 = ft2_witnesses.iter().all(|w| w.holds);

    let ints: Option<Vec<u64>> = y_values.iter().map(|y| y.as_integer()).collect();
    let strict_ratio_bounds = ints.as_ref().is_some_and(|y| {
        (1..y.len())
            .all(|i| y[i] % y[i - 1] == 0 && 1 < y[i] / y[i - 1] && y[i] / y[i - 1] < chain.e_at(i))
    });

    let y = if ft1 && ft2 {
        let ints = ints.ok_or_else(|| {
            DesignError::Internal(format!(
                "FT1 and FT2 hold for e={} k={k} but some y_i is not integral",
                chain.label()
            ))
        })?;
        Some(UniformSequence::new(chain, ints).map_err(|e| {
            DesignError::Internal(format!(
                "FT1 and FT2 hold for e={} k={k} but y is not uniform: {e}",
                chain.label()
            ))
        })?)
    } else {
        None
    };

    Ok(FeasibilityReport {
        chain: chain.clone(),
        k,
        d,
        u,
        y_values,
        y,
        ft1,
        ft2,
        ft2_witnesses,
        strict_ratio_bounds,
    })
}

/// Step between FT1-admissible block sizes: `k ≡ 1 (mod (v-1)/gcd(v-1, d))`.
pub fn ft1_step(chain: &ChainSpec) -> u64 {
    let vm1 = chain.v() - 1;
    vm1 / vm1.gcd(&chain.gcd_d())
}

/// Every feasible block size, ascending. Only FT1-admissible `k` are tried.
pub fn search_k(chain: &ChainSpec) -> Vec<FeasibilityReport> {
    let step = ft1_step(chain);
    let mut out = Vec::new();
    let mut k = 1 + step;
    while k < chain.v() {
        if let Ok(rep) = check_ft(chain, k) {
            if rep.feasible() {
                out.push(rep);
            }
        }
        k += step;
    }
    out
}

/// Identities that hold for every feasible pair; see [`arithmetic_facts`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithmeticFacts {
    pub u: u64,
    /// `y_i - y_{i-1}` for `i = 1..=s`.
    pub differences: Vec<u64>,
    /// `y_i / y_{i-1}` for `i = 1..=s`.
    pub ratios: Vec<u64>,
}

/// Re-derives and checks the arithmetic consequences of feasibility:
/// `gcd(y_i, u) = 1`, `(y_i - y_{i-1})(v - 1) = (k - 1)(e_i - 1) c_{i-1}`,
/// `d y_i = d + u (c_i - 1)`, and `1 < y_i / y_{i-1} < e_i`.
pub fn arithmetic_facts(report: &FeasibilityReport) -> Result<ArithmeticFacts> {
    let chain = &report.chain;
    let (u, y) = match (report.u, &report.y) {
        (Some(u), Some(y)) if report.feasible() => (u, y),
        _ => {
            return Err(DesignError::Infeasible {
                e: chain.label(),
                k: report.k,
                reason: report.failure_reason().unwrap_or_default(),
            })
        }
    };
    let fail = |msg: String| Err(DesignError::Internal(msg));
    let v = chain.v() as u128;
    let k = report.k as u128;
    let d = report.d as u128;
    let mut differences = Vec::with_capacity(chain.s());
    let mut ratios = Vec::with_capacity(chain.s());
    for i in 0..=chain.s() {
        let yi = y.get(i);
        if yi.gcd(&u) != 1 {
            return fail(format!("gcd(y_{i}={yi}, u={u}) != 1"));
        }
        if d * yi as u128 != d + u as u128 * (chain.c(i) as u128 - 1) {
            return fail(format!("y_{i} = {yi} disagrees with 1 + u(c_i - 1)/d"));
        }
        if i == 0 {
            continue;
        }
        let prev = y.get(i - 1);
        let diff = yi.checked_sub(prev).ok_or_else(|| {
            DesignError::Internal(format!("y_{i} = {yi} is below y_{} = {prev}", i - 1))
        })?;
        let rhs = (k - 1) * (chain.e_at(i) as u128 - 1) * chain.c(i - 1) as u128;
        if diff as u128 * (v - 1) != rhs {
            return fail(format!("difference y_{i} - y_{} = {diff} is wrong", i - 1));
        }
        if yi % prev != 0 {
            return fail(format!("y_{} = {prev} does not divide y_{i} = {yi}", i - 1));
        }
        let ratio = yi / prev;
        if !(1 < ratio && ratio < chain.e_at(i)) {
            return fail(format!(
                "ratio y_{i}/y_{} = {ratio} not strictly between 1 and e_{i} = {}",
                i - 1,
                chain.e_at(i)
            ));
        }
        differences.push(diff);
        ratios.push(ratio);
    }
    Ok(ArithmeticFacts {
        u,
        differences,
        ratios,
    })
}
