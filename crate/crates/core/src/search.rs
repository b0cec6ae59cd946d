//! Exhaustive sweeps over chains with bounded `e_i` and table output.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::chain::{join, ChainSpec};
use crate::design::family_params;
use crate::error::{DesignError, Result};
use crate::feasibility::search_k;

/// The published table of all 3-level parameter sets with `e_i <= 50`, in
/// the format of [`to_csv`].
pub const TABLE1_CSV: &str = include_str!("../data/table1.csv");

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SearchRow {
    pub e: Vec<u64>,
    pub v: u64,
    pub k: u64,
    /// `y_1, ..., y_{s-1}`.
    pub y: Vec<u64>,
    /// Whether the explicit family with `d = e_1 - 1` gives exactly this row.
    pub family: bool,
}

/// Every `(e_1..e_s, k)` with `2 <= e_i <= e_max` and `2 <= k < v` that
/// passes the feasibility test, sorted by `(e, k)`. Tuples are ordered; no
/// symmetry is factored out.
///
/// For `s = 3` each row is re-derived from the three scalar divisibility
/// conditions as an independent cross-check, and a disagreement in either
/// direction is an internal error.
pub fn search(s: usize, e_max: u64) -> Result<Vec<SearchRow>> {
    if s < 2 || e_max < 2 {
        return Err(DesignError::InvalidChain(format!(
            "search needs s >= 2 and e_max >= 2, got s={s} e_max={e_max}"
        )));
    }
    let shards: Vec<Result<Vec<SearchRow>>> = (2..=e_max)
        .into_par_iter()
        .map(|e1| search_shard(s, e_max, e1))
        .collect();
    let mut rows = Vec::new();
    for shard in shards {
        rows.extend(shard?);
    }
    rows.sort();
    Ok(rows)
}

fn search_shard(s: usize, e_max: u64, e1: u64) -> Result<Vec<SearchRow>> {
    let mut rows = Vec::new();
    let mut e = vec![e1; s];
    let mut tail = vec![2u64; s - 1];
    loop {
        e[1..].copy_from_slice(&tail);
        let chain = ChainSpec::new(e.clone())?;
        let reports = search_k(&chain);
        if s == 3 {
            let feasible: Vec<u64> = reports.iter().map(|r| r.k).collect();
            cross_check_three(&chain, &feasible, false)?;
        }
        for report in reports {
            let y = report
                .y
                .as_ref()
                .ok_or_else(|| DesignError::Internal("feasible report without y".into()))?;
            let family = family_params(s, e1 - 1)
                .map(|(fc, fk)| fc.e() == chain.e() && fk == report.k)
                .unwrap_or(false);
            rows.push(SearchRow {
                e: e.clone(),
                v: chain.v(),
                k: report.k,
                y: y.values()[1..s].to_vec(),
                family,
            });
        }
        // odometer over e_2..e_s
        let mut i = 0;
        loop {
            if i == tail.len() {
                return Ok(rows);
            }
            if tail[i] < e_max {
                tail[i] += 1;
                break;
            }
            tail[i] = 2;
            i += 1;
        }
    }
}

/// The three conditions for `s = 3`, written out literally.
fn three_conditions(e1: u64, e2: u64, e3: u64, k: u64) -> bool {
    let v = (e1 * e2 * e3) as u128;
    let k = k as u128;
    let d = gcd(gcd(e1 - 1, e2 - 1), e3 - 1) as u128;
    if !((k - 1) * d).is_multiple_of(v - 1) {
        return false;
    }
    let divides_ratio = |num: u128, target: u128| {
        // 1 + (k-1) num / (v-1) must be an integer dividing target
        let scaled = (k - 1) * num;
        if !scaled.is_multiple_of(v - 1) {
            return false;
        }
        let y = 1 + scaled / (v - 1);
        target.is_multiple_of(y)
    };
    let (e1, e2, e3) = (e1 as u128, e2 as u128, e3 as u128);
    divides_ratio(e1 - 1, (e2 - 1) * e1 / d) && divides_ratio(e1 * e2 - 1, (e3 - 1) * e1 * e2 / d)
}

fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Compares the generic feasible set of a 3-level chain with the three
/// literal conditions, over every `k` when `all_k` is set and otherwise over
/// the `k` satisfying the first condition.
pub(crate) fn cross_check_three(chain: &ChainSpec, feasible: &[u64], all_k: bool) -> Result<()> {
    let e = chain.e();
    let vm1 = chain.v() - 1;
    let step = if all_k {
        1
    } else {
        vm1 / gcd(vm1, gcd(gcd(e[0] - 1, e[1] - 1), e[2] - 1))
    };
    let literal: Vec<u64> = (1 + step..chain.v())
        .step_by(step as usize)
        .filter(|&k| three_conditions(e[0], e[1], e[2], k))
        .collect();
    if literal != feasible {
        return Err(DesignError::Internal(format!(
            "e={}: generic test gives k={:?}, literal conditions give k={:?}",
            chain.label(),
            feasible,
            literal
        )));
    }
    Ok(())
}

fn header(s: usize) -> Vec<String> {
    let mut cols: Vec<String> = (1..=s).map(|i| format!("e{i}")).collect();
    cols.push("v".into());
    cols.push("k".into());
    cols.extend((1..s).map(|i| format!("y{i}")));
    cols.push("family".into());
    cols
}

fn cells(row: &SearchRow) -> Vec<String> {
    let mut out: Vec<String> = row.e.iter().map(u64::to_string).collect();
    out.push(row.v.to_string());
    out.push(row.k.to_string());
    out.extend(row.y.iter().map(u64::to_string));
    out.push(if row.family { "family" } else { "-" }.into());
    out
}

/// CSV with columns `e1..es,v,k,y1..y{s-1},family`, one line per row.
pub fn to_csv(s: usize, rows: &[SearchRow]) -> String {
    let mut out = header(s).join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&cells(row).join(","));
        out.push('\n');
    }
    out
}

/// The same columns right-aligned with single-space separation.
pub fn to_text(s: usize, rows: &[SearchRow]) -> String {
    let head = header(s);
    let body: Vec<Vec<String>> = rows.iter().map(cells).collect();
    let widths: Vec<usize> = (0..head.len())
        .map(|c| {
            body.iter()
                .map(|r| r[c].len())
                .chain([head[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for line in std::iter::once(&head).chain(&body) {
        let padded: Vec<String> = line
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", padded.join(" "));
    }
    out
}

/// Parses CSV written by [`to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<SearchRow>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let head = lines
        .next()
        .ok_or_else(|| DesignError::Parse("empty table".into()))?;
    let ncols = head.split(',').count();
    if ncols < 6 || ncols % 2 == 1 {
        return Err(DesignError::Parse(format!("bad header {head:?}")));
    }
    let s = (ncols - 2) / 2;
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != ncols {
                return Err(DesignError::Parse(format!("bad row {line:?}")));
            }
            let num = |x: &str| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|_| DesignError::Parse(format!("bad number {x:?} in {line:?}")))
            };
            let family = match f[ncols - 1].trim() {
                "family" => true,
                "-" => false,
                other => return Err(DesignError::Parse(format!("bad family flag {other:?}"))),
            };
            Ok(SearchRow {
                e: f[..s].iter().map(|x| num(x)).collect::<Result<_>>()?,
                v: num(f[s])?,
                k: num(f[s + 1])?,
                y: f[s + 2..ncols - 1]
                    .iter()
                    .map(|x| num(x))
                    .collect::<Result<_>>()?,
                family,
            })
        })
        .collect()
}

/// Label of a row's chain, `e_1,...,e_s`.
pub fn row_label(row: &SearchRow) -> String {
    join(&row.e)
}
