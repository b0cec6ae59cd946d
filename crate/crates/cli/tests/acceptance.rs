//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p chaindesign-cli --test acceptance`.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chaindesign::search::{parse_csv, SearchRow, TABLE1_CSV};
use chaindesign::verify::{array_profile, check_2design_arrays};
use chaindesign::wreath::{stabilizer_transitive_on_block, BlockMask, Flag};
use chaindesign::{
    brute_force_pair_count, canonical_block, check_ft, collapse_chain, design_spec,
    enumerate_blocks, family_params, orbit, search_k, wreath_generators, y_sequence, Block,
    ChainSpec,
};
use num_bigint::BigUint;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn chain(e: &[u64]) -> ChainSpec {
    ChainSpec::new(e.to_vec()).expect("valid chain")
}

fn binom(n: u64, r: u64) -> BigUint {
    (0..r).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1))
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("chaindesign").chain(args.iter().copied());
    let code = chaindesign_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned())
}

fn table_reproduction() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let (code, csv) = pool.install(|| run_cli(&["search-table", "--s", "3", "--max", "50"]));
    ensure(code == 0, || format!("search-table exited {code}"))?;
    let rows = parse_csv(&csv).map_err(|e| e.to_string())?;
    let golden = parse_csv(TABLE1_CSV).map_err(|e| e.to_string())?;
    ensure(rows.len() == 57, || format!("{} rows, want 57", rows.len()))?;
    let cols = |r: &SearchRow| (r.e.clone(), r.v, r.k, r.y.clone());
    for (got, want) in rows.iter().zip(&golden) {
        ensure(cols(got) == cols(want), || {
            format!("row {got:?} differs from {want:?}")
        })?;
    }
    let family: Vec<(Vec<u64>, u64)> = rows
        .iter()
        .filter(|r| r.family)
        .map(|r| (r.e.clone(), r.k))
        .collect();
    let want = vec![
        (vec![3, 5, 17], 128),
        (vec![4, 7, 31], 290),
        (vec![5, 9, 49], 552),
    ];
    ensure(family == want, || format!("family rows {family:?}"))?;
    Ok("57 rows, 3 family rows".into())
}

fn exhaustive_instance(e: &[u64], k: u64, want_b: u64, want_pairs: usize, lambda: u64) -> Outcome {
    let ch = chain(e);
    let spec = design_spec(&ch, k).map_err(|e| e.to_string())?;
    let y = &spec.y;
    let closed_form = (1..=ch.s()).fold(BigUint::from(1u32), |acc, j| {
        acc * binom(ch.e_at(j), y.ratio(j)).pow((k / y.get(j)) as u32)
    });
    ensure(closed_form == BigUint::from(want_b), || {
        format!("closed-form b={closed_form}")
    })?;
    let blocks: Vec<Block> = enumerate_blocks(&ch, y, 1_000_000)
        .map_err(|e| e.to_string())?
        .collect();
    ensure(blocks.len() as u64 == want_b, || {
        format!("enumerated {}", blocks.len())
    })?;
    let distinct: HashSet<&Block> = blocks.iter().collect();
    ensure(distinct.len() == blocks.len(), || "duplicate blocks".into())?;
    let counts = brute_force_pair_count(&ch, blocks.iter().cloned()).map_err(|e| e.to_string())?;
    ensure(counts.pairs() == want_pairs, || {
        format!("{} pairs", counts.pairs())
    })?;
    ensure(counts.min() == lambda && counts.max() == lambda, || {
        format!("pair counts in [{}, {}]", counts.min(), counts.max())
    })?;
    ensure(spec.lambda == BigUint::from(lambda), || {
        format!("λ={}", spec.lambda)
    })?;
    Ok(format!("b={want_b} pairs={want_pairs} λ={lambda}"))
}

fn flag_transitivity() -> Outcome {
    let ch = chain(&[4, 4]);
    let spec = design_spec(&ch, 6).map_err(|e| e.to_string())?;
    let canonical = canonical_block(&ch, &spec.y).map_err(|e| e.to_string())?;
    let gens = wreath_generators(&ch).map_err(|e| e.to_string())?;
    let seed = Flag {
        point: canonical.ranks()[0],
        block: canonical.clone(),
    };
    let flags = orbit(&seed, &gens.gens, 100_000).map_err(|e| e.to_string())?;
    ensure(flags.len() == 5184, || {
        format!("flag orbit {}", flags.len())
    })?;
    let all_flags: HashSet<Flag> = enumerate_blocks(&ch, &spec.y, 10_000)
        .map_err(|e| e.to_string())?
        .flat_map(|b| {
            b.ranks().to_vec().into_iter().map(move |p| Flag {
                point: p,
                block: b.clone(),
            })
        })
        .collect();
    ensure(flags == all_flags, || {
        "flag orbit is not the full flag set".into()
    })?;
    let transitive = stabilizer_transitive_on_block(&ch, &canonical).map_err(|e| e.to_string())?;
    ensure(transitive, || "block stabilizer not transitive".into())?;
    Ok("flag orbit 5184 = 864*6, block stabilizer transitive".into())
}

/// Blocks are compared as 64-bit masks: (6,6) with k=15 has 19.2 million.
fn orbit_equals_enumeration() -> Outcome {
    let mut tested = Vec::new();
    for e1 in 2..=6 {
        for e2 in 2..=6 {
            let ch = chain(&[e1, e2]);
            for report in search_k(&ch) {
                let k = report.k;
                let y = report.y.clone().ok_or("feasible report without y")?;
                let gens = wreath_generators(&ch).map_err(|e| e.to_string())?;
                let start = canonical_block(&ch, &y).map_err(|e| e.to_string())?;
                let start = BlockMask::from_block(&ch, &start).map_err(|e| e.to_string())?;
                let mut reached =
                    orbit(&start, &gens.gens, 50_000_000).map_err(|e| e.to_string())?;
                let mut listed = 0usize;
                for block in enumerate_blocks(&ch, &y, 50_000_000).map_err(|e| e.to_string())? {
                    let mask = BlockMask::from_block(&ch, &block).map_err(|e| e.to_string())?;
                    // removal fails on a duplicate or a block outside the orbit
                    ensure(reached.remove(&mask), || {
                        format!("e=({e1},{e2}) k={k}: block {{{block}}} not matched in orbit")
                    })?;
                    listed += 1;
                }
                ensure(reached.is_empty(), || {
                    format!(
                        "e=({e1},{e2}) k={k}: {} orbit blocks never enumerated",
                        reached.len()
                    )
                })?;
                tested.push(format!("({e1},{e2};k={k};b={listed})"));
            }
        }
    }
    ensure(tested.len() >= 4, || format!("only {tested:?}"))?;
    Ok(format!("{} tuples: {}", tested.len(), tested.join(" ")))
}

fn arithmetic_agreement() -> Outcome {
    for (e, k) in [(&[4u64, 4][..], 6), (&[3, 5], 8)] {
        let ch = chain(e);
        let spec = design_spec(&ch, k).map_err(|e| e.to_string())?;
        let canonical = canonical_block(&ch, &spec.y).map_err(|e| e.to_string())?;
        let check = check_2design_arrays(&ch, &canonical).map_err(|e| e.to_string())?;
        ensure(check.pass(), || {
            format!("array test fails on {e:?}: {check:?}")
        })?;
        let blocks: Vec<Block> = enumerate_blocks(&ch, &spec.y, 10_000)
            .map_err(|e| e.to_string())?
            .collect();
        let full = array_profile(&ch, blocks.iter().cloned()).constant_lambda();
        ensure(full == Some(108), || format!("array profile λ {full:?}"))?;
        let fewer = || blocks[1..].iter().cloned();
        let arrays = array_profile(&ch, fewer()).constant_lambda();
        let pairs = brute_force_pair_count(&ch, fewer()).map_err(|e| e.to_string())?;
        ensure(arrays.is_none(), || {
            format!("array test missed deletion on {e:?}")
        })?;
        ensure(pairs.constant().is_none(), || {
            format!("pair count missed deletion on {e:?}")
        })?;
    }
    Ok("both instances pass; one deleted block detected by both tests".into())
}

fn family_consistency() -> Outcome {
    for s in 2..=4usize {
        for d in 2..=6u64 {
            let (ch, k) = family_params(s, d).map_err(|e| e.to_string())?;
            let report = check_ft(&ch, k).map_err(|e| e.to_string())?;
            ensure(report.feasible(), || format!("s={s} d={d} infeasible"))?;
            let y = report.y.ok_or("no y")?;
            for i in 1..s {
                ensure(y.get(i) * d == ch.e_at(i + 1) - 1, || {
                    format!(
                        "s={s} d={d}: y_{i}={} e_{}={}",
                        y.get(i),
                        i + 1,
                        ch.e_at(i + 1)
                    )
                })?;
            }
            let spec = design_spec(&ch, k).map_err(|e| e.to_string())?;
            let v = ch.v();
            let via_pairs = &spec.b * k * (k - 1) / (v * (v - 1));
            let via_family = &spec.b * k / (v * d);
            ensure(via_pairs == via_family && spec.lambda == via_family, || {
                format!("s={s} d={d}: λ {via_pairs} vs {via_family}")
            })?;
        }
    }
    Ok("15 members feasible, y and λ agree".into())
}

fn collapse_property() -> Outcome {
    let ch = chain(&[3, 5, 17]);
    let y = y_sequence(&ch, 128).map_err(|e| e.to_string())?;
    for (i, want) in [(1usize, vec![15u64, 17]), (2, vec![3, 85])] {
        let (collapsed, k) = collapse_chain(&ch, 128, i).map_err(|e| e.to_string())?;
        ensure(collapsed.e() == want.as_slice(), || {
            format!("got {:?}", collapsed.e())
        })?;
        let report = check_ft(&collapsed, k).map_err(|e| e.to_string())?;
        ensure(report.feasible(), || format!("{want:?} infeasible"))?;
        let mut expected = y.clone();
        expected.remove(i);
        let got = report.y.ok_or("no y")?.values().to_vec();
        ensure(got == expected, || {
            format!("{want:?}: y={got:?}, want {expected:?}")
        })?;
    }
    Ok("(15,17) and (3,85) feasible with y_i removed".into())
}

fn intersection_law() -> Outcome {
    let mut checked = 0u64;
    for (e, k) in [(&[4u64, 4][..], 6), (&[3, 5], 8)] {
        let ch = chain(e);
        let y = y_sequence(&ch, k).map_err(|e| e.to_string())?;
        let spec = design_spec(&ch, k).map_err(|e| e.to_string())?;
        for block in enumerate_blocks(&ch, &spec.y, 10_000).map_err(|e| e.to_string())? {
            for (level, &want) in y.iter().enumerate().skip(1) {
                for class in ch.classes_at(level) {
                    let range = ch.class_range(&class);
                    let hit = block
                        .ranks()
                        .iter()
                        .filter(|&&r| range.contains(&(r as u64)))
                        .count() as u64;
                    ensure(hit == 0 || hit == want, || {
                        format!("block {{{block}}} meets {class} in {hit}")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} block-class incidences"))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 9] = [
        (
            "1 table reproduction",
            table_reproduction,
            Some(Duration::from_secs(30)),
        ),
        (
            "2 exhaustive oracle (4,4) k=6",
            || exhaustive_instance(&[4, 4], 6, 864, 120, 108),
            Some(Duration::from_secs(5)),
        ),
        (
            "3 exhaustive oracle (3,5) k=8",
            || exhaustive_instance(&[3, 5], 8, 405, 105, 108),
            Some(Duration::from_secs(5)),
        ),
        (
            "4 flag-transitivity (4,4) k=6",
            flag_transitivity,
            Some(Duration::from_secs(30)),
        ),
        ("5 orbit equals enumeration", orbit_equals_enumeration, None),
        (
            "6 arithmetic/exhaustive agreement",
            arithmetic_agreement,
            None,
        ),
        ("7 family consistency", family_consistency, None),
        ("8 collapse property", collapse_property, None),
        ("9 intersection-size law", intersection_law, None),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {elapsed:.2?}, limit {limit:?}"))
            }
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{elapsed:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} [{elapsed:.2?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
