//! Representable atom sets and common information.
//!
//! A set `S ⊆ ΔΩ` is representable when `S = ΔP` for some partition `P`.
//! Representable subsets of `S` are closed under union (`ΔP ∪ ΔQ = Δ(P∨Q)`),
//! so `S` has a unique largest one.

use crate::atoms::AtomSet;
use crate::error::{Error, Result};
use crate::measure::{entropy_partition_law, LogBase};
use crate::quantities::{content, InfoSystem};
use crate::space::{bell, components, enumerate_coarsenings, OutcomeSpace, Partition};

/// Default outcome cap for the exhaustive `Rep(S)` search.
pub const DEFAULT_REP_CAP: usize = 10;
/// Default cap on joint blocks for the Wyner search.
pub const DEFAULT_WYNER_CAP: usize = 8;
/// Default absolute tolerance on factorisation residuals.
pub const DEFAULT_CI_TOL: f64 = 1e-9;

/// A witness variable together with its information value.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonInfoResult {
    pub partition: Partition,
    pub value: f64,
    pub witness_content: AtomSet,
}

/// Search limits for the exhaustive procedures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub rep_cap: usize,
    pub wyner_cap: usize,
    pub ci_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            rep_cap: DEFAULT_REP_CAP,
            wyner_cap: DEFAULT_WYNER_CAP,
            ci_tol: DEFAULT_CI_TOL,
        }
    }
}

/// Outcomes `i, j` are forced into one block whenever the pair atom `ij` is
/// missing from `s`; this is the finest partition that could have content `s`.
fn forced_blocks(s: &AtomSet) -> Partition {
    components(s.outcomes(), |i, j| !s.contains_mask(1 << i | 1 << j))
}

/// The unique partition whose content is exactly `s`, if any.
pub fn is_representable(s: &AtomSet) -> Option<Partition> {
    let candidate = forced_blocks(s);
    (content(&candidate) == *s).then_some(candidate)
}

/// `Rep(s)` with the default cap.
pub fn max_representable_subset(
    space: &OutcomeSpace,
    s: &AtomSet,
    base: LogBase,
) -> Result<CommonInfoResult> {
    max_representable_subset_with_cap(space, s, base, DEFAULT_REP_CAP)
}

/// Largest representable subset of `s`, by exhaustive search.
///
/// Every candidate must be coarser than the forced blocks of `s`, so only
/// coarsenings of those are enumerated. The answer is the common refinement
/// of all candidates with `ΔP ⊆ s`.
pub fn max_representable_subset_with_cap(
    space: &OutcomeSpace,
    s: &AtomSet,
    base: LogBase,
    cap: usize,
) -> Result<CommonInfoResult> {
    let n = space.len();
    crate::space::check_same(n, s.outcomes())?;
    if n > cap {
        return Err(Error::CapExceeded {
            what: "representable-subset search (outcomes)",
            size: n,
            cap,
        });
    }
    let forced = forced_blocks(s);
    let mut best = Partition::trivial(n);
    for p in enumerate_coarsenings(&forced) {
        if p.len() > 1 && content(&p).is_subset(s)? {
            best = best.common_refinement(&p)?;
        }
    }
    let witness_content = content(&best);
    debug_assert!(witness_content.is_subset(s).unwrap_or(false));
    let value = entropy_partition_law(space, &best, base)?;
    Ok(CommonInfoResult {
        partition: best,
        value,
        witness_content,
    })
}

fn partitions_of<'a>(system: &'a InfoSystem, vars: &[&str]) -> Result<Vec<&'a Partition>> {
    if vars.len() < 2 {
        return Err(Error::Arity {
            kind: "common information".into(),
            expected: "at least 2",
            got: vars.len(),
        });
    }
    vars.iter().map(|v| system.variable(v)).collect()
}

/// Gács-Körner common information via the meet of the variables.
pub fn gacs_korner(system: &InfoSystem, vars: &[&str]) -> Result<CommonInfoResult> {
    let parts: Vec<Partition> = partitions_of(system, vars)?.into_iter().cloned().collect();
    let meet = Partition::common_coarsening(&parts)?;
    let witness_content = content(&meet);
    let value = entropy_partition_law(system.space(), &meet, system.base())?;
    Ok(CommonInfoResult {
        partition: meet,
        value,
        witness_content,
    })
}

/// Largest factorisation residual `|P(x_1..x_n | B) − Π P(x_i | B)|` over
/// blocks `B` of `w` with positive weight and all joint events.
pub fn ci_residual(system: &InfoSystem, vars: &[&str], w: &Partition) -> Result<f64> {
    let space = system.space();
    crate::space::check_same(space.len(), w.outcomes())?;
    let parts: Vec<&Partition> = vars
        .iter()
        .map(|v| system.variable(v))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for &block in w.blocks() {
        let pb = space.mask_weight(block);
        if pb <= 0.0 {
            continue;
        }
        // per variable: restricted blocks with their conditional probabilities
        let local: Vec<Vec<(u32, f64)>> = parts
            .iter()
            .map(|p| {
                p.restrict(block)
                    .into_iter()
                    .map(|m| (m, space.mask_weight(m) / pb))
                    .collect()
            })
            .collect();
        let mut idx = vec![0usize; local.len()];
        'events: loop {
            let mut mask = block;
            let mut product = 1.0;
            for (choices, &i) in local.iter().zip(&idx) {
                mask &= choices[i].0;
                product *= choices[i].1;
            }
            let joint = space.mask_weight(mask) / pb;
            worst = worst.max((joint - product).abs());
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < local[k].len() {
                    continue 'events;
                }
                idx[k] = 0;
            }
            break;
        }
    }
    Ok(worst)
}

pub fn is_conditionally_independent(
    system: &InfoSystem,
    vars: &[&str],
    w: &Partition,
    tol: f64,
) -> Result<bool> {
    Ok(ci_residual(system, vars, w)? <= tol)
}

/// Wyner common information with the default configuration.
pub fn wyner(system: &InfoSystem, vars: &[&str]) -> Result<CommonInfoResult> {
    wyner_with_config(system, vars, &SearchConfig::default())
}

/// Minimises `I(X_1..X_n; W)` over variables `W` that make the `X_i`
/// conditionally independent.
///
/// Candidates are the coarsenings of the joint variable: no outcome split is
/// needed, and outcomes the joint cannot tell apart may share a block of `W`.
/// Ties (within 1e-12) go to the earliest partition in canonical order.
pub fn wyner_with_config(
    system: &InfoSystem,
    vars: &[&str],
    config: &SearchConfig,
) -> Result<CommonInfoResult> {
    partitions_of(system, vars)?;
    let joint = system.joint(vars)?;
    if joint.len() > config.wyner_cap {
        return Err(Error::CapExceeded {
            what: "Wyner search (joint blocks)",
            size: joint.len(),
            cap: config.wyner_cap,
        });
    }
    let space = system.space();
    let base = system.base();
    let mut best: Option<(f64, Partition)> = None;
    for w in enumerate_coarsenings(&joint) {
        if !is_conditionally_independent(system, vars, &w, config.ci_tol)? {
            continue;
        }
        // W is coarser than the joint, so I(J; W) = H(W)
        let value = entropy_partition_law(space, &w, base)?;
        let better = match &best {
            None => true,
            Some((v, p)) => value < v - 1e-12 || (value <= v + 1e-12 && w.canonical_cmp(p).is_lt()),
        };
        if better {
            best = Some((value, w));
        }
    }
    // the joint itself always factorises, so a candidate exists
    let (_, partition) = best.expect("joint variable is always conditionally independent");
    let witness_content = content(&partition);
    let value = system.measure(&content(&joint).intersection(&witness_content)?)?;
    debug_assert!((value - entropy_partition_law(space, &partition, base)?).abs() < 1e-6);
    Ok(CommonInfoResult {
        partition,
        value,
        witness_content,
    })
}

/// Number of candidates the Wyner search would visit.
pub fn wyner_search_size(system: &InfoSystem, vars: &[&str]) -> Result<u64> {
    Ok(bell(system.joint(vars)?.len()))
}
