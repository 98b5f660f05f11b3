//! Total loss `L`, interior loss `μ` and the signed measure on ΔΩ.
//!
//! `L(p_1..p_n) = Σ p_i log(1/p_i) − P log(1/P)` with `P = Σ p_i` is the
//! entropy lost by merging `n` events into one. The interior loss `μ` is its
//! Möbius inversion over the subset lattice:
//!
//! ```text
//! μ(S) = Σ_{T ⊆ S} (−1)^{|S|−|T|} L(T)
//! ```
//!
//! [`MuTable`] evaluates `μ` on every atom of a space with a subset-lattice
//! transform in `O(N·2^N)` arithmetic. [`interior_loss`] evaluates a single
//! tuple by direct inclusion–exclusion and is what the table is checked
//! against.
//!
//! Terms `p log p` at `p = 0` are taken as 0. On top of that, `μ` is forced
//! to exactly 0 whenever a member weight is exactly 0, so the structural zero
//! does not pick up rounding noise.

use serde::{Deserialize, Serialize};

use crate::atoms::{Atom, AtomSet, FormalSum};
use crate::error::{Error, Result};
use crate::space::{check_same, full_mask, members, OutcomeSpace, Partition};

/// Logarithm base for all entropy values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogBase(f64);

impl LogBase {
    /// Bits (base 2), the default.
    pub const BITS: LogBase = LogBase(2.0);
    /// Nats (base e).
    pub const NATS: LogBase = LogBase(std::f64::consts::E);

    pub fn new(base: f64) -> Option<Self> {
        (base.is_finite() && base > 0.0 && base != 1.0).then_some(Self(base))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `ln(base)`, the divisor turning nats into this unit.
    pub fn ln(self) -> f64 {
        if self.0 == 2.0 {
            std::f64::consts::LN_2
        } else {
            self.0.ln()
        }
    }
}

impl Default for LogBase {
    fn default() -> Self {
        Self::BITS
    }
}

fn plogp(p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * p.ln()
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() {
            return Err(Error::NonFiniteWeight {
                label: format!("#{i}"),
                weight: w,
            });
        }
        if w < 0.0 {
            return Err(Error::NegativeWeight {
                label: format!("#{i}"),
                weight: w,
            });
        }
    }
    Ok(())
}

fn loss_unchecked(weights: &[f64], base: LogBase) -> f64 {
    let total: f64 = weights.iter().sum();
    let sum_plogp: f64 = weights.iter().map(|&p| plogp(p)).sum();
    (plogp(total) - sum_plogp) / base.ln()
}

/// Entropy lost when the given events are merged into a single event.
///
/// Equals the Shannon entropy when the weights sum to one.
pub fn total_loss(weights: &[f64], base: LogBase) -> Result<f64> {
    check_weights(weights)?;
    Ok(loss_unchecked(weights, base))
}

/// Shannon entropy of a weight vector, normalised by its total.
pub fn shannon_entropy(weights: &[f64], base: LogBase) -> Result<f64> {
    check_weights(weights)?;
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(-weights.iter().map(|&p| plogp(p / total)).sum::<f64>() / base.ln())
}

fn check_order(d: f64) -> Result<()> {
    if d.is_finite() && d > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidOrder(d))
    }
}

fn tsallis_unchecked(weights: &[f64], d: f64, base: LogBase) -> f64 {
    if d == 1.0 {
        return loss_unchecked(weights, base);
    }
    let total: f64 = weights.iter().sum();
    let sum_pow: f64 = weights.iter().map(|&p| p.powf(d)).sum();
    (total.powf(d) - sum_pow) / ((d - 1.0) * base.ln())
}

/// Order-`d` Tsallis loss `P^d · H_d(p/P)` with `H_d(q) = (1 − Σ q_i^d)/(d − 1)`.
///
/// The value is divided by `ln(base)`, so `d → 1` recovers [`total_loss`] in
/// the same unit; with [`LogBase::NATS`] it is the plain Tsallis form.
pub fn tsallis_loss(weights: &[f64], d: f64, base: LogBase) -> Result<f64> {
    check_weights(weights)?;
    check_order(d)?;
    Ok(tsallis_unchecked(weights, d, base))
}

/// Alternating sum over all subsets of `weights` of `loss(subset)`.
fn inclusion_exclusion(weights: &[f64], loss: impl Fn(&[f64]) -> f64) -> f64 {
    let n = weights.len();
    let mut buf = Vec::with_capacity(n);
    let mut acc = 0.0;
    for mask in 0..(1u64 << n) {
        let size = mask.count_ones() as usize;
        if size < 2 {
            continue;
        }
        buf.clear();
        buf.extend((0..n).filter(|i| mask >> i & 1 == 1).map(|i| weights[i]));
        let term = loss(&buf);
        if (n - size).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Interior loss `μ(p_1..p_n)`: the measure of the atom with these member weights.
pub fn interior_loss(weights: &[f64], base: LogBase) -> Result<f64> {
    check_weights(weights)?;
    if weights.is_empty() {
        return Err(Error::EmptyInput("interior loss needs at least one weight"));
    }
    if weights.len() == 1 || weights.contains(&0.0) {
        return Ok(0.0);
    }
    Ok(inclusion_exclusion(weights, |s| loss_unchecked(s, base)))
}

/// Order-`d` interior loss: the same alternating sum over [`tsallis_loss`].
pub fn tsallis_interior_loss(weights: &[f64], d: f64, base: LogBase) -> Result<f64> {
    check_weights(weights)?;
    check_order(d)?;
    if weights.is_empty() {
        return Err(Error::EmptyInput("interior loss needs at least one weight"));
    }
    if weights.len() == 1 || weights.contains(&0.0) {
        return Ok(0.0);
    }
    Ok(inclusion_exclusion(weights, |s| {
        tsallis_unchecked(s, d, base)
    }))
}

/// `μ(b)` for every atom `b` of a space, indexed by outcome mask.
///
/// Entries for masks that are not atoms (∅ and singletons) hold 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MuTable {
    n: usize,
    base: LogBase,
    values: Vec<f64>,
}

impl MuTable {
    /// Builds the table with the subset-lattice transform.
    ///
    /// Per-subset sums `P(S)` and `Σ_{i∈S} p_i log p_i` are filled by peeling
    /// the lowest bit, giving `L(S)` for every `S` in `O(2^N)`; the Möbius
    /// transform then removes one coordinate at a time in `O(N·2^N)`.
    pub fn new(space: &OutcomeSpace, base: LogBase) -> Self {
        let n = space.len();
        let size = 1usize << n;
        let ln_base = base.ln();
        let mut total = vec![0.0f64; size];
        let mut sum_plogp = vec![0.0f64; size];
        let mut values = vec![0.0f64; size];
        let mut zero_mask = 0u32;
        for (i, &w) in space.weights().iter().enumerate() {
            if w == 0.0 {
                zero_mask |= 1 << i;
            }
        }
        for s in 1..size {
            let low = s.trailing_zeros() as usize;
            let rest = s & (s - 1);
            let w = space.weight(low);
            total[s] = total[rest] + w;
            sum_plogp[s] = sum_plogp[rest] + plogp(w);
            values[s] = (plogp(total[s]) - sum_plogp[s]) / ln_base;
        }
        drop(total);
        drop(sum_plogp);

        // Möbius inversion over the subset lattice
        let mut half = 1usize;
        while half < size {
            for block in values.chunks_exact_mut(half * 2) {
                let (lo, hi) = block.split_at_mut(half);
                for (l, h) in lo.iter().zip(hi.iter_mut()) {
                    *h -= *l;
                }
            }
            half *= 2;
        }

        for (s, v) in values.iter_mut().enumerate() {
            if (s as u32).count_ones() < 2 || s as u32 & zero_mask != 0 {
                *v = 0.0;
            }
        }
        Self { n, base, values }
    }

    /// Reference construction: one inclusion–exclusion sum per atom, `O(3^N)`.
    pub fn naive(space: &OutcomeSpace, base: LogBase) -> Self {
        let n = space.len();
        let mut values = vec![0.0; 1 << n];
        for m in 0..=full_mask(n) {
            if m.count_ones() >= 2 {
                values[m as usize] = interior_loss(&space.member_weights(m), base)
                    .expect("space weights are validated");
            }
        }
        Self { n, base, values }
    }

    pub fn outcomes(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> LogBase {
        self.base
    }

    pub fn get(&self, atom: Atom) -> f64 {
        self.values[atom.mask() as usize]
    }

    /// Raw values indexed by mask.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(atom, μ(atom))` in increasing mask order.
    pub fn iter(&self) -> impl Iterator<Item = (Atom, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(m, &v)| Atom::new(m as u32).map(|a| (a, v)))
    }

    /// `μ(S) = Σ_{b∈S} μ(b)`.
    pub fn measure_set(&self, set: &AtomSet) -> Result<f64> {
        check_same(self.n, set.outcomes())?;
        let mut acc = 0.0;
        for (wi, &w) in set.words().iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                acc += self.values[wi * 64 + b];
            }
        }
        Ok(acc)
    }

    /// Linear extension `μ(Σ n_b b) = Σ n_b μ(b)`.
    pub fn measure_sum(&self, z: &FormalSum) -> Result<f64> {
        check_same(self.n, z.outcomes())?;
        Ok(z.terms().map(|(a, c)| c as f64 * self.get(a)).sum())
    }
}

/// Builds the full μ table of a space.
pub fn mu_table(space: &OutcomeSpace, base: LogBase) -> MuTable {
    MuTable::new(space, base)
}

pub fn measure_atom_set(table: &MuTable, set: &AtomSet) -> Result<f64> {
    table.measure_set(set)
}

pub fn measure_formal_sum(table: &MuTable, z: &FormalSum) -> Result<f64> {
    table.measure_sum(z)
}

/// Entropy of a partition as `L(Ω) − Σ_i L(P_i)`, without touching atoms.
pub fn entropy_partition_law(
    space: &OutcomeSpace,
    partition: &Partition,
    base: LogBase,
) -> Result<f64> {
    check_same(space.len(), partition.outcomes())?;
    let whole = loss_unchecked(space.weights(), base);
    let inner: f64 = partition
        .blocks()
        .iter()
        .map(|&b| loss_unchecked(&space.member_weights(b), base))
        .sum();
    Ok(whole - inner)
}

/// `L(S)` for an outcome subset, which is also the total `μ` of the atoms inside `S`.
pub fn subset_loss(space: &OutcomeSpace, mask: u32, base: LogBase) -> f64 {
    let w: Vec<f64> = members(mask).map(|i| space.weight(i)).collect();
    loss_unchecked(&w, base)
}
