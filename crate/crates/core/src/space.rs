//! Outcome spaces and partitions (random variables).
//!
//! Outcomes are indexed `0..N` in construction order and every subset of
//! outcomes is encoded as a [`Mask`] with bit `i` standing for outcome `i`.
//! The encoding is fixed for the lifetime of a space, so atoms, partitions
//! and tables built from the same space can be compared bit for bit.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Bitmask over outcome indices.
pub type Mask = u32;

/// Largest outcome count accepted by default; ΔΩ has `2^N - N - 1` atoms.
pub const DEFAULT_MAX_OUTCOMES: usize = 24;

/// Hard upper bound imposed by the 32-bit mask encoding and 2^N tables.
pub const HARD_MAX_OUTCOMES: usize = 30;

/// A labelled finite outcome set with one nonnegative weight per outcome.
///
/// Weights are never renormalised. Zero weights are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSpace {
    labels: Vec<String>,
    weights: Vec<f64>,
    index: HashMap<String, usize>,
}

impl OutcomeSpace {
    /// Builds a space with the default size cap.
    pub fn new<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        weights: &[f64],
    ) -> Result<Self> {
        Self::with_cap(labels, weights, DEFAULT_MAX_OUTCOMES)
    }

    pub fn with_cap<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        weights: &[f64],
        cap: usize,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != weights.len() {
            return Err(Error::LengthMismatch {
                labels: labels.len(),
                weights: weights.len(),
            });
        }
        let cap = cap.min(HARD_MAX_OUTCOMES);
        if labels.len() > cap {
            return Err(Error::SpaceTooLarge {
                size: labels.len(),
                cap,
            });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        for (label, &weight) in labels.iter().zip(weights) {
            if !weight.is_finite() {
                return Err(Error::NonFiniteWeight {
                    label: label.clone(),
                    weight,
                });
            }
            if weight < 0.0 {
                return Err(Error::NegativeWeight {
                    label: label.clone(),
                    weight,
                });
            }
        }
        Ok(Self {
            labels,
            weights: weights.to_vec(),
            index,
        })
    }

    /// Space with `n` outcomes labelled `1..=n` and the given weights.
    pub fn numbered(weights: &[f64]) -> Result<Self> {
        Self::new((1..=weights.len()).map(|i| i.to_string()), weights)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, outcome: usize) -> f64 {
        self.weights[outcome]
    }

    pub fn label(&self, outcome: usize) -> &str {
        &self.labels[outcome]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Mask with every outcome set.
    pub fn full_mask(&self) -> Mask {
        full_mask(self.len())
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Sum of the weights of the outcomes in `mask`.
    pub fn mask_weight(&self, mask: Mask) -> f64 {
        members(mask).map(|i| self.weights[i]).sum()
    }

    /// Weights of the outcomes in `mask`, in index order.
    pub fn member_weights(&self, mask: Mask) -> Vec<f64> {
        members(mask).map(|i| self.weights[i]).collect()
    }

    /// Encodes a list of labels as a mask.
    pub fn mask_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Mask> {
        labels
            .iter()
            .try_fold(0, |acc, l| Ok(acc | (1 << self.index_of(l.as_ref())?)))
    }

    /// Copy of this space with weights scaled to sum to one.
    pub fn normalized(&self) -> Self {
        let total = self.total_weight();
        let mut out = self.clone();
        if total > 0.0 {
            out.weights.iter_mut().for_each(|w| *w /= total);
        }
        out
    }
}

pub(crate) fn full_mask(n: usize) -> Mask {
    if n == 0 {
        0
    } else {
        Mask::MAX >> (Mask::BITS as usize - n)
    }
}

/// Iterates over the outcome indices set in `mask`, lowest first.
pub fn members(mut mask: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// A random variable: disjoint nonempty blocks covering the outcome set.
///
/// Blocks are kept sorted by their smallest member, so two partitions are
/// equal iff they have the same blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    blocks: Vec<Mask>,
}

impl Partition {
    /// Validates and canonicalises a partition given as block masks.
    pub fn from_masks(n: usize, masks: impl IntoIterator<Item = Mask>) -> Result<Self> {
        let full = full_mask(n);
        let mut seen: Mask = 0;
        let mut blocks = Vec::new();
        for m in masks {
            if m == 0 {
                return Err(Error::EmptyBlock);
            }
            if m & !full != 0 {
                let bad = (m & !full).trailing_zeros();
                return Err(Error::UnknownLabel(format!("#{bad}")));
            }
            if m & seen != 0 {
                let dup = (m & seen).trailing_zeros();
                return Err(Error::OverlappingBlocks(format!("#{dup}")));
            }
            seen |= m;
            blocks.push(m);
        }
        if seen != full {
            let missing = (full & !seen).trailing_zeros();
            return Err(Error::MissingOutcome(format!("#{missing}")));
        }
        Ok(Self::canonical(n, blocks))
    }

    /// Builds a partition from blocks of outcome labels, reporting errors by label.
    pub fn from_blocks<S: AsRef<str>>(space: &OutcomeSpace, blocks: &[Vec<S>]) -> Result<Self> {
        let mut seen: Mask = 0;
        let mut masks = Vec::with_capacity(blocks.len());
        for block in blocks {
            if block.is_empty() {
                return Err(Error::EmptyBlock);
            }
            let mut mask = 0;
            for label in block {
                let bit = 1 << space.index_of(label.as_ref())?;
                if (seen | mask) & bit != 0 {
                    return Err(Error::OverlappingBlocks(label.as_ref().to_string()));
                }
                mask |= bit;
            }
            seen |= mask;
            masks.push(mask);
        }
        if let Some(missing) = members(space.full_mask() & !seen).next() {
            return Err(Error::MissingOutcome(space.label(missing).to_string()));
        }
        Ok(Self::canonical(space.len(), masks))
    }

    /// The one-block (coarsest) partition.
    pub fn trivial(n: usize) -> Self {
        if n == 0 {
            return Self { n, blocks: vec![] };
        }
        Self {
            n,
            blocks: vec![full_mask(n)],
        }
    }

    /// The partition into singletons (finest).
    pub fn singletons(n: usize) -> Self {
        Self {
            n,
            blocks: (0..n).map(|i| 1 << i).collect(),
        }
    }

    /// Partition from a block label per outcome (`labels[i]` = block of outcome `i`).
    pub fn from_labels<T: Eq + std::hash::Hash>(labels: &[T]) -> Self {
        let mut ids: HashMap<&T, usize> = HashMap::new();
        let mut blocks: Vec<Mask> = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            let next = ids.len();
            let id = *ids.entry(l).or_insert(next);
            if id == blocks.len() {
                blocks.push(0);
            }
            blocks[id] |= 1 << i;
        }
        Self::canonical(labels.len(), blocks)
    }

    fn canonical(n: usize, mut blocks: Vec<Mask>) -> Self {
        blocks.sort_unstable_by_key(|b| b.trailing_zeros());
        Self { n, blocks }
    }

    /// Number of outcomes of the underlying space.
    pub fn outcomes(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Mask] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Index of the block containing `outcome`.
    pub fn block_of(&self, outcome: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b & (1 << outcome) != 0)
            .expect("partition covers every outcome")
    }

    /// Block index per outcome.
    pub fn block_ids(&self) -> Vec<usize> {
        let mut ids = vec![0; self.n];
        for (b, &mask) in self.blocks.iter().enumerate() {
            for i in members(mask) {
                ids[i] = b;
            }
        }
        ids
    }

    /// True if every block of `self` lies inside a block of `other`.
    pub fn is_finer_than(&self, other: &Partition) -> bool {
        self.n == other.n
            && self
                .blocks
                .iter()
                .all(|&b| other.blocks.iter().any(|&o| b & !o == 0))
    }

    pub fn block_weights(&self, space: &OutcomeSpace) -> Vec<f64> {
        self.blocks.iter().map(|&b| space.mask_weight(b)).collect()
    }

    /// Nonempty intersections of the blocks with `subset`; a partition of `subset`.
    pub fn restrict(&self, subset: Mask) -> Vec<Mask> {
        self.blocks
            .iter()
            .map(|b| b & subset)
            .filter(|&b| b != 0)
            .collect()
    }

    /// Join in the refinement order: all nonempty pairwise block intersections.
    pub fn common_refinement(&self, other: &Partition) -> Result<Partition> {
        check_same(self.n, other.n)?;
        let blocks = self
            .blocks
            .iter()
            .flat_map(|&p| other.blocks.iter().map(move |&q| p & q))
            .filter(|&b| b != 0)
            .collect();
        Ok(Self::canonical(self.n, blocks))
    }

    /// Finest partition coarser than every input (connected components of
    /// the "share a block somewhere" relation).
    pub fn common_coarsening(partitions: &[Partition]) -> Result<Partition> {
        let first = partitions
            .first()
            .ok_or(Error::EmptyInput("partition list"))?;
        let n = first.n;
        let mut uf = UnionFind::new(n);
        for p in partitions {
            check_same(n, p.n)?;
            for &block in &p.blocks {
                let mut it = members(block);
                if let Some(root) = it.next() {
                    for other in it {
                        uf.union(root, other);
                    }
                }
            }
        }
        Ok(uf.into_partition())
    }

    /// Common refinement of a nonempty list.
    pub fn join_all(partitions: &[Partition]) -> Result<Partition> {
        let (first, rest) = partitions
            .split_first()
            .ok_or(Error::EmptyInput("partition list"))?;
        rest.iter()
            .try_fold(first.clone(), |acc, p| acc.common_refinement(p))
    }

    /// Ordering used for deterministic tie-breaks: fewer blocks first, then
    /// lexicographic on the canonical block masks.
    pub fn canonical_cmp(&self, other: &Partition) -> std::cmp::Ordering {
        self.blocks
            .len()
            .cmp(&other.blocks.len())
            .then_with(|| self.blocks.cmp(&other.blocks))
    }

    /// Renders as `{{1,3},{2,4}}` using the space's labels.
    pub fn render(&self, space: &OutcomeSpace) -> String {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|&b| {
                let labels: Vec<&str> = members(b).map(|i| space.label(i)).collect();
                format!("{{{}}}", labels.join(","))
            })
            .collect();
        format!("{{{}}}", blocks.join(","))
    }

    /// Block lists as labels, for serialisation.
    pub fn label_blocks(&self, space: &OutcomeSpace) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|&b| members(b).map(|i| space.label(i).to_string()).collect())
            .collect()
    }
}

pub(crate) fn check_same(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::SpaceMismatch { left, right })
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    fn into_partition(mut self) -> Partition {
        let n = self.parent.len();
        let roots: Vec<usize> = (0..n).map(|i| self.find(i)).collect();
        Partition::from_labels(&roots)
    }
}

/// Groups outcomes into blocks wherever `linked(i, j)` holds, closing transitively.
pub(crate) fn components(n: usize, mut linked: impl FnMut(usize, usize) -> bool) -> Partition {
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if linked(i, j) {
                uf.union(i, j);
            }
        }
    }
    uf.into_partition()
}

/// Restricted-growth-string enumeration of all set partitions of `k` items.
///
/// Yields the block label of each item; labels appear in first-use order, so
/// every partition is produced exactly once (Bell(k) strings in total).
#[derive(Debug, Clone)]
pub struct RestrictedGrowth {
    digits: Vec<usize>,
    maxes: Vec<usize>,
    started: bool,
    done: bool,
}

impl RestrictedGrowth {
    pub fn new(k: usize) -> Self {
        Self {
            digits: vec![0; k],
            maxes: vec![0; k],
            started: false,
            done: false,
        }
    }

    /// Advances to the next string, returning it, or `None` when exhausted.
    pub fn next_string(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.digits);
        }
        let k = self.digits.len();
        // rightmost position that can still grow
        let mut i = k;
        while i > 1 {
            i -= 1;
            if self.digits[i] <= self.maxes[i - 1] {
                self.digits[i] += 1;
                let m = self.maxes[i - 1].max(self.digits[i]);
                self.maxes[i] = m;
                for j in i + 1..k {
                    self.digits[j] = 0;
                    self.maxes[j] = m;
                }
                return Some(&self.digits);
            }
        }
        self.done = true;
        None
    }
}

/// All partitions of `n` outcomes in restricted-growth order.
pub fn enumerate_partitions(n: usize) -> impl Iterator<Item = Partition> {
    let mut rgs = RestrictedGrowth::new(n);
    std::iter::from_fn(move || rgs.next_string().map(Partition::from_labels))
}

/// All partitions coarser than `base`, produced by grouping its blocks.
pub fn enumerate_coarsenings(base: &Partition) -> impl Iterator<Item = Partition> + '_ {
    let mut rgs = RestrictedGrowth::new(base.len());
    std::iter::from_fn(move || {
        let digits = rgs.next_string()?;
        let k = digits.iter().copied().max().map_or(0, |m| m + 1);
        let mut merged = vec![0 as Mask; k];
        for (&d, &b) in digits.iter().zip(&base.blocks) {
            merged[d] |= b;
        }
        Some(Partition::canonical(base.n, merged))
    })
}

/// Bell number `B(n)` (saturating).
pub fn bell(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            next.push(next.last().unwrap().saturating_add(x));
        }
        row = next;
    }
    row[0]
}
