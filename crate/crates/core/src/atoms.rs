//! Atoms of ΔΩ, atom sets and integer formal sums (ℤΔΩ).
//!
//! An atom is a subset of at least two outcomes, keyed by its outcome mask.
//! [`AtomSet`] is a flat bitset indexed by that mask, so membership is a
//! single bit test and set algebra runs a word at a time. [`FormalSum`] is
//! sparse: only nonzero coefficients are stored.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::space::{check_same, full_mask, members, Mask, OutcomeSpace};

/// A logarithmic atom: a set of at least two outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Atom(Mask);

impl Atom {
    /// Returns `None` for masks with fewer than two members.
    pub fn new(mask: Mask) -> Option<Self> {
        (mask.count_ones() >= 2).then_some(Self(mask))
    }

    pub fn mask(self) -> Mask {
        self.0
    }

    /// Number of outcomes in the atom.
    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        members(self.0)
    }

    /// Listing order: by degree, then lexicographically by members, so
    /// `12 < 13 < 14 < 23`. Within a degree this is descending mask order
    /// with outcome 0 as the most significant bit.
    pub fn listing_key(self) -> (u32, std::cmp::Reverse<Mask>) {
        (self.degree(), std::cmp::Reverse(self.0.reverse_bits()))
    }

    /// True if every outcome of `self` is also in `other`.
    pub fn is_subset_of(self, other: Atom) -> bool {
        self.0 & !other.0 == 0
    }
}

/// Number of atoms of a space with `n` outcomes: `2^n - n - 1`.
pub fn atom_count(n: usize) -> usize {
    (1usize << n) - n - 1
}

/// All atoms of an `n`-outcome space in increasing mask order.
pub fn enumerate_atoms(n: usize) -> Vec<Atom> {
    (0..=full_mask(n)).filter_map(Atom::new).collect()
}

/// Canonical rendering: member labels in index order, concatenated when every
/// label of the space is a single character and comma-separated otherwise.
pub fn render_atom(space: &OutcomeSpace, atom: Atom) -> String {
    let sep = if space.labels().iter().all(|l| l.chars().count() == 1) {
        ""
    } else {
        ","
    };
    atom.members()
        .map(|i| space.label(i))
        .collect::<Vec<_>>()
        .join(sep)
}

/// Set operations on atom sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
}

/// A set of atoms of one space, stored as a bitset over outcome masks.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AtomSet {
    n: usize,
    words: Vec<u64>,
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.iter().map(|a| format!("{:#b}", a.mask())))
            .finish()
    }
}

fn word_count(n: usize) -> usize {
    (1usize << n).div_ceil(64)
}

impl AtomSet {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            words: vec![0; word_count(n)],
        }
    }

    /// Every atom of the space (ΔΩ itself).
    pub fn full(n: usize) -> Self {
        let mut words = vec![u64::MAX; word_count(n)];
        let len = 1usize << n;
        if len < 64 {
            words[0] = (1u64 << len) - 1;
        }
        let mut set = Self { n, words };
        set.clear_bit(0);
        for i in 0..n {
            set.clear_bit(1 << i);
        }
        set
    }

    pub fn from_atoms(n: usize, atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut set = Self::empty(n);
        for a in atoms {
            set.insert(a);
        }
        set
    }

    /// Builds a set from raw masks, silently skipping masks that are not atoms.
    pub fn from_masks(n: usize, masks: impl IntoIterator<Item = Mask>) -> Self {
        Self::from_atoms(n, masks.into_iter().filter_map(Atom::new))
    }

    /// Atoms satisfying `pred`.
    pub fn from_fn(n: usize, mut pred: impl FnMut(Atom) -> bool) -> Self {
        let mut set = Self::empty(n);
        for m in 0..=full_mask(n) {
            if let Some(a) = Atom::new(m) {
                if pred(a) {
                    set.set_bit(m);
                }
            }
        }
        set
    }

    pub fn outcomes(&self) -> usize {
        self.n
    }

    fn set_bit(&mut self, m: Mask) {
        self.words[m as usize / 64] |= 1 << (m % 64);
    }

    fn clear_bit(&mut self, m: Mask) {
        self.words[m as usize / 64] &= !(1 << (m % 64));
    }

    /// Inserts an atom; panics if it lies outside the space.
    pub fn insert(&mut self, atom: Atom) {
        assert!(
            atom.mask() & !full_mask(self.n) == 0,
            "atom outside a {}-outcome space",
            self.n
        );
        self.set_bit(atom.mask());
    }

    pub fn remove(&mut self, atom: Atom) {
        if atom.mask() & !full_mask(self.n) == 0 {
            self.clear_bit(atom.mask());
        }
    }

    pub fn contains(&self, atom: Atom) -> bool {
        let m = atom.mask();
        m & !full_mask(self.n) == 0 && self.words[m as usize / 64] & (1 << (m % 64)) != 0
    }

    pub fn contains_mask(&self, mask: Mask) -> bool {
        Atom::new(mask).is_some_and(|a| self.contains(a))
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Atoms in increasing mask order.
    pub fn iter(&self) -> impl Iterator<Item = Atom> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros();
                    w &= w - 1;
                    Some(Atom((wi * 64) as Mask + b))
                }
            })
        })
    }

    pub fn apply(&self, op: SetOp, other: &AtomSet) -> Result<AtomSet> {
        check_same(self.n, other.n)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| match op {
                SetOp::Union => a | b,
                SetOp::Intersection => a & b,
                SetOp::Difference => a & !b,
            })
            .collect();
        Ok(AtomSet { n: self.n, words })
    }

    pub fn union(&self, other: &AtomSet) -> Result<AtomSet> {
        self.apply(SetOp::Union, other)
    }

    pub fn intersection(&self, other: &AtomSet) -> Result<AtomSet> {
        self.apply(SetOp::Intersection, other)
    }

    pub fn difference(&self, other: &AtomSet) -> Result<AtomSet> {
        self.apply(SetOp::Difference, other)
    }

    /// Complement relative to ΔΩ.
    pub fn complement(&self) -> AtomSet {
        AtomSet::full(self.n).difference(self).expect("same space")
    }

    pub fn is_subset(&self, other: &AtomSet) -> Result<bool> {
        check_same(self.n, other.n)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(&a, &b)| a & !b == 0))
    }

    /// Drops every atom with an outcome outside `outcomes`.
    pub fn restrict(&self, outcomes: Mask) -> AtomSet {
        let mut out = self.clone();
        for a in self.iter() {
            if a.mask() & !outcomes != 0 {
                out.clear_bit(a.mask());
            }
        }
        out
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn render(&self, space: &OutcomeSpace) -> Vec<String> {
        self.iter().map(|a| render_atom(space, a)).collect()
    }
}

/// Convenience wrapper over [`AtomSet::apply`].
pub fn atomset_algebra(op: SetOp, a: &AtomSet, b: &AtomSet) -> Result<AtomSet> {
    a.apply(op, b)
}

/// An element of ℤΔΩ: an integer combination of atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormalSum {
    n: usize,
    coeffs: BTreeMap<Atom, i64>,
}

impl FormalSum {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn atom(n: usize, atom: Atom, coeff: i64) -> Self {
        let mut z = Self::zero(n);
        z.add_term(atom, coeff);
        z
    }

    /// Indicator sum of a set: coefficient 1 on every member.
    pub fn from_set(set: &AtomSet) -> Self {
        Self {
            n: set.outcomes(),
            coeffs: set.iter().map(|a| (a, 1)).collect(),
        }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Atom, i64)>) -> Self {
        let mut z = Self::zero(n);
        for (a, c) in terms {
            z.add_term(a, c);
        }
        z
    }

    pub fn outcomes(&self) -> usize {
        self.n
    }

    /// Adds `coeff·atom`, dropping the entry if it cancels to zero.
    pub fn add_term(&mut self, atom: Atom, coeff: i64) {
        if coeff == 0 {
            return;
        }
        assert!(atom.mask() & !full_mask(self.n) == 0, "atom outside space");
        let entry = self.coeffs.entry(atom).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.remove(&atom);
        }
    }

    pub fn coeff(&self, atom: Atom) -> i64 {
        self.coeffs.get(&atom).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Atom, i64)> + '_ {
        self.coeffs.iter().map(|(&a, &c)| (a, c))
    }

    /// Number of atoms with a nonzero coefficient.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `ca·a + cb·b`.
    pub fn combine(a: &FormalSum, b: &FormalSum, ca: i64, cb: i64) -> Result<FormalSum> {
        check_same(a.n, b.n)?;
        let mut out = FormalSum::zero(a.n);
        for (atom, c) in a.terms() {
            out.add_term(atom, ca * c);
        }
        for (atom, c) in b.terms() {
            out.add_term(atom, cb * c);
        }
        Ok(out)
    }

    pub fn scaled(&self, k: i64) -> FormalSum {
        FormalSum::from_terms(self.n, self.terms().map(|(a, c)| (a, k * c)))
    }

    /// Atoms with a nonzero coefficient.
    pub fn support(&self) -> AtomSet {
        AtomSet::from_atoms(self.n, self.coeffs.keys().copied())
    }

    /// The set this sum indicates, if every coefficient is 1.
    pub fn to_set(&self) -> Option<AtomSet> {
        self.coeffs
            .values()
            .all(|&c| c == 1)
            .then(|| self.support())
    }

    pub fn restrict(&self, outcomes: Mask) -> FormalSum {
        Self {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(a, _)| a.mask() & !outcomes == 0)
                .map(|(&a, &c)| (a, c))
                .collect(),
        }
    }

    /// Renders as `ab + 2*ad - abc`, atoms in listing order. The
    /// `*` keeps coefficients apart from numeric labels.
    pub fn render(&self, space: &OutcomeSpace) -> String {
        let mut terms: Vec<(Atom, i64)> = self.terms().collect();
        terms.sort_by_key(|(a, _)| a.listing_key());
        if terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (a, c)) in terms.into_iter().enumerate() {
            let label = render_atom(space, a);
            let sign = if c < 0 { "-" } else { "+" };
            if i == 0 {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            if c.abs() != 1 {
                out.push_str(&format!("{}*", c.abs()));
            }
            out.push_str(&label);
        }
        out
    }
}

/// Convenience wrapper over [`FormalSum::combine`].
pub fn formal_combine(a: &FormalSum, b: &FormalSum, ca: i64, cb: i64) -> Result<FormalSum> {
    FormalSum::combine(a, b, ca, cb)
}

/// Restriction to a subset of outcomes, shared by sets and sums.
pub trait Restrict {
    fn restrict_to(&self, outcomes: Mask) -> Self;
}

impl Restrict for AtomSet {
    fn restrict_to(&self, outcomes: Mask) -> Self {
        self.restrict(outcomes)
    }
}

impl Restrict for FormalSum {
    fn restrict_to(&self, outcomes: Mask) -> Self {
        self.restrict(outcomes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, masks: &[Mask]) -> AtomSet {
        AtomSet::from_masks(n, masks.iter().copied())
    }

    // outcome "k" is bit k-1
    fn m(labels: &str) -> Mask {
        labels
            .chars()
            .map(|c| 1 << (c.to_digit(10).unwrap() - 1))
            .fold(0, |a, b| a | b)
    }

    #[test]
    fn enumerate_atoms_examples() {
        let space = OutcomeSpace::numbered(&[0.25; 4]).unwrap();
        let rendered: Vec<String> = enumerate_atoms(4)
            .into_iter()
            .map(|a| render_atom(&space, a))
            .collect();
        let mut sorted = rendered.clone();
        sorted.sort_by_key(|s| (s.len(), s.clone()));
        assert_eq!(
            sorted,
            ["12", "13", "14", "23", "24", "34", "123", "124", "134", "234", "1234"]
        );
        assert!(enumerate_atoms(1).is_empty());
        assert!(enumerate_atoms(0).is_empty());
        assert_eq!(enumerate_atoms(5).len(), 26);
    }

    #[test]
    fn listing_key_is_degree_then_lexicographic() {
        for n in 1..=7 {
            let mut by_key = enumerate_atoms(n);
            by_key.sort_by_key(|a| a.listing_key());
            let mut by_members = enumerate_atoms(n);
            by_members.sort_by_key(|a| (a.degree(), a.members().collect::<Vec<_>>()));
            assert_eq!(by_key, by_members);
        }
    }

    #[test]
    fn atom_count_matches_enumeration() {
        for n in 0..=12 {
            assert_eq!(enumerate_atoms(n).len(), atom_count(n));
            assert_eq!(AtomSet::full(n).len(), atom_count(n));
        }
    }

    #[test]
    fn increasing_mask_order() {
        let atoms = enumerate_atoms(6);
        assert!(atoms.windows(2).all(|w| w[0].mask() < w[1].mask()));
    }

    #[test]
    fn atom_requires_two_members() {
        assert!(Atom::new(0).is_none());
        assert!(Atom::new(0b100).is_none());
        assert_eq!(Atom::new(0b101).unwrap().degree(), 2);
    }

    #[test]
    fn set_algebra_examples() {
        let dx = set(
            4,
            &[
                m("12"),
                m("14"),
                m("23"),
                m("34"),
                m("123"),
                m("124"),
                m("134"),
                m("234"),
                m("1234"),
            ],
        );
        let dy = set(
            4,
            &[
                m("13"),
                m("14"),
                m("23"),
                m("24"),
                m("123"),
                m("124"),
                m("134"),
                m("234"),
                m("1234"),
            ],
        );
        let both = atomset_algebra(SetOp::Intersection, &dx, &dy).unwrap();
        assert_eq!(
            both,
            set(
                4,
                &[
                    m("14"),
                    m("23"),
                    m("123"),
                    m("124"),
                    m("134"),
                    m("234"),
                    m("1234")
                ]
            )
        );
        let empty = AtomSet::empty(4);
        assert_eq!(dx.union(&empty).unwrap(), dx);
        assert!(dx.difference(&dx).unwrap().is_empty());
        assert!(dx.union(&AtomSet::empty(5)).is_err());
    }

    #[test]
    fn de_morgan_exhaustive_small() {
        // every pair of subsets of the 4 atoms of a 3-outcome space
        let atoms = enumerate_atoms(3);
        let sets: Vec<AtomSet> = (0u32..16)
            .map(|bits| {
                AtomSet::from_atoms(
                    3,
                    atoms
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| bits >> i & 1 == 1)
                        .map(|(_, &a)| a),
                )
            })
            .collect();
        for a in &sets {
            for b in &sets {
                let lhs = a.union(b).unwrap().complement();
                let rhs = a.complement().intersection(&b.complement()).unwrap();
                assert_eq!(lhs, rhs);
                let lhs = a.intersection(b).unwrap().complement();
                let rhs = a.complement().union(&b.complement()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn restrict_keeps_inner_atoms() {
        let full = AtomSet::full(4);
        assert_eq!(full.restrict(m("12")), set(4, &[m("12")]));
        assert_eq!(full.restrict(0b1111), full);
    }

    #[test]
    fn formal_combine_examples() {
        let a = FormalSum::from_set(&AtomSet::full(4));
        assert!(FormalSum::combine(&a, &a, 1, -1).unwrap().is_empty());

        let b12 = Atom::new(m("12")).unwrap();
        let two = FormalSum::atom(4, b12, 2);
        let one = FormalSum::atom(4, b12, 1);
        assert_eq!(FormalSum::combine(&two, &one, 1, 1).unwrap().coeff(b12), 3);

        let dx = set(
            4,
            &[
                m("12"),
                m("14"),
                m("23"),
                m("34"),
                m("123"),
                m("124"),
                m("134"),
                m("234"),
                m("1234"),
            ],
        );
        let dy = set(
            4,
            &[
                m("13"),
                m("14"),
                m("23"),
                m("24"),
                m("123"),
                m("124"),
                m("134"),
                m("234"),
                m("1234"),
            ],
        );
        let sum =
            FormalSum::combine(&FormalSum::from_set(&dx), &FormalSum::from_set(&dy), 1, 1).unwrap();
        let union = FormalSum::from_set(&dx.union(&dy).unwrap());
        let ie = FormalSum::combine(&sum, &union, 1, -1).unwrap();
        assert_eq!(ie, FormalSum::from_set(&dx.intersection(&dy).unwrap()));
        assert!(FormalSum::combine(&ie, &FormalSum::zero(3), 1, 1).is_err());
    }

    #[test]
    fn set_sum_round_trip() {
        let s = set(5, &[0b11, 0b10101, 0b11111, 0b11000]);
        assert_eq!(FormalSum::from_set(&s).to_set().unwrap(), s);
        assert!(FormalSum::from_set(&s).scaled(2).to_set().is_none());
    }

    #[test]
    fn render_formal_sum() {
        let space = OutcomeSpace::new(["a", "b", "c", "d"], &[0.25; 4]).unwrap();
        let z = FormalSum::from_terms(
            4,
            [
                (Atom::new(0b1001).unwrap(), 2),
                (Atom::new(0b0011).unwrap(), 1),
                (Atom::new(0b0111).unwrap(), -1),
            ],
        );
        assert_eq!(z.render(&space), "ab + 2*ad - abc");
        let numbered = OutcomeSpace::numbered(&[0.25; 4]).unwrap();
        let z = FormalSum::from_terms(
            4,
            [
                (Atom::new(0b0110).unwrap(), 1),
                (Atom::new(0b1001).unwrap(), 3),
            ],
        );
        assert_eq!(z.render(&numbered), "3*14 + 23");
        let multi = OutcomeSpace::new(["00", "11"], &[0.5; 2]).unwrap();
        assert_eq!(render_atom(&multi, Atom::new(0b11).unwrap()), "00,11");
    }
}
