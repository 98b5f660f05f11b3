//! Refinements of the outcome space and their action on partitions, atoms
//! and formal sums.
//!
//! A refinement splits each parent outcome into one or more child outcomes
//! of the same total weight. On atoms the binary split `ω → {a, b}` sends
//! `cω` to `ca + cb + cab`; a multi-way split is a chain of binary ones.

use crate::atoms::{Atom, AtomSet, FormalSum, Restrict};
use crate::error::{Error, Result};
use crate::measure::{mu_table, total_loss, LogBase, MuTable};
use crate::quantities::InfoSystem;
use crate::space::{check_same, full_mask, members, Mask, OutcomeSpace, Partition};

/// How multi-way splits are decomposed into binary ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitOrder {
    /// Peel one child at a time: `{c1..ck} → {c1} | {c2..ck}`.
    #[default]
    Sequential,
    /// Cut the child list in half at each step.
    Halving,
}

/// A refinement `Ω → Ω′`.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementMap {
    parent: OutcomeSpace,
    child: OutcomeSpace,
    children: Vec<Vec<usize>>,
    parent_of: Vec<usize>,
}

fn weights_agree(expected: f64, got: f64) -> bool {
    (expected - got).abs() <= 1e-12 * expected.abs() + 1e-15
}

impl RefinementMap {
    /// Builds a refinement from `(parent label, [(child label, weight)])`
    /// entries. Parents without an entry stay as they are.
    pub fn new<P, C>(parent: &OutcomeSpace, splits: &[(P, Vec<(C, f64)>)]) -> Result<Self>
    where
        P: AsRef<str>,
        C: AsRef<str>,
    {
        let mut plan: Vec<Option<&Vec<(C, f64)>>> = vec![None; parent.len()];
        for (label, kids) in splits {
            let i = parent.index_of(label.as_ref())?;
            if plan[i].is_some() {
                return Err(Error::DuplicateLabel(label.as_ref().to_string()));
            }
            if kids.is_empty() {
                return Err(Error::EmptyInput("child list"));
            }
            plan[i] = Some(kids);
        }
        let mut labels = Vec::new();
        let mut weights = Vec::new();
        let mut children = Vec::with_capacity(parent.len());
        let mut parent_of = Vec::new();
        for (i, entry) in plan.iter().enumerate() {
            let mut mine = Vec::new();
            match entry {
                None => {
                    mine.push(labels.len());
                    parent_of.push(i);
                    labels.push(parent.label(i).to_string());
                    weights.push(parent.weight(i));
                }
                Some(kids) => {
                    let sum: f64 = kids.iter().map(|(_, w)| w).sum();
                    if !weights_agree(parent.weight(i), sum) {
                        return Err(Error::WeightMismatch {
                            label: parent.label(i).to_string(),
                            expected: parent.weight(i),
                            got: sum,
                        });
                    }
                    for (label, w) in kids.iter() {
                        mine.push(labels.len());
                        parent_of.push(i);
                        labels.push(label.as_ref().to_string());
                        weights.push(*w);
                    }
                }
            }
            children.push(mine);
        }
        let child = OutcomeSpace::new(labels, &weights)?;
        Ok(Self {
            parent: parent.clone(),
            child,
            children,
            parent_of,
        })
    }

    pub fn identity(space: &OutcomeSpace) -> Self {
        let n = space.len();
        Self {
            parent: space.clone(),
            child: space.clone(),
            children: (0..n).map(|i| vec![i]).collect(),
            parent_of: (0..n).collect(),
        }
    }

    pub fn parent(&self) -> &OutcomeSpace {
        &self.parent
    }

    pub fn child(&self) -> &OutcomeSpace {
        &self.child
    }

    /// Child outcomes of each parent outcome, in order.
    pub fn children(&self) -> &[Vec<usize>] {
        &self.children
    }

    pub fn parent_of(&self, child: usize) -> usize {
        self.parent_of[child]
    }

    pub fn is_identity(&self) -> bool {
        self.children.iter().all(|c| c.len() == 1)
    }

    /// `self` followed by `next`; each parent's children are the
    /// concatenated grandchildren.
    pub fn compose(&self, next: &RefinementMap) -> Result<RefinementMap> {
        if self.child.labels() != next.parent.labels() {
            return Err(Error::NoCommonRefinement);
        }
        let children: Vec<Vec<usize>> = self
            .children
            .iter()
            .map(|kids| {
                kids.iter()
                    .flat_map(|&c| next.children[c].iter().copied())
                    .collect()
            })
            .collect();
        let mut parent_of = vec![0; next.child.len()];
        for (p, kids) in children.iter().enumerate() {
            for &c in kids {
                parent_of[c] = p;
            }
        }
        Ok(RefinementMap {
            parent: self.parent.clone(),
            child: next.child.clone(),
            children,
            parent_of,
        })
    }

    fn group(&self, parent: usize) -> Mask {
        self.children[parent].iter().fold(0, |m, &c| m | 1 << c)
    }

    /// `φ(S)`: every parent outcome replaced by all of its children.
    pub fn map_mask(&self, mask: Mask) -> Mask {
        members(mask).fold(0, |m, i| m | self.group(i))
    }

    /// Maps a list of disjoint parent masks, as from [`Partition::restrict`].
    pub fn map_blocks(&self, blocks: &[Mask]) -> Vec<Mask> {
        blocks.iter().map(|&b| self.map_mask(b)).collect()
    }

    pub fn map_partition(&self, p: &Partition) -> Result<Partition> {
        check_same(self.parent.len(), p.outcomes())?;
        Partition::from_masks(self.child.len(), self.map_blocks(p.blocks()))
    }

    /// Lifts a parent variable system along the map.
    pub fn map_system(&self, system: &InfoSystem) -> Result<InfoSystem> {
        check_same(self.parent.len(), system.space().len())?;
        let vars = system
            .variables()
            .iter()
            .map(|(n, p)| Ok((n.clone(), self.map_partition(p)?)))
            .collect::<Result<_>>()?;
        Ok(InfoSystem::new(self.child.clone(), vars)?.with_base(system.base()))
    }

    /// `φ` on ℤΔΩ by successive binary splits.
    pub fn map_formal_sum(&self, z: &FormalSum) -> Result<FormalSum> {
        self.map_formal_sum_with(z, SplitOrder::default())
    }

    pub fn map_formal_sum_with(&self, z: &FormalSum, order: SplitOrder) -> Result<FormalSum> {
        check_same(self.parent.len(), z.outcomes())?;
        let mut out = FormalSum::zero(self.child.len());
        for (atom, coeff) in z.terms() {
            let mut terms = vec![self.map_mask(atom.mask())];
            for i in atom.members() {
                split_group(&mut terms, &self.children[i], order);
            }
            for t in terms {
                let a = Atom::new(t).expect("images of atoms keep at least two outcomes");
                out.add_term(a, coeff);
            }
        }
        Ok(out)
    }

    /// Closed form of the expansion: an atom maps to every child set that
    /// meets the children of each of its members and nothing else.
    pub fn map_formal_sum_closed(&self, z: &FormalSum) -> Result<FormalSum> {
        check_same(self.parent.len(), z.outcomes())?;
        let mut out = FormalSum::zero(self.child.len());
        for (atom, coeff) in z.terms() {
            let groups: Vec<Mask> = atom.members().map(|i| self.group(i)).collect();
            let image = self.map_mask(atom.mask());
            let mut sub = image;
            loop {
                if groups.iter().all(|&g| sub & g != 0) {
                    out.add_term(Atom::new(sub).expect("meets at least two groups"), coeff);
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & image;
            }
        }
        Ok(out)
    }

    /// `ψ` on atom sets: support of the expanded indicator sum.
    pub fn map_atom_set(&self, s: &AtomSet) -> Result<AtomSet> {
        Ok(self.map_formal_sum(&FormalSum::from_set(s))?.support())
    }

    /// μ tables of parent and child, for invariance checks.
    pub fn tables(&self, base: LogBase) -> (MuTable, MuTable) {
        (mu_table(&self.parent, base), mu_table(&self.child, base))
    }
}

/// Builds a refinement; see [`RefinementMap::new`].
pub fn refine_space<P, C>(
    space: &OutcomeSpace,
    splits: &[(P, Vec<(C, f64)>)],
) -> Result<RefinementMap>
where
    P: AsRef<str>,
    C: AsRef<str>,
{
    RefinementMap::new(space, splits)
}

/// Drops the atoms that leave `outcomes`.
pub fn restrict<T: Restrict>(z: &T, outcomes: Mask) -> T {
    z.restrict_to(outcomes)
}

/// Splits the all-or-nothing group `kids` down to single children inside
/// every term. Terms either contain the whole group or none of it.
fn split_group(terms: &mut Vec<Mask>, kids: &[usize], order: SplitOrder) {
    if kids.len() < 2 {
        return;
    }
    let cut = match order {
        SplitOrder::Sequential => 1,
        SplitOrder::Halving => kids.len() / 2,
    };
    let (left, right) = kids.split_at(cut);
    let mask = |ks: &[usize]| ks.iter().fold(0 as Mask, |m, &c| m | 1 << c);
    let (g, g1, g2) = (mask(kids), mask(left), mask(right));
    let mut next = Vec::with_capacity(terms.len() * 3);
    for &t in terms.iter() {
        if t & g == 0 {
            next.push(t);
        } else {
            let rest = t & !g;
            next.extend([rest | g1, rest | g2, t]);
        }
    }
    *terms = next;
    split_group(terms, left, order);
    split_group(terms, right, order);
}

/// `s1 ∼ s2`: equal images in a shared refinement.
pub fn equivalent_under_refinement(
    s1: &AtomSet,
    map1: &RefinementMap,
    s2: &AtomSet,
    map2: &RefinementMap,
) -> Result<bool> {
    if map1.child != map2.child {
        return Err(Error::NoCommonRefinement);
    }
    Ok(map1.map_atom_set(s1)? == map2.map_atom_set(s2)?)
}

/// Atoms inside the union of `parts` that meet at least two of them.
pub fn star(n: usize, parts: &[Mask]) -> Result<AtomSet> {
    if parts.len() < 2 {
        return Err(Error::EmptyInput("star needs at least two parts"));
    }
    let mut seen: Mask = 0;
    for &p in parts {
        if p & seen != 0 || p & !full_mask(n) != 0 {
            return Err(Error::OverlappingParts);
        }
        seen |= p;
    }
    Ok(crate::quantities::content_of_blocks(n, parts))
}

/// One piece of a micro-macro decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPart {
    pub label: String,
    pub atoms: AtomSet,
    pub measure: f64,
}

/// Splits `region` into the atoms inside each subsystem and the atoms
/// between subsystems. The parts are disjoint and cover `region`.
pub fn micro_macro_split(
    system: &InfoSystem,
    region: &AtomSet,
    subsystems: &Partition,
) -> Result<Vec<RegionPart>> {
    let space = system.space();
    check_same(space.len(), region.outcomes())?;
    check_same(space.len(), subsystems.outcomes())?;
    let mut parts = Vec::with_capacity(subsystems.len() + 1);
    for &block in subsystems.blocks() {
        let atoms = region.restrict(block);
        let labels: Vec<&str> = members(block).map(|i| space.label(i)).collect();
        parts.push(RegionPart {
            label: format!("inside {{{}}}", labels.join(",")),
            measure: system.measure(&atoms)?,
            atoms,
        });
    }
    if subsystems.len() > 1 {
        let atoms = region.intersection(&star(space.len(), subsystems.blocks())?)?;
        parts.push(RegionPart {
            label: "between".into(),
            measure: system.measure(&atoms)?,
            atoms,
        });
    }
    Ok(parts)
}

/// Largest bin count for which the atom tables are summed directly.
pub const KL_TABLE_LIMIT: usize = 16;

/// `μ(ΔM) − μ(ΔX)` for a discretisation `X` against the uniform `M` on the
/// same bins, i.e. the divergence of `X` from uniform.
///
/// Both contents are the full `ΔΩ` of their bins; up to
/// [`KL_TABLE_LIMIT`] bins they are measured from the μ tables, above it
/// from `L(Ω) − Σ L({ω})`, which is the same total.
pub fn kl_via_measure(x_weights: &[f64], n_bins: usize, base: LogBase) -> Result<f64> {
    if x_weights.len() != n_bins {
        return Err(Error::BinCount {
            expected: n_bins,
            got: x_weights.len(),
        });
    }
    // validates the weights for every bin count
    total_loss(x_weights, base)?;
    let total: f64 = x_weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(total));
    }
    let uniform = vec![1.0 / n_bins as f64; n_bins];
    let full_content = |weights: &[f64]| -> Result<f64> {
        if n_bins <= KL_TABLE_LIMIT {
            let space = OutcomeSpace::numbered(weights)?;
            mu_table(&space, base).measure_set(&AtomSet::full(n_bins))
        } else {
            total_loss(weights, base)
        }
    };
    Ok(full_content(&uniform)? - full_content(x_weights)?)
}
