//! Canonical example systems and the `R_n` upper-set discriminator.

use std::fmt;
use std::str::FromStr;

use crate::atoms::AtomSet;
use crate::error::{Error, Result};
use crate::quantities::InfoSystem;
use crate::space::{OutcomeSpace, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CanonicalSystemName {
    Dyadic,
    Triadic,
    Xor,
    RedundantPair,
}

impl CanonicalSystemName {
    pub const ALL: [CanonicalSystemName; 4] = [
        CanonicalSystemName::Dyadic,
        CanonicalSystemName::Triadic,
        CanonicalSystemName::Xor,
        CanonicalSystemName::RedundantPair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CanonicalSystemName::Dyadic => "dyadic",
            CanonicalSystemName::Triadic => "triadic",
            CanonicalSystemName::Xor => "xor",
            CanonicalSystemName::RedundantPair => "redundant_pair",
        }
    }

    /// Variables of the system, in order.
    pub fn variables(self) -> &'static [&'static str] {
        match self {
            CanonicalSystemName::RedundantPair => &["X", "Y"],
            _ => &["X", "Y", "Z"],
        }
    }
}

impl FromStr for CanonicalSystemName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CanonicalSystemName::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| Error::UnknownSystem(s.to_string()))
    }
}

impl fmt::Display for CanonicalSystemName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct CanonicalSystem {
    pub name: CanonicalSystemName,
    pub system: InfoSystem,
}

/// Builds a system from equiprobable joint symbol tuples. Each outcome is
/// labelled with the concatenated symbols; variable `k` is partitioned by
/// its symbol.
fn from_tuples(names: &[&str], tuples: &[Vec<String>]) -> Result<InfoSystem> {
    let labels: Vec<String> = tuples.iter().map(|t| t.concat()).collect();
    let weights = vec![1.0 / tuples.len() as f64; tuples.len()];
    let space = OutcomeSpace::new(labels, &weights)?;
    let vars = names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let symbols: Vec<&str> = tuples.iter().map(|t| t[k].as_str()).collect();
            (name.to_string(), Partition::from_labels(&symbols))
        })
        .collect();
    InfoSystem::new(space, vars)
}

fn bits(n: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..1u32 << n).map(move |v| (0..n).rev().map(|i| (v >> i & 1) as u8).collect())
}

fn pair(a: u8, b: u8) -> String {
    format!("{a}{b}")
}

pub fn build_canonical_system(name: CanonicalSystemName) -> Result<CanonicalSystem> {
    let xyz = ["X", "Y", "Z"];
    let system = match name {
        CanonicalSystemName::Dyadic => {
            let tuples: Vec<Vec<String>> = bits(3)
                .map(|b| {
                    let (a, b, c) = (b[0], b[1], b[2]);
                    vec![pair(a, b), pair(b, c), pair(c, a)]
                })
                .collect();
            from_tuples(&xyz, &tuples)?
        }
        CanonicalSystemName::Triadic => {
            let tuples: Vec<Vec<String>> = bits(3)
                .map(|b| {
                    let (s, u, v) = (b[0], b[1], b[2]);
                    vec![pair(s, u), pair(s, v), pair(s, u ^ v)]
                })
                .collect();
            from_tuples(&xyz, &tuples)?
        }
        CanonicalSystemName::Xor => {
            let tuples: Vec<Vec<String>> = bits(2)
                .map(|b| {
                    vec![
                        b[0].to_string(),
                        b[1].to_string(),
                        (b[0] ^ b[1]).to_string(),
                    ]
                })
                .collect();
            from_tuples(&xyz, &tuples)?
        }
        CanonicalSystemName::RedundantPair => {
            let space = OutcomeSpace::new(["00", "11"], &[0.5, 0.5])?;
            let id = Partition::singletons(2);
            InfoSystem::new(space, vec![("X".into(), id.clone()), ("Y".into(), id)])?
        }
    };
    Ok(CanonicalSystem { name, system })
}

/// `R_n(c)`: atoms of `c` containing some degree-`n` atom of `c`.
///
/// Marks the degree-`n` members and spreads the marks upward with an OR
/// superset transform, so the cost is `O(N·2^N)`.
pub fn upper_set(c: &AtomSet, n: u32) -> AtomSet {
    let outcomes = c.outcomes();
    let size = 1usize << outcomes;
    let mut reach = vec![false; size];
    for a in c.iter().filter(|a| a.degree() == n) {
        reach[a.mask() as usize] = true;
    }
    for bit in 0..outcomes {
        let b = 1usize << bit;
        for m in 0..size {
            if m & b != 0 && reach[m ^ b] {
                reach[m] = true;
            }
        }
    }
    AtomSet::from_fn(outcomes, |a| reach[a.mask() as usize] && c.contains(a))
}

/// `μ(R_2(∩_i ΔX_i))`.
pub fn discriminate(system: &InfoSystem, vars: &[&str]) -> Result<f64> {
    if vars.len() < 2 {
        return Err(Error::Arity {
            kind: "discriminate".into(),
            expected: "at least 2",
            got: vars.len(),
        });
    }
    let mut meet = system.content_of(vars[0])?;
    for v in &vars[1..] {
        meet = meet.intersection(&system.content_of(v)?)?;
    }
    system.measure(&upper_set(&meet, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantities::{quantity, QuantityKind};

    fn sys(name: CanonicalSystemName) -> InfoSystem {
        build_canonical_system(name).unwrap().system
    }

    #[test]
    fn names_round_trip() {
        for n in CanonicalSystemName::ALL {
            assert_eq!(n.name().parse::<CanonicalSystemName>().unwrap(), n);
        }
        assert!(matches!(
            "tetradic".parse::<CanonicalSystemName>(),
            Err(Error::UnknownSystem(_))
        ));
    }

    #[test]
    fn dyadic_entropies() {
        let s = sys(CanonicalSystemName::Dyadic);
        assert_eq!(s.space().len(), 8);
        assert!(s.space().labels().iter().all(|l| l.len() == 6));
        for v in ["X", "Y", "Z"] {
            assert!((quantity(&s, QuantityKind::Entropy, &[v]).unwrap() - 2.0).abs() < 1e-9);
        }
        let joint = quantity(&s, QuantityKind::JointEntropy, &["X", "Y", "Z"]).unwrap();
        assert!((joint - 3.0).abs() < 1e-9);
    }

    #[test]
    fn xor_co_information() {
        let s = sys(CanonicalSystemName::Xor);
        assert_eq!(s.space().labels(), ["000", "011", "101", "110"]);
        let co = quantity(&s, QuantityKind::CoInformation, &["X", "Y", "Z"]).unwrap();
        assert!((co + 1.0).abs() < 1e-9);
    }

    #[test]
    fn upper_set_examples() {
        let high = AtomSet::from_fn(4, |a| a.degree() >= 3);
        assert!(upper_set(&high, 2).is_empty());
        assert_eq!(upper_set(&AtomSet::full(4), 2), AtomSet::full(4));
        let one = AtomSet::from_masks(4, [0b0011, 0b0111, 0b1100 | 0b0001]);
        assert_eq!(upper_set(&one, 2), AtomSet::from_masks(4, [0b0011, 0b0111]));
    }

    #[test]
    fn discriminate_examples() {
        let dy = discriminate(&sys(CanonicalSystemName::Dyadic), &["X", "Y", "Z"]).unwrap();
        let tri = discriminate(&sys(CanonicalSystemName::Triadic), &["X", "Y", "Z"]).unwrap();
        assert!(dy.abs() < 1e-9, "{dy}");
        assert!((tri - 1.0).abs() < 1e-9, "{tri}");
        let red = discriminate(&sys(CanonicalSystemName::RedundantPair), &["X", "Y"]).unwrap();
        assert!((red - 1.0).abs() < 1e-12);
        assert!(discriminate(&sys(CanonicalSystemName::Xor), &["X"]).is_err());
    }
}
