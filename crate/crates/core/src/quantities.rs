//! Variable contents ΔX and the information quantities built from them.
//!
//! The content of a variable is the set of atoms whose outcomes fall into at
//! least two of its blocks. Regions of an I-diagram are evaluated by
//! substituting contents for set-variables and measuring the result with the
//! μ table of the system.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::atoms::{AtomSet, FormalSum};
use crate::error::{Error, Result};
use crate::measure::{entropy_partition_law, LogBase, MuTable};
use crate::space::{check_same, full_mask, members, Mask, OutcomeSpace, Partition};

/// Atoms that cross at least two of `blocks`, restricted to their union.
///
/// With `blocks` a partition of Ω this is the content of that partition; with
/// a partition of a subset `S` it is the content of the restricted variable.
pub fn content_of_blocks(n: usize, blocks: &[Mask]) -> AtomSet {
    let universe: Mask = blocks.iter().fold(0, |a, &b| a | b);
    let mut owner = vec![0 as Mask; n];
    for &b in blocks {
        for i in members(b) {
            owner[i] = b;
        }
    }
    AtomSet::from_fn(n, |a| {
        let m = a.mask();
        m & !universe == 0 && m & !owner[m.trailing_zeros() as usize] != 0
    })
}

/// ΔX: the atoms crossing a boundary of `x`.
pub fn content(x: &Partition) -> AtomSet {
    content_of_blocks(x.outcomes(), x.blocks())
}

/// An outcome space with named variables and a lazily built μ table.
#[derive(Debug, Clone)]
pub struct InfoSystem {
    space: OutcomeSpace,
    variables: Vec<(String, Partition)>,
    base: LogBase,
    table: OnceLock<Arc<MuTable>>,
}

impl InfoSystem {
    pub fn new(space: OutcomeSpace, variables: Vec<(String, Partition)>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for (name, p) in &variables {
            check_same(space.len(), p.outcomes())?;
            if !names.insert(name.as_str()) {
                return Err(Error::DuplicateVariable(name.clone()));
            }
        }
        Ok(Self {
            space,
            variables,
            base: LogBase::BITS,
            table: OnceLock::new(),
        })
    }

    pub fn with_base(mut self, base: LogBase) -> Self {
        if base != self.base {
            self.base = base;
            self.table = OnceLock::new();
        }
        self
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn base(&self) -> LogBase {
        self.base
    }

    pub fn variables(&self) -> &[(String, Partition)] {
        &self.variables
    }

    pub fn variable(&self, name: &str) -> Result<&Partition> {
        self.variables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn content_of(&self, name: &str) -> Result<AtomSet> {
        self.variable(name).map(content)
    }

    /// The μ table, computed on first use.
    pub fn table(&self) -> &MuTable {
        self.table
            .get_or_init(|| Arc::new(MuTable::new(&self.space, self.base)))
    }

    pub fn measure(&self, set: &AtomSet) -> Result<f64> {
        self.table().measure_set(set)
    }

    pub fn measure_sum(&self, z: &FormalSum) -> Result<f64> {
        self.table().measure_sum(z)
    }

    /// Joint variable of the named variables (trivial for an empty list).
    pub fn joint(&self, names: &[&str]) -> Result<Partition> {
        if names.is_empty() {
            return Ok(Partition::trivial(self.space.len()));
        }
        let parts: Vec<Partition> = names
            .iter()
            .map(|n| self.variable(n).cloned())
            .collect::<Result<_>>()?;
        Partition::join_all(&parts)
    }

    /// Entropy of the joint variable from block weights alone.
    pub fn direct_entropy(&self, names: &[&str]) -> Result<f64> {
        let joint = self.joint(names)?;
        entropy_partition_law(&self.space, &joint, self.base)
    }
}

/// Set expression over variable names.
///
/// Grammar, loosest binding first:
///
/// ```text
/// expr   := term (('∪' | '|' | '\' | '-') term)*
/// term   := factor (('∩' | '&') factor)*
/// factor := NAME | '(' expr ')'
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetExpr {
    Var(String),
    Union(Box<SetExpr>, Box<SetExpr>),
    Intersection(Box<SetExpr>, Box<SetExpr>),
    Difference(Box<SetExpr>, Box<SetExpr>),
}

impl SetExpr {
    pub fn var(name: &str) -> Self {
        SetExpr::Var(name.to_string())
    }

    pub fn union(self, other: SetExpr) -> Self {
        SetExpr::Union(Box::new(self), Box::new(other))
    }

    pub fn intersect(self, other: SetExpr) -> Self {
        SetExpr::Intersection(Box::new(self), Box::new(other))
    }

    pub fn minus(self, other: SetExpr) -> Self {
        SetExpr::Difference(Box::new(self), Box::new(other))
    }

    /// Variable names in order of first appearance.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            SetExpr::Var(n) => {
                if !out.contains(&n.as_str()) {
                    out.push(n)
                }
            }
            SetExpr::Union(a, b) | SetExpr::Intersection(a, b) | SetExpr::Difference(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetExpr::Var(n) => write!(f, "{n}"),
            SetExpr::Union(a, b) => write!(f, "({a} ∪ {b})"),
            SetExpr::Intersection(a, b) => write!(f, "({a} ∩ {b})"),
            SetExpr::Difference(a, b) => write!(f, "({a} \\ {b})"),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, want: char) -> bool {
        if self.peek() == Some(want) {
            self.pos += want.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        if self.eat(want) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{want}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let len: usize = self
            .rest()
            .chars()
            .take_while(|c| c.is_alphanumeric() || *c == '_' || *c == '\'')
            .map(char::len_utf8)
            .sum();
        if len == 0 {
            return Err(self.error("expected a variable name".into()));
        }
        let name = self.rest()[..len].to_string();
        self.pos += len;
        Ok(name)
    }

    fn integer(&mut self) -> Option<i64> {
        self.skip_ws();
        let len = self.rest().chars().take_while(char::is_ascii_digit).count();
        if len == 0 {
            return None;
        }
        let v = self.rest()[..len].parse().ok()?;
        self.pos += len;
        Some(v)
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn error(&self, message: String) -> Error {
        Error::Parse {
            input: self.src.to_string(),
            offset: self.pos,
            message,
        }
    }
}

impl FromStr for SetExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lx = Lexer::new(s);
        let e = parse_set_expr(&mut lx)?;
        if !lx.at_end() {
            return Err(lx.error("unexpected trailing input".into()));
        }
        Ok(e)
    }
}

fn parse_set_expr(lx: &mut Lexer) -> Result<SetExpr> {
    let mut left = parse_set_term(lx)?;
    loop {
        match lx.peek() {
            Some('∪' | '|') => {
                lx.bump();
                left = left.union(parse_set_term(lx)?);
            }
            Some('\\' | '-') => {
                lx.bump();
                left = left.minus(parse_set_term(lx)?);
            }
            _ => return Ok(left),
        }
    }
}

fn parse_set_term(lx: &mut Lexer) -> Result<SetExpr> {
    let mut left = parse_set_factor(lx)?;
    while matches!(lx.peek(), Some('∩' | '&')) {
        lx.bump();
        left = left.intersect(parse_set_factor(lx)?);
    }
    Ok(left)
}

fn parse_set_factor(lx: &mut Lexer) -> Result<SetExpr> {
    if lx.eat('(') {
        let e = parse_set_expr(lx)?;
        lx.expect(')')?;
        Ok(e)
    } else {
        Ok(SetExpr::Var(lx.ident()?))
    }
}

/// Evaluates a set expression with every variable replaced by its content.
pub fn eval_region(system: &InfoSystem, expr: &SetExpr) -> Result<AtomSet> {
    match expr {
        SetExpr::Var(name) => system.content_of(name),
        SetExpr::Union(a, b) => eval_region(system, a)?.union(&eval_region(system, b)?),
        SetExpr::Intersection(a, b) => {
            eval_region(system, a)?.intersection(&eval_region(system, b)?)
        }
        SetExpr::Difference(a, b) => eval_region(system, a)?.difference(&eval_region(system, b)?),
    }
}

/// Classical quantities realised as regions of ΔΩ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantityKind {
    /// `H(X)`.
    Entropy,
    /// `H(X_1, …, X_k)`.
    JointEntropy,
    /// `H(X | Y)`.
    ConditionalEntropy,
    /// `I(X; Y_1, …, Y_k)`.
    MutualInformation,
    /// `I(X; Y | Z)`.
    ConditionalMutualInformation,
    /// `I(X_1; …; X_k)`, the central region.
    CoInformation,
}

impl QuantityKind {
    pub const ALL: [QuantityKind; 6] = [
        QuantityKind::Entropy,
        QuantityKind::JointEntropy,
        QuantityKind::ConditionalEntropy,
        QuantityKind::MutualInformation,
        QuantityKind::ConditionalMutualInformation,
        QuantityKind::CoInformation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QuantityKind::Entropy => "entropy",
            QuantityKind::JointEntropy => "joint_entropy",
            QuantityKind::ConditionalEntropy => "conditional_entropy",
            QuantityKind::MutualInformation => "mutual_information",
            QuantityKind::ConditionalMutualInformation => "conditional_mutual_information",
            QuantityKind::CoInformation => "co_information",
        }
    }

    fn check_arity(self, got: usize) -> Result<()> {
        let (ok, expected) = match self {
            QuantityKind::Entropy => (got == 1, "exactly 1"),
            QuantityKind::ConditionalEntropy => (got == 2, "exactly 2"),
            QuantityKind::ConditionalMutualInformation => (got == 3, "exactly 3"),
            QuantityKind::JointEntropy
            | QuantityKind::MutualInformation
            | QuantityKind::CoInformation => (got >= 2, "at least 2"),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Arity {
                kind: self.name().to_string(),
                expected,
                got,
            })
        }
    }
}

impl FromStr for QuantityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        QuantityKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse {
                input: s.to_string(),
                offset: 0,
                message: "unknown quantity kind".into(),
            })
    }
}

impl fmt::Display for QuantityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn union_of(system: &InfoSystem, names: &[&str]) -> Result<AtomSet> {
    names
        .iter()
        .try_fold(AtomSet::empty(system.space().len()), |acc, n| {
            acc.union(&system.content_of(n)?)
        })
}

fn intersection_of(system: &InfoSystem, names: &[&str]) -> Result<AtomSet> {
    let (first, rest) = names
        .split_first()
        .ok_or(Error::EmptyInput("variable list"))?;
    rest.iter().try_fold(system.content_of(first)?, |acc, n| {
        acc.intersection(&system.content_of(n)?)
    })
}

/// The region of ΔΩ whose measure is the requested quantity.
pub fn quantity_region(system: &InfoSystem, kind: QuantityKind, vars: &[&str]) -> Result<AtomSet> {
    kind.check_arity(vars.len())?;
    match kind {
        QuantityKind::Entropy => system.content_of(vars[0]),
        QuantityKind::JointEntropy => {
            let union = union_of(system, vars)?;
            if cfg!(debug_assertions) {
                let joint = content(&system.joint(vars)?);
                debug_assert_eq!(joint, union, "joint content differs from union of contents");
            }
            Ok(union)
        }
        QuantityKind::ConditionalEntropy => system
            .content_of(vars[0])?
            .difference(&system.content_of(vars[1])?),
        QuantityKind::MutualInformation => system
            .content_of(vars[0])?
            .intersection(&union_of(system, &vars[1..])?),
        QuantityKind::ConditionalMutualInformation => {
            intersection_of(system, &vars[..2])?.difference(&system.content_of(vars[2])?)
        }
        QuantityKind::CoInformation => intersection_of(system, vars),
    }
}

/// Measures the region of a classical quantity.
pub fn quantity(system: &InfoSystem, kind: QuantityKind, vars: &[&str]) -> Result<f64> {
    let region = quantity_region(system, kind, vars)?;
    system.measure(&region)
}

/// Quantities that count atoms with multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MultiplicityKind {
    /// Total correlation `Σ H(X_i) − H(X_1..X_n)`.
    #[serde(rename = "TC")]
    TotalCorrelation,
    /// Dual total correlation `H(X_1..X_n) − Σ H(X_i | X_rest)`.
    #[serde(rename = "DTC")]
    DualTotalCorrelation,
    /// O-information `TC − DTC`.
    #[serde(rename = "O_information")]
    OInformation,
}

impl MultiplicityKind {
    pub fn name(self) -> &'static str {
        match self {
            MultiplicityKind::TotalCorrelation => "TC",
            MultiplicityKind::DualTotalCorrelation => "DTC",
            MultiplicityKind::OInformation => "O_information",
        }
    }
}

impl FromStr for MultiplicityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tc" | "total_correlation" => Ok(MultiplicityKind::TotalCorrelation),
            "dtc" | "dual_total_correlation" => Ok(MultiplicityKind::DualTotalCorrelation),
            "o_information" | "o" | "oinfo" => Ok(MultiplicityKind::OInformation),
            _ => Err(Error::Parse {
                input: s.to_string(),
                offset: 0,
                message: "unknown multiplicity kind".into(),
            }),
        }
    }
}

impl fmt::Display for MultiplicityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Element of ℤΔΩ for TC, DTC or O-information.
///
/// `DTC = [∪_{i<j} ΔX_i ∩ ΔX_j]`, `TC = Σ_i ΔX_i − ∪_i ΔX_i` and
/// `O = TC − DTC`.
pub fn multiplicity_sum(
    system: &InfoSystem,
    kind: MultiplicityKind,
    vars: &[&str],
) -> Result<FormalSum> {
    if vars.len() < 2 {
        return Err(Error::Arity {
            kind: kind.name().to_string(),
            expected: "at least 2",
            got: vars.len(),
        });
    }
    let n = system.space().len();
    let contents: Vec<AtomSet> = vars
        .iter()
        .map(|v| system.content_of(v))
        .collect::<Result<_>>()?;
    let tc = || -> Result<FormalSum> {
        let mut sum = FormalSum::zero(n);
        let mut union = AtomSet::empty(n);
        for c in &contents {
            sum = FormalSum::combine(&sum, &FormalSum::from_set(c), 1, 1)?;
            union = union.union(c)?;
        }
        FormalSum::combine(&sum, &FormalSum::from_set(&union), 1, -1)
    };
    let dtc = || -> Result<FormalSum> {
        let mut pairs = AtomSet::empty(n);
        for (i, a) in contents.iter().enumerate() {
            for b in &contents[i + 1..] {
                pairs = pairs.union(&a.intersection(b)?)?;
            }
        }
        Ok(FormalSum::from_set(&pairs))
    };
    match kind {
        MultiplicityKind::TotalCorrelation => tc(),
        MultiplicityKind::DualTotalCorrelation => dtc(),
        MultiplicityKind::OInformation => FormalSum::combine(&tc()?, &dtc()?, 1, -1),
    }
}

pub fn multiplicity_quantity(
    system: &InfoSystem,
    kind: MultiplicityKind,
    vars: &[&str],
) -> Result<f64> {
    let z = multiplicity_sum(system, kind, vars)?;
    system.measure_sum(&z)
}

/// An integer combination of joint entropies, keyed by variable set.
///
/// Parsed from strings such as `I(X;Y) - H(X|Y) + 2H(X,Y)`:
///
/// ```text
/// expr  := ['+'|'-'] term (('+'|'-') term)*
/// term  := [INT ['*']] ( 'H(' list ['|' list] ')'
///                      | 'I(' list (';' list)+ ['|' list] ')' )
/// list  := NAME (',' NAME)*
/// ```
///
/// `H(A|B)` is `H(A,B) − H(B)`; `I(A_1;…;A_k|C)` is the alternating sum
/// `Σ_T (−1)^{|T|+1} (H(T,C) − H(C))` over nonempty `T ⊆ {A_1..A_k}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EntropyExpr {
    terms: BTreeMap<BTreeSet<String>, i64>,
}

impl EntropyExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `coeff · H(vars)`.
    pub fn add_entropy<S: AsRef<str>>(&mut self, vars: &[S], coeff: i64) {
        let key: BTreeSet<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        if key.is_empty() || coeff == 0 {
            return;
        }
        let e = self.terms.entry(key.clone()).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    fn add_scaled(&mut self, other: &EntropyExpr, k: i64) {
        for (vars, &c) in &other.terms {
            let v: Vec<&String> = vars.iter().collect();
            self.add_entropy(&v, k * c);
        }
    }

    /// `(variable set, coefficient)` pairs of the desugared combination.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<&str>, i64)> + '_ {
        self.terms
            .iter()
            .map(|(k, &c)| (k.iter().map(String::as_str).collect(), c))
    }

    /// Numeric value from block weights of joint variables (no atoms).
    pub fn evaluate_direct(&self, system: &InfoSystem) -> Result<f64> {
        self.terms()
            .map(|(vars, c)| Ok(c as f64 * system.direct_entropy(&vars)?))
            .sum()
    }

    fn information(parts: &[Vec<String>], cond: &[String]) -> EntropyExpr {
        let mut e = EntropyExpr::zero();
        let k = parts.len();
        for t in 1u32..(1 << k) {
            let sign = if t.count_ones() % 2 == 1 { 1 } else { -1 };
            let mut vars: Vec<String> = cond.to_vec();
            for (i, p) in parts.iter().enumerate() {
                if t >> i & 1 == 1 {
                    vars.extend(p.iter().cloned());
                }
            }
            e.add_entropy(&vars, sign);
            e.add_entropy(cond, -sign);
        }
        e
    }
}

impl fmt::Display for EntropyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (vars, c)) in self.terms().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            match (i, c < 0) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                _ => write!(f, " {sign} ")?,
            }
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            write!(f, "H({})", vars.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for EntropyExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lx = Lexer::new(s);
        let mut out = EntropyExpr::zero();
        let mut first = true;
        loop {
            let sign = match lx.peek() {
                Some('+') => {
                    lx.bump();
                    1
                }
                Some('-' | '−') => {
                    lx.bump();
                    -1
                }
                None if !first => break,
                _ if first => 1,
                _ => return Err(lx.error("expected `+` or `-`".into())),
            };
            let coeff = lx.integer().unwrap_or(1);
            lx.eat('*');
            let term = parse_entropy_term(&mut lx)?;
            out.add_scaled(&term, sign * coeff);
            first = false;
            if lx.at_end() {
                break;
            }
        }
        Ok(out)
    }
}

fn parse_list(lx: &mut Lexer) -> Result<Vec<String>> {
    let mut names = vec![lx.ident()?];
    while lx.eat(',') {
        names.push(lx.ident()?);
    }
    Ok(names)
}

fn parse_entropy_term(lx: &mut Lexer) -> Result<EntropyExpr> {
    match lx.bump() {
        Some('H') => {
            lx.expect('(')?;
            let a = parse_list(lx)?;
            let cond = if lx.eat('|') { parse_list(lx)? } else { vec![] };
            lx.expect(')')?;
            let mut e = EntropyExpr::zero();
            let mut joint = a;
            joint.extend(cond.iter().cloned());
            e.add_entropy(&joint, 1);
            e.add_entropy(&cond, -1);
            Ok(e)
        }
        Some('I') => {
            lx.expect('(')?;
            let mut parts = vec![parse_list(lx)?];
            while lx.eat(';') {
                parts.push(parse_list(lx)?);
            }
            if parts.len() < 2 {
                return Err(lx.error("I(…) needs at least two `;`-separated arguments".into()));
            }
            let cond = if lx.eat('|') { parse_list(lx)? } else { vec![] };
            lx.expect(')')?;
            Ok(EntropyExpr::information(&parts, &cond))
        }
        _ => Err(lx.error("expected `H(` or `I(`".into())),
    }
}

/// The unique element of ℤΔΩ whose measure equals the expression for every
/// weight assignment: each `c·H(vars)` contributes `c` on every atom of the
/// joint content.
pub fn expression_to_formal_sum(system: &InfoSystem, expr: &EntropyExpr) -> Result<FormalSum> {
    let n = system.space().len();
    let mut out = FormalSum::zero(n);
    for (vars, c) in expr.terms() {
        let joint = content(&system.joint(&vars)?);
        out = FormalSum::combine(&out, &FormalSum::from_set(&joint), 1, c)?;
    }
    Ok(out)
}

/// Atoms of ΔΩ spanning `outcomes`; used by callers that work with raw masks.
pub fn atoms_within(n: usize, outcomes: Mask) -> AtomSet {
    AtomSet::full(n).restrict(outcomes & full_mask(n))
}
