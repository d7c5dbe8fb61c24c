//! Multisets and plain subsets over a labelled ground set.
//!
//! A multiset `f` over `X` is written multiplicatively as a product of atom
//! powers, `a^2 b c`, with `1` for the empty multiset. Ground sets are
//! explicit and ordered so that every enumeration is reproducible.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultisetError {
    #[error("multisets live over different ground sets")]
    GroundMismatch,
    #[error("{dividend} is not divisible by {divisor}")]
    NotDivisible { dividend: String, divisor: String },
    #[error("atom {0:?} is not in the ground set")]
    UnknownAtom(String),
    #[error("cannot choose {k} elements from a {n}-element set")]
    SizeOutOfRange { n: usize, k: usize },
    #[error("malformed multiset term {0:?}")]
    Malformed(String),
}

/// An ordered ground set of atom labels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ground(Arc<[String]>);

impl Ground {
    pub fn new<I>(labels: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<String>,
    {
        Ground(labels.into_iter().map(Into::into).collect())
    }

    /// Atoms `1, 2, ..., n`.
    pub fn numbered(n: usize) -> Self {
        Ground::new((1..=n).map(|i| i.to_string()))
    }

    /// Atoms `a, b, c, ...`; at most 26 of them.
    pub fn letters(n: usize) -> Self {
        assert!(n <= 26, "at most 26 letter atoms");
        Ground::new((0..n).map(|i| char::from(b'a' + i as u8).to_string()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn label(&self, atom: usize) -> &str {
        &self.0[atom]
    }

    pub fn atom(&self, label: &str) -> Option<usize> {
        self.0.iter().position(|l| l == label)
    }

    pub fn labels(&self) -> &[String] {
        &self.0
    }
}

impl fmt::Debug for Ground {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// A finite multiset over a [`Ground`]. Zero multiplicities are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Multiset {
    ground: Ground,
    counts: BTreeMap<usize, u32>,
}

impl Multiset {
    /// The empty multiset `1`.
    pub fn one(ground: &Ground) -> Self {
        Multiset { ground: ground.clone(), counts: BTreeMap::new() }
    }

    /// Builds a multiset from a count per atom (missing trailing atoms count 0).
    pub fn from_counts(ground: &Ground, counts: &[u32]) -> Self {
        assert!(counts.len() <= ground.len());
        Multiset {
            ground: ground.clone(),
            counts: counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(a, &c)| (a, c))
                .collect(),
        }
    }

    /// `atom^power`.
    pub fn power(ground: &Ground, atom: usize, power: u32) -> Self {
        assert!(atom < ground.len());
        let mut f = Multiset::one(ground);
        if power > 0 {
            f.counts.insert(atom, power);
        }
        f
    }

    /// Parses `a^2 b c` (whitespace-separated terms; `1` is the empty product).
    pub fn parse(ground: &Ground, text: &str) -> Result<Self, MultisetError> {
        let mut f = Multiset::one(ground);
        for term in text.split_whitespace() {
            if term == "1" && ground.atom("1").is_none() {
                continue;
            }
            let (label, power) = match term.split_once('^') {
                Some((label, p)) => {
                    let p: u32 = p.parse().map_err(|_| MultisetError::Malformed(term.into()))?;
                    (label, p)
                }
                None => (term, 1),
            };
            let atom =
                ground.atom(label).ok_or_else(|| MultisetError::UnknownAtom(label.to_string()))?;
            if power > 0 {
                *f.counts.entry(atom).or_insert(0) += power;
            }
        }
        Ok(f)
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    /// Multiplicity of `atom` (0 when absent).
    pub fn count(&self, atom: usize) -> u32 {
        self.counts.get(&atom).copied().unwrap_or(0)
    }

    /// `|f|`, the sum of all multiplicities.
    pub fn cardinality(&self) -> usize {
        self.counts.values().map(|&c| c as usize).sum()
    }

    /// Atoms with positive multiplicity, in ground order.
    pub fn support(&self) -> Vec<usize> {
        self.counts.keys().copied().collect()
    }

    /// The atoms of `f` listed with repetition, in ground order.
    pub fn word(&self) -> Vec<usize> {
        self.counts.iter().flat_map(|(&a, &c)| std::iter::repeat_n(a, c as usize)).collect()
    }

    /// `f · g`.
    pub fn mul(&self, other: &Multiset) -> Result<Multiset, MultisetError> {
        if self.ground != other.ground {
            return Err(MultisetError::GroundMismatch);
        }
        let mut counts = self.counts.clone();
        for (&a, &c) in &other.counts {
            *counts.entry(a).or_insert(0) += c;
        }
        Ok(Multiset { ground: self.ground.clone(), counts })
    }

    /// `f / g`, defined when `g(x) <= f(x)` for every atom.
    pub fn divide(&self, divisor: &Multiset) -> Result<Multiset, MultisetError> {
        if self.ground != divisor.ground {
            return Err(MultisetError::GroundMismatch);
        }
        let mut counts = self.counts.clone();
        for (&a, &c) in &divisor.counts {
            match counts.get_mut(&a) {
                Some(have) if *have >= c => {
                    *have -= c;
                    if *have == 0 {
                        counts.remove(&a);
                    }
                }
                _ => {
                    return Err(MultisetError::NotDivisible {
                        dividend: self.to_string(),
                        divisor: divisor.to_string(),
                    })
                }
            }
        }
        Ok(Multiset { ground: self.ground.clone(), counts })
    }

    /// The largest `s` with `f = atom^s g`; this is just `f(atom)`.
    pub fn degree(&self, atom_label: &str) -> Result<u32, MultisetError> {
        let atom = self
            .ground
            .atom(atom_label)
            .ok_or_else(|| MultisetError::UnknownAtom(atom_label.to_string()))?;
        Ok(self.count(atom))
    }

    /// Juxtaposed form without spaces, e.g. `a^2bc`; `1` when empty.
    ///
    /// Unambiguous only when every label is a single character.
    pub fn compact(&self) -> String {
        if self.counts.is_empty() {
            return "1".to_string();
        }
        let mut out = String::new();
        for (&a, &c) in &self.counts {
            out.push_str(self.ground.label(a));
            if c > 1 {
                out.push('^');
                out.push_str(&c.to_string());
            }
        }
        out
    }
}

impl Ord for Multiset {
    /// Lexicographic order on the sorted atom word, so `a^2 < ab < b^2`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.word().cmp(&other.word())
    }
}

impl PartialOrd for Multiset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        for (&a, &c) in &self.counts {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            f.write_str(self.ground.label(a))?;
            if c > 1 {
                write!(f, "^{c}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multiset({self})")
    }
}

/// All `k`-element multisets over `ground`, strictly increasing in the
/// order of [`Multiset`]'s `Ord`.
pub fn enumerate_multisets(ground: &Ground, k: usize) -> Vec<Multiset> {
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(k);
    if ground.is_empty() {
        if k == 0 {
            out.push(Multiset::one(ground));
        }
        return out;
    }
    fn rec(ground: &Ground, k: usize, from: usize, word: &mut Vec<usize>, out: &mut Vec<Multiset>) {
        if word.len() == k {
            let mut counts = vec![0u32; ground.len()];
            for &a in word.iter() {
                counts[a] += 1;
            }
            out.push(Multiset::from_counts(ground, &counts));
            return;
        }
        for a in from..ground.len() {
            word.push(a);
            rec(ground, k, a, word, out);
            word.pop();
        }
    }
    rec(ground, k, 0, &mut word, &mut out);
    out
}

/// A `k`-subset of a ground set, stored sorted.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KSubset {
    ground: Ground,
    members: Vec<usize>,
}

impl KSubset {
    pub fn new(ground: &Ground, mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        assert!(members.iter().all(|&a| a < ground.len()));
        KSubset { ground: ground.clone(), members }
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.members.binary_search(&atom).is_ok()
    }

    /// Complement within the ground set.
    pub fn complement(&self) -> KSubset {
        let members = (0..self.ground.len()).filter(|a| !self.contains(*a)).collect();
        KSubset { ground: self.ground.clone(), members }
    }

    pub fn intersection_size(&self, other: &KSubset) -> usize {
        self.members.iter().filter(|a| other.contains(**a)).count()
    }

    pub fn is_subset_of(&self, other: &KSubset) -> bool {
        self.members.iter().all(|a| other.contains(*a))
    }

    /// Same subset with `atom` removed.
    pub fn without(&self, atom: usize) -> KSubset {
        KSubset {
            ground: self.ground.clone(),
            members: self.members.iter().copied().filter(|&a| a != atom).collect(),
        }
    }
}

impl Ord for KSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.members.cmp(&other.members)
    }
}

impl PartialOrd for KSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for KSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, &a) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(self.ground.label(a))?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for KSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KSubset{self}")
    }
}

/// All `k`-subsets of `ground` in lexicographic order.
pub fn enumerate_subsets(ground: &Ground, k: usize) -> Result<Vec<KSubset>, MultisetError> {
    let n = ground.len();
    if k > n {
        return Err(MultisetError::SizeOutOfRange { n, k });
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(KSubset { ground: ground.clone(), members: cur.clone() });
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if cur[i] < n - k + i {
                break;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
