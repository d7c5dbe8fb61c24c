//! Generators for the standard configuration families.
//!
//! Identifiers spell out the underlying object: subsets as `{1,3}`, the
//! lines of `G(k,m)` as `[1,2,3]`, multisets compactly as `a^2b` with `1`
//! for the empty multiset. Subset families use atoms `1..n`, multiset
//! families use letters `a, b, ...`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::binomial::checked_binomial;
use crate::glue::{validate_gluing_named, GlueError, GluingMap};
use crate::hyperplane::{reduct, restriction, HyperplaneError};
use crate::multiset::{enumerate_multisets, enumerate_subsets, Ground, KSubset, Multiset};
use crate::structure::{BinomialSignature, IncidenceStructure, Point};

/// Generators refuse to build more than this many points plus lines.
pub const MAX_ELEMENTS: u64 = 250_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("parameters out of range for {family}: {reason}")]
    OutOfRange { family: &'static str, reason: String },
    #[error("{elements} points and lines exceed the generator cap of {cap}")]
    TooLarge { elements: u64, cap: u64 },
    #[error("atom {0:?} is not in the ground set")]
    UnknownAtom(String),
    #[error("cannot parse family {0:?}")]
    Parse(String),
    #[error(transparent)]
    Hyperplane(#[from] HyperplaneError),
    #[error(transparent)]
    Glue(#[from] GlueError),
}

fn out_of_range(family: &'static str, reason: impl Into<String>) -> FamilyError {
    FamilyError::OutOfRange { family, reason: reason.into() }
}

fn guard(points: Option<u64>, lines: Option<u64>) -> Result<(), FamilyError> {
    let elements = points.zip(lines).and_then(|(p, l)| p.checked_add(l)).unwrap_or(u64::MAX);
    if elements > MAX_ELEMENTS {
        return Err(FamilyError::TooLarge { elements, cap: MAX_ELEMENTS });
    }
    Ok(())
}

fn binom(n: usize, k: usize) -> Option<u64> {
    checked_binomial(n as u64, k as u64)
}

fn assemble(point_names: Vec<String>, lines: Vec<(String, Vec<usize>)>) -> IncidenceStructure {
    let (line_names, line_points) = lines.into_iter().unzip();
    IncidenceStructure::from_indices(point_names, line_names, line_points)
        .expect("generated identifiers are valid and distinct")
}

fn subset_index(subsets: &[KSubset]) -> HashMap<Vec<usize>, usize> {
    subsets.iter().enumerate().map(|(i, s)| (s.members().to_vec(), i)).collect()
}

fn bracketed(s: &KSubset) -> String {
    let inner = s.to_string();
    format!("[{}]", &inner[1..inner.len() - 1])
}

/// `G(k,m)`: the `k`-subsets and `m`-subsets of an `(m+k-1)`-set, a point
/// on a line when they share exactly one atom. Lies in `B(k,m)`.
pub fn grassmannian_g(k: usize, m: usize) -> Result<IncidenceStructure, FamilyError> {
    if k == 0 || m == 0 {
        return Err(out_of_range("G", "k and m must be positive"));
    }
    let n = k + m - 1;
    guard(binom(n, k), binom(n, m))?;
    let ground = Ground::numbered(n);
    let points = enumerate_subsets(&ground, k).expect("k <= n");
    let index = subset_index(&points);
    let lines = enumerate_subsets(&ground, m)
        .expect("m <= n")
        .into_iter()
        .map(|line| {
            let outside = line.complement();
            let rest =
                enumerate_subsets(&Ground::numbered(outside.len()), k - 1).expect("k - 1 <= n - m");
            let mut on = Vec::new();
            for &x in line.members() {
                for s in &rest {
                    let mut members: Vec<usize> =
                        s.members().iter().map(|&i| outside.members()[i]).collect();
                    members.push(x);
                    members.sort_unstable();
                    on.push(index[&members]);
                }
            }
            (bracketed(&line), on)
        })
        .collect();
    Ok(assemble(points.iter().map(ToString::to_string).collect(), lines))
}

/// `GrasSpace(n,k)`: `k`-subsets of an `n`-set on the `(k+1)`-subsets
/// containing them. Lies in `B(n-k, k+1)`.
pub fn gras_space(n: usize, k: usize) -> Result<IncidenceStructure, FamilyError> {
    if k == 0 || k >= n {
        return Err(out_of_range("GS", "need 1 <= k <= n-1"));
    }
    gras_space_any(n, k)
}

/// [`gras_space`] allowing `k = 0`: one point `{}` on the `n` singletons.
pub(crate) fn gras_space_any(n: usize, k: usize) -> Result<IncidenceStructure, FamilyError> {
    if k >= n {
        return Err(out_of_range("GS", "need k <= n-1"));
    }
    guard(binom(n, k), binom(n, k + 1))?;
    let ground = Ground::numbered(n);
    let points = enumerate_subsets(&ground, k).expect("k <= n");
    let index = subset_index(&points);
    let lines = enumerate_subsets(&ground, k + 1)
        .expect("k + 1 <= n")
        .into_iter()
        .map(|line| {
            let on = line.members().iter().map(|&x| index[line.without(x).members()]).collect();
            (line.to_string(), on)
        })
        .collect();
    Ok(assemble(points.iter().map(ToString::to_string).collect(), lines))
}

/// `DCD(n,k)`: `k`-subsets of an `n`-set on the `(k-1)`-subsets they contain.
pub fn dcd(n: usize, k: usize) -> Result<IncidenceStructure, FamilyError> {
    if k == 0 || k > n {
        return Err(out_of_range("DCD", "need 1 <= k <= n"));
    }
    guard(binom(n, k), binom(n, k - 1))?;
    let ground = Ground::numbered(n);
    let points = enumerate_subsets(&ground, k).expect("k <= n");
    let index = subset_index(&points);
    let lines = enumerate_subsets(&ground, k - 1)
        .expect("k - 1 <= n")
        .into_iter()
        .map(|line| {
            let on = line
                .complement()
                .members()
                .iter()
                .map(|&x| {
                    let mut m = line.members().to_vec();
                    m.push(x);
                    m.sort_unstable();
                    index[&m]
                })
                .collect();
            (line.to_string(), on)
        })
        .collect();
    Ok(assemble(points.iter().map(ToString::to_string).collect(), lines))
}

/// Ground set of a Veronesian over `m` atoms.
fn letters(family: &'static str, m: usize) -> Result<Ground, FamilyError> {
    if m > 26 {
        return Err(out_of_range(family, "at most 26 atoms"));
    }
    Ok(Ground::letters(m))
}

/// `V(m,k)`: `k`-multisets over `m` atoms as points, shorter multisets as
/// lines, `f` on `e` when `f = e·x^(k-|e|)` for an atom `x`. Lies in `B(k,m)`.
pub fn veronesian(m: usize, k: usize) -> Result<IncidenceStructure, FamilyError> {
    if m == 0 || k == 0 {
        return Err(out_of_range("V", "m and k must be positive"));
    }
    guard(binom(m + k - 1, k), binom(m + k - 1, m))?;
    let ground = letters("V", m)?;
    let points = enumerate_multisets(&ground, k);
    let index: HashMap<&Multiset, usize> = points.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut lines = Vec::new();
    for size in 0..k {
        for e in enumerate_multisets(&ground, size) {
            let on = (0..m)
                .map(|x| {
                    let f = e
                        .mul(&Multiset::power(&ground, x, (k - size) as u32))
                        .expect("same ground");
                    index[&f]
                })
                .collect();
            lines.push((e.compact(), on));
        }
    }
    Ok(assemble(points.iter().map(Multiset::compact).collect(), lines))
}

/// `V*(m,k)`, the dual of `V(m,k)`. Lies in `B(m,k)`.
pub fn dual_veronesian(m: usize, k: usize) -> Result<IncidenceStructure, FamilyError> {
    if m == 0 || k == 0 {
        return Err(out_of_range("V*", "m and k must be positive"));
    }
    Ok(veronesian(m, k)?.dual())
}

/// The complete graph `K_n`: vertices `1..n`, edges `{i,j}`.
pub fn complete_graph(n: usize) -> Result<IncidenceStructure, FamilyError> {
    if n < 2 {
        return Err(out_of_range("K", "need n >= 2"));
    }
    gras_space(n, 1).map(|g| {
        g.renamed(|p| p.trim_matches(|c| c == '{' || c == '}').to_string(), str::to_string)
            .expect("vertex names stay distinct")
    })
}

pub fn dual_complete_graph(n: usize) -> Result<IncidenceStructure, FamilyError> {
    Ok(complete_graph(n)?.dual())
}

/// The Pasch–Veblen configuration `(6_2 4_3)`.
pub fn veblen() -> IncidenceStructure {
    IncidenceStructure::build(
        ["p1", "p2", "p3", "p4", "p5", "p6"],
        [
            ("l1", ["p1", "p2", "p3"]),
            ("l2", ["p1", "p4", "p5"]),
            ("l3", ["p2", "p4", "p6"]),
            ("l4", ["p3", "p5", "p6"]),
        ],
    )
    .expect("static structure")
}

/// The Fano plane `(7_3 7_3)`.
pub fn fano_plane() -> IncidenceStructure {
    IncidenceStructure::build(
        ["1", "2", "3", "4", "5", "6", "7"],
        [
            ("l1", ["1", "2", "3"]),
            ("l2", ["1", "4", "5"]),
            ("l3", ["1", "6", "7"]),
            ("l4", ["2", "4", "6"]),
            ("l5", ["2", "5", "7"]),
            ("l6", ["3", "4", "7"]),
            ("l7", ["3", "5", "6"]),
        ],
    )
    .expect("static structure")
}

/// A family structure together with a hyperplane and its points at
/// infinity, computed from the identifiers.
#[derive(Clone, Debug)]
pub struct FamilyHyperplane {
    pub structure: IncidenceStructure,
    pub points: Vec<Point>,
    /// Map from the lines of the reduct to the points of the restriction.
    pub infinity: GluingMap,
}

fn family_hyperplane(
    structure: IncidenceStructure,
    inside: impl Fn(&str) -> bool,
    image: impl Fn(&str) -> String,
) -> Result<FamilyHyperplane, FamilyError> {
    let points: Vec<Point> =
        structure.points().filter(|&p| inside(structure.point_name(p))).collect();
    let k1 = reduct(&structure, &points)?;
    let k2 = restriction(&structure, &points)?;
    let pairs: Vec<(String, String)> =
        k1.line_names().iter().map(|l| (l.clone(), image(l))).collect();
    let infinity = validate_gluing_named(&k1, &k2, &pairs)?;
    Ok(FamilyHyperplane { structure, points, infinity })
}

fn subset_atoms(name: &str) -> Vec<&str> {
    let inner = &name[1..name.len() - 1];
    if inner.is_empty() {
        Vec::new()
    } else {
        inner.split(',').collect()
    }
}

/// In `GrasSpace(n,k)`, the subsets avoiding atom `i` with `A^∞ = A \ {i}`.
pub fn grassmannian_hyperplane(
    n: usize,
    k: usize,
    i: &str,
) -> Result<FamilyHyperplane, FamilyError> {
    let structure = gras_space(n, k)?;
    if Ground::numbered(n).atom(i).is_none() {
        return Err(FamilyError::UnknownAtom(i.to_string()));
    }
    family_hyperplane(
        structure,
        |p| !subset_atoms(p).contains(&i),
        |line| {
            let rest: Vec<&str> = subset_atoms(line).into_iter().filter(|&x| x != i).collect();
            format!("{{{}}}", rest.join(","))
        },
    )
}

/// In `V(m,k)`, the multisets containing atom `a` with `e^∞ = e·a^(k-|e|)`.
pub fn veronesian_hyperplane(m: usize, k: usize, a: &str) -> Result<FamilyHyperplane, FamilyError> {
    let structure = veronesian(m, k)?;
    let ground = letters("V", m)?;
    let atom = ground.atom(a).ok_or_else(|| FamilyError::UnknownAtom(a.to_string()))?;
    let parse = |name: &str| parse_compact(&ground, name);
    family_hyperplane(
        structure,
        |p| parse(p).count(atom) > 0,
        |line| {
            let e = parse(line);
            let pad = Multiset::power(&ground, atom, (k - e.cardinality()) as u32);
            e.mul(&pad).expect("same ground").compact()
        },
    )
}

/// In `V*(m,k)`, the points (multisets shorter than `k`) avoiding atom `a`
/// with `f^∞ = f / a^dg(a,f)`.
pub fn dual_veronesian_hyperplane(
    m: usize,
    k: usize,
    a: &str,
) -> Result<FamilyHyperplane, FamilyError> {
    let structure = dual_veronesian(m, k)?;
    let ground = letters("V*", m)?;
    let atom = ground.atom(a).ok_or_else(|| FamilyError::UnknownAtom(a.to_string()))?;
    let parse = |name: &str| parse_compact(&ground, name);
    family_hyperplane(
        structure,
        |p| parse(p).count(atom) == 0,
        |line| {
            let f = parse(line);
            let pa = Multiset::power(&ground, atom, f.count(atom));
            f.divide(&pa).expect("divisible").compact()
        },
    )
}

/// Parses a compact multiset identifier such as `a^2bc` or `1`.
pub fn parse_compact(ground: &Ground, text: &str) -> Multiset {
    let mut spaced = String::new();
    for c in text.chars() {
        if c.is_ascii_alphabetic() && !spaced.is_empty() {
            spaced.push(' ');
        }
        spaced.push(c);
    }
    Multiset::parse(ground, &spaced).expect("generated identifier")
}

/// A named family member, as written on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilySpec {
    /// `G:k,m`
    Grassmannian { k: usize, m: usize },
    /// `GS:n,k`
    GrasSpace { n: usize, k: usize },
    /// `DCD:n,k`
    Dcd { n: usize, k: usize },
    /// `V:m,k`
    Veronesian { m: usize, k: usize },
    /// `V*:m,k`
    DualVeronesian { m: usize, k: usize },
    /// `K:n`
    CompleteGraph { n: usize },
    /// `K*:n`
    DualCompleteGraph { n: usize },
    /// `veblen`
    Veblen,
    /// `fano`
    Fano,
}

impl FamilySpec {
    pub fn build(&self) -> Result<IncidenceStructure, FamilyError> {
        match *self {
            FamilySpec::Grassmannian { k, m } => grassmannian_g(k, m),
            FamilySpec::GrasSpace { n, k } => gras_space(n, k),
            FamilySpec::Dcd { n, k } => dcd(n, k),
            FamilySpec::Veronesian { m, k } => veronesian(m, k),
            FamilySpec::DualVeronesian { m, k } => dual_veronesian(m, k),
            FamilySpec::CompleteGraph { n } => complete_graph(n),
            FamilySpec::DualCompleteGraph { n } => dual_complete_graph(n),
            FamilySpec::Veblen => Ok(veblen()),
            FamilySpec::Fano => Ok(fano_plane()),
        }
    }

    /// The binomial class the member is expected to lie in.
    pub fn expected_signature(&self) -> Option<BinomialSignature> {
        match *self {
            FamilySpec::Grassmannian { k, m } => BinomialSignature::new(k, m),
            FamilySpec::GrasSpace { n, k } => BinomialSignature::new(n.checked_sub(k)?, k + 1),
            FamilySpec::Dcd { n, k } => BinomialSignature::new(k, (n + 1).checked_sub(k)?),
            FamilySpec::Veronesian { m, k } => BinomialSignature::new(k, m),
            FamilySpec::DualVeronesian { m, k } => BinomialSignature::new(m, k),
            FamilySpec::CompleteGraph { n } => BinomialSignature::new(n.checked_sub(1)?, 2),
            FamilySpec::DualCompleteGraph { n } => BinomialSignature::new(2, n.checked_sub(1)?),
            FamilySpec::Veblen => BinomialSignature::new(2, 3),
            FamilySpec::Fano => None,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FamilySpec::Grassmannian { k, m } => write!(f, "G:{k},{m}"),
            FamilySpec::GrasSpace { n, k } => write!(f, "GS:{n},{k}"),
            FamilySpec::Dcd { n, k } => write!(f, "DCD:{n},{k}"),
            FamilySpec::Veronesian { m, k } => write!(f, "V:{m},{k}"),
            FamilySpec::DualVeronesian { m, k } => write!(f, "V*:{m},{k}"),
            FamilySpec::CompleteGraph { n } => write!(f, "K:{n}"),
            FamilySpec::DualCompleteGraph { n } => write!(f, "K*:{n}"),
            FamilySpec::Veblen => f.write_str("veblen"),
            FamilySpec::Fano => f.write_str("fano"),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || FamilyError::Parse(s.to_string());
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "veblen" => return Ok(FamilySpec::Veblen),
            "fano" => return Ok(FamilySpec::Fano),
            _ => {}
        }
        let (tag, args) = t.split_once(':').ok_or_else(err)?;
        let args: Vec<usize> = args
            .split(',')
            .map(|a| a.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| err())?;
        let pair = || match args.as_slice() {
            [a, b] => Ok((*a, *b)),
            _ => Err(err()),
        };
        let single = || match args.as_slice() {
            [a] => Ok(*a),
            _ => Err(err()),
        };
        Ok(match tag.trim() {
            "G" => pair().map(|(k, m)| FamilySpec::Grassmannian { k, m })?,
            "GS" => pair().map(|(n, k)| FamilySpec::GrasSpace { n, k })?,
            "DCD" => pair().map(|(n, k)| FamilySpec::Dcd { n, k })?,
            "V" => pair().map(|(m, k)| FamilySpec::Veronesian { m, k })?,
            "V*" => pair().map(|(m, k)| FamilySpec::DualVeronesian { m, k })?,
            "K" => single().map(|n| FamilySpec::CompleteGraph { n })?,
            "K*" => single().map(|n| FamilySpec::DualCompleteGraph { n })?,
            _ => return Err(err()),
        })
    }
}
