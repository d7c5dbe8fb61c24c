//! Isomorphism testing and canonical forms.
//!
//! Structures are compared through their Levi graphs, with points and lines
//! kept in separate colour classes so a structure is never identified with
//! its dual. Canonical forms come from colour refinement and a search over
//! individualized vertices, pruned by the automorphisms found on the way;
//! isomorphism tests compare canonical forms.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::structure::{IncidenceStructure, Line, Point};

/// Default size guard of [`canonical_form`], in points plus lines.
pub const CANONICAL_MAX_ELEMENTS: usize = 64;
/// Default size guard of [`find_isomorphism`], in points plus lines.
pub const SEARCH_MAX_ELEMENTS: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error("structure has {elements} points and lines; the limit is {cap}")]
    TooLarge { elements: usize, cap: usize },
}

fn check_size(k: &IncidenceStructure, cap: usize) -> Result<(), IsoError> {
    let elements = k.num_points() + k.num_lines();
    if elements > cap {
        return Err(IsoError::TooLarge { elements, cap });
    }
    Ok(())
}

/// `(source id, target id)`.
pub type NamePair<'a> = (&'a str, &'a str);

/// An incidence-preserving pair of bijections, indexed by source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub points: Vec<Point>,
    pub lines: Vec<Line>,
}

impl Isomorphism {
    /// Matches identifiers after passing the source names through `rename`.
    pub fn from_names(
        from: &IncidenceStructure,
        to: &IncidenceStructure,
        rename: impl Fn(&str) -> &str,
    ) -> Option<Isomorphism> {
        let points = from
            .points()
            .map(|p| to.point_named(rename(from.point_name(p))))
            .collect::<Option<_>>()?;
        let lines = from
            .lines()
            .map(|l| to.line_named(rename(from.line_name(l))))
            .collect::<Option<_>>()?;
        Some(Isomorphism { points, lines })
    }

    /// Checks that both maps are bijections and that incidence is preserved
    /// in both directions.
    pub fn is_valid(&self, from: &IncidenceStructure, to: &IncidenceStructure) -> bool {
        if from.num_points() != to.num_points()
            || from.num_lines() != to.num_lines()
            || from.num_incidences() != to.num_incidences()
            || self.points.len() != from.num_points()
            || self.lines.len() != from.num_lines()
        {
            return false;
        }
        fn bijective(images: impl Iterator<Item = usize>, n: usize) -> bool {
            let mut hit = vec![false; n];
            images.into_iter().all(|i| i < n && !std::mem::replace(&mut hit[i], true))
        }
        if !bijective(self.points.iter().map(|p| p.0), to.num_points())
            || !bijective(self.lines.iter().map(|l| l.0), to.num_lines())
        {
            return false;
        }
        // equal incidence counts make the forward check sufficient
        from.lines().all(|l| {
            from.points_on(l).iter().all(|p| to.is_incident(self.points[p.0], self.lines[l.0]))
        })
    }

    /// `(source id, target id)` for points, then for lines.
    pub fn named_pairs<'a>(
        &self,
        from: &'a IncidenceStructure,
        to: &'a IncidenceStructure,
    ) -> (Vec<NamePair<'a>>, Vec<NamePair<'a>>) {
        let points =
            from.points().map(|p| (from.point_name(p), to.point_name(self.points[p.0]))).collect();
        let lines =
            from.lines().map(|l| (from.line_name(l), to.line_name(self.lines[l.0]))).collect();
        (points, lines)
    }
}

/// Levi graph: points are vertices `0..ν`, lines follow.
struct Levi {
    nu: usize,
    adj: Vec<Vec<usize>>,
}

impl Levi {
    fn new(k: &IncidenceStructure) -> Self {
        let nu = k.num_points();
        let mut adj = vec![Vec::new(); nu + k.num_lines()];
        for l in k.lines() {
            for p in k.points_on(l) {
                adj[p.0].push(nu + l.0);
                adj[nu + l.0].push(p.0);
            }
        }
        Levi { nu, adj }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn initial_colours(&self) -> Vec<usize> {
        (0..self.len()).map(|v| usize::from(v >= self.nu)).collect()
    }
}

type Key = (usize, Vec<usize>);

fn keys(g: &Levi, colours: &[usize]) -> Vec<Key> {
    (0..g.len())
        .map(|v| {
            let mut around: Vec<usize> = g.adj[v].iter().map(|&u| colours[u]).collect();
            around.sort_unstable();
            (colours[v], around)
        })
        .collect()
}

fn count_colours(colours: &[usize]) -> usize {
    colours.iter().max().map_or(0, |m| m + 1)
}

/// Colour refinement to the coarsest equitable partition. Colours are
/// ranked by `(old colour, sorted neighbour colours)`, so they depend only on
/// the isomorphism type of the coloured graph.
fn refine(g: &Levi, colours: &mut [usize]) {
    loop {
        let before = count_colours(colours);
        let ks = keys(g, colours);
        let mut ranking: Vec<&Key> = ks.iter().collect();
        ranking.sort_unstable();
        ranking.dedup();
        for (slot, key) in colours.iter_mut().zip(&ks) {
            *slot = ranking.binary_search(&key).expect("key was ranked");
        }
        if count_colours(colours) == before {
            return;
        }
    }
}

fn histogram(colours: &[usize]) -> Vec<usize> {
    let mut h = vec![0; count_colours(colours)];
    for &c in colours {
        h[c] += 1;
    }
    h
}

/// Gives `v` a colour of its own, ranked just before the rest of its cell.
fn individualize(colours: &[usize], v: usize) -> Vec<usize> {
    let mut keyed: Vec<(usize, usize)> =
        colours.iter().enumerate().map(|(u, &c)| (c, usize::from(u != v))).collect();
    let mut ranking = keyed.clone();
    ranking.sort_unstable();
    ranking.dedup();
    keyed.iter_mut().map(|k| ranking.binary_search(k).expect("ranked")).collect()
}

/// Smallest non-singleton colour class, earliest colour on ties.
fn target_cell(colours: &[usize]) -> Option<Vec<usize>> {
    let h = histogram(colours);
    let (colour, _) = h.iter().enumerate().filter(|(_, &n)| n > 1).min_by_key(|(c, &n)| (n, *c))?;
    Some((0..colours.len()).filter(|&v| colours[v] == colour).collect())
}

/// Relabeling-invariant certificate of a structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    /// `ν` and `β` as little-endian `u32`, then the incidence matrix in
    /// canonical order, row-major, most significant bit first.
    pub certificate: Vec<u8>,
    /// Canonical position of every point, by original index.
    pub point_labels: Vec<usize>,
    /// Canonical position of every line, by original index.
    pub line_labels: Vec<usize>,
}

impl CanonicalForm {
    pub fn to_hex(&self) -> String {
        hex(&self.certificate)
    }

    /// Original identifiers mapped to canonical positions.
    pub fn relabeling<'a>(
        &self,
        k: &'a IncidenceStructure,
    ) -> (BTreeMap<&'a str, usize>, BTreeMap<&'a str, usize>) {
        let points = k.points().map(|p| (k.point_name(p), self.point_labels[p.0])).collect();
        let lines = k.lines().map(|l| (k.line_name(l), self.line_labels[l.0])).collect();
        (points, lines)
    }
}

pub fn hex(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(2 * bytes.len());
    for b in bytes {
        write!(out, "{b:02x}").expect("writing to a string");
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CanonicalOptions {
    pub max_elements: usize,
}

impl Default for CanonicalOptions {
    fn default() -> Self {
        CanonicalOptions { max_elements: CANONICAL_MAX_ELEMENTS }
    }
}

struct Leaf {
    certificate: Vec<u8>,
    labels: Vec<usize>,
}

struct Canonizer<'a> {
    g: &'a Levi,
    beta: usize,
    first: Option<Leaf>,
    best: Option<Leaf>,
    automorphisms: Vec<Vec<usize>>,
}

impl Canonizer<'_> {
    fn certificate(&self, labels: &[usize]) -> Vec<u8> {
        let nu = self.g.nu;
        let beta = self.beta;
        let mut cert = Vec::with_capacity(8 + (nu * beta).div_ceil(8));
        cert.extend_from_slice(&(nu as u32).to_le_bytes());
        cert.extend_from_slice(&(beta as u32).to_le_bytes());
        let mut bits = vec![0u8; (nu * beta).div_ceil(8)];
        for p in 0..nu {
            for &l in &self.g.adj[p] {
                let pos = labels[p] * beta + (labels[l] - nu);
                bits[pos / 8] |= 0x80 >> (pos % 8);
            }
        }
        cert.extend(bits);
        cert
    }

    fn record_automorphism(&mut self, a: &[usize], b: &[usize]) {
        // labels are vertex -> position; a⁻¹ ∘ b is an automorphism
        let mut inv = vec![0; a.len()];
        for (v, &pos) in a.iter().enumerate() {
            inv[pos] = v;
        }
        let gamma: Vec<usize> = b.iter().map(|&pos| inv[pos]).collect();
        if gamma.iter().enumerate().any(|(v, &w)| v != w) {
            self.automorphisms.push(gamma);
        }
    }

    fn leaf(&mut self, labels: Vec<usize>) {
        let certificate = self.certificate(&labels);
        let Some(first) = &self.first else {
            self.first = Some(Leaf { certificate: certificate.clone(), labels: labels.clone() });
            self.best = Some(Leaf { certificate, labels });
            return;
        };
        if certificate == first.certificate {
            let first_labels = first.labels.clone();
            self.record_automorphism(&first_labels, &labels);
            return;
        }
        let best = self.best.as_ref().expect("set with first");
        match certificate.cmp(&best.certificate) {
            std::cmp::Ordering::Less => self.best = Some(Leaf { certificate, labels }),
            std::cmp::Ordering::Equal => {
                let best_labels = best.labels.clone();
                self.record_automorphism(&best_labels, &labels);
            }
            std::cmp::Ordering::Greater => {}
        }
    }

    /// Orbit representative of every vertex under the stored automorphisms
    /// that fix `prefix` pointwise.
    fn orbits(&self, prefix: &[usize]) -> Vec<usize> {
        let n = self.g.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for gamma in &self.automorphisms {
            if prefix.iter().any(|&v| gamma[v] != v) {
                continue;
            }
            for (v, &image) in gamma.iter().enumerate() {
                let (a, b) = (find(&mut parent, v), find(&mut parent, image));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        (0..n).map(|v| find(&mut parent, v)).collect()
    }

    fn search(&mut self, colours: Vec<usize>, prefix: &mut Vec<usize>) {
        let Some(cell) = target_cell(&colours) else {
            self.leaf(colours);
            return;
        };
        let mut explored: Vec<usize> = Vec::new();
        for w in cell {
            if !explored.is_empty() {
                let orbit = self.orbits(prefix);
                if explored.iter().any(|&u| orbit[u] == orbit[w]) {
                    continue;
                }
            }
            explored.push(w);
            let mut child = individualize(&colours, w);
            refine(self.g, &mut child);
            prefix.push(w);
            self.search(child, prefix);
            prefix.pop();
        }
    }
}

/// The lexicographically smallest incidence matrix over the leaves of the
/// refinement search tree.
pub fn canonical_form(
    k: &IncidenceStructure,
    opts: CanonicalOptions,
) -> Result<CanonicalForm, IsoError> {
    check_size(k, opts.max_elements)?;
    let g = Levi::new(k);
    let mut colours = g.initial_colours();
    refine(&g, &mut colours);
    let mut c = Canonizer {
        g: &g,
        beta: k.num_lines(),
        first: None,
        best: None,
        automorphisms: Vec::new(),
    };
    c.search(colours, &mut Vec::new());
    let best = c.best.expect("the search tree has at least one leaf");
    let nu = k.num_points();
    Ok(CanonicalForm {
        certificate: best.certificate,
        point_labels: best.labels[..nu].to_vec(),
        line_labels: best.labels[nu..].iter().map(|&l| l - nu).collect(),
    })
}

/// An isomorphism from `a` onto `b`, if one exists. Each structure may
/// have at most [`SEARCH_MAX_ELEMENTS`] points and lines.
pub fn find_isomorphism(
    a: &IncidenceStructure,
    b: &IncidenceStructure,
) -> Result<Option<Isomorphism>, IsoError> {
    find_isomorphism_with(a, b, SEARCH_MAX_ELEMENTS)
}

pub fn find_isomorphism_with(
    a: &IncidenceStructure,
    b: &IncidenceStructure,
    max_elements: usize,
) -> Result<Option<Isomorphism>, IsoError> {
    check_size(a, max_elements)?;
    check_size(b, max_elements)?;
    if a.num_points() != b.num_points()
        || a.num_lines() != b.num_lines()
        || a.num_incidences() != b.num_incidences()
    {
        return Ok(None);
    }
    let opts = CanonicalOptions { max_elements };
    let ca = canonical_form(a, opts)?;
    let cb = canonical_form(b, opts)?;
    if ca.certificate != cb.certificate {
        return Ok(None);
    }
    // compose a's canonical labeling with the inverse of b's
    let mut point_at = vec![0; b.num_points()];
    for (p, &pos) in cb.point_labels.iter().enumerate() {
        point_at[pos] = p;
    }
    let mut line_at = vec![0; b.num_lines()];
    for (l, &pos) in cb.line_labels.iter().enumerate() {
        line_at[pos] = l;
    }
    let iso = Isomorphism {
        points: ca.point_labels.iter().map(|&pos| Point(point_at[pos])).collect(),
        lines: ca.line_labels.iter().map(|&pos| Line(line_at[pos])).collect(),
    };
    assert!(iso.is_valid(a, b), "equal certificates must yield an isomorphism");
    Ok(Some(iso))
}

pub fn are_isomorphic(a: &IncidenceStructure, b: &IncidenceStructure) -> Result<bool, IsoError> {
    Ok(find_isomorphism(a, b)?.is_some())
}

/// Partitions `structures` (by index) into isomorphism classes, ordered by
/// certificate.
pub fn classify(
    structures: &[IncidenceStructure],
    opts: CanonicalOptions,
) -> Result<Vec<Vec<usize>>, IsoError> {
    let mut classes: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
    for (i, k) in structures.iter().enumerate() {
        classes.entry(canonical_form(k, opts)?.certificate).or_default().push(i);
    }
    Ok(classes.into_values().collect())
}
