//! Gluing a reduct back onto a hyperplane, and splitting a binomial
//! configuration at a hyperplane.
//!
//! Given partial linear spaces `K1`, `K2` and a map `∞` from the lines of
//! `K1` to the points of `K2` such that two lines of `K1` through a common
//! point never share an image, `K1 ⋊_∞ K2` has the points and lines of both
//! parts and additionally joins every line `A` of `K1` with the point
//! `∞(A)`. The points of `K2` then form a hyperplane of the result whose deep
//! lines are exactly the lines of `K2`.
//!
//! Identifiers of the parts are prefixed with [`LEFT`] and [`RIGHT`] in the
//! glued structure so the two parts can never collide.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::binomial::binomial;
use crate::hyperplane::{extract_infinity, is_hyperplane, reduct, restriction, HyperplaneError};
use crate::iso::{canonical_form, CanonicalOptions, IsoError, Isomorphism};
use crate::structure::{BinomialSignature, IncidenceStructure, Point, StructureError};

/// Prefix of identifiers coming from the first (reduct) part.
pub const LEFT: &str = "L.";
/// Prefix of identifiers coming from the second (hyperplane) part.
pub const RIGHT: &str = "R.";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GlueError {
    #[error("map has {got} images but the first structure has {expected} lines")]
    LengthMismatch { expected: usize, got: usize },
    #[error("map image {0} is not a point of the second structure")]
    ImageOutOfRange(usize),
    #[error("unknown line {0:?} in gluing map")]
    UnknownLine(String),
    #[error("unknown point {0:?} in gluing map")]
    UnknownPoint(String),
    #[error("line {0:?} is mapped twice")]
    DuplicateLine(String),
    #[error("line {0:?} has no image")]
    MissingLine(String),
    #[error("lines {line_a:?} and {line_b:?} meet at {point:?} but both map to {image:?}")]
    Conflict { point: String, line_a: String, line_b: String, image: String },
    #[error("gluing map was built for different structures")]
    ForeignMap,
    #[error("gluing map is not a bijection")]
    NotBijective,
    #[error("first structure has {lines} lines but second has {points} points")]
    SizeMismatch { lines: usize, points: usize },
    #[error("{domain} lines exceed the enumeration cap of {cap}")]
    TooLarge { domain: usize, cap: usize },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// A validated map `∞` from the lines of `K1` to the points of `K2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GluingMap {
    source: Vec<String>,
    target: Vec<String>,
    images: Vec<usize>,
    target_points: Vec<String>,
    bijective: bool,
}

impl GluingMap {
    /// Image (point index of `K2`) of every line of `K1`, in line order.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_bijective(&self) -> bool {
        self.bijective
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// `(line of K1, point of K2)` pairs in line order.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.source.iter().map(String::as_str).zip(self.target.iter().map(String::as_str))
    }

    fn fits(&self, k1: &IncidenceStructure, k2: &IncidenceStructure) -> bool {
        self.source.as_slice() == k1.line_names()
            && self.target_points.as_slice() == k2.point_names()
    }

    /// `∞⁻¹` as a gluing map from `dual(K2)` to `dual(K1)`.
    pub fn inverse(
        &self,
        k1: &IncidenceStructure,
        k2: &IncidenceStructure,
    ) -> Result<GluingMap, GlueError> {
        if !self.fits(k1, k2) {
            return Err(GlueError::ForeignMap);
        }
        if !self.bijective {
            return Err(GlueError::NotBijective);
        }
        let mut inv = vec![0; self.images.len()];
        for (line, &point) in self.images.iter().enumerate() {
            inv[point] = line;
        }
        validate_gluing(&k2.dual(), &k1.dual(), inv.into_iter().map(Point).collect())
    }
}

/// Checks that `images[i]` (a point of `K2`) is a legal image of the `i`-th
/// line of `K1`: concurrent lines of `K1` must have distinct images.
pub fn validate_gluing(
    k1: &IncidenceStructure,
    k2: &IncidenceStructure,
    images: Vec<Point>,
) -> Result<GluingMap, GlueError> {
    if images.len() != k1.num_lines() {
        return Err(GlueError::LengthMismatch { expected: k1.num_lines(), got: images.len() });
    }
    if let Some(bad) = images.iter().find(|p| p.0 >= k2.num_points()) {
        return Err(GlueError::ImageOutOfRange(bad.0));
    }
    for x in k1.points() {
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for &l in k1.lines_through(x) {
            let image = images[l.0].0;
            if let Some(&other) = seen.get(&image) {
                return Err(GlueError::Conflict {
                    point: k1.point_name(x).to_string(),
                    line_a: k1.line_names()[other].clone(),
                    line_b: k1.line_name(l).to_string(),
                    image: k2.point_names()[image].clone(),
                });
            }
            seen.insert(image, l.0);
        }
    }
    let mut hit = vec![false; k2.num_points()];
    let mut injective = true;
    for p in &images {
        injective &= !std::mem::replace(&mut hit[p.0], true);
    }
    let bijective = injective && images.len() == k2.num_points();
    Ok(GluingMap {
        source: k1.line_names().to_vec(),
        target: images.iter().map(|p| k2.point_names()[p.0].clone()).collect(),
        images: images.into_iter().map(|p| p.0).collect(),
        target_points: k2.point_names().to_vec(),
        bijective,
    })
}

/// Same as [`validate_gluing`] with the map given by identifiers.
pub fn validate_gluing_named<A, B>(
    k1: &IncidenceStructure,
    k2: &IncidenceStructure,
    pairs: &[(A, B)],
) -> Result<GluingMap, GlueError>
where
    A: AsRef<str>,
    B: AsRef<str>,
{
    let mut images: Vec<Option<Point>> = vec![None; k1.num_lines()];
    for (line, point) in pairs {
        let l = k1
            .line_named(line.as_ref())
            .ok_or_else(|| GlueError::UnknownLine(line.as_ref().to_string()))?;
        let p = k2
            .point_named(point.as_ref())
            .ok_or_else(|| GlueError::UnknownPoint(point.as_ref().to_string()))?;
        if images[l.0].replace(p).is_some() {
            return Err(GlueError::DuplicateLine(line.as_ref().to_string()));
        }
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| GlueError::MissingLine(k1.line_names()[i].clone())))
        .collect::<Result<Vec<_>, _>>()?;
    validate_gluing(k1, k2, images)
}

/// `K1 ⋊_∞ K2`.
///
/// Points are the `K1` points followed by the `K2` points, lines likewise,
/// with identifiers prefixed by [`LEFT`] and [`RIGHT`].
pub fn glue(
    k1: &IncidenceStructure,
    k2: &IncidenceStructure,
    map: &GluingMap,
) -> Result<IncidenceStructure, GlueError> {
    if !map.fits(k1, k2) {
        return Err(GlueError::ForeignMap);
    }
    let offset = k1.num_points();
    let point_names = k1
        .point_names()
        .iter()
        .map(|n| format!("{LEFT}{n}"))
        .chain(k2.point_names().iter().map(|n| format!("{RIGHT}{n}")))
        .collect();
    let line_names = k1
        .line_names()
        .iter()
        .map(|n| format!("{LEFT}{n}"))
        .chain(k2.line_names().iter().map(|n| format!("{RIGHT}{n}")))
        .collect();
    let mut line_points: Vec<Vec<usize>> = Vec::with_capacity(k1.num_lines() + k2.num_lines());
    for l in k1.lines() {
        let mut pts: Vec<usize> = k1.points_on(l).iter().map(|p| p.0).collect();
        pts.push(offset + map.images[l.0]);
        line_points.push(pts);
    }
    for l in k2.lines() {
        line_points.push(k2.points_on(l).iter().map(|p| offset + p.0).collect());
    }
    Ok(IncidenceStructure::from_indices(point_names, line_names, line_points)?)
}

/// Points of the second part inside a glued structure.
pub fn right_points(k1: &IncidenceStructure, k2: &IncidenceStructure) -> Vec<Point> {
    (k1.num_points()..k1.num_points() + k2.num_points()).map(Point).collect()
}

/// Drops one leading [`LEFT`] or [`RIGHT`] prefix.
pub fn strip_side(name: &str) -> &str {
    name.strip_prefix(LEFT).or_else(|| name.strip_prefix(RIGHT)).unwrap_or(name)
}

fn swap_side(name: &str) -> String {
    if let Some(rest) = name.strip_prefix(LEFT) {
        format!("{RIGHT}{rest}")
    } else if let Some(rest) = name.strip_prefix(RIGHT) {
        format!("{LEFT}{rest}")
    } else {
        name.to_string()
    }
}

/// Checks `dual(K1 ⋊_∞ K2) = dual(K2) ⋊_{∞⁻¹} dual(K1)`, comparing the two
/// sides after exchanging the part prefixes.
pub fn verify_duality(
    k1: &IncidenceStructure,
    k2: &IncidenceStructure,
    map: &GluingMap,
) -> Result<bool, GlueError> {
    let inverse = map.inverse(k1, k2)?;
    let lhs = glue(k1, k2, map)?.dual();
    let rhs = glue(&k2.dual(), &k1.dual(), &inverse)?;
    let rhs = rhs.renamed(swap_side, swap_side)?;
    Ok(lhs.same_up_to_order(&rhs))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("structure is not a binomial configuration")]
    NotBinomial,
    #[error("binomial signature {0} has no decomposition (needs k, m >= 2)")]
    Degenerate(BinomialSignature),
    #[error("point set is not a hyperplane")]
    NotHyperplane,
    #[error("restriction to the hyperplane is not a configuration")]
    RestrictionNotConfiguration,
    #[error("reduct is not a binomial configuration")]
    ReductNotBinomial,
    #[error("decomposition produced parts of unexpected signature")]
    UnexpectedSignature,
    #[error("points at infinity are not a bijection")]
    NotBijective,
    #[error("reassembled structure is not isomorphic to the original")]
    WitnessFailed,
    #[error(transparent)]
    Hyperplane(#[from] HyperplaneError),
    #[error(transparent)]
    Glue(#[from] GlueError),
}

/// A binomial configuration split as `K ≅ K1 ⋊_∞ K2` at a hyperplane.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// `K1`, the reduct `K \ H`.
    pub reduct_part: IncidenceStructure,
    /// `K2`, the restriction `K↾H`.
    pub hyperplane_part: IncidenceStructure,
    pub infinity: GluingMap,
    /// Isomorphism from `glue(K1, K2, ∞)` onto the original structure.
    pub witness: Isomorphism,
    /// Signature of the original structure.
    pub signature: BinomialSignature,
}

impl Decomposition {
    pub fn reduct_signature(&self) -> BinomialSignature {
        BinomialSignature { k: self.signature.k, m: self.signature.m - 1 }
    }

    pub fn hyperplane_signature(&self) -> BinomialSignature {
        BinomialSignature { k: self.signature.k - 1, m: self.signature.m }
    }

    pub fn glued(&self) -> IncidenceStructure {
        glue(&self.reduct_part, &self.hyperplane_part, &self.infinity)
            .expect("decomposition parts glue")
    }
}

/// Splits a binomial configuration `K ∈ B(k, m)` at the hyperplane `set`
/// into `K1 ∈ B(k, m-1)` and `K2 ∈ B(k-1, m)`.
///
/// Every premise is checked: `K` binomial, `set` a hyperplane, the
/// restriction a configuration and the reduct binomial.
pub fn decompose(k: &IncidenceStructure, set: &[Point]) -> Result<Decomposition, DecomposeError> {
    let signature = k
        .configuration_type()
        .and_then(|t| t.binomial_signature())
        .ok_or(DecomposeError::NotBinomial)?;
    if signature.k < 2 || signature.m < 2 {
        return Err(DecomposeError::Degenerate(signature));
    }
    if !is_hyperplane(k, set)? {
        return Err(DecomposeError::NotHyperplane);
    }
    let k2 = restriction(k, set)?;
    let t2 = k2.configuration_type().ok_or(DecomposeError::RestrictionNotConfiguration)?;
    let k1 = reduct(k, set)?;
    let s1 = k1
        .configuration_type()
        .and_then(|t| t.binomial_signature())
        .ok_or(DecomposeError::ReductNotBinomial)?;
    let infinity = extract_infinity(k, set)?;

    if s1 != (BinomialSignature { k: signature.k, m: signature.m - 1 })
        || t2.binomial_signature() != BinomialSignature::new(signature.k - 1, signature.m)
    {
        return Err(DecomposeError::UnexpectedSignature);
    }
    // |U2| = C(n-1, k-1) and |L2| = C(n-1, m)
    let n = signature.n() as u64;
    if k2.num_points() as u64 != binomial(n - 1, signature.k as u64 - 1)
        || k2.num_lines() as u64 != binomial(n - 1, signature.m as u64)
    {
        return Err(DecomposeError::UnexpectedSignature);
    }
    if !infinity.is_bijective() {
        return Err(DecomposeError::NotBijective);
    }

    let glued = glue(&k1, &k2, &infinity)?;
    let witness = Isomorphism::from_names(&glued, k, strip_side)
        .filter(|w| w.is_valid(&glued, k))
        .ok_or(DecomposeError::WitnessFailed)?;
    Ok(Decomposition { reduct_part: k1, hyperplane_part: k2, infinity, witness, signature })
}

/// Limits for exhaustive gluing searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GluingLimits {
    /// Largest number of lines of `K1` accepted.
    pub max_domain: usize,
    /// Stop after this many maps.
    pub max_results: Option<usize>,
}

impl Default for GluingLimits {
    fn default() -> Self {
        GluingLimits { max_domain: 9, max_results: None }
    }
}

fn check_sizes(k1: &IncidenceStructure, k2: &IncidenceStructure) -> Result<(), GlueError> {
    if k1.num_lines() != k2.num_points() {
        return Err(GlueError::SizeMismatch { lines: k1.num_lines(), points: k2.num_points() });
    }
    Ok(())
}

/// Depth-first search over valid bijections in lexicographic order of the
/// image vector; `order` may permute the candidates tried at each step.
fn search_bijections(
    k1: &IncidenceStructure,
    k2: &IncidenceStructure,
    limit: Option<usize>,
    order: &mut dyn FnMut(&mut Vec<usize>),
    out: &mut Vec<Vec<Point>>,
) {
    let n = k1.num_lines();
    // earlier lines concurrent with each line
    let concurrent: Vec<Vec<usize>> = k1
        .lines()
        .map(|l| {
            let mut c: Vec<usize> = k1
                .points_on(l)
                .iter()
                .flat_map(|&p| k1.lines_through(p).iter().map(|m| m.0))
                .filter(|&m| m < l.0)
                .collect();
            c.sort_unstable();
            c.dedup();
            c
        })
        .collect();
    let mut images = vec![usize::MAX; n];
    let mut used = vec![false; k2.num_points()];

    fn rec(
        line: usize,
        concurrent: &[Vec<usize>],
        images: &mut Vec<usize>,
        used: &mut Vec<bool>,
        limit: Option<usize>,
        order: &mut dyn FnMut(&mut Vec<usize>),
        out: &mut Vec<Vec<Point>>,
    ) {
        if limit.is_some_and(|cap| out.len() >= cap) {
            return;
        }
        if line == images.len() {
            out.push(images.iter().map(|&i| Point(i)).collect());
            return;
        }
        let mut candidates: Vec<usize> = (0..used.len()).filter(|&p| !used[p]).collect();
        order(&mut candidates);
        for p in candidates {
            if concurrent[line].iter().any(|&m| images[m] == p) {
                continue;
            }
            images[line] = p;
            used[p] = true;
            rec(line + 1, concurrent, images, used, limit, order, out);
            used[p] = false;
            images[line] = usize::MAX;
            if limit.is_some_and(|cap| out.len() >= cap) {
                return;
            }
        }
    }
    rec(0, &concurrent, &mut images, &mut used, limit, order, out);
}

/// Every valid bijection from the lines of `K1` onto the points of `K2`, in
/// lexicographic order of the image vector.
pub fn enumerate_gluings(
    k1: &IncidenceStructure,
    k2: &IncidenceStructure,
    limits: GluingLimits,
) -> Result<Vec<GluingMap>, GlueError> {
    check_sizes(k1, k2)?;
    if k1.num_lines() > limits.max_domain {
        return Err(GlueError::TooLarge { domain: k1.num_lines(), cap: limits.max_domain });
    }
    let mut raw = Vec::new();
    search_bijections(k1, k2, limits.max_results, &mut |_| {}, &mut raw);
    raw.into_iter().map(|images| validate_gluing(k1, k2, images)).collect()
}

/// The lexicographically first valid bijection, if any.
pub fn first_valid_gluing(
    k1: &IncidenceStructure,
    k2: &IncidenceStructure,
) -> Result<Option<GluingMap>, GlueError> {
    check_sizes(k1, k2)?;
    let mut raw = Vec::new();
    search_bijections(k1, k2, Some(1), &mut |_| {}, &mut raw);
    raw.pop().map(|images| validate_gluing(k1, k2, images)).transpose()
}

/// A valid bijection found by a search that tries candidates in random order.
pub fn random_gluing<R: Rng + ?Sized>(
    k1: &IncidenceStructure,
    k2: &IncidenceStructure,
    rng: &mut R,
) -> Result<Option<GluingMap>, GlueError> {
    check_sizes(k1, k2)?;
    let mut raw = Vec::new();
    search_bijections(k1, k2, Some(1), &mut |c| c.shuffle(rng), &mut raw);
    raw.pop().map(|images| validate_gluing(k1, k2, images)).transpose()
}

/// One isomorphism class of glued structures.
#[derive(Clone, Debug)]
pub struct GluingClass {
    /// Lexicographically first map of the class.
    pub representative: GluingMap,
    /// Number of valid maps whose gluing lands in this class.
    pub size: usize,
    /// Canonical certificate shared by the class.
    pub certificate: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Glue(#[from] GlueError),
    #[error(transparent)]
    Iso(#[from] IsoError),
}

/// Partitions all valid bijections by the isomorphism class of the glued
/// structure. Classes are listed in the order of their representatives.
pub fn classify_gluings(
    k1: &IncidenceStructure,
    k2: &IncidenceStructure,
    limits: GluingLimits,
) -> Result<Vec<GluingClass>, ClassifyError> {
    let maps = enumerate_gluings(k1, k2, limits)?;
    let mut classes: Vec<GluingClass> = Vec::new();
    let mut index: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    for map in maps {
        let glued = glue(k1, k2, &map)?;
        let cert = canonical_form(&glued, CanonicalOptions::default())?.certificate;
        match index.get(&cert) {
            Some(&i) => classes[i].size += 1,
            None => {
                index.insert(cert.clone(), classes.len());
                classes.push(GluingClass { representative: map, size: 1, certificate: cert });
            }
        }
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete_graph, gras_space, veblen};
    use crate::iso::are_isomorphic;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn k4() -> IncidenceStructure {
        complete_graph(4).unwrap()
    }

    #[test]
    fn valid_and_invalid_maps() {
        let k4 = k4();
        let v = veblen();
        let ok = validate_gluing(&k4, &v, (0..6).map(Point).collect()).unwrap();
        assert!(ok.is_bijective());
        // {1,2} and {1,3} meet at 1
        let bad = validate_gluing(
            &k4,
            &v,
            vec![Point(0), Point(0), Point(1), Point(2), Point(3), Point(4)],
        );
        match bad {
            Err(GlueError::Conflict { point, line_a, line_b, image }) => {
                assert_eq!(point, "1");
                assert_eq!(line_a, "{1,2}");
                assert_eq!(line_b, "{1,3}");
                assert_eq!(image, "p1");
            }
            other => panic!("{other:?}"),
        }
        // two disjoint edges may share an image
        let matching = IncidenceStructure::build(
            ["a", "b", "c", "d"],
            [("ab", vec!["a", "b"]), ("cd", vec!["c", "d"])],
        )
        .unwrap();
        let m = validate_gluing(&matching, &v, vec![Point(0), Point(0)]).unwrap();
        assert!(!m.is_bijective());
        assert!(matches!(
            validate_gluing(&matching, &v, vec![Point(0)]),
            Err(GlueError::LengthMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn named_validation() {
        let k4 = k4();
        let v = veblen();
        let pairs: Vec<(String, String)> = k4
            .line_names()
            .iter()
            .zip(v.point_names())
            .map(|(a, b)| (a.clone(), b.clone()))
            .collect();
        let m = validate_gluing_named(&k4, &v, &pairs).unwrap();
        assert_eq!(m.images(), &[0, 1, 2, 3, 4, 5]);
        assert!(matches!(
            validate_gluing_named(&k4, &v, &pairs[..5]),
            Err(GlueError::MissingLine(_))
        ));
        assert!(matches!(
            validate_gluing_named(&k4, &v, &[("nope", "p1")]),
            Err(GlueError::UnknownLine(_))
        ));
    }

    #[test]
    fn k4_into_veblen_is_desargues_type() {
        let k4 = k4();
        let v = veblen();
        let map = first_valid_gluing(&k4, &v).unwrap().unwrap();
        let g = glue(&k4, &v, &map).unwrap();
        assert_eq!(g.configuration_type().unwrap().to_string(), "(10_3 10_3)");
        let u2 = right_points(&k4, &v);
        assert!(is_hyperplane(&g, &u2).unwrap());
    }

    #[test]
    fn glue_then_decompose_returns_parts() {
        let k4 = k4();
        let v = veblen();
        for map in
            enumerate_gluings(&k4, &v, GluingLimits { max_results: Some(20), ..Default::default() })
                .unwrap()
        {
            let g = glue(&k4, &v, &map).unwrap();
            let d = decompose(&g, &right_points(&k4, &v)).unwrap();
            let back1 =
                d.reduct_part.renamed(|n| strip_side(n).into(), |n| strip_side(n).into()).unwrap();
            let back2 = d
                .hyperplane_part
                .renamed(|n| strip_side(n).into(), |n| strip_side(n).into())
                .unwrap();
            assert_eq!(back1, k4);
            assert_eq!(back2, v);
            let pairs: Vec<(String, String)> = d
                .infinity
                .pairs()
                .map(|(a, b)| (strip_side(a).to_string(), strip_side(b).to_string()))
                .collect();
            assert_eq!(validate_gluing_named(&k4, &v, &pairs).unwrap(), map);
        }
    }

    #[test]
    fn gluing_two_desargues_is_not_a_configuration() {
        let d = gras_space(5, 2).unwrap();
        let map = first_valid_gluing(&d, &d).unwrap().unwrap();
        let g = glue(&d, &d, &map).unwrap();
        assert_eq!(g.num_points(), 20);
        assert_eq!(g.num_lines(), 20);
        let mut sizes = g.line_sizes();
        sizes.sort();
        assert_eq!(sizes, [vec![3; 10], vec![4; 10]].concat());
        assert_eq!(g.configuration_type(), None);
    }

    #[test]
    fn decompose_desargues_at_atom_hyperplane() {
        let d = gras_space(5, 2).unwrap();
        let h: Vec<Point> = d.points().filter(|&p| !d.point_name(p).contains('5')).collect();
        let dec = decompose(&d, &h).unwrap();
        assert!(are_isomorphic(&dec.reduct_part, &k4()).unwrap());
        assert!(are_isomorphic(&dec.hyperplane_part, &veblen()).unwrap());
        assert_eq!(dec.reduct_signature(), BinomialSignature { k: 3, m: 2 });
        assert_eq!(dec.hyperplane_signature(), BinomialSignature { k: 2, m: 3 });
        assert!(dec.witness.is_valid(&dec.glued(), &d));
    }

    #[test]
    fn decompose_rejects_line_plus_point() {
        let d = gras_space(5, 2).unwrap();
        let h: Vec<Point> = ["{1,2}", "{1,3}", "{2,3}", "{4,5}"]
            .iter()
            .map(|n| d.point_named(n).unwrap())
            .collect();
        assert_eq!(decompose(&d, &h).unwrap_err(), DecomposeError::RestrictionNotConfiguration);
        assert_eq!(decompose(&d, &[Point(0)]).unwrap_err(), DecomposeError::NotHyperplane);
        let fano = crate::families::fano_plane();
        assert_eq!(decompose(&fano, &[Point(0)]).unwrap_err(), DecomposeError::NotBinomial);
    }

    #[test]
    fn enumeration_counts_and_guards() {
        let k4 = k4();
        let v = veblen();
        let all = enumerate_gluings(&k4, &v, Default::default()).unwrap();
        // oracle: filter all 720 permutations
        let mut naive = 0;
        let mut perm: Vec<usize> = (0..6).collect();
        permutohedron_each(&mut perm, &mut |p| {
            if validate_gluing(&k4, &v, p.iter().map(|&i| Point(i)).collect()).is_ok() {
                naive += 1;
            }
        });
        assert_eq!(all.len(), naive);
        assert!(all.windows(2).all(|w| w[0].images() < w[1].images()));

        let single = IncidenceStructure::build(["x", "y"], [("xy", vec!["x", "y"])]).unwrap();
        let three = IncidenceStructure::build(["1", "2", "3"], Vec::<(String, Vec<String>)>::new())
            .unwrap();
        assert!(matches!(
            enumerate_gluings(&single, &three, Default::default()),
            Err(GlueError::SizeMismatch { lines: 1, points: 3 })
        ));
        let one = IncidenceStructure::build(["q"], Vec::<(String, Vec<String>)>::new()).unwrap();
        assert_eq!(enumerate_gluings(&single, &one, Default::default()).unwrap().len(), 1);

        let big = complete_graph(5).unwrap(); // 10 lines
        let pts = IncidenceStructure::build(
            (0..10).map(|i| format!("q{i}")),
            Vec::<(String, Vec<String>)>::new(),
        )
        .unwrap();
        assert!(matches!(
            enumerate_gluings(&big, &pts, Default::default()),
            Err(GlueError::TooLarge { domain: 10, cap: 9 })
        ));
    }

    // Heap's algorithm
    fn permutohedron_each(v: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        fn heap(k: usize, v: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
            if k <= 1 {
                f(v);
                return;
            }
            heap(k - 1, v, f);
            for i in 0..k - 1 {
                if k.is_multiple_of(2) {
                    v.swap(i, k - 1);
                } else {
                    v.swap(0, k - 1);
                }
                heap(k - 1, v, f);
            }
        }
        let n = v.len();
        heap(n, v, f);
    }

    #[test]
    fn duality_of_k4_veblen_gluings() {
        let k4 = k4();
        let v = veblen();
        for map in
            enumerate_gluings(&k4, &v, GluingLimits { max_results: Some(50), ..Default::default() })
                .unwrap()
        {
            assert!(verify_duality(&k4, &v, &map).unwrap());
        }
        let matching = IncidenceStructure::build(
            ["a", "b", "c", "d"],
            [("ab", vec!["a", "b"]), ("cd", vec!["c", "d"])],
        )
        .unwrap();
        let m = validate_gluing(&matching, &v, vec![Point(0), Point(0)]).unwrap();
        assert_eq!(verify_duality(&matching, &v, &m), Err(GlueError::NotBijective));
    }

    #[test]
    fn single_line_classification_is_nonempty() {
        let single = IncidenceStructure::build(["x", "y"], [("xy", vec!["x", "y"])]).unwrap();
        let one = IncidenceStructure::build(["q"], Vec::<(String, Vec<String>)>::new()).unwrap();
        let classes = classify_gluings(&single, &one, Default::default()).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].size, 1);
    }

    #[test]
    fn line_size_dichotomy() {
        // m1 = m2 - 1 gives a binomial configuration
        let k5 = complete_graph(5).unwrap();
        let d = gras_space(5, 2).unwrap();
        let map = first_valid_gluing(&k5, &d).unwrap().unwrap();
        let g = glue(&k5, &d, &map).unwrap();
        let s = g.configuration_type().and_then(|t| t.binomial_signature());
        assert_eq!(s, BinomialSignature::new(4, 3));
        // otherwise line sizes are mixed
        let v = crate::families::veronesian(3, 3).unwrap();
        let map = first_valid_gluing(&v, &d).unwrap().unwrap();
        let g = glue(&v, &d, &map).unwrap();
        assert_eq!(g.configuration_type(), None);
        let mut sizes = g.line_sizes();
        sizes.sort();
        sizes.dedup();
        assert_eq!(sizes, vec![3, 4]);
    }

    fn arb_pls(max_points: usize) -> impl Strategy<Value = IncidenceStructure> {
        (
            1..=max_points,
            proptest::collection::vec(proptest::collection::btree_set(0..max_points, 1..4), 0..8),
        )
            .prop_map(|(nu, candidates)| {
                // keep candidate lines that stay inside the point set and
                // meet every kept line in at most one point
                let mut lines: Vec<Vec<usize>> = Vec::new();
                for c in candidates {
                    let c: Vec<usize> = c.into_iter().filter(|&p| p < nu).collect();
                    if c.is_empty() {
                        continue;
                    }
                    if lines.iter().all(|l| l.iter().filter(|p| c.contains(p)).count() <= 1) {
                        lines.push(c);
                    }
                }
                IncidenceStructure::from_indices(
                    (0..nu).map(|i| format!("p{i}")).collect(),
                    (0..lines.len()).map(|i| format!("l{i}")).collect(),
                    lines,
                )
                .unwrap()
            })
    }

    // greedily assigns each line an image unused by its concurrent lines
    fn some_valid_map(
        k1: &IncidenceStructure,
        k2: &IncidenceStructure,
        choices: &[usize],
    ) -> Option<GluingMap> {
        let mut images: Vec<Point> = Vec::new();
        for l in k1.lines() {
            let banned: Vec<Point> = k1
                .points_on(l)
                .iter()
                .flat_map(|&p| k1.lines_through(p).iter())
                .filter(|m| m.0 < l.0)
                .map(|m| images[m.0])
                .collect();
            let free: Vec<Point> = k2.points().filter(|p| !banned.contains(p)).collect();
            if free.is_empty() {
                return None;
            }
            images.push(free[choices[l.0 % choices.len()] % free.len()]);
        }
        Some(validate_gluing(k1, k2, images).unwrap())
    }

    proptest! {
        #[test]
        fn glue_is_pls_with_hyperplane(
            k1 in arb_pls(6),
            k2 in arb_pls(6),
            choices in proptest::collection::vec(0usize..100, 1..8),
        ) {
            if let Some(map) = some_valid_map(&k1, &k2, &choices) {
                let g = glue(&k1, &k2, &map).unwrap();
                prop_assert!(g.is_partial_linear_space());
                let u2 = right_points(&k1, &k2);
                prop_assert!(is_hyperplane(&g, &u2).unwrap());
                let deep: Vec<&str> = crate::hyperplane::deep_lines(&g, &u2)
                    .unwrap()
                    .iter()
                    .map(|&l| g.line_name(l))
                    .collect();
                let expected: Vec<String> = k2.line_names().iter().map(|n| format!("{RIGHT}{n}")).collect();
                prop_assert_eq!(deep, expected.iter().map(String::as_str).collect::<Vec<_>>());
            }
        }

        #[test]
        fn random_bijections_satisfy_duality(seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let k4 = k4();
            let v = veblen();
            let map = random_gluing(&k4, &v, &mut rng).unwrap().unwrap();
            prop_assert!(map.is_bijective());
            prop_assert!(verify_duality(&k4, &v, &map).unwrap());
        }
    }

    #[test]
    fn foreign_map_rejected() {
        let k4 = k4();
        let v = veblen();
        let map = first_valid_gluing(&k4, &v).unwrap().unwrap();
        assert_eq!(glue(&v, &k4, &map), Err(GlueError::ForeignMap));
    }
}
