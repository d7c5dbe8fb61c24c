//! Subspaces, hyperplanes, restrictions and reducts.
//!
//! A hyperplane `H` of `K` is a proper subspace that every line meets. Each
//! line then either lies in `H` (a deep line) or meets it in exactly one
//! point, written `A^∞`. The restriction `K↾H` keeps `H` and the deep lines;
//! the reduct `K \ H` keeps the remaining points and the other lines, each
//! shortened by its point at infinity.

use thiserror::Error;

use crate::glue::{validate_gluing, GlueError, GluingMap};
use crate::structure::{ConfigurationType, IncidenceStructure, Line, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HyperplaneError {
    #[error("point index {0} is out of range")]
    UnknownPoint(usize),
    #[error("the point set is not a subspace")]
    NotSubspace,
    #[error("the point set is not a hyperplane")]
    NotHyperplane,
    #[error("structure has {points} points; exhaustive hyperplane search is capped at {cap}")]
    TooLarge { points: usize, cap: usize },
    #[error("points at infinity do not form a valid gluing map: {0}")]
    Infinity(#[from] GlueError),
}

/// Knobs for hyperplane predicates and enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HyperplaneOptions {
    /// Accept the empty set as a hyperplane of a structure without lines.
    pub allow_empty: bool,
    /// Refuse exhaustive enumeration above this many points.
    pub max_points: usize,
}

impl Default for HyperplaneOptions {
    fn default() -> Self {
        HyperplaneOptions { allow_empty: false, max_points: 24 }
    }
}

fn membership(k: &IncidenceStructure, set: &[Point]) -> Result<Vec<bool>, HyperplaneError> {
    let mut member = vec![false; k.num_points()];
    for &p in set {
        if p.0 >= k.num_points() {
            return Err(HyperplaneError::UnknownPoint(p.0));
        }
        member[p.0] = true;
    }
    Ok(member)
}

fn subspace_mask(k: &IncidenceStructure, member: &[bool]) -> bool {
    k.lines().all(|l| {
        let pts = k.points_on(l);
        let inside = pts.iter().filter(|p| member[p.0]).count();
        inside < 2 || inside == pts.len()
    })
}

fn hyperplane_mask(k: &IncidenceStructure, member: &[bool], opts: HyperplaneOptions) -> bool {
    let size = member.iter().filter(|&&b| b).count();
    if size == k.num_points() {
        return false;
    }
    if size == 0 && !(opts.allow_empty && k.num_lines() == 0) {
        return false;
    }
    subspace_mask(k, member) && k.lines().all(|l| k.points_on(l).iter().any(|p| member[p.0]))
}

/// True when every line through two distinct points of `set` lies in `set`.
pub fn is_subspace(k: &IncidenceStructure, set: &[Point]) -> Result<bool, HyperplaneError> {
    Ok(subspace_mask(k, &membership(k, set)?))
}

/// True when `set` is a proper subspace met by every line.
pub fn is_hyperplane(k: &IncidenceStructure, set: &[Point]) -> Result<bool, HyperplaneError> {
    is_hyperplane_with(k, set, HyperplaneOptions::default())
}

pub fn is_hyperplane_with(
    k: &IncidenceStructure,
    set: &[Point],
    opts: HyperplaneOptions,
) -> Result<bool, HyperplaneError> {
    Ok(hyperplane_mask(k, &membership(k, set)?, opts))
}

/// Lines all of whose points lie in the subspace `set`.
pub fn deep_lines(k: &IncidenceStructure, set: &[Point]) -> Result<Vec<Line>, HyperplaneError> {
    let member = membership(k, set)?;
    if !subspace_mask(k, &member) {
        return Err(HyperplaneError::NotSubspace);
    }
    Ok(deep_lines_mask(k, &member))
}

fn deep_lines_mask(k: &IncidenceStructure, member: &[bool]) -> Vec<Line> {
    k.lines().filter(|&l| k.points_on(l).iter().all(|p| member[p.0])).collect()
}

/// `K↾H`: the points of the subspace with its deep lines. Identifiers are kept.
pub fn restriction(
    k: &IncidenceStructure,
    set: &[Point],
) -> Result<IncidenceStructure, HyperplaneError> {
    let member = membership(k, set)?;
    if !subspace_mask(k, &member) {
        return Err(HyperplaneError::NotSubspace);
    }
    Ok(induced(k, &member, &deep_lines_mask(k, &member)))
}

/// `K \ H`: the complement of the hyperplane with the non-deep lines, each
/// missing its point at infinity. Identifiers are kept.
pub fn reduct(
    k: &IncidenceStructure,
    set: &[Point],
) -> Result<IncidenceStructure, HyperplaneError> {
    let member = membership(k, set)?;
    if !hyperplane_mask(k, &member, HyperplaneOptions { allow_empty: true, ..Default::default() }) {
        return Err(HyperplaneError::NotHyperplane);
    }
    let outside: Vec<bool> = member.iter().map(|b| !b).collect();
    let lines: Vec<Line> =
        k.lines().filter(|&l| k.points_on(l).iter().any(|p| !member[p.0])).collect();
    Ok(induced(k, &outside, &lines))
}

/// Substructure on the marked points and the given lines, with incidence
/// restricted to them.
fn induced(k: &IncidenceStructure, keep: &[bool], lines: &[Line]) -> IncidenceStructure {
    let mut new_index = vec![usize::MAX; k.num_points()];
    let mut names = Vec::new();
    for p in k.points() {
        if keep[p.0] {
            new_index[p.0] = names.len();
            names.push(k.point_name(p).to_string());
        }
    }
    let line_names = lines.iter().map(|&l| k.line_name(l).to_string()).collect();
    let line_points = lines
        .iter()
        .map(|&l| k.points_on(l).iter().filter(|p| keep[p.0]).map(|p| new_index[p.0]).collect())
        .collect();
    IncidenceStructure::from_indices(names, line_names, line_points)
        .expect("substructure of a valid structure is valid")
}

/// The map `A ↦ A^∞` from the lines of the reduct to the points of the
/// restriction, as a gluing map between [`reduct`] and [`restriction`].
pub fn extract_infinity(
    k: &IncidenceStructure,
    set: &[Point],
) -> Result<GluingMap, HyperplaneError> {
    let member = membership(k, set)?;
    if !hyperplane_mask(k, &member, HyperplaneOptions { allow_empty: true, ..Default::default() }) {
        return Err(HyperplaneError::NotHyperplane);
    }
    let k1 = reduct(k, set)?;
    let k2 = restriction(k, set)?;
    let images = infinity_pairs(k, &member)
        .into_iter()
        .map(|(_, p)| {
            k2.point_named(k.point_name(p)).expect("hyperplane point is in the restriction")
        })
        .collect();
    Ok(validate_gluing(&k1, &k2, images)?)
}

/// `(A, A^∞)` for every non-deep line, in line order.
fn infinity_pairs(k: &IncidenceStructure, member: &[bool]) -> Vec<(Line, Point)> {
    k.lines()
        .filter(|&l| k.points_on(l).iter().any(|p| !member[p.0]))
        .map(|l| {
            let at_infinity = k
                .points_on(l)
                .iter()
                .copied()
                .find(|p| member[p.0])
                .expect("every line meets a hyperplane");
            (l, at_infinity)
        })
        .collect()
}

/// Configuration type of `K↾H`, if it has one.
pub fn hyperplane_is_configuration(
    k: &IncidenceStructure,
    set: &[Point],
) -> Result<Option<ConfigurationType>, HyperplaneError> {
    if !is_hyperplane(k, set)? {
        return Err(HyperplaneError::NotHyperplane);
    }
    Ok(restriction(k, set)?.configuration_type())
}

/// A hyperplane of a host structure together with its deep lines and the
/// point at infinity of every other line.
#[derive(Clone, Debug)]
pub struct HyperplaneView<'a> {
    host: &'a IncidenceStructure,
    points: Vec<Point>,
    deep_lines: Vec<Line>,
    infinity: Vec<(Line, Point)>,
}

impl<'a> HyperplaneView<'a> {
    pub fn new(host: &'a IncidenceStructure, set: &[Point]) -> Result<Self, HyperplaneError> {
        Self::new_with(host, set, HyperplaneOptions::default())
    }

    pub fn new_with(
        host: &'a IncidenceStructure,
        set: &[Point],
        opts: HyperplaneOptions,
    ) -> Result<Self, HyperplaneError> {
        let member = membership(host, set)?;
        if !hyperplane_mask(host, &member, opts) {
            return Err(HyperplaneError::NotHyperplane);
        }
        Ok(Self::from_mask(host, &member))
    }

    fn from_mask(host: &'a IncidenceStructure, member: &[bool]) -> Self {
        HyperplaneView {
            host,
            points: host.points().filter(|p| member[p.0]).collect(),
            deep_lines: deep_lines_mask(host, member),
            infinity: infinity_pairs(host, member),
        }
    }

    pub fn host(&self) -> &'a IncidenceStructure {
        self.host
    }

    /// Points of the hyperplane, sorted.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn deep_lines(&self) -> &[Line] {
        &self.deep_lines
    }

    /// `(A, A^∞)` for every line not contained in the hyperplane.
    pub fn infinity(&self) -> &[(Line, Point)] {
        &self.infinity
    }

    pub fn point_names(&self) -> Vec<&'a str> {
        self.points.iter().map(|&p| self.host.point_name(p)).collect()
    }

    pub fn restriction(&self) -> IncidenceStructure {
        restriction(self.host, &self.points).expect("view holds a hyperplane")
    }

    pub fn reduct(&self) -> IncidenceStructure {
        reduct(self.host, &self.points).expect("view holds a hyperplane")
    }

    pub fn configuration_type(&self) -> Option<ConfigurationType> {
        self.restriction().configuration_type()
    }
}

#[derive(Clone)]
struct SearchState {
    // 0 undecided, 1 in, 2 out
    assign: Vec<u8>,
    inside: Vec<usize>,
    outside: Vec<usize>,
}

const UNDECIDED: u8 = 0;
const IN: u8 = 1;
const OUT: u8 = 2;

impl SearchState {
    /// Assigns and propagates; `false` on conflict.
    fn decide(&mut self, k: &IncidenceStructure, p: Point, value: u8) -> bool {
        let mut queue = vec![(p, value)];
        while let Some((p, value)) = queue.pop() {
            match self.assign[p.0] {
                UNDECIDED => self.assign[p.0] = value,
                v if v == value => continue,
                _ => return false,
            }
            for &l in k.lines_through(p) {
                let size = k.line_size(l);
                if value == IN {
                    self.inside[l.0] += 1;
                    if self.inside[l.0] >= 2 {
                        // closure: the whole line joins
                        if self.outside[l.0] > 0 {
                            return false;
                        }
                        for &q in k.points_on(l) {
                            if self.assign[q.0] == UNDECIDED {
                                queue.push((q, IN));
                            }
                        }
                    }
                } else {
                    self.outside[l.0] += 1;
                    if self.outside[l.0] == size || self.inside[l.0] >= 2 {
                        return false;
                    }
                    // cover: the last free point must be in
                    if self.inside[l.0] == 0 && self.outside[l.0] + 1 == size {
                        if let Some(&q) =
                            k.points_on(l).iter().find(|q| self.assign[q.0] == UNDECIDED)
                        {
                            queue.push((q, IN));
                        }
                    }
                }
            }
        }
        true
    }
}

/// All hyperplanes of `K`, sorted by point set.
///
/// Depth-first over the points; taking two points of a line forces the rest
/// of it, and a line whose points are all excluded cuts the branch.
pub fn enumerate_hyperplanes(
    k: &IncidenceStructure,
    opts: HyperplaneOptions,
) -> Result<Vec<HyperplaneView<'_>>, HyperplaneError> {
    let sets = enumerate_hyperplane_sets(k, opts)?;
    Ok(sets
        .into_iter()
        .map(|set| {
            let mut member = vec![false; k.num_points()];
            for p in &set {
                member[p.0] = true;
            }
            HyperplaneView::from_mask(k, &member)
        })
        .collect())
}

/// Point sets of all hyperplanes, sorted lexicographically.
pub fn enumerate_hyperplane_sets(
    k: &IncidenceStructure,
    opts: HyperplaneOptions,
) -> Result<Vec<Vec<Point>>, HyperplaneError> {
    if k.num_points() > opts.max_points {
        return Err(HyperplaneError::TooLarge { points: k.num_points(), cap: opts.max_points });
    }
    let state = SearchState {
        assign: vec![UNDECIDED; k.num_points()],
        inside: vec![0; k.num_lines()],
        outside: vec![0; k.num_lines()],
    };
    // a line with no points can never be met
    if k.lines().any(|l| k.line_size(l) == 0) {
        return Ok(Vec::new());
    }
    let mut found = Vec::new();
    search(k, state, 0, opts, &mut found);
    found.sort();
    Ok(found)
}

fn search(
    k: &IncidenceStructure,
    state: SearchState,
    from: usize,
    opts: HyperplaneOptions,
    found: &mut Vec<Vec<Point>>,
) {
    let next = (from..k.num_points()).find(|&i| state.assign[i] == UNDECIDED);
    let Some(next) = next else {
        let set: Vec<Point> = k.points().filter(|p| state.assign[p.0] == IN).collect();
        let proper = set.len() < k.num_points();
        let nonempty = !set.is_empty() || (opts.allow_empty && k.num_lines() == 0);
        if proper && nonempty {
            found.push(set);
        }
        return;
    };
    for value in [IN, OUT] {
        let mut branch = state.clone();
        if branch.decide(k, Point(next), value) {
            search(k, branch, next + 1, opts, found);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete_graph, fano_plane, gras_space, veblen};

    fn pts(k: &IncidenceStructure, names: &[&str]) -> Vec<Point> {
        names.iter().map(|n| k.point_named(n).unwrap()).collect()
    }

    // every subset, filtered by the predicate
    fn naive(k: &IncidenceStructure, opts: HyperplaneOptions) -> Vec<Vec<Point>> {
        let n = k.num_points();
        let mut out = Vec::new();
        for mask in 0u64..(1 << n) {
            let set: Vec<Point> = (0..n).filter(|i| mask & (1 << i) != 0).map(Point).collect();
            if is_hyperplane_with(k, &set, opts).unwrap() {
                out.push(set);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn small_sets_are_subspaces() {
        let d = gras_space(5, 2).unwrap();
        assert!(is_subspace(&d, &[]).unwrap());
        for p in d.points() {
            assert!(is_subspace(&d, &[p]).unwrap());
        }
        // a line plus a point joinable to none of its points
        let h = pts(&d, &["{1,2}", "{1,3}", "{2,3}", "{4,5}"]);
        assert!(is_subspace(&d, &h).unwrap());
        // two points of a line without the third
        assert!(!is_subspace(&d, &pts(&d, &["{1,2}", "{1,3}"])).unwrap());
        assert_eq!(is_subspace(&d, &[Point(99)]), Err(HyperplaneError::UnknownPoint(99)));
    }

    #[test]
    fn hyperplane_predicate() {
        let d = gras_space(5, 2).unwrap();
        let all: Vec<Point> = d.points().collect();
        assert!(!is_hyperplane(&d, &all).unwrap());
        assert!(!is_hyperplane(&d, &[]).unwrap());
        let avoid5: Vec<Point> = d.points().filter(|&p| !d.point_name(p).contains('5')).collect();
        assert_eq!(avoid5.len(), 6);
        assert!(is_hyperplane(&d, &avoid5).unwrap());
    }

    #[test]
    fn empty_set_in_line_free_structure_needs_flag() {
        let k = IncidenceStructure::build(["a", "b"], Vec::<(String, Vec<String>)>::new()).unwrap();
        assert!(!is_hyperplane(&k, &[]).unwrap());
        let opts = HyperplaneOptions { allow_empty: true, ..Default::default() };
        assert!(is_hyperplane_with(&k, &[], opts).unwrap());
        assert_eq!(enumerate_hyperplane_sets(&k, opts).unwrap(), naive(&k, opts));
        assert_eq!(
            enumerate_hyperplane_sets(&k, Default::default()).unwrap(),
            naive(&k, Default::default())
        );
    }

    #[test]
    fn deep_lines_of_k4_hyperplane() {
        let k4 = complete_graph(4).unwrap();
        let h = pts(&k4, &["1", "2", "3"]);
        let deep: Vec<&str> =
            deep_lines(&k4, &h).unwrap().iter().map(|&l| k4.line_name(l)).collect();
        assert_eq!(deep, vec!["{1,2}", "{1,3}", "{2,3}"]);
        assert!(deep_lines(&k4, &pts(&k4, &["1"])).unwrap().is_empty());
        let veb = veblen();
        assert_eq!(deep_lines(&veb, &pts(&veb, &["p1", "p2"])), Err(HyperplaneError::NotSubspace));
    }

    #[test]
    fn restriction_to_everything_is_identity() {
        let d = gras_space(5, 2).unwrap();
        let all: Vec<Point> = d.points().collect();
        assert_eq!(restriction(&d, &all).unwrap(), d);
    }

    #[test]
    fn reduct_shortens_lines_by_one() {
        let d = gras_space(5, 2).unwrap();
        for view in enumerate_hyperplanes(&d, Default::default()).unwrap() {
            let r = view.reduct();
            assert!(r.lines().all(|l| r.line_size(l) == 2));
            assert!(view.infinity().iter().all(|&(l, p)| d.is_incident(p, l)));
            // incidence splits between the two parts plus the points at infinity
            let res = view.restriction();
            assert_eq!(
                d.num_incidences(),
                res.num_incidences() + r.num_incidences() + view.infinity().len()
            );
        }
        assert!(matches!(reduct(&d, &[Point(0)]), Err(HyperplaneError::NotHyperplane)));
    }

    #[test]
    fn enumeration_matches_naive_filter() {
        let corpus = [
            complete_graph(4).unwrap(),
            veblen(),
            fano_plane(),
            gras_space(5, 2).unwrap(),
            gras_space(4, 1).unwrap(),
        ];
        for k in &corpus {
            let got = enumerate_hyperplane_sets(k, Default::default()).unwrap();
            assert_eq!(got, naive(k, Default::default()));
        }
    }

    #[test]
    fn k4_and_fano_hyperplanes() {
        let k4 = complete_graph(4).unwrap();
        let hs = enumerate_hyperplane_sets(&k4, Default::default()).unwrap();
        assert_eq!(hs.len(), 4);
        assert!(hs.iter().all(|h| h.len() == 3));

        let fano = fano_plane();
        let hs = enumerate_hyperplane_sets(&fano, Default::default()).unwrap();
        let mut lines: Vec<Vec<Point>> = fano.lines().map(|l| fano.points_on(l).to_vec()).collect();
        lines.sort();
        assert_eq!(hs, lines);
    }

    #[test]
    fn desargues_has_a_non_configuration_hyperplane() {
        let d = gras_space(5, 2).unwrap();
        let h = pts(&d, &["{1,2}", "{1,3}", "{2,3}", "{4,5}"]);
        assert!(is_hyperplane(&d, &h).unwrap());
        assert_eq!(hyperplane_is_configuration(&d, &h).unwrap(), None);
        let mut ranks = restriction(&d, &h).unwrap().point_ranks();
        ranks.sort();
        assert_eq!(ranks, vec![0, 1, 1, 1]);
    }

    #[test]
    fn veblen_line_hyperplane() {
        // any two Veblen lines meet, so a line is met by every other line
        let v = veblen();
        let h = pts(&v, &["p1", "p2", "p3"]);
        assert!(is_hyperplane(&v, &h).unwrap());
        assert_eq!(
            hyperplane_is_configuration(&v, &h).unwrap(),
            Some(ConfigurationType::new(3, 1, 1, 3))
        );
        let not_sub = pts(&v, &["p1", "p2"]);
        assert_eq!(hyperplane_is_configuration(&v, &not_sub), Err(HyperplaneError::NotHyperplane));
        let hs = enumerate_hyperplane_sets(&v, Default::default()).unwrap();
        assert_eq!(hs, naive(&v, Default::default()));
        for h in &hs {
            let t = hyperplane_is_configuration(&v, h).unwrap();
            let r = restriction(&v, h).unwrap();
            assert_eq!(t, r.configuration_type());
        }
    }

    #[test]
    fn size_cap() {
        let big = gras_space(7, 3).unwrap();
        assert_eq!(
            enumerate_hyperplane_sets(&big, Default::default()).unwrap_err(),
            HyperplaneError::TooLarge { points: 35, cap: 24 }
        );
    }

    #[test]
    fn grassmannian_hyperplane_restriction_type() {
        let d = gras_space(5, 2).unwrap();
        let avoid5: Vec<Point> = d.points().filter(|&p| !d.point_name(p).contains('5')).collect();
        assert_eq!(
            hyperplane_is_configuration(&d, &avoid5).unwrap(),
            Some(ConfigurationType::new(6, 2, 4, 3))
        );
        let inf = extract_infinity(&d, &avoid5).unwrap();
        for (line, point) in inf.pairs() {
            // A^∞ = A \ {5}
            let expected = line.replace(",5", "");
            assert_eq!(point, expected);
        }
    }
}
