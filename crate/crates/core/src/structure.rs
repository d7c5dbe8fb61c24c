//! Finite incidence structures, configuration types and duality.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::binomial::checked_binomial;
use crate::bitmatrix::BitMatrix;

/// Index of a point inside one particular [`IncidenceStructure`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(pub usize);

/// Index of a line inside one particular [`IncidenceStructure`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Line(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("invalid identifier {0:?}: identifiers are nonempty and contain no whitespace or ':'")]
    InvalidIdentifier(String),
    #[error("duplicate point identifier {0:?}")]
    DuplicatePoint(String),
    #[error("duplicate line identifier {0:?}")]
    DuplicateLine(String),
    #[error("identifier {0:?} names both a point and a line")]
    SharedIdentifier(String),
    #[error("line {line:?} references unknown point {point:?}")]
    UnknownIncidentPoint { line: String, point: String },
    #[error("point {point:?} listed twice on line {line:?}")]
    DuplicateIncidence { line: String, point: String },
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("unknown line {0:?}")]
    UnknownLine(String),
}

pub fn valid_identifier(id: &str) -> bool {
    !id.is_empty() && !id.chars().any(|c| c.is_whitespace() || c == ':')
}

/// A finite set of points, a finite set of lines and an incidence relation
/// between them.
///
/// Identifiers are opaque strings, unique within and across the two classes.
/// Lines are not identified with their point sets, so two lines may carry
/// the same points. Points and lines keep the order they were declared in.
#[derive(Clone)]
pub struct IncidenceStructure {
    point_names: Vec<String>,
    line_names: Vec<String>,
    point_index: HashMap<String, usize>,
    line_index: HashMap<String, usize>,
    line_points: Vec<Vec<Point>>,
    point_lines: Vec<Vec<Line>>,
    incidence: BitMatrix,
}

impl IncidenceStructure {
    /// Builds a structure from point identifiers and `(line, points)` pairs.
    pub fn build<P, L, I, Q>(points: P, lines: L) -> Result<Self, StructureError>
    where
        P: IntoIterator,
        P::Item: Into<String>,
        L: IntoIterator<Item = (I, Q)>,
        I: Into<String>,
        Q: IntoIterator,
        Q::Item: AsRef<str>,
    {
        let point_names: Vec<String> = points.into_iter().map(Into::into).collect();
        let mut point_index = HashMap::with_capacity(point_names.len());
        for (i, name) in point_names.iter().enumerate() {
            if !valid_identifier(name) {
                return Err(StructureError::InvalidIdentifier(name.clone()));
            }
            if point_index.insert(name.clone(), i).is_some() {
                return Err(StructureError::DuplicatePoint(name.clone()));
            }
        }
        let mut line_names = Vec::new();
        let mut line_points = Vec::new();
        for (name, members) in lines {
            let name: String = name.into();
            let mut on_line = Vec::new();
            for member in members {
                let member = member.as_ref();
                match point_index.get(member) {
                    Some(&p) => on_line.push(p),
                    None => {
                        return Err(StructureError::UnknownIncidentPoint {
                            line: name,
                            point: member.to_string(),
                        })
                    }
                }
            }
            line_names.push(name);
            line_points.push(on_line);
        }
        Self::from_indices(point_names, line_names, line_points)
    }

    /// Builds a structure whose lines are given as lists of point indices.
    pub fn from_indices(
        point_names: Vec<String>,
        line_names: Vec<String>,
        line_points: Vec<Vec<usize>>,
    ) -> Result<Self, StructureError> {
        assert_eq!(line_names.len(), line_points.len());
        let mut point_index = HashMap::with_capacity(point_names.len());
        for (i, name) in point_names.iter().enumerate() {
            if !valid_identifier(name) {
                return Err(StructureError::InvalidIdentifier(name.clone()));
            }
            if point_index.insert(name.clone(), i).is_some() {
                return Err(StructureError::DuplicatePoint(name.clone()));
            }
        }
        let mut line_index = HashMap::with_capacity(line_names.len());
        for (i, name) in line_names.iter().enumerate() {
            if !valid_identifier(name) {
                return Err(StructureError::InvalidIdentifier(name.clone()));
            }
            if point_index.contains_key(name) {
                return Err(StructureError::SharedIdentifier(name.clone()));
            }
            if line_index.insert(name.clone(), i).is_some() {
                return Err(StructureError::DuplicateLine(name.clone()));
            }
        }

        let mut incidence = BitMatrix::new(point_names.len(), line_names.len());
        let mut point_lines = vec![Vec::new(); point_names.len()];
        let mut sorted_lines = Vec::with_capacity(line_points.len());
        for (l, members) in line_points.into_iter().enumerate() {
            let mut members: Vec<Point> = members
                .into_iter()
                .map(|p| {
                    if p >= point_names.len() {
                        Err(StructureError::UnknownIncidentPoint {
                            line: line_names[l].clone(),
                            point: format!("#{p}"),
                        })
                    } else {
                        Ok(Point(p))
                    }
                })
                .collect::<Result<_, _>>()?;
            members.sort_unstable();
            for w in members.windows(2) {
                if w[0] == w[1] {
                    return Err(StructureError::DuplicateIncidence {
                        line: line_names[l].clone(),
                        point: point_names[w[0].0].clone(),
                    });
                }
            }
            for &p in &members {
                incidence.set(p.0, l);
                point_lines[p.0].push(Line(l));
            }
            sorted_lines.push(members);
        }

        Ok(IncidenceStructure {
            point_names,
            line_names,
            point_index,
            line_index,
            line_points: sorted_lines,
            point_lines,
            incidence,
        })
    }

    /// The structure with no points and no lines.
    pub fn empty() -> Self {
        Self::from_indices(Vec::new(), Vec::new(), Vec::new()).expect("empty structure")
    }

    pub fn num_points(&self) -> usize {
        self.point_names.len()
    }

    pub fn num_lines(&self) -> usize {
        self.line_names.len()
    }

    /// Number of incident point-line pairs.
    pub fn num_incidences(&self) -> usize {
        self.line_points.iter().map(Vec::len).sum()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = Point> + '_ {
        (0..self.num_points()).map(Point)
    }

    pub fn lines(&self) -> impl ExactSizeIterator<Item = Line> + '_ {
        (0..self.num_lines()).map(Line)
    }

    pub fn point_name(&self, p: Point) -> &str {
        &self.point_names[p.0]
    }

    pub fn line_name(&self, l: Line) -> &str {
        &self.line_names[l.0]
    }

    pub fn point_names(&self) -> &[String] {
        &self.point_names
    }

    pub fn line_names(&self) -> &[String] {
        &self.line_names
    }

    pub fn point_named(&self, name: &str) -> Option<Point> {
        self.point_index.get(name).copied().map(Point)
    }

    pub fn line_named(&self, name: &str) -> Option<Line> {
        self.line_index.get(name).copied().map(Line)
    }

    /// Points on `l`, in declaration order of the points.
    pub fn points_on(&self, l: Line) -> &[Point] {
        &self.line_points[l.0]
    }

    /// Lines through `p`, in declaration order of the lines.
    pub fn lines_through(&self, p: Point) -> &[Line] {
        &self.point_lines[p.0]
    }

    #[inline]
    pub fn is_incident(&self, p: Point, l: Line) -> bool {
        self.incidence.get(p.0, l.0)
    }

    pub fn point_rank(&self, p: Point) -> usize {
        self.point_lines[p.0].len()
    }

    pub fn line_size(&self, l: Line) -> usize {
        self.line_points[l.0].len()
    }

    /// Rank of the point called `name`.
    pub fn point_rank_of(&self, name: &str) -> Result<usize, StructureError> {
        self.point_named(name)
            .map(|p| self.point_rank(p))
            .ok_or_else(|| StructureError::UnknownPoint(name.to_string()))
    }

    /// Size of the line called `name`.
    pub fn line_size_of(&self, name: &str) -> Result<usize, StructureError> {
        self.line_named(name)
            .map(|l| self.line_size(l))
            .ok_or_else(|| StructureError::UnknownLine(name.to_string()))
    }

    /// Identifiers of the lines through the point called `name`.
    pub fn lines_through_named(&self, name: &str) -> Result<Vec<&str>, StructureError> {
        let p =
            self.point_named(name).ok_or_else(|| StructureError::UnknownPoint(name.to_string()))?;
        Ok(self.lines_through(p).iter().map(|&l| self.line_name(l)).collect())
    }

    /// Identifiers of the points on the line called `name`.
    pub fn points_on_named(&self, name: &str) -> Result<Vec<&str>, StructureError> {
        let l =
            self.line_named(name).ok_or_else(|| StructureError::UnknownLine(name.to_string()))?;
        Ok(self.points_on(l).iter().map(|&p| self.point_name(p)).collect())
    }

    /// True when no two distinct points share two distinct lines.
    pub fn is_partial_linear_space(&self) -> bool {
        let mut seen = vec![usize::MAX; self.num_points()];
        for p in self.points() {
            for &l in self.lines_through(p) {
                for &q in self.points_on(l) {
                    if q == p {
                        continue;
                    }
                    if seen[q.0] == p.0 {
                        return false;
                    }
                    seen[q.0] = p.0;
                }
            }
        }
        true
    }

    /// The `(ν, ρ, β, κ)` parameters when this is a partial linear space with
    /// constant point rank and constant line size.
    ///
    /// An empty class reports rank (or size) zero, so a structure without
    /// lines has type `(ν, 0, 0, 0)`.
    pub fn configuration_type(&self) -> Option<ConfigurationType> {
        let rho = constant(self.point_lines.iter().map(Vec::len))?;
        let kappa = constant(self.line_points.iter().map(Vec::len))?;
        if !self.is_partial_linear_space() {
            return None;
        }
        Some(ConfigurationType { nu: self.num_points(), rho, beta: self.num_lines(), kappa })
    }

    /// The dual structure: lines become points and points become lines.
    /// Identifiers are kept.
    pub fn dual(&self) -> IncidenceStructure {
        let line_points =
            self.point_lines.iter().map(|ls| ls.iter().map(|l| l.0).collect()).collect();
        Self::from_indices(self.line_names.clone(), self.point_names.clone(), line_points)
            .expect("dual of a valid structure is valid")
    }

    /// Renames every point and line.
    pub fn renamed(
        &self,
        mut point: impl FnMut(&str) -> String,
        mut line: impl FnMut(&str) -> String,
    ) -> Result<IncidenceStructure, StructureError> {
        Self::from_indices(
            self.point_names.iter().map(|n| point(n)).collect(),
            self.line_names.iter().map(|n| line(n)).collect(),
            self.line_point_indices(),
        )
    }

    /// Lines as lists of point indices.
    pub fn line_point_indices(&self) -> Vec<Vec<usize>> {
        self.line_points.iter().map(|ps| ps.iter().map(|p| p.0).collect()).collect()
    }

    /// Incidence as a set of `(point id, line id)` pairs.
    pub fn incidence_pairs(&self) -> BTreeSet<(&str, &str)> {
        self.lines()
            .flat_map(|l| {
                self.points_on(l).iter().map(move |&p| (self.point_name(p), self.line_name(l)))
            })
            .collect()
    }

    /// Equality of identifier sets and incidence, ignoring declaration order.
    pub fn same_up_to_order(&self, other: &IncidenceStructure) -> bool {
        let ps: BTreeSet<&String> = self.point_names.iter().collect();
        let qs: BTreeSet<&String> = other.point_names.iter().collect();
        let ls: BTreeSet<&String> = self.line_names.iter().collect();
        let ms: BTreeSet<&String> = other.line_names.iter().collect();
        ps == qs && ls == ms && self.incidence_pairs() == other.incidence_pairs()
    }

    /// Point ranks in declaration order.
    pub fn point_ranks(&self) -> Vec<usize> {
        self.point_lines.iter().map(Vec::len).collect()
    }

    /// Line sizes in declaration order.
    pub fn line_sizes(&self) -> Vec<usize> {
        self.line_points.iter().map(Vec::len).collect()
    }
}

fn constant(mut values: impl Iterator<Item = usize>) -> Option<usize> {
    match values.next() {
        None => Some(0),
        Some(first) => values.all(|v| v == first).then_some(first),
    }
}

impl PartialEq for IncidenceStructure {
    fn eq(&self, other: &Self) -> bool {
        self.point_names == other.point_names
            && self.line_names == other.line_names
            && self.line_points == other.line_points
    }
}

impl Eq for IncidenceStructure {}

impl fmt::Debug for IncidenceStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for l in self.lines() {
            let pts: Vec<&str> = self.points_on(l).iter().map(|&p| self.point_name(p)).collect();
            m.entry(&self.line_name(l), &pts);
        }
        m.finish()?;
        write!(f, " on {} points", self.num_points())
    }
}

/// Parameters `(ν, ρ, β, κ)` of a configuration: `ν` points of rank `ρ` and
/// `β` lines of size `κ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfigurationType {
    pub nu: usize,
    pub rho: usize,
    pub beta: usize,
    pub kappa: usize,
}

impl ConfigurationType {
    pub fn new(nu: usize, rho: usize, beta: usize, kappa: usize) -> Self {
        ConfigurationType { nu, rho, beta, kappa }
    }

    /// Type of the dual configuration.
    pub fn dual(self) -> Self {
        ConfigurationType::new(self.beta, self.kappa, self.nu, self.rho)
    }

    /// `(k, m) = (ρ, κ)` when `ν = C(k+m-1, k)` and `β = C(k+m-1, m)`.
    pub fn binomial_signature(&self) -> Option<BinomialSignature> {
        let sig = BinomialSignature::new(self.rho, self.kappa)?;
        (sig.configuration_type()? == *self).then_some(sig)
    }
}

impl fmt::Display for ConfigurationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}_{} {}_{})", self.nu, self.rho, self.beta, self.kappa)
    }
}

/// The class `B(k, m)`: configurations with points of rank `k`, lines of size
/// `m`, `C(n, k)` points and `C(n, m)` lines where `n = k + m - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinomialSignature {
    pub k: usize,
    pub m: usize,
}

impl BinomialSignature {
    /// `None` unless both parameters are positive.
    pub fn new(k: usize, m: usize) -> Option<Self> {
        (k >= 1 && m >= 1).then_some(BinomialSignature { k, m })
    }

    /// Size of the ground set, `k + m - 1`.
    pub fn n(&self) -> usize {
        self.k + self.m - 1
    }

    pub fn num_points(&self) -> Option<usize> {
        let c = checked_binomial(self.n() as u64, self.k as u64)?;
        usize::try_from(c).ok()
    }

    pub fn num_lines(&self) -> Option<usize> {
        let c = checked_binomial(self.n() as u64, self.m as u64)?;
        usize::try_from(c).ok()
    }

    /// `None` only on arithmetic overflow.
    pub fn configuration_type(&self) -> Option<ConfigurationType> {
        Some(ConfigurationType::new(self.num_points()?, self.k, self.num_lines()?, self.m))
    }

    pub fn dual(self) -> Self {
        BinomialSignature { k: self.m, m: self.k }
    }
}

impl fmt::Display for BinomialSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} m={}", self.k, self.m)
    }
}
