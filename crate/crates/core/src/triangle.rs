//! Pascal triangles of configurations.
//!
//! A triangle is an array of binomial configurations `K(m,k)` with point
//! rank `m` and line size `k`, so `K(m,k)` lies in `B(m,k)`, and every inner
//! cell is glued from its neighbours:
//!
//! ```text
//! K(m,k) = K(m,k-1) ⋊_∞ K(m-1,k)
//! ```
//!
//! Family triangles fill `1 <= m,k <= depth` from one of the three families
//! with their standard points at infinity. Custom triangles start from a
//! boundary row `K(2,k)` and column `K(m,2)` and choose every `∞` by a
//! [`GluingChooser`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::binomial::binomial;
use crate::families::{dual_veronesian, gras_space_any, parse_compact, veronesian, FamilyError};
use crate::glue::{
    decompose, first_valid_gluing, glue, random_gluing, right_points, validate_gluing_named,
    GlueError, GluingMap,
};
use crate::hyperplane::{deep_lines, is_hyperplane};
use crate::iso::{are_isomorphic, IsoError};
use crate::multiset::{Ground, Multiset};
use crate::structure::{BinomialSignature, IncidenceStructure, Point};

/// Largest depth accepted by the builders.
pub const MAX_DEPTH: usize = 6;

pub type Cell = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TriangleFamily {
    /// `K(m,k) = GrasSpace(m+k-1, k-1)`
    Grassmannian,
    /// `K(m,k) = V(k,m)`
    Veronesian,
    /// `K(m,k) = V*(m,k)`
    DualVeronesian,
}

impl TriangleFamily {
    pub const ALL: [TriangleFamily; 3] =
        [TriangleFamily::Grassmannian, TriangleFamily::Veronesian, TriangleFamily::DualVeronesian];

    /// The family member sitting at cell `(m,k)`.
    pub fn entry(&self, m: usize, k: usize) -> Result<IncidenceStructure, FamilyError> {
        match self {
            TriangleFamily::Grassmannian => gras_space_any(m + k - 1, k - 1),
            TriangleFamily::Veronesian => veronesian(k, m),
            TriangleFamily::DualVeronesian => dual_veronesian(m, k),
        }
    }

    /// Whether a point of `K(m,k)` lies in the hyperplane that carries
    /// `K(m-1,k)`.
    fn in_hyperplane(&self, m: usize, k: usize, point: &str) -> bool {
        match self {
            TriangleFamily::Grassmannian => {
                let last = (m + k - 1).to_string();
                !point[1..point.len() - 1].split(',').any(|a| a == last)
            }
            TriangleFamily::Veronesian => {
                parse_compact(&Ground::letters(k), point).count(k - 1) > 0
            }
            TriangleFamily::DualVeronesian => {
                parse_compact(&Ground::letters(m), point).count(m - 1) == 0
            }
        }
    }

    /// `∞` from a line of `K(m,k-1)` to a point of `K(m-1,k)`, by identifier.
    fn infinity(&self, m: usize, k: usize, line: &str) -> String {
        match self {
            // both sides are subsets of the first m+k-2 atoms
            TriangleFamily::Grassmannian => line.to_string(),
            TriangleFamily::Veronesian => {
                let ground = Ground::letters(k);
                let e = parse_compact(&ground, line);
                let pad = Multiset::power(&ground, k - 1, (m - 1 - e.cardinality()) as u32);
                e.mul(&pad).expect("same ground").compact()
            }
            TriangleFamily::DualVeronesian => {
                let ground = Ground::letters(m);
                let f = parse_compact(&ground, line);
                let a = Multiset::power(&ground, m - 1, f.count(m - 1));
                f.divide(&a).expect("divisible").compact()
            }
        }
    }
}

impl fmt::Display for TriangleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriangleFamily::Grassmannian => "grassmannian",
            TriangleFamily::Veronesian => "veronesian",
            TriangleFamily::DualVeronesian => "dual-veronesian",
        })
    }
}

impl FromStr for TriangleFamily {
    type Err = TriangleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grassmannian" | "gras" | "GS" => Ok(TriangleFamily::Grassmannian),
            "veronesian" | "V" => Ok(TriangleFamily::Veronesian),
            "dual-veronesian" | "V*" => Ok(TriangleFamily::DualVeronesian),
            _ => Err(TriangleError::UnknownFamily(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangleError {
    #[error("unknown triangle family {0:?}")]
    UnknownFamily(String),
    #[error("depth {depth} is outside 1..={max}")]
    Depth { depth: usize, max: usize },
    #[error("boundary {which} has {got} entries, expected {expected}")]
    BoundaryLength { which: &'static str, got: usize, expected: usize },
    #[error("boundary cell ({m},{k}) should lie in B({m},{k}) but has type {found}")]
    BoundarySignature { m: usize, k: usize, found: String },
    #[error("the row and column entries at (2,2) are not isomorphic")]
    CornerMismatch,
    #[error("no explicit gluing map given for cell ({m},{k})")]
    MissingMap { m: usize, k: usize },
    #[error("gluing at cell ({m},{k}): {source}")]
    Glue { m: usize, k: usize, source: GlueError },
    #[error("family triangle failed verification at {cells:?}")]
    Verification { cells: Vec<Cell> },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Iso(#[from] IsoError),
}

/// What happened when a cell was filled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellOutcome {
    /// Boundary entry given or generated directly.
    Boundary,
    Glued,
    /// The chooser found no valid bijection.
    NoValidGluing,
    /// A neighbour is missing.
    Blocked,
}

/// Picks the map `∞` used at a cell.
pub trait GluingChooser {
    fn choose(
        &mut self,
        cell: Cell,
        k1: &IncidenceStructure,
        k2: &IncidenceStructure,
    ) -> Result<Option<GluingMap>, TriangleError>;
}

/// Lexicographically first valid bijection.
#[derive(Clone, Copy, Debug, Default)]
pub struct FirstValid;

impl GluingChooser for FirstValid {
    fn choose(
        &mut self,
        (m, k): Cell,
        k1: &IncidenceStructure,
        k2: &IncidenceStructure,
    ) -> Result<Option<GluingMap>, TriangleError> {
        first_valid_gluing(k1, k2).map_err(|source| TriangleError::Glue { m, k, source })
    }
}

/// Valid bijections found by a randomized search with a fixed seed.
#[derive(Clone, Debug)]
pub struct SeededRandom {
    rng: ChaCha8Rng,
}

impl SeededRandom {
    pub fn new(seed: u64) -> Self {
        SeededRandom { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl GluingChooser for SeededRandom {
    fn choose(
        &mut self,
        (m, k): Cell,
        k1: &IncidenceStructure,
        k2: &IncidenceStructure,
    ) -> Result<Option<GluingMap>, TriangleError> {
        random_gluing(k1, k2, &mut self.rng).map_err(|source| TriangleError::Glue { m, k, source })
    }
}

/// Maps given per cell as `(line of K(m,k-1), point of K(m-1,k))` pairs.
#[derive(Clone, Debug, Default)]
pub struct ExplicitMaps {
    pub maps: BTreeMap<Cell, Vec<(String, String)>>,
}

impl GluingChooser for ExplicitMaps {
    fn choose(
        &mut self,
        (m, k): Cell,
        k1: &IncidenceStructure,
        k2: &IncidenceStructure,
    ) -> Result<Option<GluingMap>, TriangleError> {
        let pairs = self.maps.get(&(m, k)).ok_or(TriangleError::MissingMap { m, k })?;
        validate_gluing_named(k1, k2, pairs).map(Some).map_err(|source| TriangleError::Glue {
            m,
            k,
            source,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Family(TriangleFamily),
    Custom,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Family(family) => family.fmt(f),
            Provenance::Custom => f.write_str("custom"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConfigTriangle {
    depth: usize,
    first: usize,
    entries: BTreeMap<Cell, IncidenceStructure>,
    gluings: BTreeMap<Cell, GluingMap>,
    hyperplanes: BTreeMap<Cell, Vec<Point>>,
    outcomes: BTreeMap<Cell, CellOutcome>,
    provenance: Provenance,
}

impl ConfigTriangle {
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Smallest index of the array: 1 for family triangles, 2 for custom ones.
    pub fn first_index(&self) -> usize {
        self.first
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let r = self.first..=self.depth;
        r.clone().flat_map(move |m| r.clone().map(move |k| (m, k)))
    }

    pub fn entry(&self, m: usize, k: usize) -> Option<&IncidenceStructure> {
        self.entries.get(&(m, k))
    }

    /// `∞` gluing `K(m,k-1)` onto `K(m-1,k)`.
    pub fn gluing(&self, m: usize, k: usize) -> Option<&GluingMap> {
        self.gluings.get(&(m, k))
    }

    /// Points of `K(m,k)` forming the copy of `K(m-1,k)`.
    pub fn hyperplane(&self, m: usize, k: usize) -> Option<&[Point]> {
        self.hyperplanes.get(&(m, k)).map(Vec::as_slice)
    }

    pub fn outcome(&self, m: usize, k: usize) -> Option<&CellOutcome> {
        self.outcomes.get(&(m, k))
    }

    pub fn is_boundary(&self, m: usize, k: usize) -> bool {
        m == self.first || k == self.first
    }

    /// Replaces an entry, keeping the recorded gluing and hyperplane.
    pub fn set_entry(&mut self, m: usize, k: usize, entry: IncidenceStructure) {
        self.entries.insert((m, k), entry);
    }

    /// Cells that could not be filled.
    pub fn unfilled(&self) -> Vec<(Cell, CellOutcome)> {
        self.outcomes
            .iter()
            .filter(|(_, o)| matches!(o, CellOutcome::NoValidGluing | CellOutcome::Blocked))
            .map(|(&c, o)| (c, o.clone()))
            .collect()
    }
}

fn check_depth(depth: usize, min: usize) -> Result<(), TriangleError> {
    if depth < min || depth > MAX_DEPTH {
        return Err(TriangleError::Depth { depth, max: MAX_DEPTH });
    }
    Ok(())
}

/// Builds the family triangle of the given depth and verifies every cell.
pub fn build_family_triangle(
    family: TriangleFamily,
    depth: usize,
) -> Result<ConfigTriangle, TriangleError> {
    check_depth(depth, 1)?;
    let mut t = ConfigTriangle {
        depth,
        first: 1,
        entries: BTreeMap::new(),
        gluings: BTreeMap::new(),
        hyperplanes: BTreeMap::new(),
        outcomes: BTreeMap::new(),
        provenance: Provenance::Family(family),
    };
    for m in 1..=depth {
        for k in 1..=depth {
            t.entries.insert((m, k), family.entry(m, k)?);
        }
    }
    for m in 1..=depth {
        for k in 1..=depth {
            if m == 1 || k == 1 {
                t.outcomes.insert((m, k), CellOutcome::Boundary);
                continue;
            }
            let cell = &t.entries[&(m, k)];
            let hyperplane: Vec<Point> =
                cell.points().filter(|&p| family.in_hyperplane(m, k, cell.point_name(p))).collect();
            let k1 = &t.entries[&(m, k - 1)];
            let k2 = &t.entries[&(m - 1, k)];
            let pairs: Vec<(String, String)> =
                k1.line_names().iter().map(|l| (l.clone(), family.infinity(m, k, l))).collect();
            let map = validate_gluing_named(k1, k2, &pairs)
                .map_err(|source| TriangleError::Glue { m, k, source })?;
            t.hyperplanes.insert((m, k), hyperplane);
            t.gluings.insert((m, k), map);
            t.outcomes.insert((m, k), CellOutcome::Glued);
        }
    }
    let report = verify_triangle(&t);
    if !report.passed() {
        return Err(TriangleError::Verification { cells: report.failed_cells() });
    }
    Ok(t)
}

fn signature_of(k: &IncidenceStructure) -> Option<BinomialSignature> {
    k.configuration_type().and_then(|t| t.binomial_signature())
}

fn describe_type(k: &IncidenceStructure) -> String {
    k.configuration_type().map_or_else(|| "none".to_string(), |t| t.to_string())
}

/// Fills a triangle from a boundary row `K(2,2), K(2,3), ..., K(2,depth)`
/// and column `K(2,2), K(3,2), ..., K(depth,2)`.
///
/// A cell where the chooser finds no map is recorded, and every cell that
/// depends on it is marked blocked.
pub fn build_custom_triangle(
    boundary_row: Vec<IncidenceStructure>,
    boundary_column: Vec<IncidenceStructure>,
    chooser: &mut dyn GluingChooser,
) -> Result<ConfigTriangle, TriangleError> {
    let depth = boundary_row.len() + 1;
    check_depth(depth, 2)?;
    if boundary_column.len() != boundary_row.len() {
        return Err(TriangleError::BoundaryLength {
            which: "column",
            got: boundary_column.len(),
            expected: boundary_row.len(),
        });
    }
    for (i, entry) in boundary_row.iter().enumerate() {
        let (m, k) = (2, i + 2);
        if signature_of(entry) != BinomialSignature::new(m, k) {
            return Err(TriangleError::BoundarySignature { m, k, found: describe_type(entry) });
        }
    }
    for (i, entry) in boundary_column.iter().enumerate() {
        let (m, k) = (i + 2, 2);
        if signature_of(entry) != BinomialSignature::new(m, k) {
            return Err(TriangleError::BoundarySignature { m, k, found: describe_type(entry) });
        }
    }
    if !are_isomorphic(&boundary_row[0], &boundary_column[0])? {
        return Err(TriangleError::CornerMismatch);
    }

    let mut t = ConfigTriangle {
        depth,
        first: 2,
        entries: BTreeMap::new(),
        gluings: BTreeMap::new(),
        hyperplanes: BTreeMap::new(),
        outcomes: BTreeMap::new(),
        provenance: Provenance::Custom,
    };
    for (i, entry) in boundary_row.into_iter().enumerate() {
        t.entries.insert((2, i + 2), entry);
        t.outcomes.insert((2, i + 2), CellOutcome::Boundary);
    }
    for (i, entry) in boundary_column.into_iter().enumerate().skip(1) {
        t.entries.insert((i + 2, 2), entry);
        t.outcomes.insert((i + 2, 2), CellOutcome::Boundary);
    }
    for m in 3..=depth {
        for k in 3..=depth {
            let (Some(k1), Some(k2)) = (t.entries.get(&(m, k - 1)), t.entries.get(&(m - 1, k)))
            else {
                t.outcomes.insert((m, k), CellOutcome::Blocked);
                continue;
            };
            match chooser.choose((m, k), k1, k2)? {
                None => {
                    t.outcomes.insert((m, k), CellOutcome::NoValidGluing);
                }
                Some(map) => {
                    let glued = glue(k1, k2, &map).map_err(|source| TriangleError::Glue {
                        m,
                        k,
                        source,
                    })?;
                    t.hyperplanes.insert((m, k), right_points(k1, k2));
                    t.entries.insert((m, k), glued);
                    t.gluings.insert((m, k), map);
                    t.outcomes.insert((m, k), CellOutcome::Glued);
                }
            }
        }
    }
    Ok(t)
}

/// Results of the checks run on one cell. `None` means the check does not
/// apply (boundary cells, unfilled cells).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellReport {
    pub cell: Cell,
    pub present: bool,
    /// The entry lies in `B(m,k)`.
    pub signature: bool,
    /// The neighbours glued along the recorded map give a structure in
    /// which the second neighbour's points form a hyperplane whose deep
    /// lines are exactly its lines.
    pub hyperplane_law: Option<bool>,
    /// The entry splits at its recorded hyperplane into parts isomorphic
    /// to its neighbours.
    pub decomposition: Option<bool>,
    /// The glued neighbours are isomorphic to the entry.
    pub glue_isomorphic: Option<bool>,
    /// Point count equals the sum of the neighbours' point counts and
    /// `C(m+k-1, m)`.
    pub pascal: Option<bool>,
}

impl CellReport {
    pub fn passed(&self) -> bool {
        self.present
            && self.signature
            && [self.hyperplane_law, self.decomposition, self.glue_isomorphic, self.pascal]
                .iter()
                .all(|c| c.unwrap_or(true))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleReport {
    pub cells: Vec<CellReport>,
}

impl TriangleReport {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(CellReport::passed)
    }

    pub fn failed_cells(&self) -> Vec<Cell> {
        self.cells.iter().filter(|c| !c.passed()).map(|c| c.cell).collect()
    }
}

fn hyperplane_law(k1: &IncidenceStructure, k2: &IncidenceStructure, map: &GluingMap) -> bool {
    let Ok(glued) = glue(k1, k2, map) else {
        return false;
    };
    let u2 = right_points(k1, k2);
    if !is_hyperplane(&glued, &u2).unwrap_or(false) {
        return false;
    }
    let Ok(deep) = deep_lines(&glued, &u2) else {
        return false;
    };
    let first_right = k1.num_lines();
    deep.len() == k2.num_lines() && deep.iter().all(|l| l.0 >= first_right)
}

fn check_cell(t: &ConfigTriangle, m: usize, k: usize) -> CellReport {
    let mut report = CellReport {
        cell: (m, k),
        present: false,
        signature: false,
        hyperplane_law: None,
        decomposition: None,
        glue_isomorphic: None,
        pascal: None,
    };
    let Some(entry) = t.entry(m, k) else {
        return report;
    };
    report.present = true;
    report.signature = signature_of(entry) == BinomialSignature::new(m, k);
    if t.is_boundary(m, k) {
        return report;
    }
    let (Some(k1), Some(k2), Some(map), Some(h)) =
        (t.entry(m, k - 1), t.entry(m - 1, k), t.gluing(m, k), t.hyperplane(m, k))
    else {
        report.decomposition = Some(false);
        return report;
    };
    report.hyperplane_law = Some(hyperplane_law(k1, k2, map));
    report.glue_isomorphic =
        Some(glue(k1, k2, map).ok().and_then(|g| are_isomorphic(&g, entry).ok()).unwrap_or(false));
    report.decomposition = Some(match decompose(entry, h) {
        Ok(d) => {
            are_isomorphic(&d.reduct_part, k1).unwrap_or(false)
                && are_isomorphic(&d.hyperplane_part, k2).unwrap_or(false)
        }
        Err(_) => false,
    });
    let expected = binomial((m + k - 1) as u64, m as u64) as usize;
    report.pascal = Some(
        entry.num_points() == k1.num_points() + k2.num_points() && entry.num_points() == expected,
    );
    report
}

/// Runs every per-cell check.
pub fn verify_triangle(t: &ConfigTriangle) -> TriangleReport {
    TriangleReport { cells: t.cells().map(|(m, k)| check_cell(t, m, k)).collect() }
}
