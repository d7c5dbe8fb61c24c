//! Fixtures shared by the benchmarks.

use binconf::families::{complete_graph, gras_space, veblen, veronesian};
use binconf::IncidenceStructure;

/// The Desargues configuration as `GrasSpace(5,2)`.
pub fn desargues() -> IncidenceStructure {
    gras_space(5, 2).expect("small parameters")
}

/// `K4` and the Veblen configuration, the smallest interesting gluing pair.
pub fn k4_veblen() -> (IncidenceStructure, IncidenceStructure) {
    (complete_graph(4).expect("small parameters"), veblen())
}

/// Structures of growing size for the isomorphism search.
pub fn iso_ladder() -> Vec<(String, IncidenceStructure)> {
    vec![
        ("V(3,3)".to_string(), veronesian(3, 3).expect("small parameters")),
        ("GS(7,3)".to_string(), gras_space(7, 3).expect("small parameters")),
        ("GS(9,4)".to_string(), gras_space(9, 4).expect("small parameters")),
    ]
}
