//! Recovering a one-holed torus from the start of its simple orthospectrum.

use serde::{Deserialize, Serialize};

use crate::develop::{develop, DevelopedDomain};
use crate::enumerate::{enumerate_orthogeodesics, intersection_count, intersection_count_with, EnumParams, IntersectionOracle, Orthogeodesic};
use crate::error::{Error, Result};
use crate::spectra::{compare, simple_orthospectrum, Comparison, GROUPING_TOL};
use crate::surface::{builtin_surface, Builtin, GeometricSurface};

/// Tolerance for comparing simple spectra in the round trip.
pub const ROUNDTRIP_TOL: f64 = 1e-8;
const PREDICATE_SLACK: f64 = 1e-9;

/// The `k` shortest simple orthogeodesics, provided the enumeration at
/// `cutoff` certifies them.
pub fn shortest_simple(s: &GeometricSurface, k: usize, cutoff: f64) -> Result<Vec<Orthogeodesic>> {
    let d = develop(s)?;
    shortest_simple_in(&d, k, cutoff).map(|(list, _)| list)
}

fn shortest_simple_in(d: &DevelopedDomain, k: usize, cutoff: f64) -> Result<(Vec<Orthogeodesic>, Vec<Orthogeodesic>)> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let all = enumerate_orthogeodesics(d, &EnumParams::new(cutoff)?)?;
    let simple: Vec<Orthogeodesic> = all.iter().filter(|o| o.simple).cloned().collect();
    match simple.get(k - 1) {
        Some(o) if o.length + GROUPING_TOL <= cutoff => Ok((simple.into_iter().take(k).collect(), all)),
        _ => Err(Error::NeedsLargerCutoff { cutoff, suggested: 2.0 * cutoff }),
    }
}

/// As [`shortest_simple`], doubling the cutoff from `start` as needed.
pub fn shortest_simple_adaptive(s: &GeometricSurface, k: usize, start: f64) -> Result<Vec<Orthogeodesic>> {
    let d = develop(s)?;
    let mut cutoff = start;
    loop {
        match shortest_simple_in(&d, k, cutoff) {
            Err(Error::NeedsLargerCutoff { suggested, .. }) => cutoff = suggested,
            other => return other.map(|(list, _)| list),
        }
    }
}

pub fn disjointness_check(d: &DevelopedDomain, a: &Orthogeodesic, b: &Orthogeodesic) -> Result<usize> {
    intersection_count(d, a, b)
}

/// The one-holed torus whose canonical decomposition arcs have these lengths.
pub fn reconstruct_torus(t1: f64, t2: f64, t3: f64) -> Result<GeometricSurface> {
    builtin_surface(Builtin::OneHoledTorus, &[t1, t2, t3])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub lengths: [f64; 3],
    /// Intersection counts for the pairs (1,2), (1,3), (2,3).
    pub intersections: [usize; 3],
    /// The third and fourth simple lengths agree within grouping tolerance.
    pub tie: bool,
    pub reconstructed: Vec<f64>,
    pub comparison: Comparison,
    /// Simple orthogeodesics crossing one of the two shortest that are not
    /// longer than the third shortest length.
    pub predicate_violations: Vec<f64>,
    pub predicate_checked: usize,
    pub pass: bool,
}

pub fn rigidity_roundtrip(s: &GeometricSurface, cutoff: f64) -> Result<RigidityReport> {
    let topo = s.topology;
    if (topo.genus, topo.boundary) != (1, 1) {
        return Err(Error::TopologyMismatch {
            declared_genus: 1,
            declared_boundary: 1,
            declared_hexagons: 2,
            genus: topo.genus,
            boundary: topo.boundary,
            hexagons: s.hexagons.len(),
        });
    }
    let d = develop(s)?;
    let mut search = cutoff;
    let (four, all) = loop {
        match shortest_simple_in(&d, 4, search) {
            Err(Error::NeedsLargerCutoff { suggested, .. }) => search = suggested,
            other => break other?,
        }
    };
    let lengths = [four[0].length, four[1].length, four[2].length];
    let tie = (four[3].length - lengths[2]).abs() <= GROUPING_TOL;

    let longest = all.iter().filter(|o| o.simple).map(|o| o.length).fold(lengths[2], f64::max);
    let oracle = IntersectionOracle::new(&d, longest)?;
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut intersections = [0; 3];
    for (slot, &(i, j)) in pairs.iter().enumerate() {
        intersections[slot] = intersection_count_with(&oracle, &d, &four[i], &four[j])?;
    }

    let mut predicate_violations = Vec::new();
    let mut predicate_checked = 0;
    for o in all.iter().filter(|o| o.simple) {
        for short in &four[..2] {
            if o == short {
                continue;
            }
            if intersection_count_with(&oracle, &d, o, short)? > 0 {
                predicate_checked += 1;
                if !(o.length > lengths[2] - PREDICATE_SLACK) {
                    predicate_violations.push(o.length);
                }
            }
        }
    }

    let rebuilt = reconstruct_torus(lengths[0], lengths[1], lengths[2])?;
    let comparison = compare(&simple_orthospectrum(s, cutoff)?, &simple_orthospectrum(&rebuilt, cutoff)?, ROUNDTRIP_TOL)?;
    let pass = intersections.iter().all(|&n| n == 0) && predicate_violations.is_empty() && comparison.equal;
    Ok(RigidityReport {
        lengths,
        intersections,
        tie,
        reconstructed: rebuilt.coords.coords().to_vec(),
        comparison,
        predicate_violations,
        predicate_checked,
        pass,
    })
}
