//! Developing a hexagon-decomposed surface into the upper half-plane.
//!
//! Hexagons are laid out along a spanning tree of the dual graph. Every
//! arc not in the tree contributes one face-pairing generator; these
//! generate the holonomy group freely. Group elements are handled as
//! reduced words in [`Letter`]s together with their matrices.

use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::{point_distance, Geodesic, GeodesicSegment, IdealPoint, Isometry, Point};
use crate::surface::{GeometricSurface, Slot};

/// Maximum allowed closure error of a laid-out hexagon.
pub const CLOSURE_TOL: f64 = 1e-8;
/// Face pairings must match arc endpoints to this hyperbolic distance.
pub const ARC_MATCH_TOL: f64 = 1e-9;
/// Boundary holonomies must reproduce boundary lengths to this tolerance.
pub const HOLONOMY_LENGTH_TOL: f64 = 1e-8;
const DET_TOL: f64 = 1e-12;
/// Default guard on the number of search nodes.
pub const DEFAULT_MAX_NODES: usize = 10_000_000;

/// A generator (even code) or its inverse (odd code).
pub type Letter = u16;

pub fn letter(generator: usize, inverse: bool) -> Letter {
    (2 * generator + inverse as usize) as Letter
}

pub fn inverse_letter(l: Letter) -> Letter {
    l ^ 1
}

pub fn inverse_word(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|&l| inverse_letter(l)).collect()
}

/// Free reduction of a word.
pub fn reduce_word(w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&inverse_letter(l)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Where the spanning tree starts and in which order slots are scanned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TreeChoice {
    pub root: usize,
    pub reverse_slots: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedHexagon {
    pub placement: Isometry,
    /// Frame at the start of each side, in cyclic order a0, b0, a1, b1, a2, b2.
    pub frames: [Isometry; 6],
    pub vertices: [Point; 6],
    pub closure_residual: f64,
}

impl PlacedHexagon {
    /// Oriented carrier of side `k` (0..6) and the side as a segment on it.
    pub fn side_segment(&self, k: usize, length: f64) -> GeodesicSegment {
        side_segment_from_frame(&self.frames[k], length)
    }
}

pub(crate) fn side_segment_from_frame(frame: &Isometry, length: f64) -> GeodesicSegment {
    let carrier = Geodesic {
        start: frame.apply_ideal(IdealPoint::Finite(0.0)),
        end: frame.apply_ideal(IdealPoint::Infinity),
    };
    let t0 = carrier.parameter_of(frame.apply_point(Point::I));
    GeodesicSegment { carrier, t0, t1: t0 + length }
}

/// Frames at the six corners of a right-angled hexagon whose first corner
/// sits at `i` with the first side running up the imaginary axis.
pub fn hexagon_frames(sides: [f64; 6]) -> ([Isometry; 6], f64) {
    let turn = Isometry::rotation(FRAC_PI_2);
    let mut frames = [Isometry::IDENTITY; 6];
    let mut f = Isometry::IDENTITY;
    for k in 0..6 {
        frames[k] = f;
        f = f * Isometry::translation(sides[k]) * turn;
    }
    (frames, f.distance_entrywise(&Isometry::IDENTITY))
}

/// Change of placement when crossing from slot `i` of a hexagon with
/// frames `from` into slot `j` of a hexagon with frames `to`.
pub fn edge_crossing(from: &[Isometry; 6], i: usize, to: &[Isometry; 6], j: usize, length: f64) -> Isometry {
    from[2 * i] * Isometry::rotation(PI) * Isometry::translation(-length) * to[2 * j].inverse()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub arc: usize,
    pub source: Slot,
    pub target: Slot,
    /// Maps the developed copy of the target side onto the source side.
    pub matrix: Isometry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryHolonomy {
    pub component: usize,
    pub word: Vec<Letter>,
    pub matrix: Isometry,
    pub axis: Geodesic,
    pub translation_length: f64,
}

/// A boundary side of the fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSide {
    pub component: usize,
    pub hexagon: usize,
    pub side: usize,
    /// Position of the side's start along its component.
    pub offset: f64,
    pub length: f64,
    pub segment: GeodesicSegment,
}

#[derive(Debug, Clone)]
pub struct DevelopedDomain {
    pub surface: GeometricSurface,
    pub tree: TreeChoice,
    pub hexagons: Vec<PlacedHexagon>,
    pub tree_arcs: Vec<usize>,
    pub generators: Vec<Generator>,
    pub boundary: Vec<BoundaryHolonomy>,
    pub sides: Vec<DomainSide>,
    pub base_point: Point,
    pub radius: f64,
    arc_generator: Vec<Option<usize>>,
    letters: Vec<Isometry>,
}

/// Result of stepping across one arc slot in the tiling.
#[derive(Debug, Clone, Copy)]
pub struct Crossing {
    pub to: Slot,
    pub letter: Option<Letter>,
}

impl DevelopedDomain {
    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// Matrix of a single letter.
    pub fn letter_matrix(&self, l: Letter) -> &Isometry {
        &self.letters[l as usize]
    }

    pub fn word_matrix(&self, w: &[Letter]) -> Isometry {
        w.iter().fold(Isometry::IDENTITY, |acc, &l| acc * self.letters[l as usize])
    }

    pub fn letter_count(&self) -> usize {
        self.letters.len()
    }

    /// Stepping out of hexagon `hexagon` through arc slot `slot`: the copy
    /// `γ·P_h` is followed by `γ·g·P_{h'}`, with `g` the returned letter.
    pub fn cross(&self, hexagon: usize, slot: usize) -> Crossing {
        let g = self.surface.gluing(hexagon, slot);
        let letter = self.arc_generator[g.arc].map(|gen| {
            let forward = self.generators[gen].source == Slot::new(hexagon, slot);
            letter(gen, !forward)
        });
        Crossing { to: g.partner, letter }
    }

    /// Placement of the copy of hexagon `h` translated by group element `g`.
    pub fn tile_placement(&self, g: &Isometry, h: usize) -> Isometry {
        *g * self.hexagons[h].placement
    }

    pub fn arc_generator(&self, arc: usize) -> Option<usize> {
        self.arc_generator[arc]
    }
}

/// Hexagon frames moved so the centroid of the corners sits at `i`, which
/// keeps matrix entries small when crossing between far corners.
fn centered_frames(sides: [f64; 6]) -> ([Isometry; 6], f64) {
    let (frames, residual) = hexagon_frames(sides);
    let c = hyperboloid_centroid(&frames.map(|f| f.apply_point(Point::I)));
    let r = c.y.sqrt();
    let to_i = Isometry::new([[1.0 / r, -c.x / r], [0.0, r]]).expect("unit determinant");
    (frames.map(|f| to_i * f), residual)
}

fn hyperboloid_centroid(points: &[Point]) -> Point {
    let (mut t, mut x, mut z) = (0.0, 0.0, 0.0);
    for p in points {
        let r2 = p.x * p.x + p.y * p.y;
        t += (r2 + 1.0) / (2.0 * p.y);
        x += p.x / p.y;
        z += (r2 - 1.0) / (2.0 * p.y);
    }
    let norm = (t * t - x * x - z * z).sqrt();
    let (t, x, z) = (t / norm, x / norm, z / norm);
    let y = 1.0 / (t - z);
    Point { x: x * y, y }
}

pub fn develop(s: &GeometricSurface) -> Result<DevelopedDomain> {
    develop_with(s, TreeChoice::default())
}

pub fn develop_with(s: &GeometricSurface, tree: TreeChoice) -> Result<DevelopedDomain> {
    let h = s.hexagons.len();
    if tree.root >= h {
        return Err(Error::InvalidArgument(format!("root hexagon {} out of range", tree.root)));
    }
    let local: Vec<([Isometry; 6], f64)> = s.hexagons.iter().map(|hex| centered_frames(hex.sides())).collect();
    for (i, (_, res)) in local.iter().enumerate() {
        if *res > CLOSURE_TOL {
            return Err(Error::Numeric(format!("hexagon {i} fails to close (residual {res:e})")));
        }
    }
    let arc_len = s.arc_lengths();

    let mut placement: Vec<Option<Isometry>> = vec![None; h];
    let mut is_tree = vec![false; arc_len.len()];
    placement[tree.root] = Some(Isometry::IDENTITY);
    let mut queue = VecDeque::from([tree.root]);
    let slot_order: [usize; 3] = if tree.reverse_slots { [2, 1, 0] } else { [0, 1, 2] };
    while let Some(cur) = queue.pop_front() {
        let p = placement[cur].expect("queued hexagons are placed");
        for &k in &slot_order {
            let g = s.gluing(cur, k);
            let nb = g.partner.hexagon;
            if placement[nb].is_none() {
                let e = edge_crossing(&local[cur].0, k, &local[nb].0, g.partner.slot, arc_len[g.arc]);
                placement[nb] = Some(p * e);
                is_tree[g.arc] = true;
                queue.push_back(nb);
            }
        }
    }
    let placement: Vec<Isometry> = placement
        .into_iter()
        .map(|p| p.ok_or_else(|| Error::Structural("dual graph is disconnected".into())))
        .collect::<Result<_>>()?;

    let hexagons: Vec<PlacedHexagon> = (0..h)
        .map(|i| {
            let frames = local[i].0.map(|f| placement[i] * f);
            PlacedHexagon {
                placement: placement[i],
                frames,
                vertices: frames.map(|f| f.apply_point(Point::I)),
                closure_residual: local[i].1,
            }
        })
        .collect();

    let mut generators = Vec::new();
    let mut arc_generator = vec![None; arc_len.len()];
    for (arc, &(src, dst)) in s.combinatorics.pairs.iter().enumerate() {
        if is_tree[arc] {
            continue;
        }
        let e = edge_crossing(&local[src.hexagon].0, src.slot, &local[dst.hexagon].0, dst.slot, arc_len[arc]);
        let matrix = (placement[src.hexagon] * e * placement[dst.hexagon].inverse()).normalized();
        arc_generator[arc] = Some(generators.len());
        generators.push(Generator { arc, source: src, target: dst, matrix });
    }
    let topo = s.topology;
    if generators.len() != topo.rank() {
        return Err(Error::Numeric(format!(
            "expected {} generators, found {}",
            topo.rank(),
            generators.len()
        )));
    }
    let letters: Vec<Isometry> = generators.iter().flat_map(|g| [g.matrix, g.matrix.inverse().normalized()]).collect();
    let tree_arcs = (0..arc_len.len()).filter(|&a| is_tree[a]).collect();

    let all_vertices: Vec<Point> = hexagons[tree.root].vertices.to_vec();
    let base_point = hyperboloid_centroid(&all_vertices);
    let radius = hexagons
        .iter()
        .flat_map(|hx| hx.vertices)
        .map(|v| point_distance(base_point, v))
        .fold(0.0, f64::max);

    let mut domain = DevelopedDomain {
        surface: s.clone(),
        tree,
        hexagons,
        tree_arcs,
        generators,
        boundary: Vec::new(),
        sides: Vec::new(),
        base_point,
        radius,
        arc_generator,
        letters,
    };

    let mut sides = Vec::new();
    for (c, comp) in s.boundary.iter().enumerate() {
        for seg in &comp.segments {
            let segment = domain.hexagons[seg.hexagon].side_segment(2 * seg.side + 1, seg.length);
            sides.push(DomainSide {
                component: c,
                hexagon: seg.hexagon,
                side: seg.side,
                offset: seg.offset,
                length: seg.length,
                segment,
            });
        }
    }
    domain.sides = sides;

    let mut boundary = Vec::new();
    for (c, comp) in s.boundary.iter().enumerate() {
        let start = comp.segments[0];
        let mut word = Vec::new();
        let (mut hx, mut side) = (start.hexagon, start.side);
        let mut tile = Isometry::IDENTITY;
        loop {
            let step = domain.cross(hx, (side + 1) % 3);
            if let Some(l) = step.letter {
                word.push(l);
                tile = tile * *domain.letter_matrix(l);
            }
            hx = step.to.hexagon;
            side = step.to.slot;
            if (hx, side) == (start.hexagon, start.side) {
                break;
            }
        }
        let word = reduce_word(&word);
        let matrix = tile.normalized();
        let translation_length = matrix.translation_length()?;
        let axis = matrix.axis()?;
        boundary.push(BoundaryHolonomy { component: c, word, matrix, axis, translation_length });
    }
    domain.boundary = boundary;
    Ok(domain)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DevelopmentReport {
    pub arc_residuals: Vec<f64>,
    pub holonomy_length_residuals: Vec<f64>,
    pub holonomy_word_residuals: Vec<f64>,
    pub det_drifts: Vec<f64>,
    pub closure_residuals: Vec<f64>,
    pub pass: bool,
}

pub fn verify_development(d: &DevelopedDomain) -> DevelopmentReport {
    let s = &d.surface;
    let arc_len = s.arc_lengths();
    let arc_residuals: Vec<f64> = d
        .generators
        .iter()
        .map(|g| {
            let src = d.hexagons[g.source.hexagon].side_segment(2 * g.source.slot, arc_len[g.arc]);
            let dst = d.hexagons[g.target.hexagon].side_segment(2 * g.target.slot, arc_len[g.arc]);
            let (s0, s1) = src.endpoints();
            let (t0, t1) = dst.endpoints();
            let m = g.matrix;
            point_distance(m.apply_point(t0), s1).max(point_distance(m.apply_point(t1), s0))
        })
        .collect();
    let holonomy_length_residuals: Vec<f64> = d
        .boundary
        .iter()
        .map(|b| match b.matrix.translation_length() {
            Ok(l) => (l - s.boundary[b.component].length).abs(),
            Err(_) => f64::INFINITY,
        })
        .collect();
    let holonomy_word_residuals: Vec<f64> = d
        .boundary
        .iter()
        .map(|b| {
            let product = b.word.iter().fold(Isometry::IDENTITY, |acc, &l| {
                let g = &d.generators[l as usize / 2].matrix;
                let g = if l & 1 == 1 { g.inverse() } else { *g };
                acc * g
            });
            product.distance_entrywise(&b.matrix) / b.matrix.max_entry().max(1.0)
        })
        .collect();
    let det_drifts: Vec<f64> = d
        .generators
        .iter()
        .map(|g| g.matrix)
        .chain(d.boundary.iter().map(|b| b.matrix))
        .chain(d.hexagons.iter().map(|h| h.placement))
        .map(|m| m.det_drift())
        .collect();
    let closure_residuals: Vec<f64> = d.hexagons.iter().map(|h| h.closure_residual).collect();
    let pass = arc_residuals.iter().all(|&r| r <= ARC_MATCH_TOL)
        && holonomy_length_residuals.iter().all(|&r| r <= HOLONOMY_LENGTH_TOL)
        && holonomy_word_residuals.iter().all(|&r| r <= 1e-12)
        && det_drifts.iter().all(|&r| r <= DET_TOL)
        && closure_residuals.iter().all(|&r| r <= CLOSURE_TOL);
    DevelopmentReport {
        arc_residuals,
        holonomy_length_residuals,
        holonomy_word_residuals,
        det_drifts,
        closure_residuals,
        pass,
    }
}

/// One seed lift per boundary component: the holonomy axis and holonomy.
pub fn boundary_lifts_seed(d: &DevelopedDomain) -> Vec<(usize, Geodesic, Isometry)> {
    d.boundary.iter().map(|b| (b.component, b.axis, b.matrix)).collect()
}

/// A group element met during a breadth-first search of reduced words.
#[derive(Debug, Clone, PartialEq)]
pub struct Tile {
    pub word: Vec<Letter>,
    pub element: Isometry,
    /// Distance from the base point to its image.
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct TileBall {
    pub radius: f64,
    /// Longest reduced word among the elements inside the ball.
    pub depth: usize,
    pub tiles: Vec<Tile>,
}

/// All reduced words whose element moves the base point at most `radius`,
/// sorted by (distance, word).
///
/// A geodesic from the base point to `g·base` runs through the tiles of
/// every prefix of `g`, so each prefix moves the base point at most
/// `radius + domain radius`; nodes within that slack are expanded.
pub fn tile_ball(d: &DevelopedDomain, radius: f64, max_nodes: usize) -> Result<TileBall> {
    let base = d.base_point;
    let slack = d.radius;
    let n_letters = d.letter_count() as Letter;
    let mut all = vec![Tile { word: Vec::new(), element: Isometry::IDENTITY, distance: 0.0 }];
    let mut frontier: Vec<usize> = vec![0];
    let mut visited = 1usize;
    while !frontier.is_empty() {
        let children: Vec<Tile> = frontier
            .par_iter()
            .flat_map_iter(|&idx| {
                let parent = &all[idx];
                let last = parent.word.last().copied();
                (0..n_letters)
                    .filter(move |&l| last != Some(inverse_letter(l)))
                    .filter_map(move |l| {
                        let element = parent.element * *d.letter_matrix(l);
                        let distance = point_distance(base, element.apply_point(base));
                        (distance <= radius + slack).then(|| {
                            let mut word = parent.word.clone();
                            word.push(l);
                            Tile { word, element, distance }
                        })
                    })
            })
            .collect();
        visited += frontier.len() * (n_letters as usize);
        if visited > max_nodes || all.len() + children.len() > max_nodes {
            let nearest = children.iter().map(|t| t.distance).fold(f64::INFINITY, f64::min);
            let reached = (nearest - slack).clamp(0.0, radius);
            return Err(Error::Resource { limit: max_nodes, reached });
        }
        let start = all.len();
        all.extend(children);
        frontier = (start..all.len()).collect();
    }
    all.retain(|t| t.distance <= radius);
    let depth = all.iter().map(|t| t.word.len()).max().unwrap_or(0);
    all.sort_by(|a, b| a.distance.total_cmp(&b.distance).then_with(|| a.word.cmp(&b.word)));
    Ok(TileBall { radius, depth, tiles: all })
}

/// Every reduced word of length at most `max_len`, without pruning.
pub fn all_words(d: &DevelopedDomain, max_len: usize) -> Vec<Tile> {
    let base = d.base_point;
    let n_letters = d.letter_count() as Letter;
    let mut all = vec![Tile { word: Vec::new(), element: Isometry::IDENTITY, distance: 0.0 }];
    let mut level = 0..1;
    for _ in 0..max_len {
        let mut next = Vec::new();
        for idx in level.clone() {
            let last = all[idx].word.last().copied();
            for l in 0..n_letters {
                if last == Some(inverse_letter(l)) {
                    continue;
                }
                let element = all[idx].element * *d.letter_matrix(l);
                let mut word = all[idx].word.clone();
                word.push(l);
                next.push(Tile { word, distance: point_distance(base, element.apply_point(base)), element });
            }
        }
        let start = all.len();
        all.extend(next);
        level = start..all.len();
    }
    all
}
