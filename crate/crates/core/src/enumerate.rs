//! Enumeration of orthogeodesics and closed geodesics below a length cutoff.
//!
//! Orthogeodesics are common perpendiculars between a boundary side of the
//! fundamental domain and a translate of another boundary side. A hit is
//! kept only when both feet lie on the actual sides, which pins down one
//! lift per end and makes deduplication a matter of comparing endpoints.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::develop::{
    all_words, inverse_letter, inverse_word, reduce_word, tile_ball, DevelopedDomain, Letter, Tile, TileBall,
    DEFAULT_MAX_NODES,
};
use crate::error::{Error, Result};
use crate::plane::{common_perpendicular, point_distance, segment_crossing, GeodesicSegment, IdealPoint, Isometry, Perpendicular};

/// Slack allowed when testing that a foot lies on a boundary side.
const FOOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Endpoint {
    pub component: usize,
    /// Arclength position in `[0, length of component)`.
    pub position: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orthogeodesic {
    pub length: f64,
    pub start: Endpoint,
    pub end: Endpoint,
    pub simple: bool,
    pub self_intersections: usize,
    /// Group element carrying the end side of the domain to the lift's end.
    pub canonical_id: Vec<Letter>,
    /// A lift starting on a boundary side of the fundamental domain.
    pub lift: GeodesicSegment,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumParams {
    pub cutoff: f64,
    pub dedupe_tolerance: f64,
    /// Overrides the default search margin of twice the domain radius.
    pub prune_margin: Option<f64>,
    pub max_frontier: usize,
}

impl EnumParams {
    pub fn new(cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0) || !cutoff.is_finite() {
            return Err(Error::InvalidArgument(format!("cutoff must be positive and finite, got {cutoff}")));
        }
        Ok(EnumParams { cutoff, dedupe_tolerance: 1e-9, prune_margin: None, max_frontier: DEFAULT_MAX_NODES })
    }

    fn validate(&self) -> Result<()> {
        let ok = self.cutoff > 0.0
            && self.cutoff.is_finite()
            && self.dedupe_tolerance > 0.0
            && self.prune_margin.map_or(true, |m| m > 0.0)
            && self.max_frontier > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid enumeration parameters {self:?}")))
        }
    }

    fn search_radius(&self, d: &DevelopedDomain) -> f64 {
        self.cutoff + self.prune_margin.unwrap_or(2.0 * d.radius)
    }
}

#[derive(Debug, Clone)]
struct Hit {
    length: f64,
    start: Endpoint,
    end: Endpoint,
    word: Vec<Letter>,
    lift: GeodesicSegment,
}

fn wrap(position: f64, period: f64) -> f64 {
    let p = position.rem_euclid(period);
    if period - p < FOOT_TOL {
        0.0
    } else {
        p
    }
}

fn circular_close(a: f64, b: f64, period: f64, tol: f64) -> bool {
    let diff = (a - b).abs();
    diff <= tol || (period - diff).abs() <= tol
}

fn endpoint_cmp(a: &Endpoint, b: &Endpoint) -> Ordering {
    a.component.cmp(&b.component).then(a.position.total_cmp(&b.position))
}

/// Precomputed data for one boundary side of the domain.
struct SideFrame {
    segment: GeodesicSegment,
    to_axis: Isometry,
    component: usize,
    offset: f64,
}

struct Searcher<'a> {
    d: &'a DevelopedDomain,
    sides: Vec<SideFrame>,
    periods: Vec<f64>,
    cutoff: f64,
}

impl<'a> Searcher<'a> {
    fn new(d: &'a DevelopedDomain, cutoff: f64) -> Self {
        let sides = d
            .sides
            .iter()
            .map(|s| SideFrame {
                segment: s.segment,
                to_axis: s.segment.carrier.normalizer().inverse(),
                component: s.component,
                offset: s.offset,
            })
            .collect();
        let periods = d.surface.boundary.iter().map(|c| c.length).collect();
        Searcher { d, sides, periods, cutoff }
    }

    fn hits_for(&self, tile: &Tile) -> Vec<Hit> {
        let mut out = Vec::new();
        let g = &tile.element;
        for (j, sj) in self.sides.iter().enumerate() {
            let moved = g.apply_segment(&sj.segment);
            for (i, si) in self.sides.iter().enumerate() {
                if tile.word.is_empty() && i == j {
                    continue;
                }
                // cheap screen in the frame where side i is the imaginary axis
                let m = si.to_axis * *g;
                let (IdealPoint::Finite(c), IdealPoint::Finite(e)) =
                    (m.apply_ideal(sj.segment.carrier.start), m.apply_ideal(sj.segment.carrier.end))
                else {
                    continue;
                };
                if !(c * e > 0.0) {
                    continue;
                }
                let (u, v) = if c.abs() < e.abs() { (c.abs(), e.abs()) } else { (e.abs(), c.abs()) };
                let approx = 2.0 * (u / v).sqrt().atanh();
                if !(approx <= self.cutoff + 1e-6) {
                    continue;
                }
                let foot = 0.5 * (u * v).ln();
                if foot < si.segment.t0 - 1e-6 || foot > si.segment.t1 + 1e-6 {
                    continue;
                }
                let Perpendicular::Perp(p) = common_perpendicular(&si.segment.carrier, &moved.carrier) else {
                    continue;
                };
                if p.length > self.cutoff {
                    continue;
                }
                let inside = |t: f64, s: &GeodesicSegment| t >= s.t0 - FOOT_TOL && t <= s.t1 + FOOT_TOL;
                if !inside(p.foot1, &si.segment) || !inside(p.foot2, &moved) {
                    continue;
                }
                let start = Endpoint {
                    component: si.component,
                    position: wrap(si.offset + (p.foot1 - si.segment.t0), self.periods[si.component]),
                };
                let end = Endpoint {
                    component: sj.component,
                    position: wrap(sj.offset + (p.foot2 - moved.t0), self.periods[sj.component]),
                };
                let Ok(lift) = GeodesicSegment::from_points(p.point1, p.point2) else {
                    continue;
                };
                out.push(Hit { length: p.length, start, end, word: tile.word.clone(), lift });
            }
        }
        out
    }

    fn orient(&self, mut h: Hit) -> Hit {
        if endpoint_cmp(&h.end, &h.start) == Ordering::Less {
            let back = self.d.word_matrix(&h.word).inverse();
            let (p, q) = h.lift.endpoints();
            h.lift = GeodesicSegment::from_points(back.apply_point(q), back.apply_point(p)).unwrap_or(h.lift);
            h.word = reduce_word(&inverse_word(&h.word));
            std::mem::swap(&mut h.start, &mut h.end);
        }
        h
    }

    fn same_arc(&self, a: &Hit, b: &Hit, tol: f64) -> bool {
        let close = |x: &Endpoint, y: &Endpoint| {
            x.component == y.component && circular_close(x.position, y.position, self.periods[x.component], tol)
        };
        (a.length - b.length).abs() <= tol
            && ((close(&a.start, &b.start) && close(&a.end, &b.end)) || (close(&a.start, &b.end) && close(&a.end, &b.start)))
    }

    fn collect(&self, tiles: &[Tile], tol: f64) -> Vec<Hit> {
        let hits: Vec<Hit> = tiles.par_iter().flat_map_iter(|t| self.hits_for(t)).map(|h| self.orient(h)).collect();
        self.dedupe(hits, tol)
    }

    /// Hits of every reduced word of length at most `max_len` that starts
    /// with the word of `tile`, walked depth first.
    fn walk(&self, tile: Tile, max_len: usize, out: &mut Vec<Hit>) {
        out.extend(self.hits_for(&tile).into_iter().map(|h| self.orient(h)));
        if tile.word.len() == max_len {
            return;
        }
        let last = tile.word.last().copied();
        for l in 0..self.d.letter_count() as Letter {
            if last == Some(inverse_letter(l)) {
                continue;
            }
            let element = tile.element * *self.d.letter_matrix(l);
            let mut word = tile.word.clone();
            word.push(l);
            let distance = point_distance(self.d.base_point, element.apply_point(self.d.base_point));
            self.walk(Tile { word, element, distance }, max_len, out);
        }
    }

    fn dedupe(&self, mut hits: Vec<Hit>, tol: f64) -> Vec<Hit> {
        hits.sort_by(|a, b| {
            a.length
                .total_cmp(&b.length)
                .then_with(|| endpoint_cmp(&a.start, &b.start))
                .then_with(|| endpoint_cmp(&a.end, &b.end))
                .then_with(|| a.word.len().cmp(&b.word.len()))
                .then_with(|| a.word.cmp(&b.word))
        });
        let mut kept: Vec<Hit> = Vec::new();
        for h in hits {
            let dup = kept.iter().rev().take_while(|k| k.length >= h.length - tol).any(|k| self.same_arc(k, &h, tol));
            if !dup {
                kept.push(h);
            }
        }
        kept.sort_by(|a, b| {
            a.length
                .total_cmp(&b.length)
                .then_with(|| endpoint_cmp(&a.start, &b.start))
                .then_with(|| endpoint_cmp(&a.end, &b.end))
        });
        kept
    }
}

/// Counts crossings between lifts using a precomputed ball of group
/// elements around the base point.
pub struct IntersectionOracle<'a> {
    d: &'a DevelopedDomain,
    ball: TileBall,
}

impl<'a> IntersectionOracle<'a> {
    /// Supports arcs of length at most `max_length`.
    pub fn new(d: &'a DevelopedDomain, max_length: f64) -> Result<Self> {
        let ball = tile_ball(d, max_length + 2.0 * d.radius, DEFAULT_MAX_NODES)?;
        Ok(IntersectionOracle { d, ball })
    }

    fn from_ball(d: &'a DevelopedDomain, ball: TileBall) -> Self {
        IntersectionOracle { d, ball }
    }

    /// Translates a lift so that its midpoint is as close to the base point
    /// as any translate in the ball.
    fn rebase(&self, seg: &GeodesicSegment) -> GeodesicSegment {
        let base = self.d.base_point;
        let m = seg.midpoint();
        let dm = point_distance(base, m);
        let mut best = dm;
        let mut best_g = Isometry::IDENTITY;
        for t in &self.ball.tiles {
            if t.distance - dm > best {
                break;
            }
            let dist = point_distance(t.element.apply_point(base), m);
            if dist < best {
                best = dist;
                best_g = t.element;
            }
        }
        best_g.inverse().apply_segment(seg)
    }

    fn count_rebased(&self, a: &GeodesicSegment, b: &GeodesicSegment, skip_identity: bool) -> Result<usize> {
        let base = self.d.base_point;
        let (ma, mb) = (a.midpoint(), b.midpoint());
        let reach = 0.5 * (a.length() + b.length());
        let limit = point_distance(base, ma) + reach + point_distance(base, mb) + 1e-9;
        if limit > self.ball.radius + 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "arcs too long for an intersection ball of radius {}",
                self.ball.radius
            )));
        }
        let mut count = 0;
        for t in &self.ball.tiles {
            if t.distance > limit {
                break;
            }
            if skip_identity && t.word.is_empty() {
                continue;
            }
            if point_distance(ma, t.element.apply_point(mb)) > reach + 1e-9 {
                continue;
            }
            if segment_crossing(a, &t.element.apply_segment(b))?.is_some() {
                count += 1;
            }
        }
        Ok(count)
    }

    pub fn self_intersections(&self, seg: &GeodesicSegment) -> Result<usize> {
        let s = self.rebase(seg);
        Ok(self.count_rebased(&s, &s, true)? / 2)
    }

    pub fn crossings(&self, a: &GeodesicSegment, b: &GeodesicSegment) -> Result<usize> {
        self.count_rebased(&self.rebase(a), &self.rebase(b), false)
    }
}

fn finish(hits: Vec<Hit>, oracle: &IntersectionOracle) -> Result<Vec<Orthogeodesic>> {
    hits.into_par_iter()
        .map(|h| {
            let n = oracle.self_intersections(&h.lift)?;
            Ok(Orthogeodesic {
                length: h.length,
                start: h.start,
                end: h.end,
                simple: n == 0,
                self_intersections: n,
                canonical_id: h.word,
                lift: h.lift,
            })
        })
        .collect()
}

pub fn enumerate_orthogeodesics(d: &DevelopedDomain, p: &EnumParams) -> Result<Vec<Orthogeodesic>> {
    p.validate()?;
    let ball = tile_ball(d, p.search_radius(d), p.max_frontier)?;
    let searcher = Searcher::new(d, p.cutoff);
    let hits = searcher.collect(&ball.tiles, p.dedupe_tolerance);
    let oracle = if ball.radius >= p.cutoff + 2.0 * d.radius {
        IntersectionOracle::from_ball(d, ball)
    } else {
        IntersectionOracle::new(d, p.cutoff)?
    };
    finish(hits, &oracle)
}

/// Word length certified by the pruned search at `cutoff`: every group
/// element it could need has a reduced word at most this long.
pub fn certified_word_length(d: &DevelopedDomain, cutoff: f64) -> Result<usize> {
    Ok(tile_ball(d, cutoff + 2.0 * d.radius, DEFAULT_MAX_NODES)?.depth)
}

/// Unpruned reference enumeration over all reduced words up to `word_len`.
pub fn brute_force_orthogeodesics(d: &DevelopedDomain, word_len: usize, cutoff: f64) -> Result<Vec<Orthogeodesic>> {
    let searcher = Searcher::new(d, cutoff);
    let identity = Tile { word: Vec::new(), element: Isometry::IDENTITY, distance: 0.0 };
    let mut hits: Vec<Hit> = searcher.hits_for(&identity).into_iter().map(|h| searcher.orient(h)).collect();
    if word_len > 0 {
        let branches: Vec<Vec<Hit>> = (0..d.letter_count() as Letter)
            .into_par_iter()
            .map(|l| {
                let element = *d.letter_matrix(l);
                let distance = point_distance(d.base_point, element.apply_point(d.base_point));
                let mut out = Vec::new();
                searcher.walk(Tile { word: vec![l], element, distance }, word_len, &mut out);
                out
            })
            .collect();
        hits.extend(branches.into_iter().flatten());
    }
    let hits = searcher.dedupe(hits, 1e-9);
    let oracle = IntersectionOracle::new(d, cutoff)?;
    finish(hits, &oracle)
}

/// Self-intersection count of an enumerated orthogeodesic.
pub fn is_simple(d: &DevelopedDomain, o: &Orthogeodesic) -> Result<(bool, usize)> {
    let n = IntersectionOracle::new(d, o.length)?.self_intersections(&o.lift)?;
    Ok((n == 0, n))
}

fn same_orthogeodesic(d: &DevelopedDomain, a: &Orthogeodesic, b: &Orthogeodesic) -> bool {
    let tol = 1e-9;
    let close = |x: &Endpoint, y: &Endpoint| {
        x.component == y.component && circular_close(x.position, y.position, d.surface.boundary[x.component].length, tol)
    };
    (a.length - b.length).abs() <= tol
        && ((close(&a.start, &b.start) && close(&a.end, &b.end)) || (close(&a.start, &b.end) && close(&a.end, &b.start)))
}

/// Geometric intersection count of two distinct orthogeodesics.
pub fn intersection_count(d: &DevelopedDomain, a: &Orthogeodesic, b: &Orthogeodesic) -> Result<usize> {
    if same_orthogeodesic(d, a, b) {
        return Err(Error::InvalidArgument("intersection count needs two distinct orthogeodesics".into()));
    }
    IntersectionOracle::new(d, a.length.max(b.length))?.crossings(&a.lift, &b.lift)
}

/// Intersection count using a caller-supplied oracle.
pub fn intersection_count_with(
    oracle: &IntersectionOracle,
    d: &DevelopedDomain,
    a: &Orthogeodesic,
    b: &Orthogeodesic,
) -> Result<usize> {
    if same_orthogeodesic(d, a, b) {
        return Err(Error::InvalidArgument("intersection count needs two distinct orthogeodesics".into()));
    }
    oracle.crossings(&a.lift, &b.lift)
}

pub fn orthosystole(list: &[Orthogeodesic], cutoff: f64) -> Result<f64> {
    list.iter()
        .map(|o| o.length)
        .min_by(f64::total_cmp)
        .ok_or(Error::NeedsLargerCutoff { cutoff, suggested: 2.0 * cutoff })
}

/// Orthosystole with the cutoff doubled from 0.5 until something is found.
pub fn adaptive_orthosystole(d: &DevelopedDomain) -> Result<f64> {
    let mut cutoff = 0.5;
    loop {
        let list = enumerate_orthogeodesics(d, &EnumParams::new(cutoff)?)?;
        match orthosystole(&list, cutoff) {
            Ok(t) => return Ok(t),
            Err(Error::NeedsLargerCutoff { suggested, .. }) => cutoff = suggested,
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedGeodesic {
    pub length: f64,
    /// Lexicographically least cyclic rotation over the word and its inverse.
    pub word: Vec<Letter>,
}

fn cyclic_reduce(w: &[Letter]) -> Vec<Letter> {
    let mut w = reduce_word(w);
    while w.len() >= 2 && w[0] == inverse_letter(*w.last().unwrap()) {
        w.pop();
        w.remove(0);
    }
    w
}

fn least_rotation(w: &[Letter]) -> Vec<Letter> {
    (0..w.len())
        .map(|k| w[k..].iter().chain(&w[..k]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// Canonical form of the unoriented free homotopy class of a word.
pub fn cyclic_class(w: &[Letter]) -> Vec<Letter> {
    let w = cyclic_reduce(w);
    least_rotation(&w).min(least_rotation(&inverse_word(&w)))
}

fn is_proper_power(w: &[Letter]) -> bool {
    let n = w.len();
    (1..n).filter(|p| n % p == 0).any(|p| (0..n).all(|i| w[i] == w[(i + p) % n]))
}

fn closed_from_tiles(d: &DevelopedDomain, tiles: &[Tile], cutoff: f64) -> Vec<ClosedGeodesic> {
    let boundary: Vec<Vec<Letter>> = d.boundary.iter().map(|b| cyclic_class(&b.word)).collect();
    let classes: BTreeMap<Vec<Letter>, ()> = tiles
        .par_iter()
        .filter(|t| !t.word.is_empty())
        .filter_map(|t| {
            let len = t.element.translation_length().ok()?;
            // screen only; the length is recomputed from the shortest word
            if len > cutoff + 1e-6 {
                return None;
            }
            let class = cyclic_class(&t.word);
            if class.is_empty() || is_proper_power(&class) || boundary.contains(&class) {
                return None;
            }
            Some((class, ()))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let classes: BTreeMap<Vec<Letter>, f64> = classes
        .into_keys()
        .filter_map(|w| {
            let len = d.word_matrix(&w).translation_length().ok()?;
            (len <= cutoff).then_some((w, len))
        })
        .collect();
    let mut out: Vec<ClosedGeodesic> = classes.into_iter().map(|(word, length)| ClosedGeodesic { length, word }).collect();
    out.sort_by(|a, b| a.length.total_cmp(&b.length).then_with(|| a.word.cmp(&b.word)));
    out
}

/// Primitive essential closed geodesics of length at most `cutoff`,
/// each unoriented curve once. Boundary curves are not included.
pub fn enumerate_closed_geodesics(d: &DevelopedDomain, cutoff: f64) -> Result<Vec<ClosedGeodesic>> {
    let ball = tile_ball(d, cutoff + 2.0 * d.radius, DEFAULT_MAX_NODES)?;
    Ok(closed_from_tiles(d, &ball.tiles, cutoff))
}

pub fn enumerate_closed(d: &DevelopedDomain, cutoff: f64) -> Result<Vec<f64>> {
    Ok(enumerate_closed_geodesics(d, cutoff)?.into_iter().map(|c| c.length).collect())
}

/// Reference closed-geodesic enumeration over all words up to `word_len`.
pub fn brute_force_closed(d: &DevelopedDomain, word_len: usize, cutoff: f64) -> Vec<ClosedGeodesic> {
    closed_from_tiles(d, &all_words(d, word_len), cutoff)
}

pub fn systole(d: &DevelopedDomain) -> Result<f64> {
    let mut cutoff = 0.1;
    loop {
        if let Some(first) = enumerate_closed(d, cutoff)?.first() {
            return Ok(*first);
        }
        cutoff *= 2.0;
    }
}
