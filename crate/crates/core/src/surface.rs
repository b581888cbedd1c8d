//! Hexagon-decomposed surfaces: gluing combinatorics, coordinates and the
//! solved geometry they determine.
//!
//! A decomposition is a set of right-angled hexagons, each with arc slots
//! 0, 1, 2 and boundary sides between consecutive slots. All hexagons carry
//! the same cyclic orientation and every matched pair of slots is glued
//! reversing the induced side orientation, so the glued complex is always
//! orientable. Arc `n` is the `n`-th pair of the matching.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trig::{check_positive, solve_hexagon, RightHexagon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Topology {
    pub genus: usize,
    pub boundary: usize,
}

impl Topology {
    pub fn new(genus: usize, boundary: usize) -> Result<Self> {
        if boundary == 0 || 2 * genus + boundary <= 2 {
            return Err(Error::Domain(format!(
                "(g={genus}, b={boundary}) needs b >= 1 and negative Euler characteristic"
            )));
        }
        Ok(Topology { genus, boundary })
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.boundary as i64
    }

    pub fn arc_count(&self) -> usize {
        6 * self.genus + 3 * self.boundary - 6
    }

    pub fn hexagon_count(&self) -> usize {
        4 * self.genus + 2 * self.boundary - 4
    }

    /// Rank of the (free) fundamental group.
    pub fn rank(&self) -> usize {
        2 * self.genus + self.boundary - 1
    }

    pub fn area(&self) -> f64 {
        2.0 * std::f64::consts::PI * (-self.euler_characteristic()) as f64
    }
}

/// One arc slot of one hexagon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub hexagon: usize,
    pub slot: usize,
}

impl Slot {
    pub fn new(hexagon: usize, slot: usize) -> Self {
        Slot { hexagon, slot }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.hexagon, self.slot)
    }
}

/// The partner of a slot and the arc they form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gluing {
    pub partner: Slot,
    pub arc: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HexCombinatorics {
    pub hexagon_count: usize,
    pub pairs: Vec<(Slot, Slot)>,
}

impl HexCombinatorics {
    pub fn new(hexagon_count: usize, pairs: Vec<(Slot, Slot)>) -> Self {
        HexCombinatorics { hexagon_count, pairs }
    }

    pub fn arc_count(&self) -> usize {
        self.pairs.len()
    }

    /// Partner table indexed by `[hexagon][slot]`; fails on malformed input.
    pub fn gluing_table(&self) -> Result<Vec<[Gluing; 3]>> {
        let h = self.hexagon_count;
        if h == 0 {
            return Err(Error::Structural("no hexagons".into()));
        }
        let mut table: Vec<[Option<Gluing>; 3]> = vec![[None; 3]; h];
        for (arc, &(s, t)) in self.pairs.iter().enumerate() {
            for x in [s, t] {
                if x.hexagon >= h || x.slot >= 3 {
                    return Err(Error::Structural(format!("pair {s}-{t}: slot {x} out of range")));
                }
            }
            if s == t {
                return Err(Error::Structural(format!("pair {s}-{t}: slot matched to itself")));
            }
            for (x, y) in [(s, t), (t, s)] {
                let cell = &mut table[x.hexagon][x.slot];
                if cell.is_some() {
                    return Err(Error::Structural(format!("pair {s}-{t}: slot {x} matched twice")));
                }
                *cell = Some(Gluing { partner: y, arc });
            }
        }
        let mut out = Vec::with_capacity(h);
        for (hex, row) in table.iter().enumerate() {
            let mut full = [Gluing { partner: Slot::new(0, 0), arc: 0 }; 3];
            for (k, cell) in row.iter().enumerate() {
                full[k] = cell.ok_or_else(|| Error::Structural(format!("slot [{hex}, {k}] is unmatched")))?;
            }
            out.push(full);
        }
        Ok(out)
    }

    /// Boundary walks as sequences of (hexagon, boundary side) pairs.
    ///
    /// Boundary side `k` of a hexagon joins slot `k` to slot `k + 1`. After it
    /// the walk continues on the partner hexagon of slot `k + 1`, on the
    /// boundary side with the partner's slot index. Each walk starts at its
    /// lexicographically smallest side, and walks are listed in that order.
    pub fn boundary_walks(&self) -> Result<Vec<Vec<(usize, usize)>>> {
        let table = self.gluing_table()?;
        Ok(walks_from_table(&table))
    }
}

fn walks_from_table(table: &[[Gluing; 3]]) -> Vec<Vec<(usize, usize)>> {
    let mut seen = vec![[false; 3]; table.len()];
    let mut walks = Vec::new();
    for h in 0..table.len() {
        for k in 0..3 {
            if seen[h][k] {
                continue;
            }
            let mut walk = Vec::new();
            let (mut ch, mut ck) = (h, k);
            while !seen[ch][ck] {
                seen[ch][ck] = true;
                walk.push((ch, ck));
                let next = table[ch][(ck + 1) % 3].partner;
                ch = next.hexagon;
                ck = next.slot;
            }
            walks.push(walk);
        }
    }
    walks
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
    fn classes(&mut self) -> usize {
        (0..self.0.len()).filter(|&i| self.find(i) == i).count()
    }
}

/// Euler characteristic `V - E + F` of the glued hexagon complex.
pub fn euler_characteristic(comb: &HexCombinatorics) -> Result<i64> {
    let table = comb.gluing_table()?;
    let h = table.len();
    // corner 2k: start of slot k (after boundary side k-1); 2k+1: end of slot k
    let mut corners = UnionFind::new(6 * h);
    for (hex, row) in table.iter().enumerate() {
        for (k, g) in row.iter().enumerate() {
            let p = g.partner;
            corners.union(6 * hex + 2 * k, 6 * p.hexagon + 2 * p.slot + 1);
        }
    }
    let v = corners.classes() as i64;
    let e = (comb.pairs.len() + 3 * h) as i64;
    Ok(v - e + h as i64)
}

/// Checks the gluing and returns the topology it realizes.
pub fn validate(comb: &HexCombinatorics) -> Result<Topology> {
    let table = comb.gluing_table()?;
    let h = table.len();
    let mut uf = UnionFind::new(h);
    for (hex, row) in table.iter().enumerate() {
        for g in row {
            uf.union(hex, g.partner.hexagon);
        }
    }
    let components = uf.classes();
    if components != 1 {
        return Err(Error::Disconnected { components });
    }
    let chi = euler_characteristic(comb)?;
    let b = walks_from_table(&table).len() as i64;
    let twice_genus = 2 - chi - b;
    if chi >= 0 || twice_genus < 0 || twice_genus % 2 != 0 {
        return Err(Error::Structural(format!(
            "glued complex has Euler characteristic {chi} with {b} boundary components"
        )));
    }
    let topo = Topology::new((twice_genus / 2) as usize, b as usize)?;
    if topo.hexagon_count() != h || topo.arc_count() != comb.pairs.len() {
        return Err(Error::Structural("hexagon and arc counts inconsistent with topology".into()));
    }
    Ok(topo)
}

/// [`validate`], additionally requiring the realized topology to match.
pub fn validate_declared(comb: &HexCombinatorics, genus: usize, boundary: usize, hexagons: usize) -> Result<Topology> {
    let topo = validate(comb)?;
    if topo.genus != genus || topo.boundary != boundary || comb.hexagon_count != hexagons {
        return Err(Error::TopologyMismatch {
            declared_genus: genus,
            declared_boundary: boundary,
            declared_hexagons: hexagons,
            genus: topo.genus,
            boundary: topo.boundary,
            hexagons: comb.hexagon_count,
        });
    }
    Ok(topo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    OneHoledTorus,
    PairOfPants,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::OneHoledTorus => "one_holed_torus",
            Builtin::PairOfPants => "pair_of_pants",
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one_holed_torus" => Ok(Builtin::OneHoledTorus),
            "pair_of_pants" => Ok(Builtin::PairOfPants),
            other => Err(Error::InvalidArgument(format!("unknown builtin surface {other:?}"))),
        }
    }
}

/// Canonical two-hexagon decompositions.
///
/// Torus: slot k of hexagon 0 is glued to slot k of hexagon 1, so both
/// hexagons carry arcs 0, 1, 2 in the same cyclic order and the boundary is
/// a single walk of six sides. Pants: slot 0 to slot 0 and slots 1, 2 to
/// slots 2, 1, so hexagon 1 is the mirror image of hexagon 0 and each
/// boundary component is two congruent sides.
pub fn builtin(which: Builtin) -> HexCombinatorics {
    let s = Slot::new;
    let pairs = match which {
        Builtin::OneHoledTorus => vec![(s(0, 0), s(1, 0)), (s(0, 1), s(1, 1)), (s(0, 2), s(1, 2))],
        Builtin::PairOfPants => vec![(s(0, 0), s(1, 0)), (s(0, 1), s(1, 2)), (s(0, 2), s(1, 1))],
    };
    HexCombinatorics::new(2, pairs)
}

/// Arc lengths of a hexagon decomposition, indexed by arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UshijimaPoint {
    coords: Vec<f64>,
}

impl UshijimaPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        for (i, &c) in coords.iter().enumerate() {
            check_positive(&format!("coordinate {i}"), c)?;
        }
        Ok(UshijimaPoint { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySegment {
    pub hexagon: usize,
    /// Boundary side index in 0..3.
    pub side: usize,
    pub length: f64,
    /// Arclength from the start of the component to the start of this side.
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryComponent {
    pub segments: Vec<BoundarySegment>,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometricSurface {
    pub topology: Topology,
    pub combinatorics: HexCombinatorics,
    pub coords: UshijimaPoint,
    pub hexagons: Vec<RightHexagon>,
    pub boundary: Vec<BoundaryComponent>,
    pub area: f64,
    gluing: Vec<[Gluing; 3]>,
}

impl GeometricSurface {
    pub fn gluing(&self, hexagon: usize, slot: usize) -> Gluing {
        self.gluing[hexagon][slot]
    }

    /// Arc lengths read back off the solved hexagons.
    pub fn arc_lengths(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.combinatorics.arc_count()];
        for (h, row) in self.gluing.iter().enumerate() {
            for (k, g) in row.iter().enumerate() {
                out[g.arc] = self.hexagons[h].a[k];
            }
        }
        out
    }

    pub fn total_boundary_length(&self) -> f64 {
        self.boundary.iter().map(|c| c.length).sum()
    }

    /// Component containing boundary side `side` of `hexagon`, and the index
    /// of that side within the component's walk.
    pub fn locate_side(&self, hexagon: usize, side: usize) -> (usize, usize) {
        for (c, comp) in self.boundary.iter().enumerate() {
            if let Some(i) = comp.segments.iter().position(|s| s.hexagon == hexagon && s.side == side) {
                return (c, i);
            }
        }
        unreachable!("every boundary side lies on a component")
    }
}

pub fn build_surface(comb: &HexCombinatorics, coords: &UshijimaPoint) -> Result<GeometricSurface> {
    let topology = validate(comb)?;
    if coords.len() != comb.arc_count() {
        return Err(Error::DimensionMismatch { expected: comb.arc_count(), got: coords.len() });
    }
    let gluing = comb.gluing_table()?;
    let hexagons = gluing
        .iter()
        .map(|row| {
            let c = coords.coords();
            solve_hexagon(c[row[0].arc], c[row[1].arc], c[row[2].arc])
        })
        .collect::<Result<Vec<_>>>()?;
    let boundary = walks_from_table(&gluing)
        .into_iter()
        .map(|walk| {
            let mut offset = 0.0;
            let segments = walk
                .into_iter()
                .map(|(hexagon, side)| {
                    let length = hexagons[hexagon].b[side];
                    let seg = BoundarySegment { hexagon, side, length, offset };
                    offset += length;
                    seg
                })
                .collect();
            BoundaryComponent { segments, length: offset }
        })
        .collect();
    Ok(GeometricSurface {
        topology,
        combinatorics: comb.clone(),
        coords: coords.clone(),
        hexagons,
        boundary,
        area: topology.area(),
        gluing,
    })
}

pub fn boundary_lengths(s: &GeometricSurface) -> Vec<f64> {
    s.boundary.iter().map(|c| c.length).collect()
}

/// Convenience: build one of the builtin surfaces.
pub fn builtin_surface(which: Builtin, coords: &[f64]) -> Result<GeometricSurface> {
    build_surface(&builtin(which), &UshijimaPoint::new(coords.to_vec())?)
}
