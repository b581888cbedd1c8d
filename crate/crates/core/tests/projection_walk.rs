//! Self-intersection counts checked against a walk that cuts a lift into
//! the pieces it leaves in each hexagon of the fundamental domain.
//! Crossings inside a hexagon show up as crossing pieces, crossings on a
//! decomposition arc as repeated passages through the same point.

use orthospec::develop::{develop, DevelopedDomain};
use orthospec::enumerate::{enumerate_orthogeodesics, EnumParams, Orthogeodesic};
use orthospec::plane::{
    point_distance, point_geodesic_distance, segment_crossing, segments_cross, GeodesicSegment, Isometry, Point,
};
use orthospec::surface::{builtin_surface, Builtin, Slot};
use orthospec::Error;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn on_side(d: &DevelopedDomain, seg: &GeodesicSegment, t: f64) -> Option<usize> {
    let p = seg.carrier.point_at(t);
    d.sides.iter().position(|s| {
        let (a, b) = (s.segment.t0.min(s.segment.t1), s.segment.t0.max(s.segment.t1));
        let u = s.segment.carrier.parameter_of(p);
        point_geodesic_distance(p, &s.segment.carrier) < 1e-9 && u >= a - 1e-9 && u <= b + 1e-9
    })
}

struct Walk {
    /// Pieces of the lift inside each visited hexagon, pulled back to the domain.
    pieces: Vec<(usize, GeodesicSegment)>,
    /// Where the lift passes from one hexagon to the next, as a point on the
    /// domain copy of the arc side with the smaller slot.
    passages: Vec<(Slot, Point)>,
}

fn walk(d: &DevelopedDomain, o: &Orthogeodesic) -> Walk {
    let lift = o.lift;
    let dir = (lift.t1 - lift.t0).signum();
    let start = on_side(d, &lift, lift.t0).expect("lift starts on a domain side");
    let mut h = d.sides[start].hexagon;
    let mut g = Isometry::IDENTITY;
    let mut cur = lift.t0;
    let arc_len = d.surface.arc_lengths();
    let mut out = Vec::new();
    let mut passages = Vec::new();
    for _ in 0..10_000 {
        let mut exit: Option<(f64, usize)> = None;
        for k in 0..3 {
            let len = arc_len[d.surface.gluing(h, k).arc];
            let side = g.apply_segment(&d.hexagons[h].side_segment(2 * k, len));
            // a decomposition arc runs along its own side and never leaves it
            let crossing = match segment_crossing(&lift, &side) {
                Err(Error::SameCarrier) => None,
                other => other.unwrap(),
            };
            if let Some(x) = crossing {
                let ahead = (x.t1 - cur) * dir;
                if ahead > 1e-12 && exit.map_or(true, |(t, _)| ahead < (t - cur) * dir) {
                    exit = Some((x.t1, k));
                }
            }
        }
        let stop = exit.map_or(lift.t1, |(t, _)| t);
        let piece = GeodesicSegment::new(lift.carrier, cur, stop).unwrap();
        out.push((h, g.inverse().apply_segment(&piece)));
        let Some((t, k)) = exit else {
            let last = out.last().unwrap().1;
            assert!(on_side(d, &last, last.t1).is_some(), "walk ends on a boundary side");
            return Walk { pieces: out, passages };
        };
        let x = lift.carrier.point_at(t);
        let here = (Slot::new(h, k), g.inverse().apply_point(x));
        let step = d.cross(h, k);
        if let Some(l) = step.letter {
            g = g * *d.letter_matrix(l);
        }
        let there = (step.to, g.inverse().apply_point(x));
        passages.push(if (here.0.hexagon, here.0.slot) <= (there.0.hexagon, there.0.slot) { here } else { there });
        h = step.to.hexagon;
        cur = t;
    }
    panic!("walk did not terminate");
}

fn walk_count(d: &DevelopedDomain, o: &Orthogeodesic) -> usize {
    let w = walk(d, o);
    let p = &w.pieces;
    let mut n = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i].0 == p[j].0 && segments_cross(&p[i].1, &p[j].1).unwrap() {
                n += 1;
            }
        }
    }
    // two passages through the same point of an arc cross there
    let q = &w.passages;
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            if q[i].0 == q[j].0 && point_distance(q[i].1, q[j].1) < 1e-9 {
                n += 1;
            }
        }
    }
    n
}

#[test]
fn counts_match_the_walk() {
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let mut sample: Vec<(DevelopedDomain, Orthogeodesic)> = Vec::new();
    for b in [Builtin::OneHoledTorus, Builtin::PairOfPants] {
        for _ in 0..5 {
            let coords: Vec<f64> = (0..3).map(|_| rng.gen_range(0.5..2.0)).collect();
            let d = develop(&builtin_surface(b, &coords).unwrap()).unwrap();
            let list = enumerate_orthogeodesics(&d, &EnumParams::new(5.0).unwrap()).unwrap();
            sample.extend(list.into_iter().map(|o| (d.clone(), o)));
        }
    }
    sample.shuffle(&mut rng);
    let mut nonsimple = 0;
    for (d, o) in sample.iter().take(50) {
        let walked = walk_count(d, o);
        assert_eq!(walked, o.self_intersections, "length {} at {:?} -> {:?}", o.length, o.start, o.end);
        nonsimple += usize::from(walked > 0);
    }
    assert!(nonsimple >= 5, "sample has only {nonsimple} non-simple arcs");
}

#[test]
fn pieces_cover_the_whole_length() {
    let d = develop(&builtin_surface(Builtin::OneHoledTorus, &[1.0, 1.3, 0.8]).unwrap()).unwrap();
    for o in enumerate_orthogeodesics(&d, &EnumParams::new(4.0).unwrap()).unwrap() {
        let total: f64 = walk(&d, &o).pieces.iter().map(|(_, s)| s.length()).sum();
        assert!((total - o.length).abs() < 1e-9);
    }
}
