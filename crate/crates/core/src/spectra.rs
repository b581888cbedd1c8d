//! Orthospectra, Basmajian sums and the inequality suite.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::develop::{develop, DevelopedDomain};
use crate::enumerate::{enumerate_orthogeodesics, intersection_count_with, systole, EnumParams, IntersectionOracle, Orthogeodesic};
use crate::error::{Error, Result};
use crate::surface::{build_surface, GeometricSurface, HexCombinatorics, UshijimaPoint};
use crate::trig::{basmajian_term, orthosystole_boundary_bound, pants_tau_bound};

pub const GROUPING_TOL: f64 = 1e-7;

/// Each geometric orthogeodesic is counted once per orientation; this is
/// the counting under which the Basmajian sum equals the boundary length.
pub const ORIENTATIONS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Full,
    Simple,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub kind: SpectrumKind,
    pub cutoff: f64,
    pub grouping_tolerance: f64,
    /// Strictly increasing lengths with their multiplicities.
    pub entries: Vec<(f64, usize)>,
}

impl Spectrum {
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }
}

/// Single-linkage grouping of sorted lengths; each group is represented by
/// its mean.
pub fn group_lengths(sorted: &[(f64, usize)], tol: f64) -> Vec<(f64, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j].0 - sorted[j - 1].0 <= tol {
            j += 1;
        }
        let group = &sorted[i..j];
        let mult: usize = group.iter().map(|e| e.1).sum();
        let mean = group.iter().map(|e| e.0 * e.1 as f64).sum::<f64>() / mult as f64;
        out.push((mean, mult));
        i = j;
    }
    out
}

pub fn spectrum_from(list: &[Orthogeodesic], kind: SpectrumKind, cutoff: f64) -> Spectrum {
    let mut lengths: Vec<(f64, usize)> = list
        .iter()
        .filter(|o| kind == SpectrumKind::Full || o.simple)
        .filter(|o| o.length <= cutoff)
        .map(|o| (o.length, ORIENTATIONS))
        .collect();
    lengths.sort_by(|a, b| a.0.total_cmp(&b.0));
    Spectrum { kind, cutoff, grouping_tolerance: GROUPING_TOL, entries: group_lengths(&lengths, GROUPING_TOL) }
}

fn enumerate(s: &GeometricSurface, cutoff: f64) -> Result<Vec<Orthogeodesic>> {
    enumerate_orthogeodesics(&develop(s)?, &EnumParams::new(cutoff)?)
}

pub fn orthospectrum(s: &GeometricSurface, cutoff: f64) -> Result<Spectrum> {
    Ok(spectrum_from(&enumerate(s, cutoff)?, SpectrumKind::Full, cutoff))
}

pub fn simple_orthospectrum(s: &GeometricSurface, cutoff: f64) -> Result<Spectrum> {
    Ok(spectrum_from(&enumerate(s, cutoff)?, SpectrumKind::Simple, cutoff))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasmajianReport {
    pub partial_sum: f64,
    pub boundary_total: f64,
    pub residual: f64,
}

fn basmajian_sum(spec: &Spectrum) -> Result<f64> {
    spec.entries.iter().map(|&(l, m)| Ok(m as f64 * basmajian_term(l)?)).sum()
}

pub fn basmajian_report(s: &GeometricSurface, spec: &Spectrum) -> Result<BasmajianReport> {
    if spec.kind != SpectrumKind::Full {
        return Err(Error::KindMismatch("the Basmajian identity needs the full orthospectrum".into()));
    }
    let partial_sum = basmajian_sum(spec)?;
    let boundary_total = s.total_boundary_length();
    Ok(BasmajianReport { partial_sum, boundary_total, residual: boundary_total - partial_sum })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimpleBasmajianReport {
    pub partial_sum: f64,
    pub boundary_total: f64,
    pub holds: bool,
    /// Some boundary component is longer than this.
    pub component_lower_bound: f64,
}

pub fn simple_basmajian_lower_bound(s: &GeometricSurface, spec: &Spectrum) -> Result<SimpleBasmajianReport> {
    if spec.kind != SpectrumKind::Simple {
        return Err(Error::KindMismatch("expected a simple orthospectrum".into()));
    }
    let partial_sum = basmajian_sum(spec)?;
    let boundary_total = s.total_boundary_length();
    Ok(SimpleBasmajianReport {
        partial_sum,
        boundary_total,
        holds: partial_sum < boundary_total,
        component_lower_bound: partial_sum / s.topology.boundary as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Worst observed value of the checked quantity, if any was evaluated.
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub evaluated: usize,
    pub witnesses: Vec<String>,
}

impl Check {
    fn new(name: &str) -> Self {
        Check { name: name.into(), pass: true, value: None, bound: None, evaluated: 0, witnesses: Vec::new() }
    }

    fn fail(&mut self, witness: String) {
        self.pass = false;
        self.witnesses.push(witness);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub cutoff: f64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl InequalityReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const CHECK_NONSIMPLE: &str = "nonsimple_length";
pub const CHECK_COLLAR: &str = "ortho_collar";
pub const CHECK_ORTHOSYSTOLE: &str = "orthosystole_boundary";
pub const CHECK_PANTS_TAU: &str = "pants_tau";

/// Enumerated data the inequality suite runs on.
pub struct InequalityInput<'a> {
    pub surface: &'a GeometricSurface,
    pub domain: &'a DevelopedDomain,
    pub orthogeodesics: Vec<Orthogeodesic>,
    pub cutoff: f64,
}

fn fmt_ortho(i: usize, o: &Orthogeodesic) -> String {
    format!(
        "#{i} length {:.12} from ({}, {:.9}) to ({}, {:.9})",
        o.length, o.start.component, o.start.position, o.end.component, o.end.position
    )
}

pub fn check_inequalities(data: &InequalityInput) -> Result<InequalityReport> {
    let s = data.surface;
    let list = &data.orthogeodesics;
    let mut checks = Vec::new();

    let mut c = Check::new(CHECK_NONSIMPLE);
    c.bound = Some(0.5);
    for (i, o) in list.iter().enumerate().filter(|(_, o)| !o.simple) {
        c.evaluated += 1;
        c.value = Some(c.value.map_or(o.length, |v: f64| v.min(o.length)));
        if !(o.length > 0.5) {
            c.fail(fmt_ortho(i, o));
        }
    }
    checks.push(c);

    // only pairs with a small sinh product can violate the collar bound
    let mut c = Check::new(CHECK_COLLAR);
    c.bound = Some(1.0);
    let candidates: Vec<(usize, usize)> = (0..list.len())
        .flat_map(|i| (i + 1..list.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            (list[i].simple || list[j].simple) && list[i].length.sinh() * list[j].length.sinh() <= 1.0
        })
        .collect();
    if !candidates.is_empty() {
        let longest = candidates.iter().map(|&(i, j)| list[i].length.max(list[j].length)).fold(0.0, f64::max);
        let oracle = IntersectionOracle::new(data.domain, longest)?;
        let counts: Vec<usize> = candidates
            .par_iter()
            .map(|&(i, j)| intersection_count_with(&oracle, data.domain, &list[i], &list[j]))
            .collect::<Result<_>>()?;
        for (&(i, j), &n) in candidates.iter().zip(&counts) {
            c.evaluated += 1;
            if n > 0 {
                let product = list[i].length.sinh() * list[j].length.sinh();
                c.value = Some(c.value.map_or(product, |v: f64| v.min(product)));
                c.fail(format!("{} crosses {} ({n} times), sinh product {product:.12}", fmt_ortho(i, &list[i]), fmt_ortho(j, &list[j])));
            }
        }
    }
    checks.push(c);

    let topo = s.topology;
    let mut c = Check::new(CHECK_ORTHOSYSTOLE);
    let Some(first) = list.first() else {
        return Err(Error::NeedsLargerCutoff { cutoff: data.cutoff, suggested: 2.0 * data.cutoff });
    };
    let t = first.length;
    let coeff = (24 * topo.genus + 12 * topo.boundary - 24) as f64;
    let value = (2.0 * t).sinh() * (s.total_boundary_length() / coeff).sinh();
    c.evaluated = 1;
    c.value = Some(value);
    c.bound = Some(0.5);
    if !(value <= 0.5) {
        c.fail(format!(
            "orthosystole {t:.12}, boundary total {:.12} (boundary bound {:.12})",
            s.total_boundary_length(),
            orthosystole_boundary_bound(t, topo.genus, topo.boundary)?
        ));
    }
    checks.push(c);

    if topo.genus == 0 && topo.boundary == 3 {
        let mut c = Check::new(CHECK_PANTS_TAU);
        let lengths: Vec<f64> = s.boundary.iter().map(|b| b.length).collect();
        for gamma in 0..3 {
            let loops: Vec<(usize, &Orthogeodesic)> = list
                .iter()
                .enumerate()
                .filter(|(_, o)| o.simple && o.start.component == gamma && o.end.component == gamma)
                .collect();
            let Some(&(i, tau)) = loops.first() else {
                return Err(Error::NeedsLargerCutoff { cutoff: data.cutoff, suggested: 2.0 * data.cutoff });
            };
            if let Some(&(k, other)) = loops.get(1) {
                c.fail(format!("boundary {gamma}: second simple loop arc {}", fmt_ortho(k, other)));
            }
            let alpha = (0..3).filter(|&k| k != gamma).map(|k| lengths[k]).fold(0.0, f64::max);
            let bound = pants_tau_bound(alpha, lengths[gamma])?;
            c.evaluated += 1;
            let slack = bound - tau.length;
            if c.value.map_or(true, |v| slack < v) {
                c.value = Some(slack);
                c.bound = Some(bound);
            }
            // equality is attained when the other two boundaries are equal
            if !(tau.length <= bound + 1e-9) {
                c.fail(format!("boundary {gamma}: {} exceeds bound {bound:.12}", fmt_ortho(i, tau)));
            }
        }
        checks.push(c);
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(InequalityReport { cutoff: data.cutoff, checks, pass })
}

pub fn verify_inequalities(s: &GeometricSurface, cutoff: f64) -> Result<InequalityReport> {
    let d = develop(s)?;
    let orthogeodesics = enumerate_orthogeodesics(&d, &EnumParams::new(cutoff)?)?;
    check_inequalities(&InequalityInput { surface: s, domain: &d, orthogeodesics, cutoff })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub index: usize,
    pub left: Option<(f64, usize)>,
    pub right: Option<(f64, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub equal: bool,
    pub common_cutoff: f64,
    pub first_divergence: Option<Divergence>,
}

/// Compares two spectra below their common cutoff. Entries within `tol`
/// of the common cutoff are ignored on both sides.
pub fn compare(a: &Spectrum, b: &Spectrum, tol: f64) -> Result<Comparison> {
    if a.kind != b.kind {
        return Err(Error::KindMismatch(format!("{:?} vs {:?}", a.kind, b.kind)));
    }
    let cut = a.cutoff.min(b.cutoff);
    let keep = |s: &Spectrum| -> Vec<(f64, usize)> { s.entries.iter().copied().filter(|e| e.0 <= cut - tol).collect() };
    let (x, y) = (keep(a), keep(b));
    for i in 0..x.len().max(y.len()) {
        let (l, r) = (x.get(i).copied(), y.get(i).copied());
        let same = match (l, r) {
            (Some(p), Some(q)) => (p.0 - q.0).abs() <= tol && p.1 == q.1,
            _ => false,
        };
        if !same {
            return Ok(Comparison {
                equal: false,
                common_cutoff: cut,
                first_divergence: Some(Divergence { index: i, left: l, right: r }),
            });
        }
    }
    Ok(Comparison { equal: true, common_cutoff: cut, first_divergence: None })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub samples: usize,
    pub filtered: usize,
    pub inconclusive: bool,
    pub min_systole: Option<f64>,
    pub min_boundary_component: Option<f64>,
    pub max_boundary_component: Option<f64>,
    pub max_total_boundary: Option<f64>,
    pub boundary_bound: f64,
    pub violations: Vec<usize>,
    pub pass: bool,
}

struct ProbeSample {
    systole: f64,
    min_component: f64,
    max_component: f64,
    total: f64,
}

fn probe_one(comb: &HexCombinatorics, coords: &UshijimaPoint, eps1: f64, eps2: f64) -> Result<Option<ProbeSample>> {
    let s = build_surface(comb, coords)?;
    let d = develop(&s)?;
    let list = enumerate_orthogeodesics(&d, &EnumParams::new(eps2)?)?;
    match list.first() {
        Some(o) if o.length >= eps1 => {}
        _ => return Ok(None),
    }
    let lengths: Vec<f64> = s.boundary.iter().map(|b| b.length).collect();
    Ok(Some(ProbeSample {
        systole: systole(&d)?,
        min_component: lengths.iter().copied().fold(f64::INFINITY, f64::min),
        max_component: lengths.iter().copied().fold(0.0, f64::max),
        total: s.total_boundary_length(),
    }))
}

/// Samples whose orthosystole lies in `[eps1, eps2]` are checked against the
/// boundary bound at `eps1`.
pub fn compactness_probe(samples: &[UshijimaPoint], comb: &HexCombinatorics, eps1: f64, eps2: f64) -> Result<ProbeReport> {
    if !(eps1 > 0.0 && eps1 <= eps2) {
        return Err(Error::InvalidArgument(format!("need 0 < eps1 <= eps2, got {eps1}, {eps2}")));
    }
    let topo = crate::surface::validate(comb)?;
    let boundary_bound = orthosystole_boundary_bound(eps1, topo.genus, topo.boundary)?;
    let results: Vec<Option<ProbeSample>> =
        samples.par_iter().map(|c| probe_one(comb, c, eps1, eps2)).collect::<Result<_>>()?;
    let mut report = ProbeReport {
        samples: samples.len(),
        filtered: 0,
        inconclusive: true,
        min_systole: None,
        min_boundary_component: None,
        max_boundary_component: None,
        max_total_boundary: None,
        boundary_bound,
        violations: Vec::new(),
        pass: true,
    };
    let lower = |a: Option<f64>, b: f64| Some(a.map_or(b, |x| x.min(b)));
    let upper = |a: Option<f64>, b: f64| Some(a.map_or(b, |x| x.max(b)));
    for (i, r) in results.into_iter().enumerate() {
        let Some(p) = r else { continue };
        report.filtered += 1;
        report.min_systole = lower(report.min_systole, p.systole);
        report.min_boundary_component = lower(report.min_boundary_component, p.min_component);
        report.max_boundary_component = upper(report.max_boundary_component, p.max_component);
        report.max_total_boundary = upper(report.max_total_boundary, p.total);
        if !(p.total <= boundary_bound) || !(p.systole > 0.0) {
            report.violations.push(i);
        }
    }
    report.inconclusive = report.filtered == 0;
    report.pass = report.violations.is_empty();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{builtin, builtin_surface, Builtin};

    fn torus111() -> GeometricSurface {
        builtin_surface(Builtin::OneHoledTorus, &[1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn tiny_cutoff_gives_empty_spectrum() {
        let s = torus111();
        let sp = orthospectrum(&s, 1e-3).unwrap();
        assert!(sp.entries.is_empty());
        let b = basmajian_report(&s, &sp).unwrap();
        assert_eq!(b.partial_sum, 0.0);
        assert_eq!(b.residual, b.boundary_total);
        let simple = simple_orthospectrum(&s, 1e-3).unwrap();
        let r = simple_basmajian_lower_bound(&s, &simple).unwrap();
        assert!(r.holds && r.component_lower_bound == 0.0);
    }

    #[test]
    fn arcs_show_up_with_multiplicity() {
        let s = torus111();
        for sp in [orthospectrum(&s, 1.0 + 1e-6).unwrap(), simple_orthospectrum(&s, 1.0 + 1e-6).unwrap()] {
            let e = sp.entries.iter().find(|e| (e.0 - 1.0).abs() < 1e-9).unwrap();
            assert!(e.1 >= 3);
        }
    }

    #[test]
    fn kinds_are_checked() {
        let s = torus111();
        let full = orthospectrum(&s, 2.0).unwrap();
        let simple = simple_orthospectrum(&s, 2.0).unwrap();
        assert!(matches!(basmajian_report(&s, &simple), Err(Error::KindMismatch(_))));
        assert!(matches!(simple_basmajian_lower_bound(&s, &full), Err(Error::KindMismatch(_))));
        assert!(matches!(compare(&full, &simple, 1e-8), Err(Error::KindMismatch(_))));
    }

    #[test]
    fn simple_is_submultiset_of_full() {
        let s = builtin_surface(Builtin::PairOfPants, &[0.7, 1.3, 2.1]).unwrap();
        let full = orthospectrum(&s, 5.0).unwrap();
        let simple = simple_orthospectrum(&s, 5.0).unwrap();
        for (l, m) in &simple.entries {
            let f = full.entries.iter().find(|e| (e.0 - l).abs() < 1e-9).unwrap();
            assert!(f.1 >= *m);
        }
        for (l, m) in &full.entries {
            let sm = simple.entries.iter().find(|e| (e.0 - l).abs() < 1e-9).map_or(0, |e| e.1);
            if sm < *m {
                assert!(*l > 0.5);
            }
        }
    }

    #[test]
    fn grouping_only_splits_when_tolerance_shrinks() {
        let xs = [(1.0, 1), (1.0 + 5e-8, 1), (1.0 + 1.2e-7, 1), (2.0, 2)];
        assert_eq!(group_lengths(&xs, 1e-7).len(), 2);
        assert_eq!(group_lengths(&xs, 6e-8).len(), 3);
        assert_eq!(group_lengths(&xs, 1e-9).len(), 4);
        let g = group_lengths(&xs, 1e-7);
        assert_eq!(g[0].1, 3);
        assert!(g.windows(2).all(|w| w[1].0 - w[0].0 > 1e-7));
    }

    #[test]
    fn compare_is_reflexive_and_spots_divergence() {
        let s = builtin_surface(Builtin::OneHoledTorus, &[1.0, 1.3, 1.7]).unwrap();
        let p = builtin_surface(Builtin::OneHoledTorus, &[1.7, 1.0, 1.3]).unwrap();
        let a = simple_orthospectrum(&s, 4.0).unwrap();
        let b = simple_orthospectrum(&p, 4.0).unwrap();
        assert!(compare(&a, &a, 1e-8).unwrap().equal);
        assert!(compare(&a, &b, 1e-8).unwrap().equal);
        let q = builtin_surface(Builtin::OneHoledTorus, &[1.0, 1.3, 1.71]).unwrap();
        let c = compare(&a, &simple_orthospectrum(&q, 4.0).unwrap(), 1e-8).unwrap();
        assert!(!c.equal && c.first_divergence.is_some());
    }

    #[test]
    fn injected_nonsimple_fault_is_named() {
        let s = torus111();
        let d = develop(&s).unwrap();
        let mut list = enumerate_orthogeodesics(&d, &EnumParams::new(4.0).unwrap()).unwrap();
        list[0].simple = false;
        list[0].length = 0.4;
        let r = check_inequalities(&InequalityInput { surface: &s, domain: &d, orthogeodesics: list, cutoff: 4.0 }).unwrap();
        let c = r.check(CHECK_NONSIMPLE).unwrap();
        assert!(!c.pass && c.witnesses[0].starts_with("#0"));
    }

    #[test]
    fn pants_tau_check_runs_for_each_boundary() {
        let s = builtin_surface(Builtin::PairOfPants, &[1.0, 1.0, 1.0]).unwrap();
        let r = verify_inequalities(&s, 6.0).unwrap();
        let c = r.check(CHECK_PANTS_TAU).unwrap();
        assert_eq!(c.evaluated, 3);
        assert!(c.pass, "{c:?}");
        assert!(r.check(CHECK_NONSIMPLE).unwrap().pass);
        assert!(r.check(CHECK_COLLAR).unwrap().pass);
    }

    #[test]
    fn probe_empty_is_inconclusive() {
        let r = compactness_probe(&[], &builtin(Builtin::OneHoledTorus), 0.05, 0.5).unwrap();
        assert!(r.inconclusive && r.pass && r.filtered == 0);
    }
}
