//! Forbidden-minor search with re-verifiable certificates.
//!
//! A minor of rank `t_r` is `M / C \ D` with `C` independent of size
//! `r(M) - t_r`, so the search ranges over contraction sets and, inside each
//! contraction, over subsets of pairwise non-parallel elements.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::OnceLock;
use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::complex::{simplex_skeleton, CellComplex};
use crate::error::{Error, Result};
use crate::exactla::{next_combination, Field, FieldTag, Gf2, Matrix, Rat, StandardForm};
use crate::matroid::{
    circuit_isomorphism, contract_in_place, AnyMatroid, Catalog, CatalogName, LinearMatroid, MinorSpec, NamedMatroid,
};
use crate::pointcloud::rng_for;

use super::binary::find_u24_minor;
use super::Search;

/// Default number of search nodes (contraction sets plus isomorphism checks).
pub const DEFAULT_MINOR_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorCertificate {
    pub target: CatalogName,
    pub spec: MinorSpec,
    /// `(element of M, element of the target)` for every surviving element.
    pub bijection: Vec<(String, String)>,
}

impl MinorCertificate {
    /// Recompute the minor from scratch and compare circuit families under
    /// the bijection.
    pub fn verify<F: Field>(&self, m: &LinearMatroid<F>, target: &NamedMatroid) -> Result<bool> {
        if target.name != self.target {
            return Ok(false);
        }
        let minor = m.minor(&self.spec)?;
        let tm = &target.matroid;
        if minor.len() != tm.len() || self.bijection.len() != minor.len() {
            return Ok(false);
        }
        let target_labels: Vec<String> = match tm {
            AnyMatroid::Gf2(t) => t.labels().to_vec(),
            AnyMatroid::Rational(t) => t.labels().to_vec(),
        };
        let mut map = vec![usize::MAX; minor.len()];
        let mut hit = HashSet::new();
        for (a, b) in &self.bijection {
            let Ok(i) = minor.index_of(a) else { return Ok(false) };
            let Some(j) = target_labels.iter().position(|l| l == b) else { return Ok(false) };
            if map[i] != usize::MAX || !hit.insert(j) {
                return Ok(false);
            }
            map[i] = j;
        }
        let image = |c: u64| -> u64 { (0..map.len()).filter(|&e| c >> e & 1 == 1).fold(0, |acc, e| acc | 1 << map[e]) };
        let mut mine: Vec<u64> = minor.circuit_masks()?.into_iter().map(image).collect();
        let mut theirs = tm.circuit_masks()?;
        mine.sort_unstable();
        theirs.sort_unstable();
        Ok(mine == theirs && minor.rank() == tm.rank())
    }

    /// Labels of `M` that survive in the minor.
    pub fn elements(&self) -> Vec<String> {
        self.bijection.iter().map(|(a, _)| a.clone()).collect()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coordinates of the source element `e` in a standard form.
fn coords<F: Field>(sf: &StandardForm<F>, e: usize) -> Vec<F> {
    let r = sf.rank();
    if let Some(i) = sf.basis.iter().position(|&b| b == e) {
        let mut v = vec![F::zero(); r];
        v[i] = F::one();
        return v;
    }
    let j = sf.cobasis.iter().position(|&c| c == e).expect("element present");
    (0..r).map(|i| sf.a[i][j].clone()).collect()
}

/// Projective normal form: scaled so the first nonzero entry is one.
fn normalise<F: Field>(v: &[F]) -> Option<Vec<F>> {
    let p = v.iter().find(|x| !x.is_zero())?;
    let inv = F::one().div(p);
    Some(v.iter().map(|x| x.mul(&inv)).collect())
}

struct Target {
    name: CatalogName,
    size: usize,
    rank: usize,
    circuits: Vec<u64>,
    simple: bool,
    labels: Vec<String>,
}

impl Target {
    fn new(t: &NamedMatroid) -> Result<Target> {
        let circuits = t.matroid.circuit_masks()?;
        let simple = circuits.iter().all(|c| c.count_ones() >= 3);
        let labels = match &t.matroid {
            AnyMatroid::Gf2(m) => m.labels().to_vec(),
            AnyMatroid::Rational(m) => m.labels().to_vec(),
        };
        Ok(Target { name: t.name, size: t.matroid.len(), rank: t.matroid.rank(), circuits, simple, labels })
    }
}

struct Searcher<'a, F: Field> {
    m: &'a LinearMatroid<F>,
    target: Target,
    spent: u64,
    budget: u64,
    /// Set when an inner enumeration was cut short, so the search is incomplete.
    truncated: bool,
    /// Element that must survive into the minor.
    keep: Option<usize>,
}

impl<F: Field> Searcher<'_, F> {
    /// Look for the target among the elements of a contraction `sf` of rank `target.rank`.
    fn examine(&mut self, sf: &StandardForm<F>, contracted: &[usize]) -> Option<MinorCertificate> {
        let mut elements: Vec<usize> = sf.basis.iter().chain(&sf.cobasis).copied().collect();
        elements.sort_unstable();
        if let Some(k) = self.keep {
            // Listed first so it represents its parallel class.
            elements.retain(|&e| e != k);
            elements.insert(0, k);
        }
        let vectors: HashMap<usize, Vec<F>> = elements.iter().map(|&e| (e, coords(sf, e))).collect();
        let candidates: Vec<usize> = if self.target.simple {
            // One representative per parallel class of non-loops.
            let mut classes: BTreeMap<usize, Vec<F>> = BTreeMap::new();
            let mut seen = HashSet::new();
            for &e in &elements {
                if let Some(v) = normalise(&vectors[&e]) {
                    if seen.insert(v.clone()) {
                        classes.insert(e, v);
                    }
                }
            }
            let mut reps: Vec<usize> = classes.into_keys().collect();
            if let Some(k) = self.keep {
                if let Some(p) = reps.iter().position(|&e| e == k) {
                    reps.remove(p);
                    reps.insert(0, k);
                }
            }
            reps
        } else {
            elements.clone()
        };
        let t = self.target.size;
        if candidates.len() < t {
            return None;
        }
        if self.keep.is_some_and(|k| candidates.first() != Some(&k)) {
            return None;
        }
        let mut pick: Vec<usize> = (0..t).collect();
        loop {
            if self.keep.is_some() && pick[0] != 0 {
                // Every later subset omits the required element.
                return None;
            }
            if self.spent >= self.budget {
                self.truncated = true;
                return None;
            }
            self.spent += 1;
            let chosen: Vec<usize> = pick.iter().map(|&i| candidates[i]).collect();
            let cols: Vec<Vec<(usize, F)>> = chosen
                .iter()
                .map(|e| vectors[e].iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect())
                .collect();
            let small = LinearMatroid::from_matrix(Matrix::from_columns(self.target.rank, cols));
            if small.rank() == self.target.rank {
                if let Ok(circ) = small.circuit_masks() {
                    if let Some(map) = circuit_isomorphism(t, &circ, &self.target.circuits) {
                        let keep: HashSet<usize> = chosen.iter().copied().chain(contracted.iter().copied()).collect();
                        let deletions = (0..self.m.len()).filter(|e| !keep.contains(e)).collect::<Vec<_>>();
                        return Some(MinorCertificate {
                            target: self.target.name,
                            spec: MinorSpec {
                                deletions: self.m.labels_of(&deletions),
                                contractions: self.m.labels_of(contracted),
                            },
                            bijection: chosen
                                .iter()
                                .enumerate()
                                .map(|(i, &e)| (self.m.labels()[e].clone(), self.target.labels[map[i]].clone()))
                                .collect(),
                        });
                    }
                }
            }
            if !next_combination(&mut pick, candidates.len()) {
                return None;
            }
        }
    }
}

/// Budgeted search for a minor of `m` isomorphic to `target`. Every returned
/// certificate has been re-verified.
pub fn minor_search<F: Field>(m: &LinearMatroid<F>, target: &NamedMatroid, budget: u64, seed: u64) -> Search<MinorCertificate> {
    minor_search_containing(m, target, None, budget, seed)
}

/// As `minor_search`, restricted to minors in which element `keep` survives.
pub fn minor_search_containing<F: Field>(
    m: &LinearMatroid<F>,
    target: &NamedMatroid,
    keep: Option<usize>,
    budget: u64,
    seed: u64,
) -> Search<MinorCertificate> {
    let (n, r) = (m.len(), m.rank());
    let (t, tr) = (target.matroid.len(), target.matroid.rank());
    if n < t || r < tr || n - r < t - tr {
        return Search::Exhausted;
    }
    if target.name == CatalogName::F7star && F::TAG == crate::exactla::FieldTag::Gf2 {
        if let Ok(f7) = Catalog::bundled().get(CatalogName::F7) {
            return dual_search(m, target, &f7, keep, budget, seed);
        }
    }
    let Ok(tgt) = Target::new(target) else { return Search::BudgetExceeded };
    let mut s = Searcher { m, target: tgt, spent: 0, budget, truncated: false, keep };
    let k = r - tr;
    let base = m.standard_form();
    let finish = |cert: MinorCertificate| -> Search<MinorCertificate> {
        match cert.verify(m, target) {
            Ok(true) => Search::Found(cert),
            _ => Search::BudgetExceeded,
        }
    };
    if binomial(n, k) <= budget as f64 {
        let mut con: Vec<usize> = (0..k).collect();
        loop {
            if s.spent >= budget {
                return Search::BudgetExceeded;
            }
            s.spent += 1;
            let mut sf = base.clone();
            let mut independent = keep.is_none_or(|k| !con.contains(&k));
            for &e in &con {
                if !independent {
                    break;
                }
                if is_loop(&sf, e) {
                    independent = false;
                    break;
                }
                contract_in_place(&mut sf, e);
            }
            if independent {
                if let Some(cert) = s.examine(&sf, &con) {
                    return finish(cert);
                }
            }
            if !next_combination(&mut con, n) {
                break;
            }
        }
        return if s.truncated { Search::BudgetExceeded } else { Search::Exhausted };
    }
    let mut rng = rng_for(seed);
    let mut order: Vec<usize> = (0..n).collect();
    while s.spent < budget {
        s.spent += 1;
        order.shuffle(&mut rng);
        let mut sf = base.clone();
        let mut con = Vec::with_capacity(k);
        for &e in &order {
            if con.len() == k {
                break;
            }
            if Some(e) != keep && !is_loop(&sf, e) {
                contract_in_place(&mut sf, e);
                con.push(e);
            }
        }
        con.sort_unstable();
        if let Some(cert) = s.examine(&sf, &con) {
            return finish(cert);
        }
    }
    Search::BudgetExceeded
}

fn is_loop<F: Field>(sf: &StandardForm<F>, e: usize) -> bool {
    match sf.cobasis.iter().position(|&c| c == e) {
        Some(j) => (0..sf.rank()).all(|i| sf.a[i][j].is_zero()),
        None => false,
    }
}

/// An F7* minor of `M` is the dual of an F7 minor of `M*` with the roles of
/// deletion and contraction swapped.
fn dual_search<F: Field>(
    m: &LinearMatroid<F>,
    target: &NamedMatroid,
    f7: &NamedMatroid,
    keep: Option<usize>,
    budget: u64,
    seed: u64,
) -> Search<MinorCertificate> {
    let dual = m.dual();
    match minor_search_containing(&dual, f7, keep, budget, seed) {
        Search::Found(c) => {
            let spec = MinorSpec { deletions: c.spec.contractions, contractions: c.spec.deletions };
            let Ok(minor) = m.minor(&spec) else { return Search::BudgetExceeded };
            let Ok(Some(map)) = minor.isomorphic_to(target) else { return Search::BudgetExceeded };
            let tlabels = match &target.matroid {
                AnyMatroid::Gf2(t) => t.labels().to_vec(),
                AnyMatroid::Rational(t) => t.labels().to_vec(),
            };
            let cert = MinorCertificate {
                target: target.name,
                spec,
                bijection: minor.labels().iter().enumerate().map(|(i, l)| (l.clone(), tlabels[map[i]].clone())).collect(),
            };
            match cert.verify(m, target) {
                Ok(true) => Search::Found(cert),
                _ => Search::BudgetExceeded,
            }
        }
        other => other,
    }
}

/// Seed used for the canonical F7 certificate on the 2-skeleton of the 5-simplex.
const DELTA5_SEED: u64 = 0x5eed_f7;

/// A verified F7 minor of the GF(2) triangle matroid of the 5-simplex,
/// computed once.
pub fn delta5_f7_certificate() -> &'static MinorCertificate {
    static CERT: OnceLock<MinorCertificate> = OnceLock::new();
    CERT.get_or_init(|| {
        let m = LinearMatroid::<Gf2>::from_boundary(&simplex_skeleton(6, 2), 2);
        let f7 = Catalog::bundled().get(CatalogName::F7).expect("bundled F7");
        minor_search(&m, &f7, DEFAULT_MINOR_BUDGET, DELTA5_SEED).into_found().expect("F7 is a minor of the 5-simplex triangles")
    })
}

fn relabel(label: &str, map: &[usize]) -> String {
    label.split('-').map(|v| map[v.parse::<usize>().expect("vertex label")].to_string()).collect::<Vec<_>>().join("-")
}

/// F7 minor of `M_2(X)` over GF(2) carried by the 20 triangles of a 6-clique:
/// restricting to them gives the triangle matroid of the 5-simplex.
pub fn clique_f7_certificate(x: &CellComplex, clique: &[usize]) -> Result<MinorCertificate> {
    let mut q = clique.to_vec();
    q.sort_unstable();
    if q.len() != 6 {
        return Err(Error::PreconditionViolated("a 6-clique has six vertices".into()));
    }
    let base = delta5_f7_certificate();
    let faces: HashSet<String> = simplex_skeleton(6, 2).simplices(2).iter().map(|s| relabel(&s_label(s), &q)).collect();
    for f in &faces {
        let vs: Vec<usize> = f.split('-').map(|v| v.parse().unwrap()).collect();
        if x.index_of(&vs).is_none() {
            return Err(Error::PreconditionViolated(format!("triangle {f} missing from the complex")));
        }
    }
    let contractions: Vec<String> = base.spec.contractions.iter().map(|l| relabel(l, &q)).collect();
    let kept: HashSet<String> = contractions.iter().cloned().chain(base.bijection.iter().map(|(a, _)| relabel(a, &q))).collect();
    let deletions = x.cell_labels(2).into_iter().filter(|l| !kept.contains(l)).collect();
    Ok(MinorCertificate {
        target: CatalogName::F7,
        spec: MinorSpec { deletions, contractions },
        bijection: base.bijection.iter().map(|(a, b)| (relabel(a, &q), b.clone())).collect(),
    })
}

fn s_label(s: &[usize]) -> String {
    s.iter().map(usize::to_string).collect::<Vec<_>>().join("-")
}

/// Lift a minor certificate of `M_k` of the full simplex on `num_vertices`
/// vertices to `M_{k+1}` of the simplex with one more vertex (the cone apex).
/// Contracting every `(k+1)`-face of the base leaves the cones over the
/// `k`-faces representing the base matroid, with `sigma` matched to its cone.
pub fn shift_certificate(cert: &MinorCertificate, num_vertices: usize, k: usize) -> MinorCertificate {
    let apex = num_vertices;
    let cone = |l: &str| format!("{l}-{apex}");
    let base_top = simplex_skeleton(num_vertices, k + 1);
    let mut contractions: Vec<String> = base_top.simplices(k + 1).iter().map(|s| s_label(s)).collect();
    contractions.extend(cert.spec.contractions.iter().map(|l| cone(l)));
    MinorCertificate {
        target: cert.target,
        spec: MinorSpec { deletions: cert.spec.deletions.iter().map(|l| cone(l)).collect(), contractions },
        bijection: cert.bijection.iter().map(|(a, b)| (cone(a), b.clone())).collect(),
    }
}

/// Outcome of one catalog search on the 5-simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogFinding {
    pub target: CatalogName,
    pub field: FieldTag,
    pub certificate: Option<MinorCertificate>,
    /// Whether the search ran to completion without a hit.
    pub exhausted: bool,
    pub seconds: f64,
}

/// Search the triangle matroids of the 5-simplex for every catalog entry:
/// U24 over the rationals, the others over GF(2). Returned certificates are
/// verified; missing catalog entries are skipped.
pub fn delta5_catalog_check(catalog: &Catalog, budget: u64, seed: u64) -> Vec<CatalogFinding> {
    let delta5 = simplex_skeleton(6, 2);
    let m2 = LinearMatroid::<Gf2>::from_boundary(&delta5, 2);
    let mq = LinearMatroid::<Rat>::from_boundary(&delta5, 2);
    let mut out = Vec::new();
    for name in catalog.names() {
        let Ok(target) = catalog.get(name) else { continue };
        let start = Instant::now();
        let (field, search) = if name == CatalogName::U24 {
            let s = match find_u24_minor(&mq, budget, seed) {
                Search::Found(c) if matches!(c.verify(&mq, &target), Ok(true)) => Search::Found(c),
                Search::Found(_) => Search::BudgetExceeded,
                other => other,
            };
            (FieldTag::Rational, s)
        } else {
            (FieldTag::Gf2, minor_search(&m2, &target, budget, seed))
        };
        out.push(CatalogFinding {
            target: name,
            field,
            exhausted: search == Search::Exhausted,
            certificate: search.into_found(),
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Rat;
    use crate::matroid::catalog;

    #[test]
    fn target_in_itself() {
        let f7 = catalog(CatalogName::F7).unwrap();
        let AnyMatroid::Gf2(m) = &f7.matroid else { unreachable!() };
        let cert = minor_search(m, &f7, 1000, 1).into_found().unwrap();
        assert!(cert.spec.deletions.is_empty() && cert.spec.contractions.is_empty());
        assert!(cert.verify(m, &f7).unwrap());
    }

    #[test]
    fn no_f7_in_graphic() {
        let k4 = LinearMatroid::<Gf2>::from_boundary(&simplex_skeleton(4, 1), 1);
        let f7 = catalog(CatalogName::F7).unwrap();
        assert_eq!(minor_search(&k4, &f7, 100_000, 3), Search::Exhausted);
    }

    #[test]
    fn delta5_certificates() {
        let m = LinearMatroid::<Gf2>::from_boundary(&simplex_skeleton(6, 2), 2);
        let f7 = catalog(CatalogName::F7).unwrap();
        assert!(delta5_f7_certificate().verify(&m, &f7).unwrap());
        let star = catalog(CatalogName::F7star).unwrap();
        let cert = minor_search(&m, &star, DEFAULT_MINOR_BUDGET, 11).into_found().unwrap();
        assert!(cert.verify(&m, &star).unwrap());
    }

    #[test]
    fn clique_transport() {
        let x = CellComplex::from_simplices([vec![1, 3, 4, 7, 8, 9], vec![0, 1, 2]], 2);
        let m = LinearMatroid::<Gf2>::from_boundary(&x, 2);
        let cert = clique_f7_certificate(&x, &[1, 3, 4, 7, 8, 9]).unwrap();
        assert!(cert.verify(&m, &catalog(CatalogName::F7).unwrap()).unwrap());
    }

    #[test]
    fn tampered_certificate_fails() {
        let m = LinearMatroid::<Gf2>::from_boundary(&simplex_skeleton(6, 2), 2);
        let f7 = catalog(CatalogName::F7).unwrap();
        let mut cert = delta5_f7_certificate().clone();
        cert.bijection.swap(0, 1);
        let (a0, a1) = (cert.bijection[0].1.clone(), cert.bijection[1].1.clone());
        cert.bijection[0].1 = a1;
        cert.bijection[1].1 = a0;
        // Swapping two images only survives if it is an automorphism; a
        // contraction moved to the deletions never does.
        let mut broken = delta5_f7_certificate().clone();
        let moved = broken.spec.contractions.pop().unwrap();
        broken.spec.deletions.push(moved);
        assert!(!broken.verify(&m, &f7).unwrap());
        let _ = cert;
    }

    #[test]
    fn u24_search_over_rationals() {
        let m = LinearMatroid::<Rat>::from_boundary(&simplex_skeleton(6, 2), 2);
        let u = catalog(CatalogName::U24).unwrap();
        let cert = minor_search(&m, &u, DEFAULT_MINOR_BUDGET, 5).into_found().unwrap();
        assert!(cert.verify(&m, &u).unwrap());
    }
}
