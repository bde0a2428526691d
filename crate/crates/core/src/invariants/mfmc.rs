//! Detection of max-flow min-cut failure for the attached cell.
//!
//! Two sound detectors: a GF(2) circuit through `l` that meets some 6-clique
//! in exactly one triangle, and an F7* minor in which `l` survives.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::complex::{CellComplex, ATTACHED_LABEL};
use crate::error::{Error, Result};
use crate::exactla::{Field, Gf2, StandardForm};
use crate::matroid::{catalog, CatalogName, LinearMatroid, MinorSpec, NamedMatroid};

use super::minors::{minor_search_containing, MinorCertificate};
use super::Search;

/// Default number of (clique, face) pairs examined by the transversal search.
pub const DEFAULT_TRANSVERSAL_BUDGET: u64 = 400;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransversalWitness {
    pub clique: Vec<usize>,
    /// The single clique triangle on the circuit.
    pub face: String,
    pub circuit: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MfmcWitness {
    Transversal(TransversalWitness),
    Minor(MinorCertificate),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MfmcVerdict {
    FailsWithWitness(MfmcWitness),
    /// Nothing was found; this does not prove the max-flow min-cut property.
    NoWitnessFound,
}

impl MfmcVerdict {
    pub fn fails(&self) -> bool {
        matches!(self, MfmcVerdict::FailsWithWitness(_))
    }
}

fn clique_faces(clique: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for a in 0..clique.len() {
        for b in a + 1..clique.len() {
            for c in b + 1..clique.len() {
                out.push(vec![clique[a], clique[b], clique[c]]);
            }
        }
    }
    out
}

fn face_label(s: &[usize]) -> String {
    s.iter().map(usize::to_string).collect::<Vec<_>>().join("-")
}

/// Exact circuit test on a small element set.
fn is_circuit(m: &LinearMatroid<Gf2>, c: &[usize]) -> bool {
    !c.is_empty()
        && m.rank_of(c) == c.len() - 1
        && (0..c.len()).all(|i| {
            let rest: Vec<usize> = c.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &e)| e).collect();
            m.rank_of(&rest) == rest.len()
        })
}

impl TransversalWitness {
    pub fn verify(&self, x: &CellComplex, m: &LinearMatroid<Gf2>) -> bool {
        let mut q = self.clique.clone();
        q.sort_unstable();
        q.dedup();
        if q.len() != 6 {
            return false;
        }
        let faces: HashSet<String> = clique_faces(&q).iter().map(|f| face_label(f)).collect();
        if faces.iter().any(|f| m.index_of(f).is_err()) || (0..6).any(|i| x.index_of(&[q[i]]).is_none()) {
            return false;
        }
        let hits: Vec<&String> = self.circuit.iter().filter(|c| faces.contains(*c)).collect();
        if hits != [&self.face] || !self.circuit.iter().any(|c| c == ATTACHED_LABEL) {
            return false;
        }
        match m.indices_of(&self.circuit) {
            Ok(idx) => is_circuit(m, &idx),
            Err(_) => false,
        }
    }
}

/// A circuit through `a` and `b` of the matroid with standard form `sf`, if
/// they share a component. Pivots along shortest paths of the fundamental
/// graph until `a` lies on the fundamental circuit of `b`.
fn circuit_through(mut sf: StandardForm<Gf2>, a: usize, b: usize) -> Option<Vec<usize>> {
    let r = sf.rank();
    // Make `b` a non-basis element and `a` a basis element.
    if let Some(i) = sf.basis.iter().position(|&e| e == b) {
        let j = (0..sf.cobasis.len()).find(|&j| !sf.a[i][j].is_zero())?;
        sf.pivot(i, j);
    }
    if let Some(j) = sf.cobasis.iter().position(|&e| e == a) {
        let i = (0..r).find(|&i| !sf.a[i][j].is_zero())?;
        sf.pivot(i, j);
    }
    let ra = sf.basis.iter().position(|&e| e == a)?;
    let cb = sf.cobasis.iter().position(|&e| e == b)?;
    loop {
        if !sf.a[ra][cb].is_zero() {
            let mut c: Vec<usize> = (0..r).filter(|&i| !sf.a[i][cb].is_zero()).map(|i| sf.basis[i]).collect();
            c.push(b);
            c.sort_unstable();
            return Some(c);
        }
        // BFS from row `ra` to column `cb`; nodes are rows 0..r and columns r..
        let c = sf.cobasis.len();
        let mut prev = vec![usize::MAX; r + c];
        prev[ra] = ra;
        let mut queue = VecDeque::from([ra]);
        while let Some(u) = queue.pop_front() {
            let next: Vec<usize> = if u < r {
                (0..c).filter(|&j| !sf.a[u][j].is_zero()).map(|j| r + j).collect()
            } else {
                (0..r).filter(|&i| !sf.a[i][u - r].is_zero()).collect()
            };
            for v in next {
                if prev[v] == usize::MAX {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[r + cb] == usize::MAX {
            return None;
        }
        // Path ... row p -- column q -- row s -- column cb: pivot on (s, q).
        let s = prev[r + cb];
        let q = prev[s];
        sf.pivot(s, q - r);
    }
}

/// GF(2) circuit through `l` meeting some 6-clique of `x` in exactly one
/// triangle. Examines at most `budget` (clique, face) pairs.
pub fn find_clique_transversal_circuit(x: &CellComplex, budget: u64) -> Result<Search<TransversalWitness>> {
    let m = LinearMatroid::<Gf2>::from_boundary(x, 2);
    transversal_in(x, &m, budget)
}

pub(crate) fn transversal_in(x: &CellComplex, m: &LinearMatroid<Gf2>, budget: u64) -> Result<Search<TransversalWitness>> {
    let l = x.attached_index().ok_or_else(|| Error::PreconditionViolated("no attached cell".into()))?;
    let component = m.connected_components().into_iter().find(|c| c.contains(&l)).unwrap_or_default();
    let in_component: HashSet<usize> = component.iter().copied().collect();
    let mut spent = 0u64;
    let mut complete = true;
    'cliques: for clique in x.cliques(6) {
        let faces: Vec<usize> = clique_faces(&clique).iter().map(|f| x.index_of(f).expect("clique face")).collect();
        let face_set: HashSet<usize> = faces.iter().copied().collect();
        for &y in &faces {
            if !in_component.contains(&y) {
                continue;
            }
            if spent >= budget {
                complete = false;
                break 'cliques;
            }
            spent += 1;
            let keep: Vec<usize> = component.iter().copied().filter(|e| *e == y || !face_set.contains(e)).collect();
            let rep = m.rep().select_columns(&keep);
            let sf = StandardForm::from_matrix(&rep);
            let (pl, py) = (keep.binary_search(&l).expect("l kept"), keep.binary_search(&y).expect("y kept"));
            if let Some(c) = circuit_through(sf, pl, py) {
                let circuit: Vec<usize> = c.iter().map(|&i| keep[i]).collect();
                let w = TransversalWitness {
                    clique: clique.clone(),
                    face: m.labels()[y].clone(),
                    circuit: m.labels_of(&circuit),
                };
                if w.verify(x, m) {
                    return Ok(Search::Found(w));
                }
            }
        }
    }
    Ok(if complete { Search::Exhausted } else { Search::BudgetExceeded })
}

/// F7* minor of `m` in which element `l` survives.
pub fn f7star_containing(m: &LinearMatroid<Gf2>, l: usize, budget: u64, seed: u64) -> Search<MinorCertificate> {
    match catalog(CatalogName::F7star) {
        Ok(t) => minor_search_containing(m, &t, Some(l), budget, seed),
        Err(_) => Search::BudgetExceeded,
    }
}

/// Max-flow min-cut failure detector for the attached cell of `x`. The
/// minor search is skipped when `minor_budget` is zero.
pub fn mfmc_fails(x: &CellComplex, transversal_budget: u64, minor_budget: u64, seed: u64) -> Result<MfmcVerdict> {
    let m = LinearMatroid::<Gf2>::from_boundary(x, 2);
    if let Search::Found(w) = transversal_in(x, &m, transversal_budget)? {
        return Ok(MfmcVerdict::FailsWithWitness(MfmcWitness::Transversal(w)));
    }
    let l = x.attached_index().expect("checked by the transversal search");
    Ok(mfmc_fails_matroid(&m, l, minor_budget, seed))
}

/// The minor-based detector on a bare binary matroid.
pub fn mfmc_fails_matroid(m: &LinearMatroid<Gf2>, l: usize, minor_budget: u64, seed: u64) -> MfmcVerdict {
    if minor_budget == 0 {
        return MfmcVerdict::NoWitnessFound;
    }
    match f7star_containing(m, l, minor_budget, seed) {
        Search::Found(c) => MfmcVerdict::FailsWithWitness(MfmcWitness::Minor(c)),
        _ => MfmcVerdict::NoWitnessFound,
    }
}

/// Carry a minor through a circuit crossing a 6-clique in one triangle: with
/// `C \ {x, y}` contracted, `x` and `y` become parallel, so a minor of the
/// clique part containing `y` yields one containing `x`.
#[allow(clippy::too_many_arguments)]
pub fn transfer_minor(
    complex: &CellComplex,
    clique: &[usize],
    y: &str,
    x: &str,
    circuit: &[String],
    target: &NamedMatroid,
    budget: u64,
    seed: u64,
) -> Result<Search<MinorCertificate>> {
    let m = LinearMatroid::<Gf2>::from_boundary(complex, 2);
    let mut q = clique.to_vec();
    q.sort_unstable();
    q.dedup();
    if q.len() != 6 {
        return Err(Error::PreconditionViolated("a 6-clique has six vertices".into()));
    }
    let mut faces = Vec::new();
    for f in clique_faces(&q) {
        let label = face_label(&f);
        faces.push(m.index_of(&label).map_err(|_| Error::PreconditionViolated(format!("triangle {label} missing")))?);
    }
    let yi = m.index_of(y)?;
    let xi = m.index_of(x)?;
    if !faces.contains(&yi) {
        return Err(Error::PreconditionViolated(format!("{y} is not a face of the clique")));
    }
    let c = m.indices_of(circuit)?;
    let face_set: HashSet<usize> = faces.iter().copied().collect();
    let (contractions, kept): (Vec<usize>, Vec<usize>) = if xi == yi {
        (Vec::new(), faces.clone())
    } else {
        let hits: Vec<usize> = c.iter().copied().filter(|e| face_set.contains(e)).collect();
        if hits != [yi] || !c.contains(&xi) || !is_circuit(&m, &c) {
            return Err(Error::PreconditionViolated("the circuit must meet the clique exactly in y and contain x".into()));
        }
        let con: Vec<usize> = c.iter().copied().filter(|&e| e != xi && e != yi).collect();
        let mut kept = faces.clone();
        kept.push(xi);
        (con, kept)
    };
    let survivors: HashSet<usize> = kept.iter().chain(&contractions).copied().collect();
    let outside: Vec<usize> = (0..m.len()).filter(|e| !survivors.contains(e)).collect();
    let reduced = m.minor_indices(&outside, &contractions);
    let Ok(xr) = reduced.index_of(x) else { return Ok(Search::BudgetExceeded) };
    match minor_search_containing(&reduced, target, Some(xr), budget, seed) {
        Search::Found(inner) => {
            let mut deletions = m.labels_of(&outside);
            deletions.extend(inner.spec.deletions);
            let mut contracted = m.labels_of(&contractions);
            contracted.extend(inner.spec.contractions);
            let cert = MinorCertificate {
                target: inner.target,
                spec: MinorSpec { deletions, contractions: contracted },
                bijection: inner.bijection,
            };
            Ok(match cert.verify(&m, target) {
                Ok(true) => Search::Found(cert),
                _ => Search::BudgetExceeded,
            })
        }
        other => Ok(other),
    }
}
