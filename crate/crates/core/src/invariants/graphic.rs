//! Graphic and cographic recognition by bounded graph realization.
//!
//! The basis of the standard form becomes a spanning forest and every
//! non-basis element must close its fundamental circuit, so each column of
//! `A` has to be a path in the forest. Rows are placed one at a time in BFS
//! order over the support of `A`; placing a row splits a tree vertex in two,
//! and the column paths decide which incident edges may or must share a side.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::exactla::{Field, Gf2, Matrix, StandardForm};
use crate::matroid::LinearMatroid;

use super::Search;

/// Default number of vertex splits tried before giving up.
pub const DEFAULT_GRAPHIC_BUDGET: u64 = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphCertificate {
    pub num_vertices: usize,
    /// `(element label, tail, head)`; loops have equal ends.
    pub edges: Vec<(String, usize, usize)>,
    /// The graph realizes the dual of the tested matroid.
    pub cographic: bool,
}

impl GraphCertificate {
    /// The cycle matroid of the graph equals `m` (or `m*`) as a labelled
    /// matroid: the basis of `m` is a spanning forest with the same
    /// fundamental circuits.
    pub fn verify(&self, m: &LinearMatroid<Gf2>) -> bool {
        let target = if self.cographic { m.dual() } else { m.clone() };
        if self.edges.len() != target.len() {
            return false;
        }
        let ends: HashMap<&str, (usize, usize)> = self.edges.iter().map(|(l, u, v)| (l.as_str(), (*u, *v))).collect();
        if ends.len() != self.edges.len() || ends.values().any(|&(u, v)| u >= self.num_vertices || v >= self.num_vertices) {
            return false;
        }
        let sf = target.standard_form();
        let mut cols = Vec::with_capacity(target.len());
        for &e in sf.basis.iter().chain(&sf.cobasis) {
            let Some(&(u, v)) = ends.get(target.labels()[e].as_str()) else { return false };
            cols.push(if u == v { Vec::new() } else { vec![(u, Gf2::ONE), (v, Gf2::ONE)] });
        }
        let g = StandardForm::from_matrix(&Matrix::from_columns(self.num_vertices, cols));
        g.basis == (0..sf.rank()).collect::<Vec<_>>() && g.a == sf.a
    }
}

struct Realizer<'a> {
    col_rows: &'a [Vec<usize>],
    row_cols: &'a [Vec<usize>],
    order: Vec<usize>,
    placed: Vec<bool>,
    ends: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
    nodes: u64,
    budget: u64,
}

struct OverBudget;

impl Realizer<'_> {
    /// Vertex degrees of the placed part of column `j`, with the incident
    /// path edges at each vertex.
    fn path(&self, j: usize) -> BTreeMap<usize, Vec<usize>> {
        let mut deg: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &r in &self.col_rows[j] {
            if self.placed[r] {
                let (u, v) = self.ends[r];
                deg.entry(u).or_default().push(r);
                deg.entry(v).or_default().push(r);
            }
        }
        deg
    }

    fn run(&mut self, k: usize) -> Result<bool, OverBudget> {
        if k == self.order.len() {
            return Ok(true);
        }
        let r = self.order[k];
        let own: BTreeSet<usize> = self.row_cols[r].iter().copied().collect();
        let paths: Vec<BTreeMap<usize, Vec<usize>>> = own.iter().map(|&j| self.path(j)).filter(|p| !p.is_empty()).collect();
        let mut candidates: Option<BTreeSet<usize>> = None;
        for p in &paths {
            let verts: BTreeSet<usize> = p.keys().copied().collect();
            candidates = Some(match candidates {
                None => verts,
                Some(c) => c.intersection(&verts).copied().collect(),
            });
        }
        let candidates = candidates.unwrap_or_default();
        for x in candidates {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(OverBudget);
            }
            let edges = self.incident[x].clone();
            let pos: HashMap<usize, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
            // (a, b, differ)
            let mut constraints: Vec<(usize, usize, bool)> = Vec::new();
            for p in &paths {
                if let Some(at) = p.get(&x) {
                    if at.len() == 2 {
                        constraints.push((pos[&at[0]], pos[&at[1]], true));
                    }
                }
            }
            let mut others = BTreeSet::new();
            for &e in &edges {
                others.extend(self.row_cols[e].iter().copied().filter(|j| !own.contains(j)));
            }
            for j in others {
                if let Some(at) = self.path(j).get(&x) {
                    if at.len() == 2 {
                        constraints.push((pos[&at[0]], pos[&at[1]], false));
                    }
                }
            }
            let Some((colour, comp, ncomp)) = two_colour(edges.len(), &constraints) else { continue };
            // The component of the first edge is fixed by the symmetry of the split.
            let free = ncomp.saturating_sub(1);
            let choices: u64 = if free >= 63 { u64::MAX } else { 1 << free };
            let mut mask = 0u64;
            loop {
                let side: Vec<bool> = (0..edges.len()).map(|i| colour[i] ^ (comp[i] > 0 && mask >> (comp[i] - 1) & 1 == 1)).collect();
                let y = self.incident.len();
                self.incident.push(Vec::new());
                let mut moved = Vec::new();
                for (i, &e) in edges.iter().enumerate() {
                    if side[i] {
                        moved.push(e);
                        let (u, v) = &mut self.ends[e];
                        if *u == x {
                            *u = y;
                        } else {
                            *v = y;
                        }
                    }
                }
                self.incident[x].retain(|e| !moved.contains(e));
                self.incident[y] = moved.clone();
                self.incident[x].push(r);
                self.incident[y].push(r);
                self.ends[r] = (x, y);
                self.placed[r] = true;
                if self.run(k + 1)? {
                    return Ok(true);
                }
                self.placed[r] = false;
                self.incident[x].retain(|&e| e != r);
                for &e in &moved {
                    let (u, v) = &mut self.ends[e];
                    if *u == y {
                        *u = x;
                    } else {
                        *v = x;
                    }
                }
                self.incident[x].extend(moved);
                self.incident.pop();
                mask += 1;
                if mask >= choices {
                    break;
                }
                self.nodes += 1;
                if self.nodes > self.budget {
                    return Err(OverBudget);
                }
            }
        }
        Ok(false)
    }
}

/// Parity 2-colouring of a constraint graph: returns colours, component ids
/// (component 0 contains vertex 0) and the component count.
fn two_colour(n: usize, constraints: &[(usize, usize, bool)]) -> Option<(Vec<bool>, Vec<usize>, usize)> {
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for &(a, b, d) in constraints {
        adj[a].push((b, d));
        adj[b].push((a, d));
    }
    let mut colour = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut ncomp = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = ncomp;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &(v, d) in &adj[u] {
                let want = colour[u] ^ d;
                if comp[v] == usize::MAX {
                    comp[v] = ncomp;
                    colour[v] = want;
                    stack.push(v);
                } else if colour[v] != want {
                    return None;
                }
            }
        }
        ncomp += 1;
    }
    Some((colour, comp, ncomp))
}

/// Realize `[I | A]` as a graph, or prove none exists within `budget` splits.
fn realize(sf: &StandardForm<Gf2>, labels: &[String], budget: u64) -> Search<GraphCertificate> {
    let (r, c) = (sf.rank(), sf.cobasis.len());
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); c];
    let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); r];
    for i in 0..r {
        for j in 0..c {
            if !sf.a[i][j].is_zero() {
                col_rows[j].push(i);
                row_cols[i].push(j);
            }
        }
    }
    let mut edges: Vec<(String, usize, usize)> = Vec::new();
    let mut next_vertex = 0usize;
    let mut row_seen = vec![false; r];
    let mut nodes = 0u64;
    for start in 0..r {
        if row_seen[start] {
            continue;
        }
        // BFS over the bipartite support from `start`.
        let mut order = vec![start];
        row_seen[start] = true;
        let mut col_seen: BTreeSet<usize> = BTreeSet::new();
        let mut head = 0;
        while head < order.len() {
            let i = order[head];
            head += 1;
            for &j in &row_cols[i] {
                if col_seen.insert(j) {
                    for &i2 in &col_rows[j] {
                        if !row_seen[i2] {
                            row_seen[i2] = true;
                            order.push(i2);
                        }
                    }
                }
            }
        }
        let mut rz = Realizer {
            col_rows: &col_rows,
            row_cols: &row_cols,
            order: order.clone(),
            placed: vec![false; r],
            ends: vec![(0, 0); r],
            incident: vec![vec![start], vec![start]],
            nodes,
            budget,
        };
        rz.placed[start] = true;
        rz.ends[start] = (0, 1);
        rz.order.remove(0);
        match rz.run(0) {
            Err(OverBudget) => return Search::BudgetExceeded,
            Ok(false) => return Search::Exhausted,
            Ok(true) => {}
        }
        nodes = rz.nodes;
        for &i in &order {
            let (u, v) = rz.ends[i];
            edges.push((labels[sf.basis[i]].clone(), next_vertex + u, next_vertex + v));
        }
        for &j in &col_seen {
            let ends: Vec<usize> = rz.path(j).into_iter().filter(|(_, at)| at.len() == 1).map(|(v, _)| v).collect();
            edges.push((labels[sf.cobasis[j]].clone(), next_vertex + ends[0], next_vertex + ends[1]));
        }
        next_vertex += rz.incident.len();
    }
    // Zero columns are loops.
    for j in 0..c {
        if col_rows[j].is_empty() {
            edges.push((labels[sf.cobasis[j]].clone(), next_vertex, next_vertex));
            next_vertex += 1;
        }
    }
    Search::Found(GraphCertificate { num_vertices: next_vertex.max(1), edges, cographic: false })
}

/// A graph whose cycle matroid is `m`, verified before it is returned.
pub fn is_graphic(m: &LinearMatroid<Gf2>, budget: u64) -> Search<GraphCertificate> {
    checked(realize(m.standard_form(), m.labels(), budget), m)
}

/// A graph whose cycle matroid is `m*`, verified before it is returned.
pub fn is_cographic(m: &LinearMatroid<Gf2>, budget: u64) -> Search<GraphCertificate> {
    let dual = m.dual();
    let found = realize(dual.standard_form(), dual.labels(), budget);
    let found = match found {
        Search::Found(g) => Search::Found(GraphCertificate { cographic: true, ..g }),
        other => other,
    };
    checked(found, m)
}

fn checked(s: Search<GraphCertificate>, m: &LinearMatroid<Gf2>) -> Search<GraphCertificate> {
    match s {
        Search::Found(g) if g.verify(m) => Search::Found(g),
        // A realization that fails verification would be a bug; never report it.
        Search::Found(_) => Search::BudgetExceeded,
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{simplex_skeleton, CellComplex};
    use crate::matroid::{catalog, AnyMatroid, CatalogName};

    fn gf2(name: CatalogName) -> LinearMatroid<Gf2> {
        match catalog(name).unwrap().matroid {
            AnyMatroid::Gf2(m) => m,
            AnyMatroid::Rational(_) => unreachable!(),
        }
    }

    #[test]
    fn graphs_are_graphic() {
        for nv in 2..=6 {
            let m = LinearMatroid::<Gf2>::from_boundary(&simplex_skeleton(nv, 1), 1);
            let g = is_graphic(&m, DEFAULT_GRAPHIC_BUDGET).into_found().unwrap();
            assert!(g.verify(&m));
        }
        let forest = CellComplex::from_simplices([vec![0, 1], vec![2, 3], vec![3, 4]], 1);
        assert!(is_graphic(&LinearMatroid::from_boundary(&forest, 1), 1000).is_found());
    }

    #[test]
    fn fano_is_neither() {
        for name in [CatalogName::F7, CatalogName::F7star] {
            let m = gf2(name);
            assert_eq!(is_graphic(&m, DEFAULT_GRAPHIC_BUDGET), Search::Exhausted);
            assert_eq!(is_cographic(&m, DEFAULT_GRAPHIC_BUDGET), Search::Exhausted);
        }
    }

    #[test]
    fn k5_is_not_cographic() {
        let m = LinearMatroid::<Gf2>::from_boundary(&simplex_skeleton(5, 1), 1);
        assert_eq!(is_cographic(&m, DEFAULT_GRAPHIC_BUDGET), Search::Exhausted);
    }

    #[test]
    fn sphere_triangles_are_cographic() {
        let m = LinearMatroid::<Gf2>::from_boundary(&simplex_skeleton(5, 2), 2);
        let g = is_cographic(&m, DEFAULT_GRAPHIC_BUDGET).into_found().unwrap();
        assert!(g.verify(&m) && g.cographic);
    }

    #[test]
    fn loops_and_coloops() {
        let m = LinearMatroid::<Gf2>::from_matrix(Matrix::from_i64_rows(&[vec![1, 0, 0], vec![0, 0, 0]]));
        let g = is_graphic(&m, 10).into_found().unwrap();
        assert!(g.verify(&m));
    }
}
