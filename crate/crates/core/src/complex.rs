//! Clique complexes, simplex skeletons and the fence-attached complex R'.
//!
//! Cells of each dimension are sorted vertex tuples in lexicographic order.
//! A complex may additionally carry one attached 2-cell `l` glued along a
//! 1-cycle; it is always the last 2-cell.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{Field, Gf2, Matrix, Rat};
use crate::pointcloud::{distance, PointCloud};

pub type Simplex = Vec<usize>;

/// The distinguished non-simplicial 2-cell and its oriented boundary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttachedCell {
    /// `(edge index, +1 or -1)`, sorted by edge index.
    pub boundary: Vec<(usize, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplex {
    cells: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
    attached: Option<AttachedCell>,
}

/// Label used for the attached cell in matroid ground sets.
pub const ATTACHED_LABEL: &str = "l";

impl CellComplex {
    /// Closure of the given simplices, truncated at `max_dim`.
    pub fn from_simplices<I>(simplices: I, max_dim: usize) -> CellComplex
    where
        I: IntoIterator<Item = Simplex>,
    {
        let mut sets: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); max_dim + 1];
        for mut s in simplices {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                continue;
            }
            add_faces(&s, max_dim, &mut sets);
        }
        CellComplex::from_sets(sets)
    }

    fn from_sets(sets: Vec<BTreeSet<Simplex>>) -> CellComplex {
        let cells: Vec<Vec<Simplex>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let index = cells.iter().map(|c| c.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
        CellComplex { cells, index, attached: None }
    }

    /// Top dimension constructed (cells may be absent in that dimension).
    pub fn max_dim(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    /// Simplices of dimension `k` (excluding the attached cell).
    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.cells.get(k).map_or(&[], Vec::as_slice)
    }

    /// Number of `k`-cells including the attached cell.
    pub fn num_cells(&self, k: usize) -> usize {
        self.simplices(k).len() + usize::from(k == 2 && self.attached.is_some())
    }

    pub fn attached_cell(&self) -> Option<&AttachedCell> {
        self.attached.as_ref()
    }

    /// Column index of the attached cell among the 2-cells.
    pub fn attached_index(&self) -> Option<usize> {
        self.attached.as_ref().map(|_| self.simplices(2).len())
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s.len().checked_sub(1)?)?.get(s).copied()
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.simplices(0).iter().map(|v| v[0]).collect()
    }

    /// Human-readable label of the `i`-th `k`-cell, e.g. `0-3-5` or `l`.
    pub fn cell_label(&self, k: usize, i: usize) -> String {
        if k == 2 && Some(i) == self.attached_index() {
            return ATTACHED_LABEL.to_string();
        }
        self.simplices(k)[i].iter().map(usize::to_string).collect::<Vec<_>>().join("-")
    }

    pub fn cell_labels(&self, k: usize) -> Vec<String> {
        (0..self.num_cells(k)).map(|i| self.cell_label(k, i)).collect()
    }

    /// Signed boundary column of `k`-cell `i` as `(row, sign)`.
    pub fn boundary_column(&self, k: usize, i: usize) -> Vec<(usize, i64)> {
        if k == 2 && Some(i) == self.attached_index() {
            return self.attached.as_ref().unwrap().boundary.clone();
        }
        if k == 0 {
            return Vec::new();
        }
        let s = &self.simplices(k)[i];
        let mut col: Vec<(usize, i64)> = (0..s.len())
            .map(|j| {
                let mut face = s.clone();
                face.remove(j);
                let row = self.index[k - 1][&face];
                (row, if j % 2 == 0 { 1 } else { -1 })
            })
            .collect();
        col.sort_unstable();
        col
    }

    /// Degree-`k` boundary operator: rows are `(k-1)`-cells, columns `k`-cells.
    pub fn boundary<F: Field>(&self, k: usize) -> Matrix<F> {
        assert!(k >= 1, "boundary degree must be at least 1");
        let rows = self.num_cells(k - 1);
        let cols = (0..self.num_cells(k))
            .map(|i| self.boundary_column(k, i).into_iter().map(|(r, s)| (r, F::from_i64(s))).collect())
            .collect();
        Matrix::from_columns(rows, cols)
    }

    pub fn boundary_rational(&self, k: usize) -> Matrix<Rat> {
        self.boundary(k)
    }

    pub fn boundary_gf2(&self, k: usize) -> Matrix<Gf2> {
        self.boundary(k)
    }

    /// Oriented edge chain following the given vertex ring.
    pub fn ring_chain(&self, ring: &[usize]) -> Result<Vec<(usize, i64)>> {
        let n = ring.len();
        let mut chain = Vec::with_capacity(n);
        for k in 0..n {
            let (a, b) = (ring[k], ring[(k + 1) % n]);
            let e = self
                .index_of(&[a.min(b), a.max(b)])
                .ok_or_else(|| Error::NotACycle(format!("ring edge {a}-{b} is not in the complex")))?;
            chain.push((e, if a < b { -1 } else { 1 }));
        }
        chain.sort_unstable();
        Ok(chain)
    }

    /// Attach `l` along an explicit oriented 1-chain.
    pub fn attach_cell(&self, chain: Vec<(usize, i64)>) -> Result<CellComplex> {
        if self.attached.is_some() {
            return Err(Error::Invalid("complex already has an attached cell".into()));
        }
        let mut chain = chain;
        chain.sort_unstable();
        if chain.is_empty() || chain.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::NotACycle("empty chain or repeated edge".into()));
        }
        let nedges = self.simplices(1).len();
        if chain.iter().any(|&(e, s)| e >= nedges || !(s == 1 || s == -1)) {
            return Err(Error::NotACycle("chain must use existing edges with signs +-1".into()));
        }
        let col_q: Vec<(usize, Rat)> = chain.iter().map(|&(e, s)| (e, Rat::integer(s))).collect();
        let d1: Matrix<Rat> = self.boundary(1);
        if !d1.mul(&Matrix::from_columns(nedges, vec![col_q])).is_zero() {
            return Err(Error::NotACycle("chain has nonzero rational boundary".into()));
        }
        let col_2: Vec<(usize, Gf2)> = chain.iter().map(|&(e, _)| (e, Gf2::ONE)).collect();
        let d1_2: Matrix<Gf2> = self.boundary(1);
        if !d1_2.mul(&Matrix::from_columns(nedges, vec![col_2])).is_zero() {
            return Err(Error::NotACycle("chain has nonzero mod-2 boundary".into()));
        }
        let mut out = self.clone();
        if out.cells.len() < 3 {
            out.cells.resize(3, Vec::new());
            out.index.resize(3, HashMap::new());
        }
        out.attached = Some(AttachedCell { boundary: chain });
        Ok(out)
    }

    /// Attach `l` along an unoriented edge set; orientations are chosen by
    /// walking an Euler circuit of each component so the chain is a rational cycle.
    pub fn attach_fence_cell(&self, fence_edges: &[usize]) -> Result<CellComplex> {
        let edges: BTreeSet<usize> = fence_edges.iter().copied().collect();
        if edges.is_empty() {
            return Err(Error::NotACycle("empty edge set".into()));
        }
        let mut adj: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        for &e in &edges {
            let s = self.simplices(1).get(e).ok_or_else(|| Error::NotACycle(format!("edge {e} does not exist")))?;
            adj.entry(s[0]).or_default().push((s[1], e));
            adj.entry(s[1]).or_default().push((s[0], e));
        }
        if let Some((v, _)) = adj.iter().find(|(_, nb)| nb.len() % 2 == 1) {
            return Err(Error::NotACycle(format!("vertex {v} has odd degree")));
        }
        let mut used: BTreeSet<usize> = BTreeSet::new();
        let mut chain = Vec::new();
        let mut starts: Vec<usize> = adj.keys().copied().collect();
        starts.sort_unstable();
        for start in starts {
            // Hierholzer's walk records each edge with the direction it is traversed.
            let mut stack = vec![start];
            while let Some(&v) = stack.last() {
                let next = adj[&v].iter().find(|(_, e)| !used.contains(e)).copied();
                match next {
                    Some((w, e)) => {
                        used.insert(e);
                        let s = &self.simplices(1)[e];
                        chain.push((e, if s[0] == v { 1 } else { -1 }));
                        stack.push(w);
                    }
                    None => {
                        stack.pop();
                    }
                }
            }
        }
        self.attach_cell(chain)
    }

    /// The fence condition: the subcomplex induced on the fence vertices is a
    /// single cycle through all of them and contains no 2-cells.
    pub fn validate_fence(&self, fence: &[usize]) -> bool {
        let n = fence.len();
        if n < 3 {
            return false;
        }
        let set: BTreeSet<usize> = fence.iter().copied().collect();
        if set.len() != n || fence.iter().any(|v| self.index_of(&[*v]).is_none()) {
            return false;
        }
        let induced: Vec<&Simplex> = self.simplices(1).iter().filter(|e| set.contains(&e[0]) && set.contains(&e[1])).collect();
        if induced.len() != n {
            return false;
        }
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for e in &induced {
            adj.entry(e[0]).or_default().push(e[1]);
            adj.entry(e[1]).or_default().push(e[0]);
        }
        if fence.iter().any(|v| adj.get(v).map_or(0, Vec::len) != 2) {
            return false;
        }
        // Connected 2-regular graph on all fence vertices is one cycle.
        let mut seen = BTreeSet::from([fence[0]]);
        let mut stack = vec![fence[0]];
        while let Some(v) = stack.pop() {
            for &w in &adj[&v] {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        if seen.len() != n {
            return false;
        }
        let has_triangle = self.simplices(2).iter().any(|t| t.iter().all(|v| set.contains(v)));
        // A 3-vertex ring is a clique, which a clique complex fills in.
        !has_triangle && n >= 4
    }

    /// Subcomplex generated by the selected cells of dimension `k`
    /// (index `attached_index()` selects `l`).
    pub fn closure(&self, k: usize, selection: &[usize]) -> CellComplex {
        let top = self.max_dim().max(k);
        let mut sets: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); top + 1];
        let mut chain = None;
        for &i in selection {
            if k == 2 && Some(i) == self.attached_index() {
                let bd = self.attached.as_ref().unwrap().boundary.clone();
                for &(e, _) in &bd {
                    add_faces(&self.simplices(1)[e], top, &mut sets);
                }
                chain = Some(bd);
            } else {
                add_faces(&self.simplices(k)[i], top, &mut sets);
            }
        }
        let mut out = CellComplex::from_sets(sets);
        if let Some(bd) = chain {
            // Re-index the boundary edges in the subcomplex.
            let remapped: Vec<(usize, i64)> =
                bd.iter().map(|&(e, s)| (out.index_of(&self.simplices(1)[e]).unwrap(), s)).collect();
            out = out.attach_cell(remapped).expect("closure of a cycle is a cycle");
        }
        out
    }

    /// Cells of `other` (a complex on the same vertex labels) contained in `self`.
    pub fn contains_complex(&self, other: &CellComplex) -> bool {
        (0..=other.max_dim()).all(|k| other.simplices(k).iter().all(|s| self.index_of(s).is_some()))
    }

    /// Adjacency lists of the 1-skeleton keyed by vertex label.
    pub fn graph(&self) -> HashMap<usize, Vec<usize>> {
        let mut adj: HashMap<usize, Vec<usize>> = self.vertices().into_iter().map(|v| (v, Vec::new())).collect();
        for e in self.simplices(1) {
            adj.entry(e[0]).or_default().push(e[1]);
            adj.entry(e[1]).or_default().push(e[0]);
        }
        for nb in adj.values_mut() {
            nb.sort_unstable();
        }
        adj
    }

    /// All cliques of the given size in the 1-skeleton, lexicographically.
    pub fn cliques(&self, size: usize) -> Vec<Simplex> {
        if size == 0 {
            return Vec::new();
        }
        let adj = self.graph();
        let mut verts: Vec<usize> = adj.keys().copied().collect();
        verts.sort_unstable();
        enumerate_cliques(&verts, &|v| adj[&v].as_slice(), size)
    }

    pub fn count_cliques(&self, size: usize) -> usize {
        self.cliques(size).len()
    }

    /// Euler characteristic over all constructed dimensions (attached cell included).
    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.max_dim()).map(|k| if k % 2 == 0 { 1 } else { -1 } * self.num_cells(k) as i64).sum()
    }
}

fn add_faces(s: &[usize], max_dim: usize, sets: &mut [BTreeSet<Simplex>]) {
    let n = s.len();
    for mask in 1u64..(1u64 << n) {
        let k = mask.count_ones() as usize;
        if k > max_dim + 1 {
            continue;
        }
        let face: Simplex = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| s[i]).collect();
        sets[k - 1].insert(face);
    }
}

/// Ordered clique enumeration: each clique is grown from its smallest vertex
/// through higher-labelled common neighbours.
fn enumerate_cliques<'a>(verts: &[usize], nbrs: &dyn Fn(usize) -> &'a [usize], size: usize) -> Vec<Simplex> {
    fn grow<'a>(
        clique: &mut Vec<usize>,
        cand: &[usize],
        nbrs: &dyn Fn(usize) -> &'a [usize],
        size: usize,
        out: &mut Vec<Simplex>,
    ) {
        if clique.len() == size {
            out.push(clique.clone());
            return;
        }
        if clique.len() + cand.len() < size {
            return;
        }
        for (i, &u) in cand.iter().enumerate() {
            let nu = nbrs(u);
            let next: Vec<usize> = cand[i + 1..].iter().copied().filter(|w| nu.binary_search(w).is_ok()).collect();
            clique.push(u);
            grow(clique, &next, nbrs, size, out);
            clique.pop();
        }
    }
    let mut out = Vec::new();
    let mut clique = Vec::new();
    grow(&mut clique, verts, nbrs, size, &mut out);
    out
}

/// Clique complex of the graph with an edge between distinct points at
/// distance strictly less than `epsilon`.
pub fn vietoris_rips(cloud: &PointCloud, epsilon: f64, max_dim: usize) -> CellComplex {
    assert!(max_dim >= 1, "max_dim must be at least 1");
    let n = cloud.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let d = distance(&cloud.points[i], &cloud.points[j]);
            if d > 0.0 && d < epsilon {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let verts: Vec<usize> = (0..n).collect();
    let mut sets: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); max_dim + 1];
    sets[0] = verts.iter().map(|&v| vec![v]).collect();
    for k in 1..=max_dim {
        sets[k] = enumerate_cliques(&verts, &|v| adj[v].as_slice(), k + 1).into_iter().collect();
    }
    CellComplex::from_sets(sets)
}

/// The full simplex on `num_vertices` vertices truncated at `max_dim`.
pub fn simplex_skeleton(num_vertices: usize, max_dim: usize) -> CellComplex {
    assert!(num_vertices >= 1);
    CellComplex::from_simplices([(0..num_vertices).collect::<Vec<_>>()], max_dim)
}

/// Text form: one `cell <dim> <v0> ... <vk>` line per simplex, then
/// `attached 2 cycle <+e|-e> ...` for the attached cell. A leading
/// `dim <k>` line keeps the top dimension when it has no cells.
pub fn write_complex(x: &CellComplex) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dim {}", x.max_dim());
    for k in 0..=x.max_dim() {
        for s in x.simplices(k) {
            let vs: Vec<String> = s.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "cell {k} {}", vs.join(" "));
        }
    }
    if let Some(a) = x.attached_cell() {
        let es: Vec<String> = a.boundary.iter().map(|(e, s)| format!("{}{e}", if *s > 0 { "+" } else { "-" })).collect();
        let _ = writeln!(out, "attached 2 cycle {}", es.join(" "));
    }
    out
}

pub fn read_complex(text: &str) -> Result<CellComplex> {
    let mut simplices = Vec::new();
    let mut max_dim = 0;
    let mut declared = None;
    let mut attached = None;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.first().copied() {
            Some("cell") => {
                let k: usize = parts.get(1).and_then(|d| d.parse().ok()).ok_or_else(|| Error::Parse(format!("bad cell line `{line}`")))?;
                let vs: Vec<usize> = parts[2..]
                    .iter()
                    .map(|v| v.parse().map_err(|_| Error::Parse(format!("bad vertex `{v}`"))))
                    .collect::<Result<_>>()?;
                if vs.len() != k + 1 {
                    return Err(Error::Parse(format!("cell of dimension {k} needs {} vertices", k + 1)));
                }
                max_dim = max_dim.max(k);
                simplices.push(vs);
            }
            Some("dim") => {
                let k: usize = parts.get(1).and_then(|d| d.parse().ok()).ok_or_else(|| Error::Parse(format!("bad dim line `{line}`")))?;
                declared = Some(k);
            }
            Some("attached") => {
                if parts.get(1) != Some(&"2") || parts.get(2) != Some(&"cycle") {
                    return Err(Error::Parse(format!("bad attached line `{line}`")));
                }
                let chain: Vec<(usize, i64)> = parts[3..]
                    .iter()
                    .map(|t| {
                        let (sign, body) = match t.as_bytes().first() {
                            Some(b'+') => (1, &t[1..]),
                            Some(b'-') => (-1, &t[1..]),
                            _ => (1, *t),
                        };
                        body.parse().map(|e| (e, sign)).map_err(|_| Error::Parse(format!("bad edge `{t}`")))
                    })
                    .collect::<Result<_>>()?;
                attached = Some(chain);
            }
            _ => return Err(Error::Parse(format!("unrecognised line `{line}`"))),
        }
    }
    if let Some(d) = declared {
        if d < max_dim {
            return Err(Error::Parse(format!("cell of dimension {max_dim} above declared dim {d}")));
        }
        max_dim = d;
    }
    let x = CellComplex::from_simplices(simplices, max_dim);
    match attached {
        Some(chain) => x.attach_cell(chain),
        None => Ok(x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> CellComplex {
        CellComplex::from_simplices([vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]], 2)
    }

    #[test]
    fn close_triple_gives_triangle() {
        let c = PointCloud::new(2, vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![0.05, 0.08]], vec![]).unwrap();
        let x = vietoris_rips(&c, 0.2, 2);
        assert_eq!((x.num_cells(0), x.num_cells(1), x.num_cells(2)), (3, 3, 1));
    }

    #[test]
    fn strict_threshold_drops_ties() {
        let c = PointCloud::new(2, vec![vec![0.0, 0.0], vec![0.25, 0.0]], vec![]).unwrap();
        assert_eq!(vietoris_rips(&c, 0.25, 2).num_cells(1), 0);
        assert_eq!(vietoris_rips(&c, 0.2500001, 2).num_cells(1), 1);
    }

    #[test]
    fn coincident_points_are_not_joined() {
        let c = PointCloud::new(2, vec![vec![0.5, 0.5], vec![0.5, 0.5]], vec![]).unwrap();
        assert_eq!(vietoris_rips(&c, 0.1, 1).num_cells(1), 0);
    }

    #[test]
    fn six_close_points() {
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![0.01 * i as f64, 0.0]).collect();
        let x = vietoris_rips(&PointCloud::new(2, pts, vec![]).unwrap(), 0.2, 2);
        assert_eq!(x.num_cells(2), 20);
    }

    #[test]
    fn skeleton_counts() {
        let x = simplex_skeleton(4, 2);
        assert_eq!((x.num_cells(0), x.num_cells(1), x.num_cells(2)), (4, 6, 4));
        let y = simplex_skeleton(6, 2);
        assert_eq!((y.num_cells(1), y.num_cells(2)), (15, 20));
    }

    #[test]
    fn triangle_boundary_signs() {
        let x = CellComplex::from_simplices([vec![0, 1, 2]], 2);
        let d = x.boundary_rational(2);
        // Edges in order 01, 02, 12.
        assert_eq!(d.get(2, 0), Rat::integer(1));
        assert_eq!(d.get(1, 0), Rat::integer(-1));
        assert_eq!(d.get(0, 0), Rat::integer(1));
        let d1 = x.boundary_rational(1);
        assert_eq!(d1.get(0, 0), Rat::integer(-1));
        assert_eq!(d1.get(1, 0), Rat::integer(1));
    }

    #[test]
    fn boundary_of_boundary_vanishes() {
        let x = simplex_skeleton(6, 3);
        for k in 2..=3 {
            assert!(x.boundary_rational(k - 1).mul(&x.boundary_rational(k)).is_zero());
            assert!(x.boundary_gf2(k - 1).mul(&x.boundary_gf2(k)).is_zero());
        }
    }

    #[test]
    fn mod2_commutes_with_construction() {
        let x = simplex_skeleton(5, 3);
        for k in 1..=3 {
            assert_eq!(x.boundary_rational(k).mod2(), x.boundary_gf2(k));
        }
    }

    #[test]
    fn attach_to_square_graph() {
        let sq = CellComplex::from_simplices([vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]], 1);
        let r = sq.attach_fence_cell(&[0, 1, 2, 3]).unwrap();
        let d2 = r.boundary_rational(2);
        assert_eq!((d2.num_rows(), d2.num_cols()), (4, 1));
        assert_eq!(d2.rank(), 1);
        assert!(r.boundary_rational(1).mul(&d2).is_zero());
        assert_eq!(r.cell_label(2, 0), "l");
    }

    #[test]
    fn attach_rejects_non_cycles() {
        let sq = CellComplex::from_simplices([vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]], 1);
        assert!(matches!(sq.attach_fence_cell(&[0, 1]), Err(Error::NotACycle(_))));
        // A GF(2) cycle with incoherent signs fails the rational check.
        assert!(matches!(sq.attach_cell(vec![(0, 1), (1, 1), (2, 1), (3, 1)]), Err(Error::NotACycle(_))));
    }

    #[test]
    fn validate_fence_cases() {
        let ring: Vec<usize> = vec![0, 1, 2, 3];
        let sq = CellComplex::from_simplices([vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]], 2);
        assert!(sq.validate_fence(&ring));
        let chord = CellComplex::from_simplices([vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3], vec![0, 2]], 2);
        assert!(!chord.validate_fence(&ring));
        let tri = CellComplex::from_simplices([vec![0, 1, 2]], 2);
        assert!(!tri.validate_fence(&[0, 1, 2]));
    }

    #[test]
    fn closures() {
        let s = sphere();
        let one = s.closure(2, &[0]);
        assert_eq!((one.num_cells(0), one.num_cells(1), one.num_cells(2)), (3, 3, 1));
        let two = s.closure(2, &[0, 1]);
        assert_eq!((two.num_cells(0), two.num_cells(1), two.num_cells(2)), (4, 5, 2));
        let all = s.closure(2, &[0, 1, 2, 3]);
        assert_eq!(all, s);
    }

    #[test]
    fn clique_counts() {
        assert_eq!(simplex_skeleton(6, 1).count_cliques(6), 1);
        assert_eq!(simplex_skeleton(7, 1).count_cliques(6), 7);
        let empty = CellComplex::from_simplices([vec![0], vec![1]], 1);
        assert_eq!(empty.count_cliques(2), 0);
    }

    #[test]
    fn file_roundtrip() {
        let ring_graph = CellComplex::from_simplices([vec![0, 1, 4], vec![1, 2], vec![2, 3], vec![0, 3]], 2);
        let r = ring_graph.attach_cell(ring_graph.ring_chain(&[0, 1, 2, 3]).unwrap()).unwrap();
        let text = write_complex(&r);
        assert!(text.contains("attached 2 cycle"));
        assert_eq!(read_complex(&text).unwrap(), r);
    }
}
