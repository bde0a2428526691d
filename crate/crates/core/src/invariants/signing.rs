//! Camion signing of a binary matrix and total-unimodularity testing.
//!
//! The signing grows the bipartite support graph one vertex at a time in BFS
//! order. The first edge at a new vertex is signed `+1`; every further edge
//! closes a chordless cycle through an already-signed edge and is signed so
//! that the cycle sums to 0 mod 4. A TU signing, when one exists, agrees with
//! this one up to scaling rows and columns by -1.

use serde::{Deserialize, Serialize};

use crate::exactla::{scan_entries_blocks, Field, Gf2, Matrix, Rat};
use crate::matroid::LinearMatroid;

use super::Verdict;

/// Determinant scans are attempted when the reduced blocks need at most
/// this many submatrix determinants in total.
pub const SCAN_LIMIT: f64 = 3.0e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TuStatus {
    Tu,
    NotTu,
    /// The signing succeeded but the matrix was too large to verify.
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    /// Rows and columns follow a chordless cycle; after scaling the submatrix
    /// is the canonical cycle matrix with determinant 2.
    Cycle,
    /// A square submatrix with determinant outside {-1, 0, 1}.
    Submatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationCertificate {
    pub kind: ViolationKind,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// Entries of the signed submatrix, in the order of `rows` and `cols`.
    pub entries: Vec<Vec<i64>>,
    /// Scaling by -1/+1 bringing a cycle submatrix to canonical shape.
    pub row_scaling: Vec<i64>,
    pub col_scaling: Vec<i64>,
    pub determinant: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigningResult {
    pub status: TuStatus,
    /// The signed matrix, present unless a violation was found.
    pub signed_matrix: Option<Matrix<Rat>>,
    pub violation: Option<ViolationCertificate>,
}

impl ViolationCertificate {
    /// Check the certificate against the binary matrix it was derived from.
    pub fn verify(&self, b: &Matrix<Gf2>) -> bool {
        let k = self.rows.len();
        if k != self.cols.len() || self.entries.len() != k || self.entries.iter().any(|r| r.len() != k) {
            return false;
        }
        for (i, &r) in self.rows.iter().enumerate() {
            for (j, &c) in self.cols.iter().enumerate() {
                let e = self.entries[i][j];
                if r >= b.num_rows() || c >= b.num_cols() || !(-1..=1).contains(&e) || (e != 0) != b.get(r, c).0 {
                    return false;
                }
            }
        }
        let det = crate::exactla::int_determinant(&self.entries);
        if det != self.determinant as i128 || det.abs() < 2 {
            return false;
        }
        match self.kind {
            ViolationKind::Submatrix => true,
            ViolationKind::Cycle => {
                if self.row_scaling.len() != k || self.col_scaling.len() != k {
                    return false;
                }
                (0..k).all(|i| {
                    (0..k).all(|j| {
                        let v = self.row_scaling[i] * self.entries[i][j] * self.col_scaling[j];
                        let want = if i == j {
                            1
                        } else if i == j + 1 || (i == 0 && j == k - 1) {
                            // k = 2 puts the subdiagonal and the corner on distinct cells.
                            if i == j + 1 {
                                -1
                            } else {
                                1
                            }
                        } else {
                            0
                        };
                        v == want
                    })
                })
            }
        }
    }
}

struct Bipartite {
    nr: usize,
    adj: Vec<Vec<usize>>,
}

impl Bipartite {
    fn new(b: &Matrix<Gf2>) -> Bipartite {
        let nr = b.num_rows();
        let mut adj = vec![Vec::new(); nr + b.num_cols()];
        for (c, col) in b.columns().enumerate() {
            for &(r, _) in col {
                adj[r].push(nr + c);
                adj[nr + c].push(r);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Bipartite { nr, adj }
    }

    /// `(row, col)` of the edge between two vertices.
    fn edge(&self, a: usize, b: usize) -> (usize, usize) {
        if a < self.nr {
            (a, b - self.nr)
        } else {
            (b, a - self.nr)
        }
    }
}

/// Sign the support of `b` and test the result for total unimodularity.
pub fn sign_and_test_tu(b: &Matrix<Gf2>) -> SigningResult {
    let (nr, nc) = (b.num_rows(), b.num_cols());
    let g = Bipartite::new(b);
    let nv = nr + nc;
    let mut sign = vec![vec![0i64; nc]; nr];
    let mut added = vec![false; nv];
    let mut visited = vec![false; nv];
    let mut comp = vec![usize::MAX; nv];
    let mut in_n = vec![false; nv];

    for root in 0..nv {
        if visited[root] {
            continue;
        }
        let mut order = vec![root];
        visited[root] = true;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &w in &g.adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    order.push(w);
                }
            }
        }
        let mut placed: Vec<usize> = Vec::new();
        for &v in &order {
            let n: Vec<usize> = g.adj[v].iter().copied().filter(|&u| added[u]).collect();
            if n.is_empty() {
                added[v] = true;
                placed.push(v);
                continue;
            }
            for &u in &n {
                in_n[u] = true;
            }
            // Components of the placed vertices with the neighbours of v removed.
            let mut ncomp = 0;
            for &s in &placed {
                if in_n[s] || comp[s] != usize::MAX {
                    continue;
                }
                comp[s] = ncomp;
                let mut stack = vec![s];
                while let Some(x) = stack.pop() {
                    for &y in &g.adj[x] {
                        if added[y] && !in_n[y] && comp[y] == usize::MAX {
                            comp[y] = ncomp;
                            stack.push(y);
                        }
                    }
                }
                ncomp += 1;
            }
            let mut members: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
            let mut touches: Vec<Vec<usize>> = vec![Vec::new(); n.len()];
            for (i, &u) in n.iter().enumerate() {
                let mut ks: Vec<usize> = g.adj[u].iter().filter(|&&y| added[y] && !in_n[y]).map(|&y| comp[y]).collect();
                ks.sort_unstable();
                ks.dedup();
                for &k in &ks {
                    members[k].push(i);
                }
                touches[i] = ks;
            }
            let set = |sign: &mut Vec<Vec<i64>>, a: usize, bb: usize, s: i64| {
                let (r, c) = g.edge(a, bb);
                sign[r][c] = s;
            };
            set(&mut sign, v, n[0], 1);
            let mut reached = vec![false; n.len()];
            reached[0] = true;
            let mut queue = vec![0usize];
            let mut tree_pairs = Vec::new();
            let mut qh = 0;
            while qh < queue.len() {
                let i = queue[qh];
                qh += 1;
                for &k in &touches[i] {
                    for &j in &members[k] {
                        if reached[j] {
                            continue;
                        }
                        let path = chordless_path(&g, &added, &comp, k, n[i], n[j]);
                        let mut sum: i64 = path_sum(&g, &sign, &path);
                        let (r, c) = g.edge(v, n[i]);
                        sum += sign[r][c];
                        // Choose the sign of (v, n[j]) making the cycle sum 0 mod 4.
                        let s = if (sum + 1).rem_euclid(4) == 0 { 1 } else { -1 };
                        set(&mut sign, v, n[j], s);
                        reached[j] = true;
                        tree_pairs.push((i.min(j), i.max(j), k));
                        queue.push(j);
                    }
                }
            }
            debug_assert!(reached.iter().all(|&x| x), "placed subgraph is connected");
            // Spot-check the remaining chordless cycles through v, one per pair.
            let mut violation = None;
            'pairs: for (k, mem) in members.iter().enumerate() {
                for (a, &i) in mem.iter().enumerate() {
                    for &j in &mem[a + 1..] {
                        if tree_pairs.contains(&(i, j, k)) {
                            continue;
                        }
                        let path = chordless_path(&g, &added, &comp, k, n[i], n[j]);
                        let mut cycle = vec![v];
                        cycle.extend(&path);
                        if cycle_sum(&g, &sign, &cycle).rem_euclid(4) == 2 {
                            violation = Some(cycle_certificate(&g, &sign, &cycle));
                            break 'pairs;
                        }
                    }
                }
            }
            for &s in &placed {
                comp[s] = usize::MAX;
            }
            for &u in &n {
                in_n[u] = false;
            }
            if let Some(cert) = violation {
                return SigningResult { status: TuStatus::NotTu, signed_matrix: None, violation: Some(cert) };
            }
            added[v] = true;
            placed.push(v);
        }
    }

    let signed = Matrix::from_columns(
        nr,
        (0..nc).map(|c| (0..nr).filter(|&r| sign[r][c] != 0).map(|r| (r, Rat::integer(sign[r][c]))).collect()).collect(),
    );
    match scan_entries_blocks(&sign, SCAN_LIMIT) {
        Some(Some(v)) => {
            let entries = v.rows.iter().map(|&r| v.cols.iter().map(|&c| sign[r][c]).collect()).collect();
            SigningResult {
                status: TuStatus::NotTu,
                signed_matrix: None,
                violation: Some(ViolationCertificate {
                    kind: ViolationKind::Submatrix,
                    rows: v.rows,
                    cols: v.cols,
                    entries,
                    row_scaling: Vec::new(),
                    col_scaling: Vec::new(),
                    determinant: v.determinant,
                }),
            }
        }
        Some(None) => SigningResult { status: TuStatus::Tu, signed_matrix: Some(signed), violation: None },
        None => SigningResult { status: TuStatus::Unknown, signed_matrix: Some(signed), violation: None },
    }
}

/// Shortest path `from -> .. -> to` whose interior lies in component `k`.
fn chordless_path(g: &Bipartite, added: &[bool], comp: &[usize], k: usize, from: usize, to: usize) -> Vec<usize> {
    let mut prev: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    let mut frontier = vec![from];
    prev.insert(from, from);
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &x in &frontier {
            for &y in &g.adj[x] {
                if x != from && y == to {
                    let mut path = vec![to, x];
                    let mut cur = x;
                    while cur != from {
                        cur = prev[&cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return path;
                }
                if added[y] && comp[y] == k && !prev.contains_key(&y) {
                    prev.insert(y, x);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    unreachable!("component {k} joins both endpoints")
}

fn path_sum(g: &Bipartite, sign: &[Vec<i64>], path: &[usize]) -> i64 {
    path.windows(2)
        .map(|w| {
            let (r, c) = g.edge(w[0], w[1]);
            sign[r][c]
        })
        .sum()
}

fn cycle_sum(g: &Bipartite, sign: &[Vec<i64>], cycle: &[usize]) -> i64 {
    let mut closed = cycle.to_vec();
    closed.push(cycle[0]);
    path_sum(g, sign, &closed)
}

/// Arrange a chordless cycle as rows/cols with the canonical cycle shape.
fn cycle_certificate(g: &Bipartite, sign: &[Vec<i64>], cycle: &[usize]) -> ViolationCertificate {
    let start = cycle.iter().position(|&x| x < g.nr).expect("cycle has a row vertex");
    let seq: Vec<usize> = (0..cycle.len()).map(|i| cycle[(start + i) % cycle.len()]).collect();
    let k = seq.len() / 2;
    let rows: Vec<usize> = (0..k).map(|i| seq[2 * i]).collect();
    let cols: Vec<usize> = (0..k).map(|i| seq[2 * i + 1] - g.nr).collect();
    let entries: Vec<Vec<i64>> = rows.iter().map(|&r| cols.iter().map(|&c| sign[r][c]).collect()).collect();
    let mut rho = vec![0i64; k];
    let mut gamma = vec![0i64; k];
    rho[0] = 1;
    for i in 0..k {
        gamma[i] = rho[i] * entries[i][i];
        if i + 1 < k {
            rho[i + 1] = -entries[i + 1][i] * gamma[i];
        }
    }
    let determinant = crate::exactla::int_determinant(&entries) as i64;
    ViolationCertificate { kind: ViolationKind::Cycle, rows, cols, entries, row_scaling: rho, col_scaling: gamma, determinant }
}

/// Regularity of a matroid together with the evidence behind the verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityResult {
    pub verdict: Verdict,
    pub signing: SigningResult,
}

/// Regularity via the standard form: over GF(2) the Camion signing of `A`
/// decides it; over the rationals the matroid is regular exactly when `A` is
/// a row and column scaling of a TU signing of its support.
pub fn is_regular<F: Field>(m: &LinearMatroid<F>) -> RegularityResult {
    let sf = m.standard_form();
    let support = Matrix::<Gf2>::from_columns(
        sf.rank(),
        (0..sf.cobasis.len()).map(|j| (0..sf.rank()).filter(|&i| !sf.a[i][j].is_zero()).map(|i| (i, Gf2::ONE)).collect()).collect(),
    );
    let signing = sign_and_test_tu(&support);
    let verdict = match signing.status {
        TuStatus::NotTu => Verdict::No,
        status => {
            let scalable = match &signing.signed_matrix {
                Some(s) if F::TAG == crate::exactla::FieldTag::Rational => scaling_equivalent(&sf.a, s),
                _ => true,
            };
            match (scalable, status) {
                (false, _) => Verdict::No,
                (true, TuStatus::Tu) => Verdict::Yes,
                _ => Verdict::Unknown,
            }
        }
    };
    RegularityResult { verdict, signing }
}

/// Whether `a` equals `diag(x) * s * diag(y)` for nonzero rationals `x`, `y`.
fn scaling_equivalent<F: Field>(a: &[Vec<F>], s: &Matrix<Rat>) -> bool {
    let nr = s.num_rows();
    let nc = s.num_cols();
    // Work with rational values of `a`.
    let val = |r: usize, c: usize| -> Rat { Rat::parse_elem(&a[r][c].to_string()).expect("rational entry") };
    let mut x: Vec<Option<Rat>> = vec![None; nr];
    let mut y: Vec<Option<Rat>> = vec![None; nc];
    let dense = s.to_dense();
    let mut adj_r: Vec<Vec<usize>> = vec![Vec::new(); nr];
    let mut adj_c: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for (r, c, _) in s.triplets() {
        adj_r[r].push(c);
        adj_c[c].push(r);
    }
    // Fix the scaling along a spanning forest, then check every entry.
    for root in 0..nr {
        if x[root].is_some() {
            continue;
        }
        x[root] = Some(Rat::integer(1));
        let mut stack = vec![(true, root)];
        while let Some((is_row, i)) = stack.pop() {
            if is_row {
                let xi = x[i].clone().unwrap();
                for &c in &adj_r[i] {
                    if y[c].is_none() {
                        y[c] = Some(&val(i, c) / &(&xi * &dense[i][c]));
                        stack.push((false, c));
                    }
                }
            } else {
                let yc = y[i].clone().unwrap();
                for &r in &adj_c[i] {
                    if x[r].is_none() {
                        x[r] = Some(&val(r, i) / &(&dense[r][i] * &yc));
                        stack.push((true, r));
                    }
                }
            }
        }
    }
    s.triplets().all(|(r, c, v)| {
        let (xr, yc) = (x[r].as_ref().unwrap(), y[c].as_ref().unwrap());
        &(xr * v) * yc == val(r, c)
    })
}
