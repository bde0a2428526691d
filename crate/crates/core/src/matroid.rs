//! Linear matroids over exact representations.
//!
//! Every query goes through a standard form `[I | A]` computed once at
//! construction: subset ranks reduce to ranks of small blocks of `A`, and
//! deletion and contraction are pivots followed by dropping a row or column.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complex::CellComplex;
use crate::error::{Error, Result};
use crate::exactla::{Field, FieldTag, Gf2, Matrix, Rat, StandardForm};

/// Ground sets up to this size may be enumerated without a size cap.
pub const CIRCUIT_GUARD: usize = 25;
/// Exhaustive bipartition scans are allowed up to this ground-set size.
pub const SEPARATION_GUARD: usize = 22;
/// Largest ground set accepted by the isomorphism test.
pub const ISOMORPHISM_GUARD: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMatroid<F: Field> {
    labels: Vec<String>,
    rep: Matrix<F>,
    sf: StandardForm<F>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorSpec {
    pub deletions: Vec<String>,
    pub contractions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub e1: Vec<String>,
    pub e2: Vec<String>,
    pub k: usize,
    pub rank_e1: usize,
    pub rank_e2: usize,
    pub rank_m: usize,
}

impl<F: Field> LinearMatroid<F> {
    pub fn new(labels: Vec<String>, rep: Matrix<F>) -> Result<LinearMatroid<F>> {
        if labels.len() != rep.num_cols() {
            return Err(Error::Invalid(format!("{} labels for {} columns", labels.len(), rep.num_cols())));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::Invalid(format!("duplicate label `{dup}`")));
        }
        let sf = StandardForm::from_matrix(&rep);
        Ok(LinearMatroid { labels, rep, sf })
    }

    /// Labels `e0, e1, ...` for an unlabelled matrix.
    pub fn from_matrix(rep: Matrix<F>) -> LinearMatroid<F> {
        let labels = (0..rep.num_cols()).map(|i| format!("e{i}")).collect();
        LinearMatroid::new(labels, rep).expect("generated labels are distinct")
    }

    /// The degree-`k` cellular matroid: one element per `k`-cell.
    pub fn from_boundary(x: &CellComplex, k: usize) -> LinearMatroid<F> {
        LinearMatroid::new(x.cell_labels(k), x.boundary(k)).expect("cell labels are distinct")
    }

    fn from_standard(labels: Vec<String>, sf: StandardForm<F>) -> LinearMatroid<F> {
        let rep = sf.full_matrix();
        LinearMatroid { labels, rep, sf }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.sf.rank()
    }

    pub fn rep(&self) -> &Matrix<F> {
        &self.rep
    }

    pub fn standard_form(&self) -> &StandardForm<F> {
        &self.sf
    }

    pub fn field(&self) -> FieldTag {
        F::TAG
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn indices_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.index_of(l.as_ref())).collect()
    }

    pub fn labels_of(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.labels[i].clone()).collect()
    }

    /// Rank of the elements with the given indices.
    pub fn rank_of(&self, idx: &[usize]) -> usize {
        let mut mask = vec![false; self.len()];
        for &i in idx {
            mask[i] = true;
        }
        self.sf.subset_rank(&mask)
    }

    pub fn rank_of_mask(&self, mask: &[bool]) -> usize {
        self.sf.subset_rank(mask)
    }

    pub fn subset_rank<S: AsRef<str>>(&self, labels: &[S]) -> Result<usize> {
        Ok(self.rank_of(&self.indices_of(labels)?))
    }

    /// Coordinates of element `e` relative to the standard-form basis.
    fn coordinates(&self, e: usize) -> Vec<F> {
        let r = self.rank();
        if let Some(i) = self.sf.basis.iter().position(|&b| b == e) {
            let mut v = vec![F::zero(); r];
            v[i] = F::one();
            return v;
        }
        let j = self.sf.cobasis.iter().position(|&c| c == e).expect("element in basis or cobasis");
        (0..r).map(|i| self.sf.a[i][j].clone()).collect()
    }

    /// All circuits (as sorted index lists), optionally capped in size.
    pub fn circuits(&self, max_size: Option<usize>) -> Result<Vec<Vec<usize>>> {
        let n = self.len();
        if max_size.is_none() && n > CIRCUIT_GUARD {
            return Err(Error::TooLarge(format!("{n} elements exceeds the circuit enumeration guard {CIRCUIT_GUARD}")));
        }
        let cap = max_size.unwrap_or(n);
        let coords: Vec<Vec<F>> = (0..n).map(|e| self.coordinates(e)).collect();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        let mut echelon = Vec::new();
        circuit_dfs(&coords, 0, cap, &mut chosen, &mut echelon, &mut out);
        out.sort();
        Ok(out)
    }

    /// Circuits as bitmasks; ground sets must fit in 64 bits.
    pub fn circuit_masks(&self) -> Result<Vec<u64>> {
        if self.len() > 64 {
            return Err(Error::TooLarge(format!("{} elements do not fit a 64-bit mask", self.len())));
        }
        Ok(self.circuits(None)?.iter().map(|c| c.iter().fold(0u64, |m, &e| m | 1 << e)).collect())
    }

    /// Represented by `[-A^T | I]` on the same ground order.
    pub fn dual(&self) -> LinearMatroid<F> {
        let sf = &self.sf;
        let dual_sf = StandardForm {
            basis: sf.cobasis.clone(),
            cobasis: sf.basis.clone(),
            a: (0..sf.cobasis.len()).map(|j| (0..sf.rank()).map(|i| sf.a[i][j].neg()).collect()).collect(),
        };
        let mut ordered = dual_sf;
        normalise_order(&mut ordered);
        LinearMatroid::from_standard(self.labels.clone(), ordered)
    }

    pub fn minor(&self, spec: &MinorSpec) -> Result<LinearMatroid<F>> {
        let del = self.indices_of(&spec.deletions)?;
        let con = self.indices_of(&spec.contractions)?;
        if del.iter().any(|d| con.contains(d)) {
            return Err(Error::Invalid("deletion and contraction sets overlap".into()));
        }
        Ok(self.minor_indices(&del, &con))
    }

    /// Minor by element indices; later steps never depend on the order.
    pub fn minor_indices(&self, deletions: &[usize], contractions: &[usize]) -> LinearMatroid<F> {
        if deletions.len() > self.rank() {
            // Deleting many elements is cheaper as a column restriction of the
            // representation than as a sequence of pivots.
            let dropped: std::collections::HashSet<usize> = deletions.iter().copied().collect();
            let keep: Vec<usize> = (0..self.len()).filter(|e| !dropped.contains(e)).collect();
            let position: HashMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
            let rep = self.rep.select_columns(&keep);
            let sub = LinearMatroid { labels: self.labels_of(&keep), sf: StandardForm::from_matrix(&rep), rep };
            let con: Vec<usize> = contractions.iter().map(|c| position[c]).collect();
            return sub.minor_indices(&[], &con);
        }
        let mut sf = self.sf.clone();
        for &e in contractions {
            contract_in_place(&mut sf, e);
        }
        for &e in deletions {
            delete_in_place(&mut sf, e);
        }
        let mut keep: Vec<usize> = sf.basis.iter().chain(&sf.cobasis).copied().collect();
        keep.sort_unstable();
        let remap: HashMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        sf.basis.iter_mut().for_each(|b| *b = remap[b]);
        sf.cobasis.iter_mut().for_each(|c| *c = remap[c]);
        normalise_order(&mut sf);
        LinearMatroid::from_standard(self.labels_of(&keep), sf)
    }

    /// Restriction to the given elements (all others deleted).
    pub fn restrict(&self, keep: &[usize]) -> LinearMatroid<F> {
        let del: Vec<usize> = (0..self.len()).filter(|e| !keep.contains(e)).collect();
        self.minor_indices(&del, &[])
    }

    /// Partition of the ground set into connected components (index lists,
    /// each sorted, ordered by smallest element).
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        // Two elements share a component iff they are linked through fundamental circuits.
        for (j, &c) in self.sf.cobasis.iter().enumerate() {
            for (i, &b) in self.sf.basis.iter().enumerate() {
                if !self.sf.a[i][j].is_zero() {
                    let (x, y) = (find(&mut parent, b), find(&mut parent, c));
                    parent[x] = y;
                }
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for e in 0..n {
            let r = find(&mut parent, e);
            groups.entry(r).or_default().push(e);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// `r(E1) + r(E2) - r(M)` for the bipartition given by `in_e1`.
    pub fn connectivity(&self, in_e1: &[bool]) -> usize {
        let in_e2: Vec<bool> = in_e1.iter().map(|b| !b).collect();
        self.rank_of_mask(in_e1) + self.rank_of_mask(&in_e2) - self.rank()
    }

    /// The smallest-order `l`-separation with `l < k`, if any. `E1` always
    /// contains element 0; among separations of equal order the first in
    /// increasing bitmask order over the remaining elements is returned.
    pub fn find_k_separation(&self, k: usize) -> Result<Option<Separation>> {
        let n = self.len();
        if n > SEPARATION_GUARD {
            return Err(Error::TooLarge(format!("{n} elements exceeds the separation guard {SEPARATION_GUARD}")));
        }
        if n < 2 || k < 2 {
            return Ok(None);
        }
        let r = self.rank();
        let mut best: Vec<Option<(u64, usize, usize)>> = vec![None; k];
        let total = 1u64 << (n - 1);
        let mut in_e1 = vec![false; n];
        for m in 0..total - 1 {
            in_e1[0] = true;
            for (i, slot) in in_e1.iter_mut().enumerate().skip(1) {
                *slot = m >> (i - 1) & 1 == 1;
            }
            let s1 = 1 + m.count_ones() as usize;
            let small = s1.min(n - s1);
            // Orders this bipartition could witness: l <= small and l < k.
            let lmax = small.min(k - 1);
            if lmax == 0 || (1..=lmax).all(|l| best[l].is_some()) {
                continue;
            }
            let in_e2: Vec<bool> = in_e1.iter().map(|b| !b).collect();
            let (r1, r2) = (self.rank_of_mask(&in_e1), self.rank_of_mask(&in_e2));
            let lambda = r1 + r2 - r;
            for l in (lambda + 1).max(1)..=lmax {
                if best[l].is_none() {
                    best[l] = Some((m, r1, r2));
                }
            }
            if best[1].is_some() {
                break;
            }
        }
        let Some((l, (m, r1, r2))) = best.iter().enumerate().find_map(|(l, b)| b.map(|v| (l, v))) else {
            return Ok(None);
        };
        let e1: Vec<usize> = (0..n).filter(|&i| i == 0 || m >> (i - 1) & 1 == 1).collect();
        let e2: Vec<usize> = (0..n).filter(|i| !e1.contains(i)).collect();
        Ok(Some(Separation {
            e1: self.labels_of(&e1),
            e2: self.labels_of(&e2),
            k: l,
            rank_e1: r1,
            rank_e2: r2,
            rank_m: r,
        }))
    }

    /// A bijection `self -> other` carrying circuits onto circuits.
    pub fn isomorphism<G: Field>(&self, other: &LinearMatroid<G>) -> Result<Option<Vec<usize>>> {
        isomorphism_between(self, other)
    }

    pub fn isomorphic_to(&self, named: &NamedMatroid) -> Result<Option<Vec<usize>>> {
        match &named.matroid {
            AnyMatroid::Gf2(m) => isomorphism_between(self, m),
            AnyMatroid::Rational(m) => isomorphism_between(self, m),
        }
    }
}

impl Separation {
    /// Recompute the defining inequality from scratch.
    pub fn verify<F: Field>(&self, m: &LinearMatroid<F>) -> Result<bool> {
        let r1 = m.subset_rank(&self.e1)?;
        let r2 = m.subset_rank(&self.e2)?;
        let covers = self.e1.len() + self.e2.len() == m.len() && self.e1.iter().all(|l| !self.e2.contains(l));
        Ok(covers
            && r1 == self.rank_e1
            && r2 == self.rank_e2
            && self.e1.len() >= self.k
            && self.e2.len() >= self.k
            && r1 + r2 < m.rank() + self.k)
    }
}

/// Keep `basis` and `cobasis` sorted (rows and columns of `a` permuted along).
fn normalise_order<F: Field>(sf: &mut StandardForm<F>) {
    let mut rows: Vec<usize> = (0..sf.basis.len()).collect();
    rows.sort_by_key(|&i| sf.basis[i]);
    let mut cols: Vec<usize> = (0..sf.cobasis.len()).collect();
    cols.sort_by_key(|&j| sf.cobasis[j]);
    sf.a = rows.iter().map(|&i| cols.iter().map(|&j| sf.a[i][j].clone()).collect()).collect();
    sf.basis = rows.iter().map(|&i| sf.basis[i]).collect();
    sf.cobasis = cols.iter().map(|&j| sf.cobasis[j]).collect();
}

/// Contract element `e` (by its source index) in place.
pub fn contract_in_place<F: Field>(sf: &mut StandardForm<F>, e: usize) {
    if let Some(i) = sf.basis.iter().position(|&b| b == e) {
        sf.remove_row(i);
        return;
    }
    let j = sf.cobasis.iter().position(|&c| c == e).expect("element present");
    match (0..sf.rank()).find(|&i| !sf.a[i][j].is_zero()) {
        Some(i) => {
            sf.pivot(i, j);
            sf.remove_row(i);
        }
        // A loop: contraction equals deletion.
        None => {
            sf.remove_column(j);
        }
    }
}

/// Delete element `e` (by its source index) in place.
pub fn delete_in_place<F: Field>(sf: &mut StandardForm<F>, e: usize) {
    if let Some(j) = sf.cobasis.iter().position(|&c| c == e) {
        sf.remove_column(j);
        return;
    }
    let i = sf.basis.iter().position(|&b| b == e).expect("element present");
    match (0..sf.cobasis.len()).find(|&j| !sf.a[i][j].is_zero()) {
        Some(j) => {
            sf.pivot(i, j);
            sf.remove_column(j);
        }
        // A coloop: deletion equals contraction.
        None => {
            sf.remove_row(i);
        }
    }
}

struct EchelonEntry<F> {
    vec: Vec<F>,
    pivot: usize,
    /// Coefficients over the chosen elements so far.
    combo: Vec<F>,
}

/// Extend an independent set `chosen` by elements larger than its maximum.
/// Each circuit `C` is produced exactly once, from `C - max(C)`.
fn circuit_dfs<F: Field>(
    coords: &[Vec<F>],
    start: usize,
    cap: usize,
    chosen: &mut Vec<usize>,
    echelon: &mut Vec<EchelonEntry<F>>,
    out: &mut Vec<Vec<usize>>,
) {
    if chosen.len() >= cap {
        return;
    }
    let m = chosen.len();
    for e in start..coords.len() {
        let mut w = coords[e].clone();
        let mut combo = vec![F::zero(); m + 1];
        combo[m] = F::one();
        for ent in echelon.iter() {
            if w[ent.pivot].is_zero() {
                continue;
            }
            let f = w[ent.pivot].div(&ent.vec[ent.pivot]);
            for (x, y) in w.iter_mut().zip(&ent.vec) {
                if !y.is_zero() {
                    *x = x.sub_mul(&f, y);
                }
            }
            for (x, y) in combo.iter_mut().zip(&ent.combo) {
                if !y.is_zero() {
                    *x = x.sub_mul(&f, y);
                }
            }
        }
        match w.iter().position(|x| !x.is_zero()) {
            None => {
                if combo.iter().all(|c| !c.is_zero()) {
                    let mut c = chosen.clone();
                    c.push(e);
                    out.push(c);
                }
            }
            Some(pivot) => {
                for ent in echelon.iter_mut() {
                    ent.combo.push(F::zero());
                }
                echelon.push(EchelonEntry { vec: w, pivot, combo });
                chosen.push(e);
                circuit_dfs(coords, e + 1, cap, chosen, echelon, out);
                chosen.pop();
                echelon.pop();
                for ent in echelon.iter_mut() {
                    ent.combo.pop();
                }
            }
        }
    }
}

fn isomorphism_between<F: Field, G: Field>(m: &LinearMatroid<F>, n: &LinearMatroid<G>) -> Result<Option<Vec<usize>>> {
    if m.len() != n.len() || m.rank() != n.rank() {
        return Ok(None);
    }
    if m.len() > ISOMORPHISM_GUARD {
        return Err(Error::TooLarge(format!("isomorphism test limited to {ISOMORPHISM_GUARD} elements")));
    }
    let (cm, cn) = (m.circuit_masks()?, n.circuit_masks()?);
    Ok(circuit_isomorphism(m.len(), &cm, &cn))
}

/// Backtracking search for a bijection mapping the circuit family `a` onto `b`.
pub fn circuit_isomorphism(size: usize, a: &[u64], b: &[u64]) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let signature = |circuits: &[u64], e: usize| -> Vec<u32> {
        let mut s: Vec<u32> = circuits.iter().filter(|&&c| c >> e & 1 == 1).map(|c| c.count_ones()).collect();
        s.sort_unstable();
        s
    };
    let sa: Vec<Vec<u32>> = (0..size).map(|e| signature(a, e)).collect();
    let sb: Vec<Vec<u32>> = (0..size).map(|e| signature(b, e)).collect();
    let mut sorted_a = sa.clone();
    let mut sorted_b = sb.clone();
    sorted_a.sort();
    sorted_b.sort();
    if sorted_a != sorted_b {
        return None;
    }
    let b_set: std::collections::HashSet<u64> = b.iter().copied().collect();
    // Circuits of `a` grouped by their largest element, checked once it is mapped.
    let mut by_max: Vec<Vec<u64>> = vec![Vec::new(); size];
    for &c in a {
        by_max[63 - c.leading_zeros() as usize].push(c);
    }
    let mut map = vec![usize::MAX; size];
    let mut used = vec![false; size];
    fn image(c: u64, map: &[usize]) -> u64 {
        (0..map.len()).filter(|&e| c >> e & 1 == 1).fold(0, |m, e| m | 1 << map[e])
    }
    #[allow(clippy::too_many_arguments)]
    fn go(
        e: usize,
        size: usize,
        sa: &[Vec<u32>],
        sb: &[Vec<u32>],
        by_max: &[Vec<u64>],
        b_set: &std::collections::HashSet<u64>,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if e == size {
            return true;
        }
        for t in 0..size {
            if used[t] || sa[e] != sb[t] {
                continue;
            }
            map[e] = t;
            used[t] = true;
            if by_max[e].iter().all(|&c| b_set.contains(&image(c, map)))
                && go(e + 1, size, sa, sb, by_max, b_set, map, used)
            {
                return true;
            }
            used[t] = false;
        }
        map[e] = usize::MAX;
        false
    }
    // With equal circuit counts an injective circuit map is a bijection.
    go(0, size, &sa, &sb, &by_max, &b_set, &mut map, &mut used).then_some(map)
}

/// A matroid over either supported field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyMatroid {
    Gf2(LinearMatroid<Gf2>),
    Rational(LinearMatroid<Rat>),
}

impl AnyMatroid {
    pub fn len(&self) -> usize {
        match self {
            AnyMatroid::Gf2(m) => m.len(),
            AnyMatroid::Rational(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rank(&self) -> usize {
        match self {
            AnyMatroid::Gf2(m) => m.rank(),
            AnyMatroid::Rational(m) => m.rank(),
        }
    }

    pub fn field(&self) -> FieldTag {
        match self {
            AnyMatroid::Gf2(_) => FieldTag::Gf2,
            AnyMatroid::Rational(_) => FieldTag::Rational,
        }
    }

    pub fn circuit_masks(&self) -> Result<Vec<u64>> {
        match self {
            AnyMatroid::Gf2(m) => m.circuit_masks(),
            AnyMatroid::Rational(m) => m.circuit_masks(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CatalogName {
    U24,
    F7,
    F7star,
    N8,
    N9,
}

impl CatalogName {
    pub const ALL: [CatalogName; 5] = [CatalogName::U24, CatalogName::F7, CatalogName::F7star, CatalogName::N8, CatalogName::N9];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogName::U24 => "U24",
            CatalogName::F7 => "F7",
            CatalogName::F7star => "F7star",
            CatalogName::N8 => "N8",
            CatalogName::N9 => "N9",
        }
    }

    /// Expected ground-set size and, where fixed, rank.
    pub fn shape(self) -> (usize, Option<usize>) {
        match self {
            CatalogName::U24 => (4, Some(2)),
            CatalogName::F7 => (7, Some(3)),
            CatalogName::F7star => (7, Some(4)),
            CatalogName::N8 => (8, None),
            CatalogName::N9 => (9, None),
        }
    }
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CatalogName {
    type Err = Error;
    fn from_str(s: &str) -> Result<CatalogName> {
        CatalogName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s) || (s.eq_ignore_ascii_case("F7*") && *n == CatalogName::F7star))
            .ok_or_else(|| Error::UnknownLabel(format!("catalog name `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedMatroid {
    pub name: CatalogName,
    pub matroid: AnyMatroid,
}

/// Named matroids loaded from catalog text.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    entries: Vec<NamedMatroid>,
}

const BUNDLED_CATALOG: &str = include_str!("../data/catalog.txt");

impl Catalog {
    pub fn bundled() -> Catalog {
        Catalog::parse(BUNDLED_CATALOG).expect("bundled catalog parses")
    }

    pub fn parse(text: &str) -> Result<Catalog> {
        let mut entries = Vec::new();
        let mut block: Option<(CatalogName, Option<FieldTag>, Vec<Vec<String>>)> = None;
        let finish = |b: (CatalogName, Option<FieldTag>, Vec<Vec<String>>), entries: &mut Vec<NamedMatroid>| -> Result<()> {
            let (name, field, rows) = b;
            let field = field.ok_or_else(|| Error::Parse(format!("catalog entry {name} has no field line")))?;
            let matroid = match field {
                FieldTag::Gf2 => AnyMatroid::Gf2(parse_rows::<Gf2>(&rows, name)?),
                FieldTag::Rational => AnyMatroid::Rational(parse_rows::<Rat>(&rows, name)?),
            };
            let (size, rank) = name.shape();
            if matroid.len() != size || rank.is_some_and(|r| r != matroid.rank()) {
                return Err(Error::Parse(format!("catalog entry {name} has the wrong shape")));
            }
            entries.retain(|e: &NamedMatroid| e.name != name);
            entries.push(NamedMatroid { name, matroid });
            Ok(())
        };
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            if let Some(rest) = line.strip_prefix("name ") {
                if let Some(b) = block.take() {
                    finish(b, &mut entries)?;
                }
                block = Some((rest.trim().parse()?, None, Vec::new()));
            } else if let Some(rest) = line.strip_prefix("field ") {
                let b = block.as_mut().ok_or_else(|| Error::Parse("field line outside a block".into()))?;
                b.1 = Some(FieldTag::parse(rest.trim()).ok_or_else(|| Error::Parse(format!("unknown field `{rest}`")))?);
            } else {
                let b = block.as_mut().ok_or_else(|| Error::Parse("matrix row outside a block".into()))?;
                b.2.push(line.split_whitespace().map(str::to_string).collect());
            }
        }
        if let Some(b) = block.take() {
            finish(b, &mut entries)?;
        }
        Ok(Catalog { entries })
    }

    pub fn load(path: &std::path::Path) -> Result<Catalog> {
        Catalog::parse(&std::fs::read_to_string(path)?)
    }

    /// Bundled entries overridden or extended by `other`.
    pub fn merged(mut self, other: Catalog) -> Catalog {
        for e in other.entries {
            self.entries.retain(|x| x.name != e.name);
            self.entries.push(e);
        }
        self
    }

    pub fn get(&self, name: CatalogName) -> Result<NamedMatroid> {
        self.entries.iter().find(|e| e.name == name).cloned().ok_or_else(|| Error::CatalogMissing(name.to_string()))
    }

    pub fn names(&self) -> Vec<CatalogName> {
        let mut v: Vec<CatalogName> = self.entries.iter().map(|e| e.name).collect();
        v.sort();
        v
    }
}

fn parse_rows<F: Field>(rows: &[Vec<String>], name: CatalogName) -> Result<LinearMatroid<F>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let dense: Vec<Vec<F>> = rows
        .iter()
        .map(|r| {
            if r.len() != ncols {
                return Err(Error::Parse(format!("ragged matrix in catalog entry {name}")));
            }
            r.iter().map(|v| F::parse_elem(v).ok_or_else(|| Error::Parse(format!("bad entry `{v}` in {name}")))).collect()
        })
        .collect::<Result<_>>()?;
    let labels = (1..=ncols).map(|i| i.to_string()).collect();
    LinearMatroid::new(labels, Matrix::from_dense(&dense))
}

/// A named matroid from the bundled catalog.
pub fn catalog(name: CatalogName) -> Result<NamedMatroid> {
    Catalog::bundled().get(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{simplex_skeleton, CellComplex};

    fn f7() -> LinearMatroid<Gf2> {
        match catalog(CatalogName::F7).unwrap().matroid {
            AnyMatroid::Gf2(m) => m,
            _ => unreachable!(),
        }
    }

    fn brute_circuits<F: Field>(m: &LinearMatroid<F>) -> Vec<Vec<usize>> {
        let n = m.len();
        let mut dependent_minimal = Vec::new();
        for mask in 1u64..(1 << n) {
            let s: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if m.rank_of(&s) == s.len() {
                continue;
            }
            let minimal = s.iter().all(|&x| {
                let t: Vec<usize> = s.iter().copied().filter(|&y| y != x).collect();
                m.rank_of(&t) == t.len()
            });
            if minimal {
                dependent_minimal.push(s);
            }
        }
        dependent_minimal.sort();
        dependent_minimal
    }

    #[test]
    fn boundary_matroids() {
        let sphere = simplex_skeleton(4, 2);
        let m = LinearMatroid::<Gf2>::from_boundary(&sphere, 2);
        assert_eq!((m.len(), m.rank()), (4, 3));
        assert_eq!(m.circuits(None).unwrap(), vec![vec![0, 1, 2, 3]]);
        assert_eq!(m.subset_rank(&["0-1-2", "0-1-3"]).unwrap(), 2);
        assert!(matches!(m.subset_rank(&["nope"]), Err(Error::UnknownLabel(_))));
        let d5 = LinearMatroid::<Gf2>::from_boundary(&simplex_skeleton(6, 2), 2);
        assert_eq!((d5.len(), d5.rank()), (20, 10));
    }

    #[test]
    fn fano_circuits() {
        let m = f7();
        let c = m.circuits(None).unwrap();
        assert_eq!(c, brute_circuits(&m));
        assert_eq!(c.iter().filter(|c| c.len() == 3).count(), 7);
        assert_eq!(c.iter().filter(|c| c.len() == 4).count(), 7);
    }

    #[test]
    fn u24_is_uniform() {
        let AnyMatroid::Rational(u) = catalog(CatalogName::U24).unwrap().matroid else { unreachable!() };
        let c = u.circuits(None).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.iter().all(|c| c.len() == 3));
    }

    #[test]
    fn duality() {
        let m = f7();
        let star = catalog(CatalogName::F7star).unwrap();
        assert_eq!(m.dual().rank(), 4);
        assert!(m.dual().isomorphic_to(&star).unwrap().is_some());
        assert!(m.isomorphic_to(&star).unwrap().is_none());
        assert!(m.dual().dual().isomorphism(&m).unwrap().is_some());
        let loops = LinearMatroid::from_matrix(Matrix::<Rat>::zeros(2, 3));
        assert_eq!(loops.dual().rank(), 3);
    }

    #[test]
    fn minors_commute_with_duality() {
        let m = f7();
        for e in 0..7 {
            let a = m.minor_indices(&[e], &[]).dual();
            let b = m.dual().minor_indices(&[], &[e]);
            assert!(a.isomorphism(&b).unwrap().is_some());
            assert_eq!(a.circuit_masks().unwrap(), b.circuit_masks().unwrap());
        }
        assert_eq!(m.minor(&MinorSpec::default()).unwrap(), m);
    }

    #[test]
    fn contract_loop_equals_delete() {
        let rep = Matrix::<Rat>::from_i64_rows(&[vec![1, 0, 1, 0], vec![0, 1, 1, 0]]);
        let m = LinearMatroid::from_matrix(rep);
        let a = m.minor_indices(&[], &[3]);
        let b = m.minor_indices(&[3], &[]);
        assert_eq!(a.circuit_masks().unwrap(), b.circuit_masks().unwrap());
        assert_eq!(a.labels(), b.labels());
    }

    #[test]
    fn u24_vs_parallel_pair() {
        let u = catalog(CatalogName::U24).unwrap();
        let rep = Matrix::<Rat>::from_i64_rows(&[vec![1, 0, 1, 1], vec![0, 1, 0, 1]]);
        assert!(LinearMatroid::from_matrix(rep).isomorphic_to(&u).unwrap().is_none());
    }

    #[test]
    fn components_and_separations() {
        let two_triangles = CellComplex::from_simplices([vec![0, 1, 2], vec![3, 4, 5]], 1);
        let m = LinearMatroid::<Gf2>::from_boundary(&two_triangles, 1);
        assert_eq!(m.connected_components().len(), 2);
        let sep = m.find_k_separation(2).unwrap().unwrap();
        assert_eq!(sep.k, 1);
        assert!(sep.verify(&m).unwrap());
        assert_eq!(f7().connected_components().len(), 1);
        assert!(f7().find_k_separation(3).unwrap().is_none());
        let sphere = LinearMatroid::<Gf2>::from_boundary(&simplex_skeleton(4, 2), 2);
        assert!(sphere.find_k_separation(2).unwrap().is_none());
        let with_loop = LinearMatroid::from_matrix(Matrix::<Rat>::from_i64_rows(&[vec![1, 1, 0]]));
        assert_eq!(with_loop.connected_components(), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn catalog_slots() {
        assert!(matches!(catalog(CatalogName::N8), Err(Error::CatalogMissing(_))));
        assert_eq!("f7*".parse::<CatalogName>().unwrap(), CatalogName::F7star);
    }
}
