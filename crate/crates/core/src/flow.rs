//! Matroid flows and cuts through the attached cell.
//!
//! The LP bound works on the cycle space of the rational matroid in the
//! dictionary given by its standard form: non-basis elements are free
//! coordinates and each basis element is a fixed combination of them, so the
//! all-zero flow is a feasible starting vertex and no phase one is needed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::CellComplex;
use crate::error::{Error, Result};
use crate::exactla::{Field, Rat};
use crate::matroid::LinearMatroid;

/// Circuit enumeration guard for the exact integer flow and cut.
pub const FLOW_GUARD: usize = 20;
/// Simplex pivots before the LP gives up.
pub const PIVOT_LIMIT: usize = 200_000;

/// Nonnegative integer capacities on `E \ {l}`: a default plus overrides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityFunction {
    pub default: u64,
    pub values: BTreeMap<String, u64>,
}

impl Default for CapacityFunction {
    fn default() -> Self {
        CapacityFunction::uniform(1)
    }
}

impl CapacityFunction {
    pub fn uniform(v: u64) -> CapacityFunction {
        CapacityFunction { default: v, values: BTreeMap::new() }
    }

    pub fn get(&self, label: &str) -> u64 {
        self.values.get(label).copied().unwrap_or(self.default)
    }

    pub fn set(&mut self, label: &str, v: u64) {
        self.values.insert(label.to_string(), v);
    }

    pub fn scaled(&self, k: u64) -> CapacityFunction {
        CapacityFunction { default: self.default * k, values: self.values.iter().map(|(l, v)| (l.clone(), v * k)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowDecomposition {
    pub value: u64,
    /// Circuits through `l` with their multiplicities.
    pub circuits: Vec<(Vec<String>, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub value: u64,
    pub elements: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowResult {
    /// Exact LP optimum, rendered as a reduced fraction.
    pub lp_upper: String,
    pub int_max_flow: Option<u64>,
    pub circuit_decomposition: Option<Vec<(Vec<String>, u64)>>,
    pub min_cut_value: Option<u64>,
    pub min_cut_set: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapWitness {
    pub capacities: Vec<(String, u64)>,
    pub flow: u64,
    pub cut: u64,
}

/// Bounded-variable primal simplex in dictionary form with Bland's rule.
struct Dictionary {
    /// `x[basis[i]] = sum_j t[i][j] * x[nonbasis[j]]`.
    t: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    nonbasis: Vec<usize>,
    lo: Vec<Option<Rat>>,
    hi: Vec<Option<Rat>>,
    val: Vec<Rat>,
}

impl Dictionary {
    /// Coefficients of `x[target]` in the current nonbasic variables.
    fn objective(&self, target: usize) -> Vec<Rat> {
        if let Some(i) = self.basis.iter().position(|&b| b == target) {
            return self.t[i].clone();
        }
        self.nonbasis.iter().map(|&v| if v == target { Rat::integer(1) } else { Rat::integer(0) }).collect()
    }

    fn room_up(&self, v: usize) -> Option<Rat> {
        self.hi[v].as_ref().map(|h| h - &self.val[v])
    }

    fn room_down(&self, v: usize) -> Option<Rat> {
        self.lo[v].as_ref().map(|l| &self.val[v] - l)
    }

    fn maximise(&mut self, target: usize) -> Result<Rat> {
        let zero = Rat::integer(0);
        for _ in 0..PIVOT_LIMIT {
            let c = self.objective(target);
            // Bland: the eligible nonbasic variable with the smallest index.
            let mut entering: Option<(usize, bool)> = None;
            for (j, cj) in c.iter().enumerate() {
                let v = self.nonbasis[j];
                let up = *cj > zero && self.room_up(v).is_none_or(|r| r > zero);
                let down = *cj < zero && self.room_down(v).is_none_or(|r| r > zero);
                if (up || down) && entering.is_none_or(|(k, _)| v < self.nonbasis[k]) {
                    entering = Some((j, up));
                }
            }
            let Some((j, up)) = entering else { return Ok(self.val[target].clone()) };
            let ev = self.nonbasis[j];
            // Ratio test; `None` as leaving row means the entering variable hits its own bound.
            let mut step: Option<Rat> = if up { self.room_up(ev) } else { self.room_down(ev) };
            let mut leaving: Option<usize> = None;
            for i in 0..self.basis.len() {
                let coef = &self.t[i][j];
                if coef.is_zero() {
                    continue;
                }
                let rising = (*coef > zero) == up;
                let b = self.basis[i];
                let room = if rising { self.room_up(b) } else { self.room_down(b) };
                let Some(room) = room else { continue };
                let ratio = &room / &coef.abs();
                let better = match &step {
                    None => true,
                    Some(s) => ratio < *s || (ratio == *s && leaving.is_some_and(|l| b < self.basis[l])),
                };
                if better {
                    step = Some(ratio);
                    leaving = Some(i);
                }
            }
            let Some(step) = step else { return Err(Error::Unbounded) };
            let delta = if up { step.clone() } else { -&step };
            self.val[ev] = &self.val[ev] + &delta;
            for i in 0..self.basis.len() {
                if !self.t[i][j].is_zero() {
                    let b = self.basis[i];
                    self.val[b] = &self.val[b] + &(&self.t[i][j] * &delta);
                }
            }
            if let Some(r) = leaving {
                self.pivot(r, j);
            }
        }
        Err(Error::TooLarge(format!("simplex did not finish within {PIVOT_LIMIT} pivots")))
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.t[r][j].clone();
        // x_e = (x_b - sum_{k != j} t[r][k] x_k) / p
        let mut row: Vec<Rat> = self.t[r].iter().map(|v| -&(v / &p)).collect();
        row[j] = Field::div(&Rat::integer(1), &p);
        for i in 0..self.t.len() {
            if i == r {
                continue;
            }
            let f = self.t[i][j].clone();
            if f.is_zero() {
                continue;
            }
            for (k, rk) in row.iter().enumerate() {
                if rk.is_zero() {
                    continue;
                }
                if k == j {
                    self.t[i][k] = &f * rk;
                } else {
                    self.t[i][k] = &self.t[i][k] + &(&f * rk);
                }
            }
        }
        self.t[r] = row;
        std::mem::swap(&mut self.basis[r], &mut self.nonbasis[j]);
    }
}

/// Exact optimum of `max z_l` over rational cycles `z` of the matroid with
/// `|z_e| <= h(e)` for `e != l` and `z_l >= 0`.
pub fn lp_max_flow_matroid(m: &LinearMatroid<Rat>, l: usize, h: &CapacityFunction) -> Result<Rat> {
    // Cycles split over connected components, so only l's component matters.
    let component = m.connected_components().into_iter().find(|c| c.contains(&l)).unwrap_or_default();
    let inside: std::collections::HashSet<usize> = component.iter().copied().collect();
    let sf = m.standard_form();
    let rows: Vec<usize> = (0..sf.rank()).filter(|&i| inside.contains(&sf.basis[i])).collect();
    let cols: Vec<usize> = (0..sf.cobasis.len()).filter(|&j| inside.contains(&sf.cobasis[j])).collect();
    let n = m.len();
    let mut lo = vec![None; n];
    let mut hi = vec![None; n];
    for &e in &component {
        if e == l {
            lo[e] = Some(Rat::integer(0));
        } else {
            let cap = Rat::integer(h.get(&m.labels()[e]) as i64);
            lo[e] = Some(-&cap);
            hi[e] = Some(cap);
        }
    }
    let mut d = Dictionary {
        // `[I | A] z = 0` gives `z_B = -A z_N`.
        t: rows.iter().map(|&i| cols.iter().map(|&j| -&sf.a[i][j]).collect()).collect(),
        basis: rows.iter().map(|&i| sf.basis[i]).collect(),
        nonbasis: cols.iter().map(|&j| sf.cobasis[j]).collect(),
        lo,
        hi,
        val: vec![Rat::integer(0); n],
    };
    d.maximise(l)
}

fn attached(x: &CellComplex) -> Result<usize> {
    x.attached_index().ok_or_else(|| Error::PreconditionViolated("no attached cell".into()))
}

/// LP relaxation of the flow through the attached cell of `x`.
pub fn lp_max_flow(x: &CellComplex, h: &CapacityFunction) -> Result<Rat> {
    let m = LinearMatroid::<Rat>::from_boundary(x, 2);
    lp_max_flow_matroid(&m, attached(x)?, h)
}

/// Circuits through `l` as element lists, rejecting a loop at `l`.
fn circuits_through<F: Field>(m: &LinearMatroid<F>, l: usize) -> Result<Vec<Vec<usize>>> {
    if m.len() > FLOW_GUARD {
        return Err(Error::TooLarge(format!("{} elements; circuit enumeration limited to {FLOW_GUARD}", m.len())));
    }
    let cs: Vec<Vec<usize>> = m.circuits(None)?.into_iter().filter(|c| c.contains(&l)).collect();
    if cs.iter().any(|c| c.len() == 1) {
        return Err(Error::Unbounded);
    }
    Ok(cs)
}

fn capacities<F: Field>(m: &LinearMatroid<F>, h: &CapacityFunction) -> Vec<u64> {
    m.labels().iter().map(|lab| h.get(lab)).collect()
}

/// Maximum integer circuit packing through `l` under the capacities.
pub fn integer_max_flow<F: Field>(m: &LinearMatroid<F>, l: usize, h: &CapacityFunction) -> Result<FlowDecomposition> {
    let cs = circuits_through(m, l)?;
    let caps = capacities(m, h);
    let (value, mult) = pack(&cs, l, &caps);
    Ok(FlowDecomposition {
        value,
        circuits: cs.iter().zip(&mult).filter(|(_, &k)| k > 0).map(|(c, &k)| (m.labels_of(c), k)).collect(),
    })
}

fn pack(cs: &[Vec<usize>], l: usize, caps: &[u64]) -> (u64, Vec<u64>) {
    struct State<'a> {
        cs: &'a [Vec<usize>],
        l: usize,
        residual: Vec<u64>,
        mult: Vec<u64>,
        best: u64,
        best_mult: Vec<u64>,
    }
    fn bound(s: &State, from: usize) -> u64 {
        s.cs[from..].iter().map(|c| c.iter().filter(|&&e| e != s.l).map(|&e| s.residual[e]).min().unwrap_or(0)).sum()
    }
    fn go(s: &mut State, i: usize, value: u64) {
        if value > s.best {
            s.best = value;
            s.best_mult = s.mult.clone();
        }
        if i == s.cs.len() || value + bound(s, i) <= s.best {
            return;
        }
        let c = s.cs[i].clone();
        let most = c.iter().filter(|&&e| e != s.l).map(|&e| s.residual[e]).min().unwrap_or(0);
        for k in (0..=most).rev() {
            for &e in c.iter().filter(|&&e| e != s.l) {
                s.residual[e] -= k;
            }
            s.mult[i] = k;
            go(s, i + 1, value + k);
            for &e in c.iter().filter(|&&e| e != s.l) {
                s.residual[e] += k;
            }
        }
        s.mult[i] = 0;
    }
    let mut s = State { cs, l, residual: caps.to_vec(), mult: vec![0; cs.len()], best: 0, best_mult: vec![0; cs.len()] };
    go(&mut s, 0, 0);
    (s.best, s.best_mult)
}

/// Minimum-capacity set of elements other than `l` meeting every circuit
/// through `l`.
pub fn min_cut<F: Field>(m: &LinearMatroid<F>, l: usize, h: &CapacityFunction) -> Result<Cut> {
    let cs = circuits_through(m, l)?;
    let caps = capacities(m, h);
    let (value, set) = hitting_set(&cs, l, &caps);
    Ok(Cut { value, elements: m.labels_of(&set) })
}

fn hitting_set(cs: &[Vec<usize>], l: usize, caps: &[u64]) -> (u64, Vec<usize>) {
    fn go(cs: &[Vec<usize>], l: usize, caps: &[u64], chosen: &mut Vec<usize>, cost: u64, best: &mut (u64, Vec<usize>)) {
        if cost >= best.0 {
            return;
        }
        // The unhit circuit with the fewest candidate elements.
        let open = cs.iter().filter(|c| !c.iter().any(|e| chosen.contains(e))).min_by_key(|c| c.len());
        let Some(c) = open else {
            let mut set = chosen.clone();
            set.sort_unstable();
            *best = (cost, set);
            return;
        };
        for &e in c.iter().filter(|&&e| e != l) {
            chosen.push(e);
            go(cs, l, caps, chosen, cost + caps[e], best);
            chosen.pop();
        }
    }
    // Taking every non-l element is always a cut.
    let all: Vec<usize> = {
        let mut v: Vec<usize> = cs.iter().flatten().copied().filter(|&e| e != l).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut best = (all.iter().map(|&e| caps[e]).sum::<u64>() + 1, all);
    go(cs, l, caps, &mut Vec::new(), 0, &mut best);
    best
}

/// First capacity function with values in `0..=cap_bound` (lexicographic
/// over the elements other than `l`) whose max flow is below its min cut.
pub fn mfmc_gap_search<F: Field>(m: &LinearMatroid<F>, l: usize, cap_bound: u64) -> Result<Option<GapWitness>> {
    let others: Vec<usize> = (0..m.len()).filter(|&e| e != l).collect();
    let combos = (cap_bound + 1) as f64;
    if combos.powi(others.len() as i32) > 1.0e6 {
        return Err(Error::TooLarge(format!("{} capacity functions", combos.powi(others.len() as i32))));
    }
    let cs = circuits_through(m, l)?;
    let mut caps = vec![0u64; m.len()];
    loop {
        let (flow, _) = pack(&cs, l, &caps);
        let (cut, _) = hitting_set(&cs, l, &caps);
        if flow < cut {
            return Ok(Some(GapWitness { capacities: others.iter().map(|&e| (m.labels()[e].clone(), caps[e])).collect(), flow, cut }));
        }
        // Odometer over the non-l elements.
        let mut k = others.len();
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            let e = others[k];
            if caps[e] < cap_bound {
                caps[e] += 1;
                break;
            }
            caps[e] = 0;
        }
    }
}

/// LP bound plus, when the instance is small enough, the exact flow and cut.
pub fn flow_report(x: &CellComplex, h: &CapacityFunction) -> Result<FlowResult> {
    let l = attached(x)?;
    let m = LinearMatroid::<Rat>::from_boundary(x, 2);
    let lp = lp_max_flow_matroid(&m, l, h)?;
    let mut report = FlowResult {
        lp_upper: lp.to_string(),
        int_max_flow: None,
        circuit_decomposition: None,
        min_cut_value: None,
        min_cut_set: None,
    };
    if m.len() <= FLOW_GUARD {
        let flow = integer_max_flow(&m, l, h)?;
        let cut = min_cut(&m, l, h)?;
        report.int_max_flow = Some(flow.value);
        report.circuit_decomposition = Some(flow.circuits);
        report.min_cut_value = Some(cut.value);
        report.min_cut_set = Some(cut.elements);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::simplex_skeleton;
    use crate::exactla::{Gf2, Matrix};

    /// Boundary of the tetrahedron with the triangle 0-1-2 replaced by `l`.
    fn tetra_with_l() -> CellComplex {
        let r = CellComplex::from_simplices([vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]], 2);
        let e = |a, b| r.index_of(&[a, b]).unwrap();
        r.attach_cell(vec![(e(0, 1), 1), (e(1, 2), 1), (e(0, 2), -1)]).unwrap()
    }

    #[test]
    fn lp_on_single_circuit() {
        let x = tetra_with_l();
        assert_eq!(lp_max_flow(&x, &CapacityFunction::uniform(1)).unwrap(), Rat::integer(1));
        assert_eq!(lp_max_flow(&x, &CapacityFunction::uniform(0)).unwrap(), Rat::integer(0));
        assert_eq!(lp_max_flow(&x, &CapacityFunction::uniform(2)).unwrap(), Rat::integer(2));
        let m = LinearMatroid::<Rat>::from_boundary(&x, 2);
        let l = x.attached_index().unwrap();
        assert_eq!(integer_max_flow(&m, l, &CapacityFunction::uniform(1)).unwrap().value, 1);
        assert_eq!(min_cut(&m, l, &CapacityFunction::uniform(1)).unwrap().value, 1);
    }

    #[test]
    fn lp_counts_parallel_routes() {
        // Two tetrahedron boundaries sharing only the ring of `l`.
        let r = CellComplex::from_simplices(
            [vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3], vec![0, 1, 4], vec![0, 2, 4], vec![1, 2, 4]],
            2,
        );
        let e = |a, b| r.index_of(&[a, b]).unwrap();
        let x = r.attach_cell(vec![(e(0, 1), 1), (e(1, 2), 1), (e(0, 2), -1)]).unwrap();
        assert_eq!(lp_max_flow(&x, &CapacityFunction::uniform(1)).unwrap(), Rat::integer(2));
        let report = flow_report(&x, &CapacityFunction::uniform(1)).unwrap();
        assert_eq!(report.int_max_flow, Some(2));
        assert_eq!(report.min_cut_value, Some(2));
    }

    #[test]
    fn weighted_cut_avoids_heavy_element() {
        let m = LinearMatroid::<Gf2>::from_matrix(Matrix::from_i64_rows(&[vec![1, 0, 1], vec![0, 1, 1]]));
        let mut h = CapacityFunction::uniform(1);
        h.set("e1", 100);
        let cut = min_cut(&m, 0, &h).unwrap();
        assert_eq!(cut.value, 1);
        assert_eq!(cut.elements, vec!["e2".to_string()]);
    }

    #[test]
    fn coloop_convention() {
        let m = LinearMatroid::<Gf2>::from_matrix(Matrix::from_i64_rows(&[vec![1, 0], vec![0, 1]]));
        assert_eq!(integer_max_flow(&m, 0, &CapacityFunction::default()).unwrap().value, 0);
        assert_eq!(min_cut(&m, 0, &CapacityFunction::default()).unwrap().value, 0);
        assert_eq!(mfmc_gap_search(&m, 0, 2).unwrap(), None);
    }

    #[test]
    fn graphic_has_no_gap() {
        let m = LinearMatroid::<Gf2>::from_boundary(&simplex_skeleton(4, 1), 1);
        for l in 0..m.len() {
            assert_eq!(mfmc_gap_search(&m, l, 2).unwrap(), None);
        }
    }

    #[test]
    fn fano_dual_has_gap_everywhere() {
        let crate::matroid::AnyMatroid::Gf2(m) = crate::matroid::catalog(crate::matroid::CatalogName::F7star).unwrap().matroid else {
            unreachable!()
        };
        for l in 0..7 {
            let w = mfmc_gap_search(&m, l, 2).unwrap().unwrap();
            assert!(w.flow < w.cut);
        }
    }
}
