//! Acceptance run: one PASS/FAIL line per criterion, thresholds as agreed.
//! Oracles here are independent of the code under test.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use cellmat::complex::{simplex_skeleton, CellComplex};
use cellmat::exactla::{submatrix_determinant_scan, Gf2, Matrix, Rat};
use cellmat::flow::{flow_report, mfmc_gap_search, CapacityFunction};
use cellmat::harness::{reports_csv, run_grid, ExperimentConfig, Flag, InvariantReport};
use cellmat::homology::{connectivity_via_homology, mayer_vietoris_nullity};
use cellmat::invariants::{
    delta5_catalog_check, delta5_f7_certificate, is_cographic, minor_search, shift_certificate, sign_and_test_tu, TuStatus,
    DEFAULT_GRAPHIC_BUDGET, DEFAULT_MINOR_BUDGET,
};
use cellmat::matroid::{catalog, AnyMatroid, Catalog, CatalogName, LinearMatroid};
use cellmat::pointcloud::{rng_for, Distribution};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

// Criterion 1: catalog minors of the 5-simplex.
fn catalog_minors() -> Outcome {
    let mut cat = Catalog::bundled();
    let mut note = "N8/N9 skipped: no catalog file supplied";
    if let Ok(path) = std::env::var("CELLMAT_CATALOG") {
        cat = cat.merged(Catalog::load(std::path::Path::new(&path)).expect("catalog file"));
        note = "N8/N9 checked from CELLMAT_CATALOG";
    }
    let delta5 = simplex_skeleton(6, 2);
    let m2 = LinearMatroid::<Gf2>::from_boundary(&delta5, 2);
    let mq = LinearMatroid::<Rat>::from_boundary(&delta5, 2);
    let limit = 120.0;
    let mut parts = Vec::new();
    let mut pass = true;
    for f in delta5_catalog_check(&cat, DEFAULT_MINOR_BUDGET, 1) {
        let target = cat.get(f.target).unwrap();
        let verified = match &f.certificate {
            Some(c) if f.target == CatalogName::U24 => c.verify(&mq, &target).unwrap(),
            Some(c) => c.verify(&m2, &target).unwrap(),
            None => false,
        };
        pass &= verified && f.seconds <= limit;
        parts.push(format!("{} {} in {:.2}s", f.target, if verified { "verified" } else { "MISSING" }, f.seconds));
    }
    let required = [CatalogName::U24, CatalogName::F7, CatalogName::F7star];
    pass &= required.iter().all(|n| cat.names().contains(n));
    outcome(pass, format!("{}; {note}", parts.join(", ")))
}

// Criterion 2: F7 in the tetrahedron matroid of the 6-simplex.
fn lifted_f7() -> Outcome {
    let m3 = LinearMatroid::<Gf2>::from_boundary(&simplex_skeleton(7, 3), 3);
    let f7 = catalog(CatalogName::F7).unwrap();
    let start = Instant::now();
    let lifted = shift_certificate(delta5_f7_certificate(), 6, 2);
    let lifted_ok = lifted.verify(&m3, &f7).unwrap();
    let lift_time = start.elapsed();
    let start = Instant::now();
    let direct = minor_search(&m3, &f7, DEFAULT_MINOR_BUDGET, 2);
    let direct_ok = direct.found().is_some_and(|c| c.verify(&m3, &f7).unwrap());
    let direct_time = start.elapsed();
    let within = lift_time + direct_time <= Duration::from_secs(600);
    outcome(
        lifted_ok && within,
        format!(
            "lifted certificate verified={lifted_ok} ({:.2}s), direct search verified={direct_ok} ({:.2}s)",
            lift_time.as_secs_f64(),
            direct_time.as_secs_f64()
        ),
    )
}

fn laplace_det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .filter(|&j| m[0][j] != 0)
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * laplace_det(&minor)
            })
            .sum(),
    }
}

fn all_minors_unit(m: &[Vec<i64>]) -> bool {
    let (nr, nc) = (m.len(), m[0].len());
    for mask_r in 1u32..1 << nr {
        for mask_c in 1u32..1 << nc {
            if mask_r.count_ones() != mask_c.count_ones() {
                continue;
            }
            let sub: Vec<Vec<i64>> = (0..nr)
                .filter(|i| mask_r >> i & 1 == 1)
                .map(|i| (0..nc).filter(|j| mask_c >> j & 1 == 1).map(|j| m[i][j]).collect())
                .collect();
            if laplace_det(&sub).abs() > 1 {
                return false;
            }
        }
    }
    true
}

/// Whether some sign pattern on the support is totally unimodular. Scaling
/// rows and columns by -1 preserves total unimodularity, so entries on a
/// spanning forest of the support graph can be fixed to +1.
fn signable_by_enumeration(b: &[Vec<u8>]) -> bool {
    let (nr, nc) = (b.len(), b[0].len());
    let mut parent: Vec<usize> = (0..nr + nc).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut free = Vec::new();
    for i in 0..nr {
        for j in 0..nc {
            if b[i][j] == 1 {
                let (a, c) = (find(&mut parent, i), find(&mut parent, nr + j));
                if a == c {
                    free.push((i, j));
                } else {
                    parent[a] = c;
                }
            }
        }
    }
    (0u32..1 << free.len()).any(|signs| {
        let mut m: Vec<Vec<i64>> = b.iter().map(|r| r.iter().map(|&v| i64::from(v)).collect()).collect();
        for (k, &(i, j)) in free.iter().enumerate() {
            if signs >> k & 1 == 1 {
                m[i][j] = -1;
            }
        }
        all_minors_unit(&m)
    })
}

// Criterion 3: signing test against exhaustive enumeration.
fn tu_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_for(0x7e57);
    let (mut disagreements, mut tu_count, mut total) = (0, 0, 0);
    while total < 1200 {
        let (nr, nc) = if total % 4 == 0 { (rng.gen_range(1..=5), rng.gen_range(1..=5)) } else { (rng.gen_range(3..=5), rng.gen_range(3..=5)) };
        let density: f64 = rng.gen_range(0.3..0.95);
        let b: Vec<Vec<u8>> = (0..nr).map(|_| (0..nc).map(|_| u8::from(rng.gen_bool(density))).collect()).collect();
        let gf2 = Matrix::<Gf2>::from_i64_rows(&b.iter().map(|r| r.iter().map(|&v| i64::from(v)).collect()).collect::<Vec<_>>());
        let res = sign_and_test_tu(&gf2);
        let oracle = signable_by_enumeration(&b);
        let claimed = match res.status {
            TuStatus::Tu => {
                // The returned signing must itself pass the full scan.
                let signed = res.signed_matrix.as_ref().unwrap();
                submatrix_determinant_scan(signed, 5).unwrap().is_none()
            }
            TuStatus::NotTu => false,
            TuStatus::Unknown => !oracle,
        };
        if claimed != oracle || (res.status == TuStatus::NotTu && !res.violation.as_ref().unwrap().verify(&gf2)) {
            disagreements += 1;
        }
        tu_count += usize::from(oracle);
        total += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        disagreements == 0 && secs < 60.0,
        format!("{total} matrices ({tu_count} signable), {disagreements} disagreements, {secs:.2}s"),
    )
}

/// Random 2-complexes with at most 12 triangles.
fn small_complexes(count: usize, seed: u64) -> Vec<CellComplex> {
    let mut rng = rng_for(seed);
    (0..count)
        .map(|_| {
            let v = rng.gen_range(4..=7);
            let mut all: Vec<Vec<usize>> = Vec::new();
            for a in 0..v {
                for b in a + 1..v {
                    for c in b + 1..v {
                        all.push(vec![a, b, c]);
                    }
                }
            }
            all.shuffle(&mut rng);
            let t = rng.gen_range(2..=12.min(all.len()));
            CellComplex::from_simplices(all.into_iter().take(t), 2)
        })
        .collect()
}

// Criteria 4 and 5: rank identity and homological connectivity.
fn rank_identity_and_connectivity(corpus: &[CellComplex]) -> (Outcome, Outcome) {
    let (mut checked, mut exceptions) = (0usize, 0usize);
    let (mut conn_checked, mut conn_disagree) = (0usize, 0usize);
    for x in corpus {
        let t = x.num_cells(2);
        let m2 = LinearMatroid::<Gf2>::from_boundary(x, 2);
        let mq = LinearMatroid::<Rat>::from_boundary(x, 2);
        for mask in 1u32..(1 << t) - 1 {
            let in1: Vec<bool> = (0..t).map(|i| mask >> i & 1 == 1).collect();
            let e1: Vec<usize> = (0..t).filter(|&i| in1[i]).collect();
            let e2: Vec<usize> = (0..t).filter(|&i| !in1[i]).collect();
            let nu2 = mayer_vietoris_nullity::<Gf2>(x, &e1, &e2).unwrap();
            let nuq = mayer_vietoris_nullity::<Rat>(x, &e1, &e2).unwrap();
            let lam2 = m2.rank_of(&e1) + m2.rank_of(&e2) - m2.rank();
            let lamq = mq.rank_of(&e1) + mq.rank_of(&e2) - mq.rank();
            exceptions += usize::from(nu2 != lam2) + usize::from(nuq != lamq);
            checked += 2;
        }
        for k in [2, 3] {
            let by_matroid = m2.find_k_separation(k).unwrap().is_none();
            let by_homology = connectivity_via_homology::<Gf2>(x, k).unwrap();
            let by_matroid_q = mq.find_k_separation(k).unwrap().is_none();
            let by_homology_q = connectivity_via_homology::<Rat>(x, k).unwrap();
            conn_disagree += usize::from(by_matroid != by_homology) + usize::from(by_matroid_q != by_homology_q);
            conn_checked += 2;
        }
    }
    (
        outcome(
            corpus.len() >= 20 && exceptions == 0,
            format!("{} complexes, {checked} bipartition checks over GF2 and Q, {exceptions} exceptions", corpus.len()),
        ),
        outcome(
            conn_disagree == 0,
            format!("{conn_checked} (complex, k, field) checks for k in {{2,3}}, {conn_disagree} disagreements"),
        ),
    )
}

// Criterion 6: weak duality on a fixture corpus.
fn flow_duality() -> Outcome {
    let mut rng = rng_for(0xf10);
    let mut violations = Vec::new();
    let mut fixtures = 0;
    while fixtures < 50 {
        let v = 6;
        let mut all: Vec<Vec<usize>> = Vec::new();
        for a in 0..v {
            for b in a + 1..v {
                for c in b + 1..v {
                    all.push(vec![a, b, c]);
                }
            }
        }
        all.shuffle(&mut rng);
        // The attached cell runs around a triangle left out of the complex.
        let ring = all[0].clone();
        let t = rng.gen_range(3..=12);
        let mut cells: Vec<Vec<usize>> = all[1..=t].to_vec();
        cells.extend([vec![ring[0], ring[1]], vec![ring[1], ring[2]], vec![ring[0], ring[2]]]);
        let x = CellComplex::from_simplices(cells, 2);
        let x = x.attach_cell(x.ring_chain(&ring).unwrap()).unwrap();
        let mut h = CapacityFunction::uniform(1);
        if fixtures % 2 == 1 {
            for label in x.cell_labels(2) {
                h.set(&label, rng.gen_range(1..=3));
            }
        }
        let r = flow_report(&x, &h).unwrap();
        let lp = Rat::parse_elem_str(&r.lp_upper);
        let (flow, cut) = (r.int_max_flow.unwrap(), r.min_cut_value.unwrap());
        if flow > cut || Rat::integer(flow as i64) > lp {
            violations.push(format!("fixture {fixtures}: flow {flow} cut {cut} lp {lp}"));
        }
        fixtures += 1;
    }
    // Boundary of the 3-simplex with one face replaced by the attached cell.
    let sphere: Vec<Vec<usize>> = simplex_skeleton(4, 2).simplices(2).iter().filter(|t| t.as_slice() != [1, 2, 3]).cloned().collect();
    let x = CellComplex::from_simplices(sphere, 2);
    let x = x.attach_cell(x.ring_chain(&[1, 2, 3]).unwrap()).unwrap();
    let r = flow_report(&x, &CapacityFunction::uniform(1)).unwrap();
    let sphere_ok = r.int_max_flow == Some(1) && r.min_cut_value == Some(1) && r.lp_upper == "1";
    outcome(
        violations.is_empty() && sphere_ok,
        format!(
            "{fixtures} fixtures, {} violations{}; tetrahedron boundary flow={:?} cut={:?} lp={}",
            violations.len(),
            violations.first().map(|v| format!(" (first: {v})")).unwrap_or_default(),
            r.int_max_flow,
            r.min_cut_value,
            r.lp_upper
        ),
    )
}

trait ParseRat {
    fn parse_elem_str(s: &str) -> Rat;
}

impl ParseRat for Rat {
    fn parse_elem_str(s: &str) -> Rat {
        <Rat as cellmat::exactla::Field>::parse_elem(s).expect("rational")
    }
}

fn graph_matroid(edges: &[[usize; 2]]) -> LinearMatroid<Gf2> {
    let x = CellComplex::from_simplices(edges.iter().map(|e| e.to_vec()), 1);
    LinearMatroid::<Gf2>::from_boundary(&x, 1)
}

// Criterion 7: the F7* gap and its absence on graphs.
fn mfmc_gap() -> Outcome {
    let AnyMatroid::Gf2(f7s) = catalog(CatalogName::F7star).unwrap().matroid else { unreachable!() };
    let mut witnessed = 0;
    for l in 0..f7s.len() {
        if let Some(w) = mfmc_gap_search(&f7s, l, 2).unwrap() {
            witnessed += usize::from(w.flow < w.cut);
        }
    }
    let graphs: Vec<Vec<[usize; 2]>> = vec![
        vec![[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]],
        vec![[0, 1], [1, 2], [2, 3], [3, 4], [0, 4]],
        vec![[0, 1], [1, 2], [0, 2], [2, 3], [3, 4], [2, 4], [1, 4]],
        vec![[0, 1], [0, 2], [0, 3], [1, 2], [2, 3], [1, 4], [3, 4], [0, 4]],
    ];
    let mut graph_gaps = 0;
    let mut graph_checks = 0;
    for g in &graphs {
        let m = graph_matroid(g);
        for l in 0..m.len() {
            graph_checks += 1;
            graph_gaps += usize::from(mfmc_gap_search(&m, l, 2).unwrap().is_some());
        }
    }
    outcome(
        witnessed == f7s.len() && graph_gaps == 0,
        format!("F7* gap witnessed for {witnessed}/{} choices of l; {graph_gaps} gaps over {graph_checks} graphic (matroid, l) pairs", f7s.len()),
    )
}

// Criterion 8: cographic certificate for the 2-skeleton of the 4-simplex.
fn cographic_sphere() -> Outcome {
    let m = LinearMatroid::<Gf2>::from_boundary(&simplex_skeleton(5, 2), 2);
    let start = Instant::now();
    let res = is_cographic(&m, DEFAULT_GRAPHIC_BUDGET);
    let secs = start.elapsed().as_secs_f64();
    let verified = res.found().is_some_and(|c| c.cographic && c.verify(&m));
    outcome(verified && secs < 60.0, format!("certificate verified={verified} in {secs:.2}s"))
}

fn fraction(num: usize, den: usize) -> String {
    if den == 0 {
        "0/0".into()
    } else {
        format!("{num}/{den} = {:.3}", num as f64 / den as f64)
    }
}

// Criterion 9: qualitative replication on the desk grid.
fn ensemble(reports: &[InvariantReport], elapsed: Duration) -> Outcome {
    let graphic = reports.iter().filter(|r| r.is_graphic.is_true()).count();
    let cographic = reports.iter().filter(|r| r.is_cographic.is_true()).count();
    let nonempty_graphic = reports.iter().filter(|r| r.is_graphic.is_true() && r.ground_size > 0).count();
    let nonempty_cographic = reports.iter().filter(|r| r.is_cographic.is_true() && r.ground_size > 0).count();
    let a = graphic == 0 && cographic == 0;

    let covered: Vec<&InvariantReport> =
        reports.iter().filter(|r| r.distribution == Some(Distribution::D2) && r.covered.is_true()).collect();
    let small = covered.iter().filter(|r| matches!(r.components, Some(1 | 2))).count();
    let irregular_cov = covered.iter().filter(|r| r.is_regular.is_false()).count();
    let b = !covered.is_empty()
        && small as f64 >= 0.95 * covered.len() as f64
        && irregular_cov as f64 > 0.5 * covered.len() as f64;
    let comps: BTreeMap<usize, usize> = covered.iter().filter_map(|r| r.components).fold(BTreeMap::new(), |mut h, c| {
        *h.entry(c).or_default() += 1;
        h
    });

    let lp_hist = |n: usize, eps: f64| -> BTreeMap<Rat, usize> {
        let mut h = BTreeMap::new();
        for r in reports.iter().filter(|r| r.distribution == Some(Distribution::D2) && r.n == n && r.epsilon == eps) {
            if let Some(v) = &r.maxflow_lp {
                *h.entry(Rat::parse_elem_str(v)).or_default() += 1;
            }
        }
        h
    };
    let dense = lp_hist(60, 0.25);
    let sparse = lp_hist(40, 0.15);
    let modal = dense.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(v, _)| v.clone());
    let mid = sparse.iter().filter(|(v, _)| **v >= Rat::integer(2) && **v <= Rat::integer(5)).map(|(_, c)| c).sum::<usize>();
    let c = modal == Some(Rat::integer(1)) && mid > 0;
    let show = |h: &BTreeMap<Rat, usize>| h.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(" ");

    let irregular: Vec<&InvariantReport> = reports.iter().filter(|r| r.is_regular.is_false()).collect();
    let with_clique = irregular.iter().filter(|r| r.six_cliques > 0).count();
    let d = !irregular.is_empty() && with_clique as f64 >= 0.9 * irregular.len() as f64;

    let within = elapsed <= Duration::from_secs(7200);
    let verdict = |p: bool| if p { "pass" } else { "FAIL" };
    outcome(
        a && b && c && d && within,
        format!(
            "{} trials in {:.0}s ({}); (a) {}: graphic {graphic}, cographic {cographic} (nonempty matroids: {nonempty_graphic}, {nonempty_cographic}); \
(b) {}: {} covered D2 trials, components in {{1,2}} {}, components histogram [{}], regularity fails {}; \
(c) {}: dense D2 n=60 eps=0.25 LP histogram [{}], sparse D2 n=40 eps=0.15 LP histogram [{}], sparse values in [2,5]: {mid}; \
(d) {}: irregular trials with a 6-clique {}",
            reports.len(),
            elapsed.as_secs_f64(),
            verdict(within),
            verdict(a),
            verdict(b),
            covered.len(),
            fraction(small, covered.len()),
            comps.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(" "),
            fraction(irregular_cov, covered.len()),
            verdict(c),
            show(&dense),
            show(&sparse),
            verdict(d),
            fraction(with_clique, irregular.len()),
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    results.push((1, catalog_minors()));
    results.push((2, lifted_f7()));
    results.push((3, tu_oracle()));
    let corpus = small_complexes(24, 0xc0de);
    let (c4, c5) = rank_identity_and_connectivity(&corpus);
    results.push((4, c4));
    results.push((5, c5));
    results.push((6, flow_duality()));
    results.push((7, mfmc_gap()));
    results.push((8, cographic_sphere()));

    let cfg = ExperimentConfig::acceptance();
    let start = Instant::now();
    let first = run_grid(&cfg).expect("acceptance grid");
    let elapsed = start.elapsed();
    results.push((9, ensemble(&first.reports, elapsed)));

    let single = ExperimentConfig { workers: 1, ..cfg };
    let second = run_grid(&single).expect("acceptance grid rerun");
    let csv = reports_csv(&first.reports);
    let identical = csv == reports_csv(&second.reports) && first.summary.to_csv() == second.summary.to_csv();
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let _ = std::fs::write(dir.join("acceptance_trials.csv"), &csv);
    let _ = std::fs::write(dir.join("acceptance_aggregate.csv"), first.summary.to_csv());
    results.push((
        10,
        outcome(identical, format!("{} bytes of trial CSV, rerun on one worker identical={identical}", csv.len())),
    ));

    println!();
    for (n, o) in &results {
        println!("criterion {n}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<u32> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    let unknown_regular = first.reports.iter().filter(|r| r.is_regular == Flag::Unknown).count();
    println!("note: {unknown_regular} trials with undecided regularity");
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
