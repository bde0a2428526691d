//! Seeded point-cloud sampling and the perimeter fence ring.
//!
//! Every sample is drawn from a `ChaCha8Rng` seeded with the spec's 64-bit
//! seed, so identical specs give bit-identical clouds on every platform.
//! Normal variates use the Marsaglia polar method on top of that stream.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Distribution {
    /// Uniform on the unit square.
    D1,
    /// Uniform on the unit square plus a fixed perimeter fence ring.
    D2,
    /// Standard normal in the plane.
    D3,
    /// Standard normal in three dimensions.
    D4,
}

impl Distribution {
    pub const ALL: [Distribution; 4] = [Distribution::D1, Distribution::D2, Distribution::D3, Distribution::D4];

    pub fn dimension(self) -> usize {
        match self {
            Distribution::D4 => 3,
            _ => 2,
        }
    }

    pub fn index(self) -> u64 {
        match self {
            Distribution::D1 => 1,
            Distribution::D2 => 2,
            Distribution::D3 => 3,
            Distribution::D4 => 4,
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", self.index())
    }
}

impl FromStr for Distribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "D1" | "d1" | "1" => Ok(Distribution::D1),
            "D2" | "d2" | "2" => Ok(Distribution::D2),
            "D3" | "d3" | "3" => Ok(Distribution::D3),
            "D4" | "d4" | "4" => Ok(Distribution::D4),
            other => Err(Error::Parse(format!("unknown distribution `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub kind: Distribution,
    pub n: usize,
    /// Connection scale; only D2 uses it (fence spacing).
    pub epsilon: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub points: Vec<Vec<f64>>,
    /// Fence ring in traversal order (indices into `points`).
    pub fence_indices: Vec<usize>,
    pub dimension: usize,
}

impl PointCloud {
    pub fn new(dimension: usize, points: Vec<Vec<f64>>, fence_indices: Vec<usize>) -> Result<PointCloud> {
        if !(dimension == 2 || dimension == 3) {
            return Err(Error::Invalid(format!("dimension must be 2 or 3, got {dimension}")));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dimension) {
            return Err(Error::Invalid(format!("point {p:?} does not have dimension {dimension}")));
        }
        let mut seen = vec![false; points.len()];
        for &i in &fence_indices {
            if i >= points.len() || seen[i] {
                return Err(Error::Invalid(format!("bad or repeated fence index {i}")));
            }
            seen[i] = true;
        }
        Ok(PointCloud { points, fence_indices, dimension })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_fence(&self, i: usize) -> bool {
        self.fence_indices.contains(&i)
    }
}

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream-splitting rule: fold each part into the master seed with SplitMix64.
///
/// `derive_seed(m, &[a, b])` is `mix(mix(mix(m) ^ a) ^ b)`.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix64(master), |acc, &p| mix64(acc ^ p))
}

/// The crate's generator for a given seed.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One standard normal variate by the Marsaglia polar method (second value discarded).
pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    loop {
        let u = 2.0 * rng.gen::<f64>() - 1.0;
        let v = 2.0 * rng.gen::<f64>() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

pub fn sample(spec: &DistributionSpec) -> Result<PointCloud> {
    let mut rng = rng_for(spec.seed);
    let dim = spec.kind.dimension();
    let mut points: Vec<Vec<f64>> = (0..spec.n)
        .map(|_| match spec.kind {
            Distribution::D1 | Distribution::D2 => vec![rng.gen::<f64>(), rng.gen::<f64>()],
            Distribution::D3 | Distribution::D4 => (0..dim).map(|_| standard_normal(&mut rng)).collect(),
        })
        .collect();
    let mut fence_indices = Vec::new();
    if spec.kind == Distribution::D2 {
        if !(spec.epsilon > 0.0) {
            return Err(Error::Invalid("D2 requires epsilon > 0".into()));
        }
        for p in make_fence(spec.epsilon)? {
            fence_indices.push(points.len());
            points.push(p);
        }
    }
    PointCloud::new(dim, points, fence_indices)
}

/// Perimeter fence spacing as a fraction of epsilon.
pub const FENCE_SPACING: f64 = 0.75;

/// Point at arc length `t` along the unit-square perimeter, counterclockwise from the origin.
fn perimeter_point(t: f64) -> Vec<f64> {
    let t = t.rem_euclid(4.0);
    match t {
        t if t < 1.0 => vec![t, 0.0],
        t if t < 2.0 => vec![1.0, t - 1.0],
        t if t < 3.0 => vec![3.0 - t, 1.0],
        t => vec![0.0, 4.0 - t],
    }
}

fn ring(count: usize) -> Vec<Vec<f64>> {
    let step = 4.0 / count as f64;
    (0..count).map(|i| perimeter_point(i as f64 * step)).collect()
}

/// Consecutive nodes (cyclically) closer than `epsilon`, all other pairs at least `epsilon` apart.
pub fn fence_ring_is_valid(nodes: &[Vec<f64>], epsilon: f64) -> bool {
    let n = nodes.len();
    if n < 4 {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let close = distance(&nodes[i], &nodes[j]) < epsilon;
            if adjacent != close {
                return false;
            }
        }
    }
    true
}

/// Equally spaced perimeter ring at spacing at most `0.75 * epsilon`; other
/// node counts with spacing in `(epsilon/2, epsilon)` are tried only when the
/// preferred ring fails validation.
pub fn make_fence(epsilon: f64) -> Result<Vec<Vec<f64>>> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Invalid(format!("fence epsilon must be positive, got {epsilon}")));
    }
    let preferred = (4.0 / (FENCE_SPACING * epsilon)).ceil() as usize;
    let lo = (4.0 / epsilon).floor() as usize + 1;
    let hi = (8.0 / epsilon).ceil() as usize;
    let mut candidates = vec![preferred];
    candidates.extend((lo..hi).filter(|&c| c != preferred));
    for count in candidates {
        let step = 4.0 / count as f64;
        if !(step > epsilon / 2.0 && step < epsilon) {
            continue;
        }
        let nodes = ring(count);
        if fence_ring_is_valid(&nodes, epsilon) {
            return Ok(nodes);
        }
    }
    Err(Error::FenceInfeasible(epsilon))
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn pairwise_distances(cloud: &PointCloud) -> Vec<Vec<f64>> {
    let n = cloud.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = distance(&cloud.points[i], &cloud.points[j]);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Text form: `# dim=<d>` header, then `x,y[,z]` per line; fence nodes carry a
/// trailing `fence=<ordinal>` column giving their position in the ring.
pub fn write_cloud(cloud: &PointCloud) -> String {
    let mut ordinal = vec![None; cloud.len()];
    for (k, &i) in cloud.fence_indices.iter().enumerate() {
        ordinal[i] = Some(k);
    }
    let mut out = format!("# dim={}\n", cloud.dimension);
    for (p, ord) in cloud.points.iter().zip(ordinal) {
        let coords: Vec<String> = p.iter().map(|x| format!("{x:?}")).collect();
        out.push_str(&coords.join(","));
        if let Some(k) = ord {
            let _ = write!(out, ",fence={k}");
        }
        out.push('\n');
    }
    out
}

pub fn read_cloud(text: &str) -> Result<PointCloud> {
    let mut dim = None;
    let mut points = Vec::new();
    let mut fence: Vec<(usize, usize)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            if let Some(d) = h.trim().strip_prefix("dim=") {
                dim = Some(d.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad dimension `{d}`")))?);
            }
            continue;
        }
        let mut coords = Vec::new();
        for field in line.split(',').map(str::trim) {
            if let Some(k) = field.strip_prefix("fence=") {
                let k = k.parse().map_err(|_| Error::Parse(format!("line {}: bad fence ordinal", lineno + 1)))?;
                fence.push((k, points.len()));
            } else {
                coords.push(
                    field.parse::<f64>().map_err(|_| Error::Parse(format!("line {}: bad coordinate `{field}`", lineno + 1)))?,
                );
            }
        }
        points.push(coords);
    }
    let dim = dim.ok_or_else(|| Error::Parse("missing `# dim=` header".into()))?;
    fence.sort_unstable();
    if fence.iter().enumerate().any(|(k, (ord, _))| *ord != k) {
        return Err(Error::Parse("fence ordinals must be 0..k without gaps".into()));
    }
    PointCloud::new(dim, points, fence.into_iter().map(|(_, i)| i).collect())
}
