//! Maximin Latin hypercube designs over the seven-variable scenario box.
//!
//! Random streams of the ChaCha8 generator seeded with `DesignSpec::seed`:
//! stream 0 draws the per-variable stratum permutations, stream 1 the
//! within-stratum jitter and stream 2 the maximin swap proposals.

use std::io::{Read, Write};
use std::path::Path;

use rand::distr::{Distribution, Open01};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::Scenario;

pub const DIM: usize = 7;

const STREAM_PERMUTATION: u64 = 0;
const STREAM_JITTER: u64 = 1;
const STREAM_MAXIMIN: u64 = 2;

#[derive(Debug, Error)]
pub enum DoeError {
    #[error("invalid design spec: {0}")]
    InvalidSpec(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
}

/// One sampled variable with its closed interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub unit: String,
}

impl Variable {
    fn new(name: &str, min: f64, max: f64, unit: &str) -> Variable {
        Variable {
            name: name.to_string(),
            min,
            max,
            unit: unit.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignSpec {
    /// In `Scenario` field order.
    pub variables: Vec<Variable>,
    pub n_samples: usize,
    pub seed: u64,
    pub maximin_iterations: u64,
}

impl Default for DesignSpec {
    fn default() -> Self {
        DesignSpec {
            variables: vec![
                Variable::new("alt_sht", 1_000.0, 45_000.0, "ft"),
                Variable::new("vel_sht", 400.0, 600.0, "kt"),
                Variable::new("pit_sht", -45.0, 45.0, "deg"),
                Variable::new("alt_tgt", 1_000.0, 45_000.0, "ft"),
                Variable::new("vel_tgt", 400.0, 600.0, "kt"),
                Variable::new("hdg_tgt", -180.0, 180.0, "deg"),
                Variable::new("rgt_tgt", -60.0, 60.0, "deg"),
            ],
            n_samples: 50_000,
            seed: 0,
            maximin_iterations: 100_000,
        }
    }
}

impl DesignSpec {
    /// Default bounds with the given size and seed.
    pub fn new(n_samples: usize, seed: u64) -> DesignSpec {
        DesignSpec {
            n_samples,
            seed,
            ..DesignSpec::default()
        }
    }

    pub fn validate(&self) -> Result<(), DoeError> {
        if self.variables.len() != DIM {
            return Err(DoeError::InvalidSpec(format!(
                "expected {DIM} variables, got {}",
                self.variables.len()
            )));
        }
        for (v, expected) in self.variables.iter().zip(Scenario::FIELDS) {
            if v.name != expected {
                return Err(DoeError::InvalidSpec(format!(
                    "variable `{}` where `{expected}` was expected",
                    v.name
                )));
            }
            if !(v.min.is_finite() && v.max.is_finite() && v.min < v.max) {
                return Err(DoeError::InvalidSpec(format!(
                    "{}: need finite min < max, got [{}, {}]",
                    v.name, v.min, v.max
                )));
            }
        }
        if self.n_samples < 2 {
            return Err(DoeError::InvalidSpec(format!(
                "n_samples must be at least 2, got {}",
                self.n_samples
            )));
        }
        Ok(())
    }

    fn bounds(&self) -> [(f64, f64); DIM] {
        std::array::from_fn(|c| (self.variables[c].min, self.variables[c].max))
    }

    /// Stratum (0-based) of `x` for variable `c`, as used by the Latin property.
    pub fn stratum(&self, c: usize, x: f64) -> usize {
        let v = &self.variables[c];
        let k = ((x - v.min) / (v.max - v.min) * self.n_samples as f64).floor();
        (k.max(0.0) as usize).min(self.n_samples - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub iterations: u64,
    pub accepted_swaps: u64,
    /// Minimum pairwise distance in unit coordinates before the maximin pass.
    pub initial_min_distance: f64,
    pub min_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub spec: DesignSpec,
    /// Points in unit coordinates, one row per sample.
    pub unit: Vec<[f64; DIM]>,
    pub provenance: Provenance,
}

impl Design {
    pub fn len(&self) -> usize {
        self.unit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unit.is_empty()
    }
}

/// Draws a maximin Latin hypercube design. Deterministic in `spec`.
pub fn lhs_sample(spec: &DesignSpec) -> Result<Design, DoeError> {
    lhs_sample_traced(spec, |_, _| {})
}

/// Like [`lhs_sample`], calling `on_accept(points, min_distance)` after every
/// accepted maximin swap.
pub fn lhs_sample_traced<F>(spec: &DesignSpec, mut on_accept: F) -> Result<Design, DoeError>
where
    F: FnMut(&[[f64; DIM]], f64),
{
    spec.validate()?;
    let n = spec.n_samples;
    let mut points = latin_points(spec);
    let mut maximin = Maximin::new(&points);
    let initial = maximin.min_distance();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(STREAM_MAXIMIN);
    let mut accepted = 0;
    for _ in 0..spec.maximin_iterations {
        let (a, b) = maximin.critical_pair();
        let i = if rng.random_bool(0.5) { a } else { b };
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = rng.random_range(0..DIM);
        if maximin.try_swap(&mut points, i, j, c) {
            accepted += 1;
            on_accept(&points, maximin.min_distance());
        }
    }
    Ok(Design {
        spec: spec.clone(),
        provenance: Provenance {
            seed: spec.seed,
            iterations: spec.maximin_iterations,
            accepted_swaps: accepted,
            initial_min_distance: initial,
            min_distance: maximin.min_distance(),
        },
        unit: points,
    })
}

/// Plain random Latin design in unit coordinates, before any maximin pass.
fn latin_points(spec: &DesignSpec) -> Vec<[f64; DIM]> {
    let n = spec.n_samples;
    let mut perm_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    perm_rng.set_stream(STREAM_PERMUTATION);
    let mut jitter_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    jitter_rng.set_stream(STREAM_JITTER);
    let bounds = spec.bounds();
    let mut points = vec![[0.0; DIM]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for c in 0..DIM {
        strata.shuffle(&mut perm_rng);
        for (row, &k) in strata.iter().enumerate() {
            let jitter: f64 = Open01.sample(&mut jitter_rng);
            let mut u = (k as f64 + jitter) / n as f64;
            // Rounding in the physical mapping must not push a point into the
            // neighbouring stratum.
            if spec.stratum(c, to_physical(bounds[c], u)) != k {
                u = (k as f64 + 0.5) / n as f64;
            }
            points[row][c] = u;
        }
    }
    points
}

#[inline]
fn to_physical((lo, hi): (f64, f64), u: f64) -> f64 {
    lo + u * (hi - lo)
}

#[inline]
fn dist2(a: &[f64; DIM], b: &[f64; DIM]) -> f64 {
    let mut s = 0.0;
    for c in 0..DIM {
        let d = a[c] - b[c];
        s += d * d;
    }
    s
}

/// Nearest-neighbour bookkeeping for the swap search. Distances are squared.
struct Maximin {
    nn: Vec<(f64, usize)>,
    scratch_i: Vec<f64>,
    scratch_j: Vec<f64>,
}

impl Maximin {
    fn new(points: &[[f64; DIM]]) -> Maximin {
        let nn = (0..points.len())
            .into_par_iter()
            .map(|k| nearest(points, k, &[]))
            .collect();
        Maximin {
            nn,
            scratch_i: vec![0.0; points.len()],
            scratch_j: vec![0.0; points.len()],
        }
    }

    fn critical(&self) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for (k, &(d, _)) in self.nn.iter().enumerate() {
            if d < best.0 {
                best = (d, k);
            }
        }
        best
    }

    fn critical_pair(&self) -> (usize, usize) {
        let (_, k) = self.critical();
        (k, self.nn[k].1)
    }

    fn min_distance(&self) -> f64 {
        self.critical().0.sqrt()
    }

    /// Swaps coordinate `c` of rows `i` and `j` if that strictly increases the
    /// minimum pairwise distance.
    fn try_swap(&mut self, points: &mut [[f64; DIM]], i: usize, j: usize, c: usize) -> bool {
        let old = self.critical().0;
        let mut pi = points[i];
        let mut pj = points[j];
        std::mem::swap(&mut pi[c], &mut pj[c]);
        if dist2(&pi, &pj) <= old {
            return false;
        }
        for (k, p) in points.iter().enumerate() {
            if k == i || k == j {
                continue;
            }
            let di = dist2(&pi, p);
            let dj = dist2(&pj, p);
            if di <= old || dj <= old {
                return false;
            }
            self.scratch_i[k] = di;
            self.scratch_j[k] = dj;
        }
        // Pairs not involving i or j keep their distances; reject on a tie at
        // the current minimum.
        for k in 0..points.len() {
            if k == i || k == j || self.nn[k].0 > old {
                continue;
            }
            let other = self.nn[k].1;
            if other != i && other != j {
                return false;
            }
            if nearest(points, k, &[i, j]).0 <= old {
                return false;
            }
        }

        points[i] = pi;
        points[j] = pj;
        let mut stale = Vec::new();
        for k in 0..points.len() {
            if k == i || k == j {
                continue;
            }
            let (d, other) = self.nn[k];
            if other == i || other == j {
                stale.push(k);
                continue;
            }
            let (di, dj) = (self.scratch_i[k], self.scratch_j[k]);
            if di < d && di <= dj {
                self.nn[k] = (di, i);
            } else if dj < d {
                self.nn[k] = (dj, j);
            }
        }
        for k in stale {
            self.nn[k] = nearest(points, k, &[]);
        }
        self.nn[i] = nearest(points, i, &[]);
        self.nn[j] = nearest(points, j, &[]);
        true
    }
}

/// Nearest neighbour of row `k`, ignoring rows listed in `skip`.
fn nearest(points: &[[f64; DIM]], k: usize, skip: &[usize]) -> (f64, usize) {
    let mut best = (f64::INFINITY, usize::MAX);
    for (m, p) in points.iter().enumerate() {
        if m == k || skip.contains(&m) {
            continue;
        }
        let d = dist2(&points[k], p);
        if d < best.0 {
            best = (d, m);
        }
    }
    best
}

/// Minimum pairwise Euclidean distance by exhaustive comparison.
pub fn min_pairwise_distance(points: &[[f64; DIM]]) -> f64 {
    let mut best = f64::INFINITY;
    for (a, p) in points.iter().enumerate() {
        for q in &points[a + 1..] {
            best = best.min(dist2(p, q));
        }
    }
    best.sqrt()
}

/// Design rows in external units (ft, kt, deg), in design order.
pub fn scenario_rows(design: &Design) -> Vec<Scenario> {
    let bounds = design.spec.bounds();
    design
        .unit
        .iter()
        .map(|u| Scenario::from_array(std::array::from_fn(|c| to_physical(bounds[c], u[c]))))
        .collect()
}

pub const DESIGN_CSV_HEADER: [&str; DIM] = Scenario::FIELDS;

pub fn write_design_csv<W: Write>(rows: &[Scenario], w: W) -> Result<(), DoeError> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    let io = |e: csv::Error| DoeError::Csv {
        line: 0,
        message: e.to_string(),
    };
    for row in rows {
        out.serialize(row).map_err(io)?;
    }
    if rows.is_empty() {
        out.write_record(DESIGN_CSV_HEADER).map_err(io)?;
    }
    out.flush().map_err(|e| DoeError::Csv {
        line: 0,
        message: e.to_string(),
    })
}

pub fn read_design_csv<R: Read>(r: R) -> Result<Vec<Scenario>, DoeError> {
    let mut reader = csv::Reader::from_reader(r);
    let headers = reader.headers().map_err(csv_error)?.clone();
    if headers.iter().ne(DESIGN_CSV_HEADER) {
        return Err(DoeError::Csv {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                DESIGN_CSV_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut rows = Vec::new();
    for rec in reader.deserialize::<Scenario>() {
        let s = rec.map_err(csv_error)?;
        rows.push(s);
    }
    Ok(rows)
}

fn csv_error(e: csv::Error) -> DoeError {
    DoeError::Csv {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}

pub fn save_design(rows: &[Scenario], path: &Path) -> Result<(), DoeError> {
    let file = std::fs::File::create(path).map_err(|source| DoeError::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_design_csv(rows, std::io::BufWriter::new(file))
}

pub fn load_design(path: &Path) -> Result<Vec<Scenario>, DoeError> {
    let file = std::fs::File::open(path).map_err(|source| DoeError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_design_csv(std::io::BufReader::new(file))
}
