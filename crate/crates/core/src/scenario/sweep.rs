use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::file::{RunError, ScenarioError, ScenarioFile};
use crate::controller::{ControllerRegistry, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "H")]
    H,
    #[serde(rename = "alpha")]
    Alpha,
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "m")]
    NoiseM,
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "H" | "h" => Ok(Axis::H),
            "alpha" => Ok(Axis::Alpha),
            "beta" => Ok(Axis::Beta),
            "m" | "noise-m" => Ok(Axis::NoiseM),
            _ => Err(format!("unknown sweep axis {s:?}; known: H, alpha, beta, m")),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::H => "H",
            Axis::Alpha => "alpha",
            Axis::Beta => "beta",
            Axis::NoiseM => "m",
        })
    }
}

/// Parses a comma-separated grid; `nominal` is accepted on the weight axes.
pub fn parse_grid(axis: Axis, text: &str) -> Result<Vec<Weight>, String> {
    let grid: Vec<Weight> = text.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>()?;
    if grid.is_empty() {
        return Err("empty grid".into());
    }
    if grid.contains(&Weight::Nominal) && !matches!(axis, Axis::Alpha | Axis::Beta) {
        return Err(format!("`nominal` is only meaningful on the alpha and beta axes, not {axis}"));
    }
    Ok(grid)
}

/// One simulation of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub point: usize,
    pub seed: u64,
    pub j_t: f64,
    pub events: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Grid value; for the nominal point, the mean nominal weight over targets.
    pub value: f64,
    pub nominal: bool,
    pub mean: f64,
    /// Sample variance (denominator `runs − 1`; zero for a single run).
    pub variance: f64,
    pub runs: usize,
    /// `mean / min mean` over the grid.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub axis: Axis,
    pub seeds: Vec<u64>,
    pub rows: Vec<SweepRow>,
    /// Row with the smallest mean.
    pub argmin: usize,
    /// For `H` sweeps: mean cost at `H = T/2`, run separately when the grid omits it.
    pub half_mission: Option<f64>,
    /// For `H` sweeps: `J_T(T/2) / min_H J_T`.
    pub half_mission_ratio: Option<f64>,
    pub records: Vec<RunRecord>,
}

fn nominal_value(file: &ScenarioFile, axis: Axis) -> Result<f64, ScenarioError> {
    let g = file.graph()?;
    let m = g.len().max(1) as f64;
    let sum: f64 = (0..g.len())
        .map(|i| {
            let size = (g.neighbors(i).len() + 1) as f64;
            if axis == Axis::Alpha {
                1.0 / (size * size)
            } else {
                1.0 / size
            }
        })
        .sum();
    Ok(sum / m)
}

fn apply(file: &ScenarioFile, axis: Axis, point: Weight, seed: u64) -> ScenarioFile {
    let mut f = file.clone();
    f.seed = seed;
    match (axis, point) {
        (Axis::H, w) => f.controller.h = Some(w.resolve(f64::NAN)),
        (Axis::Alpha, w) => f.controller.alpha = w,
        (Axis::Beta, w) => f.controller.beta = w,
        (Axis::NoiseM, w) => f.noise.m = w.resolve(f64::NAN),
    }
    f
}

/// Mean and sample variance.
pub fn mean_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var)
}

/// Runs every grid point with every seed, in parallel on `threads` workers (all cores when
/// `None`). Rows are sorted by value; records are ordered by row, then seed.
pub fn sweep(
    file: &ScenarioFile,
    registry: &ControllerRegistry,
    axis: Axis,
    grid: &[Weight],
    seeds: &[u64],
    threads: Option<usize>,
) -> Result<SweepReport, RunError> {
    if grid.is_empty() || seeds.is_empty() {
        return Err(ScenarioError::Generate("a sweep needs at least one grid point and one seed".into()).into());
    }
    file.validate()?;
    let nominal = if grid.contains(&Weight::Nominal) { nominal_value(file, axis)? } else { f64::NAN };
    let mut points: Vec<(f64, Weight)> = grid.iter().map(|&w| (w.resolve(nominal), w)).collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let half = file.t_end / 2.0;
    let extra = axis == Axis::H && !points.iter().any(|p| p.0 == half);
    let mut jobs: Vec<(usize, Weight, u64)> = Vec::new();
    for (k, &(_, w)) in points.iter().enumerate() {
        jobs.extend(seeds.iter().map(|&s| (k, w, s)));
    }
    if extra {
        jobs.extend(seeds.iter().map(|&s| (points.len(), Weight::Fixed(half), s)));
    }
    let work = || {
        jobs.par_iter()
            .map(|&(k, w, s)| {
                let res = apply(file, axis, w, s).run(registry)?;
                Ok(RunRecord { point: k, seed: s, j_t: res.j_t, events: res.events.len() })
            })
            .collect::<Result<Vec<_>, RunError>>()
    };
    let all = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ScenarioError::Generate(format!("cannot start {n} workers: {e}")))?
            .install(work)?,
        None => work()?,
    };
    Ok(summarize(axis, seeds, &points, all, half))
}

/// Builds the report from per-run records. `points` are `(value, weight)` in row order. For `H`
/// sweeps `half` is `T/2`; records with `point == points.len()` are separate runs at that value.
pub fn summarize(axis: Axis, seeds: &[u64], points: &[(f64, Weight)], all: Vec<RunRecord>, half: f64) -> SweepReport {
    let stats = |k: usize| {
        let xs: Vec<f64> = all.iter().filter(|r| r.point == k).map(|r| r.j_t).collect();
        let (mean, var) = mean_variance(&xs);
        (mean, var, xs.len())
    };
    let mut rows: Vec<SweepRow> = points
        .iter()
        .enumerate()
        .map(|(k, &(value, w))| {
            let (mean, variance, runs) = stats(k);
            SweepRow { value, nominal: w == Weight::Nominal, mean, variance, runs, ratio: f64::NAN }
        })
        .collect();
    let argmin = (0..rows.len()).min_by(|&a, &b| rows[a].mean.total_cmp(&rows[b].mean)).unwrap_or(0);
    let best = rows[argmin].mean;
    for r in &mut rows {
        r.ratio = r.mean / best;
    }
    let (half_mission, half_mission_ratio) = if axis == Axis::H {
        let h = match points.iter().position(|p| p.0 == half) {
            Some(k) => rows[k].mean,
            None => stats(points.len()).0,
        };
        (Some(h), Some(h / best.min(h)))
    } else {
        (None, None)
    };
    let records = all.into_iter().filter(|r| r.point < points.len()).collect();
    SweepReport { axis, seeds: seeds.to_vec(), rows, argmin, half_mission, half_mission_ratio, records }
}

impl SweepReport {
    /// CSV table: one row per grid point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{},nominal,mean,variance,runs,ratio,argmin", self.axis)?;
        for (k, r) in self.rows.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.value,
                r.nominal,
                r.mean,
                r.variance,
                r.runs,
                r.ratio,
                k == self.argmin
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(point: usize, seed: u64, j_t: f64) -> RunRecord {
        RunRecord { point, seed, j_t, events: 0 }
    }

    #[test]
    fn statistics_and_ratio() {
        let points = [(10.0, Weight::Fixed(10.0)), (50.0, Weight::Fixed(50.0))];
        let all = vec![rec(0, 1, 4.0), rec(0, 2, 6.0), rec(1, 1, 2.0), rec(1, 2, 2.0), rec(2, 1, 2.2), rec(2, 2, 2.2)];
        let r = summarize(Axis::H, &[1, 2], &points, all, 250.0);
        assert_eq!((r.rows[0].mean, r.rows[0].variance, r.rows[0].runs), (5.0, 2.0, 2));
        assert_eq!(r.argmin, 1);
        assert_eq!(r.rows[0].ratio, 2.5);
        assert_eq!(r.half_mission, Some(2.2));
        assert!((r.half_mission_ratio.unwrap() - 1.1).abs() < 1e-12);
        assert_eq!(r.records.len(), 4);
        let mut out = Vec::new();
        r.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().next().unwrap(), "H,nominal,mean,variance,runs,ratio,argmin");
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid(Axis::Alpha, "0, nominal,0.5").unwrap().len(), 3);
        assert!(parse_grid(Axis::H, "10,nominal").is_err());
        assert!(parse_grid(Axis::H, "10,x").is_err());
        assert_eq!("noise-m".parse::<Axis>().unwrap(), Axis::NoiseM);
        assert!("gamma".parse::<Axis>().is_err());
    }
}
