//! Exact ratio curves, Monte-Carlo execution of profiles and CSV reports.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::profile::{realized_cost, Profile, Ratio};
use crate::scalar::Scalar;

/// Generator recorded in Monte-Carlo reports.
pub const RNG_NAME: &str = "ChaCha8Rng";

/// Samples per RNG stream. Chunk `n` draws from stream `n` of the seeded
/// generator, so results do not depend on the thread count.
pub const MC_CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McStats<T> {
    pub samples: usize,
    pub mean: Vec<T>,
    pub stderr: Vec<T>,
    pub rng: &'static str,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport<T> {
    pub grid: Vec<T>,
    pub opt: Vec<T>,
    pub exact_cost: Vec<T>,
    pub exact_ratio: Vec<Ratio<T>>,
    /// Largest finite ratio on the grid, `None` if every entry is flagged.
    pub max_ratio: Option<T>,
    pub argmax: Option<T>,
    pub mc: Option<McStats<T>>,
    pub checks: Vec<Check>,
}

impl<T: Scalar> SimReport<T> {
    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check_grid<T: Scalar>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain("grid is empty".into()));
    }
    if grid.iter().any(|t| !t.is_finite() || *t < T::zero()) {
        return Err(Error::Domain("grid times must be finite and nonnegative".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("grid is not sorted".into()));
    }
    Ok(())
}

pub fn run_exact<T: Scalar>(profile: &Profile<T>, grid: &[T]) -> Result<SimReport<T>> {
    check_grid(grid)?;
    let inst = profile.instance();
    let opt = grid.iter().map(|&t| inst.opt_cost(t)).collect::<Result<Vec<_>>>()?;
    let exact_cost = grid.iter().map(|&t| profile.total_cost(t)).collect::<Result<Vec<_>>>()?;
    let exact_ratio = grid.iter().map(|&t| profile.ratio(t)).collect::<Result<Vec<_>>>()?;

    let mut max_ratio = None;
    let mut argmax = None;
    for (&t, r) in grid.iter().zip(&exact_ratio) {
        if let Ratio::Finite(v) = *r {
            if max_ratio.is_none_or(|m| v > m) {
                max_ratio = Some(v);
                argmax = Some(t);
            }
        }
    }

    let tol = T::snap();
    let buys = grid.iter().map(|&t| profile.buy_cost(t)).collect::<Result<Vec<_>>>()?;
    let rents = grid.iter().map(|&t| profile.rent_rate(t)).collect::<Result<Vec<_>>>()?;
    let scale = |v: T| tol * v.abs().max(T::one());
    let mut checks = vec![
        Check {
            name: "structure".into(),
            passed: profile.validate_structure().passed(),
        },
        Check {
            name: "buy-cost-nondecreasing".into(),
            passed: buys.windows(2).all(|w| w[1] >= w[0] - scale(w[0])),
        },
        Check {
            name: "rent-rate-nonincreasing".into(),
            passed: rents.windows(2).all(|w| w[1] <= w[0] + scale(w[0])),
        },
    ];
    if profile.is_prudent_layout() {
        checks.push(Check {
            name: "prudent".into(),
            passed: profile.validate_prudent().passed(),
        });
    }

    Ok(SimReport {
        grid: grid.to_vec(),
        opt,
        exact_cost,
        exact_ratio,
        max_ratio,
        argmax,
        mc: None,
        checks,
    })
}

#[derive(Debug, Clone)]
struct Sums {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl Sums {
    fn new(n: usize) -> Self {
        Sums {
            sum: vec![0.0; n],
            sum_sq: vec![0.0; n],
        }
    }

    fn add_draw<T: Scalar>(&mut self, inst: &Instance<T>, profile: &Profile<T>, grid: &[T], u: T) -> Result<()> {
        let times = profile.sample_strategy(u)?;
        for (m, &t) in grid.iter().enumerate() {
            let c = realized_cost(inst, &times, t)?.as_f64();
            self.sum[m] += c;
            self.sum_sq[m] += c * c;
        }
        Ok(())
    }

    fn merge(mut self, other: &Sums) -> Sums {
        for m in 0..self.sum.len() {
            self.sum[m] += other.sum[m];
            self.sum_sq[m] += other.sum_sq[m];
        }
        self
    }

    fn finish<T: Scalar>(&self, samples: usize, seed: u64) -> McStats<T> {
        let n = samples as f64;
        let mut mean = Vec::with_capacity(self.sum.len());
        let mut stderr = Vec::with_capacity(self.sum.len());
        for m in 0..self.sum.len() {
            let mu = self.sum[m] / n;
            let var = if samples > 1 {
                ((self.sum_sq[m] - n * mu * mu) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            mean.push(T::lit(mu));
            stderr.push(T::lit((var / n).sqrt()));
        }
        McStats {
            samples,
            mean,
            stderr,
            rng: RNG_NAME,
            seed,
        }
    }
}

fn open_unit<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    loop {
        let u = T::lit(rng.gen::<f64>());
        if u > T::zero() && u < T::one() {
            return u;
        }
    }
}

/// Exact report plus the empirical mean and standard error of the realized
/// cost at every grid time, over `samples` independent uniform draws.
pub fn run_monte_carlo<T: Scalar>(
    profile: &Profile<T>,
    grid: &[T],
    samples: usize,
    seed: u64,
) -> Result<SimReport<T>> {
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let mut report = run_exact(profile, grid)?;
    let inst = profile.instance();
    let chunks = samples.div_ceil(MC_CHUNK);
    let partial: Vec<Sums> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut sums = Sums::new(grid.len());
            for _ in 0..n {
                sums.add_draw(inst, profile, grid, open_unit(&mut rng))?;
            }
            Ok(sums)
        })
        .collect::<Result<Vec<_>>>()?;
    let total = partial.iter().fold(Sums::new(grid.len()), |acc, s| acc.merge(s));
    report.mc = Some(total.finish(samples, seed));
    Ok(report)
}

/// Monte-Carlo statistics from caller-supplied uniform draws.
pub fn monte_carlo_from_draws<T: Scalar>(profile: &Profile<T>, grid: &[T], draws: &[T]) -> Result<McStats<T>> {
    check_grid(grid)?;
    if draws.is_empty() {
        return Err(Error::Domain("need at least one draw".into()));
    }
    let mut sums = Sums::new(grid.len());
    for &u in draws {
        sums.add_draw(profile.instance(), profile, grid, u)?;
    }
    let mut stats = sums.finish(draws.len(), 0);
    stats.rng = "supplied";
    Ok(stats)
}

/// `{0}`, every `s_i` and every finite `extra` point, with
/// `points_per_interval` uniform points in each gap and a tail out to three
/// times the last breakpoint (to 10 for a single slope).
pub fn default_grid<T: Scalar>(inst: &Instance<T>, points_per_interval: usize, extra: &[T]) -> Result<Vec<T>> {
    if points_per_interval < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 points per interval, got {points_per_interval}"
        )));
    }
    let mut knots: Vec<T> = inst.intersections().to_vec();
    knots.extend(extra.iter().copied().filter(|t| t.is_finite() && *t >= T::zero()));
    knots.push(T::zero());
    crate::profile::sort_dedup(&mut knots);
    let last = *knots.last().expect("contains 0");
    let end = if inst.k() == 0 {
        T::lit(10.0).max(last * T::lit(3.0))
    } else if last > T::zero() {
        last * T::lit(3.0)
    } else {
        T::one()
    };
    knots.push(end);

    let n = points_per_interval;
    let mut grid = Vec::with_capacity(knots.len() * n);
    for w in knots.windows(2) {
        for m in 0..n {
            grid.push(w[0] + (w[1] - w[0]) * T::lit(m as f64 / n as f64));
        }
    }
    grid.extend(knots);
    crate::profile::sort_dedup(&mut grid);
    Ok(grid)
}

/// Formats a number with 12 significant digits; `inf`, `-inf` and `nan`
/// for non-finite values.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
        format!("{rounded:?}")
    }
}

pub const CSV_HEADER: &str = "t,opt,exact_cost,ratio,mc_mean,mc_stderr";

/// One row per grid time; MC columns are empty without Monte-Carlo data.
pub fn to_csv<T: Scalar>(report: &SimReport<T>) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for m in 0..report.grid.len() {
        let ratio = match report.exact_ratio[m] {
            Ratio::Finite(v) => fmt_num(v.as_f64()),
            Ratio::Infinite => "inf".into(),
        };
        let (mean, se) = match &report.mc {
            Some(mc) => (fmt_num(mc.mean[m].as_f64()), fmt_num(mc.stderr[m].as_f64())),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_num(report.grid[m].as_f64()),
            fmt_num(report.opt[m].as_f64()),
            fmt_num(report.exact_cost[m].as_f64()),
            ratio,
            mean,
            se
        );
    }
    out
}
