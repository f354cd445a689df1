//! Five-parameter logistic mapping from objective to subjective scores,
//! fitted by least squares with a Nelder-Mead simplex.
//!
//! ```text
//! f(x) = b1 (1/2 - 1 / (1 + exp(b2 (x - b3)))) + b4 x + b5
//! ```

use crate::error::{Error, Result};
use crate::eval::stats::{mean, median, pearson_sign, std_dev};

/// Iteration budget shared by all simplex restarts.
pub const MAX_ITERATIONS: usize = 20_000;
/// Multipliers applied to the initial slope `4 / std(objective)`.
const SLOPE_SCALES: [f64; 3] = [1.0, 0.25, 0.0625];
/// Relative simplex-diameter tolerance.
pub const DIAMETER_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogisticParams {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub b5: f64,
}

impl LogisticParams {
    pub fn from_array(b: [f64; 5]) -> Self {
        Self {
            b1: b[0],
            b2: b[1],
            b3: b[2],
            b4: b[3],
            b5: b[4],
        }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.b1, self.b2, self.b3, self.b4, self.b5]
    }

    pub fn eval(&self, x: f64) -> f64 {
        logistic5(&self.to_array(), x)
    }

    pub fn apply(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}

#[inline]
fn logistic5(b: &[f64; 5], x: f64) -> f64 {
    b[0] * (0.5 - 1.0 / (1.0 + (b[1] * (x - b[2])).exp())) + b[3] * x + b[4]
}

/// Outcome of [`fit_logistic5`].
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticFit {
    pub params: LogisticParams,
    /// RMSE of the starting point.
    pub initial_rmse: f64,
    /// RMSE of the returned parameters.
    pub rmse: f64,
    pub iterations: usize,
    /// False when the iteration budget ran out first; `params` is then the
    /// best point seen.
    pub converged: bool,
}

/// Minimum number of points accepted by [`fit_logistic5`].
pub const MIN_POINTS: usize = 5;

/// Fits the logistic so that `f(objective)` approximates `subjective`.
pub fn fit_logistic5(objective: &[f64], subjective: &[f64]) -> Result<LogisticFit> {
    if objective.len() != subjective.len() {
        return Err(Error::InvalidParameter(format!(
            "length mismatch: {} vs {}",
            objective.len(),
            subjective.len()
        )));
    }
    if objective.len() < MIN_POINTS {
        return Err(Error::InvalidParameter(format!(
            "logistic fit needs at least {MIN_POINTS} points, got {}",
            objective.len()
        )));
    }
    if objective.iter().chain(subjective).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("fit inputs must be finite".into()));
    }
    let obj_std = std_dev(objective);
    if obj_std == 0.0 {
        return Err(Error::Degenerate(
            "objective scores have zero variance".into(),
        ));
    }

    let (s_min, s_max) = subjective
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let s_range = s_max - s_min;
    let s_mean = mean(subjective);
    let start = [
        s_range * pearson_sign(objective, subjective),
        4.0 / obj_std,
        median(objective),
        0.0,
        s_mean,
    ];
    let s_scale = if s_range > 0.0 {
        s_range
    } else {
        s_mean.abs().max(1.0)
    };
    let steps = [
        0.1 * s_scale,
        0.1 * start[1],
        0.1 * obj_std,
        0.1 * s_scale / obj_std,
        0.1 * s_scale,
    ];

    let n = objective.len() as f64;
    let sse = |b: &[f64; 5]| -> f64 {
        let v: f64 = objective
            .iter()
            .zip(subjective)
            .map(|(&x, &y)| {
                let r = logistic5(b, x) - y;
                r * r
            })
            .sum();
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let initial_rmse = (sse(&start) / n).sqrt();
    // The prescribed start comes first; gentler slopes follow because the
    // least-squares surface has separate basins for steep and shallow
    // sigmoids. Each start gets an equal share of the iteration budget.
    let mut outcome: Option<Minimum> = None;
    let mut used = 0;
    let mut converged = true;
    for slope_scale in SLOPE_SCALES {
        let mut s = start;
        s[1] *= slope_scale;
        let mut st = steps;
        st[1] *= slope_scale;
        let run = minimize(&sse, s, st, MAX_ITERATIONS / SLOPE_SCALES.len());
        used += run.iterations;
        converged &= run.converged;
        if outcome.as_ref().is_none_or(|o| run.value < o.value) {
            outcome = Some(run);
        }
    }
    let mut outcome = outcome.unwrap();
    outcome.iterations = used;
    outcome.converged = converged;
    Ok(LogisticFit {
        params: LogisticParams::from_array(outcome.best),
        initial_rmse,
        rmse: (outcome.value / n).sqrt(),
        iterations: outcome.iterations,
        converged: outcome.converged,
    })
}

struct Minimum {
    best: [f64; 5],
    value: f64,
    iterations: usize,
    converged: bool,
}

/// Repeated Nelder-Mead: after each converged run the simplex is rebuilt
/// around the best vertex, until a run brings no improvement or the shared
/// budget is spent.
fn minimize(
    f: &impl Fn(&[f64; 5]) -> f64,
    start: [f64; 5],
    steps: [f64; 5],
    budget: usize,
) -> Minimum {
    let mut best = start;
    let mut value = f(&start);
    let mut used = 0;
    loop {
        let run = nelder_mead(f, best, steps, budget - used);
        used += run.iterations;
        let improved = run.value < value;
        if run.value <= value {
            best = run.best;
            value = run.value;
        }
        if !run.converged || used >= budget {
            return Minimum {
                best,
                value,
                iterations: used,
                converged: run.converged,
            };
        }
        if !improved || value == 0.0 {
            return Minimum {
                best,
                value,
                iterations: used,
                converged: true,
            };
        }
    }
}

const DIM: usize = 5;

fn nelder_mead(
    f: &impl Fn(&[f64; 5]) -> f64,
    start: [f64; 5],
    steps: [f64; 5],
    budget: usize,
) -> Minimum {
    // Dimension-adapted coefficients (Gao & Han).
    let n = DIM as f64;
    let (reflect, expand) = (1.0, 1.0 + 2.0 / n);
    let (contract, shrink) = (0.75 - 1.0 / (2.0 * n), 1.0 - 1.0 / n);

    let mut simplex: Vec<([f64; 5], f64)> = Vec::with_capacity(DIM + 1);
    simplex.push((start, f(&start)));
    for k in 0..DIM {
        let mut v = start;
        v[k] += if steps[k] != 0.0 { steps[k] } else { 1e-3 };
        simplex.push((v, f(&v)));
    }

    let mut iterations = 0;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].0;
        let scale = 1.0 + best.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(&best).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        if diameter < DIAMETER_TOL * scale {
            return Minimum {
                best,
                value: simplex[0].1,
                iterations,
                converged: true,
            };
        }
        if iterations >= budget {
            return Minimum {
                best,
                value: simplex[0].1,
                iterations,
                converged: false,
            };
        }
        iterations += 1;

        let mut centroid = [0.0; DIM];
        for (v, _) in &simplex[..DIM] {
            for k in 0..DIM {
                centroid[k] += v[k] / n;
            }
        }
        let along = |t: f64| -> [f64; 5] {
            let worst = &simplex[DIM].0;
            std::array::from_fn(|k| centroid[k] + t * (worst[k] - centroid[k]))
        };

        let xr = along(-reflect);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(-reflect * expand);
            let fe = f(&xe);
            simplex[DIM] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[DIM - 1].1 {
            simplex[DIM] = (xr, fr);
            continue;
        }
        // Contraction: outside if the reflected point beat the worst vertex.
        let (xc, fc) = if fr < simplex[DIM].1 {
            let x = along(-reflect * contract);
            let v = f(&x);
            (x, v)
        } else {
            let x = along(contract);
            let v = f(&x);
            (x, v)
        };
        if fc < simplex[DIM].1.min(fr) {
            simplex[DIM] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0;
        for (v, fv) in simplex[1..].iter_mut() {
            *v = std::array::from_fn(|k| anchor[k] + shrink * (v[k] - anchor[k]));
            *fv = f(v);
        }
    }
}
