//! Schedule representations and the constant-speed schedule builder.
//!
//! A schedule is a monotone map from normalized time `tau` in [0,1] to the
//! interpolation parameter `s` in [0,1]. Three variants cover everything the
//! experiments need: the linear baseline, the closed-form optimal schedule
//! for the Grover family, and tabulated point sets interpolated with a
//! monotone piecewise cubic (Fritsch-Carlson), which is how schedules built
//! from measured overlaps are represented.

mod builder;

pub use builder::{
    build_constant_speed, total_cost_report, BuildOutput, BuilderConfig, CostReport,
    SchedulePoint, SchedulePoints,
};

use crate::error::{Error, Result};

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
///
/// Given monotone data it produces a C^1 monotone interpolant; with two
/// points it degenerates to the straight line through them.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Builds the interpolant. `xs` must be strictly increasing and `ys`
    /// non-decreasing (each violation is reported with its index).
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::DimensionMismatch {
                context: "interpolation abscissae vs ordinates",
                got: ys.len(),
                expected: xs.len(),
            });
        }
        if xs.len() < 2 {
            return Err(Error::DimensionMismatch {
                context: "interpolation needs at least two points",
                got: xs.len(),
                expected: 2,
            });
        }
        for i in 1..xs.len() {
            if xs[i] <= xs[i - 1] {
                return Err(Error::NonMonotoneData {
                    index: i,
                    x: xs[i],
                    y: ys[i],
                });
            }
            if ys[i] < ys[i - 1] {
                return Err(Error::NonMonotoneData {
                    index: i,
                    x: xs[i],
                    y: ys[i],
                });
            }
        }
        let slopes = fritsch_carlson_slopes(&xs, &ys);
        Ok(Self { xs, ys, slopes })
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ys)
    }

    fn interval_of(&self, x: f64) -> usize {
        // partition_point returns the first node > x; the interval is one left.
        let idx = self.xs.partition_point(|&t| t <= x);
        idx.clamp(1, self.xs.len() - 1) - 1
    }

    /// Evaluates the interpolant; clamps outside the node range.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= *self.xs.last().unwrap() {
            return *self.ys.last().unwrap();
        }
        let i = self.interval_of(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    }

    /// Analytic derivative of the interpolant (zero outside the node range).
    pub fn derivative(&self, x: f64) -> f64 {
        if x < self.xs[0] || x > *self.xs.last().unwrap() {
            return 0.0;
        }
        let i = self.interval_of(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let t2 = t * t;
        let dh00 = (6.0 * t2 - 6.0 * t) / h;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = (-6.0 * t2 + 6.0 * t) / h;
        let dh11 = 3.0 * t2 - 2.0 * t;
        dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1
    }
}

/// Fritsch-Carlson node slopes: weighted harmonic mean of adjacent secants
/// in the interior (zero across sign changes / flat spans), shape-limited
/// three-point formula at the ends. Invariant under affine rescaling of the
/// abscissae, which is what lets physical-time tables double as normalized
/// ones.
fn fritsch_carlson_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = (0..n - 1).map(|i| xs[i + 1] - xs[i]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut d = vec![0.0f64; n];
    for i in 1..n - 1 {
        let (d1, d2) = (delta[i - 1], delta[i]);
        if d1 == 0.0 || d2 == 0.0 || (d1 > 0.0) != (d2 > 0.0) {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / d1 + w2 / d2);
        }
    }
    d[0] = endpoint_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = endpoint_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn endpoint_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// A monotone map tau in [0,1] -> s in [0,1] with s(0)=0 and s(1)=1.
#[derive(Debug, Clone)]
pub enum Schedule {
    /// s(tau) = tau.
    Linear,
    /// The closed-form optimal schedule for the N-item Grover family.
    GroverOptimal { n_items: u64 },
    /// Monotone-cubic interpolation through a point table.
    Tabulated { interpolant: MonotoneCubic },
}

/// The linear baseline schedule.
pub fn linear() -> Schedule {
    Schedule::Linear
}

/// The analytic schedule that moves the Grover eigenstate at constant speed:
/// `s(tau) = 1/2 + tan((2 tau - 1) atan(sqrt(N-1))) / (2 sqrt(N-1))`.
pub fn grover_optimal(n_items: u64) -> Result<Schedule> {
    if n_items < 2 {
        return Err(Error::OutOfDomain {
            context: "Grover item count N (need N >= 2)",
            value: n_items as f64,
        });
    }
    Ok(Schedule::GroverOptimal { n_items })
}

/// Monotone-cubic schedule through `(tau_j, s_j)` points; endpoints must be
/// (0,0) and (1,1).
pub fn interpolate_monotone(points: &[(f64, f64)]) -> Result<Schedule> {
    let first = points.first().ok_or(Error::DimensionMismatch {
        context: "interpolation needs at least two points",
        got: 0,
        expected: 2,
    })?;
    let last = points.last().unwrap();
    let endpoint_tol = 1e-12;
    if first.0.abs() > endpoint_tol || first.1.abs() > endpoint_tol {
        return Err(Error::NonMonotoneData {
            index: 0,
            x: first.0,
            y: first.1,
        });
    }
    if (last.0 - 1.0).abs() > endpoint_tol || (last.1 - 1.0).abs() > endpoint_tol {
        return Err(Error::NonMonotoneData {
            index: points.len() - 1,
            x: last.0,
            y: last.1,
        });
    }
    Schedule::from_raw_points(points)
}

impl Schedule {
    /// Internal constructor without endpoint requirements (used for
    /// partially built schedules during construction).
    pub(crate) fn from_raw_points(points: &[(f64, f64)]) -> Result<Schedule> {
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        Ok(Schedule::Tabulated {
            interpolant: MonotoneCubic::new(xs, ys)?,
        })
    }

    /// Evaluates s(tau); input is clamped to [0,1].
    pub fn s(&self, tau: f64) -> f64 {
        let tau = tau.clamp(0.0, 1.0);
        match self {
            Schedule::Linear => tau,
            Schedule::GroverOptimal { n_items } => {
                let root = ((*n_items as f64) - 1.0).sqrt();
                let a = root.atan();
                let s = 0.5 + ((2.0 * tau - 1.0) * a).tan() / (2.0 * root);
                s.clamp(0.0, 1.0)
            }
            Schedule::Tabulated { interpolant } => interpolant.eval(tau).clamp(0.0, 1.0),
        }
    }

    /// Evaluates ds/dtau.
    pub fn ds_dtau(&self, tau: f64) -> f64 {
        let tau = tau.clamp(0.0, 1.0);
        match self {
            Schedule::Linear => 1.0,
            Schedule::GroverOptimal { n_items } => {
                let root = ((*n_items as f64) - 1.0).sqrt();
                let a = root.atan();
                let t = ((2.0 * tau - 1.0) * a).tan();
                a * (1.0 + t * t) / root
            }
            Schedule::Tabulated { interpolant } => interpolant.derivative(tau),
        }
    }

    /// A short human-readable descriptor for report headers.
    pub fn kind_label(&self) -> String {
        match self {
            Schedule::Linear => "linear".to_string(),
            Schedule::GroverOptimal { n_items } => format!("grover-optimal(N={n_items})"),
            Schedule::Tabulated { interpolant } => {
                format!("tabulated({} points)", interpolant.nodes().0.len())
            }
        }
    }
}

/// Expected segment count `L / dl_t` for a path of length `L` walked in
/// steps of target length `dl_t`.
pub fn segment_count_estimate(path_length: f64, dl_target: f64) -> f64 {
    path_length / dl_target
}
