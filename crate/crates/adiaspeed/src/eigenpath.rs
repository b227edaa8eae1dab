//! Instantaneous-eigenstate path tracking and its geometry: segment
//! lengths, total arc length, speed, curvature, the schedule quality
//! functional, and the matrix-element heuristic for the required evolution
//! time.
//!
//! Conventions: a [`PathTable`] holds gauge-fixed eigenstates on a strictly
//! increasing `s` grid. The operations that mix a table with a schedule
//! (`curvature_and_qpp`, `c_functional`, `asp_time_estimate`) treat the
//! samples as the images `s(tau_k)` of a uniform normalized-time grid and
//! validate that assumption against the schedule they are given; build such
//! tables with [`schedule_s_grid`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonians::InterpolatedHamiltonian;
use crate::operators::{StateVector, DEGENERACY_THRESHOLD};
use crate::scheduler::{MonotoneCubic, Schedule};

/// One tracked point of the eigenstate path.
#[derive(Debug, Clone)]
pub struct PathSample {
    pub s: f64,
    pub energy: f64,
    /// Gauge-fixed tracked eigenstate.
    pub state: StateVector,
    /// Minimum distance from `energy` to the rest of the spectrum.
    pub gap: f64,
    pub excited_energy: f64,
    /// Lowest level of the orthogonal complement above the tracked one
    /// (wrapping to the level below when the tracked level is the top).
    pub excited_state: StateVector,
}

/// Gauge-fixed eigenstate path on a strictly increasing `s` grid spanning
/// `[0, 1]`.
#[derive(Debug, Clone)]
pub struct PathTable {
    samples: Vec<PathSample>,
}

impl PathTable {
    pub fn samples(&self) -> &[PathSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample(&self, k: usize) -> &PathSample {
        &self.samples[k]
    }

    /// Writes the scalar columns (`s,energy,gap,excited_energy`) as CSV.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "s,energy,gap,excited_energy")?;
        for p in &self.samples {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e}",
                p.s, p.energy, p.gap, p.excited_energy
            )?;
        }
        Ok(())
    }
}

/// A uniform grid of `n` values covering `[0, 1]`.
pub fn uniform_s_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs at least two points");
    (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
}

/// The `s` images of a uniform normalized-time grid under `sched` — the
/// grid convention expected by the schedule-aware geometry operations.
/// Endpoints are pinned to exactly 0 and 1: schedules satisfy `s(0) = 0`
/// and `s(1) = 1`, but closed-form ones can miss by a rounding error
/// (for example through `tan(arctan(x))`).
pub fn schedule_s_grid(sched: &Schedule, n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs at least two points");
    let mut grid: Vec<f64> = (0..n)
        .map(|k| sched.s(k as f64 / (n - 1) as f64))
        .collect();
    grid[0] = 0.0;
    grid[n - 1] = 1.0;
    grid
}

/// Follows the eigenstate that starts at sorted index `level` across the
/// grid by maximal overlap with the previous sample, fixing the gauge so
/// adjacent overlaps are real and nonnegative.
pub fn track_eigenstate(
    h: &InterpolatedHamiltonian,
    grid: &[f64],
    level: usize,
) -> Result<PathTable> {
    if grid.len() < 2 {
        return Err(Error::DimensionMismatch {
            context: "tracking grid (need at least two points)",
            got: grid.len(),
            expected: 2,
        });
    }
    if grid[0] != 0.0 || *grid.last().unwrap() != 1.0 {
        return Err(Error::OutOfDomain {
            context: "tracking grid must span [0, 1]",
            value: grid[0].max(*grid.last().unwrap() - 1.0),
        });
    }
    for w in grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::NonMonotoneData {
                index: 0,
                x: w[0],
                y: w[1],
            });
        }
    }
    if level >= h.dim() {
        return Err(Error::OutOfDomain {
            context: "tracked level index",
            value: level as f64,
        });
    }

    let mut samples = Vec::with_capacity(grid.len());
    let mut prev_state: Option<StateVector> = None;
    for &s in grid {
        let dec = h.at(s)?.eig();
        let k = match &prev_state {
            None => level,
            Some(prev) => {
                let v = dec.eigenvector_matrix();
                (0..dec.dim())
                    .max_by(|&a, &b| {
                        let oa = v.column(a).dotc(prev.vector()).norm_sqr();
                        let ob = v.column(b).dotc(prev.vector()).norm_sqr();
                        oa.total_cmp(&ob)
                    })
                    .unwrap()
            }
        };
        let mut state = dec.eigenstate(k);
        if let Some(prev) = &prev_state {
            let inner = prev.inner(&state);
            let overlap_sq = inner.norm_sqr();
            if overlap_sq <= 0.5 {
                return Err(Error::ContinuityLost { s, overlap_sq });
            }
            if inner.norm() > 0.0 {
                let phase = inner.conj() / inner.norm();
                state = state.scaled(phase);
            }
        }
        let energy = dec.eigenvalue(k);
        let mut gap = f64::INFINITY;
        for j in 0..dec.dim() {
            if j != k {
                gap = gap.min((dec.eigenvalue(j) - energy).abs());
            }
        }
        if gap < DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateLevel {
                level: k,
                gap,
                threshold: DEGENERACY_THRESHOLD,
            });
        }
        let excited = excited_index(&dec, k)?;
        samples.push(PathSample {
            s,
            energy,
            state: state.clone(),
            gap,
            excited_energy: dec.eigenvalue(excited),
            excited_state: dec.eigenstate(excited),
        });
        prev_state = Some(state);
    }
    Ok(PathTable { samples })
}

/// Lowest level strictly above the tracked one, or the highest below it
/// when the tracked level tops the spectrum.
fn excited_index(
    dec: &crate::operators::SpectralDecomposition,
    tracked: usize,
) -> Result<usize> {
    let e0 = dec.eigenvalue(tracked);
    let mut above: Option<usize> = None;
    let mut below: Option<usize> = None;
    for j in 0..dec.dim() {
        if j == tracked {
            continue;
        }
        let e = dec.eigenvalue(j);
        if e > e0 {
            if above.map_or(true, |a| e < dec.eigenvalue(a)) {
                above = Some(j);
            }
        } else if below.map_or(true, |b| e > dec.eigenvalue(b)) {
            below = Some(j);
        }
    }
    above.or(below).ok_or(Error::DimensionMismatch {
        context: "spectrum has no second level",
        got: 1,
        expected: 2,
    })
}

/// Geodesic distance between nearby normalized states:
/// `sqrt(1 - |<a|b>|^2)`.
pub fn segment_length(a: &StateVector, b: &StateVector) -> f64 {
    (1.0 - a.inner(b).norm_sqr()).max(0.0).sqrt()
}

/// Total arc length of the tabulated path (sum of segment lengths).
pub fn path_length(table: &PathTable) -> f64 {
    table
        .samples
        .windows(2)
        .map(|w| segment_length(&w[0].state, &w[1].state))
        .sum()
}

/// Cumulative arc length at each sample, starting at zero.
fn cumulative_lengths(table: &PathTable) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(table.len());
    out.push(0.0);
    for w in table.samples.windows(2) {
        acc += segment_length(&w[0].state, &w[1].state);
        out.push(acc);
    }
    out
}

/// Instantaneous path speed `v(tau) = l'(s(tau)) * ds/dtau` at the given
/// normalized times, with `l(s)` interpolated monotonically from the table.
pub fn speed_profile(
    sched: &Schedule,
    table: &PathTable,
    tau_grid: &[f64],
) -> Result<Vec<f64>> {
    let xs: Vec<f64> = table.samples.iter().map(|p| p.s).collect();
    let ls = cumulative_lengths(table);
    let interp = MonotoneCubic::new(xs, ls)?;
    Ok(tau_grid
        .iter()
        .map(|&tau| interp.derivative(sched.s(tau)) * sched.ds_dtau(tau))
        .collect())
}

/// Confirms the table's samples sit on this schedule's uniform
/// normalized-time grid.
fn validate_schedule_grid(table: &PathTable, sched: &Schedule) -> Result<f64> {
    let n = table.len();
    let dtau = 1.0 / (n - 1) as f64;
    let mut worst = 0.0f64;
    for (k, p) in table.samples.iter().enumerate() {
        worst = worst.max((sched.s(k as f64 * dtau) - p.s).abs());
    }
    if worst > 1e-9 {
        return Err(Error::OutOfDomain {
            context: "path table is not sampled on this schedule's uniform normalized-time grid",
            value: worst,
        });
    }
    Ok(dtau)
}

fn projector_of(state: &StateVector) -> DMatrix<Complex64> {
    let v = state.vector();
    let d = v.len();
    DMatrix::from_fn(d, d, |r, c| v[r] * v[c].conj())
}

fn hermitian_spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &e| acc.max(e.abs()))
}

/// Removes the component of `vec` along the (normalized) tracked state.
fn project_out(vec: &DVector<Complex64>, state: &StateVector) -> DVector<Complex64> {
    let overlap = state.vector().dotc(vec);
    vec - state.vector() * overlap
}

/// Speed at interior index `k` from symmetric state differences:
/// `||Q (Phi_{k+1} - Phi_{k-1}) / (2 dtau)||`.
fn fd_speed(table: &PathTable, k: usize, dtau: f64) -> f64 {
    let der = (table.samples[k + 1].state.vector() - table.samples[k - 1].state.vector())
        / Complex64::new(2.0 * dtau, 0.0);
    project_out(&der, &table.samples[k].state).norm()
}

/// Curvature and the two sides of the projector-acceleration identity at an
/// interior sample: the direct side `||Q d^2/dtau^2 |Phi>||` and the
/// geometric side `sqrt(vdot^2 + kappa^2 v^4)`.
///
/// Requires `2 <= k <= len - 3` so both speeds neighboring `k` admit
/// symmetric differences.
pub fn curvature_and_qpp(
    table: &PathTable,
    k: usize,
    sched: &Schedule,
) -> Result<(f64, f64, f64)> {
    let n = table.len();
    if n < 5 || k < 2 || k + 2 >= n {
        return Err(Error::GridTooCoarse {
            index: k,
            ratio: n as f64,
        });
    }
    let dtau = validate_schedule_grid(table, sched)?;
    Ok(curvature_qpp_inner(table, k, dtau))
}

fn curvature_qpp_inner(table: &PathTable, k: usize, dtau: f64) -> (f64, f64, f64) {
    let sk = &table.samples[k];
    let second = (table.samples[k + 1].state.vector()
        - table.samples[k].state.vector() * Complex64::new(2.0, 0.0)
        + table.samples[k - 1].state.vector())
        / Complex64::new(dtau * dtau, 0.0);
    let q_second = project_out(&second, &sk.state);
    let qpp_direct = q_second.norm();

    let v_m = fd_speed(table, k - 1, dtau);
    let v_0 = fd_speed(table, k, dtau);
    let v_p = fd_speed(table, k + 1, dtau);
    let v_dot = (v_p - v_m) / (2.0 * dtau);

    let first = (table.samples[k + 1].state.vector() - table.samples[k - 1].state.vector())
        / Complex64::new(2.0 * dtau, 0.0);
    let q_first = project_out(&first, &sk.state);
    let kappa = if v_0 > 1e-14 {
        let curv_vec = &q_second - &q_first * Complex64::new(v_dot / v_0, 0.0);
        curv_vec.norm() / (v_0 * v_0)
    } else {
        0.0
    };
    let qpp_geometric = (v_dot * v_dot + kappa * kappa * v_0.powi(4)).sqrt();
    (kappa, qpp_direct, qpp_geometric)
}

/// Finite-differenced projector-derivative norms `||dP/dtau||` at every
/// sample (symmetric differences inside, one-sided second-order stencils at
/// the ends). Equals the instantaneous speed in the continuum limit.
pub fn projector_derivative_norms(table: &PathTable, sched: &Schedule) -> Result<Vec<f64>> {
    let n = table.len();
    if n < 3 {
        return Err(Error::GridTooCoarse {
            index: 0,
            ratio: n as f64,
        });
    }
    let dtau = validate_schedule_grid(table, sched)?;
    let p: Vec<DMatrix<Complex64>> = table.samples.iter().map(|x| projector_of(&x.state)).collect();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let dp = if k == 0 {
            (-&p[0] * Complex64::new(3.0, 0.0) + &p[1] * Complex64::new(4.0, 0.0) - &p[2])
                / Complex64::new(2.0 * dtau, 0.0)
        } else if k == n - 1 {
            (&p[n - 1] * Complex64::new(3.0, 0.0) - &p[n - 2] * Complex64::new(4.0, 0.0)
                + &p[n - 3])
                / Complex64::new(2.0 * dtau, 0.0)
        } else {
            (&p[k + 1] - &p[k - 1]) / Complex64::new(2.0 * dtau, 0.0)
        };
        out.push(hermitian_spectral_norm(&dp));
    }
    Ok(out)
}

/// Quadrature of the schedule quality functional in both of its forms,
/// with the geometric form broken into its four terms.
#[derive(Debug, Clone, Copy)]
pub struct CFunctional {
    /// Sum of the four geometric terms below.
    pub c_geometric: f64,
    /// Boundary speeds over gaps, `v/Delta` at `tau = 0` and `1`.
    pub boundary_term: f64,
    /// Integral of `sqrt(vdot^2 + kappa^2 v^4) / Delta`.
    pub curvature_term: f64,
    /// Integral of `v^2 / Delta`.
    pub speed_term: f64,
    /// Integral of `2 ||Hdot|| v / Delta^2`.
    pub drive_term: f64,
    /// The same functional evaluated from finite-differenced projectors
    /// (operator norms instead of geometric quantities).
    pub c_projector: f64,
}

/// Evaluates the schedule quality functional on a table sampled along
/// `sched`'s uniform normalized-time grid.
pub fn c_functional(
    sched: &Schedule,
    table: &PathTable,
    h: &InterpolatedHamiltonian,
) -> Result<CFunctional> {
    let n = table.len();
    if n < 5 {
        return Err(Error::GridTooCoarse {
            index: 0,
            ratio: n as f64,
        });
    }
    let dtau = validate_schedule_grid(table, sched)?;
    let w_norm = h.s_derivative().spectral_norm();
    let tau_grid: Vec<f64> = (0..n).map(|k| k as f64 * dtau).collect();
    let v = speed_profile(sched, table, &tau_grid)?;
    let gaps: Vec<f64> = table.samples.iter().map(|p| p.gap).collect();

    // vdot by symmetric differences of the smooth speed profile.
    let mut v_dot = vec![0.0f64; n];
    for k in 1..n - 1 {
        v_dot[k] = (v[k + 1] - v[k - 1]) / (2.0 * dtau);
    }
    v_dot[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dtau);
    v_dot[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dtau);

    // Curvature from state differences at interior points, copied outward.
    let mut kappa = vec![0.0f64; n];
    for k in 2..n - 2 {
        let (ka, _, _) = curvature_qpp_inner(table, k, dtau);
        kappa[k] = ka;
    }
    kappa[0] = kappa[2];
    kappa[1] = kappa[2];
    kappa[n - 2] = kappa[n - 3];
    kappa[n - 1] = kappa[n - 3];

    let trapezoid = |f: &dyn Fn(usize) -> f64| -> f64 {
        let mut acc = 0.5 * (f(0) + f(n - 1));
        for k in 1..n - 1 {
            acc += f(k);
        }
        acc * dtau
    };

    let boundary_term = v[0] / gaps[0] + v[n - 1] / gaps[n - 1];
    let curvature_term = trapezoid(&|k| {
        (v_dot[k] * v_dot[k] + kappa[k] * kappa[k] * v[k].powi(4)).sqrt() / gaps[k]
    });
    let speed_term = trapezoid(&|k| v[k] * v[k] / gaps[k]);
    let drive_term = trapezoid(&|k| {
        let tau = k as f64 * dtau;
        2.0 * w_norm * sched.ds_dtau(tau).abs() * v[k] / (gaps[k] * gaps[k])
    });
    let c_geometric = boundary_term + curvature_term + speed_term + drive_term;

    // Operator-norm form from finite-differenced projectors.
    let p: Vec<DMatrix<Complex64>> = table.samples.iter().map(|x| projector_of(&x.state)).collect();
    let pdot_norm = projector_derivative_norms(table, sched)?;
    let mut qppp = vec![0.0f64; n];
    for k in 1..n - 1 {
        let pddot =
            (&p[k + 1] - &p[k] * Complex64::new(2.0, 0.0) + &p[k - 1]) / Complex64::new(dtau * dtau, 0.0);
        // Q Pddot P is rank one: its norm is the vector norm of Q Pddot |Phi>.
        let col = &pddot * table.samples[k].state.vector();
        qppp[k] = project_out(&col, &table.samples[k].state).norm();
    }
    qppp[0] = qppp[1];
    qppp[n - 1] = qppp[n - 2];
    let c_projector = pdot_norm[0] / gaps[0]
        + pdot_norm[n - 1] / gaps[n - 1]
        + trapezoid(&|k| qppp[k] / gaps[k])
        + trapezoid(&|k| pdot_norm[k] * pdot_norm[k] / gaps[k])
        + trapezoid(&|k| {
            let tau = k as f64 * dtau;
            2.0 * w_norm * sched.ds_dtau(tau).abs() * pdot_norm[k] / (gaps[k] * gaps[k])
        });

    Ok(CFunctional {
        c_geometric,
        boundary_term,
        curvature_term,
        speed_term,
        drive_term,
        c_projector,
    })
}

/// Matrix-element heuristic for the required evolution time:
/// `max_tau |<Phi| Hdot |excited>| / Delta^2` with `Hdot = (H_f - H_i) sdot`.
pub fn asp_time_estimate(
    table: &PathTable,
    h: &InterpolatedHamiltonian,
    sched: &Schedule,
) -> Result<f64> {
    let dtau = validate_schedule_grid(table, sched)?;
    let w = h.s_derivative();
    let mut worst = 0.0f64;
    for (k, p) in table.samples.iter().enumerate() {
        let tau = k as f64 * dtau;
        let wx = w.matrix() * p.excited_state.vector();
        let elem = p.state.vector().dotc(&wx).norm() * sched.ds_dtau(tau).abs();
        worst = worst.max(elem / (p.gap * p.gap));
    }
    Ok(worst)
}
