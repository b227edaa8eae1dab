//! Constant-speed schedule construction from measured overlaps.
//!
//! The builder walks the interpolation parameter from 0 to 1. At each
//! accepted point it measures the tracked-level weight `f_j` of the evolved
//! state, then root-solves for the next point `s'` where the weight of the
//! post-measurement state has dropped by the target squared segment length:
//! `g(s') = p(s')/f_j - (1 - dl_t^2) = 0`. Physical times grow
//! proportionally to the realized segment lengths, which is what makes the
//! normalized result a constant-speed schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolutionConfig};
use crate::hamiltonians::InterpolatedHamiltonian;
use crate::operators::{HermitianOperator, StateVector};
use crate::projector::{derive_seed, measure_tracked, ProjectorBackend, TrackedMeasurement};
use crate::scheduler::{interpolate_monotone, Schedule};

/// Hard cap on accepted segments before a build is declared divergent.
const MAX_SEGMENTS: usize = 400;
/// Fixed ladder step for the exact backend, which cannot lose track of the
/// level between probes.
const EXACT_LADDER_STEP: f64 = 0.05;
/// Minimum whole-build overlap for an auto-calibrated first-step time.
const CALIBRATION_TARGET: f64 = 0.9;
/// Doublings of the first-step time attempted during calibration.
const CALIBRATION_DOUBLINGS: usize = 20;

/// Knobs for the constant-speed builder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuilderConfig {
    /// Target geodesic length of each segment (`dl_t`).
    pub target_segment_length: f64,
    /// Physical duration assigned to the first segment (`t_1`); when `None`
    /// it is calibrated automatically.
    pub first_step_time: Option<f64>,
    /// How overlaps with the tracked eigenstate are measured.
    pub backend: ProjectorBackend,
    /// Residual tolerance for the per-segment root solve; defaults to
    /// `0.05 * dl_t^2` when `None`.
    pub root_tolerance: Option<f64>,
    /// Abort if any measured overlap falls below this floor.
    pub fidelity_floor: f64,
}

impl BuilderConfig {
    /// A reasonable starting point: `dl_t = 0.2`, auto-calibrated first-step
    /// time, and a 0.5 overlap floor.
    pub fn new(backend: ProjectorBackend) -> Self {
        Self {
            target_segment_length: 0.2,
            first_step_time: None,
            backend,
            root_tolerance: None,
            fidelity_floor: 0.5,
        }
    }

    pub(crate) fn effective_root_tolerance(&self) -> f64 {
        self.root_tolerance
            .unwrap_or(0.05 * self.target_segment_length * self.target_segment_length)
    }
}

/// One accepted row of the build: physical time, schedule value, realized
/// segment length and the overlap measured at acceptance.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SchedulePoint {
    pub t: f64,
    pub s: f64,
    pub dl: f64,
    pub f: f64,
}

/// The full point table produced by a build, plus its normalization data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchedulePoints {
    pub points: Vec<SchedulePoint>,
    /// The realized length of the calibration segment (`dl_r`).
    pub reference_length: f64,
    /// Total physical time `T = t_m`.
    pub total_time: f64,
}

impl SchedulePoints {
    /// The realized first-step time (`t_1`), i.e. the duration of the first
    /// segment.
    pub fn first_step_time(&self) -> f64 {
        if self.points.len() > 1 {
            self.points[1].t
        } else {
            0.0
        }
    }

    /// The smallest overlap measured along the build.
    pub fn min_fidelity(&self) -> f64 {
        self.points.iter().map(|p| p.f).fold(f64::INFINITY, f64::min)
    }
}

/// Cost counters accumulated by a build.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostReport {
    /// Accepted segments.
    pub segments: usize,
    /// Mean overlap measurements per segment root solve.
    pub mean_root_evaluations: f64,
    /// Total overlap measurements (state preparations), including any
    /// spent on first-step-time calibration trials.
    pub total_measurements: usize,
    /// Final physical schedule time.
    pub total_time: f64,
    /// Duration of one measurement pulse (zero for the exact backend).
    pub pulse_time: f64,
    /// `total_time + total_measurements * pulse_time`.
    pub combined_time: f64,
}

/// A built schedule together with its point table and cost counters.
#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub schedule: Schedule,
    pub points: SchedulePoints,
    pub cost: CostReport,
}

impl BuildOutput {
    /// Writes the point table as CSV: commented header with the build
    /// parameters, then `j,t_j,s_j,dl_j,f_j` rows.
    pub fn write_csv<W: std::io::Write>(&self, cfg: &BuilderConfig, out: &mut W) -> Result<()> {
        writeln!(out, "# T = {:.17e}", self.points.total_time)?;
        writeln!(out, "# dl_t = {:.17e}", cfg.target_segment_length)?;
        writeln!(out, "# t1 = {:.17e}", self.points.first_step_time())?;
        writeln!(out, "# backend = {}", cfg.backend.label())?;
        writeln!(out, "j,t_j,s_j,dl_j,f_j")?;
        for (j, p) in self.points.points.iter().enumerate() {
            writeln!(
                out,
                "{},{:.17e},{:.17e},{:.17e},{:.17e}",
                j, p.t, p.s, p.dl, p.f
            )?;
        }
        Ok(())
    }
}

/// Measurement bookkeeping shared across a whole build (calibration trials
/// included), so sampled-backend probes never reuse a seed stream.
struct Meter<'a> {
    h: &'a InterpolatedHamiltonian,
    backend: &'a ProjectorBackend,
    probe_counter: u64,
    total_measurements: usize,
}

impl Meter<'_> {
    fn measure(&mut self, s: f64, psi: &StateVector, e_hint: f64) -> Result<TrackedMeasurement> {
        let seed = match self.backend {
            ProjectorBackend::GaussianMc { seed, .. } => derive_seed(*seed, self.probe_counter),
            _ => 0,
        };
        self.probe_counter += 1;
        self.total_measurements += 1;
        measure_tracked(&self.h.at(s)?, psi, e_hint, self.backend, seed)
    }
}

fn nearest_anchor(anchors: &[(f64, f64)], s: f64) -> f64 {
    anchors
        .iter()
        .min_by(|a, b| (a.0 - s).abs().total_cmp(&(b.0 - s).abs()))
        .expect("anchor list starts non-empty")
        .1
}

/// One root-solve probe: measures the post-measurement state's weight at
/// `sp` (hinted from the nearest anchor in `s`) and returns the residual
/// `g(sp)` together with whether the level was resolved.
#[allow(clippy::too_many_arguments)]
fn probe_residual(
    meter: &mut Meter<'_>,
    anchors: &mut Vec<(f64, f64)>,
    evals: &mut usize,
    xi: &StateVector,
    f_j: f64,
    dl_t_sq: f64,
    sp: f64,
) -> Result<(f64, bool)> {
    *evals += 1;
    let hint = nearest_anchor(anchors, sp);
    let m = meter.measure(sp, xi, hint)?;
    if m.found {
        anchors.push((sp, m.energy));
    }
    Ok((m.weight / f_j - (1.0 - dl_t_sq), m.found))
}

/// Evolves `psi0` along the partial schedule through `points`, up to the
/// last accepted time.
fn evolve_partial(
    h: &InterpolatedHamiltonian,
    points: &[SchedulePoint],
    proto: &EvolutionConfig,
    psi0: &StateVector,
) -> Result<StateVector> {
    let t_end = points.last().expect("at least one point").t;
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.t / t_end, p.s)).collect();
    let sched = Schedule::from_raw_points(&pairs)?;
    evolve(h, &sched, &proto.with_total_time(t_end), psi0)
}

struct RawBuild {
    points: Vec<SchedulePoint>,
    reference_length: f64,
    root_evals: Vec<usize>,
    min_fidelity: f64,
}

#[allow(clippy::too_many_arguments)]
fn one_build(
    h: &InterpolatedHamiltonian,
    cfg: &BuilderConfig,
    evo: &EvolutionConfig,
    t1: f64,
    h_trust: f64,
    phi0: &StateVector,
    e0: f64,
    meter: &mut Meter<'_>,
) -> Result<RawBuild> {
    let dl_t_sq = cfg.target_segment_length * cfg.target_segment_length;
    let g_tol = cfg.effective_root_tolerance();
    let floor = cfg.fidelity_floor;
    let mut points = vec![SchedulePoint {
        t: 0.0,
        s: 0.0,
        dl: 0.0,
        f: 1.0,
    }];
    let mut root_evals: Vec<usize> = Vec::new();
    let mut reference_length = f64::NAN;
    let mut e_star = e0;

    while points.last().unwrap().s < 1.0 {
        if points.len() > MAX_SEGMENTS {
            return Err(Error::SegmentOverflow {
                max: MAX_SEGMENTS,
                s: points.last().unwrap().s,
            });
        }
        let j = points.len() - 1;
        let (t_j, s_j) = (points[j].t, points[j].s);

        // Re-measure the arrival overlap with the physically evolved state.
        let psi = if j == 0 {
            phi0.clone()
        } else {
            evolve_partial(h, &points, evo, phi0)?
        };
        let meas = meter.measure(s_j, &psi, e_star)?;
        if !meas.found || meas.weight < floor {
            return Err(Error::FidelityFloor {
                segment: j,
                s: s_j,
                fidelity: if meas.found { meas.weight } else { 0.0 },
                floor,
            });
        }
        let f_j = meas.weight;
        points[j].f = f_j;
        let xi = meas.state.expect("resolved measurement carries a state");
        let mut anchors: Vec<(f64, f64)> = vec![(s_j, meas.energy)];
        let mut evals = 0usize;

        // Trust-ladder expansion: hops double while the overlap stays high,
        // but never outrun the energy hint chain. A probe that cannot see
        // the level at an extended hop shrinks back toward the trust step
        // instead of being believed.
        let mut lo = s_j;
        let mut g_lo = dl_t_sq;
        let mut hop = h_trust;
        let mut bracket: Option<(f64, f64)> = None;
        loop {
            let cand = (lo + hop).min(1.0);
            let (g_c, found) =
                probe_residual(meter, &mut anchors, &mut evals, &xi, f_j, dl_t_sq, cand)?;
            if !found && hop > h_trust * 1.0001 {
                hop = (hop / 4.0).max(h_trust);
                continue;
            }
            if g_c > g_tol {
                lo = cand;
                g_lo = g_c;
                if cand >= 1.0 {
                    break;
                }
                hop = if found { (hop * 2.0).min(1.0 - lo) } else { h_trust };
            } else {
                bracket = Some((cand, g_c));
                break;
            }
        }

        // End rule: still above threshold at s = 1 means the final segment
        // is shorter than targeted and the walk terminates there.
        let (s_next, g_next) = match bracket {
            None => (1.0, g_lo),
            Some((hi, g_hi)) if g_hi.abs() <= g_tol => (hi, g_hi),
            Some((hi, _)) => {
                let (mut a, mut b) = (lo, hi);
                let mut s_n;
                let mut g_n;
                loop {
                    s_n = 0.5 * (a + b);
                    g_n = probe_residual(meter, &mut anchors, &mut evals, &xi, f_j, dl_t_sq, s_n)?
                        .0;
                    if g_n.abs() <= g_tol || (b - a) <= 1e-4 {
                        break;
                    }
                    if g_n > 0.0 {
                        a = s_n;
                    } else {
                        b = s_n;
                    }
                }
                (s_n, g_n)
            }
        };

        let dl_next = (dl_t_sq - g_next).max(0.0).sqrt();
        // Refresh the energy chain at the accepted point.
        let refresh = meter.measure(s_next, &xi, nearest_anchor(&anchors, s_next))?;
        if refresh.found {
            e_star = refresh.energy;
        }
        let t_next = if j == 0 {
            reference_length = dl_next.max(1e-12);
            t1
        } else {
            t_j + t1 * dl_next.max(1e-9) / reference_length
        };
        points.push(SchedulePoint {
            t: t_next,
            s: s_next,
            dl: dl_next,
            f: f64::NAN,
        });
        root_evals.push(evals);
    }

    // Certify the finished path end to end.
    let psi = evolve_partial(h, &points, evo, phi0)?;
    let m_final = meter.measure(1.0, &psi, e_star)?;
    if !m_final.found || m_final.weight < floor {
        return Err(Error::FidelityFloor {
            segment: points.len() - 1,
            s: 1.0,
            fidelity: if m_final.found { m_final.weight } else { 0.0 },
            floor,
        });
    }
    points.last_mut().unwrap().f = m_final.weight;
    let min_fidelity = points.iter().map(|p| p.f).fold(f64::INFINITY, f64::min);
    Ok(RawBuild {
        points,
        reference_length,
        root_evals,
        min_fidelity,
    })
}

/// Runs the constant-speed construction for `h` under `cfg`.
///
/// `evo.total_time` is ignored; its resolution and tracked level are used
/// for the intermediate physical evolutions. When
/// `cfg.first_step_time` is `None`, the first-step time is calibrated by
/// doubling from 1 until a full trial build keeps every measured overlap at
/// or above 0.9 (so the measured ratios can be trusted), then that trial is
/// returned.
pub fn build_constant_speed(
    h: &InterpolatedHamiltonian,
    cfg: &BuilderConfig,
    evo: &EvolutionConfig,
) -> Result<BuildOutput> {
    cfg.backend.validate()?;
    let dl_t = cfg.target_segment_length;
    if !(dl_t > 0.0 && dl_t < 1.0) {
        return Err(Error::OutOfDomain {
            context: "target segment length (need 0 < dl_t < 1)",
            value: dl_t,
        });
    }
    if !(0.0..1.0).contains(&cfg.fidelity_floor) {
        return Err(Error::OutOfDomain {
            context: "fidelity floor (need 0 <= floor < 1)",
            value: cfg.fidelity_floor,
        });
    }
    if let Some(t1) = cfg.first_step_time {
        if !(t1 > 0.0 && t1.is_finite()) {
            return Err(Error::OutOfDomain {
                context: "first-step time (need t1 > 0)",
                value: t1,
            });
        }
    }
    if evo.tracked_level >= h.dim() {
        return Err(Error::OutOfDomain {
            context: "tracked level vs dimension",
            value: evo.tracked_level as f64,
        });
    }

    // The hint chain stays reliable as long as one hop moves the level's
    // energy by less than the scan radius: |dE/ds| <= ||H_f - H_i||.
    let drive = HermitianOperator::linear_combination(1.0, h.final_op(), -1.0, h.initial())?;
    let h_trust = match cfg.backend.beta() {
        Some(beta) => 1.5 / (beta * drive.spectral_norm()),
        None => EXACT_LADDER_STEP,
    };

    let dec0 = h.at(0.0)?.eig();
    let phi0 = dec0.eigenstate(evo.tracked_level);
    let e0 = dec0.eigenvalue(evo.tracked_level);
    let mut meter = Meter {
        h,
        backend: &cfg.backend,
        probe_counter: 0,
        total_measurements: 0,
    };

    let raw = match cfg.first_step_time {
        Some(t1) => one_build(h, cfg, evo, t1, h_trust, &phi0, e0, &mut meter)?,
        None => {
            let mut t1 = 1.0;
            let mut chosen: Option<RawBuild> = None;
            for _ in 0..CALIBRATION_DOUBLINGS {
                match one_build(h, cfg, evo, t1, h_trust, &phi0, e0, &mut meter) {
                    Ok(raw) if raw.min_fidelity >= CALIBRATION_TARGET => {
                        chosen = Some(raw);
                        break;
                    }
                    Ok(_) | Err(Error::FidelityFloor { .. }) => {}
                    Err(e) => return Err(e),
                }
                t1 *= 2.0;
            }
            match chosen {
                Some(raw) => raw,
                None => {
                    let raw = one_build(h, cfg, evo, t1, h_trust, &phi0, e0, &mut meter)?;
                    if raw.min_fidelity < CALIBRATION_TARGET {
                        let worst = raw
                            .points
                            .iter()
                            .enumerate()
                            .min_by(|a, b| a.1.f.total_cmp(&b.1.f))
                            .expect("build has points");
                        return Err(Error::FidelityFloor {
                            segment: worst.0,
                            s: worst.1.s,
                            fidelity: raw.min_fidelity,
                            floor: CALIBRATION_TARGET,
                        });
                    }
                    raw
                }
            }
        }
    };

    let total_time = raw.points.last().unwrap().t;
    let pairs: Vec<(f64, f64)> = raw
        .points
        .iter()
        .map(|p| (p.t / total_time, p.s))
        .collect();
    let schedule = interpolate_monotone(&pairs)?;
    let segments = raw.points.len() - 1;
    let mean_root_evaluations = if raw.root_evals.is_empty() {
        0.0
    } else {
        raw.root_evals.iter().sum::<usize>() as f64 / raw.root_evals.len() as f64
    };
    let pulse_time = cfg.backend.pulse_time();
    let cost = CostReport {
        segments,
        mean_root_evaluations,
        total_measurements: meter.total_measurements,
        total_time,
        pulse_time,
        combined_time: total_time + meter.total_measurements as f64 * pulse_time,
    };
    Ok(BuildOutput {
        schedule,
        points: SchedulePoints {
            points: raw.points,
            reference_length: raw.reference_length,
            total_time,
        },
        cost,
    })
}

/// Summarizes the cost of a finished build.
pub fn total_cost_report(points: &SchedulePoints, cost: &CostReport) -> CostReport {
    let mut out = cost.clone();
    out.total_time = points.total_time;
    out.combined_time = points.total_time + cost.total_measurements as f64 * cost.pulse_time;
    out
}
