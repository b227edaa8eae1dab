//! Time-dependent Schrödinger propagation under a schedule.
//!
//! The propagator is the midpoint-exponential rule (first-order Magnus with
//! midpoint sampling): each step applies `exp(-i H(s(tau_mid)) dt)` to
//! machine precision, so every step is unitary up to roundoff and the
//! global error is second order in the step size. A closed-form fast path
//! handles two-level systems, which is where the scaling experiments spend
//! nearly all of their time; higher dimensions use a Taylor expansion of
//! the exponential, convergent because the step guard bounds `||H|| dt`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonians::InterpolatedHamiltonian;
use crate::operators::{HermitianOperator, StateVector};
use crate::scheduler::Schedule;

/// Resolution and tracking parameters for one evolution run.
#[derive(Debug, Clone, Copy)]
pub struct EvolutionConfig {
    /// Total physical duration `T` (inverse energy units).
    pub total_time: f64,
    /// Steps per unit time; the actual step count is `ceil(T * this)`.
    pub steps_per_unit_time: f64,
    /// Which eigenstate the run starts from and is compared against.
    pub tracked_level: usize,
}

impl EvolutionConfig {
    pub fn new(total_time: f64, steps_per_unit_time: f64, tracked_level: usize) -> Result<Self> {
        if !(total_time > 0.0) {
            return Err(Error::OutOfDomain {
                context: "evolution total_time (need > 0)",
                value: total_time,
            });
        }
        if !(steps_per_unit_time > 0.0) {
            return Err(Error::OutOfDomain {
                context: "evolution steps_per_unit_time (need > 0)",
                value: steps_per_unit_time,
            });
        }
        Ok(Self {
            total_time,
            steps_per_unit_time,
            tracked_level,
        })
    }

    /// Same parameters with a different total time.
    pub fn with_total_time(&self, total_time: f64) -> Self {
        Self {
            total_time,
            ..*self
        }
    }

    pub fn steps(&self) -> usize {
        ((self.total_time * self.steps_per_unit_time).ceil() as usize).max(1)
    }
}

/// Checks the accuracy guard `dt * max_s ||H(s)|| <= 0.1`. The interpolation
/// is affine in `s`, so the spectral norm is convex along the path and its
/// maximum sits at an endpoint.
fn check_step_guard(h: &InterpolatedHamiltonian, cfg: &EvolutionConfig) -> Result<(f64, usize)> {
    let norm = h.initial().spectral_norm().max(h.final_op().spectral_norm());
    let n = cfg.steps();
    let dt = cfg.total_time / n as f64;
    let product = dt * norm;
    if product > 0.1 * (1.0 + 1e-9) {
        let required = (cfg.total_time * norm / 0.1).ceil() as usize;
        return Err(Error::StepTooLarge {
            product,
            required_steps: required,
        });
    }
    Ok((dt, n))
}

/// One exact step `exp(-i H dt) psi` for a two-level Hamiltonian, written
/// through the identity/traceless split `H = c I + d . sigma`.
fn step_two_level(h: &HermitianOperator, dt: f64, psi: &mut [Complex64; 2]) {
    let h00 = h.entry(0, 0).re;
    let h11 = h.entry(1, 1).re;
    let h01 = h.entry(0, 1);
    let c = 0.5 * (h00 + h11);
    let dz = 0.5 * (h00 - h11);
    let dn = (h01.norm_sqr() + dz * dz).sqrt();
    let phase = Complex64::from_polar(1.0, -c * dt);
    if dn < 1e-300 {
        psi[0] *= phase;
        psi[1] *= phase;
        return;
    }
    let (s, co) = (dn * dt).sin_cos();
    let a = Complex64::new(co, -s * dz / dn);
    let b = Complex64::new(0.0, -s / dn) * h01;
    let b_conj = Complex64::new(0.0, -s / dn) * h01.conj();
    let p0 = psi[0];
    let p1 = psi[1];
    psi[0] = phase * (a * p0 + b * p1);
    psi[1] = phase * (b_conj * p0 + a.conj() * p1);
}

/// Propagates `psi0` from `tau = 0` to `1` under `sched` and returns the
/// final state. Each step applies the exact exponential of the midpoint
/// Hamiltonian.
pub fn evolve(
    h: &InterpolatedHamiltonian,
    sched: &Schedule,
    cfg: &EvolutionConfig,
    psi0: &StateVector,
) -> Result<StateVector> {
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            context: "initial state vs Hamiltonian",
            got: psi0.dim(),
            expected: h.dim(),
        });
    }
    let (dt, n) = check_step_guard(h, cfg)?;
    if h.dim() == 2 {
        let mut amp = [psi0.amplitude(0), psi0.amplitude(1)];
        for k in 0..n {
            let tau_mid = (k as f64 + 0.5) / n as f64;
            let hm = h.at(sched.s(tau_mid))?;
            step_two_level(&hm, dt, &mut amp);
        }
        let v = nalgebra::DVector::from_vec(vec![amp[0], amp[1]]);
        return Ok(StateVector::from_dvector(v));
    }
    let mut psi = psi0.vector().clone();
    for k in 0..n {
        let tau_mid = (k as f64 + 0.5) / n as f64;
        let hm = h.at(sched.s(tau_mid))?;
        step_dense(&hm, dt, &mut psi);
    }
    Ok(StateVector::from_dvector(psi))
}

/// One step `psi <- exp(-i H dt) psi` for dimensions above two. The step
/// guard keeps `||H|| dt <= 0.1`, so the Taylor series of the exponential
/// reaches machine precision within a dozen matrix-vector products — far
/// cheaper than an eigendecomposition per step at dense dimensions.
fn step_dense(h: &HermitianOperator, dt: f64, psi: &mut nalgebra::DVector<Complex64>) {
    let mut term = psi.clone();
    for k in 1..=24 {
        term = h.matrix() * &term;
        term *= Complex64::new(0.0, -dt / k as f64);
        *psi += &term;
        if term.norm() <= 1e-17 * psi.norm() {
            break;
        }
    }
}

/// Squared overlap `|<psi|phi>|^2`.
pub fn fidelity(psi: &StateVector, phi: &StateVector) -> f64 {
    psi.inner(phi).norm_sqr()
}

fn fidelity_at(
    h: &InterpolatedHamiltonian,
    sched: &Schedule,
    proto: &EvolutionConfig,
    total_time: f64,
    psi0: &StateVector,
    phi_f: &StateVector,
) -> Result<f64> {
    let cfg = proto.with_total_time(total_time);
    let psi_t = evolve(h, sched, &cfg, psi0)?;
    Ok(fidelity(&psi_t, phi_f))
}

/// Smallest total time in (an expansion of) `t_bracket` whose final fidelity
/// with the tracked eigenstate of `H(1)` reaches `target_f`.
///
/// The search is predicate bisection on `F(T) >= target_f` to relative
/// tolerance 1e-2. The fidelity is not monotone in `T` (it oscillates), so
/// the contract is on the final bracket: the returned `T` satisfies the
/// target while the bracket's lower edge does not. When fidelity at the
/// upper edge misses the target the bracket is widened by doubling, at most
/// twenty times. `proto.total_time` is ignored; resolution and tracked level
/// are taken from it.
pub fn min_time_for_fidelity(
    h: &InterpolatedHamiltonian,
    sched: &Schedule,
    target_f: f64,
    t_bracket: (f64, f64),
    proto: &EvolutionConfig,
) -> Result<f64> {
    if !(target_f > 0.0 && target_f < 1.0) {
        return Err(Error::OutOfDomain {
            context: "fidelity target (need 0 < f < 1)",
            value: target_f,
        });
    }
    let (lo_0, hi_0) = t_bracket;
    if !(lo_0 > 0.0 && hi_0 > lo_0) {
        return Err(Error::OutOfDomain {
            context: "time bracket (need 0 < low < high)",
            value: hi_0,
        });
    }
    let psi0 = h.initial().eig().eigenstate(proto.tracked_level);
    let phi_f = h.final_op().eig().eigenstate(proto.tracked_level);

    if fidelity_at(h, sched, proto, lo_0, &psi0, &phi_f)? >= target_f {
        return Ok(lo_0);
    }
    let mut lo = lo_0;
    let mut hi = hi_0;
    let mut doublings = 0usize;
    let mut f_hi = fidelity_at(h, sched, proto, hi, &psi0, &phi_f)?;
    while f_hi < target_f {
        doublings += 1;
        if doublings > 20 {
            return Err(Error::TargetUnreachable {
                target: target_f,
                reached: f_hi,
                doublings: doublings - 1,
            });
        }
        lo = hi;
        hi *= 2.0;
        f_hi = fidelity_at(h, sched, proto, hi, &psi0, &phi_f)?;
    }
    while (hi - lo) / hi > 1e-2 {
        let mid = 0.5 * (lo + hi);
        if fidelity_at(h, sched, proto, mid, &psi0, &phi_f)? >= target_f {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Two-norm of the difference of two states (no phase alignment; the
/// midpoint propagator is phase-deterministic).
#[cfg(test)]
pub(crate) fn state_distance(a: &StateVector, b: &StateVector) -> f64 {
    let mut acc = 0.0f64;
    for i in 0..a.dim() {
        acc += (a.amplitude(i) - b.amplitude(i)).norm_sqr();
    }
    acc.sqrt()
}

#[allow(dead_code)]
fn dense_from(h: &HermitianOperator) -> DMatrix<Complex64> {
    h.matrix().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{grover_effective, landau_zener, GroverParams};
    use crate::operators::HermitianOperator;
    use crate::scheduler::linear;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn pauli_z_pair() -> InterpolatedHamiltonian {
        let z = HermitianOperator::from_row_major(
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0),
            ],
        )
        .unwrap();
        InterpolatedHamiltonian::new(z.clone(), z).unwrap()
    }

    #[test]
    fn constant_hamiltonian_accumulates_phase() {
        let h = pauli_z_pair();
        let cfg = EvolutionConfig::new(std::f64::consts::FRAC_PI_2, 40.0, 0).unwrap();
        let psi0 = StateVector::basis(2, 0);
        let out = evolve(&h, &linear(), &cfg, &psi0).unwrap();
        // exp(-i Z pi/2) |0> = -i |0>
        assert_relative_eq!(out.amplitude(0).re, 0.0, epsilon = 1e-9);
        assert_relative_eq!(out.amplitude(0).im, -1.0, epsilon = 1e-9);
        assert!(out.amplitude(1).norm() < 1e-12);
        assert_relative_eq!(out.norm(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn adiabatic_limit_reaches_unit_fidelity() {
        let h = grover_effective(GroverParams::new(4).unwrap());
        let cfg = EvolutionConfig::new(500.0, 10.0, 0).unwrap();
        let psi0 = h.initial().eig().eigenstate(0);
        let phi = h.final_op().eig().eigenstate(0);
        let out = evolve(&h, &linear(), &cfg, &psi0).unwrap();
        let f = fidelity(&out, &phi);
        assert!(f >= 0.999, "F = {f}");
        assert_relative_eq!(f, 0.9999997862215316, epsilon = 1e-6);
    }

    #[test]
    fn generic_and_two_level_paths_agree() {
        // Same physics, one run through the 2x2 fast path and one through the
        // spectral-decomposition path via a padded 3-level copy.
        let h2 = landau_zener(0.4).unwrap();
        let pad = |m: &HermitianOperator| {
            let mut raw = vec![Complex64::new(0.0, 0.0); 9];
            for r in 0..2 {
                for c in 0..2 {
                    raw[r * 3 + c] = m.entry(r, c);
                }
            }
            raw[8] = Complex64::new(50.0, 0.0); // spectator level far away
            HermitianOperator::from_row_major(3, &raw).unwrap()
        };
        let h3 = InterpolatedHamiltonian::new(pad(h2.initial()), pad(h2.final_op())).unwrap();
        let cfg2 = EvolutionConfig::new(7.0, 40.0, 0).unwrap();
        let cfg3 = EvolutionConfig::new(7.0, 600.0, 0).unwrap(); // guard: norm 50
        let psi2 = h2.initial().eig().eigenstate(0);
        let mut raw3 = vec![Complex64::new(0.0, 0.0); 3];
        for i in 0..2 {
            raw3[i] = psi2.amplitude(i);
        }
        let psi3 = StateVector::new(raw3);
        let out2 = evolve(&h2, &linear(), &cfg2, &psi2).unwrap();
        let out3 = evolve(&h3, &linear(), &cfg3, &psi3).unwrap();
        // Projections onto the shared 2-level block agree up to step error.
        let f2 = out2.amplitude(0).norm_sqr();
        let f3 = out3.amplitude(0).norm_sqr();
        assert_relative_eq!(f2, f3, epsilon = 1e-4);
        assert!(out3.amplitude(2).norm() < 1e-12);
    }

    #[test]
    fn propagator_is_second_order() {
        let h = landau_zener(1.0).unwrap();
        let psi0 = h.initial().eig().eigenstate(0);
        let run = |spu: f64| {
            let cfg = EvolutionConfig::new(6.0, spu, 0).unwrap();
            evolve(&h, &linear(), &cfg, &psi0).unwrap()
        };
        let a = run(15.0);
        let b = run(30.0);
        let c = run(60.0);
        let e1 = state_distance(&a, &b);
        let e2 = state_distance(&b, &c);
        let ratio = e1 / e2;
        assert!(
            (3.5..=4.5).contains(&ratio),
            "Richardson ratio {ratio} (errors {e1}, {e2})"
        );
    }

    #[test]
    fn unitarity_on_generic_path() {
        let h = {
            let mut raw_i = vec![Complex64::new(0.0, 0.0); 16];
            let mut raw_f = vec![Complex64::new(0.0, 0.0); 16];
            for k in 0..4 {
                raw_i[k * 4 + k] = Complex64::new(k as f64, 0.0);
                raw_f[k * 4 + k] = Complex64::new(3.0 - k as f64, 0.0);
            }
            raw_i[1] = Complex64::new(0.3, 0.1);
            raw_i[4] = Complex64::new(0.3, -0.1);
            raw_f[2] = Complex64::new(0.0, 0.5);
            raw_f[8] = Complex64::new(0.0, -0.5);
            InterpolatedHamiltonian::new(
                HermitianOperator::from_row_major(4, &raw_i).unwrap(),
                HermitianOperator::from_row_major(4, &raw_f).unwrap(),
            )
            .unwrap()
        };
        let cfg = EvolutionConfig::new(5.0, 40.0, 0).unwrap();
        let psi0 = h.initial().eig().eigenstate(0);
        let out = evolve(&h, &linear(), &cfg, &psi0).unwrap();
        assert_relative_eq!(out.norm(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn guard_rejects_coarse_stepping() {
        let h = pauli_z_pair(); // spectral norm 1
        let cfg = EvolutionConfig::new(10.0, 1.0, 0).unwrap(); // dt = 1.0
        let psi0 = StateVector::basis(2, 0);
        let err = evolve(&h, &linear(), &cfg, &psi0).unwrap_err();
        match err {
            Error::StepTooLarge {
                product,
                required_steps,
            } => {
                assert_relative_eq!(product, 1.0, epsilon = 1e-12);
                assert_eq!(required_steps, 100);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn fidelity_basics() {
        let a = StateVector::basis(2, 0);
        let b = StateVector::basis(2, 1);
        let c = StateVector::new(vec![
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ]);
        assert_relative_eq!(fidelity(&a, &a), 1.0, epsilon = 1e-15);
        assert_relative_eq!(fidelity(&a, &b), 0.0, epsilon = 1e-15);
        assert_relative_eq!(fidelity(&a, &c), 0.5, epsilon = 1e-15);
        assert_relative_eq!(fidelity(&c, &a), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn min_time_already_satisfied_returns_low() {
        let h = grover_effective(GroverParams::new(4).unwrap());
        let proto = EvolutionConfig::new(1.0, 10.0, 0).unwrap();
        let t = min_time_for_fidelity(&h, &linear(), 0.2, (1.0, 16.0), &proto).unwrap();
        assert_eq!(t, 1.0); // F(1) = 0.2658 >= 0.2 already
    }

    #[test]
    fn min_time_bisection_matches_reference() {
        let h = grover_effective(GroverParams::new(4).unwrap());
        let proto = EvolutionConfig::new(1.0, 10.0, 0).unwrap();
        let t = min_time_for_fidelity(&h, &linear(), 0.75, (1.0, 16.0), &proto).unwrap();
        assert_relative_eq!(t, 7.26953125, max_relative = 1e-6);
        let cfg = proto.with_total_time(t);
        let psi0 = h.initial().eig().eigenstate(0);
        let phi = h.final_op().eig().eigenstate(0);
        let f = fidelity(&evolve(&h, &linear(), &cfg, &psi0).unwrap(), &phi);
        assert!(f >= 0.75, "F(T_min) = {f}");
    }

    #[test]
    fn min_time_unreachable_reports_doublings() {
        // Degenerate schedule family: target fidelity 0.97 is never reached by
        // the linear schedule on a tiny bracket cap - force failure by an
        // impossible target under a frozen Hamiltonian (H_i = H_f = Z keeps
        // the state in |0>, fidelity with |0> is always 1, so instead track
        // level 0 vs an H_f whose ground state is orthogonal and unreachable
        // at any speed because the Hamiltonians commute).
        let z = HermitianOperator::from_row_major(
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0),
            ],
        )
        .unwrap();
        let minus_z = HermitianOperator::from_row_major(
            2,
            &[
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        let h = InterpolatedHamiltonian::new(z, minus_z).unwrap();
        let proto = EvolutionConfig::new(1.0, 10.0, 0).unwrap();
        let err = min_time_for_fidelity(&h, &linear(), 0.5, (0.5, 1.0), &proto).unwrap_err();
        match err {
            Error::TargetUnreachable { doublings, .. } => assert_eq!(doublings, 20),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
