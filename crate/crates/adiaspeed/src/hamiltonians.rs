//! Interpolated Hamiltonian families and their serialization.
//!
//! Every experiment drives a linear pencil `H(s) = H_i + s*(H_f - H_i)`.
//! The families here are the two-level effective Grover search operator,
//! its full 2^n-dimensional parent, and a tunable avoided crossing used as
//! the synthetic gap-sweep axis. Operators round-trip through a plain text
//! format (`adiaspeed-hamiltonian v1`) at 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::HermitianOperator;

/// The endpoint pair of a linear interpolation `H(s) = H_i + s*(H_f - H_i)`.
#[derive(Debug, Clone)]
pub struct InterpolatedHamiltonian {
    h_i: HermitianOperator,
    h_f: HermitianOperator,
}

impl InterpolatedHamiltonian {
    pub fn new(h_i: HermitianOperator, h_f: HermitianOperator) -> Result<Self> {
        if h_i.dim() != h_f.dim() {
            return Err(Error::DimensionMismatch {
                context: "interpolation endpoints",
                got: h_f.dim(),
                expected: h_i.dim(),
            });
        }
        Ok(Self { h_i, h_f })
    }

    pub fn dim(&self) -> usize {
        self.h_i.dim()
    }

    pub fn initial(&self) -> &HermitianOperator {
        &self.h_i
    }

    pub fn final_op(&self) -> &HermitianOperator {
        &self.h_f
    }

    /// Evaluates `H(s)`. Strict domain `[0,1]` with a 1e-12 grace band for
    /// floating-point overshoot from interpolants; beyond that, extrapolation
    /// is refused rather than silently computed.
    pub fn at(&self, s: f64) -> Result<HermitianOperator> {
        let s = if s > 1.0 && s <= 1.0 + 1e-12 {
            1.0
        } else if s < 0.0 && s >= -1e-12 {
            0.0
        } else {
            s
        };
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::OutOfDomain {
                context: "interpolation parameter s",
                value: s,
            });
        }
        HermitianOperator::linear_combination(1.0 - s, &self.h_i, s, &self.h_f)
    }

    /// The (constant) s-derivative `H_f - H_i`. The time derivative under a
    /// schedule is this operator scaled by ds/dtau.
    pub fn s_derivative(&self) -> HermitianOperator {
        HermitianOperator::linear_combination(-1.0, &self.h_i, 1.0, &self.h_f)
            .expect("endpoint dimensions already checked")
    }
}

/// Parameters of the two-level effective Grover search family.
#[derive(Debug, Clone, Copy)]
pub struct GroverParams {
    n_items: u64,
}

impl GroverParams {
    pub fn new(n_items: u64) -> Result<Self> {
        if n_items < 2 {
            return Err(Error::OutOfDomain {
                context: "Grover item count N (need N >= 2)",
                value: n_items as f64,
            });
        }
        Ok(Self { n_items })
    }

    pub fn n_items(&self) -> u64 {
        self.n_items
    }

    /// The Bloch components of the traceless part: `H(s) = I/2 - (v_z Z + v_x X)/2`.
    pub fn bloch_components(&self, s: f64) -> (f64, f64) {
        let n = self.n_items as f64;
        let v_z = 1.0 - 2.0 * (1.0 - s) * (1.0 - 1.0 / n);
        let v_x = (1.0 - s) * (2.0 / n.sqrt()) * (1.0 - 1.0 / n).sqrt();
        (v_z, v_x)
    }

    /// The ground/excited gap `sqrt(v_z^2 + v_x^2)`; equals `1/sqrt(N)` at
    /// the avoided crossing s = 1/2.
    pub fn gap(&self, s: f64) -> f64 {
        let (v_z, v_x) = self.bloch_components(s);
        v_z.hypot(v_x)
    }
}

fn two_level_from_bloch(v_z: f64, v_x: f64) -> HermitianOperator {
    let half = 0.5;
    HermitianOperator::from_row_major(
        2,
        &[
            Complex64::new(half - half * v_z, 0.0),
            Complex64::new(-half * v_x, 0.0),
            Complex64::new(-half * v_x, 0.0),
            Complex64::new(half + half * v_z, 0.0),
        ],
    )
    .expect("two-level Bloch operator is Hermitian by construction")
}

/// The two-level effective Grover operator as an endpoint pair. The Bloch
/// components are affine in s, so linear interpolation of the endpoints
/// reproduces the family exactly at every s.
pub fn grover_effective(p: GroverParams) -> InterpolatedHamiltonian {
    let (z0, x0) = p.bloch_components(0.0);
    let (z1, x1) = p.bloch_components(1.0);
    InterpolatedHamiltonian::new(two_level_from_bloch(z0, x0), two_level_from_bloch(z1, x1))
        .expect("matching dimensions")
}

/// The full 2^n-dimensional Grover interpolation:
/// `H_i = I - |u><u|` (u uniform), `H_f = I - |m><m|`.
pub fn grover_full(n_qubits: u32, marked: usize) -> Result<InterpolatedHamiltonian> {
    if n_qubits == 0 || n_qubits > 10 {
        return Err(Error::OutOfDomain {
            context: "grover_full qubit count (need 1..=10 for dense feasibility)",
            value: n_qubits as f64,
        });
    }
    let dim = 1usize << n_qubits;
    if marked >= dim {
        return Err(Error::OutOfDomain {
            context: "marked index out of range",
            value: marked as f64,
        });
    }
    let amp = 1.0 / (dim as f64).sqrt();
    let h_i = {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let delta = if i == j { 1.0 } else { 0.0 };
                entries[i * dim + j] = Complex64::new(delta - amp * amp, 0.0);
            }
        }
        HermitianOperator::from_row_major(dim, &entries)?
    };
    let h_f = {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            let delta = if i == marked { 0.0 } else { 1.0 };
            entries[i * dim + i] = Complex64::new(delta, 0.0);
        }
        HermitianOperator::from_row_major(dim, &entries)?
    };
    InterpolatedHamiltonian::new(h_i, h_f)
}

/// The avoided-crossing family `H(s) = (2s-1) Z + delta X`, with minimum gap
/// `2*delta` at s = 1/2. One tunable knob gives a clean gap-sweep axis.
pub fn landau_zener(delta: f64) -> Result<InterpolatedHamiltonian> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::OutOfDomain {
            context: "avoided-crossing coupling delta (need 0 < delta <= 1)",
            value: delta,
        });
    }
    let h_at = |z: f64| {
        HermitianOperator::from_row_major(
            2,
            &[
                Complex64::new(z, 0.0),
                Complex64::new(delta, 0.0),
                Complex64::new(delta, 0.0),
                Complex64::new(-z, 0.0),
            ],
        )
        .expect("avoided-crossing operator is Hermitian by construction")
    };
    InterpolatedHamiltonian::new(h_at(-1.0), h_at(1.0))
}

const FORMAT_HEADER: &str = "adiaspeed-hamiltonian v1";

fn write_matrix(out: &mut String, h: &HermitianOperator) {
    let dim = h.dim();
    for i in 0..dim {
        let mut line = String::new();
        for j in 0..dim {
            let e = h.entry(i, j);
            if j > 0 {
                line.push(' ');
            }
            // 17 significant digits round-trips every f64 exactly.
            write!(line, "{:.16e} {:.16e}", e.re, e.im).unwrap();
        }
        out.push_str(&line);
        out.push('\n');
    }
}

/// Serializes the endpoint pair to the `adiaspeed-hamiltonian v1` text format.
pub fn save(h: &InterpolatedHamiltonian, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(FORMAT_HEADER);
    out.push('\n');
    writeln!(out, "dim {}", h.dim()).unwrap();
    out.push_str("h_i\n");
    write_matrix(&mut out, &h.h_i);
    out.push_str("h_f\n");
    write_matrix(&mut out, &h.h_f);
    std::fs::write(path, out)?;
    Ok(())
}

struct LineReader<'a> {
    path: &'a str,
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> LineReader<'a> {
    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        for (idx, raw) in self.lines.by_ref() {
            let trimmed = raw.trim();
            if !trimmed.is_empty() {
                return Ok((idx + 1, trimmed));
            }
        }
        Err(Error::Parse {
            path: self.path.to_string(),
            line: 0,
            message: "unexpected end of file".to_string(),
        })
    }
}

fn parse_matrix(reader: &mut LineReader, dim: usize, label: &str) -> Result<HermitianOperator> {
    let (line_no, marker) = reader.next_line()?;
    if marker != label {
        return Err(Error::Parse {
            path: reader.path.to_string(),
            line: line_no,
            message: format!("expected `{label}` marker, found `{marker}`"),
        });
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for _ in 0..dim {
        let (line_no, row) = reader.next_line()?;
        let nums: Vec<f64> = row
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| Error::Parse {
                    path: reader.path.to_string(),
                    line: line_no,
                    message: format!("invalid number `{tok}`"),
                })
            })
            .collect::<Result<_>>()?;
        if nums.len() != 2 * dim {
            return Err(Error::Parse {
                path: reader.path.to_string(),
                line: line_no,
                message: format!(
                    "row of `{label}` has {} values, expected {} (re im pairs)",
                    nums.len(),
                    2 * dim
                ),
            });
        }
        for pair in nums.chunks_exact(2) {
            entries.push(Complex64::new(pair[0], pair[1]));
        }
    }
    HermitianOperator::from_row_major(dim, &entries)
}

/// Loads an endpoint pair from the `adiaspeed-hamiltonian v1` text format.
pub fn load(path: &Path) -> Result<InterpolatedHamiltonian> {
    let text = std::fs::read_to_string(path)?;
    let path_str = path.display().to_string();
    let mut reader = LineReader {
        path: &path_str,
        lines: text.lines().enumerate(),
    };
    let (line_no, header) = reader.next_line()?;
    if header != FORMAT_HEADER {
        return Err(Error::Parse {
            path: path_str.clone(),
            line: line_no,
            message: format!("expected header `{FORMAT_HEADER}`, found `{header}`"),
        });
    }
    let (line_no, dim_line) = reader.next_line()?;
    let dim: usize = dim_line
        .strip_prefix("dim ")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Parse {
            path: path_str.clone(),
            line: line_no,
            message: format!("expected `dim <n>`, found `{dim_line}`"),
        })?;
    let h_i = parse_matrix(&mut reader, dim, "h_i")?;
    let h_f = parse_matrix(&mut reader, dim, "h_f")?;
    InterpolatedHamiltonian::new(h_i, h_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_z() -> HermitianOperator {
        HermitianOperator::from_row_major(2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
            .unwrap()
    }

    fn pauli_x() -> HermitianOperator {
        HermitianOperator::from_row_major(2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap()
    }

    #[test]
    fn endpoints_exact() {
        let h = InterpolatedHamiltonian::new(pauli_z(), pauli_x()).unwrap();
        assert_eq!(h.at(0.0).unwrap(), pauli_z());
        assert_eq!(h.at(1.0).unwrap(), pauli_x());
    }

    #[test]
    fn midpoint_affine() {
        let h = InterpolatedHamiltonian::new(pauli_z(), pauli_x()).unwrap();
        let mid = h.at(0.5).unwrap();
        let (a, b) = (h.at(0.2).unwrap(), h.at(0.8).unwrap());
        let avg = HermitianOperator::linear_combination(0.5, &a, 0.5, &b).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(mid.entry(i, j).re, avg.entry(i, j).re, epsilon = 1e-12);
                assert_relative_eq!(mid.entry(i, j).im, avg.entry(i, j).im, epsilon = 1e-12);
            }
        }
        // Z/2 + X/2 at the midpoint of the Z -> X pencil.
        assert_relative_eq!(mid.entry(0, 0).re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(mid.entry(0, 1).re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn out_of_range_rejected() {
        let h = InterpolatedHamiltonian::new(pauli_z(), pauli_x()).unwrap();
        assert!(h.at(1.001).is_err());
        assert!(h.at(-0.001).is_err());
        // Grace band for interpolant overshoot.
        assert!(h.at(1.0 + 1e-14).is_ok());
    }

    #[test]
    fn s_derivative_forms() {
        let trivial = InterpolatedHamiltonian::new(pauli_z(), pauli_z()).unwrap();
        assert_relative_eq!(trivial.s_derivative().spectral_norm(), 0.0, epsilon = 1e-14);

        let h = InterpolatedHamiltonian::new(pauli_z(), pauli_x()).unwrap();
        let d = h.s_derivative();
        assert_relative_eq!(d.entry(0, 0).re, -1.0, epsilon = 1e-15);
        assert_relative_eq!(d.entry(0, 1).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn grover_effective_derivative_norm_closed_form() {
        // ||H_f - H_i|| = sqrt(1 - 1/N) for the effective family.
        for &n in &[4u64, 64, 1024] {
            let h = grover_effective(GroverParams::new(n).unwrap());
            let expected = (1.0 - 1.0 / n as f64).sqrt();
            assert_relative_eq!(h.s_derivative().spectral_norm(), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn grover_effective_bloch_values() {
        let p = GroverParams::new(4).unwrap();
        let (v_z, v_x) = p.bloch_components(0.0);
        assert_relative_eq!(v_z, -0.5, epsilon = 1e-15);
        assert_relative_eq!(v_x, 3f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_relative_eq!(p.gap(0.0), 1.0, epsilon = 1e-15);

        let (v_z1, v_x1) = p.bloch_components(1.0);
        assert_relative_eq!(v_z1, 1.0, epsilon = 1e-15);
        assert_relative_eq!(v_x1, 0.0, epsilon = 1e-15);
        assert_relative_eq!(p.gap(1.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn grover_minimum_gap() {
        let p = GroverParams::new(16384).unwrap();
        assert_relative_eq!(p.gap(0.5), 1.0 / 128.0, epsilon = 1e-15);
        // Interpolated operator agrees with the closed form.
        let h = grover_effective(p);
        let dec = h.at(0.5).unwrap().eig();
        assert_relative_eq!(
            dec.eigenvalue(1) - dec.eigenvalue(0),
            1.0 / 128.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn grover_full_spectrum_structure() {
        let h = grover_full(2, 3).unwrap();
        let evs = h.at(0.0).unwrap().eig();
        assert_relative_eq!(evs.eigenvalue(0), 0.0, epsilon = 1e-12);
        for k in 1..4 {
            assert_relative_eq!(evs.eigenvalue(k), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn grover_full_gap_matches_effective() {
        let h = grover_full(3, 5).unwrap();
        let dec = h.at(0.5).unwrap().eig();
        let gap = dec.eigenvalue(1) - dec.eigenvalue(0);
        assert_relative_eq!(gap, 1.0 / 8f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(gap, 0.35355339059327373, epsilon = 1e-12);
    }

    #[test]
    fn grover_full_matches_effective_low_spectrum() {
        for n_qubits in 1..=6u32 {
            let n = 1u64 << n_qubits;
            let full = grover_full(n_qubits, (n - 1) as usize).unwrap();
            let eff = grover_effective(GroverParams::new(n).unwrap());
            for &s in &[0.0, 0.25, 0.5, 0.75, 1.0] {
                let fd = full.at(s).unwrap().eig();
                let ed = eff.at(s).unwrap().eig();
                // The two in-subspace levels are the lowest two: (1 +/- gap)/2 <= 1.
                assert_relative_eq!(fd.eigenvalue(0), ed.eigenvalue(0), epsilon = 1e-10);
                assert_relative_eq!(fd.eigenvalue(1), ed.eigenvalue(1), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn grover_initial_overlap() {
        let n_qubits = 4u32;
        let n = 1usize << n_qubits;
        let h = grover_full(n_qubits, 7).unwrap();
        let ground = h.at(0.0).unwrap().eig().eigenstate(0);
        let marked = crate::operators::StateVector::basis(n, 7);
        assert_relative_eq!(
            ground.inner(&marked).norm(),
            1.0 / (n as f64).sqrt(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn avoided_crossing_gap_profile() {
        let h = landau_zener(0.1).unwrap();
        let gap_at = |s: f64| {
            let d = h.at(s).unwrap().eig();
            d.eigenvalue(1) - d.eigenvalue(0)
        };
        assert_relative_eq!(gap_at(0.5), 0.2, epsilon = 1e-12);
        assert_relative_eq!(gap_at(0.0), 2.009975124224178, epsilon = 1e-12);
        // Symmetric about the crossing.
        assert_relative_eq!(gap_at(0.3), gap_at(0.7), epsilon = 1e-12);
        assert!(landau_zener(0.0).is_err());
        assert!(landau_zener(1.5).is_err());
    }

    #[test]
    fn save_load_round_trip_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grover.ham");
        let h = grover_effective(GroverParams::new(1024).unwrap());
        save(&h, &path).unwrap();
        let back = load(&path).unwrap();
        for (a, b) in [(&h.h_i, &back.h_i), (&h.h_f, &back.h_f)] {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(a.entry(i, j), b.entry(i, j), "entry ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn load_rejects_malformed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ham");

        std::fs::write(&path, "wrong header\n").unwrap();
        assert!(matches!(load(&path), Err(Error::Parse { line: 1, .. })));

        std::fs::write(
            &path,
            "adiaspeed-hamiltonian v1\ndim 2\nh_i\n1 0 0 0\n0 0 1 0\nh_f\n1 0\n0 0 1 0\n",
        )
        .unwrap();
        match load(&path) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 7);
                assert!(message.contains("re im pairs"), "{message}");
            }
            other => panic!("expected row-length parse error, got {other:?}"),
        }
    }

    #[test]
    fn load_hand_written_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pencil.ham");
        std::fs::write(
            &path,
            "adiaspeed-hamiltonian v1\n\
             dim 2\n\
             h_i\n\
             1 0 0 0\n\
             0 0 -1 0\n\
             h_f\n\
             0 0 1 0\n\
             1 0 0 0\n",
        )
        .unwrap();
        let h = load(&path).unwrap();
        assert_eq!(h.at(0.0).unwrap(), pauli_z());
        assert_eq!(h.at(1.0).unwrap(), pauli_x());
    }
}
