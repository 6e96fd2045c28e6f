//! The search Hamiltonian, its reduction to the `{|u⟩, |m⟩}` plane and the
//! instantaneous eigensystem.
//!
//! Basis ordering is `(u, m)` throughout: index 0 is the normalized uniform
//! superposition of the unmarked entries, index 1 is the marked entry. The
//! uniform superposition of all entries is then
//! `|w⟩ = √((n−1)/n)|u⟩ + (1/√n)|m⟩`.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagator::TwoLevelState;

/// A database of `n` entries with one marked index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchInstance {
    n: u64,
    marked: u64,
}

impl SearchInstance {
    pub fn new(n: u64, marked: u64) -> Result<Self> {
        if n < 2 || marked >= n {
            return Err(Error::InvalidInstance { n, marked });
        }
        Ok(Self { n, marked })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn marked(&self) -> u64 {
        self.marked
    }

    pub(crate) fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `(n−1)/n`, the squared overlap of `|w⟩` with `|u⟩`.
    pub(crate) fn unmarked_fraction(&self) -> f64 {
        (self.nf() - 1.0) / self.nf()
    }

    /// Amplitudes of `|w⟩` on `(|u⟩, |m⟩)`.
    pub fn uniform_amplitudes(&self) -> (f64, f64) {
        let n = self.nf();
        (((n - 1.0) / n).sqrt(), 1.0 / n.sqrt())
    }
}

/// Couplings `a(t)`, `b(t)` and their time derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingPoint {
    pub a: f64,
    pub b: f64,
    pub a_dot: f64,
    pub b_dot: f64,
}

impl CouplingPoint {
    pub fn new(a: f64, b: f64, a_dot: f64, b_dot: f64) -> Self {
        Self { a, b, a_dot, b_dot }
    }

    pub fn stationary(a: f64, b: f64) -> Self {
        Self::new(a, b, 0.0, 0.0)
    }
}

/// `H = mean·1 + delta·σz + omega·σx` on `(|u⟩, |m⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedHamiltonian {
    pub mean: f64,
    pub delta: f64,
    pub omega: f64,
}

impl ReducedHamiltonian {
    /// Half the gap, `√(Δ² + Ω²)`.
    pub fn half_gap(&self) -> f64 {
        self.delta.hypot(self.omega)
    }

    /// Dense `[[mean+Δ, Ω], [Ω, mean−Δ]]`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [
            [self.mean + self.delta, self.omega],
            [self.omega, self.mean - self.delta],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// Mixing angle, `|+⟩ = cosθ|u⟩ + sinθ|m⟩`; lies in `[0, π/2]` with the
    /// upper end reached only where `a = 0`.
    pub theta: f64,
    /// `λ₊ − λ₋`, evaluated directly as `2√(Δ² + Ω²)`.
    pub gap: f64,
}

impl EigenSystem {
    /// `(⟨u|+⟩, ⟨m|+⟩)`.
    pub fn plus(&self) -> (f64, f64) {
        (self.theta.cos(), self.theta.sin())
    }

    /// `(⟨u|−⟩, ⟨m|−⟩)`.
    pub fn minus(&self) -> (f64, f64) {
        (self.theta.sin(), -self.theta.cos())
    }
}

pub fn reduced_hamiltonian(point: &CouplingPoint, inst: &SearchInstance) -> ReducedHamiltonian {
    let n = inst.nf();
    let CouplingPoint { a, b, .. } = *point;
    ReducedHamiltonian {
        mean: 0.5 * (a + b),
        delta: 0.5 * (a - b) - a / n,
        omega: a * (n - 1.0).sqrt() / n,
    }
}

pub fn eigensystem(point: &CouplingPoint, inst: &SearchInstance) -> Result<EigenSystem> {
    let h = reduced_hamiltonian(point, inst);
    let half_gap = h.half_gap();
    if half_gap == 0.0 {
        return Err(Error::DegeneratePoint {
            a: point.a,
            b: point.b,
        });
    }
    // Take the root without cancellation and recover the other one from the
    // determinant ab(n−1)/n.
    let det = point.a * point.b * inst.unmarked_fraction();
    let (lambda_plus, lambda_minus) = if h.mean >= 0.0 {
        let hi = h.mean + half_gap;
        (hi, det / hi)
    } else {
        let lo = h.mean - half_gap;
        (det / lo, lo)
    };
    Ok(EigenSystem {
        lambda_plus,
        lambda_minus,
        theta: 0.5 * h.omega.atan2(h.delta),
        gap: 2.0 * half_gap,
    })
}

/// Non-adiabatic coupling `θ̇ = (√(n−1)/n)(aḃ − ȧb)/(λ₊−λ₋)²`.
pub fn theta_dot(point: &CouplingPoint, inst: &SearchInstance) -> Result<f64> {
    let n = inst.nf();
    let CouplingPoint { a, b, a_dot, b_dot } = *point;
    let gap_sq = (a - b).powi(2) + 4.0 * a * b / n;
    if gap_sq == 0.0 {
        return Err(Error::DegeneratePoint { a, b });
    }
    Ok((n - 1.0).sqrt() / n * (a * b_dot - a_dot * b) / gap_sq)
}

/// Populations `(|⟨+|ψ⟩|², |⟨−|ψ⟩|²)` of the instantaneous eigenstates.
pub fn adiabatic_projection(
    state: &TwoLevelState,
    point: &CouplingPoint,
    inst: &SearchInstance,
) -> Result<(f64, f64)> {
    let eig = eigensystem(point, inst)?;
    Ok(state.eigen_populations(&eig))
}

/// Dense `a|w⟩⟨w| + b|m⟩⟨m|` in the computational basis, for oracle checks.
pub fn full_hamiltonian(
    point: &CouplingPoint,
    inst: &SearchInstance,
    cap: usize,
) -> Result<Array2<f64>> {
    if inst.n() > cap as u64 {
        return Err(Error::OracleSizeExceeded { n: inst.n(), cap });
    }
    let dim = inst.n() as usize;
    let mut h = Array2::from_elem((dim, dim), point.a / inst.nf());
    let m = inst.marked() as usize;
    h[[m, m]] += point.b;
    Ok(h)
}
