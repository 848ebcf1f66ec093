//! The two-TLS engine and its swap work-extraction step.
//!
//! Subsystem 1 (gap `a1`) starts thermal at the hot bath `T1`, subsystem 2
//! (gap `a2 < a1`) at the cold bath `T2`. The maximum-work unitary exchanges
//! the two occupation distributions: afterwards subsystem 1 carries the cold
//! occupation `s2` and subsystem 2 the hot occupation `r2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::thermo::{occupation, tls_entropy, BathPair, TlsThermal};

/// Largest relative step accepted by the finite-difference checks.
pub const MAX_CHECK_STEP: f64 = 1e-2;

/// Gap pair `a1 > a2 > 0` coupled to a bath pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EngineSetup {
    baths: BathPair,
    hot: TlsThermal,
    cold: TlsThermal,
}

impl EngineSetup {
    pub fn new(a1: f64, a2: f64, baths: BathPair) -> Result<Self> {
        if !(a2 > 0.0 && a2.is_finite()) {
            return Err(Error::invalid(format!(
                "a2 must be positive and finite, got {a2}"
            )));
        }
        if !a1.is_finite() {
            return Err(Error::invalid(format!("a1 must be finite, got {a1}")));
        }
        if a1 <= a2 {
            return Err(Error::invalid(format!(
                "a1 must exceed a2 (a1 = {a1}, a2 = {a2})"
            )));
        }
        Ok(EngineSetup {
            baths,
            hot: TlsThermal::new(a1, baths.t_hot())?,
            cold: TlsThermal::new(a2, baths.t_cold())?,
        })
    }

    /// Setup with `a2 = nu * a1`.
    pub fn from_gap_ratio(a1: f64, nu: f64, baths: BathPair) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::invalid(format!("nu must lie in (0, 1), got {nu}")));
        }
        Self::new(a1, nu * a1, baths)
    }

    pub fn a1(&self) -> f64 {
        self.hot.gap
    }

    pub fn a2(&self) -> f64 {
        self.cold.gap
    }

    pub fn baths(&self) -> BathPair {
        self.baths
    }

    /// Initial thermal state of subsystem 1.
    pub fn hot(&self) -> &TlsThermal {
        &self.hot
    }

    /// Initial thermal state of subsystem 2.
    pub fn cold(&self) -> &TlsThermal {
        &self.cold
    }

    /// Gap ratio `a2 / a1`.
    pub fn nu(&self) -> f64 {
        self.a2() / self.a1()
    }

    /// Engine efficiency `1 - a2/a1`.
    pub fn eta(&self) -> f64 {
        1.0 - self.nu()
    }

    /// Excited occupation of subsystem 1 at `T1`.
    pub fn r2(&self) -> f64 {
        self.hot.p_excited
    }

    /// Excited occupation of subsystem 2 at `T2`.
    pub fn s2(&self) -> f64 {
        self.cold.p_excited
    }

    /// Initial canonical heat capacities `(C1, C2)`.
    pub fn heat_capacities(&self) -> (f64, f64) {
        (self.hot.heat_capacity, self.cold.heat_capacity)
    }
}

/// Eigen-decomposition of a diagonal state: level energies and occupation
/// probabilities, ordered by increasing energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointState {
    energies: Vec<f64>,
    probabilities: Vec<f64>,
    mean_energy: f64,
    total_entropy: f64,
}

impl JointState {
    pub fn from_levels(energies: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        if energies.len() != probabilities.len() {
            return Err(Error::invalid(format!(
                "{} energies but {} probabilities",
                energies.len(),
                probabilities.len()
            )));
        }
        if energies.len() < 2 {
            return Err(Error::invalid("a state needs at least two levels"));
        }
        for pair in energies.windows(2) {
            if pair[1] == pair[0] {
                return Err(Error::Degenerate(format!(
                    "adjacent levels share energy {}",
                    pair[0]
                )));
            }
            if !(pair[1] > pair[0]) {
                return Err(Error::invalid(format!(
                    "energies must be increasing, got {} after {}",
                    pair[1], pair[0]
                )));
            }
        }
        if let Some(&p) = probabilities.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::invalid(format!(
                "level probabilities must lie in (0, 1), got {p}"
            )));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let mean_energy = energies
            .iter()
            .zip(&probabilities)
            .map(|(e, p)| e * p)
            .sum();
        let total_entropy = -probabilities.iter().map(|p| p * p.ln()).sum::<f64>();
        Ok(JointState {
            energies,
            probabilities,
            mean_energy,
            total_entropy,
        })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn mean_energy(&self) -> f64 {
        self.mean_energy
    }

    /// Von Neumann entropy of the diagonal state, in nats.
    pub fn total_entropy(&self) -> f64 {
        self.total_entropy
    }
}

/// Levels `{0, a2, a1, a1 + a2}` of the product of a subsystem-1 TLS with
/// excited occupation `p1` and a subsystem-2 TLS with excited occupation `p2`.
fn product_state(setup: &EngineSetup, p1: f64, p2: f64) -> Result<JointState> {
    let (a1, a2) = (setup.a1(), setup.a2());
    let (q1, q2) = (1.0 - p1, 1.0 - p2);
    JointState::from_levels(
        vec![0.0, a2, a1, a1 + a2],
        vec![q1 * q2, q1 * p2, p1 * q2, p1 * p2],
    )
}

/// Product of the two initial thermal states: probability `r1 s2` on level
/// `a2` and `r2 s1` on level `a1`.
pub fn initial_state(setup: &EngineSetup) -> Result<JointState> {
    product_state(setup, setup.r2(), setup.s2())
}

/// State after the swap: probability `r2 s1` on level `a2` and `r1 s2` on
/// level `a1`.
pub fn final_state(setup: &EngineSetup) -> Result<JointState> {
    product_state(setup, setup.s2(), setup.r2())
}

/// Energetics and post-swap subsystem thermodynamics.
///
/// `work` is the change of mean energy, negative when work is extracted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwapOutcome {
    pub work: f64,
    pub u_initial: f64,
    pub u_final: f64,
    pub du1: f64,
    pub du2: f64,
    pub t1_prime: f64,
    pub t2_prime: f64,
    pub s1_prime: f64,
    pub s2_prime: f64,
    pub c1_prime: f64,
    pub c2_prime: f64,
    pub extracting: bool,
}

impl SwapOutcome {
    /// Work delivered to the source, `max(0, -W)`.
    pub fn work_extracted(&self) -> f64 {
        (-self.work).max(0.0)
    }
}

pub fn swap(setup: &EngineSetup) -> SwapOutcome {
    let (a1, a2) = (setup.a1(), setup.a2());
    let (r2, s2) = (setup.r2(), setup.s2());
    let (du1, du2) = energy_flows(setup);
    let (t1_prime, t2_prime) = final_subsystem_temperatures(setup);
    let (c1_prime, c2_prime) = final_heat_capacities(setup);
    SwapOutcome {
        work: (a1 - a2) * (s2 - r2),
        u_initial: a1 * r2 + a2 * s2,
        u_final: a1 * s2 + a2 * r2,
        du1,
        du2,
        t1_prime,
        t2_prime,
        s1_prime: setup.cold.entropy,
        s2_prime: setup.hot.entropy,
        c1_prime,
        c2_prime,
        extracting: is_work_extracting(setup),
    }
}

/// Whether the swap delivers net work: `s2 < r2`, equivalently
/// `T1/T2 > a1/a2` or `nu > theta`.
pub fn is_work_extracting(setup: &EngineSetup) -> bool {
    setup.s2() < setup.r2()
}

pub fn efficiency(setup: &EngineSetup) -> f64 {
    setup.eta()
}

/// `(T1', T2') = (T2 a1/a2, T1 a2/a1)`.
pub fn final_subsystem_temperatures(setup: &EngineSetup) -> (f64, f64) {
    let baths = setup.baths();
    (
        baths.t_cold() * setup.a1() / setup.a2(),
        baths.t_hot() * setup.a2() / setup.a1(),
    )
}

/// `(C1', C2') = (C2, C1)`: the swap exchanges the heat capacities.
pub fn final_heat_capacities(setup: &EngineSetup) -> (f64, f64) {
    let (c1, c2) = setup.heat_capacities();
    (c2, c1)
}

/// Subsystem energy changes `(dU1, dU2) = (a1 (s2 - r2), a2 (r2 - s2))`.
pub fn energy_flows(setup: &EngineSetup) -> (f64, f64) {
    let diff = setup.s2() - setup.r2();
    (setup.a1() * diff, -setup.a2() * diff)
}

/// Relative residuals of the finite-difference heat/entropy ratios against
/// the closed-form final temperatures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatEntropyCheck {
    /// `dQ1'/dS1'` from a perturbation of `a2` alone.
    pub ratio1: f64,
    /// `dQ2'/dS2'` from a perturbation of `a1` alone.
    pub ratio2: f64,
    pub residual1: f64,
    pub residual2: f64,
}

/// Recovers each final subsystem temperature as heat over entropy.
///
/// Heat is the change of mean energy at fixed levels, `dQ1' = a1 ds2`, and
/// `dS1'` is the change of the binary entropy of `s2`. Both are central
/// differences under `a2 -> a2 (1 +- step)`; subsystem 2 is the mirror image
/// under a perturbation of `a1`.
pub fn verify_temperature_as_heat_entropy_ratio(
    setup: &EngineSetup,
    step: f64,
) -> Result<HeatEntropyCheck> {
    if !(step > 0.0 && step <= MAX_CHECK_STEP) {
        return Err(Error::invalid(format!(
            "relative step must lie in (0, {MAX_CHECK_STEP}], got {step}"
        )));
    }
    let baths = setup.baths();
    let (t1_prime, t2_prime) = final_subsystem_temperatures(setup);

    let ratio = |held_gap: f64, gap: f64, temperature: f64| -> Result<f64> {
        let h = step * gap;
        let p_up = occupation(gap + h, temperature)?;
        let p_down = occupation(gap - h, temperature)?;
        let dq = held_gap * (p_up - p_down);
        let ds = tls_entropy(p_up)? - tls_entropy(p_down)?;
        Ok(dq / ds)
    };
    let ratio1 = ratio(setup.a1(), setup.a2(), baths.t_cold())?;
    let ratio2 = ratio(setup.a2(), setup.a1(), baths.t_hot())?;
    Ok(HeatEntropyCheck {
        ratio1,
        ratio2,
        residual1: ((ratio1 - t1_prime) / t1_prime).abs(),
        residual2: ((ratio2 - t2_prime) / t2_prime).abs(),
    })
}
