//! Nonequilibrium temperatures of the post-swap bipartite state.
//!
//! After the swap each subsystem is thermal on its own (at `T1'` and `T2'`)
//! but the pair is generally not in mutual equilibrium. Three candidate
//! global temperatures are computed here:
//!
//! * the effective temperature, heat over entropy along the direction of
//!   fixed gap ratio, which reduces to `(C2 T1' + C1 T2') / (C1 + C2)`;
//! * the spectral temperature, built from adjacent-level log-probability
//!   slopes across the four-level spectrum;
//! * the contact temperature, of the bath that would exchange zero net heat
//!   with the pair.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::swap::{final_state, final_subsystem_temperatures, swap, EngineSetup, JointState};
use crate::thermo::{occupation, tls_entropy};

/// Largest relative step accepted by [`effective_temperature_via_differentials`].
pub const MAX_DIFFERENTIAL_STEP: f64 = 1e-3;

/// Default energy-balance tolerance for [`contact_temperature`], in units of `a1`.
pub const CONTACT_REL_TOL: f64 = 1e-12;

const CONTACT_MAX_DOUBLINGS: usize = 60;
const CONTACT_MAX_ITERATIONS: usize = 200;
const MONOTONICITY_GRID: usize = 64;

/// Heat-capacity weighted mean of the post-swap subsystem temperatures.
///
/// The weights are the *initial* canonical heat capacities, crossed:
/// `T1'` carries `C2` and `T2'` carries `C1`.
pub fn effective_temperature(setup: &EngineSetup) -> f64 {
    let (c1, c2) = setup.heat_capacities();
    let (t1_prime, t2_prime) = final_subsystem_temperatures(setup);
    let total = c1 + c2;
    if total == 0.0 {
        // both capacities underflowed; the pair is frozen and the weights
        // are equal in the limit
        return 0.5 * (t1_prime + t2_prime);
    }
    (c2 * t1_prime + c1 * t2_prime) / total
}

/// Effective temperature as the ratio of total heat to total entropy change
/// along `da2 = nu da1`, by central differences with `da1 = step * a1`.
pub fn effective_temperature_via_differentials(setup: &EngineSetup, step: f64) -> Result<f64> {
    if !(step > 0.0 && step <= MAX_DIFFERENTIAL_STEP) {
        return Err(Error::invalid(format!(
            "relative step must lie in (0, {MAX_DIFFERENTIAL_STEP}], got {step}"
        )));
    }
    let baths = setup.baths();
    let (a1, a2, nu) = (setup.a1(), setup.a2(), setup.nu());
    let h = step * a1;

    let r_up = occupation(a1 + h, baths.t_hot())?;
    let r_down = occupation(a1 - h, baths.t_hot())?;
    let s_up = occupation(a2 + nu * h, baths.t_cold())?;
    let s_down = occupation(a2 - nu * h, baths.t_cold())?;

    // levels held fixed: subsystem 1 sits on a1 with occupation s2, and
    // subsystem 2 on a2 with occupation r2
    let heat = a1 * (s_up - s_down) + a2 * (r_up - r_down);
    let entropy =
        (tls_entropy(r_up)? + tls_entropy(s_up)?) - (tls_entropy(r_down)? + tls_entropy(s_down)?);
    Ok(heat / entropy)
}

fn check_ratios(xi: f64, theta: f64) -> Result<()> {
    if !(xi > 0.0) || xi.is_nan() {
        return Err(Error::invalid(format!("xi must be positive, got {xi}")));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::invalid(format!(
            "theta must lie in (0, 1), got {theta}"
        )));
    }
    Ok(())
}

/// `T/T1 = sqrt(xi) (1 + theta) / (1 + xi)`, valid when both `a_i/T_i` are
/// small so that `xi = C1/C2 -> (theta/nu)^2`.
pub fn effective_temperature_small_x_limit(xi: f64, theta: f64) -> Result<f64> {
    check_ratios(xi, theta)?;
    if xi.is_infinite() {
        return Ok(0.0);
    }
    Ok(xi.sqrt() * (1.0 + theta) / (1.0 + xi))
}

/// `T/T1 = (theta + xi) / (1 + xi)`, the `a2 -> a1` limit where the
/// subsystems simply trade temperatures.
pub fn effective_temperature_equal_gap_limit(xi: f64, theta: f64) -> Result<f64> {
    check_ratios(xi, theta)?;
    if xi.is_infinite() {
        return Ok(1.0);
    }
    Ok((theta + xi) / (1.0 + xi))
}

/// Spectral temperature of a diagonal state with a non-degenerate spectrum.
///
/// `1/T_s = -(1 - (P_0 + P_M)/2)^-1 sum_i (P_i + P_{i-1})/2 *
/// (ln P_i - ln P_{i-1}) / (E_i - E_{i-1})`.
pub fn spectral_temperature_general(state: &JointState) -> Result<f64> {
    let energies = state.energies();
    let probs = state.probabilities();
    let last = probs.len() - 1;
    let mut slope_sum = 0.0;
    for i in 1..=last {
        let gap = energies[i] - energies[i - 1];
        if !(gap > 0.0) {
            return Err(Error::Degenerate(format!(
                "levels {} and {} are not separated",
                i - 1,
                i
            )));
        }
        let weight = 0.5 * (probs[i] + probs[i - 1]);
        slope_sum += weight * (probs[i].ln() - probs[i - 1].ln()) / gap;
    }
    let norm = 1.0 - 0.5 * (probs[0] + probs[last]);
    let beta = -slope_sum / norm;
    if !(beta > 0.0) {
        return Err(Error::invalid(format!(
            "state has non-positive inverse spectral temperature {beta}"
        )));
    }
    Ok(1.0 / beta)
}

/// `x = r1 + s1 - 2 r1 s1`, the total probability of the two singly
/// excited levels.
pub fn spectral_weight(setup: &EngineSetup) -> f64 {
    let (r1, s1) = (1.0 - setup.r2(), 1.0 - setup.s2());
    r1 + s1 - 2.0 * r1 * s1
}

/// Closed form of the spectral temperature of the post-swap state:
/// `1/T_s = (1/T1') (nu - theta)/(nu - nu^2) x/(1+x) + (1/T2') 1/(1+x)`.
pub fn spectral_temperature_closed(setup: &EngineSetup) -> Result<f64> {
    let nu = setup.nu();
    let theta = setup.baths().theta();
    let spread = nu - nu * nu;
    if spread == 0.0 {
        return Err(Error::Degenerate("gap ratio nu = 1".into()));
    }
    let x = spectral_weight(setup);
    let (t1_prime, t2_prime) = final_subsystem_temperatures(setup);
    let beta = (nu - theta) / spread * x / (1.0 + x) / t1_prime + 1.0 / ((1.0 + x) * t2_prime);
    if !(beta > 0.0) {
        return Err(Error::invalid(format!(
            "non-positive inverse spectral temperature {beta} at nu = {nu}"
        )));
    }
    Ok(1.0 / beta)
}

/// Canonical mean energy of the two subsystems brought to one temperature.
fn canonical_energy(a1: f64, a2: f64, temperature: f64) -> Result<f64> {
    Ok(a1 * occupation(a1, temperature)? + a2 * occupation(a2, temperature)?)
}

/// Checks that the canonical energy increases across `[lo, hi]` on a
/// log-spaced grid. Equal neighbours are tolerated only where both
/// occupations have hit the underflow floor.
fn check_energy_monotone(a1: f64, a2: f64, lo: f64, hi: f64) -> Result<()> {
    let ratio = (hi / lo).ln() / (MONOTONICITY_GRID - 1) as f64;
    let mut previous = canonical_energy(a1, a2, lo)?;
    for k in 1..MONOTONICITY_GRID {
        let t = lo * (ratio * k as f64).exp();
        let current = canonical_energy(a1, a2, t)?;
        let frozen = a2 / t > 700.0;
        if current < previous || (current == previous && !frozen) {
            return Err(Error::NonMonotonic { temperature: t });
        }
        previous = current;
    }
    Ok(())
}

/// Temperature of the bath that exchanges zero net heat with the post-swap
/// pair: the root of `a1 p(a1, T) + a2 p(a2, T) = a1 s2 + a2 r2`.
///
/// `abs_tol` bounds the energy-balance residual; [`CONTACT_REL_TOL`]` * a1`
/// is the usual choice.
pub fn contact_temperature(setup: &EngineSetup, abs_tol: f64) -> Result<f64> {
    if !(abs_tol > 0.0) {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {abs_tol}"
        )));
    }
    let (a1, a2) = (setup.a1(), setup.a2());
    let target = swap(setup).u_final;
    let limit = 0.5 * (a1 + a2);
    if target >= limit {
        return Err(Error::UnreachableEnergy { target, limit });
    }
    let balance = |t: f64| canonical_energy(a1, a2, t).map(|e| e - target);

    let (t1_prime, t2_prime) = final_subsystem_temperatures(setup);
    let mut lo = 1e-6 * t1_prime.min(t2_prime);
    let mut hi = 10.0 * t1_prime.max(t2_prime);
    let mut doublings = 0;
    while balance(hi)? < 0.0 {
        if doublings == CONTACT_MAX_DOUBLINGS {
            return Err(Error::NonConvergence {
                method: "contact bracket",
                detail: format!("balance still negative at T = {hi} after {doublings} doublings"),
            });
        }
        hi *= 2.0;
        doublings += 1;
    }
    if balance(lo)? > 0.0 {
        return Err(Error::NonConvergence {
            method: "contact bracket",
            detail: format!("balance already positive at lower end T = {lo}"),
        });
    }
    check_energy_monotone(a1, a2, lo, hi)?;

    let mut mid = 0.5 * (lo + hi);
    let mut residual = balance(mid)?;
    for _ in 0..CONTACT_MAX_ITERATIONS {
        if residual.abs() < abs_tol || hi - lo < 1e-14 * hi {
            break;
        }
        if residual < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
        residual = balance(mid)?;
    }
    if residual.abs() < abs_tol {
        Ok(mid)
    } else {
        Err(Error::NonConvergence {
            method: "contact bisection",
            detail: format!("bracket [{lo}, {hi}] with residual {residual}, tolerance {abs_tol}"),
        })
    }
}

/// Harmonic mean `2 T1' T2' / (T1' + T2')`, the effective temperature at the
/// global maximum of work.
pub fn max_work_effective_temperature(t1_prime: f64, t2_prime: f64) -> Result<f64> {
    if !(t1_prime > 0.0 && t2_prime > 0.0) {
        return Err(Error::invalid(format!(
            "temperatures must be positive, got ({t1_prime}, {t2_prime})"
        )));
    }
    Ok(2.0 * t1_prime * t2_prime / (t1_prime + t2_prime))
}

/// All three global temperatures for one setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperatureReport {
    pub setup: EngineSetup,
    pub nu: f64,
    pub t1_prime: f64,
    pub t2_prime: f64,
    pub t_effective: f64,
    pub t_spectral: f64,
    pub t_contact: f64,
    pub x_aux: f64,
}

impl TemperatureReport {
    pub fn new(setup: &EngineSetup) -> Result<Self> {
        let (t1_prime, t2_prime) = final_subsystem_temperatures(setup);
        Ok(TemperatureReport {
            setup: *setup,
            nu: setup.nu(),
            t1_prime,
            t2_prime,
            t_effective: effective_temperature(setup),
            t_spectral: spectral_temperature_general(&final_state(setup)?)?,
            t_contact: contact_temperature(setup, CONTACT_REL_TOL * setup.a1())?,
            x_aux: spectral_weight(setup),
        })
    }
}
