//! Single two-level-system thermodynamics and the classical two-body baseline.
//!
//! Units have `k_B = 1`: gaps and temperatures share one energy unit and
//! entropies are in nats. A two-level system (TLS) with gap `a` at
//! temperature `T` has excited-state occupation `1 / (1 + exp(a/T))`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Floor returned by [`occupation`] once `exp(-a/T)` underflows.
pub const OCCUPATION_FLOOR: f64 = f64::from_bits(1);

/// Above this `a/T` the occupation `1/(1+exp(a/T))` is `exp(-a/T)` to the
/// last bit and `exp(a/T)` would overflow.
const LARGE_ARGUMENT: f64 = 700.0;

fn check_gap(gap: f64) -> Result<()> {
    if gap > 0.0 && !gap.is_nan() {
        Ok(())
    } else {
        Err(Error::invalid(format!("gap must be positive, got {gap}")))
    }
}

fn check_temperature(temperature: f64) -> Result<()> {
    if temperature > 0.0 && !temperature.is_nan() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "temperature must be positive, got {temperature}"
        )))
    }
}

/// Unchecked occupation; `x = a/T >= 0`. Returns the value and whether it
/// was clamped to [`OCCUPATION_FLOOR`].
pub(crate) fn occupation_of_ratio(x: f64) -> (f64, bool) {
    let p = if x <= LARGE_ARGUMENT {
        1.0 / (1.0 + x.exp())
    } else {
        (-x).exp()
    };
    if p > 0.0 {
        (p, false)
    } else {
        (OCCUPATION_FLOOR, true)
    }
}

/// Excited-state occupation of a TLS with the given gap at the given
/// temperature.
///
/// `temperature = f64::INFINITY` is accepted and yields exactly 1/2. When the
/// Boltzmann factor underflows the result is clamped to [`OCCUPATION_FLOOR`]
/// rather than zero; [`TlsThermal::saturated`] reports this.
pub fn occupation(gap: f64, temperature: f64) -> Result<f64> {
    check_gap(gap)?;
    check_temperature(temperature)?;
    Ok(occupation_of_ratio(gap / temperature).0)
}

/// Derivative of the occupation with respect to the gap at fixed temperature,
/// `-exp(a/T) / (T (1 + exp(a/T))^2) = -p (1 - p) / T`.
pub fn occupation_gap_derivative(gap: f64, temperature: f64) -> Result<f64> {
    check_gap(gap)?;
    check_temperature(temperature)?;
    let x = gap / temperature;
    if !x.is_finite() {
        return Ok(0.0);
    }
    let e = (-x).exp();
    Ok(-e / ((1.0 + e) * (1.0 + e)) / temperature)
}

/// Binary Shannon entropy in nats.
pub fn tls_entropy(p_excited: f64) -> Result<f64> {
    if !(p_excited > 0.0 && p_excited < 1.0) {
        return Err(Error::invalid(format!(
            "probability must lie in (0, 1), got {p_excited}"
        )));
    }
    let q = 1.0 - p_excited;
    Ok(-(p_excited * p_excited.ln() + q * (-p_excited).ln_1p()))
}

/// Canonical heat capacity `x^2 exp(x) / (1 + exp(x))^2` with `x = a/T`
/// (the Schottky form).
pub fn tls_heat_capacity(gap: f64, temperature: f64) -> Result<f64> {
    check_gap(gap)?;
    check_temperature(temperature)?;
    let x = gap / temperature;
    if !x.is_finite() {
        return Ok(0.0);
    }
    let e = (-x).exp();
    Ok(x * x * e / ((1.0 + e) * (1.0 + e)))
}

/// Temperature at which a TLS of the given gap has excited occupation `p`.
///
/// Inverse of [`occupation`]. Occupations at or above 1/2 would need an
/// infinite or negative temperature and are rejected.
pub fn tls_temperature_from_occupation(gap: f64, p_excited: f64) -> Result<f64> {
    check_gap(gap)?;
    if !(p_excited > 0.0) || p_excited.is_nan() {
        return Err(Error::invalid(format!(
            "occupation must be positive, got {p_excited}"
        )));
    }
    if p_excited >= 0.5 {
        return Err(Error::PopulationInversion(p_excited));
    }
    let log_odds = (-p_excited).ln_1p() - p_excited.ln();
    Ok(gap / log_odds)
}

/// Full thermal description of one TLS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TlsThermal {
    pub gap: f64,
    pub temperature: f64,
    pub p_excited: f64,
    pub entropy: f64,
    pub heat_capacity: f64,
    /// The occupation underflowed and was clamped to [`OCCUPATION_FLOOR`].
    pub saturated: bool,
}

impl TlsThermal {
    pub fn new(gap: f64, temperature: f64) -> Result<Self> {
        check_gap(gap)?;
        check_temperature(temperature)?;
        let (p_excited, saturated) = occupation_of_ratio(gap / temperature);
        Ok(TlsThermal {
            gap,
            temperature,
            p_excited,
            entropy: tls_entropy(p_excited)?,
            heat_capacity: tls_heat_capacity(gap, temperature)?,
            saturated,
        })
    }

    /// The dimensionless ratio `a/T`.
    pub fn ratio(&self) -> f64 {
        self.gap / self.temperature
    }
}

/// Hot and cold reservoir temperatures, `T1 >= T2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BathPair {
    t_hot: f64,
    t_cold: f64,
}

impl BathPair {
    /// A pair with a strict gradient, `T1 > T2 > 0`.
    pub fn new(t_hot: f64, t_cold: f64) -> Result<Self> {
        if !(t_cold > 0.0 && t_cold.is_finite()) {
            return Err(Error::invalid(format!(
                "T2 must be positive and finite, got {t_cold}"
            )));
        }
        if !t_hot.is_finite() {
            return Err(Error::invalid(format!("T1 must be finite, got {t_hot}")));
        }
        if t_hot <= t_cold {
            return Err(Error::invalid(format!(
                "T1 must exceed T2 (T1 = {t_hot}, T2 = {t_cold})"
            )));
        }
        Ok(BathPair { t_hot, t_cold })
    }

    /// Both reservoirs at one temperature. No work can be extracted from
    /// such a pair; it exists so the no-gradient limits can be evaluated.
    pub fn isothermal(temperature: f64) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::invalid(format!(
                "temperature must be positive and finite, got {temperature}"
            )));
        }
        Ok(BathPair {
            t_hot: temperature,
            t_cold: temperature,
        })
    }

    pub fn t_hot(&self) -> f64 {
        self.t_hot
    }

    pub fn t_cold(&self) -> f64 {
        self.t_cold
    }

    /// `T2 / T1`.
    pub fn theta(&self) -> f64 {
        self.t_cold / self.t_hot
    }

    pub fn is_isothermal(&self) -> bool {
        self.t_hot == self.t_cold
    }
}

/// Common final temperature of two bodies with constant heat capacities
/// after reversible (entropy-conserving) work extraction:
/// `T1^(xi/(1+xi)) * T2^(1/(1+xi))` with `xi = C1/C2`.
pub fn classical_final_temperature(xi: f64, baths: &BathPair) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(Error::invalid(format!("xi must be positive, got {xi}")));
    }
    if baths.is_isothermal() || xi == f64::INFINITY {
        return Ok(baths.t_hot);
    }
    let (ln_hot, ln_cold) = (baths.t_hot.ln(), baths.t_cold.ln());
    Ok((ln_hot + (ln_cold - ln_hot) / (1.0 + xi)).exp())
}

/// Work delivered by two bodies with constant heat capacities `c1`, `c2`
/// brought to their common reversible final temperature.
pub fn classical_work(c1: f64, c2: f64, baths: &BathPair) -> Result<f64> {
    if !(c1 > 0.0 && c2 > 0.0) || !c1.is_finite() || !c2.is_finite() {
        return Err(Error::invalid(format!(
            "heat capacities must be positive and finite, got ({c1}, {c2})"
        )));
    }
    let t_final = classical_final_temperature(c1 / c2, baths)?;
    let work = c1 * (baths.t_hot - t_final) + c2 * (baths.t_cold - t_final);
    // weighted AM >= GM; clamp rounding just below zero near T1 = T2
    Ok(work.max(0.0))
}

/// Efficiency of the cycle formed by reversible work extraction followed by
/// re-thermalisation of each body at its own bath.
pub fn classical_efficiency(xi: f64, theta: f64) -> Result<f64> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::invalid(format!(
            "xi must be positive and finite, got {xi}"
        )));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::invalid(format!(
            "theta must lie in (0, 1), got {theta}"
        )));
    }
    // with u = ln(theta)/(1 + xi): eta = 1 + (theta - e^u) / (xi (1 - e^u)),
    // regrouped over a common denominator so that theta -> 1 does not cancel
    let u = theta.ln() / (1.0 + xi);
    let numerator = u.exp() * (xi * u).exp_m1() - xi * u.exp_m1();
    Ok(numerator / (-xi * u.exp_m1()))
}

/// Classical macroscopic reference for a capacity ratio and bath pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalBaseline {
    pub xi: f64,
    pub t_final: f64,
    /// Work per unit `C2`.
    pub work: f64,
    pub efficiency: f64,
}

pub fn classical_baseline(xi: f64, baths: &BathPair) -> Result<ClassicalBaseline> {
    let t_final = classical_final_temperature(xi, baths)?;
    Ok(ClassicalBaseline {
        xi,
        t_final,
        work: classical_work(xi, 1.0, baths)?,
        efficiency: classical_efficiency(xi, baths.theta())?,
    })
}
