//! Maximum-work searches over the engine gaps.
//!
//! At fixed gap ratio `nu` (fixed efficiency) the extracted work
//! `-W(a1) = a1 (1 - nu) (r2(a1) - s2(nu a1))` vanishes at both ends of
//! `a1 in (0, inf)` and has one interior maximum. It is located by a
//! log-spaced scan, narrowed by golden-section search and polished by
//! bisection on the analytic slope. The global maximum nests the same
//! procedure inside a search over `nu`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::swap::{final_subsystem_temperatures, swap, EngineSetup};
use crate::temperature::{effective_temperature, max_work_effective_temperature};
use crate::thermo::{occupation_of_ratio, tls_heat_capacity, BathPair};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const MIN_REL_TOL: f64 = 1e-14;
pub const MAX_REL_TOL: f64 = 1e-6;

/// Log-spaced scan over `a1 in [1e-3 T1, 1e3 T1]`.
const SCAN_POINTS: usize = 256;
const SCAN_LO: f64 = 1e-3;
const SCAN_HI: f64 = 1e3;
/// Relative spread below which scanned values count as a plateau.
const PLATEAU_TOL: f64 = 1e-14;
const MAX_INNER_ITERATIONS: usize = 200;
const MAX_OUTER_ITERATIONS: usize = 200;
/// Golden-section stops at this relative bracket width; below it the
/// objective is too flat to rank points reliably and the slope takes over.
const GOLDEN_REL_WIDTH: f64 = 1e-5;
/// Open interval `(theta, 1)` is shrunk by this much on each side.
const NU_MARGIN: f64 = 1e-9;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn p(gap: f64, temperature: f64) -> f64 {
    occupation_of_ratio(gap / temperature).0
}

/// `dp/da = -exp(a/T) / (T (1 + exp(a/T))^2)`.
fn dp(gap: f64, temperature: f64) -> f64 {
    let e = (-gap / temperature).exp();
    -e / ((1.0 + e) * (1.0 + e)) / temperature
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if (MIN_REL_TOL..=MAX_REL_TOL).contains(&rel_tol) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "rel_tol must lie in [{MIN_REL_TOL}, {MAX_REL_TOL}], got {rel_tol}"
        )))
    }
}

/// Extracted work `-W` as a function of `a1` at fixed gap ratio.
#[derive(Debug, Clone, Copy)]
struct FixedRatio {
    t_hot: f64,
    t_cold: f64,
    nu: f64,
}

impl FixedRatio {
    fn extracted(&self, a1: f64) -> f64 {
        a1 * (1.0 - self.nu) * (p(a1, self.t_hot) - p(self.nu * a1, self.t_cold))
    }

    /// `d(-W)/da1`.
    fn slope(&self, a1: f64) -> f64 {
        let a2 = self.nu * a1;
        let occupations = p(a1, self.t_hot) - p(a2, self.t_cold);
        let derivatives = dp(a1, self.t_hot) - self.nu * dp(a2, self.t_cold);
        (1.0 - self.nu) * (occupations + a1 * derivatives)
    }

    /// `d(-W)/dnu` at fixed `a1`; by the envelope theorem this is the slope
    /// of the maximised work in `nu` when evaluated at the inner optimum.
    fn nu_slope(&self, a1: f64) -> f64 {
        let a2 = self.nu * a1;
        let occupations = p(a1, self.t_hot) - p(a2, self.t_cold);
        -a1 * (occupations + a1 * (1.0 - self.nu) * dp(a2, self.t_cold))
    }
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`. Returns the
/// final bracket and the iteration count.
fn golden_section_max(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    rel_width: f64,
    max_iterations: usize,
) -> (f64, f64, usize) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut iterations = 0;
    while iterations < max_iterations && hi - lo > rel_width * 0.5 * (lo.abs() + hi.abs()) {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        iterations += 1;
    }
    (lo, hi, iterations)
}

/// Bisection for the downward zero crossing of `slope` on `[lo, hi]`
/// (`slope(lo) >= 0 >= slope(hi)`). Returns the midpoint, the final width
/// and the iteration count.
fn bisect_decreasing(
    slope: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
    max_iterations: usize,
) -> (f64, f64, usize) {
    let mut iterations = 0;
    while iterations < max_iterations {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid || mid <= lo || mid >= hi {
            break;
        }
        let s = slope(mid);
        if s == 0.0 {
            return (mid, 0.0, iterations + 1);
        }
        if s > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    (0.5 * (lo + hi), hi - lo, iterations)
}

/// Best engine at one efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxWorkAtEfficiency {
    pub nu: f64,
    pub a1_star: f64,
    /// Work at the optimum; negative, the most negative `W` on this ratio.
    pub work_star: f64,
    pub setup_star: EngineSetup,
    /// The slope bisection reached a bracket of relative width `rel_tol`.
    pub converged: bool,
    pub iterations: usize,
    /// `|d(-W)/da1| * a1 / |W|` at the optimum, from the analytic slope.
    pub gradient_residual: f64,
}

/// Maximises the extracted work over `a1` with `a2 = nu a1` held in ratio.
pub fn maximize_work_at_efficiency(
    baths: &BathPair,
    nu: f64,
    rel_tol: f64,
) -> Result<MaxWorkAtEfficiency> {
    check_rel_tol(rel_tol)?;
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::invalid(format!("nu must lie in (0, 1), got {nu}")));
    }
    let theta = baths.theta();
    if nu <= theta {
        return Err(Error::NoExtraction { nu, theta });
    }
    let objective = FixedRatio {
        t_hot: baths.t_hot(),
        t_cold: baths.t_cold(),
        nu,
    };

    let scan_lo = SCAN_LO * baths.t_hot();
    let step = (SCAN_HI / SCAN_LO).ln() / (SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| scan_lo * (step * k as f64).exp())
        .collect();
    let values: Vec<f64> = grid.iter().map(|&a| objective.extracted(a)).collect();
    let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(peak > 0.0) {
        return Err(Error::NonConvergence {
            method: "work scan",
            detail: format!("no positive extracted work found at nu = {nu}"),
        });
    }
    // first point of a plateau wins
    let best = values
        .iter()
        .position(|&v| v >= peak - PLATEAU_TOL * peak)
        .expect("peak is attained on the grid");
    if best == 0 || best == SCAN_POINTS - 1 {
        return Err(Error::NonConvergence {
            method: "work scan",
            detail: format!("maximum at scan boundary a1 = {} for nu = {nu}", grid[best]),
        });
    }
    let (outer_lo, outer_hi) = (grid[best - 1], grid[best + 1]);

    let (mut lo, mut hi, golden_iterations) = golden_section_max(
        |a| objective.extracted(a),
        outer_lo,
        outer_hi,
        GOLDEN_REL_WIDTH,
        MAX_INNER_ITERATIONS,
    );
    if !(objective.slope(lo) >= 0.0 && objective.slope(hi) <= 0.0) {
        lo = outer_lo;
        hi = outer_hi;
    }
    let (a1_star, width, bisect_iterations) = bisect_decreasing(
        |a| objective.slope(a),
        lo,
        hi,
        rel_tol,
        MAX_INNER_ITERATIONS - golden_iterations,
    );

    let setup_star = EngineSetup::from_gap_ratio(a1_star, nu, *baths)?;
    let work_star = swap(&setup_star).work;
    Ok(MaxWorkAtEfficiency {
        nu,
        a1_star,
        work_star,
        setup_star,
        converged: width <= rel_tol * a1_star,
        iterations: golden_iterations + bisect_iterations,
        gradient_residual: (objective.slope(a1_star) * a1_star / work_star).abs(),
    })
}

/// `|dr2/da1 - ds2/da2| / max(|dr2/da1|, |ds2/da2|)`; zero exactly where the
/// two occupation slopes balance, as they do at the global work maximum.
pub fn stationarity_residual(setup: &EngineSetup) -> f64 {
    let baths = setup.baths();
    let hot = dp(setup.a1(), baths.t_hot());
    let cold = dp(setup.a2(), baths.t_cold());
    let scale = hot.abs().max(cold.abs());
    if scale == 0.0 {
        return 0.0;
    }
    (hot - cold).abs() / scale
}

/// Global maximum of the extracted work over both gaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlobalMaxWork {
    pub a1_star: f64,
    pub a2_star: f64,
    pub nu_star: f64,
    /// `C(a1*/T1) / C(a2*/T2)`.
    pub xi_star: f64,
    pub work_star: f64,
    pub t1_prime: f64,
    pub t2_prime: f64,
    /// Effective temperature of the optimal setup.
    pub t_star: f64,
    /// `2 T1' T2' / (T1' + T2')` at the optimum.
    pub t_star_harmonic: f64,
    pub stationarity_residual: f64,
    pub iterations: usize,
}

impl GlobalMaxWork {
    pub fn setup(&self, baths: BathPair) -> Result<EngineSetup> {
        EngineSetup::new(self.a1_star, self.a2_star, baths)
    }
}

/// Nested search: golden section over `nu in (theta, 1)` around the inner
/// fixed-ratio maximisation, polished by bisection on `dW*/dnu`.
pub fn maximize_work_global(baths: &BathPair, rel_tol: f64) -> Result<GlobalMaxWork> {
    check_rel_tol(rel_tol)?;
    let theta = baths.theta();
    let (nu_lo, nu_hi) = (theta + NU_MARGIN, 1.0 - NU_MARGIN);
    let inner = |nu: f64| maximize_work_at_efficiency(baths, nu, rel_tol);

    let extracted = |nu: f64| inner(nu).map(|m| -m.work_star).unwrap_or(f64::NEG_INFINITY);
    let (mut lo, mut hi, golden_iterations) = golden_section_max(
        extracted,
        nu_lo,
        nu_hi,
        GOLDEN_REL_WIDTH,
        MAX_OUTER_ITERATIONS,
    );

    let nu_slope = |nu: f64| -> f64 {
        match inner(nu) {
            Ok(m) => FixedRatio {
                t_hot: baths.t_hot(),
                t_cold: baths.t_cold(),
                nu,
            }
            .nu_slope(m.a1_star),
            Err(_) => f64::NAN,
        }
    };
    if !(nu_slope(lo) >= 0.0 && nu_slope(hi) <= 0.0) {
        lo = nu_lo;
        hi = nu_hi;
    }
    let (nu_star, width, bisect_iterations) = bisect_decreasing(
        nu_slope,
        lo,
        hi,
        rel_tol,
        MAX_OUTER_ITERATIONS - golden_iterations,
    );
    if width.is_nan() || width > rel_tol * nu_star {
        return Err(Error::NonConvergence {
            method: "global work search",
            detail: format!(
                "nu bracket [{lo}, {hi}] narrowed only to width {width} around {nu_star}"
            ),
        });
    }

    let best = inner(nu_star)?;
    let setup = best.setup_star;
    let xi_star = tls_heat_capacity(setup.a1(), baths.t_hot())?
        / tls_heat_capacity(setup.a2(), baths.t_cold())?;
    let (t1_prime, t2_prime) = final_subsystem_temperatures(&setup);
    let t_star = effective_temperature(&setup);
    let t_star_harmonic = max_work_effective_temperature(t1_prime, t2_prime)?;

    let nu_gap = (nu_star - (theta / xi_star).sqrt()).abs();
    let harmonic_gap = (t_star - t_star_harmonic).abs() / t_star;
    if nu_gap > 1e-6 || harmonic_gap > 1e-6 {
        return Err(Error::NonConvergence {
            method: "global work search",
            detail: format!(
                "optimum fails its identities: |nu - sqrt(theta/xi)| = {nu_gap}, \
                 relative T* mismatch = {harmonic_gap}"
            ),
        });
    }

    Ok(GlobalMaxWork {
        a1_star: setup.a1(),
        a2_star: setup.a2(),
        nu_star,
        xi_star,
        work_star: best.work_star,
        t1_prime,
        t2_prime,
        t_star,
        t_star_harmonic,
        stationarity_residual: stationarity_residual(&setup),
        iterations: golden_iterations + bisect_iterations,
    })
}

/// Location of the minimum of the max-work effective temperature over
/// efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperatureMinimum {
    pub eta_min: f64,
    pub t_min: f64,
    /// `T` at the low-efficiency end of the grid.
    pub t_low_edge: f64,
    /// `T` at the Carnot end of the grid.
    pub t_high_edge: f64,
}

/// Effective temperature of the max-work engine at efficiency `eta`.
pub fn max_work_temperature(baths: &BathPair, eta: f64) -> Result<f64> {
    let best = maximize_work_at_efficiency(baths, 1.0 - eta, DEFAULT_REL_TOL)?;
    Ok(effective_temperature(&best.setup_star))
}

/// Scans `T(eta)` on a uniform grid over `[eps, 1 - theta - eps]` with
/// `eps = 1e-4 (1 - theta)` and refines the lowest point by golden section.
pub fn locate_temperature_minimum(
    baths: &BathPair,
    grid_points: usize,
) -> Result<TemperatureMinimum> {
    if grid_points < 100 {
        return Err(Error::invalid(format!(
            "at least 100 grid points required, got {grid_points}"
        )));
    }
    let carnot = 1.0 - baths.theta();
    let eps = 1e-4 * carnot;
    let (lo, hi) = (eps, carnot - eps);
    let spacing = (hi - lo) / (grid_points - 1) as f64;
    let etas: Vec<f64> = (0..grid_points).map(|k| lo + spacing * k as f64).collect();
    let temps = etas
        .iter()
        .map(|&eta| max_work_temperature(baths, eta))
        .collect::<Result<Vec<_>>>()?;

    let best = temps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("grid is non-empty");
    let left = etas[best.saturating_sub(1)];
    let right = etas[(best + 1).min(grid_points - 1)];
    let (a, b, _) = golden_section_max(
        |eta| {
            max_work_temperature(baths, eta)
                .map(|t| -t)
                .unwrap_or(f64::NEG_INFINITY)
        },
        left,
        right,
        1e-10,
        MAX_OUTER_ITERATIONS,
    );
    let eta_min = 0.5 * (a + b);
    let t_min = max_work_temperature(baths, eta_min)?;
    Ok(TemperatureMinimum {
        eta_min,
        t_min,
        t_low_edge: temps[0],
        t_high_edge: temps[grid_points - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn baths() -> BathPair {
        BathPair::new(9.0, 1.0).unwrap()
    }

    #[test]
    fn rejects_non_extracting_ratios() {
        let b = baths();
        assert!(matches!(
            maximize_work_at_efficiency(&b, 0.1, DEFAULT_REL_TOL),
            Err(Error::NoExtraction { .. })
        ));
        assert!(matches!(
            maximize_work_at_efficiency(&b, b.theta(), DEFAULT_REL_TOL),
            Err(Error::NoExtraction { .. })
        ));
        assert!(maximize_work_at_efficiency(&b, 1.0, DEFAULT_REL_TOL).is_err());
        assert!(maximize_work_at_efficiency(&b, 0.5, 1e-3).is_err());
        assert!(maximize_work_at_efficiency(&b, 0.5, 1e-16).is_err());
    }

    #[test]
    fn fixed_ratio_optimum_is_stationary() {
        let m = maximize_work_at_efficiency(&baths(), 1.0 / 3.0, DEFAULT_REL_TOL).unwrap();
        assert!(m.converged);
        assert!(m.work_star < 0.0);
        assert!(m.gradient_residual < 1e-8, "{m:?}");
        assert_relative_eq!(m.setup_star.nu(), 1.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn fixed_ratio_optimum_scales_with_energy() {
        let m = maximize_work_at_efficiency(&baths(), 0.4, DEFAULT_REL_TOL).unwrap();
        let scaled = BathPair::new(27.0, 3.0).unwrap();
        let ms = maximize_work_at_efficiency(&scaled, 0.4, DEFAULT_REL_TOL).unwrap();
        assert_relative_eq!(ms.a1_star, 3.0 * m.a1_star, max_relative = 1e-8);
        assert_relative_eq!(ms.work_star, 3.0 * m.work_star, max_relative = 1e-12);
    }

    #[test]
    fn optimizer_is_deterministic() {
        let a = maximize_work_at_efficiency(&baths(), 0.55, DEFAULT_REL_TOL).unwrap();
        let b = maximize_work_at_efficiency(&baths(), 0.55, DEFAULT_REL_TOL).unwrap();
        assert_eq!(a.a1_star.to_bits(), b.a1_star.to_bits());
        assert_eq!(a.work_star.to_bits(), b.work_star.to_bits());
    }

    #[test]
    fn analytic_occupation_slope() {
        for (a, t) in [(1.0, 1.0), (0.3, 9.0), (12.0, 2.0)] {
            let h = 1e-6 * a;
            let fd = (p(a + h, t) - p(a - h, t)) / (2.0 * h);
            assert_relative_eq!(dp(a, t), fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn stationarity_residual_properties() {
        let b = baths();
        // same a/T on both sides but different T: not stationary
        let s = EngineSetup::new(9.0, 1.0, b).unwrap();
        assert!(stationarity_residual(&s) > 0.1);
        let scaled = EngineSetup::new(27.0, 3.0, BathPair::new(27.0, 3.0).unwrap()).unwrap();
        assert_relative_eq!(
            stationarity_residual(&s),
            stationarity_residual(&scaled),
            max_relative = 1e-14
        );
    }

    #[test]
    fn global_optimum_identities() {
        let g = maximize_work_global(&baths(), DEFAULT_REL_TOL).unwrap();
        assert!(g.stationarity_residual < 1e-8, "{g:?}");
        assert!((g.nu_star - (baths().theta() / g.xi_star).sqrt()).abs() < 1e-6);
        assert!((g.t_star - g.t_star_harmonic).abs() < 1e-9 * g.t_star);
        assert!(g.nu_star > baths().theta() && g.nu_star < 1.0);
    }

    #[test]
    fn temperature_minimum_grid_size_guard() {
        assert!(locate_temperature_minimum(&baths(), 99).is_err());
    }
}
