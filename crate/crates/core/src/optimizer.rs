//! Routing optimization for heterogeneous parallel arrays.
//!
//! The objective is the mean response time of an array that sends fraction
//! `φ_k` of a Poisson stream of rate `λ` to an M/M/1 queue with service time
//! `S_k`:
//!
//! ```text
//! R(φ) = Σ_k φ_k S_k / (1 - φ_k λ S_k)
//! ```
//!
//! `R` is separable and convex on the stable region, so the minimizer on the
//! probability simplex is characterised by equal marginal residence
//! `∂R/∂φ_k` across every queue that receives traffic.

use crate::error::{Error, Result};

/// Fraction of each queue's capacity that iterates may never exceed.
pub const STABILITY_MARGIN: f64 = 1e-9;
pub const MAX_ITERATIONS: usize = 10_000;
pub const TOLERANCE: f64 = 1e-10;
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HeterogeneousArray {
    agg_rate: f64,
    service_times: Vec<f64>,
    // indices into `service_times`, ascending by service time (stable for ties)
    order: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// `Σ 1/S_k`, the largest aggregate rate any routing can sustain.
    pub capacity: f64,
}

impl HeterogeneousArray {
    pub fn new(agg_rate: f64, service_times: Vec<f64>) -> Result<Self> {
        if !(agg_rate >= 0.0 && agg_rate.is_finite()) {
            return Err(Error::invalid("arrival_rate", "must be finite and >= 0"));
        }
        if service_times.is_empty() {
            return Err(Error::invalid("service_times", "need at least one queue"));
        }
        if let Some(bad) = service_times.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::invalid(
                "service_times",
                format!("every service time must be finite and > 0, got {bad}"),
            ));
        }
        let mut order: Vec<usize> = (0..service_times.len()).collect();
        order.sort_by(|&a, &b| service_times[a].total_cmp(&service_times[b]));
        Ok(HeterogeneousArray {
            agg_rate,
            service_times,
            order,
        })
    }

    pub fn agg_rate(&self) -> f64 {
        self.agg_rate
    }

    /// Service times in the caller's order.
    pub fn service_times(&self) -> &[f64] {
        &self.service_times
    }

    pub fn sorted_service_times(&self) -> Vec<f64> {
        self.order.iter().map(|&i| self.service_times[i]).collect()
    }

    /// Permutation that sorts the service times ascending.
    pub fn sorted_order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.service_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.service_times.is_empty()
    }

    pub fn capacity(&self) -> f64 {
        self.service_times.iter().map(|s| 1.0 / s).sum()
    }

    pub fn feasibility(&self) -> Feasibility {
        let capacity = self.capacity();
        Feasibility {
            feasible: self.agg_rate < capacity,
            capacity,
        }
    }

    fn upper_bounds(&self) -> Vec<f64> {
        self.service_times
            .iter()
            .map(|s| {
                if self.agg_rate == 0.0 {
                    1.0
                } else {
                    ((1.0 - STABILITY_MARGIN) / (self.agg_rate * s)).min(1.0)
                }
            })
            .collect()
    }
}

pub fn feasibility(array: &HeterogeneousArray) -> Feasibility {
    array.feasibility()
}

/// Traffic fractions on the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingVector(Vec<f64>);

impl RoutingVector {
    pub fn new(fractions: Vec<f64>) -> Result<Self> {
        if fractions.is_empty() {
            return Err(Error::invalid("routing", "need at least one fraction"));
        }
        if fractions.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::invalid("routing", "every fraction must lie in [0, 1]"));
        }
        let total: f64 = fractions.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::invalid(
                "routing",
                format!("fractions must sum to 1 (got {total})"),
            ));
        }
        Ok(RoutingVector(fractions))
    }

    /// Rescales non-negative weights onto the simplex.
    pub fn normalized(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(*w >= 0.0)) || !(total > 0.0 && total.is_finite()) {
            return Err(Error::invalid("routing", "weights must be >= 0 with a positive sum"));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(m: usize) -> Self {
        RoutingVector(vec![1.0 / m as f64; m])
    }

    pub fn fractions(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_routing(array: &HeterogeneousArray, routing: &RoutingVector) -> Result<()> {
    if routing.len() != array.len() {
        return Err(Error::invalid(
            "routing",
            format!("expected {} fractions, got {}", array.len(), routing.len()),
        ));
    }
    for (index, (p, s)) in routing.0.iter().zip(&array.service_times).enumerate() {
        let load = p * array.agg_rate * s;
        if load >= 1.0 {
            return Err(Error::Unstable { index, load });
        }
    }
    Ok(())
}

#[inline]
fn residence_term(p: f64, lambda: f64, s: f64) -> f64 {
    p * s / (1.0 - p * lambda * s)
}

#[inline]
fn marginal(p: f64, lambda: f64, s: f64) -> f64 {
    let d = 1.0 - p * lambda * s;
    s / d + p * lambda * s * s / (d * d)
}

#[inline]
fn curvature(p: f64, lambda: f64, s: f64) -> f64 {
    let d = 1.0 - p * lambda * s;
    2.0 * lambda * s * s / (d * d * d)
}

fn objective_unchecked(lambda: f64, service_times: &[f64], phi: &[f64]) -> f64 {
    phi.iter()
        .zip(service_times)
        .map(|(&p, &s)| residence_term(p, lambda, s))
        .sum()
}

/// Mean response time of the array under `routing`.
pub fn objective(array: &HeterogeneousArray, routing: &RoutingVector) -> Result<f64> {
    check_routing(array, routing)?;
    Ok(objective_unchecked(
        array.agg_rate,
        &array.service_times,
        &routing.0,
    ))
}

/// Partial derivatives `∂R/∂φ_k`, each `S_k/(1-ρ_k) + ρ_k S_k/(1-ρ_k)^2`
/// with `ρ_k = φ_k λ S_k`.
pub fn gradient(array: &HeterogeneousArray, routing: &RoutingVector) -> Result<Vec<f64>> {
    check_routing(array, routing)?;
    Ok(routing
        .0
        .iter()
        .zip(&array.service_times)
        .map(|(&p, &s)| marginal(p, array.agg_rate, s))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    /// Fractions in the caller's service-time order.
    pub routing: RoutingVector,
    pub response_time: f64,
    pub iterations: usize,
    pub converged: bool,
    /// First-order optimality residual at `routing`.
    pub residual: f64,
    order: Vec<usize>,
}

impl Optimum {
    /// Fractions matched to ascending service times, so `φ_1 >= φ_2 >= ...`.
    pub fn sorted_fractions(&self) -> Vec<f64> {
        self.order.iter().map(|&i| self.routing.0[i]).collect()
    }
}

/// Spread of the marginal residences over the queues that carry traffic,
/// plus any violation by idle queues whose marginal undercuts it.
fn kkt_residual(phi: &[f64], grad: &[f64], upper: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..phi.len() {
        if phi[k] > 0.0 && phi[k] < upper[k] {
            lo = lo.min(grad[k]);
            hi = hi.max(grad[k]);
        }
    }
    if lo > hi {
        // no interior component; compare against the loaded ones
        for k in 0..phi.len() {
            if phi[k] > 0.0 {
                lo = lo.min(grad[k]);
                hi = hi.max(grad[k]);
            }
        }
    }
    let mut residual = hi - lo;
    for k in 0..phi.len() {
        if phi[k] == 0.0 {
            residual = residual.max(lo - grad[k]);
        } else if phi[k] >= upper[k] {
            residual = residual.max(grad[k] - hi);
        }
    }
    residual.max(0.0)
}

/// Minimizes `Σ h_k/2 (x_k - y_k)^2` over `{0 <= x_k <= u_k, Σ x_k = 1}`.
///
/// The solution is `x_k = clamp(y_k + τ/h_k, 0, u_k)`; `τ` is located by
/// scanning the breakpoints of the piecewise-linear sum.
fn project_box_simplex(y: &[f64], h: &[f64], upper: &[f64]) -> Vec<f64> {
    let m = y.len();
    let at = |tau: f64| -> Vec<f64> {
        (0..m)
            .map(|k| (y[k] + tau / h[k]).clamp(0.0, upper[k]))
            .collect()
    };
    let sum_at = |tau: f64| -> f64 { at(tau).iter().sum() };

    let mut breaks: Vec<f64> = (0..m)
        .flat_map(|k| [-y[k] * h[k], (upper[k] - y[k]) * h[k]])
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    // first breakpoint where the sum reaches 1
    let idx = breaks.partition_point(|&b| sum_at(b) < 1.0);
    if idx == breaks.len() {
        return upper.to_vec();
    }
    let (left, right) = if idx == 0 {
        (breaks[0] - 1.0, breaks[0])
    } else {
        (breaks[idx - 1], breaks[idx])
    };
    let mid = 0.5 * (left + right);

    // on this segment the free set is fixed and the sum is linear in τ
    let mut fixed = 0.0;
    let mut free_y = 0.0;
    let mut free_w = 0.0;
    for k in 0..m {
        let lower_break = -y[k] * h[k];
        let upper_break = (upper[k] - y[k]) * h[k];
        if mid <= lower_break {
            // pinned at zero
        } else if mid >= upper_break {
            fixed += upper[k];
        } else {
            free_y += y[k];
            free_w += 1.0 / h[k];
        }
    }
    let tau = if free_w > 0.0 {
        (1.0 - fixed - free_y) / free_w
    } else {
        right
    };
    at(tau)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            tolerance: TOLERANCE,
            max_iterations: MAX_ITERATIONS,
        }
    }
}

fn check_feasible(array: &HeterogeneousArray) -> Result<()> {
    let f = array.feasibility();
    if !f.feasible {
        return Err(Error::Infeasible {
            rate: array.agg_rate,
            capacity: f.capacity,
        });
    }
    Ok(())
}

fn finish(
    array: &HeterogeneousArray,
    phi: Vec<f64>,
    iterations: usize,
    residual: f64,
    converged: bool,
) -> Optimum {
    let response_time = objective_unchecked(array.agg_rate, &array.service_times, &phi);
    Optimum {
        routing: RoutingVector(phi),
        response_time,
        iterations,
        converged,
        residual,
        order: array.order.clone(),
    }
}

pub fn optimize_m(array: &HeterogeneousArray) -> Result<Optimum> {
    optimize_m_with(array, OptimizerOptions::default())
}

/// Projected gradient descent on the simplex.
///
/// Steps are measured in the diagonal metric given by the objective's
/// curvature, so a unit step is a separable Newton step; Armijo backtracking
/// guards it. The iterate is seeded at `φ_k ∝ 1/S_k`, which is stable whenever
/// the array is feasible.
pub fn optimize_m_with(array: &HeterogeneousArray, options: OptimizerOptions) -> Result<Optimum> {
    check_feasible(array)?;
    let lambda = array.agg_rate;
    let s = &array.service_times;
    let m = s.len();
    let upper = array.upper_bounds();
    if upper.iter().sum::<f64>() < 1.0 {
        // feasible in exact arithmetic but inside the stability margin
        return Err(Error::Infeasible {
            rate: lambda,
            capacity: array.capacity(),
        });
    }
    if m == 1 {
        return Ok(finish(array, vec![1.0], 0, 0.0, true));
    }

    let inv: Vec<f64> = s.iter().map(|x| 1.0 / x).collect();
    let seed = RoutingVector::normalized(&inv)?.0;
    let unit = vec![1.0; m];
    let mut phi = project_box_simplex(&seed, &unit, &upper);
    let mut value = objective_unchecked(lambda, s, &phi);

    const ARMIJO: f64 = 1e-4;
    const MAX_BACKTRACKS: usize = 60;

    let mut iterations = 0;
    loop {
        let grad: Vec<f64> = (0..m).map(|k| marginal(phi[k], lambda, s[k])).collect();
        let residual = kkt_residual(&phi, &grad, &upper);
        if residual < options.tolerance {
            return Ok(finish(array, phi, iterations, residual, true));
        }
        if iterations >= options.max_iterations {
            let best = finish(array, phi, iterations, residual, false);
            return Err(Error::NotConverged {
                iterations,
                residual,
                best: Box::new(best),
            });
        }
        iterations += 1;

        let h: Vec<f64> = (0..m)
            .map(|k| curvature(phi[k], lambda, s[k]).max(1e-12 * grad[k]))
            .collect();
        let noise = 8.0 * f64::EPSILON * value.abs();
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let y: Vec<f64> = (0..m).map(|k| phi[k] - step * grad[k] / h[k]).collect();
            let candidate = project_box_simplex(&y, &h, &upper);
            let decrease: f64 = (0..m).map(|k| grad[k] * (candidate[k] - phi[k])).sum();
            let trial = objective_unchecked(lambda, s, &candidate);
            if trial.is_finite() && trial <= value + ARMIJO * decrease + noise {
                accepted = Some((candidate, trial));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((next, trial)) if next != phi => {
                phi = next;
                value = trial;
            }
            _ => {
                let best = finish(array, phi, iterations, residual, false);
                return Err(Error::NotConverged {
                    iterations,
                    residual,
                    best: Box::new(best),
                });
            }
        }
    }
}

/// Best split of traffic between a fast and a slow queue.
///
/// Returns the fraction `φ` sent to `fast` as `routing[0]`. The optimality
/// condition `∂R/∂φ_fast = ∂R/∂φ_slow` is monotone in `φ`, so it is solved by
/// bisection over the stable interval; a non-negative difference at `φ = 0`
/// or a non-positive one at `φ = 1` selects the boundary.
pub fn optimize_dual(agg_rate: f64, fast: f64, slow: f64) -> Result<Optimum> {
    let array = HeterogeneousArray::new(agg_rate, vec![fast, slow])?;
    check_feasible(&array)?;
    let lambda = agg_rate;
    let balance = |p: f64| marginal(p, lambda, fast) - marginal(1.0 - p, lambda, slow);

    let done = |p: f64, iterations: usize| {
        let phi = vec![p, 1.0 - p];
        let grad = [marginal(p, lambda, fast), marginal(1.0 - p, lambda, slow)];
        let residual = kkt_residual(&phi, &grad, &[1.0, 1.0]);
        Ok(finish(&array, phi, iterations, residual, true))
    };

    if fast == slow {
        return done(0.5, 0);
    }

    let hi_pole = if lambda > 0.0 { 1.0 / (lambda * fast) } else { f64::INFINITY };
    let lo_pole = if lambda > 0.0 { 1.0 - 1.0 / (lambda * slow) } else { f64::NEG_INFINITY };
    if lo_pole <= 0.0 && balance(0.0) >= 0.0 {
        return done(0.0, 0);
    }
    if hi_pole >= 1.0 && balance(1.0) <= 0.0 {
        return done(1.0, 0);
    }

    let mut lo = lo_pole.max(0.0);
    let mut hi = hi_pole.min(1.0);
    let mut iterations = 0;
    while iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let b = balance(mid);
        if b == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if b < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick whichever end balances better
    let p = if lo <= lo_pole || (hi < hi_pole && balance(hi).abs() < balance(lo).abs()) {
        hi
    } else {
        lo
    };
    done(p, iterations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quad_disks() -> HeterogeneousArray {
        HeterogeneousArray::new(166.67, vec![0.005, 0.015, 0.020, 0.020]).unwrap()
    }

    #[test]
    fn objective_at_dual_optimum() {
        let a = HeterogeneousArray::new(166.67, vec![0.005, 0.015]).unwrap();
        let r = RoutingVector::new(vec![0.819612, 0.180388]).unwrap();
        assert!((objective(&a, &r).unwrap() - 0.017857).abs() < 5e-7);
        let g = gradient(&a, &r).unwrap();
        assert!((g[0] - g[1]).abs() < 1e-6);
    }

    #[test]
    fn objective_homogeneous_collapse() {
        let a = HeterogeneousArray::new(10.0, vec![0.05, 0.05]).unwrap();
        let r = RoutingVector::uniform(2);
        assert_relative_eq!(
            objective(&a, &r).unwrap(),
            crate::kernel::parallel_array_residence(10.0, 0.05, 2).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn idle_queue_contributes_nothing() {
        let a = HeterogeneousArray::new(50.0, vec![0.005, 0.015]).unwrap();
        let r = RoutingVector::new(vec![1.0, 0.0]).unwrap();
        assert_relative_eq!(objective(&a, &r).unwrap(), 0.005 / 0.75, max_relative = 1e-15);
    }

    #[test]
    fn gradient_at_zero_load() {
        let a = HeterogeneousArray::new(0.0, vec![0.1, 0.2, 0.4]).unwrap();
        let r = RoutingVector::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert_eq!(gradient(&a, &r).unwrap(), vec![0.1, 0.2, 0.4]);
    }

    #[test]
    fn unstable_routing_names_queue() {
        let a = quad_disks();
        let r = RoutingVector::new(vec![0.1, 0.5, 0.2, 0.2]).unwrap();
        assert!(matches!(objective(&a, &r), Err(Error::Unstable { index: 1, .. })));
        assert!(matches!(gradient(&a, &r), Err(Error::Unstable { index: 1, .. })));
    }

    #[test]
    fn routing_vector_validation() {
        assert!(RoutingVector::new(vec![0.5, 0.4]).is_err());
        assert!(RoutingVector::new(vec![1.2, -0.2]).is_err());
        assert!(RoutingVector::new(vec![]).is_err());
        let r = RoutingVector::normalized(&[2.0, 1.0, 1.0]).unwrap();
        assert_eq!(r.fractions(), &[0.5, 0.25, 0.25]);
    }

    #[test]
    fn feasibility_envelope() {
        let a = HeterogeneousArray::new(166.67, vec![0.005, 0.015]).unwrap();
        let f = feasibility(&a);
        assert!(f.feasible);
        assert_relative_eq!(f.capacity, 200.0 + 200.0 / 3.0, max_relative = 1e-15);

        let at_cap = HeterogeneousArray::new(2.0 + 4.0, vec![0.5, 0.25]).unwrap();
        assert!(!at_cap.feasibility().feasible);
        let idle = HeterogeneousArray::new(0.0, vec![0.5, 0.25]).unwrap();
        assert!(idle.feasibility().feasible);
    }

    #[test]
    fn dual_example() {
        let opt = optimize_dual(166.67, 0.005, 0.015).unwrap();
        let phi = opt.routing.fractions()[0];
        assert!((phi - 0.819612).abs() < 1e-4, "phi = {phi}");
        assert!((opt.response_time - 0.017857).abs() < 1e-5);
        assert!(opt.converged);
        assert!(opt.residual < 1e-6);
    }

    #[test]
    fn dual_symmetric() {
        let opt = optimize_dual(166.67, 0.005, 0.005).unwrap();
        assert_eq!(opt.routing.fractions(), &[0.5, 0.5]);
        assert_relative_eq!(
            opt.response_time,
            crate::kernel::parallel_array_residence(166.67, 0.005, 2).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn dual_boundary_at_light_load() {
        // slow marginal at zero load (0.1) exceeds fast marginal at full load
        let opt = optimize_dual(1.0, 0.01, 0.1).unwrap();
        assert_eq!(opt.routing.fractions(), &[1.0, 0.0]);
    }

    #[test]
    fn dual_infeasible() {
        assert!(matches!(
            optimize_dual(300.0, 0.005, 0.015),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn quad_example() {
        let opt = optimize_m(&quad_disks()).unwrap();
        let phi = opt.routing.fractions();
        let expect = [0.73442, 0.13119, 0.06719, 0.06719];
        for (p, e) in phi.iter().zip(expect) {
            assert!((p - e).abs() < 1e-4, "{phi:?}");
        }
        assert_eq!(phi[2], phi[3]);
        assert!((opt.response_time - 0.0158568).abs() < 1e-5);
        assert!(opt.converged && opt.residual < TOLERANCE);
    }

    #[test]
    fn caller_order_preserved() {
        let a = HeterogeneousArray::new(166.67, vec![0.020, 0.005, 0.020, 0.015]).unwrap();
        let opt = optimize_m(&a).unwrap();
        let phi = opt.routing.fractions();
        assert!(phi[1] > phi[3] && phi[3] > phi[0]);
        let sorted = opt.sorted_fractions();
        assert!(sorted.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(a.sorted_service_times(), vec![0.005, 0.015, 0.020, 0.020]);
    }

    #[test]
    fn homogeneous_gives_uniform() {
        for m in 1..=6 {
            let a = HeterogeneousArray::new(20.0, vec![0.04; m]).unwrap();
            let opt = optimize_m(&a).unwrap();
            for p in opt.routing.fractions() {
                assert_relative_eq!(*p, 1.0 / m as f64, max_relative = 1e-12);
            }
            assert_relative_eq!(
                opt.response_time,
                crate::kernel::parallel_array_residence(20.0, 0.04, m as u32).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn slow_queue_left_idle_at_light_load() {
        let a = HeterogeneousArray::new(1.0, vec![0.01, 0.02, 0.5]).unwrap();
        let opt = optimize_m(&a).unwrap();
        assert_eq!(opt.routing.fractions()[2], 0.0);
        let g = gradient(&a, &opt.routing).unwrap();
        assert!(g[2] >= g[0]);
    }

    #[test]
    fn zero_load_splits_over_fastest() {
        let a = HeterogeneousArray::new(0.0, vec![0.2, 0.1, 0.1]).unwrap();
        let opt = optimize_m(&a).unwrap();
        assert_eq!(opt.routing.fractions(), &[0.0, 0.5, 0.5]);
        assert_relative_eq!(opt.response_time, 0.1, max_relative = 1e-15);
    }

    #[test]
    fn near_capacity_still_converges() {
        let a = HeterogeneousArray::new(0.999 * (200.0 + 50.0 + 50.0), vec![0.005, 0.02, 0.02]).unwrap();
        let opt = optimize_m(&a).unwrap();
        let total: f64 = opt.routing.fractions().iter().sum();
        assert!((total - 1.0).abs() < SIMPLEX_TOLERANCE);
        assert!(opt.converged);
    }

    #[test]
    fn iteration_cap_reports_best() {
        let opts = OptimizerOptions {
            tolerance: 0.0,
            max_iterations: 1,
        };
        match optimize_m_with(&quad_disks(), opts) {
            Err(Error::NotConverged { best, .. }) => {
                assert!(!best.converged);
                let total: f64 = best.routing.fractions().iter().sum();
                assert!((total - 1.0).abs() < SIMPLEX_TOLERANCE);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn m_matches_dual() {
        for (lambda, f, s) in [(166.67, 0.005, 0.015), (50.0, 0.01, 0.012), (2.0, 0.1, 0.3)] {
            let d = optimize_dual(lambda, f, s).unwrap();
            let m = optimize_m(&HeterogeneousArray::new(lambda, vec![f, s]).unwrap()).unwrap();
            assert!((d.routing.fractions()[0] - m.routing.fractions()[0]).abs() < 1e-6);
            assert!((d.response_time - m.response_time).abs() < 1e-6);
        }
    }

    #[test]
    fn projection_respects_bounds() {
        // τ = -8/15 moves the stiffer coordinate half as far
        let x = project_box_simplex(&[0.9, 0.9, -0.5], &[1.0, 2.0, 1.0], &[0.4, 1.0, 1.0]);
        assert_relative_eq!(x[0], 0.9 - 8.0 / 15.0, max_relative = 1e-14);
        assert_relative_eq!(x[1], 0.9 - 4.0 / 15.0, max_relative = 1e-14);
        assert_eq!(x[2], 0.0);
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-15);

        let capped = project_box_simplex(&[0.9, 0.1], &[1.0, 1.0], &[0.4, 1.0]);
        assert_eq!(capped[0], 0.4);
        assert_relative_eq!(capped[1], 0.6, max_relative = 1e-15);
    }
}
