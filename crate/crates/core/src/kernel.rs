//! Closed-form M/M/1 formulas.
//!
//! Every function here is pure and works in `f64`. Saturation is reported as
//! an error rather than an infinite residence time; a utilization of exactly
//! 1.0 counts as saturated.

use crate::error::{Error, Result, Saturation};

/// Arrival rate and mean service time seen by one queue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceRate {
    pub arrival_rate: f64,
    pub service_time: f64,
}

impl ServiceRate {
    pub fn new(arrival_rate: f64, service_time: f64) -> Result<Self> {
        if !(arrival_rate >= 0.0 && arrival_rate.is_finite()) {
            return Err(Error::invalid("arrival_rate", "must be finite and >= 0"));
        }
        if !(service_time > 0.0 && service_time.is_finite()) {
            return Err(Error::invalid("service_time", "must be finite and > 0"));
        }
        Ok(ServiceRate {
            arrival_rate,
            service_time,
        })
    }

    pub fn utilization(&self) -> f64 {
        utilization(self.arrival_rate, self.service_time)
    }

    pub fn is_stable(&self) -> bool {
        self.utilization() < 1.0
    }

    /// Full metric set for this queue, or the saturation that prevents it.
    pub fn metrics(&self) -> Result<Metrics, Saturation> {
        let rho = self.utilization();
        let residence_time = mm1_residence(self.arrival_rate, self.service_time)?;
        Ok(Metrics {
            utilization: rho,
            residence_time,
            queue_length: rho / (1.0 - rho),
            throughput: self.arrival_rate,
        })
    }
}

/// Steady-state metrics of a solved node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub utilization: f64,
    pub residence_time: f64,
    pub queue_length: f64,
    pub throughput: f64,
}

#[inline]
pub fn utilization(arrival_rate: f64, service_time: f64) -> f64 {
    arrival_rate * service_time
}

/// `S / (1 - λS)`.
pub fn mm1_residence(arrival_rate: f64, service_time: f64) -> Result<f64, Saturation> {
    let rho = utilization(arrival_rate, service_time);
    if rho >= 1.0 || rho.is_nan() {
        return Err(Saturation { utilization: rho });
    }
    Ok(service_time / (1.0 - rho))
}

/// Residence time of one queue in a homogeneous array of `m` queues that
/// splits the aggregate stream evenly: `S / (1 - (λ/m)S)`.
pub fn parallel_array_residence(
    agg_rate: f64,
    service_time: f64,
    m: u32,
) -> Result<f64, Saturation> {
    mm1_residence(agg_rate / f64::from(m), service_time)
}

/// Total residence of `m` identical tandem stages that share the total service
/// time `S` equally, all driven at the aggregate rate: `m (S/m) / (1 - λS/m)`.
pub fn tandem_residence(
    agg_rate: f64,
    total_service_time: f64,
    m: u32,
) -> Result<f64, Saturation> {
    let stage = total_service_time / f64::from(m);
    let rho = utilization(agg_rate, stage);
    if rho >= 1.0 || rho.is_nan() {
        return Err(Saturation { utilization: rho });
    }
    Ok(total_service_time / (1.0 - rho))
}

/// A single queue revisited `visits` times, each visit costing
/// `stage_service_time`. The demand `D = V·S` replaces the service time.
pub fn feedback_residence(
    agg_rate: f64,
    stage_service_time: f64,
    visits: u32,
) -> Result<f64, Saturation> {
    mm1_residence(agg_rate, f64::from(visits) * stage_service_time)
}

/// Mean number in an M/M/1 node, `ρ / (1 - ρ)`.
pub fn queue_length(utilization: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&utilization) {
        return Err(Error::Domain(utilization));
    }
    Ok(utilization / (1.0 - utilization))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn residence_values() {
        assert_eq!(mm1_residence(0.0, 0.25).unwrap(), 0.25);
        assert_relative_eq!(mm1_residence(0.5, 0.25).unwrap(), 0.25 / 0.875, max_relative = 1e-15);
        assert_relative_eq!(mm1_residence(0.5, 0.25).unwrap(), 0.2857142857, epsilon = 1e-10);
        let err = mm1_residence(4.0, 0.25).unwrap_err();
        assert_eq!(err.utilization, 1.0);
    }

    #[test]
    fn utilization_values() {
        assert_eq!(utilization(2.0, 0.0625), 0.125);
        assert_eq!(utilization(0.0, 1.0), 0.0);
        assert_relative_eq!(utilization(166.67, 0.005), 0.83335, max_relative = 1e-14);
    }

    #[test]
    fn parallel_and_tandem_values() {
        assert_relative_eq!(
            parallel_array_residence(2.0, 0.25, 4).unwrap(),
            0.2857142857,
            epsilon = 1e-10
        );
        assert_relative_eq!(tandem_residence(2.0, 0.25, 4).unwrap(), 0.2857142857, epsilon = 1e-10);
        assert_eq!(
            parallel_array_residence(1.5, 0.3, 1).unwrap(),
            mm1_residence(1.5, 0.3).unwrap()
        );
        assert_eq!(tandem_residence(1.5, 0.3, 1).unwrap(), mm1_residence(1.5, 0.3).unwrap());
        assert_eq!(parallel_array_residence(0.0, 0.3, 8).unwrap(), 0.3);
        assert_relative_eq!(tandem_residence(1e-9, 0.300, 300).unwrap(), 0.300, max_relative = 1e-9);
    }

    #[test]
    fn saturation_at_capacity() {
        assert!(parallel_array_residence(16.0, 0.25, 4).is_err());
        assert!(tandem_residence(16.0, 0.25, 4).is_err());
        assert!(feedback_residence(4.0, 0.0625, 4).is_err());
    }

    #[test]
    fn feedback_values() {
        assert_relative_eq!(feedback_residence(2.0, 0.0625, 4).unwrap(), 0.5, max_relative = 1e-15);
        assert_eq!(feedback_residence(2.0, 0.1, 1).unwrap(), mm1_residence(2.0, 0.1).unwrap());
    }

    #[test]
    fn queue_length_values() {
        assert_relative_eq!(queue_length(0.125).unwrap(), 1.0 / 7.0, max_relative = 1e-15);
        assert_eq!(format!("{:.4}", queue_length(0.125).unwrap()), "0.1429");
        assert_eq!(queue_length(0.0).unwrap(), 0.0);
        assert_eq!(queue_length(0.5).unwrap(), 1.0);
        assert!(matches!(queue_length(1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn service_rate_validation() {
        assert!(ServiceRate::new(-1.0, 0.1).is_err());
        assert!(ServiceRate::new(1.0, 0.0).is_err());
        let m = ServiceRate::new(2.0, 0.0625).unwrap().metrics().unwrap();
        assert_eq!(m.utilization, 0.125);
        assert!(m.residence_time >= 0.0625);
    }

    fn stable_tuple() -> impl Strategy<Value = (f64, f64, u32)> {
        (1u32..=64, 1e-4f64..10.0, 1e-6f64..0.999).prop_map(|(m, s, rho)| {
            let lambda = rho * f64::from(m) / s;
            (lambda, s, m)
        })
    }

    proptest! {
        #[test]
        fn parallel_equals_tandem((lambda, s, m) in stable_tuple()) {
            let p = parallel_array_residence(lambda, s, m).unwrap();
            let t = tandem_residence(lambda, s, m).unwrap();
            prop_assert!((p - t).abs() <= 1e-12 * p.abs().max(t.abs()));
        }

        #[test]
        fn residence_increases_with_load((lambda, s, m) in stable_tuple(), frac in 0.01f64..0.99) {
            let lower = lambda * frac;
            prop_assert!(parallel_array_residence(lower, s, m).unwrap() < parallel_array_residence(lambda, s, m).unwrap());
            prop_assert!(tandem_residence(lower, s, m).unwrap() < tandem_residence(lambda, s, m).unwrap());
        }

        #[test]
        fn feedback_dominates_tandem((lambda, s, m) in stable_tuple().prop_filter("m >= 2", |t| t.2 >= 2)) {
            let stage = s / f64::from(m);
            if let Ok(fb) = feedback_residence(lambda, stage, m) {
                prop_assert!(fb > tandem_residence(lambda, s, m).unwrap());
            }
        }

        #[test]
        fn littles_law_on_node(lambda in 0.0f64..100.0, rho in 0.0f64..0.999) {
            let s = if lambda > 0.0 { rho / lambda } else { 0.5 };
            let r = mm1_residence(lambda, s).unwrap();
            let n = queue_length(utilization(lambda, s)).unwrap();
            prop_assert!((r * lambda - n).abs() <= 1e-12 * n.max(1e-300));
        }
    }
}
