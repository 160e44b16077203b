//! Markovian queue simulation sampled as a time series.
//!
//! Exponential inter-arrival and service times, c parallel servers, empty
//! start. The observable is the number in system at integer times 1..n,
//! which is what the forecasters are asked to predict.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Arrival/service configuration of an M/M/c queue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueSpec {
    pub arrival_rate: f64,
    /// Service rate per busy server.
    pub service_rate: f64,
    pub servers: usize,
}

impl QueueSpec {
    /// The benchmark's M/M/1: arrivals at rate four, one server at rate two.
    pub fn mm1() -> Self {
        Self {
            arrival_rate: 4.0,
            service_rate: 2.0,
            servers: 1,
        }
    }

    /// The benchmark's M/M/2: same rates, two parallel servers.
    pub fn mm2() -> Self {
        Self {
            arrival_rate: 4.0,
            service_rate: 2.0,
            servers: 2,
        }
    }

    pub fn name(&self) -> String {
        format!("mm{}", self.servers)
    }

    fn validate(&self) -> Result<()> {
        if !(self.arrival_rate >= 0.0 && self.arrival_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "arrival rate must be finite and >= 0, got {}",
                self.arrival_rate
            )));
        }
        if !(self.service_rate > 0.0 && self.service_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "service rate must be finite and > 0, got {}",
                self.service_rate
            )));
        }
        if self.servers == 0 {
            return Err(Error::InvalidArgument("need at least one server".into()));
        }
        Ok(())
    }
}

/// Event-driven simulation returning the number in system at t = 1..n.
///
/// Memorylessness lets the simulator redraw the time to the next event
/// after every transition: the holding time in a state with k in system is
/// exponential with rate `arrival + service * min(k, servers)`, and the
/// event is an arrival with probability proportional to the arrival rate.
pub fn simulate_queue(spec: &QueueSpec, n: usize, seed: u64) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::InvalidArgument("need n >= 1 samples".into()));
    }
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit_exp = Exp::new(1.0).expect("unit rate");

    let mut samples = Vec::with_capacity(n);
    let mut in_system: u64 = 0;
    let mut clock = 0.0_f64;
    let mut next_sample = 1.0_f64;

    while samples.len() < n {
        let busy = (in_system as usize).min(spec.servers) as f64;
        let total_rate = spec.arrival_rate + spec.service_rate * busy;
        let holding = if total_rate > 0.0 {
            unit_exp.sample(&mut rng) / total_rate
        } else {
            f64::INFINITY
        };
        let event_time = clock + holding;

        // Emit all integer-time samples that fall before the next event.
        while next_sample <= event_time && samples.len() < n {
            samples.push(in_system as f64);
            next_sample += 1.0;
        }
        if samples.len() == n {
            break;
        }

        clock = event_time;
        let arrival = rng_uniform(&mut rng) * total_rate < spec.arrival_rate;
        if arrival {
            in_system += 1;
        } else {
            in_system = in_system.saturating_sub(1);
        }
    }

    TimeSeries::with_origin(
        samples,
        format!("queue={} n={n} seed={seed}", spec.name()),
    )
}

fn rng_uniform(rng: &mut ChaCha8Rng) -> f64 {
    use rand::Rng;
    rng.gen::<f64>()
}
