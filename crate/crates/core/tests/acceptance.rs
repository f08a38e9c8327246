//! Acceptance criteria, one line of output each.
//!
//! Run with `cargo test -p pfs-queue --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use pfsq::cli;
use pfsq::kernel::{feedback_residence, parallel_array_residence, tandem_residence};
use pfsq::model::ModelFile;
use pfsq::network::{self, parallelize_transform, solve, OpenNetwork};
use pfsq::optimizer::{self, gradient, objective, HeterogeneousArray, RoutingVector};
use pfsq::sim::{simulate, SimConfig, SimTopology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

/// Random `(λ, S, m)` with `m ∈ [1, 64]` and per-queue load in `(0, 0.999)`.
fn stable_tuple(rng: &mut ChaCha8Rng) -> (f64, f64, u32) {
    let m = rng.random_range(1..=64u32);
    let s = 10f64.powf(rng.random_range(-4.0..1.0));
    let rho = rng.random_range(1e-9..0.999);
    (rho * f64::from(m) / s, s, m)
}

fn theorem_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (lambda, s, m) = stable_tuple(&mut rng);
        let p = parallel_array_residence(lambda, s, m).map_err(|e| e.to_string())?;
        let t = tandem_residence(lambda, s, m).map_err(|e| e.to_string())?;
        worst = worst.max(rel(p, t));
    }
    ensure(worst <= 1e-12, || format!("worst relative gap {worst:e}"))?;
    let took = within_time(start, Duration::from_secs(1))?;
    Ok(format!("1000 tuples, worst relative gap {worst:.1e}, {took:?}"))
}

const LISTING_MODEL: &str = "\
[network]
workload = Requests
arrival_rate = 2.0

[parallel]
m = 4
service_time = 0.25
method = b
";

fn listing_report() -> Outcome {
    let model: ModelFile = LISTING_MODEL.parse().map_err(|e: pfsq::Error| e.to_string())?;
    let text = cli::cmd_solve(&model).map_err(|e| e.to_string())?;
    let expected = [
        "Capacity        ParaQ1       Requests              1   Servers",
        "Throughput      ParaQ1       Requests         0.5000   Requests/Sec",
        "Utilization     ParaQ1       Requests        12.5000   Percent",
        "Queue length    ParaQ1       Requests         0.1429   Requests",
        "Capacity        ParaQ2       Requests              1   Servers",
        "Capacity        ParaQ3       Requests              1   Servers",
        "Capacity        ParaQ4       Requests              1   Servers",
    ];
    for row in expected {
        ensure(text.lines().any(|l| l == row), || format!("missing row `{row}`"))?;
    }
    for k in 1..=4 {
        for field in ["0.5000   Requests/Sec", "12.5000   Percent", "0.1429   Requests"] {
            ensure(
                text.lines()
                    .any(|l| l.contains(&format!("ParaQ{k} ")) && l.ends_with(field)),
                || format!("ParaQ{k} lacks `{field}`"),
            )?;
        }
    }
    Ok("Throughput 0.5000, Utilization 12.5000 Percent, Queue length 0.1429 on ParaQ1..4".into())
}

fn dual_disk() -> Outcome {
    let start = Instant::now();
    let opt = optimizer::optimize_dual(166.67, 0.005, 0.015).map_err(|e| e.to_string())?;
    let took = within_time(start, Duration::from_millis(100))?;
    let phi = opt.routing.fractions()[0];
    ensure((phi - 0.819612).abs() <= 1e-4, || format!("phi = {phi}"))?;
    ensure((opt.response_time - 0.017857).abs() <= 1e-5, || {
        format!("R* = {}", opt.response_time)
    })?;
    let array = HeterogeneousArray::new(166.67, vec![0.005, 0.015]).map_err(|e| e.to_string())?;
    let g = gradient(&array, &opt.routing).map_err(|e| e.to_string())?;
    let slope = g[0] - g[1];
    ensure(slope.abs() <= 1e-6, || format!("dR/dphi = {slope:e}"))?;
    Ok(format!(
        "phi = {phi:.6}, R* = {:.6}, dR/dphi = {slope:.1e}, {took:?}",
        opt.response_time
    ))
}

fn quad_disk() -> Outcome {
    let array = HeterogeneousArray::new(166.67, vec![0.005, 0.015, 0.020, 0.020])
        .map_err(|e| e.to_string())?;
    let opt = optimizer::optimize_m(&array).map_err(|e| e.to_string())?;
    let phi = opt.routing.fractions();
    let expected = [0.73442, 0.13119, 0.06719, 0.06719];
    for (k, (p, e)) in phi.iter().zip(expected).enumerate() {
        ensure((p - e).abs() <= 1e-4, || format!("phi_{} = {p}, expected {e}", k + 1))?;
    }
    ensure(phi[2] == phi[3], || format!("phi_3 {} != phi_4 {}", phi[2], phi[3]))?;
    ensure((opt.response_time - 0.0158568).abs() <= 1e-5, || {
        format!("R*_4 = {}", opt.response_time)
    })?;
    // objective evaluated at the reference routing, independent of the optimizer
    let reference = RoutingVector::normalized(&[0.73442474, 0.13118558, 0.06719483, 0.06719483])
        .map_err(|e| e.to_string())?;
    let at_reference = objective(&array, &reference).map_err(|e| e.to_string())?;
    ensure((at_reference - 0.0158568).abs() <= 1e-5, || {
        format!("objective at reference routing {at_reference}")
    })?;
    Ok(format!(
        "phi = {:.5?}, R*_4 = {:.7} (objective at reference routing {at_reference:.7})",
        phi, opt.response_time
    ))
}

fn corollary() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = rng.random_range(1..=64u32);
        let stage = 10f64.powf(rng.random_range(-4.0..0.0));
        let lambda = rng.random_range(1e-6..0.999) / stage;
        let serial = OpenNetwork::homogeneous_tandem(lambda, stage, m, "Stage")
            .map_err(|e| e.to_string())?;
        let r_serial = solve(&serial).map_err(|e| e.to_string())?.system_residence;
        let para = parallelize_transform(&serial, true).map_err(|e| e.to_string())?;
        let r_para = solve(&para).map_err(|e| e.to_string())?.system_residence;
        worst = worst.max(rel(r_para, r_serial / f64::from(m)));
    }
    ensure(worst <= 1e-12, || format!("worst relative gap {worst:e}"))?;
    Ok(format!("100 tuples, R_para = R_serial/m, worst relative gap {worst:.1e}"))
}

fn feedback_remark() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut tested = 0;
    let mut smallest_gap = f64::INFINITY;
    while tested < 1000 {
        let m = rng.random_range(2..=64u32);
        let s = 10f64.powf(rng.random_range(-4.0..1.0));
        // λS < 1 keeps the feedback queue stable too
        let lambda = rng.random_range(1e-6..0.999) / s;
        let fb = feedback_residence(lambda, s / f64::from(m), m).map_err(|e| e.to_string())?;
        let tandem = tandem_residence(lambda, s, m).map_err(|e| e.to_string())?;
        ensure(fb > tandem, || {
            format!("lambda={lambda} S={s} m={m}: feedback {fb} <= tandem {tandem}")
        })?;
        smallest_gap = smallest_gap.min((fb - tandem) / tandem);
        tested += 1;
    }
    Ok(format!("{tested} tuples, smallest relative excess {smallest_gap:.2e}"))
}

fn simulation_oracle() -> Outcome {
    let start = Instant::now();
    let analytic = 0.25 / (1.0 - 0.125);
    let parallel = simulate(&SimConfig::new(
        42,
        2.0,
        200_000,
        SimTopology::homogeneous_parallel(0.25, 4),
    ))
    .map_err(|e| e.to_string())?;
    let tandem = simulate(&SimConfig::new(
        42,
        2.0,
        200_000,
        SimTopology::Tandem {
            stage_times: vec![0.0625; 4],
        },
    ))
    .map_err(|e| e.to_string())?;
    let took = within_time(start, Duration::from_secs(10))?;
    ensure(parallel.ci_contains(analytic), || {
        format!("parallel CI {:?} misses {analytic}", parallel.ci())
    })?;
    ensure(tandem.ci_contains(analytic), || {
        format!("tandem CI {:?} misses {analytic}", tandem.ci())
    })?;
    ensure(parallel.ci_overlaps(&tandem), || "CIs disjoint".to_string())?;
    let (a, b) = parallel.ci();
    let (c, d) = tandem.ci();
    Ok(format!(
        "analytic {analytic:.6}; parallel [{a:.6}, {b:.6}]; tandem [{c:.6}, {d:.6}]; {took:?}"
    ))
}

/// Brute-force simplex search for m = 3: a 1e-3 grid, then two finer grids
/// around the incumbent. Shares no code with the optimizer.
fn grid_search(lambda: f64, s: [f64; 3]) -> [f64; 3] {
    let value = |p: [f64; 3]| -> f64 {
        let mut total = 0.0;
        for k in 0..3 {
            let load = p[k] * lambda * s[k];
            if p[k] < 0.0 || load >= 1.0 {
                return f64::INFINITY;
            }
            total += p[k] * s[k] / (1.0 - load);
        }
        total
    };
    let mut best = ([1.0 / 3.0; 3], f64::INFINITY);
    let n = 1000;
    for i in 0..=n {
        for j in 0..=(n - i) {
            let p = [i as f64 / n as f64, j as f64 / n as f64, (n - i - j) as f64 / n as f64];
            let v = value(p);
            if v < best.1 {
                best = (p, v);
            }
        }
    }
    for (radius, step) in [(2e-3, 2e-5), (4e-5, 4e-7)] {
        let centre = best.0;
        let span = (radius / step) as i64;
        for a in -span..=span {
            for b in -span..=span {
                let p0 = centre[0] + a as f64 * step;
                let p1 = centre[1] + b as f64 * step;
                let p = [p0, p1, 1.0 - p0 - p1];
                let v = value(p);
                if v < best.1 {
                    best = (p, v);
                }
            }
        }
    }
    best.0
}

fn grid_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let s = [
            rng.random_range(0.002..0.05),
            rng.random_range(0.002..0.05),
            rng.random_range(0.002..0.05),
        ];
        let capacity: f64 = s.iter().map(|x| 1.0 / x).sum();
        let lambda = rng.random_range(0.05..0.95) * capacity;
        let array = HeterogeneousArray::new(lambda, s.to_vec()).map_err(|e| e.to_string())?;
        let opt = optimizer::optimize_m(&array).map_err(|e| e.to_string())?;
        let grid = grid_search(lambda, s);
        for (p, g) in opt.routing.fractions().iter().zip(grid) {
            worst = worst.max((p - g).abs());
        }
    }
    ensure(worst <= 5e-4, || format!("worst fraction gap {worst:e}"))?;
    let took = within_time(start, Duration::from_secs(30))?;
    Ok(format!("20 instances, worst fraction gap {worst:.1e}, {took:?}"))
}

fn cloud_scenario() -> Outcome {
    let mut report = Vec::new();
    for lambda in [0.001, 0.1, 0.5, 1.0] {
        let text = format!(
            "[network]\narrival_rate = {lambda}\n[tandem]\nstages = 300\nservice_time = 0.001\n"
        );
        let model: ModelFile = text.parse().map_err(|e: pfsq::Error| e.to_string())?;
        let net = model.network().map_err(|e| e.to_string())?.expect("tandem");
        let r = network::solve(&net).map_err(|e| e.to_string())?.system_residence;
        ensure((r - 0.300).abs() <= 0.01 * 0.300, || format!("lambda {lambda}: R = {r}"))?;
        report.push(format!("{lambda}->{:.2}ms", r * 1e3));
    }
    Ok(format!("300 x 1 ms stages: {}", report.join(", ")))
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    let mut points = 0;
    while points < 20 {
        let m = rng.random_range(2..=6usize);
        let s: Vec<f64> = (0..m).map(|_| rng.random_range(0.002..0.05)).collect();
        let capacity: f64 = s.iter().map(|x| 1.0 / x).sum();
        let lambda = rng.random_range(0.05..0.9) * capacity;
        let w: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
        let array = HeterogeneousArray::new(lambda, s.clone()).map_err(|e| e.to_string())?;
        let routing = RoutingVector::normalized(&w).map_err(|e| e.to_string())?;
        let Ok(g) = gradient(&array, &routing) else {
            continue; // unstable draw
        };
        // per-coordinate central difference of the separable objective
        let h = 1e-7;
        for k in 0..m {
            let term = |p: f64| p * s[k] / (1.0 - p * lambda * s[k]);
            let p = routing.fractions()[k];
            if (p + h) * lambda * s[k] >= 1.0 {
                continue;
            }
            let fd = (term(p + h) - term(p - h)) / (2.0 * h);
            worst = worst.max(rel(g[k], fd));
        }
        points += 1;
    }
    ensure(worst <= 1e-5, || format!("worst relative gap {worst:e}"))?;
    Ok(format!("{points} points, worst relative gap {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("parallel/tandem identity", theorem_identity),
        ("enumerated-array report rows", listing_report),
        ("dual disk optimum", dual_disk),
        ("quad disk optimum", quad_disk),
        ("parallelize with retained stage load", corollary),
        ("feedback exceeds tandem", feedback_remark),
        ("simulation oracle", simulation_oracle),
        ("optimizer vs grid search", grid_oracle),
        ("300-stage tandem calibration", cloud_scenario),
        ("gradient vs finite differences", gradient_check),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
