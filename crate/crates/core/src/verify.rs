//! Self-verification: the numbered acceptance checks, each returning a pass/fail outcome
//! with human-readable details. Reports contain no timing figures, so repeated runs print
//! identical text.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::Result;
use crate::estimation;
use crate::measures;
use crate::numerics::QuadratureRule;
use crate::profile::Profile;
use crate::states::{self, OscillatorState};
use crate::susy::{self, DeformationParameter};
use crate::sweep::{self, LambdaGrid, MeasureReport, MeasureTag, SweepConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckOutcome {
    /// `PASS [n] name` or `FAIL [n] name`, followed by indented details.
    pub fn render(&self) -> String {
        let mut s = format!("{} [{}] {}\n", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name);
        for d in &self.details {
            s.push_str("       ");
            s.push_str(d);
            s.push('\n');
        }
        s
    }
}

struct Check {
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    started: Instant,
    passed: bool,
    details: Vec<String>,
}

impl Check {
    fn start(id: u8, name: &'static str, limit_secs: Option<u64>) -> Self {
        Check {
            id,
            name,
            limit: limit_secs.map(Duration::from_secs),
            started: Instant::now(),
            passed: true,
            details: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, detail: String) {
        let tag = if ok { "ok  " } else { "FAIL" };
        self.details.push(format!("{tag} {detail}"));
        self.passed &= ok;
    }

    fn note(&mut self, detail: String) {
        self.details.push(format!("note {detail}"));
    }

    fn error(&mut self, what: &str, e: crate::Error) {
        self.expect(false, format!("{what}: {e}"));
    }

    fn finish(mut self) -> CheckOutcome {
        let elapsed = self.started.elapsed();
        if let Some(limit) = self.limit {
            if elapsed > limit {
                self.expect(false, format!("runtime exceeded {} s", limit.as_secs()));
            }
        }
        log::info!("check {} finished in {:.2?}", self.id, elapsed);
        CheckOutcome { id: self.id, name: self.name, passed: self.passed, details: self.details, elapsed }
    }
}

fn lam(v: f64) -> DeformationParameter {
    DeformationParameter::new(v).expect("check grid values are admissible")
}

fn ground_sweep(measures: &[MeasureTag], temps: &[Option<f64>]) -> Result<Vec<MeasureReport>> {
    sweep::run_sweep(&SweepConfig {
        lambda: LambdaGrid::ground_default(),
        temperatures: temps.to_vec(),
        measures: measures.iter().copied().collect(),
        profile: Profile::default(),
        threads: None,
    })
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

const CLOSED_FORM_LAMBDAS: [f64; 6] = [0.0, 0.1, 1.0, 10.0, 100.0, 1e3];

/// 1. Quadrature QFI of the ground state against the closed form.
pub fn check_closed_form_qfi() -> CheckOutcome {
    check_closed_form_qfi_with(estimation::qfi_closed_form)
}

/// Check 1 against an arbitrary oracle (used to confirm the check can fail).
pub fn check_closed_form_qfi_with(oracle: impl Fn(DeformationParameter) -> f64) -> CheckOutcome {
    let mut c = Check::start(1, "closed-form QFI match", Some(5));
    let mut worst: f64 = 0.0;
    for &l in &CLOSED_FORM_LAMBDAS {
        match estimation::qfi_pure(lam(l)) {
            Ok(h) => worst = worst.max(relative(h.value, oracle(lam(l)))),
            Err(e) => c.error("qfi_pure", e),
        }
    }
    c.expect(
        worst <= 1e-6,
        format!("max relative error {worst:.2e} over lambda in {CLOSED_FORM_LAMBDAS:?} (limit 1e-6)"),
    );
    c.finish()
}

const OPTIMALITY_GROUND: [f64; 10] = [0.0, 0.01, 0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0, 1000.0];
const OPTIMALITY_THERMAL: [f64; 3] = [1.0, 10.0, 100.0];
const TEMPERATURES: [f64; 3] = [0.25, 0.33, 0.5];

/// 2. Position measurements reach the QFI.
pub fn check_position_optimality() -> CheckOutcome {
    let mut c = Check::start(2, "position-measurement optimality", Some(120));
    let mut worst: f64 = 0.0;
    for &l in &OPTIMALITY_GROUND {
        let st = OscillatorState::ground(lam(l));
        match (estimation::classical_fi(&st), estimation::qfi(&st)) {
            (Ok(f), Ok(h)) => worst = worst.max(relative(f.value, h.value)),
            (Err(e), _) | (_, Err(e)) => c.error("ground Fisher information", e),
        }
    }
    c.expect(worst <= 1e-4, format!("ground: max |F-H|/H = {worst:.2e} at 10 lambda points (limit 1e-4)"));
    for &t in &TEMPERATURES {
        for &l in &OPTIMALITY_THERMAL {
            let st = match OscillatorState::thermal(lam(l), t) {
                Ok(s) => s,
                Err(e) => {
                    c.error("thermal state", e);
                    continue;
                }
            };
            match (estimation::classical_fi(&st), estimation::qfi(&st)) {
                (Ok(f), Ok(h)) => {
                    let r = relative(f.value, h.value);
                    c.expect(
                        r <= 1e-3,
                        format!("T={t} lambda={l}: F={:.6e} H={:.6e} |F-H|/H={r:.2e} (limit 1e-3)", f.value, h.value),
                    );
                }
                (Err(e), _) | (_, Err(e)) => c.error("thermal Fisher information", e),
            }
        }
    }
    c.finish()
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn ground_delta(l: f64) -> Result<f64> {
    Ok(measures::nong_delta(&OscillatorState::ground(lam(l)))?.value)
}

/// Vertex of the parabola through three points.
fn parabola_peak(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d = (x[0] - x[1]) * (x[0] - x[2]) * (x[1] - x[2]);
    let a = (x[2] * (y[1] - y[0]) + x[1] * (y[0] - y[2]) + x[0] * (y[2] - y[1])) / d;
    let b = (x[2] * x[2] * (y[0] - y[1]) + x[1] * x[1] * (y[2] - y[0]) + x[0] * x[0] * (y[1] - y[2])) / d;
    let c =
        (x[1] * x[2] * (x[1] - x[2]) * y[0] + x[2] * x[0] * (x[2] - x[0]) * y[1] + x[0] * x[1] * (x[0] - x[1]) * y[2])
            / d;
    let xv = -b / (2.0 * a);
    (xv, c - b * b / (4.0 * a))
}

fn interior_maxima(v: &[f64]) -> Vec<usize> {
    (1..v.len() - 1).filter(|&i| v[i] > v[i - 1] && v[i] > v[i + 1]).collect()
}

/// 3. Shape of the ground-state non-Gaussianity curve.
pub fn check_nong_curve() -> CheckOutcome {
    let mut c = Check::start(3, "ground-state non-Gaussianity curve", Some(60));
    match ground_sweep(&[MeasureTag::Nong], &[None]) {
        Ok(rows) => {
            let xs: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
            let ys: Vec<f64> = rows.iter().map(|r| r.delta_nong.unwrap_or(f64::NAN)).collect();
            let peaks = interior_maxima(&ys);
            let global = (0..ys.len()).max_by(|&a, &b| ys[a].total_cmp(&ys[b])).unwrap_or(0);
            let single = peaks.len() == 1 && peaks[0] == global;
            c.expect(single, format!("interior maxima on the 61-point grid: {}", peaks.len()));
            if global > 0 && global + 1 < ys.len() {
                let lx = [xs[global - 1].ln(), xs[global].ln(), xs[global + 1].ln()];
                let (lv, dv) = parabola_peak(lx, [ys[global - 1], ys[global], ys[global + 1]]);
                let lp = lv.exp();
                c.expect(
                    (0.23..=0.29).contains(&dv) && (55.0..=90.0).contains(&lp),
                    format!("max delta {dv:.4} at lambda {lp:.1} (window [0.23, 0.29] x [55, 90])"),
                );
            } else {
                c.expect(false, "maximum sits on the grid boundary".into());
            }
        }
        Err(e) => c.error("sweep", e),
    }
    let small: Vec<f64> = (0..15).map(|i| 0.01 * 30f64.powf(i as f64 / 14.0)).collect();
    match small.iter().map(|&l| ground_delta(l)).collect::<Result<Vec<_>>>() {
        Ok(d) => {
            let s = log_slope(&small, &d);
            c.expect((s - 2.0).abs() <= 0.1, format!("log-log slope on [0.01, 0.3]: {s:.3} (target 2 +/- 0.1)"));
        }
        Err(e) => c.error("small-lambda delta", e),
    }
    for (a, b) in [(1e-3, 1e-2), (1e-4, 1e-3)] {
        if let (Ok(da), Ok(db)) = (ground_delta(a), ground_delta(b)) {
            c.note(format!("local slope on [{a:e}, {b:e}]: {:.3}", (db / da).ln() / (b / a).ln()));
        }
    }
    c.finish()
}

fn fano_at(l: f64, t: Option<f64>, truncate: Option<usize>) -> Result<f64> {
    let st = OscillatorState::new(lam(l), t, Profile::default())?;
    let f = match truncate {
        Some(n) => measures::fano_factor_truncated(&st, n)?,
        None => measures::fano_factor(&st)?,
    };
    Ok(f.value)
}

/// First downward crossing of F = 1 on a log scan of [lo, hi], refined by bisection.
fn fano_crossing(t: Option<f64>, lo: f64, hi: f64, truncate: Option<usize>) -> Result<(Option<f64>, f64, f64)> {
    const SCAN: usize = 25;
    let xs: Vec<f64> = (0..SCAN).map(|i| lo * (hi / lo).powf(i as f64 / (SCAN - 1) as f64)).collect();
    let fs = xs.iter().map(|&l| fano_at(l, t, truncate)).collect::<Result<Vec<_>>>()?;
    let fmin = fs.iter().copied().fold(f64::INFINITY, f64::min);
    let fmax = fs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let Some(i) = (0..SCAN - 1).find(|&i| fs[i] >= 1.0 && fs[i + 1] < 1.0) else {
        return Ok((None, fmin, fmax));
    };
    let (mut a, mut b) = (xs[i], xs[i + 1]);
    for _ in 0..30 {
        let m = (a * b).sqrt();
        if fano_at(m, t, truncate)? >= 1.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok((Some((a * b).sqrt()), fmin, fmax))
}

/// 4. λ at which the Fano factor drops below one.
pub fn check_fano_thresholds() -> CheckOutcome {
    let mut c = Check::start(4, "Fano-factor thresholds", Some(300));
    let cases =
        [(None, "ground", 100.0, 2000.0, (285.0, 345.0)), (Some(0.25), "T=0.25", 300.0, 2000.0, (765.0, 1035.0))];
    for (t, label, lo, hi, (wa, wb)) in cases {
        match fano_crossing(t, lo, hi, None) {
            Ok((Some(x), _, _)) => {
                c.expect((wa..=wb).contains(&x), format!("{label}: F crosses 1 at lambda {x:.1} (window [{wa}, {wb}])"))
            }
            Ok((None, fmin, fmax)) => c.expect(
                false,
                format!("{label}: no crossing on [{lo}, {hi}], F in [{fmin:.4}, {fmax:.4}] (window [{wa}, {wb}])"),
            ),
            Err(e) => c.error(label, e),
        }
        if let Ok((Some(x), _, _)) = fano_crossing(t, lo, hi, Some(11)) {
            c.note(format!("{label}: with the Fock basis cut at n <= 11 the crossing moves to lambda {x:.1}"));
        }
    }
    c.finish()
}

/// 5. Position squeezing of ground and thermal states.
pub fn check_squeezing() -> CheckOutcome {
    let mut c = Check::start(5, "quadrature squeezing", None);
    match ground_sweep(&[MeasureTag::Moments], &[None, Some(0.25), Some(0.5)]) {
        Ok(rows) => {
            let col = |t: Option<f64>| -> Vec<f64> {
                rows.iter().filter(|r| r.temperature == t).map(|r| r.var_x.unwrap_or(f64::NAN)).collect()
            };
            let g = col(None);
            let gmax = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            c.expect(g.iter().all(|&v| v < 0.5), format!("ground: max Var X on grid {gmax:.6} (< 1/2 required)"));
            let cold = col(Some(0.25)).into_iter().fold(f64::INFINITY, f64::min);
            c.expect(cold < 0.5, format!("T=0.25: min Var X {cold:.4} (< 1/2 somewhere required)"));
            let warm = col(Some(0.5)).into_iter().fold(f64::INFINITY, f64::min);
            c.expect(warm > 0.5, format!("T=0.5: min Var X {warm:.4} (> 1/2 everywhere required)"));
        }
        Err(e) => c.error("sweep", e),
    }
    match measures::quadrature_moments(&OscillatorState::ground(lam(1e-3))) {
        Ok(m) => {
            let d = (m.var_x() - 0.5).abs();
            c.expect(d <= 1e-6, format!("|Var X - 1/2| at lambda 1e-3: {d:.2e} (limit 1e-6)"));
        }
        Err(e) => c.error("moments", e),
    }
    c.finish()
}

/// 6. Wigner normalization, marginals and the negativity curve.
pub fn check_wigner() -> CheckOutcome {
    let mut c = Check::start(6, "Wigner sanity and negativity", None);
    match measures::wigner_negativity_auto(&OscillatorState::ground(lam(0.0))) {
        Ok(w) => c.expect(w.value <= 1e-5, format!("lambda=0: nu = {:.2e} (limit 1e-5)", w.value)),
        Err(e) => c.error("vacuum negativity", e),
    }
    match ground_sweep(&[MeasureTag::Wigner], &[None]) {
        Ok(rows) => {
            let nu: Vec<f64> = rows.iter().map(|r| r.wigner_negativity.unwrap_or(f64::NAN)).collect();
            let missing = nu.iter().filter(|v| !v.is_finite()).count();
            c.expect(missing == 0, format!("unconverged grid points: {missing}"));
            let k = (0..nu.len()).max_by(|&a, &b| nu[a].total_cmp(&nu[b])).unwrap_or(0);
            let rises = (0..k).filter(|&i| nu[i + 1] > nu[i]).count();
            let falls = (k..nu.len() - 1).filter(|&i| nu[i + 1] < nu[i]).count();
            let last = nu[nu.len() - 1];
            c.expect(
                rises >= 3 && falls >= 3 && last < nu[k],
                format!(
                    "peak nu {:.4} at lambda {:.1}; {rises} rising and {falls} falling steps; nu(1e3) = {last:.4}",
                    nu[k], rows[k].lambda
                ),
            );
        }
        Err(e) => c.error("sweep", e),
    }
    for (l, t) in [(10.0, None), (300.0, None), (30.0, Some(0.33))] {
        let res = OscillatorState::new(lam(l), t, Profile::default()).and_then(|st| {
            let grid = measures::default_wigner_grid(&st)?;
            let w = measures::wigner(&st, &grid)?;
            let mut worst: f64 = 0.0;
            for i in 0..grid.nx {
                let x = grid.x(i);
                let mut rho = 0.0;
                for (k, p) in st.populations().iter().enumerate() {
                    rho += p * susy::wavefunction(k, st.lambda(), x)?.powi(2);
                }
                worst = worst.max((w.x_marginal(i) - rho).abs());
            }
            Ok((worst, w.integral()))
        });
        match res {
            Ok((worst, norm)) => c.expect(
                worst <= 1e-5 && (norm - 1.0).abs() <= 1e-5,
                format!(
                    "lambda={l} {}: max |marginal - rho(x,x)| = {worst:.2e}, integral {norm:.8}",
                    t.map_or("ground".into(), |t| format!("T={t}"))
                ),
            ),
            Err(e) => c.error("marginals", e),
        }
    }
    c.finish()
}

/// 7. Quadrature coherence scale of the ground states.
pub fn check_qcs() -> CheckOutcome {
    let mut c = Check::start(7, "quadrature coherence scale", None);
    for l in [0.0, 1e-3] {
        match measures::qcs(&OscillatorState::ground(lam(l))) {
            Ok(q) => {
                let d = (q.reduced - 1.0).abs();
                c.expect(d <= 1e-6, format!("|C - 1| at lambda {l:e}: {d:.2e} (limit 1e-6)"));
            }
            Err(e) => c.error("qcs", e),
        }
    }
    match ground_sweep(&[MeasureTag::Qcs], &[None]) {
        Ok(rows) => {
            let q: Vec<f64> = rows.iter().map(|r| r.qcs_paper.unwrap_or(f64::NAN)).collect();
            let bad = q.windows(2).filter(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)).count();
            c.expect(
                bad == 0,
                format!("C increasing on the 61-point grid ({bad} violations), C(1e3) = {:.4}", q[q.len() - 1]),
            );
        }
        Err(e) => c.error("sweep", e),
    }
    c.finish()
}

/// 8. Temperature ordering of the non-Gaussianity at λ = 50.
pub fn check_thermal_nong_ordering() -> CheckOutcome {
    let mut c = Check::start(8, "thermal non-Gaussianity ordering", None);
    let temps = [None, Some(0.25), Some(0.33), Some(0.5)];
    let deltas = temps
        .iter()
        .map(|&t| Ok(measures::nong_delta(&OscillatorState::new(lam(50.0), t, Profile::default())?)?.value))
        .collect::<Result<Vec<_>>>();
    match deltas {
        Ok(d) => c.expect(
            d.windows(2).all(|w| w[1] > w[0]),
            format!(
                "delta at lambda=50: ground {:.4} < T0.25 {:.4} < T0.33 {:.4} < T0.5 {:.4}",
                d[0], d[1], d[2], d[3]
            ),
        ),
        Err(e) => c.error("delta", e),
    }
    c.finish()
}

const STRUCTURAL_LAMBDAS: [f64; 3] = [1.0, 10.0, 100.0];

/// 9. Orthonormality, isospectrality, uncertainty relation and normalization.
pub fn check_structural() -> CheckOutcome {
    let mut c = Check::start(9, "structural oracles", None);
    let mut ortho: f64 = 0.0;
    let mut residual: f64 = 0.0;
    for &l in &STRUCTURAL_LAMBDAS {
        let res = (|| -> Result<()> {
            let rule = QuadratureRule::trapezoid(susy::support_half_width(8, 12.0).ceil(), 1.0 / 64.0)?;
            let vals: Vec<Vec<f64>> = (0..=8)
                .map(|n| rule.nodes().iter().map(|&x| susy::wavefunction(n, lam(l), x)).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?;
            for n in 0..=8 {
                for m in 0..=8 {
                    let prod: Vec<f64> = vals[n].iter().zip(&vals[m]).map(|(a, b)| a * b).collect();
                    let want = if n == m { 1.0 } else { 0.0 };
                    ortho = ortho.max((rule.apply_samples(&prod) - want).abs());
                }
            }
            for n in 0..=5 {
                residual = residual.max(susy::hamiltonian_residual(n, lam(l))?);
            }
            Ok(())
        })();
        if let Err(e) = res {
            c.error("eigenfunctions", e);
        }
    }
    c.expect(ortho <= 1e-8, format!("max |<phi_n|phi_m> - delta_nm| for n,m <= 8: {ortho:.2e} (limit 1e-8)"));
    c.expect(residual <= 1e-6, format!("max Hamiltonian residual for n <= 5: {residual:.2e} (limit 1e-6)"));

    match ground_sweep(&[MeasureTag::Moments], &[None, Some(0.25), Some(0.33), Some(0.5)]) {
        Ok(rows) => {
            let min_det = rows
                .iter()
                .map(|r| r.var_x.unwrap_or(f64::NAN) * r.var_p.unwrap_or(f64::NAN))
                .fold(f64::INFINITY, f64::min);
            c.expect(min_det >= 0.25 - 1e-9, format!("min det sigma over {} sweep points: {min_det:.6}", rows.len()));
        }
        Err(e) => c.error("sweep", e),
    }

    let mut worst: f64 = 0.0;
    let mut capped = 0;
    let probes = [(1.0, None), (10.0, None), (100.0, None), (500.0, None), (10.0, Some(0.25)), (100.0, Some(0.5))];
    for (l, t) in probes {
        let res = OscillatorState::new(lam(l), t, Profile::default()).and_then(|st| {
            let dist = states::photon_distribution(&st)?;
            let density = st.position_density()?;
            let table = st.table()?;
            let gibbs = st.gibbs().map_or(1.0, |g| g.probabilities.iter().sum::<f64>() + g.tail);
            Ok((dist.total(), table.rule().apply_samples(&density), gibbs, dist.converged))
        });
        match res {
            Ok((p, rho, g, conv)) => {
                let pops_total = if t.is_some() { 1.0 - 1e-12 } else { 1.0 };
                worst = worst.max((p - 1.0).abs()).max((rho - pops_total).abs()).max((g - 1.0).abs());
                capped += usize::from(!conv);
            }
            Err(e) => c.error("distributions", e),
        }
    }
    c.expect(
        worst <= 1e-6 && capped == 0,
        format!(
            "max normalization defect (photon, position, Gibbs): {worst:.2e} (limit 1e-6), capped Fock cuts: {capped}"
        ),
    );
    c.finish()
}

/// 10. Large-λ behaviour of the ground-state QFI.
pub fn check_snr_asymptote() -> CheckOutcome {
    let mut c = Check::start(10, "signal-to-noise asymptote", None);
    let l = 1e4;
    match estimation::qfi_pure(lam(l)) {
        Ok(h) => {
            let v = l * l * h.value;
            let r = relative(v, 1.0 / 3.0);
            c.expect(r <= 0.01, format!("lambda^2 H at lambda=1e4: {v:.6} (within 1% of 1/3: {r:.2e})"));
        }
        Err(e) => c.error("qfi_pure", e),
    }
    c.finish()
}

/// Every check in order.
pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        check_closed_form_qfi(),
        check_position_optimality(),
        check_nong_curve(),
        check_fano_thresholds(),
        check_squeezing(),
        check_wigner(),
        check_qcs(),
        check_thermal_nong_ordering(),
        check_structural(),
        check_snr_asymptote(),
    ]
}

/// Full text report with a summary line.
pub fn render_report(outcomes: &[CheckOutcome]) -> String {
    let mut s: String = outcomes.iter().map(CheckOutcome::render).collect();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    s.push_str(&format!("{passed}/{} checks passed\n", outcomes.len()));
    s
}
