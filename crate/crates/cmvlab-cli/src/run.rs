//! The command pipelines.
//!
//! [`execute`] turns a validated config into result tables without touching
//! the file system; [`run`] adds the output files, the manifest and the
//! error record.

use std::path::{Path, PathBuf};

use cmvlab::cmvop::{det_transfer_check, green_decay_scan};
use cmvlab::cocycle::{szego_product, SpectralPoint};
use cmvlab::linalg::{mat2_op_norm, Mat2};
use cmvlab::lyapunov::{
    ap_check, finite_lyapunov, ldt_fit, ldt_measure, rate_table, LdtExceptionalSet, DEFAULT_C_A,
};
use cmvlab::qwalk::{build_walk, evolve, unitary_equiv_check, walk_lyapunov_compare, walk_to_cmv, WalkState};
use cmvlab::spectral::{
    double_resonance_gap, eigenpairs, isolated_central_eigenpairs, localization_fit, orbit_visit_count,
    visit_exponent,
};
use cmvlab::{CoinField, Error, FiniteCMV, Frequency, Phase, SamplingFunction};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::{Command, ExperimentConfig, VisitScale};
use crate::error::CliError;
use crate::output::{col, write_atomic, Cell, Format, RunManifest, Table};

/// Tables and headline numbers of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: Command,
    pub tables: Vec<Table>,
    pub summary: Value,
}

/// Where and how a run writes.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub format: Format,
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let canonical = serde_json::to_string(cfg).expect("configs serialize");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs every command of the config and writes its outputs and manifest.
///
/// On failure an error record is written to `error.json` in the output
/// directory (when it can be created) and the error is returned.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunManifest, CliError> {
    let started_at = now();
    let result = run_inner(cfg, opts, &started_at);
    if let Err(err) = &result {
        write_error_record(&opts.out_dir, err);
    }
    result
}

/// Best effort: a failure to write the record must not mask the error.
pub fn write_error_record(out_dir: &Path, err: &CliError) {
    let text = serde_json::to_string_pretty(&err.record()).expect("records serialize") + "\n";
    let _ = write_atomic(&out_dir.join("error.json"), text.as_bytes());
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn run_inner(cfg: &ExperimentConfig, opts: &RunOptions, started_at: &str) -> Result<RunManifest, CliError> {
    let hash = config_hash(cfg);
    let resolved = serde_json::to_value(cfg).expect("configs serialize");
    let mut outputs = Vec::new();
    let mut summary = Map::new();
    for command in cfg.commands() {
        let outcome = execute(command, cfg)?;
        for table in &outcome.tables {
            let provenance = json!({
                "tool": "cmvlab",
                "tool_version": crate::TOOL_VERSION,
                "command": command.name(),
                "table": table.name,
                "config_hash": hash,
                "config": resolved,
            });
            let text = match opts.format {
                Format::Csv => table.to_csv(&provenance),
                Format::Json => table.to_json(&provenance),
            };
            let path = opts.out_dir.join(format!("{}.{}", table.name, opts.format.extension()));
            write_atomic(&path, text.as_bytes())?;
            outputs.push(path);
        }
        summary.insert(command.name().to_string(), outcome.summary);
    }
    let manifest = RunManifest {
        command: cfg.commands().iter().map(|c| c.name()).collect::<Vec<_>>().join("+"),
        config_hash: hash,
        seed: cfg.seed,
        started_at: started_at.to_string(),
        finished_at: now(),
        outputs,
        tool_version: crate::TOOL_VERSION.to_string(),
        summary,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifests serialize") + "\n";
    write_atomic(&opts.out_dir.join("manifest.json"), text.as_bytes())?;
    Ok(manifest)
}

/// Runs one command in memory.
pub fn execute(command: Command, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let lib = |source: Error| CliError::Library {
        command: command.name().to_string(),
        source,
    };
    let ctx = Context::new(cfg).map_err(|e| match e {
        ContextError::Config(c) => CliError::Config(c),
        ContextError::Library(l) => lib(l),
    })?;
    let (tables, summary) = match command {
        Command::LyapunovScan => lyapunov_scan(&ctx),
        Command::Ldt => ldt(&ctx),
        Command::ApCheck => ap(&ctx),
        Command::RateTable => rates(&ctx),
        Command::GreenCheck => green_check(&ctx),
        Command::GreenDecay => green_decay(&ctx),
        Command::Spectrum => spectrum(&ctx),
        Command::Localize => localize(&ctx),
        Command::Resonance => resonance(&ctx),
        Command::Visits => visits(&ctx),
        Command::QwalkGauge => qwalk_gauge(&ctx),
        Command::QwalkEquiv => qwalk_equiv(&ctx),
        Command::QwalkEvolve => qwalk_evolve(&ctx),
        Command::QwalkLyapunov => qwalk_lyapunov(&ctx),
    }
    .map_err(lib)?;
    Ok(Outcome {
        command,
        tables,
        summary,
    })
}

type Produced = cmvlab::Result<(Vec<Table>, Value)>;

enum ContextError {
    Config(crate::error::ConfigError),
    Library(Error),
}

/// Everything a command needs, built once from the config.
struct Context<'a> {
    cfg: &'a ExperimentConfig,
    omega: Frequency,
    x0: Phase,
    thetas: Vec<f64>,
    alpha: Option<SamplingFunction>,
    coins: Option<CoinField>,
}

impl<'a> Context<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self, ContextError> {
        let model = cfg.load_model().map_err(ContextError::Config)?;
        let needs_coins = cfg.commands().iter().any(|c| c.needs_coins());
        let needs_alpha = cfg.commands().iter().any(|c| !c.needs_coins());
        Ok(Context {
            cfg,
            omega: cfg.frequency().map_err(ContextError::Config)?,
            x0: cfg.x0().map_err(ContextError::Config)?,
            thetas: cfg.z.thetas(),
            alpha: if needs_alpha {
                Some(model.sampling_function().map_err(ContextError::Library)?)
            } else {
                None
            },
            coins: if needs_coins {
                Some(model.coin_field().map_err(ContextError::Library)?)
            } else {
                None
            },
        })
    }

    fn alpha(&self) -> &SamplingFunction {
        self.alpha.as_ref().expect("checked by the config")
    }

    fn coins(&self) -> &CoinField {
        self.coins.as_ref().expect("checked by the config")
    }

    fn truncation(&self) -> cmvlab::Result<FiniteCMV> {
        let (a, b) = self.cfg.interval();
        FiniteCMV::from_model(
            self.alpha(),
            &self.x0,
            &self.omega,
            a,
            b,
            self.cfg.beta.value(),
            self.cfg.eta.value(),
        )
    }
}

const THETA: crate::output::Column = col("theta", "rad", "spectral parameter z = e^{iθ}");

fn lyapunov_scan(ctx: &Context) -> Produced {
    let cfg = ctx.cfg;
    let mut t = Table::new(
        "lyapunov_scan",
        vec![
            THETA,
            col("n", "steps", "length of the transfer matrix product"),
            col("mean", "nats/step", "estimate of L_n = E (1/n) log‖M_n(x)‖"),
            col("stderr", "nats/step", "standard error of the mean over phases"),
            col("samples", "count", "number of sampled phases"),
        ],
    );
    for &theta in &ctx.thetas {
        let e = finite_lyapunov(ctx.alpha(), &ctx.omega, &SpectralPoint::new(theta), cfg.n, cfg.samples, cfg.seed)?;
        t.push(vec![theta.into(), e.n.into(), e.mean.into(), e.stderr.into(), e.sample_count.into()]);
    }
    let means = t.column_values("mean");
    let summary = json!({
        "points": means.len(),
        "min_mean": means.iter().cloned().fold(f64::INFINITY, f64::min),
        "max_mean": means.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    });
    Ok((vec![t], summary))
}

fn ldt(ctx: &Context) -> Produced {
    let cfg = ctx.cfg;
    let mut t = Table::new(
        "ldt",
        vec![
            THETA,
            col("n", "steps", "scale of the deviation"),
            col("tau", "1", "exponent τ of the threshold n^{1−τ}"),
            col("threshold", "nats", "n^{1−τ}"),
            col("measure", "1", "fraction of phases with |log‖M_n‖ − nL_n| > n^{1−τ}"),
            col("exceptional", "count", "number of such phases"),
            col("samples", "count", "number of sampled phases"),
            col("l_n", "nats/step", "L_n the deviations are measured from"),
        ],
    );
    let mut per_theta = Vec::new();
    for &theta in &ctx.thetas {
        let z = SpectralPoint::new(theta);
        let reports = cfg
            .n_list
            .iter()
            .map(|&n| ldt_measure(ctx.alpha(), &ctx.omega, &z, n, cfg.tau, cfg.samples, cfg.seed, None))
            .collect::<cmvlab::Result<Vec<_>>>()?;
        for r in &reports {
            t.push(vec![
                theta.into(),
                r.n.into(),
                r.tau.into(),
                r.deviation_threshold.into(),
                r.measure_estimate.into(),
                r.exceptional_count.into(),
                r.sample_count.into(),
                r.l_n.into(),
            ]);
        }
        let nonincreasing = reports.windows(2).all(|w| w[1].measure_estimate <= w[0].measure_estimate);
        let fit = ldt_fit(&reports);
        per_theta.push(json!({
            "theta": theta,
            "nonincreasing": nonincreasing,
            "fit_c0": fit.map(|f| f.c0),
            "fit_sigma": fit.map(|f| f.sigma),
        }));
    }
    Ok((vec![t], json!({ "per_theta": per_theta })))
}

/// A chain of m constant-coefficient Szegő blocks with lengths in [l, 2l].
///
/// The coefficient and the spectral parameter are drawn per chain so that
/// |cos(θ/2)|/ρ ≥ 1.2, which makes every block hyperbolic and all of them
/// expand the same direction.
pub fn constant_block_chain(seed: u64, index: u64, m: usize, l: usize) -> cmvlab::Result<Vec<Mat2>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let modulus = rng.random_range(0.6..0.9);
    let alpha = Complex64::from_polar(modulus, std::f64::consts::TAU * rng.random::<f64>());
    let rho = (1.0 - modulus * modulus).sqrt();
    let theta = loop {
        let t = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        if (t / 2.0).cos().abs() / rho >= 1.2 {
            break t.rem_euclid(std::f64::consts::TAU);
        }
    };
    let z = SpectralPoint::new(theta);
    (0..m)
        .map(|_| {
            let len = rng.random_range(l..=2 * l);
            Ok(szego_product(&vec![alpha; len], &z)?.represented())
        })
        .collect()
}

/// Diagonal blocks diag(s_j, 1/s_j), for which the principle is an identity.
pub fn diagonal_chain(m: usize, scale: f64) -> Vec<Mat2> {
    let zero = Complex64::new(0.0, 0.0);
    (0..m)
        .map(|j| {
            let s = scale * (1.0 + j as f64);
            [[Complex64::new(s, 0.0), zero], [zero, Complex64::new(1.0 / s, 0.0)]]
        })
        .collect()
}

fn ap(ctx: &Context) -> Produced {
    let cfg = ctx.cfg;
    let mut t = Table::new(
        "ap_check",
        vec![
            col("chain", "index", "chain number; −1 for the diagonal chain"),
            col("kind", "label", "constant blocks or diagonal blocks"),
            col("m", "count", "number of blocks"),
            col("mu", "1", "μ = min_j ‖A_j‖"),
            col("residual", "nats", "|log‖A_m⋯A_1‖ + Σ log‖A_j‖ − Σ log‖A_{j+1}A_j‖|"),
            col("bound", "nats", "C_A·m/μ with C_A = 10"),
            col("hyp1", "bool", "min‖A_j‖ ≥ μ ≥ m"),
            col("hyp2", "bool", "pair defects below ½ log μ"),
            col("within_bound", "bool", "residual ≤ bound (only meaningful when both hypotheses hold)"),
        ],
    );
    let mut all_within = true;
    let mut push = |t: &mut Table, index: i64, kind: &str, chain: &[Mat2]| -> cmvlab::Result<()> {
        let mu = chain.iter().map(mat2_op_norm).fold(f64::INFINITY, f64::min);
        let r = ap_check(chain, mu, DEFAULT_C_A)?;
        let within = r.within_bound == Some(true);
        all_within &= within;
        t.push(vec![
            index.into(),
            kind.into(),
            r.m.into(),
            r.mu.into(),
            r.residual.into(),
            r.bound.into(),
            r.hyp1_ok.into(),
            r.hyp2_ok.into(),
            within.into(),
        ]);
        Ok(())
    };
    for c in 0..cfg.chains {
        let chain = constant_block_chain(cfg.seed, c as u64, cfg.chain_len, cfg.block_len)?;
        push(&mut t, c as i64, "constant", &chain)?;
    }
    push(&mut t, -1, "diagonal", &diagonal_chain(cfg.chain_len, 100.0))?;
    let residuals = t.column_values("residual");
    let diagonal_residual = residuals.last().copied().unwrap_or(f64::NAN);
    let summary = json!({ "all_within_bound": all_within, "diagonal_residual": diagonal_residual });
    Ok((vec![t], summary))
}

fn rates(ctx: &Context) -> Produced {
    let cfg = ctx.cfg;
    let mut t = Table::new(
        "rate_table",
        vec![
            THETA,
            col("n", "steps", "scale"),
            col("l_n", "nats/step", "estimate of L_n"),
            col("stderr", "nats/step", "standard error of L_n"),
            col("diff", "nats/step", "L_n − L_ref with L_ref the largest-n estimate"),
        ],
    );
    let mut per_theta = Vec::new();
    for &theta in &ctx.thetas {
        let z = SpectralPoint::new(theta);
        let table = rate_table(ctx.alpha(), &ctx.omega, &z, &cfg.n_list, cfg.samples, cfg.seed, None, cfg.sigma)?;
        for r in &table.rows {
            t.push(vec![theta.into(), r.n.into(), r.l_n.into(), r.stderr.into(), r.diff.into()]);
        }
        per_theta.push(json!({
            "theta": theta,
            "monotone_ok": table.monotone_ok,
            "fit_constant": table.fit_constant,
            "l_ref": table.l_ref,
        }));
    }
    Ok((vec![t], json!({ "per_theta": per_theta })))
}

fn near_spectrum(e: &Error) -> bool {
    matches!(e, Error::NearSingular { .. })
}

fn green_check(ctx: &Context) -> Produced {
    let cfg = ctx.cfg;
    let op = ctx.truncation()?;
    let mut g = Table::new(
        "green_check",
        vec![
            THETA,
            col("j", "site", "row index"),
            col("k", "site", "column index, j ≤ k"),
            col("mag_product", "1", "|G(j,k)| from the determinant product formula"),
            col("mag_dense", "1", "|G(j,k)| from a linear solve with z L* − M"),
            col("rel_err", "1", "|mag_product − mag_dense| / mag_dense"),
        ],
    );
    let mut worst_green = 0.0_f64;
    let mut skipped = 0usize;
    for &theta in &ctx.thetas {
        let z = Complex64::cis(theta);
        let cols = match op.green_matrix(z) {
            Ok(c) => c,
            Err(e) if near_spectrum(&e) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        for j in op.a()..=op.b() {
            for k in j..=op.b() {
                let dense = cols[(k - op.a()) as usize][(j - op.a()) as usize].norm();
                let product = op.green_magnitude_product(j, k, z)?;
                let rel = (product - dense).abs() / dense.max(f64::MIN_POSITIVE);
                worst_green = worst_green.max(rel);
                g.push(vec![theta.into(), j.into(), k.into(), product.into(), dense.into(), rel.into()]);
            }
        }
    }

    let mut rel = Table::new(
        "relation",
        vec![
            THETA,
            col("n", "steps", "length of the transfer matrix"),
            col("status", "label", "ok, or guard when α_{−1} is too small to divide by"),
            col("residual", "1", "‖M_n − determinant expression‖_F"),
            col("relative_residual", "1", "residual / ‖M_n‖_F"),
            col("alternative_residual", "1", "the same with duals taken at degree n"),
        ],
    );
    let mut worst_relation = 0.0_f64;
    for &theta in &ctx.thetas {
        let z = SpectralPoint::new(theta);
        for n in 2..=cfg.relation_max_n.max(2) {
            match det_transfer_check(ctx.alpha(), &ctx.x0, &ctx.omega, &z, n) {
                Ok(r) => {
                    worst_relation = worst_relation.max(r.relative_residual);
                    rel.push(vec![
                        theta.into(),
                        n.into(),
                        "ok".into(),
                        r.residual.into(),
                        r.relative_residual.into(),
                        r.alternative_residual.into(),
                    ]);
                }
                Err(Error::DegenerateInput(_)) => {
                    rel.push(vec![theta.into(), n.into(), "guard".into(), f64::NAN.into(), f64::NAN.into(), f64::NAN.into()]);
                }
                Err(e) => return Err(e),
            }
        }
    }

    // eigenvectors of the truncation restricted to its middle half
    let mut poisson = Table::new(
        "poisson",
        vec![
            col("index", "count", "eigenpair index in increasing phase"),
            col("theta", "rad", "eigenphase"),
            col("m", "site", "reconstructed site"),
            col("residual", "1", "|u(m) − G(m,a) r_a − G(m,b) r_b|"),
        ],
    );
    let mut worst_poisson = 0.0_f64;
    let len = op.b() - op.a();
    if len >= 8 {
        let (ia, ib) = (op.a() + len / 4, op.b() - len / 4);
        let inner: Vec<Complex64> = (ia..ib).map(|k| op.coefficient(k)).collect();
        let small = FiniteCMV::new(ia, ib, &inner, cfg.beta.value(), cfg.eta.value())?;
        let m = (ia + ib).div_euclid(2);
        for (i, pair) in eigenpairs(&op)?.iter().enumerate().take(cfg.eigen_count.max(1) * 2) {
            match small.poisson_residual(&pair.vector, pair.first_site, pair.z(), m) {
                Ok(res) => {
                    worst_poisson = worst_poisson.max(res);
                    poisson.push(vec![i.into(), pair.theta.into(), m.into(), res.into()]);
                }
                Err(e) if near_spectrum(&e) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let summary = json!({
        "worst_green_rel_err": worst_green,
        "skipped_near_spectrum": skipped,
        "worst_relation_relative_residual": worst_relation,
        "worst_poisson_residual": worst_poisson,
    });
    Ok((vec![g, rel, poisson], summary))
}

fn green_decay(ctx: &Context) -> Produced {
    let cfg = ctx.cfg;
    let mut t = Table::new(
        "green_decay",
        vec![
            THETA,
            col("status", "label", "ok, or near-singular when z is too close to the spectrum"),
            col("a", "site", "left end of the interval"),
            col("b", "site", "right end of the interval"),
            col("gamma", "nats/site", "decay rate γ tested"),
            col("allowance", "nats", "sub-exponential allowance n^{0.9}"),
            col("worst_ratio", "1", "max over |j−k| ≥ n/4 of |G(j,k)| e^{γ|j−k| − n^{0.9}}"),
            col("violating", "count", "pairs with ratio > 1"),
        ],
    );
    let mut good = 0usize;
    for &theta in &ctx.thetas {
        let z = SpectralPoint::new(theta);
        let gamma = match cfg.gamma {
            Some(g) => g,
            None => finite_lyapunov(ctx.alpha(), &ctx.omega, &z, cfg.n, cfg.samples, cfg.seed)?.mean,
        };
        if !(gamma > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "measured decay rate {gamma} at θ = {theta} is not positive; set gamma"
            )));
        }
        match green_decay_scan(ctx.alpha(), &ctx.omega, &ctx.x0, cfg.n, &z, gamma) {
            Ok(r) => {
                good += usize::from(r.good);
                for iv in &r.intervals {
                    t.push(vec![
                        theta.into(),
                        "ok".into(),
                        iv.a.into(),
                        iv.b.into(),
                        gamma.into(),
                        r.allowance.into(),
                        iv.worst_ratio.into(),
                        iv.violating_pairs.len().into(),
                    ]);
                }
            }
            Err(e) if near_spectrum(&e) => {
                t.push(vec![
                    theta.into(),
                    "near-singular".into(),
                    Cell::Int(0),
                    Cell::Int(cfg.n as i64 - 1),
                    gamma.into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    Cell::Int(0),
                ]);
            }
            Err(e) => return Err(e),
        }
    }
    Ok((vec![t], json!({ "good_points": good, "points": ctx.thetas.len() })))
}

fn spectrum(ctx: &Context) -> Produced {
    let op = ctx.truncation()?;
    let pairs = eigenpairs(&op)?;
    let mut t = Table::new(
        "spectrum",
        vec![
            col("index", "count", "eigenpair index in increasing phase"),
            col("theta", "rad", "eigenphase in [0, 2π)"),
            col("residual", "1", "‖E v − z v‖ for the unit eigenvector"),
            col("factored_residual", "1", "‖(z L* − M) v‖"),
        ],
    );
    for (i, p) in pairs.iter().enumerate() {
        t.push(vec![i.into(), p.theta.into(), p.residual.into(), p.factored_residual.into()]);
    }
    let worst = pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok((vec![t], json!({ "dim": op.dim(), "worst_residual": worst })))
}

fn localize(ctx: &Context) -> Produced {
    let cfg = ctx.cfg;
    let op = ctx.truncation()?;
    let pairs = eigenpairs(&op)?;
    let chosen = isolated_central_eigenpairs(&pairs, cfg.eigen_count);
    let mut t = Table::new(
        "localize",
        vec![
            col("index", "count", "eigenpair index in increasing phase"),
            col("theta", "rad", "eigenphase"),
            col("isolation", "1", "chordal distance to the nearest other eigenvalue"),
            col("center", "site", "site of the largest entry"),
            col("rate", "nats/site", "fitted decay rate of |v(k)|"),
            col("fit_quality", "1", "R² of the fit"),
            col("lyapunov", "nats/step", "L_n(z) at the eigenvalue"),
            col("ratio", "1", "rate / lyapunov"),
            col("within", "bool", "ratio in [0.5, 1.5] and fit_quality > 0.8"),
        ],
    );
    let mut within_count = 0usize;
    for (index, isolation) in chosen {
        let pair = &pairs[index];
        let fit = localization_fit(pair)?;
        let l = finite_lyapunov(ctx.alpha(), &ctx.omega, &SpectralPoint::new(pair.theta), cfg.n, cfg.samples, cfg.seed)?.mean;
        let ratio = fit.rate / l;
        let within = (0.5..=1.5).contains(&ratio) && fit.fit_quality > 0.8;
        within_count += usize::from(within);
        t.push(vec![
            index.into(),
            pair.theta.into(),
            isolation.into(),
            fit.center.into(),
            fit.rate.into(),
            fit.fit_quality.into(),
            l.into(),
            ratio.into(),
            within.into(),
        ]);
    }
    let rows = t.rows.len();
    Ok((vec![t], json!({ "selected": rows, "within": within_count })))
}

fn resonance(ctx: &Context) -> Produced {
    let cfg = ctx.cfg;
    let mut t = Table::new(
        "resonance",
        vec![
            THETA,
            col("j", "sites", "half-width of the truncation"),
            col("a", "site", "left end"),
            col("b", "site", "right end"),
            col("gap", "1", "chordal distance from z to the truncation's spectrum"),
        ],
    );
    let mut per_theta = Vec::new();
    for &theta in &ctx.thetas {
        let r = double_resonance_gap(
            ctx.alpha(),
            &ctx.omega,
            &ctx.x0,
            &SpectralPoint::new(theta),
            cfg.n1,
            cfg.beta.value(),
            cfg.eta.value(),
            cfg.subsampling,
            cfg.convention,
        )?;
        for &(j, gap) in &r.ladder {
            let (a, b) = cfg.convention.interval(j);
            t.push(vec![theta.into(), j.into(), a.into(), b.into(), gap.into()]);
        }
        per_theta.push(json!({ "theta": theta, "gap": r.gap, "argmin_j": r.argmin_j }));
    }
    Ok((vec![t], json!({ "per_theta": per_theta })))
}

/// Scale of the large-deviation set used at orbit length N.
pub fn visit_scale(scale: VisitScale, fixed_n: usize, orbit_length: u64) -> usize {
    match scale {
        VisitScale::Fixed => fixed_n,
        VisitScale::CubeRoot => ((orbit_length as f64).cbrt().ceil() as usize).max(1),
    }
}

fn visits(ctx: &Context) -> Produced {
    let cfg = ctx.cfg;
    let mut t = Table::new(
        "visits",
        vec![
            THETA,
            col("orbit_length", "count", "N, the orbit x0 + kω with k = 1..N"),
            col("n", "steps", "scale of the large-deviation set"),
            col("l_n", "nats/step", "L_n the deviations are measured from"),
            col("count", "count", "visits of the orbit to the large-deviation set"),
            col("fraction", "1", "count / N"),
        ],
    );
    let mut per_theta = Vec::new();
    for &theta in &ctx.thetas {
        let z = SpectralPoint::new(theta);
        let mut rows = Vec::new();
        for &big_n in &cfg.orbit_lengths {
            let n = visit_scale(cfg.visit_scale, cfg.n, big_n);
            let l_n = finite_lyapunov(ctx.alpha(), &ctx.omega, &z, n, cfg.samples, cfg.seed)?.mean;
            let set = LdtExceptionalSet {
                alpha: ctx.alpha().clone(),
                omega: ctx.omega.clone(),
                z,
                n,
                tau: cfg.tau,
                l_n,
            };
            let v = orbit_visit_count(|x| set.contains(x), &ctx.x0, &ctx.omega, big_n)?;
            t.push(vec![theta.into(), big_n.into(), n.into(), l_n.into(), v.count.into(), v.fraction.into()]);
            rows.push(v);
        }
        per_theta.push(json!({ "theta": theta, "exponent": visit_exponent(&rows) }));
    }
    Ok((vec![t], json!({ "per_theta": per_theta })))
}

fn qwalk_gauge(ctx: &Context) -> Produced {
    let [s0, s1] = ctx.cfg.window;
    let g = walk_to_cmv(ctx.coins(), &ctx.x0, &ctx.omega, s0, s1)?;
    let mut t = Table::new(
        "qwalk_gauge",
        vec![
            col("n", "index", "CMV index k"),
            col("re_lambda", "1", "Re λ_k"),
            col("im_lambda", "1", "Im λ_k"),
            col("re_alpha_hat", "1", "Re α̂_k"),
            col("im_alpha_hat", "1", "Im α̂_k"),
        ],
    );
    for (k, l, a) in g.rows() {
        t.push(vec![k.into(), l.re.into(), l.im.into(), a.re.into(), a.im.into()]);
    }
    Ok((vec![t], json!({ "formula_gap": g.formula_gap })))
}

fn qwalk_equiv(ctx: &Context) -> Produced {
    let [s0, s1] = ctx.cfg.window;
    let r = unitary_equiv_check(ctx.coins(), &ctx.x0, &ctx.omega, s0, s1)?;
    let mut t = Table::new(
        "qwalk_equiv",
        vec![
            col("s0", "site", "left end of the window"),
            col("s1", "site", "right end of the window"),
            col("residual", "1", "max |D* U D − Ê| over the interior rows"),
            col("rows_compared", "count", "interior rows compared"),
            col("lambda_defect", "1", "max ||λ_k| − 1|"),
            col("formula_gap", "1", "max gap between the two expressions for α̂"),
        ],
    );
    t.push(vec![
        s0.into(),
        s1.into(),
        r.residual.into(),
        r.rows_compared.into(),
        r.lambda_defect.into(),
        r.formula_gap.into(),
    ]);
    Ok((vec![t], json!({ "residual": r.residual, "formula_gap": r.formula_gap })))
}

fn qwalk_evolve(ctx: &Context) -> Produced {
    let cfg = ctx.cfg;
    let [s0, s1] = cfg.window;
    let walk = build_walk(ctx.coins(), &ctx.x0, &ctx.omega, s0, s1, cfg.closure)?;
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let psi0 = WalkState::localized(s0, s1, cfg.start_site, h, Complex64::i() * h)?;
    let (rows, _) = evolve(&walk, &psi0, cfg.steps)?;
    let mut t = Table::new(
        "qwalk_evolve",
        vec![
            col("t", "steps", "time"),
            col("norm", "1", "‖ψ_t‖"),
            col("mean", "sites", "mean position"),
            col("sigma", "sites", "position standard deviation"),
            col("return_prob", "1", "|⟨ψ_t, ψ_0⟩|²"),
            col("escaped", "bool", "mass above 1e−8 has reached the window edge"),
        ],
    );
    for r in &rows {
        t.push(vec![r.t.into(), r.norm.into(), r.mean.into(), r.sigma.into(), r.return_prob.into(), r.escaped.into()]);
    }
    let last = rows.last().expect("t = 0 is always present");
    let max_sigma = rows.iter().map(|r| r.sigma).fold(0.0, f64::max);
    Ok((
        vec![t],
        json!({ "final_sigma": last.sigma, "max_sigma": max_sigma, "escaped": last.escaped, "final_norm": last.norm }),
    ))
}

fn qwalk_lyapunov(ctx: &Context) -> Produced {
    let cfg = ctx.cfg;
    let mut t = Table::new(
        "qwalk_lyapunov",
        vec![
            THETA,
            col("n", "coin steps", "number of coin steps"),
            col("l_walk", "nats/step", "exponent of the GZ product of the walk"),
            col("l_walk_stderr", "nats/step", "its standard error"),
            col("l_hat", "nats/step", "exponent of the Szegő product of the hatted coefficients"),
            col("l_hat_stderr", "nats/step", "its standard error"),
            col("difference", "nats/step", "|l_walk − l_hat|"),
            col("consistent", "bool", "difference within 3 combined standard errors"),
        ],
    );
    let mut all = true;
    for &theta in &ctx.thetas {
        let r = walk_lyapunov_compare(ctx.coins(), &ctx.omega, &SpectralPoint::new(theta), cfg.n, cfg.samples, cfg.seed)?;
        all &= r.consistent();
        t.push(vec![
            theta.into(),
            r.n.into(),
            r.l_walk.into(),
            r.l_walk_stderr.into(),
            r.l_hat.into(),
            r.l_hat_stderr.into(),
            r.difference().into(),
            r.consistent().into(),
        ]);
    }
    Ok((vec![t], json!({ "all_consistent": all })))
}
