//! `subord rmt`: Monte Carlo experiments from a config file, persisted as
//! result records.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use subord_core::envelope::Envelope;
use subord_core::exact::rational_to_f64;
use subord_core::matricial::{
    matricial_estimates, regularization_sweep, sweep_differences, triangular_report, SubordinationResult,
};
use subord_core::matrix::{classify, CMat};
use subord_core::measure::{MeasureSpec, SmoothKind};
use subord_core::rmt::{compression_experiment, freeness_diagnostic, RmtModel, XBuilder};
use subord_core::subordination::{analytic_subordination, semigroup_moments, HalfPlanePoint};
use subord_core::Rational;

use crate::config::{Experiment, ExperimentConfig, XKind};
use crate::measure_file::{load_measure, write_measure};
use crate::record::{inputs_hash, RecordWriter, ResultRecord, RECORD_SCHEMA_VERSION};

pub struct RmtRun {
    pub records: Vec<ResultRecord>,
    pub output: PathBuf,
}

impl RmtRun {
    pub fn pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!(
                "[{}] {} / {} (N = {}, samples = {}, envelope {:.3e}, {:.2} s)\n",
                if r.pass { "PASS" } else { "FAIL" },
                r.experiment,
                r.check,
                r.n,
                r.samples,
                r.envelope,
                r.wall_time_s
            ));
            for f in &r.failures {
                out.push_str(&format!("    {f}\n"));
            }
        }
        out.push_str(&format!("records appended to {}\n", self.output.display()));
        out
    }
}

struct Check {
    residuals: BTreeMap<String, f64>,
    failures: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check { residuals: BTreeMap::new(), failures: Vec::new() }
    }

    fn put(&mut self, key: String, value: f64) {
        if value.is_finite() {
            self.residuals.insert(key, value);
        } else {
            self.failures.push(format!("{key} is not finite"));
        }
    }

    fn fail(&mut self, message: String) {
        self.failures.push(message);
    }
}

fn is_diagonal(m: &CMat) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].norm() == 0.0))
}

/// `max(|η_ii − F(β_ii)|, |η_ij|)` for a diagonal `β`.
fn decoupling_deviation(mu: &MeasureSpec, t: f64, beta: &CMat, eta: &CMat) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..beta.nrows() {
        for j in 0..beta.ncols() {
            let dev = if i == j {
                (eta[(i, i)] - analytic_subordination(mu, t, HalfPlanePoint::of(beta[(i, i)])?)?).norm()
            } else {
                eta[(i, j)].norm()
            };
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}

fn semicircle_parameters(mu: &MeasureSpec) -> Option<(Rational, Rational)> {
    match (mu.atoms(), mu.smooth()) {
        ([], [part]) => match &part.kind {
            SmoothKind::Semicircle { center, variance } => Some((center.clone(), variance.clone())),
            _ => None,
        },
        _ => None,
    }
}

struct Runner<'a> {
    config: &'a ExperimentConfig,
    mu: MeasureSpec,
    model: RmtModel,
    envelope: Envelope,
    betas: Vec<CMat>,
    t: f64,
    estimates: Option<Vec<SubordinationResult>>,
}

impl Runner<'_> {
    fn tol(&self) -> f64 {
        self.envelope.bound(self.config.samples, self.config.n)
    }

    fn estimates(&mut self) -> Result<&[SubordinationResult]> {
        if self.estimates.is_none() {
            self.estimates = Some(matricial_estimates(&self.model, &self.betas, self.config.samples)?);
        }
        Ok(self.estimates.as_deref().unwrap_or_default())
    }

    fn freeness(&mut self, c: &mut Check) -> Result<()> {
        let words = self.config.words()?;
        for row in freeness_diagnostic(&self.model, &words, self.config.samples, &self.envelope)? {
            c.put(format!("{}.empirical", row.word), row.empirical);
            c.put(format!("{}.predicted", row.word), row.predicted);
            c.put(format!("{}.deviation", row.word), row.deviation);
            if !row.within_envelope() {
                c.fail(format!("word {}: deviation {:.3e} exceeds envelope {:.3e}", row.word, row.deviation, row.envelope));
            }
        }
        Ok(())
    }

    fn compression(&mut self, c: &mut Check) -> Result<()> {
        let tol = self.tol();
        let report = compression_experiment(&self.model, self.config.moment_degree, self.config.samples)?;
        // λ^k has size √m_{2k} under μ_t; odd moments of symmetric laws vanish
        // but still fluctuate at that scale.
        let even = semigroup_moments(&self.mu, self.t, 2 * self.config.moment_degree)?;
        for m in &report.moments {
            c.put(format!("m{}.empirical", m.k), m.empirical);
            c.put(format!("m{}.predicted", m.k), m.predicted);
            c.put(format!("m{}.deviation", m.k), m.deviation);
            let allowed = tol * even[2 * m.k].sqrt().max(1.0);
            if m.deviation > allowed {
                c.fail(format!("moment {}: deviation {:.3e} exceeds {allowed:.3e}", m.k, m.deviation));
            }
        }
        c.put("ks".into(), report.ks);
        Ok(())
    }

    fn matricial(&mut self, c: &mut Check) -> Result<()> {
        let tol = self.tol();
        let (mu, t, betas) = (self.mu.clone(), self.t, self.betas.clone());
        let estimates = self.estimates()?;
        for (i, (beta, r)) in betas.iter().zip(estimates).enumerate() {
            c.put(format!("beta{i}.identity_residual"), r.identity_residual);
            c.put(format!("beta{i}.block_constancy_residual"), r.block_constancy_residual);
            c.put(format!("beta{i}.halfplane_margin"), r.halfplane_margin);
            if !(r.halfplane_margin > 0.0) {
                c.fail(format!("β #{i}: Im η̂ is not positive definite (margin {:.3e})", r.halfplane_margin));
            }
            if is_diagonal(beta) {
                let dev = decoupling_deviation(&mu, t, beta, &r.eta)?;
                c.put(format!("beta{i}.scalar_deviation"), dev);
                if dev > tol {
                    c.fail(format!("β #{i}: |η̂ − F(β)| = {dev:.3e} exceeds envelope {tol:.3e}"));
                }
            }
        }
        Ok(())
    }

    fn triangular(&mut self, c: &mut Check) -> Result<()> {
        let (samples, n) = (self.config.samples, self.config.n);
        let envelope = self.envelope;
        let betas = self.betas.clone();
        let estimates = self.estimates()?.to_vec();
        let mut used = 0;
        for (i, (beta, r)) in betas.iter().zip(estimates).enumerate() {
            if beta.nrows() < 2 || !classify(beta)?.in_delta_plus() {
                continue;
            }
            used += 1;
            let tri = triangular_report(&self.model, beta, r)?;
            c.put(format!("beta{i}.upper_max"), tri.upper_max);
            c.put(format!("beta{i}.diagonal_deviation"), tri.diagonal_deviation());
            if !tri.within(&envelope, samples, n) {
                c.fail(format!(
                    "β #{i}: |η̂ upper| = {:.3e}, diagonal deviation {:.3e}, envelope {:.3e}",
                    tri.upper_max,
                    tri.diagonal_deviation(),
                    envelope.bound(samples, n)
                ));
            }
        }
        if used == 0 {
            c.fail("no β of size ≥ 2 in the lower-triangular half-plane Δ₊".into());
        }
        Ok(())
    }

    fn regularization(&mut self, c: &mut Check) -> Result<()> {
        let tol = self.tol();
        let eps_exact = self.config.eps()?;
        let eps: Vec<f64> = eps_exact.iter().map(rational_to_f64).collect();
        let rows = regularization_sweep(&self.model, &eps, &self.betas, self.config.samples)?;
        let diffs = sweep_differences(&rows);
        for (j, d) in diffs.iter().enumerate() {
            for (i, v) in d.iter().enumerate() {
                c.put(format!("beta{i}.diff{j}"), *v);
            }
        }
        for i in 0..self.betas.len() {
            if let Some(j) = (1..diffs.len()).find(|&j| !(diffs[j][i] < diffs[j - 1][i])) {
                c.fail(format!("β #{i}: difference {j} ({:.3e}) does not decrease from {:.3e}", diffs[j][i], diffs[j - 1][i]));
            }
        }
        if eps.last() == Some(&0.0) {
            let direct = self.estimates()?.to_vec();
            if rows.last().map(|r| &r.results) != Some(&direct) {
                c.fail("the ε = 0 row differs from the unregularized estimate".into());
            }
        }
        if let Some((center, variance)) = semicircle_parameters(&self.mu) {
            for (row, e) in rows.iter().zip(&eps_exact) {
                let shifted = MeasureSpec::semicircle(center.clone(), &variance + e * e)?;
                let mut worst = 0.0f64;
                for (beta, r) in self.betas.iter().zip(&row.results).filter(|(b, _)| is_diagonal(b)) {
                    worst = worst.max(decoupling_deviation(&shifted, self.t, beta, &r.eta)?);
                }
                c.put(format!("eps{}.variance_shift_deviation", row.eps), worst);
                if worst > tol {
                    c.fail(format!("ε = {}: deviation {worst:.3e} from the variance-shifted semicircle exceeds {tol:.3e}", row.eps));
                }
            }
        }
        Ok(())
    }
}

/// Runs every selected experiment and appends one record per experiment.
/// `base` is the directory paths in the config are relative to.
pub fn run_config(config: &ExperimentConfig, base: &Path, output: Option<&Path>) -> Result<RmtRun> {
    let measure_path = base.join(&config.measure);
    let mu = load_measure(&measure_path)?;
    let hash = inputs_hash(&[&config.to_toml(), &write_measure(&mu)]);
    let x = match config.x {
        XKind::Quantile => XBuilder::Quantile(mu.clone()),
        XKind::Gue => match semicircle_parameters(&mu) {
            Some((center, variance)) if center == Rational::from_integer(0.into()) => XBuilder::Gue { variance },
            _ => bail!("x = \"gue\" needs a centred semicircle measure"),
        },
    };
    let model = RmtModel::new(config.n, x, config.alpha()?, config.seed)?;
    let mut cx = Runner {
        config,
        t: 1.0 / model.alpha_f64(),
        mu,
        model,
        envelope: config.envelope(),
        betas: config.betas()?,
        estimates: None,
    };
    let output = output.map(Path::to_path_buf).unwrap_or_else(|| base.join(&config.output));
    let mut writer = RecordWriter::open(&output)?;
    let mut records = Vec::new();
    for &experiment in &config.experiments {
        let start = Instant::now();
        let mut check = Check::new();
        let outcome = match experiment {
            Experiment::Freeness => cx.freeness(&mut check),
            Experiment::Compression => cx.compression(&mut check),
            Experiment::Matricial => cx.matricial(&mut check),
            Experiment::Triangular => cx.triangular(&mut check),
            Experiment::Regularization => cx.regularization(&mut check),
        };
        if let Err(e) = outcome {
            check.fail(format!("error: {e:#}"));
        }
        let record = ResultRecord {
            schema_version: RECORD_SCHEMA_VERSION,
            experiment: config.id.clone(),
            check: experiment.name().into(),
            inputs_sha256: hash.clone(),
            seed: config.seed,
            n: config.n,
            samples: config.samples,
            envelope: cx.tol(),
            pass: check.failures.is_empty(),
            residuals: check.residuals,
            failures: check.failures,
            wall_time_s: start.elapsed().as_secs_f64(),
        };
        writer.append(&record).with_context(|| format!("writing {}", output.display()))?;
        records.push(record);
    }
    Ok(RmtRun { records, output })
}
