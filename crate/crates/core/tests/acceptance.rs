//! The ten acceptance criteria, each against its stated tolerance and time
//! budget. Runs without the libtest harness so every verdict line is printed.

use std::error::Error as StdError;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_traits::Zero;
use subord_core::envelope::Envelope;
use subord_core::eta::{EtaContext, EtaTruncation};
use subord_core::exact::{int, rat, GaussRat};
use subord_core::freeness::standard::semicircle_moments;
use subord_core::freeness::{
    check_expmorph, check_psi_probabilistic, compressed_moments, conjugate_variable_check, markov_check, FreenessModel,
    MarkovReport,
};
use subord_core::matricial::{matricial_estimates, regularization_sweep, sweep_differences, triangular_report, SubordinationResult};
use subord_core::matrix::CMat;
use subord_core::measure::MeasureSpec;
use subord_core::nc::{all_words, Alphabet, CompressionParams, Derivation, Gen, NCPoly, Word};
use subord_core::rmt::{RmtModel, XBuilder};
use subord_core::subordination::{
    analytic_subordination, closed_form_subordination, formal_subordination_exact, rational_t, semigroup_cauchy,
    semigroup_moments_exact, HalfPlanePoint,
};
use subord_core::Rational;

type Res<T> = Result<T, Box<dyn StdError>>;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }
}

fn run(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Res<Verdict>) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let (pass, detail) = match outcome {
        Ok(v) => (v.pass && elapsed <= budget, v.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let tag = if pass { "PASS" } else { "FAIL" };
    println!(
        "[{tag}] criterion {id:2} {name} ({:.2} s of {} s): {detail}",
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn word_poly(w: Word) -> NCPoly {
    NCPoly::term(w, GaussRat::from_int(1))
}

struct Letters {
    x: Gen,
    p: Gen,
    xp: Gen,
}

fn letters() -> Letters {
    let mut a = Alphabet::new();
    let x = a.variable("X").unwrap();
    let p = a.projection("p").unwrap();
    let xp = a.variable("X_p").unwrap();
    Letters { x, p, xp }
}

fn semicircle_model(l: &Letters, alpha: &Rational) -> Res<FreenessModel> {
    let mut model = FreenessModel::default();
    model.add_variable(l.x, &semicircle_moments(model.degree()))?;
    model.add_projection(l.p, alpha)?;
    Ok(model)
}

fn coalgebra_suite() -> Res<Verdict> {
    let l = letters();
    let d = Derivation::new(l.x, [l.p])?;
    let words = all_words(&[l.x, l.p], 6);
    let mut checked = 0usize;
    for w in &words {
        let poly = word_poly(w.clone());
        if !d.coassociativity_residual(&poly)?.is_zero() || !d.star_residual(&poly)?.is_zero() {
            return Ok(Verdict::new(false, format!("nonzero residual at word of degree {}", w.degree())));
        }
        checked += 1;
    }
    for a in &words {
        for b in words.iter().filter(|b| a.degree() + b.degree() <= 6) {
            if !d.leibniz_residual(&word_poly(a.clone()), &word_poly(b.clone()))?.is_zero() {
                return Ok(Verdict::new(false, "nonzero Leibniz residual"));
            }
            checked += 1;
        }
    }
    for alpha in [rat(1, 2), rat(1, 3), rat(2, 3)] {
        let params = CompressionParams::new(alpha, l.xp, l.x, l.p)?;
        for w in all_words(&[l.xp, l.p], 6) {
            if !params.check_coalgebra_morphism(&word_poly(w))?.is_zero() {
                return Ok(Verdict::new(false, "nonzero morphism residual"));
            }
            checked += 1;
        }
    }
    Ok(Verdict::new(true, format!("{checked} exact identities, all residuals 0")))
}

fn psi_suite() -> Res<Verdict> {
    let l = letters();
    let mut checked = 0usize;
    for alpha in [rat(1, 2), rat(1, 3)] {
        let model = semicircle_model(&l, &alpha)?;
        let params = CompressionParams::new(alpha, l.xp, l.x, l.p)?;
        let words: Vec<NCPoly> = all_words(&[l.xp, l.p], 4).into_iter().filter(|w| !w.is_one()).map(word_poly).collect();
        for w in &words {
            if !check_expmorph(&model, &params, w)?.is_zero() {
                return Ok(Verdict::new(false, "nonzero (Ψ⊗Ψ)∂ − ∂Ψ residual"));
            }
        }
        let report = check_psi_probabilistic(&model, &params, &words)?;
        if !report.is_exact() {
            return Ok(Verdict::new(false, format!("Ψ trace/unit residuals nonzero: {report:?}")));
        }
        checked += 2 * words.len();
    }
    Ok(Verdict::new(true, format!("{checked} exact checks, all residuals 0")))
}

fn conjugate_suite() -> Res<Verdict> {
    let l = letters();
    let mut pairs = 0usize;
    for alpha in [rat(1, 2), rat(1, 3)] {
        let model = semicircle_model(&l, &alpha)?;
        let params = CompressionParams::new(alpha, l.xp, l.x, l.p)?;
        let words: Vec<NCPoly> = all_words(&[l.xp, l.p], 4).into_iter().filter(|w| !w.is_one()).map(word_poly).collect();
        let report = conjugate_variable_check(&model, &params, &NCPoly::gen(l.x), &words)?;
        if !report.is_exact() {
            return Ok(Verdict::new(false, format!("pairing identity fails: {:?}", report.pairs)));
        }
        pairs += report.pairs.len();
    }
    Ok(Verdict::new(true, format!("{pairs} pairings τ_p(J_p w) = (τ_p⊗τ_p)(∂w) exact")))
}

fn markov_suite() -> Res<Verdict> {
    let mut a = Alphabet::new();
    let x = a.variable("X")?;
    let y = a.variable("Y")?;
    let p = a.projection("p")?;
    let w = a.variable("W")?;
    let alpha = rat(1, 2);
    let mut model = FreenessModel::default();
    model.add_variable(x, &semicircle_moments(model.degree()))?;
    model.add_variable(y, &semicircle_moments(model.degree()))?;
    model.add_projection(p, &alpha)?;
    let words: Vec<NCPoly> = all_words(&[w, p], 2).into_iter().filter(|w| !w.is_one()).map(word_poly).collect();
    let reports = markov_check(&model, (x, y, p), &alpha, w, &words)?;
    let ok = reports.iter().all(MarkovReport::is_exact);
    Ok(Verdict::new(ok, format!("{} words in p(X+Y)p, both sides equal: {ok}", reports.len())))
}

fn semigroup_suite() -> Res<Verdict> {
    let l = letters();
    let measures = [MeasureSpec::standard_semicircle(), MeasureSpec::bernoulli(), MeasureSpec::delta_mixture()];
    for mu in &measures {
        for alpha in [rat(1, 2), rat(1, 3)] {
            let mut model = FreenessModel::default();
            let moments = mu.exact_moments(model.degree()).ok_or("test measures have exact moments")?;
            model.add_variable(l.x, &moments)?;
            model.add_projection(l.p, &alpha)?;
            let params = CompressionParams::new(alpha.clone(), l.xp, l.x, l.p)?;
            let words = compressed_moments(&model, &params, 6)?;
            let scaled = semigroup_moments_exact(mu, &alpha.recip(), 6)?;
            if words != scaled {
                return Ok(Verdict::new(false, format!("{} at α = {alpha}: {words:?} vs {scaled:?}", mu.name())));
            }
        }
    }
    let arcsine = semigroup_moments_exact(&MeasureSpec::bernoulli(), &int(2), 4)?;
    let expected = vec![int(1), int(0), int(2), int(0), int(6)];
    let ok = arcsine == expected;
    Ok(Verdict::new(ok, format!("3 measures × α ∈ {{1/2, 1/3}} through n = 6 exact; Bernoulli t = 2 gives (0,2,0,6): {ok}")))
}

/// Bernoulli at t = 3 has its support edge at 2√2, just inside |z| = 3; order 40
/// is where its resummed series reaches 1e-8 there.
const SERIES_ORDER: usize = 40;

fn scalar_suite() -> Res<Verdict> {
    let measures = [MeasureSpec::standard_semicircle(), MeasureSpec::bernoulli(), MeasureSpec::delta_mixture()];
    let grid: Vec<Complex64> = (0..10)
        .flat_map(|i| (0..10).map(move |j| c(-3.0 + 6.0 * i as f64 / 9.0, 0.05 + 2.95 * j as f64 / 9.0)))
        .collect();
    let mut worst_grid = 0.0f64;
    let mut worst_series = 0.0f64;
    for mu in &measures {
        for t in [2.0, 3.0, 1.5] {
            for &z in &grid {
                let f = analytic_subordination(mu, t, HalfPlanePoint::of(z)?)?;
                worst_grid = worst_grid.max((mu.cauchy(f)? - semigroup_cauchy(mu, t, z)?).norm());
            }
            let series = formal_subordination_exact(mu, &rational_t(t).ok_or("rational t")?, SERIES_ORDER)?;
            let r = 3.0 * mu.support_radius();
            for k in 1..8 {
                for scale in [1.0, 1.5] {
                    let z = Complex64::from_polar(r * scale, std::f64::consts::PI * k as f64 / 8.0);
                    let fixed = analytic_subordination(mu, t, HalfPlanePoint::of(z)?)?;
                    worst_series = worst_series.max((series.eval_resummed(z) - fixed).norm());
                }
            }
        }
    }
    let bernoulli = MeasureSpec::bernoulli();
    let arcsine = MeasureSpec::arcsine(int(-2), int(2))?;
    let mut worst_closed = 0.0f64;
    for &z in &grid {
        let f = analytic_subordination(&bernoulli, 2.0, HalfPlanePoint::of(z)?)?;
        let closed = closed_form_subordination(&bernoulli, 2.0, z).ok_or("Bernoulli has a closed form")?;
        worst_closed = worst_closed.max((f - closed).norm());
        worst_closed = worst_closed.max((bernoulli.cauchy(f)? - arcsine.cauchy(z)?).norm());
    }
    let ok = worst_grid < 1e-8 && worst_series < 1e-8 && worst_closed < 1e-10;
    Ok(Verdict::new(
        ok,
        format!(
            "grid residual {worst_grid:.1e} (< 1e-8), series vs fixed point {worst_series:.1e} (< 1e-8), closed form {worst_closed:.1e} (< 1e-10)"
        ),
    ))
}

fn eta_suite() -> Res<Verdict> {
    let mu = MeasureSpec::standard_semicircle();
    let alpha = rat(1, 2);
    let ctx = EtaContext::new(&mu, &alpha, 10)?;
    let z = GaussRat::new(Rational::zero(), ctx.rho().clone());
    let mut nonconstancy = Vec::new();
    for m in [2, 4, 6, 8, 10] {
        nonconstancy.push((m, ctx.eta(&z, m, EtaTruncation::Resolvent)?));
    }
    let halving = nonconstancy.windows(2).all(|w| w[1].1.nonconstancy <= 0.5 * w[0].1.nonconstancy);
    let f = analytic_subordination(&mu, 2.0, HalfPlanePoint::of(z.to_complex())?)?;
    let deviation = (nonconstancy[3].1.eta - f).norm();
    let ok = halving && deviation < 1e-6;
    let trail: Vec<String> = nonconstancy.iter().map(|(m, r)| format!("M={m}: {:.1e}", r.nonconstancy)).collect();
    Ok(Verdict::new(ok, format!("nonconstancy [{}], |η(M=8) − F(iρ)| = {deviation:.1e}", trail.join(", "))))
}

const SEED: u64 = 20_241;
const SAMPLES: usize = 16;

fn scalar_betas() -> Vec<Complex64> {
    vec![c(0.0, 1.0), c(0.5, 0.5), c(-1.0, 2.0), c(1.5, 0.3)]
}

/// The `β` grid: scalars, a diagonal, a `Δ₊` point, and a non-normal `H₊` point.
fn beta_grid() -> Vec<CMat> {
    let mut out: Vec<CMat> = scalar_betas().into_iter().map(|z| CMat::from_element(1, 1, z)).collect();
    out.push(CMat::from_row_slice(2, 2, &[c(0.5, 0.5), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 2.0)]));
    out.push(CMat::from_row_slice(2, 2, &[c(0.0, 2.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 3.0)]));
    out.push(CMat::from_row_slice(2, 2, &[c(0.3, 1.0), c(0.2, 0.3), c(0.2, -0.1), c(-0.5, 1.5)]));
    out
}

const DIAGONAL_BETA: usize = 4;
const TRIANGULAR_BETA: usize = 5;

fn fingerprint(results: &[SubordinationResult], out: &mut Vec<u64>) {
    for r in results {
        out.extend(r.eta.iter().flat_map(|v| [v.re.to_bits(), v.im.to_bits()]));
        out.extend([r.identity_residual, r.block_constancy_residual, r.halfplane_margin].map(f64::to_bits));
    }
}

fn matricial_suite(prints: &mut Vec<u64>) -> Res<Verdict> {
    let envelope = Envelope::CALIBRATED;
    let betas = beta_grid();
    let sizes = [200usize, 400, 800];
    let mut notes = Vec::new();
    let mut ok = true;
    for mu in [MeasureSpec::standard_semicircle(), MeasureSpec::bernoulli()] {
        let mut runs = Vec::new();
        for &n in &sizes {
            let model = RmtModel::new(n, XBuilder::Quantile(mu.clone()), rat(1, 2), SEED)?;
            let results = matricial_estimates(&model, &betas, SAMPLES)?;
            fingerprint(&results, prints);
            let tol = envelope.bound(SAMPLES, n);
            if let Some(bad) = results.iter().position(|r| !(r.halfplane_margin > 0.0)) {
                ok = false;
                notes.push(format!("{} N={n}: margin ≤ 0 at β #{bad}", mu.name()));
            }
            for (k, z) in scalar_betas().into_iter().enumerate() {
                let f = analytic_subordination(&mu, 2.0, HalfPlanePoint::of(z)?)?;
                if (results[k].eta[(0, 0)] - f).norm() > tol {
                    ok = false;
                    notes.push(format!("{} N={n}: |η̂ − F({z})| outside envelope", mu.name()));
                }
            }
            let diag = &results[DIAGONAL_BETA];
            for i in 0..2 {
                let f = analytic_subordination(&mu, 2.0, HalfPlanePoint::of(betas[DIAGONAL_BETA][(i, i)])?)?;
                if (diag.eta[(i, i)] - f).norm() > tol || diag.eta[(1 - i, i)].norm() > tol {
                    ok = false;
                    notes.push(format!("{} N={n}: diagonal β not decoupled", mu.name()));
                }
            }
            let tri = triangular_report(&model, &betas[TRIANGULAR_BETA], results[TRIANGULAR_BETA].clone())?;
            if !tri.within(&envelope, SAMPLES, n) {
                ok = false;
                notes.push(format!(
                    "{} N={n}: Δ₊ case |η̂₁₂| = {:.1e}, diagonal deviation {:.1e}, envelope {tol:.1e}",
                    mu.name(),
                    tri.upper_max,
                    tri.diagonal_deviation()
                ));
            }
            runs.push(results);
        }
        let mut worst_ratio = 0.0f64;
        for b in 0..betas.len() {
            for pair in runs.windows(2) {
                let (a, z) = (&pair[0][b], &pair[1][b]);
                worst_ratio = worst_ratio
                    .max(z.identity_residual / a.identity_residual)
                    .max(z.block_constancy_residual / a.block_constancy_residual);
            }
        }
        if worst_ratio >= 1.0 {
            ok = false;
        }
        let last = &runs[2];
        let margin = runs.iter().flatten().map(|r| r.halfplane_margin).fold(f64::INFINITY, f64::min);
        notes.push(format!(
            "{}: residuals shrink on every doubling (worst ratio {worst_ratio:.2}), N=800 identity {:.1e} / block {:.1e}, min margin {margin:.2}",
            mu.name(),
            last.iter().map(|r| r.identity_residual).fold(0.0, f64::max),
            last.iter().map(|r| r.block_constancy_residual).fold(0.0, f64::max),
        ));
    }
    Ok(Verdict::new(ok, notes.join("; ")))
}

fn regularization_suite(prints: &mut Vec<u64>) -> Res<Verdict> {
    let envelope = Envelope::CALIBRATED;
    let n = 400;
    let eps = [1.0, 0.5, 0.25, 0.125, 0.0];
    let zs = scalar_betas();
    let betas: Vec<CMat> = zs.iter().map(|z| CMat::from_element(1, 1, *z)).collect();
    let tol = envelope.bound(SAMPLES, n);
    let mut ok = true;
    let mut notes = Vec::new();
    for mu in [MeasureSpec::standard_semicircle(), MeasureSpec::bernoulli()] {
        let model = RmtModel::new(n, XBuilder::Quantile(mu.clone()), rat(1, 2), SEED)?;
        let rows = regularization_sweep(&model, &eps, &betas, SAMPLES)?;
        for row in &rows {
            fingerprint(&row.results, prints);
        }
        let diffs = sweep_differences(&rows);
        let decreasing = (0..betas.len()).all(|b| diffs.windows(2).all(|w| w[1][b] < w[0][b]));
        let direct = matricial_estimates(&model, &betas, SAMPLES)?;
        let zero_matches = rows.last().is_some_and(|r| r.results == direct);
        ok &= decreasing && zero_matches;
        let mut shift = 0.0f64;
        if mu.as_semicircle().is_some() {
            for row in &rows {
                let var = rational_t(1.0 + row.eps * row.eps).ok_or("ε² is dyadic")?;
                let shifted = MeasureSpec::semicircle(int(0), var)?;
                for (r, z) in row.results.iter().zip(&zs) {
                    let f = analytic_subordination(&shifted, 2.0, HalfPlanePoint::of(*z)?)?;
                    shift = shift.max((r.eta[(0, 0)] - f).norm());
                }
            }
            ok &= shift <= tol;
        }
        let first: Vec<String> = diffs.iter().map(|d| format!("{:.1e}", d[0])).collect();
        notes.push(format!(
            "{}: differences decreasing {decreasing} [{}], ε=0 equals direct run {zero_matches}{}",
            mu.name(),
            first.join(" > "),
            if mu.as_semicircle().is_some() { format!(", variance-shift deviation {shift:.1e} ≤ {tol:.1e}") } else { String::new() }
        ));
    }
    Ok(Verdict::new(ok, notes.join("; ")))
}

fn main() {
    let mut verdicts = Vec::new();
    let secs = Duration::from_secs;
    verdicts.push(run(1, "exact coalgebra suite", secs(10), coalgebra_suite));
    verdicts.push(run(2, "exact Ψ suite", secs(30), psi_suite));
    verdicts.push(run(3, "conjugate variable", secs(10), conjugate_suite));
    verdicts.push(run(4, "free Markovianity", secs(60), markov_suite));
    verdicts.push(run(5, "semigroup law", secs(30), semigroup_suite));
    verdicts.push(run(6, "scalar subordination", secs(60), scalar_suite));
    verdicts.push(run(7, "η-series", secs(60), eta_suite));
    let mut first = Vec::new();
    verdicts.push(run(8, "matricial subordination", secs(600), || matricial_suite(&mut first)));
    verdicts.push(run(9, "regularization sweep", secs(300), || regularization_suite(&mut first)));
    verdicts.push(run(10, "determinism", secs(900), || {
        let mut second = Vec::new();
        matricial_suite(&mut second)?;
        regularization_suite(&mut second)?;
        let same = !first.is_empty() && first == second;
        Ok(Verdict::new(same, format!("{} numeric fields re-run with seed {SEED}, bit-identical: {same}", second.len())))
    }));
    let passed = verdicts.iter().filter(|v| **v).count();
    println!("acceptance: {passed}/{} criteria passed", verdicts.len());
    if passed != verdicts.len() {
        std::process::exit(1);
    }
}
