//! `subord verify-coalgebra`: the exact symbolic suites.

use anyhow::{bail, Result};
use serde::Serialize;
use subord_core::exact::GaussRat;
use subord_core::freeness::standard::semicircle_moments;
use subord_core::freeness::{
    check_expmorph_with, check_psi_probabilistic, conjugate_variable_check_with, markov_check, FreenessModel,
};
use subord_core::nc::{all_words, Alphabet, CompressionParams, Derivation, NCPoly, Word};
use subord_core::Rational;

/// Largest word degree the command accepts.
pub const MAX_DEGREE: usize = 8;
/// Compressed words for the Ψ and pairing suites are capped here: each `X_p`
/// costs three letters and the pairing adds a conjugate variable.
pub const PSI_DEGREE: usize = 4;
pub const MARKOV_DEGREE: usize = 2;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub alpha: Option<String>,
    pub degree: usize,
    pub checked: usize,
    pub nonzero: usize,
    pub max_abs_residual: f64,
}

impl SuiteResult {
    pub fn pass(&self) -> bool {
        self.nonzero == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub degree: usize,
    pub corrupted: bool,
    pub suites: Vec<SuiteResult>,
    pub pass: bool,
}

struct Tally {
    result: SuiteResult,
}

impl Tally {
    fn new(suite: &str, alpha: Option<&Rational>, degree: usize) -> Self {
        Tally {
            result: SuiteResult {
                suite: suite.into(),
                alpha: alpha.map(ToString::to_string),
                degree,
                checked: 0,
                nonzero: 0,
                max_abs_residual: 0.0,
            },
        }
    }

    fn add(&mut self, zero: bool, size: f64) {
        self.result.checked += 1;
        if !zero {
            self.result.nonzero += 1;
            self.result.max_abs_residual = self.result.max_abs_residual.max(size);
        }
    }
}

fn word_poly(w: Word) -> NCPoly {
    NCPoly::term(w, GaussRat::from_int(1))
}

/// Runs every exact suite at the given degree. With `corrupt`, every
/// derivation uses `∂X = 2·1⊗1`; the derivation axioms survive the scaling
/// but the morphism, Ψ and pairing suites must then fail.
pub fn verify_coalgebra(degree: usize, alphas: &[Rational], corrupt: bool) -> Result<VerifyReport> {
    if degree > MAX_DEGREE {
        bail!("degree {degree} exceeds the cap of {MAX_DEGREE}");
    }
    if let Some(a) = alphas.iter().find(|a| **a <= Rational::from_integer(0.into()) || **a >= Rational::from_integer(1.into())) {
        bail!("α = {a} must lie strictly between 0 and 1");
    }
    let mut ab = Alphabet::new();
    let x = ab.variable("X")?;
    let p = ab.projection("p")?;
    let xp = ab.variable("X_p")?;
    let unit = GaussRat::from_int(if corrupt { 2 } else { 1 });
    let ambient = Derivation::new(x, [p])?.with_scale(unit.clone());
    let mut suites = Vec::new();

    let words = all_words(&[x, p], degree);
    let mut coassoc = Tally::new("coassociativity", None, degree);
    let mut star = Tally::new("star", None, degree);
    let mut leibniz = Tally::new("leibniz", None, degree);
    for w in &words {
        let poly = word_poly(w.clone());
        let r = ambient.coassociativity_residual(&poly)?;
        coassoc.add(r.is_zero(), r.max_abs_coeff());
        let r = ambient.star_residual(&poly)?;
        star.add(r.is_zero(), r.max_abs_coeff());
    }
    for a in &words {
        for b in words.iter().filter(|b| a.degree() + b.degree() <= degree) {
            let r = ambient.leibniz_residual(&word_poly(a.clone()), &word_poly(b.clone()))?;
            leibniz.add(r.is_zero(), r.max_abs_coeff());
        }
    }
    suites.extend([coassoc.result, star.result, leibniz.result]);

    let psi_degree = degree.min(PSI_DEGREE);
    for alpha in alphas {
        let params = CompressionParams::new(alpha.clone(), xp, x, p)?;
        let mut morphism = Tally::new("morphism", Some(alpha), degree);
        for w in all_words(&[xp, p], degree) {
            let r = params.check_coalgebra_morphism_with(&word_poly(w), &ambient)?;
            morphism.add(r.is_zero(), r.max_abs_coeff());
        }
        suites.push(morphism.result);

        let mut model = FreenessModel::default();
        model.add_variable(x, &semicircle_moments(model.degree()))?;
        model.add_projection(p, alpha)?;
        let compressed: Vec<NCPoly> =
            all_words(&[xp, p], psi_degree).into_iter().filter(|w| !w.is_one()).map(word_poly).collect();
        let mut expmorph = Tally::new("psi-expmorph", Some(alpha), psi_degree);
        let onto_x = Derivation::new(x, [])?.with_scale(unit.clone());
        for w in &compressed {
            let r = check_expmorph_with(&model, &params, w, &onto_x)?;
            expmorph.add(r.is_zero(), r.max_abs_coeff());
        }
        suites.push(expmorph.result);

        let report = check_psi_probabilistic(&model, &params, &compressed)?;
        let mut prob = Tally::new("psi-probabilistic", Some(alpha), psi_degree);
        prob.add(report.is_exact(), if report.is_exact() { 0.0 } else { 1.0 });
        prob.result.checked = compressed.len();
        suites.push(prob.result);

        let pairing = conjugate_variable_check_with(
            &model,
            &params,
            &NCPoly::gen(x),
            &compressed,
            &params.compressed_derivation().with_scale(unit.clone()),
        )?;
        let mut conj = Tally::new("conjugate-variable", Some(alpha), psi_degree);
        for (lhs, rhs) in &pairing.pairs {
            let diff = lhs - rhs;
            conj.add(diff == GaussRat::from_int(0), diff.abs_f64());
        }
        suites.push(conj.result);
    }

    let markov_degree = degree.min(MARKOV_DEGREE);
    let half = Rational::new(1.into(), 2.into());
    let mut ab = Alphabet::new();
    let (mx, my, mp, mw) = (ab.variable("X")?, ab.variable("Y")?, ab.projection("p")?, ab.variable("W")?);
    let mut model = FreenessModel::default();
    model.add_variable(mx, &semicircle_moments(model.degree()))?;
    model.add_variable(my, &semicircle_moments(model.degree()))?;
    model.add_projection(mp, &half)?;
    let markov_words: Vec<NCPoly> = all_words(&[mw, mp], markov_degree).into_iter().filter(|w| !w.is_one()).map(word_poly).collect();
    let mut markov = Tally::new("markov", Some(&half), markov_degree);
    for r in markov_check(&model, (mx, my, mp), &half, mw, &markov_words)? {
        markov.add(r.is_exact(), 1.0);
    }
    suites.push(markov.result);

    let pass = suites.iter().all(SuiteResult::pass);
    Ok(VerifyReport { degree, corrupted: corrupt, suites, pass })
}

impl VerifyReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let alpha = s.alpha.as_deref().map(|a| format!(" α = {a}")).unwrap_or_default();
            out.push_str(&format!(
                "{:<20}{alpha:<10} degree ≤ {}: {} checked, {} nonzero{}\n",
                s.suite,
                s.degree,
                s.checked,
                s.nonzero,
                if s.pass() { String::new() } else { format!(" (max |residual| {:.3e})", s.max_abs_residual) }
            ));
        }
        out.push_str(if self.pass { "all residuals exactly zero\n" } else { "FAILED: nonzero residuals\n" });
        out
    }
}

