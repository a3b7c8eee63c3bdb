//! The `.measure` TOML format.
//!
//! ```toml
//! schema_version = 1
//! name = "bernoulli"
//!
//! [[atoms]]
//! x = "-1"
//! w = "1/2"
//!
//! [[smooth]]
//! kind = "semicircle"
//! weight = "1/2"
//! support = [-2.0, 2.0]
//!
//! [smooth.params]
//! center = "0"
//! variance = "1"
//! ```
//!
//! Exact quantities are `"num/den"` strings. `support` is optional on input
//! and checked against the parameters when present. The canonical form is
//! whatever [`write_measure`] emits; parsing it and writing it back gives the
//! same bytes.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use subord_core::exact::{parse_rational, rational_to_f64};
use subord_core::measure::{Atom, MeasureSpec, SmoothKind, SmoothPart};
use subord_core::Rational;
use toml::Spanned;

pub const MEASURE_SCHEMA_VERSION: u32 = 1;

/// A parse or validation failure, located by line and field where possible.
#[derive(Debug, Clone, PartialEq)]
pub struct FormatError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl FormatError {
    fn at(text: &str, span: Option<Range<usize>>, field: Option<String>, message: impl Into<String>) -> Self {
        let (line, column) = match span {
            Some(s) => {
                let (l, c) = line_col(text, s.start);
                (Some(l), Some(c))
            }
            None => (None, None),
        };
        FormatError { line, column, field, message: message.into() }
    }

    pub fn from_toml(text: &str, e: &toml::de::Error) -> Self {
        FormatError::at(text, e.span(), None, e.message().trim())
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: ")?,
            (Some(l), None) => write!(f, "line {l}: ")?,
            _ => {}
        }
        if let Some(field) = &self.field {
            write!(f, "field `{field}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for FormatError {}

/// 1-based line and column of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, column)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    schema_version: Spanned<u32>,
    name: String,
    #[serde(default)]
    moments: Option<Vec<Spanned<String>>>,
    #[serde(default)]
    atoms: Vec<RawAtom>,
    #[serde(default)]
    smooth: Vec<RawSmooth>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    x: Spanned<String>,
    w: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSmooth {
    kind: Spanned<String>,
    weight: Spanned<String>,
    #[serde(default)]
    support: Option<Spanned<[f64; 2]>>,
    params: Spanned<RawParams>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    center: Option<Spanned<String>>,
    variance: Option<Spanned<String>>,
    a: Option<Spanned<String>>,
    b: Option<Spanned<String>>,
    xs: Option<Vec<f64>>,
    density: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct CanonicalFile {
    schema_version: u32,
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    moments: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    atoms: Vec<CanonicalAtom>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    smooth: Vec<CanonicalSmooth>,
}

#[derive(Serialize)]
struct CanonicalAtom {
    x: String,
    w: String,
}

#[derive(Serialize)]
struct CanonicalSmooth {
    kind: &'static str,
    weight: String,
    support: [f64; 2],
    params: CanonicalParams,
}

#[derive(Serialize, Default)]
struct CanonicalParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    variance: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xs: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    density: Option<Vec<f64>>,
}

fn part_support(kind: &SmoothKind) -> [f64; 2] {
    match kind {
        SmoothKind::Semicircle { center, variance } => {
            let (m, r) = (rational_to_f64(center), 2.0 * rational_to_f64(variance).sqrt());
            [m - r, m + r]
        }
        SmoothKind::Arcsine { a, b } => [rational_to_f64(a), rational_to_f64(b)],
        SmoothKind::Tabulated { xs, .. } => [xs[0], xs[xs.len() - 1]],
    }
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn rational(&self, v: &Spanned<String>, field: String) -> Result<Rational, FormatError> {
        parse_rational(v.get_ref()).ok_or_else(|| {
            FormatError::at(self.text, Some(v.span()), Some(field), format!("{:?} is not a rational number", v.get_ref()))
        })
    }

    fn required<'s>(
        &self,
        v: &'s Option<Spanned<String>>,
        params: &Spanned<RawParams>,
        field: String,
    ) -> Result<&'s Spanned<String>, FormatError> {
        v.as_ref().ok_or_else(|| FormatError::at(self.text, Some(params.span()), Some(field), "missing parameter"))
    }
}

/// Parses a measure file into a validated [`MeasureSpec`].
pub fn parse_measure(text: &str) -> Result<MeasureSpec, FormatError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| FormatError::from_toml(text, &e))?;
    let cx = Ctx { text };
    if *raw.schema_version.get_ref() != MEASURE_SCHEMA_VERSION {
        return Err(FormatError::at(
            text,
            Some(raw.schema_version.span()),
            Some("schema_version".into()),
            format!("unsupported version {}, expected {MEASURE_SCHEMA_VERSION}", raw.schema_version.get_ref()),
        ));
    }
    let mut atoms = Vec::with_capacity(raw.atoms.len());
    for (i, a) in raw.atoms.iter().enumerate() {
        let x = cx.rational(&a.x, format!("atoms[{i}].x"))?;
        let w = cx.rational(&a.w, format!("atoms[{i}].w"))?;
        if w <= Rational::from_integer(0.into()) {
            return Err(FormatError::at(text, Some(a.w.span()), Some(format!("atoms[{i}].w")), "weight must be positive"));
        }
        atoms.push(Atom { x, w });
    }
    let mut smooth = Vec::with_capacity(raw.smooth.len());
    for (i, s) in raw.smooth.iter().enumerate() {
        let weight = cx.rational(&s.weight, format!("smooth[{i}].weight"))?;
        let p = s.params.get_ref();
        let field = |name: &str| format!("smooth[{i}].params.{name}");
        let kind = match s.kind.get_ref().as_str() {
            "semicircle" => SmoothKind::Semicircle {
                center: cx.rational(cx.required(&p.center, &s.params, field("center"))?, field("center"))?,
                variance: cx.rational(cx.required(&p.variance, &s.params, field("variance"))?, field("variance"))?,
            },
            "arcsine" => SmoothKind::Arcsine {
                a: cx.rational(cx.required(&p.a, &s.params, field("a"))?, field("a"))?,
                b: cx.rational(cx.required(&p.b, &s.params, field("b"))?, field("b"))?,
            },
            "tabulated" => {
                let missing = |name: &str| FormatError::at(text, Some(s.params.span()), Some(field(name)), "missing parameter");
                SmoothKind::Tabulated {
                    xs: p.xs.clone().ok_or_else(|| missing("xs"))?,
                    density: p.density.clone().ok_or_else(|| missing("density"))?,
                }
            }
            other => {
                return Err(FormatError::at(
                    text,
                    Some(s.kind.span()),
                    Some(format!("smooth[{i}].kind")),
                    format!("unknown kind {other:?} (expected semicircle, arcsine or tabulated)"),
                ))
            }
        };
        let part = SmoothPart { weight, kind };
        // Validate the single part on its own so errors point at it.
        let alone = MeasureSpec::new("part", Vec::new(), vec![SmoothPart { weight: Rational::from_integer(1.into()), ..part.clone() }]);
        if let Err(e) = alone {
            return Err(FormatError::at(text, Some(s.params.span()), Some(format!("smooth[{i}].params")), e.to_string()));
        }
        if let Some(given) = &s.support {
            let expected = part_support(&part.kind);
            let [lo, hi] = *given.get_ref();
            if (lo - expected[0]).abs() > 1e-9 * (1.0 + expected[0].abs())
                || (hi - expected[1]).abs() > 1e-9 * (1.0 + expected[1].abs())
            {
                return Err(FormatError::at(
                    text,
                    Some(given.span()),
                    Some(format!("smooth[{i}].support")),
                    format!("[{lo}, {hi}] does not match the parameters, which give [{}, {}]", expected[0], expected[1]),
                ));
            }
        }
        smooth.push(part);
    }
    let mut spec = MeasureSpec::new(raw.name.clone(), atoms, smooth)
        .map_err(|e| FormatError::at(text, None, Some("atoms/smooth".into()), e.to_string()))?;
    if let Some(ms) = &raw.moments {
        let values = ms
            .iter()
            .enumerate()
            .map(|(k, m)| cx.rational(m, format!("moments[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let span = ms.first().map(|m| m.span());
        spec = spec.with_moments(values).map_err(|e| FormatError::at(text, span, Some("moments".into()), e.to_string()))?;
    }
    Ok(spec)
}

/// The canonical text of a measure.
pub fn write_measure(spec: &MeasureSpec) -> String {
    let smooth = spec
        .smooth()
        .iter()
        .map(|s| {
            let mut params = CanonicalParams::default();
            let kind = match &s.kind {
                SmoothKind::Semicircle { center, variance } => {
                    params.center = Some(center.to_string());
                    params.variance = Some(variance.to_string());
                    "semicircle"
                }
                SmoothKind::Arcsine { a, b } => {
                    params.a = Some(a.to_string());
                    params.b = Some(b.to_string());
                    "arcsine"
                }
                SmoothKind::Tabulated { xs, density } => {
                    params.xs = Some(xs.clone());
                    params.density = Some(density.clone());
                    "tabulated"
                }
            };
            CanonicalSmooth { kind, weight: s.weight.to_string(), support: part_support(&s.kind), params }
        })
        .collect();
    let file = CanonicalFile {
        schema_version: MEASURE_SCHEMA_VERSION,
        name: spec.name().to_string(),
        moments: spec.moment_override().map(|m| m.iter().map(ToString::to_string).collect()),
        atoms: spec.atoms().iter().map(|a| CanonicalAtom { x: a.x.to_string(), w: a.w.to_string() }).collect(),
        smooth,
    };
    toml::to_string(&file).expect("measure files always serialize")
}

/// Reads and parses a measure file, prefixing errors with the path.
pub fn load_measure(path: &std::path::Path) -> anyhow::Result<MeasureSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    parse_measure(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}
