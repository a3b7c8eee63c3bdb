use std::path::PathBuf;

use proptest::prelude::*;
use subord::measure_file::{parse_measure, write_measure};
use subord_core::exact::rat;
use subord_core::measure::{Atom, MeasureSpec, SmoothKind, SmoothPart};

fn measures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../measures")
}

#[test]
fn bundled_measures_are_canonical() {
    let mut seen = 0;
    for entry in std::fs::read_dir(measures_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("measure") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let spec = parse_measure(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(write_measure(&spec), text, "{} is not in canonical form", path.display());
        seen += 1;
    }
    assert!(seen >= 3);
}

#[test]
fn bundled_bernoulli_matches_the_builtin() {
    let text = std::fs::read_to_string(measures_dir().join("bernoulli.measure")).unwrap();
    assert_eq!(parse_measure(&text).unwrap(), MeasureSpec::bernoulli());
}

#[test]
fn tabulated_and_moment_override_round_trip() {
    let tab = SmoothPart { weight: rat(1, 2), kind: SmoothKind::Tabulated { xs: vec![-1.0, 0.0, 0.5, 1.0], density: vec![0.0, 1.25, 0.1, 0.0] } };
    let spec = MeasureSpec::new("mixed", vec![Atom { x: rat(3, 7), w: rat(1, 2) }], vec![tab]).unwrap();
    let text = write_measure(&spec);
    let back = parse_measure(&text).unwrap();
    assert_eq!(back, spec);
    assert_eq!(write_measure(&back), text);

    let with = MeasureSpec::bernoulli().with_moments(vec![rat(1, 1), rat(0, 1), rat(1, 1)]).unwrap();
    let text = write_measure(&with);
    assert!(text.contains("moments = [\"1\", \"0\", \"1\"]"), "{text}");
    assert_eq!(parse_measure(&text).unwrap(), with);
}

fn error_of(text: &str) -> String {
    parse_measure(text).unwrap_err().to_string()
}

#[test]
fn errors_carry_line_and_field() {
    let bad_rational = "schema_version = 1\nname = \"b\"\n\n[[atoms]]\nx = \"1/0\"\nw = \"1\"\n";
    let e = error_of(bad_rational);
    assert!(e.contains("line 5") && e.contains("atoms[0].x"), "{e}");

    let unknown = "schema_version = 1\nname = \"b\"\nwidth = 3\n";
    let e = error_of(unknown);
    assert!(e.contains("line 3") && e.contains("width"), "{e}");

    let mass = "schema_version = 1\nname = \"b\"\n\n[[atoms]]\nx = \"1\"\nw = \"1/3\"\n";
    let e = error_of(mass);
    assert!(e.contains("total mass"), "{e}");

    let support = "schema_version = 1\nname = \"s\"\n\n[[smooth]]\nkind = \"semicircle\"\nweight = \"1\"\nsupport = [-1.0, 1.0]\n\n[smooth.params]\ncenter = \"0\"\nvariance = \"1\"\n";
    let e = error_of(support);
    assert!(e.contains("line 7") && e.contains("smooth[0].support"), "{e}");

    let kind = "schema_version = 1\nname = \"s\"\n\n[[smooth]]\nkind = \"cauchy\"\nweight = \"1\"\n\n[smooth.params]\n";
    let e = error_of(kind);
    assert!(e.contains("line 5") && e.contains("unknown kind"), "{e}");

    let missing = "schema_version = 1\nname = \"s\"\n\n[[smooth]]\nkind = \"arcsine\"\nweight = \"1\"\n\n[smooth.params]\na = \"-2\"\n";
    let e = error_of(missing);
    assert!(e.contains("smooth[0].params.b"), "{e}");

    let version = "schema_version = 2\nname = \"s\"\n";
    let e = error_of(version);
    assert!(e.contains("line 1") && e.contains("schema_version"), "{e}");

    let syntax = "schema_version = 1\nname = \"s\n";
    assert!(error_of(syntax).contains("line 2"));
}

fn spec_strategy() -> impl Strategy<Value = MeasureSpec> {
    let atoms = prop::collection::vec((-20i64..=20, 1i64..=9, 1i64..=5), 0..4);
    let smooth = prop::option::of((-3i64..=3, 1i64..=4, 1i64..=9, 1i64..=4, 1i64..=5));
    (atoms, smooth, "[a-z][a-z0-9-]{0,8}").prop_filter_map("need a component", |(atoms, smooth, name)| {
        let total: i64 = atoms.iter().map(|a| a.2).sum::<i64>() + smooth.map_or(0, |s| s.4);
        if total == 0 {
            return None;
        }
        let atoms = atoms.iter().map(|&(n, d, w)| Atom { x: rat(n, d), w: rat(w, total) }).collect();
        let parts = smooth
            .map(|(m, md, v, vd, w)| {
                vec![SmoothPart { weight: rat(w, total), kind: SmoothKind::Semicircle { center: rat(m, md), variance: rat(v, vd) } }]
            })
            .unwrap_or_default();
        MeasureSpec::new(name, atoms, parts).ok()
    })
}

proptest! {
    #[test]
    fn write_then_parse_is_identity(spec in spec_strategy()) {
        let text = write_measure(&spec);
        let back = parse_measure(&text).unwrap();
        prop_assert_eq!(&back, &spec);
        prop_assert_eq!(write_measure(&back), text);
    }
}
