use std::path::{Path, PathBuf};
use std::process::Command;

use descent_cli::model::{load, load_str, LoadError};
use descent_cli::report::{Report, Status};
use descent_cli::syntax::parse;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn desc(args: &[&str], site: &Path) -> (i32, Report) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let status = Command::new(env!("CARGO_BIN_EXE_desc"))
        .arg(args[0])
        .arg(site)
        .args(&args[1..])
        .arg("--report")
        .arg(&out)
        .output()
        .unwrap();
    let report: Report = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    (status.status.code().unwrap(), report)
}

fn witness(r: &Report) -> String {
    r.checks
        .iter()
        .find_map(|c| c.witness.as_ref())
        .map(|w| w.kind.clone())
        .unwrap_or_default()
}

#[test]
fn regular_action_loads_and_passes() {
    let (code, r) = desc(&["check-action"], &fixture("z2_regular.site"));
    assert_eq!((code, r.status), (0, Status::Pass));
    let (code, _) = desc(&["check-group"], &fixture("z2_regular.site"));
    assert_eq!(code, 0);
}

#[test]
fn load_failures_exit_2_with_violation() {
    for (file, cmd, kind) in [
        ("non_associative.site", "check-group", "NotAssociative"),
        ("non_action.site", "check-action", "UnitFail"),
        ("non_equivariant.site", "check-action", "EquivarianceFail"),
    ] {
        let (code, r) = desc(&[cmd], &fixture(file));
        assert_eq!(code, 2, "{file}");
        assert_eq!(r.status, Status::Error);
        assert_eq!(witness(&r), "ValidationError");
        assert!(
            r.checks[0].detail.contains(kind),
            "{file}: {}",
            r.checks[0].detail
        );
    }
}

#[test]
fn verified_failures_exit_1_with_witness() {
    for (file, cmd, kind) in [
        ("trivial_action_bundle.site", "check-bundle", "NotBundle"),
        ("cocycle_violation.site", "glue-object", "CocycleFail"),
        ("noncanonical_cover.site", "check-cover", "NotCanonical"),
    ] {
        let (code, r) = desc(&[cmd], &fixture(file));
        assert_eq!((code, r.status), (1, Status::Fail), "{file}");
        assert_eq!(witness(&r), kind, "{file}");
    }
    let (_, r) = desc(&["glue-object"], &fixture("cocycle_violation.site"));
    assert!(r.checks[0].detail.starts_with("CocycleFail(0,1,0)"));
}

#[test]
fn bundle_fixture_passes_every_command() {
    for cmd in [
        "check-bundle",
        "check-cover",
        "check-sheaf",
        "glue-morphisms",
        "glue-object",
    ] {
        let (code, r) = desc(&[cmd], &fixture("trivial_bundle.site"));
        assert_eq!(code, 0, "{cmd}: {r:?}");
    }
    let (_, r) = desc(&["glue-morphisms"], &fixture("trivial_bundle.site"));
    assert!(r.checks[0].detail.contains("(e, 0): (s, 0)"));
    assert!(r.checks[0].detail.contains("(e, 1): (e, 1)"));
}

#[test]
fn verify_stack_fixture_passes() {
    let (code, r) = desc(
        &["verify-stack", "--budget", "20"],
        &fixture("verify_stack_bz2.site"),
    );
    assert_eq!((code, r.status), (0, Status::Pass), "{r:?}");
    assert!(r.checks[0].detail.contains("rejected inputs 4"));
    let (code, _) = desc(&["classify"], &fixture("verify_stack_bz2.site"));
    assert_eq!(code, 0);
}

#[test]
fn reports_are_deterministic_and_ordered() {
    let site = fixture("verify_stack_bz2.site");
    let (_, a) = desc(&["verify-stack", "--seed", "9", "--budget", "10"], &site);
    let (_, b) = desc(&["verify-stack", "--seed", "9", "--budget", "10"], &site);
    assert_eq!(a, b);
    assert_eq!(a.timing_ms, None);
    let json = a.to_json();
    let keys = [
        "\"schema_version\"",
        "\"command\"",
        "\"site\"",
        "\"status\"",
        "\"checks\"",
        "\"timing_ms\"",
    ];
    let offsets: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
    assert!(offsets.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn unknown_command_and_unresolved_reference_exit_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_desc"))
        .args(["frobnicate"])
        .arg(fixture("z2_regular.site"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown command"));

    let dir = tempfile::tempdir().unwrap();
    let site = dir.path().join("bad.site");
    std::fs::write(&site, "map f {\n  src = U\n  dst = U\n  table = {}\n}\n").unwrap();
    let (code, r) = desc(&["check-action"], &site);
    assert_eq!(code, 2);
    assert_eq!(witness(&r), "UnresolvedReference");
    assert!(r.checks[0].detail.starts_with("2:9:"));
}

#[test]
fn syntax_errors_carry_positions() {
    let err = load_str("set X {\n  atoms = [0, 1,, 2]\n}").unwrap_err();
    match err {
        LoadError::Syntax(e) => assert_eq!((e.pos.line, e.pos.col), (2, 17)),
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn print_parse_round_trip_on_fixtures() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let src = std::fs::read_to_string(&path).unwrap();
        let doc = parse(&src).unwrap();
        let printed = doc.to_string();
        let again = parse(&printed).unwrap();
        assert_eq!(again, doc, "{}", path.display());
        assert_eq!(again.to_string(), printed);
        // loading is insensitive to layout
        assert_eq!(load(doc).is_ok(), load(again).is_ok());
        seen += 1;
    }
    assert!(seen >= 8);
}
