mod common;

use ccvi_service::fixture::{self, DEFAULT_SEED};
use common::{fixtures, snapshot};

/// The shipped fixtures are exactly what the generator produces.
#[test]
fn regenerated_fixture_matches_shipped_files() {
    let tmp = tempfile::tempdir().unwrap();
    fixture::write(tmp.path(), DEFAULT_SEED).unwrap();
    let fresh = snapshot(tmp.path());
    let shipped = snapshot(&fixtures());
    let names = |s: &[(String, Vec<u8>)]| s.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>();
    assert_eq!(names(&fresh), names(&shipped));
    for ((name, a), (_, b)) in fresh.iter().zip(&shipped) {
        assert!(a == b, "{name} differs from the generator output");
    }
}

#[test]
fn other_seeds_change_the_survey() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    fixture::write(a.path(), DEFAULT_SEED).unwrap();
    fixture::write(b.path(), DEFAULT_SEED + 1).unwrap();
    let survey = |d: &std::path::Path| std::fs::read(d.join("region/survey.csv")).unwrap();
    assert_ne!(survey(a.path()), survey(b.path()));
}
