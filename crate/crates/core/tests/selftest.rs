use ctent::selftest::{self, Level};

#[test]
fn quick_level_passes() {
    let r = selftest::run(Level::Quick, None);
    let failing: Vec<_> = r.checks.iter().filter(|c| !c.passed).map(|c| (&c.name, &c.detail)).collect();
    assert!(r.passed, "{failing:?}");
    assert_eq!(r.checks.len(), 7);
}

#[test]
fn figure_tables_have_headers() {
    let dir = std::env::temp_dir().join(format!("ctent-figs-{}", std::process::id()));
    let files = selftest::write_figures(&dir).unwrap();
    assert_eq!(files.len(), 4);
    for f in &files {
        let text = std::fs::read_to_string(f).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header == "beta,rho,rho_bar" || header == "s,phi", "{header}");
        assert!(text.lines().count() > 50);
    }
    std::fs::remove_dir_all(dir).unwrap();
}
