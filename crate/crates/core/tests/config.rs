use std::path::Path;

use charwave::cli::config::Config;

#[test]
fn every_example_config_round_trips() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = Config::from_toml_str(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = Config::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
        cfg.spec().unwrap();
        if cfg.exact.is_some() {
            cfg.exact_expr().unwrap().unwrap();
        }
        seen += 1;
    }
    assert!(seen >= 9);
}

#[test]
fn explicit_defaults_equal_implicit_ones() {
    let implicit = Config::from_toml_str("a = 2.0\nx0 = 0.5\nA = 0.0\n").unwrap();
    let explicit = Config::from_toml_str(
        "a = 2.0\nx0 = 0.5\nA = 0.0\nphi1 = \"0\"\nphi2 = \"0\"\npsi1 = \"0\"\npsi2 = \"0\"\nF = \"0\"\nf = \"0\"\n\
         [window]\nT = 1.0\nxmin = -3.0\nxmax = 3.0\n[grid]\nnt = 128\n\
         [picard]\ntol = 1e-10\nmax_iter = 64\nstrip_safety = 0.5\n",
    )
    .unwrap();
    assert_eq!(implicit, explicit);
    assert_eq!(implicit.lipschitz, None);
}
