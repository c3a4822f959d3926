use lubin_tate::verify::{default_fixtures, run_fixture, Suite};

#[test]
fn default_fixtures_pass() {
    for fx in default_fixtures(0) {
        let t = std::time::Instant::now();
        let res = run_fixture(&fx, Suite::All).unwrap();
        for r in &res {
            println!("{} {} {} [{} ms] {}", r.fixture, r.name, if r.pass { "PASS" } else { "FAIL" }, r.millis, r.detail);
        }
        println!("{}: {:?}", fx.label, t.elapsed());
        assert!(res.iter().all(|r| r.pass), "{}", fx.label);
    }
}
