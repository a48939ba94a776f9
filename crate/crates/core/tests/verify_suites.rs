use xxz_pin::verify::{run, Suite};

#[test]
fn full_suites_pass() {
    let r = run(&Suite::ALL, false);
    eprintln!("{}", r.render());
    assert!(r.checks.len() > 300);
    assert!(r.passed(), "{}", r.render());
}
