use nc_core::scenarios::{list_scenarios, run_scenario};

fn run(name: &str) {
    let r = run_scenario(name).unwrap_or_else(|e| panic!("{name}: {e}"));
    print!("{r}");
    assert!(r.passed, "{r}");
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["scenario"], name);
}

#[test]
fn every_registered_scenario_has_a_test() {
    let names: Vec<&str> = list_scenarios().iter().map(|s| s.name).collect();
    assert_eq!(names.len(), 8);
}

#[test]
fn ex1_chain() {
    run("ex1_chain");
}

#[test]
fn ex3_rationality() {
    run("ex3_rationality");
}

#[test]
fn qfano_40245() {
    run("qfano_40245");
}

#[test]
fn qfano_40057() {
    run("qfano_40057");
}

#[test]
fn c3c3_chain() {
    run("c3c3_chain");
}

#[test]
fn c3cubic3_rationality() {
    run("c3cubic3_rationality");
}

#[test]
fn main_parametrization() {
    run("main_parametrization");
}

#[test]
fn fermat_smoothness() {
    run("fermat_smoothness");
}
