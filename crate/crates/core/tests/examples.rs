// Runs every library example as a test.

#[allow(dead_code)]
mod coin_toss_induction {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/coin_toss_induction.rs"));
}

#[test]
fn coin_toss_induction() {
    coin_toss_induction::run_example().unwrap();
}

#[allow(dead_code)]
mod fidelity_triple {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fidelity_triple.rs"));
}

#[test]
fn fidelity_triple() {
    fidelity_triple::run_example().unwrap();
}

#[allow(dead_code)]
mod ideal_attack {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ideal_attack.rs"));
}

#[test]
fn ideal_attack() {
    ideal_attack::run_example().unwrap();
}

#[allow(dead_code)]
mod lemma_check {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/lemma_check.rs"));
}

#[test]
fn lemma_check() {
    lemma_check::run_example().unwrap();
}

#[allow(dead_code)]
mod protocol_document {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/protocol_document.rs"));
}

#[test]
fn protocol_document() {
    protocol_document::run_example().unwrap();
}

#[allow(dead_code)]
mod round_bounds {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/round_bounds.rs"));
}

#[test]
fn round_bounds() {
    round_bounds::run_example().unwrap();
}

#[allow(dead_code)]
mod schmidt_form {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/schmidt_form.rs"));
}

#[test]
fn schmidt_form() {
    schmidt_form::run_example().unwrap();
}

#[allow(dead_code)]
mod theta_tradeoff {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/theta_tradeoff.rs"));
}

#[test]
fn theta_tradeoff() {
    theta_tradeoff::run_example().unwrap();
}
