// Writes a builtin protocol as a JSON document, reads it back and runs it.

use std::collections::BTreeMap;

use eprb::attack;
use eprb::protocol;

pub fn run_example() -> eprb::Result<()> {
    let params: BTreeMap<String, String> = [("theta".to_string(), "0.3".to_string())].into_iter().collect();
    let p = protocol::builtin("theta-commit", &params)?;
    let text = protocol::serialize_protocol(&p)?;
    println!("{} bytes, first lines:", text.len());
    for line in text.lines().take(6) {
        println!("  {line}");
    }

    let loaded = protocol::load_protocol(&text)?;
    assert_eq!(protocol::serialize_protocol(&loaded)?, text);
    let r = attack::simulate_attack(&loaded.into_commitment()?)?;
    println!("round trip is exact; Bob accepts the flip with {:.6}", r.bob_acceptance.unwrap_or(0.0));

    match protocol::load_protocol(&text.replace("\"format_version\": 1", "\"format_version\": 9")) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

fn main() -> eprb::Result<()> {
    run_example()
}
