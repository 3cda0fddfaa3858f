//! Scenario files bundled into the binary.

use anyhow::{Context, Result};
use edlm_mpc::sim::Scenario;

pub const EXAMPLE1_LAMBDA01: &str = include_str!("../fixtures/example1_lambda0.1.json");
pub const EXAMPLE1_LAMBDA1: &str = include_str!("../fixtures/example1_lambda1.json");
pub const EXAMPLE1_LAMBDA2: &str = include_str!("../fixtures/example1_lambda2.json");
pub const EXAMPLE2_UIMPC: &str = include_str!("../fixtures/example2_uimpc.json");
pub const EXAMPLE2_CIMPC: &str = include_str!("../fixtures/example2_cimpc.json");
pub const EXAMPLE3_UIMPC_D: &str = include_str!("../fixtures/example3_uimpc_d.json");
pub const EXAMPLE3_UIMPC: &str = include_str!("../fixtures/example3_uimpc.json");
pub const EXAMPLE3_CIMPC_D: &str = include_str!("../fixtures/example3_cimpc_d.json");
pub const EXAMPLE4: &str = include_str!("../fixtures/example4.json");

pub fn parse(name: &str, text: &str) -> Result<Scenario> {
    serde_json::from_str(text).with_context(|| format!("parsing {name}"))
}

pub fn example1() -> Result<Vec<Scenario>> {
    [
        ("example1_lambda0.1.json", EXAMPLE1_LAMBDA01),
        ("example1_lambda1.json", EXAMPLE1_LAMBDA1),
        ("example1_lambda2.json", EXAMPLE1_LAMBDA2),
    ]
    .into_iter()
    .map(|(n, t)| parse(n, t))
    .collect()
}
