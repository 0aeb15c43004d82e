use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use super::CheckError;
use crate::protocol::Descriptor;
use crate::speclang::{Action, CheckConfig};
use crate::state::State;

/// The checker's next request.
#[derive(Debug, Clone, PartialEq)]
pub enum Decision {
    Act { action: String, descriptor: Descriptor, timeout: Option<u64> },
    Wait { time: u64 },
}

/// Picks uniformly among the allowed user actions whose guards hold in
/// `current`, or waits `poll_ms` if there are none.
pub fn select_action<R: Rng + ?Sized>(
    current: &State,
    actions: &BTreeMap<String, Action>,
    check: &CheckConfig,
    poll_ms: u64,
    rng: &mut R,
) -> Result<Decision, CheckError> {
    let mut enabled = Vec::new();
    for a in actions.values().filter(|a| check.allows(&a.name)) {
        let on = match &a.guard {
            Some(g) => g
                .eval_bool(current)
                .map_err(|source| CheckError::GuardEval { action: a.name.clone(), source })?,
            None => true,
        };
        if on {
            enabled.push(a);
        }
    }
    if enabled.is_empty() {
        return Ok(Decision::Wait { time: poll_ms });
    }
    let a = enabled[rng.random_range(0..enabled.len())];
    let args = a
        .args
        .iter()
        .map(|e| e.eval(current))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|source| CheckError::GuardEval { action: a.name.clone(), source })?;
    let descriptor = Descriptor::new(a.primitive.clone(), args).expect("primitive names are non-empty");
    Ok(Decision::Act { action: a.name.clone(), descriptor, timeout: a.timeout })
}
