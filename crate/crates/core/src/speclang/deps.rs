use alloc::collections::BTreeSet;
use alloc::string::String;

use super::elaborate::{CheckConfig, ElaboratedSpec};

/// Every state field the check can read: fields of the checked property
/// formulas and of the guards and primitive arguments of every allowed
/// action and event. Both branches of conditionals count.
pub fn analyze_deps(spec: &ElaboratedSpec, check: &CheckConfig) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for p in &check.properties {
        if let Some(f) = spec.properties.get(p) {
            f.collect_fields(&mut out);
        }
    }
    for action in spec.actions.values().chain(spec.events.values()) {
        if !check.allows(&action.name) {
            continue;
        }
        for arg in &action.args {
            arg.collect_fields(&mut out);
        }
        if let Some(g) = &action.guard {
            g.collect_fields(&mut out);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::speclang::compile;

    #[test]
    fn both_branches_of_if() {
        let spec = compile("let ~p = (if `#toggle`.enabled { 0 } else { 1 }) == 0;\ncheck p;", 100).unwrap();
        let deps = analyze_deps(&spec, &spec.checks[0]);
        assert_eq!(deps.into_iter().collect::<alloc::vec::Vec<_>>(), ["#toggle.enabled"]);
    }

    #[test]
    fn constant_property_has_no_deps() {
        let spec = compile("let ~p = always (1 == 1);\ncheck p;", 100).unwrap();
        assert!(analyze_deps(&spec, &spec.checks[0]).is_empty());
    }
}
