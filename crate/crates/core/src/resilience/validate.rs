use serde::{Deserialize, Serialize};

use super::Disintegration;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// All five properties; no empty steps.
    Disintegration,
    /// Partition plus distinct-components only; empty steps allowed.
    PreDisintegration,
}

/// One violated property. Properties are numbered as in the definition:
/// 1 partition, 2 first step in distinct components, 3 first step size,
/// 4 later steps in distinct components, 5 later step sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub property: u8,
    /// 1-based step index, when the violation is tied to a step.
    pub step: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub mode: Mode,
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.ok() {
            return "valid".into();
        }
        self.violations
            .iter()
            .map(|v| match v.step {
                Some(s) => format!("property {} at step {}: {}", v.property, s, v.detail),
                None => format!("property {}: {}", v.property, v.detail),
            })
            .collect::<Vec<_>>()
            .join("; ")
    }

    fn flag(&mut self, property: u8, step: Option<usize>, detail: String) {
        if self.violations.iter().all(|v| v.property != property) {
            self.violations.push(Violation {
                property,
                step,
                detail,
            });
        }
    }
}

/// Checks `steps` against the disintegration (or pre-disintegration)
/// properties, reporting the first violation of each property.
pub fn validate(g: &Graph, steps: &[VertexSet], mode: Mode) -> ValidityReport {
    let mut report = ValidityReport {
        mode,
        violations: Vec::new(),
    };
    let all = g.vertices();
    let mut seen = VertexSet::new();
    for (i, s) in steps.iter().enumerate() {
        let step = Some(i + 1);
        if !s.is_subset(&all) {
            report.flag(1, step, format!("{s} contains vertices outside [1, {}]", g.d()));
        }
        if !s.is_disjoint(&seen) {
            report.flag(1, step, format!("{} already used", s.intersection(&seen)));
        }
        if s.is_empty() && mode == Mode::Disintegration {
            report.flag(1, step, "empty step".into());
        }
        seen.union_with(s);
    }
    let missing = all.difference(&seen);
    if !missing.is_empty() {
        report.flag(1, None, format!("{missing} never removed"));
    }

    let mut residual = all;
    for (i, s) in steps.iter().enumerate() {
        let (distinct, size) = if i == 0 { (2, 3) } else { (4, 5) };
        let comps = g.components_within(&residual);
        let picks = s.intersection(&residual);
        for c in &comps {
            let hit = c.intersection(&picks);
            if hit.len() > 1 {
                report.flag(
                    distinct,
                    Some(i + 1),
                    format!("{hit} lie in the same component"),
                );
            }
        }
        if mode == Mode::Disintegration && s.len() != comps.len() {
            report.flag(
                size,
                Some(i + 1),
                format!("{} vertices for {} components", s.len(), comps.len()),
            );
        }
        residual = residual.difference(s);
    }
    report
}

/// Turns a pre-disintegration into a disintegration no longer than it.
///
/// Repeatedly scans the steps in order; whenever a residual component has
/// no pick in the current step, its earliest-removed vertex is pulled
/// forward into that step. Each move strictly decreases the sum of step
/// indices, so the loop terminates, and the fixed point has exactly one
/// pick per residual component at every step.
pub fn normalize(g: &Graph, pre: &[VertexSet]) -> Result<Disintegration> {
    let report = validate(g, pre, Mode::PreDisintegration);
    if !report.ok() {
        return Err(Error::InvalidDisintegration(format!(
            "not a pre-disintegration: {}",
            report.summary()
        )));
    }
    let mut steps: Vec<VertexSet> = pre.to_vec();
    let mut step_of = vec![0usize; g.d()];
    for (i, s) in steps.iter().enumerate() {
        for v in s {
            step_of[v] = i;
        }
    }
    let mut residual = g.vertices();
    let mut i = 0;
    while !residual.is_empty() {
        for c in g.components_within(&residual) {
            if c.is_disjoint(&steps[i]) {
                let v = c
                    .iter()
                    .min_by_key(|&v| (step_of[v], v))
                    .expect("components are nonempty");
                steps[step_of[v]].remove(v);
                steps[i].insert(v);
                step_of[v] = i;
            }
        }
        residual = residual.difference(&steps[i]);
        i += 1;
    }
    steps.truncate(i);
    Disintegration::new(g, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_family, FamilySpec};

    fn sets(g: &Graph, labels: &[&[usize]]) -> Vec<VertexSet> {
        labels
            .iter()
            .map(|l| VertexSet::from_labels(l, g.d()).unwrap())
            .collect()
    }

    fn fig3() -> Graph {
        Graph::disjoint_union(&[
            Graph::cycle(4).unwrap(),
            make_family(&FamilySpec::Path { d: 3 }).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn cycle_plus_path_disintegration_is_valid() {
        let g = fig3();
        let s = sets(&g, &[&[1, 6], &[3, 5, 7], &[2, 4]]);
        assert!(validate(&g, &s, Mode::Disintegration).ok());
    }

    #[test]
    fn same_component_is_rejected() {
        let g = make_family(&FamilySpec::Path { d: 2 }).unwrap();
        let r = validate(&g, &sets(&g, &[&[1, 2]]), Mode::Disintegration);
        assert!(!r.ok());
        assert!(r.violations.iter().any(|v| v.property == 2 && v.step == Some(1)));
        assert!(r.violations.iter().any(|v| v.property == 3));
    }

    #[test]
    fn path_four_example() {
        let g = make_family(&FamilySpec::Path { d: 4 }).unwrap();
        assert!(validate(&g, &sets(&g, &[&[2], &[1, 3], &[4]]), Mode::Disintegration).ok());
        // {1} then {2,4}: 2 and 4 are split only after 3 leaves
        let r = validate(&g, &sets(&g, &[&[1], &[2, 4], &[3]]), Mode::Disintegration);
        assert_eq!(r.violations[0].property, 4);
        assert_eq!(r.violations[0].step, Some(2));
    }

    #[test]
    fn partition_violations() {
        let g = make_family(&FamilySpec::Path { d: 3 }).unwrap();
        let r = validate(&g, &sets(&g, &[&[2], &[1]]), Mode::Disintegration);
        assert!(r.violations.iter().any(|v| v.property == 1 && v.step.is_none()));
        let r = validate(&g, &sets(&g, &[&[2], &[1, 3], &[3]]), Mode::PreDisintegration);
        assert_eq!(r.violations[0].property, 1);
        let pre = sets(&g, &[&[], &[2], &[], &[1, 3]]);
        assert!(validate(&g, &pre, Mode::PreDisintegration).ok());
        assert!(!validate(&g, &pre, Mode::Disintegration).ok());
    }

    #[test]
    fn normalize_examples() {
        let g = fig3();
        let d = sets(&g, &[&[1, 6], &[3, 5, 7], &[2, 4]]);
        assert_eq!(normalize(&g, &d).unwrap().steps(), &d[..]);

        let e3 = Graph::empty(3);
        let n = normalize(&e3, &sets(&e3, &[&[1], &[2], &[3]])).unwrap();
        assert_eq!(n.to_labels(), vec![vec![1, 2, 3]]);

        let k2 = make_family(&FamilySpec::Complete { d: 2 }).unwrap();
        let n = normalize(&k2, &sets(&k2, &[&[], &[1], &[2]])).unwrap();
        assert_eq!(n.to_labels(), vec![vec![1], vec![2]]);

        assert!(normalize(&k2, &sets(&k2, &[&[1, 2]])).is_err());
        let null = Graph::empty(0);
        assert!(normalize(&null, &[]).unwrap().is_empty());
    }
}
