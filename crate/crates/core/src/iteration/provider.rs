//! Step providers: the rule choosing the next forcing under each generic.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::poset::Poset;

/// Path entry for a stage whose step poset was undefined under the generic.
pub const NO_STEP: usize = usize::MAX;

/// `(stage, path) -> Q_stage`, where `path[k]` is the minimal element of
/// `Q_k` picked by the generic (or [`NO_STEP`]). `None` means undefined.
pub type StepRule = dyn Fn(usize, &[usize]) -> Option<Arc<Poset>> + Send + Sync;

/// The data defining an iteration: how many steps, and which poset is
/// forced at each step under each generic of the previous stage.
#[derive(Clone)]
pub struct StepProvider {
    stages: usize,
    rule: Arc<StepRule>,
    description: String,
}

impl fmt::Debug for StepProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StepProvider")
            .field("stages", &self.stages)
            .field("description", &self.description)
            .finish()
    }
}

impl StepProvider {
    pub fn new(
        stages: usize,
        description: impl Into<String>,
        rule: impl Fn(usize, &[usize]) -> Option<Arc<Poset>> + Send + Sync + 'static,
    ) -> StepProvider {
        StepProvider {
            stages,
            rule: Arc::new(rule),
            description: description.into(),
        }
    }

    /// The same step poset (or undefined) at each stage, whatever the generic.
    pub fn constant(steps: Vec<Option<Poset>>) -> StepProvider {
        let steps: Vec<Option<Arc<Poset>>> = steps.into_iter().map(|s| s.map(Arc::new)).collect();
        let description = format!(
            "constant[{}]",
            steps
                .iter()
                .map(|s| s
                    .as_ref()
                    .map_or("undef".to_string(), |p| p.len().to_string()))
                .collect::<Vec<_>>()
                .join(",")
        );
        let n = steps.len();
        StepProvider::new(n, description, move |k, _| steps[k].clone())
    }

    /// An explicit table keyed by generic path. Missing paths are undefined.
    pub fn from_table(
        stages: usize,
        description: impl Into<String>,
        table: BTreeMap<Vec<usize>, Arc<Poset>>,
    ) -> StepProvider {
        StepProvider::new(stages, description, move |_, path| table.get(path).cloned())
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn step(&self, stage: usize, path: &[usize]) -> Option<Arc<Poset>> {
        if stage >= self.stages {
            return None;
        }
        (self.rule)(stage, path)
    }

    /// The provider seen from a generic that has fixed the first `prefix.len()`
    /// path entries: stage `k` of the result is stage `prefix.len() + k` here.
    pub fn shifted(&self, prefix: &[usize]) -> StepProvider {
        let base = self.clone();
        let prefix = prefix.to_vec();
        let start = prefix.len();
        StepProvider::new(
            self.stages.saturating_sub(start),
            format!("{}>>{start}", self.description),
            move |k, path| {
                let mut full = prefix.clone();
                full.extend_from_slice(path);
                base.step(start + k, &full)
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifting_prepends_the_prefix() {
        let p = StepProvider::new(3, "t", |k, path| {
            (k == 2 && path == [0, 1]).then(|| Arc::new(Poset::antichain(2)))
        });
        let s = p.shifted(&[0]);
        assert_eq!(s.stages(), 2);
        assert!(s.step(1, &[1]).is_some());
        assert!(s.step(1, &[0]).is_none());
        assert!(s.step(2, &[1, 0]).is_none());
    }
}
