//! Test spaces: finite catalogues of finite outcome sets.
//!
//! Outcomes are stored sorted; every other structure refers to them by
//! index. Events are sets of outcome indices.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::outcome::Outcome;

/// Set of outcome indices of one [`TestSpace`].
pub type Event = BTreeSet<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("test #{0} is empty")]
    EmptyTest(usize),
    #[error("unknown outcome {0}")]
    UnknownOutcome(Outcome),
    #[error("outcome {0} compared with itself")]
    SameOutcome(Outcome),
    #[error("{{{}}} is not an event", .0.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(","))]
    NotAnEvent(Vec<Outcome>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TestSpace {
    outcomes: Vec<Outcome>,
    tests: Vec<Vec<usize>>,
}

impl TestSpace {
    /// Builds a test space from its tests. Duplicate tests collapse; tests
    /// are kept in sorted order.
    pub fn new<I, T>(tests: I) -> Result<Self, SpaceError>
    where
        I: IntoIterator<Item = T>,
        T: IntoIterator<Item = Outcome>,
    {
        let raw: Vec<BTreeSet<Outcome>> = tests.into_iter().map(|t| t.into_iter().collect()).collect();
        if let Some(i) = raw.iter().position(BTreeSet::is_empty) {
            return Err(SpaceError::EmptyTest(i));
        }
        let outcomes: Vec<Outcome> =
            raw.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let mut tests: Vec<Vec<usize>> =
            raw.iter().map(|t| t.iter().map(|o| outcomes.binary_search(o).unwrap()).collect()).collect();
        tests.sort();
        tests.dedup();
        Ok(TestSpace { outcomes, tests })
    }

    pub fn from_labels(tests: &[&[&str]]) -> Result<Self, SpaceError> {
        Self::new(tests.iter().map(|t| t.iter().map(|&s| Outcome::label(s))))
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn outcome(&self, i: usize) -> &Outcome {
        &self.outcomes[i]
    }

    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }

    pub fn tests(&self) -> &[Vec<usize>] {
        &self.tests
    }

    pub fn test_count(&self) -> usize {
        self.tests.len()
    }

    pub fn test_event(&self, t: usize) -> Event {
        self.tests[t].iter().copied().collect()
    }

    pub fn index_of(&self, o: &Outcome) -> Option<usize> {
        self.outcomes.binary_search(o).ok()
    }

    /// Indices of the given outcomes. This does not check that they form an
    /// event.
    pub fn event<'a>(&self, outcomes: impl IntoIterator<Item = &'a Outcome>) -> Result<Event, SpaceError> {
        outcomes
            .into_iter()
            .map(|o| self.index_of(o).ok_or_else(|| SpaceError::UnknownOutcome(o.clone())))
            .collect()
    }

    pub fn event_from_labels(&self, labels: &[&str]) -> Result<Event, SpaceError> {
        let outcomes: Vec<Outcome> = labels.iter().map(|&s| Outcome::label(s)).collect();
        self.event(&outcomes)
    }

    pub fn labels(&self, ev: &Event) -> Vec<Outcome> {
        ev.iter().map(|&i| self.outcomes[i].clone()).collect()
    }

    /// True iff `ev` lies inside some test.
    pub fn is_event(&self, ev: &Event) -> bool {
        ev.is_empty() || self.tests.iter().any(|t| ev.iter().all(|i| t.binary_search(i).is_ok()))
    }

    pub fn test_index(&self, ev: &Event) -> Option<usize> {
        let v: Vec<usize> = ev.iter().copied().collect();
        self.tests.binary_search(&v).ok()
    }

    pub fn is_test(&self, ev: &Event) -> bool {
        self.test_index(ev).is_some()
    }

    pub fn tests_containing(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.tests.len()).filter(move |&t| self.tests[t].binary_search(&i).is_ok())
    }

    pub(crate) fn indices_orthogonal(&self, i: usize, j: usize) -> bool {
        i != j && self.tests_containing(i).any(|t| self.tests[t].binary_search(&j).is_ok())
    }

    /// Distinct outcomes are orthogonal when some test contains both.
    pub fn are_orthogonal(&self, x: &Outcome, y: &Outcome) -> Result<bool, SpaceError> {
        if x == y {
            return Err(SpaceError::SameOutcome(x.clone()));
        }
        let i = self.index_of(x).ok_or_else(|| SpaceError::UnknownOutcome(x.clone()))?;
        let j = self.index_of(y).ok_or_else(|| SpaceError::UnknownOutcome(y.clone()))?;
        Ok(self.indices_orthogonal(i, j))
    }

    /// An event `c` disjoint from both `a` and `b` such that `a ∪ c` and
    /// `b ∪ c` are tests, if one exists.
    pub fn common_complement(&self, a: &Event, b: &Event) -> Option<Event> {
        self.tests
            .iter()
            .filter(|t| a.iter().all(|i| t.binary_search(i).is_ok()))
            .map(|t| t.iter().copied().filter(|i| !a.contains(i)).collect::<Event>())
            .find(|c| c.is_disjoint(b) && self.is_test(&b.union(c).copied().collect()))
    }

    /// Perspectivity: `a` and `b` share a common complement.
    pub fn are_perspective(&self, a: &Event, b: &Event) -> Result<bool, SpaceError> {
        for ev in [a, b] {
            if !self.is_event(ev) {
                return Err(SpaceError::NotAnEvent(self.labels(ev)));
            }
        }
        Ok(self.common_complement(a, b).is_some())
    }

    /// Every perspective pair `(E \ c, F \ c)` for tests `E, F` and
    /// `c ⊆ E ∩ F`. Each perspective pair of events arises this way.
    pub fn perspective_pairs(&self) -> Vec<(Event, Event)> {
        let mut pairs = BTreeSet::new();
        for e in &self.tests {
            for f in &self.tests {
                let common: Vec<usize> = e.iter().copied().filter(|i| f.binary_search(i).is_ok()).collect();
                for c in subsets(&common) {
                    let a: Event = e.iter().copied().filter(|i| !c.contains(i)).collect();
                    let b: Event = f.iter().copied().filter(|i| !c.contains(i)).collect();
                    pairs.insert((a, b));
                }
            }
        }
        pairs.into_iter().collect()
    }

    /// All events, sorted and without repetition.
    pub fn events(&self) -> Vec<Event> {
        let all: BTreeSet<Event> = self.tests.iter().flat_map(|t| subsets(t)).collect();
        all.into_iter().collect()
    }

    pub fn is_irredundant(&self) -> bool {
        self.tests.iter().enumerate().all(|(i, s)| {
            self.tests
                .iter()
                .enumerate()
                .all(|(j, t)| i == j || s.len() >= t.len() || !s.iter().all(|x| t.binary_search(x).is_ok()))
        })
    }

    /// Distinct tests share no outcomes.
    pub fn is_semiclassical(&self) -> bool {
        self.outcomes.iter().enumerate().all(|(i, _)| self.tests_containing(i).count() <= 1)
    }

    pub fn single_outcome_tests(&self) -> Vec<usize> {
        (0..self.tests.len()).filter(|&t| self.tests[t].len() == 1).collect()
    }

    pub fn count_single_outcome_tests(&self) -> usize {
        self.single_outcome_tests().len()
    }
}

/// All subsets of `items`.
pub fn subsets(items: &[usize]) -> Vec<Event> {
    (0u64..1 << items.len())
        .map(|mask| items.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &i)| i).collect())
        .collect()
}
