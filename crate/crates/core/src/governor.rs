//! Lexicographic task selection from pairwise per-law preference annotations.
//!
//! Candidate tasks are compared law by law: the first law at which a pair is
//! not incomparable decides it, so an earlier law always overrides later
//! ones. Annotations are arbitrary pairwise data — they are not required to
//! be transitive, and the selector stays total even on preference cycles.

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::fmt;
use thiserror::Error;

/// Preference between the two tasks of an (unordered) pair under one law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairPreference {
    /// The lower-indexed task of the pair is preferred.
    FirstPreferred,
    /// The higher-indexed task of the pair is preferred.
    SecondPreferred,
    /// The tasks are equally good or bad under this law.
    Incomparable,
}

/// Pairwise preference annotations for `n_tasks` tasks under `n_laws`
/// prioritised laws. Every unordered task pair has an entry for every law;
/// unset entries are incomparable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawAnnotationSet {
    n_tasks: usize,
    n_laws: usize,
    /// Indexed `law * pair_count + pair`, pairs in lexicographic order
    /// (0,1), (0,2), …, (1,2), … over task indices.
    cells: Vec<PairPreference>,
}

impl LawAnnotationSet {
    pub fn new(n_tasks: usize, n_laws: usize) -> Self {
        LawAnnotationSet {
            n_tasks,
            n_laws,
            cells: vec![PairPreference::Incomparable; n_laws * pair_count(n_tasks)],
        }
    }

    pub fn n_tasks(&self) -> usize {
        self.n_tasks
    }

    pub fn n_laws(&self) -> usize {
        self.n_laws
    }

    fn check_pair(&self, law: usize, a: usize, b: usize) -> Result<(), GovernorError> {
        if law >= self.n_laws {
            return Err(GovernorError::LawOutOfRange {
                law,
                n_laws: self.n_laws,
            });
        }
        for task in [a, b] {
            if task >= self.n_tasks {
                return Err(GovernorError::TaskOutOfRange {
                    task,
                    n_tasks: self.n_tasks,
                });
            }
        }
        if a == b {
            return Err(GovernorError::SelfPair { task: a });
        }
        Ok(())
    }

    /// Sets the preference between `a` and `b` under `law` (all 0-based).
    /// The pair is stored under its canonical (low, high) key, so
    /// `set(l, 2, 0, FirstPreferred)` records task 2 as preferred.
    pub fn set(
        &mut self,
        law: usize,
        a: usize,
        b: usize,
        preference: PairPreference,
    ) -> Result<(), GovernorError> {
        self.check_pair(law, a, b)?;
        let (cell, flip) = self.cell_index(law, a, b);
        self.cells[cell] = if flip { flip_pref(preference) } else { preference };
        Ok(())
    }

    /// Preference between `a` and `b` under `law`, oriented so that
    /// `FirstPreferred` means `a` is preferred.
    pub fn preference(&self, law: usize, a: usize, b: usize) -> Result<PairPreference, GovernorError> {
        self.check_pair(law, a, b)?;
        let (cell, flip) = self.cell_index(law, a, b);
        let pref = self.cells[cell];
        Ok(if flip { flip_pref(pref) } else { pref })
    }

    fn cell_index(&self, law: usize, a: usize, b: usize) -> (usize, bool) {
        let (low, high, flip) = if a < b { (a, b, false) } else { (b, a, true) };
        (law * pair_count(self.n_tasks) + pair_index(self.n_tasks, low, high), flip)
    }

    /// Mirrors every entry: first-preferred becomes second-preferred and
    /// vice versa.
    pub fn flipped(&self) -> Self {
        LawAnnotationSet {
            n_tasks: self.n_tasks,
            n_laws: self.n_laws,
            cells: self.cells.iter().map(|p| flip_pref(*p)).collect(),
        }
    }

    /// Decodes the annotation set at `index` in the canonical enumeration:
    /// each (law, pair) cell is a base-3 digit, cell 0 the least significant,
    /// with digits 0/1/2 meaning first-preferred/second-preferred/incomparable.
    pub fn from_index(n_tasks: usize, n_laws: usize, index: u64) -> Self {
        let mut set = LawAnnotationSet::new(n_tasks, n_laws);
        let mut rest = index;
        for cell in set.cells.iter_mut() {
            *cell = match rest % 3 {
                0 => PairPreference::FirstPreferred,
                1 => PairPreference::SecondPreferred,
                _ => PairPreference::Incomparable,
            };
            rest /= 3;
        }
        set
    }

    /// Canonical enumeration index of this annotation set.
    pub fn to_index(&self) -> u64 {
        let mut index = 0u64;
        for cell in self.cells.iter().rev() {
            let digit = match cell {
                PairPreference::FirstPreferred => 0,
                PairPreference::SecondPreferred => 1,
                PairPreference::Incomparable => 2,
            };
            index = index * 3 + digit;
        }
        index
    }

    /// Entries that are not incomparable, as (law, low task, high task,
    /// preference) tuples in cell order.
    pub fn explicit_entries(&self) -> Vec<(usize, usize, usize, PairPreference)> {
        let mut entries = Vec::new();
        for law in 0..self.n_laws {
            for (pair, (low, high)) in pairs(self.n_tasks).enumerate() {
                let pref = self.cells[law * pair_count(self.n_tasks) + pair];
                if pref != PairPreference::Incomparable {
                    entries.push((law, low, high, pref));
                }
            }
        }
        entries
    }
}

impl Serialize for LawAnnotationSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            law: usize,
            preferred: usize,
            over: usize,
        }
        let entries = self.explicit_entries();
        let mut seq = serializer.serialize_seq(Some(entries.len()))?;
        for (law, low, high, pref) in entries {
            let (preferred, over) = match pref {
                PairPreference::FirstPreferred => (low, high),
                _ => (high, low),
            };
            // 1-based on the wire, matching the surface syntax
            seq.serialize_element(&Entry {
                law: law + 1,
                preferred: preferred + 1,
                over: over + 1,
            })?;
        }
        seq.end()
    }
}

fn flip_pref(p: PairPreference) -> PairPreference {
    match p {
        PairPreference::FirstPreferred => PairPreference::SecondPreferred,
        PairPreference::SecondPreferred => PairPreference::FirstPreferred,
        PairPreference::Incomparable => PairPreference::Incomparable,
    }
}

fn pair_count(n_tasks: usize) -> usize {
    n_tasks * n_tasks.saturating_sub(1) / 2
}

fn pair_index(n_tasks: usize, low: usize, high: usize) -> usize {
    // position of (low, high) in lexicographic pair order
    low * (2 * n_tasks - low - 1) / 2 + (high - low - 1)
}

fn pairs(n_tasks: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n_tasks).flat_map(move |low| ((low + 1)..n_tasks).map(move |high| (low, high)))
}

/// Outcome of a lexicographic pair comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskOrdering {
    FirstWins,
    SecondWins,
    Equal,
}

/// Compares two tasks by scanning the laws in priority order: the first law
/// at which the pair is not incomparable decides; pairs incomparable under
/// every law are equal.
pub fn lex_compare(
    annotations: &LawAnnotationSet,
    t1: usize,
    t2: usize,
) -> Result<TaskOrdering, GovernorError> {
    for task in [t1, t2] {
        if task >= annotations.n_tasks() {
            return Err(GovernorError::TaskOutOfRange {
                task,
                n_tasks: annotations.n_tasks(),
            });
        }
    }
    if t1 == t2 {
        return Ok(TaskOrdering::Equal);
    }
    for law in 0..annotations.n_laws() {
        match annotations.preference(law, t1, t2)? {
            PairPreference::FirstPreferred => return Ok(TaskOrdering::FirstWins),
            PairPreference::SecondPreferred => return Ok(TaskOrdering::SecondWins),
            PairPreference::Incomparable => {}
        }
    }
    Ok(TaskOrdering::Equal)
}

/// Why a task was not selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum TaskRejection {
    /// Some other task beats it; `law` is the lowest-priority-number law at
    /// which that happens (0-based).
    BeatenAtLaw { law: usize },
    /// No task beats it, but an undominated task with a lower index exists.
    TieBreak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RejectedTask {
    pub task: usize,
    pub rejection: TaskRejection,
}

/// A selected task with the dominance trace over all rejected tasks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaskSelection {
    pub selected: usize,
    pub trace: Vec<RejectedTask>,
    /// True when no undominated task existed (a preference cycle); the
    /// selection then falls back to the lowest-indexed task among those
    /// beaten the fewest times.
    pub cycle: bool,
}

/// Selects a task no other task beats under [`lex_compare`], breaking ties by
/// the lowest index. When every task is beaten (a preference cycle) the
/// lowest-indexed task with the fewest defeats is selected and the trace is
/// flagged. Selection is total for one or more tasks.
pub fn select_task(annotations: &LawAnnotationSet) -> Result<TaskSelection, GovernorError> {
    let n = annotations.n_tasks();
    if n == 0 {
        return Err(GovernorError::NoTasks);
    }

    let mut defeats = vec![0usize; n];
    let mut lowest_losing_law = vec![usize::MAX; n];
    for (a, b) in pairs(n) {
        let mut law_decided = None;
        for law in 0..annotations.n_laws() {
            if annotations.preference(law, a, b)? != PairPreference::Incomparable {
                law_decided = Some(law);
                break;
            }
        }
        let Some(law) = law_decided else { continue };
        let loser = match annotations.preference(law, a, b)? {
            PairPreference::FirstPreferred => b,
            PairPreference::SecondPreferred => a,
            PairPreference::Incomparable => unreachable!(),
        };
        defeats[loser] += 1;
        lowest_losing_law[loser] = lowest_losing_law[loser].min(law);
    }

    let undominated = (0..n).find(|&t| defeats[t] == 0);
    let (selected, cycle) = match undominated {
        Some(t) => (t, false),
        None => {
            let best = (0..n).min_by_key(|&t| (defeats[t], t)).unwrap();
            (best, true)
        }
    };

    let trace = (0..n)
        .filter(|&t| t != selected)
        .map(|t| RejectedTask {
            task: t,
            rejection: if defeats[t] > 0 {
                TaskRejection::BeatenAtLaw {
                    law: lowest_losing_law[t],
                }
            } else {
                TaskRejection::TieBreak
            },
        })
        .collect();

    Ok(TaskSelection {
        selected,
        trace,
        cycle,
    })
}

/// Iterator over every annotation set for the given sizes, in canonical
/// order (see [`LawAnnotationSet::from_index`]).
pub struct AnnotationEnumeration {
    n_tasks: usize,
    n_laws: usize,
    next: u64,
    count: u64,
}

impl AnnotationEnumeration {
    /// Total number of annotation sets: 3^(pairs × laws).
    pub fn total(&self) -> u64 {
        self.count
    }
}

impl Iterator for AnnotationEnumeration {
    type Item = LawAnnotationSet;

    fn next(&mut self) -> Option<LawAnnotationSet> {
        if self.next >= self.count {
            return None;
        }
        let set = LawAnnotationSet::from_index(self.n_tasks, self.n_laws, self.next);
        self.next += 1;
        Some(set)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = (self.count - self.next) as usize;
        (rest, Some(rest))
    }
}

/// Enumerates all `3^(pairs × laws)` annotation sets for `n_tasks ≥ 2`.
pub fn enumerate_annotations(
    n_tasks: usize,
    n_laws: usize,
) -> Result<AnnotationEnumeration, GovernorError> {
    if n_tasks < 2 {
        return Err(GovernorError::TooFewTasks { n_tasks });
    }
    let cells = (pair_count(n_tasks) * n_laws) as u32;
    let count = 3u64
        .checked_pow(cells)
        .ok_or(GovernorError::SpaceTooLarge { cells: cells as usize })?;
    Ok(AnnotationEnumeration {
        n_tasks,
        n_laws,
        next: 0,
        count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GovernorError {
    #[error("task index {task} out of range for {n_tasks} tasks")]
    TaskOutOfRange { task: usize, n_tasks: usize },
    #[error("law index {law} out of range for {n_laws} laws")]
    LawOutOfRange { law: usize, n_laws: usize },
    #[error("task {task} cannot be paired with itself")]
    SelfPair { task: usize },
    #[error("annotation enumeration needs at least two tasks, got {n_tasks}")]
    TooFewTasks { n_tasks: usize },
    #[error("no tasks to select from")]
    NoTasks,
    #[error("annotation space with {cells} cells is too large to enumerate")]
    SpaceTooLarge { cells: usize },
}

impl fmt::Display for PairPreference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairPreference::FirstPreferred => write!(f, "first preferred"),
            PairPreference::SecondPreferred => write!(f, "second preferred"),
            PairPreference::Incomparable => write!(f, "incomparable"),
        }
    }
}
