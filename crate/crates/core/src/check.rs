use crate::fock::State;
use crate::text::format_state_inline;

/// A concrete witness of a failed identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub context: String,
    pub input: State,
    pub expected: State,
    pub actual: State,
}

impl Counterexample {
    pub fn new(context: impl Into<String>, input: &State, expected: &State, actual: &State) -> Self {
        Counterexample {
            context: context.into(),
            input: input.clone(),
            expected: expected.clone(),
            actual: actual.clone(),
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "{}: input {} ; expected {} ; got {}",
            self.context,
            format_state_inline(&self.input),
            format_state_inline(&self.expected),
            format_state_inline(&self.actual)
        )
    }
}

/// Result of an exhaustive identity check over a finite window.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckOutcome {
    pub checked: usize,
    pub counterexample: Option<Counterexample>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn fail(checked: usize, cx: Counterexample) -> Self {
        CheckOutcome {
            checked,
            counterexample: Some(cx),
        }
    }

    pub fn pass(checked: usize) -> Self {
        CheckOutcome {
            checked,
            counterexample: None,
        }
    }

    /// Combines two outcomes, keeping the first counterexample.
    pub fn and(mut self, other: CheckOutcome) -> Self {
        self.checked += other.checked;
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
        self
    }
}

/// Compares `expected` and `actual`; records a counterexample on mismatch.
pub fn expect_eq(
    outcome: &mut CheckOutcome,
    context: impl FnOnce() -> String,
    input: &State,
    expected: &State,
    actual: &State,
) {
    outcome.checked += 1;
    if expected != actual && outcome.counterexample.is_none() {
        outcome.counterexample = Some(Counterexample::new(context(), input, expected, actual));
    }
}
