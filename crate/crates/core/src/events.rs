//! Event enumeration and the event/subset correspondence.

use crate::error::{Error, Result};
use crate::model::{check_n_vars, full_mask, Event, SubsetSpec, DEFAULT_MAX_N, MAX_VARS};

/// The event numbered `nu` for `n_vars` variables.
pub fn event_from_number(n_vars: usize, nu: u64) -> Result<Event> {
    Event::new(n_vars, nu)
}

/// All `2^N` events in increasing ν order, subject to [`DEFAULT_MAX_N`].
pub fn enumerate_events(n_vars: usize) -> Result<Vec<Event>> {
    enumerate_events_capped(n_vars, DEFAULT_MAX_N)
}

pub fn enumerate_events_capped(n_vars: usize, cap: usize) -> Result<Vec<Event>> {
    check_cap(n_vars, cap)?;
    Ok(iter_events(n_vars)?.collect())
}

pub(crate) fn check_cap(n_vars: usize, cap: usize) -> Result<()> {
    check_n_vars(n_vars)?;
    let cap = cap.min(MAX_VARS);
    if n_vars > cap {
        return Err(Error::Capacity { n_vars, cap });
    }
    Ok(())
}

/// Lazily yields every event in ν order without a materialization cap.
pub fn iter_events(n_vars: usize) -> Result<EventIter> {
    EventIter::range(n_vars, 0, u64::MAX)
}

#[derive(Clone, Debug)]
pub struct EventIter {
    n_vars: usize,
    next: Option<u64>,
    end: u64,
}

impl EventIter {
    /// Events numbered `start..=end` (clamped to the valid range).
    pub fn range(n_vars: usize, start: u64, end: u64) -> Result<Self> {
        check_n_vars(n_vars)?;
        let end = end.min(full_mask(n_vars));
        Ok(EventIter {
            n_vars,
            next: (start <= end).then_some(start),
            end,
        })
    }
}

impl Iterator for EventIter {
    type Item = Event;

    fn next(&mut self) -> Option<Event> {
        let nu = self.next?;
        self.next = (nu < self.end).then(|| nu + 1);
        Some(Event::from_parts(self.n_vars, nu))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        match self.next {
            None => (0, Some(0)),
            Some(nu) => match usize::try_from(self.end - nu) {
                Ok(rem) if rem < usize::MAX => (rem + 1, Some(rem + 1)),
                _ => (usize::MAX, None),
            },
        }
    }
}

/// `E_0`, every variable in state 0.
pub fn all_zeros(n_vars: usize) -> Result<Event> {
    Event::new(n_vars, 0)
}

/// `E_{2^N - 1}`, every variable in state 1.
pub fn all_ones(n_vars: usize) -> Result<Event> {
    check_n_vars(n_vars)?;
    Event::new(n_vars, full_mask(n_vars))
}

/// Zero-free componentwise product of `target` with `(x1..xN)`: the subset of
/// variables that are 1 in `target`. Its number equals the event number.
pub fn subset_from_event(target: Event) -> SubsetSpec {
    SubsetSpec::from_indicator(target)
}

/// The event with only `x_var` set, numbered `2^(N - var)`.
pub fn event_for_single_variable(n_vars: usize, var: usize) -> Result<Event> {
    check_n_vars(n_vars)?;
    if !(1..=n_vars).contains(&var) {
        return Err(Error::domain(format!(
            "variable index {var} is out of range 1..={n_vars}"
        )));
    }
    Event::new(n_vars, 1u64 << (n_vars - var))
}

/// Every `(reference, target)` pair that differs exactly by the subset's
/// members switching 0 to 1, with non-members held equal. There are
/// `2^(N - |S|)` pairs, ordered by reference number, so `E_0` comes first.
pub fn reference_target_pairs(subset: SubsetSpec) -> Result<Vec<(Event, Event)>> {
    Ok(iter_reference_target_pairs(subset)?.collect())
}

/// Streaming form of [`reference_target_pairs`].
pub fn iter_reference_target_pairs(subset: SubsetSpec) -> Result<PairIter> {
    if subset.is_empty() {
        return Err(Error::domain(
            "the empty subset has no reference/target pairs",
        ));
    }
    let n = subset.n_vars();
    Ok(PairIter {
        n_vars: n,
        members: subset.number(),
        free: full_mask(n) & !subset.number(),
        next: Some(0),
    })
}

/// Ascending walk over the submasks of the non-member bits.
#[derive(Clone, Debug)]
pub struct PairIter {
    n_vars: usize,
    members: u64,
    free: u64,
    next: Option<u64>,
}

impl Iterator for PairIter {
    type Item = (Event, Event);

    fn next(&mut self) -> Option<Self::Item> {
        let r = self.next?;
        self.next = if r == self.free {
            None
        } else {
            Some(r.wrapping_sub(self.free) & self.free)
        };
        Some((
            Event::from_parts(self.n_vars, r),
            Event::from_parts(self.n_vars, r | self.members),
        ))
    }
}

/// Every pure 0→1 transition `(E_r, E_t)` with `E_r ≠ E_t`: the reference's
/// ones are a proper subset of the target's. Ordered by target, then
/// reference. There are `3^N - 2^N` of them.
pub fn pure_transitions(n_vars: usize) -> Result<impl Iterator<Item = (Event, Event)>> {
    let targets = iter_events(n_vars)?;
    Ok(targets.flat_map(move |t| {
        let tm = t.number();
        // submasks of tm in ascending order, excluding tm itself
        let mut sub = Some(0u64);
        std::iter::from_fn(move || {
            let r = sub?;
            if r == tm {
                return None;
            }
            let next = r.wrapping_sub(tm) & tm;
            sub = Some(next);
            Some((Event::from_parts(n_vars, r), t))
        })
    }))
}
