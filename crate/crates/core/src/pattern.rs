//! Point patterns: time-ordered events on an observation window `[0, T)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single event, optionally carrying a non-negative mark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub mark: Option<f64>,
}

impl Event {
    pub fn new(time: f64) -> Self {
        Event { time, mark: None }
    }

    pub fn marked(time: f64, mark: f64) -> Self {
        Event {
            time,
            mark: Some(mark),
        }
    }
}

/// The observation interval `[0, t_end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationWindow {
    t_end: f64,
}

impl ObservationWindow {
    pub fn new(t_end: f64) -> Result<Self> {
        if !t_end.is_finite() || t_end <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "window end must be finite and positive, got {t_end}"
            )));
        }
        Ok(ObservationWindow { t_end })
    }

    pub fn t_start(&self) -> f64 {
        0.0
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn contains(&self, t: f64) -> bool {
        (0.0..self.t_end).contains(&t)
    }
}

/// A validated simple point pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    events: Vec<Event>,
    window: ObservationWindow,
    marked: bool,
}

impl PointPattern {
    /// Validates raw events: strictly increasing times inside the window,
    /// consistent marking, finite non-negative marks.
    pub fn new(events: Vec<Event>, window: ObservationWindow) -> Result<Self> {
        let marked = events.first().is_some_and(|e| e.mark.is_some());
        let mut previous: Option<f64> = None;
        for event in &events {
            if !event.time.is_finite() {
                return Err(Error::NonFiniteValue(format!("event time {}", event.time)));
            }
            if event.mark.is_some() != marked {
                return Err(Error::MixedMarks);
            }
            if let Some(mark) = event.mark {
                if !mark.is_finite() || mark < 0.0 {
                    return Err(Error::NonFiniteValue(format!("mark {mark}")));
                }
            }
            if !window.contains(event.time) {
                return Err(Error::OutOfWindow {
                    time: event.time,
                    t_end: window.t_end(),
                });
            }
            if let Some(prev) = previous {
                if event.time == prev {
                    return Err(Error::DuplicateTime { time: event.time });
                }
                if event.time < prev {
                    return Err(Error::Unsorted {
                        previous: prev,
                        time: event.time,
                    });
                }
            }
            previous = Some(event.time);
        }
        Ok(PointPattern {
            events,
            window,
            marked,
        })
    }

    /// Convenience constructor for `(time, optional mark)` pairs.
    pub fn from_raw(raw: &[(f64, Option<f64>)], t_end: f64) -> Result<Self> {
        let events = raw
            .iter()
            .map(|&(time, mark)| Event { time, mark })
            .collect();
        PointPattern::new(events, ObservationWindow::new(t_end)?)
    }

    pub fn from_times(times: &[f64], t_end: f64) -> Result<Self> {
        let events = times.iter().map(|&t| Event::new(t)).collect();
        PointPattern::new(events, ObservationWindow::new(t_end)?)
    }

    pub fn empty(window: ObservationWindow) -> Self {
        PointPattern {
            events: Vec::new(),
            window,
            marked: false,
        }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.events.iter().map(|e| e.time)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn window(&self) -> ObservationWindow {
        self.window
    }

    pub fn t_end(&self) -> f64 {
        self.window.t_end()
    }

    /// Whether events carry marks. An empty pattern counts as unmarked
    /// unless it was built as marked output of a marked model.
    pub fn is_marked(&self) -> bool {
        self.marked
    }

    /// Declares the marking of the pattern. Needed for empty patterns of
    /// marked models, which cannot infer it from their events.
    pub fn with_marking(mut self, marked: bool) -> Result<Self> {
        if !self.events.is_empty() && self.marked != marked {
            return Err(Error::MixedMarks);
        }
        self.marked = marked;
        Ok(self)
    }

    /// Events strictly before `t`.
    pub fn history_before(&self, t: f64) -> History<'_> {
        let k = self.events.partition_point(|e| e.time < t);
        History::new(&self.events[..k])
    }

    /// Gaps between consecutive events (not including the first event's
    /// distance from 0).
    pub fn interevent_times(&self) -> Vec<f64> {
        self.events
            .windows(2)
            .map(|w| w[1].time - w[0].time)
            .collect()
    }
}

/// Read-only view of past events.
///
/// Intensity and compensator evaluations at time `t` only use the events
/// with time `< t`, so a view may safely be longer than needed.
#[derive(Debug, Clone, Copy)]
pub struct History<'a> {
    events: &'a [Event],
}

impl<'a> History<'a> {
    pub fn new(events: &'a [Event]) -> Self {
        History { events }
    }

    pub fn empty() -> History<'static> {
        History { events: &[] }
    }

    pub fn events(&self) -> &'a [Event] {
        self.events
    }

    /// Events strictly before `t`.
    pub fn before(&self, t: f64) -> &'a [Event] {
        let k = self.events.partition_point(|e| e.time < t);
        &self.events[..k]
    }

    /// Events at or before `t`.
    pub fn up_to(&self, t: f64) -> &'a [Event] {
        let k = self.events.partition_point(|e| e.time <= t);
        &self.events[..k]
    }
}

impl<'a> From<&'a [Event]> for History<'a> {
    fn from(events: &'a [Event]) -> Self {
        History::new(events)
    }
}

impl<'a> From<&'a PointPattern> for History<'a> {
    fn from(pattern: &'a PointPattern) -> Self {
        History::new(pattern.events())
    }
}
