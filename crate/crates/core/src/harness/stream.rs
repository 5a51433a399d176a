//! Update streams: one `+ <id>` or `- <id>` per line, `#` starts a comment.

use std::collections::HashSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::element::ElementId;
use crate::error::{Error, Result};
use crate::guessing::Update;
use crate::random_set::RandomSet;

pub type StreamEvent = Update;

pub fn parse_stream_str(text: &str) -> Result<Vec<StreamEvent>> {
    let mut events = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line: idx + 1, msg };
        let mut chars = line.chars();
        let op = chars.next();
        let rest = chars.as_str().trim();
        if !matches!(op, Some('+' | '-')) {
            return Err(parse_err(format!("expected '+' or '-', found {line:?}")));
        }
        let id: u64 = rest
            .parse()
            .map_err(|_| parse_err(format!("expected an element id, found {rest:?}")))?;
        events.push(if op == Some('+') {
            Update::Insert(ElementId(id))
        } else {
            Update::Delete(ElementId(id))
        });
    }
    validate_stream(&events)?;
    Ok(events)
}

pub fn parse_stream(path: &Path) -> Result<Vec<StreamEvent>> {
    parse_stream_str(&std::fs::read_to_string(path)?)
}

/// Every insert is of a dead element and every delete of an alive one.
pub fn validate_stream(events: &[StreamEvent]) -> Result<()> {
    let mut alive = HashSet::new();
    for (position, ev) in events.iter().enumerate() {
        match *ev {
            Update::Insert(e) if !alive.insert(e) => {
                return Err(Error::Stream {
                    position,
                    msg: format!("insert of {e}, which is already alive"),
                })
            }
            Update::Delete(e) if !alive.remove(&e) => {
                return Err(Error::Stream {
                    position,
                    msg: format!("delete of {e}, which is not alive"),
                })
            }
            _ => {}
        }
    }
    Ok(())
}

pub fn format_stream(events: &[StreamEvent]) -> String {
    events.iter().map(|e| format!("{e}\n")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    InsertOnly,
    /// Keeps the `w` most recent elements alive.
    SlidingWindow(usize),
    /// Deletes a random alive element with this probability, otherwise
    /// inserts a random dead one.
    RandomMix(f64),
}

impl std::str::FromStr for Distribution {
    type Err = Error;

    /// `insert`, `window:<w>` or `mix:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Validation(format!(
                "unknown distribution {s:?}; use insert, window:<w> or mix:<p>"
            ))
        };
        match s.split_once(':') {
            None if s == "insert" || s == "insert_only" => Ok(Distribution::InsertOnly),
            Some(("window", w)) => Ok(Distribution::SlidingWindow(w.parse().map_err(|_| bad())?)),
            Some(("mix", p)) => Ok(Distribution::RandomMix(p.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

/// A valid stream over ids `1..=n`.
pub fn generate_stream(
    n: usize,
    ops: usize,
    dist: Distribution,
    seed: u64,
) -> Result<Vec<StreamEvent>> {
    if n == 0 {
        return Err(Error::Validation("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = |i: usize| ElementId(i as u64 + 1);
    let mut events = Vec::with_capacity(ops);
    match dist {
        Distribution::InsertOnly => {
            if ops > n {
                return Err(Error::Validation(format!(
                    "{ops} inserts need more than {n} ids"
                )));
            }
            let mut order: Vec<usize> = (0..n).collect();
            for i in 0..ops {
                let j = rng.gen_range(i..n);
                order.swap(i, j);
                events.push(Update::Insert(id(order[i])));
            }
        }
        Distribution::SlidingWindow(w) => {
            if w == 0 || w > n {
                return Err(Error::Validation(format!("window {w} must lie in 1..={n}")));
            }
            let (mut oldest, mut next) = (0usize, 0usize);
            while events.len() < ops {
                if next - oldest == w {
                    events.push(Update::Delete(id(oldest % n)));
                    oldest += 1;
                } else {
                    events.push(Update::Insert(id(next % n)));
                    next += 1;
                }
            }
        }
        Distribution::RandomMix(p) => {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::Validation(format!(
                    "delete probability {p} outside [0, 1)"
                )));
            }
            let mut alive = RandomSet::new();
            let mut dead: RandomSet = (0..n).map(id).collect();
            while events.len() < ops {
                let delete = dead.is_empty() || (!alive.is_empty() && rng.gen_bool(p));
                let (from, to) = if delete {
                    (&mut alive, &mut dead)
                } else {
                    (&mut dead, &mut alive)
                };
                let e = from.sample_uniform(&mut rng).expect("nonempty");
                from.remove(e);
                to.insert(e);
                events.push(if delete {
                    Update::Delete(e)
                } else {
                    Update::Insert(e)
                });
            }
        }
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ins(i: u64) -> Update {
        Update::Insert(ElementId(i))
    }

    fn del(i: u64) -> Update {
        Update::Delete(ElementId(i))
    }

    #[test]
    fn parses_simple_stream() {
        assert_eq!(parse_stream_str("+ 3\n- 3").unwrap(), vec![ins(3), del(3)]);
        assert_eq!(
            parse_stream_str("# header\n+3   # trailing\n\n-3\n").unwrap(),
            vec![ins(3), del(3)]
        );
    }

    #[test]
    fn crlf_matches_lf() {
        assert_eq!(
            parse_stream_str("+ 1\r\n+ 2\r\n- 1\r\n").unwrap(),
            parse_stream_str("+ 1\n+ 2\n- 1\n").unwrap()
        );
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(
            parse_stream_str("- 3"),
            Err(Error::Stream { position: 0, .. })
        ));
        assert!(matches!(
            parse_stream_str("+ 1\n+ 1"),
            Err(Error::Stream { position: 1, .. })
        ));
        assert!(matches!(
            parse_stream_str("+ 1\n* 2"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_stream_str("+ x"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn sliding_window_two() {
        assert_eq!(
            generate_stream(10, 6, Distribution::SlidingWindow(2), 0).unwrap(),
            vec![ins(1), ins(2), del(1), ins(3), del(2), ins(4)]
        );
    }

    #[test]
    fn insert_only_and_determinism() {
        let s = generate_stream(5, 5, Distribution::InsertOnly, 9).unwrap();
        assert!(s.iter().all(|e| matches!(e, Update::Insert(_))));
        assert_eq!(s.len(), 5);
        let a = generate_stream(50, 400, Distribution::RandomMix(0.4), 7).unwrap();
        assert_eq!(
            a,
            generate_stream(50, 400, Distribution::RandomMix(0.4), 7).unwrap()
        );
        validate_stream(&a).unwrap();
        validate_stream(&generate_stream(4, 100, Distribution::SlidingWindow(4), 1).unwrap())
            .unwrap();
    }

    #[test]
    fn round_trip_text() {
        let s = generate_stream(20, 60, Distribution::RandomMix(0.3), 2).unwrap();
        assert_eq!(parse_stream_str(&format_stream(&s)).unwrap(), s);
    }

    #[test]
    fn distribution_names() {
        assert_eq!(
            "insert".parse::<Distribution>().unwrap(),
            Distribution::InsertOnly
        );
        assert_eq!(
            "window:3".parse::<Distribution>().unwrap(),
            Distribution::SlidingWindow(3)
        );
        assert_eq!(
            "mix:0.25".parse::<Distribution>().unwrap(),
            Distribution::RandomMix(0.25)
        );
        assert!("mix".parse::<Distribution>().is_err());
    }
}
