//! Outcome labels.
//!
//! Plain labels come from input files. Product and cover constructions build
//! structured labels on top of them, written `(x,y)` and `x@2`. The textual
//! form parses back to the same value, so derived models survive a trip
//! through a model file.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Label(String),
    /// Outcome `(x, y)` of a product test space; left part first.
    Pair(Box<Outcome>, Box<Outcome>),
    /// Outcome `x` seen inside the test with the given index (cover outcomes).
    InTest(Box<Outcome>, usize),
}

impl Outcome {
    pub fn label(s: impl Into<String>) -> Self {
        Outcome::Label(s.into())
    }

    pub fn pair(a: Outcome, b: Outcome) -> Self {
        Outcome::Pair(Box::new(a), Box::new(b))
    }

    pub fn in_test(x: Outcome, test: usize) -> Self {
        Outcome::InTest(Box::new(x), test)
    }
}

impl From<&str> for Outcome {
    fn from(s: &str) -> Self {
        Outcome::label(s)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Label(s) => f.write_str(s),
            Outcome::Pair(a, b) => write!(f, "({a},{b})"),
            Outcome::InTest(x, i) => write!(f, "{x}@{i}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("bad outcome label {input:?} at byte {position}: {reason}")]
pub struct ParseOutcomeError {
    pub input: String,
    pub position: usize,
    pub reason: &'static str,
}

pub fn is_label_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | ',' | '@')
}

struct Parser<'a> {
    input: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn fail<T>(&self, reason: &'static str) -> Result<T, ParseOutcomeError> {
        Err(ParseOutcomeError { input: self.input.to_string(), position: self.pos, reason })
    }

    fn peek(&self) -> Option<char> {
        self.input[self.pos..].chars().next()
    }

    fn outcome(&mut self) -> Result<Outcome, ParseOutcomeError> {
        let mut o = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let a = self.outcome()?;
                if self.peek() != Some(',') {
                    return self.fail("expected ','");
                }
                self.pos += 1;
                let b = self.outcome()?;
                if self.peek() != Some(')') {
                    return self.fail("expected ')'");
                }
                self.pos += 1;
                Outcome::pair(a, b)
            }
            Some(c) if is_label_char(c) => {
                let start = self.pos;
                while self.peek().is_some_and(is_label_char) {
                    self.pos += self.peek().map_or(0, char::len_utf8);
                }
                Outcome::label(&self.input[start..self.pos])
            }
            _ => return self.fail("expected a label or '('"),
        };
        while self.peek() == Some('@') {
            self.pos += 1;
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let Ok(i) = self.input[start..self.pos].parse() else {
                return self.fail("expected a test index after '@'");
            };
            o = Outcome::in_test(o, i);
        }
        Ok(o)
    }
}

impl FromStr for Outcome {
    type Err = ParseOutcomeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { input: s, pos: 0 };
        let o = p.outcome()?;
        if p.pos != s.len() {
            return p.fail("trailing characters");
        }
        Ok(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn nested_labels_parse() {
        let o: Outcome = "((x,y)@3,u)@0".parse().unwrap();
        let expected = Outcome::in_test(
            Outcome::pair(Outcome::in_test(Outcome::pair("x".into(), "y".into()), 3), "u".into()),
            0,
        );
        assert_eq!(o, expected);
    }

    #[test]
    fn malformed_labels_are_rejected() {
        for bad in ["", "(x,y", "x@", "x y", "(x)", "x)"] {
            assert!(bad.parse::<Outcome>().is_err(), "{bad:?} should fail");
        }
    }

    fn arb_outcome() -> impl Strategy<Value = Outcome> {
        let leaf = "[a-z0-9_'.-]{1,4}".prop_map(Outcome::label);
        leaf.prop_recursive(4, 16, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Outcome::pair(a, b)),
                (inner, 0usize..20).prop_map(|(a, i)| Outcome::in_test(a, i)),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_parses_back(o in arb_outcome()) {
            prop_assert_eq!(o.to_string().parse::<Outcome>().unwrap(), o);
        }
    }
}
