//! Atoms: the elements of finite sets.
//!
//! Derived objects get structured atoms so that two runs of the same
//! construction produce byte-identical sets: pullback and product elements
//! are pairs `(a,b)`, coproduct elements are tagged `i·a`, coequalizer
//! classes are named by their least member.

use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// The point of the terminal set.
    Star,
    Int(i64),
    Name(Arc<str>),
    Pair(Arc<(Atom, Atom)>),
    Tag(usize, Arc<Atom>),
}

impl Atom {
    pub fn pair(a: Atom, b: Atom) -> Atom {
        Atom::Pair(Arc::new((a, b)))
    }

    pub fn tag(i: usize, a: Atom) -> Atom {
        Atom::Tag(i, Arc::new(a))
    }

    pub fn name(s: &str) -> Atom {
        Atom::Name(Arc::from(s))
    }

    /// Components of a pair atom.
    pub fn as_pair(&self) -> Option<(&Atom, &Atom)> {
        match self {
            Atom::Pair(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }
}

impl From<i64> for Atom {
    fn from(v: i64) -> Self {
        Atom::Int(v)
    }
}

impl From<usize> for Atom {
    fn from(v: usize) -> Self {
        Atom::Int(v as i64)
    }
}

impl From<i32> for Atom {
    fn from(v: i32) -> Self {
        Atom::Int(v as i64)
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Self {
        if s == "*" {
            Atom::Star
        } else {
            Atom::name(s)
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Star => f.write_str("*"),
            Atom::Int(v) => write!(f, "{v}"),
            Atom::Name(s) => f.write_str(s),
            Atom::Pair(p) => write!(f, "({},{})", p.0, p.1),
            Atom::Tag(i, a) => write!(f, "{i}·{a}"),
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        let p = Atom::pair(Atom::from(0), Atom::Star);
        assert_eq!(p.to_string(), "(0,*)");
        assert_eq!(Atom::tag(2, p).to_string(), "2·(0,*)");
        assert_eq!(Atom::from("*"), Atom::Star);
    }

    #[test]
    fn pair_order_is_lexicographic() {
        let a = Atom::pair(0.into(), 5.into());
        let b = Atom::pair(1.into(), 0.into());
        let c = Atom::pair(1.into(), 2.into());
        assert!(a < b && b < c);
    }
}
