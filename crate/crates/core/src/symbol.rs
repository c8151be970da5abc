//! Interned cell symbols shared by every puzzle alphabet.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// All tokens any registered puzzle can place in a cell: digits for numeric
/// puzzles, `s`/`e` for selection puzzles, `w`/`b` for Binairo circles,
/// `tr`/`tt` for Trees-and-Tents. Ordering follows the table, so digit
/// symbols sort numerically and candidate sets print in alphabet order.
const TABLE: [&str; 15] = [
    "1", "2", "3", "4", "5", "6", "7", "8", "9", "s", "e", "w", "b", "tr", "tt",
];

/// A symbol from the global table. Copy-cheap; compares by table index.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(u8);

pub const SYM_S: Symbol = Symbol(9);
pub const SYM_E: Symbol = Symbol(10);
pub const SYM_W: Symbol = Symbol(11);
pub const SYM_B: Symbol = Symbol(12);
pub const SYM_TR: Symbol = Symbol(13);
pub const SYM_TT: Symbol = Symbol(14);

impl Symbol {
    /// Looks up a token; `None` when the token is not in the table.
    pub fn parse(token: &str) -> Option<Symbol> {
        TABLE.iter().position(|t| *t == token).map(|i| Symbol(i as u8))
    }

    /// The symbol for digit `d` (1..=9).
    pub fn digit(d: u32) -> Symbol {
        assert!((1..=9).contains(&d), "digit symbol out of range: {d}");
        Symbol((d - 1) as u8)
    }

    pub fn as_str(self) -> &'static str {
        TABLE[self.0 as usize]
    }

    /// Numeric value for digit symbols, `None` for token symbols.
    pub fn as_digit(self) -> Option<u32> {
        (self.0 < 9).then(|| u32::from(self.0) + 1)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({})", self.as_str())
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        Symbol::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown symbol {s:?}")))
    }
}

/// The digit alphabet 1..=n.
pub fn digits(n: u32) -> Vec<Symbol> {
    (1..=n).map(Symbol::digit).collect()
}
