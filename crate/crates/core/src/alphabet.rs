//! Symbol alphabets for texts and patterns.

/// The set of byte symbols a text or pattern may use.
///
/// The default alphabet is `{A, C, G, T, N}`. `N` is an ordinary symbol with
/// no wildcard meaning: it matches only a literal `N`. Parsers fold lowercase
/// ASCII to uppercase before checking membership.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    member: [bool; 256],
    symbols: Vec<u8>,
}

impl Alphabet {
    /// Builds an alphabet from the given symbols, keeping first-seen order.
    pub fn new(symbols: impl IntoIterator<Item = u8>) -> Self {
        let mut member = [false; 256];
        let mut kept = Vec::new();
        for s in symbols {
            if !member[s as usize] {
                member[s as usize] = true;
                kept.push(s);
            }
        }
        Alphabet {
            member,
            symbols: kept,
        }
    }

    /// The `{A, C, G, T, N}` alphabet.
    pub fn dna() -> Self {
        Alphabet::new(*b"ACGTN")
    }

    #[inline]
    pub fn contains(&self, symbol: u8) -> bool {
        self.member[symbol as usize]
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::dna()
    }
}

impl std::fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Alphabet({:?})", String::from_utf8_lossy(&self.symbols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dna_membership() {
        let a = Alphabet::dna();
        assert!(a.contains(b'A') && a.contains(b'N'));
        assert!(!a.contains(b'a'));
        assert!(!a.contains(b'X'));
        assert_eq!(a.symbols(), b"ACGTN");
    }

    #[test]
    fn duplicate_symbols_kept_once() {
        let a = Alphabet::new(*b"AACCA");
        assert_eq!(a.symbols(), b"AC");
    }
}
