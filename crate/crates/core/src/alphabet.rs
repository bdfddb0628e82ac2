//! Symbol codes. `$ < A < C < G < T` map to `0..5`.

pub const DOLLAR: u8 = 0;
pub const A: u8 = 1;
pub const C: u8 = 2;
pub const G: u8 = 3;
pub const T: u8 = 4;
pub const SIGMA: usize = 5;
pub const BASES: [u8; 4] = [A, C, G, T];

/// Code of a nucleotide character, case-insensitive. Anything else is `None`.
#[inline]
pub fn encode_base(ch: u8) -> Option<u8> {
    match ch {
        b'A' | b'a' => Some(A),
        b'C' | b'c' => Some(C),
        b'G' | b'g' => Some(G),
        b'T' | b't' => Some(T),
        _ => None,
    }
}

#[inline]
pub fn decode(code: u8) -> u8 {
    b"$ACGT"[code as usize]
}

pub fn decode_str(codes: &[u8]) -> String {
    codes.iter().map(|&c| decode(c) as char).collect()
}

/// Encodes a string over `$ACGT`. Returns `None` on any other character.
pub fn encode_str(s: &str) -> Option<Vec<u8>> {
    s.bytes()
        .map(|b| if b == b'$' { Some(DOLLAR) } else { encode_base(b) })
        .collect()
}

/// A symbol of the edge column: `$`, a base, or a flagged (minus) base.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeSym {
    Dollar,
    Plain(u8),
    Flagged(u8),
}

impl EdgeSym {
    /// Code used inside the reduced wavelet sequence (non-`$` only).
    #[inline]
    pub fn reduced_code(self) -> Option<u8> {
        match self {
            EdgeSym::Dollar => None,
            EdgeSym::Plain(b) => Some(b - 1),
            EdgeSym::Flagged(b) => Some(b + 3),
        }
    }

    #[inline]
    pub fn from_reduced(code: u8) -> Self {
        if code < 4 {
            EdgeSym::Plain(code + 1)
        } else {
            EdgeSym::Flagged(code - 3)
        }
    }

    /// The base ignoring the flag; `$` maps to `DOLLAR`.
    pub fn base(self) -> u8 {
        match self {
            EdgeSym::Dollar => DOLLAR,
            EdgeSym::Plain(b) | EdgeSym::Flagged(b) => b,
        }
    }

    pub fn is_flagged(self) -> bool {
        matches!(self, EdgeSym::Flagged(_))
    }
}

impl std::fmt::Display for EdgeSym {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EdgeSym::Dollar => write!(f, "$"),
            EdgeSym::Plain(b) => write!(f, "{}", decode(*b) as char),
            EdgeSym::Flagged(b) => write!(f, "{}-", decode(*b) as char),
        }
    }
}
