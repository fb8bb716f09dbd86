//! The fixed global variable table.

use std::collections::HashMap;
use std::sync::OnceLock;

/// Upper bound on table size imposed by the packed monomial layout.
pub const MAX_VARS: usize = 56;
/// Number of matrix variables `X11..X44`.
pub const N_MAIN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    /// Entries of the 4x4 matrix `Y = (X_ij)`.
    Main,
    /// Geometric parameters: isogeny blocks, Phi entries, `d1`.
    Param,
    /// Auxiliary symbols: family variables `p q r n`, the formal inverse `w`,
    /// the saturation variable `t`, and scratch symbols `x y`.
    Aux,
}

#[derive(Debug)]
pub struct VariableTable {
    names: Vec<&'static str>,
    kinds: Vec<VarKind>,
    index: HashMap<&'static str, usize>,
}

const PARAM_NAMES: [&str; 31] = [
    "a11", "a12", "a21", "a22", // A0
    "b11", "b12", "b21", "b22", // B0
    "c11", "c12", "c21", "c22", // C0
    "d11", "d12", "d21", "d22", // A_s
    "f11", "f12", "f21", "f22", // B_s
    "e11", "e12", "e21", "e22", // C_s
    "a0", "b0", "c0", "aS", "bS", "cS", "d1",
];

const AUX_NAMES: [&str; 8] = ["p", "q", "r", "n", "w", "t", "x", "y"];

const MAIN_NAMES: [&str; N_MAIN] = [
    "X11", "X12", "X13", "X14", "X21", "X22", "X23", "X24", "X31", "X32", "X33", "X34", "X41", "X42", "X43", "X44",
];

impl VariableTable {
    fn standard() -> Self {
        let mut names = Vec::new();
        let mut kinds = Vec::new();
        for n in MAIN_NAMES {
            names.push(n);
            kinds.push(VarKind::Main);
        }
        for n in PARAM_NAMES {
            names.push(n);
            kinds.push(VarKind::Param);
        }
        for n in AUX_NAMES {
            names.push(n);
            kinds.push(VarKind::Aux);
        }
        assert!(names.len() <= MAX_VARS);
        let index: HashMap<_, _> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        assert_eq!(index.len(), names.len(), "duplicate symbol in table");
        VariableTable { names, kinds, index }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &'static str {
        self.names[i]
    }

    pub fn kind(&self, i: usize) -> VarKind {
        self.kinds[i]
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn names(&self) -> &[&'static str] {
        &self.names
    }

    pub fn main_vars(&self) -> std::ops::Range<usize> {
        0..N_MAIN
    }

    pub fn param_vars(&self) -> std::ops::Range<usize> {
        N_MAIN..N_MAIN + PARAM_NAMES.len()
    }

    pub fn aux_vars(&self) -> std::ops::Range<usize> {
        N_MAIN + PARAM_NAMES.len()..self.names.len()
    }
}

/// The process-wide table. It is built once and never mutated.
pub fn table() -> &'static VariableTable {
    static TABLE: OnceLock<VariableTable> = OnceLock::new();
    TABLE.get_or_init(VariableTable::standard)
}

/// Index of a table symbol; panics on an unknown name (use for literals only).
pub fn var(name: &str) -> usize {
    table().lookup(name).unwrap_or_else(|| panic!("unknown symbol {name}"))
}

/// Index of `X_ij` for 1-based `i, j`.
pub fn x(i: usize, j: usize) -> usize {
    assert!((1..=4).contains(&i) && (1..=4).contains(&j));
    (i - 1) * 4 + (j - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let t = table();
        assert_eq!(t.name(0), "X11");
        assert_eq!(t.name(4), "X21");
        assert_eq!(t.name(15), "X44");
        assert_eq!(t.lookup("a11"), Some(16));
        assert_eq!(t.kind(var("d1")), VarKind::Param);
        assert_eq!(t.kind(var("t")), VarKind::Aux);
        assert_eq!(x(3, 4), var("X34"));
        assert_eq!(t.param_vars().len(), 31);
        assert!(t.len() <= MAX_VARS);
    }
}
