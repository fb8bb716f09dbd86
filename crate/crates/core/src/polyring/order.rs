//! Monomial orders.
//!
//! Every order is a block order: the main variables are compared first under
//! `kind` and `ranking`, then all remaining symbols under `tail` in table
//! order. Parameters therefore always rank below every main variable.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use super::monomial::Monomial;
use super::table::{table, MAX_VARS, N_MAIN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Lex,
    DegRevLex,
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderKind::Lex => "lex",
            OrderKind::DegRevLex => "degrevlex",
        })
    }
}

impl FromStr for OrderKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lex" => Ok(OrderKind::Lex),
            "degrevlex" | "grevlex" => Ok(OrderKind::DegRevLex),
            _ => Err(format!("unknown order kind `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    kind: OrderKind,
    /// Main-variable indices from highest to lowest rank.
    ranking: [u8; N_MAIN],
    tail: OrderKind,
    fast_lex: bool,
}

/// Key whose natural order is the monomial order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SortKey([u64; 8]);

const IDENTITY: [u8; N_MAIN] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15];

impl Default for MonomialOrder {
    fn default() -> Self {
        MonomialOrder::lex()
    }
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, ranking: [u8; N_MAIN], tail: OrderKind) -> Result<Self, String> {
        let mut seen = [false; N_MAIN];
        for &r in &ranking {
            let r = r as usize;
            if r >= N_MAIN || seen[r] {
                return Err("ranking must be a permutation of the main variables".into());
            }
            seen[r] = true;
        }
        let fast_lex = kind == OrderKind::Lex && tail == OrderKind::Lex && ranking == IDENTITY;
        Ok(MonomialOrder { kind, ranking, tail, fast_lex })
    }

    /// Pure lex in table order: the default.
    pub fn lex() -> Self {
        Self::new(OrderKind::Lex, IDENTITY, OrderKind::Lex).unwrap()
    }

    pub fn degrevlex() -> Self {
        Self::new(OrderKind::DegRevLex, IDENTITY, OrderKind::DegRevLex).unwrap()
    }

    /// Lex on main variables, graded reverse lex on everything else.
    pub fn with_tail(&self, tail: OrderKind) -> Self {
        Self::new(self.kind, self.ranking, tail).unwrap()
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn tail(&self) -> OrderKind {
        self.tail
    }

    pub fn ranking(&self) -> &[u8; N_MAIN] {
        &self.ranking
    }

    pub fn has_default_ranking(&self) -> bool {
        self.ranking == IDENTITY
    }

    pub fn is_fast_lex(&self) -> bool {
        self.fast_lex
    }

    /// Compact name: `lex`, `degrevlex`, or `main/tail` when they differ.
    pub fn name(&self) -> String {
        if self.kind == self.tail {
            self.kind.to_string()
        } else {
            format!("{}/{}", self.kind, self.tail)
        }
    }

    pub fn from_name(name: &str, ranking: Option<&[String]>) -> Result<Self, String> {
        let (k, t) = match name.split_once('/') {
            Some((a, b)) => (a.parse()?, b.parse()?),
            None => {
                let k: OrderKind = name.parse()?;
                (k, k)
            }
        };
        let mut r = IDENTITY;
        if let Some(names) = ranking {
            if names.len() != N_MAIN {
                return Err("ranking must list all 16 main variables".into());
            }
            for (slot, n) in names.iter().enumerate() {
                let i = table().lookup(n).ok_or_else(|| format!("unknown symbol `{n}` in ranking"))?;
                if i >= N_MAIN {
                    return Err(format!("`{n}` is not a main variable"));
                }
                r[slot] = i as u8;
            }
        }
        Self::new(k, r, t)
    }

    pub fn ranking_names(&self) -> Option<Vec<String>> {
        if self.has_default_ranking() {
            None
        } else {
            Some(self.ranking.iter().map(|&i| table().name(i as usize).to_string()).collect())
        }
    }

    #[inline]
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        if self.fast_lex {
            return a.cmp(b);
        }
        self.cmp_main(a, b).then_with(|| self.cmp_tail(a, b))
    }

    /// Comparison on the main-variable block only.
    pub fn cmp_main(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self.kind {
            OrderKind::Lex => {
                if self.ranking == IDENTITY {
                    a.main_key().cmp(&b.main_key())
                } else {
                    for &i in &self.ranking {
                        let c = a.exp(i as usize).cmp(&b.exp(i as usize));
                        if c != Ordering::Equal {
                            return c;
                        }
                    }
                    Ordering::Equal
                }
            }
            OrderKind::DegRevLex => {
                let c = a.main_degree().cmp(&b.main_degree());
                if c != Ordering::Equal {
                    return c;
                }
                for &i in self.ranking.iter().rev() {
                    let c = a.exp(i as usize).cmp(&b.exp(i as usize));
                    if c != Ordering::Equal {
                        return c.reverse();
                    }
                }
                Ordering::Equal
            }
        }
    }

    fn cmp_tail(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let n = table().len();
        match self.tail {
            OrderKind::Lex => a.words()[2..].cmp(&b.words()[2..]),
            OrderKind::DegRevLex => {
                let da = a.degree() - a.main_degree();
                let db = b.degree() - b.main_degree();
                let c = da.cmp(&db);
                if c != Ordering::Equal {
                    return c;
                }
                for i in (N_MAIN..n).rev() {
                    let c = a.exp(i).cmp(&b.exp(i));
                    if c != Ordering::Equal {
                        return c.reverse();
                    }
                }
                Ordering::Equal
            }
        }
    }

    /// A key whose natural order agrees with `cmp`.
    pub fn sort_key(&self, m: &Monomial) -> SortKey {
        if self.fast_lex {
            let w = m.words();
            return SortKey([w[0], w[1], w[2], w[3], w[4], w[5], w[6], 0]);
        }
        let mut bytes = [0u8; 64];
        let mut pos = 0;
        let mut push = |b: u8| {
            bytes[pos] = b;
            pos += 1;
        };
        match self.kind {
            OrderKind::Lex => {
                for &i in &self.ranking {
                    push(m.exp(i as usize) as u8);
                }
            }
            OrderKind::DegRevLex => {
                let d = m.main_degree();
                push((d >> 8) as u8);
                push(d as u8);
                for &i in self.ranking.iter().rev() {
                    push(127 - m.exp(i as usize) as u8);
                }
            }
        }
        let n = table().len();
        match self.tail {
            OrderKind::Lex => {
                for i in N_MAIN..n {
                    push(m.exp(i) as u8);
                }
            }
            OrderKind::DegRevLex => {
                let d = m.degree() - m.main_degree();
                push((d >> 8) as u8);
                push(d as u8);
                for i in (N_MAIN..n).rev() {
                    push(127 - m.exp(i) as u8);
                }
            }
        }
        debug_assert!(pos <= 64 && n <= MAX_VARS);
        let mut k = [0u64; 8];
        for (j, chunk) in bytes.chunks(8).enumerate() {
            k[j] = u64::from_be_bytes(chunk.try_into().unwrap());
        }
        SortKey(k)
    }
}

impl fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}
