//! Relation polynomials re-expanded by a separate, deliberately plain
//! polynomial type that transcribes the reference construction entry by
//! entry, compared term-for-term with `build_relation`.

use std::collections::BTreeMap;
use std::sync::Mutex;

use rustc_hash::FxHashMap;
use sympcert_core::polyring::{table, Poly};
use sympcert_core::relations::{build_relation, Profile, RelationId};

/// Frozen term counts of the expanded relations under their default profiles.
const GOLDEN_TERMS: [(RelationId, usize, u32); 9] = [
    (RelationId::Rsf, 32, 2),
    (RelationId::RexcmLin, 4, 1),
    (RelationId::Rexcme2, 24, 2),
    (RelationId::Qe2excm, 220, 2),
    (RelationId::Qe2e2, 15120, 4),
    (RelationId::Rsupsing, 7712, 4),
    (RelationId::Ra, 52, 2),
    (RelationId::Rexcmbad, 72, 2),
    (RelationId::Detgtilde, 93971, 4),
];

/// Exponents packed four bits per variable in three words.
type Key = [u64; 3];

static NAMES: Mutex<Vec<String>> = Mutex::new(Vec::new());

fn slot(name: &str) -> usize {
    let mut names = NAMES.lock().unwrap();
    if let Some(i) = names.iter().position(|n| n == name) {
        return i;
    }
    names.push(name.to_string());
    assert!(names.len() <= 48, "too many oracle variables");
    names.len() - 1
}

#[derive(Clone, Default)]
struct P(FxHashMap<Key, i64>);

impl P {
    fn c(v: i64) -> P {
        let mut m = FxHashMap::default();
        if v != 0 {
            m.insert([0; 3], v);
        }
        P(m)
    }

    fn v(name: &str) -> P {
        let i = slot(name);
        let mut k = [0u64; 3];
        k[i / 16] = 1 << (4 * (i % 16));
        let mut m = FxHashMap::default();
        m.insert(k, 1);
        P(m)
    }

    fn add(&self, o: &P) -> P {
        let mut m = self.0.clone();
        for (k, c) in &o.0 {
            let e = m.entry(*k).or_insert(0);
            *e += c;
            if *e == 0 {
                m.remove(k);
            }
        }
        P(m)
    }

    fn neg(&self) -> P {
        P(self.0.iter().map(|(k, c)| (*k, -c)).collect())
    }

    fn sub(&self, o: &P) -> P {
        self.add(&o.neg())
    }

    fn mul(&self, o: &P) -> P {
        let mut m: FxHashMap<Key, i64> = FxHashMap::default();
        for (ka, ca) in &self.0 {
            for (kb, cb) in &o.0 {
                let k = [ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]];
                *m.entry(k).or_insert(0) += ca * cb;
            }
        }
        m.retain(|_, c| *c != 0);
        P(m)
    }

    /// Canonical form: sorted (name, exponent) lists to coefficients.
    fn canonical(&self) -> BTreeMap<Vec<(String, u32)>, i64> {
        let names = NAMES.lock().unwrap();
        self.0
            .iter()
            .map(|(k, c)| {
                let mut mono = Vec::new();
                for (i, name) in names.iter().enumerate() {
                    let e = ((k[i / 16] >> (4 * (i % 16))) & 0xf) as u32;
                    if e > 0 {
                        mono.push((name.clone(), e));
                    }
                }
                mono.sort();
                (mono, *c)
            })
            .collect()
    }
}

fn canonical_poly(p: &Poly) -> BTreeMap<Vec<(String, u32)>, i64> {
    p.terms()
        .iter()
        .map(|(m, c)| {
            let mut mono: Vec<(String, u32)> = m.support().into_iter().map(|(i, e)| (table().name(i).to_string(), e)).collect();
            mono.sort();
            (mono, c.to_string().parse::<i64>().expect("integer coefficient"))
        })
        .collect()
}

type M4 = Vec<Vec<P>>;

fn mat(rows: [[P; 4]; 4]) -> M4 {
    rows.into_iter().map(|r| r.into_iter().collect()).collect()
}

fn mm(a: &M4, b: &M4) -> M4 {
    (0..4)
        .map(|i| {
            (0..4)
                .map(|j| {
                    let mut acc = P::c(0);
                    for k in 0..4 {
                        if !a[i][k].0.is_empty() && !b[k][j].0.is_empty() {
                            acc = acc.add(&a[i][k].mul(&b[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn z() -> P {
    P::c(0)
}

fn one() -> P {
    P::c(1)
}

struct Built {
    p: M4,
    g: M4,
}

/// `H = M.Y; Ftilde = H.N; P = J.Ftilde.J; G = PhiS.P.Phi0`.
fn construct(generic_a0: bool, phi0: bool, phis: bool) -> Built {
    let v = P::v;
    let y = mat(std::array::from_fn(|i| std::array::from_fn(|j| v(&format!("X{}{}", i + 1, j + 1)))));
    let m = mat([
        [v("d11"), v("d12"), z(), z()],
        [v("d21"), v("d22"), z(), z()],
        [v("f11"), v("f12"), v("e11"), v("e12")],
        [v("f21"), v("f22"), v("e21"), v("e22")],
    ]);
    let (a11, a12, a21, a22) = if generic_a0 { (v("a11"), v("a12"), v("a21"), v("a22")) } else { (one(), z(), z(), one()) };
    let n = mat([
        [a11, a12, z(), z()],
        [a21, a22, z(), z()],
        [v("b11"), v("b12"), v("c11"), v("c12")],
        [v("b21"), v("b22"), v("c21"), v("c22")],
    ]);
    let phi = |on: bool, a: &str, b: &str, c: &str| {
        let (pa, pb, pc) = if on { (v(a), v(b), v(c)) } else { (one(), z(), one()) };
        mat([[one(), z(), z(), z()], [z(), one(), z(), z()], [z(), z(), pa, z()], [z(), z(), pb, pc]])
    };
    let j = mat([[one(), z(), z(), z()], [z(), z(), one(), z()], [z(), one(), z(), z()], [z(), z(), z(), one()]]);
    let ftilde = mm(&mm(&m, &y), &n);
    let p = mm(&mm(&j, &ftilde), &j);
    let g = mm(&mm(&phi(phis, "aS", "bS", "cS"), &p), &phi(phi0, "a0", "b0", "c0"));
    Built { p, g }
}

fn x2(a: &P, b: &P, c: &P, d: &P) -> P {
    a.mul(b).sub(&c.mul(d))
}

/// Laplace expansion along the first two rows.
fn det4(m: &M4) -> P {
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut acc = P::c(0);
    for &(a, b) in &pairs {
        let rest: Vec<usize> = (0..4).filter(|c| *c != a && *c != b).collect();
        let top = x2(&m[0][a], &m[1][b], &m[0][b], &m[1][a]);
        let bottom = x2(&m[2][rest[0]], &m[3][rest[1]], &m[2][rest[1]], &m[3][rest[0]]);
        let sign = if (a + b + 1) % 2 == 0 { 1 } else { -1 };
        let term = top.mul(&bottom);
        acc = if sign > 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

fn oracle(id: RelationId) -> P {
    let v = P::v;
    match id {
        RelationId::Rsf | RelationId::RexcmLin | RelationId::Rsupsing | RelationId::Ra => {
            let b = construct(false, false, false);
            let p = |i: usize, j: usize| b.p[i - 1][j - 1].clone();
            match id {
                RelationId::Rsf => p(1, 2).mul(&p(2, 4)),
                RelationId::RexcmLin => p(3, 4),
                RelationId::Rsupsing => {
                    let f1 = x2(&p(1, 1), &p(2, 2), &p(2, 1), &p(1, 2));
                    let f4 = x2(&p(3, 3), &p(4, 4), &p(3, 4), &p(4, 3));
                    let f2 = x2(&p(1, 3), &p(2, 4), &p(2, 3), &p(1, 4));
                    let f3 = x2(&p(3, 1), &p(4, 2), &p(3, 1), &p(4, 1));
                    v("d1").mul(&f1).mul(&f4).sub(&f2.mul(&f3))
                }
                _ => {
                    let x = |s: &str| v(s);
                    let lin = x("X31").mul(&x("X13")).neg().sub(&x("X41").mul(&x("X23"))).add(&x("X11").mul(&x("X33"))).add(&x("X21").mul(&x("X43")));
                    x2(&p(1, 1), &p(2, 2), &p(1, 2), &p(2, 1)).sub(&v("d1").mul(&lin))
                }
            }
        }
        RelationId::Rexcmbad => {
            let b = construct(true, false, false);
            let p = |i: usize, j: usize| b.p[i - 1][j - 1].clone();
            x2(&p(3, 1), &p(4, 2), &p(3, 2), &p(4, 1))
        }
        RelationId::Rexcme2 => {
            let b = construct(false, false, true);
            let g = |i: usize, j: usize| b.g[i - 1][j - 1].clone();
            x2(&g(3, 2), &g(4, 4), &g(4, 2), &g(3, 4))
        }
        RelationId::Qe2excm => {
            let b = construct(false, true, false);
            let g = |i: usize, j: usize| b.g[i - 1][j - 1].clone();
            x2(&g(4, 1), &g(4, 4), &g(4, 2), &g(4, 3))
        }
        RelationId::Qe2e2 => {
            let b = construct(false, true, true);
            let g = |i: usize, j: usize| b.g[i - 1][j - 1].clone();
            let first = x2(&g(3, 2), &g(2, 4), &g(1, 4), &g(4, 2)).mul(&x2(&g(1, 1), &g(2, 3), &g(1, 3), &g(2, 4)));
            let second = x2(&g(1, 2), &g(2, 4), &g(1, 4), &g(2, 2)).mul(&x2(&g(3, 1), &g(2, 3), &g(1, 3), &g(4, 1)));
            first.sub(&second)
        }
        RelationId::Detgtilde => {
            let b = construct(true, true, true);
            let g = |i: usize, j: usize| b.g[i - 1][j - 1].clone();
            let gt = mat([
                [g(1, 1), g(1, 2), g(2, 1), g(2, 2)],
                [g(1, 3), g(1, 4), g(2, 3), g(2, 4)],
                [g(3, 3), g(3, 4), g(4, 3), g(4, 4)],
                [g(3, 1), g(3, 2), g(4, 1), g(4, 2)],
            ]);
            det4(&gt)
        }
    }
}

fn x_degree(c: &BTreeMap<Vec<(String, u32)>, i64>) -> u32 {
    c.keys().map(|m| m.iter().filter(|(n, _)| n.starts_with('X')).map(|(_, e)| e).sum()).max().unwrap_or(0)
}

fn check(id: RelationId) {
    let built = build_relation(id, &Profile::default_for(id)).unwrap();
    let want = oracle(id).canonical();
    let got = canonical_poly(&built);
    assert_eq!(got.len(), want.len(), "{id}: term count");
    assert!(got == want, "{id}: polynomials differ");
    let (_, terms, deg) = GOLDEN_TERMS.iter().find(|g| g.0 == id).unwrap();
    assert_eq!(want.len(), *terms, "{id}: golden term count");
    assert_eq!(x_degree(&want), *deg, "{id}: golden X-degree");
}

#[test]
fn rsf_matches_oracle() {
    check(RelationId::Rsf);
}

#[test]
fn rexcm_lin_matches_oracle() {
    check(RelationId::RexcmLin);
}

#[test]
fn rexcme2_matches_oracle() {
    check(RelationId::Rexcme2);
}

#[test]
fn qe2excm_matches_oracle() {
    check(RelationId::Qe2excm);
}

#[test]
fn qe2e2_matches_oracle() {
    check(RelationId::Qe2e2);
}

#[test]
fn rsupsing_matches_oracle() {
    check(RelationId::Rsupsing);
}

#[test]
fn ra_matches_oracle() {
    check(RelationId::Ra);
}

#[test]
fn rexcmbad_matches_oracle() {
    check(RelationId::Rexcmbad);
}

#[test]
fn detgtilde_matches_oracle() {
    check(RelationId::Detgtilde);
}
