//! The symplectic ideal generators, the period-matrix pipeline and the nine
//! relation polynomials, each behind the [`Relation`] trait.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::polyring::{parse, var, Monomial, Poly, Q};
use crate::symmat::{permutation_matrix, Matrix, MatrixError, PermSpec, RatMatrix, Ring, SymMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelationError {
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("profile incompatible with {0}: {1}")]
    IncompatibleProfile(RelationId, String),
    #[error("bad profile override `{0}`")]
    BadOverride(String),
    #[error("missing value for `{0}`")]
    MissingValue(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationId {
    #[serde(rename = "RSF")]
    Rsf,
    #[serde(rename = "REXCM_LIN")]
    RexcmLin,
    #[serde(rename = "REXCME2")]
    Rexcme2,
    #[serde(rename = "QE2EXCM")]
    Qe2excm,
    #[serde(rename = "QE2E2")]
    Qe2e2,
    #[serde(rename = "RSUPSING")]
    Rsupsing,
    #[serde(rename = "RA")]
    Ra,
    #[serde(rename = "REXCMBAD")]
    Rexcmbad,
    #[serde(rename = "DETGTILDE")]
    Detgtilde,
}

impl RelationId {
    pub const ALL: [RelationId; 9] = [
        RelationId::Rsf,
        RelationId::RexcmLin,
        RelationId::Rexcme2,
        RelationId::Qe2excm,
        RelationId::Qe2e2,
        RelationId::Rsupsing,
        RelationId::Ra,
        RelationId::Rexcmbad,
        RelationId::Detgtilde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationId::Rsf => "RSF",
            RelationId::RexcmLin => "REXCM_LIN",
            RelationId::Rexcme2 => "REXCME2",
            RelationId::Qe2excm => "QE2EXCM",
            RelationId::Qe2e2 => "QE2E2",
            RelationId::Rsupsing => "RSUPSING",
            RelationId::Ra => "RA",
            RelationId::Rexcmbad => "REXCMBAD",
            RelationId::Detgtilde => "DETGTILDE",
        }
    }

    /// Whether the relation reads the G matrix (and so depends on the Phi blocks).
    pub fn uses_g(self) -> bool {
        matches!(self, RelationId::Rexcme2 | RelationId::Qe2excm | RelationId::Qe2e2 | RelationId::Detgtilde)
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationId {
    type Err = RelationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationId::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| RelationError::UnknownRelation(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    Identity,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phi {
    Trivial,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Verbatim,
    Corrected,
}

/// Row arrangement of Gtilde: `Code`, or `Text` with the last two rows swapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GtildeRows {
    Code,
    Text,
}

/// Parameter specialization used when building a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Profile {
    pub a0_block: Block,
    pub phi0: Phi,
    #[serde(rename = "phiS")]
    pub phi_s: Phi,
    pub rsupsing_mode: Mode,
    pub qe2e2_mode: Mode,
    pub gtilde_rows: GtildeRows,
}

impl Profile {
    pub fn default_for(id: RelationId) -> Profile {
        let base = Profile {
            a0_block: Block::Identity,
            phi0: Phi::Trivial,
            phi_s: Phi::Trivial,
            rsupsing_mode: Mode::Verbatim,
            qe2e2_mode: Mode::Verbatim,
            gtilde_rows: GtildeRows::Code,
        };
        match id {
            RelationId::Rexcme2 => Profile { phi_s: Phi::Generic, ..base },
            RelationId::Qe2excm => Profile { phi0: Phi::Generic, ..base },
            RelationId::Qe2e2 => Profile { phi0: Phi::Generic, phi_s: Phi::Generic, ..base },
            RelationId::Rexcmbad => Profile { a0_block: Block::Generic, ..base },
            RelationId::Detgtilde => Profile { a0_block: Block::Generic, phi0: Phi::Generic, phi_s: Phi::Generic, ..base },
            _ => base,
        }
    }

    /// Applies `key=value` overrides.
    pub fn with_overrides<S: AsRef<str>>(mut self, kvs: &[S]) -> Result<Profile, RelationError> {
        for kv in kvs {
            let kv = kv.as_ref();
            let bad = || RelationError::BadOverride(kv.to_string());
            let (k, v) = kv.split_once('=').ok_or_else(bad)?;
            let (k, v) = (k.trim(), v.trim());
            let val = serde_json::Value::String(v.to_ascii_lowercase());
            match k {
                "a0_block" => self.a0_block = serde_json::from_value(val).map_err(|_| bad())?,
                "phi0" => self.phi0 = serde_json::from_value(val).map_err(|_| bad())?,
                "phiS" | "phis" | "phi_s" => self.phi_s = serde_json::from_value(val).map_err(|_| bad())?,
                "rsupsing_mode" | "mode" => self.rsupsing_mode = serde_json::from_value(val).map_err(|_| bad())?,
                "qe2e2_mode" => self.qe2e2_mode = serde_json::from_value(val).map_err(|_| bad())?,
                "gtilde_rows" => self.gtilde_rows = serde_json::from_value(val).map_err(|_| bad())?,
                _ => return Err(bad()),
            }
        }
        Ok(self)
    }

    /// Parameter symbols the pipeline reads under this profile.
    pub fn parameter_symbols(&self) -> Vec<&'static str> {
        let mut v: Vec<&'static str> = Vec::new();
        if self.a0_block == Block::Generic {
            v.extend(["a11", "a12", "a21", "a22"]);
        }
        v.extend(["b11", "b12", "b21", "b22", "c11", "c12", "c21", "c22"]);
        v.extend(["d11", "d12", "d21", "d22", "f11", "f12", "f21", "f22", "e11", "e12", "e21", "e22"]);
        if self.phi0 == Phi::Generic {
            v.extend(["a0", "b0", "c0"]);
        }
        if self.phi_s == Phi::Generic {
            v.extend(["aS", "bS", "cS"]);
        }
        v.push("d1");
        v
    }
}

/// Every matrix of the construction, over symbols or over rationals.
#[derive(Debug, Clone)]
pub struct Pipeline<T> {
    pub y: Matrix<T>,
    pub m: Matrix<T>,
    pub n: Matrix<T>,
    pub ftilde: Matrix<T>,
    pub p: Matrix<T>,
    pub phi_s: Matrix<T>,
    pub phi0: Matrix<T>,
    pub g: Matrix<T>,
    pub gtilde: Matrix<T>,
    pub d1: T,
}

impl<T: Ring> Pipeline<T> {
    /// 1-based entry of P.
    pub fn pe(&self, i: usize, j: usize) -> &T {
        self.p.get(i - 1, j - 1)
    }

    /// 1-based entry of G.
    pub fn ge(&self, i: usize, j: usize) -> &T {
        self.g.get(i - 1, j - 1)
    }

    /// 1-based entry of Y.
    pub fn ye(&self, i: usize, j: usize) -> &T {
        self.y.get(i - 1, j - 1)
    }
}

/// Builds M = [[A_s,0],[B_s,C_s]], N = [[A0,0],[B0,C0]], P = J·M·Y·N·J,
/// G = Phi_s·P·Phi_0 and Gtilde over any ring; `sym` supplies parameter values.
pub fn build_pipeline<T: Ring>(profile: &Profile, y: &Matrix<T>, sym: &dyn Fn(&str) -> T) -> Pipeline<T> {
    let unit = y.get(0, 0).one_like();
    let zero = unit.zero_like();
    let blk = |p: &str| Matrix::from_fn(2, 2, |i, j| sym(&format!("{p}{}{}", i + 1, j + 1)));
    let ident = Matrix::identity_like(2, &unit);
    let m = Matrix::lower_block(&blk("d"), &blk("f"), &blk("e"));
    let a0 = match profile.a0_block {
        Block::Identity => ident.clone(),
        Block::Generic => blk("a"),
    };
    let n = Matrix::lower_block(&a0, &blk("b"), &blk("c"));
    let phi = |kind: Phi, a: &str, b: &str, c: &str| {
        let lower = match kind {
            Phi::Trivial => ident.clone(),
            Phi::Generic => Matrix::from_fn(2, 2, |i, j| match (i, j) {
                (0, 0) => sym(a),
                (0, 1) => zero.clone(),
                (1, 0) => sym(b),
                _ => sym(c),
            }),
        };
        Matrix::block_diag(&ident, &lower)
    };
    let phi_s = phi(profile.phi_s, "aS", "bS", "cS");
    let phi0 = phi(profile.phi0, "a0", "b0", "c0");
    let j = Matrix::from_01(&permutation_matrix(PermSpec::J23_4).expect("valid spec"), &unit);
    let ftilde = m.mul(y).and_then(|h| h.mul(&n)).expect("4x4");
    let p = j.mul(&ftilde).and_then(|x| x.mul(&j)).expect("4x4");
    let g = phi_s.mul(&p).and_then(|x| x.mul(&phi0)).expect("4x4");
    let gi = |i: usize, jj: usize| g.get(i - 1, jj - 1).clone();
    let mut rows = [
        [gi(1, 1), gi(1, 2), gi(2, 1), gi(2, 2)],
        [gi(1, 3), gi(1, 4), gi(2, 3), gi(2, 4)],
        [gi(3, 3), gi(3, 4), gi(4, 3), gi(4, 4)],
        [gi(3, 1), gi(3, 2), gi(4, 1), gi(4, 2)],
    ];
    if profile.gtilde_rows == GtildeRows::Text {
        rows.swap(2, 3);
    }
    let gtilde = Matrix::from_fn(4, 4, |i, jj| rows[i][jj].clone());
    Pipeline { y: y.clone(), m, n, ftilde, p, phi_s, phi0, g, gtilde, d1: sym("d1") }
}

/// The symbolic pipeline under the default lex order.
pub fn pipeline_matrices(profile: &Profile) -> Pipeline<Poly> {
    build_pipeline(profile, &SymMatrix::main_variables(), &|s| Poly::sym(s))
}

/// The pipeline at a rational point. Fails if a needed parameter is absent.
pub fn pipeline_at(profile: &Profile, y: &RatMatrix, params: &HashMap<String, Q>) -> Result<Pipeline<Q>, RelationError> {
    for s in profile.parameter_symbols() {
        if !params.contains_key(s) {
            return Err(RelationError::MissingValue(s.to_string()));
        }
    }
    Ok(build_pipeline(profile, y, &|s| params[s].clone()))
}

fn mul3<T: Ring>(a: &T, b: &T, c: &T) -> T {
    a.mul(b).mul(c)
}

fn cross<T: Ring>(a: &T, b: &T, c: &T, d: &T) -> T {
    a.mul(b).sub(&c.mul(d))
}

/// A relation polynomial: its formula in the pipeline entries, evaluated over
/// either ring.
pub trait Relation: Send + Sync {
    fn id(&self) -> RelationId;
    /// Homogeneous degree in the main variables.
    fn x_degree(&self) -> u32;
    fn eval_symbolic(&self, pl: &Pipeline<Poly>, profile: &Profile) -> Poly;
    fn eval_rational(&self, pl: &Pipeline<Q>, profile: &Profile) -> Q;

    fn default_profile(&self) -> Profile {
        Profile::default_for(self.id())
    }

    fn check_profile(&self, profile: &Profile) -> Result<(), RelationError> {
        let id = self.id();
        let bad = |msg: &str| Err(RelationError::IncompatibleProfile(id, msg.to_string()));
        match id {
            RelationId::Rexcme2 if profile.phi0 != Phi::Trivial => bad("phi0 must be trivial"),
            RelationId::Qe2excm if profile.phi_s != Phi::Trivial => bad("phiS must be trivial"),
            _ if !id.uses_g() && (profile.phi0 != Phi::Trivial || profile.phi_s != Phi::Trivial) => {
                bad("relation reads P only; Phi blocks must be trivial")
            }
            _ => Ok(()),
        }
    }
}

macro_rules! relation {
    ($ty:ident, $id:expr, $deg:expr, $f:ident) => {
        struct $ty;
        impl Relation for $ty {
            fn id(&self) -> RelationId {
                $id
            }
            fn x_degree(&self) -> u32 {
                $deg
            }
            fn eval_symbolic(&self, pl: &Pipeline<Poly>, profile: &Profile) -> Poly {
                $f(pl, profile)
            }
            fn eval_rational(&self, pl: &Pipeline<Q>, profile: &Profile) -> Q {
                $f(pl, profile)
            }
        }
    };
}

fn rsf<T: Ring>(pl: &Pipeline<T>, _: &Profile) -> T {
    pl.pe(1, 2).mul(pl.pe(2, 4))
}

fn rexcm_lin<T: Ring>(pl: &Pipeline<T>, _: &Profile) -> T {
    pl.pe(3, 4).clone()
}

fn rexcme2<T: Ring>(pl: &Pipeline<T>, _: &Profile) -> T {
    cross(pl.ge(3, 2), pl.ge(4, 4), pl.ge(4, 2), pl.ge(3, 4))
}

fn qe2excm<T: Ring>(pl: &Pipeline<T>, _: &Profile) -> T {
    cross(pl.ge(4, 1), pl.ge(4, 4), pl.ge(4, 2), pl.ge(4, 3))
}

fn qe2e2<T: Ring>(pl: &Pipeline<T>, profile: &Profile) -> T {
    let g = |i, j| pl.ge(i, j);
    let last = match profile.qe2e2_mode {
        Mode::Verbatim => g(2, 4),
        Mode::Corrected => g(2, 1),
    };
    let a = cross(g(3, 2), g(2, 4), g(1, 4), g(4, 2));
    let b = cross(g(1, 1), g(2, 3), g(1, 3), last);
    let c = cross(g(1, 2), g(2, 4), g(1, 4), g(2, 2));
    let d = cross(g(3, 1), g(2, 3), g(1, 3), g(4, 1));
    a.mul(&b).sub(&c.mul(&d))
}

fn rsupsing<T: Ring>(pl: &Pipeline<T>, profile: &Profile) -> T {
    let p = |i, j| pl.pe(i, j);
    let f1 = cross(p(1, 1), p(2, 2), p(2, 1), p(1, 2));
    let f4 = cross(p(3, 3), p(4, 4), p(3, 4), p(4, 3));
    let f2 = cross(p(1, 3), p(2, 4), p(2, 3), p(1, 4));
    let f3 = match profile.rsupsing_mode {
        Mode::Verbatim => cross(p(3, 1), p(4, 2), p(3, 1), p(4, 1)),
        Mode::Corrected => cross(p(3, 1), p(4, 2), p(3, 2), p(4, 1)),
    };
    mul3(&pl.d1, &f1, &f4).sub(&f2.mul(&f3))
}

fn ra<T: Ring>(pl: &Pipeline<T>, _: &Profile) -> T {
    let y = |i, j| pl.ye(i, j);
    let lin = y(3, 1).mul(y(1, 3)).neg().sub(&y(4, 1).mul(y(2, 3))).add(&y(1, 1).mul(y(3, 3))).add(&y(2, 1).mul(y(4, 3)));
    cross(pl.pe(1, 1), pl.pe(2, 2), pl.pe(1, 2), pl.pe(2, 1)).sub(&pl.d1.mul(&lin))
}

fn rexcmbad<T: Ring>(pl: &Pipeline<T>, _: &Profile) -> T {
    cross(pl.pe(3, 1), pl.pe(4, 2), pl.pe(3, 2), pl.pe(4, 1))
}

fn detgtilde<T: Ring>(pl: &Pipeline<T>, _: &Profile) -> T {
    pl.gtilde.det().expect("4x4")
}

relation!(Rsf, RelationId::Rsf, 2, rsf);
relation!(RexcmLin, RelationId::RexcmLin, 1, rexcm_lin);
relation!(Rexcme2, RelationId::Rexcme2, 2, rexcme2);
relation!(Qe2excm, RelationId::Qe2excm, 2, qe2excm);
relation!(Qe2e2, RelationId::Qe2e2, 4, qe2e2);
relation!(Rsupsing, RelationId::Rsupsing, 4, rsupsing);
relation!(Ra, RelationId::Ra, 2, ra);
relation!(Rexcmbad, RelationId::Rexcmbad, 2, rexcmbad);
relation!(Detgtilde, RelationId::Detgtilde, 4, detgtilde);

/// Relations registered by id, selectable by name at runtime.
#[derive(Default)]
pub struct RelationRegistry {
    map: BTreeMap<RelationId, Box<dyn Relation>>,
}

impl RelationRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, r: Box<dyn Relation>) {
        self.map.insert(r.id(), r);
    }

    pub fn get(&self, id: RelationId) -> &dyn Relation {
        self.map.get(&id).map(|b| b.as_ref()).unwrap_or_else(|| panic!("{id} not registered"))
    }

    pub fn by_name(&self, name: &str) -> Result<&dyn Relation, RelationError> {
        let id: RelationId = name.parse()?;
        self.map.get(&id).map(|b| b.as_ref()).ok_or_else(|| RelationError::UnknownRelation(name.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = RelationId> + '_ {
        self.map.keys().copied()
    }
}

/// The nine standard relations.
pub fn registry() -> &'static RelationRegistry {
    static REG: OnceLock<RelationRegistry> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r = RelationRegistry::new();
        r.register(Box::new(Rsf));
        r.register(Box::new(RexcmLin));
        r.register(Box::new(Rexcme2));
        r.register(Box::new(Qe2excm));
        r.register(Box::new(Qe2e2));
        r.register(Box::new(Rsupsing));
        r.register(Box::new(Ra));
        r.register(Box::new(Rexcmbad));
        r.register(Box::new(Detgtilde));
        r
    })
}

/// Expanded relation polynomial.
pub fn build_relation(id: RelationId, profile: &Profile) -> Result<Poly, RelationError> {
    let rel = registry().get(id);
    rel.check_profile(profile)?;
    Ok(rel.eval_symbolic(&pipeline_matrices(profile), profile))
}

/// The relation's value at a rational matrix `y` and parameter point.
pub fn evaluate_relation(id: RelationId, profile: &Profile, y: &RatMatrix, params: &HashMap<String, Q>) -> Result<Q, RelationError> {
    let rel = registry().get(id);
    rel.check_profile(profile)?;
    Ok(rel.eval_rational(&pipeline_at(profile, y, params)?, profile))
}

/// The RSF factors F12 = P12 and F24 = P24.
pub fn rsf_factors(profile: &Profile) -> Result<[Poly; 2], RelationError> {
    registry().get(RelationId::Rsf).check_profile(profile)?;
    let pl = pipeline_matrices(profile);
    Ok([pl.pe(1, 2).clone(), pl.pe(2, 4).clone()])
}

/// f1..f6 cutting out Sp4.
pub fn sp4_generators() -> Vec<Poly> {
    [
        "-X31*X12 - X41*X22 + X11*X32 + X21*X42",
        "-X31*X13 - X41*X23 + X11*X33 + X21*X43 - 1",
        "-X31*X14 - X41*X24 + X11*X34 + X21*X44",
        "-X32*X13 - X42*X23 + X12*X33 + X22*X43",
        "-X32*X14 - X42*X24 + X12*X34 + X22*X44 - 1",
        "-X33*X14 - X43*X24 + X13*X34 + X23*X44",
    ]
    .iter()
    .map(|s| parse(s).expect("static generator"))
    .collect()
}

/// det(Y) - 1.
pub fn det_minus_one() -> Poly {
    &SymMatrix::main_variables().det().expect("4x4") - &Poly::one()
}

/// One-parameter and four-parameter symplectic test families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// diag(n, 1/n, 1/n, n)
    #[serde(rename = "S_n")]
    Sn,
    /// diag(U_n, (U_n^T)^-1) with U_n = [[0, 1/n], [-n, 0]]
    #[serde(rename = "S_n_prime")]
    SnPrime,
    /// diag(T, (T^T)^-1) with T = [[p, q], [r, n]]
    #[serde(rename = "S_pqrn")]
    Spqrn,
}

impl FromStr for Family {
    type Err = RelationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| RelationError::BadOverride(s.to_string()))
    }
}

impl Family {
    /// The denominator D that the symbol `w` stands for (w = 1/D).
    pub fn denominator(self) -> Poly {
        match self {
            Family::Sn | Family::SnPrime => Poly::sym("n"),
            Family::Spqrn => parse("p*n - q*r").expect("static"),
        }
    }

    /// The family matrix with `w` written for 1/D.
    pub fn matrix(self) -> SymMatrix {
        let s = |e: &str| parse(e).expect("static");
        let rows: [[&str; 4]; 4] = match self {
            Family::Sn => [["n", "0", "0", "0"], ["0", "w", "0", "0"], ["0", "0", "w", "0"], ["0", "0", "0", "n"]],
            Family::SnPrime => [["0", "w", "0", "0"], ["-n", "0", "0", "0"], ["0", "0", "0", "n"], ["0", "0", "-w", "0"]],
            Family::Spqrn => [["p", "q", "0", "0"], ["r", "n", "0", "0"], ["0", "0", "w*n", "-w*r"], ["0", "0", "-w*q", "w*p"]],
        };
        Matrix::from_fn(4, 4, |i, j| s(rows[i][j]))
    }

    /// The family at a rational point (all family symbols given, w derived).
    pub fn at(self, vals: &HashMap<String, Q>) -> Result<RatMatrix, RelationError> {
        let mut point = HashMap::new();
        let names: &[&str] = match self {
            Family::Sn | Family::SnPrime => &["n"],
            Family::Spqrn => &["p", "q", "r", "n"],
        };
        for nm in names {
            let v = vals.get(*nm).ok_or_else(|| RelationError::MissingValue(nm.to_string()))?;
            point.insert(var(nm), v.clone());
        }
        let d = self.denominator().evaluate(&point).expect("all symbols set");
        if d.is_zero() {
            return Err(RelationError::Matrix(MatrixError::Singular));
        }
        point.insert(var("w"), d.inv());
        self.matrix().evaluate(&point).map_err(|e| RelationError::MissingValue(e.to_string()))
    }
}

/// Substitutes the family for Y and clears the `w` denominators:
/// with k the largest power of w, returns sum_j c_j * D^(k-j) where p = sum_j c_j w^j.
pub fn substitute_family(p: &Poly, family: Family) -> (Poly, u32) {
    let fm = family.matrix();
    let mut asg = HashMap::new();
    for i in 0..4 {
        for j in 0..4 {
            asg.insert(crate::polyring::x(i + 1, j + 1), fm.get(i, j).clone());
        }
    }
    let sub = p.substitute(&asg);
    let w = var("w");
    clear_inverse(&sub, w, &family.denominator())
}

/// Rewrites a polynomial in `w = 1/D` as a polynomial free of `w`, multiplied
/// through by D^k; returns the result and k.
pub fn clear_inverse(p: &Poly, w: usize, d: &Poly) -> (Poly, u32) {
    let k = p.terms().iter().map(|t| t.0.exp(w)).max().unwrap_or(0);
    let mut by_power: BTreeMap<u32, Vec<(Monomial, Q)>> = BTreeMap::new();
    for (m, c) in p.terms() {
        let j = m.exp(w);
        let mut m2 = *m;
        m2.set(w, 0);
        by_power.entry(j).or_default().push((m2, c.clone()));
    }
    let mut acc = Poly::zero_in(p.order());
    for (j, terms) in by_power {
        let part = Poly::from_terms(p.order(), terms);
        acc = &acc + &(&part * &d.with_order(p.order()).pow(k - j));
    }
    (acc, k)
}
