//! Structured rational instances on which a relation must vanish exactly.
//!
//! Each recipe draws the blocks of
//! `F = diag(Pi_s, Pi_s') * Theta * diag(Pi_0^-1, Pi_0'^-1)` with the case's
//! zero and diagonal pattern, takes `P = F` and recovers `Y = M^-1 J P J N^-1`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::CertError;
use crate::polyring::Q;
use crate::relations::{pipeline_at, Family, Profile, RelationId};
use crate::symmat::{permutation_matrix, Matrix, PermSpec, RatMatrix};

/// Rejected draws allowed per trial before sampling gives up.
pub const MAX_REJECTIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseId {
    NonisogDiag,
    NonisogAntidiag,
    OrdExcmCenterExcm,
    OrdExcmCenterE2,
    OrdE2CenterE2,
    OrdE2CenterExcm,
    Supersingular,
    Arch,
    BadCm,
    BadIsog,
}

impl CaseId {
    pub const ALL: [CaseId; 10] = [
        CaseId::NonisogDiag,
        CaseId::NonisogAntidiag,
        CaseId::OrdExcmCenterExcm,
        CaseId::OrdExcmCenterE2,
        CaseId::OrdE2CenterE2,
        CaseId::OrdE2CenterExcm,
        CaseId::Supersingular,
        CaseId::Arch,
        CaseId::BadCm,
        CaseId::BadIsog,
    ];

    pub fn name(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for CaseId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_ascii_uppercase())).map_err(|_| format!("unknown case `{s}`"))
    }
}

/// A concrete point: the matrix Y and every parameter value, including d1.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub y: RatMatrix,
    pub params: HashMap<String, Q>,
}

impl Instance {
    pub fn to_json(&self) -> serde_json::Value {
        let y: Vec<Vec<String>> = (0..4).map(|i| (0..4).map(|j| self.y.get(i, j).to_string()).collect()).collect();
        let params: BTreeMap<&str, String> = self.params.iter().map(|(k, v)| (k.as_str(), v.to_string())).collect();
        serde_json::json!({ "y": y, "params": params })
    }
}

/// Seeded exact-rational sampler with a rejection budget.
pub struct Sampler {
    rng: ChaCha8Rng,
    rejections: usize,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), rejections: 0 }
    }

    pub fn rejections(&self) -> usize {
        self.rejections
    }

    pub fn reject(&mut self) -> Result<(), CertError> {
        self.rejections += 1;
        if self.rejections > MAX_REJECTIONS {
            Err(CertError::TooManyRejections(MAX_REJECTIONS))
        } else {
            Ok(())
        }
    }

    /// Numerator in [-9, 9], denominator in [1, 9].
    pub fn rational(&mut self) -> Q {
        let n = self.rng.gen_range(-9i64..=9);
        let d = self.rng.gen_range(1i64..=9);
        Q::new(n, d)
    }

    pub fn nonzero(&mut self) -> Result<Q, CertError> {
        loop {
            let v = self.rational();
            if !v.is_zero() {
                return Ok(v);
            }
            self.reject()?;
        }
    }

    pub fn integer(&mut self, lo: i64, hi: i64) -> Q {
        Q::from_i64(self.rng.gen_range(lo..=hi))
    }

    pub fn block(&mut self, shape: Shape) -> Result<RatMatrix, CertError> {
        Ok(match shape {
            Shape::Zero => RatMatrix::diag(&[Q::zero(), Q::zero()]),
            Shape::Diagonal => RatMatrix::diag(&[self.nonzero()?, self.nonzero()?]),
            Shape::Full => loop {
                let m = Matrix::from_fn(2, 2, |_, _| self.rational());
                if !det(&m).is_zero() {
                    break m;
                }
                self.reject()?;
            },
        })
    }

    /// A random element of SL2 with free entries a, b, c and d = (1 + bc)/a.
    pub fn sl2(&mut self) -> Result<RatMatrix, CertError> {
        let a = self.nonzero()?;
        let b = self.rational();
        let c = self.rational();
        let d = &(&Q::one() + &(&b * &c)) / &a;
        Ok(mat2(a, b, c, d))
    }

    /// diag(u, 1/u).
    pub fn diag_sl2(&mut self) -> Result<RatMatrix, CertError> {
        let u = self.nonzero()?;
        Ok(RatMatrix::diag(&[u.clone(), u.inv()]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Zero,
    Diagonal,
    Full,
}

pub fn mat2(a: Q, b: Q, c: Q, d: Q) -> RatMatrix {
    Matrix::new(2, 2, vec![a, b, c, d]).expect("2x2")
}

fn det(m: &RatMatrix) -> Q {
    m.det().expect("square")
}

fn mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    a.mul(b).expect("conformable")
}

fn inv(m: &RatMatrix) -> RatMatrix {
    m.inverse().expect("recipe matrices are invertible")
}

/// Admissible parameter values: A0, C0, A_s, C_s invertible, B blocks free,
/// Phi diagonal entries and d1 nonzero.
pub fn draw_params(s: &mut Sampler) -> Result<HashMap<String, Q>, CertError> {
    let mut params = HashMap::new();
    for (prefix, invertible) in [("a", true), ("b", false), ("c", true), ("d", true), ("e", true), ("f", false)] {
        let m = if invertible { s.block(Shape::Full)? } else { Matrix::from_fn(2, 2, |_, _| s.rational()) };
        for i in 0..2 {
            for j in 0..2 {
                params.insert(format!("{prefix}{}{}", i + 1, j + 1), m.get(i, j).clone());
            }
        }
    }
    for (k, nonzero) in [("aS", true), ("bS", false), ("cS", true), ("a0", true), ("b0", false), ("c0", true)] {
        let v = if nonzero { s.nonzero()? } else { s.rational() };
        params.insert(k.to_string(), v);
    }
    params.insert("d1".to_string(), s.nonzero()?);
    Ok(params)
}

/// Fixed data of one trial: parameter values and the matrices derived from them.
pub struct Context {
    pub profile: Profile,
    pub params: HashMap<String, Q>,
    m_inv: RatMatrix,
    n_inv: RatMatrix,
    j: RatMatrix,
    /// [phi_s]_dR, the inverse of the lower block of Phi_s.
    pub dr_s: RatMatrix,
    /// [phi_0]_dR, the lower block of Phi_0.
    pub dr_0: RatMatrix,
}

impl Context {
    /// Draws admissible parameters and the matrices the recipes need.
    pub fn draw(profile: &Profile, s: &mut Sampler) -> Result<Context, CertError> {
        let params = draw_params(s)?;
        let base = pipeline_at(profile, &RatMatrix::identity(4), &params)?;
        let j = Matrix::from_01(&permutation_matrix(PermSpec::J23_4)?, &Q::one());
        Ok(Context {
            profile: *profile,
            m_inv: base.m.inverse()?,
            n_inv: base.n.inverse()?,
            j,
            dr_s: inv(&base.phi_s.block(2, 2, 2, 2)),
            dr_0: base.phi0.block(2, 2, 2, 2),
            params,
        })
    }

    /// Y with P(Y) = `p`.
    pub fn y_for(&self, p: &RatMatrix) -> RatMatrix {
        mul(&mul(&mul(&mul(&self.m_inv, &self.j), p), &self.j), &self.n_inv)
    }

    /// Period block of an isogenous curve: `[phi]_dR * Pi * [phi]_v^-1`.
    pub fn isogenous(dr: &RatMatrix, pi: &RatMatrix, phi_v: &RatMatrix) -> RatMatrix {
        mul(&mul(dr, pi), &inv(phi_v))
    }

    pub fn instance(&self, p: &RatMatrix, d1: Option<Q>) -> Instance {
        let mut params = self.params.clone();
        if let Some(d1) = d1 {
            params.insert("d1".to_string(), d1);
        }
        Instance { y: self.y_for(p), params }
    }
}

/// `diag(pi_s, pi_s') * theta * diag(pi_0^-1, pi_0'^-1)`.
pub fn assemble(pi_s: &RatMatrix, pi_s2: &RatMatrix, theta: &RatMatrix, pi_0: &RatMatrix, pi_02: &RatMatrix) -> RatMatrix {
    let left = Matrix::block_diag(pi_s, pi_s2);
    let right = Matrix::block_diag(&inv(pi_0), &inv(pi_02));
    mul(&mul(&left, theta), &right)
}

/// Theta from its four 2x2 blocks, redrawn until invertible.
pub fn theta(s: &mut Sampler, shapes: [Shape; 4]) -> Result<RatMatrix, CertError> {
    loop {
        let b: Vec<RatMatrix> = shapes.iter().map(|sh| s.block(*sh)).collect::<Result<_, _>>()?;
        let t = Matrix::from_blocks(&[vec![&b[0], &b[1]], vec![&b[2], &b[3]]])?;
        if !det(&t).is_zero() {
            return Ok(t);
        }
        s.reject()?;
    }
}

/// Theta from a 4x4 pattern of symbols: "0" is zero, equal labels share a value.
pub fn patterned_theta(s: &mut Sampler, pattern: [[&str; 4]; 4]) -> Result<RatMatrix, CertError> {
    loop {
        let mut vals: HashMap<&str, Q> = HashMap::new();
        for row in &pattern {
            for &lbl in row {
                if lbl != "0" && !vals.contains_key(lbl) {
                    vals.insert(lbl, s.rational());
                }
            }
        }
        let t = Matrix::from_fn(4, 4, |i, j| vals.get(pattern[i][j]).cloned().unwrap_or_else(Q::zero));
        if !det(&t).is_zero() {
            return Ok(t);
        }
        s.reject()?;
    }
}

/// One structured case: its shape and which relations it annihilates.
pub trait CaseRecipe: Send + Sync {
    fn id(&self) -> CaseId;
    fn relations(&self) -> &'static [RelationId];
    /// Short description of the Theta shape, Pi normalization and d1 rule.
    fn describe(&self) -> &'static str;
    fn sample(&self, ctx: &Context, s: &mut Sampler) -> Result<Instance, CertError>;
}

struct Nonisog {
    anti: bool,
}

impl CaseRecipe for Nonisog {
    fn id(&self) -> CaseId {
        if self.anti {
            CaseId::NonisogAntidiag
        } else {
            CaseId::NonisogDiag
        }
    }
    fn relations(&self) -> &'static [RelationId] {
        &[RelationId::Rsf]
    }
    fn describe(&self) -> &'static str {
        if self.anti {
            "Theta anti-diagonal with full 2x2 blocks; all Pi in SL2"
        } else {
            "Theta block-diagonal with full 2x2 blocks; all Pi in SL2"
        }
    }
    fn sample(&self, ctx: &Context, s: &mut Sampler) -> Result<Instance, CertError> {
        let (f, z) = (Shape::Full, Shape::Zero);
        let shapes = if self.anti { [z, f, f, z] } else { [f, z, z, f] };
        let t = theta(s, shapes)?;
        let p = assemble(&s.sl2()?, &s.sl2()?, &t, &s.sl2()?, &s.sl2()?);
        Ok(ctx.instance(&p, None))
    }
}

/// Ordinary reduction: each of the two Pi' blocks is either diagonal
/// (CM-type curve) or obtained through an isogeny with diagonal `[phi]_v`.
struct Ordinary {
    id: CaseId,
    s_isogenous: bool,
    center_isogenous: bool,
    center_diagonal: bool,
    relations: &'static [RelationId],
    text: &'static str,
}

impl CaseRecipe for Ordinary {
    fn id(&self) -> CaseId {
        self.id
    }
    fn relations(&self) -> &'static [RelationId] {
        self.relations
    }
    fn describe(&self) -> &'static str {
        self.text
    }
    fn sample(&self, ctx: &Context, s: &mut Sampler) -> Result<Instance, CertError> {
        let d = Shape::Diagonal;
        let t = theta(s, [d, d, d, d])?;
        let pi_s = s.sl2()?;
        let pi_s2 = if self.s_isogenous { Context::isogenous(&ctx.dr_s, &pi_s, &s.block(d)?) } else { s.diag_sl2()? };
        let pi_0 = if self.center_diagonal { s.diag_sl2()? } else { s.sl2()? };
        let pi_02 = if self.center_isogenous { Context::isogenous(&ctx.dr_0, &pi_0, &s.block(d)?) } else { s.diag_sl2()? };
        Ok(ctx.instance(&assemble(&pi_s, &pi_s2, &t, &pi_0, &pi_02), None))
    }
}

struct Supersingular;

impl CaseRecipe for Supersingular {
    fn id(&self) -> CaseId {
        CaseId::Supersingular
    }
    fn relations(&self) -> &'static [RelationId] {
        &[RelationId::Rsupsing]
    }
    fn describe(&self) -> &'static str {
        "Theta with four invertible full blocks; d1 = det T12 det T21 / (det T11 det T22)"
    }
    fn sample(&self, ctx: &Context, s: &mut Sampler) -> Result<Instance, CertError> {
        let t = theta(s, [Shape::Full; 4])?;
        let bd = |r, c| det(&t.block(r, c, 2, 2));
        let d1 = &(&bd(0, 2) * &bd(2, 0)) / &(&bd(0, 0) * &bd(2, 2));
        let p = assemble(&s.sl2()?, &s.sl2()?, &t, &s.sl2()?, &s.sl2()?);
        Ok(ctx.instance(&p, Some(d1)))
    }
}

/// Y is a random product of symplectic family members; d1 is the
/// determinant of the top-left block of P.
struct Arch;

impl CaseRecipe for Arch {
    fn id(&self) -> CaseId {
        CaseId::Arch
    }
    fn relations(&self) -> &'static [RelationId] {
        &[RelationId::Ra]
    }
    fn describe(&self) -> &'static str {
        "Y a product of S_n, S'_n and S(p,q,r,n) members; d1 = det of the top-left block of P"
    }
    fn sample(&self, ctx: &Context, s: &mut Sampler) -> Result<Instance, CertError> {
        let mut y = RatMatrix::identity(4);
        for fam in [Family::Sn, Family::SnPrime, Family::Spqrn] {
            let mut vals = HashMap::new();
            loop {
                for k in ["n", "p", "q", "r"] {
                    vals.insert(k.to_string(), s.nonzero()?);
                }
                match fam.at(&vals) {
                    Ok(m) => {
                        y = mul(&y, &m);
                        break;
                    }
                    Err(_) => s.reject()?,
                }
            }
        }
        let pl = pipeline_at(&ctx.profile, &y, &ctx.params)?;
        let d1 = det(&pl.p.block(0, 0, 2, 2));
        let mut params = ctx.params.clone();
        params.insert("d1".to_string(), d1);
        Ok(Instance { y, params })
    }
}

struct BadCm;

impl CaseRecipe for BadCm {
    fn id(&self) -> CaseId {
        CaseId::BadCm
    }
    fn relations(&self) -> &'static [RelationId] {
        &[RelationId::Rexcmbad]
    }
    fn describe(&self) -> &'static str {
        "Theta with zero second column outside the (2,2) entry; all Pi in SL2"
    }
    fn sample(&self, ctx: &Context, s: &mut Sampler) -> Result<Instance, CertError> {
        let t = patterned_theta(
            s,
            [["t11", "0", "t13", "t14"], ["t21", "t22", "t23", "t24"], ["t31", "0", "t33", "t34"], ["t41", "0", "t43", "t44"]],
        )?;
        let p = assemble(&s.sl2()?, &s.sl2()?, &t, &s.sl2()?, &s.sl2()?);
        Ok(ctx.instance(&p, None))
    }
}

struct BadIsog;

impl CaseRecipe for BadIsog {
    fn id(&self) -> CaseId {
        CaseId::BadIsog
    }
    fn relations(&self) -> &'static [RelationId] {
        &[RelationId::Detgtilde]
    }
    fn describe(&self) -> &'static str {
        "Theta with repeated lower-triangular 2x2 pattern; both Pi' through isogenies with [phi]_v = [[x,0],[z,x]]"
    }
    fn sample(&self, ctx: &Context, s: &mut Sampler) -> Result<Instance, CertError> {
        let t = patterned_theta(
            s,
            [["t11", "0", "t13", "0"], ["t21", "t11", "t23", "t13"], ["t31", "0", "t33", "0"], ["t41", "t31", "t43", "t33"]],
        )?;
        let unipotent = |s: &mut Sampler| -> Result<RatMatrix, CertError> {
            let x = s.nonzero()?;
            Ok(mat2(x.clone(), Q::zero(), s.rational(), x))
        };
        let pi_s = s.sl2()?;
        let pi_0 = s.sl2()?;
        let pi_s2 = Context::isogenous(&ctx.dr_s, &pi_s, &unipotent(s)?);
        let pi_02 = Context::isogenous(&ctx.dr_0, &pi_0, &unipotent(s)?);
        Ok(ctx.instance(&assemble(&pi_s, &pi_s2, &t, &pi_0, &pi_02), None))
    }
}

/// Case recipes by id, selectable at runtime.
#[derive(Default)]
pub struct CaseRegistry {
    map: BTreeMap<CaseId, Box<dyn CaseRecipe>>,
}

impl CaseRegistry {
    pub fn register(&mut self, r: Box<dyn CaseRecipe>) {
        self.map.insert(r.id(), r);
    }

    pub fn get(&self, id: CaseId) -> &dyn CaseRecipe {
        self.map.get(&id).map(|b| b.as_ref()).unwrap_or_else(|| panic!("{id} not registered"))
    }

    pub fn ids(&self) -> impl Iterator<Item = CaseId> + '_ {
        self.map.keys().copied()
    }

    /// Cases annihilating `rel`.
    pub fn cases_for(&self, rel: RelationId) -> Vec<CaseId> {
        self.map.values().filter(|r| r.relations().contains(&rel)).map(|r| r.id()).collect()
    }

    pub fn compatible(&self, case: CaseId, rel: RelationId) -> bool {
        self.get(case).relations().contains(&rel)
    }

    pub fn relations_covered(&self) -> HashSet<RelationId> {
        self.map.values().flat_map(|r| r.relations().iter().copied()).collect()
    }
}

pub fn case_registry() -> &'static CaseRegistry {
    static REG: OnceLock<CaseRegistry> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r = CaseRegistry::default();
        r.register(Box::new(Nonisog { anti: false }));
        r.register(Box::new(Nonisog { anti: true }));
        r.register(Box::new(Ordinary {
            id: CaseId::OrdExcmCenterExcm,
            s_isogenous: false,
            center_isogenous: false,
            center_diagonal: false,
            relations: &[RelationId::RexcmLin],
            text: "Theta with diagonal blocks; Pi_s' and Pi_0' diagonal",
        }));
        r.register(Box::new(Ordinary {
            id: CaseId::OrdExcmCenterE2,
            s_isogenous: true,
            center_isogenous: false,
            center_diagonal: true,
            relations: &[RelationId::Rexcme2],
            text: "Theta with diagonal blocks; Pi_s' through an isogeny with diagonal [phi_s]_v; Pi_0 and Pi_0' diagonal",
        }));
        r.register(Box::new(Ordinary {
            id: CaseId::OrdE2CenterE2,
            s_isogenous: true,
            center_isogenous: true,
            center_diagonal: false,
            relations: &[RelationId::Qe2e2],
            text: "Theta with diagonal blocks; Pi_s' and Pi_0' through isogenies with diagonal [phi]_v",
        }));
        r.register(Box::new(Ordinary {
            id: CaseId::OrdE2CenterExcm,
            s_isogenous: false,
            center_isogenous: true,
            center_diagonal: false,
            relations: &[RelationId::Qe2excm],
            text: "Theta with diagonal blocks; Pi_s' diagonal; Pi_0' through an isogeny with diagonal [phi_0]_v",
        }));
        r.register(Box::new(Supersingular));
        r.register(Box::new(Arch));
        r.register(Box::new(BadCm));
        r.register(Box::new(BadIsog));
        r
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for c in CaseId::ALL {
            assert_eq!(c.name().parse::<CaseId>().unwrap(), c);
        }
        assert_eq!(CaseId::OrdE2CenterExcm.name(), "ORD_E2_CENTER_EXCM");
    }

    #[test]
    fn every_relation_has_a_case() {
        let covered = case_registry().relations_covered();
        for r in RelationId::ALL {
            assert!(covered.contains(&r), "{r}");
        }
        assert_eq!(case_registry().ids().count(), 10);
    }

    #[test]
    fn sl2_draws_have_unit_determinant() {
        let mut s = Sampler::new(3);
        for _ in 0..50 {
            assert!(det(&s.sl2().unwrap()).is_one());
        }
    }

    #[test]
    fn recovered_y_reproduces_p() {
        let profile = Profile::default_for(RelationId::Detgtilde);
        let mut s = Sampler::new(11);
        let ctx = Context::draw(&profile, &mut s).unwrap();
        let t = theta(&mut s, [Shape::Full; 4]).unwrap();
        let inst = ctx.instance(&t, None);
        let pl = pipeline_at(&profile, &inst.y, &inst.params).unwrap();
        assert_eq!(pl.p, t);
    }
}
