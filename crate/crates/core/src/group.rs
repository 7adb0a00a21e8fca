//! Symbolic finite subgroups of PGL2 following Dickson's list.
//!
//! A [`GroupSymbol`] names a group up to isomorphism together with the
//! parameters the rest of the engine needs (orders, prime-to-p parts,
//! rank of the unipotent radical). Symbols are always canonical: the Borel
//! group with trivial p-part is spelled as a cyclic group, and the dihedral
//! group of order two is rejected in favour of `C2`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Characteristic data of the base field K and its residue field k.
///
/// In positive characteristic `char_k == p` and groups are viewed inside
/// PGL2 over the field with `p^m` elements. In characteristic zero `p` is
/// the residue characteristic and `m` the residue degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawFieldContext", into = "RawFieldContext")]
pub struct FieldContext {
    char_k: u64,
    p: u64,
    m: u32,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFieldContext {
    #[serde(rename = "char_K")]
    char_k: u64,
    p: u64,
    #[serde(default = "one")]
    m: u32,
}

fn one() -> u32 {
    1
}

impl TryFrom<RawFieldContext> for FieldContext {
    type Error = GroupError;

    fn try_from(raw: RawFieldContext) -> Result<Self, Self::Error> {
        FieldContext::new(raw.char_k, raw.p, raw.m)
    }
}

impl From<FieldContext> for RawFieldContext {
    fn from(ctx: FieldContext) -> Self {
        RawFieldContext {
            char_k: ctx.char_k,
            p: ctx.p,
            m: ctx.m,
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldContext {
    pub fn new(char_k: u64, p: u64, m: u32) -> Result<Self, GroupError> {
        if !is_prime(p) {
            return Err(GroupError::NotPrime(p));
        }
        if m == 0 {
            return Err(GroupError::ZeroDegree);
        }
        if char_k != 0 && char_k != p {
            return Err(GroupError::BadCharacteristic { char_k, p });
        }
        Ok(FieldContext { char_k, p, m })
    }

    /// Local field of characteristic `p` with residue field of `p^m` elements.
    pub fn char_p(p: u64, m: u32) -> Result<Self, GroupError> {
        Self::new(p, p, m)
    }

    /// Local field of characteristic zero with residue characteristic `p`.
    pub fn char_zero(p: u64, m: u32) -> Result<Self, GroupError> {
        Self::new(0, p, m)
    }

    pub fn char_k(&self) -> u64 {
        self.char_k
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn is_char_zero(&self) -> bool {
        self.char_k == 0
    }

    /// `p^t`, or `None` on overflow.
    pub fn power(&self, t: u32) -> Option<u64> {
        self.p.checked_pow(t)
    }
}

impl fmt::Display for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "char K = {}, p = {}, m = {}",
            self.char_k, self.p, self.m
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlVariant {
    #[serde(rename = "PGL")]
    Pgl,
    #[serde(rename = "PSL")]
    Psl,
}

impl fmt::Display for PlVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlVariant::Pgl => f.write_str("PGL"),
            PlVariant::Psl => f.write_str("PSL"),
        }
    }
}

/// An uncanonicalized group description. `Borel { t: 0, .. }` and
/// `Dihedral { n: 1 }` are representable here but never in a [`GroupSymbol`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKind {
    Cyclic { n: u64 },
    Dihedral { n: u64 },
    Borel { t: u32, n: u64 },
    ProjLinear { variant: PlVariant, t: u32 },
    Tetrahedral,
    Octahedral,
    Icosahedral,
}

/// JSON spelling of a group, as used by input and catalog files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawGroup {
    Trivial,
    Cyclic { n: u64 },
    Dihedral { n: u64 },
    Borel { t: u32, n: u64 },
    ProjLinear { variant: PlVariant, t: u32 },
    Tetrahedral,
    Octahedral,
    Icosahedral,
}

impl From<RawGroup> for GroupKind {
    fn from(raw: RawGroup) -> Self {
        match raw {
            RawGroup::Trivial => GroupKind::Cyclic { n: 1 },
            RawGroup::Cyclic { n } => GroupKind::Cyclic { n },
            RawGroup::Dihedral { n } => GroupKind::Dihedral { n },
            RawGroup::Borel { t, n } => GroupKind::Borel { t, n },
            RawGroup::ProjLinear { variant, t } => GroupKind::ProjLinear { variant, t },
            RawGroup::Tetrahedral => GroupKind::Tetrahedral,
            RawGroup::Octahedral => GroupKind::Octahedral,
            RawGroup::Icosahedral => GroupKind::Icosahedral,
        }
    }
}

impl TryFrom<RawGroup> for GroupSymbol {
    type Error = GroupError;

    fn try_from(raw: RawGroup) -> Result<Self, Self::Error> {
        canonicalize(raw.into())
    }
}

impl From<GroupSymbol> for RawGroup {
    fn from(g: GroupSymbol) -> Self {
        match g.0 {
            GroupKind::Cyclic { n: 1 } => RawGroup::Trivial,
            GroupKind::Cyclic { n } => RawGroup::Cyclic { n },
            GroupKind::Dihedral { n } => RawGroup::Dihedral { n },
            GroupKind::Borel { t, n } => RawGroup::Borel { t, n },
            GroupKind::ProjLinear { variant, t } => RawGroup::ProjLinear { variant, t },
            GroupKind::Tetrahedral => RawGroup::Tetrahedral,
            GroupKind::Octahedral => RawGroup::Octahedral,
            GroupKind::Icosahedral => RawGroup::Icosahedral,
        }
    }
}

/// A canonical symbolic finite subgroup of PGL2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawGroup", into = "RawGroup")]
pub struct GroupSymbol(GroupKind);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("cyclic group needs n >= 1")]
    CyclicZero,
    #[error("dihedral group needs n >= 2, got n = {0}")]
    DihedralTooSmall(u64),
    #[error("Borel group needs n >= 1")]
    BorelZeroN,
    #[error("projective linear group needs t >= 1")]
    ProjLinearZeroT,
    #[error("residue characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("residue degree m must be at least 1")]
    ZeroDegree,
    #[error("characteristic of K must be 0 or p = {p}, got {char_k}")]
    BadCharacteristic { char_k: u64, p: u64 },
    #[error("{group} is not admissible in {ctx}: {}", join(violations))]
    Inadmissible {
        group: GroupSymbol,
        ctx: FieldContext,
        violations: Vec<Violation>,
    },
    #[error("{0} is not a projective linear group")]
    NotProjLinear(GroupSymbol),
    #[error("PSL2 in characteristic 2 coincides with PGL2; use the PGL variant")]
    PslInCharTwo,
    #[error("cannot derive the intersection of {0} and {1}; specify the edge group in the input")]
    CannotDerive(GroupSymbol, GroupSymbol),
    #[error("arithmetic overflow while computing {0}")]
    Overflow(String),
}

fn join(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// One failed side condition of the finite-subgroup classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    CyclicOrderDivisibleByP { n: u64, p: u64 },
    DihedralOrderNotDividing { n: u64, q: u64 },
    DihedralEvenInCharTwo { n: u64 },
    RankExceedsDegree { t: u32, m: u32 },
    BorelOrderNotDividing { n: u64, modulus: u64 },
    PslInCharTwo,
    PolyhedralExcludedPrime { group: GroupSymbol, p: u64 },
    IcosahedralMissingFifthRoots { p: u64, m: u32 },
    NotFiniteInCharZero { group: GroupSymbol },
    Overflow,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CyclicOrderDivisibleByP { n, p } => {
                write!(f, "C_{n} needs gcd({n}, {p}) = 1")
            }
            Violation::DihedralOrderNotDividing { n, q } => {
                write!(f, "D_{n} needs {n} | {q}-1 or {n} | {q}+1")
            }
            Violation::DihedralEvenInCharTwo { n } => {
                write!(f, "D_{n} in characteristic 2 needs n odd")
            }
            Violation::RankExceedsDegree { t, m } => {
                write!(f, "rank t = {t} exceeds residue degree m = {m}")
            }
            Violation::BorelOrderNotDividing { n, modulus } => {
                write!(f, "{n} does not divide {modulus}")
            }
            Violation::PslInCharTwo => f.write_str("PSL2 needs p odd"),
            Violation::PolyhedralExcludedPrime { group, p } => {
                write!(f, "{group} is not allowed for p = {p}")
            }
            Violation::IcosahedralMissingFifthRoots { p, m } => {
                write!(f, "I needs 5 | {p}^(2*{m}) - 1")
            }
            Violation::NotFiniteInCharZero { group } => {
                write!(
                    f,
                    "{group} has a p-part and cannot occur in characteristic 0"
                )
            }
            Violation::Overflow => f.write_str("parameters overflow 64-bit arithmetic"),
        }
    }
}

/// Bring a raw description into canonical form.
pub fn canonicalize(raw: GroupKind) -> Result<GroupSymbol, GroupError> {
    let kind = match raw {
        GroupKind::Cyclic { n: 0 } => return Err(GroupError::CyclicZero),
        GroupKind::Dihedral { n } if n < 2 => return Err(GroupError::DihedralTooSmall(n)),
        GroupKind::Borel { n: 0, .. } => return Err(GroupError::BorelZeroN),
        GroupKind::Borel { t: 0, n } => GroupKind::Cyclic { n },
        GroupKind::ProjLinear { t: 0, .. } => return Err(GroupError::ProjLinearZeroT),
        other => other,
    };
    Ok(GroupSymbol(kind))
}

impl GroupSymbol {
    pub const TRIVIAL: GroupSymbol = GroupSymbol(GroupKind::Cyclic { n: 1 });
    pub const TETRAHEDRAL: GroupSymbol = GroupSymbol(GroupKind::Tetrahedral);
    pub const OCTAHEDRAL: GroupSymbol = GroupSymbol(GroupKind::Octahedral);
    pub const ICOSAHEDRAL: GroupSymbol = GroupSymbol(GroupKind::Icosahedral);

    pub fn cyclic(n: u64) -> Result<Self, GroupError> {
        canonicalize(GroupKind::Cyclic { n })
    }

    pub fn dihedral(n: u64) -> Result<Self, GroupError> {
        canonicalize(GroupKind::Dihedral { n })
    }

    pub fn borel(t: u32, n: u64) -> Result<Self, GroupError> {
        canonicalize(GroupKind::Borel { t, n })
    }

    /// The elementary abelian p-group of rank `t`.
    pub fn elementary(t: u32) -> Result<Self, GroupError> {
        Self::borel(t, 1)
    }

    pub fn proj_linear(variant: PlVariant, t: u32) -> Result<Self, GroupError> {
        canonicalize(GroupKind::ProjLinear { variant, t })
    }

    pub fn kind(&self) -> GroupKind {
        self.0
    }

    pub fn is_trivial(&self) -> bool {
        *self == Self::TRIVIAL
    }

    pub fn is_cyclic(&self) -> bool {
        matches!(self.0, GroupKind::Cyclic { .. })
    }

    /// `(t, n)` when the group is `B(t, n)`, with cyclic groups read as `t = 0`.
    pub fn borel_form(&self) -> Option<(u32, u64)> {
        match self.0 {
            GroupKind::Cyclic { n } => Some((0, n)),
            GroupKind::Borel { t, n } => Some((t, n)),
            _ => None,
        }
    }

    pub fn is_borel_form(&self) -> bool {
        self.borel_form().is_some()
    }

    /// Human-readable label that resolves field-dependent names, e.g. `PGL2(4)`.
    pub fn label(&self, ctx: &FieldContext) -> String {
        match self.0 {
            GroupKind::ProjLinear { variant, t } => match ctx.power(t) {
                Some(q) => format!("{variant}2({q})"),
                None => format!("{variant}2({}^{t})", ctx.p()),
            },
            _ => self.to_string(),
        }
    }

    /// Order of the group in `ctx`. Rejects symbols that are not admissible there.
    pub fn order(&self, ctx: &FieldContext) -> Result<u64, GroupError> {
        if let Err(violations) = validate_in_context(self, ctx) {
            return Err(GroupError::Inadmissible {
                group: *self,
                ctx: *ctx,
                violations,
            });
        }
        self.raw_order(ctx)
            .ok_or_else(|| GroupError::Overflow(format!("|{}|", self.label(ctx))))
    }

    /// Order without the admissibility check; `None` on overflow or for PSL at p = 2.
    pub(crate) fn raw_order(&self, ctx: &FieldContext) -> Option<u64> {
        match self.0 {
            GroupKind::Cyclic { n } => Some(n),
            GroupKind::Dihedral { n } => n.checked_mul(2),
            GroupKind::Borel { t, n } => ctx.power(t)?.checked_mul(n),
            GroupKind::ProjLinear { variant, t } => {
                let q = ctx.power(t)?;
                let full = q.checked_mul(q.checked_mul(q)?.checked_sub(1)?)?;
                match variant {
                    PlVariant::Pgl => Some(full),
                    PlVariant::Psl if ctx.p() == 2 => None,
                    PlVariant::Psl => Some(full / 2),
                }
            }
            GroupKind::Tetrahedral => Some(12),
            GroupKind::Octahedral => Some(24),
            GroupKind::Icosahedral => Some(60),
        }
    }
}

impl fmt::Display for GroupSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            GroupKind::Cyclic { n: 1 } => f.write_str("1"),
            GroupKind::Cyclic { n } => write!(f, "C{n}"),
            GroupKind::Dihedral { n } => write!(f, "D{n}"),
            GroupKind::Borel { t, n: 1 } => write!(f, "E{t}"),
            GroupKind::Borel { t, n } => write!(f, "B({t},{n})"),
            GroupKind::ProjLinear { variant, t } => write!(f, "{variant}2(p^{t})"),
            GroupKind::Tetrahedral => f.write_str("T"),
            GroupKind::Octahedral => f.write_str("O"),
            GroupKind::Icosahedral => f.write_str("I"),
        }
    }
}

/// Check the side conditions under which `g` occurs as a finite subgroup
/// of PGL2 in `ctx`. Returns every violated condition.
pub fn validate_in_context(g: &GroupSymbol, ctx: &FieldContext) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let p = ctx.p();
    if ctx.is_char_zero() {
        if matches!(g.0, GroupKind::Borel { .. } | GroupKind::ProjLinear { .. }) {
            out.push(Violation::NotFiniteInCharZero { group: *g });
        }
        return if out.is_empty() { Ok(()) } else { Err(out) };
    }
    let m = ctx.m();
    let Some(q) = ctx.power(m) else {
        return Err(vec![Violation::Overflow]);
    };
    match g.0 {
        GroupKind::Cyclic { n } => {
            if n.gcd(&p) != 1 {
                out.push(Violation::CyclicOrderDivisibleByP { n, p });
            }
        }
        GroupKind::Dihedral { n } => {
            if p == 2 {
                if n % 2 == 0 {
                    out.push(Violation::DihedralEvenInCharTwo { n });
                }
            } else if (q - 1) % n != 0 && (q + 1) % n != 0 {
                out.push(Violation::DihedralOrderNotDividing { n, q });
            }
        }
        GroupKind::Borel { t, n } => {
            if t > m {
                out.push(Violation::RankExceedsDegree { t, m });
            }
            match ctx.power(t) {
                Some(qt) => {
                    if (qt - 1) % n != 0 {
                        out.push(Violation::BorelOrderNotDividing { n, modulus: qt - 1 });
                    }
                }
                None => out.push(Violation::Overflow),
            }
            if (q - 1) % n != 0 {
                out.push(Violation::BorelOrderNotDividing { n, modulus: q - 1 });
            }
        }
        GroupKind::ProjLinear { variant, t } => {
            if t > m {
                out.push(Violation::RankExceedsDegree { t, m });
            }
            if variant == PlVariant::Psl && p == 2 {
                out.push(Violation::PslInCharTwo);
            }
        }
        GroupKind::Tetrahedral | GroupKind::Octahedral => {
            if p == 2 || p == 3 {
                out.push(Violation::PolyhedralExcludedPrime { group: *g, p });
            }
        }
        GroupKind::Icosahedral => {
            if p == 2 || p == 5 {
                out.push(Violation::PolyhedralExcludedPrime { group: *g, p });
            }
            // p^(2m) - 1 mod 5 without overflow
            let mut r = 1u64;
            for _ in 0..2 * m {
                r = r * (p % 5) % 5;
            }
            if r != 1 {
                out.push(Violation::IcosahedralMissingFifthRoots { p, m });
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// `n_-` and `n_+` of a projective linear group: the orders of its split
/// and non-split tori.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlInvariants {
    pub n_minus: u64,
    pub n_plus: u64,
}

pub fn pl_invariants(g: &GroupSymbol, ctx: &FieldContext) -> Result<PlInvariants, GroupError> {
    let GroupKind::ProjLinear { variant, t } = g.0 else {
        return Err(GroupError::NotProjLinear(*g));
    };
    let q = ctx
        .power(t)
        .ok_or_else(|| GroupError::Overflow(format!("{}^{t}", ctx.p())))?;
    match variant {
        PlVariant::Pgl => Ok(PlInvariants {
            n_minus: q - 1,
            n_plus: q + 1,
        }),
        PlVariant::Psl if ctx.p() == 2 => Err(GroupError::PslInCharTwo),
        PlVariant::Psl => Ok(PlInvariants {
            n_minus: (q - 1) / 2,
            n_plus: (q + 1) / 2,
        }),
    }
}

fn rank_divides(t: u32, t_large: u32) -> bool {
    t == 0 || (t_large != 0 && t_large % t == 0)
}

/// Whether `large = B(t', n)` extends `small = B(t, n)` along `t | t'`.
///
/// Cyclic groups count as `t = 0`, which divides every rank. The relation
/// is a partial order on Borel-form symbols.
pub fn borel_extends(small: &GroupSymbol, large: &GroupSymbol) -> bool {
    match (small.borel_form(), large.borel_form()) {
        (Some((t, n)), Some((t_large, n_large))) => n == n_large && rank_divides(t, t_large),
        _ => false,
    }
}

/// Edge group of two vertex groups, for the intersection patterns that
/// arise when gluing Kato trees. Anything else must be given explicitly.
pub fn derive_edge_group(
    gu: &GroupSymbol,
    gv: &GroupSymbol,
    ctx: &FieldContext,
) -> Result<GroupSymbol, GroupError> {
    let cannot = || GroupError::CannotDerive(*gu, *gv);
    if let (GroupKind::Cyclic { n: a }, GroupKind::Cyclic { n: b }) = (gu.0, gv.0) {
        return GroupSymbol::cyclic(a.gcd(&b));
    }
    if let (Some(_), Some(_)) = (gu.borel_form(), gv.borel_form()) {
        return if borel_extends(gu, gv) {
            Ok(*gu)
        } else if borel_extends(gv, gu) {
            Ok(*gv)
        } else {
            Err(cannot())
        };
    }
    let (pl, borel) = match (gu.0, gv.0) {
        (GroupKind::ProjLinear { .. }, GroupKind::Borel { .. }) => (gu, gv),
        (GroupKind::Borel { .. }, GroupKind::ProjLinear { .. }) => (gv, gu),
        _ => return Err(cannot()),
    };
    let GroupKind::ProjLinear { t, .. } = pl.0 else {
        unreachable!()
    };
    let (s, n) = borel.borel_form().expect("Borel symbol");
    let inv = pl_invariants(pl, ctx)?;
    if s % t == 0 && n == inv.n_minus {
        GroupSymbol::borel(t, n)
    } else {
        Err(cannot())
    }
}

/// Symbol-level subgroup relation: whether a group of type `h` embeds into
/// a group of type `g` in `ctx`.
///
/// This is a pattern check on the classification, not a computation with
/// concrete subgroups. It always implies that `|h|` divides `|g|`.
pub fn is_subgroup(h: &GroupSymbol, g: &GroupSymbol, ctx: &FieldContext) -> bool {
    let (Some(oh), Some(og)) = (h.raw_order(ctx), g.raw_order(ctx)) else {
        return false;
    };
    if og % oh != 0 {
        return false;
    }
    if h.is_trivial() || h == g {
        return true;
    }
    let p = ctx.p();
    let tori = |variant: PlVariant, t: u32| -> Option<(u64, u64)> {
        let q = ctx.power(t)?;
        Some(match variant {
            PlVariant::Pgl => (q - 1, q + 1),
            PlVariant::Psl => ((q - 1) / 2, (q + 1) / 2),
        })
    };
    use GroupKind::*;
    match (h.0, g.0) {
        (Cyclic { n: a }, Cyclic { n: b }) => b % a == 0,
        (Cyclic { n: a }, Dihedral { n }) => a == 2 || n % a == 0,
        (Cyclic { n: a }, Borel { n, .. }) => n % a == 0,
        (Cyclic { n: a }, Tetrahedral) => matches!(a, 2 | 3),
        (Cyclic { n: a }, Octahedral) => matches!(a, 2 | 3 | 4),
        (Cyclic { n: a }, Icosahedral) => matches!(a, 2 | 3 | 5),
        (Cyclic { n: a }, ProjLinear { variant, t }) => match tori(variant, t) {
            Some((lo, hi)) => lo % a == 0 || hi % a == 0,
            None => false,
        },
        (Dihedral { n: k }, Dihedral { n }) => n % k == 0,
        (Dihedral { n: k }, Tetrahedral) => k == 2,
        (Dihedral { n: k }, Octahedral) => matches!(k, 2 | 3 | 4),
        (Dihedral { n: k }, Icosahedral) => matches!(k, 2 | 3 | 5),
        (Dihedral { n: k }, ProjLinear { variant, t }) => match tori(variant, t) {
            Some((lo, hi)) => lo % k == 0 || hi % k == 0,
            None => false,
        },
        (Borel { t, n }, Borel { t: t2, n: n2 }) => n2 % n == 0 && rank_divides(t, t2),
        (Borel { t, n }, ProjLinear { variant, t: t2 }) => match tori(variant, t2) {
            Some((lo, _)) => rank_divides(t, t2) && lo % n == 0,
            None => false,
        },
        (Borel { t: 1, n }, Icosahedral) => p == 3 && 2 % n == 0,
        (Tetrahedral, Octahedral | Icosahedral) => true,
        (ProjLinear { variant: v1, t: t1 }, ProjLinear { variant: v2, t: t2 }) => {
            if !rank_divides(t1, t2) {
                return false;
            }
            match (v1, v2) {
                (PlVariant::Pgl, PlVariant::Psl) => (t2 / t1) % 2 == 0,
                _ => true,
            }
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctxp(p: u64, m: u32) -> FieldContext {
        FieldContext::char_p(p, m).unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(
            GroupSymbol::borel(0, 7).unwrap(),
            GroupSymbol::cyclic(7).unwrap()
        );
        assert_eq!(GroupSymbol::cyclic(1).unwrap(), GroupSymbol::TRIVIAL);
        assert_eq!(
            GroupSymbol::borel(2, 3).unwrap().kind(),
            GroupKind::Borel { t: 2, n: 3 }
        );
        assert_eq!(
            GroupSymbol::dihedral(1),
            Err(GroupError::DihedralTooSmall(1))
        );
        assert_eq!(GroupSymbol::borel(3, 0), Err(GroupError::BorelZeroN));
        assert_eq!(
            GroupSymbol::proj_linear(PlVariant::Pgl, 0),
            Err(GroupError::ProjLinearZeroT)
        );
    }

    #[test]
    fn orders() {
        let b = GroupSymbol::borel(2, 3).unwrap();
        assert_eq!(b.order(&ctxp(2, 2)).unwrap(), 12);
        assert_eq!(GroupSymbol::ICOSAHEDRAL.order(&ctxp(3, 2)).unwrap(), 60);
        let pgl = GroupSymbol::proj_linear(PlVariant::Pgl, 1).unwrap();
        assert_eq!(pgl.order(&ctxp(3, 1)).unwrap(), 24);
        let psl = GroupSymbol::proj_linear(PlVariant::Psl, 1).unwrap();
        assert_eq!(psl.order(&ctxp(5, 1)).unwrap(), 60);
        assert!(GroupSymbol::TETRAHEDRAL.order(&ctxp(3, 1)).is_err());
    }

    #[test]
    fn admissibility_examples() {
        assert!(validate_in_context(&GroupSymbol::dihedral(5).unwrap(), &ctxp(2, 4)).is_ok());
        assert!(validate_in_context(&GroupSymbol::borel(3, 7).unwrap(), &ctxp(2, 3)).is_ok());
        assert!(validate_in_context(&GroupSymbol::TETRAHEDRAL, &ctxp(3, 1)).is_err());
        let zero = FieldContext::char_zero(7, 1).unwrap();
        assert!(validate_in_context(&GroupSymbol::ICOSAHEDRAL, &zero).is_ok());
        assert!(validate_in_context(&GroupSymbol::borel(1, 1).unwrap(), &zero).is_err());
        // n must divide both p^t - 1 and p^m - 1
        let err = validate_in_context(&GroupSymbol::borel(2, 5).unwrap(), &ctxp(2, 4)).unwrap_err();
        assert_eq!(
            err,
            vec![Violation::BorelOrderNotDividing { n: 5, modulus: 3 }]
        );
    }

    #[test]
    fn pl_invariant_values() {
        let pgl2 = GroupSymbol::proj_linear(PlVariant::Pgl, 2).unwrap();
        assert_eq!(
            pl_invariants(&pgl2, &ctxp(3, 2)).unwrap(),
            PlInvariants {
                n_minus: 8,
                n_plus: 10
            }
        );
        let psl1 = GroupSymbol::proj_linear(PlVariant::Psl, 1).unwrap();
        assert_eq!(
            pl_invariants(&psl1, &ctxp(5, 1)).unwrap(),
            PlInvariants {
                n_minus: 2,
                n_plus: 3
            }
        );
        let pgl1 = GroupSymbol::proj_linear(PlVariant::Pgl, 1).unwrap();
        assert_eq!(
            pl_invariants(&pgl1, &ctxp(2, 1)).unwrap(),
            PlInvariants {
                n_minus: 1,
                n_plus: 3
            }
        );
        assert_eq!(
            pl_invariants(&psl1, &ctxp(2, 1)),
            Err(GroupError::PslInCharTwo)
        );
    }

    #[test]
    fn borel_extension_examples() {
        let b23 = GroupSymbol::borel(2, 3).unwrap();
        assert!(borel_extends(&b23, &GroupSymbol::borel(4, 3).unwrap()));
        assert!(!borel_extends(&b23, &GroupSymbol::borel(4, 5).unwrap()));
        assert!(borel_extends(&b23, &b23));
        assert!(!borel_extends(&b23, &GroupSymbol::borel(3, 3).unwrap()));
        assert!(borel_extends(&GroupSymbol::cyclic(3).unwrap(), &b23));
        assert!(!borel_extends(&b23, &GroupSymbol::cyclic(3).unwrap()));
        assert!(!borel_extends(
            &GroupSymbol::TETRAHEDRAL,
            &GroupSymbol::TETRAHEDRAL
        ));
    }

    #[test]
    fn derived_edge_groups() {
        let pgl = GroupSymbol::proj_linear(PlVariant::Pgl, 2).unwrap();
        let b43 = GroupSymbol::borel(4, 3).unwrap();
        assert_eq!(
            derive_edge_group(&pgl, &b43, &ctxp(2, 4)).unwrap(),
            GroupSymbol::borel(2, 3).unwrap()
        );
        assert_eq!(
            derive_edge_group(&b43, &pgl, &ctxp(2, 4)).unwrap(),
            GroupSymbol::borel(2, 3).unwrap()
        );
        let b12 = GroupSymbol::borel(1, 2).unwrap();
        let b32 = GroupSymbol::borel(3, 2).unwrap();
        assert_eq!(derive_edge_group(&b12, &b32, &ctxp(3, 3)).unwrap(), b12);
        assert_eq!(
            derive_edge_group(
                &GroupSymbol::cyclic(6).unwrap(),
                &GroupSymbol::cyclic(4).unwrap(),
                &ctxp(5, 1)
            )
            .unwrap(),
            GroupSymbol::cyclic(2).unwrap()
        );
        assert!(matches!(
            derive_edge_group(
                &GroupSymbol::TETRAHEDRAL,
                &GroupSymbol::OCTAHEDRAL,
                &ctxp(5, 1)
            ),
            Err(GroupError::CannotDerive(..))
        ));
    }

    #[test]
    fn subgroup_patterns() {
        let c = FieldContext::char_zero(5, 1).unwrap();
        let d5 = GroupSymbol::dihedral(5).unwrap();
        assert!(is_subgroup(&d5, &GroupSymbol::ICOSAHEDRAL, &c));
        assert!(is_subgroup(&d5, &GroupSymbol::dihedral(20).unwrap(), &c));
        assert!(!is_subgroup(&d5, &GroupSymbol::OCTAHEDRAL, &c));
        assert!(is_subgroup(&GroupSymbol::cyclic(2).unwrap(), &d5, &c));
        let k = ctxp(2, 4);
        let pgl = GroupSymbol::proj_linear(PlVariant::Pgl, 2).unwrap();
        assert!(is_subgroup(&GroupSymbol::borel(2, 3).unwrap(), &pgl, &k));
        assert!(is_subgroup(&GroupSymbol::cyclic(5).unwrap(), &pgl, &k));
        assert!(!is_subgroup(&GroupSymbol::cyclic(7).unwrap(), &pgl, &k));
    }

    #[test]
    fn json_spelling() {
        let g: GroupSymbol = serde_json::from_str(r#"{"kind":"borel","t":0,"n":7}"#).unwrap();
        assert_eq!(g, GroupSymbol::cyclic(7).unwrap());
        let t: GroupSymbol = serde_json::from_str(r#"{"kind":"trivial"}"#).unwrap();
        assert!(t.is_trivial());
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"kind":"trivial"}"#);
        assert!(serde_json::from_str::<GroupSymbol>(r#"{"kind":"dihedral","n":1}"#).is_err());
        assert!(serde_json::from_str::<GroupSymbol>(r#"{"kind":"mystery"}"#).is_err());
        let pl: GroupSymbol =
            serde_json::from_str(r#"{"kind":"proj_linear","variant":"PSL","t":1}"#).unwrap();
        assert_eq!(pl, GroupSymbol::proj_linear(PlVariant::Psl, 1).unwrap());
    }
}
