use std::fmt;

use serde::{Deserialize, Serialize};

use crate::denoise::FilterSpec;
use crate::error::{Error, Result};
use crate::plane::Role;

/// What happens to one chrominance slot of the difference transform family.
///
/// The Dg slot holds G, `R − G`, or `R^d − G`; the Db slot holds B, `G − B`,
/// or `G^d − B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "w")]
pub enum SlotChoice {
    Untransformed,
    Difference,
    Denoised(FilterSpec),
}

impl SlotChoice {
    /// Rank used for tie-breaking: cheaper options first, then weaker
    /// denoising (larger w) before stronger.
    pub fn complexity_rank(self) -> u32 {
        match self {
            SlotChoice::Untransformed => 0,
            SlotChoice::Difference => 1,
            SlotChoice::Denoised(f) => 2 + (10 - f.log2_weight() as u32),
        }
    }

    pub fn filter(self) -> Option<FilterSpec> {
        match self {
            SlotChoice::Denoised(f) => Some(f),
            _ => None,
        }
    }

    pub(crate) fn dg_role(self) -> Role {
        match self {
            SlotChoice::Untransformed => Role::G,
            SlotChoice::Difference => Role::Dg,
            SlotChoice::Denoised(_) => Role::DDg,
        }
    }

    pub(crate) fn db_role(self) -> Role {
        match self {
            SlotChoice::Untransformed => Role::B,
            SlotChoice::Difference => Role::Db,
            SlotChoice::Denoised(_) => Role::DDb,
        }
    }
}

impl fmt::Display for SlotChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotChoice::Untransformed => f.write_str("none"),
            SlotChoice::Difference => f.write_str("rdgdb"),
            SlotChoice::Denoised(spec) => write!(f, "rdls(w={})", spec.center_weight()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    Identity,
    #[serde(rename = "rdgdb")]
    RdgDb,
    Rct,
    #[serde(rename = "rdls-rdgdb")]
    RdlsRdgDb,
    /// Per-slot mix of the above, produced by transform selection.
    Mixed,
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformKind::Identity => "identity",
            TransformKind::RdgDb => "RDgDb",
            TransformKind::Rct => "RCT",
            TransformKind::RdlsRdgDb => "RDLS-RDgDb",
            TransformKind::Mixed => "mixed",
        })
    }
}

/// Everything needed to invert a transformed image.
///
/// Identity, RDgDb, RDLS-RDgDb and per-slot mixes of them are all members of
/// the difference family: R is kept and each chrominance slot independently
/// chooses untransformed, plain difference or denoised difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TransformDescriptor {
    Rct,
    Differences { dg: SlotChoice, db: SlotChoice },
}

impl TransformDescriptor {
    pub fn identity() -> Self {
        TransformDescriptor::Differences {
            dg: SlotChoice::Untransformed,
            db: SlotChoice::Untransformed,
        }
    }

    pub fn rdgdb() -> Self {
        TransformDescriptor::Differences {
            dg: SlotChoice::Difference,
            db: SlotChoice::Difference,
        }
    }

    pub fn rct() -> Self {
        TransformDescriptor::Rct
    }

    pub fn rdls_rdgdb(w_db: FilterSpec, w_dg: FilterSpec) -> Self {
        TransformDescriptor::Differences {
            dg: SlotChoice::Denoised(w_dg),
            db: SlotChoice::Denoised(w_db),
        }
    }

    pub fn kind(&self) -> TransformKind {
        use SlotChoice::*;
        match *self {
            TransformDescriptor::Rct => TransformKind::Rct,
            TransformDescriptor::Differences { dg, db } => match (dg, db) {
                (Untransformed, Untransformed) => TransformKind::Identity,
                (Difference, Difference) => TransformKind::RdgDb,
                (Denoised(_), Denoised(_)) => TransformKind::RdlsRdgDb,
                _ => TransformKind::Mixed,
            },
        }
    }

    /// `(w_db, w_dg)` filters of the denoising steps, where present.
    pub fn step_filters(&self) -> (Option<FilterSpec>, Option<FilterSpec>) {
        match *self {
            TransformDescriptor::Rct => (None, None),
            TransformDescriptor::Differences { dg, db } => (db.filter(), dg.filter()),
        }
    }

    pub fn output_roles(&self) -> [Role; 3] {
        match *self {
            TransformDescriptor::Rct => [Role::Y, Role::Cu, Role::Cv],
            TransformDescriptor::Differences { dg, db } => [Role::R, dg.dg_role(), db.db_role()],
        }
    }

    /// Reconstructs a descriptor from the roles of a transformed image and the
    /// stored filter weights.
    pub fn from_roles(
        roles: [Role; 3],
        w_db: Option<FilterSpec>,
        w_dg: Option<FilterSpec>,
    ) -> Result<Self> {
        if roles == [Role::Y, Role::Cu, Role::Cv] {
            return Ok(TransformDescriptor::Rct);
        }
        let missing = |slot: &str| Error::InvalidArgument(format!("{slot} filter weight missing"));
        let dg = match roles[1] {
            Role::G => SlotChoice::Untransformed,
            Role::Dg => SlotChoice::Difference,
            Role::DDg => SlotChoice::Denoised(w_dg.ok_or_else(|| missing("dDg"))?),
            _ => return Err(Error::InconsistentRoles(roles)),
        };
        let db = match roles[2] {
            Role::B => SlotChoice::Untransformed,
            Role::Db => SlotChoice::Difference,
            Role::DDb => SlotChoice::Denoised(w_db.ok_or_else(|| missing("dDb"))?),
            _ => return Err(Error::InconsistentRoles(roles)),
        };
        if roles[0] != Role::R {
            return Err(Error::InconsistentRoles(roles));
        }
        Ok(TransformDescriptor::Differences { dg, db })
    }
}

impl fmt::Display for TransformDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind(), *self) {
            (TransformKind::RdlsRdgDb, _) => {
                let (db, dg) = self.step_filters();
                write!(
                    f,
                    "RDLS-RDgDb (w_db={}, w_dg={})",
                    db.unwrap().center_weight(),
                    dg.unwrap().center_weight()
                )
            }
            (TransformKind::Mixed, TransformDescriptor::Differences { dg, db }) => {
                write!(f, "mixed (Dg slot {dg}, Db slot {db})")
            }
            (kind, _) => write!(f, "{kind}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(n: u32) -> FilterSpec {
        FilterSpec::new(n).unwrap()
    }

    #[test]
    fn kinds() {
        assert_eq!(
            TransformDescriptor::identity().kind(),
            TransformKind::Identity
        );
        assert_eq!(TransformDescriptor::rdgdb().kind(), TransformKind::RdgDb);
        assert_eq!(TransformDescriptor::rct().kind(), TransformKind::Rct);
        let d = TransformDescriptor::rdls_rdgdb(w(1), w(16));
        assert_eq!(d.kind(), TransformKind::RdlsRdgDb);
        assert_eq!(d.step_filters(), (Some(w(1)), Some(w(16))));
        let mixed = TransformDescriptor::Differences {
            dg: SlotChoice::Denoised(w(4)),
            db: SlotChoice::Difference,
        };
        assert_eq!(mixed.kind(), TransformKind::Mixed);
    }

    #[test]
    fn only_rdls_carries_filters() {
        for d in [
            TransformDescriptor::identity(),
            TransformDescriptor::rdgdb(),
            TransformDescriptor::rct(),
        ] {
            assert_eq!(d.step_filters(), (None, None));
        }
    }

    #[test]
    fn roles_round_trip() {
        let all = [
            TransformDescriptor::identity(),
            TransformDescriptor::rdgdb(),
            TransformDescriptor::rct(),
            TransformDescriptor::rdls_rdgdb(w(2), w(512)),
            TransformDescriptor::Differences {
                dg: SlotChoice::Untransformed,
                db: SlotChoice::Denoised(w(8)),
            },
        ];
        for d in all {
            let (db, dg) = d.step_filters();
            assert_eq!(
                TransformDescriptor::from_roles(d.output_roles(), db, dg).unwrap(),
                d
            );
        }
        assert!(
            TransformDescriptor::from_roles([Role::R, Role::DDg, Role::B], None, None).is_err()
        );
    }

    #[test]
    fn json_shape() {
        let d = TransformDescriptor::rdls_rdgdb(w(1), w(16));
        let v = serde_json::to_value(d).unwrap();
        assert_eq!(v["family"], "differences");
        assert_eq!(v["dg"]["kind"], "denoised");
        assert_eq!(v["dg"]["w"], 16);
        assert_eq!(v["db"]["w"], 1);
        let back: TransformDescriptor = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);
    }
}
