//! Named spaces, bundles, embeddings and maps, persisted as one JSON document.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::{build_space, EmbeddingSpec, MapSpec};
use crate::chern::Bundle;
use crate::coeff::Prime;
use crate::error::{Error, Result};
use crate::expr::{parse, EvalContext, Value};
use crate::pushforward::ProperMap;
use crate::spaces::{CoefficientMode, Space, SpaceKind, ThomModule};

/// Environment variable naming the default workspace file.
pub const WORKSPACE_ENV: &str = "CHARCALC_WORKSPACE";

/// A bundle declared by its total Chern class, written as an expression in
/// the generators of `space`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleEntry {
    pub space: String,
    pub rank: usize,
    pub total: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Workspace {
    pub prime: u32,
    pub mode: CoefficientMode,
    #[serde(default)]
    pub spaces: BTreeMap<String, SpaceKind>,
    #[serde(default)]
    pub bundles: BTreeMap<String, BundleEntry>,
    #[serde(default)]
    pub embeddings: BTreeMap<String, EmbeddingSpec>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapSpec>,
}

impl Default for Workspace {
    fn default() -> Workspace {
        Workspace::builtin()
    }
}

impl Workspace {
    /// The workspace used when no file is given.
    pub fn builtin() -> Workspace {
        let proj = |n| SpaceKind::Proj { n };
        let spaces = BTreeMap::from([
            ("pt".to_string(), SpaceKind::Point),
            ("P1".to_string(), proj(1)),
            ("P2".to_string(), proj(2)),
            ("P3".to_string(), proj(3)),
            ("P4".to_string(), proj(4)),
            ("Gr24".to_string(), SpaceKind::Grassmannian { k: 2, n: 4 }),
            (
                "P1xP1".to_string(),
                SpaceKind::Product {
                    factors: vec![proj(1), proj(1)],
                },
            ),
        ]);
        let bundle = |space: &str, rank, total: &str| BundleEntry {
            space: space.into(),
            rank,
            total: total.into(),
        };
        let bundles = BTreeMap::from([
            ("N".to_string(), bundle("P1", 1, "1 + u")),
            ("L".to_string(), bundle("P2", 1, "1 + u")),
            ("E".to_string(), bundle("Gr24", 2, "1 + c1 + c2")),
            ("V".to_string(), bundle("P3", 2, "(1 + u)^2")),
        ]);
        let embeddings = BTreeMap::from([
            ("P1_in_P2".to_string(), EmbeddingSpec::Linear { m: 1, n: 2 }),
            ("pt_in_P1".to_string(), EmbeddingSpec::Linear { m: 0, n: 1 }),
            ("P1_in_P3".to_string(), EmbeddingSpec::Linear { m: 1, n: 3 }),
            ("P2_in_P4".to_string(), EmbeddingSpec::Linear { m: 2, n: 4 }),
            ("diag_P1".to_string(), EmbeddingSpec::GraphOfLinear { m: 1, n: 1 }),
            ("graph_x2".to_string(), EmbeddingSpec::GraphOfPower { d: 2 }),
        ]);
        let maps = BTreeMap::from([
            ("P1_to_pt".to_string(), MapSpec::ToPoint { m: 1, via: 1 }),
            ("P2_to_pt".to_string(), MapSpec::ToPoint { m: 2, via: 2 }),
            ("P1_to_pt_via_P3".to_string(), MapSpec::ToPoint { m: 1, via: 3 }),
            ("P1xP2_to_P1".to_string(), MapSpec::Projection { base: 1, fibre: 2 }),
            ("power1".to_string(), MapSpec::PowerGraph { d: 1 }),
            ("power2".to_string(), MapSpec::PowerGraph { d: 2 }),
            ("power4".to_string(), MapSpec::PowerGraph { d: 4 }),
        ]);
        Workspace {
            prime: 2,
            mode: CoefficientMode::PurePoint,
            spaces,
            bundles,
            embeddings,
            maps,
        }
    }

    pub fn from_json(s: &str) -> Result<Workspace> {
        let w: Workspace = serde_json::from_str(s)?;
        w.check_references()?;
        Ok(w)
    }

    /// Canonical encoding: maps are sorted, two-space indent, trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("workspace serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Workspace> {
        Workspace::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_json())?)
    }

    /// Every bundle refers to a declared space and the prime is valid.
    pub fn check_references(&self) -> Result<()> {
        Prime::new(self.prime)?;
        for (name, b) in &self.bundles {
            if !self.spaces.contains_key(&b.space) {
                return Err(Error::usage(format!(
                    "bundle `{name}` refers to unknown space `{}`",
                    b.space
                )));
            }
        }
        Ok(())
    }

    pub fn space(&self, name: &str, prime: Prime, mode: CoefficientMode) -> Result<Arc<Space>> {
        let kind = self
            .spaces
            .get(name)
            .ok_or_else(|| Error::usage(format!("unknown space `{name}`")))?;
        Ok(build_space(kind, prime, mode)?.with_name(name))
    }

    /// A declared bundle, built over a fresh copy of its space.
    pub fn bundle(&self, name: &str, prime: Prime, mode: CoefficientMode) -> Result<(Arc<Space>, Bundle)> {
        let entry = self
            .bundles
            .get(name)
            .ok_or_else(|| Error::usage(format!("unknown bundle `{name}`")))?;
        let space = self.space(&entry.space, prime, mode)?;
        let b = self.bundle_on(name, entry, &space)?;
        Ok((space, b))
    }

    fn bundle_on(&self, name: &str, entry: &BundleEntry, space: &Arc<Space>) -> Result<Bundle> {
        let ctx = EvalContext::new(space.ring());
        match ctx.eval(&parse(&entry.total)?)? {
            Value::Plain(total) => Bundle::new(name, entry.rank, total),
            _ => Err(Error::usage(format!("bundle `{name}`: total class must be a ring element"))),
        }
    }

    /// Workspace bundles declared on `space_name`, evaluated in `space`.
    pub fn bundles_on(&self, space_name: &str, space: &Arc<Space>) -> Result<Vec<Bundle>> {
        self.bundles
            .iter()
            .filter(|(_, e)| e.space == space_name)
            .map(|(n, e)| self.bundle_on(n, e, space))
            .collect()
    }

    pub fn embedding_spec(&self, name: &str) -> Result<&EmbeddingSpec> {
        self.embeddings
            .get(name)
            .ok_or_else(|| Error::usage(format!("unknown embedding `{name}`")))
    }

    pub fn embedding(&self, name: &str, prime: Prime, mode: CoefficientMode) -> Result<Arc<ThomModule>> {
        self.embedding_spec(name)?.build(prime, mode)
    }

    pub fn map_spec(&self, name: &str) -> Result<&MapSpec> {
        self.maps
            .get(name)
            .ok_or_else(|| Error::usage(format!("unknown map `{name}`")))
    }

    pub fn map(&self, name: &str, prime: Prime, mode: CoefficientMode) -> Result<ProperMap> {
        let mut f = self.map_spec(name)?.build(prime, mode)?;
        f.name = name.to_string();
        Ok(f)
    }
}
