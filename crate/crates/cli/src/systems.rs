use std::sync::Arc;

use shadowlab::constructions::universal::stage_to_text;
use shadowlab::constructions::*;
use shadowlab::dendrite::format;

use crate::config::{Builder, SystemSpec};
use crate::CliError;

pub struct BuiltSystem {
    pub system: Arc<SimpleSystem>,
    pub description: String,
    /// Stages `0..=k` for the universal builder.
    pub stages: Vec<StageSystem>,
}

impl BuiltSystem {
    pub fn stage(&self) -> Option<&StageSystem> {
        self.stages.last()
    }

    /// Dendrite file with the builder description as its map section.
    pub fn to_text(&self, seed: u64) -> String {
        match self.stage() {
            Some(st) => stage_to_text(st, seed),
            None => format::to_text(&self.system.space.complex, &[self.description.clone()]),
        }
    }
}

pub fn build(spec: &SystemSpec, seed: u64) -> Result<BuiltSystem, CliError> {
    let plain = |system: SimpleSystem, description: String| BuiltSystem {
        system: Arc::new(system),
        description,
        stages: Vec::new(),
    };
    Ok(match spec.builder.unwrap_or(Builder::Square) {
        Builder::Square => plain(make_square_map(), "square".into()),
        Builder::ThreeFixed => plain(make_three_fixed_homeo().system("three-fixed")?, "three-fixed".into()),
        Builder::Star => {
            let n = spec.n.unwrap_or(3);
            plain(make_n_star(n)?, format!("star n={n}"))
        }
        Builder::Bridge => {
            let (l, r) = (spec.left.unwrap_or(3), spec.right.unwrap_or(2));
            let sys = make_bridge(&make_n_star(l)?, &make_n_star(r)?, &make_three_fixed_homeo())?;
            plain(sys, format!("bridge left={l} right={r}"))
        }
        Builder::Universal => {
            let (n, k, m) = (spec.n.unwrap_or(3), spec.k.unwrap_or(1), spec.m.unwrap_or(8));
            let mut stages = build_universal_stage(n, k.max(1), m, seed)?;
            stages.truncate(k + 1);
            let system = stages.last().expect("stage 0 exists").system.clone();
            BuiltSystem { system, description: format!("universal n={n} k={k} m={m}"), stages }
        }
        Builder::CatMap => return Err(CliError::Validation("the cat map is not a dendrite system".into())),
    })
}
