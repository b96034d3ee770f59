use std::fmt;
use std::str::FromStr;

use super::{blame, influence, Variant};
use crate::engine::{Func, Manager, VarId};
use crate::error::{Error, Result};
use crate::games::{
    dominating_game, hkr_game, rectifying_game, ContributionWeights, CoopGame, DEFAULT_N_LIMIT,
};
use crate::measures::{rational_string, ConstancyMeasure, ShareFunction, Value};

#[derive(Clone, Debug, PartialEq)]
pub enum CgmKind {
    Dominating,
    Rectifying,
    Hkr(ConstancyMeasure),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GameValue {
    Banzhaf,
    Shapley,
    Z,
    Custom(ContributionWeights),
}

/// A value function `(x, f) ↦ I_x(f)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Measure {
    Influence,
    Blame { rho: ShareFunction, variant: Variant },
    Cgm { cgm: CgmKind, value: GameValue },
}

#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    /// Largest support the HKR constructions accept.
    pub n_limit: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            n_limit: DEFAULT_N_LIMIT,
        }
    }
}

impl Measure {
    pub fn blame(rho: ShareFunction) -> Self {
        Measure::Blame {
            rho,
            variant: Variant::Chk,
        }
    }

    pub fn modified_blame(rho: ShareFunction) -> Self {
        Measure::Blame {
            rho,
            variant: Variant::Modified,
        }
    }

    pub fn cgm(cgm: CgmKind, value: GameValue) -> Self {
        Measure::Cgm { cgm, value }
    }

    /// False for HKR compositions whose constancy measure is not known to be
    /// importance inducing.
    pub fn is_certified(&self) -> bool {
        match self {
            Measure::Cgm {
                cgm: CgmKind::Hkr(k),
                ..
            } => k.is_certified(),
            _ => true,
        }
    }

    pub fn evaluate(
        &self,
        m: &mut Manager,
        f: Func,
        x: VarId,
        opts: &EvalOptions,
    ) -> Result<Value> {
        Ok(self.evaluate_all(m, f, &[x], opts)?.remove(0))
    }

    /// Values for every variable in `xs`, building any game only once.
    pub fn evaluate_all(
        &self,
        m: &mut Manager,
        f: Func,
        xs: &[VarId],
        opts: &EvalOptions,
    ) -> Result<Vec<Value>> {
        for &x in xs {
            if x.index() >= m.universe() {
                return Err(Error::UnknownVariable(x.to_string()));
            }
        }
        match self {
            Measure::Influence => Ok(xs.iter().map(|&x| influence(m, f, x).into()).collect()),
            Measure::Blame { rho, variant } => Ok(xs
                .iter()
                .map(|&x| blame(m, f, x, rho, *variant).into())
                .collect()),
            Measure::Cgm { cgm, value } => {
                let game = match cgm {
                    CgmKind::Dominating => CoopGame::Simple(dominating_game(m, f)),
                    CgmKind::Rectifying => CoopGame::Simple(rectifying_game(m, f)),
                    CgmKind::Hkr(k) => CoopGame::Table(hkr_game(m, f, k, opts.n_limit)?),
                };
                xs.iter()
                    .map(|&x| game_value(m, &game, value, x))
                    .collect()
            }
        }
    }
}

fn game_value(m: &mut Manager, game: &CoopGame, value: &GameValue, x: VarId) -> Result<Value> {
    Ok(match (game, value) {
        (CoopGame::Simple(g), GameValue::Banzhaf) => g.banzhaf(m, x).into(),
        (CoopGame::Simple(g), GameValue::Shapley) => g.shapley(m, x).into(),
        (CoopGame::Simple(g), GameValue::Z) => g.zvalue(m, x).into(),
        (CoopGame::Simple(g), GameValue::Custom(w)) => g.contributions(m, x, w)?.into(),
        (CoopGame::Table(t), GameValue::Banzhaf) => t.banzhaf(x),
        (CoopGame::Table(t), GameValue::Shapley) => t.shapley(x),
        (CoopGame::Table(t), GameValue::Z) => t.zvalue(x),
        (CoopGame::Table(t), GameValue::Custom(w)) => t.contributions(x, w)?,
    })
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Influence => write!(f, "influence"),
            Measure::Blame {
                rho,
                variant: Variant::Chk,
            } => write!(f, "blame:{}", rho.name()),
            Measure::Blame {
                rho,
                variant: Variant::Modified,
            } => write!(f, "mblame:{}", rho.name()),
            Measure::Cgm { cgm, value } => {
                let c = match cgm {
                    CgmKind::Dominating => "dominating".to_string(),
                    CgmKind::Rectifying => "rectifying".to_string(),
                    CgmKind::Hkr(k) => format!("hkr-{}", k.name()),
                };
                let v = match value {
                    GameValue::Banzhaf => "banzhaf".to_string(),
                    GameValue::Shapley => "shapley".to_string(),
                    GameValue::Z => "z".to_string(),
                    GameValue::Custom(w) => format!(
                        "weights({})",
                        w.weights()
                            .iter()
                            .map(rational_string)
                            .collect::<Vec<_>>()
                            .join(",")
                    ),
                };
                write!(f, "cgm:{c}:{v}")
            }
        }
    }
}

impl FromStr for CgmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dominating" | "omega" => Ok(CgmKind::Dominating),
            "rectifying" | "nu" => Ok(CgmKind::Rectifying),
            "hkr" => Ok(CgmKind::Hkr(ConstancyMeasure::Quad)),
            _ => match s.strip_prefix("hkr-") {
                Some(k) => Ok(CgmKind::Hkr(k.parse()?)),
                None => Err(Error::UnknownMeasure(s.to_string())),
            },
        }
    }
}

impl FromStr for GameValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "banzhaf" | "bz" => Ok(GameValue::Banzhaf),
            "shapley" | "sh" => Ok(GameValue::Shapley),
            "z" | "singleton" => Ok(GameValue::Z),
            _ => Err(Error::UnknownMeasure(s.to_string())),
        }
    }
}

impl FromStr for Measure {
    type Err = Error;

    /// `influence`, `blame:<rho>`, `mblame:<rho>` or `cgm:<game>:<value>`.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownMeasure(s.to_string());
        let mut parts = s.splitn(3, ':');
        let head = parts.next().unwrap_or_default();
        match (head, parts.next(), parts.next()) {
            ("influence", None, None) => Ok(Measure::Influence),
            ("blame", rho, None) => Ok(Measure::blame(
                rho.unwrap_or("exp").parse().map_err(|_| unknown())?,
            )),
            ("mblame", rho, None) => Ok(Measure::modified_blame(
                rho.unwrap_or("exp").parse().map_err(|_| unknown())?,
            )),
            ("cgm", Some(c), v) => Ok(Measure::cgm(
                c.parse()?,
                v.unwrap_or("banzhaf").parse()?,
            )),
            _ => Err(unknown()),
        }
    }
}

/// Values of every universe variable under one measure, ascending by value
/// with ties broken by variable id.
#[derive(Clone, Debug)]
pub struct ImportanceReport {
    pub measure: String,
    pub universe: usize,
    pub certified: bool,
    pub entries: Vec<(VarId, Value)>,
}

impl ImportanceReport {
    pub fn get(&self, x: VarId) -> Option<&Value> {
        self.entries.iter().find(|(v, _)| *v == x).map(|(_, val)| val)
    }
}

pub fn rank_all(
    m: &mut Manager,
    f: Func,
    measure: &Measure,
    opts: &EvalOptions,
) -> Result<ImportanceReport> {
    let dep: Vec<VarId> = m.dep(f).into_iter().collect();
    let vals = measure.evaluate_all(m, f, &dep, opts)?;
    let mut entries: Vec<(VarId, Value)> = m
        .vars()
        .map(|v| {
            let val = dep
                .iter()
                .position(|&d| d == v)
                .map_or_else(Value::zero, |i| vals[i].clone());
            (v, val)
        })
        .collect();
    entries.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(ImportanceReport {
        measure: measure.to_string(),
        universe: m.universe(),
        certified: measure.is_certified(),
        entries,
    })
}
