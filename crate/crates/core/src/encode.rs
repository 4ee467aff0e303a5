//! Antecedent components for one prediction point.
//!
//! Unordered attributes give a single exact-match component. Ordered ones,
//! in level mode, give one component `r <= y_l` per grid level; the levels
//! below the point's value (index `l <= h`) form the lower-boundary group and
//! the rest the upper-boundary group. A component's match bit at row `n` is
//! set when its truth at `n` equals its truth at the prediction point.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bits::BitSet;
use crate::dataset::{AttributeKind, Dataset, PredictionPoint, TrainingRows, Value};
use crate::discretize::{initial_grid, Discretization};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EncodingMode {
    /// Every attribute is compared by exact match.
    ExactMatch,
    /// Ordered and continuous attributes use level components; unordered
    /// ones stay exact-match.
    #[default]
    LevelComparison,
    /// Level components for every attribute, unordered ones ordered by their
    /// declared value list.
    LevelComparisonAll,
}

impl std::str::FromStr for EncodingMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Self::ExactMatch),
            "levels" => Ok(Self::LevelComparison),
            "levels-all" => Ok(Self::LevelComparisonAll),
            _ => Err(format!("unknown mode {s:?} (exact, levels, levels-all)")),
        }
    }
}

impl std::fmt::Display for EncodingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::ExactMatch => "exact",
            Self::LevelComparison => "levels",
            Self::LevelComparisonAll => "levels-all",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttrEncoding {
    Exact,
    Levels,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EncodingConfig {
    pub mode: EncodingMode,
    /// Per-attribute overrides by name, applied after `mode`.
    pub overrides: BTreeMap<String, AttrEncoding>,
    pub discretization: Discretization,
}

impl EncodingConfig {
    pub fn with_mode(mode: EncodingMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    /// How attribute `attr` is encoded, or `None` if it yields no components.
    pub fn encoding_for(&self, dataset: &Dataset, attr: usize) -> Option<AttrEncoding> {
        let a = dataset.schema().attribute(attr);
        if matches!(a.kind, AttributeKind::Ignored | AttributeKind::Class(_)) {
            return None;
        }
        if let Some(&o) = self.overrides.get(&a.name) {
            return Some(o);
        }
        Some(match self.mode {
            EncodingMode::ExactMatch => AttrEncoding::Exact,
            EncodingMode::LevelComparison if a.kind.is_ordered() => AttrEncoding::Levels,
            EncodingMode::LevelComparison => AttrEncoding::Exact,
            EncodingMode::LevelComparisonAll => AttrEncoding::Levels,
        })
    }
}

/// Level grids per attribute, fitted on one training set.
#[derive(Debug, Clone, PartialEq)]
pub struct Grids {
    levels: Vec<Option<Vec<f64>>>,
}

impl Grids {
    pub fn empty(attributes: usize) -> Self {
        Self {
            levels: vec![None; attributes],
        }
    }

    /// Fits every grid the encoder may need under `config`: ordered and
    /// continuous attributes always (exact-match continuous attributes
    /// compare bins), unordered ones when they are forced into level mode.
    pub fn fit(training: &TrainingRows<'_>, config: &EncodingConfig) -> Result<Self> {
        let dataset = training.dataset();
        let schema = dataset.schema();
        let mut levels = vec![None; schema.len()];
        for (attr, slot) in levels.iter_mut().enumerate() {
            let Some(enc) = config.encoding_for(dataset, attr) else {
                continue;
            };
            *slot = match &schema.attribute(attr).kind {
                AttributeKind::Ordered(_) | AttributeKind::Continuous => {
                    Some(initial_grid(training, attr, config.discretization)?.cuts)
                }
                AttributeKind::Nominal(v) if enc == AttrEncoding::Levels => {
                    Some((0..v.len()).map(|i| i as f64).collect())
                }
                AttributeKind::Boolean if enc == AttrEncoding::Levels => Some(vec![0.0, 1.0]),
                _ => None,
            };
        }
        Ok(Self { levels })
    }

    pub fn get(&self, attr: usize) -> Option<&[f64]> {
        self.levels.get(attr).and_then(|l| l.as_deref())
    }

    pub fn set(&mut self, attr: usize, grid: Vec<f64>) {
        self.levels[attr] = Some(grid);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryGroup {
    Independent,
    LowerBoundary(usize),
    UpperBoundary(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    ExactMatch(Value),
    /// `r <= threshold`, the `level`-th grid entry (1-based).
    AtMost {
        level: usize,
        threshold: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntecedentComponent {
    pub id: usize,
    pub attribute: Option<usize>,
    pub predicate: Predicate,
    pub group: BoundaryGroup,
    pub match_bits: BitSet,
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct EncodedInstance {
    components: Vec<AntecedentComponent>,
    class_bits: BitSet,
    positives: u32,
    /// Dense id per boundary group; `None` for independent components.
    exclusive: Vec<Option<u16>>,
    group_count: usize,
    class_names: [String; 2],
}

impl EncodedInstance {
    fn assemble(
        mut components: Vec<AntecedentComponent>,
        class_bits: BitSet,
        class_names: [String; 2],
    ) -> Result<Self> {
        let n = class_bits.len();
        let mut ids: BTreeMap<BoundaryGroup, u16> = BTreeMap::new();
        let mut exclusive = Vec::with_capacity(components.len());
        for (i, c) in components.iter_mut().enumerate() {
            if c.match_bits.len() != n {
                return Err(Error::LengthMismatch {
                    left: c.match_bits.len(),
                    right: n,
                });
            }
            c.id = i;
            exclusive.push(match c.group {
                BoundaryGroup::Independent => None,
                g => {
                    let next = ids.len() as u16;
                    Some(*ids.entry(g).or_insert(next))
                }
            });
        }
        Ok(Self {
            positives: class_bits.count_ones(),
            group_count: ids.len(),
            components,
            class_bits,
            exclusive,
            class_names,
        })
    }

    /// Builds an instance straight from match vectors, mainly for tests and
    /// synthetic problems. Components are labelled `x1`, `x2`, ...
    pub fn from_bits(match_bits: Vec<BitSet>, groups: Vec<BoundaryGroup>, class_bits: BitSet) -> Result<Self> {
        if match_bits.len() != groups.len() {
            return Err(Error::LengthMismatch {
                left: match_bits.len(),
                right: groups.len(),
            });
        }
        let components = match_bits
            .into_iter()
            .zip(groups)
            .enumerate()
            .map(|(i, (bits, group))| AntecedentComponent {
                id: i,
                attribute: None,
                predicate: Predicate::ExactMatch(Value::Bool(true)),
                group,
                match_bits: bits,
                label: format!("x{}", i + 1),
            })
            .collect();
        Self::assemble(components, class_bits, ["true".into(), "false".into()])
    }

    pub fn components(&self) -> &[AntecedentComponent] {
        &self.components
    }

    pub fn component(&self, id: usize) -> &AntecedentComponent {
        &self.components[id]
    }

    /// M
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// N
    pub fn n(&self) -> usize {
        self.class_bits.len()
    }

    pub fn class_bits(&self) -> &BitSet {
        &self.class_bits
    }

    pub fn positives(&self) -> u32 {
        self.positives
    }

    pub fn negatives(&self) -> u32 {
        self.n() as u32 - self.positives
    }

    pub fn exclusive_group(&self, id: usize) -> Option<u16> {
        self.exclusive[id]
    }

    pub fn group_count(&self) -> usize {
        self.group_count
    }

    pub fn class_name(&self, positive: bool) -> &str {
        &self.class_names[if positive { 0 } else { 1 }]
    }

    /// Same instance with components reordered: new component `i` is old
    /// component `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let components = order.iter().map(|&i| self.components[i].clone()).collect();
        Self::assemble(components, self.class_bits.clone(), self.class_names.clone())
            .expect("lengths already validated")
    }

    /// Text dump of the components, one per line.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "N={} positives={} M={}", self.n(), self.positives, self.len());
        for c in &self.components {
            let group = match c.group {
                BoundaryGroup::Independent => "exact".to_string(),
                BoundaryGroup::LowerBoundary(_) => "lower".to_string(),
                BoundaryGroup::UpperBoundary(_) => "upper".to_string(),
            };
            let _ = writeln!(
                out,
                "{:>3} {:<6} {:<30} matches={}",
                c.id,
                group,
                c.label,
                c.match_bits.count_ones()
            );
        }
        out
    }
}

/// Predicate truths `r <= y_l` for every level, or `None` when `r` is missing.
pub fn component_truth_ladder(grid: &[f64], value: Value) -> Option<Vec<bool>> {
    let r = value.ordinal()?;
    Some(grid.iter().map(|&y| r <= y).collect())
}

/// Short decimal form of a cut point, e.g. `0.5275` rather than
/// `0.5275000000000001`.
fn num(y: f64) -> String {
    let s = format!("{y:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn level_name(dataset: &Dataset, attr: usize, y: f64) -> String {
    match &dataset.schema().attribute(attr).kind {
        AttributeKind::Ordered(v) | AttributeKind::Nominal(v) => v[y as usize].clone(),
        AttributeKind::Boolean => if y >= 1.0 { "T" } else { "F" }.to_string(),
        _ => num(y),
    }
}

fn value_name(dataset: &Dataset, attr: usize, v: Value) -> String {
    match (v, &dataset.schema().attribute(attr).kind) {
        (Value::Category(c), kind) => kind.categories().map(|l| l[c as usize].clone()).unwrap_or_default(),
        (Value::Bool(b), _) => if b { "T" } else { "F" }.to_string(),
        (Value::Real(r), _) => num(r),
        (Value::Missing, _) => "?".to_string(),
    }
}

fn bin_of(grid: &[f64], r: f64) -> usize {
    grid.iter().filter(|&&y| r > y).count()
}

fn bin_label(name: &str, grid: &[f64], bin: usize) -> String {
    match (bin.checked_sub(1).map(|i| grid[i]), grid.get(bin)) {
        (None, Some(hi)) => format!("{name}<={}", num(*hi)),
        (Some(lo), None) => format!("{name}>{}", num(lo)),
        (Some(lo), Some(hi)) => format!("{name} in ({},{}]", num(lo), num(*hi)),
        (None, None) => format!("{name}=*"),
    }
}

/// Builds the antecedent components of `point` against `training`.
pub fn encode(
    training: &TrainingRows<'_>,
    point: &PredictionPoint,
    grids: &Grids,
    config: &EncodingConfig,
) -> Result<EncodedInstance> {
    let dataset = training.dataset();
    let schema = dataset.schema();
    let class_bits = BitSet::from_bools(training.classes());

    let mut exact = Vec::new();
    let mut levels = Vec::new();
    for attr in 0..schema.len() {
        let Some(enc) = config.encoding_for(dataset, attr) else {
            continue;
        };
        let r0 = point.value(attr);
        if r0.is_missing() {
            continue;
        }
        let kind = &schema.attribute(attr).kind;
        let name = &schema.attribute(attr).name;
        match enc {
            AttrEncoding::Exact if matches!(kind, AttributeKind::Continuous) => {
                let grid = grids.get(attr).ok_or_else(|| Error::MissingGrid(name.clone()))?;
                if grid.is_empty() {
                    continue;
                }
                let b0 = bin_of(grid, r0.ordinal().expect("not missing"));
                let bits = BitSet::from_bools(
                    training
                        .column(attr)
                        .map(|v| v.ordinal().is_some_and(|r| bin_of(grid, r) == b0)),
                );
                exact.push(AntecedentComponent {
                    id: 0,
                    attribute: Some(attr),
                    predicate: Predicate::ExactMatch(r0),
                    group: BoundaryGroup::Independent,
                    match_bits: bits,
                    label: bin_label(name, grid, b0),
                });
            }
            AttrEncoding::Exact => {
                let bits = BitSet::from_bools(training.column(attr).map(|v| v == r0));
                exact.push(AntecedentComponent {
                    id: 0,
                    attribute: Some(attr),
                    predicate: Predicate::ExactMatch(r0),
                    group: BoundaryGroup::Independent,
                    match_bits: bits,
                    label: format!("{name}={}", value_name(dataset, attr, r0)),
                });
            }
            AttrEncoding::Levels => {
                let grid = grids.get(attr).ok_or_else(|| Error::MissingGrid(name.clone()))?;
                let r = r0.ordinal().expect("not missing");
                let mut lower = Vec::new();
                let mut upper = Vec::new();
                for (i, &y) in grid.iter().enumerate() {
                    let truth0 = r <= y;
                    let bits = BitSet::from_bools(
                        training
                            .column(attr)
                            .map(|v| v.ordinal().is_some_and(|rn| (rn <= y) == truth0)),
                    );
                    let level = level_name(dataset, attr, y);
                    let (group, label, dest) = if truth0 {
                        (
                            BoundaryGroup::UpperBoundary(attr),
                            format!("{name}<={level}"),
                            &mut upper,
                        )
                    } else {
                        (
                            BoundaryGroup::LowerBoundary(attr),
                            format!("{name}>{level}"),
                            &mut lower,
                        )
                    };
                    dest.push(AntecedentComponent {
                        id: 0,
                        attribute: Some(attr),
                        predicate: Predicate::AtMost {
                            level: i + 1,
                            threshold: y,
                        },
                        group,
                        match_bits: bits,
                        label,
                    });
                }
                levels.extend(lower);
                levels.extend(upper);
            }
        }
    }
    exact.extend(levels);
    let names = schema.class_values();
    EncodedInstance::assemble(exact, class_bits, [names[0].clone(), names[1].clone()])
}
