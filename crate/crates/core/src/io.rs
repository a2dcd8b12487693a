//! JSON file formats for groups, representations, model descriptors,
//! automorphisms, complexes, cocycles, `G`-spaces and bundles.
//!
//! Complex matrices are nested arrays of `[re, im]` pairs. Files may refer to
//! other files by path; relative paths resolve against the referring file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::aut::AutElement;
use crate::cocycle::{BaseComplex, EdgeCocycle};
use crate::error::{Error, Result};
use crate::group::{catalog, from_permutations, FiniteGroup, Subgroup};
use crate::linalg::{c, CMat};
use crate::model::{build_model, subgroup_irreps, CanonicalModel, RepSpec};
use crate::nonnormal::{EquivariantBundle, FiniteGSpace};
use crate::rep::{CharacterTable, Representation};

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMat) -> MatrixJson {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMat> {
    let r = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != cols) {
        return Err(Error::InvalidInput("ragged matrix".into()));
    }
    Ok(CMat::from_fn(r, cols, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn dir_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "lowercase")]
pub enum GroupFile {
    Table {
        order: usize,
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
    Perm {
        degree: usize,
        generators: Vec<Vec<usize>>,
    },
    /// A built-in group by name, e.g. `"S3"` or `"Z5"`.
    Catalog { name: String },
}

impl GroupFile {
    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupFile::Table { order, table, labels } => {
                if table.len() != *order {
                    return Err(Error::InvalidInput(format!("order {order} but {} table rows", table.len())));
                }
                FiniteGroup::from_table_with_labels(table.clone(), labels.clone())
            }
            GroupFile::Perm { degree, generators } => Ok(from_permutations(*degree, generators)?.group),
            GroupFile::Catalog { name } => {
                catalog::by_name(name).ok_or_else(|| Error::InvalidInput(format!("unknown catalog group {name}")))
            }
        }
    }

    /// The canonical table form, identity at index 0.
    pub fn from_group(g: &FiniteGroup) -> Self {
        GroupFile::Table { order: g.order(), table: g.table().to_vec(), labels: g.labels().map(<[String]>::to_vec) }
    }
}

/// A group given inline or by path.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Path(String),
    Inline(GroupFile),
}

impl GroupRef {
    pub fn load(&self, base: &Path) -> Result<FiniteGroup> {
        match self {
            GroupRef::Path(p) => load_group(&resolve(base, p)),
            GroupRef::Inline(f) => f.build(),
        }
    }
}

pub fn load_group(path: &Path) -> Result<FiniteGroup> {
    read_json::<GroupFile>(path)?.build()
}

/// Element given by index or label.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRef {
    Index(usize),
    Label(String),
}

pub fn parse_element(group: &FiniteGroup, s: &str) -> Result<usize> {
    let s = s.trim();
    if let Ok(i) = s.parse::<usize>() {
        if i < group.order() {
            return Ok(i);
        }
        return Err(Error::InvalidInput(format!("element {i} out of range")));
    }
    group.find(s).ok_or_else(|| Error::InvalidInput(format!("no element labelled {s}")))
}

impl ElementRef {
    pub fn resolve(&self, group: &FiniteGroup) -> Result<usize> {
        match self {
            ElementRef::Index(i) => parse_element(group, &i.to_string()),
            ElementRef::Label(s) => parse_element(group, s),
        }
    }
}

/// Subgroup generated by a comma-separated list of indices or labels.
/// Labels containing commas are not supported here.
pub fn parse_subgroup(group: &FiniteGroup, list: &str) -> Result<Subgroup> {
    let gens = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_element(group, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(group.subgroup_closure(&gens))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepresentationFile {
    pub group: GroupRef,
    pub degree: usize,
    pub matrices: BTreeMap<String, MatrixJson>,
}

/// Loads a representation; missing elements are generated from the given ones.
pub fn load_representation(path: &Path) -> Result<Representation> {
    let f: RepresentationFile = read_json(path)?;
    let group = Arc::new(f.group.load(&dir_of(path))?);
    let mut known: Vec<Option<CMat>> = vec![None; group.order()];
    for (k, m) in &f.matrices {
        let m = matrix_from_json(m)?;
        if m.nrows() != f.degree || m.ncols() != f.degree {
            return Err(Error::InvalidInput(format!("matrix for {k} is not {0}x{0}", f.degree)));
        }
        known[parse_element(&group, k)?] = Some(m);
    }
    known[0].get_or_insert_with(|| crate::linalg::eye(f.degree));
    let gens: Vec<usize> = (0..group.order()).filter(|&g| known[g].is_some()).collect();
    let mut i = 0;
    let mut frontier = gens.clone();
    while i < frontier.len() {
        let x = frontier[i];
        for &s in &gens {
            let y = group.mul(x, s);
            if known[y].is_none() {
                known[y] = Some(known[x].as_ref().unwrap() * known[s].as_ref().unwrap());
                frontier.push(y);
            }
        }
        i += 1;
    }
    let mats = known
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvalidInput("given matrices do not generate the group".into()))?;
    Representation::new(group, mats)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassJson {
    pub representative: usize,
    pub label: String,
    pub size: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacterTableJson {
    pub order: usize,
    pub classes: Vec<ClassJson>,
    pub degrees: Vec<usize>,
    pub characters: Vec<Vec<[f64; 2]>>,
}

pub fn character_table_json(group: &FiniteGroup, t: &CharacterTable) -> CharacterTableJson {
    let clean = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x };
    CharacterTableJson {
        order: group.order(),
        classes: t
            .class_representatives
            .iter()
            .zip(&t.class_sizes)
            .map(|(&r, &s)| ClassJson { representative: r, label: group.label(r), size: s })
            .collect(),
        degrees: t.degrees.clone(),
        characters: t.rows.iter().map(|r| r.values.iter().map(|v| [clean(v.re), clean(v.im)]).collect()).collect(),
    }
}

/// `[[k, m_k], ...]`.
pub type SpecJson = Vec<[usize; 2]>;

pub fn load_spec(path: &Path) -> Result<Vec<(usize, usize)>> {
    Ok(read_json::<SpecJson>(path)?.into_iter().map(|[k, m]| (k, m)).collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub group: GroupRef,
    pub subgroup: Vec<ElementRef>,
    pub spec: SpecJson,
}

impl ModelDescriptor {
    pub fn build(&self, base: &Path) -> Result<CanonicalModel> {
        let group = Arc::new(self.group.load(base)?);
        let gens = self.subgroup.iter().map(|e| e.resolve(&group)).collect::<Result<Vec<_>>>()?;
        let h = group.subgroup_closure(&gens);
        let pairs: Vec<(usize, usize)> = self.spec.iter().map(|&[k, m]| (k, m)).collect();
        build_model(group, h, &pairs)
    }

    pub fn describe(model: &CanonicalModel) -> Self {
        ModelDescriptor {
            group: GroupRef::Inline(GroupFile::from_group(model.group())),
            subgroup: model.subgroup().elements().iter().map(|&x| ElementRef::Index(x)).collect(),
            spec: model.slots().iter().map(|s| [s.irrep, s.multiplicity]).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionEntry {
    pub element: usize,
    pub permutation: Vec<usize>,
    pub matrices: Vec<MatrixJson>,
}

/// Per element: base permutation and fiber matrices.
pub fn action_tables(model: &CanonicalModel) -> Vec<ActionEntry> {
    (0..model.group().order())
        .map(|g| {
            let (permutation, mats): (Vec<usize>, Vec<CMat>) = (0..model.base_points()).map(|p| model.act(g, p)).unzip();
            ActionEntry { element: g, permutation, matrices: mats.iter().map(matrix_to_json).collect() }
        })
        .collect()
}

pub fn spec_irreps(group: &FiniteGroup, h: &Subgroup, pairs: &[(usize, usize)]) -> Result<RepSpec> {
    RepSpec::from_pairs(subgroup_irreps(group, h)?, pairs)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutElementJson {
    pub a: usize,
    #[serde(rename = "fiberMaps")]
    pub fiber_maps: BTreeMap<String, MatrixJson>,
}

impl AutElementJson {
    pub fn from_element(a: &AutElement) -> Self {
        AutElementJson {
            a: a.a(),
            fiber_maps: a.maps().iter().enumerate().map(|(p, m)| (p.to_string(), matrix_to_json(m))).collect(),
        }
    }

    pub fn build(&self, model: &Arc<CanonicalModel>) -> Result<AutElement> {
        let n = model.base_points();
        let mut maps = vec![None; n];
        for (k, m) in &self.fiber_maps {
            let p: usize = k.parse().map_err(|_| Error::InvalidInput(format!("base point key {k}")))?;
            if p >= n {
                return Err(Error::InvalidInput(format!("base point {p} out of range")));
            }
            maps[p] = Some(matrix_from_json(m)?);
        }
        if self.a >= n {
            return Err(Error::InvalidInput(format!("translation {} out of range", self.a)));
        }
        if maps.iter().all(Option::is_some) {
            return AutElement::new(model.clone(), self.a, maps.into_iter().map(Option::unwrap).collect());
        }
        let base = maps[0].clone().ok_or_else(|| Error::InvalidInput("fiber map over base point 0 missing".into()))?;
        AutElement::from_base_map(model.clone(), self.a, base)
    }
}

/// A complex given inline or by path.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexRef {
    Path(String),
    Inline(BaseComplex),
}

impl ComplexRef {
    pub fn load(&self, base: &Path) -> Result<BaseComplex> {
        match self {
            ComplexRef::Path(p) => read_json(&resolve(base, p)),
            ComplexRef::Inline(c) => Ok(c.clone()),
        }
    }
}

/// `Aut_G(X_ρ)`-valued transition data, one label per edge of the complex in
/// its stored order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexRef>,
    pub model: ModelDescriptor,
    pub labels: Vec<AutElementJson>,
}

pub struct LoadedCocycle {
    pub model: Arc<CanonicalModel>,
    pub cocycle: EdgeCocycle<AutElement>,
}

/// `complex` overrides the complex named inside the cocycle file.
pub fn load_cocycle(path: &Path, complex: Option<BaseComplex>) -> Result<LoadedCocycle> {
    let f: CocycleFile = read_json(path)?;
    let base = dir_of(path);
    let complex = match (complex, &f.complex) {
        (Some(c), _) => c,
        (None, Some(r)) => r.load(&base)?,
        (None, None) => return Err(Error::InvalidInput("no complex given".into())),
    };
    let model = Arc::new(f.model.build(&base)?);
    let labels = f.labels.iter().map(|l| l.build(&model)).collect::<Result<Vec<_>>>()?;
    Ok(LoadedCocycle { cocycle: EdgeCocycle::new(complex, labels)?, model })
}

pub fn cocycle_file(model: &CanonicalModel, cocycle: &EdgeCocycle<AutElement>) -> CocycleFile {
    CocycleFile {
        complex: Some(ComplexRef::Inline(cocycle.complex.clone())),
        model: ModelDescriptor::describe(model),
        labels: cocycle.labels.iter().map(AutElementJson::from_element).collect(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorAction {
    pub element: ElementRef,
    pub permutation: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GSpaceFile {
    pub group: GroupRef,
    pub points: usize,
    pub generators: Vec<GeneratorAction>,
}

impl GSpaceFile {
    pub fn build(&self, base: &Path) -> Result<FiniteGSpace> {
        let group = Arc::new(self.group.load(base)?);
        let gens = self
            .generators
            .iter()
            .map(|g| Ok((g.element.resolve(&group)?, g.permutation.clone())))
            .collect::<Result<Vec<_>>>()?;
        FiniteGSpace::from_generators(group, self.points, &gens)
    }

    pub fn describe(space: &FiniteGSpace) -> Self {
        let g = space.group();
        GSpaceFile {
            group: GroupRef::Inline(GroupFile::from_group(g)),
            points: space.points(),
            generators: g
                .generators()
                .into_iter()
                .map(|x| GeneratorAction { element: ElementRef::Index(x), permutation: space.permutation(x).to_vec() })
                .collect(),
        }
    }
}

/// `maps[g][p]` is the matrix `fiber(p) → fiber(g·p)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleFile {
    pub space: GSpaceFile,
    pub maps: Vec<Vec<MatrixJson>>,
}

impl BundleFile {
    pub fn build(&self, base: &Path) -> Result<EquivariantBundle> {
        let space = self.space.build(base)?;
        let maps = self
            .maps
            .iter()
            .map(|row| row.iter().map(matrix_from_json).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        EquivariantBundle::new(space, maps)
    }

    pub fn describe(bundle: &EquivariantBundle) -> Self {
        let base = bundle.base();
        BundleFile {
            space: GSpaceFile::describe(base),
            maps: (0..bundle.group().order())
                .map(|g| (0..base.points()).map(|p| matrix_to_json(bundle.map(g, p))).collect())
                .collect(),
        }
    }
}
