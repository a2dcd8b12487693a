use std::sync::Arc;

use crate::error::Result;
use crate::group::{catalog, FiniteGroup, Subgroup, DEFAULT_SUBGROUP_BOUND};
use crate::model::{build_model, subgroup_irreps, CanonicalModel, RepSpec};
use crate::nonnormal::{build_gx, nonnormal_catalog, GXModel};
use crate::rep::Irreducibles;

/// A normal stationary subgroup with one fiber specification.
#[derive(Debug, Clone)]
pub struct NormalCase {
    pub name: String,
    pub group: Arc<FiniteGroup>,
    pub subgroup: Subgroup,
    pub spec: Vec<(usize, usize)>,
}

impl NormalCase {
    pub fn model(&self) -> Result<Arc<CanonicalModel>> {
        Ok(Arc::new(build_model(self.group.clone(), self.subgroup.clone(), &self.spec)?))
    }
}

/// A non-normal stationary subgroup with one fiber specification.
#[derive(Debug, Clone)]
pub struct NonNormalCase {
    pub name: String,
    pub group: Arc<FiniteGroup>,
    pub subgroup: Subgroup,
    pub spec: Vec<(usize, usize)>,
}

impl NonNormalCase {
    pub fn gx(&self) -> Result<GXModel> {
        let irreps = subgroup_irreps(&self.group, &self.subgroup)?;
        build_gx(self.group.clone(), &self.subgroup, RepSpec::from_pairs(irreps, &self.spec)?)
    }
}

fn nontrivial(irreps: &Irreducibles) -> Vec<usize> {
    (0..irreps.len()).filter(|&k| k != irreps.trivial_index()).collect()
}

pub(crate) fn regular_pairs(irreps: &Irreducibles) -> Vec<(usize, usize)> {
    nontrivial(irreps).into_iter().map(|k| (k, irreps.degree(k))).collect()
}

/// Single irreducible, two irreducibles (or one twice when there is only
/// one), and regular multiplicities.
pub fn standard_specs(irreps: &Irreducibles) -> Vec<(&'static str, Vec<(usize, usize)>)> {
    let nt = nontrivial(irreps);
    if nt.is_empty() {
        return Vec::new();
    }
    let two = if nt.len() >= 2 { vec![(nt[0], 1), (nt[1], 1)] } else { vec![(nt[0], 2)] };
    vec![("single", vec![(nt[0], 1)]), ("two", two), ("regular", regular_pairs(irreps))]
}

/// Every nontrivial normal subgroup of every catalog group, with the
/// standard specs.
pub fn normal_cases() -> Result<Vec<NormalCase>> {
    let mut out = Vec::new();
    for (gname, g) in catalog::all() {
        let g = Arc::new(g);
        for h in g.all_subgroups(DEFAULT_SUBGROUP_BOUND)? {
            if h.order() == 1 || !g.is_normal(&h) {
                continue;
            }
            let irreps = subgroup_irreps(&g, &h)?;
            for (kind, spec) in standard_specs(&irreps) {
                out.push(NormalCase {
                    name: format!("{gname}/{} {kind}", describe(&g, &h)),
                    group: g.clone(),
                    subgroup: h.clone(),
                    spec,
                });
            }
        }
    }
    Ok(out)
}

pub(crate) fn describe(g: &FiniteGroup, h: &Subgroup) -> String {
    if h.order() == g.order() {
        return "G".into();
    }
    let labels: Vec<String> = h.elements().iter().skip(1).map(|&x| g.label(x)).collect();
    format!("{{e,{}}}", labels.join(","))
}

/// Models on which `G` permutes no irreducible of `H`, so every
/// translation lifts to every single-block factor.
pub fn restriction_models() -> Result<Vec<NormalCase>> {
    let make = |name: &str, g: FiniteGroup, gens: &[usize], spec: Option<Vec<(usize, usize)>>| -> Result<NormalCase> {
        let g = Arc::new(g);
        let h = g.subgroup_closure(gens);
        let spec = match spec {
            Some(s) => s,
            None => regular_pairs(&*subgroup_irreps(&g, &h)?),
        };
        Ok(NormalCase { name: name.to_string(), group: g, subgroup: h, spec })
    };
    let d4 = catalog::d4();
    let d4_center = d4.find("(1 3)(2 4)").expect("catalog label");
    let q8 = catalog::q8();
    let q8_center = (1..q8.order()).find(|&x| q8.element_order(x) == 2).expect("unique involution");
    Ok(vec![
        make("Z6/Z3 regular", FiniteGroup::cyclic(6), &[2], None)?,
        make("Z2xZ4/Z4 regular", catalog::z2().direct_product(&catalog::z4()), &[1], None)?,
        make("Z3xZ3/Z3 regular", catalog::z3().direct_product(&catalog::z3()), &[1], None)?,
        make("D4/center regular", d4, &[d4_center], None)?,
        make("Q8/center regular", q8, &[q8_center], None)?,
        make("Z4/Z2 doubled", catalog::z4(), &[2], Some(vec![(1, 2)]))?,
        make("S3/S3 regular", catalog::s3(), &[1, 2, 3, 4, 5], None)?,
    ])
}

/// Catalog non-normal instances with regular multiplicities, each single
/// irreducible, and the first irreducible twice.
pub fn nonnormal_cases() -> Result<Vec<NonNormalCase>> {
    let mut out = Vec::new();
    for inst in nonnormal_catalog() {
        let irreps = subgroup_irreps(&inst.group, &inst.subgroup)?;
        let nt = nontrivial(&irreps);
        let mut specs = vec![("regular".to_string(), regular_pairs(&irreps))];
        for &k in &nt {
            let s = vec![(k, 1)];
            if !specs.iter().any(|x| x.1 == s) {
                specs.push((format!("single {k}"), s));
            }
        }
        specs.push(("doubled".into(), vec![(nt[0], 2)]));
        for (kind, spec) in specs {
            out.push(NonNormalCase {
                name: format!("{} {kind}", inst.name),
                group: inst.group.clone(),
                subgroup: inst.subgroup.clone(),
                spec,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_lists_build() {
        let normal = normal_cases().unwrap();
        assert!(normal.len() >= 60);
        for c in &normal {
            assert!(c.model().is_ok(), "{}", c.name);
        }
        for c in restriction_models().unwrap() {
            assert!(c.group.is_normal(&c.subgroup), "{}", c.name);
            assert!(c.model().is_ok(), "{}", c.name);
        }
        let nn = nonnormal_cases().unwrap();
        assert!(nn.len() >= 9);
        for c in &nn {
            assert!(!c.group.is_normal(&c.subgroup), "{}", c.name);
        }
    }
}
