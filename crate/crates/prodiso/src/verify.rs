//! The desk verification suite: seven self-contained checks exercising
//! the whole library on small exactly-known instances. The CLI `verify`
//! subcommand and the acceptance test target both run these, so a
//! criterion's verdict is identical wherever it is invoked.

use std::collections::HashSet;
use std::sync::Arc;
use std::time::Instant;

use crate::decompose::{
    check_slice_images, decompose, factorize, slice_quad_check, slice_triple_check,
    DecomposeError, IrreducibilityWitness, ReducibilityCertificate, SliceImageReport,
};
use crate::isometry::{enumerate_isometries, Isometry, SearchConfig, Space};
use crate::metric::{find_chain, MetricSpace};
use crate::product::{ProductPoint, ProductSpace, SliceClass};
use crate::quad::{embed_quad, find_quad_embedding, max_quad_dimension};
use crate::rat::Rat;

/// Outcome of one criterion run.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub millis: u128,
}

/// The seven desk criteria: id, short name, and what each requires.
pub const CRITERIA: [(usize, &str, &str); 7] = [
    (1, "reducibility-sweep",
     "every isometry of a 2- or 3-factor path product (sizes 3-5) is reducible and round-trips"),
    (2, "two-point-contrast",
     "the two-point square splits into 8 reducible and 16 irreducible isometries with verified witnesses"),
    (3, "slice-dichotomies",
     "slice images are axis-consistent with the decomposition, and triple/cycle dichotomies hold exhaustively"),
    (4, "embedding-certification",
     "chain embeddings into fifth-power paths are admissible and standard with unit tip multiplicities"),
    (5, "quad-dimension",
     "the largest embeddable quadrilateral dimension matches the factor count on path powers and mixed products"),
    (6, "structure-axioms",
     "product matrices validate and isometry enumerations form groups"),
    (7, "factorization-oracle",
     "the 15-point grid factors uniquely into a path pair; single paths do not factor"),
];

pub fn run_all(search: &SearchConfig) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|&(id, _, _)| run_criterion(id, search)).collect()
}

pub fn run_criterion(id: usize, search: &SearchConfig) -> CriterionResult {
    let (_, name, _) = CRITERIA[id - 1];
    let start = Instant::now();
    let (passed, details) = match id {
        1 => reducibility_sweep(search),
        2 => two_point_contrast(search),
        3 => slice_dichotomies(search),
        4 => embedding_certification(search),
        5 => quad_dimension(search),
        6 => structure_axioms(search),
        7 => factorization_oracle(search),
        _ => (false, format!("no criterion {id}")),
    };
    CriterionResult { id, name, passed, details, millis: start.elapsed().as_millis() }
}

fn path_product(sizes: &[usize]) -> Arc<Space> {
    let factors = sizes
        .iter()
        .map(|&s| MetricSpace::path_graph(s, Rat::one()).expect("paths are metric"))
        .collect();
    Arc::new(Space::Product(ProductSpace::new(factors).expect("nonempty")))
}

/// All size tuples in `3..=5` of the given arity, lexicographically.
fn sweep_sizes(arity: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut sizes = vec![3usize; arity];
    loop {
        out.push(sizes.clone());
        let mut i = arity;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            sizes[i] += 1;
            if sizes[i] <= 5 {
                break;
            }
            sizes[i] = 3;
        }
    }
}

fn reducibility_sweep(search: &SearchConfig) -> (bool, String) {
    let mut products = 0usize;
    let mut total = 0usize;
    let mut known = Vec::new();
    for arity in [2usize, 3] {
        for sizes in sweep_sizes(arity) {
            let space = path_product(&sizes);
            let isos = match enumerate_isometries(&space, &space, search) {
                Ok(isos) => isos,
                Err(e) => return (false, format!("enumeration failed on {sizes:?}: {e}")),
            };
            for f in &isos {
                match decompose(f) {
                    Ok(ReducibilityCertificate::Reducible(d)) => {
                        match d.reconstruct() {
                            Ok(rebuilt) if &rebuilt == f => {}
                            Ok(_) => {
                                return (false, format!("round trip differs on {sizes:?}"));
                            }
                            Err(e) => {
                                return (false, format!("rebuild failed on {sizes:?}: {e}"));
                            }
                        }
                    }
                    Ok(other) => {
                        return (
                            false,
                            format!("isometry of {sizes:?} was not reducible: {other:?}"),
                        );
                    }
                    Err(e) => return (false, format!("decompose failed on {sizes:?}: {e}")),
                }
            }
            if sizes == [3, 3] {
                known.push(("3x3", isos.len(), 8));
            }
            if sizes == [5, 3] {
                known.push(("5x3", isos.len(), 4));
            }
            products += 1;
            total += isos.len();
        }
    }
    for (label, got, expected) in &known {
        if got != expected {
            return (false, format!("expected {expected} isometries for {label}, got {got}"));
        }
    }
    (
        true,
        format!(
            "{products} products, {total} isometries, all reducible and round-tripping \
             (3x3 gives 8, 5x3 gives 4)"
        ),
    )
}

fn two_point_contrast(search: &SearchConfig) -> (bool, String) {
    let square = path_product(&[2, 2]);
    let isos = match enumerate_isometries(&square, &square, search) {
        Ok(isos) => isos,
        Err(e) => return (false, format!("enumeration failed: {e}")),
    };
    if isos.len() != 24 {
        return (false, format!("expected 24 isometries, got {}", isos.len()));
    }
    let product = square.as_product().expect("built as a product");
    let mut reducible = 0;
    let mut irreducible = 0;
    for f in &isos {
        match decompose(f) {
            Ok(ReducibilityCertificate::Reducible(d)) => {
                reducible += 1;
                match d.reconstruct() {
                    Ok(rebuilt) if &rebuilt == f => {}
                    _ => return (false, "reducible certificate failed to round-trip".into()),
                }
            }
            Ok(ReducibilityCertificate::Irreducible(witness)) => {
                irreducible += 1;
                if let Err(msg) = recheck_witness(f, product, &witness) {
                    return (false, format!("witness failed re-verification: {msg}"));
                }
            }
            Ok(ReducibilityCertificate::HypothesisViolation(v)) => {
                return (false, format!("unexpected hypothesis violation: {v:?}"));
            }
            Err(e) => return (false, format!("decompose failed: {e}")),
        }
    }
    let passed = reducible == 8 && irreducible == 16;
    (
        passed,
        format!("24 isometries: {reducible} reducible, {irreducible} irreducible, witnesses re-verified"),
    )
}

/// Confirms an irreducibility witness against the map it indicts,
/// independently of the code that produced it.
fn recheck_witness(
    f: &Isometry,
    product: &ProductSpace,
    witness: &IrreducibilityWitness,
) -> Result<(), String> {
    match witness {
        IrreducibilityWitness::ImageNotSlice { slice, image, image_axes, .. } => {
            let pts = slice.points(product);
            let expected: Vec<ProductPoint> = pts
                .iter()
                .map(|p| {
                    let idx = product.index_of(p).map_err(|e| e.to_string())?;
                    Ok::<_, String>(product.point(f.apply(idx)))
                })
                .collect::<Result<_, _>>()?;
            if !expected.contains(&image.0) || !expected.contains(&image.1) {
                return Err("witness pair is not the slice's image".into());
            }
            match product
                .classify_slice(&[image.0.clone(), image.1.clone()])
                .map_err(|e| e.to_string())?
            {
                SliceClass::NotASlice { axes, .. } if &axes == image_axes => Ok(()),
                other => Err(format!("image classified as {other:?}")),
            }
        }
        IrreducibilityWitness::AxisCollision { first_axis, second_axis, image_axis } => {
            for &axis in [first_axis, second_axis].iter() {
                let slice = product.first_pair_slice(*axis).ok_or("no slice")?;
                let pts = slice.points(product);
                let a = product.point(f.apply(product.index_of(&pts[0]).map_err(|e| e.to_string())?));
                let b = product.point(f.apply(product.index_of(&pts[1]).map_err(|e| e.to_string())?));
                match product.classify_slice(&[a, b]).map_err(|e| e.to_string())? {
                    SliceClass::Slice(s) if s.axis() == *image_axis => {}
                    other => return Err(format!("axis {axis} image was {other:?}")),
                }
            }
            Ok(())
        }
        IrreducibilityWitness::FactorMapInvalid { source, .. } => {
            Err(format!("unexpected for two-point factors: {source}"))
        }
        IrreducibilityWitness::ReconstructMismatch { point, expected, got } => {
            let idx = product.index_of(point).map_err(|e| e.to_string())?;
            if &product.point(f.apply(idx)) == expected && expected != got {
                Ok(())
            } else {
                Err("mismatch witness does not match the map".into())
            }
        }
    }
}

fn slice_dichotomies(search: &SearchConfig) -> (bool, String) {
    // Axis maps from the slice sweep must agree with the decomposition
    // on every isometry of the reducibility sweep.
    let mut checked = 0usize;
    for arity in [2usize, 3] {
        for sizes in sweep_sizes(arity) {
            let space = path_product(&sizes);
            let isos = match enumerate_isometries(&space, &space, search) {
                Ok(isos) => isos,
                Err(e) => return (false, format!("enumeration failed on {sizes:?}: {e}")),
            };
            for f in &isos {
                let report = match check_slice_images(f) {
                    Ok(r) => r,
                    Err(e) => return (false, format!("slice sweep failed: {e}")),
                };
                let axis_map = match report {
                    SliceImageReport::Consistent { axis_map } => axis_map,
                    other => return (false, format!("slice sweep was inconsistent: {other:?}")),
                };
                let perm = match decompose(f) {
                    Ok(ReducibilityCertificate::Reducible(d)) => d.perm().to_vec(),
                    other => return (false, format!("expected reducible, got {other:?}")),
                };
                if axis_map != perm {
                    return (
                        false,
                        format!("axis map {axis_map:?} disagrees with decomposition {perm:?}"),
                    );
                }
                checked += 1;
            }
        }
    }

    // Exhaustive dichotomies on the 3 x 3 grid: triples of pairwise
    // slices share an axis; slice 4-cycles use one axis or two opposite
    // pairs.
    let grid = path_product(&[3, 3]);
    let p = grid.as_product().expect("built as a product");
    let points: Vec<ProductPoint> = p.points().collect();
    let mut triples = 0usize;
    let mut quads = 0usize;
    for a in &points {
        for b in &points {
            for c in &points {
                match slice_triple_check(p, a, b, c) {
                    Ok(_) => triples += 1,
                    Err(DecomposeError::AxesDichotomyFailed { axes }) => {
                        return (false, format!("triple dichotomy failed with axes {axes:?}"));
                    }
                    Err(_) => {}
                }
                for d in &points {
                    match slice_quad_check(p, a, b, c, d) {
                        Ok(_) => quads += 1,
                        Err(DecomposeError::AxesDichotomyFailed { axes }) => {
                            return (
                                false,
                                format!("cycle dichotomy failed with axes {axes:?}"),
                            );
                        }
                        Err(_) => {}
                    }
                }
            }
        }
    }
    (
        true,
        format!(
            "{checked} isometries matched; {triples} triples and {quads} cycles obeyed the dichotomies"
        ),
    )
}

fn embedding_certification(search: &SearchConfig) -> (bool, String) {
    for m in 1..=3usize {
        let sizes = vec![5usize; m];
        let space = path_product(&sizes);
        let p = space.as_product().expect("built as a product");
        let chains: Vec<_> = p
            .factors()
            .iter()
            .map(|f| find_chain(f, Rat::from(4), Rat::one()).expect("paths have full chains"))
            .collect();
        let e = match embed_quad(p, &chains, Rat::one()) {
            Ok(e) => e,
            Err(err) => return (false, format!("embedding failed for m={m}: {err}")),
        };
        if !e.is_isometric_on_vertices() {
            return (false, format!("m={m} chain embedding is not isometric on vertices"));
        }
        if !e.is_admissible() {
            return (false, format!("m={m} chain embedding is not admissible"));
        }
        if !e.is_standard() {
            return (false, format!("m={m} chain embedding is not standard"));
        }
        for j in 0..m {
            let q = e.q_statistic(j);
            if q != 1 {
                return (false, format!("m={m} tip pair {j} has multiplicity {q}, want 1"));
            }
        }
        // Any embedding the search finds must respect the counting
        // bound: tip separations use at most m axes in total.
        match find_quad_embedding(p, m, Rat::one(), Rat::one(), search) {
            Ok(Some(found)) => {
                let total: usize = (0..m).map(|j| found.q_statistic(j)).sum();
                if total > m {
                    return (
                        false,
                        format!("search embedding for m={m} has multiplicity sum {total} > {m}"),
                    );
                }
            }
            Ok(None) => return (false, format!("no embedding found at m={m}")),
            Err(e) => return (false, format!("search failed at m={m}: {e}")),
        }
    }
    (true, "m=1,2,3 chain embeddings admissible, standard, unit multiplicities; search embeddings obey the counting bound".into())
}

fn quad_dimension(search: &SearchConfig) -> (bool, String) {
    let mut lines = Vec::new();
    let mut passed = true;
    for m in 1..=3usize {
        let space = path_product(&vec![5; m]);
        let p = space.as_product().expect("built as a product");
        match max_quad_dimension(p, Rat::one(), Rat::one(), search) {
            Ok(dim) => {
                if dim != m {
                    passed = false;
                }
                lines.push(format!("fifth-power m={m}: {dim} (required {m})"));
            }
            Err(e) => return (false, format!("search failed on the {m}-fold power: {e}")),
        }
    }
    let mixed_53 = path_product(&[5, 3]);
    let mixed_35 = path_product(&[3, 5]);
    let d53 = match max_quad_dimension(
        mixed_53.as_product().unwrap(),
        Rat::one(),
        Rat::one(),
        search,
    ) {
        Ok(d) => d,
        Err(e) => return (false, format!("search failed on 5x3: {e}")),
    };
    let d35 = match max_quad_dimension(
        mixed_35.as_product().unwrap(),
        Rat::one(),
        Rat::one(),
        search,
    ) {
        Ok(d) => d,
        Err(e) => return (false, format!("search failed on 3x5: {e}")),
    };
    if d53 != 2 {
        passed = false;
    }
    if d35 != 2 {
        passed = false;
    }
    lines.push(format!("5x3: {d53} (required 2), 3x5: {d35} (required 2)"));
    lines.push(format!(
        "order invariance: {}",
        if d53 == d35 { "holds" } else { "violated" }
    ));
    (passed, lines.join("; "))
}

fn structure_axioms(search: &SearchConfig) -> (bool, String) {
    let mut validated = 0usize;
    let mut groups = 0usize;
    for arity in [2usize, 3] {
        for sizes in sweep_sizes(arity) {
            let space = path_product(&sizes);
            let p = space.as_product().expect("built as a product");
            if let Err(e) = p.induced_space() {
                return (false, format!("induced matrix of {sizes:?} failed: {e}"));
            }
            validated += 1;

            let isos = match enumerate_isometries(&space, &space, search) {
                Ok(isos) => isos,
                Err(e) => return (false, format!("enumeration failed on {sizes:?}: {e}")),
            };
            let members: HashSet<Vec<usize>> =
                isos.iter().map(|f| f.map().to_vec()).collect();
            let identity: Vec<usize> = (0..space.len()).collect();
            if !members.contains(&identity) {
                return (false, format!("identity missing for {sizes:?}"));
            }
            for f in &isos {
                let inverse = f.invert().map().to_vec();
                if !members.contains(&inverse) {
                    return (false, format!("inverse escapes the group for {sizes:?}"));
                }
                for g in &isos {
                    let composed: Vec<usize> =
                        (0..space.len()).map(|i| f.apply(g.apply(i))).collect();
                    if !members.contains(&composed) {
                        return (false, format!("composition escapes the group for {sizes:?}"));
                    }
                }
            }
            groups += 1;
        }
    }
    (
        true,
        format!("{validated} product matrices validated; {groups} enumerations closed with identity and inverses"),
    )
}

fn factorization_oracle(search: &SearchConfig) -> (bool, String) {
    let p5 = MetricSpace::path_graph(5, Rat::one()).expect("path");
    let p3 = MetricSpace::path_graph(3, Rat::one()).expect("path");
    let grid = ProductSpace::new(vec![p5.clone(), p3.clone()])
        .expect("nonempty")
        .induced_space()
        .expect("products validate");
    let found = match factorize(&grid, grid.len(), search) {
        Ok(found) => found,
        Err(e) => return (false, format!("factorization search failed: {e}")),
    };
    if found.len() != 1 {
        return (false, format!("expected exactly one factorization, got {}", found.len()));
    }
    let mut sizes: Vec<usize> = found[0].product.sizes().to_vec();
    sizes.sort_unstable();
    if sizes != vec![3, 5] {
        return (false, format!("expected factor sizes 3 and 5, got {sizes:?}"));
    }
    for factor in found[0].product.factors() {
        let reference = if factor.len() == 5 { &p5 } else { &p3 };
        let from = Arc::new(Space::Metric(factor.clone()));
        let to = Arc::new(Space::Metric(reference.clone()));
        match crate::isometry::first_isometry(&from, &to, search) {
            Ok(Some(_)) => {}
            Ok(None) => {
                return (
                    false,
                    format!("factor of size {} is not a unit path", factor.len()),
                );
            }
            Err(e) => return (false, format!("factor comparison failed: {e}")),
        }
    }
    match factorize(&p5, p5.len(), search) {
        Ok(none) if none.is_empty() => {}
        Ok(some) => return (false, format!("path unexpectedly factored {} ways", some.len())),
        Err(e) => return (false, format!("path factorization failed: {e}")),
    }
    (true, "grid factors uniquely into paths of 5 and 3; the 5-path does not factor".into())
}
