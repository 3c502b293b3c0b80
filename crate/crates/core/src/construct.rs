//! Products (max-metric) and coproducts (disjoint union at distance `∞`).

use std::sync::Arc;

use crate::budget::{Budget, BudgetExceeded};
use crate::extrat::ExtRat;
use crate::morphism::{same_space, MetMap, MorphismError};
use crate::space::Space;

/// A coproduct with its injections; summand `i` occupies
/// `offsets[i]..offsets[i] + spaces[i].len()`.
#[derive(Debug, Clone)]
pub struct Coproduct {
    pub space: Arc<Space>,
    pub injections: Vec<MetMap>,
    pub offsets: Vec<usize>,
}

pub fn coproduct(spaces: &[Arc<Space>]) -> Coproduct {
    let total: usize = spaces.iter().map(|s| s.len()).sum();
    let mut offsets = Vec::with_capacity(spaces.len());
    let mut dist = vec![ExtRat::INF; total * total];
    let mut offset = 0;
    for s in spaces {
        offsets.push(offset);
        for i in 0..s.len() {
            for j in 0..s.len() {
                dist[(offset + i) * total + offset + j] = s.d(i, j).clone();
            }
        }
        offset += s.len();
    }
    let space = Arc::new(Space::from_flat_unchecked(total, dist));
    let injections =
        spaces.iter().zip(&offsets).map(|(s, &o)| MetMap::new_unchecked(s.clone(), space.clone(), (o..o + s.len()).collect())).collect();
    Coproduct { space, injections, offsets }
}

impl Coproduct {
    /// The copairing `[f_0, …, f_k]: ⨆ S_i → cod`. Every `f_i` must start at
    /// summand `i` and end at `cod`.
    pub fn copair(&self, cod: &Arc<Space>, maps: &[MetMap]) -> Result<MetMap, MorphismError> {
        if maps.len() != self.injections.len() {
            return Err(MorphismError::MismatchedEndpoints);
        }
        let mut image = Vec::with_capacity(self.space.len());
        for (f, inj) in maps.iter().zip(&self.injections) {
            if !same_space(f.dom(), inj.dom()) || !same_space(f.cod(), cod) {
                return Err(MorphismError::MismatchedEndpoints);
            }
            image.extend_from_slice(f.as_slice());
        }
        // cross-summand distances are infinite, so the copairing is non-expansive
        Ok(MetMap::new_unchecked(self.space.clone(), cod.clone(), image))
    }
}

/// A product with its projections. Points are tuples in lexicographic order,
/// first coordinate most significant; `coords[p]` is the tuple of point `p`.
#[derive(Debug, Clone)]
pub struct Product {
    pub space: Arc<Space>,
    pub projections: Vec<MetMap>,
    pub coords: Vec<Vec<usize>>,
}

pub fn product(spaces: &[Arc<Space>], budget: &Budget) -> Result<Product, BudgetExceeded> {
    let mut size: usize = 1;
    for s in spaces {
        size = size.checked_mul(s.len()).ok_or(BudgetExceeded::Points { needed: usize::MAX, limit: budget.max_points })?;
    }
    budget.check_points(size)?;
    let mut coords: Vec<Vec<usize>> = vec![Vec::new()];
    for s in spaces {
        coords = coords
            .into_iter()
            .flat_map(|prefix| {
                (0..s.len()).map(move |x| {
                    let mut t = prefix.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    let mut dist = Vec::with_capacity(size * size);
    for p in &coords {
        for q in &coords {
            let d = spaces.iter().enumerate().map(|(k, s)| s.d(p[k], q[k])).max().cloned().unwrap_or_else(ExtRat::zero);
            dist.push(d);
        }
    }
    let space = Arc::new(Space::from_flat_unchecked(size, dist));
    let projections = spaces
        .iter()
        .enumerate()
        .map(|(k, s)| MetMap::new_unchecked(space.clone(), s.clone(), coords.iter().map(|c| c[k]).collect()))
        .collect();
    Ok(Product { space, projections, coords })
}

impl Product {
    /// The pairing `⟨f_0, …, f_k⟩` into the product.
    pub fn pair(&self, dom: Arc<Space>, maps: &[MetMap]) -> Result<MetMap, MorphismError> {
        if maps.len() != self.projections.len() {
            return Err(MorphismError::MismatchedEndpoints);
        }
        for (f, p) in maps.iter().zip(&self.projections) {
            if !same_space(f.dom(), &dom) || !same_space(f.cod(), p.cod()) {
                return Err(MorphismError::MismatchedEndpoints);
            }
        }
        let image = (0..dom.len())
            .map(|x| {
                let tuple: Vec<usize> = maps.iter().map(|f| f.apply(x)).collect();
                self.coords.binary_search(&tuple).expect("tuple is a product point")
            })
            .collect();
        MetMap::new(dom, self.space.clone(), image)
    }
}
