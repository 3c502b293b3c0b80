//! Non-expansive maps and the sup-metric on hom-sets.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::extrat::ExtRat;
use crate::space::Space;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("maps do not share domain and codomain")]
    MismatchedEndpoints,
    #[error("map has {len} entries for a domain of {expected} points")]
    WrongLength { len: usize, expected: usize },
    #[error("point {point} is sent to {value}, outside a codomain of {cod} points")]
    OutOfRange { point: usize, value: usize, cod: usize },
    #[error("points {0} and {1} are pushed further apart")]
    Expanding(usize, usize),
}

pub(crate) fn same_space(a: &Arc<Space>, b: &Arc<Space>) -> bool {
    Arc::ptr_eq(a, b) || a.same_metric(b)
}

/// A non-expansive map `dom → cod`, stored as the image index of each point.
#[derive(Clone)]
pub struct MetMap {
    dom: Arc<Space>,
    cod: Arc<Space>,
    map: Vec<usize>,
}

impl MetMap {
    pub fn new(dom: Arc<Space>, cod: Arc<Space>, map: Vec<usize>) -> Result<MetMap, MorphismError> {
        if map.len() != dom.len() {
            return Err(MorphismError::WrongLength { len: map.len(), expected: dom.len() });
        }
        if let Some((point, &value)) = map.iter().enumerate().find(|(_, &v)| v >= cod.len()) {
            return Err(MorphismError::OutOfRange { point, value, cod: cod.len() });
        }
        for i in 0..map.len() {
            for j in (i + 1)..map.len() {
                if cod.d(map[i], map[j]) > dom.d(i, j) {
                    return Err(MorphismError::Expanding(i, j));
                }
            }
        }
        Ok(MetMap { dom, cod, map })
    }

    pub(crate) fn new_unchecked(dom: Arc<Space>, cod: Arc<Space>, map: Vec<usize>) -> MetMap {
        debug_assert!(MetMap::new(dom.clone(), cod.clone(), map.clone()).is_ok());
        MetMap { dom, cod, map }
    }

    pub fn identity(space: Arc<Space>) -> MetMap {
        let map = (0..space.len()).collect();
        MetMap { dom: space.clone(), cod: space, map }
    }

    /// The map sending every point to `target`.
    pub fn constant(dom: Arc<Space>, cod: Arc<Space>, target: usize) -> Result<MetMap, MorphismError> {
        let map = vec![target; dom.len()];
        MetMap::new(dom, cod, map)
    }

    /// The unique map out of the empty space.
    pub fn from_empty(cod: Arc<Space>) -> MetMap {
        MetMap { dom: Arc::new(Space::empty()), cod, map: Vec::new() }
    }

    pub fn dom(&self) -> &Arc<Space> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<Space> {
        &self.cod
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MetMap) -> Result<MetMap, MorphismError> {
        if !same_space(&inner.cod, &self.dom) {
            return Err(MorphismError::MismatchedEndpoints);
        }
        Ok(self.after(inner))
    }

    /// `self ∘ inner` without the endpoint check.
    pub(crate) fn after(&self, inner: &MetMap) -> MetMap {
        let map = inner.map.iter().map(|&x| self.map[x]).collect();
        MetMap { dom: inner.dom.clone(), cod: self.cod.clone(), map }
    }

    /// The same function viewed with a different (metrically equal) codomain
    /// handle.
    pub(crate) fn with_endpoints(&self, dom: Arc<Space>, cod: Arc<Space>) -> MetMap {
        MetMap { dom, cod, map: self.map.clone() }
    }

    pub fn parallel_to(&self, other: &MetMap) -> bool {
        same_space(&self.dom, &other.dom) && same_space(&self.cod, &other.cod)
    }

    /// Distance-preserving test on pairs of points; this also forces
    /// injectivity because distinct points sit at positive distance.
    pub fn is_isometry(&self) -> bool {
        let n = self.map.len();
        (0..n).all(|i| ((i + 1)..n).all(|j| self.cod.d(self.map[i], self.map[j]) == self.dom.d(i, j)))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        self.map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }
}

/// Sup-distance between two parallel maps; `0` on an empty domain.
pub fn hom_dist(f: &MetMap, g: &MetMap) -> Result<ExtRat, MorphismError> {
    if !f.parallel_to(g) {
        return Err(MorphismError::MismatchedEndpoints);
    }
    Ok(hom_dist_unchecked(f, g))
}

pub(crate) fn hom_dist_unchecked(f: &MetMap, g: &MetMap) -> ExtRat {
    let cod = &f.cod;
    f.map.iter().zip(&g.map).map(|(&x, &y)| cod.d(x, y)).max().cloned().unwrap_or_else(ExtRat::zero)
}

/// `f ∼ε g`.
pub fn is_eps_homotopic(f: &MetMap, g: &MetMap, eps: &ExtRat) -> Result<bool, MorphismError> {
    if !f.parallel_to(g) {
        return Err(MorphismError::MismatchedEndpoints);
    }
    let cod = &f.cod;
    Ok(f.map.iter().zip(&g.map).all(|(&x, &y)| cod.d(x, y) <= eps))
}

pub fn is_isometry(f: &MetMap) -> bool {
    f.is_isometry()
}

impl PartialEq for MetMap {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map && self.parallel_to(other)
    }
}

impl Eq for MetMap {}

impl Hash for MetMap {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.map.hash(state);
    }
}

impl PartialOrd for MetMap {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MetMap {
    /// Lexicographic on the image vector, then on the endpoints.
    fn cmp(&self, other: &Self) -> Ordering {
        self.map.cmp(&other.map).then_with(|| self.dom.cmp(&other.dom)).then_with(|| self.cod.cmp(&other.cod))
    }
}

impl fmt::Debug for MetMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MetMap({}→{}: {:?})", self.dom.len(), self.cod.len(), self.map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(s: Space) -> Arc<Space> {
        Arc::new(s)
    }

    #[test]
    fn expanding_maps_are_rejected() {
        let two1 = arc(Space::two(ExtRat::one()));
        let two2 = arc(Space::two(ExtRat::int(2)));
        assert_eq!(MetMap::new(two1.clone(), two2.clone(), vec![0, 1]), Err(MorphismError::Expanding(0, 1)));
        assert!(MetMap::new(two2, two1.clone(), vec![0, 1]).is_ok());
        assert!(matches!(MetMap::new(two1.clone(), two1, vec![0, 2]), Err(MorphismError::OutOfRange { .. })));
    }

    #[test]
    fn hom_dist_of_points_in_two_eps() {
        let one = arc(Space::point());
        let eps = ExtRat::frac(3, 2);
        let two = arc(Space::two(eps.clone()));
        let a = MetMap::new(one.clone(), two.clone(), vec![0]).unwrap();
        let b = MetMap::new(one, two, vec![1]).unwrap();
        assert_eq!(hom_dist(&a, &a).unwrap(), ExtRat::zero());
        assert_eq!(hom_dist(&a, &b).unwrap(), eps);
    }

    #[test]
    fn hom_dist_on_empty_domain_is_zero() {
        let k = arc(Space::two(ExtRat::one()));
        let f = MetMap::from_empty(k.clone());
        assert_eq!(hom_dist(&f, &f.clone()).unwrap(), ExtRat::zero());
    }

    #[test]
    fn homotopy_thresholds() {
        let one = arc(Space::point());
        let two = arc(Space::two(ExtRat::one()));
        let a = MetMap::new(one.clone(), two.clone(), vec![0]).unwrap();
        let b = MetMap::new(one, two, vec![1]).unwrap();
        assert!(is_eps_homotopic(&a, &a, &ExtRat::zero()).unwrap());
        assert!(is_eps_homotopic(&a, &b, &ExtRat::one()).unwrap());
        assert!(!is_eps_homotopic(&a, &b, &ExtRat::frac(1, 2)).unwrap());
    }

    #[test]
    fn mismatched_endpoints() {
        let one = arc(Space::point());
        let a = MetMap::identity(one.clone());
        let b = MetMap::constant(one, arc(Space::two(ExtRat::one())), 0).unwrap();
        assert_eq!(hom_dist(&a, &b), Err(MorphismError::MismatchedEndpoints));
        assert_eq!(is_eps_homotopic(&a, &b, &ExtRat::INF), Err(MorphismError::MismatchedEndpoints));
    }

    #[test]
    fn isometry_point_test() {
        let two = arc(Space::two(ExtRat::one()));
        assert!(is_isometry(&MetMap::identity(two.clone())));
        let c = MetMap::constant(two, arc(Space::point()), 0).unwrap();
        assert!(!is_isometry(&c));
    }
}
