//! Semimetric reflection and the (ε-)colimit constructions built on it.
//!
//! Every construction here follows one recipe: lay the relevant spaces side
//! by side in a coproduct, lower the distance between the points that must
//! be ε-identified to at most ε, and reflect the resulting semimetric back
//! into generalized metric spaces (shortest paths, then collapse of points at
//! distance zero). Legs are the coproduct injections followed by the
//! reflection's quotient map.

use std::sync::Arc;

use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded};
use crate::construct::{coproduct, Coproduct};
use crate::extrat::ExtRat;
use crate::hom::{HomSearch, MapKind};
use crate::morphism::{same_space, MetMap, MorphismError};
use crate::space::Space;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColimitError {
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("comparison needs delta <= eps (got delta = {delta}, eps = {eps})")]
    DeltaExceedsEps { eps: ExtRat, delta: ExtRat },
    #[error("arrow {arrow}: {reason}")]
    InvalidDiagram { arrow: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemimetricError {
    #[error("matrix has {len} entries for {n} points")]
    WrongSize { n: usize, len: usize },
    #[error("d({0},{0}) is not zero")]
    NonZeroDiagonal(usize),
    #[error("d({0},{1}) != d({1},{0})")]
    Asymmetric(usize, usize),
}

/// A symmetric distance matrix with zero diagonal; neither the triangle
/// inequality nor separation is required.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Semimetric {
    n: usize,
    dist: Vec<ExtRat>,
}

impl Semimetric {
    pub fn new(n: usize, dist: Vec<ExtRat>) -> Result<Semimetric, SemimetricError> {
        if dist.len() != n * n {
            return Err(SemimetricError::WrongSize { n, len: dist.len() });
        }
        for i in 0..n {
            if !dist[i * n + i].is_zero() {
                return Err(SemimetricError::NonZeroDiagonal(i));
            }
            for j in (i + 1)..n {
                if dist[i * n + j] != dist[j * n + i] {
                    return Err(SemimetricError::Asymmetric(i, j));
                }
            }
        }
        Ok(Semimetric { n, dist })
    }

    pub fn from_space(k: &Space) -> Semimetric {
        Semimetric { n: k.len(), dist: k.flat().to_vec() }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn d(&self, i: usize, j: usize) -> &ExtRat {
        &self.dist[i * self.n + j]
    }

    /// Lowers `d(i, j)` (and `d(j, i)`) to `min(d(i, j), value)`.
    pub fn lower(&mut self, i: usize, j: usize, value: &ExtRat) {
        if i == j {
            return;
        }
        let n = self.n;
        if value < &self.dist[i * n + j] {
            self.dist[i * n + j] = value.clone();
            self.dist[j * n + i] = value.clone();
        }
    }
}

/// The metric reflection of a semimetric: `space` is the quotient by
/// zero-distance classes of the shortest-path metric and `class_of` sends each
/// original point to its class.
#[derive(Debug, Clone)]
pub struct Reflection {
    pub space: Arc<Space>,
    pub class_of: Vec<usize>,
    /// Shortest-path distances between the original points.
    pub closure: Vec<ExtRat>,
}

impl Reflection {
    /// The quotient map from a space whose points are those of the reflected
    /// semimetric.
    pub fn projection_from(&self, source: Arc<Space>) -> MetMap {
        MetMap::new_unchecked(source, self.space.clone(), self.class_of.clone())
    }
}

/// Shortest-path closure followed by identification of points at distance
/// zero. Classes are numbered in order of their smallest member.
pub fn reflect(s: &Semimetric) -> Reflection {
    let n = s.n;
    let mut d = s.dist.clone();
    for k in 0..n {
        for i in 0..n {
            if d[i * n + k].is_inf() {
                continue;
            }
            for j in 0..n {
                if d[k * n + j].is_inf() {
                    continue;
                }
                let via = &d[i * n + k] + &d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    let mut class_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(i);
        for j in i..n {
            if class_of[j] == usize::MAX && d[i * n + j].is_zero() {
                class_of[j] = c;
            }
        }
    }
    let m = reps.len();
    let mut q = Vec::with_capacity(m * m);
    for &a in &reps {
        for &b in &reps {
            q.push(d[a * n + b].clone());
        }
    }
    Reflection { space: Arc::new(Space::from_flat_unchecked(m, q)), class_of, closure: d }
}

/// Reflection of `base` after lowering each bridged pair to at most `eps`.
fn bridge_and_reflect(base: &Space, bridges: impl IntoIterator<Item = (usize, usize)>, eps: &ExtRat) -> Reflection {
    let mut s = Semimetric::from_space(base);
    for (i, j) in bridges {
        s.lower(i, j, eps);
    }
    reflect(&s)
}

/// An ε-commutative square `leg_f ∘ g ∼ε leg_g ∘ f` over a span
/// `f: A → B`, `g: A → C`, with `leg_f: C → apex` and `leg_g: B → apex`.
#[derive(Debug, Clone)]
pub struct EpsPushout {
    pub apex: Arc<Space>,
    pub leg_f: MetMap,
    pub leg_g: MetMap,
    pub eps: ExtRat,
}

fn check_span(f: &MetMap, g: &MetMap) -> Result<(), MorphismError> {
    if same_space(f.dom(), g.dom()) {
        Ok(())
    } else {
        Err(MorphismError::MismatchedEndpoints)
    }
}

/// The ordinary pushout of `f: A → B` and `g: A → C`.
///
/// Built set-first: `f(a)` and `g(a)` are glued with a union-find, the
/// quotient carries the least distance between representatives, and that
/// semimetric is reflected.
pub fn pushout(f: &MetMap, g: &MetMap) -> Result<EpsPushout, MorphismError> {
    check_span(f, g)?;
    let (b, c) = (f.cod(), g.cod());
    let nb = b.len();
    let total = nb + c.len();
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for a in 0..f.dom().len() {
        let x = find(&mut parent, f.apply(a));
        let y = find(&mut parent, nb + g.apply(a));
        if x != y {
            // keep the smaller index as root so classes are numbered by first member
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            parent[hi] = lo;
        }
    }
    let mut glued = vec![usize::MAX; total];
    let mut count = 0;
    let mut root_class = vec![usize::MAX; total];
    for x in 0..total {
        let r = find(&mut parent, x);
        if root_class[r] == usize::MAX {
            root_class[r] = count;
            count += 1;
        }
        glued[x] = root_class[r];
    }
    let mut dist = vec![ExtRat::INF; count * count];
    for i in 0..count {
        dist[i * count + i] = ExtRat::zero();
    }
    let within = |x: usize, y: usize| -> Option<&ExtRat> {
        match (x < nb, y < nb) {
            (true, true) => Some(b.d(x, y)),
            (false, false) => Some(c.d(x - nb, y - nb)),
            _ => None,
        }
    };
    for x in 0..total {
        for y in 0..total {
            let (p, q) = (glued[x], glued[y]);
            if p == q {
                continue;
            }
            if let Some(v) = within(x, y) {
                if v < &dist[p * count + q] {
                    dist[p * count + q] = v.clone();
                }
            }
        }
    }
    let r = reflect(&Semimetric { n: count, dist });
    let apex = r.space.clone();
    let to_apex = |x: usize| r.class_of[glued[x]];
    let leg_g = MetMap::new_unchecked(b.clone(), apex.clone(), (0..nb).map(to_apex).collect());
    let leg_f = MetMap::new_unchecked(c.clone(), apex.clone(), (nb..total).map(to_apex).collect());
    Ok(EpsPushout { apex, leg_f, leg_g, eps: ExtRat::zero() })
}

/// The ε-pushout of `f: A → B` and `g: A → C`: in `B + C` every distance
/// `d(f a, g a)` is lowered to `eps`, then the semimetric is reflected.
pub fn eps_pushout(f: &MetMap, g: &MetMap, eps: &ExtRat) -> Result<EpsPushout, MorphismError> {
    check_span(f, g)?;
    if eps.is_zero() {
        return pushout(f, g);
    }
    let cp = coproduct(&[f.cod().clone(), g.cod().clone()]);
    let nb = f.cod().len();
    let bridges = (0..f.dom().len()).map(|a| (f.apply(a), nb + g.apply(a)));
    let r = bridge_and_reflect(&cp.space, bridges, eps);
    let q = r.projection_from(cp.space.clone());
    Ok(EpsPushout { apex: r.space.clone(), leg_g: q.after(&cp.injections[0]), leg_f: q.after(&cp.injections[1]), eps: eps.clone() })
}

/// `h: B → apex` with `h ∘ f ∼ε h ∘ g`, universal among such maps.
#[derive(Debug, Clone)]
pub struct EpsCoequalizer {
    pub apex: Arc<Space>,
    pub leg: MetMap,
    pub eps: ExtRat,
}

/// The ε-coequalizer of a parallel pair `f, g: A → B`: lower `d(f a, g a)` to
/// `eps` inside `B` and reflect.
pub fn eps_coequalizer(f: &MetMap, g: &MetMap, eps: &ExtRat) -> Result<EpsCoequalizer, MorphismError> {
    if !f.parallel_to(g) {
        return Err(MorphismError::MismatchedEndpoints);
    }
    let b = f.cod();
    let r = bridge_and_reflect(b, (0..f.dom().len()).map(|a| (f.apply(a), g.apply(a))), eps);
    Ok(EpsCoequalizer { apex: r.space.clone(), leg: r.projection_from(b.clone()), eps: eps.clone() })
}

/// One arrow `D(src) → D(dst)` of a finite diagram.
#[derive(Debug, Clone)]
pub struct Arrow {
    pub src: usize,
    pub dst: usize,
    pub map: MetMap,
}

/// A finite diagram of spaces; arrows are not required to compose.
#[derive(Debug, Clone)]
pub struct FinDiagram {
    objects: Vec<Arc<Space>>,
    arrows: Vec<Arrow>,
}

impl FinDiagram {
    pub fn new(objects: Vec<Arc<Space>>, arrows: Vec<Arrow>) -> Result<FinDiagram, ColimitError> {
        for (k, a) in arrows.iter().enumerate() {
            let bad = |reason: &str| ColimitError::InvalidDiagram { arrow: k, reason: reason.to_string() };
            if a.src >= objects.len() || a.dst >= objects.len() {
                return Err(bad("object index out of range"));
            }
            if !same_space(a.map.dom(), &objects[a.src]) {
                return Err(bad("map domain differs from the source object"));
            }
            if !same_space(a.map.cod(), &objects[a.dst]) {
                return Err(bad("map codomain differs from the target object"));
            }
        }
        // re-anchor maps on the diagram's own object handles
        let arrows =
            arrows.into_iter().map(|a| Arrow { map: a.map.with_endpoints(objects[a.src].clone(), objects[a.dst].clone()), ..a }).collect();
        Ok(FinDiagram { objects, arrows })
    }

    /// The span `B ← A → C` as a three-object diagram (A, B, C).
    pub fn span(f: &MetMap, g: &MetMap) -> Result<FinDiagram, ColimitError> {
        check_span(f, g)?;
        let objects = vec![f.dom().clone(), f.cod().clone(), g.cod().clone()];
        FinDiagram::new(objects, vec![Arrow { src: 0, dst: 1, map: f.clone() }, Arrow { src: 0, dst: 2, map: g.clone() }])
    }

    pub fn objects(&self) -> &[Arc<Space>] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    /// The standard pair `⨆_e D(src e) ⇉ ⨆_i D(i)`: the first map injects
    /// `D(src e)` as itself, the second through `D(e)` into `D(dst e)`.
    pub fn standard_pair(&self) -> (Coproduct, Coproduct, MetMap, MetMap) {
        let objects = coproduct(&self.objects);
        let sources: Vec<Arc<Space>> = self.arrows.iter().map(|a| self.objects[a.src].clone()).collect();
        let edges = coproduct(&sources);
        let direct: Vec<MetMap> = self.arrows.iter().map(|a| objects.injections[a.src].clone()).collect();
        let along: Vec<MetMap> = self.arrows.iter().map(|a| objects.injections[a.dst].after(&a.map)).collect();
        let first = edges.copair(&objects.space, &direct).expect("arrows match their objects");
        let second = edges.copair(&objects.space, &along).expect("arrows match their objects");
        (edges, objects, first, second)
    }
}

/// An ε-colimit with one leg per object of the diagram.
#[derive(Debug, Clone)]
pub struct EpsColimit {
    pub apex: Arc<Space>,
    pub legs: Vec<MetMap>,
    pub eps: ExtRat,
    /// The quotient map from the coproduct of all objects.
    pub quotient: MetMap,
}

/// The ε-colimit: the ε-coequalizer of the standard pair between coproducts.
pub fn eps_colimit(diagram: &FinDiagram, eps: &ExtRat, budget: &Budget) -> Result<EpsColimit, ColimitError> {
    let total: usize = diagram.objects.iter().map(|o| o.len()).sum();
    budget.check_points(total)?;
    let (_, objects, first, second) = diagram.standard_pair();
    let coeq = eps_coequalizer(&first, &second, eps)?;
    let legs = objects.injections.iter().map(|i| coeq.leg.after(i)).collect();
    Ok(EpsColimit { apex: coeq.apex, legs, eps: eps.clone(), quotient: coeq.leg })
}

/// The canonical map `colim_eps D → colim_delta D` for `delta <= eps`.
pub fn comparison(diagram: &FinDiagram, eps: &ExtRat, delta: &ExtRat, budget: &Budget) -> Result<MetMap, ColimitError> {
    if delta > eps {
        return Err(ColimitError::DeltaExceedsEps { eps: eps.clone(), delta: delta.clone() });
    }
    let coarse = eps_colimit(diagram, eps, budget)?;
    let fine = eps_colimit(diagram, delta, budget)?;
    let mut image = vec![usize::MAX; coarse.apex.len()];
    for (x, &c) in coarse.quotient.as_slice().iter().enumerate() {
        if image[c] == usize::MAX {
            image[c] = fine.quotient.apply(x);
        }
    }
    Ok(MetMap::new(coarse.apex, fine.apex, image)?)
}

/// The cylinder `C_K`: two copies of `K` with each `x'` and `x''` at distance
/// `eps`, reflected; `inclusion` is the map `K + K → C_K`.
#[derive(Debug, Clone)]
pub struct Cylinder {
    pub space: Arc<Space>,
    pub doubled: Arc<Space>,
    pub inclusion: MetMap,
}

pub fn cylinder(k: &Arc<Space>, eps: &ExtRat) -> Cylinder {
    let cp = coproduct(&[k.clone(), k.clone()]);
    let n = k.len();
    let r = bridge_and_reflect(&cp.space, (0..n).map(|x| (x, n + x)), eps);
    Cylinder { space: r.space.clone(), inclusion: r.projection_from(cp.space.clone()), doubled: cp.space }
}

impl Cylinder {
    /// A map `h: C_K → L` with `h ∘ inclusion = (f, g)`, if one exists.
    pub fn factor(&self, f: &MetMap, g: &MetMap, budget: &Budget) -> Result<Option<MetMap>, ColimitError> {
        if !f.parallel_to(g) {
            return Err(MorphismError::MismatchedEndpoints.into());
        }
        let n = f.dom().len();
        let mut pins: Vec<Option<usize>> = vec![None; self.space.len()];
        let wanted = f.as_slice().iter().chain(g.as_slice()).copied();
        for (x, y) in wanted.enumerate().take(2 * n) {
            let c = self.inclusion.apply(x);
            match pins[c] {
                Some(prev) if prev != y => return Ok(None),
                _ => pins[c] = Some(y),
            }
        }
        let search = HomSearch::new(self.space.clone(), f.cod().clone(), MapKind::NonExpansive);
        Ok(search.first(&pins, budget)?.map(|image| MetMap::new_unchecked(self.space.clone(), f.cod().clone(), image)))
    }
}
