use crate::error::{Error, Result};
use crate::geometry::LabeledPolytope;
use crate::linalg::{self, Matrix};
use crate::scalar::{near, Scalar};

/// `x ↦ linear · x + translation`, with `facet_map[i]` the facet of the target
/// that facet `i` of the source is carried to.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap<S> {
    pub linear: Matrix<S>,
    pub translation: Vec<S>,
    pub facet_map: Vec<usize>,
}

impl<S: Scalar> AffineMap<S> {
    pub fn apply(&self, x: &[S]) -> Vec<S> {
        linalg::add(&linalg::mat_vec(&self.linear, x), &self.translation)
    }

    /// Re-checks `A(Δ₁) = Δ₂` and `L2_{σ(i)} ∘ A = L1_i` for every facet.
    pub fn verify(&self, from: &LabeledPolytope<S>, to: &LabeledPolytope<S>) -> bool {
        let scale = scale_of(from).max(scale_of(to));
        if linalg::determinant(&self.linear).is_negligible(scale) {
            return false;
        }
        let lt = linalg::transpose(&self.linear);
        for (i, &j) in self.facet_map.iter().enumerate() {
            let pulled = linalg::mat_vec(&lt, &to.normals()[j]);
            if !pulled.iter().zip(&from.normals()[i]).all(|(a, b)| near(a, b, scale)) {
                return false;
            }
            let offset = to.offsets()[j].clone() + linalg::dot(&to.normals()[j], &self.translation);
            if !near(&offset, &from.offsets()[i], scale) {
                return false;
            }
        }
        from.vertices().iter().all(|v| {
            let image = self.apply(v);
            to.vertices().iter().any(|w| image.iter().zip(w).all(|(a, b)| near(a, b, scale)))
        })
    }
}

fn scale_of<S: Scalar>(p: &LabeledPolytope<S>) -> f64 {
    let normals = p.normals().iter().map(|u| S::max_abs(u)).fold(0.0, f64::max);
    let points = p.vertices().iter().map(|v| S::max_abs(v)).fold(0.0, f64::max);
    normals.max(S::max_abs(p.offsets())).max(points)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Searches for an invertible affine map carrying `(Δ₁, u₁)` onto `(Δ₂, u₂)`
/// with normals related by the adjoint of its differential.
///
/// A fixed vertex of `Δ₁` is sent to each vertex of `Δ₂` under each bijection
/// of the facets through them; that fixes the map, which is then extended to
/// all facets and verified.
pub fn affine_equivalent<S: Scalar>(p1: &LabeledPolytope<S>, p2: &LabeledPolytope<S>) -> Result<Option<AffineMap<S>>> {
    if p1.dim() != p2.dim() {
        return Err(Error::DimensionMismatch { expected: p1.dim(), found: p2.dim() });
    }
    if p1.vertices().len() != p2.vertices().len() || p1.num_facets() != p2.num_facets() {
        return Ok(None);
    }
    let mut counts1: Vec<usize> = p1.facets().iter().map(Vec::len).collect();
    let mut counts2: Vec<usize> = p2.facets().iter().map(Vec::len).collect();
    counts1.sort_unstable();
    counts2.sort_unstable();
    if counts1 != counts2 {
        return Ok(None);
    }
    let n = p1.dim();
    let scale = scale_of(p1).max(scale_of(p2));
    let v0 = 0;
    let star1 = &p1.vertex_facets()[v0];
    let u1: Matrix<S> = star1.iter().map(|&i| p1.normals()[i].clone()).collect();
    let perms = permutations(n);
    for (w, star2) in p2.vertex_facets().iter().enumerate() {
        for perm in &perms {
            let matched: Vec<usize> = perm.iter().map(|&k| star2[k]).collect();
            if star1.iter().zip(&matched).any(|(&i, &j)| p1.facets()[i].len() != p2.facets()[j].len()) {
                continue;
            }
            // Rows of U2 · M = U1 encode Mᵀ u2_σ(i) = u1_i.
            let u2: Matrix<S> = matched.iter().map(|&j| p2.normals()[j].clone()).collect();
            let Some(u2_inv) = linalg::inverse(&u2) else { continue };
            let linear = linalg::mat_mul(&u2_inv, &u1);
            if linalg::determinant(&linear).is_negligible(scale) {
                continue;
            }
            let translation = linalg::sub(&p2.vertices()[w], &linalg::mat_vec(&linear, &p1.vertices()[v0]));
            let lt = linalg::transpose(&linear);
            let mut facet_map = Vec::with_capacity(p1.num_facets());
            let mut used = vec![false; p2.num_facets()];
            for i in 0..p1.num_facets() {
                let target = (0..p2.num_facets()).find(|&j| {
                    if used[j] {
                        return false;
                    }
                    let pulled = linalg::mat_vec(&lt, &p2.normals()[j]);
                    let offset = p2.offsets()[j].clone() + linalg::dot(&p2.normals()[j], &translation);
                    pulled.iter().zip(&p1.normals()[i]).all(|(a, b)| near(a, b, scale))
                        && near(&offset, &p1.offsets()[i], scale)
                });
                match target {
                    Some(j) => {
                        used[j] = true;
                        facet_map.push(j);
                    }
                    None => break,
                }
            }
            if facet_map.len() != p1.num_facets() {
                continue;
            }
            let map = AffineMap { linear, translation, facet_map };
            if map.verify(p1, p2) {
                return Ok(Some(map));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn square(r: [i64; 4]) -> LabeledPolytope<Rational> {
        LabeledPolytope::from_halfspaces(
            vec![
                vec![q(1, r[0]), q(0, 1)],
                vec![q(0, 1), q(-1, r[1])],
                vec![q(-1, r[2]), q(0, 1)],
                vec![q(0, 1), q(1, r[3])],
            ],
            r.iter().map(|&x| q(1, x)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn reflexive() {
        let p = square([2, 3, 4, 5]);
        let map = affine_equivalent(&p, &p).unwrap().unwrap();
        assert!(map.verify(&p, &p));
        for v in p.vertices() {
            assert!(p.vertices().contains(&map.apply(v)));
        }
    }

    #[test]
    fn rotation_recovered() {
        let p = square([2, 3, 4, 5]);
        // Rotation by 90°: (x, y) ↦ (−y, x); normals transform by the inverse transpose.
        let rot = vec![vec![q(0, 1), q(-1, 1)], vec![q(1, 1), q(0, 1)]];
        let normals: Vec<Vec<Rational>> = p.normals().iter().map(|u| linalg::mat_vec(&rot, u)).collect();
        let image = LabeledPolytope::from_halfspaces(normals, p.offsets().to_vec()).unwrap();
        let map = affine_equivalent(&p, &image).unwrap().unwrap();
        assert_eq!(map.linear, rot);
        assert_eq!(map.translation, vec![q(0, 1), q(0, 1)]);
        let back = affine_equivalent(&image, &p).unwrap().unwrap();
        assert!(back.verify(&image, &p));
    }

    #[test]
    fn labels_matter() {
        let p = square([1, 1, 1, 1]);
        assert!(affine_equivalent(&p, &square([1, 2, 1, 2])).unwrap().is_none());
        // Relabeling the square by its symmetry is still equivalent.
        assert!(affine_equivalent(&square([1, 2, 1, 2]), &square([2, 1, 2, 1])).unwrap().is_some());
    }

    #[test]
    fn square_versus_trapezoid() {
        let p = square([1, 1, 1, 1]);
        let trapezoid = LabeledPolytope::from_halfspaces(
            vec![vec![q(0, 1), q(1, 1)], vec![q(-1, 1), q(-1, 2)], vec![q(0, 1), q(-1, 1)], vec![q(1, 1), q(-1, 2)]],
            vec![q(1, 1), q(1, 1), q(1, 1), q(1, 1)],
        )
        .unwrap();
        assert_eq!(trapezoid.vertices().len(), 4);
        assert!(affine_equivalent(&p, &trapezoid).unwrap().is_none());
    }

    #[test]
    fn homothety_is_not_an_equivalence() {
        // The homothety sends u to 3u, so labels no longer correspond.
        let p = square([1, 2, 3, 4]);
        let big = p.scale(&q(3, 1)).unwrap();
        assert!(affine_equivalent(&p, &big).unwrap().is_none());
        let offsets = p.offsets().iter().map(|x| x * q(3, 1)).collect();
        let rebuilt = LabeledPolytope::from_halfspaces(p.normals().to_vec(), offsets).unwrap();
        let map = affine_equivalent(&big, &rebuilt).unwrap().unwrap();
        assert_eq!(map.linear, vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]);
    }

    #[test]
    fn dimension_mismatch() {
        let p = square([1, 1, 1, 1]);
        let seg =
            LabeledPolytope::from_halfspaces(vec![vec![q(1, 1)], vec![q(-1, 1)]], vec![q(1, 1), q(1, 1)]).unwrap();
        assert_eq!(affine_equivalent(&p, &seg).unwrap_err(), Error::DimensionMismatch { expected: 2, found: 1 });
    }
}
