/// A finite counting measure on ℝ^dim, stored as a flat list of atoms.
///
/// Multiplicities are represented by repetition and the order of atoms is
/// irrelevant to every statistic in this crate. `dim = 0` models a one-point
/// ground space, where only the number of atoms matters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointConfiguration {
    dim: usize,
    coords: Vec<f64>,
    count: usize,
}

impl PointConfiguration {
    /// The null measure on ℝ^dim.
    pub fn empty(dim: usize) -> Self {
        Self { dim, coords: Vec::new(), count: 0 }
    }

    pub fn with_capacity(dim: usize, points: usize) -> Self {
        Self { dim, coords: Vec::with_capacity(dim * points), count: 0 }
    }

    /// `count` atoms on the one-point ground space.
    pub fn singleton_atoms(count: usize) -> Self {
        Self { dim: 0, coords: Vec::new(), count }
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: impl IntoIterator<Item = P>) -> Self {
        let mut out = Self::empty(dim);
        for p in points {
            out.push(p.as_ref());
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn point(&self, i: usize) -> &[f64] {
        assert!(i < self.count, "atom index {i} out of range");
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.count).map(move |i| &self.coords[i * self.dim..(i + 1) * self.dim])
    }

    /// Adds the atom `δ_z`.
    pub fn push(&mut self, z: &[f64]) {
        assert_eq!(z.len(), self.dim, "point dimension mismatch");
        self.coords.extend_from_slice(z);
        self.count += 1;
    }

    /// Removes the most recently added atom.
    pub fn pop(&mut self) {
        if self.count > 0 {
            self.count -= 1;
            self.coords.truncate(self.count * self.dim);
        }
    }

    /// `φ + δ_z`
    pub fn with_atom(&self, z: &[f64]) -> Self {
        let mut out = self.clone();
        out.push(z);
        out
    }

    /// `φ − δ_{zᵢ}` for the atom stored at index `i`.
    pub fn without_atom(&self, i: usize) -> Self {
        assert!(i < self.count, "atom index {i} out of range");
        let mut coords = Vec::with_capacity(self.coords.len().saturating_sub(self.dim));
        coords.extend_from_slice(&self.coords[..i * self.dim]);
        coords.extend_from_slice(&self.coords[(i + 1) * self.dim..]);
        Self { dim: self.dim, coords, count: self.count - 1 }
    }

    /// Number of atoms satisfying `pred`.
    pub fn count_where<F: Fn(&[f64]) -> bool>(&self, pred: F) -> usize {
        self.points().filter(|p| pred(p)).count()
    }

    /// Restriction of the measure to `{x : keep(x)}`.
    pub fn restrict<F: Fn(&[f64]) -> bool>(&self, keep: F) -> Self {
        let mut out = Self::empty(self.dim);
        for p in self.points() {
            if keep(p) {
                out.push(p);
            }
        }
        out
    }

    /// `Σ_{x∈φ} x`, the point-process integral of the identity.
    pub fn sum(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.dim];
        for p in self.points() {
            s.iter_mut().zip(p).for_each(|(a, b)| *a += b);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_pop_and_removal() {
        let mut phi = PointConfiguration::empty(2);
        assert!(phi.is_empty());
        phi.push(&[0.1, 0.2]);
        phi.push(&[0.3, 0.4]);
        phi.push(&[0.1, 0.2]);
        assert_eq!(phi.len(), 3);
        assert_eq!(phi.without_atom(1), PointConfiguration::from_points(2, [[0.1, 0.2], [0.1, 0.2]]));
        phi.pop();
        assert_eq!(phi.len(), 2);
        assert_eq!(phi.count_where(|p| p[0] > 0.2), 1);
        assert_eq!(phi.sum(), vec![0.4, 0.6000000000000001]);
    }

    #[test]
    fn singleton_space_counts_atoms() {
        let mut phi = PointConfiguration::singleton_atoms(3);
        assert_eq!(phi.points().count(), 3);
        phi.push(&[]);
        assert_eq!(phi.len(), 4);
        assert_eq!(phi.without_atom(0).len(), 3);
        assert_eq!(phi.restrict(|_| true).len(), 4);
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn rejects_wrong_dimension() {
        PointConfiguration::empty(2).push(&[1.0]);
    }
}
