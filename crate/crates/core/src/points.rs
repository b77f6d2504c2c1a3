use crate::error::{QmcError, Result};

/// An `n x d` array of coordinates in `[0, 1)`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    n: usize,
    d: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(n: usize, d: usize, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != n * d {
            return Err(QmcError::InvalidParameter(format!(
                "coordinate buffer has length {} but n*d = {}",
                coords.len(),
                n * d
            )));
        }
        if let Some(&bad) = coords.iter().find(|c| !(0.0..1.0).contains(*c)) {
            return Err(QmcError::InvalidParameter(format!(
                "coordinate {bad} lies outside [0, 1)"
            )));
        }
        Ok(PointSet { n, d, coords })
    }

    /// Builds a point set without range checks. Callers guarantee the invariants.
    pub(crate) fn from_raw(n: usize, d: usize, coords: Vec<f64>) -> Self {
        debug_assert_eq!(coords.len(), n * d);
        debug_assert!(coords.iter().all(|c| (0.0..1.0).contains(c)));
        PointSet { n, d, coords }
    }

    pub fn empty(d: usize) -> Self {
        PointSet {
            n: 0,
            d,
            coords: Vec::new(),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        // chunks_exact panics on a zero chunk size
        let d = self.d.max(1);
        self.coords
            .chunks_exact(d)
            .take(if self.d == 0 { 0 } else { self.n })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Coordinate `j` of every point.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|p| p[j]).collect()
    }

    /// The first `k` coordinates of every point.
    pub fn project(&self, k: usize) -> Result<PointSet> {
        if k > self.d {
            return Err(QmcError::DimensionMismatch {
                expected: self.d,
                got: k,
            });
        }
        let coords = self.rows().flat_map(|p| p[..k].iter().copied()).collect();
        Ok(PointSet::from_raw(self.n, k, coords))
    }

    /// The first `k` points.
    pub fn prefix(&self, k: usize) -> PointSet {
        let k = k.min(self.n);
        PointSet::from_raw(k, self.d, self.coords[..k * self.d].to_vec())
    }

    /// Appends the rows of `other`, which must share the dimension.
    pub fn extend(&mut self, other: &PointSet) -> Result<()> {
        if other.d != self.d {
            return Err(QmcError::DimensionMismatch {
                expected: self.d,
                got: other.d,
            });
        }
        self.coords.extend_from_slice(&other.coords);
        self.n += other.n;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_and_bad_length() {
        assert!(PointSet::new(1, 2, vec![0.0, 1.0]).is_err());
        assert!(PointSet::new(1, 2, vec![0.0]).is_err());
        assert!(PointSet::new(1, 2, vec![-0.1, 0.5]).is_err());
        let p = PointSet::new(2, 2, vec![0.0, 0.5, 0.25, 0.75]).unwrap();
        assert_eq!(p.point(1), &[0.25, 0.75]);
        assert_eq!(p.column(1), vec![0.5, 0.75]);
        assert_eq!(p.project(1).unwrap().coords(), &[0.0, 0.25]);
    }

    #[test]
    fn zero_dimensional_sets_have_no_rows() {
        let p = PointSet::empty(0);
        assert_eq!(p.rows().count(), 0);
    }
}
