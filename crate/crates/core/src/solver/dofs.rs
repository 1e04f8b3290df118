use std::collections::BTreeMap;

/// Map from full DOFs (3 per control point, `x, y, z` fastest) to the reduced
/// unknowns left after fixing and tying.
#[derive(Clone, Debug)]
pub struct DofMap {
    map: Vec<Option<usize>>,
    n_reduced: usize,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

impl DofMap {
    /// `fixed` DOFs are held at zero; each group in `ties` shares one unknown.
    /// A group containing a fixed DOF is fixed as a whole.
    pub fn new(n_full: usize, fixed: &[usize], ties: &[Vec<usize>]) -> Self {
        let mut parent: Vec<usize> = (0..n_full).collect();
        for group in ties {
            for w in group.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut fixed_roots = vec![false; n_full];
        for &i in fixed {
            let r = find(&mut parent, i);
            fixed_roots[r] = true;
        }
        let mut root_index: BTreeMap<usize, usize> = BTreeMap::new();
        let mut map = vec![None; n_full];
        for (i, slot) in map.iter_mut().enumerate() {
            let r = find(&mut parent, i);
            if fixed_roots[r] {
                continue;
            }
            let next = root_index.len();
            *slot = Some(*root_index.entry(r).or_insert(next));
        }
        DofMap {
            n_reduced: root_index.len(),
            map,
        }
    }

    pub fn free(n_full: usize) -> Self {
        DofMap::new(n_full, &[], &[])
    }

    pub fn n_full(&self) -> usize {
        self.map.len()
    }

    pub fn n_reduced(&self) -> usize {
        self.n_reduced
    }

    pub fn reduced_index(&self, i: usize) -> Option<usize> {
        self.map[i]
    }

    pub fn is_fixed(&self, i: usize) -> bool {
        self.map[i].is_none()
    }

    /// Sum full-length residual entries into the reduced unknowns.
    pub fn reduce(&self, full: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_reduced];
        for (i, v) in full.iter().enumerate() {
            if let Some(r) = self.map[i] {
                out[r] += v;
            }
        }
        out
    }

    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        self.map
            .iter()
            .map(|m| m.map_or(0.0, |r| reduced[r]))
            .collect()
    }

    pub fn reduce_triplets(&self, full: &[(usize, usize, f64)]) -> Vec<(usize, usize, f64)> {
        full.iter()
            .filter_map(|&(i, j, v)| Some((self.map[i]?, self.map[j]?, v)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_and_fixes() {
        let m = DofMap::new(6, &[0], &[vec![1, 4], vec![4, 5], vec![0, 2]]);
        assert!(m.is_fixed(0) && m.is_fixed(2));
        assert_eq!(m.reduced_index(1), m.reduced_index(5));
        assert_eq!(m.n_reduced(), 2);
        let u = m.expand(&[1.0, 2.0]);
        assert_eq!(u, vec![0.0, 1.0, 0.0, 2.0, 1.0, 1.0]);
        assert_eq!(m.reduce(&[1.0; 6]), vec![3.0, 1.0]);
    }
}
