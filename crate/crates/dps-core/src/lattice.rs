//! Rectangular lattice index ranges and dense per-site storage.

use alloc::vec::Vec;

/// Inclusive lattice rectangle `n_min..=n_max × m_min..=m_max`.
///
/// All pipelines require the base point `(0, 0)` to lie inside.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub n_min: i32,
    pub n_max: i32,
    pub m_min: i32,
    pub m_max: i32,
}

impl Rect {
    pub fn new(n_min: i32, n_max: i32, m_min: i32, m_max: i32) -> Self {
        assert!(n_min <= n_max && m_min <= m_max, "empty lattice rectangle");
        Rect { n_min, n_max, m_min, m_max }
    }

    /// `[0, n_max] × [0, m_max]`.
    pub fn first_quadrant(n_max: i32, m_max: i32) -> Self {
        Rect::new(0, n_max, 0, m_max)
    }

    pub fn contains(&self, n: i32, m: i32) -> bool {
        n >= self.n_min && n <= self.n_max && m >= self.m_min && m <= self.m_max
    }

    pub fn contains_origin(&self) -> bool {
        self.contains(0, 0)
    }

    pub fn n_len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn m_len(&self) -> usize {
        (self.m_max - self.m_min + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.n_len() * self.m_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major site order: n outer, m inner.
    pub fn index(&self, n: i32, m: i32) -> usize {
        debug_assert!(self.contains(n, m), "site ({n},{m}) outside lattice");
        (n - self.n_min) as usize * self.m_len() + (m - self.m_min) as usize
    }

    /// Sites in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        let m_range = self.m_min..=self.m_max;
        (self.n_min..=self.n_max).flat_map(move |n| m_range.clone().map(move |m| (n, m)))
    }
}

/// Dense lattice-indexed container.
#[derive(Debug, Clone)]
pub struct Lattice2<T> {
    rect: Rect,
    data: Vec<T>,
}

impl<T> Lattice2<T> {
    pub fn from_fn(rect: Rect, mut f: impl FnMut(i32, i32) -> T) -> Self {
        let mut data = Vec::with_capacity(rect.len());
        for (n, m) in rect.iter() {
            data.push(f(n, m));
        }
        Lattice2 { rect, data }
    }

    pub fn try_from_fn<E>(
        rect: Rect,
        mut f: impl FnMut(i32, i32) -> Result<T, E>,
    ) -> Result<Self, E> {
        let mut data = Vec::with_capacity(rect.len());
        for (n, m) in rect.iter() {
            data.push(f(n, m)?);
        }
        Ok(Lattice2 { rect, data })
    }

    /// Assemble from pre-computed per-site values in storage order.
    pub fn from_vec(rect: Rect, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rect.len(), "site count mismatch");
        Lattice2 { rect, data }
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn get(&self, n: i32, m: i32) -> &T {
        &self.data[self.rect.index(n, m)]
    }

    pub fn get_mut(&mut self, n: i32, m: i32) -> &mut T {
        &mut self.data[self.rect.index(n, m)]
    }

    pub fn try_get(&self, n: i32, m: i32) -> Option<&T> {
        if self.rect.contains(n, m) {
            Some(self.get(n, m))
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i32, i32), &T)> + '_ {
        self.rect.iter().map(move |(n, m)| ((n, m), self.get(n, m)))
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }
}

impl<T: Clone> Lattice2<T> {
    pub fn filled(rect: Rect, value: T) -> Self {
        Lattice2 {
            rect,
            data: alloc::vec![value; rect.len()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let r = Rect::new(-2, 3, -1, 4);
        let mut seen = alloc::vec::Vec::new();
        for (n, m) in r.iter() {
            seen.push(r.index(n, m));
        }
        let expect: alloc::vec::Vec<usize> = (0..r.len()).collect();
        assert_eq!(seen, expect);
        assert!(r.contains_origin());
    }

    #[test]
    fn lattice_storage() {
        let r = Rect::first_quadrant(2, 3);
        let l = Lattice2::from_fn(r, |n, m| 10 * n + m);
        assert_eq!(*l.get(2, 3), 23);
        assert_eq!(*l.get(0, 0), 0);
        assert!(l.try_get(3, 0).is_none());
    }
}
