//! Canonical multi-indices `j = (j1, j2)` in two variables.
//!
//! Symmetric derivatives are stored once: `D^(1,1)` stands for both mixed
//! partials. Indices are enumerated by total order, and within one order by
//! decreasing first component.

use std::fmt;

/// A multi-index `(j1, j2)` with order `j1 + j2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub u32, pub u32);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex(0, 0);

    pub fn order(self) -> u32 {
        self.0 + self.1
    }

    /// `j! = j1! * j2!`.
    pub fn factorial(self) -> f64 {
        factorial(self.0) * factorial(self.1)
    }

    /// `(dx, dy)^j = dx^j1 * dy^j2`.
    pub fn monomial(self, dx: f64, dy: f64) -> f64 {
        dx.powi(self.0 as i32) * dy.powi(self.1 as i32)
    }

    pub fn checked_add(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 + other.0, self.1 + other.1)
    }

    /// `other - self` when `self <= other` componentwise.
    pub fn complement_in(self, other: MultiIndex) -> Option<MultiIndex> {
        if self.0 <= other.0 && self.1 <= other.1 {
            Some(MultiIndex(other.0 - self.0, other.1 - self.1))
        } else {
            None
        }
    }

    /// All multi-indices with order at most `max_order`, in canonical order.
    pub fn up_to(max_order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::with_capacity(count_up_to(max_order));
        for total in 0..=max_order {
            out.extend(Self::of_order(total));
        }
        out
    }

    /// All multi-indices with order exactly `order`.
    pub fn of_order(order: u32) -> impl Iterator<Item = MultiIndex> {
        (0..=order).rev().map(move |j1| MultiIndex(j1, order - j1))
    }

    /// Position of `self` in [`MultiIndex::up_to`].
    pub fn position(self) -> usize {
        let total = self.order();
        count_up_to_exclusive(total) + (total - self.0) as usize
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

/// Number of multi-indices with order `<= max_order`.
pub fn count_up_to(max_order: u32) -> usize {
    let m = max_order as usize;
    (m + 1) * (m + 2) / 2
}

fn count_up_to_exclusive(order: u32) -> usize {
    if order == 0 {
        0
    } else {
        count_up_to(order - 1)
    }
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_is_canonical() {
        let all = MultiIndex::up_to(2);
        assert_eq!(
            all,
            vec![
                MultiIndex(0, 0),
                MultiIndex(1, 0),
                MultiIndex(0, 1),
                MultiIndex(2, 0),
                MultiIndex(1, 1),
                MultiIndex(0, 2)
            ]
        );
        for (k, j) in all.iter().enumerate() {
            assert_eq!(j.position(), k);
        }
        assert_eq!(count_up_to(3), 10);
    }

    #[test]
    fn factorials_and_monomials() {
        assert_eq!(MultiIndex(2, 3).factorial(), 12.0);
        assert_eq!(MultiIndex(2, 1).monomial(3.0, 2.0), 18.0);
        assert_eq!(MultiIndex(1, 0).complement_in(MultiIndex(2, 1)), Some(MultiIndex(1, 1)));
        assert_eq!(MultiIndex(0, 2).complement_in(MultiIndex(2, 1)), None);
    }
}
