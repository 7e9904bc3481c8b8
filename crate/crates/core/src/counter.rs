//! Arithmetic-operation counters backing the complexity claims.
//!
//! Each index algorithm tallies the scalar multiplications/divisions and
//! additions/subtractions its update formulas perform. Comparisons, copies,
//! and sign flips are not arithmetic and are never counted; ratio
//! computations during state selection are arithmetic and are.

/// Tally of scalar arithmetic operations in one algorithm run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounter {
    /// Multiplications and divisions.
    pub muldiv: u64,
    /// Additions and subtractions.
    pub addsub: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn count_muldiv(&mut self, n: u64) {
        self.muldiv += n;
    }

    #[inline]
    pub fn count_addsub(&mut self, n: u64) {
        self.addsub += n;
    }

    /// Records one inner product of the given length (`len` multiplications,
    /// `len - 1` additions).
    #[inline]
    pub fn count_dot(&mut self, len: usize) {
        self.muldiv += len as u64;
        self.addsub += (len as u64).saturating_sub(1);
    }

    pub fn total(&self) -> u64 {
        self.muldiv + self.addsub
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }
}

impl std::ops::AddAssign for OpCounter {
    fn add_assign(&mut self, rhs: Self) {
        self.muldiv += rhs.muldiv;
        self.addsub += rhs.addsub;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_of_empty_slice_counts_nothing() {
        let mut ops = OpCounter::new();
        ops.count_dot(0);
        assert_eq!(ops, OpCounter::default());
    }

    #[test]
    fn totals_accumulate() {
        let mut ops = OpCounter::new();
        ops.count_muldiv(3);
        ops.count_addsub(2);
        ops.count_dot(4);
        assert_eq!(ops.muldiv, 7);
        assert_eq!(ops.addsub, 5);
        assert_eq!(ops.total(), 12);
        ops.reset();
        assert_eq!(ops.total(), 0);
    }
}
