/// Running `log2(sum 2^x_i)` with a max shift, so sums of probabilities far
/// below `f64::MIN_POSITIVE` stay representable.
#[derive(Debug, Clone, Copy)]
pub struct Log2Sum {
    max: f64,
    scaled: f64,
}

impl Default for Log2Sum {
    fn default() -> Self {
        Self::new()
    }
}

impl Log2Sum {
    pub fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    pub fn add(&mut self, log2_term: f64) {
        if log2_term == f64::NEG_INFINITY {
            return;
        }
        if log2_term <= self.max {
            self.scaled += (log2_term - self.max).exp2();
        } else {
            self.scaled = self.scaled * (self.max - log2_term).exp2() + 1.0;
            self.max = log2_term;
        }
    }

    /// `log2` of the accumulated sum; `-inf` when empty.
    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.log2()
        }
    }
}

impl FromIterator<f64> for Log2Sum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Log2Sum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
