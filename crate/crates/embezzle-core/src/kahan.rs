//! Compensated accumulation (Neumaier's variant of Kahan summation).

/// Running sum carrying a compensation term, so that long tails of tiny
/// values are not absorbed into the rounding of a large prefix. Works for
/// either add order; the branches pick the correct correction when the new
/// term is larger than the running sum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
