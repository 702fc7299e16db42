//! Neumaier-compensated summation for complex values.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct RealSum {
    sum: f64,
    comp: f64,
}

impl RealSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ComplexSum {
    re: RealSum,
    im: RealSum,
}

impl ComplexSum {
    #[inline]
    pub(crate) fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub(crate) fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}
