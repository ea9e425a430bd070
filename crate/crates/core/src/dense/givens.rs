/// Plane rotation `G = [c s; -s c]` acting on coordinates `(i, j)`, `i < j`.
///
/// Left application `Gᵀ X` and right application `X G` both reduce to
/// [`GivensRotation::apply`] on the affected pair of rows or columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GivensRotation {
    pub c: f64,
    pub s: f64,
    pub i: usize,
    pub j: usize,
}

impl GivensRotation {
    /// Rotation in the `(i, j)` plane that maps `(a, b)` to `(r, 0)`.
    pub fn annihilating(a: f64, b: f64, i: usize, j: usize) -> (Self, f64) {
        debug_assert!(i < j);
        let (c, s, r) = givens(a, b);
        (Self { c, s, i, j }, r)
    }

    #[inline]
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.c * x - self.s * y, self.s * x + self.c * y)
    }
}

/// Returns `(c, s, r)` with `[c s; -s c]ᵀ (a, b) = (r, 0)` and `r >= 0`.
///
/// Scaled by the larger magnitude so that neither `a²` nor `b²` can overflow.
pub fn givens(a: f64, b: f64) -> (f64, f64, f64) {
    if b == 0.0 {
        return if a >= 0.0 { (1.0, 0.0, a) } else { (-1.0, 0.0, -a) };
    }
    if a == 0.0 {
        return (0.0, -b.signum(), b.abs());
    }
    let scale = a.abs().max(b.abs());
    let (sa, sb) = (a / scale, b / scale);
    let r = scale * (sa * sa + sb * sb).sqrt();
    (a / r, -b / r, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: f64, b: f64) -> (f64, f64, f64) {
        let (c, s, r) = givens(a, b);
        assert!((c * c + s * s - 1.0).abs() < 1e-14);
        let rot = GivensRotation { c, s, i: 0, j: 1 };
        let (x, y) = rot.apply(a, b);
        assert!((x - r).abs() <= 1e-15 * r.max(1.0));
        assert!(y.abs() < 1e-15 * r.max(1.0));
        (c, s, r)
    }

    #[test]
    fn unit_inputs() {
        assert_eq!(check(1.0, 0.0), (1.0, 0.0, 1.0));
        let (_, _, r) = check(0.0, 1.0);
        assert_eq!(r.abs(), 1.0);
        assert_eq!(givens(0.0, 0.0), (1.0, 0.0, 0.0));
    }

    #[test]
    fn pythagorean_triple() {
        let (_, _, r) = check(3.0, 4.0);
        assert!((r - 5.0).abs() < 1e-15);
        check(-3.0, 4.0);
        check(3.0, -4.0);
        check(-2.0, 0.0);
    }

    #[test]
    fn extreme_magnitudes() {
        let (_, _, r) = check(3e300, 4e300);
        assert!((r / 5e300 - 1.0).abs() < 1e-15);
        let (_, _, r) = check(3e-300, 4e-300);
        assert!((r / 5e-300 - 1.0).abs() < 1e-15);
    }
}
