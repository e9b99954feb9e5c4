use serde::{Deserialize, Serialize};

/// Standard mollifier `exp(1 - 1/(1 - t^2))` on `|t| < 1`, zero elsewhere.
pub fn bump_profile(t: f64) -> f64 {
    let q = 1.0 - t * t;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

/// First derivative of [`bump_profile`].
pub fn bump_profile_d1(t: f64) -> f64 {
    let q = 1.0 - t * t;
    if q <= 0.0 {
        0.0
    } else {
        let p = (1.0 - 1.0 / q).exp();
        -2.0 * t / (q * q) * p
    }
}

/// Second derivative of [`bump_profile`].
pub fn bump_profile_d2(t: f64) -> f64 {
    let q = 1.0 - t * t;
    if q <= 0.0 {
        0.0
    } else {
        let p = (1.0 - 1.0 / q).exp();
        let t2 = t * t;
        p * (4.0 * t2 / q.powi(4) - 2.0 / (q * q) - 8.0 * t2 / q.powi(3))
    }
}

/// A downward mollifier bump on the bottom segment: contributes
/// `-depth * phi((x - center) / half_width)` to the bottom profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: f64,
    pub half_width: f64,
    pub depth: f64,
}

impl BumpSpec {
    pub fn new(center: f64, half_width: f64, depth: f64) -> Self {
        Self {
            center,
            half_width,
            depth,
        }
    }

    /// Open support `(center - w, center + w)`.
    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    pub fn is_valid(&self) -> bool {
        self.center.is_finite()
            && self.half_width.is_finite()
            && self.depth.is_finite()
            && self.half_width > 0.0
            && self.depth > 0.0
    }

    #[inline]
    fn local(&self, x: f64) -> f64 {
        (x - self.center) / self.half_width
    }

    /// Contribution to the bottom profile, `<= 0`.
    pub fn height(&self, x: f64) -> f64 {
        -self.depth * bump_profile(self.local(x))
    }

    pub fn slope(&self, x: f64) -> f64 {
        -self.depth / self.half_width * bump_profile_d1(self.local(x))
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        -self.depth / (self.half_width * self.half_width) * bump_profile_d2(self.local(x))
    }

    /// Dual bump under `x -> -x`.
    pub fn mirrored(&self) -> Self {
        Self {
            center: -self.center,
            ..*self
        }
    }

    /// Same shape scaled in depth.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            depth: self.depth * factor,
            ..*self
        }
    }

    /// The two abscissas where the bump reaches height `y` (`-depth < y < 0`).
    pub fn level_crossings(&self, y: f64) -> Option<(f64, f64)> {
        if y >= 0.0 || y <= -self.depth {
            return None;
        }
        // phi(t) = -y/depth  =>  1 - 1/(1-t^2) = ln(-y/depth)
        let l = (-y / self.depth).ln();
        let q = 1.0 / (1.0 - l);
        let t = (1.0 - q).max(0.0).sqrt();
        Some((
            self.center - t * self.half_width,
            self.center + t * self.half_width,
        ))
    }
}

/// Sum of bump contributions.
pub fn bottom_height(bumps: &[BumpSpec], x: f64) -> f64 {
    bumps.iter().map(|b| b.height(x)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_values() {
        assert_eq!(bump_profile(0.0), 1.0);
        assert_eq!(bump_profile(1.0), 0.0);
        assert_eq!(bump_profile(-1.0), 0.0);
        assert_eq!(bump_profile(1.7), 0.0);
        // exp(1 - 4/3)
        assert!((bump_profile(0.5) - 0.716_531_310_573_789_2).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for &t in &[-0.93, -0.5, -0.1, 0.0, 0.3, 0.77, 0.95] {
            let h = 1e-6;
            let fd1 = (bump_profile(t + h) - bump_profile(t - h)) / (2.0 * h);
            let fd2 = (bump_profile_d1(t + h) - bump_profile_d1(t - h)) / (2.0 * h);
            assert!((fd1 - bump_profile_d1(t)).abs() < 1e-7, "t = {t}");
            assert!((fd2 - bump_profile_d2(t)).abs() < 1e-5, "t = {t}");
        }
    }

    #[test]
    fn flat_near_support_edge() {
        let t = 0.999;
        assert!(bump_profile(t) < 1e-200);
        assert!(bump_profile_d1(t).abs() < 1e-190);
    }

    #[test]
    fn level_crossings_invert_height() {
        let b = BumpSpec::new(-0.8, 0.3, 0.25);
        let (l, r) = b.level_crossings(-0.1).unwrap();
        assert!((b.height(l) + 0.1).abs() < 1e-14);
        assert!((b.height(r) + 0.1).abs() < 1e-14);
        assert!(l < -0.8 && r > -0.8);
        assert!(b.level_crossings(0.0).is_none());
        assert!(b.level_crossings(-0.3).is_none());
    }

    #[test]
    fn mirror_is_involution() {
        let b = BumpSpec::new(-0.5, 0.2, 0.1);
        assert_eq!(b.mirrored().mirrored(), b);
        assert_eq!(b.mirrored().center, 0.5);
    }
}
