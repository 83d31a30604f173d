//! Hecke congruence groups acting on the upper half-plane: integral group
//! elements, level data (index, genus, elliptic counts, cusps with widths
//! and scaling matrices), fundamental-domain reduction, coset decompositions
//! and window enumeration of group elements between two points.

pub mod coset;
pub mod enumerate;
pub mod reduce;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Extended gcd: returns (g, x, y) with a x + b y = g, g >= 0.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    ext_gcd(a, b).0
}

pub fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Integral unimodular matrix acting on the half-plane by fractional linear
/// maps. Determinant is maintained equal to one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        debug_assert_eq!(a * d - b * c, 1, "matrix must be unimodular");
        Self { a, b, c, d }
    }

    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        let num = Complex64::new(self.a as f64, 0.0) * z + self.b as f64;
        let den = Complex64::new(self.c as f64, 0.0) * z + self.d as f64;
        num / den
    }

    /// The denominator cz + d; its inverse square is the derivative of the
    /// action, the cocycle transporting derivatives between z and gamma z.
    #[inline]
    pub fn denominator(&self, z: Complex64) -> Complex64 {
        Complex64::new(self.c as f64, 0.0) * z + self.d as f64
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Sign-normalise in PSL: bottom row (c, d) with c > 0, or c = 0, d > 0.
    pub fn psl_normalize(&self) -> GroupElement {
        if self.c < 0 || (self.c == 0 && self.d < 0) {
            GroupElement {
                a: -self.a,
                b: -self.b,
                c: -self.c,
                d: -self.d,
            }
        } else {
            *self
        }
    }

    pub fn is_in_gamma0(&self, level: u32) -> bool {
        self.c.rem_euclid(level as i64) == 0
    }

    /// Translation z -> z + n.
    pub fn translation(n: i64) -> GroupElement {
        GroupElement {
            a: 1,
            b: n,
            c: 0,
            d: 1,
        }
    }
}

/// Real 2x2 matrix of determinant one; used for cusp scaling maps, which are
/// generally irrational.
#[derive(Clone, Copy, Debug)]
pub struct RealMat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RealMat2 {
    pub const IDENTITY: RealMat2 = RealMat2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn inverse(&self) -> RealMat2 {
        // Determinant one by construction.
        RealMat2 {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn compose(&self, other: &RealMat2) -> RealMat2 {
        RealMat2 {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn from_group_element(g: &GroupElement) -> RealMat2 {
        RealMat2 {
            a: g.a as f64,
            b: g.b as f64,
            c: g.c as f64,
            d: g.d as f64,
        }
    }
}

/// A cusp of the group: the rational point numer/denom (denom = 0 denotes
/// infinity), its width, and the scaling matrix sending infinity to the cusp
/// with the stabiliser conjugated to unit translations.
#[derive(Clone, Debug)]
pub struct Cusp {
    pub numer: i64,
    pub denom: i64,
    pub width: u32,
    pub scaling: RealMat2,
}

impl Cusp {
    pub fn is_infinity(&self) -> bool {
        self.denom == 0
    }

    /// Local coordinate height Im(sigma^{-1} w). Large values mean w sits
    /// deep in this cusp's neighbourhood.
    pub fn local_height(&self, w: Complex64) -> f64 {
        self.scaling.inverse().apply(w).im
    }

    /// Point at local height y over local abscissa x: sigma(x + i y).
    pub fn from_local(&self, x: f64, y: f64) -> Complex64 {
        self.scaling.apply(Complex64::new(x, y))
    }
}

/// The Hecke congruence group of a given level, with its standard numerical
/// invariants precomputed.
#[derive(Clone, Debug)]
pub struct Gamma0 {
    pub level: u32,
    pub index: u32,
    pub genus: u32,
    pub nu2: u32,
    pub nu3: u32,
    pub cusps: Vec<Cusp>,
}

impl Gamma0 {
    pub fn new(level: u32) -> Result<Self> {
        if level == 0 {
            return Err(Error::Unsupported("level must be positive".into()));
        }
        let primes = prime_factors(level);
        let mut index = level;
        for &p in &primes {
            // psi(N) = N prod (1 + 1/p); integral because p | N.
            index = index / p * (p + 1);
        }
        let nu2 = if level % 4 == 0 {
            0
        } else {
            let mut v = 1u32;
            for &p in &primes {
                if p == 2 {
                    continue;
                }
                v *= match p % 4 {
                    1 => 2,
                    _ => 0,
                };
            }
            v
        };
        let nu3 = if level % 9 == 0 {
            0
        } else {
            let mut v = 1u32;
            for &p in &primes {
                if p == 3 {
                    continue;
                }
                v *= match p % 3 {
                    1 => 2,
                    _ => 0,
                };
            }
            v
        };
        let cusps = Self::build_cusps(level);
        let nu_inf = cusps.len() as u32;
        // genus from the index and the special point counts; the combination
        // is always integral.
        let twelve_g = 12 + index - 3 * nu2 - 4 * nu3 - 6 * nu_inf;
        debug_assert_eq!(twelve_g % 12, 0);
        Ok(Self {
            level,
            index,
            genus: twelve_g / 12,
            nu2,
            nu3,
            cusps,
        })
    }

    fn build_cusps(level: u32) -> Vec<Cusp> {
        let n = level as i64;
        let mut cusps = Vec::new();
        // Representatives a/c with c | N and a running over residues modulo
        // gcd(c, N/c) coprime to c. Infinity is the class of 1/N, listed
        // first with denom = 0 by convention.
        let mut divisors: Vec<i64> = (1..=n).filter(|c| n % c == 0).collect();
        divisors.reverse();
        for c in divisors {
            let g = gcd(c, n / c);
            for a0 in 1..=g {
                if gcd(a0, g) != 1 {
                    continue;
                }
                // Lift a0 to a residue coprime to c (possible since any
                // residue class mod g coprime to g contains one). The class
                // with c = 1 is represented by the origin.
                let mut a = a0;
                while gcd(a, c) != 1 {
                    a += g;
                }
                if c == 1 {
                    a = 0;
                }
                let width = (n / gcd(c * c, n)) as u32;
                let (numer, denom, scaling) = if c == n {
                    (1, 0, RealMat2::IDENTITY)
                } else {
                    // Complete (a, c) to a unimodular matrix and append the
                    // width dilation.
                    let (g1, x, y) = ext_gcd(a, c);
                    debug_assert_eq!(g1, 1);
                    let (b, d) = (-y, x);
                    let sw = (width as f64).sqrt();
                    let mat = RealMat2 {
                        a: a as f64 * sw,
                        b: b as f64 / sw,
                        c: c as f64 * sw,
                        d: d as f64 / sw,
                    };
                    (a, c, mat)
                };
                cusps.push(Cusp {
                    numer,
                    denom,
                    width,
                    scaling,
                });
            }
        }
        // Infinity first, then by descending width for a stable order.
        cusps.sort_by_key(|c| (!c.is_infinity(), std::cmp::Reverse(c.width)));
        cusps
    }

    /// Hyperbolic area of the quotient: pi/3 times the index.
    pub fn volume(&self) -> f64 {
        std::f64::consts::PI / 3.0 * self.index as f64
    }

    pub fn num_cusps(&self) -> usize {
        self.cusps.len()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.is_in_gamma0(self.level)
    }
}
