//! Seeded random generators for structures and inputs.
//!
//! Everything here drives randomized laws in the test suites; the
//! generators are deterministic functions of the supplied RNG so failures
//! reproduce from a seed. Continued fractions are generated
//! schedule-first: the pivot/degree pairs (h_k, t_k) are chosen against
//! the step-ordering constraint, and the quotient coefficients are then
//! filled inside the degree (and, for strict structures, exponent-window)
//! bounds that the validity conditions allow.

use crate::cf::{MPreCf, Step};
use crate::field::PrimeField;
use crate::iv::{big_l_ind, l_ind};
use crate::poly::Poly;
use crate::synthesis::MultiSeqPrefix;
use crate::transform::StepView;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A reproducible RNG for test drivers.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform polynomial of degree <= max_deg (possibly zero).
pub fn random_poly<R: Rng>(rng: &mut R, field: PrimeField, max_deg: i64) -> Poly {
    if max_deg < 0 {
        return Poly::zero(field);
    }
    let coeffs: Vec<u64> = (0..=max_deg).map(|_| rng.gen_range(0..field.p())).collect();
    Poly::from_coeffs(field, coeffs)
}

/// Uniform polynomial of exact degree `deg` (leading coefficient nonzero).
pub fn random_poly_exact<R: Rng>(rng: &mut R, field: PrimeField, deg: i64) -> Poly {
    assert!(deg >= 0);
    let mut coeffs: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..field.p())).collect();
    coeffs.push(rng.gen_range(1..field.p()));
    Poly::from_coeffs(field, coeffs)
}

/// A structure satisfying only condition 1: pivot quotients have degree
/// >= 1, everything else is unconstrained. Exercises the condition
/// checker on valid and invalid shapes alike.
pub fn random_pre_cf<R: Rng>(
    rng: &mut R,
    field: PrimeField,
    m: usize,
    steps: usize,
    max_deg: i64,
) -> MPreCf {
    let out: Vec<Step> = (0..steps)
        .map(|_| {
            let h = rng.gen_range(1..=m);
            let a = (1..=m)
                .map(|j| {
                    if j == h {
                        let deg = rng.gen_range(1..=max_deg.max(1));
                        random_poly_exact(rng, field, deg)
                    } else {
                        let deg = rng.gen_range(-1..=max_deg);
                        random_poly(rng, field, deg)
                    }
                })
                .collect();
            Step { h, a }
        })
        .collect();
    MPreCf::new(field, m, out).expect("shape is valid by construction")
}

/// The (h_k, t_k) schedule and running weight rows behind a valid
/// structure.
struct Schedule {
    /// Per step: pivot, degree, weight of the pivot before the step.
    hts: Vec<(usize, i64, i64)>,
    /// Weight rows after each step; rows[k][j-1] = v_{k,j}, rows[0] = 0.
    rows: Vec<Vec<i64>>,
    /// v_k per step.
    v: Vec<i64>,
}

fn random_schedule<R: Rng>(rng: &mut R, m: usize, steps: usize, t_spread: i64) -> Schedule {
    let mut rows = vec![vec![0i64; m]];
    let mut hts = Vec::with_capacity(steps);
    let mut v = Vec::with_capacity(steps);
    let mut prev: Option<(usize, i64)> = None;
    for _ in 0..steps {
        let h = rng.gen_range(1..=m);
        let row = rows.last().unwrap().clone();
        let t_min = match prev {
            None => 1,
            Some((hp, vp)) => (vp - row[h - 1] + big_l_ind(hp, h)).max(1),
        };
        let t = t_min + rng.gen_range(0..=t_spread);
        let v_before = row[h - 1];
        let mut next = row;
        next[h - 1] += t;
        v.push(next[h - 1]);
        rows.push(next);
        hts.push((h, t, v_before));
        prev = Some((h, v_before));
    }
    Schedule { hts, rows, v }
}

/// A structure satisfying conditions 1-3.
pub fn random_mcf<R: Rng>(
    rng: &mut R,
    field: PrimeField,
    m: usize,
    steps: usize,
    t_spread: i64,
) -> MPreCf {
    let s = random_schedule(rng, m, steps, t_spread);
    let out: Vec<Step> = s
        .hts
        .iter()
        .enumerate()
        .map(|(i, &(h, t, v_before))| {
            let a = (1..=m)
                .map(|j| {
                    if j == h {
                        random_poly_exact(rng, field, t)
                    } else {
                        // deg a_{k,j} <= v_{k,j} - v_{k-1,h} - l(h,j)
                        let bound = s.rows[i + 1][j - 1] - v_before - l_ind(h, j);
                        random_poly(rng, field, bound)
                    }
                })
                .collect();
            Step { h, a }
        })
        .collect();
    MPreCf::new(field, m, out).expect("shape is valid by construction")
}

/// A polynomial with uniform coefficients on the exponent range
/// lo..=hi, with the coefficient at `force_top` (when given) nonzero.
fn random_windowed_poly<R: Rng>(
    rng: &mut R,
    field: PrimeField,
    lo: i64,
    hi: i64,
    force_top: bool,
) -> Poly {
    if hi < lo || hi < 0 {
        return Poly::zero(field);
    }
    let lo = lo.max(0);
    let mut coeffs = vec![0u64; hi as usize + 1];
    for x in lo..=hi {
        coeffs[x as usize] = rng.gen_range(0..field.p());
    }
    if force_top {
        coeffs[hi as usize] = rng.gen_range(1..field.p());
    }
    Poly::from_coeffs(field, coeffs)
}

/// A structure satisfying conditions 1-4: quotient monomials additionally
/// stay inside the exponent windows imposed by the following step. The
/// last step has no following step and is bounded by condition 3 alone.
pub fn random_strict_mcf<R: Rng>(
    rng: &mut R,
    field: PrimeField,
    m: usize,
    steps: usize,
    t_spread: i64,
) -> MPreCf {
    let s = random_schedule(rng, m, steps, t_spread);
    let out: Vec<Step> = s
        .hts
        .iter()
        .enumerate()
        .map(|(i, &(h, t, v_before))| {
            let next = (i + 1 < steps).then(|| (s.hts[i + 1].0, s.v[i + 1]));
            let a = (1..=m)
                .map(|j| {
                    let hi = if j == h {
                        t
                    } else {
                        s.rows[i + 1][j - 1] - v_before - l_ind(h, j)
                    };
                    let lo = match next {
                        // x >= v_{k,j} - v_{k+1} + L(j, h_{k+1})
                        Some((h_next, v_next)) => {
                            s.rows[i + 1][j - 1] - v_next + big_l_ind(j, h_next)
                        }
                        None => 0,
                    };
                    random_windowed_poly(rng, field, lo, hi, j == h)
                })
                .collect();
            Step { h, a }
        })
        .collect();
    MPreCf::new(field, m, out).expect("shape is valid by construction")
}

/// A random rational vector nums_j / den with monic denominator of the
/// given degree and deg nums_j < deg den, not all zero.
pub fn random_fraction<R: Rng>(
    rng: &mut R,
    field: PrimeField,
    m: usize,
    den_deg: i64,
) -> (Vec<Poly>, Poly) {
    assert!(den_deg >= 1);
    let mut den = random_poly(rng, field, den_deg - 1);
    den = den.add(&Poly::monomial(field, 1, den_deg as usize));
    loop {
        let nums: Vec<Poly> = (0..m)
            .map(|_| random_poly(rng, field, den_deg - 1))
            .collect();
        if nums.iter().any(|p| !p.is_zero()) {
            return (nums, den);
        }
    }
}

/// A uniform multisequence prefix: m rows of n coefficients.
pub fn random_prefix<R: Rng>(
    rng: &mut R,
    field: PrimeField,
    m: usize,
    n: usize,
) -> MultiSeqPrefix {
    let rows = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(0..field.p())).collect())
        .collect();
    MultiSeqPrefix::new(field, rows).expect("rows are rectangular")
}

/// A random adjustment that is valid for the proposed step: a subset of
/// the plus-side monomials with rerolled coefficients, sometimes extended
/// by a fresh monomial strictly above the fractional Iv.
pub fn random_epsilon<R: Rng>(rng: &mut R, view: &StepView) -> Vec<Poly> {
    let field = view.floor[0].field();
    let m = view.floor.len();
    let mut eps = vec![Poly::zero(field); m];
    for j in 0..m {
        for (x, _) in view.plus[j].terms() {
            if rng.gen_bool(0.7) {
                let coeff = rng.gen_range(1..field.p());
                eps[j] = eps[j].add(&Poly::monomial(field, coeff, x));
            }
        }
    }
    if let (Some(hf), Some(vf)) = (view.fract_iv.h(), view.fract_iv.v()) {
        if rng.gen_bool(0.5) {
            let j = rng.gen_range(1..=m);
            let cj = view.delta_after.exp(j);
            // (j, cj - x) > (hf, vf) admits x < cj - vf, one more when j > hf.
            let mut max_x = cj - vf - 1;
            if j > hf {
                max_x += 1;
            }
            if max_x >= 0 {
                let x = rng.gen_range(0..=max_x) as usize;
                let coeff = rng.gen_range(1..field.p());
                eps[j - 1] = eps[j - 1].add(&Poly::monomial(field, coeff, x));
            }
        }
    }
    eps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{expand_fraction, EpsilonStrategy, Expander};

    fn fields() -> Vec<PrimeField> {
        vec![PrimeField::new(2).unwrap(), PrimeField::new(3).unwrap()]
    }

    #[test]
    fn generated_mcfs_satisfy_their_conditions() {
        let mut rng = rng_from_seed(11);
        for field in fields() {
            for m in 1..=3 {
                for _ in 0..25 {
                    let steps = rng.gen_range(0..=5);
                    let cf = random_mcf(&mut rng, field, m, steps, 2);
                    let rep = cf.check_conditions();
                    assert!(rep.is_cf(), "{cf}: {rep}");
                    assert!(rep.forms_agree, "{cf}");
                    let strict = random_strict_mcf(&mut rng, field, m, steps, 2);
                    let rep = strict.check_conditions();
                    assert!(rep.is_strict(), "{strict}: {rep}");
                    assert!(rep.forms_agree, "{strict}");
                    let pre = random_pre_cf(&mut rng, field, m, steps.max(1), 3);
                    assert!(pre.check_conditions().cond1);
                }
            }
        }
    }

    #[test]
    fn generated_fractions_expand_and_terminate() {
        let mut rng = rng_from_seed(12);
        for field in fields() {
            for _ in 0..20 {
                let m = rng.gen_range(1..=3);
                let deg = rng.gen_range(1..=6);
                let (nums, den) = random_fraction(&mut rng, field, m, deg);
                let exp =
                    expand_fraction(&nums, &den, EpsilonStrategy::Zero, 1000).unwrap();
                assert!(exp.terminated);
            }
        }
    }

    #[test]
    fn random_adjustments_are_always_accepted() {
        let mut rng = rng_from_seed(13);
        for field in fields() {
            for _ in 0..20 {
                let m = rng.gen_range(1..=3);
                let deg = rng.gen_range(2..=6);
                let (nums, den) = random_fraction(&mut rng, field, m, deg);
                let mut ex = Expander::from_fraction(&nums, &den).unwrap();
                while let Some(view) = ex.propose().unwrap() {
                    let eps = random_epsilon(&mut rng, &view);
                    ex.commit(view, &eps).expect("generated eps is valid");
                    if ex.steps_taken() > 50 {
                        break;
                    }
                }
                let cf = MPreCf::new(field, m, ex.steps().to_vec()).unwrap();
                assert!(cf.check_conditions().is_cf(), "{cf}");
            }
        }
    }

    #[test]
    fn same_seed_reproduces() {
        let f = PrimeField::new(3).unwrap();
        let a = random_mcf(&mut rng_from_seed(99), f, 2, 4, 2);
        let b = random_mcf(&mut rng_from_seed(99), f, 2, 4, 2);
        assert_eq!(a, b);
    }

    #[test]
    fn prefixes_have_requested_shape() {
        let f = PrimeField::new(5).unwrap();
        let s = random_prefix(&mut rng_from_seed(7), f, 3, 6);
        assert_eq!(s.m(), 3);
        assert_eq!(s.n(), 6);
    }
}
