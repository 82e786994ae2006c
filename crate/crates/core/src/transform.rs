//! Expansion of series vectors into continued-fraction steps.
//!
//! The expander holds its state exactly: the working vector beta is kept as
//! polynomial numerators u_1..u_m over one common monic denominator w, and
//! the diagonal weight array c (one exponent per component) is updated as
//! steps are produced. Every decision is made by exact polynomial
//! arithmetic, so termination (beta = 0) is detected reliably and runs on
//! rational inputs always halt.
//!
//! One step, with Delta = diag(z^-c_j):
//!   1. pivot: h = index of Iv(Delta * beta) under the current weights,
//!      val = its valuation; then c_h <- val (the updated weights).
//!   2. divide every numerator by the pivot numerator: floor quotients q_j
//!      and remainders rem_j (the denominator w is divided for j = h).
//!   3. choose an adjustment eps in F[z]^m subject to
//!      Iv(Delta' * fract) <= Iv(Delta' * eps) under the updated weights;
//!      emit a = floor - eps and continue from
//!      w' = u_h, u'_j = rem_j + eps_j * u_h.
//! The zero strategy takes eps = 0; the strict strategy takes eps to be the
//! plus side of the weighted split of floor, which makes the output satisfy
//! condition 4 at every step.
//!
//! Inexact input is truncated to its known window N and the run is capped
//! at steps with n_k <= min(budget, N): those steps depend only on
//! positions the window certifies, because every quotient monomial of step
//! k sits at weighted position <= n_k and every pivot or split comparison
//! against deeper data is settled below position n_{k+1}. Inexact runs are
//! never reported as terminated.
//!
//! A lockstep runner repeats the whole expansion in a second, independent
//! matrix form (columns of a base matrix over the input's denominator) and
//! cross-checks pivots, quotients, weights, termination, and the identity
//! r_k = q_k r - p_k at every step.

use crate::cf::{MPreCf, Step};
use crate::field::PrimeField;
use crate::iv::{poly_vec_iv, DiagExp, IndexedVal};
use crate::poly::Poly;
use crate::series::SeriesVec;
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EpsilonStrategy {
    /// eps = 0 at every step.
    Zero,
    /// eps = plus side of the weighted floor split; output is strict.
    Strict,
}

/// Exact expansion state.
#[derive(Clone, Debug)]
pub struct Expander {
    field: PrimeField,
    m: usize,
    /// Common denominator, monic, nonzero.
    w: Poly,
    /// Numerators: beta_j = u_j / w.
    u: Vec<Poly>,
    /// Weight array; starts at all zeros.
    c: Vec<i64>,
    exact: bool,
    /// Known prefix depth when the input was inexact.
    window: Option<i64>,
    steps: Vec<Step>,
    /// d_{k-1}: sum of pivot degrees emitted so far.
    d_sum: i64,
    n_hist: Vec<i64>,
    v_hist: Vec<i64>,
}

/// Everything about the next step that is known before eps is chosen.
/// A view is tied to the expander state it was proposed from; committing
/// a stale view is rejected.
#[derive(Clone, Debug)]
pub struct StepView {
    pub h: usize,
    /// Pivot quotient degree t_k.
    pub t: i64,
    /// v_k: the updated weight of component h.
    pub pivot_val: i64,
    /// n_k = d_{k-1} + v_k.
    pub n: i64,
    /// Componentwise floor quotients.
    pub floor: Vec<Poly>,
    /// Iv of the fractional remainder under the updated weights.
    pub fract_iv: IndexedVal,
    /// Weighted split of `floor`: monomials below `fract_iv`.
    pub minus: Vec<Poly>,
    /// Monomials of `floor` above `fract_iv`; the strict strategy's eps.
    pub plus: Vec<Poly>,
    /// The updated weight diagonal.
    pub delta_after: DiagExp,
    at_step: usize,
    rems: Vec<Poly>,
    u_h: Poly,
}

impl Expander {
    /// Starts from an exact rational vector nums_j / den.
    /// Requires den != 0, some numerator nonzero, and deg nums_j < deg den
    /// for all j (the value must vanish at infinity).
    pub fn from_fraction(nums: &[Poly], den: &Poly) -> Result<Expander> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if nums.is_empty() {
            return Err(Error::Domain("need at least one component".into()));
        }
        let field = den.field();
        if nums.iter().any(|p| p.field() != field) {
            return Err(Error::FieldMismatch);
        }
        if nums.iter().all(|p| p.is_zero()) {
            return Err(Error::Domain("zero input has the empty expansion".into()));
        }
        if nums.iter().any(|p| p.degree() >= den.degree()) {
            return Err(Error::Domain(
                "input must vanish at infinity: deg num < deg den".into(),
            ));
        }
        let m = nums.len();
        let mut ex = Expander {
            field,
            m,
            w: den.clone(),
            u: nums.to_vec(),
            c: vec![0; m],
            exact: true,
            window: None,
            steps: Vec::new(),
            d_sum: 0,
            n_hist: Vec::new(),
            v_hist: Vec::new(),
        };
        ex.normalize()?;
        Ok(ex)
    }

    /// Starts from a series vector with positive valuation in every
    /// component. Inexact input is truncated to its known window, which
    /// later caps certified emission; it can never be declared terminated.
    pub fn from_series(r: &SeriesVec) -> Result<Expander> {
        let field = r.field();
        let m = r.m();
        if r.is_zero_exact() {
            return Err(Error::Domain("zero input has the empty expansion".into()));
        }
        for j in 1..=m {
            if !r.comp(j).poly_part().is_zero() {
                return Err(Error::Domain(format!(
                    "component {j} has a polynomial part; expansion needs valuation > 0"
                )));
            }
        }
        let exact = r.is_exact();
        let window = r.precision();
        // Common denominator z^depth over the stored coefficients.
        let mut depth = 1usize;
        for j in 1..=m {
            depth = depth.max(r.comp(j).frac_coeffs().len());
        }
        let w = Poly::monomial(field, 1, depth);
        let u: Vec<Poly> = (1..=m)
            .map(|j| {
                let fc = r.comp(j).frac_coeffs();
                let mut coeffs = vec![0u64; depth];
                for (i, &cf) in fc.iter().enumerate() {
                    // coefficient of z^-(i+1) becomes z^(depth-i-1)
                    coeffs[depth - i - 1] = cf;
                }
                Poly::from_coeffs(field, coeffs)
            })
            .collect();
        let mut ex = Expander {
            field,
            m,
            w,
            u,
            c: vec![0; m],
            exact,
            window,
            steps: Vec::new(),
            d_sum: 0,
            n_hist: Vec::new(),
            v_hist: Vec::new(),
        };
        ex.normalize()?;
        Ok(ex)
    }

    /// Removes common factors and makes the denominator monic.
    fn normalize(&mut self) -> Result<()> {
        let mut all = vec![self.w.clone()];
        all.extend(self.u.iter().cloned());
        let g = Poly::gcd_all(all.iter()).expect("denominator is nonzero");
        if g.degree() > crate::poly::Degree::Finite(0) {
            let (q, rem) = self.w.divmod(&g)?;
            debug_assert!(rem.is_zero());
            self.w = q;
            for uj in &mut self.u {
                let (q, rem) = uj.divmod(&g)?;
                debug_assert!(rem.is_zero());
                *uj = q;
            }
        }
        let lc = self.w.leading();
        if lc != 1 {
            let s = self.field.inv(lc)?;
            self.w = self.w.scale(s);
            for uj in &mut self.u {
                *uj = uj.scale(s);
            }
        }
        Ok(())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn steps_taken(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn window(&self) -> Option<i64> {
        self.window
    }

    /// Current weight array (the diagonal exponents after the steps taken).
    pub fn weights(&self) -> &[i64] {
        &self.c
    }

    /// Sum of emitted pivot degrees.
    pub fn d_sum(&self) -> i64 {
        self.d_sum
    }

    pub fn n_history(&self) -> &[i64] {
        &self.n_hist
    }

    pub fn v_history(&self) -> &[i64] {
        &self.v_hist
    }

    /// The residual state has reached zero.
    pub fn is_done(&self) -> bool {
        self.u.iter().all(Poly::is_zero)
    }

    /// Current exact state (denominator, numerators).
    pub fn state(&self) -> (&Poly, &[Poly]) {
        (&self.w, &self.u)
    }

    /// Materializes the residual vector as a series window.
    pub fn beta_window(&self, depth: usize) -> Result<SeriesVec> {
        let entries = self
            .u
            .iter()
            .map(|uj| crate::series::TruncSeries::from_fraction(uj, &self.w, depth))
            .collect::<Result<Vec<_>>>()?;
        SeriesVec::new(entries)
    }

    /// Computes the next step up to the choice of eps. Returns None when
    /// the residual is zero.
    pub fn propose(&self) -> Result<Option<StepView>> {
        let mut best: Option<(i64, usize)> = None;
        let dw = self.w.degree().finite().expect("denominator nonzero");
        for j in 1..=self.m {
            let uj = &self.u[j - 1];
            if uj.is_zero() {
                continue;
            }
            let du = uj.degree().finite().expect("nonzero");
            let vj = dw - du + self.c[j - 1];
            if best.map_or(true, |(bv, _)| vj < bv) {
                best = Some((vj, j));
            }
        }
        let Some((val, h)) = best else {
            return Ok(None);
        };
        let u_h = self.u[h - 1].clone();
        let t = dw - u_h.degree().finite().expect("nonzero");
        let n = self.d_sum + val;
        let mut c_after = self.c.clone();
        c_after[h - 1] = val;
        let mut floor = Vec::with_capacity(self.m);
        let mut rems = Vec::with_capacity(self.m);
        for j in 1..=self.m {
            let (q, rem) = if j == h {
                self.w.divmod(&u_h)?
            } else {
                self.u[j - 1].divmod(&u_h)?
            };
            floor.push(q);
            rems.push(rem);
        }
        let dh = u_h.degree().finite().expect("nonzero");
        let fract_iv = rems
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_zero())
            .map(|(i, r)| {
                IndexedVal::new(i + 1, dh - r.degree().finite().unwrap() + c_after[i])
            })
            .min()
            .unwrap_or(IndexedVal::INFINITY);
        let (minus, plus) = split_by_weight(&floor, &c_after, fract_iv);
        Ok(Some(StepView {
            h,
            t,
            pivot_val: val,
            n,
            floor,
            fract_iv,
            minus,
            plus,
            delta_after: DiagExp::from_exps(c_after),
            at_step: self.steps.len(),
            rems,
            u_h,
        }))
    }

    /// Commits a proposed step with an explicit eps, validating the
    /// constraint Iv(Delta' fract) <= Iv(Delta' eps).
    pub fn commit(&mut self, view: StepView, eps: &[Poly]) -> Result<Step> {
        if view.at_step != self.steps.len() {
            return Err(Error::Domain(
                "stale step view: the expander has moved on".into(),
            ));
        }
        if eps.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: eps.len() });
        }
        if eps.iter().any(|p| p.field() != self.field) {
            return Err(Error::FieldMismatch);
        }
        let k = self.steps.len() + 1;
        let eps_iv = poly_vec_iv(eps, &view.delta_after);
        if eps_iv < view.fract_iv {
            return Err(Error::InvalidEpsilon {
                step: k,
                reason: format!(
                    "Iv(Delta eps) = {eps_iv} is below the fractional Iv {}",
                    view.fract_iv
                ),
            });
        }
        let a: Vec<Poly> = view
            .floor
            .iter()
            .zip(eps)
            .map(|(f, e)| f.sub(e))
            .collect();
        if a[view.h - 1].degree() != crate::poly::Degree::Finite(view.t) {
            return Err(Error::Internal(format!(
                "step {k}: eps disturbed the pivot degree {} -> {:?}",
                view.t,
                a[view.h - 1].degree()
            )));
        }
        debug_assert!(view.t >= 1, "pivot quotient must have positive degree");
        debug_assert!(
            self.n_hist.last().map_or(true, |&last| view.n >= last),
            "n_k must be nondecreasing"
        );
        self.w = view.u_h.clone();
        for j in 1..=self.m {
            self.u[j - 1] = view.rems[j - 1].add(&eps[j - 1].mul(&view.u_h));
        }
        self.normalize()?;
        self.c = view.delta_after.exps().to_vec();
        self.d_sum += view.t;
        self.n_hist.push(view.n);
        self.v_hist.push(view.pivot_val);
        let step = Step { h: view.h, a };
        self.steps.push(step.clone());
        Ok(step)
    }

    /// Proposes and commits one step under a built-in strategy.
    pub fn step(&mut self, strategy: EpsilonStrategy) -> Result<Option<Step>> {
        match self.propose()? {
            None => Ok(None),
            Some(view) => {
                let eps = match strategy {
                    EpsilonStrategy::Zero => vec![Poly::zero(self.field); self.m],
                    EpsilonStrategy::Strict => view.plus.clone(),
                };
                Ok(Some(self.commit(view, &eps)?))
            }
        }
    }
}

/// Splits a polynomial vector by monomial weight: a monomial z^x in
/// component j goes to `minus` when (j, c_j - x) < pivot and to `plus`
/// otherwise. Equality cannot occur when pivot is the Iv of a fractional
/// remainder under the same weights.
fn split_by_weight(
    polys: &[Poly],
    weights: &[i64],
    pivot: IndexedVal,
) -> (Vec<Poly>, Vec<Poly>) {
    let f = polys[0].field();
    let mut minus = Vec::with_capacity(polys.len());
    let mut plus = Vec::with_capacity(polys.len());
    for (i, p) in polys.iter().enumerate() {
        let mut mi = Poly::zero(f);
        let mut pl = Poly::zero(f);
        for (x, coeff) in p.terms() {
            let iv = IndexedVal::new(i + 1, weights[i] - x as i64);
            debug_assert!(iv != pivot, "weighted split must have no ties");
            let mono = Poly::monomial(f, coeff, x);
            if iv < pivot {
                mi = mi.add(&mono);
            } else {
                pl = pl.add(&mono);
            }
        }
        minus.push(mi);
        plus.push(pl);
    }
    (minus, plus)
}

/// Splits the polynomial part of a series vector against the Iv of its
/// fractional part under the given weights. Errors when that Iv is not
/// determined by the known window.
pub fn delta_poly_split(r: &SeriesVec, delta: &DiagExp) -> Result<(Vec<Poly>, Vec<Poly>)> {
    if delta.m() != r.m() {
        return Err(Error::DimensionMismatch { expected: r.m(), got: delta.m() });
    }
    let (floor, fract) = r.floor_fract();
    let pivot = fract.indexed_valuation_under(delta)?;
    Ok(split_by_weight(&floor, delta.exps(), pivot))
}

/// A finished (possibly capped) expansion.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub cf: MPreCf,
    /// The residual reached zero on exact input: the structure is complete.
    pub terminated: bool,
    /// Every emitted step k has n_k <= certified_n, and steps in that range
    /// depend only on input positions (j, t) with t <= certified_n.
    pub certified_n: i64,
    /// The n-budget stopped the run before the residual was exhausted.
    pub hit_cap: bool,
    /// n_k per emitted step.
    pub n_values: Vec<i64>,
    /// v_k per emitted step.
    pub v_values: Vec<i64>,
}

impl Expansion {
    /// Total step count plus one, known only for terminated runs.
    pub fn omega(&self) -> Option<usize> {
        self.terminated.then(|| self.cf.omega())
    }
}

fn run_expander(
    mut ex: Expander,
    strategy: EpsilonStrategy,
    budget: i64,
) -> Result<Expansion> {
    let cap = match ex.window {
        Some(win) => win.min(budget),
        None => budget,
    };
    // Each n value repeats at most m times, so this cannot loop forever.
    let step_limit = (ex.m as i64)
        .saturating_mul(cap.max(0))
        .saturating_add(ex.m as i64 + 1);
    let mut hit_cap = false;
    while let Some(view) = ex.propose()? {
        if view.n > cap {
            hit_cap = true;
            break;
        }
        if ex.steps_taken() as i64 >= step_limit {
            return Err(Error::Internal("expansion failed to advance".into()));
        }
        let eps = match strategy {
            EpsilonStrategy::Zero => vec![Poly::zero(ex.field); ex.m],
            EpsilonStrategy::Strict => view.plus.clone(),
        };
        ex.commit(view, &eps)?;
    }
    let terminated = ex.exact && ex.is_done();
    let cf = MPreCf::new(ex.field, ex.m, ex.steps.clone())?;
    debug_assert!(
        cf.check_conditions().is_cf(),
        "expansion must satisfy conditions 1-3"
    );
    debug_assert!(
        strategy != EpsilonStrategy::Strict || cf.check_conditions().is_strict(),
        "strict strategy must satisfy condition 4"
    );
    Ok(Expansion {
        cf,
        terminated,
        certified_n: cap,
        hit_cap,
        n_values: ex.n_hist,
        v_values: ex.v_hist,
    })
}

/// Expands a series vector, emitting steps with n_k up to the budget.
/// Inexact input additionally caps emission at its known window and is
/// never reported as terminated.
pub fn expand(r: &SeriesVec, strategy: EpsilonStrategy, budget: i64) -> Result<Expansion> {
    run_expander(Expander::from_series(r)?, strategy, budget)
}

/// Expands an exact rational vector nums_j / den.
pub fn expand_fraction(
    nums: &[Poly],
    den: &Poly,
    strategy: EpsilonStrategy,
    budget: i64,
) -> Result<Expansion> {
    run_expander(Expander::from_fraction(nums, den)?, strategy, budget)
}

fn rational_iv(nums: &[Poly], den: &Poly) -> IndexedVal {
    let dd = den.degree().finite().expect("denominator nonzero");
    nums.iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(i, p)| IndexedVal::new(i + 1, dd - p.degree().finite().unwrap()))
        .min()
        .unwrap_or(IndexedVal::INFINITY)
}

/// Expands an exact rational vector while repeating the run in an
/// independent matrix form and cross-checking every step: pivot agreement,
/// quotient consistency, base-matrix column indices and weights, the
/// identity r_k = q_k r - p_k against the convergents of the emitted
/// structure, termination agreement, and Iv(R x) = Iv(Delta x) for each
/// probe vector. Any mismatch is an internal error.
pub fn expand_lockstep(
    nums: &[Poly],
    den: &Poly,
    strategy: EpsilonStrategy,
    budget: i64,
    probes: &[Vec<Poly>],
) -> Result<Expansion> {
    let mut ex = Expander::from_fraction(nums, den)?;
    let f = ex.field;
    let m = ex.m;
    let w0 = ex.w.clone();
    let u0 = ex.u.clone();
    // Column-major numerators of the base matrix over w0; starts at w0 * I.
    let mut cols: Vec<Vec<Poly>> = (0..m)
        .map(|j| {
            let mut col = vec![Poly::zero(f); m];
            col[j] = w0.clone();
            col
        })
        .collect();
    let mut rvec = u0.clone();
    let cap = budget;
    let mut hit_cap = false;
    while let Some(view) = ex.propose()? {
        if view.n > cap {
            hit_cap = true;
            break;
        }
        let k = ex.steps_taken() + 1;
        if rvec.iter().all(Poly::is_zero) {
            return Err(Error::Internal(format!(
                "step {k}: matrix residual is zero but the fraction state is not"
            )));
        }
        // Pivot agreement: Iv(r_{k-1}) must be (h_k, v_k).
        let iv_r = rational_iv(&rvec, &w0);
        if iv_r != IndexedVal::new(view.h, view.pivot_val) {
            return Err(Error::Internal(format!(
                "step {k}: matrix residual Iv {iv_r} disagrees with pivot ({}, {})",
                view.h, view.pivot_val
            )));
        }
        // Column swap: s = old column h, new column h = -r_{k-1}.
        let s: Vec<Poly> = cols[view.h - 1].iter().map(Poly::neg).collect();
        cols[view.h - 1] = rvec.iter().map(Poly::neg).collect();
        // Quotient consistency: R * rho = s, cross-multiplied by the
        // fraction state's pivot numerator.
        let (wb, ub) = (ex.w.clone(), ex.u.to_vec());
        let u_h = ub[view.h - 1].clone();
        for i in 0..m {
            let mut lhs = Poly::zero(f);
            for j in 0..m {
                let rho_num = if j == view.h - 1 { &wb } else { &ub[j] };
                lhs = lhs.add(&cols[j][i].mul(rho_num));
            }
            let rhs = s[i].mul(&u_h);
            if lhs != rhs {
                return Err(Error::Internal(format!(
                    "step {k}: quotient relation fails in row {}",
                    i + 1
                )));
            }
        }
        // Base-matrix shape: column j is nonzero, has index j, and its
        // valuation is the updated weight c_j.
        for j in 1..=m {
            let col_iv = rational_iv(&cols[j - 1], &w0);
            match col_iv.h() {
                Some(h) if h == j => {}
                _ => {
                    return Err(Error::Internal(format!(
                        "step {k}: column {j} has index {col_iv}, want {j}"
                    )));
                }
            }
            if col_iv.v() != Some(view.delta_after.exp(j)) {
                return Err(Error::Internal(format!(
                    "step {k}: column {j} valuation {col_iv} disagrees with weight {}",
                    view.delta_after.exp(j)
                )));
            }
        }
        let eps = match strategy {
            EpsilonStrategy::Zero => vec![Poly::zero(f); m],
            EpsilonStrategy::Strict => view.plus.clone(),
        };
        let step = ex.commit(view, &eps)?;
        // Residual update: r_k = -R a_k + s.
        let mut rnew = s;
        for j in 0..m {
            if step.a[j].is_zero() {
                continue;
            }
            for i in 0..m {
                rnew[i] = rnew[i].sub(&cols[j][i].mul(&step.a[j]));
            }
        }
        rvec = rnew;
        // Identity r_k = q_k r - p_k over the original denominator.
        let cf_now = MPreCf::new(f, m, ex.steps.clone())?;
        let table = cf_now.convergents(k, false)?;
        let (pk, qk) = table.pair(k);
        for i in 0..m {
            let want = qk.mul(&u0[i]).sub(&pk[i].mul(&w0));
            if rvec[i] != want {
                return Err(Error::Internal(format!(
                    "step {k}: residual identity fails in component {}",
                    i + 1
                )));
            }
        }
        // Weighted-valuation law of the base matrix on probe vectors.
        for x in probes {
            if x.len() != m || x.iter().all(Poly::is_zero) {
                continue;
            }
            let mut rx = vec![Poly::zero(f); m];
            for j in 0..m {
                if x[j].is_zero() {
                    continue;
                }
                for i in 0..m {
                    rx[i] = rx[i].add(&cols[j][i].mul(&x[j]));
                }
            }
            let lhs = rational_iv(&rx, &w0);
            let rhs = x
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(j, p)| {
                    IndexedVal::new(
                        j + 1,
                        ex.c[j] - p.degree().finite().unwrap(),
                    )
                })
                .min()
                .unwrap_or(IndexedVal::INFINITY);
            if lhs != rhs {
                return Err(Error::Internal(format!(
                    "step {k}: probe valuation {lhs} disagrees with weighted {rhs}"
                )));
            }
        }
    }
    if !hit_cap && !rvec.iter().all(Poly::is_zero) {
        return Err(Error::Internal(
            "fraction state terminated but the matrix residual is nonzero".into(),
        ));
    }
    let terminated = ex.exact && ex.is_done();
    let cf = MPreCf::new(f, m, ex.steps.clone())?;
    Ok(Expansion {
        cf,
        terminated,
        certified_n: cap,
        hit_cap,
        n_values: ex.n_hist,
        v_values: ex.v_hist,
    })
}
