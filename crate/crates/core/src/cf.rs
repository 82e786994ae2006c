//! m-dimensional pre-continued-fraction structures.
//!
//! A structure is a step list (h_k, a_k) for k = 1..omega-1 with pivot
//! indices h_k in 1..=m and partial quotients a_k in F[z]^m (the leading
//! a_0 = 0 is implicit and never stored). Derived quantities:
//!   t_k = deg a_{k,h_k}            (t_0 = 0)
//!   d_k = t_1 + ... + t_k          (d_0 = 0)
//!   v_{k,j} = sum of t_i over i <= k with h_i = j   (v_{0,j} = 0)
//!   v_k = v_{k,h_k}                (v_0 = 0)
//!   n_k = d_{k-1} + v_k = d_k + v_{k-1,h_k}
//!   l(k,j) = largest i <= k with h_i = j, else 0
//!   D_k = diag(z^-v_{k,1}, ..., z^-v_{k,m})
//!
//! Validity conditions on the steps:
//!   1. deg a_{k,h_k} >= 1 for all k
//!   2. (h_k, v_{k-1,h_k}) < (h_{k+1}, v_{k+1}) for k < omega-1
//!   3. Iv(D_k a_k) = (h_k, v_{k-1,h_k}) for all k
//!   4. Supp+(D_k a_k) < (h_{k+1}, v_{k+1}) for k < omega-1
//! Conditions 1-3 make the structure a continued fraction; adding 4 makes
//! it strict. [`MPreCf::check_conditions`] evaluates each condition both by
//! definition and through its equivalent reformulations and reports whether
//! all forms agree.
//!
//! Convergents b_k = (p_k, q_k) follow B_k = B_{k-1} E_{h_k} A(a_k) with
//! B_0 = I; the production path is the column recurrence, and a verification
//! flag recomputes every B_k by full matrix products and cross-checks.

use crate::field::PrimeField;
use crate::iv::{iv_less, poly_vec_iv, poly_vec_support, DiagExp, IndexedVal};
use crate::poly::{Degree, Poly};
use crate::series::{SeriesVec, TruncSeries};
use crate::{Error, Result};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Step {
    pub h: usize,
    pub a: Vec<Poly>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MPreCf {
    field: PrimeField,
    m: usize,
    steps: Vec<Step>,
}

impl MPreCf {
    pub fn new(field: PrimeField, m: usize, steps: Vec<Step>) -> Result<MPreCf> {
        if m == 0 {
            return Err(Error::Domain("dimension m must be at least 1".into()));
        }
        for (i, s) in steps.iter().enumerate() {
            if s.h < 1 || s.h > m {
                return Err(Error::InvalidCf {
                    step: i + 1,
                    reason: format!("pivot index {} outside 1..={m}", s.h),
                });
            }
            if s.a.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: s.a.len() });
            }
            if s.a.iter().any(|p| p.field() != field) {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(MPreCf { field, m, steps })
    }

    pub fn empty(field: PrimeField, m: usize) -> MPreCf {
        MPreCf { field, m, steps: Vec::new() }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// omega: the step count plus one (steps are indexed 1..omega-1).
    pub fn omega(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// 1-based step access.
    pub fn step(&self, k: usize) -> &Step {
        &self.steps[k - 1]
    }

    fn cond1_violation(&self) -> Option<usize> {
        (1..self.omega()).find(|&k| {
            self.step(k).a[self.step(k).h - 1].degree() < Degree::Finite(1)
        })
    }

    /// Derived quantity tables; requires condition 1.
    pub fn quantities(&self) -> Result<CfQuantities> {
        if let Some(k) = self.cond1_violation() {
            return Err(Error::InvalidCf {
                step: k,
                reason: "condition 1 fails: pivot quotient has degree < 1".into(),
            });
        }
        let omega = self.omega();
        let m = self.m;
        let mut t = vec![0i64; omega];
        let mut d = vec![0i64; omega];
        let mut v = vec![0i64; omega];
        let mut n = vec![0i64; omega];
        let mut v_table = vec![vec![0i64; m]];
        let mut l_table = vec![vec![0usize; m]];
        n[0] = 1; // profile convention: the ladder starts at position 1
        for k in 1..omega {
            let Step { h, a } = self.step(k);
            let tk = a[h - 1].degree().finite().expect("condition 1 checked");
            t[k] = tk;
            d[k] = d[k - 1] + tk;
            let mut row = v_table[k - 1].clone();
            row[h - 1] += tk;
            let mut lrow = l_table[k - 1].clone();
            lrow[h - 1] = k;
            v[k] = row[h - 1];
            n[k] = d[k - 1] + v[k];
            debug_assert_eq!(n[k], d[k] + v_table[k - 1][h - 1], "two faces of n_k");
            v_table.push(row);
            l_table.push(lrow);
        }
        Ok(CfQuantities { m, omega, t, d, v, n, v_table, l_table })
    }

    /// Evaluates conditions 1-4, each through all of its equivalent forms.
    /// Never errors: a failed condition 1 reports conditions 2-4 false by
    /// convention (they are undefined without it).
    pub fn check_conditions(&self) -> ConditionReport {
        let omega = self.omega();
        if let Some(k) = self.cond1_violation() {
            return ConditionReport {
                cond1: false,
                cond2: false,
                cond3: false,
                cond4: false,
                first_violation: Some(k),
                forms_agree: true,
                violations: vec![(k, 1)],
            };
        }
        let q = self.quantities().expect("condition 1 holds");
        let mut violations: Vec<(usize, u8)> = Vec::new();
        let mut forms_agree = true;
        let mut cond3_at = vec![true; omega]; // indexed by k
        for k in 1..omega {
            let Step { h, a } = self.step(k);
            let h = *h;
            let dk = q.weights(k);
            // Condition 3 by definition.
            let target = IndexedVal::new(h, q.v_table[k - 1][h - 1]);
            let c3_def = poly_vec_iv(a, &dk) == target;
            // Reformulation: componentwise degree bounds off the pivot.
            let c3_deg = (1..=self.m).all(|j| {
                if j == h {
                    return true;
                }
                let bound = q.v_table[k][j - 1]
                    - q.v_table[k - 1][h - 1]
                    - crate::iv::l_ind(h, j);
                a[j - 1].degree() <= Degree::Finite(bound)
            });
            if c3_def != c3_deg {
                forms_agree = false;
            }
            cond3_at[k] = c3_def;
            if !c3_def {
                violations.push((k, 3));
            }
        }
        for k in 1..omega.saturating_sub(1) {
            let h = self.step(k).h;
            let h_next = self.step(k + 1).h;
            // Condition 2, three faces.
            let c2_def = iv_less(
                IndexedVal::new(h, q.v_table[k - 1][h - 1]),
                IndexedVal::new(h_next, q.v[k + 1]),
            );
            let c2_n = iv_less(
                IndexedVal::new(h, q.n[k]),
                IndexedVal::new(h_next, q.n[k + 1]),
            );
            let c2_t = q.v_table[k - 1][h - 1] - q.v_table[k][h_next - 1]
                + crate::iv::big_l_ind(h, h_next)
                <= q.t[k + 1];
            if c2_def != c2_n || c2_def != c2_t {
                forms_agree = false;
            }
            if !c2_def {
                violations.push((k, 2));
            }
            // Condition 4 by definition.
            let a = &self.step(k).a;
            let dk = q.weights(k);
            let supp = poly_vec_support(a, &dk);
            let c4_def = match supp.supp_plus() {
                Ok(top) => iv_less(top, IndexedVal::new(h_next, q.v[k + 1])),
                Err(_) => true, // empty support cannot exceed anything
            };
            // Exponent-window reformulation, valid under condition 3 at k.
            if cond3_at[k] {
                let c4_win = (1..=self.m).all(|j| {
                    let lo = q.v_table[k][j - 1] - q.v[k + 1]
                        + crate::iv::big_l_ind(j, h_next);
                    a[j - 1].terms().all(|(x, _)| x as i64 >= lo)
                });
                if c4_def != c4_win {
                    forms_agree = false;
                }
            }
            if !c4_def {
                violations.push((k, 4));
            }
        }
        // Degree-gap bounds implied by conditions 2 and 3 together.
        let cond2 = !violations.iter().any(|(_, c)| *c == 2);
        let cond3 = !violations.iter().any(|(_, c)| *c == 3);
        if cond2 && cond3 {
            for k in 1..omega {
                let Step { h, a } = self.step(k);
                for j in 1..=self.m {
                    if j == *h {
                        continue;
                    }
                    let deg = a[j - 1].degree();
                    let ok = match q.l_table[k][j - 1] {
                        0 => deg <= Degree::Finite(0),
                        l => deg < Degree::Finite(q.d[k] - q.d[l - 1]),
                    };
                    if !ok {
                        forms_agree = false;
                    }
                }
            }
        }
        violations.sort();
        ConditionReport {
            cond1: true,
            cond2,
            cond3,
            cond4: !violations.iter().any(|(_, c)| *c == 4),
            first_violation: violations.first().map(|(k, _)| *k),
            forms_agree,
            violations,
        }
    }

    /// Convergent pairs (p_k, q_k) for k = 0..=upto via the column
    /// recurrence. With `verify` every B_k is also recomputed as a full
    /// matrix product and cross-checked (including the column reuse table
    /// and the primitivity gcd(q_k, p_k) = 1).
    pub fn convergents(&self, upto: usize, verify: bool) -> Result<ConvergentTable> {
        if upto >= self.omega() {
            return Err(Error::Domain(format!(
                "convergent index {upto} out of range (omega = {})",
                self.omega()
            )));
        }
        if let Some(k) = self.cond1_violation() {
            return Err(Error::InvalidCf {
                step: k,
                reason: "condition 1 fails: pivot quotient has degree < 1".into(),
            });
        }
        let f = self.field;
        let m = self.m;
        // cols[j-1] = (P_{k-1,j}, Q_{k-1,j}); starts at (e_j, 0) from B_0 = I.
        let mut cols: Vec<(Vec<Poly>, Poly)> = (0..m)
            .map(|j| {
                let mut e = vec![Poly::zero(f); m];
                e[j] = Poly::one(f);
                (e, Poly::zero(f))
            })
            .collect();
        let mut pairs: Vec<(Vec<Poly>, Poly)> =
            vec![(vec![Poly::zero(f); m], Poly::one(f))];
        let mut mats: Vec<Vec<Vec<Poly>>> = vec![mat_identity(f, m + 1)];
        let quantities = if verify { Some(self.quantities()?) } else { None };
        for k in 1..=upto {
            let Step { h, a } = self.step(k);
            let old_col = cols[h - 1].clone();
            cols[h - 1] = pairs[k - 1].clone();
            // b_k = sum_j cols_j a_{k,j} + old column h.
            let mut p = old_col.0.clone();
            let mut qq = old_col.1.clone();
            for j in 1..=m {
                let aj = &a[j - 1];
                if aj.is_zero() {
                    continue;
                }
                for (pi, cj) in p.iter_mut().zip(&cols[j - 1].0) {
                    *pi = pi.add(&cj.mul(aj));
                }
                qq = qq.add(&cols[j - 1].1.mul(aj));
            }
            pairs.push((p, qq));
            if let Some(q) = &quantities {
                let prev = mats[k - 1].clone();
                let bk = mat_mul(&mat_mul(&prev, &e_matrix(f, m, *h)), &a_matrix(f, a));
                // Last column must equal the recurrence pair.
                let (pk, qk) = &pairs[k];
                for i in 0..m {
                    if bk[i][m] != pk[i] {
                        return Err(Error::Internal(format!(
                            "matrix product and recurrence disagree at step {k}, row {i}"
                        )));
                    }
                }
                if bk[m][m] != *qk {
                    return Err(Error::Internal(format!(
                        "matrix product and recurrence disagree at step {k}, last row"
                    )));
                }
                // First m columns must match the column state and the reuse table.
                for j in 1..=m {
                    for i in 0..m {
                        if bk[i][j - 1] != cols[j - 1].0[i] {
                            return Err(Error::Internal(format!(
                                "column state diverged at step {k}, column {j}"
                            )));
                        }
                    }
                    if bk[m][j - 1] != cols[j - 1].1 {
                        return Err(Error::Internal(format!(
                            "column state diverged at step {k}, column {j} last row"
                        )));
                    }
                    let expected = match q.l_table[k][j - 1] {
                        0 => {
                            let mut e = vec![Poly::zero(f); m];
                            e[j - 1] = Poly::one(f);
                            (e, Poly::zero(f))
                        }
                        l => pairs[l - 1].clone(),
                    };
                    if cols[j - 1] != expected {
                        return Err(Error::Internal(format!(
                            "column {j} at step {k} is not the expected reused convergent"
                        )));
                    }
                }
                // Primitivity: gcd(q_k, p_{k,1}, ..., p_{k,m}) = 1.
                let mut all = vec![pairs[k].1.clone()];
                all.extend(pairs[k].0.iter().cloned());
                let g = Poly::gcd_all(all.iter()).expect("nonempty");
                if g != Poly::one(f) {
                    return Err(Error::Internal(format!(
                        "convergent at step {k} is not primitive: gcd = {g}"
                    )));
                }
                mats.push(bk);
            }
        }
        Ok(ConvergentTable {
            pairs,
            mats: if verify { Some(mats) } else { None },
        })
    }

    /// Evaluates the structure to a series vector window: p_{omega-1}/q_{omega-1}
    /// expanded to `precision`. Requires conditions 1-3.
    pub fn evaluate_phi(&self, precision: usize) -> Result<PhiResult> {
        let report = self.check_conditions();
        if !report.is_cf() {
            let k = report.first_violation.unwrap_or(1);
            return Err(Error::InvalidCf {
                step: k,
                reason: format!("conditions 1-3 do not hold: {report}"),
            });
        }
        let upto = self.omega() - 1;
        let table = self.convergents(upto, false)?;
        let (p, q) = table.pair(upto);
        let entries = p
            .iter()
            .map(|pj| TruncSeries::from_fraction(pj, q, precision))
            .collect::<Result<Vec<_>>>()?;
        let value = SeriesVec::new(entries)?;
        let certified = IndexedVal::new(self.m, precision as i64);
        let prefix_certified = if upto == 0 {
            IndexedVal::new(self.m, 0)
        } else {
            let quant = self.quantities()?;
            certified.min(IndexedVal::new(self.step(upto).h, quant.n[upto]))
        };
        Ok(PhiResult { value, certified, prefix_certified })
    }

    /// Canonical text form: `m=2 p=2 ; h=1 a=[z,0] ; h=2 a=[0,z]`.
    pub fn parse(text: &str) -> Result<MPreCf> {
        let mut segments = text.split(';').map(str::trim).filter(|s| !s.is_empty());
        let header = segments
            .next()
            .ok_or_else(|| Error::Parse("empty continued fraction text".into()))?;
        let mut m: Option<usize> = None;
        let mut p: Option<u64> = None;
        for tok in header.split_whitespace() {
            match tok.split_once('=') {
                Some(("m", v)) => {
                    m = Some(v.parse().map_err(|_| Error::Parse(format!("bad m in {tok:?}")))?)
                }
                Some(("p", v)) => {
                    p = Some(v.parse().map_err(|_| Error::Parse(format!("bad p in {tok:?}")))?)
                }
                _ => return Err(Error::Parse(format!("unexpected header token {tok:?}"))),
            }
        }
        let m = m.ok_or_else(|| Error::Parse("header must set m".into()))?;
        let p = p.ok_or_else(|| Error::Parse("header must set p".into()))?;
        let field = PrimeField::new(p)?;
        let mut steps = Vec::new();
        for seg in segments {
            let rest = seg
                .strip_prefix("h=")
                .ok_or_else(|| Error::Parse(format!("step must start with h=: {seg:?}")))?;
            let (h_str, a_str) = rest
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Parse(format!("step needs a quotient list: {seg:?}")))?;
            let h: usize = h_str
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad pivot index in {seg:?}")))?;
            let a_str = a_str.trim();
            let inner = a_str
                .strip_prefix("a=[")
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("quotients must be a=[...]: {seg:?}")))?;
            let a = inner
                .split(',')
                .map(|s| Poly::parse(field, s))
                .collect::<Result<Vec<_>>>()?;
            steps.push(Step { h, a });
        }
        MPreCf::new(field, m, steps)
    }
}

impl fmt::Display for MPreCf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={} p={}", self.m, self.field.p())?;
        for s in &self.steps {
            write!(f, " ; h={} a=[", s.h)?;
            for (i, a) in s.a.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Quantity tables, indexed by the mathematical k (0..omega-1).
/// t[0] = v[0] = d[0] = 0 and n[0] = 1 are the boundary conventions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CfQuantities {
    pub m: usize,
    pub omega: usize,
    pub t: Vec<i64>,
    pub d: Vec<i64>,
    pub v: Vec<i64>,
    pub n: Vec<i64>,
    /// v_table[k][j-1] = v_{k,j}
    pub v_table: Vec<Vec<i64>>,
    /// l_table[k][j-1] = l(k,j), 0 when component j was never the pivot
    pub l_table: Vec<Vec<usize>>,
}

impl CfQuantities {
    /// D_k = diag(z^-v_{k,1}, ..., z^-v_{k,m}).
    pub fn weights(&self, k: usize) -> DiagExp {
        DiagExp::from_exps(self.v_table[k].clone())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConditionReport {
    pub cond1: bool,
    pub cond2: bool,
    pub cond3: bool,
    pub cond4: bool,
    /// Smallest step index at which any condition fails.
    pub first_violation: Option<usize>,
    /// Whether every equivalent reformulation agreed with its definition.
    pub forms_agree: bool,
    /// All (step, condition) violations, sorted.
    pub violations: Vec<(usize, u8)>,
}

impl ConditionReport {
    /// Conditions 1-3: a continued fraction.
    pub fn is_cf(&self) -> bool {
        self.cond1 && self.cond2 && self.cond3
    }

    /// Conditions 1-4: a strict continued fraction.
    pub fn is_strict(&self) -> bool {
        self.is_cf() && self.cond4
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cond1={} cond2={} cond3={} cond4={} first_violation={}",
            self.cond1,
            self.cond2,
            self.cond3,
            self.cond4,
            match self.first_violation {
                Some(k) => k.to_string(),
                None => "none".into(),
            }
        )
    }
}

/// Convergents (p_k, q_k), k = 0..=upto; p_0 = 0, q_0 = 1.
#[derive(Clone, Debug)]
pub struct ConvergentTable {
    pairs: Vec<(Vec<Poly>, Poly)>,
    mats: Option<Vec<Vec<Vec<Poly>>>>,
}

impl ConvergentTable {
    pub fn upto(&self) -> usize {
        self.pairs.len() - 1
    }

    pub fn pair(&self, k: usize) -> (&[Poly], &Poly) {
        let (p, q) = &self.pairs[k];
        (p, q)
    }

    pub fn p(&self, k: usize) -> &[Poly] {
        &self.pairs[k].0
    }

    pub fn q(&self, k: usize) -> &Poly {
        &self.pairs[k].1
    }

    /// B_k as a row-major (m+1) x (m+1) matrix; present only when the
    /// table was computed with verification.
    pub fn matrix(&self, k: usize) -> Option<&Vec<Vec<Poly>>> {
        self.mats.as_ref().map(|m| &m[k])
    }
}

/// Evaluation result: the value window plus certification bounds.
#[derive(Clone, Debug)]
pub struct PhiResult {
    pub value: SeriesVec,
    /// Every position (j, t) <= this is certified for the structure as given.
    pub certified: IndexedVal,
    /// Largest position every extension of the structure must still agree on.
    pub prefix_certified: IndexedVal,
}

fn mat_identity(f: PrimeField, n: usize) -> Vec<Vec<Poly>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Poly::one(f) } else { Poly::zero(f) })
                .collect()
        })
        .collect()
}

fn mat_mul(a: &[Vec<Poly>], b: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
    let n = a.len();
    let f = a[0][0].field();
    let mut out = vec![vec![Poly::zero(f); n]; n];
    for i in 0..n {
        for (kk, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                if b[kk][j].is_zero() {
                    continue;
                }
                out[i][j] = out[i][j].add(&aik.mul(&b[kk][j]));
            }
        }
    }
    out
}

/// E_h: the identity with columns h and m+1 swapped.
fn e_matrix(f: PrimeField, m: usize, h: usize) -> Vec<Vec<Poly>> {
    let mut e = mat_identity(f, m + 1);
    for row in e.iter_mut() {
        row.swap(h - 1, m);
    }
    e
}

/// A(a): identity with the last column's top block replaced by a.
fn a_matrix(f: PrimeField, a: &[Poly]) -> Vec<Vec<Poly>> {
    let m = a.len();
    let mut out = mat_identity(f, m + 1);
    for (i, ai) in a.iter().enumerate() {
        out[i][m] = ai.clone();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn p2(s: &str) -> Poly {
        Poly::parse(gf(2), s).unwrap()
    }

    /// The two-step fraction with value (z^-1, z^-2).
    fn running_example() -> MPreCf {
        MPreCf::new(
            gf(2),
            2,
            vec![
                Step { h: 1, a: vec![p2("z"), p2("0")] },
                Step { h: 2, a: vec![p2("0"), p2("z")] },
            ],
        )
        .unwrap()
    }

    #[test]
    fn quantity_tables() {
        let cf = running_example();
        let q = cf.quantities().unwrap();
        assert_eq!(q.t, vec![0, 1, 1]);
        assert_eq!(q.d, vec![0, 1, 2]);
        assert_eq!(q.v, vec![0, 1, 1]);
        assert_eq!(q.n, vec![1, 1, 2]);
        assert_eq!(q.v_table, vec![vec![0, 0], vec![1, 0], vec![1, 1]]);
        assert_eq!(q.l_table, vec![vec![0, 0], vec![1, 0], vec![1, 2]]);
        assert_eq!(q.weights(1).exps(), &[1, 0]);
    }

    #[test]
    fn conditions_on_running_example() {
        let r = running_example().check_conditions();
        assert!(r.is_strict(), "running example is strict: {r}");
        assert!(r.forms_agree);
        assert_eq!(r.first_violation, None);
    }

    #[test]
    fn condition_three_fails_on_oversized_off_pivot() {
        // Step 1 carries z^3 off the pivot: Iv(D_1 a_1) = (2,-3), not (1,0).
        let cf = MPreCf::new(
            gf(2),
            2,
            vec![
                Step { h: 1, a: vec![p2("z"), p2("z^3")] },
                Step { h: 1, a: vec![p2("z"), p2("0")] },
            ],
        )
        .unwrap();
        let r = cf.check_conditions();
        assert!(r.cond1);
        assert!(r.cond2);
        assert!(!r.cond3);
        assert!(r.cond4);
        assert_eq!(r.first_violation, Some(1));
        assert!(r.forms_agree);
        assert_eq!(r.violations, vec![(1, 3)]);
    }

    #[test]
    fn condition_one_fails_on_constant_pivot() {
        let f = gf(2);
        let cf = MPreCf::new(f, 1, vec![Step { h: 1, a: vec![Poly::one(f)] }]).unwrap();
        let r = cf.check_conditions();
        assert!(!r.cond1);
        assert_eq!(r.first_violation, Some(1));
        assert!(cf.quantities().is_err());
        assert!(cf.convergents(1, false).is_err());
    }

    #[test]
    fn convergents_match_hand_products() {
        let cf = running_example();
        let f = gf(2);
        let table = cf.convergents(2, true).unwrap();
        // b_0 = (0, 0, 1)
        assert_eq!(table.p(0), &[Poly::zero(f), Poly::zero(f)]);
        assert_eq!(table.q(0), &Poly::one(f));
        // B_1 = E_1 A(a_1) = [[0,0,1],[0,1,0],[1,0,z]] computed by hand.
        let b1 = table.matrix(1).unwrap();
        let expect_b1 = vec![
            vec![p2("0"), p2("0"), p2("1")],
            vec![p2("0"), p2("1"), p2("0")],
            vec![p2("1"), p2("0"), p2("z")],
        ];
        assert_eq!(b1, &expect_b1);
        assert_eq!(table.p(1), &[p2("1"), p2("0")]);
        assert_eq!(table.q(1), &p2("z"));
        // B_2 last column = (z, 1, z^2) by hand.
        assert_eq!(table.p(2), &[p2("z"), p2("1")]);
        assert_eq!(table.q(2), &p2("z^2"));
        // Degree law on this example: deg q_k = d_k.
        let q = cf.quantities().unwrap();
        for k in 0..=2 {
            assert_eq!(table.q(k).degree(), Degree::Finite(q.d[k]));
        }
    }

    #[test]
    fn evaluate_phi_running_example() {
        let cf = running_example();
        let phi = cf.evaluate_phi(4).unwrap();
        assert!(phi.value.is_exact());
        let f = gf(2);
        let expect = SeriesVec::new(vec![
            TruncSeries::from_monomials(f, &[(-1, 1)], 4, true).unwrap(),
            TruncSeries::from_monomials(f, &[(-2, 1)], 4, true).unwrap(),
        ])
        .unwrap();
        assert!(phi.value.eq_to_depth(&expect, 4).unwrap());
        assert_eq!(phi.certified, IndexedVal::new(2, 4));
        // Any extension still agrees through (h_2, n_2) = (2, 2).
        assert_eq!(phi.prefix_certified, IndexedVal::new(2, 2));
    }

    #[test]
    fn evaluate_phi_empty_is_zero() {
        let cf = MPreCf::empty(gf(2), 3);
        let phi = cf.evaluate_phi(5).unwrap();
        assert!(phi.value.is_zero_exact());
        assert_eq!(phi.prefix_certified, IndexedVal::new(3, 0));
    }

    #[test]
    fn evaluate_phi_rejects_invalid() {
        let cf = MPreCf::new(
            gf(2),
            2,
            vec![Step { h: 1, a: vec![p2("z"), p2("z^3")] }],
        )
        .unwrap();
        // Single step: conditions 2/4 are vacuous but 3 fails.
        assert!(matches!(cf.evaluate_phi(4), Err(Error::InvalidCf { step: 1, .. })));
    }

    #[test]
    fn text_round_trip() {
        let cf = running_example();
        let text = cf.to_string();
        assert_eq!(text, "m=2 p=2 ; h=1 a=[z,0] ; h=2 a=[0,z]");
        let back = MPreCf::parse(&text).unwrap();
        assert_eq!(back, cf);
        // Empty structure round trips too.
        let empty = MPreCf::empty(gf(3), 2);
        assert_eq!(MPreCf::parse(&empty.to_string()).unwrap(), empty);
        assert!(MPreCf::parse("m=2").is_err());
        assert!(MPreCf::parse("m=2 p=2 ; h=3 a=[z,0]").is_err());
        assert!(MPreCf::parse("m=2 p=4 ; h=1 a=[z,0]").is_err());
    }

    #[test]
    fn pivot_bounds_checked() {
        let f = gf(2);
        assert!(MPreCf::new(f, 2, vec![Step { h: 0, a: vec![p2("z"), p2("0")] }]).is_err());
        assert!(MPreCf::new(f, 2, vec![Step { h: 3, a: vec![p2("z"), p2("0")] }]).is_err());
        assert!(MPreCf::new(f, 2, vec![Step { h: 1, a: vec![p2("z")] }]).is_err());
    }
}
