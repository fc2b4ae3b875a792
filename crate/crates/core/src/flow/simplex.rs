//! Dense two-phase simplex with Bland's rule, exact over rational scalars.

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

/// minimize c.x subject to rows, x >= 0.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram<S> {
    pub n_vars: usize,
    pub objective: Vec<S>,
    pub rows: Vec<(Vec<(usize, S)>, Cmp, S)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<S> {
    Optimal { x: Vec<S>, value: S },
    Infeasible,
    Unbounded,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram { n_vars, objective: vec![S::zero(); n_vars], rows: Vec::new() }
    }
    pub fn add_var(&mut self, cost: S) -> usize {
        self.objective.push(cost);
        self.n_vars += 1;
        self.n_vars - 1
    }
    pub fn add_row(&mut self, coeffs: Vec<(usize, S)>, cmp: Cmp, rhs: S) {
        self.rows.push((coeffs, cmp, rhs));
    }

    pub fn solve(&self) -> LpOutcome<S> {
        Tableau::build(self).run(self)
    }
}

struct Tableau<S> {
    t: Vec<Vec<S>>,
    basis: Vec<usize>,
    cols: usize,
    art_start: usize,
}

impl<S: Scalar> Tableau<S> {
    fn build(lp: &LinearProgram<S>) -> Self {
        let n = lp.n_vars;
        let m = lp.rows.len();
        let mut rows: Vec<(Vec<S>, Cmp, S)> = lp
            .rows
            .iter()
            .map(|(co, c, r)| {
                let mut dense = vec![S::zero(); n];
                for (j, v) in co {
                    dense[*j] = dense[*j].clone() + v.clone();
                }
                if r.is_negative() {
                    let flip = match c {
                        Cmp::Le => Cmp::Ge,
                        Cmp::Ge => Cmp::Le,
                        Cmp::Eq => Cmp::Eq,
                    };
                    (dense.into_iter().map(|x| -x).collect(), flip, -r.clone())
                } else {
                    (dense, *c, r.clone())
                }
            })
            .collect();
        let n_slack = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Cmp::Le).count();
        let art_start = n + n_slack;
        let cols = art_start + n_art;
        let mut t = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut si, mut ai) = (n, art_start);
        for (dense, c, r) in rows.drain(..) {
            let mut row = dense;
            row.resize(cols + 1, S::zero());
            match c {
                Cmp::Le => {
                    row[si] = S::one();
                    basis.push(si);
                    si += 1;
                }
                Cmp::Ge => {
                    row[si] = -S::one();
                    si += 1;
                    row[ai] = S::one();
                    basis.push(ai);
                    ai += 1;
                }
                Cmp::Eq => {
                    row[ai] = S::one();
                    basis.push(ai);
                    ai += 1;
                }
            }
            row[cols] = r;
            t.push(row);
        }
        Tableau { t, basis, cols, art_start }
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [S]) {
        let p = self.t[r][c].clone();
        let nz: Vec<usize> = (0..=self.cols).filter(|&j| !self.t[r][j].is_zero()).collect();
        for &j in &nz {
            self.t[r][j] = self.t[r][j].clone() / p.clone();
        }
        let prow: Vec<(usize, S)> = nz.iter().map(|&j| (j, self.t[r][j].clone())).collect();
        for i in 0..self.t.len() {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for (j, v) in &prow {
                self.t[i][*j] = self.t[i][*j].clone() - f.clone() * v.clone();
            }
            if !S::EXACT && self.t[i][c].abs() < S::tol() {
                self.t[i][c] = S::zero();
            }
        }
        if !obj[c].is_zero() {
            let f = obj[c].clone();
            for (j, v) in &prow {
                obj[*j] = obj[*j].clone() - f.clone() * v.clone();
            }
        }
        self.basis[r] = c;
    }

    /// Optimize the reduced-cost row `obj` over allowed columns.
    fn optimize(&mut self, obj: &mut [S], allowed: usize) -> bool {
        let eps = if S::EXACT { S::zero() } else { S::from_f64(1e-11) };
        loop {
            let enter = (0..allowed).find(|&j| obj[j] < -eps.clone());
            let Some(c) = enter else { return true };
            let mut best: Option<(usize, S)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][c];
                if *a > eps {
                    let ratio = self.t[i][self.cols].clone() / a.clone();
                    let take = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if take {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = best else { return false };
            self.pivot(r, c, obj);
        }
    }

    fn run(mut self, lp: &LinearProgram<S>) -> LpOutcome<S> {
        let cols = self.cols;
        let mut obj = vec![S::zero(); cols + 1];
        for j in self.art_start..cols {
            obj[j] = S::one();
        }
        for i in 0..self.t.len() {
            if self.basis[i] >= self.art_start {
                for j in 0..=cols {
                    obj[j] = obj[j].clone() - self.t[i][j].clone();
                }
            }
        }
        self.optimize(&mut obj, cols);
        let infeas = -obj[cols].clone();
        let feas_tol = if S::EXACT { S::zero() } else { S::from_f64(1e-7) };
        if infeas > feas_tol {
            return LpOutcome::Infeasible;
        }
        // drive artificials out of the basis
        let mut i = 0;
        while i < self.t.len() {
            if self.basis[i] >= self.art_start {
                let col = (0..self.art_start).find(|&j| self.t[i][j].abs() > S::tol());
                match col {
                    Some(c) => {
                        let mut dummy = vec![S::zero(); cols + 1];
                        self.pivot(i, c, &mut dummy);
                    }
                    None => {
                        self.t.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        let mut obj = vec![S::zero(); cols + 1];
        for (j, c) in lp.objective.iter().enumerate() {
            obj[j] = c.clone();
        }
        for i in 0..self.t.len() {
            let b = self.basis[i];
            if !obj[b].is_zero() {
                let f = obj[b].clone();
                for j in 0..=cols {
                    obj[j] = obj[j].clone() - f.clone() * self.t[i][j].clone();
                }
            }
        }
        if !self.optimize(&mut obj, self.art_start) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![S::zero(); lp.n_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < lp.n_vars {
                x[b] = self.t[i][cols].clone();
            }
        }
        let value = lp.objective.iter().zip(&x).fold(S::zero(), |a, (c, v)| a + c.clone() * v.clone());
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    type R = BigRational;

    #[test]
    fn small_lp() {
        // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6
        let mut lp = LinearProgram::<R>::new(2);
        lp.objective = vec![R::from_int(-1), R::from_int(-1)];
        lp.add_row(vec![(0, R::from_int(1)), (1, R::from_int(2))], Cmp::Le, R::from_int(4));
        lp.add_row(vec![(0, R::from_int(3)), (1, R::from_int(1))], Cmp::Le, R::from_int(6));
        match lp.solve() {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, R::from_frac(-14, 5));
                assert_eq!(x, vec![R::from_frac(8, 5), R::from_frac(6, 5)]);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn equality_and_infeasible() {
        let mut lp = LinearProgram::<R>::new(2);
        lp.objective = vec![R::from_int(1), R::from_int(0)];
        lp.add_row(vec![(0, R::from_int(1)), (1, R::from_int(1))], Cmp::Eq, R::from_int(3));
        lp.add_row(vec![(1, R::from_int(1))], Cmp::Le, R::from_int(1));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, R::from_int(2)),
            o => panic!("{o:?}"),
        }
        lp.add_row(vec![(0, R::from_int(1))], Cmp::Le, R::from_int(1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded() {
        let mut lp = LinearProgram::<R>::new(1);
        lp.objective = vec![R::from_int(-1)];
        lp.add_row(vec![(0, R::from_int(1))], Cmp::Ge, R::from_int(1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }
}
