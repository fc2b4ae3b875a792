use crate::scalar::Scalar;
use std::collections::VecDeque;
use std::ops::{Add, Sub};

pub(crate) trait Cap: Clone + PartialOrd + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
    fn positive(&self) -> bool;
}

impl Cap for i64 {
    fn zero() -> Self {
        0
    }
    fn positive(&self) -> bool {
        *self > 0
    }
}

impl<S: Scalar> Cap for S {
    fn zero() -> Self {
        S::zero()
    }
    fn positive(&self) -> bool {
        self.is_pos()
    }
}

/// Dinic on a residual arc list. Arc `a ^ 1` is the reverse of arc `a`.
#[derive(Clone, Debug)]
pub(crate) struct Dinic<T> {
    pub n: usize,
    pub adj: Vec<Vec<usize>>,
    pub to: Vec<usize>,
    pub res: Vec<T>,
    level: Vec<i64>,
    it: Vec<usize>,
}

impl<T: Cap> Dinic<T> {
    pub fn new(n: usize) -> Self {
        Dinic { n, adj: vec![Vec::new(); n], to: Vec::new(), res: Vec::new(), level: vec![0; n], it: vec![0; n] }
    }

    pub fn add_arc(&mut self, u: usize, v: usize, fwd: T, bwd: T) -> usize {
        let a = self.to.len();
        self.to.push(v);
        self.res.push(fwd);
        self.adj[u].push(a);
        self.to.push(u);
        self.res.push(bwd);
        self.adj[v].push(a + 1);
        a
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &a in &self.adj[x] {
                let y = self.to[a];
                if self.level[y] < 0 && self.res[a].positive() {
                    self.level[y] = self.level[x] + 1;
                    q.push_back(y);
                }
            }
        }
        self.level[t] >= 0
    }

    pub fn run(&mut self, s: usize, t: usize) -> T {
        let mut total = T::zero();
        if s == t {
            return total;
        }
        while self.bfs(s, t) {
            self.it.iter_mut().for_each(|i| *i = 0);
            let mut path: Vec<usize> = Vec::new();
            loop {
                let v = path.last().map_or(s, |&a| self.to[a]);
                if v == t {
                    let mut b = self.res[path[0]].clone();
                    for &a in &path[1..] {
                        if self.res[a] < b {
                            b = self.res[a].clone();
                        }
                    }
                    for &a in &path {
                        self.res[a] = self.res[a].clone() - b.clone();
                        self.res[a ^ 1] = self.res[a ^ 1].clone() + b.clone();
                    }
                    total = total + b;
                    path.clear();
                    continue;
                }
                let mut advanced = false;
                while self.it[v] < self.adj[v].len() {
                    let a = self.adj[v][self.it[v]];
                    let y = self.to[a];
                    if self.res[a].positive() && self.level[y] == self.level[v] + 1 {
                        path.push(a);
                        advanced = true;
                        break;
                    }
                    self.it[v] += 1;
                }
                if !advanced {
                    if v == s {
                        break;
                    }
                    self.level[v] = -1;
                    let a = path.pop().unwrap();
                    let p = self.to[a ^ 1];
                    self.it[p] += 1;
                }
            }
        }
        total
    }

    /// Vertices reachable from s in the residual graph.
    pub fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[s] = true;
        let mut st = vec![s];
        while let Some(x) = st.pop() {
            for &a in &self.adj[x] {
                let y = self.to[a];
                if !seen[y] && self.res[a].positive() {
                    seen[y] = true;
                    st.push(y);
                }
            }
        }
        seen
    }
}
