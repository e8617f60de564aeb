//! Backtracking search over assignments `var -> value` subject to functional
//! constraints `table[value(a)] == value(b)`. Naturality squares and the
//! compatibility equations of exponential families both have this shape.

pub(crate) struct Constraint {
    a: usize,
    b: usize,
    table: Vec<usize>,
    preimage: Vec<Vec<usize>>,
}

pub(crate) struct Csp {
    domains: Vec<Vec<usize>>,
    member: Vec<Vec<bool>>,
    constraints: Vec<Constraint>,
}

/// The search visited more nodes than allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct NodeLimit(pub u64);

impl Csp {
    /// `ranges[v]` is the number of values variable `v` can in principle take;
    /// its domain starts as the full range.
    pub(crate) fn new(ranges: &[usize]) -> Csp {
        Csp {
            domains: ranges.iter().map(|&r| (0..r).collect()).collect(),
            member: ranges.iter().map(|&r| vec![true; r]).collect(),
            constraints: Vec::new(),
        }
    }

    pub(crate) fn restrict(&mut self, var: usize, allowed: impl IntoIterator<Item = usize>) {
        let range = self.member[var].len();
        let mut mask = vec![false; range];
        for v in allowed {
            if v < range {
                mask[v] = true;
            }
        }
        self.domains[var] = (0..range).filter(|&v| mask[v]).collect();
        self.member[var] = mask;
    }

    /// Number of raw candidate assignments (product of domain sizes).
    pub(crate) fn candidates(&self) -> u128 {
        self.domains.iter().fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
    }

    /// Requires `table[value(a)] == value(b)`.
    pub(crate) fn constrain(&mut self, a: usize, table: &[usize], b: usize) {
        let range_b = self.member[b].len();
        let mut preimage = vec![Vec::new(); range_b];
        for (x, &y) in table.iter().enumerate() {
            if y < range_b {
                preimage[y].push(x);
            }
        }
        self.constraints.push(Constraint { a, b, table: table.to_vec(), preimage });
    }

    /// Calls `visit` on every solution in lexicographic order of the
    /// assignment vector. Returns the number of solutions.
    pub(crate) fn solve(&self, node_limit: u64, visit: &mut dyn FnMut(&[usize])) -> Result<u64, NodeLimit> {
        let n = self.domains.len();
        if n == 0 {
            visit(&[]);
            return Ok(1);
        }
        // constraints grouped by the later of their two variables
        let mut at: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (k, c) in self.constraints.iter().enumerate() {
            at[c.a.max(c.b)].push(k);
        }
        if self.domains.iter().any(Vec::is_empty) {
            return Ok(0);
        }
        let mut search = Search { csp: self, at, values: vec![0; n], nodes: 0, limit: node_limit, solutions: 0 };
        search.descend(0, visit)?;
        Ok(search.solutions)
    }
}

struct Search<'a> {
    csp: &'a Csp,
    at: Vec<Vec<usize>>,
    values: Vec<usize>,
    nodes: u64,
    limit: u64,
    solutions: u64,
}

impl Search<'_> {
    fn consistent(&self, var: usize, v: usize) -> bool {
        self.at[var].iter().all(|&k| {
            let c = &self.csp.constraints[k];
            let va = if c.a == var { v } else { self.values[c.a] };
            let vb = if c.b == var { v } else { self.values[c.b] };
            c.table.get(va) == Some(&vb)
        })
    }

    fn descend(&mut self, var: usize, visit: &mut dyn FnMut(&[usize])) -> Result<(), NodeLimit> {
        if var == self.values.len() {
            self.solutions += 1;
            visit(&self.values);
            return Ok(());
        }
        let csp = self.csp;
        let mut forced = None;
        let mut narrowed: Option<&[usize]> = None;
        for &k in &self.at[var] {
            let c = &csp.constraints[k];
            if c.b == var && c.a != var {
                forced = Some(c.table[self.values[c.a]]);
                break;
            }
            if c.a == var && c.b != var && narrowed.is_none() {
                narrowed = Some(&c.preimage[self.values[c.b]]);
            }
        }
        let single;
        let candidates: &[usize] = match (forced, narrowed) {
            (Some(v), _) => {
                single = [v];
                &single
            }
            (None, Some(list)) => list,
            (None, None) => &csp.domains[var],
        };
        for &v in candidates {
            self.nodes += 1;
            if self.nodes > self.limit {
                return Err(NodeLimit(self.limit));
            }
            if csp.member[var].get(v) != Some(&true) || !self.consistent(var, v) {
                continue;
            }
            self.values[var] = v;
            self.descend(var + 1, visit)?;
        }
        Ok(())
    }
}
