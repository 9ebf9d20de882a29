use super::csr::CsrMatrix;
use crate::scalar::Real;
use std::collections::VecDeque;

/// Reverse Cuthill-McKee ordering of the symmetrized sparsity graph.
///
/// Returns `perm` with `perm[new] = old`. Each connected component starts
/// from a pseudo-peripheral node found by repeated breadth-first sweeps.
pub fn reverse_cuthill_mckee<T: Real>(a: &CsrMatrix<T>) -> Vec<usize> {
    let n = a.n_rows();
    let adj = symmetric_adjacency(a);
    let degree: Vec<usize> = adj.iter().map(|v| v.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(seed, &adj, &degree);
        let mut queue = VecDeque::new();
        queue.push_back(start);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&u| !visited[u]).collect();
            next.sort_by_key(|&u| (degree[u], u));
            for u in next {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

/// Half bandwidth of the permuted matrix `P A P^T`.
pub fn bandwidth<T: Real>(a: &CsrMatrix<T>, perm: &[usize]) -> usize {
    let inv = invert(perm);
    let mut bw = 0;
    for i in 0..a.n_rows() {
        let (cols, _) = a.row(i);
        for &j in cols {
            bw = bw.max(inv[i].abs_diff(inv[j]));
        }
    }
    bw
}

pub(crate) fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0usize; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    inv
}

fn symmetric_adjacency<T: Real>(a: &CsrMatrix<T>) -> Vec<Vec<usize>> {
    let n = a.n_rows();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        let (cols, _) = a.row(i);
        for &j in cols {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for v in adj.iter_mut() {
        v.sort_unstable();
        v.dedup();
    }
    adj
}

/// Breadth-first level structure rooted at `root`: (depth, nodes of the last level).
fn last_level(root: usize, adj: &[Vec<usize>]) -> (usize, Vec<usize>) {
    let mut level = std::collections::HashMap::new();
    level.insert(root, 0usize);
    let mut frontier = vec![root];
    let mut depth = 0;
    loop {
        let mut next = Vec::new();
        for &v in &frontier {
            for &u in &adj[v] {
                if let std::collections::hash_map::Entry::Vacant(e) = level.entry(u) {
                    e.insert(depth + 1);
                    next.push(u);
                }
            }
        }
        if next.is_empty() {
            return (depth, frontier);
        }
        depth += 1;
        frontier = next;
    }
}

fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize]) -> usize {
    let mut root = seed;
    let (mut depth, mut last) = last_level(root, adj);
    loop {
        let candidate = last
            .iter()
            .copied()
            .min_by_key(|&v| (degree[v], v))
            .unwrap_or(root);
        let (d2, l2) = last_level(candidate, adj);
        if d2 > depth {
            root = candidate;
            depth = d2;
            last = l2;
        } else {
            return root;
        }
    }
}
