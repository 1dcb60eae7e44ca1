//! Individualization-refinement search for canonical vertex orderings.
//!
//! The engine works on a bare multigraph shape (vertex colors plus a list of
//! arcs) and returns every vertex relabeling that attains the least encoding.
//! Callers turn those relabelings into signed canonical forms.

/// A multigraph on vertices `0..n`. Loops are allowed; arcs are either all
/// directed or all undirected.
pub(crate) struct Shape<'a> {
    pub n: usize,
    pub colors: Vec<u32>,
    pub arcs: &'a [(usize, usize)],
    pub directed: bool,
}

/// All relabelings attaining the least encoding, `perms[i][old] = new`.
pub(crate) struct Labelings {
    pub perms: Vec<Vec<usize>>,
}

const OUT: u32 = 0;
const IN: u32 = 1;
const UNDIRECTED: u32 = 2;

struct Search<'a> {
    shape: &'a Shape<'a>,
    adj: Vec<Vec<(usize, u32)>>,
    best: Option<Vec<u32>>,
    perms: Vec<Vec<usize>>,
}

pub(crate) fn best_labelings(shape: &Shape<'_>) -> Labelings {
    let mut adj = vec![Vec::new(); shape.n];
    for &(a, b) in shape.arcs {
        if shape.directed {
            adj[a].push((b, OUT));
            adj[b].push((a, IN));
        } else {
            adj[a].push((b, UNDIRECTED));
            adj[b].push((a, UNDIRECTED));
        }
    }
    let mut search = Search { shape, adj, best: None, perms: Vec::new() };
    let mut colors = dense_ranks(&shape.colors);
    search.refine(&mut colors);
    search.descend(colors);
    Labelings { perms: search.perms }
}

fn dense_ranks(colors: &[u32]) -> Vec<u32> {
    let mut values: Vec<u32> = colors.to_vec();
    values.sort_unstable();
    values.dedup();
    colors.iter().map(|c| values.binary_search(c).unwrap() as u32).collect()
}

impl<'a> Search<'a> {
    /// Equitable refinement. Colors stay dense and keep their relative order.
    fn refine(&self, colors: &mut Vec<u32>) {
        let n = self.shape.n;
        let mut classes = count_distinct(colors);
        loop {
            if classes == n {
                return;
            }
            let sigs: Vec<(u32, Vec<(u32, u32)>)> = (0..n)
                .map(|x| {
                    let mut nb: Vec<(u32, u32)> =
                        self.adj[x].iter().map(|&(y, k)| (colors[y], k)).collect();
                    nb.sort_unstable();
                    (colors[x], nb)
                })
                .collect();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| sigs[a].cmp(&sigs[b]));
            let mut next = vec![0u32; n];
            let mut rank = 0u32;
            for w in 0..n {
                if w > 0 && sigs[order[w]] != sigs[order[w - 1]] {
                    rank += 1;
                }
                next[order[w]] = rank;
            }
            let new_classes = rank as usize + 1;
            *colors = next;
            if new_classes == classes {
                return;
            }
            classes = new_classes;
        }
    }

    fn descend(&mut self, colors: Vec<u32>) {
        let n = self.shape.n;
        let mut counts = vec![0usize; n.max(1)];
        for &c in &colors {
            counts[c as usize] += 1;
        }
        let target = (0..n).find(|&c| counts[c] > 1);
        let Some(cell) = target else {
            self.leaf(colors.iter().map(|&c| c as usize).collect());
            return;
        };
        for u in 0..n {
            if colors[u] as usize != cell {
                continue;
            }
            let mut next: Vec<u32> =
                colors.iter().map(|&c| 2 * c + 1).collect();
            next[u] -= 1;
            let mut next = dense_ranks(&next);
            self.refine(&mut next);
            self.descend(next);
        }
    }

    fn leaf(&mut self, perm: Vec<usize>) {
        let enc = encode(self.shape, &perm);
        match &self.best {
            Some(b) if enc > *b => {}
            Some(b) if enc == *b => self.perms.push(perm),
            _ => {
                self.best = Some(enc);
                self.perms.clear();
                self.perms.push(perm);
            }
        }
    }
}

fn count_distinct(colors: &[u32]) -> usize {
    let mut v = colors.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn encode(shape: &Shape<'_>, perm: &[usize]) -> Vec<u32> {
    let mut inv = vec![0usize; shape.n];
    for (old, &new) in perm.iter().enumerate() {
        inv[new] = old;
    }
    let mut enc: Vec<u32> = inv.iter().map(|&old| shape.colors[old]).collect();
    let mut arcs: Vec<(u32, u32)> = shape
        .arcs
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (perm[a] as u32, perm[b] as u32);
            if !shape.directed && x > y {
                (y, x)
            } else {
                (x, y)
            }
        })
        .collect();
    arcs.sort_unstable();
    for (x, y) in arcs {
        enc.push(x);
        enc.push(y);
    }
    enc
}

/// Parity of a permutation given as an image array: 0 even, 1 odd.
pub(crate) fn parity(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut odd = 0;
    for i in 0..perm.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        odd += len - 1;
    }
    odd % 2
}

/// Sign (+1 or -1) of a permutation given as an image array.
pub(crate) fn perm_sign(perm: &[usize]) -> i64 {
    if parity(perm) == 0 {
        1
    } else {
        -1
    }
}

/// Stable sorting permutation: `result[old] = new position`.
pub(crate) fn sorting_positions<T: Ord>(items: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    idx.sort_by(|&a, &b| items[a].cmp(&items[b]));
    let mut pos = vec![0usize; items.len()];
    for (new, &old) in idx.iter().enumerate() {
        pos[old] = new;
    }
    pos
}
