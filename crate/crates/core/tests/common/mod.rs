#![allow(dead_code)]

use m0n_core::forest::RedundancyTree;
use m0n_core::labels::LabelSet;
use m0n_core::model::Cut;
use m0n_core::tree::{LoadedTree, TreeEdge};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::Rng;

pub const EXAMPLE: &str =
    "n=9; d(1,2,3|4,5,6,7,8,9)^3 * d(1,2,3,4,5|6,7,8,9) * d(1,2,3,4,5,8,9|6,7) * d(1,2,3,4,5,6,7|8,9)";

pub fn ls(a: &[u32]) -> LabelSet {
    a.iter().copied().collect()
}

/// 14 labels, 11 edges; weighted form has vertex weights {1,4,1,0,1} and
/// edge weights {4,2,0,1}.
pub fn minus_32_tree() -> LoadedTree {
    LoadedTree::new(
        14,
        vec![ls(&[1, 2, 3]), ls(&[4, 5, 6, 7]), ls(&[8, 9, 10]), ls(&[11]), ls(&[12, 13, 14])],
        vec![TreeEdge::new(0, 1, 5), TreeEdge::new(1, 2, 3), TreeEdge::new(1, 3, 1), TreeEdge::new(3, 4, 2)],
    )
    .unwrap()
}

fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |a, b| a * b)
}

/// `∫ ψ_1^{e_1} ... ψ_k^{e_k}` over the moduli space of `k` points:
/// `(k-3)! / Π e_i!` when `Σ e_i = k - 3`, else 0.
fn psi_integral(points: usize, exps: &[u64]) -> BigUint {
    if points < 3 || exps.iter().sum::<u64>() != points as u64 - 3 {
        return BigUint::zero();
    }
    let den = exps.iter().fold(BigUint::one(), |a, &e| a * factorial(e));
    factorial(points as u64 - 3) / den
}

/// Brute-force value of a proper loaded tree through psi classes.
///
/// The boundary stratum of the tree is a product of moduli spaces, one per
/// vertex with `deg(v) + |h(v)|` points. A factor `δ_e^{m}` restricts to
/// `δ_e · (-ψ_h - ψ_h')^{m-1}` with `h, h'` the two half-edges of `e`, so
/// the value is a sum over all ways to split each `m_e - 1` between the two
/// half-edges. Shares no code with the forest or cut evaluators.
pub fn psi_oracle(t: &LoadedTree) -> BigInt {
    assert!(t.validate().is_empty());
    if !t.is_proper() {
        return BigInt::zero();
    }
    let nv = t.vertex_count();
    let points: Vec<usize> = {
        let mut deg = vec![0; nv];
        for e in t.edges() {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        (0..nv).map(|v| deg[v] + t.labels(v).len()).collect()
    };
    let edges = t.edges().to_vec();
    let mut split = vec![0u64; edges.len()];
    let mut total = BigInt::zero();
    loop {
        // half-edge exponents per vertex
        let mut exps: Vec<Vec<u64>> = vec![Vec::new(); nv];
        let mut coeff = BigInt::one();
        for (i, e) in edges.iter().enumerate() {
            let excess = e.multiplicity - 1;
            let a = split[i];
            exps[e.u].push(a);
            exps[e.v].push(excess - a);
            let c: BigUint = factorial(excess) / (factorial(a) * factorial(excess - a));
            coeff *= BigInt::from(c);
            if excess % 2 == 1 {
                coeff = -coeff;
            }
        }
        let mut term = coeff;
        for v in 0..nv {
            term *= BigInt::from(psi_integral(points[v], &exps[v]));
        }
        total += term;

        // next split
        let mut i = 0;
        loop {
            if i == edges.len() {
                return total;
            }
            if split[i] < edges[i].multiplicity - 1 {
                split[i] += 1;
                break;
            }
            split[i] = 0;
            i += 1;
        }
    }
}

/// All cuts of `{1..n}`.
pub fn all_cuts(n: u32) -> Vec<Cut> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        // canonical side contains label 1
        if mask & 1 == 0 {
            continue;
        }
        let part: LabelSet = (1..=n).filter(|&l| mask & (1 << (l - 1)) != 0).collect();
        if part.len() >= 2 && (n as usize - part.len()) >= 2 {
            out.push(Cut::from_part(part, n).unwrap());
        }
    }
    out
}

/// Every set of `size` pairwise non-crossing distinct cuts.
pub fn compatible_sets(n: u32, size: usize) -> Vec<Vec<Cut>> {
    let cuts = all_cuts(n);
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn go(cuts: &[Cut], start: usize, size: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<Cut>>) {
        if chosen.len() == size {
            out.push(chosen.iter().map(|&i| cuts[i].clone()).collect());
            return;
        }
        for i in start..cuts.len() {
            if chosen.iter().all(|&j| !cuts[j].crosses(&cuts[i]).unwrap()) {
                chosen.push(i);
                go(cuts, i + 1, size, chosen, out);
                chosen.pop();
            }
        }
    }
    go(&cuts, 0, size, &mut chosen, &mut out);
    out
}

/// Random tree on `k` vertices with weights in `0..=max_weight`.
pub fn random_redundancy_tree<R: Rng>(rng: &mut R, k: usize, max_weight: u64) -> RedundancyTree {
    let weights: Vec<u64> = (0..k).map(|_| rng.gen_range(0..=max_weight)).collect();
    let edges: Vec<(usize, usize)> = (1..k).map(|i| (rng.gen_range(0..i), i)).collect();
    RedundancyTree::from_weights(&weights, &edges)
}

/// Proper path with `edges` edges whose value is nonzero: end vertices carry
/// 3 labels, inner vertices 2, one edge has multiplicity 3 and the rest 2.
pub fn long_path(edges: usize) -> LoadedTree {
    let nv = edges + 1;
    let mut labels = Vec::with_capacity(nv);
    let mut next = 1u32;
    for i in 0..nv {
        let k = if i == 0 || i + 1 == nv { 3 } else { 2 };
        labels.push((next..next + k).collect());
        next += k;
    }
    let tree_edges = (1..nv)
        .map(|i| TreeEdge::new(i - 1, i, if i == nv / 2 { 3 } else { 2 }))
        .collect();
    LoadedTree::new(next - 1, labels, tree_edges).unwrap()
}
