//! Text rendering of a Hodge diamond.
//!
//! The `omega` table is drawn in rows `u + v = 0..=p+q`, `u` decreasing from
//! left to right; the `-omega` table follows upside down (rows `u + v` from
//! `p+q` down to `0`). Entries that the duality relations
//! `h^{u,v}_w = h^{q-u,p-v}_{-w} = h^{u,p-v}_{-w} = h^{q-u,v}_w` force to be
//! equal share a letter.

use std::collections::BTreeMap;

use crate::hodge::HodgeDiamond;

/// Class letters for the `omega` and `-omega` tables, indexed `[u][v]`.
pub fn equality_classes(p: usize, q: usize) -> (Vec<Vec<char>>, Vec<Vec<char>>) {
    let cells = (p + 1) * (q + 1);
    let node = |minus: bool, u: usize, v: usize| (minus as usize) * cells + u * (p + 1) + v;
    let mut parent: Vec<usize> = (0..2 * cells).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut union = |a: usize, b: usize| {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    };
    for minus in [false, true] {
        for u in 0..=q {
            for v in 0..=p {
                union(node(minus, u, v), node(!minus, q - u, p - v));
                union(node(minus, u, v), node(!minus, u, p - v));
                union(node(minus, u, v), node(minus, q - u, v));
            }
        }
    }
    let mut letters: BTreeMap<usize, char> = BTreeMap::new();
    let mut plus = vec![vec![' '; p + 1]; q + 1];
    let mut minus = plus.clone();
    // letters follow the rendered reading order
    for (minus_side, u, v) in display_order(p, q) {
        let root = find(&mut parent, node(minus_side, u, v));
        let next = letters.len() as u32;
        let letter = *letters.entry(root).or_insert_with(|| class_letter(next));
        let table = if minus_side { &mut minus } else { &mut plus };
        table[u][v] = letter;
    }
    (plus, minus)
}

/// Cells as `(minus, u, v)` in rendering order.
fn display_order(p: usize, q: usize) -> Vec<(bool, usize, usize)> {
    let n = p + q;
    let row = |minus: bool, r: usize| (0..=q).rev().filter(move |&u| r >= u && r - u <= p).map(move |u| (minus, u, r - u));
    (0..=n).flat_map(|r| row(false, r)).chain((0..=n).rev().flat_map(|r| row(true, r))).collect()
}

fn class_letter(k: u32) -> char {
    char::from_u32('A' as u32 + k % 26).unwrap_or('?')
}

fn row_cells(d: &HodgeDiamond, table: &[Vec<usize>], letters: &[Vec<char>], r: usize) -> Vec<String> {
    (0..=d.q)
        .rev()
        .filter(|&u| r >= u && r - u <= d.p)
        .map(|u| {
            let v = r - u;
            format!("({u},{v}){}={}", letters[u][v], table[u][v])
        })
        .collect()
}

pub fn render_diamond(d: &HodgeDiamond) -> String {
    let n = d.p + d.q;
    let (lp, lm) = equality_classes(d.p, d.q);
    let mut rows: Vec<Vec<String>> = (0..=n).map(|r| row_cells(d, &d.h_plus, &lp, r)).collect();
    let split = rows.len();
    rows.extend((0..=n).rev().map(|r| row_cells(d, &d.h_minus, &lm, r)));
    let width = rows.iter().flatten().map(String::len).max().unwrap_or(0) + 2;
    let widest = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    for (k, row) in rows.iter().enumerate() {
        if k == 0 {
            out.push_str("omega:\n");
        }
        if k == split {
            out.push_str("-omega:\n");
        }
        let indent = (widest - row.len()) * width / 2;
        let mut line = " ".repeat(indent);
        for cell in row {
            line.push_str(&format!("{cell:<width$}"));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}
