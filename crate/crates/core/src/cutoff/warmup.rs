use super::tree::{CutoffTree, Node, Role};

fn node(parent: Option<usize>, level: u32, role: Role) -> Node {
    Node {
        parent,
        children: Vec::new(),
        weight: 1,
        level,
        role,
        bereft: false,
    }
}

/// The dense-regime tree: with `j = ceil(sqrt(n/2))` and `i` the largest
/// integer with `2^i <= j`, the root has a leaf child `v_0`, children
/// `v_1..v_i` where `v_l` has `2^l - 1` leaves, and `j` further children with
/// `j` leaves each. Size `j^2 + j + 2^{i+1}`.
pub fn warmup_tree(n: u64) -> CutoffTree {
    let j = ((n as f64 / 2.0).sqrt().ceil() as u64).max(1);
    // guard the float ceiling against rounding in either direction
    let j = (j.saturating_sub(1)..=j + 1)
        .find(|&x| 2 * x * x >= n)
        .unwrap_or(j);
    let i = 63 - j.leading_zeros();
    let mut nodes = vec![node(None, 2, Role::Root)];
    let add = |nodes: &mut Vec<Node>, parent: usize, level: u32, role: Role| {
        let id = nodes.len();
        nodes.push(node(Some(parent), level, role));
        nodes[parent].children.push(id);
        id
    };
    add(&mut nodes, 0, 1, Role::Exact);
    for l in 1..=i {
        let v = add(&mut nodes, 0, 1, Role::Exact);
        for _ in 0..(1u64 << l) - 1 {
            add(&mut nodes, v, 0, Role::Leaf);
        }
    }
    for _ in 0..j {
        let v = add(&mut nodes, 0, 1, Role::Loose);
        for _ in 0..j {
            add(&mut nodes, v, 0, Role::Leaf);
        }
    }
    for id in (0..nodes.len()).rev() {
        let w = 1 + nodes[id].children.iter().map(|&c| nodes[c].weight).sum::<u64>();
        nodes[id].weight = w;
    }
    CutoffTree { nodes }
}
