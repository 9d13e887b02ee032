//! 4-connected component labelling and SLIC's small-component merging.

use std::collections::{BTreeMap, VecDeque};

use crate::error::Result;
use crate::labels::LabelMap;

/// Component id per pixel plus the label of each component, in raster
/// discovery order.
struct Components {
    of_pixel: Vec<usize>,
    label: Vec<i32>,
    size: Vec<usize>,
}

fn label_components(lm: &LabelMap) -> Components {
    let (w, h) = (lm.width(), lm.height());
    let labels = lm.labels();
    let mut of_pixel = vec![usize::MAX; labels.len()];
    let mut label = Vec::new();
    let mut size = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..labels.len() {
        if of_pixel[start] != usize::MAX {
            continue;
        }
        let id = label.len();
        let l = labels[start];
        of_pixel[start] = id;
        queue.push_back(start);
        let mut count = 0;
        while let Some(p) = queue.pop_front() {
            count += 1;
            let (x, y) = (p % w, p / w);
            let mut visit = |q: usize| {
                if of_pixel[q] == usize::MAX && labels[q] == l {
                    of_pixel[q] = id;
                    queue.push_back(q);
                }
            };
            if x > 0 {
                visit(p - 1);
            }
            if x + 1 < w {
                visit(p + 1);
            }
            if y > 0 {
                visit(p - w);
            }
            if y + 1 < h {
                visit(p + w);
            }
        }
        label.push(l);
        size.push(count);
    }
    Components {
        of_pixel,
        label,
        size,
    }
}

/// Maximal 4-connected sets of equally labelled pixels, as sorted pixel
/// index lists in raster discovery order.
pub fn connected_components(lm: &LabelMap) -> Result<Vec<Vec<usize>>> {
    lm.require_total()?;
    let comps = label_components(lm);
    let mut sets = vec![Vec::new(); comps.label.len()];
    for (p, &c) in comps.of_pixel.iter().enumerate() {
        sets[c].push(p);
    }
    Ok(sets)
}

/// Number of labels whose pixels form more than one 4-connected component.
pub fn disconnected_label_count(lm: &LabelMap) -> usize {
    let comps = label_components(lm);
    let mut per_label: BTreeMap<i32, usize> = BTreeMap::new();
    for &l in &comps.label {
        *per_label.entry(l).or_default() += 1;
    }
    per_label.values().filter(|&&n| n > 1).count()
}

fn find(parent: &mut [usize], mut c: usize) -> usize {
    while parent[c] != c {
        parent[c] = parent[parent[c]];
        c = parent[c];
    }
    c
}

/// Merges every connected component with at most `N / (2k)` pixels into the
/// adjacent component it shares the most 4-neighbour contacts with (ties:
/// lower label, then earlier discovery). Merged groups keep growing on the
/// component graph until every group is larger than the threshold, and only
/// then are labels rewritten. Rewriting between rounds would let separate
/// groups that happen to share a label fuse.
pub fn post_process(lm: &LabelMap, k: usize) -> Result<LabelMap> {
    lm.require_total()?;
    let threshold = lm.len() as f64 / (2.0 * k.max(1) as f64);
    let (w, h) = (lm.width(), lm.height());
    let comps = label_components(lm);
    let n = comps.label.len();

    let mut adjacency: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
    for y in 0..h {
        for x in 0..w {
            let a = comps.of_pixel[y * w + x];
            let mut touch = |b: usize| {
                if a != b {
                    *adjacency[a].entry(b).or_default() += 1;
                    *adjacency[b].entry(a).or_default() += 1;
                }
            };
            if x + 1 < w {
                touch(comps.of_pixel[y * w + x + 1]);
            }
            if y + 1 < h {
                touch(comps.of_pixel[(y + 1) * w + x]);
            }
        }
    }

    // Adjacency keys are always group roots: absorbing `r` rewires every
    // neighbour of `r` to the target.
    let mut parent: Vec<usize> = (0..n).collect();
    let mut size = comps.size.clone();
    loop {
        let mut merged_any = false;
        for r in 0..n {
            if parent[r] != r || size[r] as f64 > threshold {
                continue;
            }
            let Some(target) = adjacency[r]
                .iter()
                .min_by_key(|&(&t, &contacts)| (std::cmp::Reverse(contacts), comps.label[t], t))
                .map(|(&t, _)| t)
            else {
                continue;
            };
            let absorbed = std::mem::take(&mut adjacency[r]);
            for (nb, contacts) in absorbed {
                adjacency[nb].remove(&r);
                if nb != target {
                    *adjacency[target].entry(nb).or_default() += contacts;
                    *adjacency[nb].entry(target).or_default() += contacts;
                }
            }
            parent[r] = target;
            size[target] += size[r];
            merged_any = true;
        }
        if !merged_any {
            break;
        }
    }

    let labels = comps
        .of_pixel
        .iter()
        .map(|&c| comps.label[find(&mut parent, c)])
        .collect();
    LabelMap::from_labels(w, h, labels)
}
