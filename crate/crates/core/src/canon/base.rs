use std::collections::HashMap;
use std::sync::atomic::Ordering::Relaxed;

use super::{int_set_cmp, span_of_minimal, Canonizer};
use crate::coset::LabelingCoset;
use crate::group::PermutationGroup;
use crate::perm::Perm;

impl Canonizer {
    /// Labelings of `Δρ` giving `v` the least possible label.
    pub fn cl_point(&self, v: u32, c: &LabelingCoset) -> LabelingCoset {
        self.counters.point.fetch_add(1, Relaxed);
        let g = c.group();
        let orbit = g.orbit(v);
        if orbit.len() == 1 {
            return c.clone();
        }
        let w = *orbit.iter().min_by_key(|&&w| c.rep().apply(w)).unwrap();
        let t = g.transporter(v, w).expect("w lies in the orbit of v");
        c.subcoset(g.pointwise_stabilizer(v), &t)
    }

    /// Canonical labeling of a matching `m` whose second entries lie in the
    /// `Δ`-invariant set `a`.
    pub fn cl_match(&self, m: &[(u32, u32)], a: &[u32], c: &LabelingCoset) -> LabelingCoset {
        self.counters.matching.fetch_add(1, Relaxed);
        if m.is_empty() || c.group().is_trivial() || preserves_matching(c.group(), m) {
            return c.clone();
        }
        if a.len() == 1 {
            return self.cl_point(m[0].0, c);
        }
        let orbits = c.group().orbits_within(a);
        if orbits.len() > 1 {
            let rho = c.rep();
            let a1 = orbits
                .iter()
                .min_by(|x, y| int_set_cmp(&super::key::int_set(rho, x), &super::key::int_set(rho, y)))
                .unwrap()
                .clone();
            let mut in_a1 = vec![false; c.degree()];
            for &v in &a1 {
                in_a1[v as usize] = true;
            }
            let a2: Vec<u32> = a.iter().copied().filter(|&v| !in_a1[v as usize]).collect();
            let (m1, m2): (Vec<_>, Vec<_>) = m.iter().partition(|(_, v2)| in_a1[*v2 as usize]);
            let l1 = self.cl_match(&m1, &a1, c);
            return self.cl_match(&m2, &a2, &l1);
        }
        let branches = half_split_branches(c, a);
        let results = self.map(&branches, |sub| {
            let l = self.cl_match(m, a, sub);
            let lam = l.rep();
            let mut key: Vec<(u32, u32)> = m.iter().map(|&(x, y)| (lam.apply(x), lam.apply(y))).collect();
            key.sort_unstable();
            (key, l)
        });
        span_of_minimal(results)
    }

    /// Canonical labeling of the pair `(Θτ, Δρ)`: the group part is `Θ ∩ Δ`.
    pub fn cl_int(&self, t: &LabelingCoset, c: &LabelingCoset) -> LabelingCoset {
        self.counters.int.fetch_add(1, Relaxed);
        if c.group().is_trivial() || c.group().is_subgroup_of(t.group()) {
            return c.clone();
        }
        if let (Some(dc), Some(tc)) = (c.group().cells(), t.group().cells()) {
            return int_cells(dc, c.rep(), tc, t.rep());
        }
        if t.group().is_subgroup_of(c.group()) && c.contains(t.rep()) {
            return t.clone();
        }
        let n = c.degree();
        let group = PermutationGroup::direct_product(c.group(), t.group());
        let mut rep: Vec<u32> = c.rep().images().to_vec();
        rep.extend(t.rep().images().iter().map(|&x| x + n as u32));
        let cu = LabelingCoset::from_parts(group.into(), Perm::from_images_unchecked(rep));
        let m: Vec<(u32, u32)> = (0..n as u32).map(|i| (i + n as u32, i)).collect();
        let v: Vec<u32> = (0..n as u32).collect();
        let lu = self.cl_match(&m, &v, &cu);
        lu.induce_unchecked(&v, true)
    }

    /// `CL(X_t, ... CL(X_1, Δρ))` for cosets `X_i`.
    pub fn cl_int_iter<'a, I>(&self, items: I, c: &LabelingCoset) -> LabelingCoset
    where
        I: IntoIterator<Item = &'a LabelingCoset>,
    {
        items.into_iter().fold(c.clone(), |acc, t| self.cl_int(t, &acc))
    }
}

/// `cl_int` for two cosets of Young subgroups. The group part is the Young
/// subgroup of the common refinement. If the cosets meet, the result is their
/// intersection; otherwise each cell of `Δ` hands out its labels to its parts
/// in the order of the least `τ`-label of the `Θ`-cell they lie in.
fn int_cells(dc: &[u32], rho: &Perm, tc: &[u32], tau: &Perm) -> LabelingCoset {
    let n = dc.len();
    let rho_inv = rho.inverse();
    let tau_inv = tau.inverse();
    let mut at_points: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for v in 0..n as u32 {
        at_points.entry((dc[v as usize], tc[v as usize])).or_default().push(v);
    }
    let mut at_labels: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for x in 0..n as u32 {
        let key = (dc[rho_inv.apply(x) as usize], tc[tau_inv.apply(x) as usize]);
        at_labels.entry(key).or_default().push(x);
    }
    let meets = at_points.len() == at_labels.len()
        && at_points.iter().all(|(k, p)| at_labels.get(k).is_some_and(|l| l.len() == p.len()));
    let mut images = vec![0u32; n];
    if meets {
        for (k, pts) in &at_points {
            for (&v, &x) in pts.iter().zip(&at_labels[k]) {
                images[v as usize] = x;
            }
        }
    } else {
        let mut min_tau = vec![u32::MAX; n];
        for v in 0..n {
            let d = tc[v] as usize;
            min_tau[d] = min_tau[d].min(tau.apply(v as u32));
        }
        let mut parts: HashMap<u32, Vec<(u32, &Vec<u32>)>> = HashMap::new();
        for (&(b, d), pts) in &at_points {
            parts.entry(b).or_default().push((min_tau[d as usize], pts));
        }
        for (b, mut ps) in parts {
            ps.sort_unstable_by_key(|x| x.0);
            let mut labels: Vec<u32> = (0..n as u32).filter(|&v| dc[v as usize] == b).map(|v| rho.apply(v)).collect();
            labels.sort_unstable();
            let mut next = labels.into_iter();
            for (_, pts) in ps {
                for &v in pts {
                    images[v as usize] = next.next().unwrap();
                }
            }
        }
    }
    let mut meet = vec![0u32; n];
    for pts in at_points.values() {
        for &v in pts {
            meet[v as usize] = pts[0];
        }
    }
    LabelingCoset::from_parts(PermutationGroup::from_cells(meet).into(), Perm::from_images_unchecked(images))
}

fn preserves_matching(g: &PermutationGroup, m: &[(u32, u32)]) -> bool {
    let n = g.degree();
    let mut partner = vec![u32::MAX; n];
    for &(x, y) in m {
        partner[x as usize] = y;
    }
    g.generators().iter().all(|p| m.iter().all(|&(x, y)| partner[p.apply(x) as usize] == p.apply(y)))
}

/// For `Δ` transitive on `a`: split the labels of `a` into the lower half and
/// the rest, and return the subcosets of `Δρ` on which the preimage of the
/// lower half is fixed, one for each set in the orbit of that preimage.
pub(crate) fn half_split_branches(c: &LabelingCoset, a: &[u32]) -> Vec<LabelingCoset> {
    let g = c.group();
    let rho = c.rep();
    let mut labels: Vec<u32> = a.iter().map(|&v| rho.apply(v)).collect();
    labels.sort_unstable();
    let cut = labels[a.len() / 2 - 1];
    let a1: Vec<u32> = a.iter().copied().filter(|&v| rho.apply(v) <= cut).collect();
    let stab = g.setwise_stabilizer(&a1);
    g.set_orbit(&a1)
        .into_iter()
        .map(|(_, t)| {
            let ti = t.inverse();
            c.subcoset(stab.conjugate(&t), &ti)
        })
        .collect()
}
