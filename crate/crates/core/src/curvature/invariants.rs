//! Metric contractions of curvature tensors at a radial point.
//!
//! With `gu(a, b) = g^{a bbar}`, an unbarred slot `i` is raised to `a` by
//! `gu(a, i)` and a barred slot `j` to `b` by `gu(j, b)`. All stored
//! components are real at real radial points, so conjugation acts on the
//! values as the identity.

use super::frame::{RadialTensorFrame, Tensor2};
use crate::error::Result;
use crate::scalar::Num;

/// Dense tensor of rank `r` over `0..n` in row-major order.
#[derive(Clone, Debug)]
struct Dense<S> {
    n: usize,
    rank: usize,
    data: Vec<S>,
}

impl<S: Num> Dense<S> {
    fn from_fn(n: usize, rank: usize, f: impl Fn(&[usize]) -> S) -> Self {
        let len = n.pow(rank as u32);
        let mut idx = vec![0; rank];
        let mut data = Vec::with_capacity(len);
        for flat in 0..len {
            let mut rem = flat;
            for slot in (0..rank).rev() {
                idx[slot] = rem % n;
                rem /= n;
            }
            data.push(f(&idx));
        }
        Dense { n, rank, data }
    }

    fn at(&self, idx: &[usize]) -> &S {
        let flat = idx.iter().fold(0, |acc, &i| acc * self.n + i);
        &self.data[flat]
    }

    /// `out[.., a, ..] = sum_i m[a][i] self[.., i, ..]` in `slot`.
    fn contract_slot(&self, slot: usize, m: &Tensor2<S>) -> Self {
        let n = self.n;
        Dense::from_fn(n, self.rank, |idx| {
            let mut j = idx.to_vec();
            let a = idx[slot];
            let mut acc = self.data[0].zero_like();
            for i in 0..n {
                j[slot] = i;
                acc.mul_add_assign(&m[a][i], self.at(&j));
            }
            acc
        })
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Unbarred,
    Barred,
}

/// Raising matrices: `up[a][i] = gu(a, i)` and `down[b][j] = gu(j, b)`.
fn raisers<S: Num>(fr: &RadialTensorFrame<S>) -> (Tensor2<S>, Tensor2<S>) {
    let n = fr.n;
    let up = (0..n)
        .map(|a| (0..n).map(|i| fr.gu(a, i).clone()).collect())
        .collect();
    let down = (0..n)
        .map(|b| (0..n).map(|j| fr.gu(j, b).clone()).collect())
        .collect();
    (up, down)
}

fn raise_all<S: Num>(t: &Dense<S>, slots: &[Slot], up: &Tensor2<S>, down: &Tensor2<S>) -> Dense<S> {
    slots.iter().enumerate().fold(t.clone(), |acc, (k, s)| {
        acc.contract_slot(
            k,
            match s {
                Slot::Unbarred => up,
                Slot::Barred => down,
            },
        )
    })
}

/// `sum_idx a[idx] * b[perm(idx)]`.
fn pair<S: Num>(a: &Dense<S>, b: &Dense<S>, perm: impl Fn(&[usize]) -> Vec<usize>) -> S {
    let n = a.n;
    let mut acc = a.data[0].zero_like();
    let len = a.data.len();
    let mut idx = vec![0; a.rank];
    for flat in 0..len {
        let mut rem = flat;
        for slot in (0..a.rank).rev() {
            idx[slot] = rem % n;
            rem /= n;
        }
        acc.mul_add_assign(&a.data[flat], b.at(&perm(&idx)));
    }
    acc
}

fn dense2<S: Num>(n: usize, t: &[Vec<S>]) -> Dense<S> {
    Dense::from_fn(n, 2, |i| t[i[0]][i[1]].clone())
}

fn dense3<S: Num>(n: usize, t: &[Vec<Vec<S>>]) -> Dense<S> {
    Dense::from_fn(n, 3, |i| t[i[0]][i[1]][i[2]].clone())
}

fn dense4<S: Num>(n: usize, t: &[Vec<Vec<Vec<S>>>]) -> Dense<S> {
    Dense::from_fn(n, 4, |i| t[i[0]][i[1]][i[2]][i[3]].clone())
}

/// Invariants that need only the curvature of the frame.
#[derive(Clone, Debug)]
pub struct PointInvariants<S> {
    pub rho: S,
    /// `|R|^2`.
    pub r2: S,
    /// `|Ric|^2`.
    pub ric2: S,
}

pub fn point_invariants<S: Num>(fr: &RadialTensorFrame<S>) -> PointInvariants<S> {
    let n = fr.n;
    let (up, down) = raisers(fr);
    use Slot::*;
    let r = dense4(n, &fr.r);
    let ric = dense2(n, &fr.ric);
    let r_up = raise_all(&r, &[Unbarred, Barred, Unbarred, Barred], &up, &down);
    let ric_up = raise_all(&ric, &[Unbarred, Barred], &up, &down);
    PointInvariants {
        rho: fr.rho.clone(),
        r2: pair(&r_up, &r, |i| i.to_vec()),
        ric2: pair(&ric_up, &ric, |i| i.to_vec()),
    }
}

/// The remaining contractions, which involve covariant derivatives.
#[derive(Clone, Debug)]
pub struct DerivativeInvariants<S> {
    /// `|D'rho|^2`.
    pub drho2: S,
    /// `|D'Ric|^2`.
    pub dric2: S,
    /// `|D'R|^2`.
    pub dr2: S,
    /// `sigma_3(Ric)`.
    pub sigma3: S,
    /// `R(Ric, Ric)`.
    pub r_ric_ric: S,
    /// `Ric(R, R)`.
    pub ric_r_r: S,
    /// `div div (R, Ric)`.
    pub divdiv_r_ric: S,
    /// `div div (rho Ric)`.
    pub divdiv_rho_ric: S,
    /// `Delta rho = g^{j ibar} d_i dbar_j rho`, from the frame.
    pub lap_rho: S,
}

pub fn derivative_invariants<S: Num>(fr: &RadialTensorFrame<S>) -> Result<DerivativeInvariants<S>> {
    let d = fr.full()?;
    let n = fr.n;
    let (up, down) = raisers(fr);
    use Slot::*;
    let zero = fr.rho.zero_like();
    let r = dense4(n, &fr.r);
    let ric = dense2(n, &fr.ric);
    let r_up = raise_all(&r, &[Unbarred, Barred, Unbarred, Barred], &up, &down);
    let ric_up = raise_all(&ric, &[Unbarred, Barred], &up, &down);

    let mut drho2 = zero.clone();
    let mut lap_rho = zero.clone();
    for i in 0..n {
        for j in 0..n {
            drho2.add_assign_ref(&fr.gu(j, i).mul_ref(&d.d_rho[i]).mul_ref(&d.dbar_rho[j]));
            lap_rho.mul_add_assign(fr.gu(j, i), &d.ddbar_rho[i][j]);
        }
    }

    let ric_k = dense3(n, &d.ric_k);
    let dric2 = pair(
        &raise_all(&ric_k, &[Unbarred, Barred, Unbarred], &up, &down),
        &ric_k,
        |i| i.to_vec(),
    );

    let r_p = Dense::from_fn(n, 5, |i| d.r_p[i[0]][i[1]][i[2]][i[3]][i[4]].clone());
    let dr2 = pair(
        &raise_all(
            &r_p,
            &[Unbarred, Barred, Unbarred, Barred, Unbarred],
            &up,
            &down,
        ),
        &r_p,
        |i| i.to_vec(),
    );

    // g^{beta ibar} g^{j alphabar} Ric_{i jbar} d_alpha dbar_beta rho
    let ddbar = dense2(n, &d.ddbar_rho);
    let ric_hess = pair(&ric_up, &ddbar, |i| vec![i[1], i[0]]);

    let divdiv_rho_ric = drho2
        .scale_i64(2)
        .add_ref(&ric_hess)
        .add_ref(&fr.rho.mul_ref(&lap_rho));

    // R(Ric, Ric) = R^{alpha beta gamma delta} Ric_{beta alphabar} Ric_{delta gammabar}
    let mut r_ric_ric = zero.clone();
    for (flat, v) in r_up.data.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let (a, b, g, dl) = (
            flat / n.pow(3),
            (flat / n.pow(2)) % n,
            (flat / n) % n,
            flat % n,
        );
        r_ric_ric.add_assign_ref(&v.mul_ref(&fr.ric[b][a]).mul_ref(&fr.ric[dl][g]));
    }

    // Ric(R, R) = Ric^{alpha beta} W_{beta gamma}^{delta epsilon} V^{gamma}_{alpha epsilon delta}
    let w = r.contract_slot(2, &up).contract_slot(3, &down);
    let v = r.contract_slot(0, &up);
    let mut ric_r_r = zero.clone();
    for a in 0..n {
        for b in 0..n {
            let rab = ric_up.at(&[a, b]);
            if rab.is_zero() {
                continue;
            }
            for g in 0..n {
                for dl in 0..n {
                    for e in 0..n {
                        let t = w.at(&[b, g, dl, e]).mul_ref(v.at(&[g, a, e, dl]));
                        ric_r_r.mul_add_assign(rab, &t);
                    }
                }
            }
        }
    }

    // sigma_3 = Ric^{delta alpha} Ric_{alpha betabar} g^{beta gammabar} Ric_{gamma deltabar}
    let mut sigma3 = zero.clone();
    for dl in 0..n {
        for a in 0..n {
            for b in 0..n {
                for g in 0..n {
                    let t = fr.ric[a][b].mul_ref(fr.gu(b, g)).mul_ref(&fr.ric[g][dl]);
                    sigma3.mul_add_assign(ric_up.at(&[dl, a]), &t);
                }
            }
        }
    }

    // g^{alpha ibar} g^{j betabar} g^{gamma kbar} g^{l deltabar} Ric_{i jbar, k lbar} R_{beta alphabar delta gammabar}
    let ric_kl = dense4(n, &d.ric_kl);
    let ric_kl_r = pair(
        &raise_all(&ric_kl, &[Unbarred, Barred, Unbarred, Barred], &up, &down),
        &r,
        |i| vec![i[1], i[0], i[3], i[2]],
    );

    let divdiv_r_ric = ric_hess
        .neg_ref()
        .sub_ref(&dric2.scale_i64(2))
        .add_ref(&ric_kl_r)
        .sub_ref(&r_ric_ric)
        .sub_ref(&sigma3);

    Ok(DerivativeInvariants {
        drho2,
        dric2,
        dr2,
        sigma3,
        r_ric_ric,
        ric_r_r,
        divdiv_r_ric,
        divdiv_rho_ric,
        lap_rho,
    })
}
