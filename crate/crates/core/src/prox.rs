//! Closed-form proximity operators.
//!
//! `Prox_{τθ}(v) = argmin_y τθ(y) + ½‖v − y‖²`. Only operators with a
//! closed form live here; nothing runs an inner iterative solve.

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{ensure_dims, MgviError, Result};
use crate::linalg::Vector;

/// A closed proper convex function exposed through its proximity operator.
pub trait ProxFunction: Send + Sync + Debug {
    /// Writes `Prox_{tau·θ}(v)` into `out`. `tau > 0` and
    /// `out.len() == v.len()` are the caller's responsibility.
    fn prox_into(&self, v: &[f64], tau: f64, out: &mut [f64]);

    /// `θ(x)`, possibly `+∞`. `None` when the value is not available.
    fn value(&self, _x: &[f64]) -> Option<f64> {
        None
    }

    /// Expected input length, if the function is tied to one.
    fn dim(&self) -> Option<usize> {
        None
    }

    /// One-line text form for instance files, when the function has one.
    fn descriptor(&self) -> Option<String> {
        None
    }

    fn prox(&self, v: &[f64], tau: f64) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        self.prox_into(v, tau, &mut out);
        out
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(MgviError::InvalidParameter(format!("prox scale must be positive, got {tau}")))
    }
}

/// `θ(x) = weight·‖x‖₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Norm {
    pub weight: f64,
}

impl L1Norm {
    pub fn new(weight: f64) -> Result<Self> {
        if weight >= 0.0 && weight.is_finite() {
            Ok(Self { weight })
        } else {
            Err(MgviError::InvalidParameter(format!("l1 weight must be non-negative, got {weight}")))
        }
    }
}

/// Soft threshold of a single entry. `|v| == t` maps to zero.
#[inline]
pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

impl ProxFunction for L1Norm {
    fn prox_into(&self, v: &[f64], tau: f64, out: &mut [f64]) {
        let t = tau * self.weight;
        for (o, &vi) in out.iter_mut().zip(v) {
            *o = soft_threshold(vi, t);
        }
    }

    fn value(&self, x: &[f64]) -> Option<f64> {
        Some(self.weight * x.iter().map(|v| v.abs()).sum::<f64>())
    }

    fn descriptor(&self) -> Option<String> {
        Some(format!("l1 {:.16e}", self.weight))
    }
}

/// `θ ≡ 0`; its prox is the identity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZeroFunction;

impl ProxFunction for ZeroFunction {
    fn prox_into(&self, v: &[f64], _tau: f64, out: &mut [f64]) {
        out.copy_from_slice(v);
    }

    fn value(&self, _x: &[f64]) -> Option<f64> {
        Some(0.0)
    }

    fn descriptor(&self) -> Option<String> {
        Some("zero".into())
    }
}

/// Indicator of the box `[lo, hi]`; its prox is the projection.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxIndicator {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxIndicator {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        ensure_dims!(lo.len() == hi.len(), "box bounds have lengths {} and {}", lo.len(), hi.len());
        if let Some(i) = lo.iter().zip(&hi).position(|(l, h)| !(l <= h)) {
            return Err(MgviError::InvalidParameter(format!(
                "box lower bound exceeds upper bound at component {i}"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn uniform(len: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; len], vec![hi; len])
    }
}

impl ProxFunction for BoxIndicator {
    fn prox_into(&self, v: &[f64], _tau: f64, out: &mut [f64]) {
        for (((o, &vi), &l), &h) in out.iter_mut().zip(v).zip(&self.lo).zip(&self.hi) {
            *o = vi.clamp(l, h);
        }
    }

    fn value(&self, x: &[f64]) -> Option<f64> {
        let inside = x.iter().zip(&self.lo).zip(&self.hi).all(|((v, l), h)| l <= v && v <= h);
        Some(if inside { 0.0 } else { f64::INFINITY })
    }

    fn dim(&self) -> Option<usize> {
        Some(self.lo.len())
    }
}

/// `θ(x) = ½‖x − center‖²`, whose prox is `(v + τ·center) / (1 + τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSquaredDistance {
    pub center: Vec<f64>,
}

impl ProxFunction for HalfSquaredDistance {
    fn prox_into(&self, v: &[f64], tau: f64, out: &mut [f64]) {
        for ((o, &vi), &c) in out.iter_mut().zip(v).zip(&self.center) {
            *o = (vi + tau * c) / (1.0 + tau);
        }
    }

    fn value(&self, x: &[f64]) -> Option<f64> {
        Some(0.5 * x.iter().zip(&self.center).map(|(a, c)| (a - c).powi(2)).sum::<f64>())
    }

    fn dim(&self) -> Option<usize> {
        Some(self.center.len())
    }
}

type BlockSlices<'s, 'a> = (&'s Arc<dyn ProxFunction>, &'a [f64], &'a mut [f64]);

/// Block-separable function `θ(x₁, …, x_k) = Σ θᵢ(xᵢ)`.
///
/// Blocks never interact, so evaluating them on separate threads gives the
/// same bits as evaluating them in order.
#[derive(Debug, Clone)]
pub struct SeparableBlockProx {
    blocks: Vec<(Arc<dyn ProxFunction>, usize)>,
    parallel: bool,
}

impl SeparableBlockProx {
    pub fn new(blocks: Vec<(Arc<dyn ProxFunction>, usize)>) -> Result<Self> {
        for (i, (f, len)) in blocks.iter().enumerate() {
            if let Some(d) = f.dim() {
                ensure_dims!(d == *len, "block {i} function has dimension {d}, block length is {len}");
            }
        }
        Ok(Self { blocks, parallel: false })
    }

    /// Evaluate blocks concurrently on the rayon pool.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn total_len(&self) -> usize {
        self.blocks.iter().map(|(_, l)| l).sum()
    }

    pub fn blocks(&self) -> &[(Arc<dyn ProxFunction>, usize)] {
        &self.blocks
    }

    fn split<'s, 'a>(&'s self, v: &'a [f64], out: &'a mut [f64]) -> Vec<BlockSlices<'s, 'a>> {
        let mut parts = Vec::with_capacity(self.blocks.len());
        let mut v_rest = v;
        let mut out_rest = out;
        for (f, len) in &self.blocks {
            let (vb, vr) = v_rest.split_at(*len);
            let (ob, or) = std::mem::take(&mut out_rest).split_at_mut(*len);
            v_rest = vr;
            out_rest = or;
            parts.push((f, vb, ob));
        }
        parts
    }
}

impl ProxFunction for SeparableBlockProx {
    fn prox_into(&self, v: &[f64], tau: f64, out: &mut [f64]) {
        let parts = self.split(v, out);
        if self.parallel {
            rayon::scope(|s| {
                for (f, vb, ob) in parts {
                    if !vb.is_empty() {
                        s.spawn(move |_| f.prox_into(vb, tau, ob));
                    }
                }
            });
        } else {
            for (f, vb, ob) in parts {
                if !vb.is_empty() {
                    f.prox_into(vb, tau, ob);
                }
            }
        }
    }

    fn value(&self, x: &[f64]) -> Option<f64> {
        let mut total = 0.0;
        let mut offset = 0;
        for (f, len) in &self.blocks {
            if *len > 0 {
                total += f.value(&x[offset..offset + len])?;
            }
            offset += len;
        }
        Some(total)
    }

    fn dim(&self) -> Option<usize> {
        Some(self.total_len())
    }
}

/// Componentwise soft threshold `sign(vᵢ)·max(|vᵢ| − τ, 0)`.
pub fn l1_prox(v: &[f64], tau: f64) -> Result<Vector> {
    check_tau(tau)?;
    Vector::new(L1Norm { weight: 1.0 }.prox(v, tau))
}

pub fn zero_prox(v: &[f64], _tau: f64) -> Vector {
    Vector::trusted(v.to_vec())
}

/// Clamps `v` into `[lo, hi]`.
pub fn indicator_box_prox(v: &[f64], lo: &[f64], hi: &[f64]) -> Result<Vector> {
    let b = BoxIndicator::new(lo.to_vec(), hi.to_vec())?;
    ensure_dims!(v.len() == lo.len(), "vector length {} does not match box dimension {}", v.len(), lo.len());
    Vector::new(b.prox(v, 1.0))
}

pub fn separable_prox(p: &SeparableBlockProx, v: &[f64], tau: f64) -> Result<Vector> {
    check_tau(tau)?;
    ensure_dims!(
        v.len() == p.total_len(),
        "vector length {} does not match block total {}",
        v.len(),
        p.total_len()
    );
    Vector::new(p.prox(v, tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn l1_examples() {
        assert_eq!(l1_prox(&[3.0, -0.5, 0.0], 1.0).unwrap().as_slice(), &[2.0, 0.0, 0.0]);
        assert_eq!(l1_prox(&[0.0, 0.0], 0.3).unwrap().as_slice(), &[0.0, 0.0]);
        assert_eq!(l1_prox(&[1.5], 1.5).unwrap().as_slice(), &[0.0]);
        assert_eq!(l1_prox(&[-1.5], 1.5).unwrap().as_slice(), &[0.0]);
    }

    #[test]
    fn l1_rejects_non_positive_tau() {
        assert!(l1_prox(&[1.0], 0.0).is_err());
        assert!(l1_prox(&[1.0], -2.0).is_err());
    }

    #[test]
    fn zero_examples() {
        assert_eq!(zero_prox(&[1.0, 2.0], 1.0).as_slice(), &[1.0, 2.0]);
        assert_eq!(zero_prox(&[0.0], 5.0).as_slice(), &[0.0]);
        assert_eq!(zero_prox(&[-7.5], 0.1).as_slice(), &[-7.5]);
    }

    #[test]
    fn box_examples() {
        let lo = [-1.0, -1.0];
        let hi = [1.0, 1.0];
        assert_eq!(indicator_box_prox(&[2.0, -2.0], &lo, &hi).unwrap().as_slice(), &[1.0, -1.0]);
        assert_eq!(indicator_box_prox(&[0.3, -0.2], &lo, &hi).unwrap().as_slice(), &[0.3, -0.2]);
        assert_eq!(indicator_box_prox(&[0.5], &[0.0], &[1.0]).unwrap().as_slice(), &[0.5]);
        assert!(matches!(
            indicator_box_prox(&[0.5], &[1.0], &[0.0]),
            Err(MgviError::InvalidParameter(_))
        ));
    }

    #[test]
    fn separable_examples() {
        let p = SeparableBlockProx::new(vec![
            (Arc::new(L1Norm { weight: 1.0 }) as Arc<dyn ProxFunction>, 2),
            (Arc::new(ZeroFunction), 1),
        ])
        .unwrap();
        assert_eq!(separable_prox(&p, &[3.0, -3.0, 9.0], 1.0).unwrap().as_slice(), &[2.0, -2.0, 9.0]);

        let only_zero = SeparableBlockProx::new(vec![(Arc::new(ZeroFunction) as Arc<dyn ProxFunction>, 3)]).unwrap();
        assert_eq!(separable_prox(&only_zero, &[1.0, -2.0, 3.0], 0.7).unwrap().as_slice(), &[1.0, -2.0, 3.0]);

        let mixed = SeparableBlockProx::new(vec![
            (Arc::new(BoxIndicator::uniform(1, 0.0, 1.0).unwrap()) as Arc<dyn ProxFunction>, 1),
            (Arc::new(L1Norm { weight: 1.0 }), 1),
        ])
        .unwrap();
        assert_eq!(separable_prox(&mixed, &[5.0, 5.0], 2.0).unwrap().as_slice(), &[1.0, 3.0]);
        assert!(separable_prox(&mixed, &[5.0], 2.0).is_err());
    }

    #[test]
    fn separable_rejects_wrong_block_dimension() {
        let r = SeparableBlockProx::new(vec![(
            Arc::new(BoxIndicator::uniform(2, 0.0, 1.0).unwrap()) as Arc<dyn ProxFunction>,
            3,
        )]);
        assert!(r.is_err());
    }

    #[test]
    fn half_squared_distance_closed_form() {
        let f = HalfSquaredDistance { center: vec![2.0] };
        // argmin τ/2 (y−2)² + ½(4−y)² at τ = 1 is y = 3
        assert_eq!(f.prox(&[4.0], 1.0), vec![3.0]);
    }

    fn functions() -> Vec<(Arc<dyn ProxFunction>, &'static str)> {
        vec![
            (Arc::new(L1Norm { weight: 1.3 }), "l1"),
            (Arc::new(ZeroFunction), "zero"),
            (Arc::new(BoxIndicator::uniform(4, -0.5, 2.0).unwrap()), "box"),
            (Arc::new(HalfSquaredDistance { center: vec![1.0, -2.0, 0.5, 3.0] }), "sqdist"),
        ]
    }

    proptest! {
        #[test]
        fn prox_characterization_and_nonexpansive(
            v in proptest::collection::vec(-5.0f64..5.0, 4),
            u in proptest::collection::vec(-5.0f64..5.0, 4),
            w in proptest::collection::vec(-2.0f64..2.0, 4),
            tau in 0.01f64..4.0,
        ) {
            for (f, name) in functions() {
                let p = f.prox(&v, tau);
                let lhs: f64 = v.iter().zip(&p).zip(&w).map(|((vi, pi), wi)| (vi - pi) * (pi - wi)).sum();
                let fp = f.value(&p).unwrap();
                let fw = f.value(&w).unwrap();
                if fw.is_finite() {
                    prop_assert!(lhs >= tau * fp - tau * fw - 1e-10, "{name}: {lhs} vs {}", tau * (fp - fw));
                }
                let q = f.prox(&u, tau);
                let dp: f64 = p.iter().zip(&q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                let du: f64 = v.iter().zip(&u).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                prop_assert!(dp <= du + 1e-12, "{name}: {dp} > {du}");
            }
        }

        #[test]
        fn separable_parallel_matches_sequential(
            v in proptest::collection::vec(-5.0f64..5.0, 9),
            tau in 0.01f64..4.0,
        ) {
            let blocks: Vec<(Arc<dyn ProxFunction>, usize)> = vec![
                (Arc::new(L1Norm { weight: 0.7 }), 3),
                (Arc::new(BoxIndicator::uniform(2, -1.0, 1.0).unwrap()), 2),
                (Arc::new(ZeroFunction), 0),
                (Arc::new(ZeroFunction), 4),
            ];
            let seq = SeparableBlockProx::new(blocks.clone()).unwrap();
            let par = SeparableBlockProx::new(blocks).unwrap().with_parallel(true);
            let a = seq.prox(&v, tau);
            let b = par.prox(&v, tau);
            prop_assert_eq!(a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), b.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
            // concatenation of per-block results
            let mut expected = L1Norm { weight: 0.7 }.prox(&v[..3], tau);
            expected.extend(v[3..5].iter().map(|x| x.clamp(-1.0, 1.0)));
            expected.extend_from_slice(&v[5..]);
            prop_assert_eq!(a, expected);
        }
    }
}
