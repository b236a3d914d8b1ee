#![allow(dead_code)]

use cofix_core::control::{CfForm, CfPiece, ControlFunction, DeclaredFlags, RayGuard};
use cofix_core::scalar::{int, rat};
use cofix_core::{DomainSet, Form, Interval, MapPiece, PiecewiseMap, Scalar};
use proptest::prelude::*;
use rand::Rng;

pub const GRID: i64 = 48;
pub const LEVELS: i64 = 24;

pub fn unit() -> DomainSet {
    DomainSet::interval(Interval::closed(int(0), int(1)).unwrap())
}

/// Self-map of `[0, 1]` cut at `cuts / GRID`; each piece is a constant or
/// the affine map joining the two endpoint levels.
pub fn build_map(cuts: &[i64], levels: &[(i64, i64, bool)]) -> PiecewiseMap {
    let mut bps = vec![int(0)];
    bps.extend(cuts.iter().map(|c| rat(*c, GRID)));
    bps.push(int(1));
    let last = bps.len() - 2;
    let pieces = (0..=last)
        .map(|i| {
            let (lo, hi) = (bps[i].clone(), bps[i + 1].clone());
            let (l, r, constant) = levels[i];
            let (vl, vr) = (rat(l, LEVELS), rat(r, LEVELS));
            let form = if constant || vl == vr {
                Form::constant(vl)
            } else {
                let slope = (&vr - &vl) / (&hi - &lo);
                let intercept = &vl - &slope * &lo;
                Form::affine(slope, intercept)
            };
            MapPiece::new(Interval::new(lo, hi, true, i == last).unwrap(), form)
        })
        .collect();
    PiecewiseMap::new(unit(), pieces).unwrap()
}

pub fn map_strategy() -> impl Strategy<Value = PiecewiseMap> {
    (1usize..5)
        .prop_flat_map(|k| {
            (
                prop::collection::btree_set(1..GRID, k - 1),
                prop::collection::vec((0..=LEVELS, 0..=LEVELS, any::<bool>()), k),
            )
        })
        .prop_map(|(cuts, levels)| {
            let cuts: Vec<i64> = cuts.into_iter().collect();
            build_map(&cuts, &levels)
        })
}

pub fn point_strategy() -> impl Strategy<Value = Scalar> {
    (0..=96i64).prop_map(|n| rat(n, 96))
}

pub fn linear(r: Scalar) -> ControlFunction {
    ControlFunction::linear(r)
}

/// Random upper semicontinuous φ with φ(t) < t on `(0, ∞)`: affine between
/// breakpoints with endpoint values `ρ t` (ρ < 1), the larger one-sided
/// limit at each breakpoint, and `ρ t` past the last one.
pub fn random_usc_phi<R: Rng>(rng: &mut R) -> ControlFunction {
    let k = rng.gen_range(1..=6);
    let mut bps: Vec<Scalar> = Vec::new();
    let mut t = int(0);
    for _ in 0..k {
        t += rat(rng.gen_range(1..=40), 8);
        bps.push(t.clone());
    }
    let ratio = |rng: &mut R| rat(rng.gen_range(0..=90), 100);
    let mut pieces = Vec::new();
    let mut left = int(0);
    let mut prev_right_limit: Option<Scalar> = None;
    for b in &bps {
        let start_val = if left == int(0) { int(0) } else { &ratio(rng) * &left };
        let end_val = &ratio(rng) * b;
        if let Some(prev) = prev_right_limit.take() {
            let v = if prev > start_val { prev } else { start_val.clone() };
            pieces.push(CfPiece {
                guard: RayGuard::new(left.clone(), Some(left.clone()), true, true),
                form: CfForm::Constant { c: v },
            });
        }
        let slope = (&end_val - &start_val) / (b - &left);
        let intercept = &start_val - &slope * &left;
        pieces.push(CfPiece {
            guard: RayGuard::new(left.clone(), Some(b.clone()), left == int(0), false),
            form: CfForm::affine(slope, intercept),
        });
        prev_right_limit = Some(end_val);
        left = b.clone();
    }
    let tail_ratio = ratio(rng);
    let tail_start = &tail_ratio * &left;
    let prev = prev_right_limit.expect("at least one breakpoint");
    let v = if prev > tail_start { prev } else { tail_start };
    pieces.push(CfPiece {
        guard: RayGuard::new(left.clone(), Some(left.clone()), true, true),
        form: CfForm::Constant { c: v },
    });
    pieces.push(CfPiece {
        guard: RayGuard::from(left, false),
        form: CfForm::linear(tail_ratio),
    });
    ControlFunction::new(
        pieces,
        DeclaredFlags {
            upper_semicontinuous: true,
            ..DeclaredFlags::default()
        },
    )
    .expect("generated control function is valid")
}
