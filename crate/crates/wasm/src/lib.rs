//! Browser bindings. Every exported function takes and returns JSON strings;
//! the `*_json` functions hold the logic so they can be tested natively.

use gbl_core::gallery::{self, EXAMPLES};
use gbl_core::{
    find_disjoint_violation, greedy_sets, projection, renorm_suppression, suppression_constant,
    witness_transfer, Budget, DisjointViolation, Instance, TieMode, Vector, ViolationSearch,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_SAMPLES: usize = 20_000;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse(instance: &str) -> Result<Instance, String> {
    Instance::from_json(instance).map_err(err)
}

fn planar(instance: &str) -> Result<Instance, String> {
    let inst = parse(instance)?;
    if inst.space.dim() != 2 {
        return Err(format!(
            "this view needs dimension 2, got {}",
            inst.space.dim()
        ));
    }
    Ok(inst)
}

fn clamp(samples: usize) -> usize {
    samples.clamp(8, MAX_SAMPLES)
}

fn quick() -> Budget {
    Budget {
        restarts: 2000,
        ..Budget::default()
    }
}

pub fn gallery_json(name: &str) -> Result<String, String> {
    let inst = gallery::gallery(name).map_err(err)?;
    Ok(inst.to_json_pretty())
}

pub fn gallery_names() -> String {
    json!(EXAMPLES).to_string()
}

/// Boundary of the unit ball of the norm and of its suppression renorm,
/// sampled on `samples` directions, plus the basis and the `K_su` witness.
pub fn unit_ball_json(instance: &str, samples: usize) -> Result<String, String> {
    let inst = planar(instance)?;
    let renormed = renorm_suppression(&inst.space, &inst.basis).map_err(err)?;
    let n = clamp(samples);
    let mut ball = Vec::with_capacity(n);
    let mut renorm_ball = Vec::with_capacity(n);
    for k in 0..n {
        let th = std::f64::consts::TAU * k as f64 / n as f64;
        let u = Vector::from_column_slice(&[th.cos(), th.sin()]);
        let a = inst.space.norm(&u).map_err(err)?;
        let b = renormed.norm(&u).map_err(err)?;
        ball.push([u[0] / a, u[1] / a]);
        renorm_ball.push([u[0] / b, u[1] / b]);
    }
    let ksu = suppression_constant(&inst.space, &inst.basis, &quick()).map_err(err)?;
    let w = &ksu.witness.x;
    let p = projection(&inst.basis, w, &ksu.witness.set).map_err(err)?;
    Ok(json!({
        "ball": ball,
        "renorm_ball": renorm_ball,
        "basis": inst.basis.columns(),
        "ksu": ksu.value,
        "exact": ksu.is_exact(),
        "method": ksu.method,
        "witness": {"x": w.as_slice(), "projection": p.as_slice(), "set": ksu.witness.set.iter().map(|i| i + 1).collect::<Vec<_>>()},
    })
    .to_string())
}

/// `‖G_1 x‖/‖x‖` and `‖x - G_1 x‖/‖x‖` for `x = cos θ e_1 + sin θ e_2`,
/// maximized over valid greedy sets, for the norm and for its renorm.
pub fn greedy_landscape_json(instance: &str, samples: usize) -> Result<String, String> {
    let inst = planar(instance)?;
    let renormed = renorm_suppression(&inst.space, &inst.basis).map_err(err)?;
    let n = clamp(samples);
    let mut theta = Vec::with_capacity(n);
    let mut series = [vec![], vec![], vec![], vec![]];
    for k in 0..n {
        let th = std::f64::consts::PI * k as f64 / n as f64;
        let c = [th.cos(), th.sin()];
        let x = inst.basis.synthesize(&Vector::from_column_slice(&c));
        let sets = greedy_sets(&c, 1, TieMode::AllValid).map_err(err)?;
        for (s, space) in [(0, &inst.space), (2, &renormed)] {
            let nx = space.norm(&x).map_err(err)?;
            let (mut g, mut r) = (0.0f64, 0.0f64);
            for sel in &sets {
                let p = projection(&inst.basis, &x, &sel.indices).map_err(err)?;
                g = g.max(space.norm(&p).map_err(err)? / nx);
                r = r.max(space.norm(&(&x - &p)).map_err(err)? / nx);
            }
            series[s].push(g);
            series[s + 1].push(r);
        }
        theta.push(th);
    }
    let [g, r, rg, rr] = series;
    Ok(json!({"theta": theta, "greedy": g, "residual": r, "renorm_greedy": rg, "renorm_residual": rr}).to_string())
}

/// `φ(t) = ‖x + t y‖` on `[0, 1]` for a disjoint split, with `t_max`, the
/// optimal `t*` and the resulting certificate. `split` is either empty (use
/// the strongest split found for the instance) or `{"x": [...], "y": [...]}`.
pub fn transfer_curve_json(instance: &str, split: &str, samples: usize) -> Result<String, String> {
    let inst = parse(instance)?;
    let (space, basis) = (&inst.space, &inst.basis);
    let v = if split.trim().is_empty() {
        match find_disjoint_violation(space, basis, &quick()).map_err(err)? {
            ViolationSearch::Found(v) => v,
            ViolationSearch::ProvedAbsent => {
                return Ok(json!({"status": "proved-absent", "note": "K_su = 1: no disjoint violation exists"}).to_string())
            }
            ViolationSearch::Inconclusive => {
                return Ok(json!({"status": "inconclusive", "note": "no disjoint violation found"}).to_string())
            }
        }
    } else {
        let s: Value = serde_json::from_str(split).map_err(err)?;
        let vec = |key: &str| -> Result<Vector, String> {
            let a: Vec<f64> =
                serde_json::from_value(s.get(key).cloned().ok_or(format!("split needs `{key}`"))?)
                    .map_err(|e| format!("{key}: {e}"))?;
            if a.len() != space.dim() {
                return Err(format!("{key}: expected {} entries", space.dim()));
            }
            Ok(Vector::from_vec(a))
        };
        DisjointViolation::new(space, basis, vec("x")?, vec("y")?).map_err(err)?
    };
    let cert = witness_transfer(space, basis, &v).map_err(err)?;
    let cx = basis.coefficients(&v.x).map_err(err)?;
    let cy = basis.coefficients(&v.y).map_err(err)?;
    let x_min = cx
        .iter()
        .filter(|c| **c != 0.0)
        .fold(f64::INFINITY, |m, c| m.min(c.abs()));
    let t_max = (x_min / cy.amax()).min(1.0);
    let n = clamp(samples);
    let mut t = Vec::with_capacity(n + 1);
    let mut phi = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let s = k as f64 / n as f64;
        t.push(s);
        phi.push(space.norm(&(&v.x + &v.y * s)).map_err(err)?);
    }
    Ok(json!({
        "status": "found",
        "x": v.x.as_slice(),
        "y": v.y.as_slice(),
        "norm_x": space.norm(&v.x).map_err(err)?,
        "t": t,
        "phi": phi,
        "t_max": t_max,
        "certificate": cert,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn gallery_instance(name: &str) -> Result<String, JsValue> {
    gallery_json(name).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn gallery_list() -> String {
    gallery_names()
}

#[wasm_bindgen]
pub fn unit_ball(instance: &str, samples: usize) -> Result<String, JsValue> {
    unit_ball_json(instance, samples).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn greedy_ratio_landscape(instance: &str, samples: usize) -> Result<String, JsValue> {
    greedy_landscape_json(instance, samples).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn transfer_curve(instance: &str, split: &str, samples: usize) -> Result<String, JsValue> {
    transfer_curve_json(instance, split, samples).map_err(|e| JsValue::from_str(&e))
}
