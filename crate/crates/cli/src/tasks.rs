//! Task dispatch: builds the requested computation from the configuration and
//! renders a deterministic JSON report.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use gradecalc_core::cech::{CechError, CoverPresheaf};
use gradecalc_core::complex::{BettiTable, ComplexError};
use gradecalc_core::derham;
use gradecalc_core::derivation::GradedDerivation;
use gradecalc_core::diffop::{OpAlgebra, OperatorError};
use gradecalc_core::jet;
use gradecalc_core::lie::{self, LieAlgebra, LieError, LieModule};
use gradecalc_core::ncalc::{self, Bimod, FDAlgebra};
use gradecalc_core::parse::{parse_expression, parse_operator};
use gradecalc_core::ring::RingSpec;
use gradecalc_core::scalar::format_scalar;

use crate::config::{parse_matrix, parse_vector, Config};

/// Failure with the exit code it maps to: 1 for validation problems, 2 for
/// integrity violations (a coboundary that does not square to zero, bad
/// structure constants, incompatible restrictions).
#[derive(Debug)]
pub struct TaskError {
    pub exit_code: i32,
    pub message: String,
}

impl std::fmt::Display for TaskError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for TaskError {}

fn validation(message: impl Into<String>) -> TaskError {
    TaskError {
        exit_code: 1,
        message: message.into(),
    }
}

fn integrity(message: impl Into<String>) -> TaskError {
    TaskError {
        exit_code: 2,
        message: message.into(),
    }
}

fn from_complex_error(e: ComplexError) -> TaskError {
    match e {
        ComplexError::NotAComplex { .. } => integrity(e.to_string()),
        ComplexError::ShapeMismatch { .. } => validation(e.to_string()),
    }
}

fn from_lie_error(e: LieError) -> TaskError {
    match e {
        LieError::NotAntisymmetric { .. }
        | LieError::JacobiFails { .. }
        | LieError::NotAModule { .. } => integrity(e.to_string()),
        LieError::Complex(inner) => from_complex_error(inner),
        LieError::Shape(_) => validation(e.to_string()),
    }
}

fn from_cech_error(e: CechError) -> TaskError {
    match e {
        CechError::Incompatible { .. } => integrity(e.to_string()),
        CechError::Complex(inner) => from_complex_error(inner),
        _ => validation(e.to_string()),
    }
}

fn from_operator_error(e: OperatorError) -> TaskError {
    validation(e.to_string())
}

pub fn run(config: &Config, weight_cap: Option<u32>, trunc: Option<u32>) -> Result<Value, TaskError> {
    let kind = config
        .require("task", "kind")
        .map_err(|e| validation(e.to_string()))?
        .to_string();
    let ring = config.ring(trunc).map_err(|e| validation(e.to_string()))?;
    match kind.as_str() {
        "eval" => eval_task(config, &ring),
        "d" => d_task(config, &ring),
        "wedge" => wedge_task(config, &ring),
        "cohomology" => cohomology_task(config, &ring, weight_cap),
        "lie" => lie_task(config),
        "cech" => cech_task(config),
        "op-order" => op_order_task(config, &ring),
        "jets" => jets_task(config, &ring),
        "curvature" => curvature_task(config, &ring),
        "universal" => universal_task(config),
        "filtration" => filtration_task(config),
        other => Err(validation(format!("unknown task kind `{other}`"))),
    }
}

fn ring_json(ring: &RingSpec) -> Value {
    json!({
        "n_even": ring.n_even(),
        "n_odd": ring.n_odd(),
        "even_weight": if ring.n_even() > 0 { ring.even_weight(0) } else { 2 },
        "odd_weight": if ring.n_odd() > 0 { ring.odd_weight(0) } else { 1 },
        "trunc": ring.trunc(),
    })
}

fn betti_json(betti: &BettiTable) -> Value {
    let mut map = Map::new();
    for (p, d) in betti.dims().iter().enumerate() {
        map.insert(p.to_string(), json!(d));
    }
    Value::Object(map)
}

fn eval_task(config: &Config, ring: &RingSpec) -> Result<Value, TaskError> {
    let expr = config
        .require("eval", "expr")
        .map_err(|e| validation(e.to_string()))?;
    let value = parse_expression(expr, ring).map_err(|e| validation(e.to_string()))?;
    let z2 = match value.z2_degree() {
        Some(false) => "even",
        Some(true) => "odd",
        None => "mixed",
    };
    Ok(json!({
        "task": "eval",
        "ring": ring_json(ring),
        "input": expr,
        "value": value.to_string(),
        "truncated": value.truncated(),
        "degree": value.degree(),
        "weight": value.weight(),
        "z2": z2,
    }))
}

fn d_task(config: &Config, ring: &RingSpec) -> Result<Value, TaskError> {
    let expr = config
        .require("d", "expr")
        .map_err(|e| validation(e.to_string()))?;
    let value = parse_expression(expr, ring).map_err(|e| validation(e.to_string()))?;
    let d = value.exterior_d();
    Ok(json!({
        "task": "d",
        "ring": ring_json(ring),
        "input": expr,
        "value": d.to_string(),
        "dd_is_zero": d.exterior_d().is_zero(),
    }))
}

fn wedge_task(config: &Config, ring: &RingSpec) -> Result<Value, TaskError> {
    let lhs = config
        .require("wedge", "lhs")
        .map_err(|e| validation(e.to_string()))?;
    let rhs = config
        .require("wedge", "rhs")
        .map_err(|e| validation(e.to_string()))?;
    let l = parse_expression(lhs, ring).map_err(|e| validation(e.to_string()))?;
    let r = parse_expression(rhs, ring).map_err(|e| validation(e.to_string()))?;
    let w = l.wedge(&r).map_err(|e| validation(e.to_string()))?;
    Ok(json!({
        "task": "wedge",
        "ring": ring_json(ring),
        "lhs": lhs,
        "rhs": rhs,
        "value": w.to_string(),
        "truncated": w.truncated(),
    }))
}

fn cohomology_task(
    config: &Config,
    ring: &RingSpec,
    weight_cap: Option<u32>,
) -> Result<Value, TaskError> {
    if config.laurent().map_err(|e| validation(e.to_string()))? {
        let window = config
            .get_i64("cohomology", "window")
            .map_err(|e| validation(e.to_string()))?
            .unwrap_or(4);
        if window < 1 {
            return Err(validation("laurent window must be at least 1"));
        }
        let candidate = config
            .get_i64("cohomology", "candidate_exp")
            .map_err(|e| validation(e.to_string()))?
            .unwrap_or(-1);
        let witness = derham::laurent_witness(window, candidate);
        let candidate_str = match candidate {
            0 => "dt".to_string(),
            -1 => "dt/t".to_string(),
            e => format!("t^{e} dt"),
        };
        return Ok(json!({
            "task": "cohomology",
            "laurent": true,
            "window": window,
            "candidate": candidate_str,
            "closed": witness.closed,
            "exact": witness.exact,
            "primitive": witness.primitive_string(),
        }));
    }
    let cap = weight_cap
        .or(config
            .get_usize("cohomology", "weight_cap")
            .map_err(|e| validation(e.to_string()))?
            .map(|c| c as u32))
        .unwrap_or(6);
    let (per_weight, total) =
        derham::de_rham_betti(ring, cap).map_err(from_complex_error)?;
    let mut per = Map::new();
    for (w, betti) in &per_weight {
        per.insert(w.to_string(), betti_json(betti));
    }
    Ok(json!({
        "task": "cohomology",
        "ring": ring_json(ring),
        "weight_cap": cap,
        "per_weight": Value::Object(per),
        "betti": betti_json(&total),
    }))
}

fn lie_task(config: &Config) -> Result<Value, TaskError> {
    let (g, name) = lie_algebra_from(config, "lie")?;
    let module = lie_module_from(config, "lie", &g)?;
    let betti = lie::lie_betti(&g, &module).map_err(from_lie_error)?;
    Ok(json!({
        "task": "lie",
        "algebra": name,
        "dim": g.dim(),
        "module_dim": module.dim(),
        "betti": betti_json(&betti),
    }))
}

fn lie_algebra_from(config: &Config, section: &str) -> Result<(LieAlgebra, String), TaskError> {
    if let Some(preset) = config.get(section, "algebra") {
        let g = match preset {
            "sl2" => LieAlgebra::sl2(),
            "heisenberg" => LieAlgebra::heisenberg(),
            "abelian" => {
                let dim = config
                    .get_usize(section, "dim")
                    .map_err(|e| validation(e.to_string()))?
                    .ok_or_else(|| validation("abelian preset needs `dim`"))?;
                LieAlgebra::abelian(dim)
            }
            other => return Err(validation(format!("unknown Lie algebra preset `{other}`"))),
        };
        return Ok((g, preset.to_string()));
    }
    let dim = config
        .get_usize(section, "dim")
        .map_err(|e| validation(e.to_string()))?
        .ok_or_else(|| validation(format!("[{section}] needs `dim` or `algebra`")))?;
    let zero = vec![gradecalc_core::scalar::Scalar::from_integer(0.into()); dim];
    let mut bracket = vec![vec![zero.clone(); dim]; dim];
    let mut seen: BTreeMap<(usize, usize), Vec<gradecalc_core::scalar::Scalar>> = BTreeMap::new();
    for key in config.section_keys(section) {
        let Some(rest) = key.strip_prefix("bracket_") else {
            continue;
        };
        let parts: Vec<&str> = rest.split('_').collect();
        if parts.len() != 2 {
            return Err(validation(format!("bad bracket key `{key}`")));
        }
        let i: usize = parts[0]
            .parse()
            .map_err(|_| validation(format!("bad bracket key `{key}`")))?;
        let j: usize = parts[1]
            .parse()
            .map_err(|_| validation(format!("bad bracket key `{key}`")))?;
        if i == 0 || j == 0 || i > dim || j > dim {
            return Err(validation(format!("bracket indices out of range in `{key}`")));
        }
        let v = parse_vector(config.get(section, &key).expect("listed key"))
            .map_err(validation)?;
        if v.len() != dim {
            return Err(validation(format!(
                "bracket vector `{key}` must have {dim} entries"
            )));
        }
        seen.insert((i - 1, j - 1), v);
    }
    for ((i, j), v) in &seen {
        bracket[*i][*j] = v.clone();
        if !seen.contains_key(&(*j, *i)) {
            bracket[*j][*i] = v.iter().map(|c| -c.clone()).collect();
        }
    }
    let g = LieAlgebra::new(dim, bracket).map_err(from_lie_error)?;
    Ok((g, "custom".to_string()))
}

fn lie_module_from(
    config: &Config,
    section: &str,
    g: &LieAlgebra,
) -> Result<LieModule, TaskError> {
    let Some(dim) = config
        .get_usize(section, "module_dim")
        .map_err(|e| validation(e.to_string()))?
    else {
        return Ok(LieModule::trivial(g));
    };
    if config.get(section, "module") == Some("adjoint") {
        return Ok(LieModule::adjoint(g));
    }
    let mut actions = Vec::with_capacity(g.dim());
    for i in 1..=g.dim() {
        let key = format!("rho_{i}");
        let m = match config.get(section, &key) {
            Some(text) => parse_matrix(text).map_err(validation)?,
            None => gradecalc_core::linalg::SparseMat::zero(dim, dim),
        };
        actions.push(m);
    }
    LieModule::new(g, dim, actions).map_err(from_lie_error)
}

fn cech_task(config: &Config) -> Result<Value, TaskError> {
    let opens = config
        .get_usize("cech", "opens")
        .map_err(|e| validation(e.to_string()))?
        .ok_or_else(|| validation("[cech] needs `opens`"))?;
    let p_max = config
        .get_usize("cech", "p_max")
        .map_err(|e| validation(e.to_string()))?
        .unwrap_or(opens.saturating_sub(1));
    let mut cover = CoverPresheaf::new(opens, p_max);
    for key in config.section_keys("cech") {
        if let Some(rest) = key.strip_prefix("dim_") {
            let tuple = parse_tuple(rest)
                .ok_or_else(|| validation(format!("bad tuple in key `{key}`")))?;
            let d = config
                .get_usize("cech", &key)
                .map_err(|e| validation(e.to_string()))?
                .expect("listed key");
            cover
                .set_dim(tuple, d)
                .map_err(|e| validation(e.to_string()))?;
        }
    }
    for key in config.section_keys("cech") {
        if let Some(rest) = key.strip_prefix("rest_") {
            let Some((tuple_part, face_part)) = rest.split_once("__") else {
                return Err(validation(format!(
                    "restriction key `{key}` needs the form rest_<tuple>__<face>"
                )));
            };
            let tuple = parse_tuple(tuple_part)
                .ok_or_else(|| validation(format!("bad tuple in key `{key}`")))?;
            let face: usize = face_part
                .parse()
                .map_err(|_| validation(format!("bad face index in `{key}`")))?;
            let m = parse_matrix(config.get("cech", &key).expect("listed key"))
                .map_err(validation)?;
            cover
                .set_restriction(tuple, face, m)
                .map_err(|e| validation(e.to_string()))?;
        }
    }
    let betti = cover.cech_betti().map_err(from_cech_error)?;
    Ok(json!({
        "task": "cech",
        "opens": opens,
        "p_max": p_max,
        "betti": betti_json(&betti),
    }))
}

fn parse_tuple(text: &str) -> Option<Vec<usize>> {
    let parts: Result<Vec<usize>, _> = text.split('_').map(str::parse).collect();
    parts.ok()
}

fn op_order_task(config: &Config, ring: &RingSpec) -> Result<Value, TaskError> {
    let text = config
        .require("op-order", "op")
        .map_err(|e| validation(e.to_string()))?;
    let graded = config
        .get_bool("op-order", "graded")
        .map_err(|e| validation(e.to_string()))?
        .unwrap_or(true);
    let s_max = config
        .get_usize("op-order", "s_max")
        .map_err(|e| validation(e.to_string()))?
        .unwrap_or(5) as u32;
    let alg = OpAlgebra::new(ring);
    let op = parse_operator(text, &alg).map_err(|e| validation(e.to_string()))?;
    let order = op.order_of(s_max, graded);
    let mut report = Map::new();
    report.insert("task".into(), json!("op-order"));
    report.insert("ring".into(), ring_json(ring));
    report.insert("op".into(), json!(text));
    report.insert("graded".into(), json!(graded));
    report.insert("s_max".into(), json!(s_max));
    match order {
        Ok(s) => {
            report.insert("order".into(), json!(s));
            if s <= 1 {
                if let Ok((z, u)) = op.first_order_split() {
                    report.insert("zero_order_part".into(), json!(z.to_string()));
                    report.insert(
                        "derivation_part_is_zero".into(),
                        json!(u.is_zero()),
                    );
                }
            }
        }
        Err(_) => {
            report.insert("order".into(), Value::Null);
            report.insert("exceeds_s_max".into(), json!(true));
        }
    }
    Ok(Value::Object(report))
}

fn jets_task(config: &Config, ring: &RingSpec) -> Result<Value, TaskError> {
    let w = config
        .get_usize("jets", "weight")
        .map_err(|e| validation(e.to_string()))?
        .unwrap_or(1) as u32;
    let jet = jet::build_jet1(ring, w);
    let (i1_rank, o1_rank, joint) =
        jet::splitting_ranks(&jet).map_err(|e| validation(e.to_string()))?;
    let splitting_ok = i1_rank + o1_rank == joint && joint == jet.dim();
    let mut report = Map::new();
    report.insert("task".into(), json!("jets"));
    report.insert("ring".into(), ring_json(ring));
    report.insert("weight".into(), json!(w));
    report.insert("dim".into(), json!(jet.dim()));
    report.insert("expected_dim".into(), json!(jet.expected_dim()));
    report.insert("i1_rank".into(), json!(i1_rank));
    report.insert("o1_rank".into(), json!(o1_rank));
    report.insert("splitting_ok".into(), json!(splitting_ok));
    if let Some(text) = config.get("jets", "op") {
        let alg = OpAlgebra::new(ring);
        let op = parse_operator(text, &alg).map_err(|e| validation(e.to_string()))?;
        match jet::factor_through_jet(&jet, &op) {
            Ok(_) => {
                report.insert("factors".into(), json!(true));
            }
            Err(e) => {
                report.insert("factors".into(), json!(false));
                report.insert("factor_error".into(), json!(e.to_string()));
            }
        }
    }
    Ok(Value::Object(report))
}

fn curvature_task(config: &Config, ring: &RingSpec) -> Result<Value, TaskError> {
    let rank = config
        .get_usize("curvature", "rank")
        .map_err(|e| validation(e.to_string()))?
        .unwrap_or(1);
    let parse_omega = |key: &str| -> Result<jet::ElementMatrix, TaskError> {
        match config.get("curvature", key) {
            None => Ok(vec![
                vec![gradecalc_core::ring::Element::zero(ring); rank];
                rank
            ]),
            Some(text) => {
                let rows: Vec<&str> = text.split(';').collect();
                if rows.len() != rank {
                    return Err(validation(format!("`{key}` must have {rank} rows")));
                }
                rows.iter()
                    .map(|row| {
                        let entries: Vec<&str> = row.split(',').collect();
                        if entries.len() != rank {
                            return Err(validation(format!(
                                "`{key}` must have {rank} entries per row"
                            )));
                        }
                        entries
                            .iter()
                            .map(|e| {
                                parse_expression(e.trim(), ring)
                                    .map_err(|err| validation(err.to_string()))
                                    .and_then(|f| {
                                        f.as_element().ok_or_else(|| {
                                            validation("connection coefficients must be degree zero")
                                        })
                                    })
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    };
    let mut omega_even = Vec::with_capacity(ring.n_even());
    for i in 1..=ring.n_even() {
        omega_even.push(parse_omega(&format!("omega_x{i}"))?);
    }
    let mut omega_odd = Vec::with_capacity(ring.n_odd());
    for a in 1..=ring.n_odd() {
        omega_odd.push(parse_omega(&format!("omega_c{a}"))?);
    }
    let conn = jet::Connection::new(ring, rank, omega_even, omega_odd)
        .map_err(|e| validation(e.to_string()))?;
    let alg = OpAlgebra::new(ring);
    let parse_derivation = |key: &str| -> Result<GradedDerivation, TaskError> {
        let text = config
            .require("curvature", key)
            .map_err(|e| validation(e.to_string()))?;
        let op = parse_operator(text, &alg).map_err(|e| validation(e.to_string()))?;
        let (z, u) = op.first_order_split().map_err(from_operator_error)?;
        if !z.is_zero() {
            return Err(validation(format!("`{key}` must be a derivation")));
        }
        Ok(u)
    };
    let u = parse_derivation("u")?;
    let v = parse_derivation("v")?;
    let r = conn.curvature(&alg, &u, &v).map_err(from_operator_error)?;
    let order = r.order_of(2, true).map_err(from_operator_error)?;
    let matrix = r.as_element_matrix().map_err(from_operator_error)?;
    let matrix_json: Vec<Value> = matrix
        .iter()
        .map(|row| {
            Value::Array(row.iter().map(|e| json!(e.to_string())).collect())
        })
        .collect();
    Ok(json!({
        "task": "curvature",
        "ring": ring_json(ring),
        "rank": rank,
        "order": order,
        "a_linear": order == 0,
        "matrix": matrix_json,
    }))
}

fn algebra_from(config: &Config, section: &str) -> Result<(FDAlgebra, String), TaskError> {
    let name = config
        .get(section, "algebra")
        .unwrap_or("mat2")
        .to_string();
    let alg = match name.as_str() {
        "rationals" => FDAlgebra::rationals(),
        "dual" | "dual_numbers" => FDAlgebra::dual_numbers(),
        "dual_pair" => FDAlgebra::dual_pair(),
        "grassmann1" => FDAlgebra::grassmann_one(),
        "mat2" => FDAlgebra::mat2(),
        "custom" => {
            let dim = config
                .get_usize(section, "dim")
                .map_err(|e| validation(e.to_string()))?
                .ok_or_else(|| validation("custom algebra needs `dim`"))?;
            let zero = vec![gradecalc_core::scalar::Scalar::from_integer(0.into()); dim];
            let mut mult = vec![vec![zero.clone(); dim]; dim];
            for key in config.section_keys(section) {
                let Some(rest) = key.strip_prefix("mult_") else {
                    continue;
                };
                let parts: Vec<&str> = rest.split('_').collect();
                if parts.len() != 2 {
                    return Err(validation(format!("bad mult key `{key}`")));
                }
                let i: usize = parts[0]
                    .parse()
                    .map_err(|_| validation(format!("bad mult key `{key}`")))?;
                let j: usize = parts[1]
                    .parse()
                    .map_err(|_| validation(format!("bad mult key `{key}`")))?;
                if i == 0 || j == 0 || i > dim || j > dim {
                    return Err(validation(format!("mult indices out of range in `{key}`")));
                }
                let v = parse_vector(config.get(section, &key).expect("listed key"))
                    .map_err(validation)?;
                if v.len() != dim {
                    return Err(validation(format!(
                        "mult vector `{key}` must have {dim} entries"
                    )));
                }
                mult[i - 1][j - 1] = v;
            }
            let unit = parse_vector(
                config
                    .require(section, "unit")
                    .map_err(|e| validation(e.to_string()))?,
            )
            .map_err(validation)?;
            FDAlgebra::new(dim, mult, unit).map_err(|e| integrity(e.to_string()))?
        }
        other => return Err(validation(format!("unknown algebra preset `{other}`"))),
    };
    Ok((alg, name))
}

fn universal_task(config: &Config) -> Result<Value, TaskError> {
    let (alg, name) = algebra_from(config, "universal")?;
    let omega = ncalc::universal_omega1(&alg);
    let mult = ncalc::multiplication_map(&alg);
    let kernel_dim = mult.ncols() - mult.rank();
    let cal = ncalc::UniversalCalculus::new(&alg);
    // d squared on every basis element
    let mut dd_zero = true;
    for i in 0..alg.dim() {
        let a = cal.from_element(&alg.basis_vec(i));
        if !cal.differential(&cal.differential(&a)).is_zero() {
            dd_zero = false;
        }
    }
    Ok(json!({
        "task": "universal",
        "algebra": name,
        "dim": alg.dim(),
        "omega1_dim": omega.span.rank(),
        "mult_kernel_dim": kernel_dim,
        "omega1_matches_kernel": omega.span.rank() == kernel_dim,
        "dd_is_zero": dd_zero,
    }))
}

fn filtration_task(config: &Config) -> Result<Value, TaskError> {
    let (alg, name) = algebra_from(config, "filtration")?;
    let r_max = config
        .get_usize("filtration", "r_max")
        .map_err(|e| validation(e.to_string()))?
        .unwrap_or(3)
        .min(3);
    let side = config.get("filtration", "side").unwrap_or("left");
    let p = Bimod::regular(&alg);
    let filt = match side {
        "left" => ncalc::left_order_filtration(&alg, &p, &p, r_max),
        "right" => ncalc::right_order_filtration(&alg, &p, &p, r_max),
        "two-sided" => ncalc::two_sided_filtration(&alg, &p, &p, r_max.min(2)),
        other => return Err(validation(format!("unknown filtration side `{other}`"))),
    };
    let ders = alg.derivations();
    let derivation_orders: Vec<Value> = ders
        .iter()
        .map(|u| match filt.membership(u) {
            Some(r) => json!(r),
            None => Value::Null,
        })
        .collect();
    Ok(json!({
        "task": "filtration",
        "algebra": name,
        "side": side,
        "r_max": r_max,
        "dims": filt.dims(),
        "hom_dim": filt.hom_dim,
        "derivation_count": ders.len(),
        "derivation_orders": derivation_orders,
    }))
}

/// Formats a scalar for reports.
#[allow(dead_code)]
pub fn scalar_str(s: &gradecalc_core::scalar::Scalar) -> String {
    format_scalar(s)
}
