//! Plain-text report emitters.
//!
//! JSON is assembled by hand rather than through a serializer for one
//! reason: every floating-point value in a report must carry 17 significant
//! digits, so that a consumer parsing an emitted file recovers the binary
//! value exactly and a re-emitted report is byte-identical. `{:.16e}` pins
//! the digit count; a serializer's shortest-round-trip notation does not.
//! The layouts below are the documented output schemas — treat any change
//! as a breaking one.

use std::fmt::Write as _;

use stokes_squeeze::measurement::{CountMoments, ErrorMethod};
use stokes_squeeze::{
    ConeDescriptor, EstimatorResult, NonclassicalityVerdict, SqueezingReport, StokesMoments,
};

/// A float as a JSON number with 17 significant digits,
/// e.g. `-1.0355339059327376e0`.
pub fn float(x: f64) -> String {
    debug_assert!(x.is_finite(), "reports never contain non-finite numbers");
    format!("{x:.16e}")
}

/// `null` or a 17-digit float.
pub fn opt_float(x: Option<f64>) -> String {
    match x {
        Some(v) => float(v),
        None => "null".to_owned(),
    }
}

/// A JSON string literal with the mandatory escapes applied.
pub fn string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// A three-vector as a JSON array of floats.
pub fn triple(v: [f64; 3]) -> String {
    format!("[{}, {}, {}]", float(v[0]), float(v[1]), float(v[2]))
}

fn direction_object(theta: f64, phi: f64) -> String {
    format!("{{\"theta\": {}, \"phi\": {}}}", float(theta), float(phi))
}

/// Inputs for the `analyze` report.
pub struct AnalyzeReport<'a> {
    pub cutoff: usize,
    pub leakage: f64,
    pub second_moment_safe: bool,
    pub theta0: f64,
    pub phi0: f64,
    pub moments: &'a StokesMoments,
    pub variances: [f64; 3],
    /// Normalized mean Stokes direction; `None` when ⟨S⟩ vanishes.
    pub poincare_mean: Option<[f64; 3]>,
    /// |⟨S⟩|/⟨S₀⟩; `None` for the vacuum.
    pub degree_of_polarization: Option<f64>,
    /// `None` when the polarization mode is empty (Q undefined).
    pub mandel_q: Option<f64>,
    pub polarized_residual: f64,
}

pub fn analyze_json(r: &AnalyzeReport) -> String {
    format!(
        concat!(
            "{{\n",
            "  \"schema\": 1,\n",
            "  \"cutoff\": {cutoff},\n",
            "  \"leakage\": {leakage},\n",
            "  \"second_moment_safe\": {safe},\n",
            "  \"polarization\": {{\"theta0\": {theta0}, \"phi0\": {phi0}}},\n",
            "  \"stokes\": {{\n",
            "    \"s0\": {s0},\n",
            "    \"mean\": {mean},\n",
            "    \"second_moments\": {second},\n",
            "    \"anticommutators\": {anti},\n",
            "    \"variances\": {variances}\n",
            "  }},\n",
            "  \"poincare_mean\": {poincare},\n",
            "  \"degree_of_polarization\": {dop},\n",
            "  \"mandel_q\": {mandel_q},\n",
            "  \"polarized_residual\": {residual}\n",
            "}}\n",
        ),
        cutoff = r.cutoff,
        leakage = float(r.leakage),
        safe = r.second_moment_safe,
        theta0 = float(r.theta0),
        phi0 = float(r.phi0),
        s0 = float(r.moments.s0),
        mean = triple(r.moments.s),
        second = triple(r.moments.s2),
        anti = triple(r.moments.anti),
        variances = triple(r.variances),
        poincare = match r.poincare_mean {
            Some(m) => triple(m),
            None => "null".to_owned(),
        },
        dop = opt_float(r.degree_of_polarization),
        mandel_q = opt_float(r.mandel_q),
        residual = float(r.polarized_residual),
    )
}

pub fn cone_json(cone: &ConeDescriptor) -> String {
    format!(
        concat!(
            "{{\n",
            "  \"schema\": 1,\n",
            "  \"mandel_q\": {q},\n",
            "  \"exists\": {exists},\n",
            "  \"semi_vertical_angle\": {angle}\n",
            "}}\n",
        ),
        q = float(cone.q),
        exists = cone.exists,
        angle = opt_float(cone.semi_vertical_angle),
    )
}

/// Fixed column set of the scan table; rows are θ-major.
pub const SCAN_CSV_HEADER: &str = "theta,phi,cos_big_phi,mean,variance,transverse_bound,f,squeezed";

pub fn scan_csv(reports: &[SqueezingReport]) -> String {
    let mut out = String::with_capacity(64 + reports.len() * 170);
    out.push_str(SCAN_CSV_HEADER);
    out.push('\n');
    for rep in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            float(rep.theta),
            float(rep.phi),
            float(rep.cos_big_phi),
            float(rep.mean),
            float(rep.variance),
            float(rep.transverse_bound),
            float(rep.f),
            u8::from(rep.flags.prakash_shukla),
        );
    }
    out
}

pub fn scan_json(theta_steps: usize, phi_steps: usize, reports: &[SqueezingReport]) -> String {
    let mut out = String::with_capacity(128 + reports.len() * 340);
    let _ = write!(
        out,
        concat!(
            "{{\n",
            "  \"schema\": 1,\n",
            "  \"grid\": {{\"theta_steps\": {}, \"phi_steps\": {}}},\n",
            "  \"reports\": [\n",
        ),
        theta_steps, phi_steps,
    );
    for (i, rep) in reports.iter().enumerate() {
        let sep = if i + 1 == reports.len() { "" } else { "," };
        let _ = writeln!(
            out,
            "    {{\"theta\": {}, \"phi\": {}, \"cos_big_phi\": {}, \"mean\": {}, \
             \"variance\": {}, \"transverse_bound\": {}, \"f\": {}, \"squeezed\": {}, \
             \"criteria\": {{\"chirkin\": {}, \"heersink\": {}, \"luis\": {}, \
             \"prakash_shukla\": {}}}}}{}",
            float(rep.theta),
            float(rep.phi),
            float(rep.cos_big_phi),
            float(rep.mean),
            float(rep.variance),
            float(rep.transverse_bound),
            float(rep.f),
            rep.flags.prakash_shukla,
            rep.flags.chirkin,
            rep.flags.heersink,
            rep.flags.luis,
            rep.flags.prakash_shukla,
            sep,
        );
    }
    out.push_str("  ]\n}\n");
    out
}

fn count_moments_object(m: &CountMoments) -> String {
    format!(
        "{{\"mean1\": {}, \"mean2\": {}, \"second1\": {}, \"second2\": {}, \"cross\": {}}}",
        float(m.mean1),
        float(m.mean2),
        float(m.second1),
        float(m.second2),
        float(m.cross),
    )
}

fn method_name(method: ErrorMethod) -> &'static str {
    match method {
        ErrorMethod::DeltaMethod => "delta-method",
        ErrorMethod::Bootstrap => "bootstrap",
    }
}

/// The estimator report for `simulate`; `counts_csv` names the companion
/// file holding the raw per-shot counts.
pub fn simulate_json(
    est: &EstimatorResult,
    theta: f64,
    phi: f64,
    seed: u64,
    counts_csv: &str,
) -> String {
    format!(
        concat!(
            "{{\n",
            "  \"schema\": 1,\n",
            "  \"direction\": {direction},\n",
            "  \"shots\": {shots},\n",
            "  \"seed\": {seed},\n",
            "  \"estimate\": {{\"value\": {value}, \"std_error\": {se}, \"method\": {method}}},\n",
            "  \"moments\": {moments},\n",
            "  \"moment_std_errors\": {errors},\n",
            "  \"counts_csv\": {csv}\n",
            "}}\n",
        ),
        direction = direction_object(theta, phi),
        shots = est.shots,
        seed = seed,
        value = float(est.value),
        se = float(est.std_error),
        method = string(method_name(est.method)),
        moments = count_moments_object(&est.moments),
        errors = count_moments_object(&est.moment_std_errors),
        csv = string(counts_csv),
    )
}

/// Sidecar metadata that makes a counts CSV reproducible on its own.
pub fn counts_meta_json(seed: u64, shots: u64, theta: f64, phi: f64, counts_csv: &str) -> String {
    format!(
        concat!(
            "{{\n",
            "  \"schema\": 1,\n",
            "  \"seed\": {seed},\n",
            "  \"shots\": {shots},\n",
            "  \"direction\": {direction},\n",
            "  \"counts_csv\": {csv}\n",
            "}}\n",
        ),
        seed = seed,
        shots = shots,
        direction = direction_object(theta, phi),
        csv = string(counts_csv),
    )
}

/// Inputs for the `witness` report. The classical lower bounds are only
/// defined for coherent-mixture inputs; they are `None` (emitted as `null`)
/// when the input was a general state spec.
pub struct WitnessReport<'a> {
    pub input: &'a str,
    pub theta_steps: usize,
    pub phi_steps: usize,
    pub verdict: &'a NonclassicalityVerdict,
    /// (value, θ, φ) of the grid minimum of the witness bound.
    pub witness_min: Option<(f64, f64, f64)>,
    /// (value, θ, φ) of the grid minimum of the count-moment bound.
    pub count_moment_min: Option<(f64, f64, f64)>,
}

pub fn witness_json(r: &WitnessReport) -> String {
    let bound = |b: Option<(f64, f64, f64)>| match b {
        Some((value, theta, phi)) => format!(
            "{{\"min_value\": {}, \"theta\": {}, \"phi\": {}}}",
            float(value),
            float(theta),
            float(phi),
        ),
        None => "null".to_owned(),
    };
    format!(
        concat!(
            "{{\n",
            "  \"schema\": 1,\n",
            "  \"input\": {input},\n",
            "  \"grid\": {{\"theta_steps\": {rows}, \"phi_steps\": {cols}}},\n",
            "  \"nonclassical\": {nonclassical},\n",
            "  \"min_f\": {min_f},\n",
            "  \"direction\": {direction},\n",
            "  \"witness\": {witness},\n",
            "  \"count_moment\": {count}\n",
            "}}\n",
        ),
        input = string(r.input),
        rows = r.theta_steps,
        cols = r.phi_steps,
        nonclassical = r.verdict.nonclassical,
        min_f = float(r.verdict.min_f),
        direction = match r.verdict.direction {
            Some((theta, phi)) => direction_object(theta, phi),
            None => "null".to_owned(),
        },
        witness = bound(r.witness_min),
        count = bound(r.count_moment_min),
    )
}
