//! Acceptance gate: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::time::Instant;

use waveortho::scenario::{run_scenario, RunOutput, RunReport, Scenario, ScenarioName};

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(sc: Scenario) -> RunOutput {
    run_scenario(&sc).unwrap_or_else(|e| panic!("{:?} failed to run: {e}", sc.name))
}

fn value(r: &RunReport, name: &str) -> f64 {
    r.value(name).unwrap_or_else(|| panic!("{} report has no metric '{name}'", r.scenario))
}

fn sphere(bc: &str) -> Scenario {
    Scenario::new(ScenarioName::Sphere).with("ka", "5").with("bc", bc).with("basis", "spherical-modes").with("basis_size", "13")
}

fn strip(bc: &str, kd: &str) -> Scenario {
    Scenario::new(ScenarioName::Strip).with("bc", bc).with("kd", kd).with("basis", "plane-waves").with("solver", "diagonal")
}

fn criterion_1() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for bc in ["soft", "hard"] {
        let t = Instant::now();
        let out = run(sphere(bc));
        let secs = t.elapsed().as_secs_f64();
        let err = value(&out.report, "mie_pattern_error");
        pass &= err <= 1e-8 && secs < 5.0;
        detail.push(format!("{bc}: rel L2 {err:.2e} in {secs:.2}s"));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn criterion_2() -> Outcome {
    let out = run(strip("hard", "16pi"));
    let r = &out.report;
    let corr = value(r, "kirchhoff_correlation");
    Outcome {
        pass: corr >= 0.999,
        detail: format!(
            "correlation {corr:.6}, constant factor {:.6}{:+.2e}i",
            value(r, "kirchhoff_factor_re"),
            value(r, "kirchhoff_factor_im")
        ),
    }
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for bc in ["hard", "soft"] {
        let mut errors = Vec::new();
        for kd in ["4pi", "8pi", "16pi"] {
            let t = Instant::now();
            let out = run(strip(bc, kd));
            let secs = t.elapsed().as_secs_f64();
            let r = &out.report;
            let null = value(r, "null_offset");
            let width = value(r, "beamwidth_offset");
            errors.push(value(r, "bem_pattern_error"));
            pass &= null <= 1.0 && width <= 1.0 && secs < 60.0;
            detail.push(format!("{bc} kd={kd}: null {null} steps, width {width:.2} steps, {secs:.1}s"));
        }
        let monotone = errors.windows(2).all(|w| w[1] <= w[0]);
        pass &= monotone;
        let shown: Vec<String> = errors.iter().map(|e| format!("{e:.4}")).collect();
        detail.push(format!("{bc} errors [{}] monotone={monotone}", shown.join(", ")));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn criterion_4() -> Outcome {
    let out = run(Scenario::new(ScenarioName::RiemannDecay).with("ka_values", "10,20,40").with("bc", "hard"));
    let r1 = value(&out.report, "decay_ratio_1");
    let r2 = value(&out.report, "decay_ratio_2");
    let soft = run(Scenario::new(ScenarioName::RiemannDecay).with("bc", "soft"));
    Outcome {
        pass: r1 >= 2.0 && r2 >= 2.0,
        detail: format!(
            "hard sphere z/x pair: ratios {r1:.2}, {r2:.2} (soft, informational: {:.2}, {:.2})",
            value(&soft.report, "decay_ratio_1"),
            value(&soft.report, "decay_ratio_2")
        ),
    }
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    let mut cases: Vec<(String, Scenario)> = vec![("sphere soft".into(), sphere("soft")), ("sphere hard".into(), sphere("hard"))];
    for bc in ["hard", "soft"] {
        for kd in ["4pi", "8pi", "16pi"] {
            cases.push((format!("strip {bc} {kd}"), strip(bc, kd)));
        }
    }
    for (label, sc) in cases {
        let out = run(sc.with("refine_steps", "50"));
        let r = &out.report;
        let increase = value(r, "history_max_increase");
        let step1 = value(r, "step1_diagonal_gap");
        let rho = value(r, "spectral_radius");
        let mut ok = increase <= 1e-12 && step1 == 0.0 && out.tables[1].1.rows() == 50;
        let limit = if rho < 1.0 {
            let gap = value(r, "refine_limit_gap");
            ok &= gap <= 1e-6;
            format!("limit gap {gap:.1e}")
        } else {
            "ρ ≥ 1, damped".to_string()
        };
        pass &= ok;
        detail.push(format!("{label}: ρ={rho:.3}, {limit}{}", if ok { "" } else { " FAIL" }));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn criterion_6() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("spheroid.csv");
    let out = run(Scenario::new(ScenarioName::Spheroid)
        .with("ka", "5")
        .with("aspect", "2")
        .with("basis", "point-sources")
        .with("basis_size", "8")
        .with("out", path.to_str().expect("utf-8 path")));
    let r = &out.report;
    let rd = r.residuals["diagonal"];
    let rg = r.residuals.get("galerkin").copied().unwrap_or(f64::NAN);
    let emitted = dir.path().join("spheroid.report.csv").exists();
    Outcome {
        pass: rd <= 3.0 * rg && rd <= 0.2 && rg <= 0.2 && emitted,
        detail: format!("diagonal {rd:.4}, galerkin {rg:.4}, ratio {:.3}, report emitted={emitted}", rd / rg),
    }
}

fn criterion_7() -> Outcome {
    let mut ratios = Vec::new();
    for size in ["9", "13", "17"] {
        let out = run(Scenario::new(ScenarioName::Sphere)
            .with("ka", "5")
            .with("bc", "hard")
            .with("basis", "plane-waves")
            .with("basis_size", size));
        ratios.push(value(&out.report, "reflection_im_ratio"));
    }
    let pass = ratios.windows(2).all(|w| w[1] <= w[0] || w[1] <= 1e-12);
    let shown: Vec<String> = ratios.iter().map(|x| format!("{x:.2e}")).collect();
    Outcome { pass, detail: format!("max|Im v|/max|v| over grids 9,13,17 polar: [{}]", shown.join(", ")) }
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let shipped = run(Scenario::new(ScenarioName::Born));
    let weak = run(Scenario::new(ScenarioName::Born).with("amplitude", "0.1"));
    let secs = t.elapsed().as_secs_f64();
    let r = &shipped.report;
    let a = value(r, "first_identity");
    let b_mod = value(r, "modified_phase_change");
    let b_std = value(r, "standard_phase_change");
    let c = value(r, "second_term_overlap");
    let w = &weak.report;
    let errors = [value(w, "error_first"), value(w, "error_second_standard"), value(w, "error_second_modified")];
    let pass = a <= 1e-12 && b_mod <= 1e-12 && b_std > 1e-3 && c < 0.0 && errors.iter().all(|e| e.is_finite()) && secs < 60.0;
    Outcome {
        pass,
        detail: format!(
            "(a) {a:.1e} (b) modified {b_mod:.1e} vs standard {b_std:.2} (c) overlap {c:.3} \
             (d) weak errors first {:.2e}, std {:.2e}, mod {:.2e}; {secs:.1}s",
            errors[0], errors[1], errors[2]
        ),
    }
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut files = Vec::new();
    let mut report = None;
    for i in 0..2 {
        let path = dir.path().join(format!("profile{i}.csv"));
        let out = run(Scenario::new(ScenarioName::KernelProfile)
            .with("ka", "10")
            .with("basis_size", "18")
            .with("out", path.to_str().expect("utf-8 path")));
        files.push(std::fs::read(&path).expect("profile written"));
        report = Some(out.report);
    }
    let r = report.expect("ran");
    let peak = value(&r, "peak_distance");
    let herm = value(&r, "hermitian_error");
    let far = value(&r, "far_ratio");
    let identical = files[0] == files[1];
    Outcome {
        pass: peak == 0.0 && herm <= 1e-12 && far <= 0.2 && identical,
        detail: format!("peak at {peak}, hermitian error {herm:.1e}, |Φ| beyond 2λ {far:.3} of peak, byte-identical={identical}"),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("orthogonal-basis exactness", criterion_1),
        ("Kirchhoff coincidence", criterion_2),
        ("strip vs boundary-integral oracle", criterion_3),
        ("Riemann decay", criterion_4),
        ("refinement stability", criterion_5),
        ("spheroid with axial sources", criterion_6),
        ("hard-sphere reflection diagnostic", criterion_7),
        ("Born pipeline", criterion_8),
        ("kernel-profile golden data", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{status}] {name} ({:.1}s): {}", i + 1, t.elapsed().as_secs_f64(), o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
