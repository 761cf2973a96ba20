use std::fmt::Write as _;
use std::time::Duration;

use qdilate::report::VerificationReport;
use serde::Serialize;
use serde_json::Value;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug, Serialize)]
pub struct TaggedCheck {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// The identity the residual measures.
    pub tag: &'static str,
}

#[derive(Debug, Default, Serialize)]
pub struct Timings {
    pub parse_ms: f64,
    pub construct_ms: f64,
    pub verify_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub input_digest: Option<String>,
    pub seed: u64,
    pub tolerance: f64,
    pub passed: bool,
    pub checks: Vec<TaggedCheck>,
    pub timings: Timings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    pub result: Value,
    #[serde(skip)]
    pub summary: Vec<String>,
}

impl RunReport {
    pub fn new(command: Vec<String>, seed: u64, tolerance: f64) -> Self {
        Self {
            command,
            input_digest: None,
            seed,
            tolerance,
            passed: false,
            checks: Vec::new(),
            timings: Timings::default(),
            error: None,
            result: Value::Null,
            summary: Vec::new(),
        }
    }

    pub fn add(&mut self, report: &VerificationReport) {
        for c in &report.checks {
            self.push(c.name.clone(), c.residual, c.tolerance);
        }
    }

    pub fn push(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        let name = name.into();
        self.checks.push(TaggedCheck {
            tag: tag_for(&name),
            passed: residual <= tolerance,
            residual,
            tolerance,
            name,
        });
    }

    pub fn finish(&mut self) {
        self.passed = self.error.is_none() && self.checks.iter().all(|c| c.passed);
    }

    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Some(e) if e.kind == "parse" => EXIT_PARSE,
            Some(_) => EXIT_PRECONDITION,
            None if self.passed => EXIT_PASS,
            None => EXIT_VERIFICATION_FAILED,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "qdilate {}", self.command.join(" "));
        if let Some(d) = &self.input_digest {
            let _ = writeln!(out, "  input sha256 {d}");
        }
        let _ = writeln!(out, "  seed {}  tolerance {:e}", self.seed, self.tolerance);
        if let Some(e) = &self.error {
            let _ = writeln!(out, "  error ({}): {}", e.kind, e.message);
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = writeln!(
                out,
                "  {} {:width$}  residual {:.3e}  tol {:.1e}  [{}]",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance,
                c.tag,
            );
        }
        for line in &self.summary {
            let _ = writeln!(out, "  {line}");
        }
        let _ = writeln!(
            out,
            "{} ({} checks, {:.1} ms)",
            if self.passed { "PASS" } else { "FAIL" },
            self.checks.len(),
            self.timings.total_ms
        );
        out
    }
}

pub fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Formula tag for a check name; prefixes such as `minimal:` and suffixes such
/// as `[label]` are ignored.
pub fn tag_for(name: &str) -> &'static str {
    let base = name.rsplit(':').next().unwrap_or(name);
    let base = base.split('[').next().unwrap_or(base);
    match base {
        "stinespring-reconstruction" => "M(rho) = Tr_A[V rho V^dag]",
        "gram-matches-total-effect" => "V^dag V = Tr_out[R]^T",
        "isometry" => "V^dag V = 1",
        "contraction" => "V^dag V <= 1",
        "ancilla-equals-choi-rank" => "dim A = rank R",
        "check-operator-route" => "V via R^(1/2) = V via reshuffled check operator",
        "dilation-reconstruction" => "Z_i(rho) = Tr_A[V rho V^dag (1 ⊗ Q_i)]",
        "povm-normalization" => "sum_i Q_i = 1",
        "povm-positivity" => "Q_i >= 0",
        "instrument-normalization" => "Tr_out[sum_i Z_i] = 1",
        "t-omega-two-routes" => "T direct sum = T swap formula",
        "feedforward-reconstruction" => "S_w(rho) = B_w(Tr_A[V rho V^dag (1 ⊗ zeta_w)])",
        "teleportation-reconstruction" => "S_w(rho) = B_w(Tr_23[(resource ⊗ rho)(1 ⊗ zeta_w)])",
        "joint-povm-normalization" => "sum_w mu_w zeta_w = support projector ⊗ 1",
        "resource-trace" => "Tr[resource] = 1",
        "resource-positivity" => "resource >= 0",
        "minimal-vs-nonminimal" => "minimal scheme Choi = non-minimal scheme Choi",
        "support-condition" => "(1 - Pi_K) A_w^T = 0",
        "outcome-independence" => "every outcome density equals the channel",
        "resource-is-c(1)/d" => "resource = C(1)/d",
        "resource-is-choi/d" => "resource = choi(C)/d",
        "left-tight-channel-form" => "sum mu A X A^dag = Tr[X K^T] 1",
        "left-tight-tensor-form" => "sum mu A ⊗ A^* = |1>><<K^T|",
        "single-clone-fidelity" => "F = (N(M+d) + M - N) / (M(N+d))",
        "orthogonal-state-fidelity" => "F = (N+1)/(N+2)",
        "grid-oracle" => "design average = Haar grid average",
        "spec-normalization" => "sum_w mu_w A_w xi A_w^dag = 1",
        "probability-sum" => "sum_i Tr[P_i rho] = 1",
        "covariance" => "Z_B ∘ U_g = V_g ∘ Z_(g^-1 B)",
        "eta-resolution" => "(1/|G|) sum_g |eta_g><eta_g| = 1",
        "group-reconstruction" => "S_(pi g)(rho) = V_g Tr[(1 ⊗ |eta_g><eta_g|) V' rho V'^dag] V_g^dag",
        "irrep-blocks" => "B^dag U_g B = ⊕ U_g^mu ⊗ 1",
        "naimark-isometry" => "Y^dag Y = 1",
        "naimark-compression" => "Q'_g = Y^dag E_g Y",
        _ => "named residual",
    }
}
