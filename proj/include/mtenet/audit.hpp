#ifndef MTENET_AUDIT_HPP
#define MTENET_AUDIT_HPP

#include <cstdint>
#include <string>

namespace mtenet::audit {

struct AuditConfig {
  int fd_samples = 1000;
  int fuzz_samples = 100000;
  int prop1_nets = 200;
  std::uint64_t seed = 99;
  // Test hook: offset added to the analytic d_alpha inside the
  // finite-difference suite, to prove the suite catches a wrong formula.
  double perturb_d_alpha = 0.0;
};

struct SuiteResult {
  bool pass = false;
  double worst = 0.0;  // worst deviation; meaning depends on the suite
  std::string detail;  // witnessing sample on failure, summary otherwise
};

// The four checks behind the audit command:
//  - finite_difference: analytic NLL partials vs central differences,
//    deviation |analytic - fd| / max(1, |fd|) <= 1e-5 over random points
//    with nu, beta in [1e-3, 10], alpha in [1.01, 10], residual in [-5, 5];
//  - sign_fuzz: residual^2 above a threshold forces the matching partial
//    positive, zero violations allowed;
//  - cosine_check: the gamma-head gradients of the squared error and the
//    NLL agree to cosine 1 within 1e-6 on random small networks;
//  - shrinkage: |d_gamma| at residual^2 = 1, alpha = 2, beta = 1 is
//    strictly decreasing over nu = 1e-1 ... 1e-8 and below 1e-6 at the end.
struct AuditReport {
  SuiteResult finite_difference;
  SuiteResult sign_fuzz;
  SuiteResult cosine_check;
  SuiteResult shrinkage;
  double fd_seconds = 0.0;
  double fuzz_seconds = 0.0;
  bool pass = false;
};

AuditReport run_audit(const AuditConfig& config);

}  // namespace mtenet::audit

#endif  // MTENET_AUDIT_HPP
