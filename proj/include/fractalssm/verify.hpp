// Randomized self-verification suites, shared by the `verify` CLI subcommand
// and the acceptance harness:
//
//   ssm  - BDPP against the unrolled per-node oracle on a mix of CSR-built
//          graphs (clipped Hilbert orders over small rectangles) and random
//          skip sets, plus recurrence-vs-convolution crosschecks.
//   grad - hand-derived adjoints against central finite differences on
//          positively conditioned instances (all adjoints are sums of
//          positive terms, so the FD quotient is well conditioned).
//   rope - rotation norm preservation and relative-shift invariance.
//
// Every instance derives its own seed from (master seed, suite tag, index),
// so a failure report pinpoints a reproducible instance seed. Reports are
// deterministic in (suites, seed, counts); no timestamps or environment data.
#pragma once

#include <cstdint>
#include <string>

namespace fractalssm {

struct VerifySuiteResult {
    std::string name;
    bool ran = false;
    int instances = 0;
    int failures = 0;
    double tolerance = 0.0;
    double worst_rel_err = 0.0;
    std::uint64_t worst_seed = 0;  // instance seed behind worst_rel_err

    bool passed() const { return !ran || failures == 0; }
};

struct VerifyReport {
    std::uint64_t seed = 0;
    VerifySuiteResult ssm, grad, rope;

    bool all_passed() const { return ssm.passed() && grad.passed() && rope.passed(); }
    std::string to_json() const;  // deterministic, stable key order
    std::string to_text() const;  // one [PASS]/[FAIL] line per suite that ran
};

// suites: "ssm", "grad", "rope" or "all". Throws UnknownKind otherwise.
VerifyReport run_verify(const std::string& suites, std::uint64_t seed, int ssm_instances = 200,
                        int grad_instances = 100, int rope_instances = 1000);

}  // namespace fractalssm
