// Verification harness tests: suite selection, pass bookkeeping, and the
// deterministic JSON/text reports. Counts are kept small here; the acceptance
// run exercises the full instance budgets.
#include <string>

#include "doctest.h"
#include "fractalssm/errors.hpp"
#include "fractalssm/verify.hpp"
#include "json.hpp"

using namespace fractalssm;

TEST_CASE("small verify run passes every suite") {
    const VerifyReport report = run_verify("all", 1, 20, 10, 50);
    CHECK(report.all_passed());
    CHECK(report.ssm.ran);
    CHECK(report.grad.ran);
    CHECK(report.rope.ran);
    CHECK(report.ssm.instances >= 20);  // conv crosschecks ride along
    CHECK(report.grad.instances == 10);
    CHECK(report.rope.instances == 50);
    CHECK(report.ssm.failures == 0);
    CHECK(report.ssm.worst_rel_err < report.ssm.tolerance);
    CHECK(report.grad.worst_rel_err < report.grad.tolerance);
    CHECK(report.rope.worst_rel_err < report.rope.tolerance);
}

TEST_CASE("suite selection runs exactly what was asked") {
    const VerifyReport report = run_verify("grad", 1, 20, 5, 50);
    CHECK_FALSE(report.ssm.ran);
    CHECK(report.grad.ran);
    CHECK_FALSE(report.rope.ran);
    CHECK(report.all_passed());  // suites that did not run do not veto
    CHECK(report.ssm.instances == 0);
    CHECK_THROWS_AS(run_verify("everything", 1), UnknownKind);
}

TEST_CASE("reports are deterministic and machine-readable") {
    const VerifyReport a = run_verify("all", 7, 10, 5, 20);
    const VerifyReport b = run_verify("all", 7, 10, 5, 20);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.to_text() == b.to_text());
    const VerifyReport c = run_verify("all", 8, 10, 5, 20);
    CHECK(a.to_json() != c.to_json());  // seed reaches the instance draws

    const auto doc = nlohmann::json::parse(a.to_json());
    CHECK(doc.at("seed") == 7);
    CHECK(doc.at("passed") == true);
    REQUIRE(doc.at("suites").size() == 3);
    const std::vector<std::string> names{"ssm", "grad", "rope"};
    for (size_t i = 0; i < 3; ++i) {
        const auto& suite = doc.at("suites")[i];
        CHECK(suite.at("name") == names[i]);
        CHECK(suite.at("ran") == true);
        CHECK(suite.at("failures") == 0);
        CHECK(suite.at("passed") == true);
        CHECK(suite.at("worst_rel_err").get<double>() >= 0.0);
        CHECK(suite.at("worst_rel_err").get<double>() < suite.at("tolerance").get<double>());
    }
    const std::string text = a.to_text();
    CHECK(text.find("[PASS] ssm") != std::string::npos);
    CHECK(text.find("[PASS] grad") != std::string::npos);
    CHECK(text.find("[PASS] rope") != std::string::npos);
    CHECK(text.find("[FAIL]") == std::string::npos);
}
