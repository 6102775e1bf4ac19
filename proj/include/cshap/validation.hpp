#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cshap/synthetic.hpp"

// Axiom, oracle-equivalence and qualitative checks over synthetic data. Each
// returns one verdict with a short measured detail string.
namespace cshap::validation {

enum class Status { Pass, Fail, Skip };

struct CheckResult {
    std::string name;
    Status status = Status::Fail;
    std::string detail;
    double seconds = 0.0;
};

// Hourly series with a piecewise-linear trend, daily and weekly sinusoids and
// optional Gaussian noise; the trend carries most of the variance.
synth::SyntheticSpec hourly_fixture(std::size_t length, std::uint64_t seed, double noise_std,
                                    bool kinks = true);

CheckResult check_efficiency();
CheckResult check_dummy_symmetry();
CheckResult check_oracle_equivalence();
CheckResult check_persistence_closed_form();
CheckResult check_decomposition_identity();
CheckResult check_global_ranking();
CheckResult check_completeness();
CheckResult check_determinism(const std::filesystem::path& scratch);
// Skipped unless a PJMW hourly CSV path is given.
CheckResult check_pjmw_windowing(const std::optional<std::filesystem::path>& csv);

std::vector<CheckResult> run_all(const std::filesystem::path& scratch,
                                 const std::optional<std::filesystem::path>& pjmw_csv);

std::string format(const CheckResult& r);

} // namespace cshap::validation
