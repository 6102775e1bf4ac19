#include "cshap/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

#include "cshap/error.hpp"
#include "cshap/random.hpp"

namespace cshap::synth {

void SyntheticSpec::validate() const {
    if (length == 0) throw Error(ErrorCode::InvalidArgument, "synthetic length must be positive");
    for (std::size_t k = 0; k < trend.kinks.size(); ++k) {
        if (trend.kinks[k].index >= length) {
            throw Error(ErrorCode::InvalidArgument, "kink index outside the series");
        }
        if (k > 0 && trend.kinks[k].index <= trend.kinks[k - 1].index) {
            throw Error(ErrorCode::InvalidArgument, "kink indices must be strictly increasing");
        }
    }
    for (const auto& s : seasonal) {
        if (!(s.period >= 2.0)) {
            throw Error(ErrorCode::InvalidArgument, "seasonal period must be at least 2");
        }
    }
    if (!(noise_std >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise std must be nonnegative");
}

const std::vector<double>& SyntheticSeries::component(const std::string& name) const {
    for (const auto& [n, values] : components) {
        if (n == name) return values;
    }
    throw Error(ErrorCode::InvalidArgument, "no planted component '" + name + "'");
}

std::vector<double> planted_trend(const TrendPlant& trend, std::size_t first, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto i = static_cast<double>(first + k);
        double v = trend.base + trend.slope * i;
        for (const auto& kink : trend.kinks) {
            v += kink.slope_delta * std::max(0.0, i - static_cast<double>(kink.index));
        }
        out[k] = v;
    }
    return out;
}

std::vector<double> planted_seasonal(const SeasonalPlant& plant, std::size_t first,
                                     std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto i = static_cast<double>(first + k);
        out[k] = plant.amplitude * std::sin(2.0 * std::numbers::pi * i / plant.period + plant.phase);
    }
    return out;
}

SyntheticSeries generate(const SyntheticSpec& spec) {
    spec.validate();
    std::vector<std::pair<std::string, std::vector<double>>> parts;
    parts.emplace_back("trend", planted_trend(spec.trend, 0, spec.length));
    for (const auto& s : spec.seasonal) parts.emplace_back(s.name, planted_seasonal(s, 0, spec.length));

    std::vector<double> noise(spec.length, 0.0);
    if (spec.noise_std > 0.0) {
        random::Engine rng(spec.seed);
        for (auto& v : noise) v = spec.noise_std * random::standard_normal(rng);
    }
    parts.emplace_back("noise", std::move(noise));

    std::vector<double> values(spec.length, 0.0);
    for (const auto& [name, comp] : parts) {
        for (std::size_t i = 0; i < spec.length; ++i) values[i] += comp[i];
    }
    return SyntheticSeries{series::TimeSeries(spec.start, spec.step_minutes, std::move(values)),
                           std::move(parts)};
}

PermutationResult permutation_shapley(const decomp::Decomposition& input,
                                      const models::ModelHandle& model,
                                      const shap::BackgroundSet& background, bool exhaustive,
                                      std::size_t samples, std::uint64_t seed) {
    const auto m = input.size();
    if (m == 0) throw Error(ErrorCode::InvalidArgument, "at least one concept required");
    if (exhaustive && m > kMaxExhaustiveConcepts) {
        throw Error(ErrorCode::TooManyConcepts,
                    "exhaustive permutation enumeration limited to " +
                        std::to_string(kMaxExhaustiveConcepts) + " concepts");
    }
    if (!exhaustive && samples < 2) {
        throw Error(ErrorCode::InvalidArgument, "sampled permutations need at least 2 orderings");
    }

    std::map<std::uint32_t, double> memo;
    const auto value = [&](std::uint32_t bits) {
        auto it = memo.find(bits);
        if (it != memo.end()) return it->second;
        const double v =
            shap::mask_and_predict(input, shap::Coalition(bits), background, model, Execution::Serial);
        memo.emplace(bits, v);
        return v;
    };

    std::vector<double> sum(m, 0.0), sum_sq(m, 0.0);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t visited = 0;

    const auto walk = [&](const std::vector<std::size_t>& ord) {
        std::uint32_t bits = 0;
        double previous = value(bits);
        for (auto c : ord) {
            bits |= std::uint32_t{1} << c;
            const double current = value(bits);
            const double marginal = current - previous;
            sum[c] += marginal;
            sum_sq[c] += marginal * marginal;
            previous = current;
        }
        ++visited;
    };

    if (exhaustive) {
        do {
            walk(order);
        } while (std::next_permutation(order.begin(), order.end()));
    } else {
        random::Engine rng(seed);
        for (std::size_t s = 0; s < samples; ++s) {
            for (std::size_t i = m; i > 1; --i) {
                const auto j = static_cast<std::size_t>(random::uniform_index(rng, i));
                std::swap(order[i - 1], order[j]);
            }
            walk(order);
        }
    }

    PermutationResult out;
    out.orderings = visited;
    const auto n = static_cast<double>(visited);
    for (std::size_t c = 0; c < m; ++c) {
        const double mean = sum[c] / n;
        out.phi.push_back(mean);
        if (exhaustive) {
            out.standard_error.push_back(0.0);
        } else {
            const double var = std::max(0.0, (sum_sq[c] - n * mean * mean) / (n - 1.0));
            out.standard_error.push_back(std::sqrt(var / n));
        }
    }
    return out;
}

std::vector<double> dense_ls_oracle(const linalg::Matrix& x, std::span<const double> targets,
                                    std::span<const double> penalty) {
    const auto n = x.rows();
    const auto p = x.cols();
    if (targets.size() != n || penalty.size() != p) {
        throw Error(ErrorCode::LengthMismatch, "oracle inputs have inconsistent shapes");
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + p),
                                              static_cast<Eigen::Index>(p));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + p));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < p; ++c) {
            a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = x(r, c);
        }
        b(static_cast<Eigen::Index>(r)) = targets[r];
    }
    for (std::size_t c = 0; c < p; ++c) {
        if (penalty[c] < 0.0) throw Error(ErrorCode::InvalidArgument, "negative penalty");
        a(static_cast<Eigen::Index>(n + c), static_cast<Eigen::Index>(c)) = std::sqrt(penalty[c]);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < static_cast<Eigen::Index>(p)) {
        throw Error(ErrorCode::SingularSystem, "oracle system is rank deficient");
    }
    const Eigen::VectorXd beta = qr.solve(b);
    return {beta.data(), beta.data() + beta.size()};
}

double r_squared(std::span<const double> truth, std::span<const double> fit) {
    if (truth.size() != fit.size() || truth.empty()) {
        throw Error(ErrorCode::LengthMismatch, "r_squared: series differ in length");
    }
    const double mean =
        std::accumulate(truth.begin(), truth.end(), 0.0) / static_cast<double>(truth.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ss_res += (truth[i] - fit[i]) * (truth[i] - fit[i]);
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
    }
    if (!(ss_tot > 0.0)) {
        throw Error(ErrorCode::DegenerateVariance, "r_squared: truth has zero variance");
    }
    return 1.0 - ss_res / ss_tot;
}

} // namespace cshap::synth
