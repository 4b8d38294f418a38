#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace amil::net {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-7;
};

// Adam with bias-corrected moments.
class AdamState {
public:
    explicit AdamState(std::size_t n_params, AdamConfig config = {});

    void step(std::span<double> params, std::span<const double> grad, double lr);

    std::int64_t steps() const noexcept { return t_; }
    const AdamConfig& config() const noexcept { return config_; }

private:
    AdamConfig config_;
    std::vector<double> m_, v_;
    std::int64_t t_ = 0;
};

} // namespace amil::net
