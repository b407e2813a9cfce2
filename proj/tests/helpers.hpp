#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <random>
#include <optional>
#include <string>

#include "hypetc/error.hpp"
#include "hypetc/kernels.hpp"
#include "hypetc/saint_venant.hpp"

namespace testing {

inline constexpr std::array<hypetc::KernelFamily, 4> kFamilies = {
    hypetc::KernelFamily::Controller, hypetc::KernelFamily::Observer,
    hypetc::KernelFamily::InverseController, hypetc::KernelFamily::InverseObserver};

/// Canonical coefficients of the reference canal.
inline hypetc::PlantCoefficients canal_plant() {
    return hypetc::linearize(hypetc::CanalConfig{}).plant;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Max difference of a coarse kernel set against a finer one at the shared nodes.
inline double shared_node_error(const hypetc::KernelSet& coarse, const hypetc::KernelSet& fine) {
    const std::size_t r = (fine.grid.n_x - 1) / (coarse.grid.n_x - 1);
    double e = 0.0;
    for (std::size_t m = 0; m < 4; ++m) {
        for (std::size_t i = 0; i < coarse.grid.n_x; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                e = std::max(e, std::abs(coarse.at(m, i, j) - fine.at(m, i * r, j * r)));
            }
        }
    }
    return e;
}

/// Error code thrown by f, or nullopt when f returns normally.
template <class F>
std::optional<hypetc::ErrorCode> code_of(F&& f) {
    try {
        f();
    } catch (const hypetc::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("hypetc_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing
