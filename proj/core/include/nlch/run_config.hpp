#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlch {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Experiment description parsed from a flat key-section config file.
/// Parsing is strict: unknown sections or keys are rejected, every value is
/// range-checked against the module preconditions.
struct RunConfig {
    // [grid]
    int n = 20;

    // [kernel]
    std::string kernel_kind = "newt2d";  // newt2d | moll | mix | newt3d-reg
    double eta = 1.0;
    double mollifier_a = 0.1;
    double sigma = 0.0;                  // 0: use kappa * min spacing
    double mix_weight = 1.0 / 40.0;

    // [conv]
    double eps = 1e-5;
    double alpha = 4.0;
    std::string partition_mode = "maximal";  // maximal | minimal
    std::string cache_path;                  // optional operator cache

    // [potential]
    std::string potential_kind = "logarithmic";  // logarithmic | regularized | double-well | quadratic
    double theta = 2.0;
    double omega = 1e-3;

    // [initial]
    std::string initial_kind = "wave";  // wave | compact | constant | file
    double initial_a = 0.1;
    double initial_c = -0.5;
    std::string initial_path;

    // [time]
    double t_end = 1.0;
    double abs_tol = 1e-7;
    double rel_tol = 1e-7;
    std::vector<double> output_times;

    // [domain]
    std::string domain_kind = "square";  // square | rectangle | bulged
    double rect[4] = {0.0, 1.0, 0.0, 1.0};
    double bulge_k = 0.0;

    // [outputs]
    std::string out_dir = "out";

    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::string& path);
    void validate() const;
};

}  // namespace nlch
