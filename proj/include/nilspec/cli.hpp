#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nilspec {

/// One batch experiment. Zero / empty numeric fields select the experiment default.
struct ExperimentConfig {
    std::string experiment;           // spectrum | theta | weyl | zeta | periodise | constants | crosscheck
    std::string model = "torus:1";    // torus:N | heisenberg:N | A*B (product of two of these)
    std::vector<double> lattice;      // generator scales; empty = standard lattice
    double c = 1.0;                   // operator c R^ell
    int ell = 1;
    double lambda_max = 0.0;
    std::vector<double> t_values;
    std::vector<std::string> s_values;
    std::vector<double> epsilons;
    std::vector<double> segment;      // weyl: [a, b]
    int resolution = 8;
    double r_cut = 0.0;
    double kernel_t = 1.0;
    double tolerance = 0.0;
    int grid_points = 12;
    bool residue = false;
    std::string output;               // empty = stdout
};

struct Diagnostic {
    std::string code;  // PARAM_RANGE, AT_POLE, UNSUPPORTED_LATTICE, UNKNOWN_EXPERIMENT, BAD_MODEL, PARSE_ERROR
    std::string message;
};

std::vector<Diagnostic> validate(const ExperimentConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitCertificate = 3;

/// Runs the experiment and writes its CSV or JSON artifact to `out` (or to
/// config.output). Diagnostics and errors go to `err`.
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

inline constexpr int kSchemaVersion = 1;

}  // namespace nilspec
