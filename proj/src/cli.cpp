#include "nilspec/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "nilspec/constants.hpp"
#include "nilspec/errors.hpp"
#include "nilspec/format.hpp"
#include "nilspec/kernels.hpp"
#include "nilspec/zeta.hpp"

namespace nilspec {

namespace {

using json = nlohmann::ordered_json;

const std::vector<std::string> kExperiments = {"spectrum", "theta",     "weyl",      "zeta",
                                               "periodise", "constants", "crosscheck"};

struct BaseModel {
    std::string family;
    std::size_t n = 0;
};

std::optional<BaseModel> parse_base(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return std::nullopt;
    BaseModel b{text.substr(0, colon), 0};
    if (b.family != "torus" && b.family != "heisenberg") return std::nullopt;
    try {
        std::size_t used = 0;
        const long n = std::stol(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1 || n < 1) return std::nullopt;
        b.n = static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return b;
}

std::vector<std::string> split_product(const std::string& model) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto star = model.find('*', start);
        parts.push_back(model.substr(start, star - start));
        if (star == std::string::npos) break;
        start = star + 1;
    }
    return parts;
}

std::optional<Complex> parse_complex(std::string text) {
    std::erase_if(text, [](char ch) { return ch == ' '; });
    if (text.empty()) return std::nullopt;
    try {
        std::size_t used = 0;
        if (text.back() != 'i') {
            const double re = std::stod(text, &used);
            if (used != text.size()) return std::nullopt;
            return Complex(re, 0.0);
        }
        const std::string body = text.substr(0, text.size() - 1);
        std::size_t split = std::string::npos;
        for (std::size_t k = body.size(); k-- > 1;)
            if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
                split = k;
                break;
            }
        const double re = split == std::string::npos ? 0.0 : std::stod(body.substr(0, split));
        std::string im_text = split == std::string::npos ? body : body.substr(split);
        if (im_text == "+" || im_text == "-" || im_text.empty()) im_text += "1";
        const double im = std::stod(im_text, &used);
        if (used != im_text.size()) return std::nullopt;
        return Complex(re, im);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

// Q / nu of the configured operator, if the model parses.
std::optional<double> model_exponent(const ExperimentConfig& cfg) {
    double Q = 0.0;
    for (const auto& part : split_product(cfg.model)) {
        const auto b = parse_base(part);
        if (!b) return std::nullopt;
        Q += b->family == "torus" ? static_cast<double>(b->n) : 2.0 * static_cast<double>(b->n) + 2.0;
    }
    return Q / (2.0 * cfg.ell);
}

NilmanifoldModel build_base(const BaseModel& b, std::span<const double> lattice) {
    if (b.family == "torus") return torus_model(b.n, lattice.empty() ? 1.0 : lattice.front());
    return heisenberg_model(b.n);
}

NilmanifoldModel build_model(const ExperimentConfig& cfg) {
    const auto parts = split_product(cfg.model);
    NilmanifoldModel m = build_base(*parse_base(parts.front()), parts.size() == 1 ? cfg.lattice : std::vector<double>{});
    for (std::size_t i = 1; i < parts.size(); ++i) m = product_model(m, build_base(*parse_base(parts[i]), {}));
    if (cfg.c != 1.0 || cfg.ell != 1) m = scaled_power_model(m, cfg.c, cfg.ell);
    return m;
}

double default_lambda_max(const std::string& experiment) {
    if (experiment == "spectrum") return 100.0;
    if (experiment == "crosscheck") return 2e7;
    return 1e4;
}

double default_tolerance(const std::string& experiment) {
    if (experiment == "theta") return 1e-10;
    return 1e-6;
}

json number(double value, double error) { return json{{"value", value}, {"error_estimate", error}}; }
json complex_number(Complex v, double error) {
    return json{{"re", v.real()}, {"im", v.imag()}, {"error_estimate", error}};
}
json complex_plain(Complex v) { return json{{"re", v.real()}, {"im", v.imag()}}; }

json header(const ExperimentConfig& cfg, const std::string& model) {
    return json{{"schema_version", kSchemaVersion}, {"experiment", cfg.experiment}, {"model", model}};
}

std::vector<double> geometric_grid(double top, int points) {
    std::vector<double> grid;
    for (int i = points - 1; i >= 0; --i) grid.push_back(std::ldexp(top, -i));
    return grid;
}

struct Outcome {
    std::string artifact;
    bool certified = true;
    std::string failure;
};

Outcome run_spectrum(const NilmanifoldModel& model, double lambda_max) {
    return {spectrum_csv(spectrum_for(model, lambda_max))};
}

Outcome run_theta(const ExperimentConfig& cfg, const NilmanifoldModel& model, double tol) {
    std::vector<double> times = cfg.t_values.empty() ? std::vector<double>{0.05, 0.1, 0.2, 0.5, 1.0, 2.0} : cfg.t_values;
    const double t_min = *std::min_element(times.begin(), times.end());
    double cutoff = cfg.lambda_max > 0.0 ? cfg.lambda_max : theta_cutoff(model, t_min, tol);
    return {theta_csv(spectrum_for(model, cutoff), times, ThetaOptions{0.0, tol})};
}

Outcome run_weyl(const ExperimentConfig& cfg, const NilmanifoldModel& model, double lambda_max) {
    const auto spec = spectrum_for(model, lambda_max);
    const auto grid = geometric_grid(lambda_max, cfg.grid_points);
    const bool segment = cfg.segment.size() == 2;
    const auto fit = segment ? weyl_fit_segment(spec, grid, cfg.segment[0], cfg.segment[1]) : weyl_fit(spec, grid);
    json j = header(cfg, model.describe());
    j["lambda_max"] = lambda_max;
    if (segment) j["segment"] = cfg.segment;
    j["grid"] = grid;
    j["exponent"] = model.exponent();
    j["constant"] = number(fit.constant, fit.drift * fit.constant);
    j["drift"] = fit.drift;
    j["reference"] = number(fit.reference, 0.0);
    j["reference_formula"] = segment ? "vol*p1(0)/Gamma(1+Q/nu)*(b^(Q/nu)-a^(Q/nu))" : "vol*p1(0)/Gamma(1+Q/nu)";
    j["relative_deviation"] = std::abs(fit.constant - fit.reference) / fit.reference;
    json rows = json::array();
    for (double L : grid) {
        const auto n = segment ? semiclassical_count(spec, cfg.segment[0], cfg.segment[1], L) : counting(spec, L);
        rows.push_back({{"lambda", L}, {"count", n}, {"normalised", number(static_cast<double>(n) * std::pow(L, -model.exponent()), 0.0)}});
    }
    j["counts"] = rows;
    return {j.dump(2) + "\n"};
}

Outcome run_zeta(const ExperimentConfig& cfg, const NilmanifoldModel& model, double lambda_max, double tol) {
    const auto spec = spectrum_for(model, std::max(lambda_max, 4000.0));
    json j = header(cfg, model.describe());
    j["pole"] = model.exponent();
    j["cutoff"] = spec.cutoff();
    json values = json::array();
    Outcome outcome;
    for (const auto& text : cfg.s_values.empty() ? std::vector<std::string>{"0", "-1", "-2"} : cfg.s_values) {
        const Complex s = *parse_complex(text);
        const auto m = zeta_mellin(spec, s);
        json v{{"s", complex_plain(s)},
               {"value", complex_number(m.value, m.error_estimate)},
               {"h1", complex_plain(m.h1)},
               {"pole_term", complex_plain(m.pole_term)},
               {"gamma_reciprocal_term", complex_plain(m.gamma_reciprocal_term)},
               {"h2", complex_plain(m.h2)}};
        if (s.real() > model.exponent()) {
            try {
                const auto d = zeta_direct(spec, s, tol);
                v["direct"] = complex_number(d.value, d.tail_bound);
            } catch (const CertificateError&) {
                v["direct"] = nullptr;
            }
        }
        if (m.error_estimate > tol) {
            outcome.certified = false;
            outcome.failure = "zeta(" + text + "): error estimate " + format_double(m.error_estimate) +
                              " exceeds tolerance " + format_double(tol);
        }
        values.push_back(v);
    }
    j["values"] = values;
    if (cfg.residue) {
        const auto r = residue_at_pole(spec);
        j["residue"] = {{"extrapolated", number(r.extrapolated, r.error_estimate)},
                        {"closed_form", number(r.closed_form, 0.0)},
                        {"closed_form_formula", "vol*p1(0)/Gamma(Q/nu)"}};
    }
    outcome.artifact = j.dump(2) + "\n";
    return outcome;
}

Outcome run_periodise(const ExperimentConfig& cfg, const NilmanifoldModel& model) {
    const auto& lat = model.lattice;
    const bool torus = model.kind == OperatorKind::torus_laplacian;
    const auto kernel = torus ? gaussian_kernel(model.rank, cfg.kernel_t) : heisenberg_test_kernel(model.rank);
    const double r_cut = cfg.r_cut > 0.0 ? cfg.r_cut : (torus ? 12.0 : 4.0);
    const auto grid = fundamental_domain_grid(lat, cfg.resolution);
    const std::vector<double> eps = cfg.epsilons.empty() ? std::vector<double>{0.4, 0.2, 0.1} : cfg.epsilons;
    return {periodisation_csv(kernel, lat, grid, eps, r_cut)};
}

json report_json(const ConstantReport& r) {
    json routes = json::array();
    for (const auto& route : r.routes)
        routes.push_back({{"label", route.label}, {"value", route.value}, {"error_estimate", route.error_estimate}});
    return json{{"name", r.name}, {"tolerance", r.tolerance}, {"agree", r.agree}, {"routes", routes}};
}

Outcome run_constants(const ExperimentConfig& cfg) {
    const auto summary = constants_report();
    json j = header(cfg, cfg.model);
    json reports = json::array();
    Outcome outcome;
    for (const auto& r : summary.reports) {
        reports.push_back(report_json(r));
        if (!r.agree) {
            outcome.certified = false;
            outcome.failure = "routes disagree for " + r.name;
        }
    }
    j["reports"] = reports;
    const double consistent = c0_heisenberg_limit(1, PrefactorMode::consistent);
    const double stated = c0_heisenberg_limit(1, PrefactorMode::stated);
    j["heisenberg_prefactor_discrepancy"] = {
        {"n", 1},
        {"c0_consistent_prefactor", number(consistent, 1e-15 * consistent)},
        {"c0_stated_prefactor", number(stated, 1e-15 * stated)},
        {"c0_heat_trace", number(summary.heisenberg_c0_from_heat_trace.value,
                                 summary.heisenberg_c0_from_heat_trace.error_estimate)},
        {"ratio", number(summary.heisenberg_prefactor_ratio, 1e-13 * summary.heisenberg_prefactor_ratio)},
        {"ratio_closed_form", "(2*pi)^(2n)"},
    };
    outcome.artifact = j.dump(2) + "\n";
    return outcome;
}

Outcome run_crosscheck(const ExperimentConfig& cfg, const NilmanifoldModel& model, double lambda_max, double tol) {
    const auto spec = spectrum_for(model, lambda_max);
    const auto circle = torus_eigenvalues(1, lambda_max);
    json j = header(cfg, model.describe());
    j["cutoff"] = lambda_max;
    json values = json::array();
    Outcome outcome;
    for (const auto& text : cfg.s_values.empty() ? std::vector<std::string>{"2", "3"} : cfg.s_values) {
        const Complex s = *parse_complex(text);
        const auto cc = torus_cross_check(spec, s);
        const auto z1 = zeta_direct(spec, s, 1.0);
        const auto z2 = zeta_direct(circle, s, 1.0);
        const auto Z = product_zeta_Z(spec, circle, s);
        const auto combined = zeta_direct(product_spectrum(spec, circle, lambda_max), s, 1.0);
        const Complex sum = z1.value + z2.value + Z.value;
        const double product_err = z1.tail_bound + z2.tail_bound + Z.tail_bound + combined.tail_bound;
        json v{{"s", complex_plain(s)},
               {"lhs", complex_plain(cc.lhs)},
               {"torus_term", complex_plain(cc.torus_term)},
               {"middle_term", complex_plain(cc.middle_term)},
               {"h", complex_plain(cc.h)},
               {"residual", number(cc.residual, cc.error_estimate)},
               {"residual_displayed_form", number(cc.residual_displayed_form, cc.error_estimate)},
               {"product_identity",
                {{"zeta_1", complex_number(z1.value, z1.tail_bound)},
                 {"zeta_2", complex_number(z2.value, z2.tail_bound)},
                 {"Z", complex_number(Z.value, Z.tail_bound)},
                 {"combined", complex_number(combined.value, combined.tail_bound)},
                 {"residual", number(std::abs(sum - combined.value), product_err)}}}};
        if (cc.residual > tol) {
            outcome.certified = false;
            outcome.failure = "crosscheck(" + text + "): residual " + format_double(cc.residual) +
                              " exceeds tolerance " + format_double(tol);
        }
        values.push_back(v);
    }
    j["values"] = values;
    outcome.artifact = j.dump(2) + "\n";
    return outcome;
}

}  // namespace

std::vector<Diagnostic> validate(const ExperimentConfig& cfg) {
    std::vector<Diagnostic> out;
    auto add = [&out](std::string code, std::string message) { out.push_back({std::move(code), std::move(message)}); };

    if (std::find(kExperiments.begin(), kExperiments.end(), cfg.experiment) == kExperiments.end())
        add("UNKNOWN_EXPERIMENT", "unknown experiment '" + cfg.experiment + "'");

    const auto parts = split_product(cfg.model);
    bool model_ok = parts.size() <= 2;
    for (const auto& part : parts) {
        const auto b = parse_base(part);
        if (!b) {
            model_ok = false;
            continue;
        }
        if ((b->family == "torus" && b->n > 8) || (b->family == "heisenberg" && b->n > 4))
            add("PARAM_RANGE", "model rank out of the supported range: " + part);
    }
    if (!model_ok) add("BAD_MODEL", "model must be torus:N, heisenberg:N or a product A*B of two of these");

    if (model_ok && !cfg.lattice.empty()) {
        const auto b = parse_base(parts.front());
        if (parts.size() > 1) {
            add("UNSUPPORTED_LATTICE", "lattice scales are only supported for a single factor");
        } else if (b->family == "heisenberg") {
            std::vector<double> canonical(2 * b->n + 1, 1.0);
            canonical.back() = 0.5;
            if (cfg.lattice != canonical)
                add("UNSUPPORTED_LATTICE", "heisenberg lattices other than Z^n x Z^n x (1/2)Z are not supported");
        } else {
            bool uniform = cfg.lattice.size() == b->n;
            for (double k : cfg.lattice) uniform = uniform && k == cfg.lattice.front();
            if (!uniform) add("UNSUPPORTED_LATTICE", "torus lattices must be uniform rescalings k Z^n");
            else if (!(cfg.lattice.front() > 0.0)) add("PARAM_RANGE", "lattice scale must be positive");
        }
    }

    if (cfg.lambda_max < 0.0) add("PARAM_RANGE", "cutoff must be positive");
    if (cfg.tolerance < 0.0) add("PARAM_RANGE", "tolerance must be positive");
    if (!(cfg.c > 0.0)) add("PARAM_RANGE", "c must be positive");
    if (cfg.ell < 1) add("PARAM_RANGE", "ell must be >= 1");
    if (cfg.resolution < 1) add("PARAM_RANGE", "resolution must be >= 1");
    if (cfg.r_cut < 0.0) add("PARAM_RANGE", "r-cut must be positive");
    if (!(cfg.kernel_t > 0.0)) add("PARAM_RANGE", "kernel-t must be positive");
    if (cfg.grid_points < 2) add("PARAM_RANGE", "grid-points must be >= 2");
    for (double t : cfg.t_values)
        if (!(t > 0.0)) add("PARAM_RANGE", "t values must be positive");
    for (double e : cfg.epsilons)
        if (!(e > 0.0)) add("PARAM_RANGE", "epsilon values must be positive");
    if (!cfg.segment.empty() && (cfg.segment.size() != 2 || !(cfg.segment[0] >= 0.0) || !(cfg.segment[1] > cfg.segment[0])))
        add("PARAM_RANGE", "segment must be a,b with 0 <= a < b");

    const auto exponent = model_ok ? model_exponent(cfg) : std::nullopt;
    for (const auto& text : cfg.s_values) {
        const auto s = parse_complex(text);
        if (!s) {
            add("PARSE_ERROR", "cannot parse s value '" + text + "'");
            continue;
        }
        if (!exponent) continue;
        const double pole = exponent.value();
        if (std::abs(*s - pole) < 1e-6) add("AT_POLE", "s = " + text + " is the pole Q/nu = " + format_double(pole));
        if (cfg.experiment == "crosscheck" && !(s->real() > pole + 0.5))
            add("PARAM_RANGE", "crosscheck needs Re s > Q/nu + 1/2 = " + format_double(pole + 0.5));
    }
    if (cfg.experiment == "periodise" && model_ok && (parts.size() > 1 || cfg.c != 1.0 || cfg.ell != 1))
        add("PARAM_RANGE", "periodise supports torus:N and heisenberg:N kernels only");
    if (cfg.experiment == "crosscheck" && model_ok && cfg.ell != 1)
        add("PARAM_RANGE", "crosscheck needs an operator of degree 2 (ell = 1)");
    return out;
}

int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto diagnostics = validate(cfg);
    if (!diagnostics.empty()) {
        for (const auto& d : diagnostics) err << d.code << ": " << d.message << "\n";
        return kExitValidation;
    }
    const double lambda_max = cfg.lambda_max > 0.0 ? cfg.lambda_max : default_lambda_max(cfg.experiment);
    const double tol = cfg.tolerance > 0.0 ? cfg.tolerance : default_tolerance(cfg.experiment);
    Outcome outcome;
    try {
        if (cfg.experiment == "constants") {
            outcome = run_constants(cfg);
        } else {
            const auto model = build_model(cfg);
            if (cfg.experiment == "spectrum") outcome = run_spectrum(model, lambda_max);
            else if (cfg.experiment == "theta") outcome = run_theta(cfg, model, tol);
            else if (cfg.experiment == "weyl") outcome = run_weyl(cfg, model, lambda_max);
            else if (cfg.experiment == "zeta") outcome = run_zeta(cfg, model, lambda_max, tol);
            else if (cfg.experiment == "periodise") outcome = run_periodise(cfg, model);
            else outcome = run_crosscheck(cfg, model, lambda_max, tol);
        }
    } catch (const CertificateError& e) {
        err << "CERTIFICATE: " << e.what() << "\n";
        return kExitCertificate;
    } catch (const CompletenessError& e) {
        err << "CERTIFICATE: " << e.what() << "\n";
        return kExitCertificate;
    } catch (const PoleError& e) {
        err << "AT_POLE: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        err << "PARAM_RANGE: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& e) {
        err << "PARAM_RANGE: " << e.what() << "\n";
        return kExitValidation;
    }

    if (cfg.output.empty()) {
        out << outcome.artifact;
    } else {
        std::ofstream file(cfg.output, std::ios::binary);
        if (!file) {
            err << "PARAM_RANGE: cannot open output file " << cfg.output << "\n";
            return kExitValidation;
        }
        file << outcome.artifact;
    }
    if (!outcome.certified) {
        err << "CERTIFICATE: " << outcome.failure << "\n";
        return kExitCertificate;
    }
    return kExitOk;
}

}  // namespace nilspec
