#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "doctest.h"
#include "nilspec/cli.hpp"

using namespace nilspec;
using json = nlohmann::json;

namespace {

bool has_code(const std::vector<Diagnostic>& d, const std::string& code) {
    for (const auto& x : d)
        if (x.code == code) return true;
    return false;
}

ExperimentConfig make(std::string experiment, std::string model = "torus:1") {
    ExperimentConfig c;
    c.experiment = std::move(experiment);
    c.model = std::move(model);
    return c;
}

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_config(const ExperimentConfig& c) {
    std::ostringstream out, err;
    const int code = run(c, out, err);
    return {code, out.str(), err.str()};
}

struct Shell {
    int status;
    std::string out;
};

Shell shell(const std::string& args) {
    const std::string cmd = std::string("\"") + NILSPEC_CLI_PATH + "\" " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    const int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

}  // namespace

TEST_CASE("validation codes") {
    CHECK(validate(make("spectrum")).empty());

    auto neg = make("spectrum");
    neg.lambda_max = -1.0;
    CHECK(has_code(validate(neg), "PARAM_RANGE"));

    auto pole = make("zeta");
    pole.s_values = {"0.5"};
    CHECK(has_code(validate(pole), "AT_POLE"));
    auto hpole = make("zeta", "heisenberg:1");
    hpole.s_values = {"2"};
    CHECK(has_code(validate(hpole), "AT_POLE"));
    hpole.s_values = {"2+0.5i"};
    CHECK(validate(hpole).empty());

    auto lat = make("spectrum", "heisenberg:1");
    lat.lattice = {1.0, 1.0, 1.0};
    CHECK(has_code(validate(lat), "UNSUPPORTED_LATTICE"));
    lat.lattice = {1.0, 1.0, 0.5};
    CHECK(validate(lat).empty());
    auto tlat = make("spectrum", "torus:2");
    tlat.lattice = {1.0, 2.0};
    CHECK(has_code(validate(tlat), "UNSUPPORTED_LATTICE"));

    CHECK(has_code(validate(make("bogus")), "UNKNOWN_EXPERIMENT"));
    CHECK(has_code(validate(make("spectrum", "sphere:2")), "BAD_MODEL"));
    CHECK(has_code(validate(make("spectrum", "torus:0")), "BAD_MODEL"));
    CHECK(has_code(validate(make("spectrum", "torus:1*torus:1*torus:1")), "BAD_MODEL"));

    auto bad_s = make("zeta");
    bad_s.s_values = {"abc"};
    CHECK(has_code(validate(bad_s), "PARSE_ERROR"));

    auto tol = make("theta");
    tol.tolerance = -1e-3;
    CHECK(has_code(validate(tol), "PARAM_RANGE"));
}

TEST_CASE("exit codes") {
    CHECK(run_config(make("bogus")).code == kExitValidation);
    auto neg = make("spectrum");
    neg.lambda_max = -5.0;
    auto r = run_config(neg);
    CHECK(r.code == kExitValidation);
    CHECK(r.err.find("PARAM_RANGE") != std::string::npos);
    CHECK(r.out.empty());

    // A theta tolerance that the tail bound cannot meet at a forced small cutoff.
    auto theta = make("theta");
    theta.lambda_max = 50.0;
    theta.t_values = {0.01};
    theta.tolerance = 1e-12;
    auto c = run_config(theta);
    CHECK(c.code == kExitCertificate);
    CHECK(c.err.find("CERTIFICATE") != std::string::npos);
}

TEST_CASE("spectrum experiment below the first eigenvalue") {
    auto c = make("spectrum");
    c.lambda_max = 1.0;
    auto r = run_config(c);
    CHECK(r.code == kExitOk);
    CHECK(r.out == "lambda,multiplicity,cumulative_count,lambda_exact\n0,1,1,0\n");
}

TEST_CASE("zeta at zero on the circle") {
    auto c = make("zeta");
    c.s_values = {"0"};
    auto r = run_config(c);
    REQUIRE(r.code == kExitOk);
    auto j = json::parse(r.out);
    CHECK(j["schema_version"] == kSchemaVersion);
    const auto& v = j["values"][0]["value"];
    CHECK(std::abs(v["re"].get<double>() + 1.0) < 1e-6);
    CHECK(std::abs(v["im"].get<double>()) < 1e-12);
    CHECK(v["error_estimate"].get<double>() < 1e-6);
}

TEST_CASE("weyl fit on heisenberg(1)") {
    auto c = make("weyl", "heisenberg:1");
    c.lambda_max = 20000.0;
    auto r = run_config(c);
    REQUIRE(r.code == kExitOk);
    auto j = json::parse(r.out);
    const double constant = j["constant"]["value"].get<double>();
    CHECK(std::abs(constant - 0.015625) / 0.015625 < 0.05);
    CHECK(j["reference"]["value"].get<double>() == doctest::Approx(0.015625).epsilon(1e-12));
    CHECK(j["exponent"].get<double>() == 2.0);
    CHECK(j.contains("relative_deviation"));
}

TEST_CASE("every experiment runs and is deterministic") {
    std::vector<ExperimentConfig> configs;
    configs.push_back(make("spectrum", "heisenberg:1"));
    auto theta = make("theta", "heisenberg:1");
    theta.t_values = {0.1, 0.2};
    configs.push_back(theta);
    configs.push_back(make("weyl"));
    auto zeta = make("zeta", "heisenberg:1");
    zeta.residue = true;
    configs.push_back(zeta);
    auto periodise = make("periodise");
    periodise.resolution = 3;
    configs.push_back(periodise);
    auto product = make("spectrum", "heisenberg:1*torus:1");
    product.lambda_max = 60.0;
    configs.push_back(product);
    auto scaled = make("zeta");
    scaled.c = 2.0;
    scaled.ell = 2;
    scaled.s_values = {"1", "0.5+1i"};
    configs.push_back(scaled);
    for (const auto& c : configs) {
        CAPTURE(c.experiment);
        CAPTURE(c.model);
        auto a = run_config(c);
        auto b = run_config(c);
        CHECK(a.code == kExitOk);
        CHECK(!a.out.empty());
        CHECK(a.out == b.out);
    }
}

TEST_CASE("every numeric in json carries an error estimate") {
    auto c = make("zeta", "heisenberg:1");
    c.s_values = {"3", "-0.5"};
    auto j = json::parse(run_config(c).out);
    for (const auto& v : j["values"]) CHECK(v["value"].contains("error_estimate"));
    auto w = json::parse(run_config(make("weyl")).out);
    CHECK(w["constant"].contains("error_estimate"));
}

TEST_CASE("output file") {
    const auto path = std::filesystem::temp_directory_path() / "nilspec_cli_test.csv";
    auto c = make("spectrum");
    c.lambda_max = 1.0;
    c.output = path.string();
    auto r = run_config(c);
    CHECK(r.code == kExitOk);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "lambda,multiplicity,cumulative_count,lambda_exact\n0,1,1,0\n");
    std::filesystem::remove(path);
}

TEST_CASE("binary") {
    auto s = shell("spectrum --model torus:1 --lambda-max 1");
    CHECK(s.status == 0);
    CHECK(s.out == "lambda,multiplicity,cumulative_count,lambda_exact\n0,1,1,0\n");

    auto z = shell("zeta --model torus:1 --s 0");
    CHECK(z.status == 0);
    auto j = json::parse(z.out);
    CHECK(std::abs(j["values"][0]["value"]["re"].get<double>() + 1.0) < 1e-6);

    CHECK(shell("zeta --model heisenberg:1 --s 2").status == 2);
    CHECK(shell("spectrum --model heisenberg:1 --lattice 1,1,1").status == 2);
    CHECK(shell("spectrum --lambda-max -3").status == 2);
    CHECK(shell("frobnicate").status == 2);
    CHECK(shell("spectrum --no-such-flag").status == 2);

    const auto ini = std::filesystem::temp_directory_path() / "nilspec_cli_test.ini";
    {
        std::ofstream f(ini);
        f << "[spectrum]\nmodel = heisenberg:1\nlambda-max = 13\n";
    }
    auto from_file = shell("--config \"" + ini.string() + "\" spectrum");
    CHECK(from_file.status == 0);
    CHECK(from_file.out.find("4*pi^1") != std::string::npos);
    auto overridden = shell("--config \"" + ini.string() + "\" spectrum --lambda-max 1");
    CHECK(overridden.status == 0);
    CHECK(overridden.out == "lambda,multiplicity,cumulative_count,lambda_exact\n0,1,1,0\n");
    std::filesystem::remove(ini);
}
