#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace deam {

enum class ModelKind { cev, heston, merton };

std::string_view to_string(ModelKind m);
/// Accepts "cev", "heston" or "merton" (case-sensitive).
ModelKind parse_model_kind(std::string_view name);

/// dS = r S dt + sigma S^zeta dW
struct CevParams {
    double sigma = 0.2;
    double zeta = 0.5;
    void validate() const;
};

/// dS = r S dt + sqrt(v) S dW1,  dv = kappa (gamma - v) dt + xi sqrt(v) dW2,  d<W1,W2> = rho dt
struct HestonParams {
    double xi = 0.1;
    double rho = -0.2;
    double gamma = 0.07;
    double kappa = 0.1;
    double v0 = 0.07;
    void validate() const;
};

/// Log-normal jumps: log(1 + J) ~ N(alpha, beta^2), arriving at rate lambda.
struct MertonParams {
    double sigma = 0.2;
    double alpha = -0.01;
    double beta = 0.01;
    double lambda = 1.0;
    void validate() const;
};

using ModelParams = std::variant<CevParams, HestonParams, MertonParams>;

ModelKind kind_of(const ModelParams& p);
void validate(const ModelParams& p);

/// sigma * S^(zeta - 1)
double local_vol(const CevParams& p, double spot);

/// Expected relative jump size e^{alpha + beta^2/2} - 1.
double merton_jump_mean(const MertonParams& p);

/// Risk-neutral drift of log S: r - sigma^2/2 - lambda * (e^{alpha + beta^2/2} - 1).
double merton_drift(const MertonParams& p, double r);

struct Scenario {
    ModelKind model = ModelKind::cev;
    int index = 1;
    ModelParams params;

    std::string label() const { return "p" + std::to_string(index); }
};

/// Benchmark parameter set p1..p5 of the given model.
ModelParams scenario_params(ModelKind model, int index);
std::vector<Scenario> benchmark_scenarios(ModelKind model);

/// Reads scenarios from JSON, either a top-level array or {"scenarios": [...]}.
/// Each entry is {"model": "heston", "index": 2, "params": {"xi": 0.25, ...}}.
std::vector<Scenario> load_scenarios(const std::string& path);
std::vector<Scenario> parse_scenarios(std::string_view json_text);

/// Flat parameter vectors, in the order given by param_names.
std::vector<std::string_view> param_names(ModelKind model);
std::vector<double> to_vector(const ModelParams& p);
ModelParams from_vector(ModelKind model, std::span<const double> x);

}  // namespace deam
