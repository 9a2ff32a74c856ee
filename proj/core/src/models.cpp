#include "deam/models.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "deam/error.hpp"

namespace deam {

std::string_view to_string(ModelKind m) {
    switch (m) {
        case ModelKind::cev: return "cev";
        case ModelKind::heston: return "heston";
        case ModelKind::merton: return "merton";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "cev") return ModelKind::cev;
    if (name == "heston") return ModelKind::heston;
    if (name == "merton") return ModelKind::merton;
    throw ConfigError("unknown model '" + std::string(name) + "'");
}

namespace {

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void CevParams::validate() const {
    if (!positive(sigma)) throw ConfigError("CEV sigma must be positive");
    if (!(zeta > 0.0 && zeta < 1.0)) throw ConfigError("CEV zeta must lie in (0, 1)");
}

void HestonParams::validate() const {
    if (!positive(xi)) throw ConfigError("Heston xi must be positive");
    if (!(std::abs(rho) <= 1.0)) throw ConfigError("Heston rho must lie in [-1, 1]");
    if (!positive(gamma)) throw ConfigError("Heston gamma must be positive");
    if (!positive(kappa)) throw ConfigError("Heston kappa must be positive");
    if (!positive(v0)) throw ConfigError("Heston v0 must be positive");
}

void MertonParams::validate() const {
    if (!positive(sigma)) throw ConfigError("Merton sigma must be positive");
    if (!std::isfinite(alpha)) throw ConfigError("Merton alpha must be finite");
    if (!positive(beta)) throw ConfigError("Merton beta must be positive");
    if (!(std::isfinite(lambda) && lambda >= 0.0)) throw ConfigError("Merton lambda must be >= 0");
}

ModelKind kind_of(const ModelParams& p) { return static_cast<ModelKind>(p.index()); }

void validate(const ModelParams& p) {
    std::visit([](const auto& m) { m.validate(); }, p);
}

double local_vol(const CevParams& p, double spot) {
    if (!(spot > 0.0)) throw DomainError("local volatility needs a positive spot");
    return p.sigma * std::pow(spot, p.zeta - 1.0);
}

double merton_jump_mean(const MertonParams& p) {
    return std::expm1(p.alpha + 0.5 * p.beta * p.beta);
}

double merton_drift(const MertonParams& p, double r) {
    return r - 0.5 * p.sigma * p.sigma - p.lambda * merton_jump_mean(p);
}

ModelParams scenario_params(ModelKind model, int index) {
    if (index < 1 || index > 5) {
        throw ConfigError("scenario index " + std::to_string(index) + " is outside 1..5");
    }
    const auto i = static_cast<std::size_t>(index - 1);
    switch (model) {
        case ModelKind::cev: {
            static constexpr double sigma[] = {0.2, 0.275, 0.35, 0.425, 0.5};
            static constexpr double zeta[] = {0.5, 0.6, 0.7, 0.8, 0.9};
            return CevParams{sigma[i], zeta[i]};
        }
        case ModelKind::heston: {
            static constexpr HestonParams rows[] = {
                {0.10, -0.20, 0.07, 0.1, 0.07},
                {0.25, -0.50, 0.10, 0.4, 0.10},
                {0.40, -0.50, 0.15, 0.6, 0.15},
                {0.55, -0.45, 0.20, 1.2, 0.20},
                {0.70, -0.80, 0.30, 1.4, 0.30},
            };
            return rows[i];
        }
        case ModelKind::merton: {
            static constexpr MertonParams rows[] = {
                {0.20, -0.01, 0.01, 1.0},
                {0.15, -0.05, 0.05, 2.0},
                {0.20, -0.10, 0.10, 3.0},
                {0.10, -0.10, 0.20, 5.0},
                {0.10, -0.15, 0.20, 7.0},
            };
            return rows[i];
        }
    }
    throw ConfigError("unknown model");
}

std::vector<Scenario> benchmark_scenarios(ModelKind model) {
    std::vector<Scenario> out;
    for (int i = 1; i <= 5; ++i) out.push_back({model, i, scenario_params(model, i)});
    return out;
}

std::vector<std::string_view> param_names(ModelKind model) {
    switch (model) {
        case ModelKind::cev: return {"sigma", "zeta"};
        case ModelKind::heston: return {"xi", "rho", "gamma", "kappa", "v0"};
        case ModelKind::merton: return {"sigma", "alpha", "beta", "lambda"};
    }
    return {};
}

std::vector<double> to_vector(const ModelParams& p) {
    struct {
        std::vector<double> operator()(const CevParams& m) const { return {m.sigma, m.zeta}; }
        std::vector<double> operator()(const HestonParams& m) const {
            return {m.xi, m.rho, m.gamma, m.kappa, m.v0};
        }
        std::vector<double> operator()(const MertonParams& m) const {
            return {m.sigma, m.alpha, m.beta, m.lambda};
        }
    } flatten;
    return std::visit(flatten, p);
}

ModelParams from_vector(ModelKind model, std::span<const double> x) {
    if (x.size() != param_names(model).size()) {
        throw UsageError("expected " + std::to_string(param_names(model).size()) +
                         " parameters for " + std::string(to_string(model)));
    }
    switch (model) {
        case ModelKind::cev: return CevParams{x[0], x[1]};
        case ModelKind::heston: return HestonParams{x[0], x[1], x[2], x[3], x[4]};
        case ModelKind::merton: return MertonParams{x[0], x[1], x[2], x[3]};
    }
    throw ConfigError("unknown model");
}

namespace {

Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario s;
    s.model = parse_model_kind(j.at("model").get<std::string>());
    s.index = j.value("index", 0);
    const auto& params = j.at("params");
    std::vector<double> x;
    for (auto name : param_names(s.model)) x.push_back(params.at(std::string(name)).get<double>());
    s.params = from_vector(s.model, x);
    validate(s.params);
    return s;
}

}  // namespace

std::vector<Scenario> parse_scenarios(std::string_view json_text) {
    std::vector<Scenario> out;
    try {
        const auto doc = nlohmann::json::parse(json_text);
        const auto& list = doc.is_array() ? doc : doc.at("scenarios");
        for (const auto& entry : list) out.push_back(scenario_from_json(entry));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario file: ") + e.what());
    }
    return out;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenarios(text.str());
}

}  // namespace deam
