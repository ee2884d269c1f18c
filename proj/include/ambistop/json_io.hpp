#ifndef AMBISTOP_JSON_IO_HPP
#define AMBISTOP_JSON_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ambistop/core.hpp"

namespace ambistop::io {

using nlohmann::json;

/// A fully parsed problem: which reduction applies, the model parameters and
/// the payoff in the reduced coordinate.
struct ProblemSpec {
    bool radial = false;
    AmbiguityParams params;
    Payoff payoff = Payoff::identity_radial();
};

namespace detail {

inline double require_number(const json& j, const std::string& field) {
    if (!j.contains(field))
        throw SpecError("missing required field \"" + field + "\"");
    const json& v = j.at(field);
    if (!v.is_number())
        throw SpecError("field \"" + field + "\" must be a number");
    return v.get<double>();
}

inline std::string require_string(const json& j, const std::string& field) {
    if (!j.contains(field))
        throw SpecError("missing required field \"" + field + "\"");
    const json& v = j.at(field);
    if (!v.is_string())
        throw SpecError("field \"" + field + "\" must be a string");
    return v.get<std::string>();
}

inline Payoff parse_payoff(const json& j, bool radial) {
    if (!j.contains("payoff") || !j.at("payoff").is_object())
        throw SpecError("missing required object \"payoff\"");
    const json& pj = j.at("payoff");
    std::string kind = require_string(pj, "kind");
    try {
        if (kind == "digital_asymmetric") {
            return Payoff::digital_asymmetric(require_number(pj, "k1"),
                                              require_number(pj, "k2"),
                                              require_number(pj, "k3"));
        }
        if (kind == "even_kink") {
            return Payoff::even_kink(require_number(pj, "k1"));
        }
        if (kind == "periodic_cosine") {
            return Payoff::periodic_cosine();
        }
        if (kind == "straddle") {
            return Payoff::straddle(require_number(pj, "K"));
        }
        if (kind == "identity_radial") {
            return Payoff::identity_radial();
        }
        if (kind == "user_table") {
            if (!pj.contains("samples") || !pj.at("samples").is_array())
                throw SpecError("user_table payoff requires a \"samples\" array");
            std::vector<std::pair<double, double>> table;
            for (const json& row : pj.at("samples")) {
                if (!row.is_array() || row.size() != 2 || !row[0].is_number() ||
                    !row[1].is_number())
                    throw SpecError("\"samples\" entries must be [y, value] pairs");
                table.emplace_back(row[0].get<double>(), row[1].get<double>());
            }
            return Payoff::user_table(std::move(table));
        }
    } catch (const ParameterError& e) {
        throw SpecError(std::string("invalid payoff parameters: ") + e.what());
    }
    throw SpecError("unknown payoff kind \"" + kind + "\"");
}

}  // namespace detail

inline ProblemSpec parse_problem(const json& j) {
    if (!j.is_object()) throw SpecError("problem spec must be a JSON object");
    ProblemSpec ps;
    std::string case_name = detail::require_string(j, "case");
    if (case_name == "linear") {
        ps.radial = false;
    } else if (case_name == "radial") {
        ps.radial = true;
    } else {
        throw SpecError("field \"case\" must be \"linear\" or \"radial\"");
    }
    ps.params.kappa = detail::require_number(j, "kappa");
    ps.params.r = detail::require_number(j, "r");
    if (ps.radial) {
        double d = detail::require_number(j, "dim");
        if (d != std::floor(d)) throw SpecError("field \"dim\" must be an integer");
        ps.params.dim = static_cast<int>(d);
        if (j.contains("a_norm"))
            throw SpecError("field \"a_norm\" is not valid for the radial case");
    } else {
        ps.params.a_norm = detail::require_number(j, "a_norm");
        if (j.contains("dim"))
            throw SpecError("field \"dim\" is not valid for the linear case");
    }
    try {
        if (ps.radial)
            ps.params.validate_radial();
        else
            ps.params.validate_linear();
    } catch (const ParameterError& e) {
        throw SpecError(std::string("invalid parameters: ") + e.what());
    }
    ps.payoff = detail::parse_payoff(j, ps.radial);
    if (ps.payoff.radial_only() && !ps.radial)
        throw SpecError("payoff kind requires the radial case");
    return ps;
}

inline ProblemSpec parse_problem_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError(std::string("invalid JSON: ") + e.what());
    }
    return parse_problem(j);
}

}  // namespace ambistop::io

#endif  // AMBISTOP_JSON_IO_HPP
