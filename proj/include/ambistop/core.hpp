#ifndef AMBISTOP_CORE_HPP
#define AMBISTOP_CORE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ambistop {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BracketFailure : SolverError {
    using SolverError::SolverError;
};
struct NoConvergence : SolverError {
    using SolverError::SolverError;
};
struct NotUnimodal : SolverError {
    using SolverError::SolverError;
};
struct NotEven : SolverError {
    using SolverError::SolverError;
};
struct SymmetryViolation : SolverError {
    using SolverError::SolverError;
};
struct UnboundedRatio : SolverError {
    using SolverError::SolverError;
};
struct NoStationaryLaw : SolverError {
    using SolverError::SolverError;
};
struct InnerMaxNotUnique : SolverError {
    using SolverError::SolverError;
};
struct ConfigError : SolverError {
    using SolverError::SolverError;
};

// Problem-spec (JSON) validation failure; maps to CLI exit code 2.
struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Problem parameters
// ---------------------------------------------------------------------------

/// Ambiguity radius, discount rate and factor structure.
/// `a_norm` is used by the linear-factor case, `dim` by the radial case;
/// the unused member keeps its default.
struct AmbiguityParams {
    double kappa = 0.0;   ///< drift-ambiguity radius, >= 0 (0 = no ambiguity)
    double r = 0.0;       ///< discount rate, > 0
    double a_norm = 1.0;  ///< Euclidean norm of the weight vector
    int dim = 2;          ///< state dimension d >= 2

    void validate_common() const {
        if (!(kappa >= 0.0)) throw ParameterError("kappa must be >= 0");
        if (!(r > 0.0)) throw ParameterError("r must be > 0");
    }
    void validate_linear() const {
        validate_common();
        if (!(a_norm > 0.0)) throw ParameterError("a_norm must be > 0");
    }
    void validate_radial() const {
        validate_common();
        if (dim < 2) throw ParameterError("dim must be >= 2");
    }
};

// ---------------------------------------------------------------------------
// Payoff catalog
// ---------------------------------------------------------------------------

enum class PayoffKind {
    DigitalAsymmetric,  ///< (k2*y + k3)*1{y>=0} - k1*y*1{y<0}
    EvenKink,           ///< k1*|y|
    PeriodicCosine,     ///< cos(y)
    Straddle,           ///< |sqrt(y) - K|, y >= 0
    IdentityRadial,     ///< y, y >= 0
    UserTable,          ///< piecewise-linear interpolation of samples
};

class Payoff {
public:
    static Payoff digital_asymmetric(double k1, double k2, double k3) {
        if (k1 < 0 || k2 < 0 || k3 < 0)
            throw ParameterError("digital payoff coefficients must be >= 0");
        Payoff p(PayoffKind::DigitalAsymmetric);
        p.k1_ = k1;
        p.k2_ = k2;
        p.k3_ = k3;
        return p;
    }
    static Payoff even_kink(double k1) {
        if (k1 < 0) throw ParameterError("even kink slope must be >= 0");
        Payoff p(PayoffKind::EvenKink);
        p.k1_ = k1;
        return p;
    }
    static Payoff periodic_cosine() { return Payoff(PayoffKind::PeriodicCosine); }
    static Payoff straddle(double strike) {
        if (!(strike > 0)) throw ParameterError("straddle strike must be > 0");
        Payoff p(PayoffKind::Straddle);
        p.strike_ = strike;
        return p;
    }
    static Payoff identity_radial() { return Payoff(PayoffKind::IdentityRadial); }
    static Payoff user_table(std::vector<std::pair<double, double>> samples) {
        if (samples.size() < 2)
            throw ParameterError("user table needs at least 2 samples");
        for (std::size_t i = 1; i < samples.size(); ++i)
            if (!(samples[i - 1].first < samples[i].first))
                throw ParameterError("user table abscissae must be strictly increasing");
        Payoff p(PayoffKind::UserTable);
        p.table_ = std::move(samples);
        return p;
    }

    PayoffKind kind() const { return kind_; }
    double k1() const { return k1_; }
    double k2() const { return k2_; }
    double k3() const { return k3_; }
    double strike() const { return strike_; }
    const std::vector<std::pair<double, double>>& table() const { return table_; }

    /// True for payoffs defined only on the radial coordinate y = |x|^2 >= 0.
    bool radial_only() const {
        return kind_ == PayoffKind::Straddle || kind_ == PayoffKind::IdentityRadial;
    }

    double operator()(double y) const {
        switch (kind_) {
            case PayoffKind::DigitalAsymmetric:
                // right-continuous at the jump: y = 0 pays k3
                return y >= 0.0 ? k2_ * y + k3_ : -k1_ * y;
            case PayoffKind::EvenKink:
                return k1_ * std::abs(y);
            case PayoffKind::PeriodicCosine:
                return std::cos(y);
            case PayoffKind::Straddle:
                if (y < 0) throw std::domain_error("straddle payoff needs y >= 0");
                return std::abs(std::sqrt(y) - strike_);
            case PayoffKind::IdentityRadial:
                if (y < 0) throw std::domain_error("radial payoff needs y >= 0");
                return y;
            case PayoffKind::UserTable: {
                if (y <= table_.front().first) return table_.front().second;
                if (y >= table_.back().first) return table_.back().second;
                auto it = std::upper_bound(
                    table_.begin(), table_.end(), y,
                    [](double v, const std::pair<double, double>& s) { return v < s.first; });
                auto lo = *(it - 1);
                auto hi = *it;
                double t = (y - lo.first) / (hi.first - lo.first);
                return lo.second + t * (hi.second - lo.second);
            }
        }
        throw ParameterError("unknown payoff kind");
    }

private:
    explicit Payoff(PayoffKind k) : kind_(k) {}

    PayoffKind kind_;
    double k1_ = 0.0, k2_ = 0.0, k3_ = 0.0;
    double strike_ = 0.0;
    std::vector<std::pair<double, double>> table_;
};

inline double evaluate_payoff(const Payoff& p, double y) { return p(y); }

// ---------------------------------------------------------------------------
// Solution vocabulary
// ---------------------------------------------------------------------------

enum class Regime {
    SymmetricTwoSided,
    PeriodicMultiBoundary,
    DigitalSmoothFit,
    DigitalKinkAtZero,
    GenericRepresentation,
    SingleUpperBoundary,
    TwoBoundary,
};

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::SymmetricTwoSided: return "SymmetricTwoSided";
        case Regime::PeriodicMultiBoundary: return "PeriodicMultiBoundary";
        case Regime::DigitalSmoothFit: return "DigitalSmoothFit";
        case Regime::DigitalKinkAtZero: return "DigitalKinkAtZero";
        case Regime::GenericRepresentation: return "GenericRepresentation";
        case Regime::SingleUpperBoundary: return "SingleUpperBoundary";
        case Regime::TwoBoundary: return "TwoBoundary";
    }
    return "?";
}

/// Worst-case drift direction as a function of the current reduced state.
/// The magnitude is always exactly kappa.
struct GeneratorDescriptor {
    enum class Kind { SignSwitchLinear, SignSwitchRadial, PeriodicSwitch };
    Kind kind = Kind::SignSwitchLinear;
    double kappa = 0.0;
    double c = 0.0;                      ///< reference point (sign-switch kinds)
    double period = 0.0;                 ///< PeriodicSwitch only
    std::vector<double> switch_points;   ///< PeriodicSwitch: sign flips at these (mod period)
};

struct Solution {
    Regime regime = Regime::GenericRepresentation;
    double c_star = 0.0;  ///< may be +/-inf
    std::vector<double> thresholds;
    double lambda_star = 0.0;
    std::function<double(double)> value;
    GeneratorDescriptor generator;
};

}  // namespace ambistop

#endif  // AMBISTOP_CORE_HPP
