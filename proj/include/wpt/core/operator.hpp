#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wpt/core/sym_matrix.hpp"
#include "wpt/core/weights.hpp"

namespace wpt {

enum class Sign { minus, plus };

inline Sign flip(Sign s) noexcept { return s == Sign::plus ? Sign::minus : Sign::plus; }
inline char sign_char(Sign s) noexcept { return s == Sign::plus ? '+' : '-'; }

namespace op {

/// sum a_i lambda_i
struct Weighted {
    Weights w;
    friend bool operator==(const Weighted&, const Weighted&) = default;
};
/// Lambda Tr(X+) - lambda Tr(X-)
struct PucciPlus {
    double lambda;
    double Lambda;
    friend bool operator==(const PucciPlus&, const PucciPlus&) = default;
};
/// lambda Tr(X+) - Lambda Tr(X-)
struct PucciMinus {
    double lambda;
    double Lambda;
    friend bool operator==(const PucciMinus&, const PucciMinus&) = default;
};
/// P_k^-: sum of the k smallest eigenvalues; P_k^+: the k largest.
struct PartialTrace {
    int k;
    Sign sign;
    friend bool operator==(const PartialTrace&, const PartialTrace&) = default;
};
/// a1 lambda_1 + an lambda_n
struct MinMax {
    double a1;
    double an;
    friend bool operator==(const MinMax&, const MinMax&) = default;
};

}  // namespace op

/// Which second-order operator to apply, with its parameters.
class OperatorSpec {
public:
    using Kind = std::variant<op::Weighted, op::PucciPlus, op::PucciMinus, op::PartialTrace, op::MinMax>;

    static OperatorSpec weighted(Weights w) { return OperatorSpec(op::Weighted{std::move(w)}); }
    static OperatorSpec pucci_plus(double lambda, double Lambda) {
        check_pucci(lambda, Lambda);
        return OperatorSpec(op::PucciPlus{lambda, Lambda});
    }
    static OperatorSpec pucci_minus(double lambda, double Lambda) {
        check_pucci(lambda, Lambda);
        return OperatorSpec(op::PucciMinus{lambda, Lambda});
    }
    static OperatorSpec partial_trace(int k, Sign sign) {
        if (k < 1) throw std::invalid_argument("partial_trace: k must be >= 1");
        return OperatorSpec(op::PartialTrace{k, sign});
    }
    static OperatorSpec minmax(double a1 = 1.0, double an = 1.0) {
        if (!(a1 >= 0.0) || !(an >= 0.0) || !std::isfinite(a1) || !std::isfinite(an) || a1 + an <= 0.0)
            throw std::invalid_argument("minmax: weights must be non-negative and not both zero");
        return OperatorSpec(op::MinMax{a1, an});
    }

    const Kind& kind() const noexcept { return kind_; }

    template <class T>
    const T* get_if() const noexcept { return std::get_if<T>(&kind_); }

    /// Equivalent weight vector in dimension n; empty for Pucci operators,
    /// which are not of weighted partial-trace form.
    std::optional<Weights> as_weights(int n) const {
        return std::visit(
            [n](const auto& k) -> std::optional<Weights> {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, op::Weighted>) {
                    if (k.w.n() != n) throw std::invalid_argument("operator: dimension mismatch");
                    return k.w;
                } else if constexpr (std::is_same_v<T, op::MinMax>) {
                    return Weights::minmax(n, k.a1, k.an);
                } else if constexpr (std::is_same_v<T, op::PartialTrace>) {
                    if (k.k > n) throw std::invalid_argument("partial_trace: k exceeds dimension");
                    std::vector<double> a(static_cast<std::size_t>(n), 0.0);
                    for (int i = 0; i < k.k; ++i)
                        a[static_cast<std::size_t>(k.sign == Sign::minus ? i : n - 1 - i)] = 1.0;
                    return Weights(std::move(a));
                } else {
                    return std::nullopt;
                }
            },
            kind_);
    }

    /// |a| for weighted forms, n Lambda for Pucci: the Lipschitz constant of
    /// the operator with respect to the trace of a positive increment.
    double scale(int n) const {
        if (const auto* p = get_if<op::PucciPlus>()) return n * p->Lambda;
        if (const auto* p = get_if<op::PucciMinus>()) return n * p->Lambda;
        return as_weights(n)->total();
    }

    std::string to_string() const {
        return std::visit(
            [](const auto& k) -> std::string {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, op::Weighted>) return "weighted" + k.w.to_string();
                else if constexpr (std::is_same_v<T, op::PucciPlus>)
                    return "pucci_plus(" + fmt17(k.lambda) + ", " + fmt17(k.Lambda) + ")";
                else if constexpr (std::is_same_v<T, op::PucciMinus>)
                    return "pucci_minus(" + fmt17(k.lambda) + ", " + fmt17(k.Lambda) + ")";
                else if constexpr (std::is_same_v<T, op::PartialTrace>)
                    return std::string("partial_trace(") + std::to_string(k.k) + ", " + sign_char(k.sign) + ")";
                else return "minmax(" + fmt17(k.a1) + ", " + fmt17(k.an) + ")";
            },
            kind_);
    }

    friend bool operator==(const OperatorSpec&, const OperatorSpec&) = default;

private:
    explicit OperatorSpec(Kind k) : kind_(std::move(k)) {}
    static void check_pucci(double lambda, double Lambda) {
        if (!(lambda > 0.0) || !(lambda <= Lambda) || !std::isfinite(Lambda))
            throw std::invalid_argument("pucci: requires 0 < lambda <= Lambda");
    }

    Kind kind_;
};

/// sum a_i lambda_i over ascending eigenvalues.
inline double weighted_sum(const Weights& w, const SmallVector& lambda) {
    if (w.n() != lambda.size()) throw std::invalid_argument("operator: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < w.n(); ++i) s += w[i] * lambda[i];
    return s;
}

/// Evaluates the operator from an already computed ascending eigenvalue list.
inline double eval_sorted(const OperatorSpec& spec, const SmallVector& lambda) {
    const int n = lambda.size();
    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, op::Weighted>) {
                return weighted_sum(k.w, lambda);
            } else if constexpr (std::is_same_v<T, op::MinMax>) {
                return k.a1 * lambda[0] + k.an * lambda[n - 1];
            } else if constexpr (std::is_same_v<T, op::PartialTrace>) {
                if (k.k > n) throw std::invalid_argument("partial_trace: k exceeds dimension");
                double s = 0.0;
                for (int i = 0; i < k.k; ++i) s += lambda[k.sign == Sign::minus ? i : n - 1 - i];
                return s;
            } else {
                double pos = 0.0, neg = 0.0;  // Tr(X+), Tr(X-)
                for (double l : lambda) (l > 0.0 ? pos : neg) += std::abs(l);
                if constexpr (std::is_same_v<T, op::PucciPlus>) return k.Lambda * pos - k.lambda * neg;
                else return k.lambda * pos - k.Lambda * neg;
            }
        },
        spec.kind());
}

inline double eval(const OperatorSpec& spec, const SymMatrix& x) {
    if (const auto* w = spec.get_if<op::Weighted>(); w && w->w.n() != x.dim())
        throw std::invalid_argument("operator: dimension mismatch (weights n=" + std::to_string(w->w.n()) +
                                    ", matrix n=" + std::to_string(x.dim()) + ")");
    return eval_sorted(spec, eigenvalues(x));
}

/// F~(X) = -F(-X).
inline OperatorSpec dual(const OperatorSpec& spec) {
    return std::visit(
        [](const auto& k) -> OperatorSpec {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, op::Weighted>) return OperatorSpec::weighted(k.w.reversed());
            else if constexpr (std::is_same_v<T, op::PucciPlus>) return OperatorSpec::pucci_minus(k.lambda, k.Lambda);
            else if constexpr (std::is_same_v<T, op::PucciMinus>) return OperatorSpec::pucci_plus(k.lambda, k.Lambda);
            else if constexpr (std::is_same_v<T, op::PartialTrace>) return OperatorSpec::partial_trace(k.k, flip(k.sign));
            else return OperatorSpec::minmax(k.an, k.a1);
        },
        spec.kind());
}

}  // namespace wpt
