#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library paths it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gepcc/expr.hpp"
#include "gepcc/karva.hpp"

namespace oracle {

/// Neumaier compensated sum in long double.
class Sum {
public:
    void add(long double x) {
        const long double t = s_ + x;
        if (std::fabs(s_) >= std::fabs(x)) c_ += (s_ - t) + x;
        else c_ += (x - t) + s_;
        s_ = t;
    }
    long double value() const { return s_ + c_; }

private:
    long double s_ = 0.0L;
    long double c_ = 0.0L;
};

inline long double mean(std::span<const double> v) {
    Sum s;
    for (double x : v) s.add(x);
    return s.value() / static_cast<long double>(v.size());
}

struct Stats {
    double r, r2, rmse, mae, k, k_prime, ro2, ro2_prime, rm;
};

/// Every fit statistic straight from its definition.
inline Stats stats(std::span<const double> h, std::span<const double> t) {
    const std::size_t n = h.size();
    const long double hm = mean(h), tm = mean(t);
    Sum cov, shh, stt, sq, ab, ht, h2, t2;
    for (std::size_t i = 0; i < n; ++i) {
        const long double dh = h[i] - hm, dt = t[i] - tm;
        cov.add(dh * dt);
        shh.add(dh * dh);
        stt.add(dt * dt);
        const long double d = static_cast<long double>(h[i]) - t[i];
        sq.add(d * d);
        ab.add(std::fabs(d));
        ht.add(static_cast<long double>(h[i]) * t[i]);
        h2.add(static_cast<long double>(h[i]) * h[i]);
        t2.add(static_cast<long double>(t[i]) * t[i]);
    }
    Stats s{};
    const long double r = cov.value() / std::sqrt(shh.value() * stt.value());
    s.r = static_cast<double>(r);
    s.r2 = static_cast<double>(r * r);
    s.rmse = static_cast<double>(std::sqrt(sq.value() / n));
    s.mae = static_cast<double>(ab.value() / n);
    const long double k = ht.value() / h2.value();
    const long double kp = ht.value() / t2.value();
    s.k = static_cast<double>(k);
    s.k_prime = static_cast<double>(kp);
    Sum ro_num, rop_num;
    for (std::size_t i = 0; i < n; ++i) {
        const long double ho = k * t[i];  // h°_i = k t_i
        ro_num.add((t[i] - ho) * (t[i] - ho));
        const long double to = kp * h[i];  // t°_i = k' h_i
        rop_num.add((h[i] - to) * (h[i] - to));
    }
    const long double ro2 = 1.0L - ro_num.value() / stt.value();
    s.ro2 = static_cast<double>(ro2);
    s.ro2_prime = static_cast<double>(1.0L - rop_num.value() / shh.value());
    s.rm = static_cast<double>(r * r * (1.0L - std::sqrt(std::fabs(r * r - ro2))));
    return s;
}

/// Least squares with intercept via normal equations and Gaussian
/// elimination with partial pivoting, in long double. Full rank only.
inline std::vector<double> ols(const std::vector<std::vector<double>>& x, std::span<const double> y) {
    const std::size_t n = y.size();
    const std::size_t p = x.size() + 1;
    auto col = [&](std::size_t j, std::size_t i) -> long double { return j == 0 ? 1.0L : x[j - 1][i]; };
    std::vector<std::vector<long double>> a(p, std::vector<long double>(p + 1, 0.0L));
    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = 0; c < p; ++c) {
            Sum s;
            for (std::size_t i = 0; i < n; ++i) s.add(col(r, i) * col(c, i));
            a[r][c] = s.value();
        }
        Sum s;
        for (std::size_t i = 0; i < n; ++i) s.add(col(r, i) * y[i]);
        a[r][p] = s.value();
    }
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r) {
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        }
        std::swap(a[c], a[piv]);
        if (a[c][c] == 0.0L) throw std::runtime_error("oracle ols: singular");
        for (std::size_t r = 0; r < p; ++r) {
            if (r == c) continue;
            const long double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= p; ++k) a[r][k] -= f * a[c][k];
        }
    }
    std::vector<double> beta(p);
    for (std::size_t c = 0; c < p; ++c) beta[c] = static_cast<double>(a[c][p] / a[c][c]);
    return beta;
}

/// Breadth-first Karva decode with an explicit queue of pending slots.
/// Produces the tree directly from the symbol list, without precomputed child
/// offsets.
inline gepcc::expr::Node karva_decode(const gepcc::karva::Gene& gene, const gepcc::karva::GeneLayout& layout) {
    using gepcc::expr::Node;
    using gepcc::karva::Symbol;
    struct Slot {
        Node* node;
    };
    std::size_t read = 0;
    std::size_t next_dc = 0;
    auto make = [&](const Symbol& s) {
        switch (s.kind) {
            case Symbol::Kind::Variable: return Node::make_variable(s.index);
            case Symbol::Kind::Constant: return Node::make_constant(gene.constants[gene.dc[next_dc++]]);
            case Symbol::Kind::Function: break;
        }
        const auto f = layout.functions[s.index];
        return Node::make_function(f, std::vector<Node>(static_cast<std::size_t>(gepcc::expr::arity(f))));
    };
    Node root = make(gene.symbols[read++]);
    std::deque<Node*> pending{&root};
    while (!pending.empty()) {
        Node* n = pending.front();
        pending.pop_front();
        for (auto& child : n->children) {
            child = make(gene.symbols[read++]);
        }
        for (auto& child : n->children) {
            if (child.is_function()) pending.push_back(&child);
        }
    }
    return root;
}

/// Random expression tree over all parser functions.
inline gepcc::expr::Node random_tree(std::mt19937_64& rng, std::size_t n_vars, std::size_t max_depth) {
    using gepcc::expr::Function;
    using gepcc::expr::Node;
    std::uniform_int_distribution<int> coin(0, 2);
    if (max_depth <= 1 || coin(rng) == 0) {
        if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
            return Node::make_variable(std::uniform_int_distribution<std::size_t>(0, n_vars - 1)(rng));
        }
        return Node::make_constant(std::uniform_real_distribution<double>(-10.0, 10.0)(rng));
    }
    static constexpr Function kAll[] = {Function::Add, Function::Sub, Function::Mul, Function::Div, Function::Exp,
                                        Function::Ln,  Function::Inv, Function::Log10, Function::Neg};
    const Function f = kAll[std::uniform_int_distribution<std::size_t>(0, 8)(rng)];
    std::vector<Node> kids;
    for (int i = 0; i < gepcc::expr::arity(f); ++i) kids.push_back(random_tree(rng, n_vars, max_depth - 1));
    return Node::make_function(f, std::move(kids));
}

inline bool close_rel(double a, double b, double rel) {
    if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
    if (a == b) return true;
    return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace oracle
