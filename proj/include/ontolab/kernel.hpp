#pragma once

#include <span>
#include <string>
#include <vector>

#include "ontolab/joint.hpp"
#include "ontolab/rng.hpp"

namespace ontolab {

// A table P(targets | givens): one normalized row per given-assignment.
// Rows are indexed mixed-radix over the givens (last fastest), entries
// mixed-radix over the targets.
template <class Num>
struct ConditionalKernel {
    std::vector<std::string> targets;
    std::vector<std::string> givens;
    std::vector<std::size_t> target_sizes;
    std::vector<std::size_t> given_sizes;
    std::vector<std::vector<Num>> rows;

    std::size_t row_count() const {
        std::size_t n = 1;
        for (auto s : given_sizes) n *= s;
        return n;
    }

    std::size_t row_width() const {
        std::size_t n = 1;
        for (auto s : target_sizes) n *= s;
        return n;
    }

    static ConditionalKernel from_rows(std::vector<std::string> targets, std::vector<std::string> givens,
                                       std::vector<std::size_t> target_sizes,
                                       std::vector<std::size_t> given_sizes,
                                       std::vector<std::vector<Num>> rows) {
        ConditionalKernel k{std::move(targets), std::move(givens), std::move(target_sizes),
                            std::move(given_sizes), std::move(rows)};
        if (k.targets.size() != k.target_sizes.size() || k.givens.size() != k.given_sizes.size())
            throw ShapeMismatch("kernel variable/size lists disagree");
        if (k.rows.size() != k.row_count()) throw ShapeMismatch("kernel row count does not match givens");
        for (const auto& row : k.rows) {
            if (row.size() != k.row_width()) throw ShapeMismatch("kernel row width does not match targets");
            Num sum(0);
            for (const auto& v : row) {
                if (v < Num(0)) throw NegativeEntry("negative kernel entry");
                sum += v;
            }
            if constexpr (numeric_traits<Num>::is_exact) {
                if (sum != Num(1)) throw NotNormalized("kernel row sums to " + format_number(sum));
            } else {
                if (!(num_abs(sum - Num(1)) <= Num(kFloatNormTolerance)))
                    throw NotNormalized("kernel row sums to " + format_number(sum));
            }
        }
        return k;
    }
};

// P(target) as a degenerate kernel with no givens.
template <class Num>
ConditionalKernel<Num> distribution_kernel(std::string name, std::vector<Num> probs) {
    std::size_t n = probs.size();
    return ConditionalKernel<Num>::from_rows({std::move(name)}, {}, {n}, {}, {std::move(probs)});
}

// Deterministic kernel target := f(givens); `map` lists the chosen target
// symbol for each given-assignment in row order.
template <class Num>
ConditionalKernel<Num> deterministic_kernel(std::string target, std::size_t target_size,
                                            std::vector<std::string> givens,
                                            std::vector<std::size_t> given_sizes,
                                            std::span<const std::size_t> map) {
    std::size_t nrows = 1;
    for (auto s : given_sizes) nrows *= s;
    if (map.size() != nrows) throw ShapeMismatch("response table does not cover every given-assignment");
    std::vector<std::vector<Num>> rows(nrows, std::vector<Num>(target_size, Num(0)));
    for (std::size_t r = 0; r < nrows; ++r) {
        if (map[r] >= target_size) throw ShapeMismatch("response symbol out of range");
        rows[r][map[r]] = Num(1);
    }
    return ConditionalKernel<Num>::from_rows({std::move(target)}, std::move(givens), {target_size},
                                             std::move(given_sizes), std::move(rows));
}

// Every row an independent draw from the flat density on the simplex.
// Deterministic given (scenario shape, targets, givens, seed).
template <class Num>
ConditionalKernel<Num> random_kernel(const Scenario& sc, std::vector<std::string> targets,
                                     std::vector<std::string> givens, std::uint64_t seed) {
    std::vector<std::size_t> tsizes, gsizes;
    for (const auto& t : targets) tsizes.push_back(sc.variable(sc.index_of(t)).alphabet_size);
    for (const auto& g : givens) gsizes.push_back(sc.variable(sc.index_of(g)).alphabet_size);
    std::size_t nrows = 1, width = 1;
    for (auto s : gsizes) nrows *= s;
    for (auto s : tsizes) width *= s;
    Rng rng(seed);
    std::vector<std::vector<Num>> rows;
    rows.reserve(nrows);
    for (std::size_t r = 0; r < nrows; ++r) rows.push_back(sample_simplex<Num>(rng, width));
    return ConditionalKernel<Num>::from_rows(std::move(targets), std::move(givens), std::move(tsizes),
                                             std::move(gsizes), std::move(rows));
}

// Joint = product of the factor rows over each full assignment. The factor
// list must be a topologically ordered factorization: every scenario
// variable is a target exactly once and each factor's givens are targets of
// earlier factors.
template <class Num>
JointTable<Num> compose_product(const Scenario& sc, std::span<const ConditionalKernel<Num>> factors) {
    std::vector<int> target_count(sc.size(), 0);
    std::vector<bool> available(sc.size(), false);

    // validate shape and ordering
    for (const auto& f : factors) {
        for (std::size_t i = 0; i < f.givens.size(); ++i) {
            std::size_t gi = sc.index_of(f.givens[i]);
            if (sc.variable(gi).alphabet_size != f.given_sizes[i])
                throw ShapeMismatch("kernel given '" + f.givens[i] + "' has wrong alphabet size");
            if (!available[gi])
                throw CyclicFactorization("given '" + f.givens[i] +
                                          "' is not a target of an earlier factor");
        }
        for (std::size_t i = 0; i < f.targets.size(); ++i) {
            std::size_t ti = sc.index_of(f.targets[i]);
            if (sc.variable(ti).alphabet_size != f.target_sizes[i])
                throw ShapeMismatch("kernel target '" + f.targets[i] + "' has wrong alphabet size");
            if (++target_count[ti] > 1) throw DuplicateTarget("variable '" + f.targets[i] + "' produced twice");
        }
        for (const auto& t : f.targets) available[sc.index_of(t)] = true;
    }
    for (std::size_t i = 0; i < sc.size(); ++i)
        if (target_count[i] == 0)
            throw MissingVariable("variable '" + sc.variable(i).name + "' is not produced by any factor");

    // progressive product over the growing variable prefix
    std::vector<std::size_t> built;                 // scenario indices in addition order
    std::vector<Num> partial{Num(1)};               // mixed radix over `built`, last fastest
    auto position_of = [&](std::size_t scenario_index) {
        for (std::size_t p = 0; p < built.size(); ++p)
            if (built[p] == scenario_index) return p;
        throw CyclicFactorization("internal: given not built yet");
    };

    for (const auto& f : factors) {
        std::vector<std::size_t> given_pos;
        given_pos.reserve(f.givens.size());
        for (const auto& g : f.givens) given_pos.push_back(position_of(sc.index_of(g)));

        // strides of `built` in the current partial table
        std::vector<std::size_t> strides(built.size(), 1);
        for (std::size_t i = built.size(); i-- > 1;)
            strides[i - 1] = strides[i] * sc.variable(built[i]).alphabet_size;

        std::size_t width = f.row_width();
        std::vector<Num> next(partial.size() * width, Num(0));
        for (std::size_t old_idx = 0; old_idx < partial.size(); ++old_idx) {
            std::size_t row_idx = 0;
            for (std::size_t gp : given_pos) {
                std::size_t sym = old_idx / strides[gp] % sc.variable(built[gp]).alphabet_size;
                row_idx = row_idx * sc.variable(built[gp]).alphabet_size + sym;
            }
            const auto& row = f.rows[row_idx];
            for (std::size_t t = 0; t < width; ++t) next[old_idx * width + t] = partial[old_idx] * row[t];
        }
        partial = std::move(next);
        for (const auto& t : f.targets) built.push_back(sc.index_of(t));
    }

    // remap from addition order to scenario order
    std::vector<std::size_t> built_strides(built.size(), 1);
    for (std::size_t i = built.size(); i-- > 1;)
        built_strides[i - 1] = built_strides[i] * sc.variable(built[i]).alphabet_size;
    std::vector<Num> out(sc.table_size(), Num(0));
    for (std::size_t full = 0; full < out.size(); ++full) {
        std::size_t src = 0;
        for (std::size_t p = 0; p < built.size(); ++p)
            src += sc.symbol_at(full, built[p]) * built_strides[p];
        out[full] = partial[src];
    }
    return JointTable<Num>::from_values(sc, std::move(out));
}

template <class Num>
JointTable<Num> compose_product(const Scenario& sc, const std::vector<ConditionalKernel<Num>>& factors) {
    return compose_product(sc, std::span<const ConditionalKernel<Num>>(factors));
}

} // namespace ontolab
