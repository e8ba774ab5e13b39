#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ontolab/errors.hpp"
#include "ontolab/numeric.hpp"

namespace ontolab {

enum class Role { setting, outcome, ontic };

inline const char* role_name(Role r) {
    switch (r) {
        case Role::setting: return "setting";
        case Role::outcome: return "outcome";
        case Role::ontic: return "ontic";
    }
    return "?";
}

inline Role role_from_name(std::string_view s) {
    if (s == "setting") return Role::setting;
    if (s == "outcome") return Role::outcome;
    if (s == "ontic") return Role::ontic;
    throw SchemaError("unknown role: '" + std::string(s) + "'");
}

struct VariableSpec {
    std::string name;
    Role role = Role::outcome;
    std::size_t alphabet_size = 2;
    std::optional<std::string> alias_of; // deterministic copy of another variable
};

// Partial or full assignment of symbols to named variables.
using Assignment = std::map<std::string, std::size_t>;

// An ordered list of named finite random variables. Immutable once built.
class Scenario {
public:
    Scenario() = default;

    explicit Scenario(std::vector<VariableSpec> vars) : vars_(std::move(vars)) {
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            const auto& v = vars_[i];
            if (v.name.empty()) throw SchemaError("variable with empty name");
            if (v.alphabet_size < 1) throw SchemaError("alphabet_size must be >= 1 for '" + v.name + "'");
            if (!index_.emplace(v.name, i).second)
                throw SchemaError("duplicate variable name '" + v.name + "'");
        }
        for (const auto& v : vars_) {
            if (!v.alias_of) continue;
            auto it = index_.find(*v.alias_of);
            if (it == index_.end())
                throw UnknownVariable("alias target '" + *v.alias_of + "' of '" + v.name + "' not declared");
            if (vars_[it->second].alphabet_size != v.alphabet_size)
                throw SchemaError("alias '" + v.name + "' and target '" + *v.alias_of +
                                  "' have different alphabet sizes");
        }
        check_alias_acyclic();
        init_strides();
    }

    std::size_t size() const { return vars_.size(); }
    const std::vector<VariableSpec>& variables() const { return vars_; }
    const VariableSpec& variable(std::size_t i) const { return vars_[i]; }

    bool has(std::string_view name) const { return index_.count(std::string(name)) > 0; }

    std::size_t index_of(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) throw UnknownVariable("unknown variable '" + std::string(name) + "'");
        return it->second;
    }

    // Number of points in the product alphabet; throws past the dense cap.
    std::size_t table_size() const {
        std::size_t n = 1;
        for (const auto& v : vars_) {
            if (v.alphabet_size != 0 && n > kTableCap / v.alphabet_size)
                throw CapExceeded("product alphabet exceeds dense table cap");
            n *= v.alphabet_size;
        }
        return n;
    }

    // Mixed-radix index, last variable fastest.
    std::size_t flatten(std::span<const std::size_t> symbols) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < vars_.size(); ++i) idx += symbols[i] * strides_[i];
        return idx;
    }

    void unflatten(std::size_t idx, std::span<std::size_t> symbols) const {
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            symbols[i] = idx / strides_[i];
            idx %= strides_[i];
        }
    }

    std::size_t stride(std::size_t i) const { return strides_[i]; }

    std::size_t symbol_at(std::size_t flat, std::size_t var) const {
        return flat / strides_[var] % vars_[var].alphabet_size;
    }

    // Validated (variable index, symbol) pairs in scenario order.
    std::vector<std::pair<std::size_t, std::size_t>> compile(const Assignment& a) const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        out.reserve(a.size());
        for (const auto& [name, symbol] : a) {
            std::size_t vi = index_of(name);
            if (symbol >= vars_[vi].alphabet_size)
                throw SchemaError("symbol " + std::to_string(symbol) + " out of range for '" + name + "'");
            out.emplace_back(vi, symbol);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<std::size_t> indices_of(std::span<const std::string> names) const {
        std::vector<std::size_t> idx;
        idx.reserve(names.size());
        for (const auto& n : names) idx.push_back(index_of(n));
        return idx;
    }

    // Sub-scenario over a subset of variables, kept in scenario order.
    Scenario restricted(std::span<const std::size_t> var_indices) const {
        std::vector<std::size_t> sorted(var_indices.begin(), var_indices.end());
        std::sort(sorted.begin(), sorted.end());
        std::vector<VariableSpec> vs;
        vs.reserve(sorted.size());
        for (std::size_t i : sorted) {
            VariableSpec v = vars_[i];
            // alias targets may be dropped by the restriction
            if (v.alias_of && std::none_of(sorted.begin(), sorted.end(), [&](std::size_t j) {
                    return vars_[j].name == *v.alias_of;
                }))
                v.alias_of.reset();
            vs.push_back(std::move(v));
        }
        return Scenario(std::move(vs));
    }

    bool operator==(const Scenario& other) const {
        if (vars_.size() != other.vars_.size()) return false;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            const auto& a = vars_[i];
            const auto& b = other.vars_[i];
            if (a.name != b.name || a.role != b.role || a.alphabet_size != b.alphabet_size ||
                a.alias_of != b.alias_of)
                return false;
        }
        return true;
    }

private:
    void check_alias_acyclic() {
        for (std::size_t start = 0; start < vars_.size(); ++start) {
            std::size_t cur = start, hops = 0;
            while (vars_[cur].alias_of) {
                cur = index_.at(*vars_[cur].alias_of);
                if (++hops > vars_.size())
                    throw SchemaError("alias cycle involving '" + vars_[start].name + "'");
            }
        }
    }

    void init_strides() {
        strides_.assign(vars_.size(), 1);
        for (std::size_t i = vars_.size(); i-- > 1;)
            strides_[i - 1] = strides_[i] * vars_[i].alphabet_size;
        table_size(); // enforce the cap early
    }

    std::vector<VariableSpec> vars_;
    std::vector<std::size_t> strides_;
    std::unordered_map<std::string, std::size_t> index_;
};

// The scenario the assumption checkers are phrased in: settings A, B, C,
// outcomes X, Y, Z and the ontic variable lambda, in that order.
struct CanonicalSizes {
    std::size_t a = 2, b = 2, c = 2, x = 2, y = 2, z = 2, lambda = 2;
};

inline Scenario canonical_scenario(const CanonicalSizes& s = {}) {
    return Scenario({
        {"A", Role::setting, s.a, std::nullopt},
        {"B", Role::setting, s.b, std::nullopt},
        {"C", Role::setting, s.c, std::nullopt},
        {"X", Role::outcome, s.x, std::nullopt},
        {"Y", Role::outcome, s.y, std::nullopt},
        {"Z", Role::outcome, s.z, std::nullopt},
        {"lambda", Role::ontic, s.lambda, std::nullopt},
    });
}

inline std::string format_assignment(const Scenario& sc, const Assignment& a) {
    // scenario order, "A=0;B=1" style (CSV-safe)
    std::string out;
    for (const auto& v : sc.variables()) {
        auto it = a.find(v.name);
        if (it == a.end()) continue;
        if (!out.empty()) out += ';';
        out += v.name + "=" + std::to_string(it->second);
    }
    // variables unknown to the scenario would be a bug; assignments are
    // always produced against their scenario
    return out;
}

} // namespace ontolab
