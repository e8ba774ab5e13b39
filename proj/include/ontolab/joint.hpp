#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ontolab/numeric.hpp"
#include "ontolab/scenario.hpp"

namespace ontolab {

namespace detail {

// full-table index -> index into the subset's product alphabet
struct SubsetIndexer {
    std::vector<std::size_t> vars;    // ascending scenario indices
    std::vector<std::size_t> strides; // mixed radix over the subset, last fastest
    std::size_t size = 1;

    SubsetIndexer() = default;

    SubsetIndexer(const Scenario& sc, std::vector<std::size_t> subset) : vars(std::move(subset)) {
        std::sort(vars.begin(), vars.end());
        strides.assign(vars.size(), 1);
        for (std::size_t i = vars.size(); i-- > 1;)
            strides[i - 1] = strides[i] * sc.variable(vars[i]).alphabet_size;
        if (!vars.empty()) size = strides[0] * sc.variable(vars[0]).alphabet_size;
    }

    std::size_t project(const Scenario& sc, std::size_t full_index) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < vars.size(); ++i)
            idx += sc.symbol_at(full_index, vars[i]) * strides[i];
        return idx;
    }

    std::size_t symbol_at(std::size_t sub_index, std::size_t pos, const Scenario& sc) const {
        return sub_index / strides[pos] % sc.variable(vars[pos]).alphabet_size;
    }
};

} // namespace detail

// A full joint probability distribution over a Scenario, dense.
// Num = double (float backend) or Rational (exact backend).
// Immutable after construction; all operations are pure.
template <class Num>
class JointTable {
public:
    using value_type = Num;

    JointTable() = default;

    const Scenario& scenario() const { return scenario_; }
    const std::vector<Num>& probabilities() const { return p_; }
    std::size_t size() const { return p_.size(); }
    const Num& operator[](std::size_t i) const { return p_[i]; }

    static constexpr const char* backend() { return numeric_traits<Num>::backend_name(); }

    // Validating constructor from sparse entries; omitted points are 0.
    static JointTable build(const Scenario& sc, const std::vector<std::pair<Assignment, Num>>& entries) {
        std::vector<Num> p(sc.table_size(), Num(0));
        std::vector<bool> seen(p.size(), false);
        std::vector<std::size_t> full(sc.size());
        for (const auto& [assignment, prob] : entries) {
            auto compiled = sc.compile(assignment);
            if (compiled.size() != sc.size())
                throw MissingVariable("table entry does not assign every variable");
            for (auto [vi, sym] : compiled) full[vi] = sym;
            std::size_t idx = sc.flatten(full);
            if (seen[idx]) throw InconsistentSpec("duplicate table entry");
            seen[idx] = true;
            p[idx] = prob;
        }
        return from_values(sc, std::move(p));
    }

    // Validating constructor from a dense vector in scenario index order.
    static JointTable from_values(const Scenario& sc, std::vector<Num> p) {
        if (p.size() != sc.table_size()) throw ShapeMismatch("table length does not match scenario");
        Num sum(0);
        for (const auto& v : p) {
            if (v < Num(0)) throw NegativeEntry("negative probability entry");
            sum += v;
        }
        if constexpr (numeric_traits<Num>::is_exact) {
            if (sum != Num(1)) throw NotNormalized("entries sum to " + format_number(sum) + ", expected 1");
        } else {
            if (!(num_abs(sum - Num(1)) <= Num(kFloatNormTolerance)))
                throw NotNormalized("entries sum to " + format_number(sum) + ", expected 1");
        }
        JointTable t;
        t.scenario_ = sc;
        t.p_ = std::move(p);
        t.check_aliases();
        return t;
    }

    // For internal construction of already-validated results.
    static JointTable trusted(Scenario sc, std::vector<Num> p) {
        JointTable t;
        t.scenario_ = std::move(sc);
        t.p_ = std::move(p);
        return t;
    }

    // P(keep) — distribution over the kept variables, scenario order.
    JointTable marginalize(std::span<const std::string> keep) const {
        auto idx = scenario_.indices_of(keep);
        detail::SubsetIndexer sub(scenario_, idx);
        std::vector<Num> m(sub.size, Num(0));
        for (std::size_t i = 0; i < p_.size(); ++i) m[sub.project(scenario_, i)] += p_[i];
        return trusted(scenario_.restricted(sub.vars), std::move(m));
    }

    // P(targets | given); throws ZeroProbabilityEvent when P(given) = 0.
    JointTable condition(std::span<const std::string> targets, const Assignment& given) const {
        auto tidx = scenario_.indices_of(targets);
        auto g = scenario_.compile(given);
        for (std::size_t t : tidx)
            for (auto [gi, _] : g)
                if (gi == t)
                    throw SchemaError("conditioning variable '" + scenario_.variable(t).name +
                                      "' overlaps the target list");
        detail::SubsetIndexer sub(scenario_, tidx);
        std::vector<Num> m(sub.size, Num(0));
        Num mass(0);
        for (std::size_t i = 0; i < p_.size(); ++i) {
            bool match = true;
            for (auto [vi, sym] : g)
                if (scenario_.symbol_at(i, vi) != sym) {
                    match = false;
                    break;
                }
            if (!match) continue;
            m[sub.project(scenario_, i)] += p_[i];
            mass += p_[i];
        }
        if (mass == Num(0)) throw ZeroProbabilityEvent("conditioning event has zero probability");
        for (auto& v : m) v /= mass;
        return trusted(scenario_.restricted(sub.vars), std::move(m));
    }

    // P(partial assignment)
    Num mass(const Assignment& partial) const {
        auto g = scenario_.compile(partial);
        Num total(0);
        for (std::size_t i = 0; i < p_.size(); ++i) {
            bool match = true;
            for (auto [vi, sym] : g)
                if (scenario_.symbol_at(i, vi) != sym) {
                    match = false;
                    break;
                }
            if (match) total += p_[i];
        }
        return total;
    }

    Num at(const Assignment& full) const {
        auto g = scenario_.compile(full);
        if (g.size() != scenario_.size()) throw MissingVariable("assignment does not cover every variable");
        std::vector<std::size_t> symbols(scenario_.size());
        for (auto [vi, sym] : g) symbols[vi] = sym;
        return p_[scenario_.flatten(symbols)];
    }

private:
    void check_aliases() {
        for (std::size_t vi = 0; vi < scenario_.size(); ++vi) {
            const auto& v = scenario_.variable(vi);
            if (!v.alias_of) continue;
            std::size_t ti = scenario_.index_of(*v.alias_of);
            for (std::size_t i = 0; i < p_.size(); ++i)
                if (p_[i] != Num(0) && scenario_.symbol_at(i, vi) != scenario_.symbol_at(i, ti))
                    throw AliasViolation("positive probability where '" + v.name + "' differs from '" +
                                         *v.alias_of + "'");
        }
    }

    Scenario scenario_;
    std::vector<Num> p_;
};

// spec-facing free functions

template <class Num>
JointTable<Num> build_joint(const Scenario& sc, const std::vector<std::pair<Assignment, Num>>& entries) {
    return JointTable<Num>::build(sc, entries);
}

template <class Num>
JointTable<Num> marginalize(const JointTable<Num>& joint, std::span<const std::string> keep) {
    return joint.marginalize(keep);
}

template <class Num>
JointTable<Num> condition(const JointTable<Num>& joint, std::span<const std::string> targets,
                          const Assignment& given) {
    return joint.condition(targets, given);
}

// exact embedding of a float table (doubles are dyadic rationals)
inline JointTable<Rational> to_exact(const JointTable<double>& t) {
    std::vector<Rational> p(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) p[i] = Rational(t[i]);
    return JointTable<Rational>::trusted(t.scenario(), std::move(p));
}

inline JointTable<double> to_float(const JointTable<Rational>& t) {
    std::vector<double> p(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) p[i] = numeric_traits<Rational>::to_double(t[i]);
    return JointTable<double>::trusted(t.scenario(), std::move(p));
}

} // namespace ontolab
