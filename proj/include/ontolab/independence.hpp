#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ontolab/joint.hpp"

namespace ontolab {

// P(target | independent_of) = P(target)
struct CIQuery {
    std::vector<std::string> target;
    std::vector<std::string> independent_of;

    std::string label() const {
        std::string s = "CI[";
        for (std::size_t i = 0; i < target.size(); ++i) s += (i ? "+" : "") + target[i];
        s += " _||_ ";
        for (std::size_t i = 0; i < independent_of.size(); ++i) s += (i ? "+" : "") + independent_of[i];
        return s + "]";
    }
};

enum class AssumptionId { FR, FRprime, NS, ST, FACT };

inline const char* assumption_name(AssumptionId id) {
    switch (id) {
        case AssumptionId::FR: return "FR";
        case AssumptionId::FRprime: return "FRprime";
        case AssumptionId::NS: return "NS";
        case AssumptionId::ST: return "ST";
        case AssumptionId::FACT: return "FACT";
    }
    return "?";
}

inline std::optional<AssumptionId> assumption_from_name(std::string_view s) {
    if (s == "FR") return AssumptionId::FR;
    if (s == "FRprime") return AssumptionId::FRprime;
    if (s == "NS") return AssumptionId::NS;
    if (s == "ST") return AssumptionId::ST;
    if (s == "FACT") return AssumptionId::FACT;
    return std::nullopt;
}

// One conditional-equality constraint
//   P(target | varying, spectator) = P(target | spectator)
// evaluated in sup norm over positive-mass conditioning assignments, or —
// when `factorization` is set — the product identity
//   P(target) = prod_i P(target_i).
struct Component {
    std::string label;
    std::vector<std::string> target;
    std::vector<std::string> varying;
    std::vector<std::string> spectator;
    bool factorization = false;
};

inline std::vector<Component> assumption_components(AssumptionId id) {
    switch (id) {
        case AssumptionId::FR:
            return {{"FR[A]", {"A"}, {"B", "C", "Y", "Z"}, {}, false},
                    {"FR[B]", {"B"}, {"A", "C", "X", "Z"}, {}, false},
                    {"FR[C]", {"C"}, {"A", "B", "X", "Y"}, {}, false}};
        case AssumptionId::FRprime:
            return {{"FRprime[A]", {"A"}, {"B", "lambda"}, {}, false},
                    {"FRprime[B]", {"B"}, {"A", "lambda"}, {}, false}};
        case AssumptionId::NS:
            return {{"NS[X]", {"X"}, {"B"}, {"A"}, false},
                    {"NS[Y]", {"Y"}, {"A"}, {"B"}, false}};
        case AssumptionId::ST:
            return {{"ST[CZ]", {"C", "Z"}, {"A", "B", "X", "Y"}, {}, false}};
        case AssumptionId::FACT:
            return {{"FACT", {"A", "B", "lambda"}, {}, {}, true}};
    }
    return {};
}

template <class Num>
struct ComponentReport {
    std::string label;
    Num deviation{0};
    std::optional<Assignment> witness;  // achieves the deviation; absent when 0
    std::size_t vacuous_events = 0;     // zero-mass conditioning assignments
    std::size_t conditioning_events = 0;
};

template <class Num>
struct ViolationReport {
    std::string label;
    Num deviation{0};
    std::optional<Assignment> witness;
    std::size_t vacuous_events = 0;
    std::size_t conditioning_events = 0;
    bool degenerate = false; // more than half of the conditioning events are vacuous
    std::vector<ComponentReport<Num>> per_component;
};

namespace detail {

template <class Num>
std::vector<Num> marginal_values(const JointTable<Num>& joint, const std::vector<std::size_t>& vars,
                                 SubsetIndexer& out_indexer) {
    out_indexer = SubsetIndexer(joint.scenario(), vars);
    std::vector<Num> m(out_indexer.size, Num(0));
    const auto& sc = joint.scenario();
    for (std::size_t i = 0; i < joint.size(); ++i) m[out_indexer.project(sc, i)] += joint[i];
    return m;
}

// Projects a union-space index onto a sub-group index using precomputed
// per-position radices.
struct GroupProjector {
    std::vector<std::size_t> radix;  // alphabet size per union position
    std::vector<std::size_t> stride; // 0 when the position is not in the group

    static GroupProjector make(const Scenario& sc, const SubsetIndexer& uni,
                               const std::vector<std::size_t>& group_vars) {
        GroupProjector p;
        p.radix.resize(uni.vars.size());
        p.stride.assign(uni.vars.size(), 0);
        std::vector<std::size_t> widths;
        for (std::size_t i = 0; i < uni.vars.size(); ++i) {
            p.radix[i] = sc.variable(uni.vars[i]).alphabet_size;
            bool in_group = std::find(group_vars.begin(), group_vars.end(), uni.vars[i]) != group_vars.end();
            widths.push_back(in_group ? p.radix[i] : 0);
        }
        std::size_t s = 1;
        for (std::size_t i = uni.vars.size(); i-- > 0;) {
            if (widths[i]) {
                p.stride[i] = s;
                s *= widths[i];
            }
        }
        return p;
    }

    std::size_t project(const SubsetIndexer& uni, std::size_t u) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < uni.vars.size(); ++i) {
            std::size_t sym = u / uni.strides[i] % radix[i];
            idx += sym * stride[i];
        }
        return idx;
    }
};

} // namespace detail

// Deviation of one component. Enumerates assignments in scenario-
// lexicographic order, so ties pick the lexicographically least witness.
template <class Num>
ComponentReport<Num> component_deviation(const JointTable<Num>& joint, const Component& comp) {
    const auto& sc = joint.scenario();
    ComponentReport<Num> rep;
    rep.label = comp.label;

    if (comp.factorization) {
        auto tvars = sc.indices_of(comp.target);
        detail::SubsetIndexer tind;
        auto m_t = detail::marginal_values(joint, tvars, tind);
        std::vector<std::vector<Num>> singles;
        for (std::size_t pos = 0; pos < tind.vars.size(); ++pos) {
            detail::SubsetIndexer si;
            singles.push_back(detail::marginal_values(joint, {tind.vars[pos]}, si));
        }
        for (std::size_t u = 0; u < m_t.size(); ++u) {
            Num prod(1);
            for (std::size_t pos = 0; pos < tind.vars.size(); ++pos)
                prod *= singles[pos][tind.symbol_at(u, pos, sc)];
            Num dev = num_abs(m_t[u] - prod);
            if (dev > rep.deviation) {
                rep.deviation = dev;
                Assignment w;
                for (std::size_t pos = 0; pos < tind.vars.size(); ++pos)
                    w[sc.variable(tind.vars[pos]).name] = tind.symbol_at(u, pos, sc);
                rep.witness = std::move(w);
            }
        }
        return rep;
    }

    auto tvars = sc.indices_of(comp.target);
    auto svars = sc.indices_of(comp.varying);
    auto wvars = sc.indices_of(comp.spectator);
    std::vector<std::size_t> swvars = svars;
    swvars.insert(swvars.end(), wvars.begin(), wvars.end());
    std::vector<std::size_t> twvars = tvars;
    twvars.insert(twvars.end(), wvars.begin(), wvars.end());
    std::vector<std::size_t> uvars = swvars;
    uvars.insert(uvars.end(), tvars.begin(), tvars.end());

    detail::SubsetIndexer uind, swind, twind, wind;
    auto m_u = detail::marginal_values(joint, uvars, uind);
    auto m_sw = detail::marginal_values(joint, swvars, swind);
    auto m_tw = detail::marginal_values(joint, twvars, twind);
    auto m_w = detail::marginal_values(joint, wvars, wind);

    auto proj_sw = detail::GroupProjector::make(sc, uind, swind.vars);
    auto proj_tw = detail::GroupProjector::make(sc, uind, twind.vars);
    auto proj_w = detail::GroupProjector::make(sc, uind, wind.vars);

    rep.conditioning_events = m_sw.size();
    for (const auto& v : m_sw)
        if (v == Num(0)) ++rep.vacuous_events;

    for (std::size_t u = 0; u < m_u.size(); ++u) {
        std::size_t sw = proj_sw.project(uind, u);
        if (m_sw[sw] == Num(0)) continue; // vacuous conditioning event
        std::size_t tw = proj_tw.project(uind, u);
        std::size_t w = proj_w.project(uind, u);
        Num dev = num_abs(m_u[u] / m_sw[sw] - m_tw[tw] / m_w[w]);
        if (dev > rep.deviation) {
            rep.deviation = dev;
            Assignment wa;
            for (std::size_t pos = 0; pos < uind.vars.size(); ++pos)
                wa[sc.variable(uind.vars[pos]).name] = uind.symbol_at(u, pos, sc);
            rep.witness = std::move(wa);
        }
    }
    return rep;
}

// Re-evaluates a component at one assignment; used to audit report witnesses.
template <class Num>
Num component_deviation_at(const JointTable<Num>& joint, const Component& comp, const Assignment& at) {
    auto pick = [&](const std::vector<std::string>& names) {
        Assignment sub;
        for (const auto& n : names) {
            auto it = at.find(n);
            if (it == at.end()) throw MissingVariable("witness does not assign '" + n + "'");
            sub[n] = it->second;
        }
        return sub;
    };
    if (comp.factorization) {
        Num prod(1);
        for (const auto& n : comp.target) prod *= joint.mass(pick({n}));
        return num_abs(joint.mass(pick(comp.target)) - prod);
    }
    Assignment t = pick(comp.target), s = pick(comp.varying), w = pick(comp.spectator);
    Assignment sw = s, tw = t, tsw = t;
    for (const auto& kv : w) {
        sw.insert(kv);
        tw.insert(kv);
    }
    for (const auto& kv : sw) tsw.insert(kv);
    Num p_sw = joint.mass(sw);
    if (p_sw == Num(0)) throw ZeroProbabilityEvent("witness conditions on a zero-probability event");
    Num p_w = comp.spectator.empty() ? Num(1) : joint.mass(w);
    return num_abs(joint.mass(tsw) / p_sw - joint.mass(tw) / p_w);
}

namespace detail {

template <class Num>
ViolationReport<Num> aggregate(std::string label, std::vector<ComponentReport<Num>> comps) {
    ViolationReport<Num> rep;
    rep.label = std::move(label);
    rep.per_component = std::move(comps);
    for (const auto& c : rep.per_component) {
        rep.vacuous_events += c.vacuous_events;
        rep.conditioning_events += c.conditioning_events;
        if (c.deviation > rep.deviation) {
            rep.deviation = c.deviation;
            rep.witness = c.witness;
        }
    }
    rep.degenerate = rep.conditioning_events > 0 && 2 * rep.vacuous_events > rep.conditioning_events;
    return rep;
}

} // namespace detail

// sup_{s: P(s)>0} sup_t |P(t|s) - P(t)|
template <class Num>
ViolationReport<Num> ci_deviation(const JointTable<Num>& joint, const CIQuery& query) {
    if (query.target.empty() || query.independent_of.empty())
        throw SchemaError("CI query needs nonempty target and independent_of lists");
    for (const auto& t : query.target)
        for (const auto& s : query.independent_of)
            if (t == s) throw SchemaError("CI query lists overlap on '" + t + "'");
    Component comp{query.label(), query.target, query.independent_of, {}, false};
    return detail::aggregate(query.label(), std::vector<ComponentReport<Num>>{component_deviation(joint, comp)});
}

template <class Num>
Num ci_deviation_at(const JointTable<Num>& joint, const CIQuery& query, const Assignment& at) {
    Component comp{query.label(), query.target, query.independent_of, {}, false};
    return component_deviation_at(joint, comp, at);
}

// Aggregated deviation of one named assumption with per-component breakdown.
template <class Num>
ViolationReport<Num> assumption_deviation(const JointTable<Num>& joint, AssumptionId id) {
    std::vector<ComponentReport<Num>> comps;
    for (const auto& c : assumption_components(id)) comps.push_back(component_deviation(joint, c));
    return detail::aggregate(assumption_name(id), std::move(comps));
}

namespace detail {

// Table entries as integer numerators over one common denominator; turns
// exact-zero checks into cross-multiplications with no rational reductions.
struct IntegerTable {
    std::vector<BigInt> num;
    BigInt den;
};

inline IntegerTable integer_numerators(const JointTable<Rational>& joint) {
    IntegerTable t;
    t.den = 1;
    for (std::size_t i = 0; i < joint.size(); ++i) t.den = lcm(t.den, BigInt(denominator(joint[i])));
    t.num.resize(joint.size());
    for (std::size_t i = 0; i < joint.size(); ++i)
        t.num[i] = BigInt(numerator(joint[i])) * (t.den / BigInt(denominator(joint[i])));
    return t;
}

inline std::vector<BigInt> integer_marginal(const Scenario& sc, const std::vector<BigInt>& full,
                                            const std::vector<std::size_t>& vars, SubsetIndexer& out) {
    out = SubsetIndexer(sc, vars);
    std::vector<BigInt> m(out.size, BigInt(0));
    for (std::size_t i = 0; i < full.size(); ++i) m[out.project(sc, i)] += full[i];
    return m;
}

} // namespace detail

// True iff the component holds with deviation exactly zero. Equivalent to
// component_deviation(...).deviation == 0 but far cheaper on the exact
// backend; used to certify premises at scale.
inline bool component_holds_exactly(const JointTable<Rational>& joint, const detail::IntegerTable& ints,
                                    const Component& comp) {
    const auto& sc = joint.scenario();
    if (comp.factorization) {
        auto tvars = sc.indices_of(comp.target);
        detail::SubsetIndexer tind;
        auto m_t = detail::integer_marginal(sc, ints.num, tvars, tind);
        std::vector<std::vector<BigInt>> singles;
        for (std::size_t pos = 0; pos < tind.vars.size(); ++pos) {
            detail::SubsetIndexer si;
            singles.push_back(detail::integer_marginal(sc, ints.num, {tind.vars[pos]}, si));
        }
        BigInt scale = 1;
        for (std::size_t k = 1; k < tind.vars.size(); ++k) scale *= ints.den;
        for (std::size_t u = 0; u < m_t.size(); ++u) {
            BigInt prod = 1;
            for (std::size_t pos = 0; pos < tind.vars.size(); ++pos)
                prod *= singles[pos][tind.symbol_at(u, pos, sc)];
            if (m_t[u] * scale != prod) return false;
        }
        return true;
    }

    auto tvars = sc.indices_of(comp.target);
    auto svars = sc.indices_of(comp.varying);
    auto wvars = sc.indices_of(comp.spectator);
    std::vector<std::size_t> swvars = svars;
    swvars.insert(swvars.end(), wvars.begin(), wvars.end());
    std::vector<std::size_t> twvars = tvars;
    twvars.insert(twvars.end(), wvars.begin(), wvars.end());
    std::vector<std::size_t> uvars = swvars;
    uvars.insert(uvars.end(), tvars.begin(), tvars.end());

    detail::SubsetIndexer uind, swind, twind, wind;
    auto m_u = detail::integer_marginal(sc, ints.num, uvars, uind);
    auto m_sw = detail::integer_marginal(sc, ints.num, swvars, swind);
    auto m_tw = detail::integer_marginal(sc, ints.num, twvars, twind);
    auto m_w = detail::integer_marginal(sc, ints.num, wvars, wind);
    auto proj_sw = detail::GroupProjector::make(sc, uind, swind.vars);
    auto proj_tw = detail::GroupProjector::make(sc, uind, twind.vars);
    auto proj_w = detail::GroupProjector::make(sc, uind, wind.vars);

    for (std::size_t u = 0; u < m_u.size(); ++u) {
        std::size_t sw = proj_sw.project(uind, u);
        if (m_sw[sw] == 0) continue;
        // P(t|s,w) == P(t|w)  <=>  n_tsw * n_w == n_tw * n_sw
        if (m_u[u] * m_w[proj_w.project(uind, u)] != m_tw[proj_tw.project(uind, u)] * m_sw[sw])
            return false;
    }
    return true;
}

inline bool assumption_holds_exactly(const JointTable<Rational>& joint, AssumptionId id) {
    auto ints = detail::integer_numerators(joint);
    for (const auto& comp : assumption_components(id))
        if (!component_holds_exactly(joint, ints, comp)) return false;
    return true;
}

// Secondary statistic: max over positive-mass conditioning assignments of
// the total-variation distance between P(target | s) and P(target).
template <class Num>
Num ci_total_variation(const JointTable<Num>& joint, const CIQuery& query) {
    const auto& sc = joint.scenario();
    auto tvars = sc.indices_of(query.target);
    auto svars = sc.indices_of(query.independent_of);
    std::vector<std::size_t> uvars = svars;
    uvars.insert(uvars.end(), tvars.begin(), tvars.end());

    detail::SubsetIndexer uind, sind, tind;
    auto m_u = detail::marginal_values(joint, uvars, uind);
    auto m_s = detail::marginal_values(joint, svars, sind);
    auto m_t = detail::marginal_values(joint, tvars, tind);
    auto proj_s = detail::GroupProjector::make(sc, uind, sind.vars);
    auto proj_t = detail::GroupProjector::make(sc, uind, tind.vars);

    std::vector<Num> tv(m_s.size(), Num(0));
    for (std::size_t u = 0; u < m_u.size(); ++u) {
        std::size_t s = proj_s.project(uind, u);
        if (m_s[s] == Num(0)) continue;
        tv[s] += num_abs(m_u[u] / m_s[s] - m_t[proj_t.project(uind, u)]);
    }
    Num best(0);
    for (auto& v : tv) {
        v /= Num(2);
        if (v > best) best = v;
    }
    return best;
}

} // namespace ontolab
