#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ontolab/independence.hpp"
#include "ontolab/kernel.hpp"
#include "ontolab/quantum.hpp"

namespace ontolab {

// Deterministic map (setting symbol, ontic symbol) -> outcome symbol.
struct ResponseFunction {
    std::size_t setting_size = 2;
    std::size_t ontic_size = 2;
    std::size_t outcome_size = 2;
    std::vector<std::size_t> table; // row-major over (setting, ontic)

    std::size_t at(std::size_t s, std::size_t l) const { return table[s * ontic_size + l]; }

    static ResponseFunction make(std::size_t setting_size, std::size_t ontic_size, std::size_t outcome_size,
                                 std::vector<std::size_t> table) {
        if (table.size() != setting_size * ontic_size)
            throw InconsistentSpec("response table is not total on (setting, ontic)");
        for (auto v : table)
            if (v >= outcome_size) throw InconsistentSpec("response symbol out of range");
        return ResponseFunction{setting_size, ontic_size, outcome_size, std::move(table)};
    }

    // binary presets
    static ResponseFunction xor_response() { return make(2, 2, 2, {0, 1, 1, 0}); }
    static ResponseFunction and_response() { return make(2, 2, 2, {0, 0, 0, 1}); }
    static ResponseFunction copy_ontic(std::size_t setting_size = 2, std::size_t ontic_size = 2) {
        std::vector<std::size_t> t;
        for (std::size_t s = 0; s < setting_size; ++s)
            for (std::size_t l = 0; l < ontic_size; ++l) t.push_back(l);
        return make(setting_size, ontic_size, ontic_size, std::move(t));
    }
    static ResponseFunction copy_setting(std::size_t setting_size = 2, std::size_t ontic_size = 2) {
        std::vector<std::size_t> t;
        for (std::size_t s = 0; s < setting_size; ++s)
            for (std::size_t l = 0; l < ontic_size; ++l) t.push_back(s);
        return make(setting_size, ontic_size, setting_size, std::move(t));
    }
    static ResponseFunction constant(std::size_t value, std::size_t setting_size = 2,
                                     std::size_t ontic_size = 2, std::size_t outcome_size = 2) {
        return make(setting_size, ontic_size, outcome_size,
                    std::vector<std::size_t>(setting_size * ontic_size, value));
    }
};

// Where the ontic readout Z comes from.
enum class ZSource {
    response_c_lambda, // Z = z_response(C, lambda)
    from_c_and_noise,  // Z = z_response(C, mu) with fresh noise mu
    copy_x,            // Z := X
    copy_lambda,       // Z := lambda
};

// Full description of a hidden-variable model over {A,B,C,X,Y,Z,lambda}.
template <class Num>
struct OntModelSpec {
    std::vector<Num> p_a, p_b, p_c, p_lambda;
    std::optional<std::vector<Num>> p_mu;               // required for from_c_and_noise
    ResponseFunction x_response, y_response;
    std::optional<ResponseFunction> z_response;         // on (C, lambda) or (C, mu)
    std::optional<ConditionalKernel<Num>> adaptive_c;   // P(C|A); overrides p_c
    ZSource z_source = ZSource::response_c_lambda;
};

namespace detail {

template <class Num>
void check_distribution(const std::vector<Num>& p, const char* what) {
    if (p.empty()) throw InconsistentSpec(std::string(what) + " distribution is empty");
    Num sum(0);
    for (const auto& v : p) {
        if (v < Num(0)) throw NegativeEntry(std::string(what) + " has a negative entry");
        sum += v;
    }
    if constexpr (numeric_traits<Num>::is_exact) {
        if (sum != Num(1)) throw NotNormalized(std::string(what) + " does not sum to 1");
    } else {
        if (!(num_abs(sum - Num(1)) <= Num(kFloatNormTolerance)))
            throw NotNormalized(std::string(what) + " does not sum to 1");
    }
}

} // namespace detail

// Composes the joint over {A,B,C,X,Y,Z,lambda}; the fresh-noise variable mu
// is internal and marginalized out before returning.
template <class Num>
JointTable<Num> build_ont_model(const OntModelSpec<Num>& spec) {
    detail::check_distribution(spec.p_a, "P_A");
    detail::check_distribution(spec.p_b, "P_B");
    detail::check_distribution(spec.p_lambda, "P_lambda");
    if (!spec.adaptive_c) detail::check_distribution(spec.p_c, "P_C");

    const std::size_t na = spec.p_a.size();
    const std::size_t nb = spec.p_b.size();
    const std::size_t nc = spec.adaptive_c ? spec.adaptive_c->target_sizes[0] : spec.p_c.size();
    const std::size_t nl = spec.p_lambda.size();

    const ResponseFunction& fx = spec.x_response;
    const ResponseFunction& fy = spec.y_response;
    if (fx.setting_size != na || fx.ontic_size != nl) throw InconsistentSpec("X response shape mismatch");
    if (fy.setting_size != nb || fy.ontic_size != nl) throw InconsistentSpec("Y response shape mismatch");
    const std::size_t nx = fx.outcome_size;
    const std::size_t ny = fy.outcome_size;

    std::size_t nz = 0;
    std::size_t nmu = 1;
    switch (spec.z_source) {
        case ZSource::response_c_lambda:
            if (!spec.z_response) throw InconsistentSpec("z_response required for Z = h(C, lambda)");
            if (spec.z_response->setting_size != nc || spec.z_response->ontic_size != nl)
                throw InconsistentSpec("Z response shape mismatch");
            nz = spec.z_response->outcome_size;
            break;
        case ZSource::from_c_and_noise:
            if (!spec.z_response || !spec.p_mu)
                throw InconsistentSpec("z_response and P_mu required for Z = h(C, mu)");
            detail::check_distribution(*spec.p_mu, "P_mu");
            nmu = spec.p_mu->size();
            if (spec.z_response->setting_size != nc || spec.z_response->ontic_size != nmu)
                throw InconsistentSpec("Z response shape mismatch");
            nz = spec.z_response->outcome_size;
            break;
        case ZSource::copy_x: nz = nx; break;
        case ZSource::copy_lambda: nz = nl; break;
    }

    Scenario sc = canonical_scenario({na, nb, nc, nx, ny, nz, nl});
    // composition scenario carries mu; it is summed out below
    Scenario with_mu({sc.variable(0), sc.variable(1), sc.variable(2), sc.variable(3), sc.variable(4),
                      sc.variable(5), sc.variable(6), VariableSpec{"mu", Role::ontic, nmu, std::nullopt}});

    std::vector<ConditionalKernel<Num>> factors;
    factors.push_back(distribution_kernel<Num>("lambda", spec.p_lambda));
    factors.push_back(distribution_kernel<Num>("mu", spec.p_mu ? *spec.p_mu : std::vector<Num>{Num(1)}));
    factors.push_back(distribution_kernel<Num>("A", spec.p_a));
    factors.push_back(distribution_kernel<Num>("B", spec.p_b));
    if (spec.adaptive_c)
        factors.push_back(*spec.adaptive_c);
    else
        factors.push_back(distribution_kernel<Num>("C", spec.p_c));
    factors.push_back(deterministic_kernel<Num>("X", nx, {"A", "lambda"}, {na, nl}, fx.table));
    factors.push_back(deterministic_kernel<Num>("Y", ny, {"B", "lambda"}, {nb, nl}, fy.table));
    switch (spec.z_source) {
        case ZSource::response_c_lambda:
            factors.push_back(deterministic_kernel<Num>("Z", nz, {"C", "lambda"}, {nc, nl},
                                                        spec.z_response->table));
            break;
        case ZSource::from_c_and_noise:
            factors.push_back(deterministic_kernel<Num>("Z", nz, {"C", "mu"}, {nc, nmu},
                                                        spec.z_response->table));
            break;
        case ZSource::copy_x: {
            std::vector<std::size_t> copy;
            for (std::size_t x = 0; x < nx; ++x) copy.push_back(x);
            factors.push_back(deterministic_kernel<Num>("Z", nz, {"X"}, {nx}, copy));
            break;
        }
        case ZSource::copy_lambda: {
            std::vector<std::size_t> copy;
            for (std::size_t l = 0; l < nl; ++l) copy.push_back(l);
            factors.push_back(deterministic_kernel<Num>("Z", nz, {"lambda"}, {nl}, copy));
            break;
        }
    }

    JointTable<Num> with_noise = compose_product(with_mu, factors);
    std::vector<std::string> keep = {"A", "B", "C", "X", "Y", "Z", "lambda"};
    JointTable<Num> reduced = with_noise.marginalize(keep);
    // rebuild on the canonical scenario so roles and order are exactly canonical
    return JointTable<Num>::trusted(sc, std::vector<Num>(reduced.probabilities()));
}

// Local deterministic hidden-variable model: X = f(A,lambda), Y = g(B,lambda),
// Z = h(C,lambda); settings mutually independent and independent of lambda.
template <class Num>
JointTable<Num> local_deterministic_model(const OntModelSpec<Num>& spec) {
    if (spec.adaptive_c) throw InconsistentSpec("local deterministic model cannot use an adaptive C");
    if (spec.z_source != ZSource::response_c_lambda && spec.z_source != ZSource::copy_lambda)
        throw InconsistentSpec("local deterministic model draws Z from (C, lambda)");
    return build_ont_model(spec);
}

struct PremiseSizes {
    std::size_t a = 2, b = 2, c = 2, x = 2, y = 2, z = 2, lambda = 2, mu = 2;

    static PremiseSizes uniform(std::size_t k) { return {k, k, k, k, k, k, k, k}; }
};

// Random premise-satisfying model: composes
//   P(lambda) P(mu) P(A) P(B) P(C) P(X|A,lambda) P(Y|B,lambda) P(Z|C,mu)
// with flat-simplex random kernels; mu is marginalized out. The structure
// makes the FRprime, NS and ST deviations exactly zero on the exact backend.
template <class Num>
JointTable<Num> premise_model_random(std::uint64_t seed, const PremiseSizes& sizes = {}) {
    Scenario sc = canonical_scenario({sizes.a, sizes.b, sizes.c, sizes.x, sizes.y, sizes.z, sizes.lambda});
    Scenario with_mu({sc.variable(0), sc.variable(1), sc.variable(2), sc.variable(3), sc.variable(4),
                      sc.variable(5), sc.variable(6), VariableSpec{"mu", Role::ontic, sizes.mu, std::nullopt}});
    with_mu.table_size(); // cap check before any sampling

    // fixed kernel order; kernel k uses derive_seed(seed, k)
    std::vector<ConditionalKernel<Num>> factors;
    factors.push_back(random_kernel<Num>(with_mu, {"lambda"}, {}, derive_seed(seed, 0)));
    factors.push_back(random_kernel<Num>(with_mu, {"mu"}, {}, derive_seed(seed, 1)));
    factors.push_back(random_kernel<Num>(with_mu, {"A"}, {}, derive_seed(seed, 2)));
    factors.push_back(random_kernel<Num>(with_mu, {"B"}, {}, derive_seed(seed, 3)));
    factors.push_back(random_kernel<Num>(with_mu, {"C"}, {}, derive_seed(seed, 4)));
    factors.push_back(random_kernel<Num>(with_mu, {"X"}, {"A", "lambda"}, derive_seed(seed, 5)));
    factors.push_back(random_kernel<Num>(with_mu, {"Y"}, {"B", "lambda"}, derive_seed(seed, 6)));
    factors.push_back(random_kernel<Num>(with_mu, {"Z"}, {"C", "mu"}, derive_seed(seed, 7)));

    JointTable<Num> with_noise = compose_product(with_mu, factors);
    std::vector<std::string> keep = {"A", "B", "C", "X", "Y", "Z", "lambda"};
    JointTable<Num> reduced = with_noise.marginalize(keep);
    return JointTable<Num>::trusted(sc, std::vector<Num>(reduced.probabilities()));
}

// C copies A with probability p_copy (else uniform); X = A xor lambda,
// Y = B xor lambda, Z = C. Breaks FR and ST while FRprime and NS stay exact.
template <class Num>
JointTable<Num> adaptive_c_model(const Num& p_copy) {
    if (p_copy < Num(0) || p_copy > Num(1)) throw InvalidProbability("p_copy must lie in [0, 1]");
    const Num half = Num(1) / Num(2);
    OntModelSpec<Num> spec;
    spec.p_a = {half, half};
    spec.p_b = {half, half};
    spec.p_lambda = {half, half};
    spec.x_response = ResponseFunction::xor_response();
    spec.y_response = ResponseFunction::xor_response();
    spec.z_response = ResponseFunction::copy_setting();
    spec.z_source = ZSource::response_c_lambda;
    const Num stray = (Num(1) - p_copy) * half;
    spec.adaptive_c = ConditionalKernel<Num>::from_rows(
        {"C"}, {"A"}, {2}, {2}, {{p_copy + stray, stray}, {stray, p_copy + stray}});
    return build_ont_model(spec);
}

// Dynamic-information model: the ontic readout Z copies the outcome X.
// There is a single dummy readout setting (|C| = 1). FRprime and NS hold by
// construction; ST breaks whenever f is non-constant.
template <class Num>
JointTable<Num> outcome_revealing_model(const ResponseFunction& f) {
    if (f.setting_size != 2 || f.ontic_size != 2)
        throw InconsistentSpec("outcome-revealing model expects a binary (A, lambda) response");
    const Num half = Num(1) / Num(2);
    OntModelSpec<Num> spec;
    spec.p_a = {half, half};
    spec.p_b = {half, half};
    spec.p_c = {Num(1)};
    spec.p_lambda = {half, half};
    spec.x_response = f;
    spec.y_response = ResponseFunction::xor_response();
    spec.z_source = ZSource::copy_x;
    return build_ont_model(spec);
}

// Joint over {A,B,X,Y} from a settings-conditional kernel and independent
// uniform settings.
template <class Num>
JointTable<Num> box_with_uniform_settings(const ConditionalKernel<Num>& box) {
    std::size_t na = box.given_sizes[0], nb = box.given_sizes[1];
    std::size_t nx = box.target_sizes[0], ny = box.target_sizes[1];
    Scenario sc({{"A", Role::setting, na, std::nullopt},
                 {"B", Role::setting, nb, std::nullopt},
                 {"X", Role::outcome, nx, std::nullopt},
                 {"Y", Role::outcome, ny, std::nullopt}});
    std::vector<ConditionalKernel<Num>> factors;
    factors.push_back(distribution_kernel<Num>("A", std::vector<Num>(na, Num(1) / Num(na))));
    factors.push_back(distribution_kernel<Num>("B", std::vector<Num>(nb, Num(1) / Num(nb))));
    factors.push_back(box);
    return compose_product(sc, factors);
}

} // namespace ontolab
