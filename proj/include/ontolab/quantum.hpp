#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "ontolab/kernel.hpp"

namespace ontolab {

// Pure two-qubit state, amplitudes in the computational basis
// (|00>, |01>, |10>, |11>).
struct TwoQubitState {
    std::array<std::complex<double>, 4> amplitudes;

    static TwoQubitState make(std::array<std::complex<double>, 4> a) {
        double n = 0.0;
        for (const auto& c : a) n += std::norm(c);
        if (std::abs(n - 1.0) > 1e-12) throw NotNormalizedState("state norm^2 deviates from 1");
        return TwoQubitState{a};
    }

    static TwoQubitState singlet() {
        const double s = 1.0 / std::sqrt(2.0);
        return make({0.0, s, -s, 0.0});
    }

    static TwoQubitState product00() { return make({1.0, 0.0, 0.0, 0.0}); }
};

// Unit vector on the Bloch sphere labeling a projective measurement.
struct BlochSetting {
    std::array<double, 3> n;

    static BlochSetting make(double x, double y, double z) {
        double len = std::sqrt(x * x + y * y + z * z);
        if (std::abs(len - 1.0) > 1e-12) throw NotUnitSetting("setting vector is not unit length");
        return BlochSetting{{x, y, z}};
    }

    static BlochSetting zhat() { return BlochSetting{{0.0, 0.0, 1.0}}; }
    static BlochSetting xhat() { return BlochSetting{{1.0, 0.0, 0.0}}; }

    double dot(const BlochSetting& o) const { return n[0] * o.n[0] + n[1] * o.n[1] + n[2] * o.n[2]; }
};

namespace detail {

using C2x2 = std::array<std::complex<double>, 4>; // row major

// (I + s n.sigma)/2 for outcome sign s
inline C2x2 bloch_projector(const BlochSetting& a, int sign) {
    const std::complex<double> i(0.0, 1.0);
    double s = static_cast<double>(sign);
    return {std::complex<double>(0.5 * (1.0 + s * a.n[2])), 0.5 * s * (a.n[0] - i * a.n[1]),
            0.5 * s * (a.n[0] + i * a.n[1]), std::complex<double>(0.5 * (1.0 - s * a.n[2]))};
}

// apply M on the given qubit of a two-qubit vector
inline std::array<std::complex<double>, 4> apply_local(const C2x2& m, int qubit,
                                                       const std::array<std::complex<double>, 4>& v) {
    std::array<std::complex<double>, 4> out{};
    if (qubit == 0) {
        // index = 2*q0 + q1
        for (int q1 = 0; q1 < 2; ++q1) {
            out[0 + q1] = m[0] * v[0 + q1] + m[1] * v[2 + q1];
            out[2 + q1] = m[2] * v[0 + q1] + m[3] * v[2 + q1];
        }
    } else {
        for (int q0 = 0; q0 < 2; ++q0) {
            out[2 * q0 + 0] = m[0] * v[2 * q0 + 0] + m[1] * v[2 * q0 + 1];
            out[2 * q0 + 1] = m[2] * v[2 * q0 + 0] + m[3] * v[2 * q0 + 1];
        }
    }
    return out;
}

} // namespace detail

// Outcome index convention everywhere: index 0 <-> +1, index 1 <-> -1.
inline int outcome_sign(std::size_t index) { return index == 0 ? +1 : -1; }

// Born-rule kernel P(X,Y | A,B) for projective measurements along the given
// Bloch directions. Float backend only.
inline ConditionalKernel<double> two_qubit_kernel(const TwoQubitState& state,
                                                  const std::vector<BlochSetting>& a_settings,
                                                  const std::vector<BlochSetting>& b_settings) {
    if (a_settings.empty() || b_settings.empty()) throw ShapeMismatch("empty setting list");
    std::size_t na = a_settings.size(), nb = b_settings.size();
    std::vector<std::vector<double>> rows;
    rows.reserve(na * nb);
    for (std::size_t ai = 0; ai < na; ++ai) {
        for (std::size_t bi = 0; bi < nb; ++bi) {
            std::vector<double> row(4, 0.0);
            for (std::size_t xi = 0; xi < 2; ++xi) {
                auto pa = detail::bloch_projector(a_settings[ai], outcome_sign(xi));
                auto va = detail::apply_local(pa, 0, state.amplitudes);
                for (std::size_t yi = 0; yi < 2; ++yi) {
                    auto pb = detail::bloch_projector(b_settings[bi], outcome_sign(yi));
                    auto v = detail::apply_local(pb, 1, va);
                    std::complex<double> ip(0.0, 0.0);
                    for (int k = 0; k < 4; ++k) ip += std::conj(state.amplitudes[k]) * v[k];
                    row[xi * 2 + yi] = std::max(0.0, ip.real());
                }
            }
            rows.push_back(std::move(row));
        }
    }
    return ConditionalKernel<double>::from_rows({"X", "Y"}, {"A", "B"}, {2, 2}, {na, nb},
                                                std::move(rows));
}

// E(a,b) = sum_{x,y} sign(x) sign(y) P(x,y|a,b)
template <class Num>
Num correlator(const ConditionalKernel<Num>& k, std::size_t a, std::size_t b) {
    std::size_t nb = k.given_sizes[1];
    const auto& row = k.rows[a * nb + b];
    Num e(0);
    for (std::size_t xi = 0; xi < 2; ++xi)
        for (std::size_t yi = 0; yi < 2; ++yi) {
            Num term = row[xi * 2 + yi];
            e += (outcome_sign(xi) * outcome_sign(yi) > 0) ? term : Num(-term);
        }
    return e;
}

// E(0,0) + E(0,1) + E(1,0) - E(1,1) over a 2x2-setting, binary-outcome kernel.
template <class Num>
Num chsh_value(const ConditionalKernel<Num>& k) {
    if (k.givens.size() != 2 || k.targets.size() != 2 || k.given_sizes[0] != 2 || k.given_sizes[1] != 2 ||
        k.target_sizes[0] != 2 || k.target_sizes[1] != 2)
        throw ShapeMismatch("CHSH needs two binary settings and two binary outcomes");
    return correlator(k, 0, 0) + correlator(k, 0, 1) + correlator(k, 1, 0) - correlator(k, 1, 1);
}

// P(x,y|a,b) = 1/2 when x XOR y = a AND b, else 0.
template <class Num>
ConditionalKernel<Num> pr_box_kernel() {
    std::vector<std::vector<Num>> rows;
    const Num half = Num(1) / Num(2);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
            std::vector<Num> row(4, Num(0));
            for (std::size_t x = 0; x < 2; ++x)
                for (std::size_t y = 0; y < 2; ++y)
                    if (((x + y) % 2) == (a & b)) row[x * 2 + y] = half;
            rows.push_back(std::move(row));
        }
    return ConditionalKernel<Num>::from_rows({"X", "Y"}, {"A", "B"}, {2, 2}, {2, 2}, std::move(rows));
}

// Settings at which the singlet reaches the Tsirelson value +2*sqrt(2)
// under the sign convention above.
struct ChshSettings {
    std::vector<BlochSetting> a;
    std::vector<BlochSetting> b;
};

inline ChshSettings chsh_demo_settings() {
    const double s = 1.0 / std::sqrt(2.0);
    return {{BlochSetting::zhat(), BlochSetting::xhat()},
            {BlochSetting::make(-s, 0.0, -s), BlochSetting::make(s, 0.0, -s)}};
}

} // namespace ontolab
