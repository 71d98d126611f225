// Copyright 2026 The qmcs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Szegedy walks, coherent Gibbs samples, approximate reflections and warm
 * starts.
 *
 * Two modes are provided. exact_sim builds the phase-estimation reflection
 * from controlled powers of the walk and simulates the full state of the
 * system, edge and ancilla registers. idealized applies the exact reflection
 * and charges the walk-step cost to the ledger.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmcs/core.hpp"
#include "qmcs/gibbs.hpp"
#include "qmcs/markov.hpp"

namespace qmcs {

using cplx = std::complex<double>;

inline constexpr std::size_t kMaxWalkStates = 64;
inline constexpr std::size_t kMaxRegisterSize = std::size_t{1} << 24;

struct QuantumSample {
    std::vector<double> amplitudes;
};

/// |pi> with amplitudes sqrt(pi(x)).
inline QuantumSample quantum_sample_state(const GibbsModel &m, double beta) {
    const auto p = gibbs_distribution(m, beta);
    QuantumSample s;
    s.amplitudes.reserve(p.size());
    for (const double v : p) {
        s.amplitudes.push_back(std::sqrt(v));
    }
    return s;
}

inline double inner_product(const QuantumSample &a, const QuantumSample &b) {
    require(a.amplitudes.size() == b.amplitudes.size(), "inner_product: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
        s += a.amplitudes[i] * b.amplitudes[i];
    }
    return s;
}

/**
 * W = S (2 Pi - I) on the edge space C^N (x) C^N, where Pi projects onto
 * span{|x>|p_x>}, |p_x> = sum_y sqrt(P(x,y)) |y> and S swaps the registers.
 */
struct WalkOperator {
    Eigen::MatrixXd W;
    std::size_t n_states = 0;

    [[nodiscard]] double unitarity_residual() const {
        const auto d = W.rows();
        return (W.transpose() * W - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
    }

    /// Eigenphases in (-pi, pi], sorted ascending.
    [[nodiscard]] std::vector<double> eigenphases() const {
        const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(W.cast<cplx>(), false);
        std::vector<double> th;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            th.push_back(std::arg(es.eigenvalues()(i)));
        }
        std::sort(th.begin(), th.end());
        return th;
    }
};

/// Unit vectors sqrt(P(x, .)), one row per x.
inline Eigen::MatrixXd transition_roots(const MarkovChain &c) {
    const auto n = static_cast<Eigen::Index>(c.size());
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t x = 0; x < c.size(); ++x) {
        for (const auto &[y, p] : c.rows[x]) {
            R(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) += p;
        }
    }
    return R.cwiseSqrt();
}

/**
 * @throws std::invalid_argument above 64 states.
 * @throws ContractViolation for a non-ergodic chain.
 */
inline WalkOperator szegedy_walk(const MarkovChain &c) {
    require(c.size() <= kMaxWalkStates, "szegedy_walk: at most 64 states");
    chain_spectrum(c);
    const auto n = static_cast<Eigen::Index>(c.size());
    const Eigen::MatrixXd R = transition_roots(c);
    const Eigen::Index d = n * n;
    Eigen::MatrixXd Pi = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index x = 0; x < n; ++x) {
        Pi.block(x * n, x * n, n, n) = R.row(x).transpose() * R.row(x);
    }
    Eigen::MatrixXd refl = 2.0 * Pi - Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd W(d, d);
    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y = 0; y < n; ++y) {
            W.row(y * n + x) = refl.row(x * n + y);
        }
    }
    return {W, c.size()};
}

/// Discriminant eigenvalues other than the top one, descending.
inline std::vector<double> nontrivial_discriminant_spectrum(const MarkovChain &c) {
    auto ev = chain_spectrum(c).eigenvalues;
    ev.erase(ev.begin());
    return ev;
}

/// Smallest nonzero walk eigenphase, in turns.
inline double phase_gap_turns(const MarkovChain &c) {
    const auto ev = nontrivial_discriminant_spectrum(c);
    if (ev.empty()) {
        return 0.5;
    }
    return std::acos(std::clamp(ev.front(), -1.0, 1.0)) / (2.0 * kPi);
}

/// Ancilla qubits for a phase-estimation reflection with error eps_r.
inline int ancilla_bits(double gap_turns, double eps_r) {
    require(gap_turns > 0.0 && eps_r > 0.0, "ancilla_bits: gap and eps_r must be > 0");
    return static_cast<int>(std::ceil(std::log2(1.0 / gap_turns))) +
           static_cast<int>(std::ceil(std::log2(1.0 / eps_r))) + 2;
}

/// |(1/M) sum_a e^{i a theta}|.
inline double fejer_amplitude(double theta, std::uint64_t M) {
    const double s = std::sin(theta / 2.0);
    if (std::abs(s) < 1e-300) {
        return 1.0;
    }
    return std::abs(std::sin(static_cast<double>(M) * theta / 2.0) /
                    (static_cast<double>(M) * s));
}

enum class ReflectionMode { exact_sim, idealized };

inline std::string to_string(ReflectionMode m) {
    return m == ReflectionMode::exact_sim ? "exact_sim" : "idealized";
}

struct ReflectionSpec {
    double epsilon_r;
    int b = 0;
    ReflectionMode mode = ReflectionMode::idealized;
    double c_r = 1.0;
    bool inject_error = false;
};

/**
 * Joint state of the system register X (dim nx), edge register E (dim ne)
 * and ancilla register A (dim na). Index (x * ne + e) * na + a.
 */
struct Register {
    std::size_t nx = 1;
    std::size_t ne = 1;
    std::size_t na = 1;
    std::vector<cplx> amp;

    static Register product(const std::vector<cplx> &system, std::size_t ne, std::size_t na) {
        Register r{system.size(), ne, na, {}};
        require(r.nx * ne * na <= kMaxRegisterSize, "register: exceeds 2^24 amplitudes");
        r.amp.assign(r.nx * ne * na, cplx{0.0, 0.0});
        for (std::size_t x = 0; x < r.nx; ++x) {
            r.amp[x * ne * na] = system[x];
        }
        return r;
    }

    [[nodiscard]] double norm() const {
        double s = 0.0;
        for (const auto &z : amp) {
            s += std::norm(z);
        }
        return std::sqrt(s);
    }
};

inline double distance(const Register &a, const Register &b) {
    require(a.amp.size() == b.amp.size(), "distance: register mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.amp.size(); ++i) {
        s += std::norm(a.amp[i] - b.amp[i]);
    }
    return std::sqrt(s);
}

/// Distance up to a global phase: sqrt(2 - 2 |<a|b>|) for unit vectors.
inline double phase_aligned_distance(const Register &a, const Register &b) {
    require(a.amp.size() == b.amp.size(), "distance: register mismatch");
    cplx ip = 0.0;
    for (std::size_t i = 0; i < a.amp.size(); ++i) {
        ip += std::conj(a.amp[i]) * b.amp[i];
    }
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::abs(ip)));
}

namespace detail {

inline void walsh_hadamard(cplx *v, std::size_t n) {
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                const cplx a = v[j];
                const cplx b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
    }
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        v[i] *= s;
    }
}

} // namespace detail

/**
 * Selective phase about |pi>: I - (1 - e^{i phi}) |pi><pi|, phi = pi giving
 * the reflection I - 2|pi><pi|.
 *
 * In exact_sim mode the operator is U^dag H_A CW^dag P_phi CW H_A U, with U
 * preparing |p_x> in the edge register, CW = sum_a W^a (x) |a><a| and
 * P_phi the phase on the uniform ancilla state.
 */
class ReflectionOperator {
  public:
    ReflectionOperator(const MarkovChain &c, ReflectionSpec spec)
        : spec_(spec), n_(c.size()) {
        require(spec.epsilon_r > 0.0, "reflection: epsilon_r must be > 0");
        const auto cs = chain_spectrum(c);
        tau_ = cs.tau;
        pi_ = c.pi;
        gap_ = phase_gap_turns(c);
        if (spec_.mode == ReflectionMode::idealized) {
            return;
        }
        require(n_ <= kMaxWalkStates, "reflection: exact_sim needs at most 64 states");
        if (spec_.b <= 0) {
            spec_.b = ancilla_bits(gap_, spec_.epsilon_r);
        }
        require(spec_.b <= 24, "reflection: ancilla register too large");
        M_ = std::uint64_t{1} << spec_.b;
        require(n_ * n_ * M_ <= kMaxRegisterSize, "reflection: exact_sim state exceeds 2^24 amplitudes");
        roots_ = transition_roots(c);
        const auto walk = szegedy_walk(c);
        const Eigen::ComplexSchur<Eigen::MatrixXcd> schur(walk.W.cast<cplx>());
        Q_ = schur.matrixU();
        const auto &T = schur.matrixT();
        for (Eigen::Index k = 0; k < T.rows(); ++k) {
            theta_.push_back(std::arg(T(k, k)));
        }
        discriminant_ = nontrivial_discriminant_spectrum(c);
    }

    [[nodiscard]] const ReflectionSpec &spec() const { return spec_; }
    [[nodiscard]] double tau() const { return tau_; }
    [[nodiscard]] double gap_turns() const { return gap_; }
    [[nodiscard]] std::uint64_t ancilla_dim() const { return M_; }
    [[nodiscard]] std::size_t n_states() const { return n_; }

    /// Walk steps charged per application.
    [[nodiscard]] std::uint64_t walk_cost() const {
        if (spec_.mode == ReflectionMode::exact_sim) {
            return 2 * (M_ - 1);
        }
        return static_cast<std::uint64_t>(
            std::ceil(spec_.c_r * std::sqrt(tau_) * std::log(1.0 / spec_.epsilon_r)));
    }

    /// Worst error on clean-ancilla inputs: 2 max |alpha(theta)| over the
    /// nontrivial walk phases (exact_sim), zero when idealized.
    [[nodiscard]] double realized_error() const {
        if (spec_.mode == ReflectionMode::idealized) {
            return spec_.inject_error ? spec_.epsilon_r : 0.0;
        }
        double worst = 0.0;
        for (const double l : discriminant_) {
            worst = std::max(worst, fejer_amplitude(std::acos(std::clamp(l, -1.0, 1.0)), M_));
        }
        return 2.0 * worst;
    }

    /// Apply the selective phase phi in place, charging the ledger.
    template <typename Rng_>
    void apply(Register &r, double phi, QueryLedger &ledger, Rng_ *rng = nullptr) const {
        require(r.nx == n_, "reflection: system register size mismatch");
        ledger.reflection_uses += 1;
        ledger.walk_steps += walk_cost();
        if (spec_.mode == ReflectionMode::idealized) {
            apply_ideal(r, phi);
            if (spec_.inject_error) {
                require(rng != nullptr, "reflection: error injection needs an rng");
                inject(r, *rng);
            }
            return;
        }
        require(r.ne == n_ && r.na == M_, "reflection: register does not match exact_sim layout");
        apply_exact(r, phi);
    }

    void apply(Register &r, double phi, QueryLedger &ledger) const {
        apply<Rng>(r, phi, ledger, nullptr);
    }

    /// The ideal operator on any register (acts on X, identity elsewhere).
    void apply_ideal(Register &r, double phi) const {
        const std::size_t stride = r.ne * r.na;
        const cplx factor = cplx{1.0, 0.0} - std::polar(1.0, phi);
        for (std::size_t k = 0; k < stride; ++k) {
            cplx ip = 0.0;
            for (std::size_t x = 0; x < n_; ++x) {
                ip += std::sqrt(pi_[x]) * r.amp[x * stride + k];
            }
            for (std::size_t x = 0; x < n_; ++x) {
                r.amp[x * stride + k] -= factor * ip * std::sqrt(pi_[x]);
            }
        }
    }

  private:
    template <typename Rng_>
    void inject(Register &r, Rng_ &rng) const {
        std::vector<cplx> xi(r.amp.size());
        double s = 0.0;
        for (auto &z : xi) {
            const double u1 = std::max(rng.uniform(), 1e-300);
            const double u2 = rng.uniform();
            const double rad = std::sqrt(-2.0 * std::log(u1));
            z = cplx{rad * std::cos(2 * kPi * u2), rad * std::sin(2 * kPi * u2)};
            s += std::norm(z);
        }
        const double scale = spec_.epsilon_r / std::sqrt(s);
        for (std::size_t i = 0; i < xi.size(); ++i) {
            r.amp[i] += scale * xi[i];
        }
    }

    void prepare_edges(Register &r) const {
        const std::size_t n = n_;
        const std::size_t M = r.na;
        std::vector<double> w(n);
        for (std::size_t x = 0; x < n; ++x) {
            for (std::size_t e = 0; e < n; ++e) {
                w[e] = (e == 0 ? 1.0 : 0.0) - roots_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(e));
            }
            double ww = 0.0;
            for (const double v : w) {
                ww += v * v;
            }
            if (ww < 1e-28) {
                continue;
            }
            for (std::size_t a = 0; a < M; ++a) {
                cplx dot = 0.0;
                for (std::size_t e = 0; e < n; ++e) {
                    dot += w[e] * r.amp[(x * n + e) * M + a];
                }
                dot *= 2.0 / ww;
                for (std::size_t e = 0; e < n; ++e) {
                    r.amp[(x * n + e) * M + a] -= dot * w[e];
                }
            }
        }
    }

    void apply_exact(Register &r, double phi) const {
        const std::size_t d = n_ * n_;
        const std::size_t M = r.na;
        prepare_edges(r);
        for (std::size_t s = 0; s < d; ++s) {
            detail::walsh_hadamard(&r.amp[s * M], M);
        }
        std::vector<cplx> eig(d * M, cplx{0.0, 0.0});
        for (std::size_t k = 0; k < d; ++k) {
            for (std::size_t s = 0; s < d; ++s) {
                const cplx q = std::conj(Q_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k)));
                if (q == cplx{0.0, 0.0}) {
                    continue;
                }
                for (std::size_t a = 0; a < M; ++a) {
                    eig[k * M + a] += q * r.amp[s * M + a];
                }
            }
        }
        const cplx factor = cplx{1.0, 0.0} - std::polar(1.0, phi);
        const double inv_m = 1.0 / static_cast<double>(M);
        for (std::size_t k = 0; k < d; ++k) {
            cplx proj = 0.0;
            for (std::size_t a = 0; a < M; ++a) {
                proj += std::polar(1.0, static_cast<double>(a) * theta_[k]) * eig[k * M + a];
            }
            const cplx shift = factor * proj * inv_m;
            for (std::size_t a = 0; a < M; ++a) {
                eig[k * M + a] -= shift * std::polar(1.0, -static_cast<double>(a) * theta_[k]);
            }
        }
        for (std::size_t s = 0; s < d; ++s) {
            for (std::size_t a = 0; a < M; ++a) {
                r.amp[s * M + a] = 0.0;
            }
            for (std::size_t k = 0; k < d; ++k) {
                const cplx q = Q_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k));
                if (q == cplx{0.0, 0.0}) {
                    continue;
                }
                for (std::size_t a = 0; a < M; ++a) {
                    r.amp[s * M + a] += q * eig[k * M + a];
                }
            }
        }
        for (std::size_t s = 0; s < d; ++s) {
            detail::walsh_hadamard(&r.amp[s * M], M);
        }
        prepare_edges(r);
    }

    ReflectionSpec spec_;
    std::size_t n_;
    double tau_ = 1.0;
    double gap_ = 0.5;
    std::vector<double> pi_;
    std::uint64_t M_ = 1;
    Eigen::MatrixXd roots_;
    Eigen::MatrixXcd Q_;
    std::vector<double> theta_;
    std::vector<double> discriminant_;
};

/// The operator 2|pi><pi| - I approximated as `spec` asks, as a reusable object.
inline ReflectionOperator approx_reflection(const MarkovChain &c, const ReflectionSpec &spec) {
    return ReflectionOperator(c, spec);
}

/// Apply 2|pi><pi| - I (the negated phase-pi operator) once.
template <typename Rng_ = Rng>
void reflect(const ReflectionOperator &op, Register &r, QueryLedger &ledger, Rng_ *rng = nullptr) {
    op.apply(r, kPi, ledger, rng);
    for (auto &z : r.amp) {
        z = -z;
    }
}

struct WarmStartOptions {
    double c_s = 1.0;
    double B = 0.0;
};

struct WarmStartResult {
    QuantumSample state;
    double error = 0.0;
    int stages = 0;
    std::vector<int> fixed_point_depth;
    std::uint64_t reflections = 0;
    int ancilla_bits = 0;
    double epsilon_r = 0.0;
};

/// Grover pi/3 depth: smallest m with (1 - p)^{3^m} <= eta^2.
inline int fixed_point_depth(double p, double eta) {
    require(p > 0.0 && p <= 1.0, "fixed_point_depth: overlap must be in (0, 1]");
    int m = 0;
    double fail = 1.0 - p;
    while (fail > eta * eta) {
        fail = fail * fail * fail;
        ++m;
        require(m < 40, "fixed_point_depth: diverged");
    }
    return m;
}

/// Reflections used by depth-m fixed-point amplification.
inline std::uint64_t fixed_point_reflections(int m) {
    std::uint64_t L = 0;
    for (int i = 0; i < m; ++i) {
        L = 3 * L + 2;
    }
    return L;
}

/**
 * Prepare |pi_i> along the schedule betas[0..i] with error eps_s.
 *
 * idealized returns the exact state and charges
 * ceil(c_s i sqrt(tau) ln^2(i/eps_s) B ln B) walk steps, tau being the
 * largest relaxation time among the finite-temperature chains.
 * exact_sim runs Grover pi/3 fixed-point amplification from |pi_{j-1}> to
 * |pi_j> for each stage with phase-estimation reflections and reports the
 * measured error.
 *
 * @throws ContractViolation if some consecutive squared overlap is below 1/B.
 */
inline WarmStartResult warm_start_prepare(const GibbsModel &m, const std::vector<double> &betas,
                                          std::size_t i, double eps_s, ReflectionMode mode,
                                          QueryLedger &ledger, const WarmStartOptions &opt = {}) {
    require(i < betas.size(), "warm_start: target index out of range");
    require(eps_s > 0.0 && eps_s < 1.0, "warm_start: eps_s must be in (0, 1)");
    require(betas.front() == 0.0, "warm_start: schedule must start at beta = 0");
    WarmStartResult out;
    out.state = quantum_sample_state(m, betas[i]);
    out.stages = static_cast<int>(i);
    if (i == 0) {
        return out;
    }
    std::vector<double> overlaps;
    for (std::size_t j = 1; j <= i; ++j) {
        overlaps.push_back(overlap_squared(m, betas[j - 1], betas[j]));
        if (opt.B > 0.0 && overlaps.back() < 1.0 / opt.B - 1e-12) {
            throw ContractViolation("warm_start: squared overlap below 1/B");
        }
    }
    const double r = static_cast<double>(i);
    if (mode == ReflectionMode::idealized) {
        double tau = 1.0;
        for (std::size_t j = 0; j <= i; ++j) {
            if (std::isfinite(betas[j])) {
                tau = std::max(tau, relaxation_time(model_chain(m, betas[j])));
            }
        }
        double B = opt.B;
        if (B <= 0.0) {
            B = 1.0 / *std::min_element(overlaps.begin(), overlaps.end());
        }
        const double lg = std::log(r / eps_s);
        ledger.walk_steps += static_cast<std::uint64_t>(
            std::ceil(opt.c_s * r * std::sqrt(tau) * lg * lg * B * std::log(B)));
        return out;
    }

    const double eta = eps_s / (2.0 * r);
    std::vector<int> depth;
    std::uint64_t L_max = 0;
    for (const double p : overlaps) {
        depth.push_back(fixed_point_depth(p, eta));
        L_max = std::max(L_max, fixed_point_reflections(depth.back()));
    }
    const double eps_r = eps_s / (2.0 * r * static_cast<double>(std::max<std::uint64_t>(L_max, 1)));
    std::vector<ReflectionOperator> ops;
    int bits = 0;
    for (std::size_t j = 0; j <= i; ++j) {
        if (std::isfinite(betas[j])) {
            const auto c = model_chain(m, betas[j]);
            bits = std::max(bits, ancilla_bits(phase_gap_turns(c), eps_r));
        }
    }
    for (std::size_t j = 0; j <= i; ++j) {
        if (std::isfinite(betas[j])) {
            ops.emplace_back(model_chain(m, betas[j]),
                             ReflectionSpec{eps_r, bits, ReflectionMode::exact_sim, 1.0, false});
        }
    }
    const std::size_t n = m.size();
    const std::size_t M = std::size_t{1} << bits;
    std::vector<cplx> start(n);
    const auto s0 = quantum_sample_state(m, betas[0]);
    for (std::size_t x = 0; x < n; ++x) {
        start[x] = s0.amplitudes[x];
    }
    Register reg = Register::product(start, n, M);
    const double third = kPi / 3.0;
    std::uint64_t used = 0;
    for (std::size_t j = 1; j <= i; ++j) {
        const auto &source = ops[j - 1];
        const bool target_ground = !std::isfinite(betas[j]);
        const auto target = [&](double phi) {
            ++used;
            if (target_ground) {
                ledger.reflection_uses += 1;
                const std::size_t stride = reg.ne * reg.na;
                const cplx ph = std::polar(1.0, phi);
                for (std::size_t x = 0; x < n; ++x) {
                    if (m.energy[x] == 0) {
                        for (std::size_t k = 0; k < stride; ++k) {
                            reg.amp[x * stride + k] *= ph;
                        }
                    }
                }
            } else {
                ops[j].apply(reg, phi, ledger);
            }
        };
        const auto src = [&](double phi) {
            ++used;
            source.apply(reg, phi, ledger);
        };
        std::function<void(int, int)> run = [&](int level, int sign) {
            if (level == 0) {
                return;
            }
            run(level - 1, sign);
            if (sign > 0) {
                target(third);
                run(level - 1, -1);
                src(third);
            } else {
                src(-third);
                run(level - 1, 1);
                target(-third);
            }
            run(level - 1, sign);
        };
        run(depth[j - 1], 1);
    }
    std::vector<cplx> goal(n);
    for (std::size_t x = 0; x < n; ++x) {
        goal[x] = out.state.amplitudes[x];
    }
    out.error = phase_aligned_distance(reg, Register::product(goal, n, M));
    out.fixed_point_depth = depth;
    out.reflections = used;
    out.ancilla_bits = bits;
    out.epsilon_r = eps_r;
    return out;
}

} // namespace qmcs
