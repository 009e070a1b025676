#pragma once
// Multi-start gradient search for K weighted-orthogonal unitaries at a given
// spectrum, with closed-form infeasibility certificates, a descending max-K
// prober, and a d=3 simplex scanner.
//
// Determinism contract: every restart derives its RNG stream from (seed,
// restart index) alone, the winner is the lowest-index successful restart, and
// scan rows follow grid order. Results do not depend on thread scheduling.

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ddc/bounds.hpp"
#include "ddc/coding.hpp"
#include "ddc/constructions.hpp"
#include "ddc/errors.hpp"
#include "ddc/linalg.hpp"

namespace ddc {

struct SearchConfig {
    std::size_t target_k = 0;
    std::vector<UnitaryMatrix> pinned; // members held fixed; empty means pin I
    std::size_t restarts = 32;
    std::size_t max_iters = 5000;
    double success_residual = 1e-6; // on the max pairwise weighted trace
    std::uint64_t seed = 0;
    std::size_t threads = 0; // 0 = hardware concurrency
};

struct SearchReport {
    bool success = false;
    std::optional<EncodingFamily> family;
    double final_residual = std::numeric_limits<double>::infinity();
    std::vector<double> objective_trace; // winning restart, one value per iteration
    std::size_t iterations_used = 0;
    std::size_t restarts_used = 0;
    std::uint64_t seed = 0;
    bool certified = false;  // infeasibility proven by a closed-form bound
    std::string certificate; // which bound fired; empty when not certified
};

/// Sum of squared off-diagonal weighted traces; zero exactly at a solution.
inline double objective(const EncodingFamily& f) {
    double sum = 0.0;
    for (std::size_t a = 0; a < f.k(); ++a)
        for (std::size_t b = a + 1; b < f.k(); ++b)
            sum += std::norm(lambda_gram(f.unitary(a), f.unitary(b), f.spectrum()));
    return sum;
}

namespace detail {

// splitmix64 finalizer; decorrelates per-restart streams
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline cx gram_raw(const ComplexMatrix& a, const ComplexMatrix& b, const std::vector<double>& lambdas) {
    const std::size_t d = lambdas.size();
    cx g{0.0, 0.0};
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i) g += lambdas[j] * std::conj(a(i, j)) * b(i, j);
    return g;
}

struct ObjectiveValue {
    double f;
    double max_pair;
};

inline ObjectiveValue objective_raw(const std::vector<ComplexMatrix>& members,
                                    const std::vector<double>& lambdas) {
    ObjectiveValue v{0.0, 0.0};
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            const double m = std::abs(gram_raw(members[a], members[b], lambdas));
            v.f += m * m;
            v.max_pair = std::max(v.max_pair, m);
        }
    return v;
}

// Hermitian H from d^2 reals: d diagonal entries, then (x, y) with
// H_pq = x + iy for each p < q in row-major order.
inline ComplexMatrix hermitian_from_params(const double* theta, std::size_t d) {
    ComplexMatrix h(d, d);
    for (std::size_t l = 0; l < d; ++l) h(l, l) = cx{theta[l], 0.0};
    std::size_t idx = d;
    for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = p + 1; q < d; ++q) {
            const double x = theta[idx++];
            const double y = theta[idx++];
            h(p, q) = cx{x, y};
            h(q, p) = cx{x, -y};
        }
    return h;
}

// dF/dtheta at theta = 0 for members[first_free..), each parametrized as
// U exp(iH(theta)). For member c the pair sums collapse into
// M_c = sum_{e != c} conj(g_ce) (U_c^dagger U_e Lambda), giving
//   diagonal l:   2 Im M_ll
//   x at (p,q):   2 Im (M_pq + M_qp)
//   y at (p,q):   2 Re (M_qp - M_pq)
inline std::vector<double> gradient_raw(const std::vector<ComplexMatrix>& members,
                                        const std::vector<double>& lambdas,
                                        std::size_t first_free) {
    const std::size_t k = members.size();
    const std::size_t d = lambdas.size();
    std::vector<cx> grams(k * k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
            grams[a * k + b] = gram_raw(members[a], members[b], lambdas);
            grams[b * k + a] = std::conj(grams[a * k + b]);
        }

    std::vector<double> grad((k - first_free) * d * d, 0.0);
    for (std::size_t c = first_free; c < k; ++c) {
        ComplexMatrix mc(d, d);
        const ComplexMatrix uc_adj = adjoint(members[c]);
        for (std::size_t e = 0; e < k; ++e) {
            if (e == c) continue;
            const cx w = std::conj(grams[c * k + e]);
            const ComplexMatrix prod = matmul(uc_adj, members[e]);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) mc(i, j) += w * prod(i, j) * lambdas[j];
        }
        double* out = grad.data() + (c - first_free) * d * d;
        for (std::size_t l = 0; l < d; ++l) out[l] = 2.0 * mc(l, l).imag();
        std::size_t idx = d;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) {
                out[idx++] = 2.0 * (mc(p, q) + mc(q, p)).imag();
                out[idx++] = 2.0 * (mc(q, p) - mc(p, q)).real();
            }
    }
    return grad;
}

// Dense symmetric solve by Gaussian elimination with partial pivoting.
// Returns false when the pivot collapses (singular system).
inline bool solve_dense(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > best) {
                best = std::abs(a[r * n + col]);
                pivot = r;
            }
        if (best < 1e-300) return false;
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[pivot * n + j], a[col * n + j]);
            std::swap(b[pivot], b[col]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = a[r * n + col] * inv;
            if (factor == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a[r * n + j] -= factor * a[col * n + j];
            b[r] -= factor * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= a[i * n + i];
    return true;
}

// Jacobian of the complex pair residuals g_ab with respect to the chart
// parameters of the free members, as a (2*pairs) x P real matrix. Row layout:
// Re then Im per pair; columns follow the per-member parameter order.
inline void pair_jacobian(const std::vector<ComplexMatrix>& members,
                          const std::vector<double>& lambdas, std::size_t first_free,
                          std::vector<double>& jac, std::vector<double>& res) {
    const std::size_t k = members.size();
    const std::size_t d = lambdas.size();
    const std::size_t params_per = d * d;
    const std::size_t n_free = k - first_free;
    const std::size_t p_total = n_free * params_per;
    std::size_t n_pairs = 0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) ++n_pairs;
    jac.assign(2 * n_pairs * p_total, 0.0);
    res.assign(2 * n_pairs, 0.0);

    // dg for a chart direction E of member a is -i tr(E A) with A = Ua^dag Ub La;
    // for member b it is +i tr(E B) with B = La Ua^dag Ub.
    const auto fill = [&](double* row_re, double* row_im, const ComplexMatrix& t, std::size_t member,
                          cx sign_i) {
        if (member < first_free) return;
        double* re = row_re + (member - first_free) * params_per;
        double* im = row_im + (member - first_free) * params_per;
        for (std::size_t l = 0; l < d; ++l) {
            const cx dg = sign_i * t(l, l);
            re[l] = dg.real();
            im[l] = dg.imag();
        }
        std::size_t idx = d;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) {
                const cx dgx = sign_i * (t(p, q) + t(q, p));
                re[idx] = dgx.real();
                im[idx] = dgx.imag();
                ++idx;
                const cx dgy = sign_i * cx{0.0, 1.0} * (t(q, p) - t(p, q));
                re[idx] = dgy.real();
                im[idx] = dgy.imag();
                ++idx;
            }
    };

    std::size_t pair = 0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b, ++pair) {
            const ComplexMatrix prod = matmul(adjoint(members[a]), members[b]);
            const cx g = [&] {
                cx s{0.0, 0.0};
                for (std::size_t j = 0; j < d; ++j) s += prod(j, j) * lambdas[j];
                return s;
            }();
            res[2 * pair] = g.real();
            res[2 * pair + 1] = g.imag();

            double* row_re = jac.data() + (2 * pair) * p_total;
            double* row_im = jac.data() + (2 * pair + 1) * p_total;
            if (a >= first_free) {
                ComplexMatrix ta(d, d); // Ua^dag Ub La
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j) ta(i, j) = prod(i, j) * lambdas[j];
                fill(row_re, row_im, ta, a, cx{0.0, -1.0});
            }
            if (b >= first_free) {
                ComplexMatrix tb(d, d); // La Ua^dag Ub
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j) tb(i, j) = lambdas[i] * prod(i, j);
                fill(row_re, row_im, tb, b, cx{0.0, 1.0});
            }
        }
}

// Damped least-squares refinement of the pair residuals in the same local
// chart as the descent phase. Quadratic near a solution, which plain descent
// is not when the feasible set sits on a bound's boundary.
template <typename Members>
std::size_t polish_least_squares(Members& members, const std::vector<double>& lambdas,
                                 std::size_t first_free, double stop_objective,
                                 std::size_t max_rounds, ObjectiveValue& cur,
                                 std::vector<double>& trace) {
    const std::size_t k = members.size();
    const std::size_t d = lambdas.size();
    const std::size_t params_per = d * d;
    const std::size_t p_total = (k - first_free) * params_per;
    if (p_total == 0) return 0;

    std::vector<double> jac, res, normal(p_total * p_total), rhs(p_total), delta;
    std::vector<ComplexMatrix> trial(members.begin(), members.end());
    double damping = 1e-6;
    std::size_t rounds = 0;
    for (; rounds < max_rounds && cur.f > stop_objective; ++rounds) {
        pair_jacobian(members, lambdas, first_free, jac, res);
        const std::size_t n_rows = res.size();
        std::fill(normal.begin(), normal.end(), 0.0);
        std::fill(rhs.begin(), rhs.end(), 0.0);
        for (std::size_t r = 0; r < n_rows; ++r) {
            const double* row = jac.data() + r * p_total;
            for (std::size_t i = 0; i < p_total; ++i) {
                if (row[i] == 0.0) continue;
                rhs[i] -= row[i] * res[r];
                for (std::size_t j = i; j < p_total; ++j) normal[i * p_total + j] += row[i] * row[j];
            }
        }
        for (std::size_t i = 0; i < p_total; ++i)
            for (std::size_t j = 0; j < i; ++j) normal[i * p_total + j] = normal[j * p_total + i];

        bool accepted = false;
        for (int attempt = 0; attempt < 16; ++attempt) {
            std::vector<double> a = normal;
            for (std::size_t i = 0; i < p_total; ++i)
                a[i * p_total + i] += damping * (normal[i * p_total + i] + 1e-12);
            delta = rhs;
            if (solve_dense(a, delta, p_total)) {
                for (std::size_t c = first_free; c < k; ++c) {
                    const ComplexMatrix h =
                        hermitian_from_params(delta.data() + (c - first_free) * params_per, d);
                    ComplexMatrix step = matmul(members[c], h);
                    for (std::size_t t = 0; t < step.entries().size(); ++t)
                        step.entries()[t] = members[c].entries()[t] + cx{0.0, 1.0} * step.entries()[t];
                    trial[c] = polar_unitary(step);
                }
                const ObjectiveValue next = objective_raw(trial, lambdas);
                if (next.f < cur.f) {
                    for (std::size_t c = first_free; c < k; ++c) members[c] = trial[c];
                    cur = next;
                    trace.push_back(cur.f);
                    damping = std::max(damping / 3.0, 1e-12);
                    accepted = true;
                    break;
                }
            }
            damping *= 4.0;
        }
        if (!accepted) break;
    }
    return rounds;
}

inline ComplexMatrix random_permutation_matrix(std::size_t d, std::mt19937_64& rng) {
    std::vector<std::size_t> perm(d);
    for (std::size_t i = 0; i < d; ++i) perm[i] = i;
    for (std::size_t i = d; i > 1; --i)
        std::swap(perm[i - 1], perm[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)]);
    ComplexMatrix m(d, d);
    for (std::size_t j = 0; j < d; ++j) m(perm[j], j) = cx{1.0, 0.0};
    return m;
}

struct RestartResult {
    bool success = false;
    double objective = std::numeric_limits<double>::infinity();
    double max_pair = std::numeric_limits<double>::infinity();
    std::vector<ComplexMatrix> members;
    std::vector<double> trace;
    std::size_t iterations = 0;
};

template <typename AbortFn>
RestartResult run_restart(const SchmidtSpectrum& s, const std::vector<UnitaryMatrix>& pinned,
                          std::size_t target_k, std::uint64_t restart_seed, std::size_t max_iters,
                          double success_objective, AbortFn should_abort) {
    const std::size_t d = s.d();
    const std::vector<double>& lambdas = s.lambdas();
    const std::size_t first_free = pinned.size();
    const std::size_t params_per = d * d;

    RestartResult res;
    res.members.reserve(target_k);
    for (const UnitaryMatrix& u : pinned) res.members.push_back(u.mat());

    std::mt19937_64 rng(restart_seed);
    for (std::size_t c = first_free; c < target_k; ++c) {
        // permutations solve the structured cases; bias the first draw there
        if (c == first_free && std::uniform_int_distribution<int>(0, 1)(rng) == 0)
            res.members.push_back(random_permutation_matrix(d, rng));
        else
            res.members.push_back(polar_unitary(random_gaussian(d, d, rng)));
    }

    ObjectiveValue cur = objective_raw(res.members, lambdas);
    if (first_free == target_k) {
        res.trace.push_back(cur.f);
        res.objective = cur.f;
        res.max_pair = cur.max_pair;
        res.success = cur.f <= success_objective;
        return res;
    }

    // The descent phase hands off to the least-squares polish once the basin
    // is reached; descent alone crawls when the solution saturates a bound.
    constexpr double kPolishEntry = 1e-3;
    constexpr double kPolishLateEntry = 1e-2;
    bool aborted = false;

    double alpha = 0.1;
    std::vector<ComplexMatrix> trial = res.members;
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        res.trace.push_back(cur.f);
        if (cur.f <= success_objective || cur.f <= kPolishEntry) break;
        if ((iter & 7u) == 0 && should_abort()) {
            aborted = true;
            break;
        }
        ++res.iterations;

        const std::vector<double> grad = gradient_raw(res.members, lambdas, first_free);
        double gnorm2 = 0.0;
        for (double g : grad) gnorm2 += g * g;
        if (gnorm2 < 1e-24) break; // flat point

        bool accepted = false;
        std::vector<double> theta(params_per);
        while (alpha >= 1e-14) {
            for (std::size_t c = first_free; c < target_k; ++c) {
                const double* slice = grad.data() + (c - first_free) * params_per;
                for (std::size_t t = 0; t < params_per; ++t) theta[t] = -alpha * slice[t];
                const ComplexMatrix h = hermitian_from_params(theta.data(), d);
                // first-order move U(I + iH), re-unitarized exactly
                ComplexMatrix step = matmul(res.members[c], h);
                for (std::size_t t = 0; t < step.entries().size(); ++t)
                    step.entries()[t] = res.members[c].entries()[t] + cx{0.0, 1.0} * step.entries()[t];
                trial[c] = polar_unitary(step);
            }
            const ObjectiveValue next = objective_raw(trial, lambdas);
            if (next.f < cur.f) {
                for (std::size_t c = first_free; c < target_k; ++c) res.members[c] = trial[c];
                cur = next;
                alpha = std::min(alpha * 1.3, 10.0);
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break; // step collapsed: local minimum
    }

    if (!aborted && cur.f > success_objective && cur.f <= kPolishLateEntry)
        res.iterations += polish_least_squares(res.members, lambdas, first_free,
                                               success_objective * 1e-2, 300, cur, res.trace);

    res.trace.push_back(cur.f);
    res.objective = cur.f;
    res.max_pair = cur.max_pair;
    res.success = cur.f <= success_objective;
    return res;
}

inline std::size_t count_distinct_shift_powers(const std::vector<UnitaryMatrix>& pinned,
                                               std::size_t d) {
    std::vector<ComplexMatrix> powers;
    powers.push_back(ComplexMatrix::identity(d));
    const ComplexMatrix x = shift(d).mat();
    for (std::size_t p = 1; p < d; ++p) powers.push_back(matmul(x, powers.back()));
    std::vector<bool> seen(d, false);
    for (const UnitaryMatrix& u : pinned)
        for (std::size_t p = 0; p < d; ++p)
            if (max_abs_diff(u.mat(), powers[p]) <= 1e-12) {
                seen[p] = true;
                break;
            }
    std::size_t m = 0;
    for (bool b : seen) m += b ? 1 : 0;
    return m;
}

}  // namespace detail

/// Analytic dF/dtheta for members past the pinned prefix, evaluated in the
/// local chart U exp(iH(theta)) at theta = 0. Length: (K - pinned) * d^2.
inline std::vector<double> gradient(const EncodingFamily& f, std::size_t pinned_count) {
    if (pinned_count > f.k()) throw InvalidArgument("gradient: pinned count exceeds family size");
    std::vector<ComplexMatrix> mats;
    mats.reserve(f.k());
    for (const UnitaryMatrix& u : f.unitaries()) mats.push_back(u.mat());
    return detail::gradient_raw(mats, f.spectrum().lambdas(), pinned_count);
}

/// Closed-form reason no K-family can exist at this spectrum, or "" when no
/// implemented bound applies. Checked in order: full-size-minus-one uniformity,
/// counting bound, K = d+1 bound, pinned-shift-power bound.
inline std::string infeasibility_certificate(const SchmidtSpectrum& s, std::size_t K,
                                             const std::vector<UnitaryMatrix>& pinned) {
    const std::size_t d = s.d();
    const double l0 = s.lambda0();
    std::ostringstream msg;
    if (K == d * d - 1 && !s.is_uniform(1e-10)) {
        msg << "a family of d^2-1 = " << K << " members forces the uniform spectrum";
        return msg.str();
    }
    if (K >= d && K <= d * d && l0 > wcsg_bound(d, K) + 1e-12) {
        msg << "lambda_0 = " << l0 << " exceeds the counting bound d/K = " << wcsg_bound(d, K);
        return msg.str();
    }
    if (K == d + 1 && l0 > dp1_bound(d) + 1e-12) {
        msg << "lambda_0 = " << l0 << " exceeds the K = d+1 bound " << dp1_bound(d);
        return msg.str();
    }
    if (K >= d + 1 && K <= d * d) {
        const std::size_t m = detail::count_distinct_shift_powers(pinned, d);
        if (m >= 2 && l0 > shift_power_bound(d, K, m) + 1e-12) {
            msg << "lambda_0 = " << l0 << " exceeds the bound " << shift_power_bound(d, K, m)
                << " for " << m << " pinned shift powers";
            return msg.str();
        }
    }
    return "";
}

/// Multi-start descent for a K-member family. Restart i seeds its own RNG from
/// (cfg.seed, i); the lowest-index success wins, so results are reproducible
/// for any thread count. When a closed-form bound proves the target infeasible
/// the optimizer still runs, but the report is forced unsuccessful and carries
/// the certificate.
inline SearchReport find_family(const SchmidtSpectrum& s, const SearchConfig& cfg) {
    const std::size_t d = s.d();
    if (cfg.target_k < 1 || cfg.target_k > d * d)
        throw InvalidArgument("find_family: target_k must lie in [1, d^2]");
    if (cfg.restarts < 1) throw InvalidArgument("find_family: need at least one restart");
    if (cfg.max_iters < 1) throw InvalidArgument("find_family: need at least one iteration");
    if (!(cfg.success_residual > 0.0))
        throw InvalidArgument("find_family: success_residual must be positive");

    std::vector<UnitaryMatrix> pinned = cfg.pinned;
    if (pinned.empty()) pinned.push_back(UnitaryMatrix::identity(d)); // WLOG
    if (pinned.size() > cfg.target_k)
        throw InvalidArgument("find_family: more pinned members than target_k");
    for (const UnitaryMatrix& u : pinned)
        if (u.dim() != d) throw DimensionMismatch("find_family: pinned member dimension mismatch");

    double pin_worst = 0.0;
    for (std::size_t a = 0; a < pinned.size(); ++a)
        for (std::size_t b = a + 1; b < pinned.size(); ++b)
            pin_worst = std::max(pin_worst, std::abs(lambda_gram(pinned[a], pinned[b], s)));
    if (pin_worst > cfg.success_residual)
        throw PinnedNotOrthogonal("find_family: pinned members have residual " +
                                      std::to_string(pin_worst),
                                  pin_worst);

    const std::string certificate = infeasibility_certificate(s, cfg.target_k, pinned);
    const double success_objective = cfg.success_residual * cfg.success_residual;

    const std::size_t n_restarts = cfg.restarts;
    std::vector<detail::RestartResult> results(n_restarts);
    std::vector<char> ran(n_restarts, 0);
    std::atomic<std::size_t> lowest_success{n_restarts};
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_restarts) return;
            if (lowest_success.load() < i) continue; // a lower index already won
            const auto abort_fn = [&lowest_success, i] { return lowest_success.load() < i; };
            results[i] = detail::run_restart(s, pinned, cfg.target_k,
                                             detail::mix_seed(cfg.seed, i), cfg.max_iters,
                                             success_objective, abort_fn);
            ran[i] = 1;
            if (results[i].success) {
                std::size_t cur = lowest_success.load();
                while (i < cur && !lowest_success.compare_exchange_weak(cur, i)) {
                }
            }
        }
    };

    std::size_t n_threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
    n_threads = std::max<std::size_t>(1, std::min(n_threads, n_restarts));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    SearchReport report;
    report.seed = cfg.seed;

    const std::size_t winner = lowest_success.load();
    if (winner < n_restarts) {
        detail::RestartResult& best = results[winner];
        std::vector<UnitaryMatrix> members;
        members.reserve(best.members.size());
        for (ComplexMatrix& m : best.members) members.emplace_back(std::move(m));
        EncodingFamily family(s, std::move(members));
        const VerifyResult v = verify_family(family, cfg.success_residual);
        report.success = v.ok; // never self-certified: the residual decides
        report.final_residual = v.worst_pair_residual;
        if (v.ok) report.family = std::move(family);
        report.objective_trace = std::move(best.trace);
        report.iterations_used = best.iterations;
        report.restarts_used = winner + 1;
    } else {
        std::size_t best_i = 0;
        double best_f = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n_restarts; ++i)
            if (ran[i] && results[i].objective < best_f) {
                best_f = results[i].objective;
                best_i = i;
            }
        report.success = false;
        report.final_residual = results[best_i].max_pair;
        report.objective_trace = std::move(results[best_i].trace);
        report.iterations_used = results[best_i].iterations;
        report.restarts_used = n_restarts;
    }

    if (!certificate.empty()) {
        report.success = false;
        report.certified = true;
        report.certificate = certificate;
        report.family.reset();
    }
    return report;
}

struct MaxKResult {
    std::size_t max_k = 1;
    std::vector<std::pair<std::size_t, SearchReport>> reports; // in descending-K attempt order
};

/// Largest K a search finds, probing downward from min(d^2, floor(d/lambda_0)).
/// K = d^2-1 is never attempted: no spectrum admits exactly that many members,
/// so a d^2 failure moves straight to d^2-2. The result is a lower bound on
/// the true maximum (search evidence, not proof).
inline MaxKResult max_k(const SchmidtSpectrum& s, const SearchConfig& cfg_base) {
    const std::size_t d = s.d();
    const auto cap = static_cast<std::size_t>(
        std::floor(static_cast<double>(d) / s.lambda0() + 1e-12));
    std::size_t start = std::min(d * d, cap);
    start = std::max<std::size_t>(start, 1);

    MaxKResult out;
    for (std::size_t K = start; K >= 1; --K) {
        if (K == d * d - 1) continue;
        SearchConfig cfg = cfg_base;
        cfg.target_k = K;
        if (cfg.pinned.size() > K)
            cfg.pinned.erase(cfg.pinned.begin() + static_cast<std::ptrdiff_t>(K), cfg.pinned.end());
        SearchReport r = find_family(s, cfg);
        const bool succeeded = r.success;
        out.reports.emplace_back(K, std::move(r));
        if (succeeded) {
            out.max_k = K;
            return out;
        }
    }
    out.max_k = 1;
    return out;
}

struct ScanRow {
    double lambda0;
    double lambda1;
    double lambda2;
    std::size_t max_k_found;
    std::size_t wcsg_cap;                  // floor(d / lambda0)
    std::size_t certified_infeasible_above; // every larger K is provably out
};

/// Sweep the sorted d=3 simplex with the given step: lambda_0 ascends from 1/3,
/// lambda_1 ascends from the lambda_1 = lambda_2 edge. Each point records the
/// search's max K and the certified ceiling.
inline std::vector<ScanRow> simplex_scan(std::size_t d, double grid_step,
                                         const SearchConfig& cfg_base) {
    if (d != 3) throw DomainError("simplex_scan: only the d = 3 simplex is supported");
    if (grid_step < 0.005 || grid_step > 0.1)
        throw DomainError("simplex_scan: grid_step must lie in [0.005, 0.1]");

    std::vector<ScanRow> rows;
    for (int p = 0;; ++p) {
        const double l0 = 1.0 / 3.0 + static_cast<double>(p) * grid_step;
        if (l0 > 1.0 + 1e-12) break;
        for (int q = 0;; ++q) {
            const double l1 = (1.0 - l0) / 2.0 + static_cast<double>(q) * grid_step;
            if (l1 > std::min(l0, 1.0 - l0) + 1e-12) break;
            const double l2 = std::max(1.0 - l0 - l1, 0.0);
            const SchmidtSpectrum s({std::min(l0, 1.0), l1, l2});

            ScanRow row{};
            row.lambda0 = s.lambda(0);
            row.lambda1 = s.lambda(1);
            row.lambda2 = s.lambda(2);
            row.wcsg_cap = static_cast<std::size_t>(
                std::floor(static_cast<double>(d) / row.lambda0 + 1e-12));

            std::size_t ceiling = std::min(d * d, row.wcsg_cap);
            if (!s.is_uniform(1e-10)) ceiling = std::min(ceiling, d * d - 2);
            if (ceiling >= d + 1 && row.lambda0 > dp1_bound(d) + 1e-12)
                ceiling = std::min(ceiling, d);
            row.certified_infeasible_above = ceiling;

            row.max_k_found = max_k(s, cfg_base).max_k;
            rows.push_back(row);
        }
    }
    return rows;
}

inline std::string scan_csv(const std::vector<ScanRow>& rows) {
    std::ostringstream out;
    out << "lambda0,lambda1,lambda2,max_k_found,wcsg_cap,certified_infeasible_above\n";
    out.setf(std::ios::fixed);
    out.precision(6);
    for (const ScanRow& r : rows)
        out << r.lambda0 << ',' << r.lambda1 << ',' << r.lambda2 << ',' << r.max_k_found << ','
            << r.wcsg_cap << ',' << r.certified_infeasible_above << '\n';
    return out.str();
}

}  // namespace ddc
