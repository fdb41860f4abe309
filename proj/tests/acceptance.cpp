// End-to-end acceptance suite. Each check prints one PASS/FAIL line; the
// process exits nonzero if any check fails. Checks are property-based over
// deterministic randomized scenarios plus oracle equivalence on the numeric
// kernels and the bundled fixture files.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pinsync/pinsync.hpp"

using pinsync::DenseMatrix;
using pinsync::PinConfig;
using pinsync::Scenario;
using pinsync::SimulationTrace;
using pinsync::SwitchingSchedule;
using pinsync::SystemSpec;

namespace {

const std::string kScenarioDir = PINSYNC_SCENARIO_DIR;

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// scenario shape varied deterministically by seed: N in 2..5, n in {1,2},
// 2..4 phases
pinsync::RandomScenarioOptions varied_options(std::uint64_t seed) {
    pinsync::RandomScenarioOptions opt;
    opt.nodes = 2 + static_cast<int>(seed % 4);
    opt.state_dim = 1 + static_cast<int>((seed / 4) % 2);
    opt.phases = 2 + static_cast<int>((seed / 8) % 3);
    return opt;
}

std::ptrdiff_t sample_index(const SimulationTrace& trace, double t) {
    for (std::size_t k = 0; k < trace.times.size(); ++k)
        if (std::abs(trace.times[k] - t) <= 1e-9 * std::max(1.0, t))
            return static_cast<std::ptrdiff_t>(k);
    return -1;
}

// ---- check 1: stability verdict vs simulated growth direction --------------

bool check_verdict_roundtrip(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    int accepted = 0, matched = 0;
    for (std::uint64_t seed = 1; accepted < 50 && seed < 4000; ++seed) {
        const Scenario s = pinsync::random_scenario(seed, varied_options(seed));
        const int pin = 1 + static_cast<int>(seed % static_cast<std::uint64_t>(
                                                        s.schedule.node_count()));
        const auto report = pinsync::sync_speed(s.system, s.schedule, pin, s.gain);
        const double T = s.schedule.period();
        if (!std::isfinite(report.speed)) continue;
        if (std::abs(report.speed) < 1e-3) continue; // verdict too close to call
        ++accepted;

        // horizon scaled to the rate (|b| t = 20) so slow transients cannot
        // mask the asymptotic direction; compare midpoint against endpoint
        const int m_total = std::max(
            4, static_cast<int>(std::ceil(20.0 / (std::abs(report.speed) * T))));
        const SimulationTrace trace = pinsync::propagate_error(
            s.system, s.schedule, PinConfig::single(pin, s.gain), s.init, m_total * T, T);
        bool grew;
        if (trace.overflow) {
            grew = true;
        } else {
            const std::ptrdiff_t a = sample_index(trace, (m_total / 2) * T);
            const std::ptrdiff_t b = sample_index(trace, m_total * T);
            if (a < 0 || b < 0) {
                detail = "missing period samples at seed " + std::to_string(seed);
                return false;
            }
            grew = trace.error_norms[static_cast<std::size_t>(b)] >
                   trace.error_norms[static_cast<std::size_t>(a)];
        }
        const bool verdict_stable = report.stable;           // rho < 1
        if (verdict_stable == !grew && (report.speed < 0.0) == verdict_stable) ++matched;
        else {
            detail = "mismatch at seed " + std::to_string(seed) + " (speed " +
                     std::to_string(report.speed) + ", grew " + std::to_string(grew) + ")";
            return false;
        }
    }
    std::ostringstream os;
    os << matched << "/50 verdicts match simulation, " << elapsed_s(start) << " s";
    detail = os.str();
    return matched == 50 && accepted == 50 && elapsed_s(start) < 60.0;
}

// ---- check 2: model speed vs empirical rate over 200 periods ---------------

bool check_speed_oracle(std::string& detail) {
    int accepted = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; accepted < 20 && seed < 4000; ++seed) {
        const Scenario s = pinsync::random_scenario(seed, varied_options(seed));
        const int pin = 1 + static_cast<int>(seed % static_cast<std::uint64_t>(
                                                        s.schedule.node_count()));
        const auto report = pinsync::sync_speed(s.system, s.schedule, pin, s.gain);
        const double T = s.schedule.period();
        if (!report.stable || !std::isfinite(report.speed)) continue;
        if (std::abs(report.speed) < 1e-2 || std::abs(report.speed) > 5.0) continue;
        if (std::abs(report.speed) * 200.0 * T > 500.0) continue;
        ++accepted;
        const SimulationTrace trace = pinsync::propagate_error(
            s.system, s.schedule, PinConfig::single(pin, s.gain), s.init, 200.0 * T, T);
        if (trace.overflow) {
            detail = "unexpected overflow at seed " + std::to_string(seed);
            return false;
        }
        const double rate = pinsync::empirical_rate(trace);
        worst = std::max(worst, std::abs(rate - report.speed));
        if (std::abs(rate - report.speed) > 1e-2) {
            detail = "rate gap " + std::to_string(std::abs(rate - report.speed)) +
                     " at seed " + std::to_string(seed);
            return false;
        }
    }
    std::ostringstream os;
    os << accepted << "/20 stable scenarios, worst |model - empirical| = " << worst;
    detail = os.str();
    return accepted == 20;
}

// ---- check 3: closed-form two-node fixture ---------------------------------

bool check_closed_form_fixture(std::string& detail) {
    // L + W eigenvalues: pin node 1 -> trace 8, det 5 -> slowest 4 - sqrt(11);
    // pin node 2 -> trace 8, det 10 -> slowest 4 - sqrt(6)
    const Scenario s = pinsync::parse_scenario(kScenarioDir + "/two_node_asymmetric.json");
    const double expect1 = std::sqrt(11.0) - 4.0;
    const double expect2 = std::sqrt(6.0) - 4.0;
    const auto ranked = pinsync::rank_nodes(s.system, s.schedule, s.gain);
    if (ranked.size() != 2 || ranked[0].node != 2 || ranked[1].node != 1) {
        detail = "ranking is not (node 2, node 1)";
        return false;
    }
    const double err1 = std::abs(ranked[1].speed - expect1);
    const double err2 = std::abs(ranked[0].speed - expect2);
    std::ostringstream os;
    os << "speeds " << ranked[1].speed << ", " << ranked[0].speed
       << " vs closed form (errors " << err1 << ", " << err2 << ")";
    detail = os.str();
    return err1 <= 1e-9 && err2 <= 1e-9;
}

// ---- check 4: node dynamics shift speeds without changing the ranking ------

bool check_dynamics_shift(std::string& detail) {
    std::mt19937_64 rng(101);
    int done = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; done < 20; ++seed) {
        pinsync::RandomScenarioOptions opt = varied_options(seed);
        opt.identity_lambda = true;
        opt.zero_dynamics = true;
        opt.state_dim = 2;
        const Scenario base = pinsync::random_scenario(seed, opt);
        ++done;
        const DenseMatrix a1 = oracle::random_matrix(rng, 2, 1.5);
        const DenseMatrix a2 = oracle::random_matrix(rng, 2, 1.5);
        int best0 = 0;
        for (const DenseMatrix* a : {static_cast<const DenseMatrix*>(nullptr), &a1, &a2}) {
            const SystemSpec sys = a ? SystemSpec(*a, base.system.Lambda, base.system.r)
                                     : base.system;
            const double shift = a ? pinsync::spectral_abscissa(*a) : 0.0;
            const auto ranked = pinsync::rank_nodes(sys, base.schedule, base.gain);
            if (!a) {
                best0 = ranked.front().node;
            } else {
                if (ranked.front().node != best0) {
                    detail = "argmin node changed under dynamics shift at seed " +
                             std::to_string(seed);
                    return false;
                }
                for (int node : pinsync::all_nodes(base.schedule)) {
                    const double b0 =
                        pinsync::sync_speed(base.system, base.schedule, node, base.gain).speed;
                    const double ba =
                        pinsync::sync_speed(sys, base.schedule, node, base.gain).speed;
                    worst = std::max(worst, std::abs(ba - b0 - shift));
                    if (std::abs(ba - b0 - shift) > 1e-8) {
                        detail = "shift identity violated at seed " + std::to_string(seed) +
                                 " node " + std::to_string(node);
                        return false;
                    }
                }
            }
        }
    }
    std::ostringstream os;
    os << "20/20 triples, worst shift-identity residual " << worst;
    detail = os.str();
    return true;
}

// ---- check 5: fast-switching limit matches the average system --------------

bool check_average_limit(std::string& detail) {
    int accepted = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; accepted < 20 && seed < 8000; ++seed) {
        const Scenario s = pinsync::random_scenario(seed, varied_options(seed));
        double dmax = 0.0;
        for (int node : pinsync::all_nodes(s.schedule))
            for (const DenseMatrix& d : pinsync::phase_error_matrices(
                     s.system, s.schedule, PinConfig::single(node, s.gain)))
                dmax = std::max(dmax, pinsync::spectral_norm(d));
        if (dmax > 10.0) continue;
        ++accepted;
        const SwitchingSchedule fast = s.schedule.with_period(1e-4);
        for (int node : pinsync::all_nodes(s.schedule)) {
            const double b_fast = pinsync::sync_speed(s.system, fast, node, s.gain).speed;
            const double b_avg = pinsync::average_speed(s.system, s.schedule, node, s.gain);
            worst = std::max(worst, std::abs(b_fast - b_avg));
            if (std::abs(b_fast - b_avg) > 1e-3) {
                detail = "limit gap " + std::to_string(std::abs(b_fast - b_avg)) +
                         " at seed " + std::to_string(seed);
                return false;
            }
        }
    }
    std::ostringstream os;
    os << accepted << "/20 scenarios, worst |b_T - b_avg| = " << worst;
    detail = os.str();
    return accepted == 20;
}

// ---- check 6: threshold certification vs observed bifurcation --------------

bool check_threshold_certification(std::string& detail) {
    int accepted = 0;
    for (std::uint64_t seed = 1; accepted < 20 && seed < 4000; ++seed) {
        const Scenario s = pinsync::random_scenario(seed, varied_options(seed));
        pinsync::ThresholdReport report;
        try {
            report = pinsync::threshold_T0(s.system, s.schedule, s.gain);
        } catch (const pinsync::validation_error&) {
            continue; // no strictly best average-system node
        }
        if (report.saturated) continue;
        ++accepted;
        if (!(report.T0 > 0.0) || report.residual > 1e-8) {
            detail = "bad T0/residual at seed " + std::to_string(seed);
            return false;
        }
        const std::vector<double> grid = pinsync::default_period_grid(1e-6, 10.0, 60);
        const pinsync::SweepTable table =
            pinsync::sweep_periods(s.system, s.schedule, s.gain, grid);
        for (std::size_t k = 0; k < grid.size(); ++k)
            if (grid[k] < report.T0 && table.best_node[k] != report.best_node) {
                detail = "certified region violated at seed " + std::to_string(seed) +
                         " T=" + std::to_string(grid[k]);
                return false;
            }
        const auto bif = pinsync::find_bifurcation(table, s.system, s.schedule, s.gain);
        if (bif && !(report.T0 <= *bif)) {
            detail = "T0 " + std::to_string(report.T0) + " exceeds bifurcation " +
                     std::to_string(*bif) + " at seed " + std::to_string(seed);
            return false;
        }
    }
    detail = std::to_string(accepted) + "/20 scenarios certified and consistent";
    return accepted == 20;
}

// ---- check 7: operator distance to the average system ----------------------

bool check_operator_bound(std::string& detail) {
    double worst_slack = 1e300;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Scenario s = pinsync::random_scenario(seed, varied_options(seed));
        const int pin = 1 + static_cast<int>(seed % static_cast<std::uint64_t>(
                                                        s.schedule.node_count()));
        const PinConfig pins = PinConfig::single(pin, s.gain);
        double d = 0.0;
        for (const DenseMatrix& dk :
             pinsync::phase_error_matrices(s.system, s.schedule, pins))
            d = std::max(d, pinsync::spectral_norm(dk));
        for (int k = 1; k <= 10; ++k) {
            const double t = 0.1 * k;
            const SwitchingSchedule sched = s.schedule.with_period(t);
            const DenseMatrix r = pinsync::monodromy(s.system, sched, pins);
            const DenseMatrix avg = pinsync::mat_exp(
                pinsync::average_error_matrix(s.system, sched, pins), t);
            const double lhs = pinsync::spectral_norm(r - avg);
            const double rhs = 2.0 * (std::expm1(d * t) - d * t);
            worst_slack = std::min(worst_slack, rhs - lhs);
            if (lhs > rhs + 1e-12) {
                detail = "bound violated at seed " + std::to_string(seed) +
                         " T=" + std::to_string(t);
                return false;
            }
        }
    }
    std::ostringstream os;
    os << "100 (scenario, T) pairs, minimum bound slack " << worst_slack;
    detail = os.str();
    return true;
}

// ---- check 8: numeric kernels vs independent oracles -----------------------

bool check_numeric_kernels(std::string& detail) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
        const DenseMatrix m = oracle::random_matrix(rng, n, 5.0);
        const DenseMatrix e = pinsync::mat_exp(m, 1.0);
        const DenseMatrix ref = oracle::series_expm(m, 1.0);
        if ((e - ref).frobenius_norm() > 1e-10 * ref.frobenius_norm()) {
            detail = "expm disagrees with series oracle at trial " + std::to_string(trial);
            return false;
        }
    }
    for (std::size_t n = 2; n <= 4; ++n)
        for (int trial = 0; trial < 30; ++trial) {
            const DenseMatrix m = oracle::random_matrix(rng, n, 3.0);
            const double dist = oracle::multiset_distance(
                oracle::poly_roots(oracle::char_poly(m)), pinsync::eigenvalues(m));
            if (dist > 1e-8) {
                detail = "eigenvalues off char-poly roots by " + std::to_string(dist);
                return false;
            }
        }
    // Gelfand's formula at m = 512 on near-normal matrices
    std::uniform_real_distribution<double> mag(0.5, 1.5), angle(0.1, 3.0),
        pert(-1e-6, 1e-6), u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 4;
        DenseMatrix d(n, n);
        d(0, 0) = mag(rng);
        d(1, 1) = -mag(rng);
        const double th = angle(rng), rr = mag(rng);
        d(2, 2) = rr * std::cos(th);
        d(2, 3) = -rr * std::sin(th);
        d(3, 2) = -d(2, 3);
        d(3, 3) = d(2, 2);
        std::vector<double> v(n);
        for (double& x : v) x = u(rng);
        const double vn = pinsync::vector_norm(v);
        DenseMatrix q = DenseMatrix::identity(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) q(i, j) -= 2.0 * v[i] * v[j] / (vn * vn);
        DenseMatrix m = q * d * q.transpose();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) += pert(rng);
        const double rho = pinsync::spectral_radius(m);
        DenseMatrix p = m;
        double log_scale = 0.0;
        for (int s = 0; s < 9; ++s) {
            p = p * p;
            const double f = p.max_abs();
            if (f > 1e100) {
                p *= 1.0 / f;
                log_scale = 2.0 * log_scale + std::log(f);
            } else {
                log_scale *= 2.0;
            }
        }
        const double lim = (log_scale + std::log(pinsync::spectral_norm(p))) / 512.0;
        if (std::abs(lim - std::log(rho)) > 1e-3) {
            detail = "Gelfand limit off by " + std::to_string(std::abs(lim - std::log(rho)));
            return false;
        }
    }
    detail = "expm series oracle, char-poly roots, Gelfand limit all within tolerance";
    return true;
}

// ---- check 9: bundled scenario reproduces the bifurcation phenomenology ----

bool check_bundled_scenario(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const Scenario s = pinsync::parse_scenario(kScenarioDir + "/standin.json");
    const auto cmp = pinsync::threshold_vs_bifurcation(
        s.system, s.schedule, s.gain, pinsync::default_period_grid());
    std::ostringstream os;
    if (!cmp.first_bifurcation) {
        detail = "no bifurcation on the default sweep grid";
        return false;
    }
    os << "bifurcation at T = " << *cmp.first_bifurcation << ", T0 = " << cmp.threshold.T0
       << ", conservative = " << (cmp.conservative ? "yes" : "no") << ", "
       << elapsed_s(start) << " s";
    detail = os.str();
    return cmp.conservative && !cmp.vacuous && cmp.threshold.T0 > 0.0 &&
           elapsed_s(start) < 120.0;
}

} // namespace

int main() {
    struct Check {
        const char* label;
        std::function<bool(std::string&)> fn;
    };
    const std::vector<Check> checks{
        {"stability verdict matches simulated growth direction", check_verdict_roundtrip},
        {"model speed matches empirical rate over 200 periods", check_speed_oracle},
        {"two-node fixture matches closed-form speeds and ranking",
         check_closed_form_fixture},
        {"node dynamics shift speeds without changing the ranking", check_dynamics_shift},
        {"fast-switching speeds approach the average system", check_average_limit},
        {"threshold T0 is positive, tight, and conservative", check_threshold_certification},
        {"monodromy stays within the average-system operator bound", check_operator_bound},
        {"numeric kernels agree with independent oracles", check_numeric_kernels},
        {"bundled scenario shows a bifurcation with T0 below it", check_bundled_scenario},
    };

    int failures = 0;
    for (std::size_t k = 0; k < checks.size(); ++k) {
        std::string detail;
        bool ok = false;
        try {
            ok = checks[k].fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::cout << (ok ? "PASS" : "FAIL") << " | check " << (k + 1) << ": "
                  << checks[k].label << (detail.empty() ? "" : " — " + detail) << '\n';
        if (!ok) ++failures;
    }
    std::cout << (failures == 0 ? "all checks passed"
                                : std::to_string(failures) + " check(s) failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
