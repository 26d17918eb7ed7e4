// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "oracles.hpp"
#include "rdu/rdu.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace rdu;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Tally {
    std::size_t cases = 0;
    std::size_t failures = 0;
    double max_error = 0.0;
    std::string first;

    void check(double error, double tol, const std::string& what) {
        ++cases;
        max_error = std::max(max_error, error);
        if (!(error <= tol)) {
            if (failures++ == 0)
                first = what;
        }
    }
    void require(bool ok, const std::string& what) { check(ok ? 0.0 : 1.0, 0.5, what); }
    bool ok() const { return failures == 0 && cases > 0; }
    std::string summary() const {
        std::ostringstream os;
        os << cases << " checks, " << failures << " failures, max error " << max_error;
        if (failures)
            os << ", first: " << first;
        return os.str();
    }
};

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

std::vector<std::string> ids_of(std::size_t n) { return default_state_ids(n); }

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(n);
    double t = 0.0;
    for (double& x : w)
        t += (x = e(rng) + 0.02);
    for (double& x : w)
        x /= t;
    w.back() = 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0);
    return w;
}

// Quiggin's decumulative RDU from raw outcome lists.
double oracle_rdu(const std::vector<double>& probs, const std::vector<double>& pay, const UtilityFn& phi,
                  const Distortion& psi) {
    std::vector<std::size_t> idx(pay.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return pay[a] < pay[b]; });
    long double above = 1.0L, acc = 0.0L;
    double prev = 1.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        above -= probs[idx[k]];
        const double cur = k + 1 == idx.size() ? 0.0 : psi(std::clamp(double(above), 0.0, 1.0));
        acc += (long double)phi(pay[idx[k]]) * (prev - cur);
        prev = cur;
    }
    return double(acc);
}

// -theta log sum p exp(-u / theta)
double oracle_entropic(const std::vector<double>& u, const std::vector<double>& p, double theta) {
    const double m = *std::min_element(u.begin(), u.end());
    long double s = 0.0L;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += p[i] * std::exp(-(long double)(u[i] - m) / theta);
    return m - theta * double(std::log(s));
}

std::vector<Distortion> continuous_family() {
    return {Distortion::identity(),       Distortion::power(2.0),        Distortion::power(0.5),
            Distortion::prelec(0.65, 1.0), Distortion::prelec(1.0, 1.3), Distortion::tk(0.61),
            Distortion::es_tail(0.1),     Distortion::es_tail(0.5),      Distortion::dual_power(3.0),
            Distortion::piecewise_linear({{0, 0}, {0.3, 0.1}, {0.7, 0.5}, {1, 1}})};
}

std::vector<UtilityFn> utility_family() {
    return {UtilityFn::identity(), UtilityFn::affine(2.0, -1.0), UtilityFn::exponential(0.3),
            UtilityFn::exponential(-0.2), UtilityFn::power(3.0, {-kInf, kInf}),
            UtilityFn::piecewise_linear({{-20, -40}, {-1, -3}, {0, 0}, {2, 1}, {20, 10}})};
}

Preference pref_of(UtilityFn phi, Distortion psi, AmbiguityIndex c) {
    const auto n = c.dimension();
    return {std::move(phi), std::move(psi), std::move(c), ids_of(n)};
}

std::vector<AmbiguityIndex> builtin_penalties() {
    const Prior ref({0.2, 0.3, 0.5});
    return {AmbiguityIndex::entropic(1.0, ref), AmbiguityIndex::gini(0.5, ref), AmbiguityIndex::full_simplex(3),
            AmbiguityIndex::maxmin({ref, Prior({0.4, 0.4, 0.2})}),
            AmbiguityIndex::tabulated({{Prior({1, 0, 0}), 0.8}, {ref, 0.0}, {Prior({0, 0, 1}), 0.3}})};
}

// ---------------------------------------------------------------------------

Tally reduction_chain() {
    Tally t;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(kDefaultBatterySeed);
    std::uniform_int_distribution<std::size_t> states(1, 6);
    std::uniform_real_distribution<double> theta(0.3, 3.0), pos(0.2, 3.0), shift(-2.0, 2.0);
    const auto phis = utility_family();
    const auto psis = continuous_family();
    for (std::size_t i = 0; i < 200; ++i) {
        const std::size_t n = states(rng);
        const auto ids = ids_of(n);
        const auto& phi = phis[i % phis.size()];
        const auto& psi = psis[i % psis.size()];
        const auto v = random_variable(rng, ids, 8, -10.0, 10.0);
        const std::string tag = "case " + std::to_string(i);

        // (a) single state
        const Preference one(phi, psi, AmbiguityIndex::full_simplex(1), {ids[0]});
        const double rdu = oracle_rdu(v.outcome_probs()[0], v.payoffs()[0], phi, psi);
        t.check(rel(evaluate(v.restrict_to(0), one).value_utils, rdu), 1e-9, tag + " (a)");

        // (b) identity distortion against plain expected utility
        std::vector<double> eu(n);
        for (std::size_t w = 0; w < n; ++w) {
            std::vector<double> u(v.num_outcomes());
            for (std::size_t s = 0; s < u.size(); ++s)
                u[s] = phi(v.payoffs()[w][s]);
            eu[w] = oracle::plain_mean(v.outcome_probs()[w], u);
        }
        const auto ref = random_simplex(rng, n);
        const double th = theta(rng);
        const Preference vp(phi, Distortion::identity(), AmbiguityIndex::entropic(th, Prior(ref)), ids);
        t.check(rel(evaluate(v, vp).value_utils, oracle_entropic(eu, ref, th)), 1e-9, tag + " (b)");

        // (c) maxmin against an explicit loop over priors
        std::vector<Prior> priors;
        for (int k = 0; k < 3; ++k)
            priors.emplace_back(random_simplex(rng, n));
        std::vector<double> rdus(n);
        for (std::size_t w = 0; w < n; ++w)
            rdus[w] = oracle_rdu(v.outcome_probs()[w], v.payoffs()[w], phi, psi);
        double best = kInf;
        for (const auto& q : priors)
            best = std::min(best, oracle::plain_mean(q.weights(), rdus));
        const Preference mm(phi, psi, AmbiguityIndex::maxmin(priors), ids);
        t.check(rel(evaluate(v, mm).value_utils, best), 1e-9, tag + " (c)");

        // (d) affine utility, no distortion, one state
        const double a = pos(rng), b = shift(rng);
        const Preference lin(UtilityFn::affine(a, b), Distortion::identity(), AmbiguityIndex::full_simplex(1),
                             {ids[0]});
        const double mean = oracle::plain_mean(v.outcome_probs()[0], v.payoffs()[0]);
        const auto e = evaluate(v.restrict_to(0), lin);
        t.check(rel(e.value_utils, a * mean + b), 1e-9, tag + " (d) value");
        t.check(rel(e.certainty_equivalent.value_or(kInf), mean), 1e-9, tag + " (d) ce");
    }
    t.require(seconds_since(t0) < 5.0, "runtime");
    return t;
}

Tally weighted_var_equivalence() {
    Tally t;
    std::mt19937_64 rng(kDefaultBatterySeed + 2);
    const auto family = continuous_family();
    for (int k = 0; k < 500; ++k) {
        const auto d = oracle::random_dist(rng);
        const auto& psi = family[std::size_t(k) % family.size()];
        t.check(std::abs(weighted_var(d, psi) - choquet(d, psi)), 1e-9, "pair " + std::to_string(k));
        for (double l : {0.01, 0.05, 0.5, 1.0})
            t.check(std::abs(expected_shortfall(d, l) + choquet(d, Distortion::es_tail(l))), 1e-9,
                    "es " + std::to_string(l));
    }
    return t;
}

Tally choquet_properties() {
    Tally t;
    std::mt19937_64 rng(kDefaultBatterySeed + 3);
    std::uniform_real_distribution<double> unif(-5, 5), up(0.0, 2.0);
    const auto family = continuous_family();
    for (int k = 0; k < 500; ++k) {
        const auto& psi = family[std::size_t(k) % family.size()];
        const auto d = oracle::random_dist(rng);
        const std::string tag = psi.to_spec() + " pair " + std::to_string(k);

        const auto cube = d.push_forward([](double x) { return x * x * x / 100.0; });
        const auto sum = d.push_forward([](double x) { return x + x * x * x / 100.0; });
        t.check(std::abs(choquet(sum, psi) - choquet(d, psi) - choquet(cube, psi)), 1e-9, tag + " comonotone");

        const double a = std::abs(unif(rng)) + 0.1, b = unif(rng);
        t.check(rel(choquet(d.affine(a, b), psi), a * choquet(d, psi) + b), 1e-9, tag + " affine");

        // pointwise upward shifts give a dominating pair
        std::vector<double> xs(d.values().begin(), d.values().end());
        for (double& x : xs)
            x += up(rng) * double(rng() % 2);
        const DiscreteDistribution hi(xs, std::vector<double>(d.probs().begin(), d.probs().end()));
        const auto other = oracle::random_dist(rng);
        t.require(dominance(hi, d, DominanceOrder::FSD).relation != DominanceRelation::dominated, tag + " shift");
        t.check(std::max(0.0, choquet(d, psi) - choquet(hi, psi)), 1e-9, tag + " fsd shift");
        if (dominance(other, d, DominanceOrder::FSD).relation == DominanceRelation::dominates)
            t.check(std::max(0.0, choquet(d, psi) - choquet(other, psi)), 1e-9, tag + " fsd random");
    }
    return t;
}

Tally entropic_duality() {
    Tally t;
    std::mt19937_64 rng(kDefaultBatterySeed + 4);
    std::uniform_real_distribution<double> th(0.3, 3.0), util(-3, 3);
    for (std::size_t n : {2u, 3u})
        for (int k = 0; k < 30; ++k) {
            const auto p = random_simplex(rng, n);
            std::vector<double> u(n);
            for (double& x : u)
                x = util(rng);
            const double theta = th(rng);
            const auto grid = oracle::zoom_simplex_min(n, [&](const std::vector<double>& q) {
                return oracle::plain_mean(q, u) + theta * oracle::kl(q, p);
            });
            t.check(std::abs(AmbiguityIndex::entropic(theta, Prior(p)).robust_min(u).value - grid.value), 1e-6,
                    "grid n=" + std::to_string(n));
        }
    const std::array<std::array<double, 3>, 4> cases{{{1.0, 0.5, 0.7}, {0.5, 0.5, 0.4}, {2.0, 0.3, 0.6},
                                                      {1.0, 0.6, 0.45}}};
    for (const auto& [theta, p1, q1] : cases) {
        const std::vector<double> p{p1, 1 - p1}, q{q1, 1 - q1};
        const auto c = AmbiguityIndex::entropic(theta, Prior(p));
        const auto eval = [&](std::span<const double> v) { return c.robust_min(v).value; };
        const double got = c_min_bruteforce(eval, Prior(q), LatticeSpec{-5.0, 5.0, 0.01});
        t.check(std::abs(got - theta * oracle::kl(q, p)), 5e-3, "c_min theta=" + std::to_string(theta));
    }
    return t;
}

Tally step_one_properties() {
    Tally t;
    const std::vector<std::pair<UtilityFn, Distortion>> shapes{
        {UtilityFn::identity(), Distortion::identity()},
        {UtilityFn::exponential(0.3), Distortion::power(2)},
        {UtilityFn::exponential(-0.1), Distortion::prelec(0.65, 1.0)},
        {UtilityFn::affine(2, 1), Distortion::es_tail(0.25)},
        {UtilityFn::power(3.0, {-kInf, kInf}), Distortion::dual_power(2)},
    };
    for (const auto& [phi, psi] : shapes)
        for (const auto& c : builtin_penalties()) {
            const auto rep = property_battery(pref_of(phi, psi, c), BatterySpec{}, 1e-8);
            for (const auto& chk : rep.checks) {
                const std::string tag = phi.to_spec() + " " + psi.to_spec() + " " + c.kind_name() + " " + chk.name;
                t.require(chk.cases > 0, tag + " ran no cases");
                t.check(double(chk.violations), 0.0, tag);
                t.max_error = std::max(t.max_error, chk.max_error);
            }
        }
    return t;
}

Tally ellsberg() {
    Tally t;
    const auto t0 = Clock::now();
    const auto r = ellsberg_demo();
    const double secs = seconds_since(t0);
    t.check(std::abs(r.value_u), 0.0, "U(u)");
    t.check(std::abs(r.value_v - 20.0), 0.0, "U(v)");
    t.check(std::abs(r.value_u_plus_r - 100.0), 0.0, "U(u+r)");
    t.check(std::abs(r.value_v_plus_r - 20.0), 0.0, "U(v+r)");
    t.require(r.reversal, "reversal");
    t.require(secs < 1.0, "runtime " + std::to_string(secs));
    return t;
}

Tally comparative_aversion() {
    Tally t;
    const Prior ref({0.2, 0.3, 0.5});
    auto agree = [&](const Preference& a, const Preference& b, bool expect, const std::string& tag) {
        const auto rep = is_more_ambiguity_averse(a, b);
        t.require(rep.cases == 200, tag + " case count");
        t.require(rep.structural == expect, tag + " structural");
        t.require(rep.behavioral() == rep.structural, tag + " behavioral disagrees");
    };
    for (auto [lo, hi] : {std::pair{0.5, 1.0}, std::pair{1.0, 2.0}, std::pair{0.5, 2.0}}) {
        const auto a = pref_of(UtilityFn::identity(), Distortion::power(2), AmbiguityIndex::entropic(lo, ref));
        const auto b = pref_of(UtilityFn::identity(), Distortion::power(2), AmbiguityIndex::entropic(hi, ref));
        const std::string tag = "entropic " + std::to_string(lo) + "/" + std::to_string(hi);
        agree(a, b, true, tag);
        agree(b, a, false, tag + " reversed");
    }
    const auto full = pref_of(UtilityFn::identity(), Distortion::identity(), AmbiguityIndex::full_simplex(3));
    const auto mid = pref_of(UtilityFn::identity(), Distortion::identity(),
                             AmbiguityIndex::maxmin({ref, Prior({0.4, 0.4, 0.2}), Prior({0.1, 0.6, 0.3})}));
    const auto point = pref_of(UtilityFn::identity(), Distortion::identity(), AmbiguityIndex::maxmin({ref}));
    agree(full, mid, true, "maxmin full/mid");
    agree(mid, point, true, "maxmin mid/point");
    agree(full, point, true, "maxmin full/point");
    agree(point, full, false, "maxmin point/full");
    for (const auto& c : builtin_penalties())
        t.require(ambiguity_aversion_check(pref_of(UtilityFn::exponential(0.2), Distortion::power(1.5), c)).passed(),
                  std::string("aversion ") + c.kind_name());
    return t;
}

Tally mixture_algebra() {
    Tally t;
    std::mt19937_64 rng(kDefaultBatterySeed + 8);
    std::uniform_real_distribution<double> unif(-3, 3), pos(0.1, 4), al(0.0, 1.0);
    const std::vector<UtilityFn::Knot> knots{{-20, -40}, {-1, -3}, {0, 0}, {2, 1}, {20, 10}};
    for (int k = 0; k < 1000; ++k) {
        const double x = unif(rng), y = unif(rng), alpha = al(rng);
        const double a = pos(rng), b = unif(rng);
        auto moved = knots;
        for (auto& kn : moved)
            kn.second = a * kn.second + b;
        const std::pair<UtilityFn, UtilityFn> pairs[] = {
            {UtilityFn::affine(1.5, 0.5), UtilityFn::affine(1.5 * a, 0.5 * a + b)},
            {UtilityFn::piecewise_linear(knots), UtilityFn::piecewise_linear(moved)}};
        for (const auto& [phi, chi] : pairs) {
            t.check(std::abs(subjective_mix(x, y, alpha, phi) - subjective_mix(x, y, alpha, chi)), 1e-10,
                    "mix invariance");
            t.check(std::abs(preference_double(x, phi) - preference_double(x, chi)), 1e-10, "double invariance");
            t.check(std::abs(subjective_add(x, y, phi) - subjective_add(x, y, chi)), 1e-10, "add invariance");
        }
        for (const auto& phi : {UtilityFn::identity(), UtilityFn::exponential(0.4), UtilityFn::exponential(-0.3),
                                UtilityFn::power(3.0, {-kInf, kInf}), UtilityFn::piecewise_linear(knots)}) {
            t.check(std::abs(subjective_mix(x, x, alpha, phi) - x), 1e-10, phi.to_spec() + " idempotence");
            try {
                const double s = subjective_add(x, y, phi);
                t.check(s == preference_double(preference_average(x, y, phi), phi) ? 0.0 : 1.0, 0.0,
                        phi.to_spec() + " add = double of average");
                t.check(std::abs(subjective_add(x, 0.0, phi) - x), 1e-10, phi.to_spec() + " zero");
            } catch (const ImageOverflowError&) {
            }
        }
    }
    return t;
}

Tally portfolio_sanity() {
    Tally t;
    const auto single = [](Distortion psi) {
        return Preference(UtilityFn::identity(), std::move(psi), AmbiguityIndex::full_simplex(1), {"w"});
    };
    const ScenarioPanel hedge{{"a1", "a2"}, {"w"}, {{0.5, 0.5}}, {{{0.1, -0.1}, {-0.1, 0.1}}}};
    const ScenarioPanel rf{{"risky", "riskfree"}, {"w"}, {{0.5, 0.5}}, {{{1, 0}, {-1, 0}}}};
    const Prior one({1.0});
    for (const auto& psi : {Distortion::es_tail(0.5), Distortion::power(2), Distortion::es_tail(0.1)}) {
        const auto t0 = Clock::now();
        const auto res = optimize(hedge, one, single(psi), {}, 100000);
        t.require(seconds_since(t0) < 10.0, "hedge runtime");
        t.check(std::max(std::abs(res.weights[0] - 0.5), std::abs(res.weights[1] - 0.5)), 1e-4,
                "hedge " + psi.to_spec());
    }
    {
        const auto t0 = Clock::now();
        const auto res = optimize(rf, one, single(Distortion::es_tail(0.5)), {}, 100000);
        t.require(seconds_since(t0) < 10.0, "riskfree runtime");
        t.check(std::abs(res.weights[1] - 1.0), 0.0, "riskfree weight");
    }
    std::mt19937_64 rng(kDefaultBatterySeed + 9);
    std::uniform_real_distribution<double> r(-0.2, 0.25), u(0, 1);
    std::vector<std::vector<double>> probs;
    std::vector<std::vector<std::vector<double>>> rets;
    for (int w = 0; w < 2; ++w) {
        probs.push_back(random_simplex(rng, 5));
        std::vector<std::vector<double>> rows(5, std::vector<double>(3));
        for (auto& row : rows)
            for (double& x : row)
                x = r(rng);
        rets.push_back(rows);
    }
    const ScenarioPanel panel{{"x", "y", "z"}, {"w1", "w2"}, probs, rets};
    const Prior pm({0.4, 0.6});
    for (const auto& psi : {Distortion::es_tail(0.2), Distortion::power(2), Distortion::identity()}) {
        const Preference pref(UtilityFn::identity(), psi, AmbiguityIndex::entropic(0.7, pm), {"w1", "w2"});
        auto draw = [&] {
            const double a = u(rng), b = u(rng) * (1 - a);
            return std::vector<double>{a, b, 1 - a - b};
        };
        for (int k = 0; k < 100; ++k) {
            const auto x = draw(), y = draw();
            std::vector<double> mid{0.5 * x[0] + 0.5 * y[0], 0.5 * x[1] + 0.5 * y[1], 0.0};
            mid[2] = 1.0 - mid[0] - mid[1];
            const double fx = mean_risk_objective(panel, Weights(x), pm, pref).objective;
            const double fy = mean_risk_objective(panel, Weights(y), pm, pref).objective;
            const double fm = mean_risk_objective(panel, Weights(mid), pm, pref).objective;
            t.check(std::max(0.0, 0.5 * fx + 0.5 * fy - fm), 1e-8, psi.to_spec() + " midpoint");
        }
    }
    return t;
}

std::pair<int, std::string> run_cli(const std::string& args) {
    const std::string cmd = std::string("'") + RDU_CLI_PATH + "' " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return {-1, {}};
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Tally determinism() {
    Tally t;
    const std::string data = RDU_DATA_DIR;
    const std::vector<std::string> commands{
        "battery --penalty entropic:1@w1=0.2,w2=0.3,w3=0.5 --utility exp:0.3 --distortion power:2 --seed 7",
        "battery --penalty gini:0.5@w1=0.2,w2=0.3,w3=0.5 --seed 20240611",
        "evaluate --scenario " + data + "/two_state.json --penalty entropic:1@w1=0.5,w2=0.5 --distortion tk:0.61",
        "portfolio --scenario " + data + "/two_state_panel.csv --mean-prior w1=0.5,w2=0.5 --distortion es:0.2",
        "cmin --penalty gini:1@w1=0.5,w2=0.5 --prior w1=0.6,w2=0.4 --grid -2,2,0.05",
        "demo ellsberg",
    };
    for (const auto& c : commands) {
        const auto [c1, o1] = run_cli(c + " --output json");
        const auto [c2, o2] = run_cli(c + " --output json");
        t.require(c1 == 0 && c2 == 0, c + " exit");
        t.require(!o1.empty() && o1 == o2, c + " output differs");
    }
    return t;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Tally()> run;
    };
    const std::vector<Criterion> criteria{
        {"reduction chain", reduction_chain},
        {"weighted VaR equals Choquet, ES identity", weighted_var_equivalence},
        {"Choquet comonotone additivity, affine equivariance, FSD monotonicity", choquet_properties},
        {"entropic closed form and c_min duality", entropic_duality},
        {"battery invariants: comonotonic additivity, translation, concavity, monotonicity, neutrality", step_one_properties},
        {"Ellsberg reversal", ellsberg},
        {"comparative aversion and aversion check", comparative_aversion},
        {"subjective mixture algebra", mixture_algebra},
        {"portfolio sanity", portfolio_sanity},
        {"CLI determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = Clock::now();
        Tally t;
        std::string err;
        try {
            t = criteria[i].run();
        } catch (const std::exception& e) {
            err = e.what();
        }
        const bool ok = err.empty() && t.ok();
        failed += !ok;
        std::cout << "criterion " << i + 1 << ": " << (ok ? "PASS" : "FAIL") << "  " << criteria[i].name << " ("
                  << (err.empty() ? t.summary() : "exception: " + err) << ", " << seconds_since(t0) << " s)\n";
    }
    std::cout << (failed ? "acceptance: FAIL" : "acceptance: PASS") << '\n';
    return failed ? 1 : 0;
}
