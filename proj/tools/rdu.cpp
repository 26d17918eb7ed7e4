#include "rdu/rdu.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

namespace {

using rdu::io::Json;

constexpr int kExitValidation = 2;
constexpr int kExitViolations = 3;

struct Options {
    std::string scenario;
    std::string scenario2;
    std::string utility = "affine:1,0";
    std::string distortion = "identity";
    std::string penalty;
    std::string order = "fsd";
    std::string mean_prior;
    std::string prior;
    std::string grid = "-5,5,0.01";
    std::string output = "text";
    std::string demo;
    std::uint64_t seed = rdu::kDefaultBatterySeed;
    std::size_t size = 200;
    std::size_t budget = 100000;
    std::size_t resolution = 10;
    bool constants_only = false;
    bool allow_short = false;
};

struct Outcome {
    Json report;
    int code = 0;
};

Json number_or_null(std::optional<double> x) { return x ? Json(*x) : Json(nullptr); }

struct Resolved {
    rdu::Preference pref;
    Json echo;
};

Resolved resolve(const Options& o, const std::vector<std::string>& scenario_states) {
    auto phi = rdu::io::parse_utility(o.utility);
    auto psi = rdu::io::parse_distortion(o.distortion);
    const std::string spec = o.penalty.empty() ? "maxmin:all" : o.penalty;
    if (spec == "maxmin:all" && scenario_states.empty())
        throw rdu::ConfigurationError("--penalty is required without --scenario");
    auto [c, ids] = rdu::io::parse_penalty(spec, scenario_states);
    Json echo = rdu::io::preference_json(phi, psi, c, ids);
    return {rdu::Preference(std::move(phi), std::move(psi), std::move(c), std::move(ids)), std::move(echo)};
}

Json evaluation_json(const rdu::Evaluation& e, const rdu::Preference& pref) {
    return Json{{"value", e.value_utils},
                {"certainty_equivalent", number_or_null(e.certainty_equivalent)},
                {"penalty_at_minimizer", e.penalty_at_minimizer},
                {"minimizer", rdu::io::states_json(pref.state_ids, e.minimizer.weights())},
                {"per_state", rdu::io::states_json(pref.state_ids, e.per_state_utils)}};
}

Outcome cmd_evaluate(const Options& o, bool ce_only) {
    const auto v = rdu::io::parse_scenario(o.scenario);
    const auto r = resolve(o, v.state_ids());
    const auto e = rdu::evaluate(v.reordered(r.pref.state_ids), r.pref);
    Json j{{"command", ce_only ? "ce" : "evaluate"}, {"scenario", o.scenario}, {"preference", r.echo}};
    if (ce_only) {
        j["certainty_equivalent"] = number_or_null(e.certainty_equivalent);
        j["value"] = e.value_utils;
    } else {
        j.update(evaluation_json(e, r.pref));
    }
    return {j};
}

Outcome cmd_compare(const Options& o) {
    const auto v1 = rdu::io::parse_scenario(o.scenario);
    const auto v2 = rdu::io::parse_scenario(o.scenario2);
    const auto r = resolve(o, v1.state_ids());
    const auto e1 = rdu::evaluate(v1.reordered(r.pref.state_ids), r.pref);
    const auto e2 = rdu::evaluate(v2.reordered(r.pref.state_ids), r.pref);
    return {Json{{"command", "compare"},
                 {"scenario", o.scenario},
                 {"scenario2", o.scenario2},
                 {"preference", r.echo},
                 {"value", e1.value_utils},
                 {"value2", e2.value_utils},
                 {"ordering", rdu::to_string(rdu::compare_values(e1.value_utils, e2.value_utils))}}};
}

rdu::DiscreteDistribution reduced(const rdu::TwoStageVariable& v, const std::optional<rdu::Prior>& prior) {
    if (v.num_states() == 1)
        return v.marginal(std::size_t{0});
    if (!prior)
        throw rdu::ConfigurationError("dominance on a multi-state scenario needs --prior");
    std::vector<rdu::DiscreteDistribution> ms;
    for (std::size_t w = 0; w < v.num_states(); ++w)
        ms.push_back(v.marginal(w));
    return rdu::mixture(ms, prior->weights());
}

Outcome cmd_dominance(const Options& o) {
    const auto v1 = rdu::io::parse_scenario(o.scenario);
    const auto v2 = rdu::io::parse_scenario(o.scenario2).reordered(v1.state_ids());
    rdu::DominanceOrder order;
    if (o.order == "fsd")
        order = rdu::DominanceOrder::FSD;
    else if (o.order == "ssd")
        order = rdu::DominanceOrder::SSD;
    else if (o.order == "phissd")
        order = rdu::DominanceOrder::PHI_SSD;
    else
        throw rdu::ValidationError("--order must be fsd, ssd or phissd");
    std::optional<rdu::Prior> prior;
    if (!o.prior.empty())
        prior = rdu::io::parse_prior(o.prior, v1.state_ids());
    const auto phi = rdu::io::parse_utility(o.utility);
    std::function<double(double)> f;
    if (order == rdu::DominanceOrder::PHI_SSD)
        f = [&phi](double x) { return phi(x); };
    const auto rep = rdu::dominance(reduced(v1, prior), reduced(v2, prior), order, f);
    Json j{{"command", "dominance"},
           {"scenario", o.scenario},
           {"scenario2", o.scenario2},
           {"order", rdu::to_string(order)}};
    if (order == rdu::DominanceOrder::PHI_SSD)
        j["utility"] = phi.to_spec();
    if (prior)
        j["prior"] = rdu::io::format_prior(*prior, v1.state_ids());
    j["relation"] = rdu::to_string(rep.relation);
    j["witness"] = number_or_null(rep.witness_t);
    return {j};
}

Outcome cmd_cmin(const Options& o) {
    if (o.penalty.empty() || o.prior.empty())
        throw rdu::ConfigurationError("cmin needs --penalty and --prior");
    std::vector<std::string> states;
    if (!o.scenario.empty())
        states = rdu::io::parse_scenario(o.scenario).state_ids();
    auto [c, ids] = rdu::io::parse_penalty(o.penalty, states);
    const auto q = rdu::io::parse_prior(o.prior, ids);
    const auto g = rdu::io::detail::numbers(o.grid, 3, "--grid");
    rdu::LatticeSpec lattice{g[0], g[1], g[2], o.constants_only};
    const double axis = double(lattice.axis().size());
    const double points = o.constants_only ? axis : std::pow(axis, double(ids.size()));
    if (points > 5e7)
        throw rdu::ValidationError("cmin: lattice has " + rdu::detail::fmt_num(points) + " points, limit 5e7");
    const auto eval = [&c](std::span<const double> u) { return c.robust_min(u).value; };
    const double cmin = rdu::c_min_bruteforce(eval, q, lattice);
    const double pen = c.penalty(q);
    return {Json{{"command", "cmin"},
                 {"penalty", rdu::io::penalty_json(c, ids)},
                 {"prior", rdu::io::format_prior(q, ids)},
                 {"lattice", {{"lo", g[0]}, {"hi", g[1]}, {"step", g[2]}, {"points", points}}},
                 {"c_min", cmin},
                 {"penalty_at_prior", std::isfinite(pen) ? Json(pen) : Json("inf")},
                 {"abs_diff", std::isfinite(pen) ? Json(std::abs(cmin - pen)) : Json(nullptr)}}};
}

Json checks_json(const rdu::PropertyReport& rep) {
    Json arr = Json::array();
    for (const auto& c : rep.checks)
        arr.push_back({{"name", c.name},
                       {"cases", c.cases},
                       {"violations", c.violations},
                       {"max_error", c.max_error},
                       {"tolerance", c.tolerance}});
    return arr;
}

Outcome cmd_battery(const Options& o) {
    std::vector<std::string> states;
    if (!o.scenario.empty())
        states = rdu::io::parse_scenario(o.scenario).state_ids();
    const auto r = resolve(o, states);
    rdu::BatterySpec spec;
    spec.seed = o.seed;
    spec.size = o.size;
    const auto props = rdu::property_battery(r.pref, spec);
    const auto reds = rdu::reduction_suite(r.pref, spec);
    const auto aversion = rdu::ambiguity_aversion_check(r.pref, spec);
    const bool ok = props.passed() && reds.passed() && aversion.passed();
    return {Json{{"command", "battery"},
                 {"preference", r.echo},
                 {"seed", o.seed},
                 {"size", o.size},
                 {"properties", checks_json(props)},
                 {"reductions", checks_json(reds)},
                 {"ambiguity_aversion",
                  {{"cases", aversion.cases},
                   {"violations", aversion.violations.size()},
                   {"max_gap", aversion.max_gap}}},
                 {"result", ok ? "PASS" : "FAIL"}},
            ok ? 0 : kExitViolations};
}

bool risk_neutral(const rdu::Distortion& psi) {
    for (int i = 0; i <= 1000; ++i)
        if (std::abs(psi(i / 1000.0) - i / 1000.0) > 1e-12)
            return false;
    return true;
}

Outcome cmd_portfolio(const Options& o) {
    const auto panel = rdu::io::parse_panel(o.scenario);
    const auto r = resolve(o, panel.state_ids);
    rdu::Prior p_mean = rdu::Prior::uniform(1);
    if (!o.mean_prior.empty())
        p_mean = rdu::io::parse_prior(o.mean_prior, panel.state_ids);
    else if (panel.state_ids.size() > 1)
        throw rdu::ConfigurationError("portfolio on a multi-state panel needs --mean-prior");
    rdu::PortfolioConstraints cons;
    cons.long_only = !o.allow_short;
    cons.resolution = o.resolution;
    const auto res = rdu::optimize(panel, p_mean, r.pref, cons, o.budget);
    return {Json{{"command", "portfolio"},
                 {"scenario", o.scenario},
                 {"preference", r.echo},
                 {"mean_prior", rdu::io::format_prior(p_mean, panel.state_ids)},
                 {"weights", rdu::io::states_json(panel.assets, res.weights.values())},
                 {"mean", res.breakdown.mean},
                 {"risk", res.breakdown.risk},
                 {"objective", res.breakdown.objective},
                 {"risk_neutral", risk_neutral(r.pref.psi)},
                 {"evaluations", res.trace.size()}}};
}

Outcome cmd_demo(const Options& o) {
    if (o.demo != "ellsberg")
        throw rdu::ValidationError("unknown demo '" + o.demo + "'");
    const auto rep = rdu::ellsberg_demo();
    const bool ok = rep.value_u == 0.0 && rep.value_v == 20.0 && rep.value_u_plus_r == 100.0 &&
                    rep.value_v_plus_r == 20.0 && rep.reversal;
    return {Json{{"command", "demo"},
                 {"demo", "ellsberg"},
                 {"U(u)", rep.value_u},
                 {"U(v)", rep.value_v},
                 {"U(u+r)", rep.value_u_plus_r},
                 {"U(v+r)", rep.value_v_plus_r},
                 {"reversal", rep.reversal},
                 {"result", ok ? "PASS" : "FAIL"}},
            ok ? 0 : kExitViolations};
}

void print_text(const Json& j, std::ostream& out, const std::string& indent = "") {
    for (const auto& [key, val] : j.items()) {
        if (val.is_object()) {
            out << indent << key << ":\n";
            print_text(val, out, indent + "  ");
        } else if (val.is_array() && !val.empty() && val.front().is_object()) {
            out << indent << key << ":\n";
            for (const auto& item : val) {
                out << indent << "  -\n";
                print_text(item, out, indent + "    ");
            }
        } else {
            out << indent << key << ": " << (val.is_string() ? val.get<std::string>() : val.dump()) << "\n";
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust rank-dependent evaluation of ambiguous prospects"};
    app.require_subcommand(1);
    Options o;

    auto output = [&](CLI::App* sub) {
        sub->add_option("--output", o.output, "text or json")->check(CLI::IsMember({"text", "json"}));
    };
    auto preference = [&](CLI::App* sub) {
        sub->add_option("--utility", o.utility, "utility spec");
        sub->add_option("--distortion", o.distortion, "distortion spec");
        sub->add_option("--penalty", o.penalty, "penalty spec (default maxmin:all)");
    };

    auto* evaluate = app.add_subcommand("evaluate", "robust value of a scenario");
    auto* ce = app.add_subcommand("ce", "certainty equivalent of a scenario");
    for (auto* sub : {evaluate, ce}) {
        sub->add_option("--scenario", o.scenario, "scenario JSON")->required();
        preference(sub);
        output(sub);
    }

    auto* compare = app.add_subcommand("compare", "compare two scenarios");
    compare->add_option("--scenario", o.scenario, "first scenario JSON")->required();
    compare->add_option("--scenario2", o.scenario2, "second scenario JSON")->required();
    preference(compare);
    output(compare);

    auto* dominance = app.add_subcommand("dominance", "stochastic dominance between two scenarios");
    dominance->add_option("--scenario", o.scenario, "first scenario JSON")->required();
    dominance->add_option("--scenario2", o.scenario2, "second scenario JSON")->required();
    dominance->add_option("--order", o.order, "fsd, ssd or phissd");
    dominance->add_option("--utility", o.utility, "utility spec for phissd");
    dominance->add_option("--prior", o.prior, "reference prior for multi-state scenarios");
    output(dominance);

    auto* cmin = app.add_subcommand("cmin", "brute-force minimal penalty at a prior");
    cmin->add_option("--penalty", o.penalty, "penalty spec")->required();
    cmin->add_option("--prior", o.prior, "prior q, w1=p1,...")->required();
    cmin->add_option("--scenario", o.scenario, "scenario JSON fixing the state order");
    cmin->add_option("--grid", o.grid, "lattice lo,hi,step");
    cmin->add_flag("--constants-only", o.constants_only, "restrict the lattice to constant vectors");
    output(cmin);

    auto* battery = app.add_subcommand("battery", "seeded property and reduction battery");
    preference(battery);
    battery->add_option("--scenario", o.scenario, "scenario JSON fixing the states");
    battery->add_option("--seed", o.seed, "battery seed");
    battery->add_option("--size", o.size, "number of cases");
    output(battery);

    auto* portfolio = app.add_subcommand("portfolio", "mean-risk portfolio optimization");
    portfolio->add_option("--scenario", o.scenario, "panel CSV")->required();
    preference(portfolio);
    portfolio->add_option("--mean-prior", o.mean_prior, "prior for the mean term");
    portfolio->add_option("--budget", o.budget, "maximum objective evaluations");
    portfolio->add_option("--resolution", o.resolution, "coarse grid resolution");
    portfolio->add_flag("--allow-short", o.allow_short, "allow negative weights");
    output(portfolio);

    auto* demo = app.add_subcommand("demo", "built-in demonstrations");
    demo->add_option("name", o.demo, "ellsberg")->required();
    output(demo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    Outcome res;
    try {
        if (*evaluate)
            res = cmd_evaluate(o, false);
        else if (*ce)
            res = cmd_evaluate(o, true);
        else if (*compare)
            res = cmd_compare(o);
        else if (*dominance)
            res = cmd_dominance(o);
        else if (*cmin)
            res = cmd_cmin(o);
        else if (*battery)
            res = cmd_battery(o);
        else if (*portfolio)
            res = cmd_portfolio(o);
        else
            res = cmd_demo(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    if (o.output == "json")
        std::cout << res.report.dump(2) << "\n";
    else
        print_text(res.report, std::cout);
    return res.code;
}
