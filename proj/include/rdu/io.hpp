#pragma once

#include "rdu/ambiguity.hpp"
#include "rdu/distortion.hpp"
#include "rdu/distribution.hpp"
#include "rdu/errors.hpp"
#include "rdu/portfolio.hpp"
#include "rdu/utility.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rdu::io {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

inline double number(std::string_view text, std::string_view what) {
    const auto t = trim(text);
    double x = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    if (!t.empty() && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (t.empty() || ec != std::errc{} || ptr != last || !std::isfinite(x))
        throw ValidationError(std::string(what) + ": '" + t + "' is not a finite number");
    return x;
}

inline double bound(std::string_view text, std::string_view what) {
    const auto t = trim(text);
    if (t == "inf" || t == "+inf")
        return kInf;
    if (t == "-inf")
        return -kInf;
    return number(t, what);
}

inline std::vector<double> numbers(std::string_view text, std::size_t expected, std::string_view what) {
    const auto parts = split(text, ',');
    if (parts.size() != expected)
        throw ValidationError(std::string(what) + ": expected " + std::to_string(expected) +
                              " comma-separated numbers, got '" + std::string(text) + "'");
    std::vector<double> out;
    for (const auto& p : parts)
        out.push_back(number(p, what));
    return out;
}

inline std::vector<std::pair<double, double>> knots(std::string_view text, std::string_view what) {
    std::vector<std::pair<double, double>> out;
    for (const auto& k : split(text, ';')) {
        const auto xy = numbers(k, 2, what);
        out.emplace_back(xy[0], xy[1]);
    }
    return out;
}

inline std::pair<std::string, std::string> head(std::string_view spec) {
    const auto pos = spec.find(':');
    if (pos == std::string_view::npos)
        return {trim(spec), {}};
    return {trim(spec.substr(0, pos)), trim(spec.substr(pos + 1))};
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace detail

/// identity | power:a | prelec:alpha,beta | tk:gamma | es:lambda | var:lambda | dualpower:k | pwl:p,y;...
inline Distortion parse_distortion(std::string_view spec) {
    const auto [name, args] = detail::head(spec);
    const std::string what = "distortion '" + std::string(spec) + "'";
    if (name == "identity" && args.empty())
        return Distortion::identity();
    if (name == "power")
        return Distortion::power(detail::numbers(args, 1, what)[0]);
    if (name == "prelec") {
        const auto p = detail::numbers(args, 2, what);
        return Distortion::prelec(p[0], p[1]);
    }
    if (name == "tk")
        return Distortion::tk(detail::numbers(args, 1, what)[0]);
    if (name == "es")
        return Distortion::es_tail(detail::numbers(args, 1, what)[0]);
    if (name == "var")
        return Distortion::var_step(detail::numbers(args, 1, what)[0]);
    if (name == "dualpower")
        return Distortion::dual_power(detail::numbers(args, 1, what)[0]);
    if (name == "pwl")
        return Distortion::piecewise_linear(detail::knots(args, what));
    throw ValidationError("unknown " + what);
}

/// affine:a,b | exp:a | power:r[@lo,hi] | pwl:x,y;... | identity
inline UtilityFn parse_utility(std::string_view spec) {
    const auto [name, args] = detail::head(spec);
    const std::string what = "utility '" + std::string(spec) + "'";
    if (name == "identity" && args.empty())
        return UtilityFn::identity();
    if (name == "affine") {
        const auto p = detail::numbers(args, 2, what);
        return UtilityFn::affine(p[0], p[1]);
    }
    if (name == "exp")
        return UtilityFn::exponential(detail::numbers(args, 1, what)[0]);
    if (name == "power") {
        const auto at = args.find('@');
        const double r = detail::numbers(args.substr(0, at), 1, what)[0];
        if (at == std::string::npos)
            return UtilityFn::power(r);
        const auto d = detail::split(std::string_view(args).substr(at + 1), ',');
        if (d.size() != 2)
            throw ValidationError(what + ": domain must be lo,hi");
        return UtilityFn::power(r, Interval{detail::bound(d[0], what), detail::bound(d[1], what)});
    }
    if (name == "pwl")
        return UtilityFn::piecewise_linear(detail::knots(args, what));
    throw ValidationError("unknown " + what);
}

using LabelledPrior = std::vector<std::pair<std::string, double>>;

/// w1=p1,w2=p2,...
inline LabelledPrior parse_labelled_prior(std::string_view spec) {
    LabelledPrior out;
    const std::string what = "prior '" + std::string(spec) + "'";
    for (const auto& item : detail::split(spec, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ValidationError(what + ": expected label=probability, got '" + item + "'");
        auto label = detail::trim(std::string_view(item).substr(0, eq));
        if (label.empty())
            throw ValidationError(what + ": empty state label");
        for (const auto& [l, p] : out)
            if (l == label)
                throw ValidationError(what + ": state '" + label + "' listed twice");
        out.emplace_back(std::move(label), detail::number(std::string_view(item).substr(eq + 1), what));
    }
    return out;
}

/// Orders a labelled prior along state_ids; unlisted states get zero weight.
inline Prior resolve_prior(const LabelledPrior& lp, const std::vector<std::string>& state_ids) {
    std::vector<double> w(state_ids.size(), 0.0);
    for (const auto& [label, p] : lp) {
        const auto it = std::find(state_ids.begin(), state_ids.end(), label);
        if (it == state_ids.end())
            throw LookupError("prior: unknown state '" + label + "'");
        w[std::size_t(it - state_ids.begin())] = p;
    }
    return Prior(std::move(w));
}

inline Prior parse_prior(std::string_view spec, const std::vector<std::string>& state_ids) {
    return resolve_prior(parse_labelled_prior(spec), state_ids);
}

inline std::string format_prior(const Prior& q, const std::vector<std::string>& state_ids) {
    std::string out;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (i)
            out += ',';
        out += state_ids[i] + "=" + rdu::detail::fmt_num(q[i]);
    }
    return out;
}

struct PenaltyTable {
    std::vector<std::string> state_ids;
    std::vector<std::pair<Prior, double>> rows;
};

/// CSV with a header of state ids followed by a final "penalty" column.
inline PenaltyTable read_penalty_table(const std::filesystem::path& path) {
    std::istringstream in(detail::read_file(path));
    std::string line;
    std::size_t lineno = 0;
    PenaltyTable t;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty())
            continue;
        const auto cells = detail::split(line, ',');
        const std::string where = path.string() + ":" + std::to_string(lineno);
        if (t.state_ids.empty()) {
            if (cells.size() < 2 || cells.back() != "penalty")
                throw ValidationError(where + ": header must list the states and end with 'penalty'");
            t.state_ids.assign(cells.begin(), cells.end() - 1);
            continue;
        }
        if (cells.size() != t.state_ids.size() + 1)
            throw ValidationError(where + ": expected " + std::to_string(t.state_ids.size() + 1) + " fields");
        try {
            std::vector<double> w;
            for (std::size_t i = 0; i + 1 < cells.size(); ++i)
                w.push_back(detail::number(cells[i], "weight"));
            t.rows.emplace_back(Prior(std::move(w)), detail::number(cells.back(), "penalty"));
        } catch (const Error& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    if (t.state_ids.empty() || t.rows.empty())
        throw ValidationError(path.string() + ": penalty table has no rows");
    return t;
}

inline std::vector<std::string> ordered_states(const std::vector<std::string>& given,
                                               const std::vector<std::string>& from_spec) {
    return given.empty() ? from_spec : given;
}

struct ParsedPenalty {
    AmbiguityIndex index;
    std::vector<std::string> state_ids;
};

/**
 * maxmin:[prior;prior;...] | maxmin:all | entropic:theta@prior | gini:theta@prior | table:file.csv
 * When state_ids is empty the state order is taken from the spec itself.
 */
inline ParsedPenalty parse_penalty(std::string_view spec, std::vector<std::string> state_ids = {}) {
    const auto [name, args] = detail::head(spec);
    const std::string what = "penalty '" + std::string(spec) + "'";
    try {
        if (name == "maxmin") {
            if (args == "all") {
                if (state_ids.empty())
                    throw ConfigurationError("maxmin:all needs the scenario states");
                return {AmbiguityIndex::full_simplex(state_ids.size()), state_ids};
            }
            if (args.size() < 2 || args.front() != '[' || args.back() != ']')
                throw ValidationError("expected maxmin:[prior;prior;...]");
            std::vector<LabelledPrior> lps;
            for (const auto& p : detail::split(std::string_view(args).substr(1, args.size() - 2), ';'))
                lps.push_back(parse_labelled_prior(p));
            if (state_ids.empty())
                for (const auto& [l, _] : lps.front())
                    state_ids.push_back(l);
            std::vector<Prior> priors;
            for (const auto& lp : lps)
                priors.push_back(resolve_prior(lp, state_ids));
            return {AmbiguityIndex::maxmin(std::move(priors)), state_ids};
        }
        if (name == "entropic" || name == "gini") {
            const auto at = args.find('@');
            if (at == std::string::npos)
                throw ValidationError("expected " + name + ":theta@prior");
            const double theta = detail::number(std::string_view(args).substr(0, at), "theta");
            const auto lp = parse_labelled_prior(std::string_view(args).substr(at + 1));
            if (state_ids.empty())
                for (const auto& [l, _] : lp)
                    state_ids.push_back(l);
            auto ref = resolve_prior(lp, state_ids);
            return {name == "entropic" ? AmbiguityIndex::entropic(theta, std::move(ref))
                                       : AmbiguityIndex::gini(theta, std::move(ref)),
                    state_ids};
        }
        if (name == "table") {
            const auto t = read_penalty_table(args);
            if (state_ids.empty())
                return {AmbiguityIndex::tabulated(t.rows), t.state_ids};
            std::vector<std::pair<Prior, double>> rows;
            for (const auto& [q, c] : t.rows) {
                LabelledPrior lp;
                for (std::size_t i = 0; i < q.size(); ++i)
                    lp.emplace_back(t.state_ids[i], q[i]);
                rows.emplace_back(resolve_prior(lp, state_ids), c);
            }
            return {AmbiguityIndex::tabulated(std::move(rows)), state_ids};
        }
    } catch (const Error& e) {
        throw ValidationError(what + ": " + e.what());
    }
    throw ValidationError("unknown " + what);
}

inline Json penalty_json(const AmbiguityIndex& c, const std::vector<std::string>& ids) {
    Json j;
    j["kind"] = c.kind_name();
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, AmbiguityIndex::MaxminSet>) {
                if (r.priors.size() == ids.size() && ids.size() > 1) {
                    bool vertices = true;
                    for (std::size_t k = 0; k < ids.size(); ++k)
                        vertices = vertices && r.priors[k] == Prior::point(ids.size(), k);
                    if (vertices) {
                        j["spec"] = "maxmin:all";
                        return;
                    }
                }
                std::string s = "maxmin:[";
                for (std::size_t k = 0; k < r.priors.size(); ++k)
                    s += (k ? ";" : "") + format_prior(r.priors[k], ids);
                j["spec"] = s + "]";
            } else if constexpr (std::is_same_v<T, AmbiguityIndex::Tabulated>) {
                Json rows = Json::array();
                for (const auto& [q, v] : r.grid)
                    rows.push_back({{"prior", format_prior(q, ids)}, {"penalty", v}});
                j["spec"] = "table";
                j["rows"] = rows;
            } else {
                j["spec"] = c.kind_name() + ":" + rdu::detail::fmt_num(r.theta) + "@" +
                            format_prior(r.reference, ids);
            }
        },
        c.repr());
    return j;
}

inline Json preference_json(const UtilityFn& phi, const Distortion& psi, const AmbiguityIndex& c,
                            const std::vector<std::string>& ids) {
    return Json{{"utility", phi.to_spec()}, {"distortion", psi.to_spec()}, {"penalty", penalty_json(c, ids)}};
}

inline Json states_json(const std::vector<std::string>& ids, std::span<const double> xs) {
    Json j = Json::object();
    for (std::size_t i = 0; i < ids.size(); ++i)
        j[ids[i]] = xs[i];
    return j;
}

/// {"states": {id: {"probs": [...], "payoffs": [...]}, ...}}
inline TwoStageVariable parse_scenario_json(const std::string& text, const std::string& source) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError(source + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("states") || !doc["states"].is_object() || doc["states"].empty())
        throw ValidationError(source + ": /states must be a non-empty object");
    std::vector<std::string> ids;
    std::vector<std::vector<double>> probs, pays;
    for (const auto& [id, st] : doc["states"].items()) {
        const std::string where = source + ": /states/" + id;
        if (!st.is_object())
            throw ValidationError(where + " must be an object");
        auto read = [&](const char* key) {
            if (!st.contains(key) || !st[key].is_array() || st[key].empty())
                throw ValidationError(where + "/" + key + " must be a non-empty array");
            std::vector<double> xs;
            for (std::size_t i = 0; i < st[key].size(); ++i) {
                const auto& x = st[key][i];
                if (!x.is_number())
                    throw ValidationError(where + "/" + key + "/" + std::to_string(i) + " is not a number");
                xs.push_back(x.get<double>());
            }
            return xs;
        };
        auto p = read("probs");
        auto x = read("payoffs");
        if (p.size() != x.size())
            throw ValidationError(where + ": probs and payoffs differ in length");
        try {
            rdu::detail::check_probabilities(p, "state '" + id + "'");
        } catch (const Error& e) {
            throw ValidationError(where + "/probs: " + e.what());
        }
        ids.push_back(id);
        probs.push_back(std::move(p));
        pays.push_back(std::move(x));
    }
    try {
        return {std::move(ids), std::move(probs), std::move(pays)};
    } catch (const Error& e) {
        throw ValidationError(source + ": " + e.what());
    }
}

inline TwoStageVariable parse_scenario(const std::filesystem::path& path) {
    return parse_scenario_json(detail::read_file(path), path.string());
}

inline Json scenario_json(const TwoStageVariable& v) {
    Json states = Json::object();
    for (std::size_t w = 0; w < v.num_states(); ++w)
        states[v.state_ids()[w]] = {{"probs", v.outcome_probs()[w]}, {"payoffs", v.payoffs()[w]}};
    return Json{{"states", states}};
}

/// state,prob,outcome,asset_1,...,asset_k
inline ScenarioPanel parse_panel_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> assets;
    std::vector<std::string> ids;
    std::vector<std::vector<double>> probs;
    std::vector<std::vector<std::vector<double>>> rets;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty())
            continue;
        const std::string where = source + ":" + std::to_string(lineno);
        const auto cells = detail::split(line, ',');
        if (!header) {
            if (cells.size() < 4 || cells[0] != "state" || cells[1] != "prob" || cells[2] != "outcome")
                throw ValidationError(where + ": header must be state,prob,outcome,<assets...>");
            assets.assign(cells.begin() + 3, cells.end());
            header = true;
            continue;
        }
        if (cells.size() != assets.size() + 3)
            throw ValidationError(where + ": expected " + std::to_string(assets.size() + 3) + " fields, got " +
                                  std::to_string(cells.size()));
        if (cells[0].empty())
            throw ValidationError(where + ": empty state label");
        double p = 0.0;
        std::vector<double> r;
        try {
            p = detail::number(cells[1], "prob");
            for (std::size_t k = 3; k < cells.size(); ++k)
                r.push_back(detail::number(cells[k], assets[k - 3]));
        } catch (const Error& e) {
            throw ValidationError(where + ": " + e.what());
        }
        auto it = std::find(ids.begin(), ids.end(), cells[0]);
        if (it == ids.end()) {
            ids.push_back(cells[0]);
            probs.emplace_back();
            rets.emplace_back();
            it = ids.end() - 1;
        }
        const auto w = std::size_t(it - ids.begin());
        probs[w].push_back(p);
        rets[w].push_back(std::move(r));
    }
    if (!header || ids.empty())
        throw ValidationError(source + ": panel has no rows");
    for (std::size_t w = 0; w < ids.size(); ++w) {
        try {
            rdu::detail::check_probabilities(probs[w], "state '" + ids[w] + "'");
        } catch (const Error& e) {
            throw ValidationError(source + ": " + e.what());
        }
    }
    try {
        return {std::move(assets), std::move(ids), std::move(probs), std::move(rets)};
    } catch (const Error& e) {
        throw ValidationError(source + ": " + e.what());
    }
}

inline ScenarioPanel parse_panel(const std::filesystem::path& path) {
    return parse_panel_csv(detail::read_file(path), path.string());
}

} // namespace rdu::io
