#include "CLI11.hpp"
#include "json.hpp"

#include "wmdp/buechi.hpp"
#include "wmdp/classify.hpp"
#include "wmdp/dwr.hpp"
#include "wmdp/graph.hpp"
#include "wmdp/io.hpp"
#include "wmdp/numeric.hpp"
#include "wmdp/oracle.hpp"
#include "wmdp/spider.hpp"
#include "wmdp/ssp.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace wmdp;
using Json = nlohmann::ordered_json;

namespace {

// Malformed property files and unknown names.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string model, property, state, goal, chase;
    bool value = false, allow_exponential = false, emit_model = false, maximize = false;
    std::uint64_t seed = 1;
    long long runs = 1, steps = 100;
    int lo = -8, hi = 8;
};

struct Property {
    std::string type;
    Quantifier q = Quantifier::Exists;
    Bound b = Bound::AlmostSure;
    DwrProperty dwr;
    BuechiProperty buechi;
};

int state_id(const Mdp& m, const std::string& name) {
    int s = m.find_state(name);
    if (s < 0) throw InputError("unknown state '" + name + "'");
    return s;
}

Json names(const Mdp& m, const std::vector<int>& states) {
    Json a = Json::array();
    for (int s : states) a.push_back(m.names[s]);
    return a;
}

Json names(const Mdp& m, const std::vector<bool>& set) {
    Json a = Json::array();
    for (int s = 0; s < m.size(); ++s)
        if (set[s]) a.push_back(m.names[s]);
    return a;
}

Json pairs(const Mdp& m, const EndComponent& ec) {
    Json a = Json::array();
    for (auto [s, i] : ec.pairs) a.push_back(m.names[s] + "." + m.actions[s][i].name);
    return a;
}

// Scheduler of a restriction, keyed by original state names.
Json scheduler(const Mdp& m, const MdScheduler& sched, const Restriction* r = nullptr) {
    Json o = Json::object();
    for (int s = 0; s < static_cast<int>(sched.size()); ++s) {
        if (sched[s] < 0) continue;
        int os = r ? r->to_orig[s] : s;
        int oa = r ? r->action_orig[s][sched[s]] : sched[s];
        o[m.names[os]] = m.actions[os][oa].name;
    }
    return o;
}

Json optional_bool(const std::optional<bool>& b) { return b ? Json(*b) : Json(nullptr); }

Int parse_int(const Json& j, const std::string& what) {
    if (j.is_number_integer()) return Int(std::to_string(j.get<long long>()));
    if (j.is_string()) {
        Int v;
        if (v.set_str(j.get<std::string>(), 10) == 0) return v;
    }
    throw InputError(what + " must be an integer");
}

Property read_property(const Mdp& m, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw InputError("property needs a string \"type\"");
    Property p;
    p.type = j["type"];
    std::string q = j.value("quantifier", ""), b = j.value("bound", "");
    if (q != "exists" && q != "forall") throw InputError("quantifier must be exists or forall");
    if (b != "as" && b != "pos") throw InputError("bound must be as or pos");
    p.q = q == "exists" ? Quantifier::Exists : Quantifier::Forall;
    p.b = b == "as" ? Bound::AlmostSure : Bound::Positive;
    if (p.type == "dwr") {
        if (!j.contains("targets") || !j["targets"].is_array() || j["targets"].empty())
            throw InputError("dwr property needs a nonempty \"targets\" array");
        for (const auto& t : j["targets"]) {
            if (!t.is_object() || !t.contains("state") || !t["state"].is_string() || !t.contains("K"))
                throw InputError("each target needs \"state\" and \"K\"");
            DwrTarget dt{state_id(m, t["state"]), std::nullopt};
            if (!(t["K"].is_string() && t["K"] == "-inf")) dt.K = parse_int(t["K"], "K");
            p.dwr.targets.push_back(dt);
        }
    } else if (p.type == "buechi" || p.type == "cobuechi") {
        if (!j.contains("K")) throw InputError(p.type + " property needs \"K\"");
        p.buechi.K = parse_int(j["K"], "K");
        p.buechi.F.assign(m.size(), p.type == "cobuechi");
        if (p.type == "buechi") {
            if (!j.contains("F") || !j["F"].is_array()) throw InputError("buechi property needs an \"F\" array");
            for (const auto& f : j["F"]) {
                if (!f.is_string()) throw InputError("F entries must be state names");
                p.buechi.F[state_id(m, f)] = true;
            }
        }
    } else {
        throw InputError("unknown property type '" + p.type + "'");
    }
    return p;
}

Json inputs(const std::string& cmd, const Options& o) {
    Json in = {{"command", cmd}, {"model", o.model}};
    if (!o.property.empty()) in["property"] = o.property;
    if (!o.state.empty()) in["state"] = o.state;
    if (!o.goal.empty()) in["goal"] = o.goal;
    if (o.value) in["value"] = true;
    if (o.allow_exponential) in["allow_exponential"] = true;
    return in;
}

// --- subcommands ---

Json mec_header(const Mdp& m, const EndComponent& ec) {
    return {{"states", names(m, ec.states())}, {"pairs", pairs(m, ec)}};
}

Json cmd_classify(const Mdp& m, const Options& o) {
    Json mecs = Json::array();
    for (const auto& ec : decompose_mecs(m)) {
        Restriction r = restrict(m, ec);
        Classification c = classify(r.mdp, o.allow_exponential);
        Json e = mec_header(m, ec);
        e["max_mp"] = c.max_mp.get_str();
        e["min_mp"] = c.min_mp.get_str();
        e["pumping"] = c.pumping;
        e["universally_pumping"] = c.universally_pumping;
        e["weight_divergent"] = c.pos_weight_divergent;
        e["negatively_weight_divergent"] = c.neg_weight_divergent;
        e["universally_weight_divergent"] = c.universally_weight_divergent;
        e["gambling"] = optional_bool(c.gambling);
        e["has_zero_ec"] = optional_bool(c.has_zero_ec);
        if (c.witness) e["witness"] = {{"tag", c.witness_tag}, {"scheduler", scheduler(m, *c.witness, &r)}};
        mecs.push_back(e);
    }
    return {{"mecs", mecs}};
}

Json cmd_wgtdiv(const Mdp& m, const Options&) {
    Json mecs = Json::array();
    for (const auto& ec : decompose_mecs(m)) {
        Restriction r = restrict(m, ec);
        WgtdivResult w = check_weight_divergence(r.mdp);
        Json e = mec_header(m, ec);
        e["divergent"] = w.divergent;
        if (w.divergent) {
            e["witness_kind"] = w.kind == WitnessKind::Pumping ? "pumping" : "gambling";
            e["witness"] = scheduler(m, w.witness, &r);
        } else {
            e["spider_steps"] = w.steps.size();
        }
        mecs.push_back(e);
    }
    return {{"mecs", mecs}};
}

Json cmd_spider(const Mdp& m, const Options& o) {
    SpiderTrace t = flatten_zero_ecs(m);
    Json steps = Json::array();
    const Mdp* before = &m;
    for (const auto& st : t.steps) {
        Json edges = Json::array();
        for (const auto& [s, w] : st.tau_edges) edges.push_back({{"state", before->names[s]}, {"weight", w.get_str()}});
        steps.push_back({{"bscc", pairs(*before, st.bscc)},
                         {"reference", before->names[st.reference]},
                         {"tau_edges", edges}});
        before = &st.result.mdp;
    }
    Json r = {{"steps", steps}};
    if (o.emit_model) r["result_model"] = write_model(t.final_mdp);
    return r;
}

Json cmd_zeroec(const Mdp& m, const Options&) {
    Json mecs = Json::array();
    for (const auto& ec : decompose_mecs(m)) {
        Restriction r = restrict(m, ec);
        Rat mp = mdp_mean_payoff(r.mdp, Opt::Max).value;
        Json e = mec_header(m, ec);
        e["max_mp"] = mp.get_str();
        if (mp != 0) {
            mecs.push_back(e);
            continue;
        }
        ZeroEcInfo info = recurrence_values(maximal_zero_ecs(r.mdp), r.mdp);
        Json zs = Json::array();
        for (const auto& z : info.max_zero_ecs) {
            auto st = z.states();
            Json rec = Json::object(), lgr = Json::object(), w = Json::object();
            for (int s : st) {
                const std::string& n = m.names[r.to_orig[s]];
                rec[n] = info.rec.at(s).get_str();
                lgr[n] = info.lgr.at(s).get_str();
                Json row = Json::object();
                for (int t : st) row[m.names[r.to_orig[t]]] = info.w(s, t).get_str();
                w[n] = row;
            }
            Json states = Json::array();
            for (int s : st) states.push_back(m.names[r.to_orig[s]]);
            zs.push_back({{"states", states}, {"rec", rec}, {"lgr", lgr}, {"w", w}});
        }
        e["zero_ecs"] = zs;
        mecs.push_back(e);
    }
    return {{"mecs", mecs}};
}

int goal_of(const Mdp& m, const Options& o) {
    if (!o.goal.empty()) return state_id(m, o.goal);
    int goal = -1;
    for (int s = 0; s < m.size(); ++s)
        if (m.is_trap(s)) {
            if (goal >= 0) throw InputError("several traps; pass --goal");
            goal = s;
        }
    if (goal < 0) throw InputError("no trap state; pass --goal");
    return goal;
}

Json cmd_ssp(const Mdp& m, const Options& o) {
    int goal = goal_of(m, o);
    Opt mode = o.maximize ? Opt::Max : Opt::Min;
    SspResult r = solve_ssp(m, goal, mode);
    Json values = Json::object();
    for (int s = 0; s < m.size(); ++s) values[m.names[s]] = r.value[s].str();
    Json out = {{"goal", m.names[goal]}, {"mode", o.maximize ? "max" : "min"}};
    if (!o.state.empty()) out["value"] = r.value[state_id(m, o.state)].str();
    out["values"] = values;
    Finiteness fin = expectation_finite(m, goal, mode);
    out["finite"] = fin.finite;
    if (fin.finite && mode == Opt::Min) out["check_bt"] = check_bt(m, goal);
    out["flatten_steps"] = r.flatten_steps;
    if (r.scheduler) out["scheduler"] = scheduler(m, *r.scheduler);
    Json div = Json::array();
    for (const auto& ec : r.divergent_mecs) div.push_back(names(m, ec.states()));
    out["divergent_mecs"] = div;
    return out;
}

Json dwr_json(const Mdp& m, const DwrVerdict& v, bool want_value) {
    Json out = {{"holds", v.holds}, {"margin", v.margin.str()}};
    if (want_value) out["value"] = v.value ? Json(v.value->str()) : Json(nullptr);
    Json d = Json::object();
    const auto& dg = v.diagnostics;
    if (!dg.s_inf.empty()) d["s_inf"] = names(m, dg.s_inf);
    if (dg.n) {
        const NConstruction& nc = *dg.n;
        Json ecs = Json::array();
        for (std::size_t i = 0; i < nc.wd_mecs.size(); ++i)
            ecs.push_back({{"states", names(m, nc.wd_mecs[i].states())},
                           {"entry", nc.n.names[nc.entry[i]]},
                           {"exit", nc.n.names[nc.exit[i]]}});
        d["n_construction"] = {{"states", nc.n.size()}, {"omega", nc.omega.get_str()}, {"wd_mecs", ecs}};
    }
    if (dg.good_ecs) {
        Json trace = Json::array();
        for (const auto& x : dg.good_ecs->trace) trace.push_back(x);
        d["good_ec_trace"] = trace;
        d["good_ecs"] = dg.good_ecs->good;
    }
    if (dg.n_value) d["n_value"] = dg.n_value->str();
    out["diagnostics"] = d;
    return out;
}

Json cmd_dwr(const Mdp& m, const Options& o) {
    if (o.property.empty() || o.state.empty()) throw InputError("dwr needs --property and --state");
    Property p = read_property(m, o.property);
    if (p.type != "dwr") throw InputError("dwr needs a dwr property");
    return dwr_json(m, dwr(m, state_id(m, o.state), p.dwr, p.q, p.b), o.value);
}

Json cmd_buechi(const Mdp& m, const Options& o) {
    if (o.property.empty() || o.state.empty()) throw InputError("buechi needs --property and --state");
    Property p = read_property(m, o.property);
    if (p.type == "dwr") throw InputError("buechi needs a buechi or cobuechi property");
    int s = state_id(m, o.state);
    BuechiVerdict v = p.type == "buechi" ? buechi(m, s, p.buechi, p.q, p.b) : cobuechi(m, s, p.buechi.K, p.q, p.b);
    Json out = {{"holds", v.holds}};
    if (o.value) out["value"] = v.value.str();
    if (v.reduction) out["reduction"] = dwr_json(m, *v.reduction, false);
    return out;
}

Json cmd_oracle(const Mdp& m, const Options& o) {
    if (o.property.empty()) {
        Json mecs = Json::array();
        for (const auto& ec : decompose_mecs(m)) {
            Restriction r = restrict(m, ec);
            Classification c = brute_classify(r.mdp);
            Json e = mec_header(m, ec);
            e["max_mp"] = c.max_mp.get_str();
            e["pumping"] = c.pumping;
            e["weight_divergent"] = c.pos_weight_divergent;
            e["gambling"] = optional_bool(c.gambling);
            e["has_zero_ec"] = optional_bool(c.has_zero_ec);
            mecs.push_back(e);
        }
        return {{"mecs", mecs}};
    }
    if (o.state.empty()) throw InputError("oracle with --property needs --state");
    Property p = read_property(m, o.property);
    int s = state_id(m, o.state);
    UnfoldConfig cfg{o.lo, o.hi, WindowMode::Certified};
    if (cfg.lo > 0 || cfg.hi < 0) throw InputError("window must contain 0");
    // Verdict at the property's own thresholds; the value sweeps a uniform shift of them.
    auto holds_at = [&](const Int& shift) {
        if (p.type == "dwr") {
            DwrProperty q = p.dwr;
            for (auto& t : q.targets)
                if (t.K) *t.K += shift;
            return unfold_dwr(m, s, q, p.q, p.b, cfg);
        }
        if (p.type == "buechi") return unfold_buechi(m, s, {p.buechi.F, p.buechi.K + shift}, p.q, p.b, cfg);
        return unfold_cobuechi(m, s, p.buechi.K + shift, p.q, p.b, cfg);
    };
    Json out = {{"holds", holds_at(0)}, {"window", {o.lo, o.hi}}};
    if (o.value) {
        if (p.type == "dwr") throw InputError("oracle --value needs a buechi or cobuechi property");
        out["value"] = unfold_value([&](const Int& K) { return holds_at(K - p.buechi.K); }, cfg).str();
    }
    return out;
}

SchedulerCallback chase_callback(const Mdp& m, const std::string& arg) {
    // state:pump:leave:K
    std::vector<std::string> f;
    std::stringstream ss(arg);
    for (std::string x; std::getline(ss, x, ':');) f.push_back(x);
    if (f.size() != 4) throw InputError("--chase expects state:pump:leave:K");
    int s = state_id(m, f[0]);
    auto act = [&](const std::string& a) {
        for (int i = 0; i < static_cast<int>(m.actions[s].size()); ++i)
            if (m.actions[s][i].name == a) return i;
        throw InputError("unknown action '" + a + "' at " + f[0]);
    };
    return threshold_chasing(s, act(f[1]), act(f[2]), parse_int(Json(f[3]), "K"));
}

Json cmd_simulate(const Mdp& m, const Options& o) {
    if (o.state.empty()) throw InputError("simulate needs --state");
    if (o.runs < 1 || o.steps < 0) throw InputError("--runs must be positive and --steps nonnegative");
    SchedulerCallback cb;
    if (o.chase.empty()) {
        MdScheduler first(m.size());
        for (int s = 0; s < m.size(); ++s) first[s] = m.is_trap(s) ? -1 : 0;
        cb = md_callback(first);
    } else {
        cb = chase_callback(m, o.chase);
    }
    SimReport r = simulate(m, state_id(m, o.state), cb, o.steps, o.runs, o.seed);
    Json runs = Json::array();
    for (const auto& x : r.per_run)
        runs.push_back({{"min", x.min.get_str()}, {"max", x.max.get_str()}, {"final", x.final.get_str()},
                        {"final_state", m.names[x.final_state]}, {"steps", x.steps}, {"trapped", x.trapped}});
    Json visits = Json::object();
    for (int s = 0; s < m.size(); ++s) visits[m.names[s]] = r.runs_visiting[s];
    return {{"runs", r.runs}, {"steps", r.steps}, {"seed", r.seed}, {"runs_visiting", visits}, {"per_run", runs}};
}

int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::Syntax:
    case ErrorKind::DistributionNotStochastic:
    case ErrorKind::DanglingTarget:
    case ErrorKind::DuplicateTransition:
        return 2;
    case ErrorKind::TooLarge:
    case ErrorKind::WindowExceeded:
    case ErrorKind::RequiresExponential:
        return 4;
    default:
        return 3;
    }
}

int fail(const std::string& cmd, const Options& o, const std::string& kind, const std::string& msg, int code) {
    std::cerr << "wmdp: " << msg << "\n";
    Json out = {{"kind", "error"}, {"inputs", inputs(cmd, o)}, {"error", kind}, {"message", msg}};
    std::cout << out.dump(2) << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analysis of integer-weighted MDPs"};
    app.require_subcommand(1);
    Options o;
    using Handler = Json (*)(const Mdp&, const Options&);
    const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
        {"classify", "Classify every MEC", cmd_classify},
        {"wgtdiv", "Weight divergence of every MEC, with witness", cmd_wgtdiv},
        {"spider", "Flatten all 0-ECs", cmd_spider},
        {"zeroec", "Maximal 0-ECs, rec, lgr and w per MEC with max MP 0", cmd_zeroec},
        {"ssp", "Stochastic shortest path values to the goal", cmd_ssp},
        {"dwr", "Disjunctive weighted reachability", cmd_dwr},
        {"buechi", "Weighted Buechi and coBuechi", cmd_buechi},
        {"oracle", "Brute-force classification or windowed unfolding verdict", cmd_oracle},
        {"simulate", "Seeded Monte Carlo runs", cmd_simulate},
    };
    for (const auto& [name, help, fn] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--model", o.model, "model file")->required();
        sub->add_option("--property", o.property, "property JSON file");
        sub->add_option("--state", o.state, "initial state");
        sub->add_flag("--value", o.value, "report the optimal threshold");
        sub->add_flag("--allow-exponential", o.allow_exponential, "allow MD-scheduler enumeration");
        sub->add_flag("--emit-model", o.emit_model, "include the (resulting) model text");
        if (name == "ssp") {
            sub->add_option("--goal", o.goal, "goal trap (default: the unique trap)");
            sub->add_flag("--max", o.maximize, "maximize instead of minimize");
        }
        if (name == "oracle") {
            sub->add_option("--lo", o.lo, "weight window lower end");
            sub->add_option("--hi", o.hi, "weight window upper end");
        }
        if (name == "simulate") {
            sub->add_option("--seed", o.seed, "random seed");
            sub->add_option("--runs", o.runs, "number of runs");
            sub->add_option("--steps", o.steps, "steps per run");
            sub->add_option("--chase", o.chase, "threshold-chasing scheduler state:pump:leave:K");
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    CLI::App* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();
    Handler fn = nullptr;
    for (const auto& [name, help, f] : commands)
        if (name == cmd) fn = f;

    Mdp m;
    try {
        m = parse_model(o.model);
    } catch (const Error& e) {
        return fail(cmd, o, kind_name(e.kind()), e.what(), 2);
    }
    try {
        Json out = {{"kind", cmd}, {"inputs", inputs(cmd, o)}};
        out.update(fn(m, o));
        if (o.emit_model) out["model"] = write_model(m);
        std::cout << out.dump(2) << "\n";
        return 0;
    } catch (const InputError& e) {
        return fail(cmd, o, "InvalidInput", e.what(), 2);
    } catch (const Error& e) {
        return fail(cmd, o, kind_name(e.kind()), e.what(), exit_code(e.kind()));
    }
}
