#include "mvdyn/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvdyn/error.hpp"
#include "mvdyn/groups.hpp"

namespace mvdyn::cli {

namespace {

using json = nlohmann::ordered_json;

enum class Level { Error, Warn, Info, Debug };

class Logger {
public:
    explicit Logger(std::ostream& err) : err_(err) {
        const char* env = std::getenv("MVDYN_LOG");
        std::string v = env ? env : "warn";
        if (v == "error" || v == "0") level_ = Level::Error;
        else if (v == "info" || v == "2") level_ = Level::Info;
        else if (v == "debug" || v == "3") level_ = Level::Debug;
        else level_ = Level::Warn;
    }

    void log(Level l, const std::string& msg) const {
        static constexpr const char* names[] = {"error", "warn", "info", "debug"};
        if (l <= level_) err_ << "mvdyn " << names[static_cast<int>(l)] << ": " << msg << "\n";
    }
    void info(const std::string& msg) const { log(Level::Info, msg); }
    void debug(const std::string& msg) const { log(Level::Debug, msg); }

private:
    std::ostream& err_;
    Level level_ = Level::Warn;
};

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ParseError, "config: " + msg); }

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) config_error(where + " must be an object");
    for (auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok |= key == a;
        if (!ok) config_error("unknown key '" + where + "." + key + "'");
    }
}

json defaults() {
    return {
        {"dynamics", nullptr},
        {"z", nullptr},
        {"family", "T"},
        {"loop", nullptr},
        {"grid", nullptr},
        {"group", nullptr},
        {"action", nullptr},
        {"sufficiency", nullptr},
        {"spot_checks", 8},
        {"tolerances", {{"match", 1e-7}, {"collision_rel", 1e-7}, {"action", 1e-9}}},
        {"seed", 0},
        {"output", nullptr},
    };
}

void validate(const json& c) {
    check_keys(c, {"dynamics", "z", "family", "loop", "grid", "group", "action", "sufficiency", "spot_checks",
                   "tolerances", "seed", "output"},
               "config");
    if (!c["dynamics"].is_null()) check_keys(c["dynamics"], {"p1", "p0"}, "dynamics");
    if (!c["loop"].is_null()) check_keys(c["loop"], {"kind", "center", "radius", "turns", "samples", "vertices"}, "loop");
    if (!c["grid"].is_null()) check_keys(c["grid"], {"corner", "step", "n"}, "grid");
    if (!c["group"].is_null()) check_keys(c["group"], {"kind", "bound", "table"}, "group");
    if (!c["action"].is_null()) check_keys(c["action"], {"pairs_bound"}, "action");
    if (!c["sufficiency"].is_null()) check_keys(c["sufficiency"], {"c", "gamma", "eps"}, "sufficiency");
    check_keys(c["tolerances"], {"match", "collision_rel", "action"}, "tolerances");
}

struct Flags {
    std::string config, p1, p0, z, out, family, center, table, c, gamma, eps, corner;
    std::optional<std::int64_t> seed;
    std::optional<double> tol, radius, step;
    std::optional<int> turns, samples, bound, pairs, n, spot_checks;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string canon_poly(const json& v) { return to_string(parse_poly(v.get<std::string>())); }
std::string canon_complex(const json& v) { return format_complex(parse_complex(v.get<std::string>())); }

/// Merges file config and flags, applies the defaults the command needs and canonicalises literals.
json resolve(const std::string& cmd, const Flags& f) {
    json c = defaults();
    if (!f.config.empty()) {
        json user = json::parse(read_file(f.config));
        if (!user.is_object()) config_error("top level must be an object");
        for (auto& [key, value] : user.items()) {
            if (!c.contains(key)) config_error("unknown key '" + key + "'");
            if (key == "tolerances" && value.is_object())
                for (auto& [tk, tv] : value.items()) c["tolerances"][tk] = tv;
            else
                c[key] = value;
        }
    }
    validate(c);

    if (!f.p1.empty() || !f.p0.empty()) {
        if (c["dynamics"].is_null()) c["dynamics"] = {{"p1", "0"}, {"p0", "0"}};
        if (!f.p1.empty()) c["dynamics"]["p1"] = f.p1;
        if (!f.p0.empty()) c["dynamics"]["p0"] = f.p0;
    }
    if (!f.z.empty()) c["z"] = f.z;
    if (!f.family.empty()) c["family"] = f.family;
    if (f.seed) c["seed"] = *f.seed;
    if (f.tol) c["tolerances"]["match"] = *f.tol;
    if (!f.out.empty()) c["output"] = f.out;
    if (f.spot_checks) c["spot_checks"] = *f.spot_checks;

    bool wants_loop = cmd == "trace" || cmd == "classify";
    if (wants_loop && c["loop"].is_null()) c["loop"] = {{"kind", "circle"}, {"center", "0"}, {"radius", 1.0}};
    if (!c["loop"].is_null()) {
        json& l = c["loop"];
        if (!f.center.empty()) l["center"] = f.center;
        if (f.radius) l["radius"] = *f.radius;
        if (f.turns) l["turns"] = *f.turns;
        if (f.samples) l["samples"] = *f.samples;
        if (!l.contains("kind")) l["kind"] = "circle";
        std::string kind = l["kind"].get<std::string>();
        if (!l.contains("samples")) l["samples"] = 256;
        if (kind == "circle") {
            if (!l.contains("center")) l["center"] = "0";
            if (!l.contains("radius")) l["radius"] = 1.0;
            if (!l.contains("turns")) l["turns"] = 1;
            if (l.contains("vertices")) config_error("loop.vertices only applies to polyline loops");
            l["center"] = canon_complex(l["center"]);
        } else if (kind == "polyline") {
            if (!l.contains("vertices") || l["vertices"].size() < 3) config_error("polyline needs >= 3 vertices");
            for (auto& v : l["vertices"]) v = canon_complex(v);
            for (const char* k : {"center", "radius", "turns"})
                if (l.contains(k)) config_error(std::string("loop.") + k + " only applies to circle loops");
        } else {
            config_error("loop.kind must be circle or polyline");
        }
    }

    bool wants_grid = cmd == "invertibility" || cmd == "check-action";
    if (wants_grid && c["grid"].is_null()) {
        c["grid"] = cmd == "invertibility" ? json{{"corner", "-2.3-2.3i"}, {"step", 0.5}, {"n", 10}}
                                           : json{{"corner", "-70-70i"}, {"step", 35.0}, {"n", 5}};
    }
    if (!c["grid"].is_null()) {
        json& g = c["grid"];
        if (!f.corner.empty()) g["corner"] = f.corner;
        if (f.step) g["step"] = *f.step;
        if (f.n) g["n"] = *f.n;
        for (const char* k : {"corner", "step", "n"})
            if (!g.contains(k)) config_error(std::string("grid.") + k + " missing");
        g["corner"] = canon_complex(g["corner"]);
    }

    if (cmd == "check-group" && c["group"].is_null()) c["group"] = {{"kind", "bn"}, {"bound", 20}};
    if (!c["group"].is_null()) {
        json& g = c["group"];
        if (!f.table.empty()) g = {{"kind", "table"}, {"table", read_file(f.table)}};
        if (f.bound) g = {{"kind", "bn"}, {"bound", *f.bound}};
        if (!g.contains("kind")) g["kind"] = "bn";
        if (g["kind"] == "bn" && !g.contains("bound")) g["bound"] = 20;
        if (g["kind"] == "table" && !g.contains("table")) config_error("group.table missing");
        if (g["kind"] != "bn" && g["kind"] != "table") config_error("group.kind must be bn or table");
    }

    if (cmd == "check-action" && c["action"].is_null()) c["action"] = {{"pairs_bound", 10}};
    if (!c["action"].is_null() && f.pairs) c["action"]["pairs_bound"] = *f.pairs;

    if (cmd == "sufficiency-probe" && c["sufficiency"].is_null())
        c["sufficiency"] = {{"c", "1"}, {"gamma", "0,-1,1"}, {"eps", "0.001"}};
    if (!c["sufficiency"].is_null()) {
        json& s = c["sufficiency"];
        if (!f.c.empty()) s["c"] = f.c;
        if (!f.gamma.empty()) s["gamma"] = f.gamma;
        if (!f.eps.empty()) s["eps"] = f.eps;
        for (const char* k : {"c", "gamma", "eps"})
            if (!s.contains(k)) config_error(std::string("sufficiency.") + k + " missing");
        s["c"] = canon_complex(s["c"]);
        s["gamma"] = canon_poly(s["gamma"]);
        s["eps"] = canon_complex(s["eps"]);
    }

    if (!c["dynamics"].is_null()) {
        for (const char* k : {"p1", "p0"})
            if (!c["dynamics"].contains(k)) config_error(std::string("dynamics.") + k + " missing");
        c["dynamics"]["p1"] = canon_poly(c["dynamics"]["p1"]);
        c["dynamics"]["p0"] = canon_poly(c["dynamics"]["p0"]);
    }
    if (!c["z"].is_null()) c["z"] = canon_complex(c["z"]);
    if (c["family"] != "T" && c["family"] != "TT") config_error("family must be T or TT");
    return c;
}

QuadDynamics dynamics_of(const json& c) {
    if (c["dynamics"].is_null()) config_error("dynamics required (--p1/--p0 or config)");
    return {parse_poly(c["dynamics"]["p1"].get<std::string>()), parse_poly(c["dynamics"]["p0"].get<std::string>())};
}

cplx complex_of(const json& v) { return parse_complex(v.get<std::string>()); }

LoopPath loop_of(const json& c) {
    const json& l = c["loop"];
    int samples = l["samples"].get<int>();
    if (l["kind"] == "circle")
        return LoopPath::circle(complex_of(l["center"]), l["radius"].get<double>(), samples, l["turns"].get<int>());
    std::vector<cplx> v;
    for (auto& x : l["vertices"]) v.push_back(complex_of(x));
    return LoopPath::polyline(std::move(v), samples);
}

std::vector<cplx> grid_of(const json& c) {
    const json& g = c["grid"];
    return square_grid(complex_of(g["corner"]), g["step"].get<double>(), g["n"].get<int>());
}

TraceOptions trace_options(const json& c) {
    TraceOptions o;
    o.collision_rel = c["tolerances"]["collision_rel"].get<double>();
    return o;
}

std::string fmt(cplx z) { return format_complex(z); }

json complex_list(std::span<const cplx> v) {
    json a = json::array();
    for (cplx z : v) a.push_back(fmt(z));
    return a;
}

json monodromy_json(const MonodromyResult& m) {
    json j;
    j["permutation"] = m.permutation;
    j["cycles"] = m.cycles;
    j["cycle_windings"] = m.cycle_windings;
    j["branch_turns"] = m.branch_turns;
    j["min_separation"] = m.trace.min_separation;
    j["steps"] = m.trace.times.size() - 1;
    j["identity"] = m.is_identity();
    return j;
}

json splitting_json(const SplittingReport& s) {
    json j;
    j["base"] = fmt(s.base);
    j["first_level"] = complex_list(s.first_level);
    json labelled = json::object(), perm = json::object();
    for (int l = 0; l < 4; ++l) {
        labelled[label_name(l)] = fmt(s.labelled[l]);
        perm[label_name(l)] = label_name(s.label_permutation[l]);
    }
    j["labelled"] = labelled;
    json gen = json::array();
    for (int g : s.genealogy) gen.push_back(label_name(g));
    j["genealogy"] = gen;
    j["label_permutation"] = perm;
    json parts = json::array();
    for (int p : s.preserved_partitions) parts.push_back(partition_name(p));
    j["preserved_partitions"] = parts;
    j["classification"] = to_string(s.classification);
    j["monodromy"] = monodromy_json(s.monodromy);
    return j;
}

json loop_verdict_json(const LoopVerdict& v) {
    json j;
    j["center"] = fmt(v.center);
    j["radius"] = v.radius;
    j["splitting"] = splitting_json(v.report);
    if (v.half_radius) j["half_radius_classification"] = to_string(v.half_radius->classification);
    return j;
}

json obstruction_json(const ObstructionReport& o) {
    json j;
    j["verdict"] = to_string(o.verdict);
    j["shift"] = fmt(o.shift);
    j["shift_exact"] = o.shift_exact;
    j["shifted_p1"] = to_string(o.shifted_p1);
    j["shifted_p0"] = to_string(o.shifted_p0);
    j["z1"] = fmt(o.z1);
    j["z1_multiplicity"] = o.z1_multiplicity;
    j["z1_root_of_p1"] = o.z1_root_of_p1;
    j["at_z1"] = o.at_z1 ? loop_verdict_json(*o.at_z1) : json(nullptr);
    j["at_0"] = o.at_0 ? loop_verdict_json(*o.at_0) : json(nullptr);
    j["diagnostics"] = o.diagnostics;
    return j;
}

json sufficiency_json(const SufficiencyReport& s) {
    json j;
    j["c"] = fmt(s.c);
    j["eps"] = fmt(s.eps);
    j["perturbations"] = s.perturbations;
    j["z1"] = fmt(s.z1);
    j["z2"] = fmt(s.z2);
    j["z1p"] = fmt(s.z1p);
    j["z2p"] = fmt(s.z2p);
    j["z3p"] = fmt(s.z3p);
    j["z4p"] = fmt(s.z4p);
    j["target"] = to_string(s.target);
    j["image_z3p"] = to_string(s.image_z3);
    j["image_z4p"] = to_string(s.image_z4);
    j["mismatch_z3p"] = s.mismatch_z3;
    j["mismatch_z4p"] = s.mismatch_z4;
    j["tol"] = s.tol;
    j["certificate"] = s.certificate;
    j["certificate_text"] = s.certificate_text;
    return j;
}

json axiom_json(const AxiomReport& r) {
    json j;
    j["checked"] = r.checked;
    json v = json::array();
    for (auto& x : r.violations) v.push_back({{"law", x.law}, {"elements", x.elements}, {"detail", x.detail}});
    j["violations"] = v;
    j["ok"] = r.ok();
    return j;
}

json header(const std::string& cmd, const json& config) { return {{"command", cmd}, {"config", config}}; }

std::string cmd_eval(const json& c, const Logger& log) {
    auto t = dynamics_of(c);
    if (c["z"].is_null()) config_error("eval needs --z");
    cplx z = complex_of(c["z"]);
    log.info("eval at " + fmt(z));
    json doc = header("eval", c);
    doc["images"] = to_string(eval_T(t, z));
    return doc.dump(2) + "\n";
}

std::string cmd_compose(const json& c, const Logger& log) {
    auto t = dynamics_of(c);
    auto q = compose(t);
    log.info("composed; exact = " + std::string(q.q[0].is_exact() ? "true" : "false"));
    json doc = header("compose", c);
    json quartic;
    for (int k = 0; k < 4; ++k) quartic["q" + std::to_string(k)] = to_string(q.q[k]);
    quartic["q4"] = "1";
    doc["quartic"] = quartic;

    std::mt19937_64 rng(c["seed"].get<std::uint64_t>());
    std::uniform_real_distribution<double> u(-3, 3);
    double tol = c["tolerances"]["match"].get<double>();
    json rows = json::array();
    double worst = 0;
    for (int i = 0; i < c["spot_checks"].get<int>(); ++i) {
        cplx z{u(rng), u(rng)};
        std::vector<cplx> direct;
        auto first = eval_T(t, z);
        for (cplx w : first.values()) {
            auto second = eval_T(t, w);
            direct.insert(direct.end(), second.values().begin(), second.values().end());
        }
        auto roots = q.roots_at(z);
        double d = bottleneck_match(roots, CMultiset(direct)).distance;
        worst = std::max(worst, d);
        rows.push_back({{"z", fmt(z)},
                        {"quartic_roots", to_string(roots)},
                        {"two_step", to_string(CMultiset(direct))},
                        {"distance", d},
                        {"ok", d <= tol}});
    }
    doc["spot_checks"] = rows;
    doc["max_distance"] = worst;
    doc["ok"] = worst <= tol;
    return doc.dump(2) + "\n";
}

std::string cmd_trace(const json& c, const Logger& log) {
    auto t = dynamics_of(c);
    auto loop = loop_of(c);
    auto opts = trace_options(c);
    opts.reference = c["loop"]["kind"] == "circle" ? loop.center : cplx{};
    MonodromyResult m;
    if (c["family"] == "TT") {
        m = trace_branches(compose(t), loop, opts);
    } else {
        m = trace_branches(t, loop, opts);
    }
    log.info("trace: " + std::to_string(m.trace.times.size()) + " points");
    std::string s = json{{"command", "trace"}, {"config", c}}.dump() + "\n";
    for (std::size_t i = 0; i < m.trace.times.size(); ++i) {
        json row;
        row["step"] = i;
        row["t"] = m.trace.times[i];
        row["z"] = fmt(loop.at(m.trace.times[i]));
        row["sheets"] = complex_list(m.trace.sheets[i]);
        s += row.dump() + "\n";
    }
    s += json{{"summary", monodromy_json(m)}}.dump() + "\n";
    return s;
}

std::string cmd_classify(const json& c, const Logger& log) {
    auto t = dynamics_of(c);
    auto rep = classify_splitting(t, loop_of(c), trace_options(c));
    log.info("classification " + to_string(rep.classification));
    json doc = header("classify", c);
    doc["splitting"] = splitting_json(rep);
    return doc.dump(2) + "\n";
}

std::string cmd_verdict(const json& c, const Logger& log) {
    auto t = dynamics_of(c);
    auto rep = group_definability_report(t);
    log.info("verdict " + to_string(rep.verdict));
    json doc = header("verdict", c);
    doc["verdict"] = to_string(rep.verdict);
    if (rep.bn)
        doc["bn_conjugacy"] = {{"lambda", fmt(rep.bn->lambda)},
                               {"mu", fmt(rep.bn->mu)},
                               {"max_mismatch", rep.bn->max_mismatch}};
    if (rep.p0_perfect_square) {
        doc["shift"] = fmt(rep.shift);
        doc["p0_perfect_square"] = *rep.p0_perfect_square;
        if (rep.p0_root) doc["p0_root"] = to_string(*rep.p0_root);
    }
    if (rep.form)
        doc["sqrt_square_form"] = {{"alpha", to_string(rep.form->alpha)},
                                   {"beta", to_string(rep.form->beta)},
                                   {"max_mismatch", rep.form->max_mismatch}};
    if (rep.obstruction) doc["obstruction"] = obstruction_json(*rep.obstruction);
    if (rep.sufficiency) doc["sufficiency"] = sufficiency_json(*rep.sufficiency);
    doc["notes"] = rep.notes;
    return doc.dump(2) + "\n";
}

std::string cmd_check_group(const json& c, const Logger& log) {
    const json& g = c["group"];
    json doc = header("check-group", c);
    bool ok;
    if (g["kind"] == "bn") {
        int bound = g["bound"].get<int>();
        if (bound < 1) config_error("group.bound must be >= 1");
        BNGroup bn{bound};
        auto assoc = check_associativity(bn, bound);
        auto ui = check_unit_inverse(bn, bound);
        doc["associativity"] = axiom_json(assoc);
        doc["unit_inverse"] = axiom_json(ui);
        json closures = json::array();
        for (int a = 0; a <= bound; ++a) {
            auto cl = subgroup_closure(bn, a);
            closures.push_back({{"generator", a},
                                {"elements", cl.elements},
                                {"whole_carrier", cl.whole_carrier},
                                {"saturated", cl.saturated}});
        }
        doc["closures"] = closures;
        ok = assoc.ok() && ui.ok();
    } else {
        auto table = parse_table(g["table"].get<std::string>());
        auto assoc = check_associativity(table);
        auto ui = check_unit_inverse(table);
        doc["associativity"] = axiom_json(assoc);
        doc["unit_inverse"] = axiom_json(ui);
        json closures = json::array();
        for (int a = 0; a < table.size(); ++a) {
            auto cl = subgroup_closure(table, a);
            json names = json::array();
            for (int e : cl.elements) names.push_back(table.carrier[e]);
            closures.push_back({{"generator", table.carrier[a]}, {"elements", names}, {"whole_carrier", cl.whole_carrier}});
        }
        doc["closures"] = closures;
        ok = assoc.ok() && ui.ok();
    }
    log.info(std::string("group axioms ") + (ok ? "hold" : "fail"));
    doc["ok"] = ok;
    return doc.dump(2) + "\n";
}

std::string cmd_check_action(const json& c, const Logger& log) {
    int pairs = c["action"]["pairs_bound"].get<int>();
    auto points = grid_of(c);
    auto rep = verify_action(ActionSpec::buchstaber_novikov(pairs), pairs, points,
                             c["tolerances"]["action"].get<double>());
    log.info("action checked on " + std::to_string(rep.checked) + " identities");
    json doc = header("check-action", c);
    doc["action"] = "buchstaber-novikov";
    doc["points"] = points.size();
    doc["checked"] = rep.checked;
    doc["max_distance"] = rep.max_distance;
    doc["violations"] = rep.violations;
    doc["ok"] = rep.ok();
    return doc.dump(2) + "\n";
}

std::string cmd_invertibility(const json& c, const Logger& log) {
    auto t = dynamics_of(c);
    auto grid = grid_of(c);
    auto rep = strong_invertibility_probe(t, grid);
    log.info("invertibility probe over " + std::to_string(grid.size()) + " targets");
    json doc = header("invertibility", c);
    doc["strongly_invertible_on_grid"] = rep.strongly_invertible_on_grid;
    doc["violations"] = complex_list(rep.violations);
    json pts = json::array();
    for (auto& p : rep.points) {
        json pre = json::array();
        for (auto& q : p.preimages) pre.push_back({{"z", fmt(q.z)}, {"edges", q.edge_multiplicity}});
        pts.push_back({{"w", fmt(p.w)}, {"total_edges", p.total_edges}, {"preimages", pre}});
    }
    doc["points"] = pts;
    return doc.dump(2) + "\n";
}

std::string cmd_sufficiency(const json& c, const Logger& log) {
    const json& s = c["sufficiency"];
    auto rep = sufficiency_probe(complex_of(s["c"]), parse_poly(s["gamma"].get<std::string>()), complex_of(s["eps"]));
    log.info(std::string("certificate ") + (rep.certificate ? "emitted" : "not emitted"));
    json doc = header("sufficiency-probe", c);
    doc["probe"] = sufficiency_json(rep);
    return doc.dump(2) + "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Logger log(err);
    CLI::App app{"2-valued polynomial dynamics: composition, monodromy and group definability", "mvdyn"};
    app.require_subcommand(1);
    Flags f;

    struct Command {
        const char* name;
        const char* help;
        std::string (*fn)(const json&, const Logger&);
    };
    const Command commands[] = {
        {"eval", "images T(z)", cmd_eval},
        {"compose", "quartic family of T o T with spot checks", cmd_compose},
        {"trace", "NDJSON branch trace along a loop", cmd_trace},
        {"classify", "splitting type of T o T along a loop", cmd_classify},
        {"verdict", "group definability report", cmd_verdict},
        {"check-group", "2-valued group axioms", cmd_check_group},
        {"check-action", "Buchstaber-Novikov action identities", cmd_check_action},
        {"invertibility", "strong invertibility probe on a grid", cmd_invertibility},
        {"sufficiency-probe", "counterexample points for (c +- sqrt(gamma))^2", cmd_sufficiency},
    };
    for (auto& cmd : commands) {
        auto* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--config", f.config, "JSON config file");
        sub->add_option("--p1", f.p1, "p1 coefficients, ascending");
        sub->add_option("--p0", f.p0, "p0 coefficients, ascending");
        sub->add_option("--z", f.z, "point");
        sub->add_option("--seed", f.seed, "random seed");
        sub->add_option("--tol", f.tol, "match tolerance");
        sub->add_option("--out", f.out, "write the document here instead of stdout");
        sub->add_option("--family", f.family, "T or TT");
        sub->add_option("--center", f.center, "loop center");
        sub->add_option("--radius", f.radius, "loop radius");
        sub->add_option("--turns", f.turns, "signed loop turns");
        sub->add_option("--samples", f.samples, "initial loop steps");
        sub->add_option("--grid-corner", f.corner, "grid lower-left corner");
        sub->add_option("--grid-step", f.step, "grid spacing");
        sub->add_option("--grid-n", f.n, "grid points per side");
        sub->add_option("--bound", f.bound, "Buchstaber-Novikov bound");
        sub->add_option("--table", f.table, "multiplication table file");
        sub->add_option("--pairs", f.pairs, "largest group element in action pairs");
        sub->add_option("--c", f.c, "constant c");
        sub->add_option("--gamma", f.gamma, "gamma coefficients, ascending");
        sub->add_option("--eps", f.eps, "perturbation eps");
        sub->add_option("--spot-checks", f.spot_checks, "compose spot-check count");
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitParse;
    }

    const Command* chosen = nullptr;
    for (auto& cmd : commands)
        if (app.got_subcommand(cmd.name)) chosen = &cmd;

    try {
        json config = resolve(chosen->name, f);
        log.debug("config " + config.dump());
        std::string doc = chosen->fn(config, log);
        if (config["output"].is_null()) {
            out << doc;
        } else {
            std::ofstream file(config["output"].get<std::string>(), std::ios::binary);
            if (!file) throw Error(ErrorCode::ParseError, "cannot write '" + config["output"].get<std::string>() + "'");
            file << doc;
        }
        return kExitOk;
    } catch (const json::exception& e) {
        log.log(Level::Error, std::string("config: ") + e.what());
        return kExitParse;
    } catch (const Error& e) {
        log.log(Level::Error, e.what());
        return e.code() == ErrorCode::ParseError ? kExitParse : kExitNumeric;
    } catch (const std::exception& e) {
        log.log(Level::Error, e.what());
        return kExitNumeric;
    }
}

}  // namespace mvdyn::cli
