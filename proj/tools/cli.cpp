#include "cli.hpp"

#include "scatterlab/evolve2p.hpp"
#include "scatterlab/logic.hpp"
#include "scatterlab/phases.hpp"
#include "scatterlab/scatter1p.hpp"
#include "scatterlab/switch.hpp"
#include "scatterlab/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/sha.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

namespace scatterlab::cli {

using nlohmann::json;

std::string git_blob_hash(const std::string& bytes) {
    const std::string blob = "blob " + std::to_string(bytes.size()) + std::string(1, '\0') + bytes;
    unsigned char md[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), md);
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned char c : md) {
        s += hex[c >> 4];
        s += hex[c & 15];
    }
    return s;
}

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Metadata shared by every output: tool version, subcommand, echoed options
/// and hashes of input files, in a fixed order.
struct Metadata {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& k, const std::string& v) { entries.emplace_back(k, v); }

    void add_input(const std::string& label, const std::string& path) {
        add("input." + label, path);
        add("input." + label + ".sha1", git_blob_hash(read_text_file(path)));
    }

    std::string csv_header() const {
        std::string s;
        for (const auto& [k, v] : entries) s += "# " + k + "=" + v + "\n";
        return s;
    }

    json as_json() const {
        json j = json::object();
        for (const auto& [k, v] : entries) j[k] = v;
        return j;
    }
};

void write_atomically(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot write " + tmp.string());
        f << text;
        f.flush();
        if (!f) throw ConfigError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ConfigError("cannot move output into place at " + path);
    }
}

struct Common {
    std::string output;
    int threads = 0;
};

struct ModelOpts {
    std::string model = "tj";
    double t = 1.0, J = 1.0, U = 1.0, Jx = 1.0, Jz = 1.0;

    ModelParams params() const {
        ModelParams p;
        p.model = model_from_string(model);
        p.t = t;
        p.J = J;
        p.U = U;
        p.Jx = Jx;
        p.Jz = Jz;
        return p;
    }
};

struct KinOpts {
    double k1 = kPi / 4, k2 = kPi / 2;
    bool signed_momenta = false;

    RelativeKinematics kin() const {
        return signed_momenta ? RelativeKinematics(k1, k2) : RelativeKinematics::head_on(k1, k2);
    }
};

/// Doubles are echoed at full precision so the header reproduces the run.
CLI::Option* add_real(CLI::App* s, const std::string& name, double& x, const std::string& desc = "") {
    return s->add_option(name, x, desc)->default_str(fmt(x));
}

void add_common(CLI::App* s, Common& c) {
    s->add_option("-o,--output", c.output, "Write the result to this file (default: stdout)");
    s->add_option("--threads", c.threads, "Worker threads; results do not depend on it")->check(CLI::NonNegativeNumber);
}

void add_model(CLI::App* s, ModelOpts& m, bool couplings = true) {
    s->add_option("--model", m.model, "tj, hubbard or xxz");
    add_real(s, "--t", m.t, "Hopping amplitude");
    if (couplings) {
        add_real(s, "--J", m.J, "t-J exchange");
        add_real(s, "--U", m.U, "Hubbard on-site repulsion");
        add_real(s, "--Jx", m.Jx, "XXZ transverse exchange");
        add_real(s, "--Jz", m.Jz, "XXZ longitudinal exchange");
    }
}

void add_kin(CLI::App* s, KinOpts& k) {
    add_real(s, "--k1", k.k1, "Momentum of the left packet (radians)");
    add_real(s, "--k2", k.k2, "Momentum of the right packet (radians)");
    s->add_flag("--signed-momenta", k.signed_momenta,
                "Use k1, k2 as signed momenta instead of head-on magnitudes");
}

/// Echo of every option of a subcommand except output plumbing.
void echo_options(const CLI::App* s, Metadata& md) {
    md.add("tool", std::string("scatterlab ") + kToolVersion);
    md.add("subcommand", s->get_name());
    std::map<std::string, std::string> vals;
    for (const CLI::Option* o : s->get_options()) {
        const std::string name = o->get_single_name();
        if (name == "help" || name == "output" || name == "threads") continue;
        std::string v;
        if (o->count() > 0) {
            for (std::size_t i = 0; i < o->results().size(); ++i) v += (i ? "," : "") + o->results()[i];
        } else {
            v = o->get_default_str();
            if (o->get_expected_min() == 0) v = "false";
            if (v.empty()) v = "none";
        }
        vals[name] = v;
    }
    for (const auto& [k, v] : vals) md.add("config." + k, v);
}

int spin_channel_from_string(const std::string& s) {
    if (s == "singlet" || s == "s") return spin::S;
    if (s == "t0") return spin::T0;
    if (s == "tplus" || s == "t+") return spin::TPlus;
    if (s == "tminus" || s == "t-") return spin::TMinus;
    throw ConfigError("unknown spin channel '" + s + "' (expected singlet, t0, tplus or tminus)");
}

/// Catalog id or graph file; records the input hash either way.
ScatterGraph load_graph_arg(const std::string& id, Metadata& md) {
    if (std::filesystem::is_regular_file(id)) {
        md.add_input("graph", id);
        return load_graph_file(id);
    }
    md.add_input("switch_catalog", switch_catalog_path());
    return catalog_switch(id);
}

class Emitter {
public:
    Emitter(const Common& c, std::ostream& out) : c_(c), out_(out) {}
    void emit(const std::string& text) {
        if (c_.output.empty())
            out_ << text;
        else
            write_atomically(c_.output, text);
    }

private:
    const Common& c_;
    std::ostream& out_;
};

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Wave-packet scattering on graphs: phases, gates and synthesis"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("scatterlab ") + kToolVersion);

    Common common;
    ModelOpts mo;
    KinOpts ko;

    // switch-verify
    std::string graph_id = "default-switch";
    double k_low = kPi / 4, k_high = kPi / 2, sw_tol = 1e-10;
    auto* sv = app.add_subcommand("switch-verify", "Certify a momentum switch from its S-matrix");
    sv->add_option("--graph", graph_id, "Catalog name or graph file");
    add_real(sv, "--k-low", k_low, "Momentum routed from terminal 1 to 3");
    add_real(sv, "--k-high", k_high, "Momentum routed from terminal 2 to 3");
    add_real(sv, "--tol", sw_tol, "Allowed deviation of |S| from 1");
    add_real(sv, "--t", mo.t, "Hopping amplitude");
    add_common(sv, common);

    // scatter-1p
    std::vector<double> k_list;
    std::string k_grid;
    auto* s1 = app.add_subcommand("scatter-1p", "Single-particle S-matrix entries");
    s1->add_option("--graph", graph_id, "Catalog name or graph file");
    auto* k_opt = s1->add_option("--k", k_list, "Momenta (radians)")->delimiter(',');
    s1->add_option("--grid", k_grid, "start:stop:count momentum grid")->excludes(k_opt);
    add_real(s1, "--t", mo.t, "Hopping amplitude");
    add_common(s1, common);

    // scatter-2p
    std::size_t L = 32, line_length = 0;
    std::string shape = "square", channel = "singlet";
    double tol = 1e-12, interaction_threshold = 1e-3;
    bool with_transmission = false;
    auto* s2 = app.add_subcommand("scatter-2p", "Head-on two-packet collision on a line");
    add_model(s2, mo);
    add_kin(s2, ko);
    s2->add_option("--L", L, "Packet length");
    s2->add_option("--line-length", line_length, "Line length (0: max(512, 8L))");
    s2->add_option("--shape", shape, "square or gaussian");
    s2->add_option("--channel", channel, "singlet, t0, tplus or tminus");
    add_real(s2, "--tol", tol, "Propagator tolerance");
    add_real(s2, "--interaction-threshold", interaction_threshold, "Collision is complete below this weight at |x - y| <= 2");
    s2->add_flag("--transmission", with_transmission, "Also run the spin-channel transmission study");
    add_common(s2, common);

    // phase-curve
    std::string grid;
    std::string sweep = "jx";
    double fixed = 0.0;
    auto* pc = app.add_subcommand("phase-curve", "Closed-form collision phase along a coupling grid");
    add_model(pc, mo, false);
    add_kin(pc, ko);
    pc->add_option("--grid", grid, "start:stop:count coupling grid")->required();
    pc->add_option("--sweep", sweep, "XXZ coupling to sweep: jx or jz");
    add_real(pc, "--fixed", fixed, "XXZ coupling held fixed");
    add_common(pc, common);

    // scaling-study
    std::vector<std::size_t> L_list{16, 32, 64};
    auto* ss = app.add_subcommand("scaling-study", "Collision phase error against packet length");
    add_model(ss, mo);
    add_kin(ss, ko);
    ss->add_option("--L", L_list, "Packet lengths, ascending")->delimiter(',');
    ss->add_option("--line-length", line_length, "Line length (0: max(512, 8L))");
    ss->add_option("--shape", shape, "square or gaussian");
    ss->add_option("--channel", channel, "singlet, t0, tplus or tminus");
    add_real(ss, "--tol", tol, "Propagator tolerance");
    add_common(ss, common);

    // simulate-G
    std::size_t g_L = 16;
    bool swap_momenta = false;
    double min_routed = 0.05;
    auto* sg = app.add_subcommand("simulate-G", "Two collisions through four momentum switches");
    sg->add_option("--graph", graph_id, "Switch: catalog name or graph file");
    add_model(sg, mo);
    sg->add_option("--L", g_L, "Packet length");
    sg->add_option("--shape", shape, "square or gaussian");
    add_real(sg, "--tol", tol, "Propagator tolerance");
    add_real(sg, "--min-routed", min_routed, "Routed probability below which routing has failed");
    sg->add_flag("--swap-momenta", swap_momenta, "Send each packet in with the other's momentum");
    add_common(sg, common);

    // synth
    std::optional<double> theta;
    double gamma_t = 0.0, epsilon = 1e-3;
    std::string orientation = "heisenberg";
    long long budget = kDefaultBudget;
    auto* sy = app.add_subcommand("synth", "Plan a power of G approximating an exchange phase");
    sy->add_option("--theta", theta, "Per-collision phase (default: from the model and momenta)");
    add_model(sy, mo);
    add_kin(sy, ko);
    sy->add_option("--gamma-t", gamma_t, "Target exchange angle")->required();
    add_real(sy, "--epsilon", epsilon, "Requested precision");
    sy->add_option("--orientation", orientation, "heisenberg (target -gamma_t) or direct (+gamma_t)");
    sy->add_option("--budget", budget, "Largest collision count tried");
    add_common(sy, common);

    // cnot-sim
    std::string schedule_path;
    std::optional<double> cnot_eps;
    auto* cs = app.add_subcommand("cnot-sim", "Logical unitary of an exchange schedule");
    cs->add_option("--schedule", schedule_path, "Schedule file")->required();
    cs->add_option("--epsilon", cnot_eps, "Quantize each step to a power of G at this precision");
    cs->add_option("--theta", theta, "Per-collision phase (default: from the model and momenta)");
    add_model(cs, mo);
    add_kin(cs, ko);
    cs->add_option("--budget", budget, "Largest collision count tried per step");
    add_common(cs, common);

    // measure
    int bit = 1;
    std::uint64_t shots = 1'000'000, seed = 1;
    std::size_t max_reps = 21;
    auto* me = app.add_subcommand("measure", "Third-spin readout statistics of a logical qubit");
    me->add_option("--bit", bit, "Logical basis state 0 or 1")->check(CLI::Range(0, 1));
    me->add_option("--shots", shots, "Monte-Carlo shots");
    me->add_option("--seed", seed, "Generator seed");
    me->add_option("--max-repetitions", max_reps, "Majority-vote table up to this many repetitions");
    add_common(me, common);

    std::vector<std::string> argv_store{"scatterlab"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        set_thread_count(common.threads);
        Emitter em(common, out);
        Metadata md;

        if (sv->parsed()) {
            echo_options(sv, md);
            const auto g = load_graph_arg(graph_id, md);
            const auto r = verify_switch(g, Momentum(k_low), Momentum(k_high), sw_tol, mo.t);
            json j;
            j["metadata"] = md.as_json();
            j["passed"] = r.passed;
            j["reason"] = r.reason;
            j["vertices"] = g.vertex_count();
            j["terminals"] = g.terminals();
            j["s31_low"] = r.s31_low;
            j["s32_high"] = r.s32_high;
            j["s21_low"] = r.s21_low;
            j["s21_high"] = r.s21_high;
            j["unitarity_low"] = r.unitarity_low;
            j["unitarity_high"] = r.unitarity_high;
            em.emit(json_text(j));
            if (!r.passed) {
                err << "verification failed: " << r.reason << "\n";
                return 3;
            }
            return 0;
        }

        if (s1->parsed()) {
            echo_options(s1, md);
            const auto g = load_graph_arg(graph_id, md);
            std::vector<double> ks = k_grid.empty() ? k_list : parse_grid(k_grid);
            if (ks.empty()) throw ConfigError("give momenta with --k or --grid");
            std::string csv = md.csv_header() + "k,terminal_in,terminal_out,re,im,abs2\n";
            for (double k : ks) {
                const auto S = s_matrix(g, Momentum(k), mo.t);
                for (std::size_t in = 0; in < S.size(); ++in)
                    for (std::size_t o = 0; o < S.size(); ++o) {
                        const cplx z = S(o, in);
                        csv += fmt(k) + "," + std::to_string(in + 1) + "," + std::to_string(o + 1) + "," + fmt(z.real()) +
                               "," + fmt(z.imag()) + "," + fmt(std::norm(z)) + "\n";
                    }
            }
            em.emit(csv);
            return 0;
        }

        auto collision_config = [&](std::size_t packet_len) {
            CollisionConfig c;
            c.model = mo.params();
            const auto kin = ko.kin();
            c.k1 = kin.k1().value();
            c.k2 = kin.k2().value();
            c.L = packet_len;
            c.line_length = line_length;
            c.shape = packet_shape_from_string(shape);
            c.channel = spin_channel_from_string(channel);
            c.tol = tol;
            c.interaction_threshold = interaction_threshold;
            return c;
        };

        if (s2->parsed()) {
            echo_options(s2, md);
            const auto cfg = collision_config(L);
            const auto r = run_collision(cfg);
            std::string head = "L,line_length,duration,theta_measured,theta_analytic,phase_error,overlap,"
                               "interaction_probability,leakage";
            std::string row = std::to_string(r.L) + "," + std::to_string(r.line_length) + "," + fmt(r.duration) + "," +
                              fmt(r.theta_measured) + "," + fmt(r.theta_analytic) + "," + fmt(r.phase_error) + "," +
                              fmt(r.overlap) + "," + fmt(r.interaction_probability) + "," + fmt(r.leakage);
            if (with_transmission) {
                const auto tr = channel_transmission(cfg);
                head += ",transmitted,reflected,transmission_analytic";
                row += "," + fmt(tr.transmitted) + "," + fmt(tr.reflected) + "," + fmt(tr.analytic);
            }
            if (r.leakage_warning) err << "warning: boundary probability " << r.leakage << " exceeds 1e-3\n";
            em.emit(md.csv_header() + head + "\n" + row + "\n");
            return 0;
        }

        if (pc->parsed()) {
            echo_options(pc, md);
            const auto model = model_from_string(mo.model);
            PhaseCurveOptions opt;
            if (sweep == "jx")
                opt.sweep = XxzSweep::Jx;
            else if (sweep == "jz")
                opt.sweep = XxzSweep::Jz;
            else
                throw ConfigError("--sweep must be jx or jz");
            opt.fixed = fixed;
            const auto rows = phase_curve(model, ko.kin(), parse_grid(grid), opt);
            const bool xxz = model == Model::XXZ;
            std::string csv = md.csv_header() + "coupling,theta_unwrapped,re_R,im_R" + (xxz ? ",theta1_unwrapped" : "") + "\n";
            const double nan = std::numeric_limits<double>::quiet_NaN();
            for (const auto& r : rows) {
                csv += fmt(r.coupling) + "," + fmt(r.singular ? nan : r.theta_unwrapped) + "," +
                       fmt(r.singular ? nan : r.amplitude.real()) + "," + fmt(r.singular ? nan : r.amplitude.imag());
                if (xxz) csv += "," + fmt(r.singular ? nan : r.theta1_unwrapped);
                csv += "\n";
            }
            em.emit(csv);
            return 0;
        }

        if (ss->parsed()) {
            echo_options(ss, md);
            const auto study = scaling_study(collision_config(L_list.empty() ? 0 : L_list.front()), L_list);
            md.add("result.deficit_slope", fmt(study.deficit_slope));
            md.add("result.deficit_decreasing", study.deficit_decreasing ? "true" : "false");
            md.add("result.phase_error_decreasing", study.phase_error_decreasing ? "true" : "false");
            std::string csv = md.csv_header() +
                              "L,line_length,duration,theta_measured,theta_analytic,phase_error,overlap,deficit,"
                              "interaction_probability,leakage\n";
            for (const auto& r : study.rows)
                csv += std::to_string(r.L) + "," + std::to_string(r.line_length) + "," + fmt(r.duration) + "," +
                       fmt(r.theta_measured) + "," + fmt(r.theta_analytic) + "," + fmt(r.phase_error) + "," +
                       fmt(r.overlap) + "," + fmt(r.deficit) + "," + fmt(r.interaction_probability) + "," +
                       fmt(r.leakage) + "\n";
            em.emit(csv);
            return 0;
        }

        if (sg->parsed()) {
            echo_options(sg, md);
            const auto sw = build_momentum_switch(load_graph_arg(graph_id, md));
            GateGConfig cfg;
            cfg.model = mo.params();
            cfg.L = g_L;
            cfg.shape = packet_shape_from_string(shape);
            cfg.tol = tol;
            cfg.min_routed = min_routed;
            const auto e = simulate_gate_G(sw, cfg, swap_momenta);
            md.add("result.routed_probability", fmt(e.routed_probability));
            md.add("result.routed", e.routed ? "true" : "false");
            md.add("result.exit_spread_sites", fmt(e.exit_spread_sites));
            md.add("result.boundary_probability", fmt(e.leakage));
            md.add("result.max_offdiagonal", fmt(e.max_offdiagonal));
            md.add("result.diagnostic", e.diagnostic);
            static const char* names[] = {"tplus", "t0", "singlet", "tminus"};
            std::string csv = md.csv_header() + "channel,estimate_re,estimate_im,estimate_arg,expected_arg,column_norm\n";
            for (std::size_t c = 0; c < 4; ++c)
                csv += std::string(names[c]) + "," + fmt(e.estimate.diag[c].real()) + "," + fmt(e.estimate.diag[c].imag()) +
                       "," + fmt(std::arg(e.estimate.diag[c])) + "," + fmt(std::arg(e.expected.diag[c])) + "," +
                       fmt(e.column_norm[c]) + "\n";
            em.emit(csv);
            if (!e.routed) {
                err << e.diagnostic << "\n";
                return 3;
            }
            if (!e.diagnostic.empty()) err << "warning: " << e.diagnostic << "\n";
            return 0;
        }

        auto theta_value = [&]() {
            if (theta) return *theta;
            const auto p = mo.params();
            if (p.model == Model::XXZ) throw ConfigError("XXZ gates are not SU(2) symmetric; pass --theta");
            return gate_g(p.model, ko.kin(), p.coupling()).singlet_phase();
        };

        if (sy->parsed()) {
            echo_options(sy, md);
            Orientation o;
            if (orientation == "heisenberg")
                o = Orientation::Heisenberg;
            else if (orientation == "direct")
                o = Orientation::Direct;
            else
                throw ConfigError("--orientation must be heisenberg or direct");
            const double th = theta_value();
            const auto plan = plan_power(th, gamma_t, epsilon, o, budget);
            const auto rep = suitability(th, epsilon);
            json j;
            j["metadata"] = md.as_json();
            j["theta"] = th;
            j["k"] = plan.k;
            j["achieved_error"] = plan.achieved_error;
            j["convergents_used"] = plan.convergents_used;
            j["target_phase"] = plan.target_phase;
            j["guided_bound"] = plan.guided_bound;
            j["within_guided_bound"] = plan.within_guided_bound;
            j["suitability"] = {{"convergents_requested", rep.convergents_requested},
                                {"convergents_computed", rep.convergents_computed},
                                {"suitable", rep.suitable},
                                {"best_q", rep.best_q},
                                {"resolution", rep.resolution},
                                {"max_growth_ratio", rep.max_growth_ratio},
                                {"gap_after", rep.gap_after},
                                {"denominators", rep.denominators}};
            em.emit(json_text(j));
            return 0;
        }

        if (cs->parsed()) {
            echo_options(cs, md);
            md.add_input("schedule", schedule_path);
            const auto sched = load_schedule_file(schedule_path);
            json j;
            j["metadata"] = md.as_json();
            j["target"] = sched.target;
            j["steps"] = sched.steps.size();
            const auto exact = logical_unitary(sched);
            const bool has_target = !sched.target.empty();
            const auto target = has_target ? named_logical_gate(sched.target, sched.n_logical) : SpinOperator();
            j["exact"] = {{"leakage", exact.leakage},
                          {"max_element_error", has_target ? json(element_error(exact.block, target)) : json(nullptr)}};
            if (cnot_eps) {
                const double th = theta_value();
                const auto src = [&] {
                    auto s = GateSource::collisions(PhaseGate::singlet(2.0 * th), *cnot_eps);
                    s.budget = budget;
                    return s;
                }();
                const auto steps = resolve_schedule(sched, src);
                const auto lu = logical_unitary(sched, src);
                j["theta"] = th;
                j["epsilon"] = *cnot_eps;
                j["leakage"] = lu.leakage;
                j["max_element_error"] = has_target ? json(element_error(lu.block, target)) : json(nullptr);
                j["per_step_k"] = json::array();
                j["per_step_phase_error"] = json::array();
                for (const auto& s : steps) {
                    j["per_step_k"].push_back(s.k);
                    j["per_step_phase_error"].push_back(s.phase_error);
                }
            } else {
                j["leakage"] = exact.leakage;
                j["max_element_error"] = j["exact"]["max_element_error"];
                j["per_step_k"] = json::array();
            }
            em.emit(json_text(j));
            return 0;
        }

        if (me->parsed()) {
            echo_options(me, md);
            const auto state = encode_bits(static_cast<std::size_t>(bit), 1);
            const auto m = measure_third_spin(state, shots, seed);
            // Reading "down" as 1: |1_L> is misread with probability 1 - P(down).
            const double p_err = bit == 1 ? 1.0 - m.p_down : m.p_down;
            json j;
            j["metadata"] = md.as_json();
            j["p_down"] = m.p_down;
            j["shots"] = m.shots;
            j["downs"] = m.downs;
            j["frequency"] = m.frequency;
            j["sigma"] = m.sigma;
            j["single_shot_error"] = p_err;
            j["majority_vote"] = json::array();
            for (std::size_t R = 1; R <= max_reps; R += 2)
                j["majority_vote"].push_back(
                    {{"repetitions", R}, {"error", majority_vote_error(p_err, R)}, {"binomial_tail", binomial_tail_error(p_err, R)}});
            em.emit(json_text(j));
            return 0;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace scatterlab::cli
