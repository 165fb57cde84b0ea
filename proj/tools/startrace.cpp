#include "startrace/acceptance.hpp"
#include "startrace/disk.hpp"
#include "startrace/fedosov.hpp"
#include "startrace/formal_geom.hpp"
#include "startrace/graph.hpp"
#include "startrace/index_classes.hpp"
#include "startrace/manifest.hpp"
#include "startrace/series_io.hpp"
#include "startrace/trace.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace startrace;

namespace {

enum Exit { kPass = 0, kValidation = 1, kComputation = 2, kAcceptance = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string manifest;
    std::string out;
    std::string format;
    int order = -1;
    std::uint64_t samples = 0;
    std::uint64_t seed = 1;
};

std::string command_echo;

json gaussian_json(const GaussianRational& z) { return {{"re", to_string(z.re)}, {"im", to_string(z.im)}}; }
json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json series_out(const GradedSeries& s) {
    json j = series_to_json(s);
    j["text"] = format_series(s);
    return j;
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw UsageError("cannot write " + c.out);
    f << text;
}

std::string format_or(const Common& c, const std::string& fallback, std::initializer_list<const char*> allowed) {
    std::string f = c.format.empty() ? fallback : c.format;
    for (const char* a : allowed)
        if (f == a) return f;
    throw UsageError("format " + f + " is not available for this command");
}

json report(const std::string& cmd, json calibration, json seeds, json outputs, json residuals) {
    json r;
    r["command"] = command_echo;
    r["subcommand"] = cmd;
    r["calibration"] = std::move(calibration);
    r["seeds"] = std::move(seeds);
    r["outputs"] = std::move(outputs);
    r["residuals"] = std::move(residuals);
    return r;
}

void emit_json(const Common& c, const json& j) { emit(c, j.dump(2) + "\n"); }

Manifest need_manifest(const Common& c) {
    if (c.manifest.empty()) throw UsageError("--manifest is required for this command");
    return load_manifest(c.manifest);
}

json calibration_of(const Manifest& m) {
    if (!m.symplectic) return nullptr;
    auto conn = m.connection ? ConnectionData::from_generator(*m.symplectic, *m.connection)
                             : ConnectionData::flat(m.dim);
    return {{"c", gaussian_json(calibrate_prefactor(*m.symplectic, conn).c)}};
}

// a manifest test function by name, or a polynomial in x
TestFunction function_arg(const Manifest& m, const std::string& text, const std::string& flag) {
    if (text.empty()) throw UsageError(flag + " is required");
    auto it = m.test_functions.find(text);
    if (it != m.test_functions.end()) return it->second;
    return test_function_from_json(json(text), m.dim, flag);
}

int y_window(const Manifest& m, int fallback) {
    return m.truncation.y_max < kUnbounded ? m.truncation.y_max : fallback;
}

bool needs_fedosov(const Manifest& m) {
    if (m.connection || !m.omega_corrections.is_zero()) return true;
    return m.exp_jet.order() >= 2;
}

int run_star(const Common& c, const std::string& f_text, const std::string& g_text, std::string mode) {
    format_or(c, "json", {"json"});
    Manifest m = need_manifest(c);
    const auto& s = m.require_symplectic();
    const int H = c.order < 0 ? 2 : c.order;
    auto f = function_arg(m, f_text, "--f").poly, g = function_arg(m, g_text, "--g").poly;
    if (mode == "auto") mode = needs_fedosov(m) ? "fedosov" : "moyal";
    GradedSeries prod;
    json residuals = json::object();
    if (mode == "moyal") {
        Truncation t;
        t.hbar_max = H;
        prod = y_to_x(moyal(x_to_y(f), x_to_y(g), s, t));
    } else if (mode == "fedosov") {
        auto sol = solve_gamma(m.fedosov_problem(y_window(m, 6), H));
        prod = star_global(f, g, sol, m.exp_jet);
        residuals["fedosov_residual_terms"] = residual_check(sol).size();
    } else {
        throw UsageError("--mode must be auto, moyal or fedosov");
    }
    emit_json(c, report("star", calibration_of(m), json::object(), {{"mode", mode}, {"hbar_max", H}, {"product", series_out(prod)}},
                        residuals));
    return kPass;
}

int run_fedosov(const Common& c) {
    format_or(c, "json", {"json"});
    Manifest m = need_manifest(c);
    const int H = c.order < 0 ? 2 : c.order;
    auto sol = solve_gamma(m.fedosov_problem(y_window(m, 4), H));
    auto res = residual_check(sol);
    json out{{"hbar_max", H},
             {"y_max", sol.problem.truncation.y_max},
             {"fedosov_cap", sol.fedosov_cap},
             {"iterations", sol.iterations},
             {"F", series_out(sol.F)},
             {"r", series_out(sol.r)},
             {"gamma", series_out(sol.gamma)}};
    json residuals{{"residual_terms", res.size()}, {"zero", res.is_zero()}};
    emit_json(c, report("fedosov", {{"c", gaussian_json(sol.c)}}, json::object(), out, residuals));
    return res.is_zero() ? kPass : kComputation;
}

int run_rflow(const Common& c, const std::string& f_text, bool lift) {
    format_or(c, "json", {"json"});
    Manifest m = need_manifest(c);
    const int order = c.order < 0 ? 4 : c.order;
    Truncation t;
    t.y_max = order + 1;
    auto R = build_R(m.exp_jet, t);
    json comps = json::array();
    for (int j = 0; j < R.dim; ++j) comps.push_back(series_out(R.form(j)));
    auto mc = mc_residual(R);
    bool flat = true;
    for (const auto& s : mc) flat = flat && s.is_zero();
    json residuals{{"mc_residual_zero", flat}};
    if (!f_text.empty()) {
        auto f = function_arg(m, f_text, "--f").poly;
        Truncation tf;
        tf.y_max = order + 2;
        auto sigma = pullback_Tphi(f, m.exp_jet, tf);
        auto Rf = build_R(m.exp_jet, tf);
        residuals["pullback_D_closed"] = grothendieck_apply(sigma, Rf).is_zero();
    }
    if (lift) {
        auto cl = cotangent_lift(m.exp_jet, t);
        std::vector<int> pbar;
        for (int k = 0; k < cl.n; ++k) pbar.push_back(cl.n + k);
        residuals["cotangent_pbar_degree"] = fiber_degree(cl.R, pbar);
        residuals["cotangent_mc_residual_zero"] = [&] {
            for (const auto& s : mc_residual(cl.R))
                if (!s.is_zero()) return false;
            return true;
        }();
    }
    emit_json(c, report("rflow", nullptr, json::object(), {{"jet_order", order}, {"R", comps}}, residuals));
    return flat ? kPass : kComputation;
}

std::vector<int> int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoi(item));
    return out;
}

// wheel:j, phi:s, or k=2,2;m=1;w=0;edges=0>1,0>2,...
WeightProblem graph_spec(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
        const std::string kind = spec.substr(0, colon);
        const int n = std::stoi(spec.substr(colon + 1));
        if (kind == "wheel") return wheel_problem(n);
        if (kind == "phi") return phi_power_problem(n);
        throw UsageError("unknown graph family " + kind);
    }
    WeightProblem p;
    std::stringstream ss(spec);
    std::string field;
    while (std::getline(ss, field, ';')) {
        auto eq = field.find('=');
        if (eq == std::string::npos) throw UsageError("graph field without '=': " + field);
        const std::string key = field.substr(0, eq), val = field.substr(eq + 1);
        if (key == "k") p.graph.k = int_list(val);
        else if (key == "m") p.graph.m = std::stoi(val);
        else if (key == "w") p.graph.w = std::stoi(val);
        else if (key == "phi") p.phi_power = int_list(val);
        else if (key == "edges") {
            std::stringstream es(val);
            std::string e;
            while (std::getline(es, e, ',')) {
                auto gt = e.find('>');
                if (gt == std::string::npos) throw UsageError("edge must be src>tgt: " + e);
                p.graph.edges.push_back({std::stoi(e.substr(0, gt)), std::stoi(e.substr(gt + 1))});
            }
        } else {
            throw UsageError("unknown graph field " + key);
        }
    }
    p.graph.validate();
    return p;
}

json graph_json(const AdmissibleGraph& g) {
    json edges = json::array();
    for (const auto& e : g.edges) edges.push_back({e.src, e.tgt});
    return {{"canonical", canonical_form(g).hex()}, {"k", g.k}, {"m", g.m}, {"w", g.w}, {"edges", edges}};
}

int run_graphs(const Common& c, const std::string& k_text, int m, int whites, const std::string& spec) {
    const std::string fmt = format_or(c, "json", {"json", "dot"});
    std::vector<AdmissibleGraph> graphs;
    if (!spec.empty()) graphs.push_back(graph_spec(spec).graph);
    else graphs = enumerate(int_list(k_text), m, whites);
    if (fmt == "dot") {
        std::string text;
        for (const auto& g : graphs) text += to_dot(g);
        emit(c, text);
        return kPass;
    }
    json list = json::array();
    for (const auto& g : graphs) list.push_back(graph_json(g));
    emit_json(c, report("graphs", nullptr, json::object(), {{"count", graphs.size()}, {"graphs", list}}, json::object()));
    return kPass;
}

int run_weights(const Common& c, const std::string& spec, bool closed) {
    const std::string fmt = format_or(c, "csv", {"csv", "json"});
    if (spec.empty()) throw UsageError("--graph is required");
    if (closed) {
        if (spec.rfind("wheel:", 0) != 0) throw UsageError("--closed is available for wheel graphs only");
        const int j = std::stoi(spec.substr(6));
        const Rational w = wheel_weight_closed(j);
        if (fmt == "csv") {
            emit(c, "graph,closed_weight\n" + spec + "," + to_string(w) + "\n");
        } else {
            emit_json(c, report("weights", nullptr, json::object(), {{"graph", spec}, {"closed_weight", to_string(w)}},
                                json::object()));
        }
        return kPass;
    }
    WeightProblem p = graph_spec(spec);
    const std::uint64_t samples = c.samples ? c.samples : 200000;
    McEstimate est = mc_weight(p, samples, c.seed, 0);
    if (fmt == "csv") {
        std::ostringstream o;
        o.precision(17);
        o << "u_power,value_re,value_im,stderr,samples,seed\n";
        for (std::size_t i = 0; i < est.value.size(); ++i)
            o << est.u_min + static_cast<int>(i) << ',' << est.value[i].real() << ',' << est.value[i].imag() << ','
              << est.stderr_[i] << ',' << est.samples << ',' << est.seed << '\n';
        emit(c, o.str());
        return kPass;
    }
    json rows = json::array();
    for (std::size_t i = 0; i < est.value.size(); ++i)
        rows.push_back({{"u_power", est.u_min + static_cast<int>(i)},
                        {"value", complex_json(est.value[i])},
                        {"stderr", est.stderr_[i]}});
    emit_json(c, report("weights", nullptr, {{"seed", c.seed}},
                        {{"graph", spec}, {"samples", est.samples}, {"exact", est.exact}, {"note", est.note}, {"rows", rows}},
                        json::object()));
    return kPass;
}

int run_trace(const Common& c, const std::string& f_text, const std::string& g_text, int points) {
    format_or(c, "json", {"json"});
    Manifest m = need_manifest(c);
    const auto& p = m.require_poisson();
    TraceOptions opt;
    opt.order = c.order < 0 ? 0 : c.order;
    opt.quadrature_points = points;
    opt.samples = c.samples ? c.samples : opt.samples;
    opt.seed = c.seed;
    auto f = function_arg(m, f_text, "--f").gaussian();
    auto res = trace_assemble(p, f, opt);
    json coeffs = json::array();
    for (const auto& [k, v] : res.hbar)
        coeffs.push_back({{"hbar", k}, {"value", complex_json(v.value)}, {"stderr", v.stderr_}, {"exact", v.exact}});
    json residuals = json::object();
    if (!g_text.empty()) {
        auto g = function_arg(m, g_text, "--g").gaussian();
        residuals["commutator_hbar1"] = trace_commutator_check(p, f, g, std::min(opt.order, 1), points);
    }
    emit_json(c, report("trace", calibration_of(m), {{"seed", c.seed}},
                        {{"order", opt.order}, {"graphs", res.contributions.size()}, {"coefficients", coeffs}}, residuals));
    return kPass;
}

ChainElement chain_arg(const std::string& text, int dim) {
    std::vector<GradedSeries> slots;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, '|')) slots.push_back(parse_series(item, dim));
    if (slots.empty()) throw UsageError("--chain needs at least one slot");
    return ChainElement::word(slots);
}

int run_index(const Common& c, bool nt, bool tt, const std::string& chain, const std::string& area_text, int max_degree) {
    format_or(c, "json", {"json"});
    if (nt && tt) throw UsageError("choose one of --nest-tsygan and --tamarkin-tsygan");
    Manifest m = need_manifest(c);
    CurvatureMatrix R = m.curvature ? *m.curvature : CurvatureMatrix::zero(m.dim, 1);
    const int deg = max_degree < 0 ? m.dim : max_degree;
    const GaussianRational area(parse_rational(area_text));
    auto A = a_hat_u(R, deg);
    json out{{"rank", R.rank}, {"a_hat_u", series_out(A)}};
    if (nt) {
        if (m.dim % 2) throw UsageError("Nest-Tsygan needs an even dimension");
        auto tr = nest_tsygan_eval(A, m.omega_hbar(), m.dim / 2, constant_pairing(area));
        out["nest_tsygan"] = series_out(tr);
    } else if (tt) {
        auto I = tamarkin_tsygan_eval(chain_arg(chain, m.dim), m.require_poisson(), A, constant_pairing(area));
        out["tamarkin_tsygan"] = series_out(I);
    } else {
        // degree-2k parts are stored without the factor (2 pi i)^{-k}
        out["chern_character"] = series_out(chern_character(R));
        out["todd"] = series_out(todd(R));
    }
    emit_json(c, report("index", calibration_of(m), json::object(), out, json::object()));
    return kPass;
}

int run_verify(const Common& c, const std::string& only) {
    format_or(c, "json", {"json"});
    std::optional<Manifest> m;
    if (!c.manifest.empty()) m = load_manifest(c.manifest);
    AcceptanceOptions opt;
    opt.seed = c.seed;
    opt.manifest = m ? &*m : nullptr;
    std::vector<CriterionResult> results;
    if (only.empty()) {
        results = run_acceptance(opt, true);
    } else {
        for (int id : int_list(only)) {
            if (id < 1 || id > kCriterionCount) throw UsageError("no criterion " + std::to_string(id));
            results.push_back(run_criterion(id, opt));
            if (!results.back().pass) break;
        }
    }
    json list = json::array();
    json failed = nullptr;
    for (const auto& r : results) {
        list.push_back(criterion_to_json(r));
        if (!r.pass) failed = r.id;
    }
    emit_json(c, report("verify", m ? calibration_of(*m) : json(nullptr), {{"seed", c.seed}}, {{"criteria", list}},
                        {{"all_pass", failed.is_null()}, {"failed_criterion", failed}}));
    if (!failed.is_null()) {
        const auto& r = results.back();
        std::cerr << "acceptance criterion " << r.id << " (" << r.name << ") failed: " << r.detail << "\n";
        return kAcceptance;
    }
    return kPass;
}

void add_common(CLI::App* sub, Common& c, bool manifest = true) {
    if (manifest) sub->add_option("--manifest", c.manifest, "geometry manifest (JSON)");
    sub->add_option("--order", c.order, "truncation order of the computation");
    sub->add_option("--samples", c.samples, "Monte Carlo samples");
    sub->add_option("--seed", c.seed, "global seed");
    sub->add_option("--out", c.out, "write the artifact to this file");
    sub->add_option("--format", c.format, "json, csv or dot")->check(CLI::IsMember({"json", "csv", "dot"}));
}

}  // namespace

int main(int argc, char** argv) {
    command_echo = "startrace";
    for (int i = 1; i < argc; ++i) command_echo += std::string(" ") + argv[i];

    CLI::App app{"startrace: deformation quantization workbench"};
    app.require_subcommand(1);
    Common c;
    std::string f_text, g_text, mode = "auto", k_text, spec, chain = "1", area = "1", only;
    int m_boundary = 1, whites = 0, points = 64, max_degree = -1;
    bool closed = false, lift = false, nt = false, tt = false;

    auto* star = app.add_subcommand("star", "product of two functions (Moyal or Fedosov global)");
    add_common(star, c);
    star->add_option("--f", f_text, "test function name or polynomial")->required();
    star->add_option("--g", g_text, "test function name or polynomial")->required();
    star->add_option("--mode", mode, "auto, moyal or fedosov");

    auto* fed = app.add_subcommand("fedosov", "solve for the Fedosov connection and check the residual");
    add_common(fed, c);

    auto* rflow = app.add_subcommand("rflow", "Grothendieck connection of the manifest jet");
    add_common(rflow, c);
    rflow->add_option("--f", f_text, "check D-flatness of this function's Taylor pullback");
    rflow->add_flag("--cotangent", lift, "scan the cotangent lift of the jet");

    auto* graphs = app.add_subcommand("graphs", "enumerate admissible graphs");
    add_common(graphs, c, false);
    graphs->add_option("--k", k_text, "comma-separated bulk out-degrees");
    graphs->add_option("--m", m_boundary, "boundary vertices");
    graphs->add_option("--whites", whites, "maximal number of white vertices");
    graphs->add_option("--graph", spec, "a single graph: wheel:j, phi:s or k=..;m=..;edges=a>b,..");

    auto* weights = app.add_subcommand("weights", "graph weights on the disk");
    add_common(weights, c, false);
    weights->add_option("--graph", spec, "wheel:j, phi:s or k=..;m=..;w=..;phi=..;edges=a>b,..")->required();
    weights->add_flag("--closed", closed, "closed-form wheel weight");

    auto* trace = app.add_subcommand("trace", "graph expansion of the trace");
    add_common(trace, c);
    trace->add_option("--f", f_text, "test function name or polynomial")->required();
    trace->add_option("--g", g_text, "second function for the commutator check");
    trace->add_option("--points", points, "Gauss-Hermite points per axis");

    auto* index = app.add_subcommand("index", "characteristic classes and index formulas");
    add_common(index, c);
    index->add_flag("--nest-tsygan", nt, "evaluate the Nest-Tsygan formula");
    index->add_flag("--tamarkin-tsygan", tt, "evaluate the Tamarkin-Tsygan formula");
    index->add_option("--chain", chain, "chain a0|a1|... for the Tamarkin-Tsygan formula");
    index->add_option("--area", area, "integral of dx^1...dx^d over the base");
    index->add_option("--max-degree", max_degree, "form-degree cap for the A-hat series");

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    add_common(verify, c);
    verify->add_option("--criteria", only, "comma-separated subset of criterion ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kPass : kValidation;
    }

    try {
        if (*star) return run_star(c, f_text, g_text, mode);
        if (*fed) return run_fedosov(c);
        if (*rflow) return run_rflow(c, f_text, lift);
        if (*graphs) return run_graphs(c, k_text, m_boundary, whites, spec);
        if (*weights) return run_weights(c, spec, closed);
        if (*trace) return run_trace(c, f_text, g_text, points);
        if (*index) return run_index(c, nt, tt, chain, area, max_degree);
        if (*verify) return run_verify(c, only);
    } catch (const ManifestError& e) {
        std::cerr << "{\"error\": \"manifest\", \"field\": " << json(e.field).dump() << ", \"message\": " << json(e.what()).dump()
                  << "}\n";
        return kValidation;
    } catch (const UsageError& e) {
        std::cerr << "{\"error\": \"usage\", \"message\": " << json(e.what()).dump() << "}\n";
        return kValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "{\"error\": \"invalid input\", \"message\": " << json(e.what()).dump() << "}\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\": \"computation\", \"message\": " << json(e.what()).dump() << "}\n";
        return kComputation;
    }
    return kValidation;
}
