#include "startrace/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace startrace {

namespace {

const std::set<std::string> kFields{"dim",    "omega",    "connection_generator", "exp_jet",   "poisson", "volume",
                                    "omega_hbar", "truncation", "test_functions", "curvature", "name"};

template <class F>
auto guarded(const std::string& field, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ManifestError&) {
        throw;
    } catch (const std::exception& e) {
        throw ManifestError(field, e.what());
    }
}

GradedSeries series_field(const json& j, int dim, const std::string& field) {
    if (j.is_string()) return parse_series(j.get<std::string>(), dim);
    if (j.is_number_integer()) return GradedSeries::constant(dim, Rational(j.get<long>()));
    if (j.is_object()) return series_from_json(j);
    throw ManifestError(field, "expected a polynomial string");
}

void check_x_only(const GradedSeries& s, const std::string& field) {
    for (const auto& [m, c] : s.terms())
        if (m.ydeg() || m.dx || m.hbar || m.u) throw ManifestError(field, "must be a function of x only");
}

std::vector<int> indices_field(const json& j, int dim, std::size_t len, const std::string& field) {
    if (!j.is_array()) throw ManifestError(field, "indices must be an array");
    std::vector<int> out;
    for (const auto& v : j) {
        int i = v.get<int>();
        if (i < 1 || i > dim) throw ManifestError(field, "index out of range (indices are 1-based)");
        out.push_back(i - 1);
    }
    if (len && out.size() != len) throw ManifestError(field, "expected " + std::to_string(len) + " indices");
    return out;
}

}  // namespace

GaussianPoly TestFunction::gaussian() const { return GaussianPoly(poly, GaussianExponent::centered(width, center)); }

TestFunction test_function_from_json(const json& j, int dim, const std::string& field) {
    return guarded(field, [&] {
        TestFunction t;
        t.center.assign(dim, Rational(0));
        if (j.is_string()) {
            t.poly = parse_series(j.get<std::string>(), dim);
        } else if (j.is_object()) {
            t.poly = series_field(j.at("poly"), dim, field + ".poly");
            if (j.contains("width")) t.width = rational_from_json(j.at("width"));
            if (j.contains("center")) {
                const auto& c = j.at("center");
                if (!c.is_array() || static_cast<int>(c.size()) != dim)
                    throw ManifestError(field + ".center", "needs one rational per coordinate");
                for (int i = 0; i < dim; ++i) t.center[i] = rational_from_json(c[i]);
            }
        } else {
            throw ManifestError(field, "expected a polynomial string or an object");
        }
        check_x_only(t.poly, field);
        if (sgn(t.width) <= 0) throw ManifestError(field + ".width", "must be positive");
        return t;
    });
}

GradedSeries Manifest::omega_hbar() const {
    const auto& s = require_symplectic();
    GradedSeries w = -s.form();
    w += omega_corrections;
    return w;
}

const SymplecticData& Manifest::require_symplectic() const {
    if (!symplectic) throw ManifestError("omega", "required by this computation");
    return *symplectic;
}

const PoissonData& Manifest::require_poisson() const {
    if (!poisson) throw ManifestError("poisson", "required by this computation");
    return *poisson;
}

FedosovProblem Manifest::fedosov_problem(int y_max, int hbar_max) const {
    FedosovProblem p = FedosovProblem::flat(require_symplectic(), y_max, hbar_max);
    if (connection) p.c = ConnectionData::from_generator(*symplectic, *connection);
    p.omega_hbar = omega_hbar();
    return p;
}

Manifest manifest_from_json(const json& j) {
    if (!j.is_object()) throw ManifestError("manifest", "top level must be an object");
    for (const auto& [k, v] : j.items())
        if (!kFields.count(k)) throw ManifestError(k, "unknown field");
    Manifest m;
    if (!j.contains("dim")) throw ManifestError("dim", "missing");
    m.dim = guarded("dim", [&] { return j.at("dim").get<int>(); });
    if (m.dim < 1 || m.dim > kMaxDim) throw ManifestError("dim", "must be between 1 and 8");
    const int d = m.dim;

    if (j.contains("truncation")) m.truncation = guarded("truncation", [&] { return truncation_from_json(j.at("truncation")); });

    if (j.contains("omega")) {
        m.symplectic = guarded("omega", [&] {
            const auto& rows = j.at("omega");
            if (!rows.is_array() || static_cast<int>(rows.size()) != d) throw ManifestError("omega", "needs dim rows");
            RationalMatrix w(d, std::vector<Rational>(d));
            for (int a = 0; a < d; ++a) {
                if (!rows[a].is_array() || static_cast<int>(rows[a].size()) != d)
                    throw ManifestError("omega", "needs dim columns");
                for (int b = 0; b < d; ++b) {
                    GradedSeries e = series_field(rows[a][b], d, "omega");
                    for (const auto& [mono, c] : e.terms())
                        if (mono != Monomial{} || !c.is_real())
                            throw ManifestError("omega", "only constant real symplectic forms are supported");
                    w[a][b] = e.coefficient(Monomial{}).re;
                }
            }
            return SymplecticData::from_matrix(w);
        });
    }

    if (j.contains("connection_generator")) {
        if (!m.symplectic) throw ManifestError("connection_generator", "needs omega");
        m.connection = guarded("connection_generator", [&] {
            SymmetricGenerator S;
            for (const auto& e : j.at("connection_generator")) {
                auto idx = indices_field(e.at("indices"), d, 3, "connection_generator");
                std::sort(idx.begin(), idx.end());
                GradedSeries c = series_field(e.at("coeff"), d, "connection_generator");
                check_x_only(c, "connection_generator");
                std::array<int, 3> key{idx[0], idx[1], idx[2]};
                auto it = S.find(key);
                if (it == S.end()) S.emplace(key, c);
                else it->second += c;
            }
            ConnectionData::from_generator(*m.symplectic, S);
            return S;
        });
    }

    m.exp_jet = ExpJet::identity(d);
    if (j.contains("exp_jet")) {
        guarded("exp_jet", [&] {
            for (const auto& [order, list] : j.at("exp_jet").items()) {
                const std::size_t k = std::stoul(order);
                if (k < 2) throw ManifestError("exp_jet", "orders start at 2");
                for (const auto& e : list) {
                    int comp = e.at("component").get<int>();
                    if (comp < 1 || comp > d) throw ManifestError("exp_jet", "component out of range");
                    auto idx = indices_field(e.at("indices"), d, k, "exp_jet");
                    GradedSeries c = series_field(e.at("coeff"), d, "exp_jet");
                    check_x_only(c, "exp_jet");
                    m.exp_jet.set(comp - 1, idx, c);
                }
            }
            return 0;
        });
    }

    m.volume = GradedSeries::constant(d, 1);
    if (j.contains("volume")) {
        m.volume = series_field(j.at("volume"), d, "volume");
        check_x_only(m.volume, "volume");
        if (!sgn(m.volume.coefficient(Monomial{}).re) || !m.volume.coefficient(Monomial{}).is_real())
            throw ManifestError("volume", "must be a positive density at the origin");
    }

    if (j.contains("poisson")) {
        m.poisson = guarded("poisson", [&] {
            PoissonData p;
            p.dim = d;
            p.pi = MultiVector(d);
            const auto& pj = j.at("poisson");
            for (const auto& e : pj.at("pi")) {
                auto idx = indices_field(e.at("indices"), d, 2, "poisson.pi");
                GradedSeries c = series_field(e.at("coeff"), d, "poisson.pi");
                check_x_only(c, "poisson.pi");
                const int sgn_ = sort_sign(idx);
                if (sgn_ == 0) throw ManifestError("poisson.pi", "repeated index");
                std::sort(idx.begin(), idx.end());
                p.pi.add(index_mask(idx), c * GaussianRational(sgn_));
            }
            p.h = pj.contains("h") ? series_field(pj.at("h"), d, "poisson.h") : GradedSeries(d);
            p.volume = m.volume;
            p.validate();
            return p;
        });
    } else if (m.symplectic) {
        // the Poisson structure of omega
        PoissonData p = PoissonData::constant(d, m.symplectic->omega_inv);
        p.volume = m.volume;
        m.poisson = guarded("poisson", [&] {
            p.validate();
            return p;
        });
    }

    m.omega_corrections = GradedSeries(d);
    if (j.contains("omega_hbar")) {
        if (!m.symplectic) throw ManifestError("omega_hbar", "needs omega");
        guarded("omega_hbar", [&] {
            for (const auto& [order, form] : j.at("omega_hbar").items()) {
                const int k = std::stoi(order);
                if (k < 1) throw ManifestError("omega_hbar", "corrections start at hbar^1");
                m.omega_corrections += series_field(form, d, "omega_hbar").shift_hbar(k);
            }
            return 0;
        });
    }
    if (m.symplectic) {
        guarded("omega_hbar", [&] {
            m.fedosov_problem(2, 1).validate();
            return 0;
        });
    }

    if (j.contains("test_functions"))
        for (const auto& [name, spec] : j.at("test_functions").items())
            m.test_functions.emplace(name, test_function_from_json(spec, d, "test_functions." + name));

    if (j.contains("curvature")) {
        m.curvature = guarded("curvature", [&] {
            const auto& cj = j.at("curvature");
            const auto& rows = cj.at("entries");
            const int r = static_cast<int>(rows.size());
            auto c = CurvatureMatrix::zero(d, r);
            for (int a = 0; a < r; ++a) {
                if (static_cast<int>(rows[a].size()) != r) throw ManifestError("curvature", "matrix is not square");
                for (int b = 0; b < r; ++b) c.at(a, b) = series_field(rows[a][b], d, "curvature");
            }
            c.validate();
            return c;
        });
    }
    return m;
}

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("manifest", "cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ManifestError("manifest", e.what());
    }
    return manifest_from_json(j);
}

}  // namespace startrace
