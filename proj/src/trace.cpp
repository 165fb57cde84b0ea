#include "startrace/trace.hpp"

#include <cmath>
#include <stdexcept>

namespace startrace {

namespace {

GradedSeries diff_all(GradedSeries f, const std::vector<int>& idx) {
    for (int l : idx) {
        if (f.is_zero()) break;
        f = diff_x(f, l);
    }
    return f;
}

void check_flat_R(const RForm& R, int dim) {
    if (R.dim != dim) throw std::invalid_argument("trace: R has the wrong dimension");
    for (int j = 0; j < dim; ++j)
        for (int l = 0; l < dim; ++l)
            for (const auto& [m, c] : R.comp[j][l].terms())
                if (m.xdeg() || m.ydeg() || !(j == l && c == GaussianRational(-1)))
                    throw std::domain_error("trace: only the flat Grothendieck field R = -dx is supported");
}

struct OrderedIndex {
    int a, b;
    GradedSeries coeff;
};

}  // namespace

GaussianPoly trace_graph_value(const AdmissibleGraph& g, int n_pi, const PoissonData& p, const GaussianPoly& f) {
    const int n = g.n(), d = p.dim;
    std::vector<OrderedIndex> pairs;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            if (a != b) {
                auto c = p.pi.component(std::vector<int>{a, b});
                if (!c.is_zero()) pairs.push_back({a, b, std::move(c)});
            }
    GaussianPoly out(d);
    if (n_pi > 0 && pairs.empty()) return out;
    std::vector<std::vector<Edge>> slots(n);
    for (int i = 0; i < n; ++i) slots[i] = g.slots(i);
    std::vector<std::size_t> pick(n_pi, 0);
    while (true) {
        std::vector<std::vector<int>> incoming(n + 1);
        for (int i = 0; i < n_pi; ++i) {
            const auto& pr = pairs[pick[i]];
            incoming[slots[i][0].tgt].push_back(pr.a);
            incoming[slots[i][1].tgt].push_back(pr.b);
        }
        GradedSeries coeff = GradedSeries::constant(d, 1);
        for (int v = 0; v < n && !coeff.is_zero(); ++v)
            coeff = multiply(coeff, diff_all(v < n_pi ? pairs[pick[v]].coeff : p.h, incoming[v]));
        if (!coeff.is_zero()) {
            GaussianPoly df = f.diff_all(incoming[n]);
            if (!df.is_zero()) out += df.times(coeff);
        }
        int q = n_pi - 1;
        while (q >= 0 && ++pick[q] == pairs.size()) pick[q--] = 0;
        if (q < 0) break;
    }
    return out;
}

TraceResult trace_assemble(const PoissonData& p, const GaussianPoly& f, const TraceOptions& opt) {
    if (opt.order < 0 || opt.order > 2) throw std::invalid_argument("trace: order must be 0, 1 or 2");
    p.validate();
    if (!f.is_zero() && f.dim() != p.dim) throw std::invalid_argument("trace: dimension mismatch");
    if (opt.R) check_flat_R(*opt.R, p.dim);

    TraceResult res;
    for (int k = 0; k <= opt.order; ++k) res.hbar[k] = TraceCoefficient{};
    if (f.is_zero()) return res;

    for (int n = 0; n <= opt.order; ++n)
        for (int n_pi = 0; n_pi <= n; ++n_pi) {
            const int n_h = n - n_pi;
            if (n_h > 0 && p.h.is_zero()) continue;
            if (n_pi > 0 && p.pi.is_zero()) continue;
            std::vector<int> k(n_pi, 2);
            k.resize(n, 0);
            for (const auto& g : enumerate(k, 1, 0)) {
                GaussianPoly v = trace_graph_value(g, n_pi, p, f);
                if (v.is_zero()) continue;
                TraceContribution c;
                c.graph = g;
                c.n_pi = n_pi;
                c.n_h = n_h;
                c.integral = v.times(p.volume).integrate(opt.quadrature_points);
                if (g.edges.empty()) {
                    // a product of int phi = 1 over the h vertices
                    c.weight = 1;
                } else {
                    WeightProblem w;
                    w.graph = g;
                    w.phi_power.assign(n, 0);
                    for (int i = n_pi; i < n; ++i) w.phi_power[i] = 1;
                    // the sum over slot orderings cancels 1/k!
                    w.symmetry_factor = false;
                    McEstimate est = mc_weight(w, opt.samples, opt.seed, opt.threads);
                    c.weight = est.at(0);
                    c.weight_stderr = est.stderr_at(0);
                    c.exact_weight = est.exact;
                }
                const double pref = 1.0 / Rational(factorial(n_pi) * factorial(n_h)).get_d();
                auto& coef = res.hbar[n_pi];
                coef.value += pref * c.weight * c.integral;
                double e = pref * c.weight_stderr * std::abs(c.integral);
                coef.stderr_ = std::sqrt(coef.stderr_ * coef.stderr_ + e * e);
                coef.exact = coef.exact && c.exact_weight;
                res.contributions.push_back(std::move(c));
            }
        }
    return res;
}

GaussianPoly commutator_first_order(const PoissonData& p, const GaussianPoly& f, const GaussianPoly& g) {
    GaussianPoly out(p.dim);
    if (f.is_zero() || g.is_zero()) return out;
    for (const auto& [mask, c] : p.pi.components()) {
        auto idx = mask_indices(mask);
        // pi^{ab} (d_a f d_b g - d_b f d_a g) for the stored a < b
        GaussianPoly t = f.diff(idx[0]) * g.diff(idx[1]) - f.diff(idx[1]) * g.diff(idx[0]);
        out += t.times(c);
    }
    return out * GaussianRational(Rational(0), Rational(-1));
}

double trace_commutator_check(const PoissonData& p, const GaussianPoly& f, const GaussianPoly& g, int order,
                              int quadrature_points) {
    if (order < 0 || order > 1) throw std::invalid_argument("trace commutator check: order must be 0 or 1");
    if (f == g) return 0.0;
    GaussianPoly c = commutator_first_order(p, f, g);
    if (c.is_zero()) return 0.0;
    TraceOptions opt;
    opt.order = order;
    opt.quadrature_points = quadrature_points;
    return std::abs(trace_assemble(p, c, opt).hbar.at(0).value);
}

}  // namespace startrace
