#include "startrace/disk.hpp"

#include "startrace/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace startrace {

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

struct Pieces {
    cd A, B, C, E;
};

Pieces pieces(DiskPoint z, DiskPoint w) {
    if (std::abs(z - w) < 1e-300) throw std::invalid_argument("propagator at coincident points");
    cd q = 1.0 - z * std::conj(w);
    return {1.0 / (z - w), std::conj(w) / q, z / q, 1.0 / (q * q)};
}

}  // namespace

PropagatorValue propagator_eval(DiskPoint z, DiskPoint w) {
    auto [A, B, C, E] = pieces(z, w);
    cd alpha = A - B;
    PropagatorValue p;
    p.c[0] = (alpha.imag() + z.imag()) / (2 * kPi);
    p.c[1] = (alpha.real() - z.real()) / (2 * kPi);
    p.c[2] = (-A.imag() - C.imag()) / (2 * kPi);
    p.c[3] = (-A.real() + C.real()) / (2 * kPi);
    return p;
}

PropagatorJet propagator_partials(DiskPoint z, DiskPoint w) {
    auto [A, B, C, E] = pieces(z, w);
    const cd I(0, 1);
    const std::array<cd, 4> dA{-A * A, -I * A * A, A * A, I * A * A};
    const std::array<cd, 4> dB{B * B, I * B * B, E, -I * E};
    const std::array<cd, 4> dC{E, I * E, C * C, -I * C * C};
    PropagatorJet d{};
    for (int a = 0; a < 4; ++a) {
        cd da = dA[a] - dB[a];
        d[a][0] = (da.imag() + (a == 1 ? 1.0 : 0.0)) / (2 * kPi);
        d[a][1] = (da.real() - (a == 0 ? 1.0 : 0.0)) / (2 * kPi);
        d[a][2] = (-dA[a].imag() - dC[a].imag()) / (2 * kPi);
        d[a][3] = (-dA[a].real() + dC[a].real()) / (2 * kPi);
    }
    return d;
}

double boundary_component(const PropagatorValue& p, DiskPoint w) { return -w.imag() * p.c[2] + w.real() * p.c[3]; }

PhiValue phi_eval(DiskPoint z) {
    if (std::norm(z) > 1 + 1e-12) throw std::invalid_argument("phi_eval outside the disk");
    return {1 / kPi, 1 - std::norm(z)};
}

std::map<int, Rational> phi_power_exact(int s) {
    if (s < 1) throw std::invalid_argument("phi power must be at least 1");
    // s u^{s-1} (1/pi) int (1-r^2)^{s-1} dA = u^{s-1}
    Rational radial = frac(1, s);  // 2 int_0^1 (1-r^2)^{s-1} r dr
    return {{s - 1, Rational(s) * radial}};
}

std::complex<double> McEstimate::at(int u_power) const {
    int i = u_power - u_min;
    return i >= 0 && i < static_cast<int>(value.size()) ? value[i] : cd{};
}

double McEstimate::stderr_at(int u_power) const {
    int i = u_power - u_min;
    return i >= 0 && i < static_cast<int>(stderr_.size()) ? stderr_[i] : 0.0;
}

int default_threads() {
    if (const char* env = std::getenv("STARTRACE_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
        throw std::invalid_argument("STARTRACE_THREADS must be a positive integer");
    }
    unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : static_cast<int>(std::min(h, 64u));
}

namespace {

constexpr std::uint64_t kBatch = 1 << 14;

struct Moments {
    std::uint64_t n = 0;
    std::vector<double> mean, m2;

    explicit Moments(std::size_t k = 0) : mean(k, 0.0), m2(k, 0.0) {}

    void push(const std::vector<double>& x) {
        ++n;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double d = x[i] - mean[i];
            mean[i] += d / static_cast<double>(n);
            m2[i] += d * (x[i] - mean[i]);
        }
    }

    void merge(const Moments& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            double d = o.mean[i] - mean[i];
            mean[i] += d * nb / nt;
            m2[i] += o.m2[i] + d * d * na * nb / nt;
        }
        n += o.n;
    }
};

// sample(rng, out) fills one integrand value per entry; batches are merged in index order
Moments run_batches(std::uint64_t samples, std::uint64_t seed, int threads, std::size_t entries,
                    const std::function<void(CounterRng&, std::vector<double>&)>& sample) {
    const std::uint64_t nb = (samples + kBatch - 1) / kBatch;
    std::vector<Moments> parts(nb, Moments(entries));
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        std::vector<double> x(entries);
        for (std::uint64_t b; (b = next++) < nb;) {
            CounterRng rng(seed, b);
            const std::uint64_t count = std::min(kBatch, samples - b * kBatch);
            Moments m(entries);
            for (std::uint64_t s = 0; s < count; ++s) {
                sample(rng, x);
                m.push(x);
            }
            parts[b] = std::move(m);
        }
    };
    if (threads <= 0) threads = default_threads();
    threads = static_cast<int>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(nb, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    Moments total(entries);
    for (const auto& p : parts) total.merge(p);
    return total;
}

McEstimate to_estimate(const Moments& m, double scale, int u_min, std::uint64_t seed) {
    McEstimate e;
    e.u_min = u_min;
    e.samples = m.n;
    e.seed = seed;
    for (std::size_t i = 0; i < m.mean.size(); ++i) {
        e.value.emplace_back(m.mean[i] * scale, 0.0);
        double var = m.n > 1 ? m.m2[i] / static_cast<double>(m.n - 1) : 0.0;
        e.stderr_.push_back(std::abs(scale) * std::sqrt(var / static_cast<double>(std::max<std::uint64_t>(m.n, 1))));
    }
    return e;
}

double determinant(std::vector<double> a, int n) {
    double det = 1;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        if (a[piv * n + c] == 0) return 0;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            det = -det;
        }
        det *= a[c * n + c];
        for (int r = c + 1; r < n; ++r) {
            double f = a[r * n + c] / a[c * n + c];
            if (f == 0) continue;
            for (int k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
        }
    }
    return det;
}

void subsets(int count, int size, int from, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == size) {
        out.push_back(cur);
        return;
    }
    for (int i = from; i < count; ++i) {
        cur.push_back(i);
        subsets(count, size, i + 1, cur, out);
        cur.pop_back();
    }
}

struct Layout {
    int D = 0;
    std::vector<int> bulk_coord;      // first coordinate of each bulk vertex, -1 if pinned
    std::vector<int> boundary_coord;  // coordinate of boundary vertex b, -1 for the fixed point
    std::vector<Edge> edges;          // edges carrying a propagator
    std::vector<int> phi_vertices;    // free bulk vertices with r_i >= 1
    int picks = 0;                    // how many phi factors contribute their 2-form
    int u_power = 0;
};

}  // namespace

WeightProblem wheel_problem(int j) {
    WeightProblem p;
    p.graph = wheel(j);
    p.pinned.assign(j + 1, false);
    p.pinned[j] = true;
    p.sampling = BulkSampling::Radial;
    return p;
}

WeightProblem phi_power_problem(int s) {
    WeightProblem p;
    p.graph.k = {0};
    p.phi_power = {s};
    return p;
}

McEstimate mc_weight(const WeightProblem& p, std::uint64_t samples, std::uint64_t seed, int threads) {
    const auto& g = p.graph;
    g.validate();
    const int n = g.n();
    std::vector<int> r = p.phi_power.empty() ? std::vector<int>(n, 0) : p.phi_power;
    std::vector<bool> pinned = p.pinned.empty() ? std::vector<bool>(n, false) : p.pinned;
    if (static_cast<int>(r.size()) != n || static_cast<int>(pinned.size()) != n)
        throw std::invalid_argument("mc_weight: phi powers and pins need one entry per bulk vertex");
    for (int v : r)
        if (v < 0) throw std::invalid_argument("mc_weight: negative phi power");

    Layout L;
    for (int i = 0; i < n; ++i) {
        L.bulk_coord.push_back(pinned[i] ? -1 : L.D);
        if (!pinned[i]) L.D += 2;
        L.u_power += r[i];
        if (!pinned[i] && r[i] > 0) L.phi_vertices.push_back(i);
    }
    for (int b = 0; b < g.m; ++b) {
        L.boundary_coord.push_back(b == 0 ? -1 : L.D);
        if (b > 0) L.D += 1;
    }
    for (const auto& e : g.edges) {
        if (g.kind(e.tgt) == VertexKind::White) continue;
        if (g.kind(e.tgt) == VertexKind::Bulk && pinned[e.src] && pinned[e.tgt])
            throw std::invalid_argument("mc_weight: edge between two pinned vertices");
        L.edges.push_back(e);
    }
    Rational sym = 1;
    if (p.symmetry_factor)
        for (int k : g.k) sym /= factorial(k);

    McEstimate est;
    est.seed = seed;
    const int E = static_cast<int>(L.edges.size());
    const int gap = L.D - E;
    if (gap < 0 || gap % 2 != 0 || gap / 2 > static_cast<int>(L.phi_vertices.size())) {
        est.exact = true;
        est.note = "form degree does not match the configuration space dimension " + std::to_string(L.D);
        est.value = {cd{}};
        est.stderr_ = {0.0};
        return est;
    }
    L.picks = gap / 2;
    L.u_power -= L.picks;
    std::vector<std::vector<int>> choices;
    std::vector<int> cur;
    subsets(static_cast<int>(L.phi_vertices.size()), L.picks, 0, cur, choices);

    const int m_free = std::max(g.m - 1, 0);
    double box = 1;
    for (int b = 1; b <= m_free; ++b) box *= 2 * kPi / b;

    auto integrand = [&, choices](const std::vector<DiskPoint>& zb, const std::vector<DiskPoint>& tb) {
        // covector of each propagator over the integration coordinates
        std::vector<double> cov(static_cast<std::size_t>(E) * L.D, 0.0);
        for (int e = 0; e < E; ++e) {
            const auto& ed = L.edges[e];
            DiskPoint z = zb[ed.src];
            bool to_boundary = g.kind(ed.tgt) == VertexKind::Boundary;
            int b = to_boundary ? ed.tgt - n : -1;
            DiskPoint w = to_boundary ? tb[b] : zb[ed.tgt];
            auto pv = propagator_eval(z, w);
            double* row = &cov[static_cast<std::size_t>(e) * L.D];
            if (int c = L.bulk_coord[ed.src]; c >= 0) {
                row[c] += pv.c[0];
                row[c + 1] += pv.c[1];
            }
            if (to_boundary) {
                if (int c = L.boundary_coord[b]; c >= 0) row[c] += boundary_component(pv, w);
            } else if (int c = L.bulk_coord[ed.tgt]; c >= 0) {
                row[c] += pv.c[2];
                row[c + 1] += pv.c[3];
            }
        }
        double total = 0;
        for (const auto& S : choices) {
            std::vector<bool> removed(L.D, false);
            double factor = 1;
            std::vector<bool> in_s(n, false);
            for (int idx : S) in_s[L.phi_vertices[idx]] = true;
            for (int i = 0; i < n; ++i) {
                if (r[i] == 0) continue;
                double s1 = 1 - std::norm(zb[i]);
                if (in_s[i]) {
                    factor *= r[i] * std::pow(s1, r[i] - 1) / kPi;
                    removed[L.bulk_coord[i]] = removed[L.bulk_coord[i] + 1] = true;
                } else {
                    factor *= std::pow(s1, r[i]);
                }
            }
            if (factor == 0) continue;
            if (E == 0) {
                total += factor;
                continue;
            }
            std::vector<double> minor;
            minor.reserve(static_cast<std::size_t>(E) * E);
            for (int e = 0; e < E; ++e)
                for (int c = 0; c < L.D; ++c)
                    if (!removed[c]) minor.push_back(cov[static_cast<std::size_t>(e) * L.D + c]);
            total += factor * determinant(std::move(minor), E);
        }
        return total;
    };

    if (L.D == 0) {
        std::vector<DiskPoint> zb(n, DiskPoint{}), tb(g.m, DiskPoint{1, 0});
        double v = integrand(zb, tb) * sym.get_d();
        est.exact = true;
        est.u_min = L.u_power;
        est.value = {cd{v, 0}};
        est.stderr_ = {0.0};
        return est;
    }
    if (samples == 0) throw std::invalid_argument("mc_weight: need at least one sample");

    auto sample = [&](CounterRng& rng, std::vector<double>& out) {
        std::vector<DiskPoint> zb(n, DiskPoint{}), tb(g.m, DiskPoint{1, 0});
        double weight = box;
        for (int i = 0; i < n; ++i) {
            if (pinned[i]) continue;
            double u1 = rng.uniform(), u2 = rng.uniform();
            double rad;
            if (p.sampling == BulkSampling::Radial) {
                rad = u1;
                weight *= 2 * kPi * rad;
            } else {
                rad = std::sqrt(u1);
                weight *= kPi;
            }
            zb[i] = std::polar(rad, 2 * kPi * u2);
        }
        std::vector<double> ang(m_free);
        for (auto& a : ang) a = 2 * kPi * rng.uniform();
        std::sort(ang.begin(), ang.end());
        for (int b = 1; b < g.m; ++b) tb[b] = std::polar(1.0, ang[b - 1]);
        try {
            out[0] = weight * integrand(zb, tb);
        } catch (const std::invalid_argument&) {
            out[0] = 0;  // measure-zero coincidence
        }
    };
    auto m = run_batches(samples, seed, threads, 1, sample);
    est = to_estimate(m, sym.get_d(), L.u_power, seed);
    return est;
}

Rational wheel_weight_closed(int j) {
    if (j < 2) throw std::invalid_argument("wheel weight needs j >= 2");
    Rational sign = ((j * (j - 1) / 2) % 2 == 0) ? Rational(1) : Rational(-1);
    return -sign * bernoulli(j) / (Rational(2 * j) * Rational(factorial(j)));
}

VanishingResult vanishing_check(DiskPoint z, DiskPoint zp, std::uint64_t samples, std::uint64_t seed, int threads) {
    if (std::abs(z - zp) < 1e-12) throw std::invalid_argument("vanishing_check needs distinct points");
    if (std::norm(z) >= 1 || std::norm(zp) >= 1) throw std::invalid_argument("vanishing_check needs interior points");
    if (samples == 0) throw std::invalid_argument("vanishing_check: need at least one sample");
    // w drawn from an equal mixture of densities 1/(4 pi |w - c|) on radius-2 balls around z and z'
    const std::array<DiskPoint, 2> centers{z, zp};
    auto sample = [&](CounterRng& rng, std::vector<double>& out) {
        const DiskPoint c = centers[rng.uniform() < 0.5 ? 0 : 1];
        const DiskPoint w = c + std::polar(2 * rng.uniform(), 2 * kPi * rng.uniform());
        std::fill(out.begin(), out.end(), 0.0);
        if (std::norm(w) >= 1) return;
        double density = 0;
        for (const auto& cc : centers) density += 0.5 / (4 * kPi * std::abs(w - cc));
        const double weight = 1 / density;
        try {
            auto a = propagator_eval(z, w);
            auto b = propagator_eval(w, zp);
            out[0] = weight * (a.c[2] * b.c[1] - a.c[3] * b.c[0]);
            out[1] = weight * a.c[0] / kPi;
            out[2] = weight * a.c[1] / kPi;
        } catch (const std::invalid_argument&) {
        }
    };
    auto m = run_batches(samples, seed, threads, 3, sample);
    VanishingResult res;
    auto full = to_estimate(m, 1.0, 0, seed);
    auto pick = [&](std::size_t i, bool with_u1) {
        McEstimate e;
        e.u_min = 0;
        e.samples = full.samples;
        e.seed = seed;
        e.value = {full.value[i]};
        e.stderr_ = {full.stderr_[i]};
        if (with_u1) {
            // the u-part of phi has no w-area component, so it integrates to zero exactly
            e.value.push_back(cd{});
            e.stderr_.push_back(0.0);
        }
        return e;
    };
    res.propagators = pick(0, false);
    res.phi_dx = pick(1, true);
    res.phi_dy = pick(2, true);
    return res;
}

EquivResidual equiv_d_check(const std::vector<std::pair<DiskPoint, DiskPoint>>& points) {
    EquivResidual out;
    for (const auto& [z, w] : points) {
        auto p = propagator_eval(z, w);
        auto d = propagator_partials(z, w);
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) {
                double dp = d[a][b] - d[b][a];
                double target = (a == 0 && b == 1) ? -1 / kPi : 0.0;
                out.u0_residual = std::max(out.u0_residual, std::abs(dp - target));
            }
        double iv = 2 * kPi * (-z.imag() * p.c[0] + z.real() * p.c[1] - w.imag() * p.c[2] + w.real() * p.c[3]);
        out.u1_residual = std::max(out.u1_residual, std::abs(iv - (1 - std::norm(z))));
    }
    out.max_residual = std::max(out.u0_residual, out.u1_residual);
    return out;
}

}  // namespace startrace
