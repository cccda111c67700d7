#include "lhv/povm.hpp"

#include "lhv/errors.hpp"
#include "lhv/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lhv {

namespace {
constexpr double kZeroElement = 1e-12; // below this an element counts as absent
}

bool validate_povm(const Povm& p, double tol) {
    if (p.elements.empty() || p.elements.size() > 4) return false;
    double asum = 0.0;
    BlochVector vsum{0, 0, 0};
    for (const PovmElement& e : p.elements) {
        if (e.a < -tol) return false;
        if (std::fabs(e.a - e.avec.norm()) > tol) return false;
        asum += e.a;
        vsum = vsum + e.avec;
    }
    if (std::fabs(asum - 1.0) > tol) return false;
    if (std::fabs(vsum.x) > tol || std::fabs(vsum.y) > tol || std::fabs(vsum.z) > tol) return false;
    return true;
}

PairInfo find_pair(const Povm& p) {
    if (!validate_povm(p, 1e-10)) throw InvalidParameterError("find_pair: invalid POVM");
    std::vector<int> nz;
    for (size_t i = 0; i < p.elements.size(); ++i)
        if (p.elements[i].a > kZeroElement) nz.push_back(static_cast<int>(i));
    if (nz.size() < 2) throw InvalidParameterError("find_pair: fewer than two nonzero elements");

    PairInfo best;
    double best_ct = 2.0;
    for (size_t s = 0; s < nz.size(); ++s) {
        for (size_t t = s + 1; t < nz.size(); ++t) {
            const PovmElement& ei = p.elements[nz[s]];
            const PovmElement& ej = p.elements[nz[t]];
            double ct = ei.avec.dot(ej.avec) / (ei.a * ej.a);
            if (ct < best_ct) {
                best_ct = ct;
                best = {nz[s], nz[t], ct};
            }
        }
    }
    double guarantee = nz.size() >= 4 ? -1.0 / 3.0 : (nz.size() == 3 ? -0.5 : -1.0 + 1e-9);
    if (best.cos_theta > guarantee + 1e-9)
        throw InternalError("find_pair: admissible-pair guarantee violated (cos=" +
                            std::to_string(best.cos_theta) + ")");
    return best;
}

namespace {

BlochVector any_orthogonal(const BlochVector& u) {
    BlochVector t = std::fabs(u.x) < 0.9 ? BlochVector{1, 0, 0} : BlochVector{0, 1, 0};
    BlochVector v = t - u.scaled(t.dot(u));
    return v.normalized();
}

// Re-projects a residual onto the valid POVM manifold: center the vectors,
// set scalars to the vector norms, normalize the total. Displacement is on
// the order of the accumulated rounding error; without it the 1/(1-p)
// renormalization at each peel amplifies the rank-1 defect geometrically.
void project_valid(Povm& p) {
    BlochVector mean{0, 0, 0};
    for (const PovmElement& e : p.elements) mean = mean + e.avec;
    double inv = 1.0 / static_cast<double>(p.elements.size());
    mean = mean.scaled(inv);
    double sum = 0.0;
    for (PovmElement& e : p.elements) {
        e.avec = e.avec - mean;
        e.a = e.avec.norm();
        sum += e.a;
    }
    if (sum <= 0.0) throw InternalError("project_valid: degenerate residual");
    for (PovmElement& e : p.elements) {
        e.a /= sum;
        e.avec = e.avec.scaled(1.0 / sum);
    }
}

} // namespace

std::optional<PeelStep> peel(const Povm& p, double mu, int i, int j) {
    if (!(mu > 0.0 && mu < 1.0)) throw InvalidParameterError("peel: mu must be in (0, 1)");
    if (i == j || i < 0 || j < 0 || i >= static_cast<int>(p.elements.size()) ||
        j >= static_cast<int>(p.elements.size()))
        throw InvalidParameterError("peel: invalid pair");

    if (p.elements[i].a < p.elements[j].a) std::swap(i, j);
    const double ai = p.elements[i].a;
    const double aj = p.elements[j].a;
    if (aj <= kZeroElement) return std::nullopt;

    double ct = p.elements[i].avec.dot(p.elements[j].avec) / (ai * aj);
    ct = std::clamp(ct, -1.0, 1.0);
    const double theta12 = std::acos(ct);

    // Both p-expressions must be nonnegative, which confines theta1 to
    // [asin(mu), theta12 - asin(mu)]; on that window g is <= 0 on the left
    // and >= 0 on the right whenever the window is nonempty.
    const double asin_mu = std::asin(mu);
    double lo = asin_mu;
    double hi = theta12 - asin_mu;
    if (!(hi > lo)) return std::nullopt;

    auto g = [&](double t1) {
        return ai * (std::sin(t1) - mu) - aj * (std::sin(theta12 - t1) - mu);
    };
    if (g(lo) > 0.0 || g(hi) < 0.0) return std::nullopt;
    for (int it = 0; it < 120 && hi - lo > 1e-16; ++it) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) <= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double theta1 = 0.5 * (lo + hi);
    const double theta2 = theta12 - theta1;
    const double pw = 4.0 * ai * mu * (std::sin(theta1) - mu) / (1.0 - mu * mu);
    if (!(pw > 0.0)) return std::nullopt;
    if (pw >= 1.0) throw InternalError("peel: weight reached 1 (invalid input?)");

    // Frame: e_z sits at angle theta1 from a_i rotated toward a_j, so that
    // a_i = sin(theta1) e_x + cos(theta1) e_z and a_j sits at -sin(theta2).
    BlochVector ui = p.elements[i].avec.scaled(1.0 / ai);
    BlochVector uj = p.elements[j].avec.scaled(1.0 / aj);
    double s12 = std::sin(theta12);
    BlochVector f2 = s12 > 1e-12 ? (uj - ui.scaled(ct)).scaled(1.0 / s12) : any_orthogonal(ui);
    BlochVector ez = ui.scaled(std::cos(theta1)) + f2.scaled(std::sin(theta1));
    BlochVector ex = (ui - ez.scaled(std::cos(theta1))).scaled(1.0 / std::sin(theta1));
    BlochVector b = ex.normalized();

    PeelStep step;
    step.p = pw;
    step.b = b;
    step.i = i;
    step.j = j;
    step.theta1 = theta1;
    step.theta2 = theta2;
    step.residual.elements.resize(p.elements.size());
    const double omp = 1.0 - pw;
    for (size_t t = 0; t < p.elements.size(); ++t) {
        const PovmElement& e = p.elements[t];
        PovmElement& c = step.residual.elements[t];
        if (static_cast<int>(t) == i) {
            c.a = (e.a - pw / 2.0) / omp;
            c.avec = (e.avec.scaled(mu) - b.scaled(pw / 2.0)).scaled(1.0 / (omp * mu));
        } else if (static_cast<int>(t) == j) {
            c.a = (e.a - pw / 2.0) / omp;
            c.avec = (e.avec.scaled(mu) + b.scaled(pw / 2.0)).scaled(1.0 / (omp * mu));
        } else {
            c.a = e.a / omp;
            c.avec = e.avec.scaled(1.0 / omp);
        }
    }
    project_valid(step.residual);
    return step;
}

PovmDecomposition decompose(const Povm& input, double mu, double tol_weight, int max_steps) {
    if (!validate_povm(input, 1e-10)) throw InvalidParameterError("decompose: invalid POVM");
    if (!(mu > 0.0 && mu < 1.0)) throw InvalidParameterError("decompose: mu must be in (0, 1)");

    PovmDecomposition out;
    out.residual = input;
    out.residual_weight = 1.0;

    while (out.residual_weight > tol_weight && out.steps < max_steps) {
        std::vector<int> nz;
        for (size_t t = 0; t < out.residual.elements.size(); ++t)
            if (out.residual.elements[t].a > kZeroElement) nz.push_back(static_cast<int>(t));

        if (nz.size() < 2) throw InternalError("decompose: residual lost its outcomes");

        if (nz.size() == 2) {
            // A projective pair finishes exactly: the noisy pair splits into
            // the projective measurement along its axis plus the
            // outcome-swapped one absorbing the white part.
            int i = nz[0], j = nz[1];
            BlochVector axis = out.residual.elements[i].avec.scaled(1.0 / out.residual.elements[i].a);
            axis = axis.normalized();
            out.items.push_back({out.residual_weight * (1.0 + mu) / 2.0, axis, i, j});
            out.items.push_back({out.residual_weight * (1.0 - mu) / 2.0, axis, j, i});
            out.residual_weight = 0.0;
            out.residual.elements.clear();
            out.complete = true;
            return out;
        }

        std::optional<PeelStep> best;
        for (size_t s = 0; s < nz.size(); ++s) {
            for (size_t t = s + 1; t < nz.size(); ++t) {
                std::optional<PeelStep> cand = peel(out.residual, mu, nz[s], nz[t]);
                if (cand && (!best || cand->p > best->p)) best = std::move(cand);
            }
        }
        if (!best) {
            out.complete = false; // no admissible pair at this mu
            return out;
        }
        out.items.push_back({out.residual_weight * best->p, best->b, best->i, best->j});
        out.residual_weight *= (1.0 - best->p);
        out.residual = std::move(best->residual);
        ++out.steps;
    }
    out.complete = out.residual_weight <= tol_weight;
    return out;
}

double decomposition_outcome_probability(const PovmDecomposition& d, double mu, int outcome,
                                         int n_outcomes, const BlochVector& r) {
    double prob = 0.0;
    for (const DecompositionItem& it : d.items) {
        if (it.i == outcome) prob += it.weight * 0.5 * (1.0 + it.b.dot(r));
        if (it.j == outcome) prob += it.weight * 0.5 * (1.0 - it.b.dot(r));
    }
    if (d.residual_weight > 0.0 && outcome < static_cast<int>(d.residual.elements.size())) {
        const PovmElement& e = d.residual.elements[outcome];
        prob += d.residual_weight * (e.a + mu * e.avec.dot(r));
    }
    (void)n_outcomes;
    return prob;
}

double reconstruction_error(const PovmDecomposition& d, const Povm& original, double mu) {
    size_t k = original.elements.size();
    std::vector<double> a(k, 0.0);
    std::vector<BlochVector> v(k, BlochVector{0, 0, 0});
    for (const DecompositionItem& it : d.items) {
        a[it.i] += it.weight / 2.0;
        v[it.i] = v[it.i] + it.b.scaled(it.weight / 2.0);
        a[it.j] += it.weight / 2.0;
        v[it.j] = v[it.j] - it.b.scaled(it.weight / 2.0);
    }
    if (d.residual_weight > 0.0 && !d.residual.elements.empty()) {
        for (size_t t = 0; t < k; ++t) {
            a[t] += d.residual_weight * d.residual.elements[t].a;
            v[t] = v[t] + d.residual.elements[t].avec.scaled(d.residual_weight * mu);
        }
    }
    double err = 0.0;
    for (size_t t = 0; t < k; ++t) {
        err = std::max(err, std::fabs(a[t] - original.elements[t].a));
        BlochVector dv = v[t] - original.elements[t].avec.scaled(mu);
        err = std::max({err, std::fabs(dv.x), std::fabs(dv.y), std::fabs(dv.z)});
    }
    return err;
}

Interval povm_visibility_bound(const Interval& v1) {
    return mul_rational(v1, Rational(2, 3));
}

Povm random_extremal_povm(uint64_t seed, int outcomes) {
    if (outcomes != 3 && outcomes != 4)
        throw InvalidParameterError("random_extremal_povm: outcomes must be 3 or 4");
    uint64_t state = seed;
    for (int attempt = 0; attempt < 256; ++attempt) {
        std::vector<BlochVector> v(outcomes);
        BlochVector mean{0, 0, 0};
        for (int i = 0; i < outcomes; ++i) {
            v[i] = {gaussian(state), gaussian(state), gaussian(state)};
            mean = mean + v[i];
        }
        mean = mean.scaled(1.0 / outcomes);
        double sum = 0.0;
        bool degenerate = false;
        for (int i = 0; i < outcomes; ++i) {
            v[i] = v[i] - mean;
            double n = v[i].norm();
            if (n < 1e-6) { degenerate = true; break; }
            sum += n;
        }
        if (degenerate) continue;
        Povm p;
        p.elements.resize(outcomes);
        for (int i = 0; i < outcomes; ++i) {
            p.elements[i].avec = v[i].scaled(1.0 / sum);
            p.elements[i].a = p.elements[i].avec.norm();
            if (p.elements[i].a < 1e-9) { degenerate = true; break; }
        }
        if (degenerate) continue;
        if (!validate_povm(p)) continue;
        return p;
    }
    throw SolverError("random_extremal_povm: failed to draw a nondegenerate sample");
}

void write_povm(const Povm& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "povm\n";
    out << "outcomes: " << p.elements.size() << "\n";
    char buf[160];
    for (const PovmElement& e : p.elements) {
        std::snprintf(buf, sizeof buf, "element: %.17g %.17g %.17g %.17g", e.a, e.avec.x, e.avec.y,
                      e.avec.z);
        out << buf << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

Povm read_povm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "povm") throw ParseError("povm file: bad header");
    if (!std::getline(in, line) || line.rfind("outcomes: ", 0) != 0)
        throw ParseError("povm file: missing outcomes field");
    int count = 0;
    try {
        count = std::stoi(line.substr(10));
    } catch (...) {
        throw ParseError("povm file: bad outcomes field");
    }
    if (count < 1 || count > 4) throw ParseError("povm file: outcomes must be 1..4");
    Povm p;
    for (int i = 0; i < count; ++i) {
        if (!std::getline(in, line) || line.rfind("element: ", 0) != 0)
            throw ParseError("povm file: missing element record " + std::to_string(i));
        std::istringstream ss(line.substr(9));
        PovmElement e;
        if (!(ss >> e.a >> e.avec.x >> e.avec.y >> e.avec.z))
            throw ParseError("povm file: bad element record " + std::to_string(i));
        p.elements.push_back(e);
    }
    return p;
}

void write_povm_decomposition(const PovmDecomposition& d, double mu, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "povm-decomposition\n";
    char buf[200];
    std::snprintf(buf, sizeof buf, "mu: %.17g", mu);
    out << buf << "\n";
    out << "items: " << d.items.size() << "\n";
    for (const DecompositionItem& it : d.items) {
        std::snprintf(buf, sizeof buf, "item: %.17g %.17g %.17g %.17g %d %d", it.weight, it.b.x,
                      it.b.y, it.b.z, it.i, it.j);
        out << buf << "\n";
    }
    std::snprintf(buf, sizeof buf, "residual_weight: %.17g", d.residual_weight);
    out << buf << "\n";
    out << "complete: " << (d.complete ? "true" : "false") << "\n";
    out << "residual_elements: " << d.residual.elements.size() << "\n";
    for (const PovmElement& e : d.residual.elements) {
        std::snprintf(buf, sizeof buf, "element: %.17g %.17g %.17g %.17g", e.a, e.avec.x, e.avec.y,
                      e.avec.z);
        out << buf << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

} // namespace lhv
