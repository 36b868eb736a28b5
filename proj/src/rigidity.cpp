#include "qlab/rigidity.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qlab::rigidity {

namespace {

int wrap(long v, int mod) { return static_cast<int>(((v % mod) + mod) % mod); }

std::uint64_t splitmix(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53;
}

}  // namespace

GridMeasure GridMeasure::zero(int resolution) {
    if (resolution <= 0) throw std::invalid_argument("measure: resolution must be positive");
    GridMeasure mu;
    mu.resolution = resolution;
    mu.weights = Eigen::MatrixXd::Zero(resolution, resolution);
    return mu;
}

GridMeasure GridMeasure::point(int resolution, int i, int j) {
    GridMeasure mu = zero(resolution);
    mu.weights(wrap(i, resolution), wrap(j, resolution)) = 1.0;
    return mu;
}

GridMeasure GridMeasure::origin(int resolution) { return point(resolution, 0, 0); }

GridMeasure GridMeasure::uniform(int resolution) {
    GridMeasure mu = zero(resolution);
    mu.weights.setConstant(1.0 / (static_cast<double>(resolution) * resolution));
    return mu;
}

void GridMeasure::validate() const {
    if (weights.rows() != resolution || weights.cols() != resolution)
        throw std::invalid_argument("measure: weight grid size mismatch");
    if (weights.minCoeff() < 0.0) throw std::invalid_argument("measure: negative weight");
    if (std::abs(weights.sum() - 1.0) > 1e-12)
        throw std::invalid_argument("measure: total mass differs from 1");
}

IntMatrix::IntMatrix(long a_, long b_, long c_, long d_) : a(a_), b(b_), c(c_), d(d_) {
    if (det() != 1) throw std::invalid_argument("matrix: determinant must be exactly 1");
}

IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
}

std::vector<IntMatrix> elementary_family(long r) {
    return {IntMatrix::lower(r), IntMatrix::lower(-r), IntMatrix::upper(r),
            IntMatrix::upper(-r)};
}

std::vector<Character> coordinate_characters() {
    return {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
}

GridMeasure dual_action(const IntMatrix& m, const GridMeasure& mu) {
    // (A^T)^{-1} = [[d, -c], [-b, a]] for det 1
    const int L = mu.resolution;
    GridMeasure out = GridMeasure::zero(L);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            const double w = mu.weights(i, j);
            if (w == 0.0) continue;
            out.weights(wrap(m.d * i - m.c * j, L), wrap(-m.b * i + m.a * j, L)) += w;
        }
    return out;
}

double character_defect(const Character& h, const GridMeasure& mu) {
    const int L = mu.resolution;
    double total = 0.0;
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            const double w = mu.weights(i, j);
            if (w == 0.0) continue;
            const double phase =
                2.0 * std::numbers::pi * static_cast<double>(h.h1 * i + h.h2 * j) / L;
            total += w * std::abs(std::polar(1.0, phase) - 1.0);
        }
    return total;
}

double action_defect(const IntMatrix& m, const GridMeasure& mu) {
    return (dual_action(m, mu).weights - mu.weights).cwiseAbs().sum();
}

double invariance_defect(const std::vector<IntMatrix>& mats, const std::vector<Character>& chars,
                         const GridMeasure& mu) {
    double worst = 0.0;
    for (const auto& m : mats) worst = std::max(worst, action_defect(m, mu));
    for (const auto& h : chars) worst = std::max(worst, character_defect(h, mu));
    return worst;
}

AdversaryReport adversarial_min_defect(int resolution, int trials, std::uint64_t seed) {
    if (resolution < 4) throw std::invalid_argument("adversary: resolution >= 4 required");
    if (trials <= 0) throw std::invalid_argument("adversary: trials must be positive");
    const auto mats = elementary_family(1);
    const auto chars = coordinate_characters();
    const int L = resolution;

    const auto defect_of = [&](const GridMeasure& mu) {
        return invariance_defect(mats, chars, mu);
    };
    const auto normalize = [](GridMeasure& mu) {
        mu.weights(0, 0) = 0.0;
        const double s = mu.weights.sum();
        if (s > 0.0) mu.weights /= s;
    };

    GridMeasure best = GridMeasure::point(L, 1, 0);
    double best_defect = defect_of(best);

    // every off-origin point mass, checked directly
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            if (i == 0 && j == 0) continue;
            const auto mu = GridMeasure::point(L, i, j);
            const double d = defect_of(mu);
            if (d < best_defect) {
                best_defect = d;
                best = mu;
            }
        }

    std::uint64_t master = seed;
    for (int trial = 0; trial < trials; ++trial) {
        std::uint64_t rng = splitmix(master) ^ static_cast<std::uint64_t>(trial);
        GridMeasure mu = GridMeasure::zero(L);
        switch (trial % 3) {
            case 0: {  // sparse random support
                const int support = 1 + static_cast<int>(splitmix(rng) % 6);
                for (int s = 0; s < support; ++s)
                    mu.weights(static_cast<int>(splitmix(rng) % L),
                               static_cast<int>(splitmix(rng) % L)) += uniform01(rng);
                break;
            }
            case 1: {  // mass decaying away from the origin
                const double rate = 0.3 + 3.0 * uniform01(rng);
                for (int i = 0; i < L; ++i)
                    for (int j = 0; j < L; ++j) {
                        const int di = std::min(i, L - i), dj = std::min(j, L - j);
                        mu.weights(i, j) = std::exp(-rate * (di + dj)) * (0.5 + uniform01(rng));
                    }
                break;
            }
            default:  // dense random
                for (int i = 0; i < L; ++i)
                    for (int j = 0; j < L; ++j) mu.weights(i, j) = uniform01(rng);
        }
        normalize(mu);
        if (mu.mass() == 0.0) continue;
        const double d = defect_of(mu);
        if (d < best_defect) {
            best_defect = d;
            best = mu;
        }
    }

    // greedy refinement: move mass between cells while the defect decreases
    std::uint64_t rng = master ^ 0xd1b54a32d192ed03ULL;
    GridMeasure mu = best;
    for (int step = 0; step < 4000; ++step) {
        const int si = static_cast<int>(splitmix(rng) % L), sj = static_cast<int>(splitmix(rng) % L);
        if ((si == 0 && sj == 0) || mu.weights(si, sj) <= 0.0) continue;
        int ti = static_cast<int>(splitmix(rng) % L), tj = static_cast<int>(splitmix(rng) % L);
        if (ti == 0 && tj == 0) continue;
        const double amount = mu.weights(si, sj) * (0.25 + 0.75 * uniform01(rng));
        GridMeasure cand = mu;
        cand.weights(si, sj) -= amount;
        cand.weights(ti, tj) += amount;
        const double d = defect_of(cand);
        if (d < best_defect) {
            best_defect = d;
            mu = cand;
        }
    }

    AdversaryReport rep;
    rep.resolution = L;
    rep.trials = trials;
    rep.seed = seed;
    rep.min_defect = best_defect;
    return rep;
}

ConcentrationReport tpp_concentration(const GridMeasure& mu, double eps) {
    mu.validate();
    ConcentrationReport rep;
    rep.beta = mu.origin_mass();
    rep.defect = invariance_defect(elementary_family(1), coordinate_characters(), mu);
    rep.l1_distance = (1.0 - rep.beta) + (mu.mass() - rep.beta);  // = 2(1 - beta)
    rep.bound_40delta = 40.0 * rep.defect;
    const bool concentration = rep.l1_distance <= rep.bound_40delta + 1e-12;
    const bool eps_form = rep.defect >= eps / 40.0 || rep.l1_distance < eps;
    rep.pass = concentration && eps_form;
    return rep;
}

std::string measure_to_csv(const GridMeasure& mu) {
    std::ostringstream out;
    out << "i,j,weight\n";
    out.precision(17);
    for (int i = 0; i < mu.resolution; ++i)
        for (int j = 0; j < mu.resolution; ++j)
            if (mu.weights(i, j) != 0.0) out << i << "," << j << "," << mu.weights(i, j) << "\n";
    return out.str();
}

GridMeasure measure_from_csv(int resolution, const std::string& text) {
    GridMeasure mu = GridMeasure::zero(resolution);
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("i,", 0) == 0) continue;  // header
        }
        std::istringstream row(line);
        std::string cell;
        int i = 0, j = 0;
        double w = 0.0;
        if (!std::getline(row, cell, ',')) throw std::invalid_argument("measure csv: bad row");
        i = std::stoi(cell);
        if (!std::getline(row, cell, ',')) throw std::invalid_argument("measure csv: bad row");
        j = std::stoi(cell);
        if (!std::getline(row, cell, ',')) throw std::invalid_argument("measure csv: bad row");
        w = std::stod(cell);
        if (i < 0 || i >= resolution || j < 0 || j >= resolution)
            throw std::invalid_argument("measure csv: cell out of range");
        mu.weights(i, j) += w;
    }
    mu.validate();
    return mu;
}

}  // namespace qlab::rigidity
