#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace qlab::rigidity {

// Probability measure on the uniform (Z/L)^2 grid inside the 2-torus; cell
// (i, j) represents the point (i/L, j/L) mod 1.
struct GridMeasure {
    int resolution = 0;
    Eigen::MatrixXd weights;  // resolution x resolution

    static GridMeasure zero(int resolution);
    static GridMeasure point(int resolution, int i, int j);
    static GridMeasure origin(int resolution);
    static GridMeasure uniform(int resolution);

    // weights nonnegative, total mass 1 within 1e-12
    void validate() const;
    double origin_mass() const { return weights(0, 0); }
    double mass() const { return weights.sum(); }
};

// 2x2 integer matrix of determinant one.
struct IntMatrix {
    long a = 1, b = 0, c = 0, d = 1;

    IntMatrix() = default;
    IntMatrix(long a, long b, long c, long d);
    long det() const { return a * d - b * c; }

    static IntMatrix identity() { return {}; }
    static IntMatrix lower(long r) { return {1, 0, r, 1}; }
    static IntMatrix upper(long r) { return {1, r, 0, 1}; }
};
IntMatrix operator*(const IntMatrix& x, const IntMatrix& y);

struct Character {
    long h1 = 0;
    long h2 = 0;
};

// standard test families: the four elementary matrices with parameter r, and
// the four coordinate characters
std::vector<IntMatrix> elementary_family(long r = 1);
std::vector<Character> coordinate_characters();

// Pushforward of the measure under the dual map chi -> (A^T)^{-1} chi; exact
// grid permutation, mass preserving.
GridMeasure dual_action(const IntMatrix& m, const GridMeasure& mu);

// sum over cells of weight * |e^{2 pi i <h, chi>} - 1|
double character_defect(const Character& h, const GridMeasure& mu);
// L1 distance between the pushforward and the measure
double action_defect(const IntMatrix& m, const GridMeasure& mu);
// max over the listed matrices and characters
double invariance_defect(const std::vector<IntMatrix>& mats, const std::vector<Character>& chars,
                         const GridMeasure& mu);

struct AdversaryReport {
    int resolution = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    double min_defect = 0.0;
};
// Randomized search plus greedy mass-moving descent over probability measures
// with zero mass at the origin, minimizing the invariance defect for the
// elementary matrices (r=1) and coordinate characters.  Deterministic for a
// fixed seed.
AdversaryReport adversarial_min_defect(int resolution, int trials, std::uint64_t seed);

struct ConcentrationReport {
    double beta = 0.0;          // mass at the origin
    double defect = 0.0;        // invariance defect of mu
    double l1_distance = 0.0;   // ||mu - delta_0|| in L1, equals 2(1 - beta)
    double bound_40delta = 0.0; // 40 * defect
    bool pass = false;          // l1_distance <= 40 * defect (concentration)
};
ConcentrationReport tpp_concentration(const GridMeasure& mu, double eps);

// CSV rows "i,j,weight" (nonzero cells only, header included)
std::string measure_to_csv(const GridMeasure& mu);
GridMeasure measure_from_csv(int resolution, const std::string& text);

}  // namespace qlab::rigidity
