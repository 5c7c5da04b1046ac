#include "evtwalk/measure.hpp"

#include <cmath>
#include <string>

namespace evtwalk {

GeneratorMeasure validate_measure(WalkMode mode, int dim,
                                  const std::vector<MatD>& elements,
                                  const std::vector<double>& weights) {
    if (dim < 1 || dim > kMaxDim)
        throw InvalidArgument("measure: dim must be in [1," +
                              std::to_string(kMaxDim) + "]");
    if (elements.empty()) throw EmptySupport("measure: empty support");
    if (weights.size() != elements.size())
        throw BadWeights("measure: weights/support size mismatch");

    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw BadWeights("measure: weights must be strictly positive");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw BadWeights("measure: weights must sum to 1 within 1e-9");

    GeneratorMeasure m;
    m.mode = mode;
    m.dim = dim;
    m.elements = elements;
    m.weights.resize(weights.size());
    for (size_t i = 0; i < weights.size(); ++i) m.weights[i] = weights[i] / sum;

    for (const MatD& e : elements) {
        if (e.n != dim) throw InvalidArgument("measure: generator dim mismatch");
        if (mode == WalkMode::torus) {
            MatI im; im.n = dim;
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    const double v = e.at(i, j);
                    const double r = std::nearbyint(v);
                    if (std::fabs(v - r) > 1e-12)
                        throw NonIntegerEntries("torus generator entries must be integers");
                    im.at(i, j) = static_cast<std::int64_t>(r);
                }
            const __int128 det = mati_det(im);
            if (det != 1 && det != -1)
                throw NonUnimodular("torus generator must have determinant +-1");
            m.ielements.push_back(im);
        } else {
            const double det = mat_det(e);
            if (std::fabs(det - 1.0) > 1e-9)
                throw NonUnimodular("lattice generator must have determinant 1");
        }
    }

    m.cumulative.resize(m.weights.size());
    double acc = 0.0;
    for (size_t i = 0; i < m.weights.size(); ++i) {
        acc += m.weights[i];
        m.cumulative[i] = acc;
    }
    m.cumulative.back() = 1.0;
    return m;
}

static MatD mat2(double a, double b, double c, double d) {
    MatD m; m.n = 2;
    m.at(0, 0) = a; m.at(0, 1) = b; m.at(1, 0) = c; m.at(1, 1) = d;
    return m;
}

static MatD mat3(std::initializer_list<double> v) {
    MatD m; m.n = 3;
    int k = 0;
    for (double x : v) m.a[k++] = x;
    return m;
}

GeneratorMeasure default_measure(WalkMode mode, int dim) {
    if (mode == WalkMode::torus) {
        if (dim == 2) {
            // Hyperbolic pair; every word of these has det(w - I) != 0 at the
            // depths we check, see check_det_condition.
            return validate_measure(mode, 2,
                                    {mat2(2, 1, 1, 1), mat2(1, 1, 1, 2)},
                                    {0.5, 0.5});
        }
        if (dim == 3) {
            // Companion matrix of x^3 = x^2 + x + 1 and its transpose; both
            // ergodic (no eigenvalue is a root of unity).
            const MatD a = mat3({0, 1, 0, 0, 0, 1, 1, 1, 1});
            const MatD at = mat3({0, 0, 1, 1, 0, 1, 0, 1, 1});
            return validate_measure(mode, 3, {a, at}, {0.5, 0.5});
        }
    } else {
        if (dim == 2) {
            // Sanov generators: free subgroup of SL(2,Z).
            return validate_measure(mode, 2,
                                    {mat2(1, 2, 0, 1), mat2(1, 0, 2, 1)},
                                    {0.5, 0.5});
        }
        if (dim == 3) {
            // Shear, cyclic rotation, and inverses; together they generate
            // SL(3,Z).
            const MatD t = mat3({1, 1, 0, 0, 1, 0, 0, 0, 1});
            const MatD ti = mat3({1, -1, 0, 0, 1, 0, 0, 0, 1});
            const MatD s = mat3({0, 1, 0, 0, 0, 1, 1, 0, 0});
            const MatD si = mat3({0, 0, 1, 1, 0, 0, 0, 1, 0});
            return validate_measure(mode, 3, {t, ti, s, si},
                                    {0.25, 0.25, 0.25, 0.25});
        }
    }
    throw ConfigError("no default generators for this mode/dimension; "
                      "pass --generators");
}

} // namespace evtwalk
