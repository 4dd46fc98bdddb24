#pragma once

#include "psido/error.hpp"
#include "psido/metric/quad_form.hpp"
#include "psido/types.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace psido {

/// Point-dependent field of quadratic forms on phase space. Either split,
/// g = phi^{-2}|dx|^2 + Phi^{-2}|dxi|^2, or a general evaluator.
class MetricField {
public:
    using Scalar = std::function<double(const Point&)>;
    using General = std::function<QuadForm(const Point&)>;

    static MetricField split(int n, Scalar phi, Scalar Phi, std::string label)
    {
        MetricField m;
        m.n_ = n;
        m.label_ = std::move(label);
        m.phi_ = std::move(phi);
        m.Phi_ = std::move(Phi);
        return m;
    }

    static MetricField general(int n, General eval, std::string label)
    {
        MetricField m;
        m.n_ = n;
        m.label_ = std::move(label);
        m.general_ = std::move(eval);
        return m;
    }

    int n() const { return n_; }
    int dim() const { return 2 * n_; }
    const std::string& label() const { return label_; }
    bool is_split() const { return static_cast<bool>(phi_); }

    QuadForm at(const Point& x) const
    {
        if (x.size() != dim()) {
            throw Error(ErrorKind::DimensionMismatch, "point dimension " + std::to_string(x.size()) +
                                                          " for metric '" + label_ + "'");
        }
        if (general_) {
            return general_(x);
        }
        const double phi = phi_(x);
        const double Phi = Phi_(x);
        if (!(phi > 0.0) || !(Phi > 0.0) || !std::isfinite(phi) || !std::isfinite(Phi)) {
            throw Error(ErrorKind::DegenerateForm, "split metric '" + label_ + "' has phi=" +
                                                       std::to_string(phi) + ", Phi=" + std::to_string(Phi));
        }
        RealMatrix m = RealMatrix::Zero(dim(), dim());
        m.topLeftCorner(n_, n_).diagonal().setConstant(1.0 / (phi * phi));
        m.bottomRightCorner(n_, n_).diagonal().setConstant(1.0 / (Phi * Phi));
        return QuadForm(m);
    }

    QuadForm dual_at(const Point& x) const { return symplectic_dual(at(x)); }

    /// Symplectic intermediate g^# = geometric mean of g and g^sigma.
    QuadForm sharp_at(const Point& x) const
    {
        const QuadForm g = at(x);
        return geometric_mean(g, symplectic_dual(g));
    }

private:
    int n_ = 1;
    std::string label_;
    Scalar phi_;
    Scalar Phi_;
    General general_;
};

/// The symplectic intermediate field of `g`, as a metric in its own right.
inline MetricField sharp_metric(const MetricField& g)
{
    return MetricField::general(g.n(), [g](const Point& x) { return g.sharp_at(x); }, "sharp(" + g.label() + ")");
}

/// Positive weight function on phase space.
class Weight {
public:
    using Eval = std::function<double(const Point&)>;

    Weight(int n, Eval eval, std::string label)
        : n_(n)
        , eval_(std::move(eval))
        , label_(std::move(label))
    {
    }

    int n() const { return n_; }
    const std::string& label() const { return label_; }

    double operator()(const Point& x) const
    {
        const double v = eval_(x);
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(ErrorKind::NonFinite, "weight '" + label_ + "' is not positive at probed point");
        }
        return v;
    }

    double operator()(double x, double xi) const { return (*this)(point2(x, xi)); }

private:
    int n_;
    Eval eval_;
    std::string label_;
};

inline double japanese(const Point& p) { return std::sqrt(1.0 + p.squaredNorm()); }

namespace metrics {

inline MetricField euclidean(int n = 1)
{
    return MetricField::split(n, [](const Point&) { return 1.0; }, [](const Point&) { return 1.0; }, "euclidean");
}

/// phi = Phi = <X>
inline MetricField shubin(int n = 1)
{
    auto w = [](const Point& p) { return japanese(p); };
    return MetricField::split(n, w, w, "shubin");
}

/// phi = <x>, Phi = <xi>
inline MetricField sg(int n = 1)
{
    auto phi = [n](const Point& p) { return std::sqrt(1.0 + p.head(n).squaredNorm()); };
    auto Phi = [n](const Point& p) { return std::sqrt(1.0 + p.tail(n).squaredNorm()); };
    return MetricField::split(n, phi, Phi, "sg");
}

/// Semiclassical metric h|dX|^2 (phi = Phi = h^{-1/2}); Planck function 1/h.
inline MetricField planck_h(double h = 0.1, int n = 1)
{
    if (!(h > 0.0)) {
        throw Error(ErrorKind::Config, "planck-h requires h > 0");
    }
    const double s = 1.0 / std::sqrt(h);
    auto w = [s](const Point&) { return s; };
    return MetricField::split(n, w, w, "planck-h");
}

/// phi = Phi = exp(|X|^2): violates slow variation; used as a negative control.
inline MetricField exp_growth(int n = 1)
{
    auto w = [](const Point& p) { return std::exp(p.squaredNorm()); };
    return MetricField::split(n, w, w, "exp-growth");
}

inline MetricField by_name(const std::string& id, int n = 1)
{
    if (id == "euclidean") return euclidean(n);
    if (id == "shubin") return shubin(n);
    if (id == "sg") return sg(n);
    if (id == "planck-h") return planck_h(0.1, n);
    if (id.rfind("planck-h:", 0) == 0) {
        const std::string tail = id.substr(9);
        std::size_t used = 0;
        double h = 0.0;
        try {
            h = std::stod(tail, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tail.size() || !(h > 0.0) || !std::isfinite(h)) {
            throw Error(ErrorKind::UnknownId, "bad planck-h parameter in '" + id + "'");
        }
        return planck_h(h, n);
    }
    if (id == "exp-growth") return exp_growth(n);
    throw Error(ErrorKind::UnknownId, "unknown metric id '" + id + "'");
}

inline std::vector<std::string> names() { return {"euclidean", "shubin", "sg", "planck-h", "exp-growth"}; }

} // namespace metrics

namespace weights {

inline Weight one(int n = 1)
{
    return Weight(n, [](const Point&) { return 1.0; }, "one");
}

/// <X>^s
inline Weight bracket(double s, int n = 1)
{
    std::ostringstream label;
    label << "bracket";
    if (s != 1.0) {
        label << '^' << s;
    }
    return Weight(n, [s](const Point& p) { return std::pow(1.0 + p.squaredNorm(), 0.5 * s); }, label.str());
}

inline Weight exp_growth(int n = 1)
{
    return Weight(n, [](const Point& p) { return std::exp(p.squaredNorm()); }, "exp-growth");
}

/// Pointwise quotient m1/m2.
inline Weight ratio(const Weight& m1, const Weight& m2)
{
    return Weight(m1.n(), [m1, m2](const Point& p) { return m1(p) / m2(p); }, m1.label() + "/" + m2.label());
}

/// Ids: "one", "bracket", "bracket^S" (S real), "exp-growth".
inline Weight by_name(const std::string& id, int n = 1)
{
    if (id == "one") return one(n);
    if (id == "bracket") return bracket(1.0, n);
    if (id.rfind("bracket^", 0) == 0) {
        std::size_t used = 0;
        const std::string tail = id.substr(8);
        double s = 0.0;
        try {
            s = std::stod(tail, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tail.size()) {
            throw Error(ErrorKind::UnknownId, "bad weight exponent in '" + id + "'");
        }
        return bracket(s, n);
    }
    if (id == "exp-growth") return exp_growth(n);
    throw Error(ErrorKind::UnknownId, "unknown weight id '" + id + "'");
}

} // namespace weights

} // namespace psido
