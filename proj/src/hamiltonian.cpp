#include "hjlab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace hjlab {

QuasiConvexHamiltonian::QuasiConvexHamiltonian(std::function<double(double)> form,
                                               double p_min, double p_max,
                                               int n_samples, double qc_tol_rel)
    : p_min_(p_min), p_max_(p_max), form_(std::move(form)) {
    if (!(p_min < p_max) || n_samples < 3)
        throw Error("Hamiltonian tabulation needs p_min < p_max and >= 3 samples");
    dp_ = (p_max_ - p_min_) / (n_samples - 1);
    values_.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) values_[i] = form_(p_min_ + i * dp_);
    finalize(qc_tol_rel);
}

QuasiConvexHamiltonian::QuasiConvexHamiltonian(Eigen::ArrayXd values, double p_min,
                                               double p_max, double qc_tol_rel)
    : p_min_(p_min), p_max_(p_max), values_(std::move(values)) {
    if (!(p_min < p_max) || values_.size() < 3)
        throw Error("Hamiltonian tabulation needs p_min < p_max and >= 3 samples");
    dp_ = (p_max_ - p_min_) / (values_.size() - 1);
    finalize(qc_tol_rel);
}

void QuasiConvexHamiltonian::finalize(double qc_tol_rel) {
    const int n = static_cast<int>(values_.size());
    env_minus_.resize(n);
    env_plus_.resize(n);
    // Running minima; for quasi-convex data these are exactly the
    // clamped monotone parts of H.
    double run = values_[0];
    for (int i = 0; i < n; ++i) {
        run = std::min(run, values_[i]);
        env_minus_[i] = run;
    }
    run = values_[n - 1];
    for (int i = n - 1; i >= 0; --i) {
        run = std::min(run, values_[i]);
        env_plus_[i] = run;
    }

    min_value_ = values_.minCoeff();
    const double range = values_.maxCoeff() - min_value_;
    const double tol = qc_tol_rel * std::max(range, 1e-30);

    // Quasi-convexity <=> H = max(minus, plus) pointwise: a sample that has
    // strictly lower samples on both sides breaks the identity.
    for (int i = 0; i < n; ++i) {
        if (values_[i] - std::max(env_minus_[i], env_plus_[i]) > tol) {
            std::ostringstream os;
            os << "not quasi-convex at p = " << (p_min_ + i * dp_)
               << " (excess " << values_[i] - std::max(env_minus_[i], env_plus_[i])
               << ", tolerance " << tol << ")";
            throw NotQuasiConvex(os.str());
        }
    }

    argmin_lo_ = 0;
    while (values_[argmin_lo_] > min_value_ + tol) ++argmin_lo_;
    argmin_hi_ = n - 1;
    while (values_[argmin_hi_] > min_value_ + tol) --argmin_hi_;
    p0_ = p_min_ + argmin_lo_ * dp_; // smallest-minimizer tie-break

    max_abs_slope_ = 0;
    for (int i = 0; i + 1 < n; ++i)
        max_abs_slope_ =
            std::max(max_abs_slope_, std::abs(values_[i + 1] - values_[i]) / dp_);
}

double QuasiConvexHamiltonian::interpolate(const Eigen::ArrayXd &a, double p) const {
    const double slack = 1e-9 * (p_max_ - p_min_);
    if (p < p_min_ - slack || p > p_max_ + slack) {
        std::ostringstream os;
        os << "gradient " << p << " outside sampled range [" << p_min_ << ", "
           << p_max_ << "]";
        throw OutOfRange(os.str());
    }
    const double s = std::clamp((p - p_min_) / dp_, 0.0, double(a.size() - 1));
    const int i = std::min(static_cast<int>(s), static_cast<int>(a.size()) - 2);
    const double w = s - i;
    return a[i] + w * (a[i + 1] - a[i]);
}

Eigen::ArrayXd QuasiConvexHamiltonian::sample_points() const {
    return Eigen::ArrayXd::LinSpaced(values_.size(), p_min_, p_max_);
}

double QuasiConvexHamiltonian::max_abs_on(double lo, double hi) const {
    lo = std::max(lo, p_min_);
    hi = std::min(hi, p_max_);
    if (hi < lo) throw Error("max_abs_on: empty interval after clipping");
    double m = std::max(std::abs((*this)(lo)), std::abs((*this)(hi)));
    const int ilo = static_cast<int>(std::ceil((lo - p_min_) / dp_ - 1e-12));
    const int ihi = static_cast<int>(std::floor((hi - p_min_) / dp_ + 1e-12));
    for (int i = std::max(ilo, 0); i <= std::min(ihi, n_samples() - 1); ++i)
        m = std::max(m, std::abs(values_[i]));
    return m;
}

std::pair<double, double>
QuasiConvexHamiltonian::level_set_endpoints(double lambda, bool increasing,
                                            double tol) const {
    if (lambda < min_value_ - tol) {
        std::ostringstream os;
        os << "level " << lambda << " below min H = " << min_value_;
        throw BelowMinimum(os.str());
    }
    double lam = std::max(lambda, min_value_);
    const int n = n_samples();
    if (lam <= min_value_ + tol) {
        // Level at the bottom: the whole argmin interval qualifies.
        return {p_min_ + argmin_lo_ * dp_, p_min_ + argmin_hi_ * dp_};
    }

    auto point = [&](int k, double w) { return p_min_ + (k + w) * dp_; };

    if (increasing) {
        if (lam > values_[n - 1] + tol)
            throw OutOfRange("level above the sampled increasing branch");
        lam = std::min(lam, values_[n - 1]);
        // leftmost preimage: first segment past the argmin reaching lam
        int k = argmin_hi_;
        while (k + 1 < n && values_[k + 1] < lam) ++k;
        double lo = (values_[k] >= lam)
                        ? point(k, 0.0)
                        : point(k, (lam - values_[k]) / (values_[k + 1] - values_[k]));
        // rightmost preimage: last sample still <= lam
        int m = n - 1;
        while (m > argmin_hi_ && values_[m] > lam) --m;
        double hi = (m == n - 1 || values_[m + 1] <= values_[m])
                        ? point(m, 0.0)
                        : point(m, (lam - values_[m]) / (values_[m + 1] - values_[m]));
        return {std::min(lo, hi), std::max(lo, hi)};
    }

    // Decreasing branch, mirrored.
    if (lam > values_[0] + tol)
        throw OutOfRange("level above the sampled decreasing branch");
    lam = std::min(lam, values_[0]);
    int m = argmin_lo_;
    while (m - 1 >= 0 && values_[m - 1] < lam) --m;
    double hi = (values_[m] >= lam)
                    ? point(m, 0.0)
                    : point(m, -(lam - values_[m]) / (values_[m - 1] - values_[m]));
    int k = 0;
    while (k < argmin_lo_ && values_[k] > lam) ++k;
    double lo = (k == 0 || values_[k - 1] <= values_[k])
                    ? point(k, 0.0)
                    : point(k, -(lam - values_[k]) / (values_[k - 1] - values_[k]));
    return {std::min(lo, hi), std::max(lo, hi)};
}

double QuasiConvexHamiltonian::slope_range_at_level(double level) const {
    double r = std::abs(p0_);
    const int n = n_samples();
    for (int i = 0; i < n; ++i)
        if (std::abs(values_[i]) <= level)
            r = std::max(r, std::abs(p_min_ + i * dp_));
    return r;
}

QuasiConvexHamiltonian QuasiConvexHamiltonian::retabulated(double p_min,
                                                           double p_max) const {
    if (!form_) throw Error("retabulation requires a closed-form Hamiltonian");
    const double density = (n_samples() - 1) / (p_max_ - p_min_);
    const int n = std::max(3, static_cast<int>(std::lround((p_max - p_min) * density)) + 1);
    QuasiConvexHamiltonian h(form_, p_min, p_max, n);
    h.kind_ = kind_;
    h.params_ = params_;
    return h;
}

QuasiConvexHamiltonian QuasiConvexHamiltonian::vee(double offset, double slope,
                                                   double center, double p_min,
                                                   double p_max) {
    QuasiConvexHamiltonian h(
        [=](double p) { return slope * std::abs(p - center) + offset; }, p_min,
        p_max);
    h.kind_ = "vee";
    h.params_ = {offset, slope, center};
    return h;
}

QuasiConvexHamiltonian QuasiConvexHamiltonian::quadratic(double center, double scale,
                                                         double offset, double p_min,
                                                         double p_max) {
    QuasiConvexHamiltonian h(
        [=](double p) { return scale * (p - center) * (p - center) + offset; },
        p_min, p_max);
    h.kind_ = "quadratic";
    h.params_ = {center, scale, offset};
    return h;
}

QuasiConvexHamiltonian QuasiConvexHamiltonian::trapezoid(double p_lo, double p_hi,
                                                         double slope_left,
                                                         double slope_right,
                                                         double offset, double p_min,
                                                         double p_max) {
    if (!(p_lo <= p_hi) || slope_left <= 0 || slope_right <= 0)
        throw Error("trapezoid needs p_lo <= p_hi and positive wall slopes");
    QuasiConvexHamiltonian h(
        [=](double p) {
            return offset + std::max({0.0, slope_left * (p_lo - p),
                                      slope_right * (p - p_hi)});
        },
        p_min, p_max);
    h.kind_ = "trapezoid";
    h.params_ = {p_lo, p_hi, slope_left, slope_right, offset};
    return h;
}

nlohmann::json QuasiConvexHamiltonian::descriptor() const {
    nlohmann::json j;
    j["kind"] = kind_;
    j["p_min"] = p_min_;
    j["p_max"] = p_max_;
    if (kind_ == "vee") {
        j["offset"] = params_[0];
        j["slope"] = params_[1];
        j["center"] = params_[2];
    } else if (kind_ == "quadratic") {
        j["center"] = params_[0];
        j["scale"] = params_[1];
        j["offset"] = params_[2];
    } else if (kind_ == "trapezoid") {
        j["p_lo"] = params_[0];
        j["p_hi"] = params_[1];
        j["slope_left"] = params_[2];
        j["slope_right"] = params_[3];
        j["offset"] = params_[4];
    } else {
        j["kind"] = "table";
        j["values"] = std::vector<double>(values_.data(), values_.data() + values_.size());
    }
    return j;
}

QuasiConvexHamiltonian QuasiConvexHamiltonian::from_descriptor(const nlohmann::json &j) {
    const std::string kind = j.value("kind", "table");
    const double p_min = j.value("p_min", -3.0);
    const double p_max = j.value("p_max", 3.0);
    if (kind == "vee")
        return vee(j.value("offset", 0.0), j.value("slope", 1.0),
                   j.value("center", 0.0), p_min, p_max);
    if (kind == "quadratic")
        return quadratic(j.value("center", 0.0), j.value("scale", 1.0),
                         j.value("offset", 0.0), p_min, p_max);
    if (kind == "trapezoid")
        return trapezoid(j.at("p_lo").get<double>(), j.at("p_hi").get<double>(),
                         j.value("slope_left", 1.0), j.value("slope_right", 1.0),
                         j.value("offset", 0.0), p_min, p_max);
    if (kind == "table") {
        const auto v = j.at("values").get<std::vector<double>>();
        Eigen::ArrayXd a = Eigen::Map<const Eigen::ArrayXd>(v.data(), v.size());
        return QuasiConvexHamiltonian(std::move(a), p_min, p_max,
                                      j.value("qc_tol_rel", 1e-12));
    }
    throw ConfigInvalid("unknown Hamiltonian kind '" + kind + "'");
}

double junction_function(double A, const QuasiConvexHamiltonian &H_left,
                         const QuasiConvexHamiltonian &H_right, double pL,
                         double pR) {
    return std::max({A, H_left.envelope_plus(pL), H_right.envelope_minus(pR)});
}

double godunov_flux(const QuasiConvexHamiltonian &H, double p_left, double p_right) {
    return std::max(H.envelope_plus(p_left), H.envelope_minus(p_right));
}

SlopeQuadruple slope_quadruple(const QuasiConvexHamiltonian &H_left,
                               const QuasiConvexHamiltonian &H_right, double A,
                               double tol) {
    const auto right = H_right.level_set_endpoints(A, /*increasing=*/true, tol);
    const auto left = H_left.level_set_endpoints(A, /*increasing=*/false, tol);
    // On the decreasing branch the set {H_L = A} = [min, max] reads
    // p_hat_L = min (outer), p_bar_L = max (inner, nearest the minimizer).
    return SlopeQuadruple{left.second, left.first, right.first, right.second};
}

} // namespace hjlab
