#include "purtel/spinboson.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "purtel/errors.hpp"

namespace purtel {

namespace {

constexpr std::size_t kPanelOrder = 20;

double coth(double x) {
    if (x > 30.0) return 1.0;
    if (x < 1e-4) return 1.0 / x + x / 3.0;
    return 1.0 / std::tanh(x);
}

// (1 - cos x)/ω² written without cancellation.
double one_minus_cos_over_w2(double omega, double tau) {
    const double s = std::sin(0.5 * omega * tau);
    return 2.0 * s * s / (omega * omega);
}

template <class F>
double integrate(F&& f, const SpinBosonParams& p) {
    const std::size_t panels = p.quad_points / kPanelOrder;
    const double hi = p.omega_max * p.lambda;
    const double width = hi / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t k = 0; k < panels; ++k) {
        const double lo = width * static_cast<double>(k);
        total += boost::math::quadrature::gauss<double, kPanelOrder>::integrate(f, lo, lo + width);
    }
    return total;
}

void check_tau(double tau) {
    if (!std::isfinite(tau) || tau < 0.0) throw ValidationError("spin-boson: tau must be finite and non-negative");
}

Complex project(const EpsilonVector& e, Complex g1, Complex g2) { return e.e1 * g1 + e.e2 * g2; }

}  // namespace

void SpinBosonParams::validate() const {
    if (!(s >= 1.0) || !std::isfinite(s)) throw ValidationError("spin-boson: s must be >= 1");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("spin-boson: lambda must be positive");
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        throw ValidationError("spin-boson: temperature must be positive");
    if (!std::isfinite(t_bar)) throw ValidationError("spin-boson: t_bar must be finite");
    if (!(omega_max > 0.0) || !std::isfinite(omega_max)) throw ValidationError("spin-boson: omega_max must be positive");
    if (quad_points < kPanelOrder || quad_points % kPanelOrder != 0)
        throw ValidationError("spin-boson: quad_points must be a positive multiple of 20");
}

double spectral_density(double omega, const SpinBosonParams& p) {
    const double x = omega / p.lambda;
    return omega * std::pow(x, p.s - 1.0) * std::exp(-x);
}

double ln_c(double tau, const SpinBosonParams& p) {
    p.validate();
    check_tau(tau);
    const double beta = p.beta();
    return -2.0 * integrate(
                      [&](double w) {
                          return spectral_density(w, p) * one_minus_cos_over_w2(w, tau) *
                                 (1.0 + std::cos(w * p.t_bar)) * coth(0.5 * beta * w);
                      },
                      p);
}

double ln_c_prime(double tau, const SpinBosonParams& p) {
    p.validate();
    check_tau(tau);
    const double beta = p.beta();
    return -4.0 * integrate(
                      [&](double w) {
                          return spectral_density(w, p) * one_minus_cos_over_w2(w, tau) * coth(0.5 * beta * w);
                      },
                      p);
}

double ln_c_phi(double tau, const SpinBosonParams& p) { return 4.0 * ln_c(tau, p); }

void EpsilonVector::validate() const {
    for (double v : {e1, e2})
        if (v != -0.5 && v != 0.0 && v != 0.5) throw ValidationError("EpsilonVector: components must be -1/2, 0 or 1/2");
}

Complex four_w_log_mode(const EpsilonVector& a, const EpsilonVector& b, const EpsilonVector& c,
                        const EpsilonVector& d, double tau, const BosonMode& mode, double beta) {
    for (const auto* e : {&a, &b, &c, &d}) e->validate();
    if (!(mode.omega > 0.0)) throw ValidationError("four_w_log_mode: omega must be positive");
    check_tau(tau);
    const double w = mode.omega;
    const Complex g1 = mode.g * std::exp(Complex{0.0, -mode.theta1});
    const Complex g2 = mode.g * std::exp(Complex{0.0, -mode.theta2});
    const Complex la = project(a, g1, g2), lb = project(b, g1, g2), lc = project(c, g1, g2), ld = project(d, g1, g2);

    const double alpha2 = 2.0 * one_minus_cos_over_w2(w, tau);  // |α|², α = (1 - e^{iωτ})/ω
    const double xi = (w * tau - std::sin(w * tau)) / (w * w);
    const double phi0 = xi * (std::norm(lc) + std::norm(ld) - std::norm(la) - std::norm(lb));
    const double phi = alpha2 * std::imag(la * std::conj(lb));
    const double phi_prime = alpha2 * std::imag(lc * std::conj(ld));
    const Complex s_ab = la + lb;
    const Complex s_cd = lc + ld;
    // i φ+ = (|α|²/2) (S_ab* S_cd - S_ab S_cd*)
    const Complex i_phi_plus = 0.5 * alpha2 * (std::conj(s_ab) * s_cd - s_ab * std::conj(s_cd));
    const double modulus = -0.5 * alpha2 * std::norm(s_cd - s_ab) * coth(0.5 * beta * w);
    return Complex{modulus, phi0 + phi + phi_prime} + i_phi_plus;
}

Complex four_w_trace_modes(const EpsilonVector& a, const EpsilonVector& b, const EpsilonVector& c,
                           const EpsilonVector& d, double tau, const std::vector<BosonMode>& modes, double beta) {
    Complex total{0.0, 0.0};
    for (const auto& mode : modes) total += four_w_log_mode(a, b, c, d, tau, mode, beta);
    return std::exp(total);
}

Complex four_w_trace(const EpsilonVector& a, const EpsilonVector& b, const EpsilonVector& c, const EpsilonVector& d,
                     double tau, const SpinBosonParams& p) {
    p.validate();
    const double beta = p.beta();
    auto density = [&](double w, bool imag) {
        const BosonMode mode{w, Complex{1.0, 0.0}, 0.0, w * p.t_bar};
        const Complex l = four_w_log_mode(a, b, c, d, tau, mode, beta);
        return spectral_density(w, p) * (imag ? l.imag() : l.real());
    };
    const double re = integrate([&](double w) { return density(w, false); }, p);
    const double im = integrate([&](double w) { return density(w, true); }, p);
    return std::exp(Complex{re, im});
}

double ln_c_modes(double tau, const std::vector<BosonMode>& modes, double beta) {
    const FourW f = four_w_c();
    double total = 0.0;
    for (const auto& mode : modes) total += four_w_log_mode(f.a, f.b, f.c, f.d, tau, mode, beta).real();
    return total;
}

FourW four_w_c() {
    return {EpsilonVector::level(1, 1), EpsilonVector::identity(), EpsilonVector::identity(), EpsilonVector::level(0, 0)};
}
FourW four_w_c_phi() {
    return {EpsilonVector::level(1, 1), EpsilonVector::level(1, 1), EpsilonVector::level(0, 0), EpsilonVector::level(0, 0)};
}
FourW four_w_c_psi() {
    return {EpsilonVector::level(1, 1), EpsilonVector::level(0, 0), EpsilonVector::level(1, 1), EpsilonVector::level(0, 0)};
}
FourW four_w_cp_phi() {
    return {EpsilonVector::level(0, 0), EpsilonVector::level(0, 1), EpsilonVector::level(1, 0), EpsilonVector::level(1, 1)};
}
FourW four_w_cp_psi() {
    return {EpsilonVector::level(0, 0), EpsilonVector::level(1, 0), EpsilonVector::level(0, 1), EpsilonVector::level(1, 1)};
}

ContinuumFactors continuum_factors(double tau, const SpinBosonParams& p) {
    auto eval = [&](const FourW& f) { return four_w_trace(f.a, f.b, f.c, f.d, tau, p); };
    return {eval(four_w_c()), eval(four_w_c_phi()), eval(four_w_c_psi()), eval(four_w_cp_phi()), eval(four_w_cp_psi())};
}

std::vector<FidelityRow> fidelity_curves(const SpinBosonParams& p, double alpha_beta_sq,
                                         const std::vector<double>& tau_grid) {
    p.validate();
    if (!(alpha_beta_sq >= 0.0 && alpha_beta_sq <= 0.25))
        throw ValidationError("fidelity_curves: |αβ|² must lie in [0, 1/4]");
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        check_tau(tau_grid[i]);
        if (i > 0 && tau_grid[i] < tau_grid[i - 1]) throw ValidationError("fidelity_curves: grid must be sorted");
    }
    auto f = [&](double factor) { return 1.0 - 2.0 * alpha_beta_sq * (1.0 - factor); };
    std::vector<FidelityRow> rows;
    rows.reserve(tau_grid.size());
    for (double tau : tau_grid) {
        const double lc = ln_c(tau, p);
        FidelityRow row;
        row.tau = tau;
        row.f1 = f(std::exp(lc));
        row.f_cphi = f(std::exp(4.0 * lc));
        row.f_cprime = f(std::exp(ln_c_prime(tau, p)));
        row.f_const = 1.0;
        row.f2 = (row.f_cphi + 2.0 * row.f_cprime + row.f_const) / 4.0;
        rows.push_back(row);
    }
    return rows;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> out(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

}  // namespace purtel
