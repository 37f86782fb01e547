#include "purtel/factors.hpp"

#include <cmath>
#include <string>

#include "purtel/errors.hpp"

namespace purtel {

namespace {

void check_pair(const ConditionalEvolutions& w, const DensityMatrix& r, std::size_t m, std::size_t j,
                std::size_t j_prime) {
    if (r.dim() != w.e()) throw ShapeError("factor: environment state dimension does not match the model");
    if (m >= w.d() || j >= w.d() || j_prime >= w.d()) throw IndexError("factor: index out of range");
}

// Tr[X R] without forming X R.
Complex trace_with(const ComplexMatrix& x, const ComplexMatrix& r) { return (x.transpose().cwiseProduct(r)).sum(); }

}  // namespace

Complex first_step_factor(const ConditionalEvolutions& w, const DensityMatrix& r, std::size_t m, std::size_t j,
                          std::size_t j_prime) {
    check_pair(w, r, m, j, j_prime);
    const std::size_t d = w.d();
    const std::size_t a = (j + m) % d;
    const std::size_t b = (j_prime + m) % d;
    return trace_with(w.w(b, b).adjoint() * w.w(a, a), r.matrix());
}

Complex second_step_factor(const ConditionalEvolutions& w, const DensityMatrix& r, std::size_t m,
                           std::size_t m_prime, std::size_t j, std::size_t j_prime) {
    return second_step_factor(w, w, r, m, m_prime, j, j_prime);
}

Complex second_step_factor(const ConditionalEvolutions& w1, const ConditionalEvolutions& w2, const DensityMatrix& r,
                           std::size_t m, std::size_t m_prime, std::size_t j, std::size_t j_prime) {
    if (w1.d() != w2.d() || w1.e() != w2.e()) throw ShapeError("second_step_factor: step evolutions differ in shape");
    check_pair(w1, r, m, j, j_prime);
    const std::size_t d = w1.d();
    if (m_prime >= d) throw IndexError("second_step_factor: index out of range");
    const std::size_t big_m = (d - (m + m_prime) % d) % d;
    const std::size_t jm = (j + m) % d;
    const std::size_t jpm = (j_prime + m) % d;
    const ComplexMatrix left = w2.w((j + big_m) % d, (j + big_m + m) % d) * w1.w(jm, jm);
    const ComplexMatrix right = w1.w(jpm, jpm).adjoint() * w2.w((j_prime + big_m) % d, (j_prime + big_m + m) % d).adjoint();
    // Tr[L R L'] = Tr[L' L R]
    return trace_with(right * left, r.matrix());
}

FactorSet qubit_factors(const ConditionalEvolutions& w, const DensityMatrix& r) {
    if (w.d() != 2) throw ValidationError("qubit_factors: d must be 2");
    FactorSet f;
    f.c = first_step_factor(w, r, 0, 0, 1);
    f.c_phi = second_step_factor(w, r, 0, 0, 0, 1);
    f.c_psi = second_step_factor(w, r, 0, 1, 0, 1);
    f.cp_phi = second_step_factor(w, r, 1, 0, 0, 1);
    f.cp_psi = second_step_factor(w, r, 1, 1, 0, 1);
    f.c_av = (f.c_phi + f.c_psi + f.cp_phi + f.cp_psi) / 4.0;
    return f;
}

FactorSet psi_resource_factors(const ConditionalEvolutions& w, const DensityMatrix& r) {
    if (w.d() != 2) throw ValidationError("psi_resource_factors: the Ψ resource is defined for d = 2 only");
    if (r.dim() != w.e()) throw ShapeError("psi_resource_factors: environment state dimension does not match the model");
    const ComplexMatrix& w00 = w.w(0, 0);
    const ComplexMatrix& w01 = w.w(0, 1);
    const ComplexMatrix& w10 = w.w(1, 0);
    const ComplexMatrix& w11 = w.w(1, 1);
    const ComplexMatrix& rho = r.matrix();
    FactorSet f;
    f.c = trace_with(w10.adjoint() * w01, rho);
    f.c_phi = trace_with(w01.adjoint() * w10.adjoint() * w01 * w10, rho);
    f.c_psi = trace_with(w01.adjoint() * w01.adjoint() * w10 * w10, rho);
    f.cp_phi = trace_with(w10.adjoint() * w00.adjoint() * w11 * w01, rho);
    f.cp_psi = trace_with(w10.adjoint() * w11.adjoint() * w00 * w01, rho);
    f.c_av = (f.c_phi + f.c_psi + f.cp_phi + f.cp_psi) / 4.0;
    return f;
}

double fidelity_f1(double alpha_beta_sq, Complex c) { return 1.0 - 2.0 * alpha_beta_sq * (1.0 - c.real()); }

double fidelity_f2(double alpha_beta_sq, const FactorSet& factors) { return fidelity_f1(alpha_beta_sq, factors.c_av); }

double fidelity_from_coherences(const PureState& psi, const ComplexMatrix& coherences) {
    const std::size_t d = psi.dim();
    if (static_cast<std::size_t>(coherences.rows()) != d || static_cast<std::size_t>(coherences.cols()) != d)
        throw ShapeError("fidelity_from_coherences: dimension mismatch");
    double f = 0.0;
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) {
            const double weight = std::norm(psi[j]) * std::norm(psi[k]);
            const Complex c = j == k ? Complex{1.0, 0.0} : coherences(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
            f += weight * c.real();
        }
    return f;
}

std::string_view to_string(PurificationKind kind) {
    switch (kind) {
        case PurificationKind::full_restore: return "FULL_RESTORE";
        case PurificationKind::one_step: return "ONE_STEP";
        case PurificationKind::unprotected: return "UNPROTECTED";
    }
    return "UNPROTECTED";
}

std::size_t PurificationPattern::count(PurificationKind kind) const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.kind == kind ? 1 : 0;
    return n;
}

PurificationPattern classify_purification(std::size_t d) {
    if (d < 2) throw ValidationError("classify_purification: d must be >= 2");
    PurificationPattern pattern{d, {}};
    for (std::size_t mp = 0; mp < d; ++mp) {
        const std::size_t big_m = (d - mp) % d;
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = j + 1; k < d; ++k) {
                PurificationKind kind = PurificationKind::unprotected;
                if (big_m != 0 && ((j + big_m) % d == k || (k + big_m) % d == j))
                    kind = (2 * big_m) % d == 0 ? PurificationKind::full_restore : PurificationKind::one_step;
                pattern.entries.push_back(PatternEntry{mp, j, k, kind});
            }
    }
    return pattern;
}

Complex one_step_reduced_factor(const ConditionalEvolutions& w, const DensityMatrix& r, std::size_t j,
                                std::size_t big_m) {
    check_pair(w, r, 0, j, big_m);
    const std::size_t d = w.d();
    const std::size_t k = (j + 2 * big_m) % d;
    return trace_with(w.w(k, k).adjoint() * w.w(j, j), r.matrix());
}

std::vector<MismatchReport> mismatch_scan(const DephasingModel& model, const DensityMatrix& r, double tau,
                                          const std::vector<double>& deltas) {
    if (model.d() != 2) throw ValidationError("mismatch_scan: d must be 2");
    if (r.dim() != model.e()) throw ShapeError("mismatch_scan: environment state dimension does not match the model");
    const double defect = commutation_defect(conditional_evolutions(model, tau)).diagonal;
    if (defect > 1e-10)
        throw ValidationError("mismatch_scan: model is not commuting (defect " + std::to_string(defect) + ")");

    const ComplexMatrix x = model.v(1, 1) - model.v(0, 0);
    const ComplexMatrix& rho = r.matrix();
    const double mean = trace_with(x, rho).real();
    const double variance = trace_with(x * x, rho).real() - mean * mean;
    const double trace = rho.trace().real();

    std::vector<MismatchReport> out;
    out.reserve(deltas.size());
    for (double delta : deltas) {
        if (!std::isfinite(delta)) throw ValidationError("mismatch_scan: Δτ must be finite");
        const ComplexMatrix u = hermitian_exp(model.v(1, 1), delta) * hermitian_exp(model.v(0, 0), -delta);
        // Divide out the trace of R so that rounding in its normalization cannot leak into 1 - |C|².
        const double mod2 = std::norm(trace_with(u, rho)) / (trace * trace);
        out.push_back(MismatchReport{delta, mod2, 1.0 - delta * delta * variance, variance});
    }
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ShapeError("loglog_slope: size mismatch");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) throw ValidationError("loglog_slope: need at least two positive points");
    const double nn = static_cast<double>(n);
    const double denom = nn * sxx - sx * sx;
    if (denom == 0.0) throw ValidationError("loglog_slope: degenerate abscissae");
    return (nn * sxy - sx * sy) / denom;
}

}  // namespace purtel
