#include "pmsim/geometry.hpp"

#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>

namespace pmsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

double adaptive(const std::function<double(double)>& f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 12, 1e-12);
}

std::complex<double> adaptive_complex(const std::function<std::complex<double>(double)>& f,
                                      double a, double b) {
  double re = adaptive([&](double x) { return f(x).real(); }, a, b);
  double im = adaptive([&](double x) { return f(x).imag(); }, a, b);
  return {re, im};
}

void validate_aperture(const MirrorGeometry& geom) {
  if (!(std::isfinite(geom.theta_min) && std::isfinite(geom.theta_max)))
    throw std::invalid_argument("gamma_rel: aperture angles must be finite");
  if (geom.theta_min < 0.0 || geom.theta_max > kPi)
    throw std::invalid_argument("gamma_rel: aperture angles must lie in [0, pi]");
  if (!(geom.theta_min < geom.theta_max))
    throw std::invalid_argument("gamma_rel: empty solid angle");
  if (!geom.phi_full) {
    double width = geom.phi_max - geom.phi_min;
    if (!(width > 0.0) || width > 2.0 * kPi + 1e-12)
      throw std::invalid_argument("gamma_rel: azimuthal window must have width in (0, 2pi]");
  }
}

}  // namespace

std::string geometry_warnings(const MirrorGeometry& geom) {
  if (!(geom.wavelength > 0.0) || !(geom.focal_length > 0.0))
    return "warning: wavelength and focal length must be positive for the ray picture";
  if (geom.wavelength > 0.01 * geom.focal_length)
    return "warning: wavelength is not small against the focal length; ray-optics results are suspect";
  return "";
}

DyadicMatrix gamma_rel(const MirrorGeometry& geom) {
  validate_aperture(geom);

  double p1 = geom.phi_full ? 0.0 : geom.phi_min;
  double p2 = geom.phi_full ? 2.0 * kPi : geom.phi_max;
  double dphi = p2 - p1;
  // Azimuthal moments over the window, all in closed form.
  double i_cc = 0.5 * (dphi + 0.5 * (std::sin(2 * p2) - std::sin(2 * p1)));
  double i_ss = dphi - i_cc;
  double i_sc = 0.5 * (std::sin(p2) * std::sin(p2) - std::sin(p1) * std::sin(p1));
  double i_c = std::sin(p2) - std::sin(p1);
  double i_s = std::cos(p1) - std::cos(p2);

  auto entry = [&](int which) {
    return adaptive(
        [&](double th) {
          double s = std::sin(th), c = std::cos(th);
          switch (which) {
            case 0: return s * (dphi - s * s * i_cc);  // xx
            case 1: return s * (dphi - s * s * i_ss);  // yy
            case 2: return s * (dphi - c * c * dphi);  // zz
            case 3: return s * (-s * s * i_sc);        // xy
            case 4: return s * (-s * c * i_c);         // xz
            default: return s * (-s * c * i_s);        // yz
          }
        },
        geom.theta_min, geom.theta_max);
  };

  DyadicMatrix g = DyadicMatrix::Zero();
  double scale = 3.0 / (8.0 * kPi);
  g(0, 0) = scale * entry(0);
  g(1, 1) = scale * entry(1);
  g(2, 2) = scale * entry(2);
  if (!geom.phi_full) {
    // For full azimuth these moments vanish identically; keep exact zeros there.
    g(0, 1) = g(1, 0) = scale * entry(3);
    g(0, 2) = g(2, 0) = scale * entry(4);
    g(1, 2) = g(2, 1) = scale * entry(5);
  }
  return g;
}

Eigen::Vector3cd exit_pupil_field(double r, double phi, int helicity) {
  if (helicity != 1 && helicity != -1)
    throw std::invalid_argument("exit_pupil_field: helicity must be +1 or -1");
  std::complex<double> ih(0.0, static_cast<double>(helicity));
  std::complex<double> phase = std::exp(ih * phi);
  Eigen::Vector3cd v;
  v[0] = (r * r - 4.0) * phase;
  v[1] = -ih * (r * r + 4.0) * phase;
  v[2] = 0.0;
  return v;
}

std::pair<std::complex<double>, std::complex<double>> fresnel_coeffs(double theta_incidence,
                                                                     std::complex<double> epsilon) {
  if (!(theta_incidence >= 0.0) || theta_incidence >= kPi / 2.0)
    throw std::invalid_argument("fresnel_coeffs: incidence angle must lie in [0, pi/2)");
  if (epsilon.imag() < 0.0)
    throw std::invalid_argument("fresnel_coeffs: passive medium requires Im(epsilon) >= 0");
  double c = std::cos(theta_incidence);
  double s = std::sin(theta_incidence);
  std::complex<double> k = std::sqrt(epsilon - s * s);
  if (k.imag() < 0.0) k = -k;  // decaying transmitted wave
  std::complex<double> r_te = (c - k) / (c + k);
  std::complex<double> r_tm = (epsilon * c - k) / (epsilon * c + k);
  return {r_te, r_tm};
}

namespace {

// Two-bounce amplitude factors at pupil radius r; incidence on each paraboloid
// surface is half the emission polar angle, and r = 2 tan(theta/2) makes that
// simply atan(r/2).
void bounce_factors(const MirrorGeometry& geom, double r, std::complex<double>& rho_tm,
                    std::complex<double>& rho_te) {
  if (geom.perfect_mirror) {
    rho_tm = 1.0;
    rho_te = 1.0;
    return;
  }
  auto [r_te, r_tm] = fresnel_coeffs(std::atan(r / 2.0), geom.epsilon);
  rho_tm = r_tm * r_tm;
  rho_te = r_te * r_te;
}

}  // namespace

std::complex<double> helicity_cross_overlap(
    const MirrorGeometry& geom,
    const std::function<std::complex<double>(double r, double phi)>& modifier) {
  validate_aperture(geom);
  if (geom.theta_max >= kPi - 1e-9)
    throw std::invalid_argument("helicity_cross_overlap: pupil map diverges at backward emission");

  double r1 = 2.0 * std::tan(geom.theta_min / 2.0);
  double r2 = 2.0 * std::tan(geom.theta_max / 2.0);

  auto mod = [&](double r, double phi) -> std::complex<double> {
    return modifier ? modifier(r, phi) : std::complex<double>(1.0, 0.0);
  };

  // Full-period azimuth on a fixed grid: the trapezoid rule is spectrally
  // accurate for smooth periodic integrands, and the Fresnel factors are
  // phi-independent so they stay outside the loop.
  constexpr int kAzimuthPoints = 64;
  constexpr double kAzimuthWeight = 2.0 * kPi / kAzimuthPoints;
  std::array<std::complex<double>, kAzimuthPoints> phase;  // e^{2 i phi_i}
  for (int i = 0; i < kAzimuthPoints; ++i)
    phase[i] = std::exp(std::complex<double>(0.0, 2.0 * kAzimuthWeight * i));

  // sigma+~ . conj(sigma-) = e^{2 i phi} [rho_TM (r^2-4)^2 - rho_TE (r^2+4)^2].
  auto cross = adaptive_complex(
      [&](double r) -> std::complex<double> {
        std::complex<double> rho_tm, rho_te;
        bounce_factors(geom, r, rho_tm, rho_te);
        double a = (r * r - 4.0) * (r * r - 4.0);
        double b = (r * r + 4.0) * (r * r + 4.0);
        std::complex<double> inner = 0.0;
        for (int i = 0; i < kAzimuthPoints; ++i) inner += mod(r, kAzimuthWeight * i) * phase[i];
        return r * (rho_tm * a - rho_te * b) * inner * kAzimuthWeight;
      },
      r1, r2);

  double norm_mod = adaptive(
      [&](double r) {
        std::complex<double> rho_tm, rho_te;
        bounce_factors(geom, r, rho_tm, rho_te);
        double a = (r * r - 4.0) * (r * r - 4.0);
        double b = (r * r + 4.0) * (r * r + 4.0);
        double m2 = 0.0;
        for (int i = 0; i < kAzimuthPoints; ++i) m2 += std::norm(mod(r, kAzimuthWeight * i));
        return r * (std::norm(rho_tm) * a + std::norm(rho_te) * b) * m2 * kAzimuthWeight;
      },
      r1, r2);

  double norm_plain = adaptive(
      [&](double r) {
        double a = (r * r - 4.0) * (r * r - 4.0);
        double b = (r * r + 4.0) * (r * r + 4.0);
        return 2.0 * kPi * r * (a + b);
      },
      r1, r2);

  return cross / std::sqrt(norm_mod * norm_plain);
}

std::complex<double> fresnel_weighted_capture(const MirrorGeometry& geom) {
  validate_aperture(geom);
  double dphi = geom.phi_full ? 2.0 * kPi : geom.phi_max - geom.phi_min;
  double scale = 3.0 / (16.0 * kPi) * dphi;
  return scale * adaptive_complex(
                     [&](double th) -> std::complex<double> {
                       std::complex<double> rho_tm, rho_te;
                       double r = 2.0 * std::tan(th / 2.0);
                       bounce_factors(geom, r, rho_tm, rho_te);
                       double c = std::cos(th);
                       return std::sin(th) * (rho_tm * c * c + rho_te);
                     },
                     geom.theta_min, geom.theta_max);
}

double efficiency_eta(const MirrorGeometry& geom, const LevelScheme& scheme) {
  if (!(scheme.zeeman.gamma > 0.0))
    throw std::invalid_argument("efficiency_eta: level scheme has no positive rate unit");
  // The factor is defined for the circular channels that carry the heralding
  // photon; confirm the scheme exposes them as such.
  TransitionDipole up = dipole_element(IonLevel{Manifold::P_half, 1, 0}, scheme.qubit.first);
  if (up.polarization != Polarization::sigma_plus || up.rate_weight <= 0.0)
    throw std::invalid_argument("efficiency_eta: scheme lacks the circular heralding channel");
  std::complex<double> s = fresnel_weighted_capture(geom);
  return std::norm(s);
}

namespace {

// e^x E1(x) for x > 0 without overflow; series switch keeps 1e-10 accuracy.
double exp_e1(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("exp_e1: needs x > 0");
  if (x <= 40.0) return -std::exp(x) * std::expint(-x);
  double sum = 0.0;
  double term = 1.0 / x;
  for (int n = 0; n <= 10; ++n) {
    sum += term;
    term *= -(n + 1.0) / x;
  }
  return sum;
}

}  // namespace

double fiber_coupling_efficiency(double waist) {
  if (!(waist > 0.0) || !std::isfinite(waist))
    throw std::invalid_argument("fiber_coupling_efficiency: waist must be positive and finite");
  double s = 1.0 / (waist * waist);
  double inner = 0.25 - s * exp_e1(4.0 * s);
  double eff = 192.0 * s * inner * inner;
  if (eff < 0.0) eff = 0.0;
  if (eff > 1.0) eff = 1.0;
  return eff;
}

}  // namespace pmsim
