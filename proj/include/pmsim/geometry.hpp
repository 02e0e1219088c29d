#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>

#include "pmsim/levels.hpp"

namespace pmsim {

// Two opposing paraboloids sharing an optical axis (z). Angles are measured
// from the axis at the focus; the captured solid angle is theta_min..theta_max,
// optionally restricted in azimuth. Lengths are in units where c = 1, so the
// one-way photon delay is tau() in the same time unit as 1/gamma.
struct MirrorGeometry {
  double focal_length = 0.75;
  double foci_separation = 0.0;
  double theta_min = 0.0;
  double theta_max = 3.141592653589793;
  bool phi_full = true;
  double phi_min = 0.0;
  double phi_max = 6.283185307179586;
  std::complex<double> epsilon = {-18.74, 3.37};  // mirror dielectric constant
  bool perfect_mirror = false;                    // unit reflectivity, no phase
  double wavelength = 1e-4;

  double tau() const { return 4.0 * focal_length + foci_separation; }
};

using DyadicMatrix = Eigen::Matrix3d;

// Empty string when the geometry is consistent with the semiclassical ray
// picture; otherwise a one-line warning.
std::string geometry_warnings(const MirrorGeometry& geom);

// (3/8pi) Integral over the captured solid angle of (1 - e_r e_r). Azimuthal
// part done in closed form, polar part by adaptive quadrature. Identity for
// full coverage; exactly diagonal with Gxx = Gyy for phi_full geometries.
DyadicMatrix gamma_rel(const MirrorGeometry& geom);

// Collimated polarisation pattern behind one mirror for a circular dipole of
// the given helicity, in cylindrical components (e_r, e_phi, e_z); r is the
// pupil radius in units of the focal length, r = 2 tan(theta/2).
Eigen::Vector3cd exit_pupil_field(double r, double phi, int helicity);

// Amplitude reflection coefficients off a half-space of dielectric constant
// epsilon. Sign convention: at normal incidence r_TM = -r_TE = (sqrt(eps)-1)/(sqrt(eps)+1).
std::pair<std::complex<double>, std::complex<double>> fresnel_coeffs(double theta_incidence,
                                                                     std::complex<double> epsilon);

// Normalised pupil overlap of the reflectivity-modified positive-helicity
// field with the conjugate negative-helicity field. The modifier multiplies
// both TE and TM amplitudes pointwise and exists as a test hook; the default
// (r-only Fresnel factors) must leave the overlap at zero.
std::complex<double> helicity_cross_overlap(
    const MirrorGeometry& geom,
    const std::function<std::complex<double>(double r, double phi)>& modifier = nullptr);

// Scalar aperture-plus-reflectivity success factor for the circular-dipole
// channel. Model: amplitude capture integral (3/8) Int [rho_TM cos^2(theta) +
// rho_TE] sin(theta) dtheta with rho_X the two-bounce Fresnel amplitude at
// incidence theta/2 on each mirror; the factor is its squared magnitude, i.e.
// a probability. Equals 1 for a perfect mirror covering the full sphere.
double efficiency_eta(const MirrorGeometry& geom, const LevelScheme& scheme);

// The complex capture integral above, exposed for tests.
std::complex<double> fresnel_weighted_capture(const MirrorGeometry& geom);

// Squared overlap of the collimated circular-dipole pattern of an ideal
// (unbounded) paraboloid with a circularly polarised Gaussian of the given
// waist (units of f), both normalised over the infinite pupil plane.
double fiber_coupling_efficiency(double waist);

}  // namespace pmsim
