#include "pmsim/levels.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pmsim {

namespace {

// n! for the small arguments appearing in J<=1, F<=1, I=1/2 couplings.
double factorial(int n) {
  static const std::array<double, 21> table = [] {
    std::array<double, 21> t{};
    t[0] = 1.0;
    for (int i = 1; i <= 20; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  if (n < 0) throw std::invalid_argument("factorial of negative integer");
  if (n > 20) throw std::invalid_argument("factorial table exhausted");
  return table[static_cast<std::size_t>(n)];
}

bool triangle_ok(int two_a, int two_b, int two_c) {
  if ((two_a + two_b + two_c) % 2 != 0) return false;
  return two_c >= std::abs(two_a - two_b) && two_c <= two_a + two_b;
}

// sqrt of the triangle coefficient; arguments are doubled spins.
double triangle_coeff(int two_a, int two_b, int two_c) {
  return factorial((two_a + two_b - two_c) / 2) * factorial((two_a - two_b + two_c) / 2) *
         factorial((-two_a + two_b + two_c) / 2) / factorial((two_a + two_b + two_c) / 2 + 1);
}

int parity(int exponent) { return (exponent % 2 == 0) ? 1 : -1; }

}  // namespace

int level_index(const IonLevel& lv) {
  if (lv.F != 0 && lv.F != 1) throw std::invalid_argument("IonLevel F must be 0 or 1");
  if (std::abs(lv.m) > lv.F) throw std::invalid_argument("IonLevel requires |m| <= F");
  int base = (lv.manifold == Manifold::S_half) ? 0 : 4;
  if (lv.F == 0) return base;
  return base + 2 + lv.m;
}

IonLevel level_from_index(int idx) {
  if (idx < 0 || idx > 7) throw std::invalid_argument("level index out of range");
  IonLevel lv;
  lv.manifold = (idx < 4) ? Manifold::S_half : Manifold::P_half;
  int r = idx % 4;
  if (r == 0) {
    lv.F = 0;
    lv.m = 0;
  } else {
    lv.F = 1;
    lv.m = r - 2;
  }
  return lv;
}

std::string level_name(const IonLevel& lv) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s F=%d m=%+d", lv.manifold == Manifold::S_half ? "S" : "P",
                lv.F, lv.m);
  return buf;
}

double wigner_3j(int two_j1, int two_j2, int two_j3, int two_m1, int two_m2, int two_m3) {
  if (two_m1 + two_m2 + two_m3 != 0) return 0.0;
  if (!triangle_ok(two_j1, two_j2, two_j3)) return 0.0;
  if (std::abs(two_m1) > two_j1 || std::abs(two_m2) > two_j2 || std::abs(two_m3) > two_j3)
    return 0.0;
  if ((two_j1 + two_m1) % 2 != 0 || (two_j2 + two_m2) % 2 != 0 || (two_j3 + two_m3) % 2 != 0)
    return 0.0;

  double prefactor =
      std::sqrt(triangle_coeff(two_j1, two_j2, two_j3) *
                factorial((two_j1 + two_m1) / 2) * factorial((two_j1 - two_m1) / 2) *
                factorial((two_j2 + two_m2) / 2) * factorial((two_j2 - two_m2) / 2) *
                factorial((two_j3 + two_m3) / 2) * factorial((two_j3 - two_m3) / 2));

  int a1 = (two_j1 + two_j2 - two_j3) / 2;
  int a2 = (two_j1 - two_m1) / 2;
  int a3 = (two_j2 + two_m2) / 2;
  int b1 = (two_j3 - two_j2 + two_m1) / 2;
  int b2 = (two_j3 - two_j1 - two_m2) / 2;
  int k_min = std::max({0, -b1, -b2});
  int k_max = std::min({a1, a2, a3});

  double sum = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    double term = factorial(k) * factorial(a1 - k) * factorial(a2 - k) * factorial(a3 - k) *
                  factorial(b1 + k) * factorial(b2 + k);
    sum += parity(k) / term;
  }
  return parity((two_j1 - two_j2 - two_m3) / 2) * prefactor * sum;
}

double wigner_6j(int two_j1, int two_j2, int two_j3, int two_j4, int two_j5, int two_j6) {
  if (!triangle_ok(two_j1, two_j2, two_j3) || !triangle_ok(two_j1, two_j5, two_j6) ||
      !triangle_ok(two_j4, two_j2, two_j6) || !triangle_ok(two_j4, two_j5, two_j3))
    return 0.0;

  double prefactor = std::sqrt(
      triangle_coeff(two_j1, two_j2, two_j3) * triangle_coeff(two_j1, two_j5, two_j6) *
      triangle_coeff(two_j4, two_j2, two_j6) * triangle_coeff(two_j4, two_j5, two_j3));

  int s1 = (two_j1 + two_j2 + two_j3) / 2;
  int s2 = (two_j1 + two_j5 + two_j6) / 2;
  int s3 = (two_j4 + two_j2 + two_j6) / 2;
  int s4 = (two_j4 + two_j5 + two_j3) / 2;
  int t1 = (two_j1 + two_j2 + two_j4 + two_j5) / 2;
  int t2 = (two_j2 + two_j3 + two_j5 + two_j6) / 2;
  int t3 = (two_j3 + two_j1 + two_j6 + two_j4) / 2;

  int z_min = std::max({s1, s2, s3, s4});
  int z_max = std::min({t1, t2, t3});

  double sum = 0.0;
  for (int z = z_min; z <= z_max; ++z) {
    double term = factorial(z - s1) * factorial(z - s2) * factorial(z - s3) * factorial(z - s4) *
                  factorial(t1 - z) * factorial(t2 - z) * factorial(t3 - z);
    sum += parity(z) * factorial(z + 1) / term;
  }
  return prefactor * sum;
}

double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2, int two_J, int two_M) {
  if (two_m1 + two_m2 != two_M) return 0.0;
  return parity((two_j1 - two_j2 + two_M) / 2) * std::sqrt(two_J + 1.0) *
         wigner_3j(two_j1, two_j2, two_J, two_m1, two_m2, -two_M);
}

namespace {

// Unnormalised channel amplitude from the Wigner-Eckart theorem with the
// F-to-J uncoupling 6j factor; J = I = 1/2, rank-1 operator on the electron.
double raw_amplitude(const IonLevel& excited, const IonLevel& ground) {
  int q = ground.m - excited.m;
  if (std::abs(q) > 1) return 0.0;
  double threej = wigner_3j(2 * ground.F, 2, 2 * excited.F, -2 * ground.m, 2 * q, 2 * excited.m);
  double sixj = wigner_6j(1, 2 * ground.F, 1, 2 * excited.F, 1, 2);
  double phase = parity(ground.F - ground.m) * parity(excited.F);
  return phase * std::sqrt((2.0 * ground.F + 1.0) * (2.0 * excited.F + 1.0)) * sixj * threej;
}

}  // namespace

TransitionDipole dipole_element(const IonLevel& excited, const IonLevel& ground) {
  if (excited.manifold != Manifold::P_half)
    throw std::invalid_argument("dipole_element: excited level must be in the P manifold");
  if (ground.manifold != Manifold::S_half)
    throw std::invalid_argument("dipole_element: ground level must be in the S manifold");
  level_index(excited);
  level_index(ground);

  TransitionDipole d;
  d.excited = excited;
  d.ground = ground;

  double norm2 = 0.0;
  for (int g = 0; g < 4; ++g) {
    double r = raw_amplitude(excited, level_from_index(g));
    norm2 += r * r;
  }
  double raw = raw_amplitude(excited, ground);
  double c = (norm2 > 0.0) ? raw / std::sqrt(norm2) : 0.0;

  int q = ground.m - excited.m;
  if (std::abs(q) <= 1 && c != 0.0) {
    d.spherical_components[q + 1] = c;
    d.rate_weight = c * c;
    d.polarization = (q == -1)  ? Polarization::sigma_plus
                     : (q == 1) ? Polarization::sigma_minus
                                : Polarization::pi;
  }
  return d;
}

LevelScheme build_level_scheme(const ZeemanConfig& zeeman) {
  if (!(zeeman.gamma > 0.0)) throw std::invalid_argument("build_level_scheme: gamma must be > 0");
  if (!std::isfinite(zeeman.delta())) throw std::invalid_argument("build_level_scheme: delta not finite");

  LevelScheme scheme;
  scheme.zeeman = zeeman;
  for (int i = 0; i < 8; ++i) scheme.levels.push_back(level_from_index(i));

  for (const IonLevel& lv : scheme.levels) {
    double e = 0.0;
    if (lv.manifold == Manifold::S_half)
      e = (lv.F == 1) ? zeeman.delta2 * lv.m : -zeeman.hyperfine_split_S;
    else
      e = (lv.F == 1) ? zeeman.delta1 * lv.m : -zeeman.hyperfine_split_P;
    scheme.energies[static_cast<std::size_t>(level_index(lv))] = e;
  }

  for (int e = 4; e < 8; ++e) {
    for (int g = 0; g < 4; ++g) {
      TransitionDipole d = dipole_element(level_from_index(e), level_from_index(g));
      if (d.rate_weight > 0.0) scheme.dipoles.push_back(d);
    }
  }

  scheme.qubit = {IonLevel{Manifold::S_half, 1, -1}, IonLevel{Manifold::S_half, 1, +1}};
  return scheme;
}

std::vector<std::pair<TransitionDipole, double>> decay_channels(const IonLevel& excited,
                                                                const LevelScheme& scheme) {
  if (excited.manifold != Manifold::P_half)
    throw std::invalid_argument("decay_channels: input level must be in the P manifold");
  std::vector<std::pair<TransitionDipole, double>> out;
  for (int g = 0; g < 4; ++g) {
    TransitionDipole d = dipole_element(excited, level_from_index(g));
    if (d.rate_weight > 0.0) out.emplace_back(d, 1.5 * scheme.zeeman.gamma * d.rate_weight);
  }
  return out;
}

std::string dump_level_scheme(const LevelScheme& scheme) {
  std::string out;
  char buf[128];
  for (const IonLevel& lv : scheme.levels) {
    std::snprintf(buf, sizeof(buf), "%s F=%d m=%+d energy=%.12g\n",
                  lv.manifold == Manifold::S_half ? "S" : "P", lv.F, lv.m, scheme.energy(lv));
    out += buf;
  }
  out += "qubit: " + level_name(scheme.qubit.first) + " | " + level_name(scheme.qubit.second) + "\n";
  return out;
}

}  // namespace pmsim
