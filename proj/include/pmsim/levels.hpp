#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <utility>
#include <vector>

namespace pmsim {

enum class Manifold { S_half, P_half };
enum class Polarization { sigma_plus, sigma_minus, pi };

// One hyperfine sublevel of a J=1/2 manifold coupled to nuclear spin I=1/2.
struct IonLevel {
  Manifold manifold = Manifold::S_half;
  int F = 0;  // 0 or 1
  int m = 0;  // |m| <= F
  bool operator==(const IonLevel&) const = default;
};

// Canonical order: S(0,0), S(1,-1), S(1,0), S(1,+1), P(0,0), P(1,-1), P(1,0), P(1,+1).
int level_index(const IonLevel& lv);
IonLevel level_from_index(int idx);
std::string level_name(const IonLevel& lv);

struct ZeemanConfig {
  double delta1 = 0.0;  // Zeeman slope of the P, F=1 sublevels (per unit m)
  double delta2 = 0.0;  // Zeeman slope of the S, F=1 sublevels (per unit m)
  double gamma = 1.0;   // free-space rate unit; every upper level decays at 1.5*gamma
  double hyperfine_split_S = 643.0;  // lowering of S(F=0) relative to S(F=1)
  double hyperfine_split_P = 107.0;  // lowering of P(F=0) relative to P(F=1)
  // When true the far-detuned F=0 cross-excitation amplitude is dropped from the
  // delayed coupling; valid while the hyperfine splittings dwarf gamma.
  bool neglect_f0 = true;

  double delta() const { return (delta1 - delta2) / gamma; }
  bool splittings_large() const {
    return hyperfine_split_S > 50.0 * gamma && hyperfine_split_P > 50.0 * gamma;
  }
};

struct TransitionDipole {
  IonLevel excited;  // P manifold
  IonLevel ground;   // S manifold
  Polarization polarization = Polarization::pi;
  // Spherical components in the order q = -1, 0, +1; the single nonzero entry
  // sits at q = m_ground - m_excited. Condon-Shortley phases throughout.
  Eigen::Vector3cd spherical_components = Eigen::Vector3cd::Zero();
  double rate_weight = 0.0;  // fraction of the 1.5*gamma total carried by this channel
};

struct LevelScheme {
  std::vector<IonLevel> levels;  // the 8 states in canonical order
  ZeemanConfig zeeman;
  std::vector<TransitionDipole> dipoles;  // all nonzero P->S elements
  std::array<double, 8> energies{};       // rotating-frame offsets, canonical order
  std::pair<IonLevel, IonLevel> qubit;    // S(1,-1) and S(1,+1)

  double energy(const IonLevel& lv) const { return energies[level_index(lv)]; }
};

// Wigner symbols with doubled-integer spins so half-integers stay exact.
// Invalid couplings return 0 rather than throwing.
double wigner_3j(int two_j1, int two_j2, int two_j3, int two_m1, int two_m2, int two_m3);
double wigner_6j(int two_j1, int two_j2, int two_j3, int two_j4, int two_j5, int two_j6);
double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2, int two_J, int two_M);

LevelScheme build_level_scheme(const ZeemanConfig& zeeman);

// Dipole element for one P->S channel, normalised so the rate weights of each
// upper level sum to one. Forbidden channels come back as zero elements.
TransitionDipole dipole_element(const IonLevel& excited, const IonLevel& ground);

// Nonzero channels of one upper level, ordered by ground-state index, with the
// per-channel rate 1.5*gamma*rate_weight. Rejects S-manifold input.
std::vector<std::pair<TransitionDipole, double>> decay_channels(const IonLevel& excited,
                                                                const LevelScheme& scheme);

// One state per line (manifold, F, m, energy) plus the qubit assignment; used
// by golden-file tests and by the CLI.
std::string dump_level_scheme(const LevelScheme& scheme);

}  // namespace pmsim
