#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <icec/atomdata.hpp>
#include <sstream>

#include "support.hpp"

using namespace icec;
using icec::testing::registry;

namespace {

PhotoTable parse(const std::string& text) {
  std::istringstream in(text);
  return parse_pi_table(in, "test");
}

int parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

AtomicSpecies toy() {
  AtomicSpecies sp;
  sp.name = "Toy";
  sp.ip = units::from_ev(10);
  sp.g_neutral = 1;
  sp.g_ion = 2;
  sp.r_cov = 1;
  sp.orbital_degeneracy = 3;
  sp.pi_table = parse("photon_energy_eV,sigma_Mb\n10,8\n20,2\n40,1\n");
  return sp;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("icec_atomdata_" + name);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST(PhotoTable, ParsesAndConverts) {
  auto t = parse("# made up\n\nphoton_energy_eV,sigma_Mb\n 27.211386 , 28.00285\n30,1\n");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_DOUBLE_EQ(t.energy[0], 1.0);
  EXPECT_DOUBLE_EQ(t.sigma[0], 1.0);
  EXPECT_EQ(t.provenance, "made up");
}

TEST(PhotoTable, ReportsOffendingLine) {
  EXPECT_EQ(parse_error_line("photon_energy_eV,sigma_Mb\n10,1\n9,1\n"), 3);
  EXPECT_EQ(parse_error_line("photon_energy_eV,sigma_Mb\n10,1\n10,1\n"), 3);
  EXPECT_EQ(parse_error_line("# c\nphoton_energy_eV,sigma_Mb\n10,1\n11,-0.5\n"), 4);
  EXPECT_EQ(parse_error_line("photon_energy_eV,sigma_Mb\n10,abc\n"), 2);
  EXPECT_EQ(parse_error_line("photon_energy_eV,sigma_Mb\n10,1,2\n"), 2);
  EXPECT_EQ(parse_error_line("energy,sigma\n10,1\n"), 1);
  EXPECT_THROW(parse("# only comments\n"), ParseError);
  EXPECT_THROW(parse("photon_energy_eV,sigma_Mb\n"), ParseError);
}

TEST(PhotoTable, ShippedTablesLoad) {
  for (const auto& [name, sp] : registry()) {
    EXPECT_GE(sp.pi_table.size(), 10u) << name;
    EXPECT_FALSE(sp.pi_table.provenance.empty()) << name;
    EXPECT_NEAR(sp.pi_table.energy.front(), sp.ip, 1e-12) << name;
    for (double s : sp.pi_table.sigma) EXPECT_GT(s, 0) << name;
  }
  EXPECT_NEAR(units::to_ev(registry().at("He").ip), 24.59, 1e-9);
  EXPECT_NEAR(units::to_ev(registry().at("Ne").ip), 21.56, 1e-9);
}

TEST(PhotoIonization, InterpolationIsLogLog) {
  auto sp = toy();
  EXPECT_DOUBLE_EQ(pi_cross_section(sp, sp.pi_table.energy[1], false), sp.pi_table.sigma[1]);
  // midpoint in log omega gives the geometric mean
  double om = std::sqrt(sp.pi_table.energy[0] * sp.pi_table.energy[1]);
  EXPECT_NEAR(pi_cross_section(sp, om, false), std::sqrt(sp.pi_table.sigma[0] * sp.pi_table.sigma[1]), 1e-12);
  // a power law between nodes is reproduced: sigma ~ omega^-2 on [10, 20] eV
  double o = units::from_ev(13);
  EXPECT_NEAR(pi_cross_section(sp, o, false), sp.pi_table.sigma[0] * std::pow(10.0 / 13.0, 2), 1e-12);
}

TEST(PhotoIonization, PerOrbitalDivision) {
  auto sp = toy();
  for (double e : {10.0, 15.0, 33.0})
    EXPECT_DOUBLE_EQ(pi_cross_section(sp, units::from_ev(e), true) * 3, pi_cross_section(sp, units::from_ev(e), false));
  const auto& he = registry().at("He");
  double o = he.ip + units::from_ev(3);
  EXPECT_EQ(pi_cross_section(he, o, true), pi_cross_section(he, o, false));
}

TEST(PhotoIonization, ContinuousAcrossNodes) {
  for (const auto& [name, sp] : registry())
    for (std::size_t i = 1; i + 1 < sp.pi_table.size(); ++i) {
      double e = sp.pi_table.energy[i];
      double lo = pi_cross_section(sp, e * (1 - 1e-10), false), hi = pi_cross_section(sp, e * (1 + 1e-10), false);
      EXPECT_NEAR(lo / hi, 1.0, 1e-8) << name << " node " << i;
    }
}

TEST(PhotoIonization, OutOfRange) {
  auto sp = toy();
  EXPECT_THROW(pi_cross_section(sp, units::from_ev(9.9), false), ThresholdError);
  EXPECT_THROW(pi_cross_section(sp, units::from_ev(40.1), false), ExtrapolationError);
  sp.pi_table = parse("photon_energy_eV,sigma_Mb\n12,8\n20,2\n");
  EXPECT_THROW(pi_cross_section(sp, units::from_ev(11), false), ExtrapolationError);
}

TEST(Photorecombination, MilneFactorByHand) {
  // He at 1 eV: (g_He / g_He+) (omega / c k)^2 with omega = 25.59 eV
  const auto& he = registry().at("He");
  double eps = 1 / 27.211386;
  double omega = eps + 24.59 / 27.211386;
  double k = std::sqrt(2 * eps);
  double want = 0.5 * std::pow(omega / (137.035999084 * k), 2);
  EXPECT_NEAR(milne_factor(he, eps) / want, 1.0, 1e-12);
  EXPECT_NEAR(milne_factor(he, eps), 3.2e-4, 0.2e-4);
}

TEST(Photorecombination, RoundTripExact) {
  for (const auto& [name, sp] : registry()) {
    for (std::size_t i = 0; i < sp.pi_table.size(); ++i) {
      double eps = sp.pi_table.energy[i] - sp.ip;
      if (eps <= 0) continue;
      double back = pr_cross_section(sp, eps) / milne_factor(sp, eps);
      EXPECT_NEAR(back / sp.pi_table.sigma[i], 1.0, 1e-12) << name << " node " << i;
    }
  }
}

TEST(Photorecombination, DivergesAsInverseEnergy) {
  const auto& he = registry().at("He");
  double a = pr_cross_section(he, 1e-6), b = pr_cross_section(he, 1e-7);
  EXPECT_NEAR(b / a, 10.0, 1e-3);
  EXPECT_THROW(pr_cross_section(he, 0), DomainError);
  EXPECT_THROW(pr_cross_section(he, -1), DomainError);
}

TEST(Photorecombination, NonNegativeOverTable) {
  for (const auto& [name, sp] : registry()) {
    double top = sp.pi_table.energy.back() - sp.ip;
    for (int i = 1; i <= 200; ++i) EXPECT_GE(pr_cross_section(sp, top * i / 200), 0) << name;
  }
}

TEST(Species, GaussianWidths) {
  EXPECT_NEAR(units::to_angstrom(gaussian_width(registry().at("He"))), 0.448, 1e-12);
  EXPECT_NEAR(units::to_angstrom(gaussian_width(registry().at("Ne"))), 0.928, 1e-12);
  EXPECT_DOUBLE_EQ(gaussian_width(registry().at("Ne"), 1.0), registry().at("Ne").r_cov);
  EXPECT_THROW(gaussian_width(registry().at("He"), 0), DomainError);
}

TEST(Species, RegistryRejectsUnknownKeys) {
  auto d = scratch_dir("keys");
  std::ofstream(d / "t.csv") << "photon_energy_eV,sigma_Mb\n10,1\n20,0.5\n";
  std::ofstream(d / "r.ini") << "[Xx]\nip_eV = 10\ng_neutral = 1\ng_ion = 2\nr_cov_angstrom = 1\n"
                                "orbital_degeneracy = 1\npi_table_path = t.csv\ncolour = blue\n";
  EXPECT_THROW(load_species_registry(d / "r.ini"), ConfigError);
}

TEST(Species, RegistryRejectsMissingKeysAndBadValues) {
  auto d = scratch_dir("missing");
  std::ofstream(d / "t.csv") << "photon_energy_eV,sigma_Mb\n10,1\n20,0.5\n";
  std::ofstream(d / "a.ini") << "[Xx]\nip_eV = 10\ng_neutral = 1\ng_ion = 2\npi_table_path = t.csv\n"
                                "orbital_degeneracy = 1\n";
  EXPECT_THROW(load_species_registry(d / "a.ini"), ConfigError);
  std::ofstream(d / "b.ini") << "[Xx]\nip_eV = ten\ng_neutral = 1\ng_ion = 2\nr_cov_angstrom = 1\n"
                                "orbital_degeneracy = 1\npi_table_path = t.csv\n";
  EXPECT_THROW(load_species_registry(d / "b.ini"), ConfigError);
  // table starting below the ionization potential
  std::ofstream(d / "c.ini") << "[Xx]\nip_eV = 12\ng_neutral = 1\ng_ion = 2\nr_cov_angstrom = 1\n"
                                "orbital_degeneracy = 1\npi_table_path = t.csv\n";
  EXPECT_THROW(load_species_registry(d / "c.ini"), ConfigError);
  std::ofstream(d / "e.ini") << "[Xx]\nip_eV = 10\ng_neutral = 1\ng_ion = 2\nr_cov_angstrom = 1\n"
                                "orbital_degeneracy = 1\npi_table_path = nowhere.csv\n";
  EXPECT_THROW(load_species_registry(d / "e.ini"), ConfigError);
}

TEST(Species, RegistryResolvesRelativeTables) {
  auto d = scratch_dir("rel");
  std::filesystem::create_directories(d / "tables");
  std::ofstream(d / "tables" / "t.csv") << "photon_energy_eV,sigma_Mb\n10,1\n20,0.5\n";
  std::ofstream(d / "r.ini") << "[Xx]\nip_eV = 10\ng_neutral = 1\ng_ion = 2\nr_cov_angstrom = 1\n"
                                "orbital_degeneracy = 1\npi_table_path = tables/t.csv\n";
  auto reg = load_species_registry(d / "r.ini");
  ASSERT_EQ(reg.count("Xx"), 1u);
  EXPECT_EQ(reg.at("Xx").pi_table.size(), 2u);
}
