// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#include "invit/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace invit {

namespace {

char axis_char(PauliAxis a) {
  switch (a) {
    case PauliAxis::X: return 'X';
    case PauliAxis::Y: return 'Y';
    case PauliAxis::Z: return 'Z';
  }
  return '?';
}

PauliAxis parse_axis(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'X': return PauliAxis::X;
    case 'Y': return PauliAxis::Y;
    case 'Z': return PauliAxis::Z;
    default: throw ValidationError(std::string("unknown Pauli axis '") + c + "'");
  }
}

}  // namespace

std::uint64_t PauliTerm::x_mask() const {
  std::uint64_t m = 0;
  for (const auto& f : factors)
    if (f.axis != PauliAxis::Z) m |= std::uint64_t{1} << f.qubit;
  return m;
}

std::uint64_t PauliTerm::z_mask() const {
  std::uint64_t m = 0;
  for (const auto& f : factors)
    if (f.axis != PauliAxis::X) m |= std::uint64_t{1} << f.qubit;
  return m;
}

std::string PauliTerm::label() const {
  if (factors.empty()) return "I";
  std::string s;
  for (const auto& f : factors) {
    if (!s.empty()) s += ' ';
    s += axis_char(f.axis);
    s += std::to_string(f.qubit);
  }
  return s;
}

bool commutes(const PauliTerm& a, const PauliTerm& b) {
  const std::uint64_t anti =
      (a.x_mask() & b.z_mask()) ^ (a.z_mask() & b.x_mask());
  return std::popcount(anti) % 2 == 0;
}

PauliSum::PauliSum(int n_qubits, std::vector<PauliTerm> terms,
                   std::string energy_unit)
    : n_qubits_(n_qubits), unit_(std::move(energy_unit)) {
  if (n_qubits < 0 || n_qubits > 63)
    throw ValidationError("n_qubits must lie in [0, 63]");
  std::map<std::vector<PauliFactor>, double> merged;
  for (auto& t : terms) {
    if (!std::isfinite(t.coeff)) throw ValidationError("non-finite coefficient");
    std::sort(t.factors.begin(), t.factors.end());
    for (std::size_t i = 0; i < t.factors.size(); ++i) {
      const int q = t.factors[i].qubit;
      if (q < 0 || q >= n_qubits)
        throw ValidationError("qubit index " + std::to_string(q) +
                              " outside [0, " + std::to_string(n_qubits) + ")");
      if (i > 0 && t.factors[i - 1].qubit == q)
        throw ValidationError("repeated qubit " + std::to_string(q) + " in one term");
    }
    merged[t.factors] += t.coeff;
  }
  terms_.reserve(merged.size());
  for (auto& [f, c] : merged) terms_.push_back(PauliTerm{c, f});
}

double PauliSum::coefficient(std::vector<PauliFactor> factors) const {
  std::sort(factors.begin(), factors.end());
  for (const auto& t : terms_)
    if (t.factors == factors) return t.coeff;
  return 0.0;
}

PauliTerm make_term(double coeff, std::string_view label) {
  PauliTerm t{coeff, {}};
  std::istringstream in{std::string(label)};
  std::string tok;
  while (in >> tok) {
    if (tok == "I") continue;
    if (tok.size() < 2) throw ValidationError("bad Pauli token '" + tok + "'");
    t.factors.push_back({std::stoi(tok.substr(1)), parse_axis(tok[0])});
  }
  std::sort(t.factors.begin(), t.factors.end());
  return t;
}

PauliSum build_h2() {
  constexpr double xi[8] = {-0.098864, 0.171198, 0.222786, 0.168622,
                            0.120545,  0.165867, 0.174348, 0.045322};
  std::vector<PauliTerm> t = {
      make_term(xi[0], "I"),
      make_term(xi[1], "Z0"),          make_term(xi[1], "Z1"),
      make_term(-xi[2], "Z2"),         make_term(-xi[2], "Z3"),
      make_term(xi[3], "Z0 Z1"),
      make_term(xi[4], "Z0 Z2"),       make_term(xi[4], "Z1 Z3"),
      make_term(xi[5], "Z0 Z3"),       make_term(xi[5], "Z1 Z2"),
      make_term(xi[6], "Z2 Z3"),
      make_term(-xi[7], "X0 X1 Y2 Y3"), make_term(xi[7], "X0 Y1 Y2 X3"),
      make_term(xi[7], "Y0 X1 X2 Y3"),  make_term(-xi[7], "Y0 Y1 X2 X3"),
  };
  return PauliSum(4, std::move(t), "J");
}

PauliSum parse_pauli_sum(std::string_view json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed Pauli-sum JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n_qubits") || !j.contains("terms"))
    throw ValidationError("Pauli-sum JSON needs \"n_qubits\" and \"terms\"");
  if (!j["n_qubits"].is_number_integer())
    throw ValidationError("\"n_qubits\" must be an integer");
  const int n = j["n_qubits"].get<int>();
  std::string unit = "J";
  if (j.contains("energy_unit")) {
    if (!j["energy_unit"].is_string())
      throw ValidationError("\"energy_unit\" must be a string");
    unit = j["energy_unit"].get<std::string>();
  }
  if (!j["terms"].is_array()) throw ValidationError("\"terms\" must be an array");
  std::vector<PauliTerm> terms;
  for (const auto& jt : j["terms"]) {
    if (!jt.is_object() || !jt.contains("coeff"))
      throw ValidationError("each term needs a \"coeff\"");
    const auto& c = jt["coeff"];
    if (!c.is_number())
      throw ValidationError("coefficient must be a real number, got " + c.dump());
    PauliTerm t{c.get<double>(), {}};
    if (jt.contains("paulis")) {
      if (!jt["paulis"].is_array()) throw ValidationError("\"paulis\" must be an array");
      for (const auto& jp : jt["paulis"]) {
        if (!jp.is_object() || !jp.contains("q") || !jp.contains("axis") ||
            !jp["q"].is_number_integer() || !jp["axis"].is_string())
          throw ValidationError("Pauli factor needs integer \"q\" and string \"axis\"");
        const auto ax = jp["axis"].get<std::string>();
        if (ax.size() != 1) throw ValidationError("bad axis \"" + ax + "\"");
        t.factors.push_back({jp["q"].get<int>(), parse_axis(ax[0])});
      }
    }
    terms.push_back(std::move(t));
  }
  return PauliSum(n, std::move(terms), unit);
}

PauliSum load_pauli_sum(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open Pauli-sum file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pauli_sum(ss.str());
}

std::string to_json(const PauliSum& h) {
  using nlohmann::json;
  json j;
  j["n_qubits"] = h.n_qubits();
  j["energy_unit"] = h.energy_unit();
  j["terms"] = json::array();
  for (const auto& t : h.terms()) {
    json jt;
    jt["coeff"] = t.coeff;
    jt["paulis"] = json::array();
    for (const auto& f : t.factors)
      jt["paulis"].push_back({{"q", f.qubit}, {"axis", std::string(1, axis_char(f.axis))}});
    j["terms"].push_back(jt);
  }
  return j.dump(2);
}

HermitianOperator to_dense(const PauliSum& h, int qubit_cap) {
  if (h.n_qubits() > qubit_cap)
    throw ResourceError(std::to_string(h.n_qubits()) + " qubits exceed the dense cap of " +
                        std::to_string(qubit_cap));
  const std::size_t dim = std::size_t{1} << h.n_qubits();
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (const auto& t : h.terms()) {
    const std::uint64_t x = t.x_mask(), z = t.z_mask();
    const cplx base = t.coeff * ipow[std::popcount(x & z) % 4];
    for (std::uint64_t b = 0; b < dim; ++b) {
      const double sign = (std::popcount(b & z) % 2) ? -1.0 : 1.0;
      m(static_cast<Eigen::Index>(b ^ x), static_cast<Eigen::Index>(b)) += sign * base;
    }
  }
  return HermitianOperator(m);
}

std::size_t spin_index(const std::vector<Spin>& ket) {
  if (ket.size() > 63) throw DomainError("spin tuple longer than 63 entries");
  std::size_t idx = 0;
  for (Spin s : ket) idx = (idx << 1) | (s == Spin::Up ? 1u : 0u);
  return idx;
}

std::size_t spin_index(std::string_view ket) {
  std::vector<Spin> v;
  for (char c : ket) {
    const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (l == 'u') v.push_back(Spin::Up);
    else if (l == 'd') v.push_back(Spin::Down);
    else if (c == ',' || c == ' ') continue;
    else throw DomainError(std::string("bad spin character '") + c + "'");
  }
  return spin_index(v);
}

}  // namespace invit
