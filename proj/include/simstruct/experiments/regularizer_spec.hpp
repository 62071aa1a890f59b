#pragma once

#include <cctype>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "simstruct/core/errors.hpp"
#include "simstruct/core/tensor.hpp"
#include "simstruct/regularizers.hpp"

namespace simstruct {

/// Textual regularizer description, e.g. `max(l1=auto, nuc[1]=auto)` or
/// `sum(l1=1, nuc[1,2]=0.5)`. Mode lists are one-based; a weight of `auto`
/// (or no weight) means 1 / ||x0||_(i). The bare word `auto` stands for
/// `max(l1=auto, nuc[1]=auto)`.
struct RegularizerSpec {
  struct Atom {
    NormAtom::Kind kind = NormAtom::Kind::EntrywiseL1;
    /// One-based modes; empty for a matrix nuclear norm written `nuc`.
    std::vector<int> modes;
    std::optional<double> weight;
  };

  CompositeRegularizer::Mode mode = CompositeRegularizer::Mode::Max;
  std::vector<Atom> atoms;

  bool needs_signal() const {
    for (const auto& a : atoms)
      if (!a.weight) return true;
    return false;
  }

  std::vector<NormAtom> norm_atoms(const Shape& shape) const {
    std::vector<NormAtom> out;
    for (const auto& a : atoms) {
      if (a.kind == NormAtom::Kind::EntrywiseL1) {
        out.push_back(NormAtom::l1(shape));
      } else if (a.modes.empty()) {
        out.push_back(NormAtom::nuclear(shape));
      } else {
        out.push_back(NormAtom::nuclear(shape, Bipartition::from_one_based(a.modes)));
      }
    }
    return out;
  }

  /// Builds the regularizer; `auto` weights are taken from x0.
  template <class Scalar>
  CompositeRegularizer resolve(const Shape& shape, const DenseTensor<Scalar>* x0 = nullptr) const {
    auto list = norm_atoms(shape);
    std::vector<double> w;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (atoms[i].weight) {
        w.push_back(*atoms[i].weight);
        continue;
      }
      if (!x0) throw ConfigError("regularizer uses auto weights but no signal is available");
      const double n = atom_norm(*x0, list[i]);
      if (!(n > 0)) throw DegenerateSignal("auto weight undefined: " + list[i].name() + " norm of x0 is 0");
      w.push_back(1.0 / n);
    }
    return CompositeRegularizer(mode, std::move(list), std::move(w));
  }

  std::string to_string() const {
    std::string s = mode == CompositeRegularizer::Mode::Sum ? "sum(" : "max(";
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (i) s += ", ";
      const auto& a = atoms[i];
      if (a.kind == NormAtom::Kind::EntrywiseL1) {
        s += "l1";
      } else {
        s += "nuc";
        if (!a.modes.empty()) {
          s += "[";
          for (std::size_t j = 0; j < a.modes.size(); ++j) s += (j ? "," : "") + std::to_string(a.modes[j]);
          s += "]";
        }
      }
      if (a.weight) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "=%.17g", *a.weight);
        s += buf;
      } else {
        s += "=auto";
      }
    }
    return s + ")";
  }
};

namespace detail {

class SpecParser {
 public:
  explicit SpecParser(const std::string& text) : s_(text) {}

  RegularizerSpec parse() {
    RegularizerSpec spec;
    skip();
    if (try_word("auto")) {
      spec.atoms = {{NormAtom::Kind::EntrywiseL1, {}, std::nullopt}, {NormAtom::Kind::Nuclear, {}, std::nullopt}};
      finish();
      return spec;
    }
    bool group = false;
    if (try_word("sum")) {
      spec.mode = CompositeRegularizer::Mode::Sum;
      group = true;
    } else if (try_word("max")) {
      group = true;
    }
    if (group) {
      expect('(');
      do spec.atoms.push_back(atom());
      while (accept(','));
      expect(')');
    } else {
      spec.atoms.push_back(atom());
    }
    finish();
    return spec;
  }

 private:
  RegularizerSpec::Atom atom() {
    RegularizerSpec::Atom a;
    skip();
    if (try_word("l1")) {
      a.kind = NormAtom::Kind::EntrywiseL1;
    } else if (try_word("nuc")) {
      a.kind = NormAtom::Kind::Nuclear;
      if (accept('[')) {
        do a.modes.push_back(integer());
        while (accept(','));
        expect(']');
      }
    } else {
      fail("expected an atom (l1 or nuc[...])");
    }
    if (accept('=')) {
      skip();
      if (!try_word("auto")) a.weight = number();
    }
    return a;
  }

  int integer() {
    skip();
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s_.substr(pos_), &used);
    } catch (const std::exception&) {
      fail("expected a mode number");
    }
    if (v < 1) fail("mode numbers are one-based");
    pos_ += used;
    return v;
  }

  double number() {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s_.substr(pos_), &used);
    } catch (const std::exception&) {
      fail("expected a weight");
    }
    if (!(v > 0)) fail("weights must be positive");
    pos_ += used;
    return v;
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  bool try_word(const std::string& w) {
    skip();
    if (s_.compare(pos_, w.size(), w) != 0) return false;
    const std::size_t end = pos_ + w.size();
    if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) return false;
    pos_ = end;
    return true;
  }
  void finish() {
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing text");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("regularizer spec '" + s_ + "': " + what + " at position " + std::to_string(pos_));
  }

  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline RegularizerSpec parse_regularizer_spec(const std::string& text) { return detail::SpecParser(text).parse(); }

}  // namespace simstruct
