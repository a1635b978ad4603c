#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace chiral {

/// Every numeric threshold used by the checks, in one place.
struct Tolerances {
  double inversion = 1e-10;        // |A A^-1 - I| after a successful invert
  double residual = 1e-8;          // generic residual default
  double pivot_gate = 1e-12;       // LU singularity gate, relative to row norm
  double algebraic = 1e-10;        // derivative-free residuals
  double structural = 1e-12;       // exact-construction identities (P^2 = P, ...)
  double derivative = 1e-5;        // hard cap for finite-difference residuals at h = 1e-4
  double order_band = 0.1;         // |empirical order - 2|
  double identity = 1e-9;          // quasideterminant identities, relative
  double equivalence = 1e-9;       // qdet vs product forms, relative
  double closed_form = 1e-10;      // one-soliton closed form vs engine
  double closed_form_two = 1e-9;   // two-soliton closed form vs engine
  double asymptotic = 1e-8;        // |g g0^-1 - limit| at |r| = 20
  double factorization = 1e-12;    // product of single limits vs K-soliton limit
  double condition_warning = 1e6;  // qdet deleted-block condition number
  double condition_reject = 1e4;   // random draws above this are resampled
  double rounding_floor = 1e-12;   // residuals below this are reported as "floor"

  std::map<std::string, double> as_map() const {
    return {{"inversion", inversion},         {"residual", residual},
            {"pivot_gate", pivot_gate},       {"algebraic", algebraic},
            {"structural", structural},       {"derivative", derivative},
            {"order_band", order_band},       {"identity", identity},
            {"equivalence", equivalence},     {"closed_form", closed_form},
            {"closed_form_two", closed_form_two}, {"asymptotic", asymptotic},
            {"factorization", factorization}, {"condition_warning", condition_warning},
            {"condition_reject", condition_reject}, {"rounding_floor", rounding_floor}};
  }

  // Throws std::invalid_argument on an unknown name or negative value.
  void set(const std::string& name, double value) {
    if (!(value >= 0.0)) throw std::invalid_argument("tolerance '" + name + "' must be >= 0");
    double* slot = lookup(name);
    if (slot == nullptr) throw std::invalid_argument("unknown tolerance '" + name + "'");
    *slot = value;
  }

private:
  double* lookup(const std::string& name) {
    if (name == "inversion") return &inversion;
    if (name == "residual") return &residual;
    if (name == "pivot_gate") return &pivot_gate;
    if (name == "algebraic") return &algebraic;
    if (name == "structural") return &structural;
    if (name == "derivative") return &derivative;
    if (name == "order_band") return &order_band;
    if (name == "identity") return &identity;
    if (name == "equivalence") return &equivalence;
    if (name == "closed_form") return &closed_form;
    if (name == "closed_form_two") return &closed_form_two;
    if (name == "asymptotic") return &asymptotic;
    if (name == "factorization") return &factorization;
    if (name == "condition_warning") return &condition_warning;
    if (name == "condition_reject") return &condition_reject;
    if (name == "rounding_floor") return &rounding_floor;
    return nullptr;
  }
};

}  // namespace chiral
